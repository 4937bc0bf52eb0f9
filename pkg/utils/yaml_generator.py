"""
YAML Generator
Creates the structured YAML verification report.
"""

from datetime import datetime
from typing import Any, Dict, List, Optional

import yaml

from .parsing import to_plain


class YAMLGenerator:
    """Utility class for generating YAML output files."""

    @staticmethod
    def create_verification_yaml(
        results: List[Any],
        output_path: str,
        seed: int,
        tolerances: Optional[Dict[str, float]] = None
    ) -> Dict[str, Any]:
        """
        Create YAML file with the verification criteria.

        Args:
            results: CriterionResult objects (or their dicts)
            output_path: Path for output YAML
            seed: Seed the suites ran with
            tolerances: Tolerances.as_dict() of the run

        Returns:
            The data written
        """
        rows = [r.to_dict() if hasattr(r, "to_dict") else dict(r) for r in results]
        yaml_data = {
            "metadata": {
                "generated": datetime.now().isoformat(),
                "seed": seed,
                "tolerances": tolerances or {},
                "suites": sorted({r["suite"] for r in rows}),
                "passed": sum(1 for r in rows if r["passed"]),
                "total": len(rows),
            },
            "criteria": [
                {
                    "id": r["id"],
                    "title": r["title"],
                    "passed": bool(r["passed"]),
                    "details": to_plain(r.get("details", {})),
                }
                for r in rows
            ],
        }

        with open(output_path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(
                yaml_data,
                f,
                default_flow_style=False,
                sort_keys=False,
                allow_unicode=True
            )

        print(f"Created verification YAML: {output_path}")
        print(f"  Criteria passed: {yaml_data['metadata']['passed']}/{yaml_data['metadata']['total']}")
        return yaml_data

