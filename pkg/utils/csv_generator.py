"""
CSV Generator
Creates CSV files for verification results and zero-count sweeps.
"""

from typing import Any, Dict, List

import pandas as pd


class CSVGenerator:
    """Utility class for generating CSV output files."""

    @staticmethod
    def create_results_csv(results: List[Any], output_path: str) -> pd.DataFrame:
        """
        Create CSV with one row per verification criterion.

        Args:
            results: CriterionResult objects (or their dicts)
            output_path: Path for output CSV

        Returns:
            The DataFrame written
        """
        rows = [r.to_dict() if hasattr(r, "to_dict") else dict(r) for r in results]
        df = pd.DataFrame(
            [{"ID": r["id"], "Suite": r["suite"], "Title": r["title"], "Passed": r["passed"]} for r in rows],
            columns=["ID", "Suite", "Title", "Passed"],
        )
        df.to_csv(output_path, index=False)
        print(f"Created results CSV: {output_path}")
        return df

    @staticmethod
    def create_zero_count_csv(rows: List[Dict[str, Any]], output_path: str) -> pd.DataFrame:
        """
        Create CSV of zero-count reports.

        Args:
            rows: ZeroCountReport.to_dict() outputs
            output_path: Path for output CSV

        Returns:
            The DataFrame written
        """
        records = []
        for row in rows:
            counts = row.get("counts", {})
            records.append({
                "k": row.get("k"),
                "a": row["A"][0] / row["A"][2] if row["A"][2] else None,
                "b": row["A"][1] / row["A"][2] if row["A"][2] else None,
                "C1": counts.get("C1", 0),
                "B1R": counts.get("B1R", 0),
                "R": counts.get("R", 0),
                "RB2": counts.get("RB2", 0),
                "Total": row.get("total"),
                "Analytic Case": row.get("analytic_case") or "",
                "Agree": row.get("agree"),
            })
        df = pd.DataFrame(records)
        df.to_csv(output_path, index=False)
        print(f"Created zero-count CSV: {output_path}")
        return df
