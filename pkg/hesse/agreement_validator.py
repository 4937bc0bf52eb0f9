"""
Agreement Validator
Compares closed-form predictions with sampled measurements and summarizes
how often they agree.
"""

from collections import Counter
from typing import Any, Dict, List

AGREE = "agree"
DISAGREE = "disagree"
TIE = "tie"
UNPREDICTED = "unpredicted"


class AgreementValidator:
    """
    Aggregates analytic-vs-sampled comparisons (zero counts, Fermat facts,
    visibility verdicts) into an agreement summary.
    """

    def __init__(self, agreement_threshold: float = 1.0):
        """
        Args:
            agreement_threshold: Minimum agreement rate for the summary to pass (0.0-1.0)
        """
        self.agreement_threshold = agreement_threshold

    def validate(self, comparisons: List[Dict[str, Any]]) -> Dict[str, Any]:
        """
        Classify every comparison and summarize.

        Args:
            comparisons: Dicts with "id", "analytic", "sampled" and optionally
                "tie" (the analytic side sits on a case boundary)

        Returns:
            {"comparisons": [... with "status"], "agreement_summary": {...}}
        """
        rows = []
        for item in comparisons:
            rows.append({**item, "status": self._status(item)})

        counts = Counter(r["status"] for r in rows)
        decided = counts[AGREE] + counts[DISAGREE]
        rate = counts[AGREE] / decided if decided else 1.0
        summary = {
            "total": len(rows),
            "agree": counts[AGREE],
            "disagree": counts[DISAGREE],
            "tie": counts[TIE],
            "unpredicted": counts[UNPREDICTED],
            "agreement_rate": rate,
            "passed": rate >= self.agreement_threshold,
        }
        return {"comparisons": rows, "agreement_summary": summary}

    def _status(self, item: Dict[str, Any]) -> str:
        if item.get("tie"):
            return TIE
        analytic = item.get("analytic")
        if analytic is None:
            return UNPREDICTED
        return AGREE if self._same(analytic, item.get("sampled")) else DISAGREE

    @staticmethod
    def _same(analytic: Any, sampled: Any) -> bool:
        # zero-count dicts: only the arcs with a nonzero count matter
        if isinstance(analytic, dict) and isinstance(sampled, dict):
            return {k: v for k, v in analytic.items() if v} == {k: v for k, v in sampled.items() if v}
        return analytic == sampled

    @staticmethod
    def from_zero_reports(reports) -> List[Dict[str, Any]]:
        """Comparisons from ZeroCountReport objects."""
        return [
            {"id": f"k={r.k} A={r.A.to_list()}", "analytic": r.analytic, "sampled": r.counts,
             "tie": r.analytic is None and r.analytic_case == "tie"}
            for r in reports
        ]

    @staticmethod
    def from_fermat_cases(cases) -> List[Dict[str, Any]]:
        """Comparisons from FermatCase objects: each asserted fact against its measurement."""
        rows = []
        for fc in cases:
            for fact, holds in fc.expected.items():
                rows.append({"id": f"A={fc.A.to_list()} case {fc.case_id}: {fact}",
                             "analytic": True, "sampled": holds, "tie": fc.tie})
        return rows
