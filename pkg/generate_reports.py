"""
Generate reports
Runs the verification suites and writes the YAML/CSV reports, a zero-count
sweep and the five preset figures into the output directory.
"""

import os
import sys
from datetime import datetime
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

from figures import FigurePresetFactory, render_figure
from hesse.error_handler import ErrorHandler, is_error
from hesse.forms import RayVector
from hesse.tolerances import Tolerances
from hesse.verify import VerificationRunner
from hesse.visibility import ga_zero_count
from utils import CSVGenerator, YAMLGenerator

load_dotenv()

SWEEP_K = 5.0
SWEEP_GRID = np.linspace(-3.0, 3.0, 13)


def zero_count_sweep(k: float, tol: Tolerances):
    """G_A zero counts for A = (a, b, 1) over the sweep grid; failing points are skipped."""
    handler = ErrorHandler()
    rows = []
    for a in SWEEP_GRID:
        for b in SWEEP_GRID:
            report = handler.execute(ga_zero_count, k, RayVector((float(a), float(b), 1.0)), tol)
            if is_error(report):
                print(f"[WARN] A=({a:g},{b:g},1): {report['error']}")
                continue
            rows.append(report.to_dict())
    return rows


def generate_reports(output_dir: str, seed=None, quick: bool = False):
    """Generate all reports into output_dir."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    tol = Tolerances.from_env()

    # 1. Verification suites
    runner = VerificationRunner(seed=seed, tolerances=tol, quick=quick)
    results = runner.run("all")
    YAMLGenerator.create_verification_yaml(results, str(out / f"verification_{timestamp}.yaml"),
                                           runner.seed, tol.as_dict())
    CSVGenerator.create_results_csv(results, str(out / f"verification_{timestamp}.csv"))

    # 2. Zero-count sweep
    rows = zero_count_sweep(SWEEP_K, tol)
    CSVGenerator.create_zero_count_csv(rows, str(out / f"zero_counts_k{SWEEP_K:g}_{timestamp}.csv"))

    # 3. Figures
    for name in FigurePresetFactory.get_available_presets():
        path = out / f"{name}.svg"
        path.write_text(render_figure(FigurePresetFactory.create(name)), encoding="utf-8")
        print(f"[OK] Figure saved to: {path}")

    print(f"\n{'=' * 60}")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed (seed {runner.seed})")
    print("=" * 60)
    return runner.all_passed


if __name__ == "__main__":
    quick = "--quick" in sys.argv[1:]
    positional = [a for a in sys.argv[1:] if not a.startswith("--")]
    output_dir = positional[0] if positional else os.getenv("CUBICLAB_OUTPUT_DIR", "outputs")
    sys.exit(0 if generate_reports(output_dir, quick=quick) else 1)
