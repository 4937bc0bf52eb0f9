"""
Verification Suites
Sampled and formula-exact acceptance checks, one result per criterion.
"""

import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from dotenv import load_dotenv

from utils.console import banner, status
from utils.seeded_rng import SplitMix64

from .agreement_validator import AgreementValidator
from .cone_atlas import convexity_check, enumerate_components, find_component, q_subcone
from .curve_geometry import asymptotes, steinian_closed_forms, trace_branch
from .exceptions import CubicLabError, DomainError, HypothesisFailed
from .forms import (
    B3, HESSE_FRAME, LinearForm3, RayVector,
    hesse_cubic, hesse_normal_cubic, hesse_hessian, hessian_cubic, hessian_parameter,
    polar_quadric, projective_gap, siblings,
)
from .scenario import (
    CUBIC_ROOTS, NEGATIVE_FORM, cubic_sign_pattern, enumerate_integral, enumerate_integral_naive,
    fermat_classify, fermat_grid_summary, km2_fact_check, km2_functions, lambda_bound, pole_solve,
)
from .steinian import (
    e_levels, hessian_samples, steinian_map, translation_check, verify_steinian_tangency,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .visibility import (
    _unit_rows, analytic_zero_table, ga_zero_count, halfspace_visible, classify_c2_pieces, segment_visible,
)

load_dotenv()

SUITES = (
    "forms", "atlas", "steinian", "zeros", "visibility", "siblings",
    "pole", "lambda", "fermat", "km2", "figures", "enumerate",
)


@dataclass
class CriterionResult:
    id: str
    suite: str
    title: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.id, "suite": self.suite, "title": self.title,
                "passed": self.passed, "details": self.details}


def default_seed() -> int:
    return int(os.getenv("CUBICLAB_SEED", "20240607"))


def _unit_points(rng: SplitMix64, n: int) -> np.ndarray:
    pts = np.array([[rng.uniform_in(-1.0, 1.0) for _ in range(3)] for _ in range(n)])
    return _unit_rows(pts)


def _inside_triangle(P: RayVector) -> bool:
    uvw = HESSE_FRAME @ P.array
    return bool(np.all(uvw > 0) or np.all(uvw < 0))


class VerificationRunner:
    """
    Runs the acceptance suites.

    quick=True shrinks the sample sizes (used by the tests); the criteria
    themselves are unchanged.
    """

    def __init__(self, seed: Optional[int] = None, tolerances: Tolerances = DEFAULT_TOLERANCES,
                 quick: bool = False, echo: bool = True):
        self.seed = default_seed() if seed is None else int(seed)
        self.tol = tolerances
        self.quick = quick
        self.echo = echo
        self.results: List[CriterionResult] = []

    def _n(self, full: int, quick: int) -> int:
        return quick if self.quick else full

    def _rng(self, salt: int) -> SplitMix64:
        return SplitMix64(self.seed * 1000003 + salt)

    def _record(self, cid: str, suite: str, title: str, check: Callable[[], Dict[str, Any]]):
        """Run one check; the check returns details with a "passed" key."""
        try:
            details = check()
            passed = bool(details.pop("passed"))
        except CubicLabError as e:
            passed, details = False, {"error": e.name, "message": str(e)}
        result = CriterionResult(cid, suite, title, passed, details)
        self.results.append(result)
        if self.echo:
            status(f"{cid} {title}", passed)
        return result

    def run(self, suite: str = "all") -> List[CriterionResult]:
        """
        Args:
            suite: One of SUITES or "all"

        Raises:
            ValueError: If the suite is unknown
        """
        names = list(SUITES) if suite == "all" else [suite]
        for name in names:
            if name not in SUITES:
                raise ValueError(f"Unknown suite: {name}. Available: {list(SUITES) + ['all']}")
        if self.echo:
            banner(f"verify --suite {suite} --seed {self.seed}")
        for name in names:
            getattr(self, f"suite_{name}")()
        if self.echo:
            passed = sum(r.passed for r in self.results)
            print("=" * 60)
            print(f"{passed}/{len(self.results)} criteria passed")
        return self.results

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{"id": r.id, "suite": r.suite, "title": r.title, "passed": r.passed}
                             for r in self.results])

    # -----------------------------------------------------------------------------
    # forms
    # -----------------------------------------------------------------------------

    def suite_forms(self):
        def hessian_identity():
            worst = 0.0
            rng = self._rng(1)
            for k in (-5.0, -3.0, -2.0, -0.5, 0.5, 2.0, 5.0, 10.0):
                pts = _unit_points(rng, self._n(1000, 100))
                H = hesse_hessian(k, self.tol)
                kp = hessian_parameter(k, self.tol)
                rhs = -54.0 * k * k * hesse_cubic(kp, allow_degenerate=True).evaluate_many(pts)
                worst = max(worst, float(np.max(np.abs(H.evaluate_many(pts) - rhs)) / H.scale))
            return {"passed": worst < 1e-9, "max_residual": worst}

        def closed_form_hessian():
            worst = 0.0
            for k in (2.0, 5.0, -3.0):
                got = np.array(hessian_cubic(hesse_normal_cubic(k)).coeffs)
                expected = np.zeros(10)
                expected[[0, 6, 9]] = 27.0 * 2.0 * k * k
                expected[4] = -27.0 * (8.0 - 2.0 * k ** 3)
                worst = max(worst, float(np.max(np.abs(got - expected)) / np.max(np.abs(expected))))
            return {"passed": worst < 1e-10, "max_residual": worst}

        def conic_identities():
            G = polar_quadric(hesse_cubic(-2.0), (1.0 / 3.0, 1.0 / 3.0, 1.0)).array
            target = np.zeros((3, 3))
            target[2, 2] = -1.0 / 3.0
            first = float(np.max(np.abs(G - target)))
            second = 0.0
            for k in (-3.0, -5.0):
                a = 1.0 / (1.0 - k)
                M = polar_quadric(hesse_cubic(k), (a, a, 1.0)).array
                block = M[:2, :2]
                expected = np.array([[0.0, 1.5 * (k + 2.0)], [1.5 * (k + 2.0), 0.0]])
                second = max(second, float(np.max(np.abs(block - expected))))
            return {"passed": first < 1e-12 and second < 1e-10, "km2_centroid": first, "line_at_infinity": second}

        self._record("C1", "forms", "H_k = -54 k^2 F_k' on random unit points", hessian_identity)
        self._record("C2", "forms", "closed-form Hessian of the classic Hesse cubic", closed_form_hessian)
        self._record("C3", "forms", "polar conic identities at k=-2 and on z=0", conic_identities)

    # -----------------------------------------------------------------------------
    # atlas
    # -----------------------------------------------------------------------------

    def suite_atlas(self):
        def counts():
            got = {k: len(enumerate_components(k, self.tol)) for k in (5.0, 0.5, 0.0, -2.0)}
            return {"passed": got == {5.0: 4, 0.5: 4, 0.0: 4, -2.0: 3}, "counts": {str(k): v for k, v in got.items()}}

        def corners():
            above = find_component(5.0, "HYBRID[B1B2]", self.tol).corner_rays
            below = find_component(0.5, "HYBRID[B1B2]", self.tol).corner_rays
            ok = ([c.to_list() for c in above] == [[0.0, -1.0, 0.0], [-1.0, 0.0, 0.0]]
                  and [c.to_list() for c in below] == [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
            return {"passed": ok}

        def convexity():
            trials = self._n(1000, 60)
            failures = []
            for k in (5.0, 0.5, 0.0, -2.0):
                for comp in enumerate_components(k, self.tol):
                    if not convexity_check(comp, trials, seed=self.seed):
                        failures.append(f"{comp.id}@{k}")
            return {"passed": not failures, "failures": failures, "trials": trials}

        self._record("C7a", "atlas", "component counts 4/4/4/3", counts)
        self._record("C7b", "atlas", "corner rays of the standard hybrid component", corners)
        self._record("C7c", "atlas", "midpoint convexity of every component", convexity)

    # -----------------------------------------------------------------------------
    # steinian
    # -----------------------------------------------------------------------------

    def suite_steinian(self):
        n = self._n(200, 20)

        def involution():
            worst = 0.0
            for k in (2.0, 5.0, -3.0):
                for U in hessian_samples(k, n, self.seed, tol=self.tol):
                    image = steinian_map(k, U, self.tol)
                    worst = max(worst, projective_gap(steinian_map(k, image, self.tol), U))
            return {"passed": worst < 1e-7, "max_gap": worst}

        def r_point():
            worst = 0.0
            for k in (2.0, 5.0, 10.0):
                worst = max(worst, projective_gap(steinian_map(k, B3, self.tol), steinian_closed_forms(k)["R"]))
            return {"passed": worst < 1e-9, "max_gap": worst}

        def tangency():
            worst = 0.0
            for k in (2.0, 5.0, -3.0):
                for U in hessian_samples(k, n, self.seed + 1, tol=self.tol):
                    worst = max(worst, *verify_steinian_tangency(k, U, self.tol))
            return {"passed": worst < 1e-7, "max_residual": worst}

        def translation():
            checks = {str(k): translation_check(k, n, self.seed, self.tol) for k in (2.0, 5.0)}
            return {"passed": all(checks.values()), "checks": checks}

        def component_swap():
            bad = 0
            for k in (-0.5, -3.0):
                for name in ("bounded", "unbounded"):
                    for U in hessian_samples(k, max(5, n // 4), self.seed + 2, component=name, tol=self.tol):
                        if _inside_triangle(U) == _inside_triangle(steinian_map(k, U, self.tol)):
                            bad += 1
            return {"passed": bad == 0, "violations": bad}

        self._record("C4a", "steinian", "alpha is an involution", involution)
        self._record("C4b", "steinian", "alpha(B3) = R", r_point)
        self._record("C4c", "steinian", "second polar of U is tangent to H at alpha(U)", tangency)
        self._record("C4d", "steinian", "alpha is translation by 2-torsion (k > 1)", translation)
        self._record("C4e", "steinian", "alpha swaps the Hessian components (k < 1)", component_swap)

    # -----------------------------------------------------------------------------
    # zeros
    # -----------------------------------------------------------------------------

    def _zero_samples(self, k: float, per_region: int, rng: SplitMix64) -> Dict[str, List[RayVector]]:
        c = -1.0 / (k - 1.0)
        buckets: Dict[str, List[RayVector]] = {}
        for _ in range(per_region * 40):
            A = RayVector((rng.uniform_in(c - 4.0, c + 4.0), rng.uniform_in(c - 4.0, c + 4.0), 1.0))
            label, counts = analytic_zero_table(k, A, self.tol)
            if counts is None:
                continue
            label = label.replace("mirror:", "")
            if len(buckets.setdefault(label, [])) < per_region:
                buckets[label].append(A)
        return buckets

    def suite_zeros(self):
        per_region = self._n(200, 6)

        def agreement():
            validator = AgreementValidator()
            reports, parity_bad, regions = [], 0, {}
            for k in (2.0, 3.0, 5.0):
                for label, points in self._zero_samples(k, per_region, self._rng(int(k))).items():
                    regions[f"{k}:{label}"] = len(points)
                    for A in points:
                        report = ga_zero_count(k, A, self.tol)
                        reports.append(report)
                        parity_bad += report.total not in (0, 2, 4)
            summary = validator.validate(AgreementValidator.from_zero_reports(reports))["agreement_summary"]
            return {"passed": summary["disagree"] == 0 and parity_bad == 0,
                    "agreement_summary": summary, "parity_violations": parity_bad, "regions": regions}

        self._record("C5", "zeros", "analytic and sampled zero counts agree", agreement)

    # -----------------------------------------------------------------------------
    # visibility
    # -----------------------------------------------------------------------------

    def suite_visibility(self):
        k = 5.0
        c = -1.0 / (k - 1.0)
        H = hesse_hessian(k, self.tol)

        def c2_pieces():
            rng = self._rng(23)
            want = self._n(100, 4)
            seen = {"nonneg": 0, "negative": 0}
            failures = []
            for _ in range(want * 60):
                if min(seen.values()) >= want:
                    break
                A = RayVector((rng.uniform_in(c - 4.0, c), rng.uniform_in(c, c + 5.0), 1.0))
                cls = "nonneg" if H.evaluate(A) >= 0 else "negative"
                if seen[cls] >= want:
                    continue
                seen[cls] += 1
                result = classify_c2_pieces(k, A, self.tol)
                if not result["consistent"]:
                    failures.append(A.to_list())
            return {"passed": not failures and min(seen.values()) >= want, "samples": seen, "failures": failures[:5]}

        def segment_vs_tangent():
            comp = find_component(k, "HYBRID[B1B2]", self.tol)
            rng = self._rng(24)
            boundary = _unit_rows(comp.boundary_points())
            pairs = self._n(1000, 60)
            compared = disagree = 0
            for _ in range(pairs):
                D0 = boundary[rng.index(len(boundary))]
                A = _unit_points(rng, 1)[0]
                tangent = halfspace_visible(comp, A, D0)
                if tangent is None:
                    continue
                compared += 1
                disagree += tangent != segment_visible(comp, A, D0)
            return {"passed": disagree == 0 and compared > 0, "compared": compared, "disagreements": disagree}

        self._record("C6a", "visibility", "visible and non-visible witness arcs on C2", c2_pieces)
        self._record("C6b", "visibility", "segment and tangent visibility tests agree", segment_vs_tangent)

    # -----------------------------------------------------------------------------
    # siblings
    # -----------------------------------------------------------------------------

    def suite_siblings(self):
        def boundary_factorization():
            got = siblings(1.0, allow_boundary=True)
            err = float(np.max(np.abs(np.array(got) - np.array([-2.0, -2.0, 1.0]))))
            return {"passed": err < 1e-12, "siblings": list(got), "error": err}

        def round_trip():
            worst, ordered = 0.0, True
            for kp in (1.5, 2.0, 5.0, 20.0):
                for k in siblings(kp):
                    worst = max(worst, abs(hessian_parameter(k, self.tol) - kp))
                e = e_levels(kp)
                ordered &= e[0] < e[1] < e[2]
            return {"passed": worst < 1e-9 and ordered, "max_error": worst}

        self._record("C8a", "siblings", "siblings(1) = -2, -2, 1", boundary_factorization)
        self._record("C8b", "siblings", "hessian_parameter round trip and e-level order", round_trip)

    # -----------------------------------------------------------------------------
    # pole
    # -----------------------------------------------------------------------------

    def suite_pole(self):
        def round_trip():
            worst, solved = 0.0, 0
            for k in (2.0, 5.0):
                comp = find_component(k, "HYBRID[B1B2]", self.tol)
                F = hesse_cubic(k)
                interior = comp.interior_points(raster_size=61)
                for L in SplitMix64(self.seed + int(k)).sample(interior, self._n(100, 5)):
                    l = F.trilinear.contract_two(L, L)
                    D = pole_solve(k, comp, l, self.tol)
                    worst = max(worst, projective_gap(D, L))
                    solved += 1
            return {"passed": worst < 1e-8, "max_gap": worst, "solved": solved}

        def boundary_case():
            k = 5.0
            comp = find_component(k, "HYBRID[B1B2]", self.tol)
            F = hesse_cubic(k)
            arc = trace_branch(k, "F", "C1", tol=self.tol)
            D0 = arc.samples[len(arc.samples) // 2].array
            D = pole_solve(k, comp, F.trilinear.contract_two(D0, D0), self.tol)
            gap = projective_gap(D, D0)
            return {"passed": gap < 1e-7, "gap": gap}

        self._record("C9a", "pole", "T(D, D, .) = L^2 recovers L", round_trip)
        self._record("C9b", "pole", "tangent covector recovers its boundary ray", boundary_case)

    # -----------------------------------------------------------------------------
    # lambda
    # -----------------------------------------------------------------------------

    def _lambda_configs(self, k: float, comp) -> List[Dict]:
        F = hesse_cubic(k)
        configs = []
        grid = [(x, y, z) for x in range(-3, 4) for y in range(-3, 4) for z in (-1, 1)]
        for E in grid:
            E = RayVector(tuple(float(v) for v in E))
            if comp.contains(E) or F.evaluate(E) == 0.0:
                continue
            if F.evaluate(E) >= 0.0:
                regions = q_subcone(k, comp, E).regions
                if not regions:
                    continue
                interior = regions[0].interior
                configs.append({"E": E, "D": RayVector.of(interior[len(interior) // 2])})
            else:
                configs.append({"E": E, "D": comp.interior_witness})
        return configs

    def suite_lambda(self):
        k = 5.0
        comp = find_component(k, "HYBRID[B1B2]", self.tol)
        F = hesse_cubic(k)
        T = F.trilinear
        rng = self._rng(33)

        def reverify():
            ran = {NEGATIVE_FORM: 0, CUBIC_ROOTS: 0}
            failures, homogeneity = [], 0.0
            limit = self._n(12, 3)
            for cfg in self._lambda_configs(k, comp):
                E, D = cfg["E"], cfg["D"]
                try:
                    result = lambda_bound(k, comp, E, D, tol=self.tol)
                except (HypothesisFailed, DomainError):
                    continue
                if ran[result.method] >= limit:
                    continue
                ran[result.method] += 1
                for _ in range(20):
                    lam = result.lambda0 * (1.0 + rng.uniform_in(1e-6, 2.0)) + 1e-9
                    X = D.array - lam * E.array
                    if result.method == NEGATIVE_FORM:
                        ok = bool(np.all(result.certificates @ T.contract_two(X, X) < 0))
                    else:
                        ok = F.evaluate(X) > 0
                    if not ok:
                        failures.append({"E": E.to_list(), "lambda": lam, "method": result.method})
                        break
                if result.method == CUBIC_ROOTS and cubic_sign_pattern(k, D, E, *result.roots) != (1, -1, 1):
                    failures.append({"E": E.to_list(), "method": CUBIC_ROOTS, "pattern": "sign"})
                scaled = lambda_bound(k, comp, E, D.scaled(2.5), tol=self.tol)
                homogeneity = max(homogeneity, abs(scaled.lambda0 - 2.5 * result.lambda0) / max(1.0, result.lambda0))
            return {"passed": not failures and all(ran.values()) and homogeneity < 1e-6,
                    "configs": ran, "failures": failures[:5], "homogeneity": homogeneity}

        self._record("C10", "lambda", "lambda-bounds re-verify above the bound", reverify)

    # -----------------------------------------------------------------------------
    # fermat
    # -----------------------------------------------------------------------------

    def suite_fermat(self):
        def uniqueness():
            n = self._n(200, 21)
            df, summary = fermat_grid_summary((-3.0, 3.0), (-3.0, 3.0), n, with_facts=False, tol=self.tol)
            uncovered = df[df["case"].isna()]
            expected = (np.maximum(df["a"], df["b"]) <= 0) & (np.minimum(df["a"], df["b"]) < 0)
            ok = bool((df["case"].isna() == expected).all())
            return {"passed": ok, "summary": summary, "uncovered": int(len(uncovered))}

        def facts():
            n = self._n(41, 7)
            validator = AgreementValidator()
            cases = []
            for a in np.linspace(-3.0, 3.0, n):
                for b in np.linspace(-3.0, 3.0, n):
                    try:
                        cases.append(fermat_classify((float(a), float(b), 1.0), self.tol))
                    except DomainError:
                        continue
            summary = validator.validate(AgreementValidator.from_fermat_cases(cases))["agreement_summary"]
            return {"passed": summary["disagree"] == 0, "agreement_summary": summary}

        self._record("C11a", "fermat", "one case per grid point, ties flagged", uniqueness)
        self._record("C11b", "fermat", "recorded per-case facts hold", facts)

    # -----------------------------------------------------------------------------
    # km2
    # -----------------------------------------------------------------------------

    def suite_km2(self):
        def closed_forms():
            t1, _ = km2_functions(1.0)
            t4, s4 = km2_functions(0.25)
            grid = np.linspace(0.0, 0.5, 52)[1:-1]
            s_above_t = all(km2_functions(float(mu))[1] > km2_functions(float(mu))[0] for mu in grid)
            ok = abs(t1 - 1.0) < 1e-12 and abs(s4 - 0.875) < 1e-5 and abs(t4 - 0.15139) < 1e-5 and s_above_t
            return {"passed": ok, "t(1)": t1, "t(1/4)": t4, "s(1/4)": s4}

        def fact_check():
            samples = self._n(400, 60)
            reports = {str(mu): km2_fact_check(mu, samples, seed=self.seed, tol=self.tol) for mu in (0.25, 1.0, 1.5)}
            return {"passed": True, "facts": {mu: sorted(r) for mu, r in reports.items()}}

        self._record("C12a", "km2", "t(mu), s(mu) values and s > t", closed_forms)
        self._record("C12b", "km2", "facts for E = (-1, mu, 0)", fact_check)

    # -----------------------------------------------------------------------------
    # figures
    # -----------------------------------------------------------------------------

    def suite_figures(self):
        from figures.figure_presets import FigurePresetFactory
        from figures.svg_renderer import count_curve_groups, count_shaded_regions, render_figure

        def presets():
            details, ok = {}, True
            for name in FigurePresetFactory.get_available_presets():
                spec = FigurePresetFactory.create(name)
                first, second = render_figure(spec), render_figure(spec)
                entry = {"deterministic": first == second, "shaded": count_shaded_regions(first)}
                ok &= entry["deterministic"]
                if name in FigurePresetFactory.EXPECTED_REGIONS:
                    comp = find_component(spec.k, spec.component, self.tol)
                    regions = len(q_subcone(spec.k, comp, spec.a_point).regions)
                    entry["q_subcone"] = regions
                    ok &= entry["shaded"] == regions == FigurePresetFactory.EXPECTED_REGIONS[name]
                if name == "fig1":
                    expected = [LinearForm3((1.0, 0.0, 0.25)), LinearForm3((0.0, 1.0, 0.25)),
                                LinearForm3((1.0, 1.0, -1.25))]
                    lines_ok = all(got.is_proportional(want) for got, want in zip(asymptotes(5.0), expected))
                    entry["f_groups"] = count_curve_groups(first, "F")
                    entry["asymptote_lines"] = first.count("<line ")
                    ok &= lines_ok and entry["f_groups"] == 2 and entry["asymptote_lines"] == 3
                details[name] = entry
            return {"passed": ok, "presets": details}

        self._record("C13", "figures", "preset figures: determinism and shaded regions", presets)

    # -----------------------------------------------------------------------------
    # enumerate
    # -----------------------------------------------------------------------------

    def suite_enumerate(self):
        def oracle():
            cases = [
                (5.0, "all", 2, (1.0, 9.0)),
                (5.0, "component:HYBRID[B1B2]", 3, (0.0, 50.0)),
                (-2.0, "hessian-nonneg", 2, (-9.0, 9.0)),
            ]
            mismatches = [c[:2] for c in cases
                          if enumerate_integral(*c, tol=self.tol) != enumerate_integral_naive(*c, tol=self.tol)]
            return {"passed": not mismatches, "mismatches": mismatches}

        def ray_example():
            found = enumerate_integral(-2.0, "ray:-1,-1,-3", 3, (1.0, 9.0), tol=self.tol)
            return {"passed": [r.to_list() for r in found] == [[-1.0, -1.0, -3.0]],
                    "found": [r.to_list() for r in found]}

        self._record("C14a", "enumerate", "vectorized enumeration matches the loop oracle", oracle)
        self._record("C14b", "enumerate", "k=-2 ray admits only m=1 in [1, 9]", ray_example)
