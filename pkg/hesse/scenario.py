"""
Scenario
Decision machinery built on the atlas: lambda-bounds for D - lambda E, the
solver for T(D, D, .) = l, the case table of the Fermat cubic (k = 0), the
facts of the k = -2 case, and bounded enumeration of integral classes.
"""

import math
import os
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from utils.console import log
from utils.seeded_rng import SplitMix64

from .cone_atlas import (
    ConeComponent, Region, find_component, q_subcone,
)
from .curve_geometry import asymptotes, trace_branch
from .exceptions import AtInfinity, DomainError, HypothesisFailed, NoConvergence
from .forms import (
    B1, B2, HESSE_FRAME, LinearForm3, RayVector,
    hesse_cubic, hesse_hessian, polar_quadric, real_cubic_roots, split_line_pair,
)
from .tolerances import DEFAULT_TOLERANCES, DEFAULT_TRACE, Tolerances, TraceSettings
from .visibility import _arc_zeros, _unit_rows, on_boundary, segment_visible

NEGATIVE_FORM = "NEGATIVE_FORM"
CUBIC_ROOTS = "CUBIC_ROOTS"
UNDEFINED = "UNDEFINED"
MU_TOL = 1e-12


def _vec(v) -> np.ndarray:
    if isinstance(v, (RayVector, LinearForm3)):
        return v.array
    return np.asarray(v, dtype=float)


# ---------------------------------------------------------------------------------
# lambda-bounds
# ---------------------------------------------------------------------------------

@dataclass
class LambdaBoundResult:
    """
    Attributes:
        lambda0: Bound past which D - lambda E fails the sign test
        method: NEGATIVE_FORM or CUBIC_ROOTS
        certificates: Unit rays of the closure of Q (NEGATIVE_FORM)
        roots: (lambda1, lambda2) of t -> F(D - tE) (CUBIC_ROOTS)
    """

    lambda0: float
    method: str
    certificates: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)), repr=False)
    roots: Tuple[float, ...] = ()

    @property
    def certificate_count(self) -> int:
        return len(self.certificates) if self.method == NEGATIVE_FORM else len(self.roots)

    def to_dict(self) -> Dict:
        return {
            "lambda0": self.lambda0,
            "method": self.method,
            "certificate_count": self.certificate_count,
            "roots": list(self.roots),
        }


def _region_of(k: float, comp: ConeComponent, E: RayVector, D: RayVector,
               settings: TraceSettings) -> Region:
    for region in q_subcone(k, comp, E, settings).regions:
        if region.contains(D):
            return region
    raise DomainError(f"D={D.to_list()} is not in a region of Q for E={E.to_list()}")


def closure_certificates(comp: ConeComponent, region: Region) -> np.ndarray:
    """Unit rays covering the closure of a region: interior cells, hull vertices, boundary arc samples."""
    boundary = comp.boundary_points()
    near = region.in_hull(boundary)
    rows = np.vstack([region.interior, region.polygon, boundary[near]])
    return _unit_rows(rows)


def lambda_bound(k: float, comp: ConeComponent, E, D,
                 settings: TraceSettings = DEFAULT_TRACE,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> LambdaBoundResult:
    """
    Upper bound lambda0 on the lambda for which D - lambda E can stay usable.

    If F(E) >= 0, E^2 must be negative on the closure of the region of Q
    holding D; lambda0 is then the least lambda making (D - lambda E)^2
    negative on every certificate ray. Each certificate contributes the
    positive root of a concave quadratic in lambda and lambda0 is their max.
    If F(E) < 0, lambda0 is the larger positive root of t -> F(D - tE).

    Raises:
        DomainError: If D is not in a region of Q, or E lies in the closed component
        HypothesisFailed: If the sign certificate fails (the failing sample is attached)
    """
    E = E if isinstance(E, RayVector) else RayVector.of(E)
    D = D if isinstance(D, RayVector) else RayVector.of(D)
    if comp.contains(E):
        raise DomainError(f"E={E.to_list()} lies inside {comp.id}")
    if on_boundary(comp, E.array):
        raise DomainError(f"E={E.to_list()} lies on the boundary of {comp.id}")
    F = hesse_cubic(k, allow_degenerate=True, tol=tol)
    T = F.trilinear
    e, d = E.array, D.array

    if F.evaluate(e) >= 0.0:
        region = _region_of(k, comp, E, D, settings)
        certs = closure_certificates(comp, region)
        M_E = T.contract_two(e, e)
        a = certs @ M_E
        worst = int(np.argmax(a))
        if a[worst] >= 0.0:
            raise HypothesisFailed(
                f"E^2 . L = {a[worst]:.3e} is not negative on the closure of Q", sample=certs[worst].tolist()
            )
        b = certs @ T.contract_two(d, e)
        c = certs @ T.contract_two(d, d)
        disc = b * b - a * c
        roots = np.where(disc >= 0.0, (b - np.sqrt(np.maximum(disc, 0.0))) / a, -np.inf)
        lambda0 = max(0.0, float(np.max(roots)))
        log(f"lambda_bound NEGATIVE_FORM over {len(certs)} certificates: {lambda0:.9g}", "INFO")
        return LambdaBoundResult(lambda0, NEGATIVE_FORM, certificates=certs)

    coeffs = (-F.evaluate(e), 3.0 * T(d, e, e), -3.0 * T(d, d, e), F.evaluate(d))
    positive = sorted(r for r, m in real_cubic_roots(coeffs) for _ in range(m) if r > 0)
    if len(positive) < 2:
        raise HypothesisFailed(f"(D - tE)^3 has positive roots {positive}; expected two", sample=d.tolist())
    lam1, lam2 = positive[0], positive[-1]
    return LambdaBoundResult(lam2, CUBIC_ROOTS, roots=(lam1, lam2))


def cubic_sign_pattern(k: float, D, E, lambda1: float, lambda2: float) -> Tuple[int, int, int]:
    """Signs of F(D - tE) on (0, l1), (l1, l2) and beyond l2, at the interval midpoints."""
    F = hesse_cubic(k, allow_degenerate=True)
    d, e = _vec(D), _vec(E)
    probes = (0.5 * lambda1, 0.5 * (lambda1 + lambda2), 2.0 * lambda2)
    return tuple(int(np.sign(F.evaluate(d - t * e))) for t in probes)


# ---------------------------------------------------------------------------------
# T(D, D, .) = l
# ---------------------------------------------------------------------------------

def double_polar(k: float, D) -> np.ndarray:
    """The covector T(D, D, .)."""
    d = _vec(D)
    return hesse_cubic(k, allow_degenerate=True).trilinear.contract_two(d, d)


def pole_residual(k: float, D, l) -> float:
    target = _vec(l)
    return float(np.max(np.abs(double_polar(k, D) - target)) / np.max(np.abs(target)))


def _newton(k: float, seed: np.ndarray, target: np.ndarray, tol: Tolerances,
            max_iter: int = 100) -> np.ndarray:
    """Damped Newton on T(D, D, .) = target; the Jacobian is 2 T(D, ., .)."""
    T = hesse_cubic(k, allow_degenerate=True).trilinear
    scale = float(np.max(np.abs(target)))
    x = seed.copy()
    r = T.contract_two(x, x) - target
    for _ in range(max_iter):
        if np.max(np.abs(r)) / scale < tol.newton_residual:
            return x
        J = 2.0 * T.contract_one(x)
        try:
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError as e:
            raise NoConvergence(f"singular Jacobian at {x.tolist()}") from e
        alpha = 1.0
        while alpha > 1e-6:
            trial = x - alpha * step
            r_trial = T.contract_two(trial, trial) - target
            if np.max(np.abs(r_trial)) < np.max(np.abs(r)):
                x, r = trial, r_trial
                break
            alpha *= 0.5
        else:
            raise NoConvergence(f"line search stalled at {x.tolist()}")
    if np.max(np.abs(r)) / scale < tol.newton_residual:
        return x
    raise NoConvergence(f"residual {np.max(np.abs(r)) / scale:.3e} after {max_iter} iterations")


def _pole_seeds(k: float, comp: ConeComponent, target: np.ndarray) -> Iterator[np.ndarray]:
    """Coarse interior points rescaled so T(D, D, .) matches target in size, best first."""
    T = hesse_cubic(k, allow_degenerate=True).trilinear
    points = comp.interior_points(raster_size=41)
    scored = []
    for p in points:
        g = T.contract_two(p, p)
        gl = float(g @ target)
        if gl <= 0.0:
            continue
        s = math.sqrt(gl / float(g @ g))
        scored.append((float(np.linalg.norm(s * s * g - target)), s * p))
    scored.sort(key=lambda item: item[0])
    for _, seed in scored:
        yield seed


def pole_solve(k: float, comp: ConeComponent, l,
               tol: Tolerances = DEFAULT_TOLERANCES,
               max_restarts: Optional[int] = None) -> RayVector:
    """
    The class D in the closed component with T(D, D, .) = l.

    Newton runs from the best raster seed; on NoConvergence, or when it lands
    on a preimage outside the component, tenacity restarts it from the next
    seed.

    Raises:
        HypothesisFailed: If l is negative somewhere on the component
        NoConvergence: If every restart fails
    """
    target = _vec(l)
    samples = _unit_rows(np.vstack([comp.interior_points(raster_size=41), comp.boundary_points()]))
    values = samples @ target
    worst = int(np.argmin(values))
    if values[worst] < -1e-9 * float(np.max(np.abs(target))):
        raise HypothesisFailed(f"l is negative on {comp.id}", sample=samples[worst].tolist())

    restarts = max_restarts if max_restarts is not None else int(os.getenv("CUBICLAB_POLE_RESTARTS", "6"))
    if restarts < 0:
        raise ValueError(f"max_restarts must be >= 0, got {restarts}")
    seeds = _pole_seeds(k, comp, target)

    def attempt_once() -> np.ndarray:
        seed = next(seeds, None)
        if seed is None:
            raise NoConvergence("no seeds left")
        x = _newton(k, seed, target, tol)
        if comp.chart_normal @ x < 0:
            x = -x
        if not (comp.contains(x) or on_boundary(comp, x)):
            raise NoConvergence(f"converged to {x.tolist()} outside {comp.id}")
        return x

    # the first run plus the restarts
    for attempt in Retrying(stop=stop_after_attempt(restarts + 1),
                            retry=retry_if_exception_type(NoConvergence), reraise=True):
        with attempt:
            solution = attempt_once()
    return RayVector.of(solution)


# ---------------------------------------------------------------------------------
# Fermat cubic (k = 0)
# ---------------------------------------------------------------------------------

def _fermat_predicates(a: float, b: float) -> List[int]:
    """Case numbers whose inequalities hold at (a, b)."""
    cases = []
    if a >= 1 and b >= 1:
        cases.append(1)
    if 0 <= a <= 1 and 0 <= b <= 1 and (a, b) != (1.0, 1.0):
        cases.append(2)
    if 0 < a < 1 and b >= 1:
        cases.append(3)
    if a == 0 and b > 1:
        cases.append(4)
    if a < 0 and b >= 1:
        cases.append(5)
    if a < 0 and 0 < b < 1:
        cases.append(6)
    return cases


@dataclass
class FermatCase:
    """
    Attributes:
        case_id: 1..6
        mirrored: The case applies to (b, a); facts are computed there
        tie: More than one case matched; the lowest was taken
        facts: Measured facts at the (possibly mirrored) point
        expected: The facts the case asserts, with whether each holds
    """

    case_id: int
    A: RayVector
    mirrored: bool = False
    tie: bool = False
    facts: Dict = field(default_factory=dict)
    expected: Dict[str, bool] = field(default_factory=dict)

    @property
    def facts_hold(self) -> bool:
        return all(self.expected.values())

    def to_dict(self) -> Dict:
        return {
            "case_id": self.case_id,
            "A": self.A.to_list(),
            "mirrored": self.mirrored,
            "tie": self.tie,
            "facts": self.facts,
            "expected": self.expected,
            "facts_hold": self.facts_hold,
        }


def fermat_case_id(a: float, b: float) -> Tuple[int, bool, bool]:
    """(case, mirrored, tie) for the affine point (a, b, 1).

    Raises:
        DomainError: For max(a, b) <= 0 < -min(a, b), where -A lies in the closed cone over the negative quadrant
    """
    direct = [(c, False) for c in _fermat_predicates(a, b)]
    mirror = [(c, True) for c in _fermat_predicates(b, a)]
    matches = sorted(set(direct + mirror))
    if not matches:
        raise DomainError(f"A=({a}, {b}, 1) is not covered by the case table")
    case, mirrored = matches[0]
    return case, mirrored, len({c for c, _ in matches}) > 1


def _lines_zero_count(M: np.ndarray, line: str) -> int:
    """
    Zeros of G_A on L1 (x = 0, y <= 0) or L2 (y = 0, x <= 0), with multiplicity,
    from the restricted quadratic in the free coordinate.
    """
    i = 1 if line == "L1" else 0
    qa, qb, qc = M[i, i], 2.0 * M[i, 2], M[2, 2]
    if abs(qa) < 1e-14:
        return int(abs(qb) > 1e-14 and -qc / qb <= 0.0)
    disc = qb * qb - 4.0 * qa * qc
    if disc < -1e-14:
        return 0
    if abs(disc) <= 1e-14:
        return 2 if -qb / (2.0 * qa) <= 0.0 else 0
    s = math.sqrt(disc)
    roots = ((-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa))
    return sum(1 for r in roots if r <= 0.0)


def fermat_facts(A, tol: Tolerances = DEFAULT_TOLERANCES) -> Dict:
    """
    Measured facts for G_A on the Fermat cubic: zero counts on C1, L1 and L2,
    the Hessian sign, G_A at B1 and B2, negativity on P, membership of A in P,
    and visibility of the C2 probes near B1 and B2. Works for A at infinity too.
    """
    A = A if isinstance(A, RayVector) else RayVector.of(A)
    F = hesse_cubic(0.0)
    H = hesse_hessian(0.0, tol)
    comp = find_component(0.0, "HYBRID[B1B2]", tol)
    a_unit = A.array / np.linalg.norm(A.array)
    M = polar_quadric(F, a_unit).array
    c1 = trace_branch(0.0, "F", "C1", tol=tol)
    c1_zeros = sum(m for _, m, _ in _arc_zeros(F, M, _unit_rows(c1.array)))
    closure = _unit_rows(np.vstack([comp.interior_points(raster_size=61), comp.boundary_points()]))
    interior = _unit_rows(comp.interior_points(raster_size=61))
    h_value = H.normalized_value(A)
    probe_b1 = np.array([0.0, 50.0, -1.0])
    probe_b2 = np.array([50.0, 0.0, -1.0])
    return {
        "hessian_sign": 0 if abs(h_value) < tol.on_curve_abs else int(np.sign(h_value)),
        "ga_b1_sign": int(np.sign(float(B1.array @ M @ B1.array))),
        "ga_b2_sign": int(np.sign(float(B2.array @ M @ B2.array))),
        "zeros_c1": int(c1_zeros),
        "zeros_l1": _lines_zero_count(M, "L1"),
        "zeros_l2": _lines_zero_count(M, "L2"),
        "negative_on_interior": bool(np.all(np.einsum("ni,ij,nj->n", interior, M, interior) < 0)),
        "max_on_closure": float(np.max(np.einsum("ni,ij,nj->n", closure, M, closure))),
        "in_interior": comp.contains(A),
        "probe_b1_visible": segment_visible(comp, a_unit, probe_b1),
        "probe_b2_visible": segment_visible(comp, a_unit, probe_b2),
        "corner_b1_visible": segment_visible(comp, a_unit, B1.array),
        "corner_b2_visible": segment_visible(comp, a_unit, B2.array),
    }


def _expected_facts(case: int, a: float, b: float, facts: Dict) -> Dict[str, bool]:
    h = facts["hessian_sign"]
    c2_zeros = facts["zeros_l1"] + facts["zeros_l2"]
    corner_signs = facts["ga_b1_sign"] < 0 < facts["ga_b2_sign"]
    if case == 1:
        expected = {"H(A) > 0": h > 0, "no zeros on C2": c2_zeros == 0}
        # from inside P no boundary ray is visible
        if not facts["in_interior"]:
            expected["two zeros on closed C1"] = facts["zeros_c1"] == 2
            expected["all of C2 visible"] = facts["probe_b1_visible"] and facts["probe_b2_visible"]
        return expected
    if case == 2:
        if a + b <= 1:
            return {"H(A) <= 0": h <= 0, "G_A negative on P": facts["negative_on_interior"]}
        return {"H(A) > 0": h > 0, "one zero on L1": facts["zeros_l1"] == 1,
                "one zero on L2": facts["zeros_l2"] == 1, "no zeros on C1": facts["zeros_c1"] == 0}
    if case == 3:
        return {"H(A) > 0": h > 0, "zero on L1": facts["zeros_l1"] == 1,
                "G_A(B1) < 0 < G_A(B2)": corner_signs,
                "L2 visible": facts["probe_b2_visible"]}
    if case == 4:
        return {"H(A) = 0": h == 0, "zero on L1": facts["zeros_l1"] >= 1,
                "G_A(B1) < 0 < G_A(B2)": corner_signs,
                "corners B1 and B2 visible": facts["corner_b1_visible"] and facts["corner_b2_visible"]}
    if case == 5:
        expected = {"G_A(B1) < 0 < G_A(B2)": corner_signs}
        if a + b < 1:
            expected.update({"H(A) > 0": h > 0, "zero on L2": facts["zeros_l2"] >= 1,
                             "near B2 visible": facts["probe_b2_visible"]})
        elif a + b > 1:
            expected.update({"H(A) < 0": h < 0, "zero on L1": facts["zeros_l1"] >= 1,
                             "near B1 not visible": not facts["probe_b1_visible"]})
        else:
            expected["H(A) = 0"] = h == 0
        return expected
    return {"H(A) > 0": h > 0, "G_A negative on P": facts["negative_on_interior"]}


def fermat_classify(A, tol: Tolerances = DEFAULT_TOLERANCES, with_facts: bool = True) -> FermatCase:
    """
    Case of the Fermat table for an affine A = (a, b, 1), with facts measured
    and checked against what the case asserts. Mirrored cases are evaluated at
    (b, a, 1).

    Raises:
        AtInfinity: If A lies on z = 0 (use fermat_facts directly)
        DomainError: If the table does not cover A
    """
    A = A if isinstance(A, RayVector) else RayVector.of(A)
    if not A.is_affine():
        raise AtInfinity(f"A={A.to_list()} is on the line at infinity; use sampling-only facts")
    a, b = A.coords[0] / A.coords[2], A.coords[1] / A.coords[2]
    case, mirrored, tie = fermat_case_id(a, b)
    result = FermatCase(case, RayVector((a, b, 1.0)), mirrored, tie)
    if with_facts:
        sa, sb = (b, a) if mirrored else (a, b)
        result.facts = fermat_facts(RayVector((sa, sb, 1.0)), tol)
        result.expected = _expected_facts(case, sa, sb, result.facts)
    return result


def fermat_grid_summary(a_range: Tuple[float, float], b_range: Tuple[float, float], n: int,
                        with_facts: bool = False,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[pd.DataFrame, Dict]:
    """
    Classify an n x n grid of affine points.

    Returns:
        (DataFrame with a, b, case, mirrored, tie[, facts_hold], summary dict)
    """
    rows = []
    for a in np.linspace(a_range[0], a_range[1], n):
        for b in np.linspace(b_range[0], b_range[1], n):
            row = {"a": float(a), "b": float(b), "case": None, "mirrored": None, "tie": None}
            try:
                fc = fermat_classify((a, b, 1.0), tol, with_facts=with_facts)
            except DomainError:
                rows.append(row)
                continue
            row.update({"case": fc.case_id, "mirrored": fc.mirrored, "tie": fc.tie})
            if with_facts:
                row["facts_hold"] = fc.facts_hold
            rows.append(row)
    df = pd.DataFrame(rows)
    classified = df.dropna(subset=["case"])
    summary = {
        "points": int(len(df)),
        "uncovered": int(df["case"].isna().sum()),
        "ties": int(classified["tie"].astype(bool).sum()),
        "per_case": {int(c): int(v) for c, v in classified["case"].value_counts().sort_index().items()},
    }
    if with_facts:
        summary["facts_failures"] = int((~classified["facts_hold"].astype(bool)).sum())
    return df, summary


# ---------------------------------------------------------------------------------
# k = -2
# ---------------------------------------------------------------------------------

def _near(mu: float, value: float) -> bool:
    return math.isclose(mu, value, rel_tol=0.0, abs_tol=MU_TOL)


def km2_functions(mu: float) -> Tuple[float, object]:
    """t(mu) = mu - 1 + sqrt((mu - 1)^2 + mu), s(mu) = mu(2 - mu)/(1 - 2mu) (UNDEFINED at 1/2)."""
    if mu <= 0:
        raise DomainError(f"mu={mu} must be positive")
    t = mu - 1.0 + math.sqrt((mu - 1.0) ** 2 + mu)
    if _near(mu, 0.5):
        return t, UNDEFINED
    return t, mu * (2.0 - mu) / (1.0 - 2.0 * mu)


def _km2_closure(comp: ConeComponent, samples: int, seed: int) -> np.ndarray:
    pool = _unit_rows(np.vstack([comp.interior_points(raster_size=81), comp.boundary_points()]))
    return np.array(SplitMix64(seed).sample(pool, samples))


def km2_fact_check(mu: float, samples: int, seed: int = 11,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> Dict:
    """
    Facts about E = (-1, mu, 0) at k = -2, checked on samples of the
    component KM2_SPECIAL[B1B2] (bounded by C1 and the line at infinity).

    Returns:
        {fact name: {"passed": bool, "detail": ...}}

    Raises:
        HypothesisFailed: On the first fact that fails, with its sample
    """
    t_mu, s_mu = km2_functions(mu)
    k = -2.0
    F = hesse_cubic(k)
    T = F.trilinear
    E = np.array([-1.0, mu, 0.0])
    comp = find_component(k, "KM2_SPECIAL[B1B2]", tol)
    interior = _unit_rows(comp.interior_points(raster_size=81))
    closure = _km2_closure(comp, samples, seed)
    G = polar_quadric(F, E).array
    report: Dict[str, Dict] = {}

    def record(name: str, passed: bool, detail, sample=None):
        report[name] = {"passed": bool(passed), "detail": detail}
        if not passed:
            raise HypothesisFailed(f"k=-2, mu={mu}: {name} fails ({detail})", sample=sample)

    expected_f = -9.0 * mu * (mu - 1.0)
    record("F(-1, mu, 0) = -9 mu (mu - 1)", abs(F.evaluate(E) - expected_f) <= 1e-9 * max(1.0, abs(expected_f)),
           {"value": F.evaluate(E), "expected": expected_f})

    # (1) one line misses the open component, the other splits it
    lines = split_line_pair(polar_quadric(F, E), tol)
    splits = []
    for line in lines:
        vals = interior @ line.array
        splits.append(bool(vals.min() < 0 < vals.max()))
    record("one line misses P, the other splits it", sorted(splits) == [False, True], {"splits": splits})
    splitting = lines[splits.index(True)].array

    near_b2 = comp.interior_witness.array / np.linalg.norm(comp.interior_witness.array)
    near_b2 = B2.array + 1e-3 * near_b2
    record("Q is the side of B2", comp.contains(near_b2) and float(near_b2 @ G @ near_b2) > 0,
           {"G_E near B2": float(near_b2 @ G @ near_b2)})

    # (2) the splitting line meets z = 0 at (1 : t(mu) : 0)
    at_infinity = np.array([splitting[1], -splitting[0], 0.0])
    y_over_x = at_infinity[1] / at_infinity[0]
    record("splitting line meets z=0 at (1 : t(mu) : 0)", abs(y_over_x - t_mu) <= 1e-9 * max(1.0, t_mu),
           {"y/x": y_over_x, "t(mu)": t_mu})

    ee = T.contract_two(E, E)
    ee_vals = closure @ ee
    if _near(mu, 0.5) or _near(mu, 2.0):
        target = asymptotes(k, tol)[0 if _near(mu, 0.5) else 1]
        record("E^2 is the asymptote", LinearForm3.of(ee).is_proportional(target, 1e-9),
               {"E^2": ee.tolist()})
    elif 0.5 < mu < 2.0:
        worst = int(np.argmax(ee_vals))
        record("E^2 . D < 0 on the closure of P", ee_vals[worst] < 0,
               {"max": float(ee_vals[worst])}, closure[worst].tolist())
    if 0 < mu <= 0.5 and s_mu != UNDEFINED:
        record("s(mu) > t(mu)", s_mu > t_mu, {"s": s_mu, "t": t_mu})
        affine = closure[np.abs(closure[:, 2]) > 1e-9]
        affine = affine / affine[:, 2:3]
        below = affine[(affine[:, 1] - 1.0 / 3.0) < s_mu * (affine[:, 0] - 1.0 / 3.0)]
        vals = below @ ee
        if len(vals):
            worst = int(np.argmax(vals))
            record("E^2 . D < 0 below the s(mu)-line", vals[worst] < 0,
                   {"max": float(vals[worst]), "points": int(len(vals))}, below[worst].tolist())

    if mu > 1.0:
        y_less = interior[interior[:, 1] < interior[:, 0]]
        inside_q = np.einsum("ni,ij,nj->n", y_less, G, y_less) > 0
        record("Q contains the subcone y < x", bool(np.all(inside_q)), {"points": int(len(y_less))})

    if 0 < mu < 2.0:
        q_mask = np.einsum("ni,ij,nj->n", closure, G, closure) >= 0
        q_closure = closure[q_mask]
        dde = np.einsum("ni,ij,nj->n", q_closure, G, q_closure)
        dee = q_closure @ ee
        bad = [(lam, i) for lam in (0.1, 1.0, 10.0) for i in range(len(q_closure))
               if -2.0 * dde[i] + lam * dee[i] >= 0]
        record("-2 D^2.E + lambda D.E^2 < 0 on the closure of Q", not bad,
               {"violations": len(bad)}, q_closure[bad[0][1]].tolist() if bad else None)
    return report


def km2_c2_bound_check(m: float, r: float, c2, D, E) -> Dict:
    """The inequality r c2(E) <= m c2(D) on user data."""
    c = _vec(c2)
    lhs = r * float(c @ _vec(E))
    rhs = m * float(c @ _vec(D))
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs}


# ---------------------------------------------------------------------------------
# Integral classes
# ---------------------------------------------------------------------------------

def _region_mask(k: float, predicate: str, points: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Vectorized region test for enumerate_integral."""
    if predicate == "all":
        return np.ones(len(points), dtype=bool)
    if predicate.startswith("component:"):
        comp = find_component(k, predicate.split(":", 1)[1], tol)
        return comp.contains_many(points)
    if predicate == "hessian-nonneg":
        uvw = points @ HESSE_FRAME.T
        H = hesse_hessian(k, tol)
        return np.all(uvw <= 0, axis=1) & (H.evaluate_many(points) >= 0)
    if predicate.startswith("ray:"):
        direction = np.array([float(v) for v in predicate.split(":", 1)[1].split(",")])
        cross = np.cross(points, direction)
        return np.all(cross == 0, axis=1) & (points @ direction > 0)
    raise ValueError(
        f"Unknown region: {predicate}. Available: all, component:<id>, hessian-nonneg, ray:x,y,z"
    )


def enumerate_integral(k: float, predicate: str, sup_norm_bound: int,
                       cubic_range: Tuple[float, float],
                       tol: Tolerances = DEFAULT_TOLERANCES) -> List[RayVector]:
    """
    Integer vectors E != 0 with |E|_inf <= bound, lo <= F(E) <= hi and E in the region.

    Multiples are listed separately. Results are in lexicographic order.
    """
    if sup_norm_bound < 1:
        raise ValueError("sup_norm_bound must be at least 1")
    lo, hi = cubic_range
    if lo > hi:
        return []
    n = int(sup_norm_bound)
    axis = np.arange(-n, n + 1, dtype=float)
    xs, ys, zs = np.meshgrid(axis, axis, axis, indexing="ij")
    points = np.stack([xs.ravel(), ys.ravel(), zs.ravel()], axis=1)
    points = points[np.any(points != 0, axis=1)]
    values = hesse_cubic(k, allow_degenerate=True, tol=tol).evaluate_many(points)
    keep = (values >= lo) & (values <= hi)
    points = points[keep]
    points = points[_region_mask(k, predicate, points, tol)]
    return [RayVector(tuple(float(c) for c in p)) for p in points]


def enumerate_integral_naive(k: float, predicate: str, sup_norm_bound: int,
                             cubic_range: Tuple[float, float],
                             tol: Tolerances = DEFAULT_TOLERANCES) -> List[RayVector]:
    """Independent listing with the loops in reverse order, for cross-checking."""
    F = hesse_cubic(k, allow_degenerate=True, tol=tol)
    lo, hi = cubic_range
    found = []
    n = int(sup_norm_bound)
    for z in range(n, -n - 1, -1):
        for y in range(n, -n - 1, -1):
            for x in range(n, -n - 1, -1):
                if x == y == z == 0:
                    continue
                p = np.array([[float(x), float(y), float(z)]])
                value = F.evaluate(p[0])
                if lo <= value <= hi and _region_mask(k, predicate, p, tol)[0]:
                    found.append(RayVector((float(x), float(y), float(z))))
    return sorted(found, key=lambda r: r.coords)
