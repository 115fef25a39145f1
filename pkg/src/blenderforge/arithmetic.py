"""Residue conditions, torus targets, and the case-by-case pair searches.

Each search produces integer pairs (k, m) whose return-map coefficients
(A_km, B_km) have B_km accumulating near zero while |A_km| stays inside a
band on one side of 1.  The construction depends on the declared arithmetic
case: rational angles pin residue classes; declared integer relations give
lattice substitutions; fully independent moduli are handled by direct
equidistribution scans over a bounded window.

Scans are vectorized over the candidate index and always re-evaluate the
surviving pairs through `return_map.coeffs`, so reported A/B values round-trip
bit-exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .cycle_model import CaseTag, CycleSpec, CycleType, Moduli, TWO_PI
from .diophantine import circle_distance, frac
from .errors import DomainError, NotApplicable, PoleError, WindowExhausted
from .return_map import (
    ReturnCoeffs,
    coeffs,
    df_denominator,
    df_wave_coeffs,
    quant_bound,
    quant_margin,
)

log = logging.getLogger(__name__)

ZERO_TOL = 1e-12
UNIT_TOL = 1e-9


# ---------------------------------------------------------------------------
# Band-limit values
# ---------------------------------------------------------------------------

def alpha_sf(spec: CycleSpec, angle: float) -> float:
    """Limit of |A_km| along B_km -> 0 at a fixed k-angle (saddle focus)."""
    s2 = math.sin(angle + spec.eta2)
    if abs(s2) < ZERO_TOL:
        return math.inf
    return (
        spec.b_coef * spec.u_scalar * spec.A_coef * math.sin(angle + spec.eta1)
        / (spec.B_coef * s2)
    )


def alpha_df(spec: CycleSpec, s_angle: float, w_angle: float) -> float:
    """Limit of |A_km| along B_km -> 0 at fixed rotation angles (double focus)."""
    wa, wb, xi = df_wave_coeffs(spec, w_angle)
    s2 = math.sin(s_angle + spec.eta2)
    if abs(s2) < ZERO_TOL or abs(wb) < ZERO_TOL:
        return math.inf
    return xi * wa * math.sin(s_angle + spec.eta1) / (wb * s2)


# ---------------------------------------------------------------------------
# Conditions on residues
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidueWitness:
    """A residue (pair) satisfying the sign/nonvanishing/band inequalities."""

    r: int
    alpha: float
    inequalities: dict[str, bool]
    r2: int | None = None

    @property
    def band_margin(self) -> float:
        return abs(abs(self.alpha) - 1.0)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "r": self.r,
            "r2": self.r2,
            "alpha": self.alpha,
            "inequalities": dict(self.inequalities),
        }


def _check_angle_pair(q: int, p: int) -> None:
    # q in {1, 2} puts the angle at 0 or pi, outside the open range; p is
    # only used mod q, so p -> p + q leaves every residue angle unchanged
    if q < 3 or p < 1 or math.gcd(p, q) != 1:
        raise DomainError(f"angle p/q={p}/{q} needs coprime p, q with q >= 3")


def check_A1(
    spec: CycleSpec,
    q: int,
    p: int,
    zero_tol: float = ZERO_TOL,
    unit_tol: float = UNIT_TOL,
) -> list[ResidueWitness]:
    """Enumerate residues r of k mod q passing the three coefficient
    inequalities; nonempty whenever q >= 9.

    Results are ordered by decreasing distance of |alpha_r| from 1, i.e.
    most robust band first.
    """
    if not spec.is_saddle_focus:
        raise NotApplicable("check_A1 applies to saddle_focus cycles")
    _check_angle_pair(q, p)
    omega = TWO_PI * p / q
    bu = spec.b_coef * spec.u_scalar
    out: list[ResidueWitness] = []
    for r in range(q):
        angle = r * omega
        s1 = math.sin(angle + spec.eta1)
        s2 = math.sin(angle + spec.eta2)
        ineq = {
            "bu_sin2_positive": bu * s2 > 0.0,
            "sin1_nonzero": abs(s1) > zero_tol,
        }
        alpha = alpha_sf(spec, angle)
        ineq["alpha_not_unit"] = math.isfinite(alpha) and abs(abs(alpha) - 1.0) > unit_tol
        if all(ineq.values()):
            out.append(ResidueWitness(r=r, alpha=alpha, inequalities=ineq))
    out.sort(key=lambda w: (-w.band_margin, w.r))
    return out


def check_A2(
    spec: CycleSpec,
    q1: int | None = None,
    p1: int | None = None,
    q2: int | None = None,
    p2: int | None = None,
    zero_tol: float = ZERO_TOL,
    unit_tol: float = UNIT_TOL,
    k_window: int = 256,
    m_window: int = 256,
) -> list[ResidueWitness]:
    """Enumerate residue pairs (r1, r2) passing the double-focus inequalities.

    With both angles rational the scan runs over the q1*q2 residue grid and
    is guaranteed nonempty for q1 >= 9, q2 >= 8.  For an irrational angle
    pass None for its (q, p) and the scan runs over a bounded k (or m)
    window instead; the witness field then holds the integer itself.
    """
    if spec.is_saddle_focus:
        raise NotApplicable("check_A2 applies to double_focus cycles")
    assert spec.omega2 is not None and spec.eta3 is not None

    if q1 is not None:
        _check_angle_pair(q1, p1 or 0)
        k_angles = [(r, r * TWO_PI * p1 / q1) for r in range(q1)]  # type: ignore[operator]
    else:
        k_angles = [(k, k * spec.omega1) for k in range(1, k_window + 1)]
    if q2 is not None:
        _check_angle_pair(q2, p2 or 0)
        m_angles = [(r, r * TWO_PI * p2 / q2) for r in range(q2)]  # type: ignore[operator]
    else:
        m_angles = [(m, m * spec.omega2) for m in range(1, m_window + 1)]

    cdelta = quant_bound(spec.delta)
    u1, u2 = spec.u_pair
    out: list[ResidueWitness] = []
    for r2, w_angle in m_angles:
        if quant_margin(spec, w_angle) <= cdelta:
            continue
        xi_num = math.cos(w_angle + spec.eta3) * u1 + math.sin(w_angle + spec.eta3) * u2
        if abs(xi_num) <= zero_tol:
            continue
        for r1, s_angle in k_angles:
            s1 = math.sin(s_angle + spec.eta1)
            s2 = math.sin(s_angle + spec.eta2)
            ineq = {
                "quant": True,
                "xi_sin2_positive": xi_num * s2 > 0.0,
                "sin1_nonzero": abs(s1) > zero_tol,
            }
            alpha = alpha_df(spec, s_angle, w_angle)
            ineq["alpha_not_unit"] = (
                math.isfinite(alpha) and abs(abs(alpha) - 1.0) > unit_tol
            )
            if all(ineq.values()):
                out.append(ResidueWitness(r=r1, alpha=alpha, inequalities=ineq, r2=r2))
    out.sort(key=lambda w: (-w.band_margin, w.r, w.r2 or 0))
    return out


# ---------------------------------------------------------------------------
# Torus coefficient flow g, h and proper targets
# ---------------------------------------------------------------------------

def eval_gh(spec: CycleSpec, t: float, s: float, w: float) -> tuple[float, float]:
    """Coefficient flow on R x S1 x S1:

        g = gamma^t * A(2*pi*w) * sin(2*pi*s + eta1)
        h = gamma^t * B(2*pi*w) * sin(2*pi*s + eta2) - xi(2*pi*w)
    """
    if spec.is_saddle_focus:
        raise NotApplicable("eval_gh applies to double_focus cycles")
    wa, wb, xi = df_wave_coeffs(spec, TWO_PI * w, pole_tol=1e-14)
    gt = math.exp(t * math.log(spec.gamma))
    g = gt * wa * math.sin(TWO_PI * s + spec.eta1)
    h = gt * wb * math.sin(TWO_PI * s + spec.eta2) - xi
    return g, h


@dataclass(frozen=True)
class TorusTarget:
    """A proper horizontal line, tilted line, or plane on R x S1 x S1."""

    kind: str  # horizontal_line | tilted_line | plane
    params: dict[str, float]
    admissible: bool = False
    margins: dict[str, float] = field(default_factory=dict)

    @classmethod
    def horizontal_line(cls, s_star: float, w_star: float) -> "TorusTarget":
        return cls("horizontal_line", {"s_star": frac(s_star), "w_star": frac(w_star)})

    @classmethod
    def tilted_line(
        cls,
        a1: float,
        b: float,
        a2: float | None = None,
        w_star: float | None = None,
    ) -> "TorusTarget":
        if (a2 is None) == (w_star is None):
            raise DomainError("tilted_line takes exactly one of a2, w_star")
        params = {"a1": a1, "b": b}
        if a2 is not None:
            params["a2"] = a2
        else:
            params["w_star"] = frac(w_star)  # type: ignore[arg-type]
        return cls("tilted_line", params)

    @classmethod
    def plane(
        cls,
        a: float | None = None,
        b: float | None = None,
        w_star: float | None = None,
    ) -> "TorusTarget":
        if w_star is None and (a is None or b is None):
            raise DomainError("plane takes (a, b) or w_star")
        if w_star is not None:
            return cls("plane", {"w_star": frac(w_star)})
        return cls("plane", {"a": a, "b": b})  # type: ignore[dict-item]

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "admissible": self.admissible,
            "margins": dict(self.margins),
        }


def _wave_margins(spec: CycleSpec, w_star: float) -> dict[str, float]:
    wa, wb, xi = df_wave_coeffs(spec, TWO_PI * w_star)
    prod = wa * wb * xi
    return {
        "wave_product_nonzero": abs(prod),
        "pole_distance": abs(df_denominator(spec, TWO_PI * w_star)),
    }


def target_admissible(
    spec: CycleSpec, target: TorusTarget, margin_min: float = 1e-12
) -> TorusTarget:
    """Evaluate the admissibility inequalities; returns the target with its
    verdict and numeric margins filled in."""
    if spec.is_saddle_focus:
        raise NotApplicable("torus targets apply to double_focus cycles")
    p = target.params
    margins: dict[str, float] = {}
    if target.kind == "horizontal_line":
        s_star, w_star = p["s_star"], p["w_star"]
        wa, wb, xi = df_wave_coeffs(spec, TWO_PI * w_star)
        s2 = math.sin(TWO_PI * s_star + spec.eta2)
        margins["positivity"] = xi * wb * s2
        glim = alpha_df(spec, TWO_PI * s_star, TWO_PI * w_star)
        margins["glim_nonzero"] = abs(glim) if math.isfinite(glim) else 0.0
        margins["glim_not_unit"] = (
            abs(abs(glim) - 1.0) if math.isfinite(glim) else 0.0
        )
        margins["glim_finite"] = abs(s2)
        margins["pole_distance"] = abs(df_denominator(spec, TWO_PI * w_star))
    elif target.kind == "tilted_line":
        margins["direction_nonzero"] = p["a1"] ** 2 + p["b"] ** 2
        if "a2" in p:
            margins["a2_nonzero"] = abs(p["a2"])
        else:
            margins.update(_wave_margins(spec, p["w_star"]))
    elif target.kind == "plane":
        if "w_star" in p:
            margins.update(_wave_margins(spec, p["w_star"]))
        else:
            margins["direction_nonzero"] = p["a"] ** 2 + p["b"] ** 2
    else:
        raise DomainError(f"unknown target kind {target.kind!r}")
    ok = all(v > margin_min for v in margins.values())
    return replace(target, admissible=ok, margins=margins)


# ---------------------------------------------------------------------------
# Pair sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchWindow:
    k_max: int = 100_000
    m_max: int = 100_000
    k_min: int = 1
    m_min: int = 1


@dataclass(frozen=True)
class PairSequence:
    """Pairs returned by a case search, with their coefficient values and the
    torus points they realize."""

    pairs: tuple[tuple[int, int], ...]
    target_values: tuple[tuple[float, float, float], ...]
    A_values: tuple[float, ...]
    B_values: tuple[float, ...]
    case: CaseTag
    target: TorusTarget | None = None
    residue: dict[str, int] = field(default_factory=dict)
    alpha_ref: float | None = None
    eps: float = math.nan
    distances: tuple[float, ...] = ()
    best_distance: float = math.nan

    @property
    def b_interval(self) -> tuple[float, float]:
        return (min(self.B_values), max(self.B_values))

    @property
    def b_density_gap(self) -> float:
        """Largest gap between consecutive sorted B values."""
        if len(self.B_values) < 2:
            return math.inf
        b = sorted(self.B_values)
        return max(b2 - b1 for b1, b2 in zip(b, b[1:]))

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "case": self.case.value,
            "pairs": [list(p) for p in self.pairs],
            "target_values": [list(v) for v in self.target_values],
            "A_values": list(self.A_values),
            "B_values": list(self.B_values),
            "target": None if self.target is None else self.target.to_json_dict(),
            "residue": dict(self.residue),
            "alpha_ref": self.alpha_ref,
            "eps": self.eps,
            "distances": list(self.distances),
            "best_distance": self.best_distance,
        }


def _torus_point(spec: CycleSpec, theta: float, k: int, m: int) -> tuple[float, float, float]:
    t = m - k * theta
    s = frac(k * spec.omega1 / TWO_PI)
    w = frac(m * spec.omega2 / TWO_PI) if spec.omega2 is not None else 0.0
    return (t, s, w)


def _assemble(
    spec: CycleSpec,
    moduli: Moduli,
    case: CaseTag,
    kept: Sequence[tuple[int, int, float]],
    eps: float,
    target: TorusTarget | None,
    residue: dict[str, int],
    alpha_ref: float | None,
    best_distance: float,
    min_pairs: int,
    what: str,
) -> PairSequence:
    if len(kept) < max(min_pairs, 1):
        raise WindowExhausted(
            f"{what}: found {len(kept)} pairs (best distance {best_distance:.3e})",
            best_distance=best_distance,
            found=len(kept),
        )
    kept = sorted(kept, key=lambda t: (t[0], t[1]))
    pairs = []
    a_vals = []
    b_vals = []
    t_vals = []
    dists = []
    for k, m, dist in kept:
        rc = coeffs(spec, k, m)
        pairs.append((k, m))
        a_vals.append(rc.A_km)
        b_vals.append(rc.B_km)
        t_vals.append(_torus_point(spec, moduli.theta, k, m))
        dists.append(dist)
    log.info("%s: kept %d pairs, best distance %.3e", what, len(pairs), best_distance)
    return PairSequence(
        pairs=tuple(pairs),
        target_values=tuple(t_vals),
        A_values=tuple(a_vals),
        B_values=tuple(b_vals),
        case=case,
        target=target,
        residue=residue,
        alpha_ref=alpha_ref,
        eps=eps,
        distances=tuple(dists),
        best_distance=best_distance,
    )


def _pick_witness(
    wits: Sequence[ResidueWitness], kind: str | None, what: str, rank: int = 0
) -> ResidueWitness:
    if kind is None:
        matching = list(wits)
    else:
        want_cs = kind == "cs"
        matching = [w for w in wits if (abs(w.alpha) < 1.0) == want_cs]
    if not matching:
        raise WindowExhausted(f"{what}: no admissible residues for kind={kind}", found=0)
    if rank >= len(matching):
        raise WindowExhausted(
            f"{what}: residue rank {rank} exceeds the {len(matching)} admissible residues",
            found=0,
        )
    return matching[rank]


def _root_scan(fn: Callable[[float], float], lo: float, hi: float, n: int) -> list[float]:
    """All roots of fn on [lo, hi] located by sign changes plus bisection."""
    xs = np.linspace(lo, hi, n)
    vals = np.array([fn(float(x)) for x in xs])
    roots: list[float] = []
    for i in range(len(xs) - 1):
        a, b = float(xs[i]), float(xs[i + 1])
        fa, fb = float(vals[i]), float(vals[i + 1])
        if not (math.isfinite(fa) and math.isfinite(fb)):
            continue
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0.0:
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = fn(mid)
                if fa * fm <= 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))
    return roots


def _expanding_roots(
    roots: Sequence[float],
    alpha_of: Callable[[float], float],
    min_margin: float = 0.05,
    prefer: float = 2.0,
    limit: int = 6,
) -> list[float]:
    """Expanding-band roots ordered by closeness of |alpha| to `prefer`.

    Roots at extreme |alpha| sit next to sine zeros where the profile slope
    explodes and no lattice point lands inside the tolerance, so moderate
    bands certify far better than maximal ones; several moderate roots are
    harvested together to thicken the pair set.
    """
    scored: list[tuple[float, float]] = []
    for s0 in roots:
        a = alpha_of(s0)
        if not (math.isfinite(a) and abs(a) > 1.0 + min_margin):
            continue
        scored.append((abs(math.log(abs(a)) - math.log(prefer)), s0))
    scored.sort()
    return [s0 for _, s0 in scored[:limit]]


def _select_expanding_root(
    roots: Sequence[float],
    alpha_of: Callable[[float], float],
    min_margin: float = 0.05,
    prefer: float = 2.0,
) -> float | None:
    top = _expanding_roots(roots, alpha_of, min_margin, prefer, limit=1)
    return top[0] if top else None


def _slope_radius(fn: Callable[[float], float], s0: float, eps: float) -> float:
    """Distance around a root within which |fn| stays ~<= eps."""
    h = 1e-6
    slope = abs(fn(s0 + h) - fn(s0 - h)) / (2 * h)
    if slope < 1e-9:
        return 0.5
    return min(2.0 * eps / slope, 0.5)


def _exact_filter(
    spec: CycleSpec,
    ks: np.ndarray,
    ms: np.ndarray,
    dists: np.ndarray,
    eps_b: float | None,
) -> tuple[list[tuple[int, int, float]], float]:
    """Re-evaluate candidates through `coeffs`; keep admissible ones with
    |B_km| <= eps_b (when bounded).  Returns kept triples and best |B|."""
    kept: list[tuple[int, int, float]] = []
    best = math.inf
    for k, m, dist in zip(ks.tolist(), ms.tolist(), dists.tolist()):
        rc = coeffs(spec, int(k), int(m))
        if not rc.admissible:
            continue
        best = min(best, abs(rc.B_km))
        if eps_b is None or abs(rc.B_km) <= eps_b:
            kept.append((int(k), int(m), float(dist)))
    return kept, best


# -- saddle-focus searches ---------------------------------------------------

def _round_to_step(x: np.ndarray, step: int) -> np.ndarray:
    return step * np.round(x / step)


def _sf1(spec, moduli, eps, window, kind, min_pairs, residue_rank=0) -> PairSequence:
    pq = moduli.rational("omega1")
    q, p = pq.denominator, pq.numerator
    wits = check_A1(spec, q, p)
    wit = _pick_witness(wits, kind, "SF-1", residue_rank)
    r = wit.r
    omega = spec.omega1
    bu = spec.b_coef * spec.u_scalar
    r2sin = math.sin(r * omega + spec.eta2)
    log_gamma = math.log(abs(spec.gamma))
    t_star = math.log(bu / (spec.B_coef * r2sin)) / log_gamma
    step = 2 if spec.gamma < 0 else 1
    theta = moduli.theta

    k0 = max(window.k_min, 1)
    kp_lo = max(0 if r >= 1 else 1, math.ceil((k0 - r) / q))
    kp_hi = (window.k_max - r) // q
    if kp_hi < kp_lo:
        raise WindowExhausted("SF-1: empty k window", found=0)
    kp = np.arange(kp_lo, kp_hi + 1, dtype=np.int64)
    ks = r + q * kp
    ideal = t_star + theta * ks
    ms = _round_to_step(ideal, step).astype(np.int64)
    good = (ms >= max(window.m_min, 1)) & (ms <= window.m_max)
    ks, ms, ideal = ks[good], ms[good], ideal[good]
    # coarse pass on the exponent gap, then exact re-evaluation
    gap = np.abs(ms - ideal)
    coarse = gap <= 2.0 * eps / (abs(bu) * log_gamma) + 1e-12
    kept, best = _exact_filter(spec, ks[coarse], ms[coarse], gap[coarse], eps)
    return _assemble(
        spec, moduli, CaseTag.SF_1, kept, eps, None,
        {"r": r, "q": q, "p": p}, wit.alpha, best, min_pairs, "SF-1",
    )


def _sf2(spec, moduli, eps, window, kind, min_pairs, scan_halfwidth) -> PairSequence:
    if kind == "cs":
        raise NotApplicable("SF-2 guarantees only a cu band")
    rel = moduli.relation_for(("theta", "omega1", "one"))
    if rel is None:
        if moduli.is_rational("theta"):
            tq = moduli.rational("theta")
            pq, pq2 = Fraction(0), tq
        else:
            raise DomainError("SF-2 needs a declared {theta, omega1, one} relation")
    else:
        c = rel.coeffs
        ct = c.get("theta", 0)
        if ct == 0:
            raise DomainError("SF-2 relation must involve theta")
        pq = Fraction(-c.get("omega1", 0), ct)
        pq2 = Fraction(-c.get("one", 0), ct)
    p, q = pq.numerator, pq.denominator
    pp, qp = pq2.numerator, pq2.denominator

    bu = spec.b_coef * spec.u_scalar
    lg = math.log(abs(spec.gamma))

    def h_line(s: float) -> float:
        return (
            math.exp(-(p / q) * s * lg) * spec.B_coef * math.sin(TWO_PI * s + spec.eta2)
            - bu
        )

    roots = _root_scan(h_line, -scan_halfwidth, scan_halfwidth, 4096)
    top = _expanding_roots(roots, lambda s: alpha_sf(spec, TWO_PI * s))
    if not top:
        raise WindowExhausted(
            "SF-2: no root of the line profile with an expanding band "
            f"in |s| <= {scan_halfwidth}",
            found=0,
        )
    alpha_ref = alpha_sf(spec, TWO_PI * top[0])

    step = 2 if spec.gamma < 0 else 1
    qqp = q * qp
    kp_hi = window.k_max // (qqp * step)
    kp = np.arange(1, kp_hi + 1, dtype=np.int64) * step
    w_hat = spec.omega1 / TWO_PI
    kept: list[tuple[int, int, float]] = []
    best = math.inf
    for s0 in top:
        accept = _slope_radius(h_line, s0, eps)
        tau = s0 / qqp
        ls = _round_to_step(kp * w_hat - tau, step).astype(np.int64)
        sigma = qqp * (kp * w_hat - ls)
        ks = qqp * kp
        ms = pp * q * kp + p * qp * ls
        good = (ms >= max(window.m_min, 1)) & (ms <= window.m_max) & (ks >= window.k_min)
        dist = np.abs(sigma - s0)
        coarse = good & (dist <= accept)
        got, b = _exact_filter(spec, ks[coarse], ms[coarse], dist[coarse], eps)
        kept.extend(got)
        best = min(best, b)
    kept = sorted({(k, m): (k, m, d) for k, m, d in kept}.values())
    kept = [t for t in kept if abs(coeffs(spec, t[0], t[1]).A_km) > 1.0]
    return _assemble(
        spec, moduli, CaseTag.SF_2, kept, eps, None,
        {"q": q, "p": p, "qp": qp, "pp": pp}, alpha_ref, best, min_pairs, "SF-2",
    )


def _sf3(spec, moduli, eps, window, kind, min_pairs, band) -> PairSequence:
    kind = kind or "cs"
    lo, hi = band if band is not None else ((0.3, 0.7) if kind == "cs" else (1.5, 3.0))
    bu = spec.b_coef * spec.u_scalar
    lg = math.log(abs(spec.gamma))
    theta = moduli.theta
    step = 2 if spec.gamma < 0 else 1

    ks = np.arange(max(window.k_min, 1), window.k_max + 1, dtype=np.int64)
    ang = ks * spec.omega1
    s1 = np.sin(ang + spec.eta1)
    s2 = np.sin(ang + spec.eta2)
    with np.errstate(divide="ignore", invalid="ignore"):
        alphas = bu * spec.A_coef * s1 / (spec.B_coef * s2)
    sign_ok = bu * s2 > 0.0
    band_ok = (np.abs(alphas) >= lo) & (np.abs(alphas) <= hi)
    good = sign_ok & band_ok
    ks, s2v, alphas = ks[good], s2[good], alphas[good]
    t_star = np.log(bu / (spec.B_coef * s2v)) / lg
    ideal = t_star + theta * ks
    ms = _round_to_step(ideal, step).astype(np.int64)
    ok = (ms >= max(window.m_min, 1)) & (ms <= window.m_max)
    ks, ms, ideal = ks[ok], ms[ok], ideal[ok]
    gap = np.abs(ms - ideal)
    coarse = gap <= 2.0 * eps / (abs(bu) * lg) + 1e-12
    kept, best = _exact_filter(spec, ks[coarse], ms[coarse], gap[coarse], eps)
    return _assemble(
        spec, moduli, CaseTag.SF_3, kept, eps, None,
        {}, 0.5 * (lo + hi) if kind == "cs" else -0.5 * (lo + hi), best,
        min_pairs, "SF-3",
    )


# -- double-focus searches ----------------------------------------------------

def _df_target_tstar(spec: CycleSpec, s_star: float, w_star: float) -> float:
    """t with h(t, s*, w*) = 0; requires the positivity inequality."""
    _, wb, xi = df_wave_coeffs(spec, TWO_PI * w_star)
    s2 = math.sin(TWO_PI * s_star + spec.eta2)
    ratio = xi / (wb * s2)
    if ratio <= 0.0 or not math.isfinite(ratio):
        raise DomainError("horizontal target fails the positivity inequality")
    return math.log(ratio) / math.log(spec.gamma)


def _df1(spec, moduli, eps, window, kind, min_pairs, residue_rank=0) -> PairSequence:
    f1, f2 = moduli.rational("omega1"), moduli.rational("omega2")
    q1, p1 = f1.denominator, f1.numerator
    q2, p2 = f2.denominator, f2.numerator
    wits = check_A2(spec, q1, p1, q2, p2)
    wit = _pick_witness(wits, kind, "DF-1", residue_rank)
    r1, r2 = wit.r, wit.r2 or 0
    s_star = frac(r1 * p1 / q1)
    w_star = frac(r2 * p2 / q2)
    target = target_admissible(
        spec, TorusTarget.horizontal_line(s_star, w_star)
    )
    t_star = _df_target_tstar(spec, s_star, w_star)
    theta = moduli.theta

    k0 = max(window.k_min, 1)
    kp_lo = max(0 if r1 >= 1 else 1, math.ceil((k0 - r1) / q1))
    kp_hi = (window.k_max - r1) // q1
    kp = np.arange(kp_lo, kp_hi + 1, dtype=np.int64)
    ks = r1 + q1 * kp
    ideal = (t_star + theta * ks - r2) / q2
    mp = np.round(ideal).astype(np.int64)
    ms = r2 + q2 * mp
    good = (ms >= max(window.m_min, 1)) & (ms <= window.m_max)
    ks, ms = ks[good], ms[good]
    t_n = ms - theta * ks
    dist = np.abs(t_n - t_star)
    coarse = dist <= eps
    kept, best_b = _exact_filter(spec, ks[coarse], ms[coarse], dist[coarse], None)
    best = float(np.min(dist)) if dist.size else math.inf
    return _assemble(
        spec, moduli, CaseTag.DF_1, kept, eps, target,
        {"r1": r1, "r2": r2, "q1": q1, "p1": p1, "q2": q2, "p2": p2},
        wit.alpha, best, min_pairs, "DF-1",
    )


def _df21(spec, moduli, eps, window, kind, min_pairs, band) -> PairSequence:
    kind = kind or "cs"
    lo, hi = band if band is not None else ((0.3, 0.7) if kind == "cs" else (1.5, 3.0))
    f2 = moduli.rational("omega2")
    q2, p2 = f2.denominator, f2.numerator
    # pick the m-residue with the largest admissibility margins
    cdelta = quant_bound(spec.delta)
    u1, u2 = spec.u_pair
    best_r2, best_m = None, 0.0
    for r2 in range(q2):
        w_angle = TWO_PI * r2 * p2 / q2
        margin = quant_margin(spec, w_angle)
        if margin <= cdelta:
            continue
        xi_num = math.cos(w_angle + spec.eta3) * u1 + math.sin(w_angle + spec.eta3) * u2
        score = min(margin - cdelta, abs(xi_num))
        if score > best_m:
            best_r2, best_m = r2, score
    if best_r2 is None:
        raise WindowExhausted("DF-2.1: no admissible m-residue", found=0)
    r2 = best_r2
    w_star = frac(r2 * p2 / q2)
    target = target_admissible(spec, TorusTarget.plane(w_star=w_star))
    wa, wb, xi = df_wave_coeffs(spec, TWO_PI * w_star)
    theta = moduli.theta
    lg = math.log(spec.gamma)

    ks = np.arange(max(window.k_min, 1), window.k_max + 1, dtype=np.int64)
    ang = ks * spec.omega1
    s1 = np.sin(ang + spec.eta1)
    s2 = np.sin(ang + spec.eta2)
    with np.errstate(divide="ignore", invalid="ignore"):
        alphas = xi * wa * s1 / (wb * s2)
    sign_ok = xi * wb * s2 > 0.0  # h-profile crosses zero at this angle
    band_ok = (np.abs(alphas) >= lo) & (np.abs(alphas) <= hi)
    good = sign_ok & band_ok & (np.abs(s2) > ZERO_TOL)
    ks, s2v = ks[good], s2[good]
    t_star = np.log(xi / (wb * s2v)) / lg
    ideal = (t_star + theta * ks - r2) / q2
    mp = np.round(ideal).astype(np.int64)
    ms = r2 + q2 * mp
    ok = (ms >= max(window.m_min, 1)) & (ms <= window.m_max)
    ks, ms, t_star = ks[ok], ms[ok], t_star[ok]
    gap = np.abs((ms - theta * ks) - t_star)
    coarse = gap <= 2.0 * eps / max(abs(xi) * lg, 1e-9) + 1e-12
    kept, best = _exact_filter(spec, ks[coarse], ms[coarse], gap[coarse], eps)
    return _assemble(
        spec, moduli, CaseTag.DF_2_1, kept, eps, target,
        {"r2": r2, "q2": q2, "p2": p2}, None, best, min_pairs, "DF-2.1",
    )


def _theta_relation(moduli: Moduli) -> tuple[Fraction, Fraction]:
    """theta = (p1/q1) * omega1/2pi + p2/q2 from the declared relation."""
    rel = moduli.relation_for(("theta", "omega1", "one"))
    if rel is None:
        if moduli.is_rational("theta"):
            return Fraction(0), moduli.rational("theta")
        raise DomainError("need a declared {theta, omega1, one} relation")
    c = rel.coeffs
    ct = c.get("theta", 0)
    if ct == 0:
        raise DomainError("relation must involve theta")
    return Fraction(-c.get("omega1", 0), ct), Fraction(-c.get("one", 0), ct)


def _df22(spec, moduli, eps, window, kind, min_pairs, scan_halfwidth) -> PairSequence:
    if kind == "cs":
        raise NotApplicable("DF-2.2 guarantees only a cu band")
    pq1, pq2 = _theta_relation(moduli)
    p1, q1 = pq1.numerator, pq1.denominator
    p2, q2 = pq2.numerator, pq2.denominator
    f3 = moduli.rational("omega2")
    q3, p3 = f3.denominator, f3.numerator
    if p1 == 0:
        raise WindowExhausted(
            "DF-2.2: theta rational makes the tilted target degenerate", found=0
        )
    cdelta = quant_bound(spec.delta)
    u1, u2 = spec.u_pair
    candidates = []
    for r2 in range(q3):
        w_angle = TWO_PI * r2 * p3 / q3
        if quant_margin(spec, w_angle) <= cdelta:
            continue
        xi_num = math.cos(w_angle + spec.eta3) * u1 + math.sin(w_angle + spec.eta3) * u2
        if abs(xi_num) > ZERO_TOL:
            candidates.append(r2)
    if not candidates:
        raise WindowExhausted("DF-2.2: no admissible m-residue", found=0)

    lg = math.log(spec.gamma)
    scored: list[tuple[float, int, float, Callable[[float], float]]] = []
    for r2 in candidates:
        w_star = frac(r2 * p3 / q3)
        _, wb, xi = df_wave_coeffs(spec, TWO_PI * w_star)

        def h_line(s: float, _wb=wb, _xi=xi, _r2=r2) -> float:
            return (
                math.exp((_r2 - (p1 / q1) * s) * lg)
                * _wb * math.sin(TWO_PI * s + spec.eta2)
                - _xi
            )

        roots = _root_scan(h_line, -scan_halfwidth, scan_halfwidth, 4096)
        for s0 in _expanding_roots(
            roots, lambda s: alpha_df(spec, TWO_PI * s, TWO_PI * w_star)
        ):
            a = alpha_df(spec, TWO_PI * s0, TWO_PI * w_star)
            scored.append((abs(math.log(abs(a)) - math.log(2.0)), r2, s0, h_line))
    if not scored:
        raise WindowExhausted("DF-2.2: no expanding root of the line profile", found=0)
    scored.sort(key=lambda t: t[0])
    # all pairs must come from one tilted line, i.e. one m-residue
    r2_ref, s0_ref = scored[0][1], scored[0][2]
    scored = [t for t in scored if t[1] == r2_ref][:6]
    w_star_ref = frac(r2_ref * p3 / q3)
    target = target_admissible(
        spec, TorusTarget.tilted_line(a1=-p1 / q1, b=float(r2_ref), w_star=w_star_ref)
    )
    alpha_ref = alpha_df(spec, TWO_PI * s0_ref, TWO_PI * w_star_ref)

    qk = q2 * q3
    kp = np.arange(1, window.k_max // qk + 1, dtype=np.int64)
    w_hat = spec.omega1 / TWO_PI
    den = q1 * q3
    kept: list[tuple[int, int, float]] = []
    bestd = math.inf
    for _, r2, s0, h_line in scored:
        accept = _slope_radius(h_line, s0, eps)
        ip = np.round((qk * kp * w_hat - s0) / den).astype(np.int64)
        sigma = qk * kp * w_hat - den * ip
        ks = qk * kp
        ms = r2 + p2 * q3 * kp + p1 * q3 * ip
        good = (ms >= max(window.m_min, 1)) & (ms <= window.m_max) & (ks >= window.k_min)
        dist = np.abs(sigma - s0)
        if dist[good].size:
            bestd = min(bestd, float(np.min(dist[good])))
        coarse = good & (dist <= accept)
        got, _ = _exact_filter(spec, ks[coarse], ms[coarse], dist[coarse], None)
        kept.extend(got)
    kept = sorted({(k, m): (k, m, d) for k, m, d in kept}.values())
    kept = [t for t in kept if abs(coeffs(spec, t[0], t[1]).A_km) > 1.0
            and abs(coeffs(spec, t[0], t[1]).B_km) <= eps]
    return _assemble(
        spec, moduli, CaseTag.DF_2_2, kept, eps, target,
        {"r2": r2_ref, "q1": q1, "p1": p1, "q2": q2, "p2": p2, "q3": q3, "p3": p3},
        alpha_ref, bestd, min_pairs, "DF-2.2",
    )


def _df31(spec, moduli, eps, window, kind, min_pairs, band) -> PairSequence:
    kind = kind or "cs"
    lo, hi = band if band is not None else ((0.3, 0.7) if kind == "cs" else (1.5, 3.0))
    theta = moduli.theta
    w2_hat = spec.omega2 / TWO_PI
    # pick (s*, w*) on a grid with healthy margins and the requested band
    best_t: tuple[float, float, float, float] | None = None  # margin, s*, w*, t*
    for w_star in np.linspace(0.0, 1.0, 37, endpoint=False):
        try:
            wa, wb, xi = df_wave_coeffs(spec, TWO_PI * float(w_star))
        except PoleError:
            continue
        if quant_margin(spec, TWO_PI * float(w_star)) <= quant_bound(spec.delta):
            continue
        for s_star in np.linspace(0.0, 1.0, 73, endpoint=False):
            s2 = math.sin(TWO_PI * float(s_star) + spec.eta2)
            if xi * wb * s2 <= 0.0:
                continue
            a = alpha_df(spec, TWO_PI * float(s_star), TWO_PI * float(w_star))
            if not (math.isfinite(a) and lo <= abs(a) <= hi):
                continue
            margin = min(abs(abs(a) - 1.0), abs(xi * wb * s2))
            if best_t is None or margin > best_t[0]:
                t_star = _df_target_tstar(spec, float(s_star), float(w_star))
                best_t = (margin, float(s_star), float(w_star), t_star)
    if best_t is None:
        raise WindowExhausted("DF-3.1: no admissible target point", found=0)
    _, s_star, w_star, t_star = best_t
    target = target_admissible(spec, TorusTarget.horizontal_line(s_star, w_star))

    ks = np.arange(max(window.k_min, 1), window.k_max + 1, dtype=np.int64)
    s_dist = np.abs((ks * (spec.omega1 / TWO_PI) - s_star + 0.5) % 1.0 - 0.5)
    pre = s_dist <= eps
    ks, s_dist = ks[pre], s_dist[pre]
    ms = np.round(t_star + theta * ks).astype(np.int64)
    ok = (ms >= max(window.m_min, 1)) & (ms <= window.m_max)
    ks, ms, s_dist = ks[ok], ms[ok], s_dist[ok]
    t_dist = np.abs((ms - theta * ks) - t_star)
    w_dist = np.abs((ms * w2_hat - w_star + 0.5) % 1.0 - 0.5)
    dist = np.maximum(np.maximum(t_dist, s_dist), w_dist)
    coarse = dist <= eps
    kept, _ = _exact_filter(spec, ks[coarse], ms[coarse], dist[coarse], None)
    best = float(np.min(dist)) if dist.size else math.inf
    return _assemble(
        spec, moduli, CaseTag.DF_3_1, kept, eps, target, {}, None, best,
        min_pairs, "DF-3.1",
    )


def _df32(spec, moduli, eps, window, kind, min_pairs, band) -> PairSequence:
    kind = kind or "cs"
    lo, hi = band if band is not None else ((0.3, 0.7) if kind == "cs" else (1.5, 3.0))
    rel = moduli.relation_for(("theta", "omega1", "theta_omega2", "one"))
    if rel is None:
        raise DomainError("DF-3.2 needs the declared 4-term relation")
    c = rel.coeffs
    ctw = c.get("theta_omega2", 0)
    if ctw == 0:
        raise DomainError("DF-3.2 relation must involve theta*omega2")
    pq1 = Fraction(-c.get("theta", 0), ctw)
    pq2 = Fraction(-c.get("omega1", 0), ctw)
    pq3 = Fraction(-c.get("one", 0), ctw)
    q1, q2, q3 = pq1.denominator, pq2.denominator, pq3.denominator
    theta = moduli.theta
    w2_hat = spec.omega2 / TWO_PI
    a_pl = float(pq1) - w2_hat
    b_pl = float(pq2)
    target = target_admissible(spec, TorusTarget.plane(a=a_pl, b=b_pl))
    lg = math.log(spec.gamma)

    # target point on the plane: grid in s, root in t
    best_t: tuple[float, float, float] | None = None  # margin, t*, s*
    for s_star in np.linspace(0.0, 1.0, 73, endpoint=False):
        def h_plane(t: float, _s=float(s_star)) -> float:
            w_ang = TWO_PI * (a_pl * t + b_pl * _s)
            try:
                _, wb, xi = df_wave_coeffs(spec, w_ang)
            except PoleError:
                return math.nan
            return math.exp(t * lg) * wb * math.sin(TWO_PI * _s + spec.eta2) - xi

        for t0 in _root_scan(h_plane, -6.0, 6.0, 1024):
            w0 = frac(a_pl * t0 + b_pl * float(s_star))
            if quant_margin(spec, TWO_PI * w0) <= quant_bound(spec.delta):
                continue
            a = alpha_df(spec, TWO_PI * float(s_star), TWO_PI * w0)
            if not (math.isfinite(a) and lo <= abs(a) <= hi):
                continue
            margin = abs(abs(a) - 1.0)
            if best_t is None or margin > best_t[0]:
                best_t = (margin, t0, float(s_star))
    if best_t is None:
        raise WindowExhausted("DF-3.2: no admissible target point on the plane", found=0)
    _, t_star, s_star = best_t

    kp = np.arange(1, window.k_max // q3 + 1, dtype=np.int64)
    ks = q3 * kp
    mp = np.round((t_star + ks * theta) / q1).astype(np.int64)
    ms = q1 * mp
    ok = (ms >= max(window.m_min, 1)) & (ms <= window.m_max)
    ks, ms = ks[ok], ms[ok]
    t_dist = np.abs((ms - theta * ks) - t_star)
    s_dist = np.abs((ks * (spec.omega1 / TWO_PI) - s_star + 0.5) % 1.0 - 0.5)
    dist = np.maximum(t_dist, s_dist)
    coarse = dist <= eps
    kept, _ = _exact_filter(spec, ks[coarse], ms[coarse], dist[coarse], None)
    best = float(np.min(dist)) if dist.size else math.inf
    return _assemble(
        spec, moduli, CaseTag.DF_3_2, kept, eps, target, {}, None, best,
        min_pairs, "DF-3.2",
    )


def _df33(spec, moduli, eps, window, kind, min_pairs, scan_halfwidth, case) -> PairSequence:
    if kind == "cs":
        raise NotApplicable(f"{case.value} guarantees only a cu band")
    pq1, pq2 = _theta_relation(moduli)
    p1, q1 = pq1.numerator, pq1.denominator
    p2, q2 = pq2.numerator, pq2.denominator
    if p1 == 0:
        raise WindowExhausted(
            f"{case.value}: theta rational makes the tilted target degenerate",
            found=0,
        )
    theta = moduli.theta
    w2_hat = spec.omega2 / TWO_PI
    lg = math.log(spec.gamma)

    if case is CaseTag.DF_3_3_1:
        rel2 = moduli.relation_for(("omega1", "theta_omega2", "one"))
        if rel2 is None:
            raise DomainError("DF-3.3.1 needs the declared {omega1, theta*omega2, one} relation")
        c2 = rel2.coeffs
        ctw = c2.get("theta_omega2", 0)
        if ctw == 0:
            raise DomainError("DF-3.3.1 second relation must involve theta*omega2")
        pq3 = Fraction(-c2.get("omega1", 0), ctw)
        pq4 = Fraction(-c2.get("one", 0), ctw)
        p3, q3 = pq3.numerator, pq3.denominator
        p4, q4 = pq4.numerator, pq4.denominator
        a_line = float(pq3) - w2_hat * (p1 / q1)

        def w_of_s(s: float) -> float:
            return a_line * s

        lattice_k = q2 * q4
        den = q1 * q3

        def make_m(kp: np.ndarray, ip: np.ndarray) -> np.ndarray:
            return p2 * q4 * kp + p1 * q3 * ip

        target = target_admissible(
            spec, TorusTarget.tilted_line(a1=-p1 / q1, b=0.0, a2=a_line)
        )
    else:
        # DF-3.3.2: w is free on the line plane; target a horizontal w slice
        lattice_k = q2
        den = q1

        def make_m(kp: np.ndarray, ip: np.ndarray) -> np.ndarray:
            return p2 * kp + p1 * ip

        w_of_s = None  # type: ignore[assignment]
        target = None  # chosen below

    def line_profile(s: float, w_val: float | None) -> float:
        w = w_of_s(s) if w_val is None else w_val  # type: ignore[misc]
        try:
            _, wb, xi = df_wave_coeffs(spec, TWO_PI * w)
        except PoleError:
            return math.nan
        return (
            math.exp(-(p1 / q1) * s * lg) * wb * math.sin(TWO_PI * s + spec.eta2) - xi
        )

    scored: list[tuple[float, float, float, float]] = []  # score, s0, w0, accept
    if case is CaseTag.DF_3_3_1:
        fn = lambda s: line_profile(s, None)
        roots = _root_scan(fn, -scan_halfwidth, scan_halfwidth, 4096)
        for s0 in _expanding_roots(
            roots, lambda s: alpha_df(spec, TWO_PI * s, TWO_PI * frac(w_of_s(s))),
            limit=12,
        ):
            w0 = frac(w_of_s(s0))
            if quant_margin(spec, TWO_PI * w0) <= quant_bound(spec.delta):
                continue
            a = alpha_df(spec, TWO_PI * s0, TWO_PI * w0)
            scored.append((abs(math.log(abs(a)) - math.log(2.0)), s0, w0,
                           _slope_radius(fn, s0, eps)))
    else:
        for w_grid in np.linspace(0.0, 1.0, 41, endpoint=False):
            wv = float(w_grid)
            if quant_margin(spec, TWO_PI * wv) <= quant_bound(spec.delta):
                continue
            fn = lambda s, _w=wv: line_profile(s, _w)
            for s0 in _expanding_roots(
                _root_scan(fn, -scan_halfwidth, scan_halfwidth, 2048),
                lambda s: alpha_df(spec, TWO_PI * s, TWO_PI * wv),
                limit=2,
            ):
                a = alpha_df(spec, TWO_PI * s0, TWO_PI * wv)
                scored.append((abs(math.log(abs(a)) - math.log(2.0)), s0, wv,
                               _slope_radius(fn, s0, eps)))
    if not scored:
        raise WindowExhausted(f"{case.value}: no expanding root on the target line", found=0)
    scored.sort(key=lambda t: t[0])
    s0_ref, w0_ref = scored[0][1], scored[0][2]
    if case is CaseTag.DF_3_3_2:
        # one target line means one w slice
        scored = [t for t in scored if t[2] == w0_ref]
    scored = scored[:6]
    if case is CaseTag.DF_3_3_2:
        target = target_admissible(
            spec, TorusTarget.tilted_line(a1=-p1 / q1, b=0.0, w_star=w0_ref)
        )
    alpha_ref = alpha_df(spec, TWO_PI * s0_ref, TWO_PI * w0_ref)

    kp = np.arange(1, window.k_max // lattice_k + 1, dtype=np.int64)
    w_hat = spec.omega1 / TWO_PI
    kept: list[tuple[int, int, float]] = []
    best_d = math.inf
    for _, s0, w0, accept in scored:
        ip = np.round((lattice_k * kp * w_hat - s0) / den).astype(np.int64)
        sigma = lattice_k * kp * w_hat - den * ip
        ks = lattice_k * kp
        ms = make_m(kp, ip)
        good = (ms >= max(window.m_min, 1)) & (ms <= window.m_max) & (ks >= window.k_min)
        dist = np.abs(sigma - s0)
        if case is CaseTag.DF_3_3_2:
            w_dist = np.abs((ms * w2_hat - w0 + 0.5) % 1.0 - 0.5)
            dist = np.maximum(dist, w_dist)
        if dist[good].size:
            best_d = min(best_d, float(np.min(dist[good])))
        coarse = good & (dist <= (max(accept, eps) if case is CaseTag.DF_3_3_2 else accept))
        got, _ = _exact_filter(spec, ks[coarse], ms[coarse], dist[coarse], None)
        kept.extend(got)
    kept = sorted({(k, m): (k, m, d) for k, m, d in kept}.values())
    if case is CaseTag.DF_3_3_1:
        kept = [t for t in kept if abs(coeffs(spec, t[0], t[1]).B_km) <= eps
                and abs(coeffs(spec, t[0], t[1]).A_km) > 1.0]
    else:
        kept = [t for t in kept if abs(coeffs(spec, t[0], t[1]).A_km) > 1.0]
    return _assemble(
        spec, moduli, case, kept, eps, target,
        {"q1": q1, "p1": p1, "q2": q2, "p2": p2}, alpha_ref, best_d,
        min_pairs, case.value,
    )


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def search_pairs(
    spec: CycleSpec,
    moduli: Moduli,
    case: CaseTag,
    eps: float = 1e-3,
    window: SearchWindow | None = None,
    kind: str | None = None,
    min_pairs: int = 1,
    band: tuple[float, float] | None = None,
    scan_halfwidth: float = 40.0,
    residue_rank: int = 0,
) -> PairSequence:
    """Run the case-specific pair search.

    `kind` requests the contraction side for cases producing both blenders
    ("cs" or "cu"); single-sided cases reject the impossible request.
    `residue_rank` skips to a lower-ranked admissible residue in the
    residue-class cases.  An unconstrained search (eps = inf) returns the
    first admissible pairs in the window.
    """
    window = window or SearchWindow()
    if math.isinf(eps):
        return _first_admissible(spec, moduli, case, window, min_pairs)
    if kind not in (None, "cs", "cu"):
        raise DomainError("kind must be 'cs', 'cu', or None")
    sf = spec.is_saddle_focus
    if case in (CaseTag.SF_1, CaseTag.SF_2, CaseTag.SF_3) and not sf:
        raise NotApplicable("saddle-focus case tag with a double-focus spec")
    if case.value.startswith("DF") and sf:
        raise NotApplicable("double-focus case tag with a saddle-focus spec")

    if case is CaseTag.SF_1:
        return _sf1(spec, moduli, eps, window, kind, min_pairs, residue_rank)
    if case is CaseTag.SF_2:
        return _sf2(spec, moduli, eps, window, kind, min_pairs, scan_halfwidth)
    if case is CaseTag.SF_3:
        return _sf3(spec, moduli, eps, window, kind, min_pairs, band)
    if case is CaseTag.DF_1:
        return _df1(spec, moduli, eps, window, kind, min_pairs, residue_rank)
    if case is CaseTag.DF_2_1:
        if moduli.is_rational("omega1") and not moduli.is_rational("omega2"):
            raise NotApplicable(
                "mirrored double-focus search (omega1 rational, omega2 irrational) "
                "requires the inverse-cycle return maps"
            )
        return _df21(spec, moduli, eps, window, kind, min_pairs, band)
    if case is CaseTag.DF_2_2:
        if moduli.is_rational("omega1") and not moduli.is_rational("omega2"):
            raise NotApplicable(
                "mirrored double-focus search (omega1 rational, omega2 irrational) "
                "requires the inverse-cycle return maps"
            )
        return _df22(spec, moduli, eps, window, kind, min_pairs, scan_halfwidth)
    if case is CaseTag.DF_3_1:
        return _df31(spec, moduli, eps, window, kind, min_pairs, band)
    if case is CaseTag.DF_3_2:
        return _df32(spec, moduli, eps, window, kind, min_pairs, band)
    if case in (CaseTag.DF_3_3_1, CaseTag.DF_3_3_2):
        return _df33(spec, moduli, eps, window, kind, min_pairs, scan_halfwidth, case)
    raise NotApplicable(f"no pair search for case {case.value}")


def _first_admissible(spec, moduli, case, window, min_pairs) -> PairSequence:
    """eps = inf: accept the first admissible pairs scanning k, best-m."""
    theta = moduli.theta
    kept: list[tuple[int, int, float]] = []
    t0 = 0.0
    if spec.is_saddle_focus:
        bu = spec.b_coef * spec.u_scalar
        t0 = math.log(max(abs(bu) / spec.B_coef, 1e-6)) / math.log(abs(spec.gamma))
    for k in range(max(window.k_min, 1), window.k_max + 1):
        m = max(int(round(t0 + theta * k)), max(window.m_min, 1))
        if m > window.m_max:
            continue
        rc = coeffs(spec, k, m)
        if rc.admissible:
            kept.append((k, m, 0.0))
            if len(kept) >= max(min_pairs, 1):
                break
    return _assemble(
        spec, moduli, case, kept, math.inf, None, {}, None,
        0.0 if kept else math.inf, min_pairs, f"{case.value} (unconstrained)",
    )


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def pair_sequence_csv_rows(seq: PairSequence) -> Iterable[tuple]:
    yield ("k", "m", "t", "s", "w", "A_km", "B_km")
    for (k, m), (t, s, w), a, b in zip(seq.pairs, seq.target_values, seq.A_values, seq.B_values):
        yield (k, m, t, s, w, a, b)
