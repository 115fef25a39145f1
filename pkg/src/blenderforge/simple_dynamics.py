"""Rational-moduli exclusion sets and the desk-scale two-pair scan.

With all moduli rational the powers lambda^k * gamma^m live on a discrete
set of magnitudes |gamma|^(s/q'), so two distinct return visits can balance
the same splitting value only if certain coefficient ratios land in
countable closed value sets.  `exclusion_sets` reports distances to the
truncated sets (closure limit points included explicitly); `brute_scan`
minimizes the two-pair residual over bounded index ranges and a grid of
cube positions, classifying any near-solutions found.

The scan residual is the two-pair balance normalized by its dominant term
magnitude; an absolute residual would fall below any fixed tolerance at
large indices for every coefficient choice, since all terms decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np

from .cycle_model import CycleSpec, Moduli, TWO_PI
from .errors import NotRational
from .return_map import df_wave_coeffs

SCALE_FLOOR = 1e-300
INDEX_CAP = 40_000       # exact-evaluation cap on prefilter survivors
SOLUTION_CAP = 400       # reported near-solutions


@dataclass(frozen=True)
class TruncationRanges:
    s_max: int = 200
    ell_max: int = 60
    n_max: int = 60


# ---------------------------------------------------------------------------
# Residue coefficient packs
# ---------------------------------------------------------------------------

def _sf_pack(spec: CycleSpec, q: int, p: int, angle_convention: str) -> dict[str, np.ndarray]:
    """Per-residue (a_r, x+_r) with a_r*b = A*sin(.+eta1), a_r*x+_r*b = B*sin(.+eta2)."""
    rs = np.arange(q)
    if angle_convention == "k_omega":
        ang = rs * TWO_PI * p / q
    else:
        ang = TWO_PI * rs.astype(float)
    s1 = np.sin(ang + spec.eta1)
    s2 = np.sin(ang + spec.eta2)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = spec.A_coef * s1 / spec.b_coef
        x_plus = spec.B_coef * s2 / (spec.A_coef * s1)
    return {"a": a, "x_plus": x_plus, "s1": s1, "s2": s2}


def _df_pack(spec: CycleSpec, q1: int, p1: int, q2: int, p2: int) -> dict[str, np.ndarray]:
    """Per-residue-pair coefficients of the double-focus two-pair equation.

    The splitting-value slope uses 2/cos(. + eta3); the auxiliary transition
    derivative it would carry is not part of the coefficient record and is
    taken as zero, which only rescales the eliminated parameter.
    """
    assert spec.eta3 is not None
    a = np.full((q1, q2), np.nan)
    b = np.full((q1, q2), np.nan)
    c = np.full(q2, np.nan)
    ell = np.full(q2, np.nan)
    for r2 in range(q2):
        w_ang = TWO_PI * r2 * p2 / q2
        try:
            wa, wb, xi = df_wave_coeffs(spec, w_ang)
        except Exception:
            continue
        c[r2] = xi
        cosv = math.cos(w_ang + spec.eta3)
        ell[r2] = 2.0 / cosv if abs(cosv) > 1e-14 else np.nan
        for r1 in range(q1):
            s_ang = TWO_PI * r1 * p1 / q1
            a[r1, r2] = wa * math.sin(s_ang + spec.eta1)
            b[r1, r2] = wb * math.sin(s_ang + spec.eta2)
    return {"a": a, "b": b, "c": c, "ell": ell}


# ---------------------------------------------------------------------------
# Exclusion sets
# ---------------------------------------------------------------------------

def exclusion_elements(
    gamma: float,
    lam: float,
    q_prime: int,
    ratio: float,
    trunc: TruncationRanges,
) -> Iterator[tuple[int | None, int | None, int | None, float]]:
    """Enumerate each (s, ell, n) element of the exclusion family exactly once.

    ell = None and n = None are the closure terms lambda^inf = 0 and
    gamma^-inf = 0; the final (None, None, None) entry is the s -> -inf
    limit point 0.
    """
    g = abs(gamma)
    ells: list[int | None] = list(range(1, trunc.ell_max + 1)) + [None]
    ns: list[int | None] = list(range(1, trunc.n_max + 1)) + [None]
    for s in range(-trunc.s_max, trunc.s_max + 1):
        gs = g ** (s / q_prime)
        for ell in ells:
            lam_l = 0.0 if ell is None else lam ** ell
            num = ratio - lam_l
            for n in ns:
                gn = 0.0 if n is None else gamma ** (-n)
                val = gs * num / (1.0 - gn)
                if math.isfinite(val):
                    yield (s, ell, n, val)
    yield (None, None, None, 0.0)


def _distance_to_family(
    target: float,
    gamma: float,
    lam: float,
    q_prime: int,
    ratio: float,
    trunc: TruncationRanges,
) -> float:
    """min over (s, ell, n) of |target - |gamma|^(s/q') * F(ell, n)|.

    For each factor F the optimal s is the log-rounding of target/F, so the
    minimum over the geometric s-axis needs only the two neighboring
    integers (plus the range endpoints), not the full enumeration.
    """
    g = abs(gamma)
    log_g = math.log(g)
    lam_pows = np.concatenate((lam ** np.arange(1, trunc.ell_max + 1), [0.0]))
    gam_pows = np.concatenate((
        np.asarray(gamma, dtype=float) ** -np.arange(1, trunc.n_max + 1), [0.0]
    ))
    factors = (ratio - lam_pows)[:, None] / (1.0 - gam_pows)[None, :]
    factors = factors[np.isfinite(factors)].ravel()
    best = abs(target)  # s -> -inf closure point is 0
    if factors.size == 0:
        return best
    nz = factors[factors != 0.0]
    if nz.size:
        same_sign = nz[(nz > 0) == (target > 0)] if target != 0.0 else np.array([])
        with np.errstate(divide="ignore", invalid="ignore"):
            if same_sign.size:
                s_real = q_prime * (math.log(abs(target)) - np.log(np.abs(same_sign))) / log_g
                for s_arr in (np.floor(s_real), np.ceil(s_real)):
                    s_cl = np.clip(s_arr, -trunc.s_max, trunc.s_max)
                    vals = np.exp((s_cl / q_prime) * log_g) * same_sign
                    best = min(best, float(np.min(np.abs(target - vals))))
            # range endpoints catch opposite-sign and clamped cases
            for s in (-trunc.s_max, trunc.s_max):
                vals = math.exp((s / q_prime) * log_g) * nz
                vals = vals[np.isfinite(vals)]
                if vals.size:
                    best = min(best, float(np.min(np.abs(target - vals))))
    return best


@dataclass(frozen=True)
class BruteScanResult:
    ranges: tuple[int, int]
    grid: int
    tol: float
    solutions: tuple[dict[str, Any], ...]
    n_solutions: int
    verdict: str                  # no_extra_pairs | constrained | violation
    share_type: str | None        # "m" | "k" | "mixed" | None
    min_residual: float
    truncated: bool = False

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "ranges": list(self.ranges),
            "grid": self.grid,
            "tol": self.tol,
            "solutions": [dict(s) for s in self.solutions],
            "n_solutions": self.n_solutions,
            "verdict": self.verdict,
            "share_type": self.share_type,
            "min_residual": self.min_residual,
            "truncated": self.truncated,
        }


@dataclass(frozen=True)
class ExclusionReport:
    eta_ok: dict[str, bool]
    ratio_memberships: dict[str, float]
    ab_memberships: dict[str, float]
    trunc: TruncationRanges
    scan: BruteScanResult | None = None

    @property
    def min_ratio_distance(self) -> float:
        return min(self.ratio_memberships.values(), default=math.inf)

    @property
    def min_ab_distance(self) -> float:
        return min(self.ab_memberships.values(), default=math.inf)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "eta_ok": dict(self.eta_ok),
            "ratio_memberships": dict(self.ratio_memberships),
            "ab_memberships": dict(self.ab_memberships),
            "min_ratio_distance": self.min_ratio_distance,
            "min_ab_distance": self.min_ab_distance,
            "trunc": {
                "s_max": self.trunc.s_max,
                "ell_max": self.trunc.ell_max,
                "n_max": self.trunc.n_max,
            },
            "scan": None if self.scan is None else self.scan.to_json_dict(),
        }


def _require_rational(moduli: Moduli, spec: CycleSpec) -> None:
    names = ["theta", "omega1"] + ([] if spec.is_saddle_focus else ["omega2"])
    for name in names:
        if not moduli.is_rational(name):
            raise NotRational(f"{name} is declared irrational")


def exclusion_sets(
    spec: CycleSpec,
    moduli: Moduli,
    trunc: TruncationRanges | None = None,
    zero_tol: float = 1e-9,
    angle_convention: str = "k_omega",
) -> ExclusionReport:
    """Distances of the coefficient ratios to the truncated exclusion sets,
    plus feasibility of the angle offsets at every residue."""
    _require_rational(moduli, spec)
    trunc = trunc or TruncationRanges()
    q_prime = moduli.rational("theta").denominator
    f1 = moduli.rational("omega1")
    q1, p1 = f1.denominator, f1.numerator

    if spec.is_saddle_focus:
        pack = _sf_pack(spec, q1, p1, angle_convention)
        s1, s2 = pack["s1"], pack["s2"]
        eta_ok = {
            "eta1": bool(np.min(np.abs(s1)) > zero_tol),
            "eta2": bool(np.min(np.abs(s2)) > zero_tol),
        }
        ax = pack["a"] * pack["x_plus"]     # = B*sin(. + eta2) / b
        ab = pack["a"] * spec.b_coef        # = A*sin(. + eta1)
        ratio_d: dict[str, float] = {}
        ab_d: dict[str, float] = {}
        for r1 in range(q1):
            if abs(s1[r1]) <= zero_tol or abs(s2[r1]) <= zero_tol:
                continue
            target = abs(spec.u_scalar / ax[r1])
            for r2 in range(q1):
                if abs(s1[r2]) <= zero_tol or abs(s2[r2]) <= zero_tol:
                    continue
                ratio = abs(ax[r2] / ax[r1])
                ratio_d[f"{r1},{r2}"] = _distance_to_family(
                    target, spec.gamma, spec.lam, q_prime, ratio, trunc
                )
            ab_d[str(r1)] = _distance_to_family(
                abs(ab[r1]), spec.gamma, spec.lam, q_prime, 1.0,
                TruncationRanges(trunc.s_max, 0, 0),
            )
        return ExclusionReport(eta_ok, ratio_d, ab_d, trunc)

    f2 = moduli.rational("omega2")
    q2, p2 = f2.denominator, f2.numerator
    pack = _df_pack(spec, q1, p1, q2, p2)
    a, b, c = pack["a"], pack["b"], pack["c"]
    rs1 = np.arange(q1) * TWO_PI * p1 / q1
    rs2 = np.arange(q2) * TWO_PI * p2 / q2
    assert spec.eta3 is not None
    eta_ok = {
        "eta1": bool(np.min(np.abs(np.sin(rs1 + spec.eta1))) > zero_tol),
        "eta2": bool(np.min(np.abs(np.sin(rs1 + spec.eta2))) > zero_tol),
        "eta3": bool(
            np.isfinite(c).all()
            and np.min(np.abs(np.cos(rs2 + spec.eta3))) > zero_tol
        ),
    }
    ratio_d = {}
    ab_d = {}
    for r1 in range(q1):
        for r2 in range(q2):
            if not (math.isfinite(b[r1, r2]) and abs(b[r1, r2]) > zero_tol):
                continue
            target = abs(c[r2] / b[r1, r2])
            for r1p in range(q1):
                for r2p in range(q2):
                    if not math.isfinite(b[r1p, r2p]):
                        continue
                    ratio = abs(b[r1p, r2p] / b[r1, r2])
                    ratio_d[f"{r1},{r2}->{r1p},{r2p}"] = _distance_to_family(
                        target, spec.gamma, spec.lam, q_prime, ratio, trunc
                    )
            if math.isfinite(a[r1, r2]):
                ab_d[f"{r1},{r2}"] = _distance_to_family(
                    abs(a[r1, r2]), spec.gamma, spec.lam, q_prime, 1.0,
                    TruncationRanges(trunc.s_max, 0, 0),
                )
    return ExclusionReport(eta_ok, ratio_d, ab_d, trunc)


# ---------------------------------------------------------------------------
# Brute two-pair scan
# ---------------------------------------------------------------------------

def _label(v: int | None) -> int | None:
    return v


class _SfTables:
    """x(k, K) = base_x[k] + slope_x[k]*K, y(m, C) = base_y[m] + slope_y[m]*C.

    The last index slot of each axis is the infinite index (term = 0),
    standing for the orbit segments that stay on the local manifolds.
    """

    def __init__(self, spec: CycleSpec, q: int, p: int, k_max: int, m_max: int,
                 angle_convention: str):
        pack = _sf_pack(spec, q, p, angle_convention)
        a, xp = pack["a"], pack["x_plus"]
        ks = np.arange(1, k_max + 1)
        ms = np.arange(1, m_max + 1)
        del xp  # a_r * x+_r = B*sin(.+eta2)/b is finite even where a_r = 0
        lam_pows = spec.lam ** ks.astype(float)
        gam_pows = np.asarray(spec.gamma, dtype=float) ** (-ms.astype(float))
        ar = a[ks % q]
        s2 = pack["s2"][ks % q]
        base_x = lam_pows * s2 * spec.B_coef / spec.b_coef
        slope_x = lam_pows * ar * spec.delta
        self.base_x = np.concatenate((base_x, [0.0]))
        self.slope_x = np.concatenate((slope_x, [0.0]))
        self.base_y = np.concatenate((gam_pows * spec.u_scalar, [0.0]))
        self.slope_y = np.concatenate((gam_pows * spec.delta / spec.b_coef, [0.0]))
        self.k_labels: list[int | None] = ks.tolist() + [None]
        self.m_labels: list[int | None] = ms.tolist() + [None]

    def x(self, ik: int, K) -> Any:
        return self.base_x[ik] + self.slope_x[ik] * K

    def y(self, im: int, C) -> Any:
        return self.base_y[im] + self.slope_y[im] * C

    def intervals(self):
        x_lo = self.base_x - np.abs(self.slope_x)
        x_hi = self.base_x + np.abs(self.slope_x)
        y_lo = self.base_y - np.abs(self.slope_y)
        y_hi = self.base_y + np.abs(self.slope_y)
        x_scale = np.maximum(np.abs(x_lo), np.abs(x_hi))
        y_scale = np.maximum(np.abs(y_lo), np.abs(y_hi))
        return (x_lo, x_hi, x_scale), (y_lo, y_hi, y_scale)

    def residual_min(self, grid: np.ndarray, ik1, im1, ik2, im2):
        K1 = grid[:, None, None, None]
        C1 = grid[None, :, None, None]
        K2 = grid[None, None, :, None]
        C2 = grid[None, None, None, :]
        x1, y1 = self.x(ik1, K1), self.y(im1, C1)
        x2, y2 = self.x(ik2, K2), self.y(im2, C2)
        res = np.abs((x1 - y1) - (x2 - y2))
        scale = np.maximum(
            np.maximum(np.abs(x1), np.abs(y1)),
            np.maximum(np.abs(x2), np.abs(y2)),
        )
        norm = res / np.maximum(scale, SCALE_FLOOR)
        idx = np.unravel_index(int(np.argmin(norm)), norm.shape)
        gp = (float(grid[idx[0]]), float(grid[idx[1]]),
              float(grid[idx[2]]), float(grid[idx[3]]))
        return float(norm[idx]), gp

    def parts(self, ik1, im1, ik2, im2, gp):
        K1, C1, K2, C2 = gp
        x1, y1 = float(self.x(ik1, K1)), float(self.y(im1, C1))
        x2, y2 = float(self.x(ik2, K2)), float(self.y(im2, C2))
        scale = max(abs(x1), abs(x2), abs(y1), abs(y2), SCALE_FLOOR)
        return abs(x1 - x2), abs(y1 - y2), scale


class _DfTables:
    """u(m, K; r1) = gamma^m (a*K*delta + b)/ell, v(k, C; r2) = (c - C*delta)
    lam^-k / ell; P = u + v after eliminating the splitting value.

    Infinite indices are not represented: in the divided form both term
    families grow, so truncation to the finite ranges is the scan domain.
    """

    def __init__(self, spec: CycleSpec, q1: int, p1: int, q2: int, p2: int,
                 k_max: int, m_max: int):
        pack = _df_pack(spec, q1, p1, q2, p2)
        self.a, self.b, self.c, self.ell = pack["a"], pack["b"], pack["c"], pack["ell"]
        self.d = spec.delta
        ks = np.arange(1, k_max + 1)
        ms = np.arange(1, m_max + 1)
        self.gam_pows = np.asarray(spec.gamma, dtype=float) ** ms.astype(float)
        self.lam_neg = spec.lam ** (-ks.astype(float))
        self.r1_of_k = ks % q1
        self.r2_of_m = ms % q2
        self.k_labels: list[int | None] = ks.tolist()
        self.m_labels: list[int | None] = ms.tolist()

    def _uv(self, ik: int, im: int, K, C):
        r1 = self.r1_of_k[ik]
        r2 = self.r2_of_m[im]
        ell = self.ell[r2]
        u = self.gam_pows[im] * (self.a[r1, r2] * K * self.d + self.b[r1, r2]) / ell
        v = (self.c[r2] - C * self.d) * self.lam_neg[ik] / ell
        return u, v

    def intervals(self):
        nk, nm = len(self.k_labels), len(self.m_labels)
        p_lo = np.empty((nk, nm))
        p_hi = np.empty((nk, nm))
        scale = np.empty((nk, nm))
        for ik in range(nk):
            u_lo, v_lo = self._uv(ik, np.arange(nm), -1.0, -1.0)
            u_hi, v_hi = self._uv(ik, np.arange(nm), 1.0, 1.0)
            lo = np.minimum(u_lo, u_hi) + np.minimum(v_lo, v_hi)
            hi = np.maximum(u_lo, u_hi) + np.maximum(v_lo, v_hi)
            p_lo[ik] = lo
            p_hi[ik] = hi
            scale[ik] = np.maximum(
                np.maximum(np.abs(u_lo), np.abs(u_hi)),
                np.maximum(np.abs(v_lo), np.abs(v_hi)),
            )
        bad = ~(np.isfinite(p_lo) & np.isfinite(p_hi))
        p_lo[bad] = np.inf   # excluded from overlaps
        p_hi[bad] = -np.inf
        scale[bad] = SCALE_FLOOR
        return p_lo, p_hi, scale

    def residual_min(self, grid: np.ndarray, ik1, im1, ik2, im2):
        K1 = grid[:, None, None, None]
        C1 = grid[None, :, None, None]
        K2 = grid[None, None, :, None]
        C2 = grid[None, None, None, :]
        u1, v1 = self._uv(ik1, im1, K1, C1)
        u2, v2 = self._uv(ik2, im2, K2, C2)
        res = np.abs((u1 + v1) - (u2 + v2))
        scale = np.maximum(
            np.maximum(np.abs(u1) + 0 * res, np.abs(v1) + 0 * res),
            np.maximum(np.abs(u2) + 0 * res, np.abs(v2) + 0 * res),
        )
        norm = res / np.maximum(scale, SCALE_FLOOR)
        idx = np.unravel_index(int(np.argmin(norm)), norm.shape)
        gp = (float(grid[idx[0]]), float(grid[idx[1]]),
              float(grid[idx[2]]), float(grid[idx[3]]))
        return float(norm[idx]), gp

    def parts(self, ik1, im1, ik2, im2, gp):
        K1, C1, K2, C2 = gp
        u1, v1 = self._uv(ik1, im1, K1, C1)
        u2, v2 = self._uv(ik2, im2, K2, C2)
        scale = max(abs(u1), abs(u2), abs(v1), abs(v2), SCALE_FLOOR)
        return abs(float(v1 - v2)), abs(float(u1 - u2)), scale


def _prefilter_tuples(
    x_iv, y_iv, tol: float, distinct_only: bool
) -> list[tuple[int, int, int, int]]:
    """(k1, k2, m1, m2) whose interval gap can reach tol * scale.

    Works on separable term intervals: Dx in [x1] - [x2], Dy in [y1] - [y2].
    """
    (x_lo, x_hi, xs), (y_lo, y_hi, ys) = x_iv, y_iv
    nk, nm = len(x_lo), len(y_lo)
    out: list[tuple[int, int, int, int]] = []
    for k1 in range(nk):
        dx_lo = x_lo[k1] - x_hi            # over k2
        dx_hi = x_hi[k1] - x_lo
        sx = np.maximum(xs[k1], xs)
        # Dy tensors over (m1, m2)
        dy_lo = y_lo[:, None] - y_hi[None, :]
        dy_hi = y_hi[:, None] - y_lo[None, :]
        sy = np.maximum(ys[:, None], ys[None, :])
        for k2 in range(nk):
            if distinct_only and k1 == k2:
                continue
            gap = np.maximum(
                0.0,
                np.maximum(dx_lo[k2] - dy_hi, dy_lo - dx_hi[k2]),
            )
            scale = np.maximum(sx[k2], sy)
            hits = np.argwhere(gap <= tol * np.maximum(scale, SCALE_FLOOR))
            for m1, m2 in hits:
                if distinct_only and m1 == m2:
                    continue
                out.append((k1, k2, int(m1), int(m2)))
                if len(out) > INDEX_CAP:
                    return out
    return out


def _prefilter_tuples_df(p_lo, p_hi, scale, tol: float) -> list[tuple[int, int, int, int]]:
    """Doubly-distinct (k1, k2, m1, m2) with overlapping P-intervals (DF)."""
    nk, nm = p_lo.shape
    out: list[tuple[int, int, int, int]] = []
    for k1 in range(nk):
        for m1 in range(nm):
            lo1, hi1, s1 = p_lo[k1, m1], p_hi[k1, m1], scale[k1, m1]
            if not math.isfinite(lo1):
                continue
            gap = np.maximum(0.0, np.maximum(lo1 - p_hi, p_lo - hi1))
            sc = np.maximum(s1, scale)
            mask = gap <= tol * np.maximum(sc, SCALE_FLOOR)
            mask[k1, :] = False   # k-sharing handled separately
            mask[:, m1] = False
            for k2, m2 in np.argwhere(mask):
                if (k2, m2) > (k1, m1):
                    out.append((k1, int(k2), m1, int(m2)))
                    if len(out) > INDEX_CAP:
                        return out
    return out


def _sharing_witnesses_sf(tables: _SfTables, grid: np.ndarray, tol: float,
                          spec: CycleSpec) -> list[dict[str, Any]]:
    """Exact witnesses of the index-sharing solution families.

    m-sharing: both visits spend the same m turns and the k-terms are below
    resolution (lambda^k = O(delta) * gamma^-m); k-sharing symmetric.
    """
    out: list[dict[str, Any]] = []
    nk = len(tables.k_labels)
    nm = len(tables.m_labels)
    xs = np.maximum(np.abs(tables.base_x) + np.abs(tables.slope_x), SCALE_FLOOR)
    ys = np.maximum(np.abs(tables.base_y) + np.abs(tables.slope_y), SCALE_FLOOR)
    for im in range(nm - 1):
        y_scale = ys[im]
        small = np.nonzero(xs[:-1] <= 0.25 * tol * y_scale)[0]
        cand = list(small[:1]) + [nk - 1]  # smallest admissible k and infinity
        if len(cand) >= 2 and cand[0] != cand[1]:
            ik1, ik2 = int(cand[0]), int(cand[1])
            res, gp = tables.residual_min(grid, ik1, im, ik2, im)
            if res <= tol:
                out.append(_solution(tables, ik1, im, ik2, im, res, gp))
    for ik in range(nk - 1):
        x_scale = xs[ik]
        small = np.nonzero(ys[:-1] <= 0.25 * tol * x_scale)[0]
        cand = list(small[:1]) + [nm - 1]
        if len(cand) >= 2 and cand[0] != cand[1]:
            im1, im2 = int(cand[0]), int(cand[1])
            res, gp = tables.residual_min(grid, ik, im1, ik, im2)
            if res <= tol:
                out.append(_solution(tables, ik, im1, ik, im2, res, gp))
    return out


def _solution(tables, ik1, im1, ik2, im2, res, gp) -> dict[str, Any]:
    return {
        "pair1": [_label(tables.k_labels[ik1]), _label(tables.m_labels[im1])],
        "pair2": [_label(tables.k_labels[ik2]), _label(tables.m_labels[im2])],
        "residual": res,
        "grid_point": list(gp),
    }


def brute_scan(
    spec: CycleSpec,
    moduli: Moduli,
    ranges: tuple[int, int] = (40, 40),
    grid: int = 9,
    tol: float = 1e-6,
    angle_convention: str = "k_omega",
) -> BruteScanResult:
    """Exhaustive two-pair scan over k, m <= ranges plus infinite indices.

    Enumerates index 4-tuples through an interval prefilter (sound: the
    grid residual cannot beat the interval gap), exactly minimizes the
    normalized residual over the (K, C) grid on survivors, and classifies:
    a solution is a violation only when both its k-part and m-part
    differences are active above the tolerance at the solution's scale;
    otherwise it belongs to an index-sharing family (constrained).
    """
    _require_rational(moduli, spec)
    k_max, m_max = ranges
    grid_vals = np.linspace(-1.0, 1.0, grid)
    f1 = moduli.rational("omega1")
    q1, p1 = f1.denominator, f1.numerator

    solutions: list[dict[str, Any]] = []
    min_residual = math.inf
    truncated = False

    if k_max == 0 or m_max == 0:
        return BruteScanResult(
            ranges=(k_max, m_max), grid=grid, tol=tol, solutions=(),
            n_solutions=0, verdict="no_extra_pairs", share_type=None,
            min_residual=math.inf,
        )

    if spec.is_saddle_focus:
        tables: Any = _SfTables(spec, q1, p1, k_max, m_max, angle_convention)
        solutions.extend(_sharing_witnesses_sf(tables, grid_vals, tol, spec))
        x_iv, y_iv = tables.intervals()
        tuples = _prefilter_tuples(x_iv, y_iv, tol, distinct_only=True)
    else:
        f2 = moduli.rational("omega2")
        q2, p2 = f2.denominator, f2.numerator
        tables = _DfTables(spec, q1, p1, q2, p2, k_max, m_max)
        tuples = _prefilter_tuples_df(*tables.intervals(), tol=tol)

    if len(tuples) > INDEX_CAP:
        truncated = True
        tuples = tuples[:INDEX_CAP]

    violation = False
    for ik1, ik2, im1, im2 in tuples:
        res, gp = tables.residual_min(grid_vals, ik1, im1, ik2, im2)
        min_residual = min(min_residual, res)
        if res <= tol:
            sol = _solution(tables, ik1, im1, ik2, im2, res, gp)
            dx, dy, scale = tables.parts(ik1, im1, ik2, im2, gp)
            k_active = dx > 2.0 * tol * scale
            m_active = dy > 2.0 * tol * scale
            sol["k_part_active"] = bool(k_active)
            sol["m_part_active"] = bool(m_active)
            # a violation needs genuinely different index labels on both
            # axes AND both power differences active at the solution's
            # scale (a below-resolution difference is the infinite-index
            # identification)
            k_distinct = tables.k_labels[ik1] != tables.k_labels[ik2]
            m_distinct = tables.m_labels[im1] != tables.m_labels[im2]
            if k_distinct and m_distinct and k_active and m_active:
                violation = True
            if len(solutions) < SOLUTION_CAP:
                solutions.append(sol)
            else:
                truncated = True

    for sol in solutions:
        min_residual = min(min_residual, sol["residual"])

    if not solutions:
        verdict = "no_extra_pairs"
        share: str | None = None
    elif violation:
        verdict = "violation"
        share = "mixed"
    else:
        verdict = "constrained"
        m_shared = all(s["pair1"][1] == s["pair2"][1] for s in solutions)
        k_shared = all(s["pair1"][0] == s["pair2"][0] for s in solutions)
        share = "m" if m_shared and not k_shared else (
            "k" if k_shared and not m_shared else "mixed"
        )
    return BruteScanResult(
        ranges=(k_max, m_max), grid=grid, tol=tol,
        solutions=tuple(solutions), n_solutions=len(solutions),
        verdict=verdict, share_type=share, min_residual=min_residual,
        truncated=truncated,
    )


def simple_verdict(report: ExclusionReport, distance_tol: float = 1e-3) -> str:
    """"simple_hyperbolic_expected" iff every angle offset is feasible, every
    exclusion distance clears distance_tol, and the scan (if attached) found
    at most index-sharing solutions; never claims blender existence."""
    if not all(report.eta_ok.values()):
        return "inconclusive"
    if report.min_ratio_distance <= distance_tol:
        return "inconclusive"
    if report.min_ab_distance <= distance_tol:
        return "inconclusive"
    if report.scan is not None and report.scan.verdict == "violation":
        return "inconclusive"
    return "simple_hyperbolic_expected"
