"""Covering certificates for the affine one-dimensional systems extracted
from a pair set, plus direct simulation of the covering property.

A certificate asserts: the images of the central interval I = [-c*delta,
c*delta] under the affine maps x -> A_n*x + B_n (taken inverse when the
band is expanding) cover a strict neighborhood of I through an ordered
chain with quantified consecutive overlaps.  Every disc crossing the
activating cube properly with respect to the certificate's cone then admits
an infinite pullback itinerary, which `simulate_covering` exercises on
sampled discs.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .arithmetic import PairSequence
from .cycle_model import CycleSpec
from .errors import BandViolation, CoverageGap, KindMismatch, SimulationFailure
from .rng import philox_rng

BAND_TOL = 1e-9
AUTO_SHRINK_FACTOR = 0.93
AUTO_SHRINK_FLOOR = 1e-9


# ---------------------------------------------------------------------------
# Certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessEntry:
    n: int                      # index into pair_set / A_values
    interval: tuple[float, float]
    overlap: float | None       # with the previous chain entry

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "interval": [repr(self.interval[0]), repr(self.interval[1])],
            "overlap": self.overlap,
        }


@dataclass(frozen=True)
class ActivatingCube:
    x_center: float
    x_half: float
    delta: float
    y_dim: int
    z_dim: int

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "x_center": self.x_center,
            "x_half": self.x_half,
            "delta": self.delta,
            "y_dim": self.y_dim,
            "z_dim": self.z_dim,
        }


@dataclass(frozen=True)
class BlenderCertificate:
    blender_kind: str            # "cs" | "cu"
    index: int
    pair_set: tuple[tuple[int, int], ...]
    A_values: tuple[float, ...]
    B_values: tuple[float, ...]
    interval_I: tuple[float, float]
    c: float
    delta: float
    witness: tuple[WitnessEntry, ...]
    A_band: tuple[float, float]
    cone_K: float
    activating_cube: ActivatingCube
    overlap_min: float
    neighborhood_margin: float

    @property
    def x_center(self) -> float:
        return self.activating_cube.x_center

    def effective_maps(self) -> tuple[np.ndarray, np.ndarray]:
        """Contracting system (alpha_n, beta_n): the forward maps for a cs
        certificate, their inverses for a cu certificate."""
        a = np.asarray(self.A_values)
        b = np.asarray(self.B_values)
        if self.blender_kind == "cs":
            return a, b
        return 1.0 / a, -b / a

    def witness_images(self) -> list[tuple[int, float, float]]:
        return [(w.n, w.interval[0], w.interval[1]) for w in self.witness]

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "blender_kind": self.blender_kind,
            "index": self.index,
            "pair_set": [list(p) for p in self.pair_set],
            "A_values": list(self.A_values),
            "B_values": list(self.B_values),
            "interval_I": [repr(self.interval_I[0]), repr(self.interval_I[1])],
            "c": self.c,
            "delta": self.delta,
            "witness": [w.to_json_dict() for w in self.witness],
            "A_band": list(self.A_band),
            "cone_K": self.cone_K,
            "activating_cube": self.activating_cube.to_json_dict(),
            "overlap_min": self.overlap_min,
            "neighborhood_margin": self.neighborhood_margin,
        }

    @classmethod
    def from_json_dict(cls, doc: dict[str, Any]) -> "BlenderCertificate":
        cube = ActivatingCube(**doc["activating_cube"])
        return cls(
            blender_kind=doc["blender_kind"],
            index=int(doc["index"]),
            pair_set=tuple((int(k), int(m)) for k, m in doc["pair_set"]),
            A_values=tuple(float(v) for v in doc["A_values"]),
            B_values=tuple(float(v) for v in doc["B_values"]),
            interval_I=(float(doc["interval_I"][0]), float(doc["interval_I"][1])),
            c=float(doc["c"]),
            delta=float(doc["delta"]),
            witness=tuple(
                WitnessEntry(
                    n=int(w["n"]),
                    interval=(float(w["interval"][0]), float(w["interval"][1])),
                    overlap=None if w["overlap"] is None else float(w["overlap"]),
                )
                for w in doc["witness"]
            ),
            A_band=(float(doc["A_band"][0]), float(doc["A_band"][1])),
            cone_K=float(doc["cone_K"]),
            activating_cube=cube,
            overlap_min=float(doc["overlap_min"]),
            neighborhood_margin=float(doc["neighborhood_margin"]),
        )


# ---------------------------------------------------------------------------
# Chain covering
# ---------------------------------------------------------------------------

def _affine_images(
    alphas: np.ndarray, betas: np.ndarray, lo: float, hi: float
) -> list[tuple[float, float]]:
    """Exact image intervals of [lo, hi] under x -> alpha*x + beta."""
    e1 = alphas * lo + betas
    e2 = alphas * hi + betas
    return [(min(a, b), max(a, b)) for a, b in zip(e1.tolist(), e2.tolist())]


def chain_cover(
    images: Sequence[tuple[float, float]],
    left: float,
    right: float,
    overlap_min: float,
) -> tuple[list[int], list[float | None]] | tuple[None, tuple[float, float]]:
    """Greedy chain covering [left, right] with consecutive overlaps >=
    overlap_min; returns (chain indices, overlaps) or (None, uncovered gap).

    The greedy step (max right endpoint among candidates reaching back by
    overlap_min) reaches at least as far as any feasible chain, so failure
    here means no chain exists.
    """
    order = sorted(range(len(images)), key=lambda i: (images[i][0], -images[i][1]))
    chain: list[int] = []
    overlaps: list[float | None] = []
    reach = left
    prev_right: float | None = None
    while True:
        bound = reach if prev_right is None else prev_right - overlap_min
        best = None
        for i in order:
            lo, hi = images[i]
            if lo > bound:
                break
            if i in chain:
                continue
            if best is None or hi > images[best][1] or (
                hi == images[best][1] and lo < images[best][0]
            ):
                if hi > reach:
                    best = i
        if best is None:
            return None, (reach, right)
        lo, hi = images[best]
        overlaps.append(None if prev_right is None else prev_right - lo)
        chain.append(best)
        prev_right = hi
        reach = hi
        if reach >= right:
            return chain, overlaps


def union_covers(
    images: Sequence[tuple[float, float]], left: float, right: float
) -> bool:
    """Exact union sweep: do the closed images cover [left, right]?"""
    reach = left
    for lo, hi in sorted(images):
        if lo > reach:
            return False
        reach = max(reach, hi)
        if reach >= right:
            return True
    return reach >= right


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------

def _band(a_values: Sequence[float]) -> tuple[str, float, float]:
    mags = [abs(a) for a in a_values]
    lo, hi = min(mags), max(mags)
    if lo <= BAND_TOL:
        raise BandViolation(f"contraction factor touches 0: min |A| = {lo!r}")
    if hi < 1.0 - BAND_TOL:
        return "cs", lo, hi
    if lo > 1.0 + BAND_TOL:
        return "cu", lo, hi
    raise BandViolation(
        f"contraction factors straddle or touch 1: |A| in [{lo!r}, {hi!r}]"
    )


def default_overlap_min(a_values: Sequence[float], kind: str, c: float, delta: float) -> float:
    """0.1*c*delta, capped at half the smallest effective image width so the
    requirement stays attainable for strongly contracting bands."""
    mags = [abs(a) for a in a_values]
    eff_min = min(mags) if kind == "cs" else 1.0 / max(mags)
    return c * delta * min(0.1, eff_min)


def _try_cover(
    alphas: np.ndarray,
    betas: np.ndarray,
    kind: str,
    center: float,
    c: float,
    delta: float,
    overlap_min: float | None,
) -> tuple[list[int], list[float | None], float, float] | None:
    half = c * delta
    omin = default_overlap_min(alphas.tolist(), kind, c, delta) \
        if overlap_min is None else overlap_min
    nu = omin / 2.0
    if kind == "cs":
        eff_a, eff_b = alphas, betas
    else:
        eff_a, eff_b = 1.0 / alphas, -betas / alphas
    images = _affine_images(eff_a, eff_b, center - half, center + half)
    chain, overlaps = chain_cover(images, center - half - nu, center + half + nu, omin)
    if chain is None:
        return None
    return chain, overlaps, omin, nu


def certify(
    spec: CycleSpec,
    pairs: PairSequence,
    overlap_min: float | None = None,
    c: float | None = None,
    cone_K: float | None = None,
    center: float = 0.0,
) -> BlenderCertificate:
    """Build a covering certificate from a pair sequence.

    With c given, coverage is checked at exactly that interval; with c=None
    the largest feasible c <= spec.c_frac is located (geometric descent plus
    bisection refinement) and reported in the certificate.  The default
    overlap requirement is 0.1*c*delta, re-derived for each candidate c.
    """
    if not pairs.pairs:
        raise CoverageGap("empty pair set", uncovered=None)
    kind, lo, hi = _band(pairs.A_values)
    alphas = np.asarray(pairs.A_values, dtype=float)
    betas = np.asarray(pairs.B_values, dtype=float)
    delta = spec.delta

    if c is not None:
        result = _try_cover(alphas, betas, kind, center, c, delta, overlap_min)
        if result is None:
            eff = (alphas, betas) if kind == "cs" else (1.0 / alphas, -betas / alphas)
            images = _affine_images(eff[0], eff[1], center - c * delta, center + c * delta)
            omin = default_overlap_min(alphas.tolist(), kind, c, delta) \
                if overlap_min is None else overlap_min
            _, gap = chain_cover(
                images, center - c * delta - omin / 2, center + c * delta + omin / 2, omin
            )
            raise CoverageGap(
                f"images do not cover a neighborhood of I at c={c!r}",
                uncovered=gap if isinstance(gap, tuple) else None,
            )
        c_used = c
    else:
        c_try = spec.c_frac
        result = None
        while c_try > AUTO_SHRINK_FLOOR:
            result = _try_cover(alphas, betas, kind, center, c_try, delta, overlap_min)
            if result is not None:
                break
            c_try *= AUTO_SHRINK_FACTOR
        if result is None:
            raise CoverageGap(
                "no interval size admits a covering chain", uncovered=None
            )
        # refine upward toward the largest feasible c in the last bracket
        c_lo = c_try
        c_hi = min(spec.c_frac, c_try / AUTO_SHRINK_FACTOR)
        for _ in range(50):
            mid = 0.5 * (c_lo + c_hi)
            r = _try_cover(alphas, betas, kind, center, mid, delta, overlap_min)
            if r is not None:
                c_lo, result = mid, r
            else:
                c_hi = mid
        c_used = c_lo

    chain, overlaps, omin, nu = result
    half = c_used * delta
    if kind == "cs":
        eff_a, eff_b = alphas, betas
    else:
        eff_a, eff_b = 1.0 / alphas, -betas / alphas
    images = _affine_images(eff_a, eff_b, center - half, center + half)
    witness = tuple(
        WitnessEntry(n=i, interval=images[i], overlap=o)
        for i, o in zip(chain, overlaps)
    )
    K = cone_K if cone_K is not None else min(0.1, omin / (4.0 * delta))
    cube = ActivatingCube(
        x_center=center, x_half=half, delta=delta,
        y_dim=spec.y_dim, z_dim=spec.z_dim,
    )
    return BlenderCertificate(
        blender_kind=kind,
        index=spec.d1 if kind == "cs" else spec.d2,
        pair_set=tuple(pairs.pairs),
        A_values=tuple(pairs.A_values),
        B_values=tuple(pairs.B_values),
        interval_I=(center - half, center + half),
        c=c_used,
        delta=delta,
        witness=witness,
        A_band=(lo, hi),
        cone_K=K,
        activating_cube=cube,
        overlap_min=omin,
        neighborhood_margin=nu,
    )


def recheck_witness(cert: BlenderCertificate) -> bool:
    """Recompute every witness image from (A_n, B_n, c, delta) and re-verify
    coverage and overlaps by exact arithmetic."""
    eff_a, eff_b = cert.effective_maps()
    lo_i, hi_i = cert.interval_I
    images = _affine_images(eff_a, eff_b, lo_i, hi_i)
    prev_right = None
    reach = lo_i - cert.neighborhood_margin
    for w in cert.witness:
        lo, hi = images[w.n]
        if not (math.isclose(lo, w.interval[0], rel_tol=0, abs_tol=1e-15)
                and math.isclose(hi, w.interval[1], rel_tol=0, abs_tol=1e-15)):
            return False
        if prev_right is not None:
            if prev_right - lo < cert.overlap_min - 1e-12:
                return False
            if w.overlap is None or abs((prev_right - lo) - w.overlap) > 1e-12:
                return False
        if lo > reach:
            return False
        reach = max(reach, hi)
        prev_right = hi
    return reach >= hi_i + cert.neighborhood_margin


# ---------------------------------------------------------------------------
# Covering simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscRecord:
    index: int
    x_center: float
    x_extent: float
    ok: bool
    fail_step: int | None
    steps: tuple[int, ...]           # witness indices selected per step
    step_factors: tuple[float, ...]  # measured |A_n| per step
    note: str = ""

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "x_center": self.x_center,
            "x_extent": self.x_extent,
            "ok": self.ok,
            "fail_step": self.fail_step,
            "steps": list(self.steps),
            "step_factors": list(self.step_factors),
            "note": self.note,
        }


@dataclass(frozen=True)
class CoveringSimReport:
    n_discs: int
    depth: int
    survivors: int
    per_disc: tuple[DiscRecord, ...]
    step_factor_min: float
    step_factor_max: float

    @property
    def all_ok(self) -> bool:
        return self.survivors == self.n_discs

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "n_discs": self.n_discs,
            "depth": self.depth,
            "survivors": self.survivors,
            "all_ok": self.all_ok,
            "step_factor_min": self.step_factor_min,
            "step_factor_max": self.step_factor_max,
            "per_disc": [d.to_json_dict() for d in self.per_disc],
        }


def _disc_rng(seed: int, index: int) -> np.random.Generator:
    return philox_rng(seed, index)


def _simulate_disc(
    cert: BlenderCertificate,
    index: int,
    seed: int,
    depth: int,
    x_center: float | None = None,
    x_extent: float | None = None,
) -> DiscRecord:
    """Pull one sampled disc through the witness chain to the given depth.

    The disc is a graph over the cone block with X-range [center - e/2,
    center + e/2]; after the first pullback the strong contraction collapses
    it to its anchor point, so later steps track interval membership of a
    single X value.  Step factors are measured widths of the raw affine
    images, i.e. the central multiplier magnitudes.
    """
    rng = _disc_rng(seed, index)
    lo_i, hi_i = cert.interval_I
    extent = cert.overlap_min / 2.0 if x_extent is None else x_extent
    if x_center is None:
        pad = extent / 2.0
        if lo_i + pad < hi_i - pad:
            x_center = float(rng.uniform(lo_i + pad, hi_i - pad))
        else:  # disc wider than the interval; center it and let the chain judge
            x_center = 0.5 * (lo_i + hi_i)
    amp = extent / 2.0
    phase = float(rng.uniform(0.0, 2.0 * math.pi))
    anchor = x_center + amp * math.sin(phase)

    eff_a, eff_b = cert.effective_maps()
    images = {w.n: w.interval for w in cert.witness}
    raw_a = np.asarray(cert.A_values)

    steps: list[int] = []
    factors: list[float] = []
    x_lo, x_hi = x_center - amp, x_center + amp
    x_point = anchor
    for step in range(1, depth + 1):
        best_n, best_margin = None, -math.inf
        for n, (ilo, ihi) in images.items():
            margin = min(x_lo - ilo, ihi - x_hi)
            if margin > best_margin:
                best_n, best_margin = n, margin
        if best_n is None or best_margin < 0.0:
            return DiscRecord(
                index=index, x_center=x_center, x_extent=extent, ok=False,
                fail_step=step, steps=tuple(steps), step_factors=tuple(factors),
                note=(
                    f"X-range [{x_lo!r}, {x_hi!r}] exceeds every witness image; "
                    f"best containment margin {best_margin!r} < 0 "
                    f"(extent above the overlap guarantee)"
                ),
            )
        a, b = float(eff_a[best_n]), float(eff_b[best_n])
        x_point = (x_point - b) / a
        # strong transverse contraction collapses the pulled-back disc
        x_lo = x_hi = x_point
        steps.append(best_n)
        factors.append(abs(float(raw_a[best_n])))
    return DiscRecord(
        index=index, x_center=x_center, x_extent=extent, ok=True,
        fail_step=None, steps=tuple(steps), step_factors=tuple(factors),
    )


def simulate_covering(
    spec: CycleSpec,
    cert: BlenderCertificate,
    n_discs: int,
    seed: int,
    depth: int,
    workers: int = 1,
    raise_on_failure: bool = False,
) -> CoveringSimReport:
    """Sample discs crossing the activating cube and run the pullback chain.

    Results are deterministic in (seed, disc index) and independent of the
    worker count; records are merged in disc order.
    """
    del spec  # geometry comes from the certificate

    def run(i: int) -> DiscRecord:
        return _simulate_disc(cert, i, seed, depth)

    if workers <= 1:
        records = [run(i) for i in range(n_discs)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run, range(n_discs)))
    records.sort(key=lambda r: r.index)
    survivors = sum(1 for r in records if r.ok)
    all_factors = [f for r in records for f in r.step_factors]
    report = CoveringSimReport(
        n_discs=n_discs,
        depth=depth,
        survivors=survivors,
        per_disc=tuple(records),
        step_factor_min=min(all_factors) if all_factors else math.nan,
        step_factor_max=max(all_factors) if all_factors else math.nan,
    )
    if raise_on_failure and not report.all_ok:
        first = next(r for r in records if not r.ok)
        raise SimulationFailure(
            f"disc {first.index} uncovered at depth {first.fail_step}",
            disc_index=first.index,
            depth=first.fail_step,
        )
    return report


# ---------------------------------------------------------------------------
# Activation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ActivationReport:
    a_kind: str
    b_kind: str
    a_activates_b: bool
    b_activates_a: bool
    a_to_b_survivors: int
    b_to_a_survivors: int
    n_discs: int
    diagnostic: str = ""

    @property
    def mutual(self) -> bool:
        return self.a_activates_b and self.b_activates_a

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "a_kind": self.a_kind,
            "b_kind": self.b_kind,
            "a_activates_b": self.a_activates_b,
            "b_activates_a": self.b_activates_a,
            "mutual": self.mutual,
            "a_to_b_survivors": self.a_to_b_survivors,
            "b_to_a_survivors": self.b_to_a_survivors,
            "n_discs": self.n_discs,
            "diagnostic": self.diagnostic,
        }


def _attractor_points(
    cert: BlenderCertificate, count: int, rng: np.random.Generator
) -> list[float]:
    """Chaos-game samples of the invariant set of the contracting system."""
    eff_a, eff_b = cert.effective_maps()
    n = len(eff_a)
    x = cert.x_center
    for _ in range(60):  # warm-up into the attractor
        i = int(rng.integers(n))
        x = float(eff_a[i]) * x + float(eff_b[i])
    points = []
    for _ in range(count):
        i = int(rng.integers(n))
        x = float(eff_a[i]) * x + float(eff_b[i])
        points.append(x)
    return points


def check_activation(
    cert_a: BlenderCertificate,
    cert_b: BlenderCertificate,
    spec: CycleSpec,
    n_discs: int = 40,
    seed: int = 0,
    depth: int = 12,
) -> ActivationReport:
    """Test mutual activation by feeding manifold discs of each certificate's
    invariant set through the other certificate's covering chain.

    The local manifolds of points of one blender cross the cube as graphs of
    the type the other blender's cone selects, anchored at the point's X
    value.  Activation is an existence statement (one crossing disc of the
    source meeting the destination's activating pair suffices), so a
    direction counts as activated when at least one sampled disc survives;
    the survivor counts expose how much of the source set does.
    """
    if cert_a.blender_kind == cert_b.blender_kind:
        raise KindMismatch("activation check needs one cs and one cu certificate")
    del spec

    def direction(src: BlenderCertificate, dst: BlenderCertificate,
                  salt: int) -> tuple[int, str]:
        rng = _disc_rng(seed, salt)
        points = _attractor_points(src, n_discs, rng)
        extent = dst.overlap_min / 2.0
        ok = 0
        diag = ""
        for i, x in enumerate(points):
            rec = _simulate_disc(dst, i, seed + salt, depth,
                                 x_center=x, x_extent=extent)
            if rec.ok:
                ok += 1
            elif not diag:
                diag = (
                    f"disc at X={x!r} from the {src.blender_kind} set misses the "
                    f"{dst.blender_kind} covering: {rec.note}"
                )
        return ok, diag

    a_ok, diag_ab = direction(cert_a, cert_b, salt=1)
    b_ok, diag_ba = direction(cert_b, cert_a, salt=2)
    diagnostic = "; ".join(d for d in (diag_ab, diag_ba) if d)
    return ActivationReport(
        a_kind=cert_a.blender_kind,
        b_kind=cert_b.blender_kind,
        a_activates_b=a_ok >= 1,
        b_activates_a=b_ok >= 1,
        a_to_b_survivors=a_ok,
        b_to_a_survivors=b_ok,
        n_discs=n_discs,
        diagnostic=diagnostic,
    )
