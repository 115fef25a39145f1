"""Splitting-parameter windows in which the iterated invariant manifolds
cross the activating cube, and parameter sequences realizing robust
heterodimensional dynamics.

Window centers and radii follow the residue formulas of the unfolding
analysis.  Two conventions are exposed as flags because the source displays
disagree between themselves:

* ``angle_convention``: "k_omega" evaluates the trigonometric factors at
  k*omega + eta (the convention every other coefficient formula uses);
  "two_pi_r" evaluates them at 2*pi*r + eta with r = k mod q, the literal
  residue form.
* ``orientation``: "literal" places the s-window center at
  -lambda^k*b^-1*B*sin(.); "matched" flips its sign, which is the unique
  orientation under which the u- and s-windows share a mu-axis direction,
  the gap identity below is exact, and the windows can intersect at the
  pairs produced by the residue search.  The mu-sequence search always uses
  "matched".
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from .arithmetic import SearchWindow, check_A1
from .blender_certifier import BlenderCertificate, _simulate_disc
from .cycle_model import CaseTag, CycleSpec, CycleType, Moduli, TWO_PI
from .errors import DomainError, NotApplicable, OutsideWindows, WindowExhausted
from .return_map import coeffs

log = logging.getLogger(__name__)

EXP_FLOOR = -640.0  # keep gamma^-m and lambda^k comfortably above underflow


@dataclass(frozen=True)
class MuWindow:
    kind: str          # "u_manifold" | "s_manifold"
    index: int         # m for u-kind, k for s-kind
    center: float
    radius: float
    degenerate: bool = False

    @property
    def lo(self) -> float:
        return self.center - self.radius

    @property
    def hi(self) -> float:
        return self.center + self.radius

    def contains(self, mu: float) -> bool:
        return self.lo <= mu <= self.hi

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "index": self.index,
            "center": self.center,
            "radius": self.radius,
            "degenerate": self.degenerate,
        }


def window_u(spec: CycleSpec, m: int, q: int) -> MuWindow:
    """Window of mu values re-creating the fragile connection after m turns."""
    if m < 1:
        raise DomainError("m must be >= 1")
    if not spec.is_saddle_focus:
        raise NotApplicable("mu windows are computed for saddle_focus cycles")
    log_g = -m * math.log(abs(spec.gamma))
    if log_g < EXP_FLOOR:
        raise DomainError("gamma^-m underflows; reduce m")
    mag = math.exp(log_g)
    sign = -1.0 if (spec.gamma < 0 and m % 2 == 1) else 1.0
    center = sign * mag * spec.u_scalar
    radius = mag / abs(spec.b_coef) * q * spec.delta / 2.0
    return MuWindow("u_manifold", m, center, radius)


def window_s(
    spec: CycleSpec,
    k: int,
    q: int,
    angle_convention: str = "k_omega",
    orientation: str = "literal",
) -> MuWindow:
    """Window of mu values for which the pulled-back strong-stable disc
    crosses the activating cube.  Degenerate residues (vanishing radius
    factor) are flagged."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if not spec.is_saddle_focus:
        raise NotApplicable("mu windows are computed for saddle_focus cycles")
    if angle_convention == "k_omega":
        angle = k * spec.omega1
    elif angle_convention == "two_pi_r":
        angle = TWO_PI * (k % q)
    else:
        raise DomainError("angle_convention must be 'k_omega' or 'two_pi_r'")
    log_l = k * math.log(spec.lam)
    if log_l < EXP_FLOOR:
        raise DomainError("lambda^k underflows; reduce k")
    lam_k = math.exp(log_l)
    s2 = math.sin(angle + spec.eta2)
    s1 = math.sin(angle + spec.eta1)
    center = lam_k / spec.b_coef * spec.B_coef * s2
    if orientation == "literal":
        center = -center
    elif orientation != "matched":
        raise DomainError("orientation must be 'literal' or 'matched'")
    radius = abs(lam_k * spec.A_coef * s1) * q * spec.delta / 2.0
    return MuWindow("s_manifold", k, center, radius, degenerate=(abs(s1) < 1e-12))


def normalized_gap(spec: CycleSpec, wu: MuWindow, ws: MuWindow, q: int) -> float:
    """|c_u - c_s| normalized by the u-window scale |gamma^-m b^-1| q delta / 2."""
    scale = wu.radius  # == |gamma^-m b^-1| q delta / 2
    return abs(wu.center - ws.center) / scale if scale > 0 else math.inf


def gap_crosscheck(spec: CycleSpec, k: int, m: int, q: int) -> float:
    """The same gap evaluated through the coefficient identity,
    2|lambda^k gamma^m b^-1 B sin(k omega + eta2) - u^-| / (|b^-1| q delta)."""
    log_pow = k * math.log(spec.lam) + m * math.log(abs(spec.gamma))
    sign = -1.0 if (spec.gamma < 0 and m % 2 == 1) else 1.0
    power = sign * math.exp(log_pow)
    num = abs(power / spec.b_coef * spec.B_coef * math.sin(k * spec.omega1 + spec.eta2)
              - spec.u_scalar)
    return 2.0 * num / (q * spec.delta / abs(spec.b_coef))


@dataclass(frozen=True)
class MuPoint:
    k: int
    m: int
    mu: float
    window_u: MuWindow
    window_s: MuWindow
    gap: float
    gap_check: float

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "m": self.m,
            "mu": self.mu,
            "window_u": self.window_u.to_json_dict(),
            "window_s": self.window_s.to_json_dict(),
            "gap": self.gap,
            "gap_check": self.gap_check,
        }


def find_mu_sequence(
    spec: CycleSpec,
    moduli: Moduli,
    window_count: int,
    window: SearchWindow | None = None,
    angle_convention: str = "k_omega",
) -> list[MuPoint]:
    """Locate pairs whose u- and s-windows intersect and report the
    intersection midpoints, with strictly decreasing normalized gap.

    Returns every record-gap pair in the safe index range (at least
    window_count of them, else WindowExhausted), so the decay of the gap
    toward zero is visible across the whole sequence.  Requires theta
    declared irrational and omega/2pi = p/q rational; uses the residue from
    the sign/band condition scan.  Degenerate residues are skipped with a
    notice.
    """
    if not spec.is_saddle_focus:
        raise NotApplicable("mu-sequence search handles saddle_focus cycles")
    if moduli.is_rational("theta"):
        raise NotApplicable("mu-sequence search needs irrational theta (declared)")
    if not moduli.is_rational("omega1"):
        raise NotApplicable("mu-sequence search needs rational omega/2pi")
    if window_count == 0:
        return []
    pq = moduli.rational("omega1")
    q, p = pq.denominator, pq.numerator
    wits = check_A1(spec, q, p)
    if not wits:
        raise WindowExhausted("no admissible residue", found=0)
    wit = wits[0]
    r = wit.r
    if abs(math.sin(r * spec.omega1 + spec.eta1)) == 0.0:
        log.info("residue %d degenerate (vanishing radius); skipping", r)

    theta = moduli.theta
    log_g = math.log(abs(spec.gamma))
    bu = spec.b_coef * spec.u_scalar
    t_star = math.log(bu / (spec.B_coef * math.sin(r * spec.omega1 + spec.eta2))) / log_g
    step = 2 if spec.gamma < 0 else 1

    m_cap = int((-EXP_FLOOR - 10.0) / log_g)
    k_cap = int((-EXP_FLOOR - 10.0) / (-math.log(spec.lam)))
    window = window or SearchWindow()
    k_max = min(window.k_max, k_cap, max(1, int((m_cap - t_star) / theta)))

    points: list[MuPoint] = []
    best_gap = math.inf
    kp = 0
    while True:
        kp += 1
        k = r + q * kp
        if k > k_max:
            break
        if k < window.k_min:
            continue
        ideal = t_star + theta * k
        m = step * round(ideal / step)
        if m < max(window.m_min, 1) or m > min(window.m_max, m_cap):
            continue
        ws = window_s(spec, k, q, angle_convention, orientation="matched")
        if ws.degenerate:
            log.info("skipping degenerate s-window at k=%d", k)
            continue
        wu = window_u(spec, m, q)
        if wu.lo > ws.hi or ws.lo > wu.hi:
            continue
        gap = normalized_gap(spec, wu, ws, q)
        if gap >= best_gap:
            continue
        lo = max(wu.lo, ws.lo)
        hi = min(wu.hi, ws.hi)
        mu = 0.5 * (lo + hi)
        points.append(MuPoint(
            k=k, m=int(m), mu=mu, window_u=wu, window_s=ws,
            gap=gap, gap_check=gap_crosscheck(spec, k, int(m), q),
        ))
        best_gap = gap
    if len(points) < window_count:
        raise WindowExhausted(
            f"found {len(points)} intersecting windows of {window_count} requested",
            best_distance=best_gap,
            found=len(points),
        )
    return points


# ---------------------------------------------------------------------------
# Relation reports
# ---------------------------------------------------------------------------

NODES = ("L1", "L2", "cs", "cu", "aux_set")


@dataclass(frozen=True)
class RelationEdge:
    src: str
    dst: str
    kind: str               # "homoclinic" | "activates"
    verified: bool | None    # None: asserted by the case, not simulated
    note: str = ""

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "src": self.src, "dst": self.dst, "kind": self.kind,
            "verified": self.verified, "note": self.note,
        }


@dataclass(frozen=True)
class RelationReport:
    mu: float
    case: CaseTag
    edges: tuple[RelationEdge, ...]
    window_u_hit: MuWindow | None = None
    window_s_hit: MuWindow | None = None

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "mu": self.mu,
            "case": self.case.value,
            "nodes": list(NODES),
            "edges": [e.to_json_dict() for e in self.edges],
            "window_u_hit": None if self.window_u_hit is None else self.window_u_hit.to_json_dict(),
            "window_s_hit": None if self.window_s_hit is None else self.window_s_hit.to_json_dict(),
        }


def _find_window_hits(
    spec: CycleSpec, mu: float, q: int, angle_convention: str
) -> tuple[MuWindow | None, MuWindow | None]:
    """Windows containing mu, located by inverting the center magnitudes."""
    hit_u = hit_s = None
    log_g = math.log(abs(spec.gamma))
    if mu != 0.0 and (spec.gamma < 0 or mu * spec.u_scalar > 0):
        m_est = math.log(abs(spec.u_scalar / mu)) / log_g
        for m in range(max(1, math.floor(m_est) - 3), math.ceil(m_est) + 4):
            try:
                w = window_u(spec, m, q)
            except DomainError:
                continue
            if w.contains(mu):
                hit_u = w
                break
    if mu != 0.0:
        lam_l = math.log(spec.lam)
        for r in range(q):
            s2 = math.sin(r * spec.omega1 + spec.eta2) if angle_convention == "k_omega" \
                else math.sin(TWO_PI * r + spec.eta2)
            c1 = spec.B_coef * s2 / spec.b_coef
            if c1 == 0.0 or mu * c1 <= 0.0:
                continue
            k_est = math.log(mu / c1) / lam_l
            k_base = round((k_est - r) / q)
            for dk in (-2, -1, 0, 1, 2):
                k = r + q * (k_base + dk)
                if k < 1:
                    continue
                try:
                    w = window_s(spec, k, q, angle_convention, orientation="matched")
                except DomainError:
                    continue
                if not w.degenerate and w.contains(mu):
                    hit_s = w
                    break
            if hit_s is not None:
                break
    return hit_u, hit_s


def _simulate_crossing(
    cert: BlenderCertificate, x_offset: float, seed: int, depth: int
) -> tuple[bool, str]:
    rec = _simulate_disc(
        cert, 0, seed, depth,
        x_center=cert.x_center + x_offset,
        x_extent=cert.overlap_min / 2.0,
    )
    return rec.ok, rec.note


def homoclinic_report(
    spec: CycleSpec,
    mu: float,
    certs: Sequence[BlenderCertificate],
    moduli: Moduli,
    case: CaseTag,
    seed: int = 0,
    depth: int = 10,
    angle_convention: str = "k_omega",
) -> RelationReport:
    """Relations among {L1, L2, blenders, auxiliary hyperbolic sets} realized
    at the splitting value mu, per the active case.

    At mu = 0 the report lists the relations the case provides without
    unfolding.  At mu != 0 the value must lie inside at least one manifold
    window; crossings into a certificate's activating pair are verified by
    running its covering chain on the positioned manifold disc.
    """
    cs = next((c for c in certs if c.blender_kind == "cs"), None)
    cu = next((c for c in certs if c.blender_kind == "cu"), None)
    edges: list[RelationEdge] = []

    if mu == 0.0:
        if case in (CaseTag.SF_2, CaseTag.SF_3) or case.value.startswith("DF-2") \
                or case.value.startswith("DF-3"):
            if cu is not None:
                edges.append(RelationEdge("cu", "L2", "homoclinic", None,
                                          "irrational rotation supplies the crossing"))
        if case in (CaseTag.SF_3, CaseTag.DF_2_1, CaseTag.DF_3_1, CaseTag.DF_3_2):
            if cs is not None and cu is not None:
                ok_ab, _ = _simulate_crossing(cs, cu.x_center - cs.x_center, seed, depth)
                ok_ba, _ = _simulate_crossing(cu, cs.x_center - cu.x_center, seed + 1, depth)
                edges.append(RelationEdge("cu", "cs", "activates", ok_ba))
                edges.append(RelationEdge("cs", "cu", "activates", ok_ab))
                edges.append(RelationEdge("L2", "cs", "activates", None,
                                          "via the cu set related to L2"))
        if case in (CaseTag.DF_3_1, CaseTag.DF_3_2):
            if cs is not None:
                edges.append(RelationEdge("cs", "L1", "homoclinic", None))
        if case in (CaseTag.DF_3_3_1, CaseTag.DF_3_3_2) and cu is not None:
            edges.append(RelationEdge("L1", "cu", "activates", None))
        if not edges:
            raise OutsideWindows(
                "mu = 0 provides no relations for this case (rational rotation)"
            )
        return RelationReport(mu=0.0, case=case, edges=tuple(edges))

    if not spec.is_saddle_focus:
        raise NotApplicable("unfolded relation reports cover saddle_focus cycles")
    pq = moduli.rational("omega1")
    q = pq.denominator
    hit_u, hit_s = _find_window_hits(spec, mu, q, angle_convention)
    if hit_u is None and hit_s is None:
        raise OutsideWindows(f"mu={mu!r} lies in no u- or s-window")

    if hit_u is not None:
        edges.append(RelationEdge("L1", "aux_set", "homoclinic", True,
                                  f"u-window at m={hit_u.index}"))
        if cu is not None:
            x_off = (mu - hit_u.center) / hit_u.radius * (q * spec.delta / 2.0)
            ok, note = _simulate_crossing(cu, x_off, seed, depth)
            edges.append(RelationEdge("L1", "cu", "activates", ok, note))
            edges.append(RelationEdge("cu", "L2", "homoclinic", None,
                                      "stable-set intersection automatic in the cube"))
    if hit_s is not None:
        edges.append(RelationEdge("L2", "aux_set", "homoclinic", True,
                                  f"s-window at k={hit_s.index}"))
        if cs is not None:
            x_off = (mu - hit_s.center) / hit_s.radius * (q * spec.delta / 2.0)
            ok, note = _simulate_crossing(cs, x_off, seed + 1, depth)
            edges.append(RelationEdge("L2", "cs", "activates", ok, note))
            edges.append(RelationEdge("cs", "L1", "homoclinic", None,
                                      "unstable-set intersection automatic in the cube"))
    return RelationReport(
        mu=mu, case=case, edges=tuple(edges),
        window_u_hit=hit_u, window_s_hit=hit_s,
    )
