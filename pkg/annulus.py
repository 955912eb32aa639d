"""
Collar and cusp local models.

Collar arcs are found in the frame of a gluing curve, where the curve's lift
is the imaginary axis and its collar of half-width w is the sector
|Re z| <= sinh(w) Im z. Every lift of a geodesic that meets the sector gives
one arc; arcs are counted modulo the curve's translation z -> exp(l) z.
"""
import math
import logging
from dataclasses import dataclass, field

import numpy as np

import hyptrig
import moebius
from config import SearchSettings, ExperimentSettings
from errors import DomainError, IndeterminateError
from intersect import (FIRST_MARGIN, LiftOrbits, class_frame, coincidence_spread, coinciding, geodesic_keys,
                       lift_chunks, lift_endpoints, segment_pieces)
from hyptrig import ArcKind

logger = logging.getLogger(__name__)

# Arcs whose closest approach is this close to the band edge cannot be classified
SIDE_TOLERANCE = 1e-9
EXHAUSTIVE_GRID = 2000


@dataclass(frozen=True)
class CollarArc:
    kind: ArcKind
    winding: int
    length: float
    host_curve: str
    depth: float = 0.0
    span: tuple = (0.0, 0.0)
    endpoints: tuple = field(default=(0.0, 0.0), compare=False)
    flagged: bool = False


@dataclass(frozen=True)
class CuspArc:
    winding: int
    length: float
    horocycle_norm: float = 2.0


@dataclass(frozen=True)
class AuditFinding:
    check: str
    first: str
    second: str
    value: float
    bound: float
    detail: str = ''


@dataclass
class CollarAudit:
    cuff: str
    cuff_length: float
    arcs: dict
    pair_rows: list
    findings: list

    @property
    def violations(self):
        return len(self.findings)


def cuff_axis(group, cuff):
    """World axis of the gluing curve's representative and its frame."""
    gluing = group.decomposition.gluing(cuff)
    frame = group.cuff_frames[gluing.first]
    inverse = frame.inverse()
    return moebius.Axis(inverse.apply(0.0), inverse.apply(math.inf), gluing.length), frame


def _ray_points(y1, y2, slope):
    """Points where the geodesic (y1, y2) meets the rays Re z = +-slope Im z."""
    points = []
    for k in (-slope, slope):
        cos_theta = k / math.sqrt(1.0 + k * k)
        direction = complex(cos_theta, 1.0 / math.sqrt(1.0 + k * k))
        if math.isinf(y1) or math.isinf(y2):
            x0 = y2 if math.isinf(y1) else y1
            if x0 * k > 0:
                points.append(direction * (x0 / cos_theta))
            continue
        c = (y1 + y2) / 2.0
        disc = (c * cos_theta) ** 2 - y1 * y2
        if disc < 0:
            continue
        root = math.sqrt(disc)
        for s in (c * cos_theta - root, c * cos_theta + root):
            if s > 0:
                points.append(direction * s)
    return points


def band_arc(y1, y2, width, curve_length, host):
    """The arc of the geodesic with frame endpoints (y1, y2) inside the band of half-width `width`, or None."""
    slope = math.sinh(width)
    u1, u2 = moebius.boundary_to_circle(y1), moebius.boundary_to_circle(y2)
    near = [min(abs(u), 1.0 - abs(u)) < SIDE_TOLERANCE for u in (u1, u2)]
    if all(near):
        return CollarArc(ArcKind.CORE, 0, curve_length, host, depth=0.0, endpoints=(y1, y2))
    if any(near):
        return CollarArc(ArcKind.TYPE2, 0, 0.0, host, endpoints=(y1, y2), flagged=True)
    if y1 * y2 < 0:
        kind, depth = ArcKind.TYPE1, 0.0
    else:
        depth = math.acosh(abs(y1 + y2) / abs(y2 - y1))
        if depth > width + SIDE_TOLERANCE:
            return None
        kind = ArcKind.TYPE2
    points = _ray_points(y1, y2, slope)
    if len(points) != 2 or abs(depth - width) <= SIDE_TOLERANCE:
        return CollarArc(kind, 0, 0.0, host, depth=depth, endpoints=(y1, y2), flagged=True)
    p, q = sorted(points, key=lambda z: abs(z))
    span = (math.log(abs(p)), math.log(abs(q)))
    winding = int(math.floor((span[1] - span[0]) / curve_length + 1e-12))
    return CollarArc(kind, winding, moebius.hyperbolic_distance(p, q), host, depth=depth, span=span,
                     endpoints=(y1, y2))


def _frame_lifts(group, cls, frame, curve_length, width, settings):
    """
    Lifts of cls's axis meeting the band of half-width `width`, one per orbit
    of the curve's translation, as frame endpoint pairs. When cls runs along
    the curve itself the single lift (0, inf) is returned.
    """
    pieces_core = segment_pieces(group, frame, curve_length, settings)
    pieces_cls = segment_pieces(group, class_frame(group, cls), cls.length, settings)
    chunks, radius, truncated = lift_chunks(group, pieces_core, pieces_cls, FIRST_MARGIN, settings, extra=width)
    if truncated == 'budget':
        logger.warning(f"collar search for {cls.word} truncated by the element budget at radius {radius}")
    reach = math.cosh(width) + SIDE_TOLERANCE
    limit = coincidence_spread(settings.tolerance)
    orbits = LiftOrbits(curve_length, settings.tolerance)
    lifts = []
    for height, mats in chunks:
        y1, y2 = lift_endpoints(mats)
        with np.errstate(invalid='ignore', divide='ignore', over='ignore'):
            meets = (y1 * y2 < 0) | ~(np.abs(y1 + y2) / np.abs(y2 - y1) > reach)
        y1, y2 = y1[meets], y2[meets]
        pattern, heights, spreads = geodesic_keys(y1, y2)
        if coinciding(y1, y2, spreads, limit).any():
            return [(0.0, math.inf)]
        valid = np.nonzero(np.isfinite(heights))[0]
        new = valid[orbits.add_many(pattern[valid], heights[valid] + height, spreads[valid])]
        scale = math.exp(height)
        lifts.extend((float(a) * scale, float(b) * scale) for a, b in zip(y1[new], y2[new]))
    return lifts


def collar_arcs(group, cls, cuff, width=None, settings=None):
    """Arcs of cls in the band of half-width `width` (default the collar width) around the gluing curve."""
    settings = settings or SearchSettings()
    axis, frame = cuff_axis(group, cuff)
    curve_length = axis.translation_length
    if width is None:
        width = hyptrig.sigma(curve_length / 2.0)
    lifts = _frame_lifts(group, cls, frame, curve_length, width, settings)
    arcs = []
    for y1, y2 in lifts:
        arc = band_arc(y1, y2, width, curve_length, cuff)
        if arc is None:
            continue
        if arc.kind is ArcKind.CORE:
            return [CollarArc(ArcKind.CORE, 0, cls.length, cuff, endpoints=arc.endpoints)]
        if arc.flagged:
            logger.warning(f"arc of {cls.word} in the collar of {cuff} has an indeterminate side; flagged")
        arcs.append(arc)
    arcs.sort(key=lambda a: (a.kind.value, a.span[0] % curve_length, a.winding))
    return arcs


def classify_collar_arcs(group, cls, cuff, settings=None):
    return collar_arcs(group, cls, cuff, settings=settings)


def _crossing(first, second):
    """Crossing point of two geodesics given by frame endpoints, or None."""
    x = moebius.Axis(first[0], first[1], 1.0)
    y = moebius.Axis(second[0], second[1], 1.0)
    try:
        if not moebius.axes_cross(x, y):
            return None
    except IndeterminateError:
        return None
    return moebius.crossing_point(x, y)


def _arc_crossings(first, second, curve_length, width, same_arc=False):
    """Crossing points in the band between arc `first` and the translates of arc `second`."""
    lo = math.floor((first.span[0] - second.span[1]) / curve_length) - 1
    hi = math.ceil((first.span[1] - second.span[0]) / curve_length) + 1
    slope = math.sinh(width)
    points = []
    for j in range(lo, hi + 1):
        if same_arc and j == 0:
            continue
        scale = math.exp(j * curve_length)
        shifted = tuple(y * scale for y in second.endpoints)
        z = _crossing(first.endpoints, shifted)
        if z is not None and abs(z.real) <= slope * z.imag:
            points.append(z)
    return points


def thin_part_pairs(group, cls1, cls2, cuff, settings=None, slack=0.0):
    """Crossings of the two classes inside the thin part of the gluing curve's collar, widened by `slack`."""
    axis, _ = cuff_axis(group, cuff)
    radius = hyptrig.thin_radius(axis.translation_length) + slack
    return _band_crossings(group, cls1, cls2, cuff, radius, settings)[0]


def _band_crossings(group, cls1, cls2, cuff, width, settings):
    """(crossing count, per arc pair counts) of two classes inside a band."""
    axis, _ = cuff_axis(group, cuff)
    curve_length = axis.translation_length
    same = cls1.word == cls2.word
    arcs1 = [a for a in collar_arcs(group, cls1, cuff, width, settings) if not a.flagged]
    arcs2 = arcs1 if same else [a for a in collar_arcs(group, cls2, cuff, width, settings) if not a.flagged]
    cores = [arcs for arcs in (arcs1, arcs2) if arcs and arcs[0].kind is ArcKind.CORE]
    if cores:
        if same or len(cores) == 2:
            return 0, []
        core, other = (arcs1, arcs2) if arcs1 is cores[0] else (arcs2, arcs1)
        # every type-1 arc crosses the core once
        per_pair = [(core[0], a, 1) for a in other if a.kind is ArcKind.TYPE1]
        return len(per_pair), per_pair
    total, per_pair = 0, []
    for i, a in enumerate(arcs1):
        for j, b in enumerate(arcs2):
            if same and j < i:
                continue
            count = len(_arc_crossings(a, b, curve_length, width, same_arc=same and i == j))
            if same and i == j:
                count //= 2
            per_pair.append((a, b, count))
            total += count
    return total, per_pair


def thin_length(group, cls, cuff, settings=None):
    """Length of cls inside the thin part of the gluing curve's collar."""
    axis, _ = cuff_axis(group, cuff)
    width = hyptrig.thin_radius(axis.translation_length)
    arcs = collar_arcs(group, cls, cuff, width, settings)
    return sum(a.length for a in arcs if not a.flagged)


def _length_findings(cls, arcs, cuff_length, thin):
    findings = []
    for arc in arcs:
        if arc.flagged or arc.kind is ArcKind.CORE:
            continue
        if arc.kind is ArcKind.TYPE1:
            bound = hyptrig.type1_length_lower(cuff_length, arc.winding)
            if arc.length < bound - 1e-9:
                findings.append(AuditFinding('type1_length', cls.word, '', arc.length, bound,
                                             f'winding {arc.winding}'))
        elif arc.winding >= 1 and hyptrig.in_small_length_regime(cuff_length) and arc.depth <= thin:
            bound = hyptrig.type2_length_lower(cuff_length, arc.winding)
            if arc.length < bound - 1e-9:
                findings.append(AuditFinding('type2_length', cls.word, '', arc.length, bound,
                                             f'winding {arc.winding}, depth {arc.depth:.6f}'))
    return findings


def collar_audit(group, classes, cuff, simple=None, settings=None, experiment=None):
    """
    Length lower bounds for every arc, the crossing table for every pair of
    arcs, thin-part penetration by simple classes and the thin-part ratio.
    `simple` maps class words to simplicity flags; classes not in it are
    checked by their own `simple` attribute.
    """
    settings = settings or SearchSettings()
    experiment = experiment or ExperimentSettings()
    axis, _ = cuff_axis(group, cuff)
    cuff_length = axis.translation_length
    width = hyptrig.sigma(cuff_length / 2.0)
    thin = hyptrig.thin_radius(cuff_length)
    simple = simple or {}
    arcs = {cls.word: collar_arcs(group, cls, cuff, width, settings) for cls in classes}
    findings = []
    for cls in classes:
        findings.extend(_length_findings(cls, arcs[cls.word], cuff_length, thin))
        is_simple = simple.get(cls.word, cls.simple)
        if is_simple:
            for arc in arcs[cls.word]:
                if arc.kind is ArcKind.TYPE2 and not arc.flagged and arc.depth < thin - SIDE_TOLERANCE:
                    findings.append(AuditFinding('simple_type2_in_thin_part', cls.word, '', arc.depth, thin))

    ratio_bound = hyptrig.thin_ratio_bound(cuff_length) + experiment.audit_slack
    lengths = {cls.word: thin_length(group, cls, cuff, settings) for cls in classes}
    pair_rows = []
    for i, first in enumerate(classes):
        for second in classes[i:]:
            _, per_pair = _band_crossings(group, first, second, cuff, width, settings)
            for a, b, count in per_pair:
                if a is b:
                    continue
                bound = hyptrig.annulus_intersection_bound(a.kind, a.winding, b.kind, b.winding)
                if count > bound:
                    findings.append(AuditFinding('crossing_table', first.word, second.word, count, bound,
                                                 f'{a.kind.value}/{a.winding} x {b.kind.value}/{b.winding}'))
            thin_count = thin_part_pairs(group, first, second, cuff, settings)
            denominator = lengths[first.word] * lengths[second.word]
            ratio = thin_count / denominator if denominator > 0 else 0.0
            if ratio > ratio_bound:
                findings.append(AuditFinding('thin_ratio', first.word, second.word, ratio, ratio_bound))
            pair_rows.append((first.word, second.word, thin_count, lengths[first.word], lengths[second.word], ratio))
    if findings:
        logger.warning(f"collar audit of {cuff}: {len(findings)} findings")
    else:
        logger.info(f"collar audit of {cuff}: {len(classes)} classes, no findings")
    return CollarAudit(cuff=cuff, cuff_length=cuff_length, arcs=arcs, pair_rows=pair_rows, findings=findings)


# -- cusp model -------------------------------------------------------------

def _arc_length(n, horocycle_norm):
    return math.acosh(1.0 + (n * horocycle_norm) ** 2 / 2.0)


def cusp_arc(n, horocycle_norm=2.0):
    """Geodesic between points at height 1/norm that are n cusp translations apart."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"winding must be a positive integer, got {n!r}", value=n)
    if not horocycle_norm > 0:
        raise DomainError(f"horocycle_norm must be positive, got {horocycle_norm}", value=horocycle_norm)
    return CuspArc(winding=int(n), length=_arc_length(n, horocycle_norm), horocycle_norm=horocycle_norm)


def cusp_pair_bounds(n, m):
    for value in (n, m):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
            raise DomainError(f"windings must be positive integers, got {value!r}", value=value)
    s = min(n, m)
    return s, s + 2


def cusp_truncation_max_winding(r):
    if not 0 < r < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}", value=r)
    return int(math.floor(2.0 / r + 1e-9))


@dataclass(frozen=True)
class CuspRow:
    r: float
    max_winding: int
    best_n: int
    best_m: int
    value: float
    predicted: float
    ratio: float
    self_bound: float
    at_max: bool


def cusp_grid_max(max_winding, horocycle_norm=2.0):
    """max over n, m <= max_winding of min(n, m)/(l(n) l(m)) as (value, n, m)."""
    n = np.arange(1, max_winding + 1)
    lengths = np.arccosh(1.0 + (n * horocycle_norm) ** 2 / 2.0)
    if max_winding <= EXHAUSTIVE_GRID:
        grid = np.minimum.outer(n, n) / np.outer(lengths, lengths)
        flat = int(np.argmax(grid))
        i, j = divmod(flat, max_winding)
        return float(grid[i, j]), int(n[i]), int(n[j])
    # off-diagonal entries are dominated by the diagonal entry of the smaller winding
    diagonal = n / lengths ** 2
    k = int(np.argmax(diagonal))
    return float(diagonal[k]), int(n[k]), int(n[k])


def cusp_model_experiment(r_values, horocycle_norm=2.0):
    rows = []
    for r in r_values:
        if not 0 < r <= 0.5:
            raise DomainError(f"r values must lie in (0, 1/2], got {r}", value=r)
        top = cusp_truncation_max_winding(r)
        value, best_n, best_m = cusp_grid_max(top, horocycle_norm)
        predicted = 1.0 / (2.0 * r * math.log(1.0 / r) ** 2)
        rows.append(CuspRow(r=r, max_winding=top, best_n=best_n, best_m=best_m, value=value,
                            predicted=predicted, ratio=value / predicted,
                            self_bound=hyptrig.cusp_winding_self_bound(top) if top >= 2 else math.nan,
                            at_max=(best_n == top and best_m == top)))
        logger.debug(f"cusp model r={r}: max {value:.6f} at ({best_n}, {best_m}), ratio {value / predicted:.4f}")
    return rows
