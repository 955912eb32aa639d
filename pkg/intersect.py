"""
Intersection numbers of closed geodesics from crossings of axis lifts.

In the frame of the first class A its axis is the imaginary axis and A acts
as z -> exp(l(A)) z. A lift of B crossing the imaginary axis is keyed by the
log-height of the crossing, reduced modulo l(A), and by its spread, half the
log-ratio of its endpoint moduli (0 for a perpendicular crossing). Equal keys
are one <A>-orbit of lifts, that is one double coset <A> h <B>, so the number
of distinct keys is the number of crossings on a fundamental segment.

Both fundamental segments are cut into pieces of length <= 1, each anchored
at a nearby orbit point of the basepoints. A lift crossing piece k of A at a
point of piece j of B is then u_k g v_j^-1 . axis(B) with g in a small ball.
Every piece keeps the local matrix that moves its anchor next to i, so the
products that give the lifts stay well conditioned for long curves.
"""
import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

import moebius
from config import SearchSettings
from errors import IndeterminateError, OracleRefusal
from geodesics import axis_offsets

logger = logging.getLogger(__name__)

AXIS_METHOD = 'axis-linking'
ORACLE_METHOD = 'oracle'
PIECE_WIDTH = 1.0
FIRST_MARGIN = 0.5
STABILIZATION_STEP = 2.0
MAX_ROUNDS = 3
CROSSING = 0


@dataclass(frozen=True)
class IntersectionResult:
    count: int
    method: str
    search_radius_used: float
    stabilized: bool
    rounds: tuple = ()
    crossings: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class SegmentPiece:
    height: float
    local: np.ndarray = field(compare=False)
    distance: float
    width: float


def lift_endpoints(mats):
    """Endpoints (images of 0 and infinity) of the images of the imaginary axis under a stack."""
    with np.errstate(divide='ignore', invalid='ignore'):
        return mats[:, 0, 1] / mats[:, 1, 1], mats[:, 0, 0] / mats[:, 1, 0]


def geodesic_keys(y1, y2):
    """
    (pattern, height, spread) of the geodesics with endpoints y1, y2.
    pattern is CROSSING for endpoints on both sides of 0, else the common
    sign; height and spread are the mean and half difference of log|y| over
    the lower and upper endpoint. Zero or infinite endpoints give nan.
    """
    y1, y2 = np.asarray(y1, dtype=float), np.asarray(y2, dtype=float)
    lo, hi = np.minimum(y1, y2), np.maximum(y1, y2)
    pattern = np.where((lo < 0) & (hi > 0), CROSSING, np.where(hi < 0, -1, 1))
    with np.errstate(divide='ignore', invalid='ignore'):
        la, lb = np.log(np.abs(lo)), np.log(np.abs(hi))
        height, spread = (la + lb) / 2.0, (lb - la) / 2.0
    bad = ~(np.isfinite(height) & np.isfinite(spread))
    height[bad] = np.nan
    spread[bad] = np.nan
    return pattern, height, spread


def coincidence_spread(tolerance):
    """Crossing lifts whose angle has sine below `tolerance` are taken to coincide with the axis."""
    return math.acosh(1.0 / tolerance)


def coinciding(y1, y2, spreads, limit):
    """Mask of the geodesics that run along the imaginary axis."""
    at_axis = ((y1 == 0) | ~np.isfinite(y1)) & ((y2 == 0) | ~np.isfinite(y2))
    with np.errstate(invalid='ignore'):
        return at_axis | (np.abs(spreads) > limit)


class LiftOrbits:
    """
    Geodesics of a frame modulo z -> exp(period) z, keyed by geodesic_keys.
    Keys within `tolerance` in height (modulo the period) and spread belong
    to one orbit.
    """

    def __init__(self, period, tolerance):
        self.period = period
        self.tolerance = tolerance
        self._orbits = {}

    def reduce(self, height):
        return (height + self.period / 2.0) % self.period - self.period / 2.0

    def _add(self, pattern, height, spread):
        heights, spreads = self._orbits.setdefault(pattern, ([], []))
        for h, s in zip(heights, spreads):
            gap = abs(h - height) % self.period
            if min(gap, self.period - gap) < self.tolerance and abs(s - spread) < self.tolerance:
                return False
        heights.append(height)
        spreads.append(spread)
        return True

    def add_many(self, patterns, heights, spreads):
        """Add keys; returns a mask of the entries that opened a new orbit."""
        heights = self.reduce(np.asarray(heights, dtype=float))
        spreads = np.asarray(spreads, dtype=float)
        new = np.zeros(len(heights), dtype=bool)
        if not len(heights):
            return new
        grid = self.tolerance / 4.0
        cells = np.stack([patterns, np.round(heights / grid), np.round(spreads / grid)], axis=1)
        _, first = np.unique(cells, axis=0, return_index=True)
        for k in np.sort(first):
            new[k] = self._add(int(patterns[k]), float(heights[k]), float(spreads[k]))
        return new

    def heights(self, pattern=CROSSING):
        return sorted(self._orbits.get(pattern, ([], []))[0])

    def count(self, pattern=CROSSING):
        return len(self._orbits.get(pattern, ([], []))[0])

    def __len__(self):
        return sum(len(h) for h, _ in self._orbits.values())


def nearest_basepoint(group, axis):
    best, offset = group.basepoints[0], math.inf
    for p in group.basepoints:
        d = float(axis_offsets(np.array([axis.repelling]), np.array([axis.attracting]), [p])[0])
        if d < offset:
            best, offset = p, d
    return best, offset


def class_frame(group, cls):
    """Normalizer of cls's axis sending the foot of the nearest basepoint to i."""
    axis = cls.axis
    p, _ = nearest_basepoint(group, axis)
    return moebius.normalizer(axis, moebius.foot_point(axis, p))


def _sl2_inverse(m):
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])


def segment_pieces(group, frame, length, settings):
    """
    Cut the segment [-length/2, length/2) of the frame's imaginary axis into
    pieces and anchor each at the closest orbit point found by walking from
    the previous anchor through a small ball. A piece at height t keeps
    T(-t) frame anchor, which sends its basepoint to within `distance` of i.
    """
    count = max(1, math.ceil(length / PIECE_WIDTH))
    width = length / count
    walk = group.ball(2.0 * settings.covering_radius + PIECE_WIDTH, settings.max_word_length,
                      settings.element_budget)
    step = moebius.translation(-width).to_array()
    local = moebius.compose(moebius.translation((length - width) / 2.0), frame).to_array()
    pieces = []
    for k in range(count):
        height = -length / 2.0 + (k + 0.5) * width
        if k:
            local = step @ local
        mats = np.einsum('ij,njk->nik', local, walk.mats)
        best_distance, best_index = math.inf, 0
        for p in group.basepoints:
            images = moebius.stack_apply(mats, p)
            distances = moebius.stack_distance(images, np.full(images.shape, 1j))
            index = int(np.argmin(distances))
            if distances[index] < best_distance:
                best_distance, best_index = float(distances[index]), index
        local = mats[best_index] / math.sqrt(np.linalg.det(mats[best_index]))
        pieces.append(SegmentPiece(height=height, local=local, distance=best_distance, width=width))
    return pieces


def lift_chunks(group, pieces_a, pieces_b, margin, settings, extra=0.0):
    """
    Local lift matrices T(-t_k) N u_k g v_j^-1 N_B^-1 T(s_j), one chunk per
    piece pair with g in the ball of radius rho_k + rho_j + (widths)/2 +
    extra + margin. Each chunk maps the imaginary axis to lifts of B seen
    from piece k of A. Returns ([(t_k, mats)], largest radius, ball truncation).
    """
    radii = [[a.distance + b.distance + (a.width + b.width) / 2.0 + extra + margin for b in pieces_b]
             for a in pieces_a]
    top = math.ceil(2.0 * max(max(row) for row in radii)) / 2.0
    ball = group.ball(top, settings.max_word_length, settings.element_budget)
    chunks = []
    for a, row in zip(pieces_a, radii):
        for b, radius in zip(pieces_b, row):
            inner = ball.mats[:ball.within(radius)]
            chunks.append((a.height, np.einsum('ij,njk,kl->nil', a.local, inner, _sl2_inverse(b.local))))
    return chunks, top, ball.truncated_by


class _SharedAxis(Exception):
    pass


def _collect(chunks, orbits, limit, exclude_own):
    """Add the crossing lifts of every chunk to `orbits`; coinciding axes are skipped or raise _SharedAxis."""
    for height, mats in chunks:
        y1, y2 = lift_endpoints(mats)
        pattern, heights, spreads = geodesic_keys(y1, y2)
        coincide = coinciding(y1, y2, spreads, limit)
        if coincide.any() and not exclude_own:
            raise _SharedAxis()
        keep = np.nonzero((pattern == CROSSING) & np.isfinite(heights) & ~coincide)[0]
        orbits.add_many(pattern[keep], heights[keep] + height, spreads[keep])
    return orbits


def _same_class(cls_a, cls_b):
    return cls_a.word == cls_b.word and abs(cls_a.length - cls_b.length) < 1e-9


def _same_length(cls_a, cls_b):
    return abs(cls_a.length - cls_b.length) <= 1e-9 * max(1.0, cls_a.length)


def _finish(cls_a, cls_b, crossings, self_pair):
    if self_pair:
        k = cls_a.power
        if crossings % 2:
            logger.warning(f"odd number of self-crossing lifts ({crossings}) for {cls_a.word}")
        return k * (crossings // 2) + (k - 1)
    return crossings * cls_b.power


def _world_crossings(N, orbits):
    inverse = N.inverse()
    return tuple(inverse.apply(complex(0.0, math.exp(h))) for h in orbits.heights())


def _piecewise_round(group, cls_a, cls_b, margin, settings, self_pair):
    N = class_frame(group, cls_a)
    pieces_a = segment_pieces(group, N, cls_a.length, settings)
    pieces_b = pieces_a if self_pair else segment_pieces(group, class_frame(group, cls_b), cls_b.length, settings)
    chunks, radius, truncated = lift_chunks(group, pieces_a, pieces_b, margin, settings)
    orbits = LiftOrbits(cls_a.length, settings.tolerance)
    _collect(chunks, orbits, coincidence_spread(settings.tolerance), self_pair)
    return N, orbits, radius, truncated


def _shared_axis_error(cls_a, cls_b):
    return IndeterminateError(f"{cls_a.word} and {cls_b.word} are distinct classes on one axis",
                              first=cls_a.word, second=cls_b.word)


def intersection_number(group, cls_a, cls_b, settings=None):
    """
    Count <A>-orbits of lifts of cls_b crossing the axis of cls_a, widening
    the search margin by 2 until two consecutive rounds agree. Two words of
    one closed geodesic are recognized by their common axis and counted as
    a self-pair.
    """
    settings = settings or SearchSettings()
    self_pair = _same_class(cls_a, cls_b)
    counts, margin = [], FIRST_MARGIN
    N, orbits, radius, truncated = None, None, 0.0, None
    for _ in range(MAX_ROUNDS):
        try:
            N, orbits, radius, truncated = _piecewise_round(group, cls_a, cls_b, margin, settings, self_pair)
        except _SharedAxis:
            if not (_same_length(cls_a, cls_b) and cls_a.power == cls_b.power):
                raise _shared_axis_error(cls_a, cls_b) from None
            logger.info(f"{cls_a.word} and {cls_b.word} share their axis; counting self-crossings")
            self_pair = True
            continue
        counts.append(_finish(cls_a, cls_b, orbits.count(), self_pair))
        logger.debug(f"{cls_a.word} x {cls_b.word}: {counts[-1]} at radius {radius}")
        if len(counts) >= 2 and counts[-1] == counts[-2]:
            break
        margin += STABILIZATION_STEP
    if not counts:
        raise _shared_axis_error(cls_a, cls_b)
    stabilized = len(counts) >= 2 and counts[-1] == counts[-2] and truncated != 'budget'
    if not stabilized:
        logger.warning(f"intersection of {cls_a.word} and {cls_b.word} not stabilized: rounds {counts}")
    return IntersectionResult(count=counts[-1], method=AXIS_METHOD, search_radius_used=radius,
                              stabilized=stabilized, rounds=tuple(counts), crossings=_world_crossings(N, orbits))


def shares_axis(group, cls_a, cls_b, settings=None):
    """True when some lift of cls_b runs along the axis of cls_a, that is both are one closed geodesic."""
    settings = settings or SearchSettings()
    pieces_a = segment_pieces(group, class_frame(group, cls_a), cls_a.length, settings)
    pieces_b = segment_pieces(group, class_frame(group, cls_b), cls_b.length, settings)
    # a coinciding lift runs along every piece of A, so the first one is enough
    chunks, _, _ = lift_chunks(group, pieces_a[:1], pieces_b, FIRST_MARGIN, settings)
    try:
        _collect(chunks, LiftOrbits(cls_a.length, settings.tolerance), coincidence_spread(settings.tolerance), False)
    except _SharedAxis:
        return True
    return False


def self_intersection(group, cls, settings=None):
    """Self-crossings of cls; a k-th power of delta counts k^2 i(delta, delta) + k - 1."""
    return intersection_number(group, cls, cls, settings)


def is_simple(group, cls, settings=None):
    return self_intersection(group, cls, settings).count == 0


def crossing_points(group, cls_a, cls_b, settings=None):
    """Crossing points on the fundamental segment of cls_a, as points of the upper half-plane."""
    return intersection_number(group, cls_a, cls_b, settings).crossings


def intersection_oracle(group, cls_a, cls_b, settings=None):
    """
    Brute-force cross-check: every reduced word up to the oracle word length
    in one global frame, no pruning, lifts reduced modulo <A>. Stabilized
    when word lengths L - 1 and L agree.
    """
    settings = settings or SearchSettings()
    for cls in (cls_a, cls_b):
        if cls.length > settings.oracle_cutoff:
            raise OracleRefusal(f"class {cls.word} of length {cls.length:.6f} exceeds the oracle cutoff "
                                f"{settings.oracle_cutoff}", word=cls.word, cutoff=settings.oracle_cutoff)
    self_pair = _same_class(cls_a, cls_b)
    ball = group.ball(math.inf, settings.oracle_word_length, 10 ** 9)
    lengths = np.array([len(w) for w in ball.words])
    N = class_frame(group, cls_a)
    back = _sl2_inverse(class_frame(group, cls_b).to_array())
    frames = np.einsum('ij,njk,kl->nil', N.to_array(), ball.mats, back)
    limit = coincidence_spread(settings.tolerance)
    counts, orbits = [], None
    for word_length in (settings.oracle_word_length - 1, settings.oracle_word_length):
        chunk = [(0.0, frames[lengths <= word_length])]
        orbits = LiftOrbits(cls_a.length, settings.tolerance)
        try:
            _collect(chunk, orbits, limit, self_pair)
        except _SharedAxis:
            if not (_same_length(cls_a, cls_b) and cls_a.power == cls_b.power):
                raise _shared_axis_error(cls_a, cls_b) from None
            self_pair = True
            orbits = _collect(chunk, LiftOrbits(cls_a.length, settings.tolerance), limit, True)
        counts.append(_finish(cls_a, cls_b, orbits.count(), self_pair))
    stabilized = counts[0] == counts[1]
    if not stabilized:
        logger.warning(f"oracle for {cls_a.word} and {cls_b.word} not stabilized: {counts}")
    return IntersectionResult(count=counts[-1], method=ORACLE_METHOD,
                              search_radius_used=float(settings.oracle_word_length), stabilized=stabilized,
                              rounds=tuple(counts), crossings=_world_crossings(N, orbits))


def intersection_matrix(group, classes, settings=None):
    """
    Symmetric matrix of pairwise counts with self-intersections on the
    diagonal, and a stabilized flag. Indeterminate pairs get -1 and clear
    the flag.
    """
    settings = settings or SearchSettings()
    n = len(classes)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]

    def job(pair):
        i, j = pair
        try:
            return intersection_number(group, classes[i], classes[j], settings)
        except IndeterminateError as e:
            logger.warning(f"pair {classes[i].word} x {classes[j].word}: {e}")
            return None

    with ThreadPoolExecutor(max_workers=settings.workers) as executor:
        results = list(executor.map(job, pairs))
    matrix = np.zeros((n, n), dtype=int)
    stabilized = True
    for (i, j), result in zip(pairs, results):
        if result is None:
            matrix[i, j] = matrix[j, i] = -1
            stabilized = False
            continue
        matrix[i, j] = matrix[j, i] = result.count
        stabilized &= result.stabilized
    return matrix, stabilized
