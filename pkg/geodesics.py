"""
Closed geodesic enumeration.

Candidates are the hyperbolic elements of the surface group's element ball.
Candidates are first grouped by canonical cyclic word, then merged by
geometry: every class stores the lifts of its axis that pass near the
basepoints, and a candidate whose axis is already stored belongs to that
class. The representative of a class is its lift closest to the basepoints.
"""
import math
import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace

import numpy as np

import moebius
from config import SearchSettings
from errors import NotFoundError
from moebius import MoebiusTransform
from surface import budget_error, holonomy
from words import cyclic_reduce, inverse, rotations, letter_rank, shortlex_key, power

logger = logging.getLogger(__name__)

LENGTH_TOLERANCE = 1e-9
# Bin width and match tolerance for axis lookups, in circle coordinates
AXIS_BIN = 1e-6
AXIS_MATCH = 1e-8


@dataclass(frozen=True)
class GeodesicClass:
    word: str
    matrix: MoebiusTransform
    length: float
    primitive: bool = True
    power: int = 1
    root_word: str = ''
    simple: bool = None
    axis_offset: float = 0.0

    @property
    def axis(self):
        return moebius.axis_of(self.matrix)

    def with_simple(self, simple):
        return replace(self, simple=simple)

    def __repr__(self):
        return f'<GeodesicClass {self.word} length={self.length:.6f}>'


@dataclass
class LengthSpectrum:
    classes: list
    cutoff: float
    covering_radius: float
    ball_size: int
    truncated_by: str = None
    merges: list = field(default_factory=list)

    @property
    def complete(self):
        """False when the word-length cap may have hidden classes below the cutoff."""
        return self.truncated_by is None

    def rows(self):
        return [(c.word, c.length, c.primitive) for c in self.classes]


def canonical_cyclic_form(word):
    """Cyclic reduction, then the least rotation of the word or its inverse."""
    reduced = cyclic_reduce(word)
    if not reduced:
        return ''
    candidates = rotations(reduced) + rotations(inverse(reduced))
    return min(candidates, key=lambda w: [letter_rank(x) for x in w])


def axis_offsets(repelling, attracting, points):
    """Distance from the nearest of `points` to each geodesic (arrays of endpoints)."""
    best = np.full(np.shape(repelling), np.inf)
    u = np.where(np.isinf(repelling), attracting, repelling)
    v = np.where(np.isinf(repelling), repelling, attracting)
    for z in points:
        x, y = z.real, z.imag
        with np.errstate(invalid='ignore', divide='ignore'):
            finite = np.abs(x * x + y * y - (u + v) * x + u * v) / (np.abs(v - u) * y)
            vertical = np.abs(x - u) / y
        s = np.where(np.isinf(v), vertical, finite)
        best = np.minimum(best, np.arcsinh(s))
    return best


class LiftIndex:
    """Axes (unordered endpoint pairs) with their translation lengths, searchable up to rounding."""

    def __init__(self):
        self._bins = defaultdict(list)
        self._modulus = int(round(2.0 / AXIS_BIN))

    def _bin(self, u):
        return int(math.floor((u + 1.0) / AXIS_BIN)) % self._modulus

    def add(self, u, v, length, value):
        key = tuple(sorted((self._bin(u), self._bin(v))))
        self._bins[key].append((u, v, length, value))

    def find(self, u, v, length):
        bu, bv = self._bin(u), self._bin(v)
        for du in (-1, 0, 1):
            for dv in (-1, 0, 1):
                key = tuple(sorted(((bu + du) % self._modulus, (bv + dv) % self._modulus)))
                for su, sv, slength, value in self._bins.get(key, ()):
                    if abs(slength - length) > 1e-7 * max(1.0, length):
                        continue
                    if _same_pair(su, sv, u, v):
                        return value
        return None


def _circle_gap(u, v):
    gap = abs(u - v)
    return min(gap, 2.0 - gap)


def _same_pair(a1, a2, b1, b2):
    direct = max(_circle_gap(a1, b1), _circle_gap(a2, b2))
    crossed = max(_circle_gap(a1, b2), _circle_gap(a2, b1))
    return min(direct, crossed) <= AXIS_MATCH


def _class_axis(M):
    rep, att = moebius.stack_axes(M.to_array()[None])
    return float(rep[0]), float(att[0])


def _build_classes(group, ball, cutoff):
    lengths = moebius.stack_lengths(ball.mats)
    candidate = np.nonzero(~np.isnan(lengths) & (lengths <= cutoff + LENGTH_TOLERANCE))[0]
    if not len(candidate):
        return [], []
    rep, att = moebius.stack_axes(ball.mats[candidate])
    offsets = axis_offsets(rep, att, group.basepoints)
    offset_cap = float(offsets.max()) + 1e-6

    groups = defaultdict(list)
    for row, index in enumerate(candidate):
        groups[canonical_cyclic_form(ball.words[index])].append(row)
    ordered = []
    for word, rows in groups.items():
        best = min(rows, key=lambda r: (offsets[r], r))
        ordered.append((offsets[best], shortlex_key(word), word, best))
    ordered.sort(key=lambda item: (item[0], item[1]))

    index = LiftIndex()
    found, merges = [], []
    for offset, _, word, row in ordered:
        length = float(lengths[candidate[row]])
        u, v = moebius.stack_circle(np.array([rep[row], att[row]]))
        owner = index.find(u, v, length)
        if owner is not None:
            found[owner]['words'].append(word)
            merges.append((found[owner]['words'][0], word))
            logger.debug(f"word {word} merged into class of {found[owner]['words'][0]} by geometry")
            continue
        M = MoebiusTransform.from_array(ball.mats[candidate[row]])
        lift = _scan_lifts(group, ball, M, ball.words[candidate[row]], length, offset, offset_cap, index, len(found))
        found.append({'words': [word], 'matrix': lift[0], 'offset': lift[1], 'length': length})

    classes = []
    for item in found:
        word = min(item['words'], key=shortlex_key)
        matrix = item['matrix']
        classes.append(GeodesicClass(word=word, matrix=matrix, length=moebius.translation_length(matrix),
                                     axis_offset=item['offset']))
    return classes, merges


def _scan_lifts(group, ball, M, word, length, offset, offset_cap, index, class_id):
    """
    Store the lifts of M's axis that pass within offset_cap of the basepoints;
    returns the conjugate of M whose axis is closest, with that distance.
    """
    reach = ball.within(offset + length / 2.0 + offset_cap + 1.0)
    conjugators = ball.mats[:reach]
    prefixes = [holonomy(group, word[:i]).inverse().to_array() for i in range(1, len(word))]
    if prefixes:
        conjugators = np.concatenate([conjugators, np.array(prefixes)])
    rep, att = _class_axis(M)
    images_rep = moebius.stack_apply_boundary(conjugators, rep)
    images_att = moebius.stack_apply_boundary(conjugators, att)
    offsets = axis_offsets(images_rep, images_att, group.basepoints)
    near = np.nonzero(offsets <= offset_cap)[0]
    cu = moebius.stack_circle(images_rep[near])
    cv = moebius.stack_circle(images_att[near])
    for k in range(len(near)):
        index.add(float(cu[k]), float(cv[k]), length, class_id)
    if not len(near):
        index.add(*moebius.stack_circle(np.array([rep, att])), length, class_id)
        return M, offset
    keys = [(round(float(offsets[near[k]]), 9), round(min(cu[k], cv[k]), 9), round(max(cu[k], cv[k]), 9))
            for k in range(len(near))]
    best = near[min(range(len(near)), key=lambda k: keys[k])]
    K = MoebiusTransform.from_array(conjugators[best])
    return moebius.conjugate(K, M), float(offsets[best])


def _attach_powers(classes, cutoff):
    """Mark non-primitive classes and add missing powers of primitive ones."""
    classes = sorted(classes, key=lambda c: c.length)
    result = []
    for cls in classes:
        root = None
        for shorter in result:
            if not shorter.primitive or shorter.length >= cls.length - LENGTH_TOLERANCE:
                continue
            m = round(cls.length / shorter.length)
            if m >= 2 and abs(cls.length - m * shorter.length) <= 1e-7 * cls.length and _same_axis(cls, shorter):
                root = (shorter, m)
                break
        if root:
            result.append(replace(cls, primitive=False, power=root[1], root_word=root[0].word))
        else:
            result.append(replace(cls, primitive=True, power=1, root_word=cls.word))
    for cls in [c for c in result if c.primitive]:
        m = 2
        while m * cls.length <= cutoff + LENGTH_TOLERANCE:
            if not any(c.root_word == cls.word and c.power == m for c in result):
                result.append(power_class(cls, m))
                logger.debug(f"added power {m} of {cls.word}")
            m += 1
    return result


def _same_axis(first, second):
    a, b = first.axis, second.axis
    u = [moebius.boundary_to_circle(x) for x in a.endpoints]
    v = [moebius.boundary_to_circle(x) for x in b.endpoints]
    return _same_pair(u[0], u[1], v[0], v[1]) or _same_pair(u[0], u[1], v[1], v[0])


def power_class(cls, m):
    root_word = cls.root_word or cls.word
    matrix = cls.matrix.power(m)
    return GeodesicClass(word=canonical_cyclic_form(power(root_word, m)), matrix=matrix,
                         length=moebius.translation_length(matrix), primitive=(m == 1),
                         power=m * cls.power, root_word=root_word, axis_offset=cls.axis_offset)


def sort_classes(classes):
    return sorted(classes, key=lambda c: (round(c.length, 9), shortlex_key(c.word)))


def enumerate_spectrum(group, cutoff, settings=None, covering_radius=None):
    if not cutoff > 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    settings = settings or SearchSettings()
    r0 = covering_radius if covering_radius is not None else settings.covering_radius
    ball = group.ball(cutoff + 2.0 * r0, settings.max_word_length, settings.element_budget)
    classes, merges = _build_classes(group, ball, cutoff)
    classes = sort_classes(_attach_powers(classes, cutoff))
    logger.info(f"Enumerated {len(classes)} classes up to length {cutoff:g} "
                f"(ball {len(ball)} elements, R0={r0:g}, {len(merges)} geometric merges)")
    if ball.truncated_by == 'budget':
        certified = max(0.0, ball.frontier_min - 2.0 * r0)
        raise budget_error(ball, [c for c in classes if c.length <= certified], 2.0 * r0)
    if ball.truncated_by == 'word_length':
        logger.warning(f"spectrum below {cutoff:g} may be incomplete: words capped at length {ball.max_word_length}")
    return LengthSpectrum(classes=classes, cutoff=cutoff, covering_radius=r0, ball_size=len(ball),
                          truncated_by=ball.truncated_by, merges=merges)


def enumerate_geodesics(group, cutoff, settings=None, covering_radius=None):
    return enumerate_spectrum(group, cutoff, settings, covering_radius).classes


def certify_spectrum(group, cutoff, settings=None):
    """
    Enumerate at R0 and R0 + 1 (pruning radius + 2); stabilized when the
    length lists agree. A spectrum cut by the word-length cap is enumerated
    again with the cap raised by 2.
    """
    settings = settings or SearchSettings()
    first = enumerate_spectrum(group, cutoff, settings)
    wider = settings
    if not first.complete:
        wider = replace(settings, max_word_length=settings.max_word_length + 2)
    second = enumerate_spectrum(group, cutoff, wider, covering_radius=settings.covering_radius + 1.0)
    lengths_first = [round(c.length, 8) for c in first.classes]
    lengths_second = [round(c.length, 8) for c in second.classes]
    stabilized = lengths_first == lengths_second
    if not stabilized:
        logger.warning(f"spectrum not stabilized below {cutoff}: {len(first.classes)} vs {len(second.classes)} classes")
    return first, second, stabilized


def systole(group, settings=None, max_cutoff=64.0):
    """Shortest class, enumerating with a doubling cutoff that starts at twice the shortest gluing length."""
    cutoff = 2.0 * group.min_gluing_length()
    while cutoff <= max_cutoff:
        classes = enumerate_geodesics(group, cutoff, settings)
        if classes:
            shortest = min(c.length for c in classes)
            tied = [c for c in classes if c.length <= shortest + LENGTH_TOLERANCE and c.primitive]
            best = min(tied, key=lambda c: shortlex_key(c.word))
            logger.info(f"Systole {best.word} length {best.length:.12f}")
            return best, best.length
        cutoff *= 2.0
    raise NotFoundError(f"no closed geodesic found below {max_cutoff}", max_cutoff=max_cutoff)


def find_class(classes, word):
    target = canonical_cyclic_form(word)
    for cls in classes:
        if cls.word == target:
            return cls
    return None


def word_root(word):
    """(root, k) with word == root * k and k maximal."""
    n = len(word)
    for size in range(1, n):
        if n % size == 0 and word[:size] * (n // size) == word:
            return word[:size], n // size
    return word, 1


def class_from_word(group, word):
    """A class for an explicit word; powers are recognized from the word itself."""
    matrix = holonomy(group, cyclic_reduce(word))
    canonical = canonical_cyclic_form(word)
    root, k = word_root(canonical)
    return GeodesicClass(word=canonical, matrix=matrix, length=moebius.translation_length(matrix),
                         primitive=(k == 1), power=k, root_word=root)


def spectrum_rows(spectrum):
    return [(c.word, c.length, 'true' if c.primitive else 'false') for c in spectrum.classes]
