"""
Closed hyperbolic surfaces from Fenchel-Nielsen data.

Each pair of pants is realized by three cuff transforms C0 C1 C2 = 1 with the
pants to the right of every oriented cuff axis. Pants are placed along a
spanning tree of the gluing graph; the remaining gluings become stable
letters. The cuff symbols that can be recovered from the others are dropped,
leaving the generator list of the surface group.
"""
import math
import logging
import threading
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

import hyptrig
import moebius
from moebius import MoebiusTransform, compose
from errors import ConstructionError, SpecError, EnumerationBudgetError
from words import generator_labels, inverse, free_reduce, check_word

logger = logging.getLogger(__name__)

RELATION_TOLERANCE = 1e-8
# Rounding used to detect repeated group elements
ELEMENT_KEY_SCALE = 1e6


@dataclass(frozen=True)
class Gluing:
    name: str
    first: tuple
    second: tuple
    length: float
    twist: float = 0.0

    def to_dict(self):
        return {'name': self.name, 'slots': [list(self.first), list(self.second)],
                'length': self.length, 'twist': self.twist}


@dataclass(frozen=True)
class PantsDecompositionSpec:
    pants: tuple
    gluings: tuple

    @property
    def genus(self):
        return len(self.pants) // 2 + 1

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise SpecError("surface must be an object with 'pants' and 'gluings'")
        pants = raw.get('pants')
        if isinstance(pants, int):
            pants = [f'P{i}' for i in range(pants)]
        if not pants:
            raise SpecError("surface needs a non-empty 'pants' list")
        pants = tuple(p if isinstance(p, str) else p.get('name', f'P{i}') for i, p in enumerate(pants))
        gluings = []
        for index, item in enumerate(raw.get('gluings', [])):
            try:
                first, second = (tuple(int(x) for x in slot) for slot in item['slots'])
                gluings.append(Gluing(
                    name=str(item.get('name', f'e{index}')),
                    first=first,
                    second=second,
                    length=float(item['length']),
                    twist=float(item.get('twist', 0.0)),
                ))
            except (KeyError, TypeError, ValueError) as e:
                raise SpecError(f"gluing {index} is malformed: {e}", gluing=index) from e
        spec = cls(pants=pants, gluings=tuple(gluings))
        spec.validate()
        return spec

    def to_dict(self):
        return {'pants': list(self.pants), 'gluings': [g.to_dict() for g in self.gluings]}

    def validate(self):
        count = len(self.pants)
        if count < 2 or count % 2:
            raise SpecError(f"{count} pants cannot form a closed surface of genus >= 2 (need 2g-2)",
                            pants=count)
        genus = count // 2 + 1
        if len(self.gluings) != 3 * genus - 3:
            raise SpecError(f"genus {genus} needs {3 * genus - 3} gluings, got {len(self.gluings)}",
                            genus=genus, gluings=len(self.gluings))
        names = [g.name for g in self.gluings]
        if len(set(names)) != len(names):
            raise SpecError("gluing names must be unique", names=names)
        used = {}
        for g in self.gluings:
            if not (g.length > 0 and math.isfinite(g.length)):
                raise SpecError(f"gluing {g.name} has non-positive length {g.length}", gluing=g.name)
            if not math.isfinite(g.twist):
                raise SpecError(f"gluing {g.name} has a non-finite twist", gluing=g.name)
            for slot in (g.first, g.second):
                pants_index, cuff = slot
                if not (0 <= pants_index < count and 0 <= cuff < 3):
                    raise SpecError(f"gluing {g.name} refers to missing slot {slot}", gluing=g.name)
                if slot in used:
                    raise SpecError(f"slot {slot} used by both {used[slot]} and {g.name}", slot=list(slot))
                used[slot] = g.name
        if len(used) != 3 * count:
            raise SpecError("every boundary slot must be glued exactly once", glued=len(used), slots=3 * count)
        reached, queue = {0}, deque([0])
        while queue:
            p = queue.popleft()
            for g in self.gluings:
                for a, b in ((g.first, g.second), (g.second, g.first)):
                    if a[0] == p and b[0] not in reached:
                        reached.add(b[0])
                        queue.append(b[0])
        if len(reached) != count:
            raise SpecError("gluing graph is not connected", reached=len(reached), pants=count)
        return self

    def gluing(self, name):
        for g in self.gluings:
            if g.name == name:
                return g
        raise SpecError(f"no gluing named {name!r}", gluing=name, known=[g.name for g in self.gluings])

    def slot_gluing(self, slot):
        for g in self.gluings:
            if slot in (g.first, g.second):
                return g
        raise SpecError(f"slot {slot} is not glued")

    def cuff_lengths(self, pants_index):
        return tuple(self.slot_gluing((pants_index, i)).length for i in range(3))


def genus2_dumbbell(short, loop1=2.0, loop2=2.0, twists=(0.0, 0.0, 0.0)):
    """Two pants joined along a separating curve of length `short`, each with one self-gluing."""
    return PantsDecompositionSpec(
        pants=('P0', 'P1'),
        gluings=(
            Gluing('sep', (0, 0), (1, 0), short, twists[0]),
            Gluing('loop0', (0, 1), (0, 2), loop1, twists[1]),
            Gluing('loop1', (1, 1), (1, 2), loop2, twists[2]),
        ),
    ).validate()


def genus2_theta(l0, l1, l2, twists=(0.0, 0.0, 0.0)):
    """Two pants glued cuff to cuff along three non-separating curves."""
    return PantsDecompositionSpec(
        pants=('P0', 'P1'),
        gluings=tuple(Gluing(f'c{i}', (0, i), (1, i), length, twist)
                      for i, (length, twist) in enumerate(zip((l0, l1, l2), twists))),
    ).validate()


def twist_conjugate(spec, name, delta):
    """Same decomposition with the twist on gluing `name` shifted by delta."""
    gluings = tuple(replace(g, twist=g.twist + delta) if g.name == name else g for g in spec.gluings)
    if all(g.name != name for g in spec.gluings):
        raise SpecError(f"no gluing named {name!r}", gluing=name)
    return replace(spec, gluings=gluings)


def load_spec(raw):
    """Decomposition from a config entry: explicit pants/gluings or a named genus-2 builder."""
    if not isinstance(raw, dict):
        raise SpecError("surface must be an object")
    builder = raw.get('builder')
    if builder is None:
        return PantsDecompositionSpec.from_dict(raw)
    twists = tuple(raw.get('twists', (0.0, 0.0, 0.0)))
    if len(twists) != 3:
        raise SpecError("genus-2 builders take three twists", twists=list(twists))
    try:
        if builder == 'dumbbell':
            loops = raw.get('loops', (2.0, 2.0))
            return genus2_dumbbell(float(raw['short']), float(loops[0]), float(loops[1]), twists)
        if builder == 'theta':
            l0, l1, l2 = (float(x) for x in raw['lengths'])
            return genus2_theta(l0, l1, l2, twists=twists)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, SpecError):
            raise
        raise SpecError(f"surface builder {builder!r} is missing or has malformed parameters: {e}") from e
    raise SpecError(f"unknown surface builder {builder!r}", builder=builder)


# -- pants --------------------------------------------------------------------

def _seam_rotation(distance):
    """Translation by `distance` along the unit semicircle, perpendicular to the imaginary axis at i."""
    ch, sh = math.cosh(distance / 2.0), math.sinh(distance / 2.0)
    return MoebiusTransform(ch, sh, sh, ch)


def build_pants_group(l1, l2, l3):
    """Cuff transforms (C1, C2, C3) with C1 C2 C3 = 1; C1's axis is the imaginary axis."""
    seam = hyptrig.pants_seam(l1, l2, l3)
    rotation = _seam_rotation(seam)
    c1 = moebius.translation(l1)
    c2 = moebius.conjugate(rotation, moebius.translation(-l2))
    c3 = compose(c1, c2).inverse()
    return c1, c2, c3


def pants_normalizers(cuffs):
    """For each cuff, the normalizer whose foot is the seam point toward the next cuff."""
    axes = [moebius.axis_of(c) for c in cuffs]
    frames = []
    for i in range(3):
        foot, _, _ = moebius.common_perpendicular(axes[i], axes[(i + 1) % 3])
        frames.append(moebius.normalizer(axes[i], foot))
    return frames


# -- surface group ------------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    label: str
    matrix: MoebiusTransform
    source: str


@dataclass
class ElementBall:
    """Reduced words of bounded displacement, deduplicated by element, sorted by displacement."""
    words: list
    mats: np.ndarray
    metric: np.ndarray
    radius: float
    max_word_length: int
    truncated_by: str = None
    frontier_min: float = math.inf

    def __len__(self):
        return len(self.words)

    @property
    def complete(self):
        return self.truncated_by is None

    def within(self, radius):
        """Number of leading entries with metric <= radius."""
        return int(np.searchsorted(self.metric, radius, side='right'))


class SurfaceGroup:
    def __init__(self, generators, decomposition, pants_boundary_words, gluing_words, relation_residual,
                 basepoints, cuff_frames, diagnostics):
        self.generators = tuple(generators)
        self.decomposition = decomposition
        self.pants_boundary_words = tuple(pants_boundary_words)
        self.gluing_words = dict(gluing_words)
        self.relation_residual = relation_residual
        self.basepoints = tuple(basepoints)
        self.cuff_frames = dict(cuff_frames)
        self.diagnostics = dict(diagnostics)
        self._matrices = {g.label: g.matrix for g in self.generators}
        self._balls = {}
        self._lock = threading.Lock()

    @property
    def basepoint(self):
        return self.basepoints[0]

    @property
    def labels(self):
        return [g.label for g in self.generators]

    def matrix(self, letter):
        if letter.islower():
            return self._matrices[letter]
        return self._matrices[letter.lower()].inverse()

    def gluing_length(self, name):
        return self.decomposition.gluing(name).length

    def min_gluing_length(self):
        return min(g.length for g in self.decomposition.gluings)

    def letter_stack(self):
        """Matrices for 'a', 'A', 'b', 'B', ... in that order."""
        letters = []
        for g in self.generators:
            letters.extend([g.label, g.label.upper()])
        return letters, moebius.stack([self.matrix(x) for x in letters])

    def basepoint_metric(self, mats):
        """min over basepoint pairs (p, q) of d(p, g q) for every matrix g of the stack."""
        best = np.full(len(mats), np.inf)
        for q in self.basepoints:
            images = moebius.stack_apply(mats, q)
            for p in self.basepoints:
                best = np.minimum(best, moebius.stack_distance(np.full(images.shape, p), images))
        return best

    def ball(self, radius, max_word_length, element_budget):
        """Cached element ball; a larger cached ball with the same word cap is sliced."""
        with self._lock:
            for (r, cap, budget), cached in self._balls.items():
                if cap == max_word_length and r >= radius and budget == element_budget and cached.complete:
                    return _slice_ball(cached, radius)
            key = (radius, max_word_length, element_budget)
            if key not in self._balls:
                self._balls[key] = enumerate_ball(self, radius, max_word_length, element_budget)
            return self._balls[key]

    def __repr__(self):
        return f'<SurfaceGroup genus={self.decomposition.genus} generators={len(self.generators)}>'


def holonomy(group, word):
    check_word(word, group.labels)
    result = MoebiusTransform.identity()
    for letter in word:
        result = compose(result, group.matrix(letter))
    return result


def gluing_holonomy(group, name):
    return holonomy(group, group.gluing_words[name])


def _slice_ball(ball, radius):
    n = ball.within(radius)
    return ElementBall(words=ball.words[:n], mats=ball.mats[:n], metric=ball.metric[:n], radius=radius,
                       max_word_length=ball.max_word_length, truncated_by=ball.truncated_by,
                       frontier_min=ball.frontier_min)


def _element_keys(mats):
    canon = moebius.stack_canonical_sign(mats)
    return np.round(canon.reshape(len(canon), 4) * ELEMENT_KEY_SCALE).astype(np.int64)


def enumerate_ball(group, radius, max_word_length, element_budget):
    """
    Breadth-first search over freely reduced words. A word is kept when its
    element is new and its basepoint metric is <= radius; only kept words are
    extended.
    """
    letters, gens = group.letter_stack()
    inverse_of = np.array([i ^ 1 for i in range(len(letters))])
    identity = np.eye(2)[None, :, :]
    seen = {_element_keys(identity)[0].tobytes()}
    words, mats, metric = [''], [identity], [np.zeros(1)]
    layer_words, layer_mats, layer_last = [''], identity, np.array([-1])
    truncated_by, frontier_min, total = None, math.inf, 1

    for length in range(1, max_word_length + 1):
        products = np.einsum('fij,gjk->fgik', layer_mats, gens)
        allowed = np.ones(products.shape[:2], dtype=bool)
        has_last = layer_last >= 0
        allowed[np.nonzero(has_last)[0], inverse_of[layer_last[has_last]]] = False
        parent, letter = np.nonzero(allowed)
        candidates = moebius.stack_renormalize(products[parent, letter])
        distances = group.basepoint_metric(candidates)
        inside = np.nonzero(distances <= radius)[0]
        keys = _element_keys(candidates[inside])
        accepted = []
        for row, index in enumerate(inside):
            key = keys[row].tobytes()
            if key in seen:
                continue
            if total >= element_budget:
                truncated_by = 'budget'
                frontier_min = min(frontier_min, float(distances[index]))
                continue
            seen.add(key)
            accepted.append(index)
            total += 1
        if not accepted:
            layer_words = []
            break
        accepted = np.array(accepted)
        layer_words = [layer_words[parent[i]] + letters[letter[i]] for i in accepted]
        layer_mats = candidates[accepted]
        layer_last = letter[accepted]
        words.extend(layer_words)
        mats.append(layer_mats)
        metric.append(distances[accepted])
        logger.debug(f"ball radius {radius:.3f}: word length {length}, {len(accepted)} new elements, {total} total")
        if truncated_by == 'budget':
            break
    if layer_words and truncated_by is None:
        truncated_by = 'word_length'
        frontier_min = float(np.min(metric[-1])) if len(metric[-1]) else math.inf

    mats = np.concatenate(mats)
    metric = np.concatenate(metric)
    order = sorted(range(len(words)), key=lambda i: (metric[i], len(words[i]), words[i]))
    ball = ElementBall(words=[words[i] for i in order], mats=mats[order], metric=metric[order], radius=radius,
                       max_word_length=max_word_length, truncated_by=truncated_by, frontier_min=frontier_min)
    if truncated_by:
        logger.info(f"ball radius {radius:.3f} truncated by {truncated_by} at {len(ball)} elements")
    return ball


# -- construction -------------------------------------------------------------

def _derivable(symbols, kept, spec, tree_edges):
    """Express every cuff symbol as a word in the kept symbols, or return None."""
    known = {s: letter for s, letter in kept.items()}
    changed = True
    while changed:
        changed = False
        for p in range(len(spec.pants)):
            slots = [(p, i) for i in range(3)]
            missing = [s for s in slots if s not in known]
            if len(missing) == 1:
                i = missing[0][1]
                # C0 C1 C2 = 1 gives C_i = (C_{i+1} C_{i+2})^-1
                known[missing[0]] = inverse(known[(p, (i + 1) % 3)] + known[(p, (i + 2) % 3)])
                changed = True
        for g in spec.gluings:
            x, y = g.first, g.second
            if g.name in tree_edges:
                if x in known and y not in known:
                    known[y] = inverse(known[x])
                    changed = True
                elif y in known and x not in known:
                    known[x] = inverse(known[y])
                    changed = True
            else:
                s = kept.get(('stable', g.name))
                if x in known and y not in known:
                    known[y] = inverse(s) + inverse(known[x]) + s
                    changed = True
                elif y in known and x not in known:
                    known[x] = s + inverse(known[y]) + inverse(s)
                    changed = True
    if all(s in known for s in symbols):
        return {s: free_reduce(known[s]) for s in symbols}
    return None


def _closure(kept, spec, tree_edges):
    """Cuff symbols recoverable from the kept ones (same rules as _derivable)."""
    known = set(kept)
    changed = True
    while changed:
        changed = False
        for p in range(len(spec.pants)):
            missing = [(p, i) for i in range(3) if (p, i) not in known]
            if len(missing) == 1:
                known.add(missing[0])
                changed = True
        for g in spec.gluings:
            if (g.first in known) != (g.second in known):
                known.update((g.first, g.second))
                changed = True
    return known


def _reduce_generators(spec, tree_edges):
    symbols = [(p, i) for p in range(len(spec.pants)) for i in range(3)]
    stable = [('stable', g.name) for g in spec.gluings if g.name not in tree_edges]
    kept = list(symbols) + stable
    for symbol in symbols:
        trial = [s for s in kept if s != symbol]
        if set(symbols) <= _closure(trial, spec, tree_edges):
            kept = trial
    return kept


def build_surface(spec, properness_bound=None):
    spec.validate()
    for g in spec.gluings:
        if properness_bound is not None and g.length > properness_bound:
            logger.warning(f"gluing {g.name} has length {g.length} above the properness bound {properness_bound}")

    standard = {}
    for p in range(len(spec.pants)):
        cuffs = build_pants_group(*spec.cuff_lengths(p))
        standard[p] = (cuffs, pants_normalizers(cuffs))

    placement = {0: MoebiusTransform.identity()}
    tree_edges, queue = set(), deque([0])
    while queue:
        p = queue.popleft()
        for g in spec.gluings:
            for here, there in ((g.first, g.second), (g.second, g.first)):
                if here[0] != p or there[0] in placement or g.name in tree_edges:
                    continue
                frame_here = compose(standard[p][1][here[1]], placement[p].inverse())
                placement[there[0]] = compose(
                    compose(frame_here.inverse(), compose(moebius.translation(g.twist), moebius.half_turn())),
                    standard[there[0]][1][there[1]])
                tree_edges.add(g.name)
                queue.append(there[0])

    world, frames = {}, {}
    for p, (cuffs, normalizers) in standard.items():
        G = placement[p]
        for i in range(3):
            world[(p, i)] = moebius.conjugate(G, cuffs[i])
            frames[(p, i)] = compose(normalizers[i], G.inverse())

    stable = {}
    for g in spec.gluings:
        if g.name in tree_edges:
            continue
        x, y = g.first, g.second
        stable[g.name] = compose(
            compose(frames[x].inverse(), compose(moebius.translation(g.twist), moebius.half_turn())),
            frames[y])

    kept = _reduce_generators(spec, tree_edges)
    labels = generator_labels(len(kept))
    letter_of = dict(zip(kept, labels))
    generators = []
    for symbol, label in letter_of.items():
        if symbol[0] == 'stable':
            generators.append(Generator(label, stable[symbol[1]], f'stable:{symbol[1]}'))
        else:
            p, i = symbol
            generators.append(Generator(label, world[symbol], f'{spec.pants[p]}.c{i}'))

    symbols = [(p, i) for p in range(len(spec.pants)) for i in range(3)]
    derived = _derivable(symbols, {s: letter_of[s] for s in kept}, spec, tree_edges)
    if derived is None:
        raise ConstructionError("cuff holonomies are not generated by the reduced generator set")

    partial = SurfaceGroup(generators, spec, [], {}, 0.0, [], {}, {})
    pants_residual = 0.0
    identity = np.eye(2)
    for p in range(len(spec.pants)):
        product = compose(compose(world[(p, 0)], world[(p, 1)]), world[(p, 2)]).to_array()
        pants_residual = max(pants_residual, float(np.min([np.abs(product - identity).max(),
                                                           np.abs(product + identity).max()])))
    holonomy_residual = 0.0
    for symbol in symbols:
        h = holonomy(partial, derived[symbol]).to_array()
        w = world[symbol].to_array()
        holonomy_residual = max(holonomy_residual, float(min(np.abs(h - w).max(), np.abs(h + w).max())))
    length_errors = {}
    for g in spec.gluings:
        tr = abs(holonomy(partial, derived[g.first]).trace)
        length_errors[g.name] = abs(tr - 2.0 * math.cosh(g.length / 2.0))
    residual = max(pants_residual, holonomy_residual)
    diagnostics = {
        'pants_residual': pants_residual,
        'holonomy_residual': holonomy_residual,
        'trace_errors': length_errors,
        'tree_edges': sorted(tree_edges),
    }
    if residual > RELATION_TOLERANCE or max(length_errors.values()) > RELATION_TOLERANCE:
        raise ConstructionError(f"construction residual {residual:.3e} exceeds {RELATION_TOLERANCE}", **diagnostics)

    basepoints = []
    for p in range(len(spec.pants)):
        seam = hyptrig.pants_seam(*spec.cuff_lengths(p))
        basepoints.append(placement[p].apply(_seam_rotation(seam / 2.0).apply(1j)))

    boundary_words = [tuple(derived[(p, i)] for i in range(3)) for p in range(len(spec.pants))]
    gluing_words = {g.name: derived[g.first] for g in spec.gluings}
    group = SurfaceGroup(generators, spec, boundary_words, gluing_words, residual, basepoints, frames, diagnostics)
    logger.info(f"Built genus {spec.genus} surface: {len(generators)} generators "
                f"({', '.join(g.source for g in generators)}), residual {residual:.2e}")
    return group


def conjugate_group(group, S):
    """The same surface seen through the isometry S."""
    generators = [Generator(g.label, moebius.conjugate(S, g.matrix), g.source) for g in group.generators]
    frames = {slot: compose(frame, S.inverse()) for slot, frame in group.cuff_frames.items()}
    return SurfaceGroup(generators, group.decomposition, group.pants_boundary_words, group.gluing_words,
                        group.relation_residual, [S.apply(p) for p in group.basepoints], frames,
                        group.diagnostics)


def gluing_frame(group, name):
    """Normalizer of the gluing curve's representative axis (first slot side)."""
    return group.cuff_frames[group.decomposition.gluing(name).first]


@dataclass
class SurfaceCheck:
    relation_residual: float
    pants_residual: float
    holonomy_residual: float
    max_length_error: float
    near_identity: int
    ball_size: int
    ball_truncated_by: str
    properness_violations: list = field(default_factory=list)

    @property
    def ok(self):
        return (self.relation_residual <= RELATION_TOLERANCE and self.max_length_error <= RELATION_TOLERANCE
                and self.near_identity == 0)


def surface_check(group, radius=6.0, max_word_length=6, element_budget=200_000, properness_bound=None):
    """Construction residuals plus the discreteness proxy over an element ball."""
    max_length_error = 0.0
    for g in group.decomposition.gluings:
        length = moebius.translation_length(gluing_holonomy(group, g.name))
        max_length_error = max(max_length_error, abs(length - g.length))
    ball = group.ball(radius, max_word_length, element_budget)
    displacements = moebius.stack_displacement(ball.mats, group.basepoint)
    near_identity = int(np.sum(displacements[1:] < 1e-3))
    if near_identity:
        logger.warning(f"{near_identity} non-identity elements move the basepoint by less than 1e-3")
    violations = []
    if properness_bound is not None:
        violations = [g.name for g in group.decomposition.gluings if g.length > properness_bound]
    return SurfaceCheck(
        relation_residual=group.relation_residual,
        pants_residual=group.diagnostics['pants_residual'],
        holonomy_residual=group.diagnostics['holonomy_residual'],
        max_length_error=max_length_error,
        near_identity=near_identity,
        ball_size=len(ball),
        ball_truncated_by=ball.truncated_by,
        properness_violations=violations,
    )


def covering_radius_estimate(group, max_radius=8.0, angles=48, radii=64, max_word_length=6,
                             element_budget=200_000):
    """
    Sampled outradius of the Dirichlet domain at the basepoint. Returns
    (estimate, saturated) where saturated means the domain reaches max_radius.
    """
    p = group.basepoint
    ball = group.ball(2.0 * max_radius, max_word_length, element_budget)
    single = moebius.stack_displacement(ball.mats, p)
    neighbours = ball.mats[(single > 1e-9) & (single <= 2.0 * max_radius)]
    images = moebius.stack_apply(neighbours, p)
    rho = np.linspace(max_radius / radii, max_radius, radii)
    theta = np.linspace(0.0, 2.0 * np.pi, angles, endpoint=False)
    w = (np.tanh(rho / 2.0)[:, None] * np.exp(1j * theta)[None, :]).ravel()
    points = p.real + p.imag * 1j * (1.0 + w) / (1.0 - w)
    to_base = moebius.stack_distance(points, np.full(points.shape, p))
    inside = np.ones(points.shape, dtype=bool)
    for image in images:
        inside &= to_base <= moebius.stack_distance(points, np.full(points.shape, image)) + 1e-9
    if not inside.any():
        return 0.0, False
    estimate = float(to_base[inside].max())
    return estimate, estimate >= max_radius - 1e-9


def budget_error(ball, partial, margin):
    certified = max(0.0, ball.frontier_min - margin)
    return EnumerationBudgetError(
        f"element budget exhausted; results certified below {certified:.6f}",
        partial=partial, certified_cutoff=certified, ball_size=len(ball))
