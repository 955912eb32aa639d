"""
Interaction strength estimates.

i_hat is the largest i(a, b)/(l(a) l(b)) over stabilized pairs of enumerated
primitive classes (self-pairs included), so it is a lower bound for I(X);
4/sys^2 bounds I(X) from above.
"""
import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

import hyptrig
import moebius
from annulus import thin_length, thin_part_pairs
from config import SearchSettings, ExperimentSettings
from errors import CollarError, DomainError, IndeterminateError, NotFoundError
from geodesics import (GeodesicClass, canonical_cyclic_form, enumerate_spectrum, sort_classes, systole,
                       word_root)
from intersect import intersection_number, self_intersection, shares_axis
from surface import build_surface
from words import cyclic_reduce, shortlex_key

logger = logging.getLogger(__name__)

# Pairs are evaluated in fixed-size chunks so pruning does not depend on the worker count
PAIR_CHUNK = 64
AUDIT_TOLERANCE = 1e-6
BOUNDARY_TOLERANCE = 1e-9
LENGTH_MATCH = 1e-7


@dataclass
class PairResult:
    first: GeodesicClass
    second: GeodesicClass
    count: int
    stabilized: bool

    @property
    def ratio(self):
        return self.count / (self.first.length * self.second.length)


@dataclass
class InteractionReport:
    cutoff: float
    systole: float
    systole_word: str
    best_pair: tuple
    best_count: int
    i_hat: float
    i_hat_delta: float
    i_hat_simple: float
    predicted: float
    certificate: float
    ratio: float
    unstabilized_pairs: int = 0
    skipped_pairs: int = 0
    evaluated_pairs: int = 0
    pairs_truncated: bool = False
    figure_eight_floor: float = 0.0
    classes: list = field(default_factory=list)
    simple: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    indeterminate_pairs: list = field(default_factory=list)
    spectrum_complete: bool = True
    pairs: list = field(default_factory=list)

    def row(self):
        return {
            'cutoff': self.cutoff, 'sys': self.systole, 'i_hat': self.i_hat, 'i_hat_delta': self.i_hat_delta,
            'i_hat_simple': self.i_hat_simple, 'predicted': self.predicted, 'certificate': self.certificate,
            'ratio': self.ratio, 'unstabilized_pairs': self.unstabilized_pairs,
            'indeterminate_pairs': len(self.indeterminate_pairs), 'spectrum_complete': self.spectrum_complete,
        }


def figure_eight_floor(group):
    spec = group.decomposition
    return max(hyptrig.figure_eight_floor(*spec.cuff_lengths(p)) for p in range(len(spec.pants)))


def _pair_bound(first, second, simple):
    """Upper bound on i/(l l') from the collar of a simple member, or inf."""
    bound = math.inf
    for member in (first, second):
        if simple.get(member.word):
            bound = min(bound, 1.0 / (2.0 * hyptrig.sigma(member.length / 2.0) * member.length))
    return bound


def _run(executor, fn, items):
    return list(executor.map(fn, items))


def _counted(fn):
    """Wrap a pair count so an indeterminate pair yields None instead of aborting the run."""
    def run(item):
        try:
            return fn(item)
        except IndeterminateError as e:
            logger.warning(f"{e}; recorded as indeterminate")
            return None
    return run


def estimate_interaction(group, cutoff, settings=None, classes=None, complete=None):
    """
    Enumerate primitive classes up to `cutoff` (or use `classes`), compute
    every self-intersection and the pairwise counts in order of l(a) l(b),
    skipping pairs whose collar bound cannot beat the running maximum.
    `complete` says whether `classes` is the whole spectrum below the cutoff;
    an enumerated spectrum reports it itself.
    """
    settings = settings or SearchSettings()
    if classes is None:
        spectrum = enumerate_spectrum(group, cutoff, settings)
        classes, complete = spectrum.classes, spectrum.complete
    complete = True if complete is None else complete
    primitive = sort_classes([c for c in classes if c.primitive and c.length <= cutoff + 1e-9])
    if not primitive:
        raise NotFoundError(f"no closed geodesic below cutoff {cutoff}", window=cutoff)
    shortest = min(primitive, key=lambda c: (c.length, shortlex_key(c.word)))
    if cutoff < 2.0 * shortest.length - 1e-9:
        raise DomainError(f"cutoff {cutoff} is below twice the systole {shortest.length}", cutoff=cutoff)

    with ThreadPoolExecutor(max_workers=settings.workers) as executor:
        selfs = _run(executor, _counted(lambda c: self_intersection(group, c, settings)), primitive)
        simple, unstabilized, indeterminate = {}, 0, []
        witnesses, computed = {}, []
        i_hat_delta, best_self = 0.0, None
        for cls, result in zip(primitive, selfs):
            if result is None:
                indeterminate.append((cls.word, cls.word))
                continue
            if not result.stabilized:
                unstabilized += 1
                continue
            simple[cls.word] = result.count == 0
            computed.append(PairResult(cls, cls, result.count, True))
            ratio = result.count / cls.length ** 2
            if ratio > i_hat_delta:
                i_hat_delta, best_self = ratio, computed[-1]

        pairs = [(a, b) for i, a in enumerate(primitive) for b in primitive[i + 1:]]
        pairs.sort(key=lambda p: (p[0].length * p[1].length, shortlex_key(p[0].word), shortlex_key(p[1].word)))
        truncated = len(pairs) > settings.max_pairs
        if truncated:
            logger.warning(f"{len(pairs)} pairs exceed max_pairs={settings.max_pairs}; keeping the first")
            pairs = pairs[:settings.max_pairs]

        best = best_self
        i_hat = i_hat_delta
        i_hat_simple, best_simple = 0.0, None
        skipped = evaluated = 0
        count_pair = _counted(lambda p: intersection_number(group, p[0], p[1], settings))
        for start in range(0, len(pairs), PAIR_CHUNK):
            chunk = []
            for a, b in pairs[start:start + PAIR_CHUNK]:
                both_simple = simple.get(a.word) and simple.get(b.word)
                threshold = min(i_hat, i_hat_simple) if both_simple else i_hat
                if _pair_bound(a, b, simple) < threshold:
                    skipped += 1
                else:
                    chunk.append((a, b))
            results = _run(executor, count_pair, chunk)
            for (a, b), result in zip(chunk, results):
                evaluated += 1
                if result is None:
                    indeterminate.append((a.word, b.word))
                    continue
                if not result.stabilized:
                    unstabilized += 1
                    continue
                pair = PairResult(a, b, result.count, True)
                computed.append(pair)
                if pair.ratio > i_hat:
                    i_hat, best = pair.ratio, pair
                if simple.get(a.word) and simple.get(b.word) and pair.ratio > i_hat_simple:
                    i_hat_simple, best_simple = pair.ratio, pair

    s = hyptrig.capped_systole(shortest.length)
    predicted = hyptrig.predicted_interaction(s)
    certificate = hyptrig.intersection_certificate(shortest.length)
    if i_hat > certificate + 1e-9:
        logger.error(f"i_hat {i_hat} exceeds the certificate {certificate}")
    for name, witness in (('i_hat', best), ('i_hat_delta', best_self), ('i_hat_simple', best_simple)):
        if witness is not None:
            witnesses[name] = (witness.first.word, witness.second.word, witness.count)
    if unstabilized:
        logger.warning(f"{unstabilized} unstabilized pairs excluded from the estimate")
    if indeterminate:
        logger.warning(f"{len(indeterminate)} indeterminate pairs excluded from the estimate")
    if not complete:
        logger.warning(f"class list below {cutoff:g} may be incomplete; i_hat is a lower bound on a partial list")
    report = InteractionReport(
        cutoff=cutoff, systole=shortest.length, systole_word=shortest.word,
        best_pair=(best.first, best.second) if best else (), best_count=best.count if best else 0,
        i_hat=i_hat, i_hat_delta=i_hat_delta, i_hat_simple=i_hat_simple,
        predicted=predicted, certificate=certificate, ratio=i_hat / predicted,
        unstabilized_pairs=unstabilized, skipped_pairs=skipped, evaluated_pairs=evaluated,
        pairs_truncated=truncated, figure_eight_floor=figure_eight_floor(group),
        classes=primitive, simple=simple, witnesses=witnesses,
        indeterminate_pairs=indeterminate, spectrum_complete=complete, pairs=computed,
    )
    logger.info(f"Interaction up to {cutoff:g}: i_hat={i_hat:.6f} predicted={predicted:.6f} "
                f"ratio={report.ratio:.4f} ({evaluated} pairs, {skipped} skipped)")
    return report


def word_candidates(group, max_length, word_length, settings=None):
    """
    Primitive classes from all reduced words up to `word_length` whose
    translation length is at most `max_length`. Words are merged by canonical
    form, and candidates of equal length are merged when they share an axis.
    """
    settings = settings or SearchSettings()
    ball = group.ball(math.inf, word_length, 10 ** 9)
    lengths = moebius.stack_lengths(ball.mats)
    keep = np.nonzero(~np.isnan(lengths) & (lengths <= max_length + 1e-9))[0]
    found = {}
    for index in keep:
        canonical = canonical_cyclic_form(cyclic_reduce(ball.words[index]))
        if not canonical or canonical in found or word_root(canonical)[1] > 1:
            continue
        matrix = moebius.MoebiusTransform.from_array(ball.mats[index])
        found[canonical] = GeodesicClass(word=canonical, matrix=matrix, length=float(lengths[index]),
                                         root_word=canonical)
    distinct = []
    for cls in sort_classes(found.values()):
        tied = [c for c in distinct if abs(c.length - cls.length) <= LENGTH_MATCH * max(1.0, cls.length)]
        twin = next((c for c in tied if shares_axis(group, c, cls, settings)), None)
        if twin is not None:
            logger.debug(f"candidate {cls.word} is the geodesic of {twin.word}")
            continue
        distinct.append(cls)
    return distinct


def find_systole_companion(group, settings=None, experiment=None, candidates=None):
    """
    A simple class meeting the systole once or twice, maximizing i/(l l_sys)
    inside the window 4 log(1/s) + C. Returns (companion, intersections).
    Candidates whose counts are indeterminate are skipped.
    """
    settings = settings or SearchSettings()
    experiment = experiment or ExperimentSettings()
    sys_class, sys_length = systole(group, settings)
    window = hyptrig.companion_window(sys_length, experiment.companion_slack, 2)
    single = hyptrig.companion_window(sys_length, experiment.companion_slack, 1)
    if candidates is None:
        candidates = word_candidates(group, window, experiment.companion_word_length, settings)
    candidates = [c for c in candidates if c.length <= window + 1e-9 and c.word != sys_class.word]
    best, best_count, checked, indeterminate = None, 0, 0, 0
    for cls in sort_classes(candidates):
        if best is not None and cls.length > 2.0 * best.length / best_count:
            break
        checked += 1
        try:
            result = intersection_number(group, sys_class, cls, settings)
            if not result.stabilized or result.count not in (1, 2):
                continue
            if result.count == 1 and cls.length > single + 1e-9:
                logger.debug(f"{cls.word} meets the systole once but exceeds the single-crossing window {single:.4f}")
            score = result.count / cls.length
            if best is not None and score <= best_count / best.length:
                continue
            own = self_intersection(group, cls, settings)
        except IndeterminateError as e:
            indeterminate += 1
            logger.warning(f"companion candidate {cls.word} skipped: {e}")
            continue
        if own.stabilized and own.count == 0:
            best, best_count = cls.with_simple(True), result.count
    if best is None:
        raise NotFoundError(f"no simple class meeting the systole once or twice below {window:.6f}",
                            window=window, systole=sys_length, checked=checked, indeterminate=indeterminate)
    logger.info(f"Companion {best.word}: length {best.length:.6f}, i={best_count}, window {window:.4f}")
    return best, best_count


def cutoff_rule(epsilon, experiment=None, capped=True):
    """4 log(1/eps) + C, capped by experiment.max_cutoff when set and `capped`."""
    experiment = experiment or ExperimentSettings()
    cutoff = 4.0 * math.log(1.0 / epsilon) + experiment.cutoff_slack
    if capped and experiment.max_cutoff > 0:
        cutoff = min(cutoff, experiment.max_cutoff)
    return cutoff


@dataclass
class ExperimentRow:
    epsilon: float
    systole: float = math.nan
    rule_cutoff: float = math.nan
    cutoff: float = math.nan
    capped: bool = False
    i_hat: float = math.nan
    i_hat_delta: float = math.nan
    i_hat_simple: float = math.nan
    predicted: float = math.nan
    certificate: float = math.nan
    ratio: float = math.nan
    unstabilized_pairs: int = 0
    indeterminate_pairs: int = 0
    spectrum_complete: bool = True
    companion: str = ''
    error: str = ''

    @property
    def ratio_checked(self):
        """The ratio only tests the asymptotics when the rule's cutoff ran on a complete spectrum."""
        return not (self.error or self.capped or not self.spectrum_complete or self.indeterminate_pairs)


def asymptotic_experiment(family, settings=None, experiment=None, rule=None):
    """
    One interaction row per (epsilon, spec) of the family. The class list is
    the spectrum up to the rule's cutoff plus the systole companion; the
    companion pair realizes the constructive lower bound. Rows whose cutoff
    was lowered by experiment.max_cutoff record both cutoffs and are marked
    capped.
    """
    settings = settings or SearchSettings()
    experiment = experiment or ExperimentSettings()
    rule = rule or (lambda eps: cutoff_rule(eps, experiment, capped=False))
    systoles = [eps for eps, _ in family]
    if any(b >= a for a, b in zip(systoles, systoles[1:])):
        raise DomainError("family parameters must be strictly decreasing", epsilons=systoles)
    rows = []
    for eps, spec in family:
        row = ExperimentRow(epsilon=eps)
        try:
            group = build_surface(spec, experiment.properness_bound)
            row.rule_cutoff = rule(eps)
            cutoff = row.rule_cutoff
            if experiment.max_cutoff > 0 and cutoff > experiment.max_cutoff:
                cutoff, row.capped = experiment.max_cutoff, True
                logger.warning(f"epsilon={eps}: cutoff {row.rule_cutoff:.4f} capped at {cutoff:g}; "
                               f"the ratio does not test the asymptotics")
            spectrum = enumerate_spectrum(group, cutoff, settings)
            classes = spectrum.classes
            companion, _ = find_systole_companion(group, settings, experiment)
            if all(c.word != companion.word for c in classes):
                classes = classes + [companion]
            full_cutoff = max(cutoff, companion.length)
            report = estimate_interaction(group, full_cutoff, settings, classes, complete=spectrum.complete)
            row.systole, row.cutoff = report.systole, full_cutoff
            row.i_hat, row.i_hat_delta, row.i_hat_simple = report.i_hat, report.i_hat_delta, report.i_hat_simple
            row.predicted, row.certificate, row.ratio = report.predicted, report.certificate, report.ratio
            row.unstabilized_pairs, row.companion = report.unstabilized_pairs, companion.word
            row.indeterminate_pairs = len(report.indeterminate_pairs)
            row.spectrum_complete = report.spectrum_complete
        except CollarError as e:
            logger.error(f"epsilon={eps}: {e.code}: {e}")
            row.error = e.code
        rows.append(row)
    return rows


@dataclass
class AuditPart:
    part: str
    count: int
    first_length: float
    second_length: float

    @property
    def ratio(self):
        denominator = self.first_length * self.second_length
        if denominator <= 0:
            return 0.0 if self.count == 0 else math.inf
        return self.count / denominator


@dataclass
class ThinThickAudit:
    pair: tuple
    total_ratio: float
    parts: list
    bound: float
    holds: bool
    systole_share: float


def thin_thick_audit(group, report, settings=None):
    """
    Split the best pair's crossings and lengths into the thin part of every
    gluing curve and one thick remainder; crossings within 1e-9 of a thin
    part boundary count on both sides.
    """
    settings = settings or SearchSettings()
    if not report.best_pair:
        raise NotFoundError("report has no best pair to audit")
    first, second = report.best_pair
    total = report.best_count
    parts = []
    thin_strict_total = 0
    thin_first = thin_second = 0.0
    sys_count = 0
    for gluing in group.decomposition.gluings:
        radius = hyptrig.thin_radius(gluing.length)
        inclusive = thin_part_pairs(group, first, second, gluing.name, settings, slack=BOUNDARY_TOLERANCE)
        strict = thin_part_pairs(group, first, second, gluing.name, settings, slack=-BOUNDARY_TOLERANCE)
        thin_strict_total += strict
        a = thin_length(group, first, gluing.name, settings)
        b = thin_length(group, second, gluing.name, settings)
        thin_first += a
        thin_second += b
        parts.append(AuditPart(f'thin:{gluing.name}', inclusive, a, b))
        if abs(gluing.length - report.systole) < 1e-9:
            sys_count = inclusive
        logger.debug(f"thin part of {gluing.name} (radius {radius:.4f}): {inclusive} crossings")
    thick = AuditPart('thick', total - thin_strict_total, max(first.length - thin_first, 0.0),
                      max(second.length - thin_second, 0.0))
    parts.insert(0, thick)
    total_ratio = total / (first.length * second.length)
    bound = thick.ratio + max((p.ratio for p in parts[1:]), default=0.0)
    holds = total_ratio <= bound + AUDIT_TOLERANCE
    if not holds:
        logger.warning(f"splitting inequality fails for {first.word} x {second.word}: {total_ratio} > {bound}")
    share = sys_count / total if total else 0.0
    return ThinThickAudit(pair=(first.word, second.word), total_ratio=total_ratio, parts=parts, bound=bound,
                          holds=holds, systole_share=share)
