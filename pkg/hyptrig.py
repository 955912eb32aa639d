"""
Hyperbolic trigonometry kernels: collar widths, thin-part radii, right-angled
polygon identities, arc length lower bounds and the interaction predictors.

All functions take and return plain floats and have no shared state.
"""
import math
import numbers
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from errors import DomainError

logger = logging.getLogger(__name__)

# Below this half-length sigma is evaluated through log(2/t)
SIGMA_ASYMPTOTIC_T = 1e-8
# Type-2 length bounds are certified for core lengths up to this value
SMALL_LENGTH_REGIME = 0.5
# Above this argument sinh/cosh overflow; use exponential asymptotics
_EXP_GUARD = 700.0


class ArcKind(Enum):
    TYPE1 = 'type1'
    TYPE2 = 'type2'
    CORE = 'core'


@dataclass(frozen=True)
class CollarGeometry:
    half_length: float
    collar_width: float
    thin_radius: float
    boundary_length: float
    half_area: float


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    worst: float
    detail: str = ''


def _require_finite(name, value):
    if not isinstance(value, numbers.Real) or isinstance(value, bool) or not math.isfinite(value):
        raise DomainError(f"{name} must be a finite number, got {value!r}", parameter=name, value=value)
    return float(value)


def _require_positive(name, value):
    value = _require_finite(name, value)
    if value <= 0:
        raise DomainError(f"{name} must be positive, got {value}", parameter=name, value=value)
    return value


def _require_nonnegative(name, value):
    value = _require_finite(name, value)
    if value < 0:
        raise DomainError(f"{name} must be non-negative, got {value}", parameter=name, value=value)
    return value


def _require_count(name, value, minimum=0):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}", parameter=name, value=value)
    return int(value)


def _acosh_checked(value, what, tolerance=1e-12):
    if value < 1.0:
        if value < 1.0 - tolerance:
            raise DomainError(f"{what}: cosh value {value} < 1, no such configuration", value=value)
        value = 1.0
    return math.acosh(value)


def sigma(t):
    """Collar half-width asinh(1/sinh t) for a geodesic of half-length t."""
    t = _require_positive('t', t)
    if t < SIGMA_ASYMPTOTIC_T:
        return math.log(2.0 / t)
    if t > _EXP_GUARD:
        return 2.0 * math.exp(-t)
    return math.asinh(1.0 / math.sinh(t))


def thin_radius(curve_length):
    curve_length = _require_positive('curve_length', curve_length)
    half = curve_length / 2.0
    if half > _EXP_GUARD / 2:
        return 4.0 * math.exp(-curve_length)
    return math.asinh(1.0 / (math.sinh(half) * math.sqrt(1.0 + math.cosh(half) ** 2)))


def collar_metrics(curve_length, r):
    """Boundary length and half area of the width-r annulus around a geodesic."""
    curve_length = _require_positive('curve_length', curve_length)
    r = _require_nonnegative('r', r)
    return curve_length * math.cosh(r), curve_length * math.sinh(r)


def collar_geometry(curve_length):
    curve_length = _require_positive('curve_length', curve_length)
    half = curve_length / 2.0
    width = sigma(half)
    boundary_length, half_area = collar_metrics(curve_length, width)
    return CollarGeometry(
        half_length=half,
        collar_width=width,
        thin_radius=thin_radius(curve_length),
        boundary_length=boundary_length,
        half_area=half_area,
    )


def collar_boundary_length(curve_length):
    """Length of the thin part boundary, l*cosh(r_k)."""
    curve_length = _require_positive('curve_length', curve_length)
    return curve_length * math.cosh(thin_radius(curve_length))


def thin_gap(curve_length):
    curve_length = _require_positive('curve_length', curve_length)
    return sigma(curve_length / 2.0) - thin_radius(curve_length)


def thin_gap_lower(curve_length):
    curve_length = _require_positive('curve_length', curve_length)
    return 1.0 / (2.0 * math.cosh(curve_length / 2.0))


def quad_two_right_angles(a, b, c):
    """Fourth side of a quadrilateral with two right angles on the base c."""
    a = _require_nonnegative('a', a)
    b = _require_nonnegative('b', b)
    c = _require_nonnegative('c', c)
    value = math.cosh(a) * math.cosh(b) * math.cosh(c) - math.sinh(a) * math.sinh(b)
    return _acosh_checked(value, 'quad_two_right_angles')


def quad_opposite_sides(sigma_w, d):
    sigma_w = _require_positive('sigma_w', sigma_w)
    d = _require_nonnegative('d', d)
    value = math.cosh(sigma_w) ** 2 * math.cosh(d) + math.sinh(sigma_w) ** 2
    return math.acosh(value)


def quad_same_side(sigma_w, d):
    sigma_w = _require_nonnegative('sigma_w', sigma_w)
    d = _require_nonnegative('d', d)
    return 2.0 * math.asinh(math.cosh(sigma_w) * math.sinh(d / 2.0))


def trirectangle_distance(a, b):
    """Distance from a type-2 chord's midpoint to the core."""
    a = _require_positive('a', a)
    b = _require_positive('b', b)
    sa, sb, cb = math.sinh(a), math.sinh(b), math.cosh(b)
    return math.asinh(sa / math.sqrt(sa * sa * sb * sb + cb * cb))


def pentagon_side(a, b):
    a = _require_positive('a', a)
    b = _require_positive('b', b)
    return _acosh_checked(math.sinh(a) * math.sinh(b), 'pentagon_side')


def hexagon_opposite(a, b, g):
    """Side opposite g in a right-angled hexagon with alternate sides a, b, g."""
    a = _require_positive('a', a)
    b = _require_positive('b', b)
    g = _require_positive('g', g)
    value = math.sinh(a) * math.sinh(b) * math.cosh(g) - math.cosh(a) * math.cosh(b)
    if value <= 1.0:
        raise DomainError(f"hexagon_opposite({a}, {b}, {g}): value {value:.6g} <= 1, no such hexagon",
                          value=value)
    return math.acosh(value)


def pants_seam(l1, l2, l3):
    """Distance between the cuffs of lengths l1 and l2."""
    l1 = _require_positive('l1', l1)
    l2 = _require_positive('l2', l2)
    l3 = _require_positive('l3', l3)
    h1, h2, h3 = l1 / 2.0, l2 / 2.0, l3 / 2.0
    value = (math.cosh(h1) * math.cosh(h2) + math.cosh(h3)) / (math.sinh(h1) * math.sinh(h2))
    return math.acosh(value)


def figure_eight_length(l1, l2, l3):
    """Length of the figure-eight around cuffs 1 and 2; zero lengths are cusps."""
    l1 = _require_nonnegative('l1', l1)
    l2 = _require_nonnegative('l2', l2)
    l3 = _require_nonnegative('l3', l3)
    return 2.0 * math.acosh(math.cosh(l3 / 2.0) + 2.0 * math.cosh(l1 / 2.0) * math.cosh(l2 / 2.0))


def figure_eight_floor(l1, l2, l3):
    """One self-crossing over the squared figure-eight length."""
    return 1.0 / figure_eight_length(l1, l2, l3) ** 2


def type1_length_lower(curve_length, w):
    curve_length = _require_positive('curve_length', curve_length)
    w = _require_count('w', w)
    width = sigma(curve_length / 2.0)
    return max(2.0 * width, 2.0 * width + (w + 1) * curve_length - 4.0)


def type2_length_lower(curve_length, w, strict=False):
    """
    Lower bound for a type-2 arc entering the thin part with winding w.
    Outside the small-length regime the value is not certified: a warning is
    logged, or DomainError raised when strict.
    """
    curve_length = _require_positive('curve_length', curve_length)
    w = _require_count('w', w, minimum=1)
    if curve_length > SMALL_LENGTH_REGIME:
        if strict:
            raise DomainError(f"type2_length_lower certified only for length <= {SMALL_LENGTH_REGIME}",
                              curve_length=curve_length)
        logger.warning(f"type2_length_lower({curve_length}, {w}) outside the small-length regime; not certified")
    width = sigma(curve_length / 2.0)
    return max((w + 1) * curve_length, 2.0 * math.sqrt((w + 1) * curve_length * width))


def in_small_length_regime(curve_length):
    return 0 < curve_length <= SMALL_LENGTH_REGIME


def annulus_intersection_bound(kind1, w1, kind2, w2):
    """Maximal number of crossings of two arcs in a collar, by arc type and winding."""
    kind1, kind2 = ArcKind(kind1), ArcKind(kind2)
    w1 = _require_count('w1', w1)
    w2 = _require_count('w2', w2)
    if kind1 is ArcKind.CORE and kind2 is ArcKind.CORE:
        return 0
    if kind1 is ArcKind.CORE or kind2 is ArcKind.CORE:
        other = kind2 if kind1 is ArcKind.CORE else kind1
        # core x type-2 is 0 once the type-2 arc is tightened off the core
        return 1 if other is ArcKind.TYPE1 else 0
    if kind1 is ArcKind.TYPE1 and kind2 is ArcKind.TYPE1:
        return w1 + w2 + 2
    if kind1 is ArcKind.TYPE2 and kind2 is ArcKind.TYPE2:
        return 2 * min(w1, w2) + 2
    if kind1 is ArcKind.TYPE2:
        return w1 + 1
    return w2 + 1


def _small_parameter(name, s):
    s = _require_positive(name, s)
    if s >= 1.0:
        raise DomainError(f"{name} must be < 1 so that log(1/{name}) > 0, got {s}", parameter=name, value=s)
    return s


def predicted_interaction(s):
    s = _small_parameter('s', s)
    return 1.0 / (2.0 * s * math.log(1.0 / s))


def predicted_interaction_cusped(s, r):
    s = _small_parameter('s', s)
    r = _small_parameter('r', r)
    return max(1.0 / (2.0 * s * math.log(1.0 / s)), 1.0 / (2.0 * r * math.log(1.0 / r) ** 2))


def intersection_certificate(sys_length):
    sys_length = _require_positive('sys', sys_length)
    return 4.0 / (sys_length * sys_length)


def capped_systole(sys_length):
    return min(_require_positive('sys', sys_length), 0.5)


def thin_ratio_bound(sys_length):
    sys_length = _require_positive('sys', sys_length)
    return 1.0 / (2.0 * sys_length * sigma(sys_length / 2.0))


def companion_window(sys_length, slack=10.0, intersections=2):
    """Length window in which a companion meeting the systole `intersections` times is searched."""
    s = capped_systole(sys_length)
    factor = {1: 2.0, 2: 4.0}.get(intersections)
    if factor is None:
        raise DomainError(f"intersections must be 1 or 2, got {intersections}", value=intersections)
    return factor * math.log(1.0 / s) + slack


def lower_bound_ratio(sys_length, slack=10.0):
    s = capped_systole(sys_length)
    log_term = math.log(1.0 / s)
    return log_term / (log_term + slack)


def algebra_ratio_holds(i1, i2, a1, a2, b1, b2, tolerance=1e-12):
    """(i1+i2)/((a1+a2)(b1+b2)) <= max(i1/(a1 b1), i2/(a2 b2))."""
    lhs = (i1 + i2) / ((a1 + a2) * (b1 + b2))
    rhs = max(i1 / (a1 * b1), i2 / (a2 * b2))
    return lhs <= rhs * (1.0 + tolerance)


def cusp_winding_self_bound(n):
    n = _require_count('n', n, minimum=2)
    return (n + 2) / (4.0 * math.log(n) ** 2)


def horocycle_gap(outer_norm=2.0, inner_norm=1.0):
    """Distance between two horocycles of a cusp with the given lengths."""
    outer_norm = _require_positive('outer_norm', outer_norm)
    inner_norm = _require_positive('inner_norm', inner_norm)
    return math.log(outer_norm / inner_norm)


# -- property suite ---------------------------------------------------------

def _check(name, violations, detail=''):
    worst = float(np.max(violations)) if np.size(violations) else 0.0
    return PropertyCheck(name=name, passed=bool(worst <= 0.0), worst=worst, detail=detail)


def _sigma_vec(t):
    t = np.asarray(t, dtype=float)
    small = t < SIGMA_ASYMPTOTIC_T
    safe = np.where(small, 1.0, t)
    return np.where(small, np.log(2.0 / np.where(small, t, 1.0)), np.arcsinh(1.0 / np.sinh(safe)))


def _thin_radius_vec(length):
    half = np.asarray(length, dtype=float) / 2.0
    return np.arcsinh(1.0 / (np.sinh(half) * np.sqrt(1.0 + np.cosh(half) ** 2)))


def selftest(samples=10_000, seed=0):
    """Evaluate every sampled property of the kernels; returns a list of PropertyCheck."""
    rng = np.random.default_rng(seed)
    checks = []

    t = np.sort(rng.uniform(0.0, 10.0, samples))
    t = t[t > 0]
    checks.append(_check('sigma >= log(1/t)', np.log(1.0 / t) - _sigma_vec(t) - 1e-12))

    t3 = np.sort(rng.uniform(0.0, 1.0 / 3.0, samples))
    t3 = t3[t3 > 0]
    checks.append(_check('sigma <= 2 log(1/t) for t <= 1/3', _sigma_vec(t3) - 2.0 * np.log(1.0 / t3)))

    sig = _sigma_vec(t)
    distinct = np.diff(t) > 0
    checks.append(_check('sigma strictly decreasing', np.diff(sig)[distinct]))

    th = np.sort(rng.uniform(0.0, 0.5, samples))
    th = th[th > 0]
    product = th * _sigma_vec(th)
    checks.append(_check('t sigma(t) < 1', product - 1.0 + 1e-15))
    checks.append(_check('t sigma(t) increasing on (0, 1/2]', -np.diff(product) - 1e-12))

    samples_t = [1e-3, 1e-6, 1e-9, 1e-12]
    ratios = [math.log(1.0 / p) / sigma(p / 2.0) for p in samples_t]
    approach = [abs(r - 1.0) for r in ratios]
    checks.append(_check('log(1/t)/sigma(t/2) -> 1', [approach[-1] - 0.05] + list(np.diff(approach)),
                         detail=', '.join(f"{p:g}:{r:.4f}" for p, r in zip(samples_t, ratios))))

    lengths = rng.uniform(0.0, 10.0, samples)
    lengths = lengths[lengths > 0]
    checks.append(_check('thin_radius < sigma(l/2)', _thin_radius_vec(lengths) - _sigma_vec(lengths / 2.0)))

    ell = rng.uniform(1e-3, 1.5, samples)
    w = rng.integers(0, 51, samples)
    width = _sigma_vec(ell / 2.0)
    chord = np.arccosh(np.cosh(width) ** 2 * np.cosh(w * ell) + np.sinh(width) ** 2)
    checks.append(_check('type-1 chord >= 2 sigma', 2.0 * width - chord - 1e-9))
    checks.append(_check('type-1 chord >= 2 sigma + (w+1) l - 4', 2.0 * width + (w + 1) * ell - 4.0 - chord - 1e-9))

    ell2 = rng.uniform(1e-3, SMALL_LENGTH_REGIME, samples)
    w2 = rng.integers(1, 201, samples)
    width2 = _sigma_vec(ell2 / 2.0)
    same_side = 2.0 * np.arcsinh(np.cosh(width2) * np.sinh(w2 * ell2 / 2.0))
    checks.append(_check('type-2 chord >= (w+1) l', (w2 + 1) * ell2 - same_side - 1e-9))

    tt = rng.uniform(1e-3, 1.0, samples)
    bb = tt * rng.uniform(1e-6, 1.0, samples)
    sa = np.sinh(_sigma_vec(tt))
    m = np.arcsinh(sa / np.sqrt(sa ** 2 * np.sinh(bb) ** 2 + np.cosh(bb) ** 2))
    checks.append(_check('chord midpoint stays outside the thin part', _thin_radius_vec(2.0 * tt) - m - 1e-12))

    x = rng.uniform(0.1, 20.0, samples)
    checks.append(_check('acosh(cosh x) round trip', np.abs(np.arccosh(np.cosh(x)) - x) / x - 1e-12))
    y = rng.uniform(-20.0, 20.0, samples)
    y = y[y != 0]
    checks.append(_check('asinh(sinh x) round trip', np.abs(np.arcsinh(np.sinh(y)) - y) / np.abs(y) - 1e-12))

    s = rng.uniform(1e-6, 0.5, samples)
    checks.append(_check('certificate >= predicted', 1.0 / (2.0 * s * np.log(1.0 / s)) - 4.0 / s ** 2))

    parts = rng.uniform(0.01, 10.0, (samples, 6))
    i1, i2, a1, a2, b1, b2 = parts.T
    lhs = (i1 + i2) / ((a1 + a2) * (b1 + b2))
    rhs = np.maximum(i1 / (a1 * b1), i2 / (a2 * b2))
    checks.append(_check('splitting inequality', lhs - rhs * (1.0 + 1e-12)))

    for check in checks:
        level = logging.DEBUG if check.passed else logging.WARNING
        logger.log(level, f"selftest {check.name}: passed={check.passed} worst={check.worst:.3e} {check.detail}")
    return checks
