"""
Orientation-preserving isometries of the upper half-plane as PSL(2, R) matrices.

Boundary points are floats with math.inf for the point at infinity. Interior
points are complex numbers with positive imaginary part. The stack_* helpers
operate on numpy arrays of shape (N, 2, 2) and are what the search modules use.
"""
import math
import logging
from dataclasses import dataclass

import numpy as np

from errors import DomainError, IndeterminateError, NotHyperbolicError

logger = logging.getLogger(__name__)

INF = math.inf
# Endpoints closer than this in circle coordinates make linking indeterminate
LINK_TOLERANCE = 1e-9
# Entries below this are treated as zero when fixing the sign
_SIGN_EPS = 1e-12


@dataclass(frozen=True)
class MoebiusTransform:
    """z -> (a z + b)/(c z + d), stored with a d - b c = 1 and first nonzero entry positive."""
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not math.isfinite(det) or det <= 0:
            raise DomainError(f"matrix must have positive determinant, got {det}", determinant=det)
        scale = 1.0 / math.sqrt(det)
        entries = [self.a * scale, self.b * scale, self.c * scale, self.d * scale]
        for value in entries:
            if abs(value) > _SIGN_EPS:
                if value < 0:
                    entries = [-x for x in entries]
                break
        for name, value in zip('abcd', entries):
            object.__setattr__(self, name, value + 0.0)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, array):
        return cls(float(array[0][0]), float(array[0][1]), float(array[1][0]), float(array[1][1]))

    def to_array(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self):
        return self.a + self.d

    def inverse(self):
        return MoebiusTransform(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other):
        return compose(self, other)

    def power(self, n):
        result = MoebiusTransform.identity()
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            result = compose(result, base)
        return result

    def apply(self, z):
        """Image of an interior point (complex) or boundary point (float, math.inf)."""
        if isinstance(z, complex):
            return (self.a * z + self.b) / (self.c * z + self.d)
        if math.isinf(z):
            return self.a / self.c if self.c != 0 else INF
        denominator = self.c * z + self.d
        if denominator == 0:
            return INF
        return (self.a * z + self.b) / denominator

    def is_hyperbolic(self, tolerance=0.0):
        return abs(self.trace) > 2.0 + tolerance

    def isclose(self, other, tolerance=1e-9):
        diff = max(abs(x - y) for x, y in zip(self.entries, other.entries))
        flipped = max(abs(x + y) for x, y in zip(self.entries, other.entries))
        return min(diff, flipped) <= tolerance

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class Axis:
    repelling: float
    attracting: float
    translation_length: float

    @property
    def endpoints(self):
        return (self.repelling, self.attracting)

    def reversed(self):
        return Axis(self.attracting, self.repelling, self.translation_length)

    def circle_key(self, digits=6):
        """Unordered endpoint pair in circle coordinates, rounded."""
        u, v = sorted((boundary_to_circle(self.repelling), boundary_to_circle(self.attracting)))
        return (round(u, digits), round(v, digits))


def compose(S, T):
    return MoebiusTransform(
        S.a * T.a + S.b * T.c,
        S.a * T.b + S.b * T.d,
        S.c * T.a + S.d * T.c,
        S.c * T.b + S.d * T.d,
    )


def conjugate(S, T):
    """S T S^-1"""
    return compose(compose(S, T), S.inverse())


def translation(t):
    """Hyperbolic translation by t along the imaginary axis."""
    return MoebiusTransform(math.exp(t / 2.0), 0.0, 0.0, math.exp(-t / 2.0))


def half_turn():
    return MoebiusTransform(0.0, -1.0, 1.0, 0.0)


def trace_to_length(tr):
    if not math.isfinite(tr) or abs(tr) <= 2.0:
        raise NotHyperbolicError(f"|trace| = {abs(tr)} <= 2, not hyperbolic", trace=tr)
    return 2.0 * math.acosh(abs(tr) / 2.0)


def translation_length(T):
    return trace_to_length(T.trace)


def _fixed_points(a, b, c, d, tr):
    """(repelling, attracting) fixed points of a hyperbolic matrix."""
    if abs(c) <= 1e-15 * max(abs(a), abs(d), 1.0):
        finite = b / (d - a) + 0.0
        return (finite, INF) if abs(a) > abs(d) else (INF, finite)
    root = math.sqrt(tr * tr - 4.0)
    B = d - a
    q = -(B + math.copysign(root, B)) / 2.0
    x1, x2 = q / c, -b / q
    if abs(c * x1 + d) > 1.0:
        return x2, x1
    return x1, x2


def axis_of(T):
    length = translation_length(T)
    repelling, attracting = _fixed_points(T.a, T.b, T.c, T.d, T.trace)
    return Axis(repelling, attracting, length)


def boundary_to_circle(x):
    """Map the extended real line to (-1, 1] with infinity at 1."""
    if math.isinf(x):
        return 1.0
    u = x / (1.0 + abs(x))
    return 1.0 if u <= -1.0 + 1e-15 else u


def _circle_gap(u, v):
    gap = abs(u - v)
    return min(gap, 2.0 - gap)


def axes_cross(x, y, tolerance=LINK_TOLERANCE):
    """True iff the endpoint pairs of x and y separate each other on the circle."""
    ux = sorted(boundary_to_circle(p) for p in x.endpoints)
    uy = [boundary_to_circle(p) for p in y.endpoints]
    for u in ux:
        for v in uy:
            if _circle_gap(u, v) < tolerance:
                raise IndeterminateError(
                    f"axes {x.endpoints} and {y.endpoints} have endpoints within {tolerance}",
                    first=list(x.endpoints), second=list(y.endpoints))
    inside = [ux[0] < v < ux[1] for v in uy]
    return inside[0] != inside[1]


def hyperbolic_distance(z, w):
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))


def displacement(T, p):
    return hyperbolic_distance(p, T.apply(p))


def normalizer(axis, foot=None):
    """
    Transform taking the axis to the imaginary axis, repelling end to 0,
    attracting end to infinity and `foot` (a point of the axis) to i.
    """
    r, a = axis.repelling, axis.attracting
    if math.isinf(a):
        N = MoebiusTransform(1.0, -r, 0.0, 1.0)
    elif math.isinf(r):
        N = MoebiusTransform(0.0, -1.0, 1.0, -a)
    elif r - a > 0:
        N = MoebiusTransform(1.0, -r, 1.0, -a)
    else:
        N = MoebiusTransform(1.0, -r, -1.0, a)
    if foot is not None:
        h = abs(N.apply(foot))
        N = compose(MoebiusTransform(1.0 / math.sqrt(h), 0.0, 0.0, math.sqrt(h)), N)
    return N


def axis_distance(axis, p):
    z = normalizer(axis).apply(p)
    return math.asinh(abs(z.real) / z.imag)


def foot_point(axis, p):
    N = normalizer(axis)
    z = N.apply(p)
    return N.inverse().apply(complex(0.0, abs(z)))


def common_perpendicular(x, y):
    """Feet on x and y of the common perpendicular of two disjoint axes, and its length."""
    N = normalizer(x)
    p, q = (N.apply(e) for e in y.endpoints)
    if math.isinf(p) or math.isinf(q) or p * q <= 0:
        raise DomainError("axes intersect or share an endpoint; no common perpendicular")
    height = math.sqrt(p * q)
    real = 2.0 * p * q / (p + q)
    on_y = complex(real, math.sqrt(max(p * q - real * real, 0.0)))
    on_x = complex(0.0, height)
    inverse = N.inverse()
    return inverse.apply(on_x), inverse.apply(on_y), hyperbolic_distance(on_x, on_y)


def crossing_point(x, y):
    """Intersection point of two crossing axes."""
    N = normalizer(x)
    p, q = (N.apply(e) for e in y.endpoints)
    if math.isinf(p) or math.isinf(q) or p * q >= 0:
        raise DomainError("axes do not cross")
    return N.inverse().apply(complex(0.0, math.sqrt(-p * q)))


def crossing_angle(x, y):
    """Angle in (0, pi) at the crossing of x and y, measured from x's direction."""
    N = normalizer(x)
    p, q = (N.apply(e) for e in y.endpoints)
    center, radius = (p + q) / 2.0, abs(q - p) / 2.0
    return math.acos(max(-1.0, min(1.0, center / radius)))


def random_transform(rng, scale=1.0):
    """Random element built from three Gaussian parameters."""
    t, u, v = rng.normal(0.0, scale, 3)
    rotation = MoebiusTransform(math.cos(v), math.sin(v), -math.sin(v), math.cos(v))
    shear = MoebiusTransform(1.0, u, 0.0, 1.0)
    return compose(compose(rotation, translation(t)), shear)


# -- numpy stacks ------------------------------------------------------------

def stack(transforms):
    if not transforms:
        return np.zeros((0, 2, 2))
    return np.array([T.to_array() for T in transforms])


def stack_renormalize(mats):
    det = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    return mats / np.sqrt(det)[:, None, None]


def stack_canonical_sign(mats):
    flat = mats.reshape(len(mats), 4)
    significant = np.abs(flat) > 1e-9
    first = np.argmax(significant, axis=1)
    signs = np.sign(flat[np.arange(len(flat)), first])
    signs[signs == 0] = 1.0
    return mats * signs[:, None, None]


def stack_apply(mats, z):
    """Images of one interior point under every matrix of the stack."""
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    return (a * z + b) / (c * z + d)


def stack_apply_points(mats, points):
    """Images of interior points pointwise: points[k] under mats[k]."""
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    return (a * points + b) / (c * points + d)


def stack_apply_boundary(mats, x):
    """Images of boundary points; x is a scalar or an array matching the stack."""
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    x = np.broadcast_to(np.asarray(x, dtype=float), a.shape)
    with np.errstate(divide='ignore', invalid='ignore'):
        finite = (a * x + b) / (c * x + d)
        at_infinity = np.where(c != 0, a / np.where(c != 0, c, 1.0), np.inf)
        result = np.where(np.isinf(x), at_infinity, finite)
        result = np.where(~np.isinf(x) & (c * x + d == 0), np.inf, result)
    return result


def stack_distance(z, w):
    """Pointwise hyperbolic distance between complex arrays."""
    return 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(z.imag * w.imag)))


def stack_displacement(mats, p):
    images = stack_apply(mats, p)
    return stack_distance(np.full(images.shape, p), images)


def stack_traces(mats):
    return mats[:, 0, 0] + mats[:, 1, 1]


def stack_lengths(mats):
    """Translation lengths; non-hyperbolic entries get nan."""
    tr = np.abs(stack_traces(mats))
    with np.errstate(invalid='ignore'):
        return np.where(tr > 2.0, 2.0 * np.arccosh(np.maximum(tr, 2.0) / 2.0), np.nan)


def stack_axes(mats):
    """(repelling, attracting) endpoint arrays for hyperbolic matrices."""
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    tr = a + d
    root = np.sqrt(np.maximum(tr * tr - 4.0, 0.0))
    B = d - a
    sign = np.where(B >= 0, 1.0, -1.0)
    q = -(B + sign * root) / 2.0
    tiny = np.abs(c) <= 1e-15 * np.maximum(np.maximum(np.abs(a), np.abs(d)), 1.0)
    with np.errstate(divide='ignore', invalid='ignore'):
        x1 = np.where(tiny, np.inf, q / np.where(tiny, 1.0, c))
        x2 = np.where(tiny, b / np.where(d - a == 0, 1.0, d - a), -b / np.where(q == 0, 1.0, q))
        first_attracts = np.where(tiny, np.abs(a) > np.abs(d), np.abs(c * x1 + d) > 1.0)
    repelling = np.where(first_attracts, x2, x1)
    attracting = np.where(first_attracts, x1, x2)
    return repelling, attracting


def stack_circle(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid='ignore'):
        u = np.where(np.isinf(x), 1.0, x / (1.0 + np.abs(x)))
    return np.where(u <= -1.0 + 1e-15, 1.0, u)


def complex_point(z):
    z = complex(z)
    if z.imag <= 0:
        raise DomainError(f"point {z} is not in the upper half-plane")
    return z

