"""Space curves in R^3: evaluation, derivatives, arc length, Frenet apparatus.

Curves are immutable after construction and every operation is a pure
function of its inputs, so concurrent evaluation is safe.
"""

from dataclasses import dataclass

import numpy as np

from . import jets as jt
from .errors import (
    InsufficientMargin,
    ParameterOutOfDomain,
    SingularSpeed,
    VanishingCurvature,
)

KAPPA_FLOOR = 1e-9

# uniform-grid derivative weights for node tangents, order 4
_EDGE_D1 = {
    0: (-25 / 12, 4.0, -3.0, 4 / 3, -1 / 4),
    1: (-1 / 4, -5 / 6, 3 / 2, -1 / 2, 1 / 12),
}


@dataclass(frozen=True)
class DerivativeSettings:
    """Step and central-difference order used when no analytic jets exist."""

    h: float
    scheme: int = 4

    def __post_init__(self):
        if not (self.h > 0.0):
            raise ValueError("finite-difference step h must be positive")
        if self.scheme not in (2, 4):
            raise ValueError("scheme must be 2 or 4")


@dataclass(frozen=True)
class FrenetFrame:
    """Frenet data at one parameter (or a batch of parameters).

    tangent/normal/binormal have shape (..., 3); kappa and tau shape (...).
    Frames are only produced where kappa exceeds the curvature floor.
    """

    tangent: np.ndarray
    normal: np.ndarray
    binormal: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


class SpaceCurve:
    """An evaluable curve in R^3 over a closed parameter interval.

    kind is "closed-form" (backed by a callable) or "sampled" (backed by
    nodes with cubic Hermite interpolation); derivative_mode is "analytic"
    when third-order jets are available and "finite-difference" otherwise.
    """

    def __init__(self, evaluator, domain, *, jet=None, kind="closed-form",
                 settings=None, nodes=None):
        s_min, s_max = float(domain[0]), float(domain[1])
        if not (np.isfinite(s_min) and np.isfinite(s_max) and s_min < s_max):
            raise ValueError(f"degenerate domain [{s_min}, {s_max}]")
        if kind not in ("closed-form", "sampled"):
            raise ValueError(f"unknown curve kind {kind!r}")
        length = s_max - s_min
        if settings is None:
            if nodes is not None:
                # stencil step = node spacing so stencils land on exact data;
                # capped for coarse polylines to keep h small vs the domain
                h = min(float(np.mean(np.diff(nodes[0]))), length / 100.0)
            else:
                h = 1e-4 * length
            settings = DerivativeSettings(h=h, scheme=4)
        if settings.h > length / 100.0:
            raise ValueError("step h must be at most 1/100 of the domain length")
        self._evaluator = evaluator
        self._jet = jet
        self._domain = (s_min, s_max)
        self._kind = kind
        self._settings = settings
        self._nodes = None
        if nodes is not None:
            self._nodes = (_readonly(nodes[0]), _readonly(nodes[1]))

    # ------------------------------------------------------------------
    @property
    def domain(self):
        return self._domain

    @property
    def length(self):
        return self._domain[1] - self._domain[0]

    @property
    def kind(self):
        return self._kind

    @property
    def derivative_mode(self):
        return "analytic" if self._jet is not None else "finite-difference"

    @property
    def settings(self):
        return self._settings

    @property
    def nodes(self):
        """(parameters, points) for sampled curves, else None."""
        return self._nodes

    # ------------------------------------------------------------------
    def _check_domain(self, s):
        s0, s1 = self._domain
        slack = 1e-9 * self.length
        bad = (s < s0 - slack) | (s > s1 + slack)
        if np.any(bad):
            worst = float(np.asarray(s)[bad].flat[0]) if np.ndim(s) else float(s)
            raise ParameterOutOfDomain(
                f"parameter {worst!r} outside domain [{s0}, {s1}]"
            )

    def fd_margin(self, order=3):
        """Domain shrink needed by the finite-difference stencil."""
        if self._jet is not None:
            return 0.0
        reach = jt.stencil_reach(self._settings.scheme, order)
        return reach * self._settings.h * (1.0 + 1e-9)

    def evaluate(self, s):
        """Point alpha(s); accepts a scalar or an array of parameters."""
        arr = np.asarray(s, dtype=float)
        self._check_domain(arr)
        out = np.asarray(self._evaluator(np.atleast_1d(arr)), dtype=float)
        if arr.ndim == 0:
            return out[0]
        return out

    def derivative(self, s, order=1):
        """order-th derivative of alpha at s (order 1, 2 or 3)."""
        if order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        arr = np.asarray(s, dtype=float)
        self._check_domain(arr)
        if self._jet is not None:
            out = np.asarray(self._jet(np.atleast_1d(arr)))[order]
        else:
            margin = self.fd_margin(order) * (1.0 - 2e-9)
            s0, s1 = self._domain
            if np.any(arr < s0 + margin) or np.any(arr > s1 - margin):
                raise InsufficientMargin(
                    f"order-{order} stencil needs {margin:.3g} of margin inside "
                    f"[{s0}, {s1}]"
                )
            out = jt.fd_derivative(
                lambda q: self._evaluator(q),
                np.atleast_1d(arr),
                order,
                self._settings.h,
                self._settings.scheme,
            )
        if arr.ndim == 0:
            return out[0]
        return out

    def jet(self, s):
        """Value plus first three derivatives, shape (4, n, 3)."""
        arr = np.atleast_1d(np.asarray(s, dtype=float))
        self._check_domain(arr)
        if self._jet is not None:
            return np.asarray(self._jet(arr), dtype=float)
        return np.stack(
            [self.evaluate(arr)] + [self.derivative(arr, k) for k in (1, 2, 3)]
        )

    # ------------------------------------------------------------------
    @staticmethod
    def from_function(fn, domain, jet=None, settings=None):
        return SpaceCurve(fn, domain, jet=jet, kind="closed-form", settings=settings)

    @staticmethod
    def from_samples(s, points, settings=None):
        """Sampled curve with cubic Hermite interpolation between nodes."""
        s = np.asarray(s, dtype=float)
        points = np.asarray(points, dtype=float)
        if s.ndim != 1 or points.shape != (s.size, 3):
            raise ValueError("need parameters (n,) and points (n, 3)")
        if s.size < 2:
            raise ValueError("need at least two samples")
        if np.any(np.diff(s) <= 0.0):
            raise ValueError("sample parameters must be strictly increasing")
        interp = _HermiteInterpolant(s, points)
        return SpaceCurve(
            interp,
            (s[0], s[-1]),
            kind="sampled",
            settings=settings,
            nodes=(s, points),
        )


class _HermiteInterpolant:
    """Piecewise cubic Hermite through nodes, tangents from node differences."""

    def __init__(self, s, values):
        self.s = np.asarray(s, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.tangents = _node_tangents(self.s, self.values)

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        s = self.s
        idx = np.clip(np.searchsorted(s, q, side="right") - 1, 0, s.size - 2)
        h = s[idx + 1] - s[idx]
        th = (q - s[idx]) / h
        t2 = th * th
        t3 = t2 * th
        h00 = 2 * t3 - 3 * t2 + 1
        h10 = t3 - 2 * t2 + th
        h01 = -2 * t3 + 3 * t2
        h11 = t3 - t2
        p0 = self.values[idx]
        p1 = self.values[idx + 1]
        m0 = self.tangents[idx]
        m1 = self.tangents[idx + 1]
        return (
            h00[..., None] * p0
            + (h10 * h)[..., None] * m0
            + h01[..., None] * p1
            + (h11 * h)[..., None] * m1
        )


def _node_tangents(s, values):
    n = s.size
    d = np.diff(s)
    uniform = n >= 5 and np.max(np.abs(d - d.mean())) < 1e-8 * d.mean()
    m = np.empty_like(values)
    if uniform:
        h = d.mean()
        v = values
        m[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
        for i in (0, 1):
            c = _EDGE_D1[i]
            m[i] = sum(ck * v[k] for k, ck in enumerate(c)) / h
            m[n - 1 - i] = -sum(ck * v[n - 1 - k] for k, ck in enumerate(c)) / h
    else:
        # non-uniform fallback, second order
        m[0] = (values[1] - values[0]) / d[0]
        m[-1] = (values[-1] - values[-2]) / d[-1]
        if n > 2:
            w = d[:-1] + d[1:]
            m[1:-1] = (
                (values[2:] - values[1:-1]) / d[1:, None] * (d[:-1] / w)[:, None]
                + (values[1:-1] - values[:-2]) / d[:-1, None] * (d[1:] / w)[:, None]
            )
    return m


# ----------------------------------------------------------------------
# canonical closed-form curves


def circle_curve(radius=1.0, center=(0.0, 0.0, 0.0), turns=1.0):
    """Unit-speed circle of given radius in a plane parallel to xy."""
    r = float(radius)
    if r <= 0.0:
        raise ValueError("radius must be positive")
    c = np.asarray(center, dtype=float)

    def fn(s):
        th = s / r
        return c + np.stack([r * np.cos(th), r * np.sin(th), np.zeros_like(th)], axis=-1)

    def jet(s):
        th = s / r
        cos, sin = np.cos(th), np.sin(th)
        zero = np.zeros_like(th)
        p = c + np.stack([r * cos, r * sin, zero], axis=-1)
        d1 = np.stack([-sin, cos, zero], axis=-1)
        d2 = np.stack([-cos / r, -sin / r, zero], axis=-1)
        d3 = np.stack([sin / r**2, -cos / r**2, zero], axis=-1)
        return np.stack([p, d1, d2, d3])

    return SpaceCurve.from_function(fn, (0.0, 2 * np.pi * r * turns), jet=jet)


def helix_curve(radius, pitch, center=(0.0, 0.0, 0.0), turns=2.0):
    """Unit-speed circular helix; curvature R/(R^2+P^2), torsion P/(R^2+P^2)."""
    R, P = float(radius), float(pitch)
    if R <= 0.0:
        raise ValueError("radius must be positive")
    c = float(np.hypot(R, P))
    cen = np.asarray(center, dtype=float)

    def jet(s):
        th = s / c
        cos, sin = np.cos(th), np.sin(th)
        p = cen + np.stack([R * cos, R * sin, P * th], axis=-1)
        d1 = np.stack([-R * sin / c, R * cos / c, np.full_like(th, P / c)], axis=-1)
        d2 = np.stack([-R * cos / c**2, -R * sin / c**2, np.zeros_like(th)], axis=-1)
        d3 = np.stack([R * sin / c**3, -R * cos / c**3, np.zeros_like(th)], axis=-1)
        return np.stack([p, d1, d2, d3])

    return SpaceCurve.from_function(lambda s: jet(s)[0], (0.0, 2 * np.pi * c * turns), jet=jet)


def line_curve(point, direction, length=1.0):
    """Unit-speed straight segment from point along direction."""
    p = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    nrm = np.linalg.norm(d)
    if nrm == 0.0:
        raise ValueError("direction must be nonzero")
    d = d / nrm

    def jet(s):
        pos = p + s[..., None] * d
        d1 = np.broadcast_to(d, pos.shape).copy()
        zero = np.zeros_like(pos)
        return np.stack([pos, d1, zero, np.zeros_like(pos)])

    return SpaceCurve.from_function(lambda s: jet(s)[0], (0.0, float(length)), jet=jet)


# ----------------------------------------------------------------------
# operations


def sample_grid(curve, n=256, max_order=3):
    """Uniform parameter grid avoiding finite-difference margins.

    Sampled curves are sampled on their own (interior) nodes so stencil
    points land on exact data.
    """
    s0, s1 = curve.domain
    m = curve.fd_margin(max_order)
    if curve.kind == "sampled" and curve.nodes is not None:
        s_nodes = curve.nodes[0]
        reach = int(np.ceil(m / curve.settings.h - 1e-9)) if m > 0 else 0
        inner = s_nodes[reach: s_nodes.size - reach] if reach else s_nodes
        if inner.size < 2:
            raise InsufficientMargin("sampled curve too short for derivative stencils")
        stride = max(1, inner.size // n)
        return inner[::stride]
    return np.linspace(s0 + m, s1 - m, n)


def frenet_apparatus(curve, s, kappa_floor=KAPPA_FLOOR):
    """Frenet frame(s) at s.

    kappa = |alpha''| and tau = <alpha' x alpha'', alpha'''> / kappa^2
    for unit-speed curves; raises VanishingCurvature below the floor.
    """
    d1 = curve.derivative(s, 1)
    d2 = curve.derivative(s, 2)
    d3 = curve.derivative(s, 3)
    speed = np.linalg.norm(d1, axis=-1)
    if np.any(speed < 1e-12):
        raise SingularSpeed("zero tangent; cannot build a frame")
    tangent = d1 / speed[..., None]
    kappa = np.linalg.norm(d2, axis=-1)
    if np.any(kappa <= kappa_floor):
        raise VanishingCurvature(
            f"curvature {float(np.min(kappa)):.3g} at or below floor {kappa_floor:.3g}"
        )
    normal = d2 / kappa[..., None]
    binormal = np.cross(tangent, normal)
    binormal = binormal / np.linalg.norm(binormal, axis=-1)[..., None]
    tau = np.sum(np.cross(d1, d2) * d3, axis=-1) / kappa**2
    return FrenetFrame(
        tangent=_readonly(tangent),
        normal=_readonly(normal),
        binormal=_readonly(binormal),
        kappa=_readonly(kappa),
        tau=_readonly(tau),
    )


def cross_magnitude(curve, s):
    """|alpha(s) x alpha'(s)|."""
    p = curve.evaluate(s)
    d1 = curve.derivative(s, 1)
    return np.linalg.norm(np.cross(p, d1), axis=-1)


def _adaptive_simpson_segments(f, nodes, tol):
    """Per-interval integrals of f over consecutive nodes, adaptive Simpson.

    Each interval is refined by panel doubling until the Simpson update is
    below its share of tol, then Richardson-extrapolated.
    """
    a = nodes[:-1]
    b = nodes[1:]
    width = b - a
    tol_i = tol * width / (nodes[-1] - nodes[0])

    def composite(aa, bb, panels):
        x = aa[:, None] + (bb - aa)[:, None] * np.linspace(0.0, 1.0, 2 * panels + 1)
        y = f(x.ravel()).reshape(x.shape)
        h = (bb - aa) / (2 * panels)
        odd = y[:, 1::2].sum(axis=1)
        even = y[:, 2:-1:2].sum(axis=1)
        return h / 3.0 * (y[:, 0] + y[:, -1] + 4 * odd + 2 * even)

    prev = composite(a, b, 1)
    out = np.empty_like(prev)
    active = np.ones(a.size, dtype=bool)
    panels = 2
    for _ in range(14):
        cur = composite(a[active], b[active], panels)
        err = np.abs(cur - prev[active])
        done = err <= 15.0 * np.maximum(tol_i[active], 1e-300)
        idx = np.flatnonzero(active)
        out[idx[done]] = cur[done] + (cur[done] - prev[active][done]) / 15.0
        prev[idx] = cur
        active[idx[done]] = False
        if not active.any():
            break
        panels *= 2
    else:
        out[active] = prev[active]
    return out


class _InverseArclength:
    """Monotone cubic Hermite lookup tau(s) with slopes 1/speed."""

    def __init__(self, s_table, tau_table, inv_speed):
        self.s = s_table
        self.tau = tau_table
        self.slope = inv_speed

    def __call__(self, q):
        q = np.clip(np.asarray(q, dtype=float), self.s[0], self.s[-1])
        idx = np.clip(np.searchsorted(self.s, q, side="right") - 1, 0, self.s.size - 2)
        h = self.s[idx + 1] - self.s[idx]
        th = (q - self.s[idx]) / h
        t2, t3 = th * th, th * th * th
        return (
            (2 * t3 - 3 * t2 + 1) * self.tau[idx]
            + (t3 - 2 * t2 + th) * h * self.slope[idx]
            + (-2 * t3 + 3 * t2) * self.tau[idx + 1]
            + (t3 - t2) * h * self.slope[idx + 1]
        )


def reparametrize_arclength(curve, tol=1e-10, table_size=4097):
    """Arc-length reparametrization of a regular curve.

    The cumulative length comes from adaptive Simpson quadrature of the
    speed; the inverse map is a monotone Hermite table.  Analytic input
    jets are chain-ruled so the result keeps analytic derivative quality.
    Already unit-speed curves are returned unchanged.
    """
    s0, s1 = curve.domain

    def speed(q):
        return np.linalg.norm(curve.derivative(q, 1), axis=-1)

    m = curve.fd_margin(1)
    scan = np.linspace(s0 + m, s1 - m, 2049)
    v = speed(scan)
    vmax = float(np.max(v))
    if float(np.min(v)) < 1e-12 * max(1.0, vmax):
        raise SingularSpeed(
            f"speed {float(np.min(v)):.3g} below regularity threshold"
        )
    # already unit speed up to the derivative noise of the mode: keep the
    # curve (and, for sampled curves, its node grid and parameter labels)
    unit_tol = 1e-12 if curve.derivative_mode == "analytic" else 1e-5
    if float(np.max(np.abs(v - 1.0))) < unit_tol:
        return curve

    tau_nodes = np.linspace(s0 + m, s1 - m, table_size)
    seg = _adaptive_simpson_segments(speed, tau_nodes, tol)
    # anchor arc length at the original start parameter so affine fits in s
    # remain comparable before and after reparametrization
    s_table = s0 + np.concatenate([[0.0], np.cumsum(seg)])
    total = float(s_table[-1] - s_table[0])
    inverse = _InverseArclength(s_table, tau_nodes, 1.0 / speed(tau_nodes))

    def evaluator(q):
        return curve.evaluate(inverse(q))

    jet = None
    if curve.derivative_mode == "analytic":
        base_jet = curve.jet

        def jet(q):
            return jt.jet_reparametrize(base_jet(inverse(q)))

    if curve.kind == "sampled":
        h_new = curve.settings.h * total / (s1 - s0)
        settings = DerivativeSettings(h=h_new, scheme=curve.settings.scheme)
    else:
        settings = None
    return SpaceCurve(evaluator, (s0, s0 + total), jet=jet, settings=settings)


# ----------------------------------------------------------------------
# CSV interchange: header `s,x,y,z`, shortest round-trip decimals


def write_curve_csv(path, s, points):
    s = np.asarray(s, dtype=float)
    points = np.asarray(points, dtype=float)
    lines = ["s,x,y,z"]
    for si, (x, y, z) in zip(s, points):
        lines.append(f"{float(si)!r},{float(x)!r},{float(y)!r},{float(z)!r}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_curve_csv(path):
    with open(path, "r", encoding="ascii") as fh:
        rows = [line.strip() for line in fh if line.strip()]
    if not rows or rows[0] != "s,x,y,z":
        raise ValueError(f"{path}: expected header 's,x,y,z'")
    data = np.array([[float(v) for v in row.split(",")] for row in rows[1:]])
    if data.ndim != 2 or data.shape[1] != 4:
        raise ValueError(f"{path}: expected four columns per row")
    s = data[:, 0]
    if np.any(np.diff(s) <= 0.0):
        raise ValueError(f"{path}: parameter column must be strictly increasing")
    return s, data[:, 1:]
