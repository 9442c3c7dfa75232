"""Derivative jets and finite-difference stencils.

A "jet" packs a function value together with its first three derivatives:
scalar jets have shape (4,) + batch, vector jets (4,) + batch + (3,).
The algebra below (product, composition, normalization, arc-length
reparametrization) is exact given exact input jets, so curves built from
closed-form pieces keep analytic-quality derivatives.
"""

import numpy as np

from .errors import InsufficientMargin

# central stencils per scheme order: {derivative order: (offsets, coefficients)}
_CENTRAL = {
    2: {
        1: ((-1, 0, 1), (-0.5, 0.0, 0.5)),
        2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
        3: ((-2, -1, 0, 1, 2), (-0.5, 1.0, 0.0, -1.0, 0.5)),
    },
    4: {
        1: ((-2, -1, 0, 1, 2), (1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12)),
        2: ((-2, -1, 0, 1, 2), (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12)),
        3: ((-3, -2, -1, 0, 1, 2, 3), (1 / 8, -1.0, 13 / 8, 0.0, -13 / 8, 1.0, -1 / 8)),
    },
}


def stencil(scheme, order):
    if scheme not in _CENTRAL:
        raise ValueError(f"unsupported scheme {scheme!r}; choose 2 or 4")
    if order not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1, 2 or 3, got {order!r}")
    offsets, coeffs = _CENTRAL[scheme][order]
    return np.asarray(offsets, dtype=float), np.asarray(coeffs, dtype=float)


def stencil_reach(scheme, order):
    """Largest stencil offset, in units of the step h."""
    offsets, _ = _CENTRAL[scheme][order]
    return max(abs(k) for k in offsets)


def fd_derivative(evaluate, s, order, h, scheme=4):
    """Central finite difference of a vectorized evaluator at parameters s."""
    offsets, coeffs = stencil(scheme, order)
    s = np.asarray(s, dtype=float)
    acc = None
    for k, c in zip(offsets, coeffs):
        if c == 0.0:
            continue
        term = c * np.asarray(evaluate(s + k * h), dtype=float)
        acc = term if acc is None else acc + term
    return acc / h**order


def series_derivative(values, dx, order=1, scheme=4):
    """Differentiate a uniformly spaced series.

    Returns (derivative, reach): the derivative is only available on the
    interior values[reach:len-reach]; callers trim their abscissae to match.
    """
    values = np.asarray(values, dtype=float)
    offsets, coeffs = stencil(scheme, order)
    reach = int(max(abs(k) for k in offsets))
    n = values.shape[0]
    if n < 2 * reach + 1:
        raise InsufficientMargin(
            f"series of length {n} too short for order-{order} stencil (needs {2 * reach + 1})"
        )
    core = n - 2 * reach
    acc = np.zeros((core,) + values.shape[1:])
    for k, c in zip(offsets.astype(int), coeffs):
        if c == 0.0:
            continue
        acc += c * values[reach + k : reach + k + core]
    return acc / dx**order, reach


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def jet_product(scalar_jet, vector_jet):
    """Jets of u(s) * y(s) from scalar jets of u and vector jets of y."""
    u0, u1, u2, u3 = scalar_jet
    y0, y1, y2, y3 = vector_jet
    u0 = u0[..., None]
    u1 = u1[..., None]
    u2 = u2[..., None]
    u3 = u3[..., None]
    return np.stack(
        [
            u0 * y0,
            u1 * y0 + u0 * y1,
            u2 * y0 + 2.0 * u1 * y1 + u0 * y2,
            u3 * y0 + 3.0 * u2 * y1 + 3.0 * u1 * y2 + u0 * y3,
        ]
    )


def jet_compose(vector_jet_at_t, t_jet):
    """Jets of s -> y(t(s)), given jets of y in t (evaluated at t(s)) and of t in s."""
    y0, y1, y2, y3 = vector_jet_at_t
    _, t1, t2, t3 = t_jet
    t1 = t1[..., None]
    t2 = t2[..., None]
    t3 = t3[..., None]
    return np.stack(
        [
            y0,
            t1 * y1,
            t2 * y1 + t1**2 * y2,
            t3 * y1 + 3.0 * t1 * t2 * y2 + t1**3 * y3,
        ]
    )


def jet_normalize(vector_jet):
    """Jets of y/|y| from jets of y (y nowhere zero)."""
    g0, g1, g2, g3 = vector_jet
    r0 = np.sqrt(_dot(g0, g0))
    r1 = _dot(g0, g1) / r0
    r2 = (_dot(g1, g1) + _dot(g0, g2) - r1**2) / r0
    r3 = (3.0 * _dot(g1, g2) + _dot(g0, g3) - 3.0 * r1 * r2) / r0
    # jets of 1/r
    h0 = 1.0 / r0
    h1 = -r1 / r0**2
    h2 = -r2 / r0**2 + 2.0 * r1**2 / r0**3
    h3 = -r3 / r0**2 + 6.0 * r1 * r2 / r0**3 - 6.0 * r1**3 / r0**4
    return jet_product(np.stack([h0, h1, h2, h3]), vector_jet)


def arclength_rate_jets(vector_jet_at_tau):
    """Jets of the inverse arc-length map sigma(s), up to third order.

    Input: jets of the original curve in its own parameter tau, evaluated at
    tau = sigma(s).  The zeroth slot of the result is left as zero; only the
    derivative slots are meaningful.
    """
    _, d1, d2, d3 = vector_jet_at_tau
    v = np.sqrt(_dot(d1, d1))
    a = _dot(d1, d2)
    b = _dot(d2, d2) + _dot(d1, d3)
    s1 = 1.0 / v
    s2 = -a / v**4
    s3 = -b / v**5 + 4.0 * a**2 / v**7
    return np.stack([np.zeros_like(v), s1, s2, s3])


def jet_reparametrize(vector_jet_at_tau):
    """Jets with respect to arc length of a curve whose tau-jets are given."""
    return jet_compose(vector_jet_at_tau, arclength_rate_jets(vector_jet_at_tau))
