"""Shared curve factories for the test suite."""

import numpy as np

from conegeo import (
    RectifyingParams,
    SpaceCurve,
    circular_base,
    generate_rectifying,
    perturbed_circle_base,
    reparametrize_arclength,
    spherical_curve,
)


def trig_jet_curve(coeff_a, coeff_b, domain):
    """Closed-form trigonometric curve sum_k (A_k cos k t + B_k sin k t)."""
    A = np.asarray(coeff_a, dtype=float)
    B = np.asarray(coeff_b, dtype=float)
    ks = np.arange(1, A.shape[0] + 1)

    def jet(t):
        t = np.atleast_1d(t)
        cos = np.cos(np.outer(t, ks))
        sin = np.sin(np.outer(t, ks))
        g0 = cos @ A + sin @ B
        g1 = (-sin * ks) @ A + (cos * ks) @ B
        g2 = (-cos * ks**2) @ A + (-sin * ks**2) @ B
        g3 = (sin * ks**3) @ A + (-cos * ks**3) @ B
        return np.stack([g0, g1, g2, g3])

    return SpaceCurve.from_function(lambda t: jet(t)[0], domain, jet=jet)


def random_trig_curve(rng, modes=3, scale=1.0, domain=(0.0, 2 * np.pi)):
    A = rng.normal(size=(modes, 3)) * scale / np.arange(1, modes + 1)[:, None] ** 2
    B = rng.normal(size=(modes, 3)) * scale / np.arange(1, modes + 1)[:, None] ** 2
    A[0] += np.array([1.0, 0.3, 0.0])
    B[0] += np.array([-0.2, 1.0, 0.4])
    return trig_jet_curve(A, B, domain)


def random_unit_speed_curve(rng, **kw):
    return reparametrize_arclength(random_trig_curve(rng, **kw))


def random_rectifying(rng, circular=True):
    """Random closed-form geodesic; returns (curve, params, base, psi0)."""
    a = rng.uniform(0.5, 4.0)
    b = rng.uniform(-2.0, 2.0)
    c = rng.uniform(-0.5, 0.5)
    psi0 = rng.uniform(0.35, 1.2)
    params = RectifyingParams(a, b, c)
    if circular:
        base = circular_base(psi0)
    else:
        base = perturbed_circle_base(psi0, seed=int(rng.integers(1 << 31)),
                                     amplitude=0.03)
    return generate_rectifying(params, base), params, base, psi0


def random_spherical(rng, radius=None):
    r = radius if radius is not None else rng.uniform(0.5, 4.0)
    base = perturbed_circle_base(rng.uniform(0.4, 1.2),
                                 seed=int(rng.integers(1 << 31)), amplitude=0.05)
    return spherical_curve(base, r), r


def twisted_cubic_unit_speed():
    def jet(t):
        one = np.ones_like(t)
        zero = np.zeros_like(t)
        p = np.stack([t, t**2, t**3], axis=-1)
        d1 = np.stack([one, 2 * t, 3 * t**2], axis=-1)
        d2 = np.stack([zero, 2 * one, 6 * t], axis=-1)
        d3 = np.stack([zero, zero, 6 * one], axis=-1)
        return np.stack([p, d1, d2, d3])

    raw = SpaceCurve.from_function(lambda t: jet(t)[0], (-1.0, 1.0), jet=jet)
    return reparametrize_arclength(raw)
