"""Principal-value quadrature on graded Gauss-Legendre panels.

``pv_integrate`` computes PV int_lo^hi f(x) / (x - pole) dx.  The pole
neighbourhood [pole - delta, pole + delta] is folded onto [0, delta] where the
integrand (f(pole + u) - f(pole - u)) / u is smooth; everything else is
covered by panels whose width grows with the distance to the pole and is
capped (for oscillatory integrands, at half an oscillation period).

``regulated_pv`` handles integrals over (lo, inf) that only exist as the
limit eps -> 0+ of a convergence factor exp(-eps x): it evaluates the damped
integral at eps, eps/2, eps/4 and Richardson-extrapolates to eps = 0.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import NumericalError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(24)
_WIN_NODES, _WIN_WEIGHTS = np.polynomial.legendre.leggauss(40)

Integrand = Callable[[np.ndarray], np.ndarray]


def _panel_sum(f: Integrand, edges: np.ndarray, nodes=_NODES, weights=_WEIGHTS) -> float:
    if edges.size < 2:
        return 0.0
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = mid[:, None] + half[:, None] * nodes[None, :]
    return float(np.sum(f(x) * (half[:, None] * weights[None, :])))


def graded_edges(lo: float, hi: float, pole: float, cap: float = np.inf) -> np.ndarray:
    """Panel edges on [lo, hi]; widths equal the distance to ``pole``, capped.

    ``pole`` must lie outside the open interval (lo, hi).
    """
    if hi <= lo:
        return np.array([lo])
    if lo < pole < hi:
        raise ValueError("pole inside interval")
    mirrored = pole >= hi
    if mirrored:
        lo, hi, pole = -hi, -lo, -pole
    edges = [lo]
    x = lo
    w = max(x - pole, 1e-300)
    while x < hi and w < cap:
        x = min(x + w, hi)
        edges.append(x)
        w = x - pole
    if x < hi:
        n = int(np.ceil((hi - x) / cap))
        edges.extend(np.linspace(x, hi, n + 1)[1:])
    out = np.asarray(edges)
    return -out[::-1] if mirrored else out


def pv_integrate(f: Integrand, pole: float, lo: float, hi: float,
                 cap: float = np.inf) -> float:
    """PV integral of f(x) / (x - pole) over [lo, hi]."""
    g = lambda x: f(x) / (x - pole)
    if not lo < pole < hi:
        return _panel_sum(g, graded_edges(lo, hi, pole, cap))
    delta = min(0.5 * (pole - lo), 0.5 * (hi - pole), 0.5 * cap)
    u_edges = np.array([0.0, 0.5 * delta, delta])

    def folded(u):
        return (f(pole + u) - f(pole - u)) / u

    window = _panel_sum(folded, u_edges, _WIN_NODES, _WIN_WEIGHTS)
    left = _panel_sum(g, graded_edges(lo, pole - delta, pole, cap))
    right = _panel_sum(g, graded_edges(pole + delta, hi, pole, cap))
    return window + left + right


def regulated_pv(terms: Sequence[tuple[Integrand, float]], eps: float,
                 cap: float = np.inf, lo: float = 0.0, rtol: float = 1e-4,
                 atol: float = 0.0, decay: float = 60.0) -> float:
    """eps -> 0+ limit of sum_i PV int_lo^inf f_i(x) exp(-eps x) / (x - pole_i) dx.

    Raises NumericalError when the three-point and two-point extrapolants
    disagree by more than ``rtol`` (relative) plus ``atol``.
    """
    def damped(e):
        total = 0.0
        for f, pole in terms:
            hi = max(abs(pole), lo) + decay / e
            total += pv_integrate(lambda x, f=f: f(x) * np.exp(-e * x), pole, lo, hi, cap)
        return total

    i1, i2, i4 = damped(eps), damped(eps / 2), damped(eps / 4)
    three = (8 * i4 - 6 * i2 + i1) / 3
    two = 2 * i4 - i2
    if not np.isfinite(three) or abs(three - two) > rtol * abs(three) + atol:
        raise NumericalError(
            f"regulator extrapolation did not converge: {three!r} vs {two!r}")
    return three
