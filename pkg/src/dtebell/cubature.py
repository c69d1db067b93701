"""Adaptive tensor-product Gauss-Kronrod cubature on rectangles.

Each panel is integrated with the (2n+1)-point Kronrod rule in both directions;
the embedded n-point Gauss tensor rule reuses a subset of the nodes, and the
absolute difference between the two is the panel error estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import legendre

__all__ = ["gauss_kronrod", "CubatureResult", "ToleranceNotReachedError", "adaptive_cubature"]


@lru_cache(maxsize=None)
def gauss_kronrod(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes and weights of the Gauss-Kronrod pair with ``n`` Gauss points on [-1, 1].

    Returns ``(nodes, kronrod_weights, gauss_weights)``: ``nodes`` has length
    ``2n+1`` (ascending), ``gauss_weights`` is zero at the Kronrod-only nodes.
    The Kronrod nodes are the roots of the Stieltjes polynomial, found from its
    orthogonality against ``P_n P_k`` for ``k <= n``.
    """
    if n < 1:
        raise ValueError("Gauss order must be >= 1")
    xq, wq = legendre.leggauss(3 * n + 4)
    P = np.array([legendre.legval(xq, np.eye(n + 2)[j]) for j in range(n + 2)])

    # E_{n+1} = P_{n+1} + sum_{j<=n} a_j P_j, orthogonal to P_n P_k for k = 0..n.
    M = np.einsum("jq,q,kq->kj", P[: n + 1], wq * P[n], P[: n + 1])
    rhs = -np.einsum("q,q,kq->k", P[n + 1], wq * P[n], P[: n + 1])
    a = np.linalg.lstsq(M, rhs, rcond=None)[0]
    stieltjes = np.append(a, 1.0)
    stieltjes[np.abs(stieltjes) < 1e-14] = 0.0

    xg, wg = legendre.leggauss(n)
    xk = np.sort(np.real(legendre.legroots(stieltjes)))
    nodes = np.sort(np.concatenate([xg, xk]))
    nodes[np.abs(nodes) < 1e-15] = 0.0

    # Weights from exactness on P_0 .. P_{2n}.
    V = np.array([legendre.legval(nodes, np.eye(2 * n + 1)[k]) for k in range(2 * n + 1)])
    moments = np.zeros(2 * n + 1)
    moments[0] = 2.0
    wk = np.linalg.solve(V, moments)

    wgauss = np.zeros_like(nodes)
    for x, w in zip(xg, wg):
        wgauss[np.argmin(np.abs(nodes - x))] = w
    return nodes, wk, wgauss


class ToleranceNotReachedError(ArithmeticError):
    """Raised when subdivision stops before the error target; carries the best estimate."""

    def __init__(self, msg: str, estimate, error_estimate):
        super().__init__(msg)
        self.estimate = estimate
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class CubatureResult:
    value: np.ndarray  # one entry per integrand component
    error: np.ndarray
    panels: int
    evaluations: int


def _rule_on_panels(f, panels: np.ndarray, n: int, ncomp: int):
    """Kronrod value and |Kronrod - Gauss| for each panel row (x0, x1, y0, y1)."""
    nodes, wk, wg = gauss_kronrod(n)
    cx = 0.5 * (panels[:, 0] + panels[:, 1])
    hx = 0.5 * (panels[:, 1] - panels[:, 0])
    cy = 0.5 * (panels[:, 2] + panels[:, 3])
    hy = 0.5 * (panels[:, 3] - panels[:, 2])
    X = cx[:, None, None] + hx[:, None, None] * nodes[None, :, None]
    Y = cy[:, None, None] + hy[:, None, None] * nodes[None, None, :]
    X, Y = np.broadcast_arrays(X, Y)
    vals = np.asarray(f(X, Y))
    if vals.ndim == 3:
        vals = vals[None]
    jac = (hx * hy)[None, :]
    kron = np.einsum("cpij,i,j->cp", vals, wk, wk) * jac
    gauss = np.einsum("cpij,i,j->cp", vals, wg, wg) * jac
    return kron, np.abs(kron - gauss)


def adaptive_cubature(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    box: tuple[float, float, float, float],
    tol: float,
    max_depth: int = 12,
    order: int = 7,
    initial_splits: tuple[int, int] = (1, 1),
    ncomp: int = 1,
    batch: int = 2048,
) -> CubatureResult:
    """Integrate ``f`` over ``box = (x0, x1, y0, y1)`` to absolute tolerance ``tol``.

    ``f(X, Y)`` must broadcast over arrays and return either an array of the
    same shape (one integrand) or a stacked array with a leading component axis
    of length ``ncomp``.  The tolerance applies to the sum of panel errors of
    every component.  The box is first cut into ``initial_splits`` equal panels;
    panels are then quartered, worst first, until the error target is met or
    every offending panel has been split ``max_depth`` times.

    Panel order and summation order depend only on the inputs, so results are
    reproducible bit for bit.
    """
    if tol <= 0:
        raise ValueError("tolerance must be > 0")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    x0, x1, y0, y1 = map(float, box)
    if not (x1 > x0 and y1 > y0 and all(map(math.isfinite, (x0, x1, y0, y1)))):
        raise ValueError(f"integration box must be finite and nonempty, got {box}")

    nx, ny = initial_splits
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    panels = np.array(
        [(xs[i], xs[i + 1], ys[j], ys[j + 1]) for i in range(nx) for j in range(ny)]
    )
    depth = np.zeros(len(panels), dtype=int)
    pts = (2 * order + 1) ** 2

    def evaluate(p):
        outs = [_rule_on_panels(f, p[k : k + batch], order, ncomp) for k in range(0, len(p), batch)]
        return np.concatenate([o[0] for o in outs], axis=1), np.concatenate([o[1] for o in outs], axis=1)

    values, errors = evaluate(panels)
    evaluations = len(panels) * pts

    while True:
        panel_err = errors.sum(axis=0)
        total_err = math.fsum(panel_err)
        if total_err <= tol:
            break
        # Split the largest-error panels that together carry the excess error.
        splittable = np.flatnonzero(depth < max_depth)
        if splittable.size == 0:
            break
        order_idx = splittable[np.argsort(-panel_err[splittable], kind="stable")]
        cum = np.cumsum(panel_err[order_idx])
        need = total_err - 0.5 * tol
        nsplit = int(np.searchsorted(cum, need) + 1)
        chosen = np.sort(order_idx[: min(nsplit, order_idx.size)])
        if panel_err[chosen].sum() == 0.0:
            break

        parents = panels[chosen]
        mx = 0.5 * (parents[:, 0] + parents[:, 1])
        my = 0.5 * (parents[:, 2] + parents[:, 3])
        children = np.concatenate(
            [
                np.stack([parents[:, 0], mx, parents[:, 2], my], axis=1),
                np.stack([parents[:, 0], mx, my, parents[:, 3]], axis=1),
                np.stack([mx, parents[:, 1], parents[:, 2], my], axis=1),
                np.stack([mx, parents[:, 1], my, parents[:, 3]], axis=1),
            ]
        )
        cvals, cerrs = evaluate(children)
        evaluations += len(children) * pts

        keep = np.ones(len(panels), dtype=bool)
        keep[chosen] = False
        panels = np.concatenate([panels[keep], children])
        depth = np.concatenate([depth[keep], np.repeat(depth[chosen] + 1, 4)])
        values = np.concatenate([values[:, keep], cvals], axis=1)
        errors = np.concatenate([errors[:, keep], cerrs], axis=1)

    value = np.array([_fsum_complex(v) for v in values])
    error = np.array([math.fsum(e) for e in errors])
    if math.fsum(error) > tol:
        raise ToleranceNotReachedError(
            f"cubature error estimate {math.fsum(error):.3e} exceeds tolerance {tol:.3e} "
            f"at maximum depth {max_depth}",
            estimate=value,
            error_estimate=error,
        )
    return CubatureResult(value=value, error=error, panels=len(panels), evaluations=evaluations)


def _fsum_complex(v: np.ndarray) -> complex:
    if np.iscomplexobj(v):
        return complex(math.fsum(v.real), math.fsum(v.imag))
    return complex(math.fsum(v), 0.0)
