"""Quadrature building blocks: panelised Gauss-Legendre, tanh-sinh nodes,
graded grids for algebraic tails, pairwise summation and a deterministic
chunked map used by the embarrassingly parallel integrators.

All node constructors are pure and cached; reductions are fixed-order so
results do not depend on worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(int(n))
    return x, w


@lru_cache(maxsize=64)
def tanh_sinh(order: int, h: float = 0.12) -> tuple[np.ndarray, np.ndarray]:
    """Tanh-sinh (doubly exponential) nodes/weights on [-1, 1].

    ``order`` positive nodes per side; step ``h`` in the auxiliary variable.
    """
    k = np.arange(-order, order + 1)
    t = k * h
    half_pi = 0.5 * np.pi
    x = np.tanh(half_pi * np.sinh(t))
    w = h * half_pi * np.cosh(t) / np.cosh(half_pi * np.sinh(t)) ** 2
    return x, w


def panel_nodes(a: float, b: float, nodes_per_panel: int, panels: int,
                rule: str = "gauss_legendre") -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on [a, b]: `panels` equal panels of `nodes_per_panel` nodes."""
    if rule == "gauss_legendre":
        x, w = gauss_legendre(nodes_per_panel)
    elif rule == "tanh_sinh":
        x, w = tanh_sinh(max(4, nodes_per_panel // 2))
    else:
        raise ValueError(f"unknown rule {rule!r}")
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    return (mid + half * x[None, :]).ravel(), (half * np.broadcast_to(w, (panels, len(w)))).ravel()


def graded_nodes(radius: float, nodes_per_panel: int = 16, panels_per_side: int = 16,
                 inner: float = 1e-2, max_panel: float = np.inf) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric grid on [-radius, radius], panels graded geometrically toward 0.

    Suited to integrands with an O(1)-scale feature at the origin and slow
    algebraic tails (Iwasawa exponents on unipotent coordinates).  For
    oscillatory weights, `max_panel` caps the panel width so every panel
    resolves the phase (subdivision keeps Gauss-Legendre spectral accuracy).
    """
    x, w = gauss_legendre(nodes_per_panel)
    half_edges = [0.0]
    for e in np.geomspace(inner, radius, panels_per_side):
        prev = half_edges[-1]
        width = e - prev
        if width > max_panel:
            k = int(np.ceil(width / max_panel))
            half_edges.extend(list(prev + width * np.arange(1, k + 1) / k))
        else:
            half_edges.append(e)
    pos = np.array(half_edges)
    edges = np.concatenate([-pos[::-1], pos[1:]])
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    m = len(edges) - 1
    return (mid + half * x[None, :]).ravel(), (half * np.broadcast_to(w, (m, len(w)))).ravel()


def pairwise_sum(values: np.ndarray):
    """Fixed-order pairwise summation; bit-reproducible for a given node order."""
    v = np.asarray(values, dtype=np.result_type(values, np.float64)).ravel()
    if v.size == 0:
        return 0.0
    while v.size > 1:
        half = v.size // 2
        folded = v[:half] + v[half : 2 * half]
        if v.size % 2:
            folded = np.concatenate([folded, v[2 * half :]])
        v = folded
    return complex(v[0]) if np.iscomplexobj(v) else float(v[0])


def integrate_with_halving(f, a: float, b: float, nodes_per_panel: int = 16,
                           panels: int = 8, tol: float = 1e-10, max_doublings: int = 8,
                           rule: str = "gauss_legendre"):
    """Composite quadrature with panel doubling until two refinements agree.

    Returns (value, err_estimate, converged). ``f`` must accept a node array.
    """
    x, w = panel_nodes(a, b, nodes_per_panel, panels, rule)
    prev = pairwise_sum(w * f(x))
    for _ in range(max_doublings):
        panels *= 2
        x, w = panel_nodes(a, b, nodes_per_panel, panels, rule)
        cur = pairwise_sum(w * f(x))
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)):
            return cur, err, True
        prev = cur
    return prev, abs(cur - prev) if panels > 8 else np.inf, False


def thread_count() -> int:
    """Worker cap from WTODA_THREADS (default 1; numpy already vectorises)."""
    try:
        return max(1, int(os.environ.get("WTODA_THREADS", "1")))
    except ValueError:
        return 1


def deterministic_map(fn, chunks: list):
    """Map fn over chunks, optionally threaded, always reduced in list order."""
    workers = thread_count()
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))
