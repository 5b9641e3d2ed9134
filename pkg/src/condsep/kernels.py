"""Hot numeric kernels with a numba-jitted path and a pure-numpy fallback.

The backend is picked once at import time: set ``CONDSEP_NUMBA=0`` (or
``false``/``off``) to force the numpy path; otherwise numba is used when
importable. ``benchmarks/bench_kernels.py`` times both paths side by side.

All kernels operate on raw ndarrays:

- ``xs``/``ys`` are (K, d) arrays of unit-norm pure-factor vectors,
- mixtures are K-term sums of weighted pure product projectors,
- ``env_x``/``env_y`` contract a residual operator against one factor,
  producing the conditional environment the factor update diagonalizes.
"""

import os

import numpy as np

__all__ = [
    "BACKEND",
    "NUMBA_ENABLED",
    "assemble_mixture",
    "product_gram",
    "product_overlaps",
    "env_x",
    "env_y",
    "classical_cmi_bits",
    "partial_transpose_y",
    "get_backend",
]


def _numba_requested() -> bool:
    flag = os.environ.get("CONDSEP_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


# ---------------------------------------------------------------------------
# pure-numpy reference implementations


def _product_vectors(xs, ys):
    k = xs.shape[0]
    return (xs[:, :, None] * ys[:, None, :]).reshape(k, -1)


def _assemble_mixture_np(weights, xs, ys):
    vs = _product_vectors(xs, ys)
    return np.einsum("k,ki,kj->ij", weights, vs, vs.conj(), optimize=True)


def _product_gram_np(xs, ys):
    gx = np.abs(xs @ xs.conj().T) ** 2
    gy = np.abs(ys @ ys.conj().T) ** 2
    return gx * gy


def _product_overlaps_np(rho, xs, ys):
    vs = _product_vectors(xs, ys)
    return np.real(np.einsum("ki,ij,kj->k", vs.conj(), rho, vs, optimize=True))


def _env_x_np(r, q, dx, dy):
    t = r.reshape(dx, dy, dx, dy)
    return np.einsum("a,iajb,b->ij", q.conj(), t, q, optimize=True)


def _env_y_np(r, p, dx, dy):
    t = r.reshape(dx, dy, dx, dy)
    return np.einsum("a,aibj,b->ij", p.conj(), t, p, optimize=True)


def _classical_cmi_bits_np(probs, eps):
    # probs indexed (x, y, e)
    p_xe = probs.sum(axis=1)
    p_ye = probs.sum(axis=0)
    p_e = probs.sum(axis=(0, 1))
    num = probs * p_e[None, None, :]
    den = p_xe[:, None, :] * p_ye[None, :, :]
    mask = probs > eps
    terms = np.zeros_like(probs)
    terms[mask] = probs[mask] * np.log2(num[mask] / den[mask])
    return float(terms.sum())


def _partial_transpose_y_np(rho, dx, dy):
    t = rho.reshape(dx, dy, dx, dy)
    return np.ascontiguousarray(t.transpose(0, 3, 2, 1).reshape(dx * dy, dx * dy))


_NUMPY_IMPL = {
    "assemble_mixture": _assemble_mixture_np,
    "product_gram": _product_gram_np,
    "product_overlaps": _product_overlaps_np,
    "env_x": _env_x_np,
    "env_y": _env_y_np,
    "classical_cmi_bits": _classical_cmi_bits_np,
    "partial_transpose_y": _partial_transpose_y_np,
}


# ---------------------------------------------------------------------------
# numba path


def _build_numba_impl():
    from numba import njit

    @njit(cache=True)
    def assemble_mixture(weights, xs, ys):
        k_terms, dx = xs.shape
        dy = ys.shape[1]
        n = dx * dy
        out = np.zeros((n, n), np.complex128)
        v = np.empty(n, np.complex128)
        for k in range(k_terms):
            for x in range(dx):
                for y in range(dy):
                    v[x * dy + y] = xs[k, x] * ys[k, y]
            w = weights[k]
            for i in range(n):
                wvi = w * v[i]
                for j in range(n):
                    out[i, j] += wvi * np.conj(v[j])
        return out

    @njit(cache=True)
    def product_gram(xs, ys):
        k_terms = xs.shape[0]
        out = np.empty((k_terms, k_terms), np.float64)
        for j in range(k_terms):
            for k in range(k_terms):
                ox = 0.0 + 0.0j
                for i in range(xs.shape[1]):
                    ox += np.conj(xs[j, i]) * xs[k, i]
                oy = 0.0 + 0.0j
                for i in range(ys.shape[1]):
                    oy += np.conj(ys[j, i]) * ys[k, i]
                out[j, k] = abs(ox) ** 2 * abs(oy) ** 2
        return out

    @njit(cache=True)
    def product_overlaps(rho, xs, ys):
        k_terms, dx = xs.shape
        dy = ys.shape[1]
        n = dx * dy
        v = np.empty(n, np.complex128)
        out = np.empty(k_terms, np.float64)
        for k in range(k_terms):
            for x in range(dx):
                for y in range(dy):
                    v[x * dy + y] = xs[k, x] * ys[k, y]
            acc = 0.0 + 0.0j
            for i in range(n):
                for j in range(n):
                    acc += np.conj(v[i]) * rho[i, j] * v[j]
            out[k] = acc.real
        return out

    @njit(cache=True)
    def env_x(r, q, dx, dy):
        out = np.zeros((dx, dx), np.complex128)
        for x1 in range(dx):
            for x2 in range(dx):
                acc = 0.0 + 0.0j
                for y1 in range(dy):
                    cq = np.conj(q[y1])
                    for y2 in range(dy):
                        acc += cq * r[x1 * dy + y1, x2 * dy + y2] * q[y2]
                out[x1, x2] = acc
        return out

    @njit(cache=True)
    def env_y(r, p, dx, dy):
        out = np.zeros((dy, dy), np.complex128)
        for y1 in range(dy):
            for y2 in range(dy):
                acc = 0.0 + 0.0j
                for x1 in range(dx):
                    cp = np.conj(p[x1])
                    for x2 in range(dx):
                        acc += cp * r[x1 * dy + y1, x2 * dy + y2] * p[x2]
                out[y1, y2] = acc
        return out

    @njit(cache=True)
    def classical_cmi_bits(probs, eps):
        nx, ny, ne = probs.shape
        p_xe = np.zeros((nx, ne), np.float64)
        p_ye = np.zeros((ny, ne), np.float64)
        p_e = np.zeros(ne, np.float64)
        for x in range(nx):
            for y in range(ny):
                for e in range(ne):
                    p = probs[x, y, e]
                    p_xe[x, e] += p
                    p_ye[y, e] += p
                    p_e[e] += p
        total = 0.0
        for x in range(nx):
            for y in range(ny):
                for e in range(ne):
                    p = probs[x, y, e]
                    if p > eps:
                        total += p * np.log2(p * p_e[e] / (p_xe[x, e] * p_ye[y, e]))
        return total

    @njit(cache=True)
    def partial_transpose_y(rho, dx, dy):
        n = dx * dy
        out = np.empty((n, n), np.complex128)
        for x1 in range(dx):
            for y1 in range(dy):
                for x2 in range(dx):
                    for y2 in range(dy):
                        out[x1 * dy + y1, x2 * dy + y2] = rho[x1 * dy + y2, x2 * dy + y1]
        return out

    return {
        "assemble_mixture": assemble_mixture,
        "product_gram": product_gram,
        "product_overlaps": product_overlaps,
        "env_x": env_x,
        "env_y": env_y,
        "classical_cmi_bits": classical_cmi_bits,
        "partial_transpose_y": partial_transpose_y,
    }


NUMBA_ENABLED = False
_NUMBA_IMPL = None
if _numba_requested():
    try:
        _NUMBA_IMPL = _build_numba_impl()
        NUMBA_ENABLED = True
    except ImportError:
        pass

BACKEND = "numba" if NUMBA_ENABLED else "numpy"


def get_backend(name):
    """Return the kernel table for ``name`` ('numpy' or 'numba')."""
    if name == "numpy":
        return _NUMPY_IMPL
    if name == "numba":
        if _NUMBA_IMPL is None:
            raise RuntimeError("numba backend unavailable (disabled or not installed)")
        return _NUMBA_IMPL
    raise ValueError(f"unknown backend {name!r}")


_impl = _NUMBA_IMPL if NUMBA_ENABLED else _NUMPY_IMPL
assemble_mixture = _impl["assemble_mixture"]
product_gram = _impl["product_gram"]
product_overlaps = _impl["product_overlaps"]
env_x = _impl["env_x"]
env_y = _impl["env_y"]
classical_cmi_bits = _impl["classical_cmi_bits"]
partial_transpose_y = _impl["partial_transpose_y"]
