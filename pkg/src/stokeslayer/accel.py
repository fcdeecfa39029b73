"""Hot O(N^2) kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen at import time: numba when importable, unless the
environment variable ``STOKESLAYER_NO_NUMBA=1`` forces the numpy path.
``set_backend``/``get_backend`` switch at runtime (used by tests and the
benchmark). Both implementations are kept in sync and compared in
``tests/test_backends.py``.

Kernels return raw quadrature sums; physical prefactors are applied by the
callers in :mod:`stokeslayer.stokes_field` and :mod:`stokeslayer.geometry`.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


_env_off = os.environ.get("STOKESLAYER_NO_NUMBA", "0") == "1"
_backend = "numba" if (HAVE_NUMBA and not _env_off) else "numpy"


def get_backend():
    return _backend


def set_backend(name):
    """Select 'numba' or 'numpy'. Raises if numba is requested but missing."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    _backend = name


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _np_self_velocity_smooth(gam, nrm, kap, fdens, L, log2sin):
    n = gam.shape[0]
    d = gam[:, None, :] - gam[None, :, :]
    dist2 = d[..., 0] ** 2 + d[..., 1] ** 2
    off = ~np.eye(n, dtype=bool)
    if np.any(dist2[off] == 0.0):
        return np.zeros((n, 2)), np.zeros((n, 2)), False
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    lr = np.empty((n, n))
    lr[off] = 0.5 * np.log(dist2[off]) - log2sin[idx[off]]
    np.fill_diagonal(lr, np.log(L / (2.0 * np.pi)))
    sf = (lr @ fdens) / n
    dn = d[..., 0] * nrm[None, :, 0] + d[..., 1] * nrm[None, :, 1]
    w = np.zeros((n, n))
    w[off] = kap[None, :].repeat(n, axis=0)[off] * dn[off] / dist2[off]
    sg = np.stack([(w * d[..., 0]).sum(axis=1), (w * d[..., 1]).sum(axis=1)], axis=1) / n
    return sf, sg, True


def _np_self_velocity_reg(gam, nrm, kap, fdens, L, eps):
    n = gam.shape[0]
    e2 = (eps * L) ** 2
    d = gam[:, None, :] - gam[None, :, :]
    dist2 = d[..., 0] ** 2 + d[..., 1] ** 2 + e2
    lr = 0.5 * np.log(dist2)
    sf = (lr @ fdens) / n
    dn = d[..., 0] * nrm[None, :, 0] + d[..., 1] * nrm[None, :, 1]
    w = kap[None, :] * dn / dist2
    sg = np.stack([(w * d[..., 0]).sum(axis=1), (w * d[..., 1]).sum(axis=1)], axis=1) / n
    return sf, sg


def _np_field_velocity(gam, nrm, kap, pts):
    d = pts[:, None, :] - gam[None, :, :]
    dist2 = d[..., 0] ** 2 + d[..., 1] ** 2
    lg = 0.5 * np.log(dist2)
    sf = np.stack([lg @ (kap * nrm[:, 0]), lg @ (kap * nrm[:, 1])], axis=1)
    dn = d[..., 0] * nrm[None, :, 0] + d[..., 1] * nrm[None, :, 1]
    w = kap[None, :] * dn / dist2
    sg = np.stack([(w * d[..., 0]).sum(axis=1), (w * d[..., 1]).sum(axis=1)], axis=1)
    return (sf / gam.shape[0], sg / gam.shape[0])


def _np_field_pressure(gam, nrm, kap, pts):
    d = pts[:, None, :] - gam[None, :, :]
    dist2 = d[..., 0] ** 2 + d[..., 1] ** 2
    dn = d[..., 0] * nrm[None, :, 0] + d[..., 1] * nrm[None, :, 1]
    return (kap[None, :] * dn / dist2).sum(axis=1) / gam.shape[0]


def _np_arc_chord(gam, L, diag):
    n = gam.shape[0]
    d = gam[:, None, :] - gam[None, :, :]
    dist2 = d[..., 0] ** 2 + d[..., 1] ** 2
    k = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    sep = L * np.minimum(k, n - k) / n
    off = k != 0
    if np.any(dist2[off] == 0.0):
        return np.inf, False
    val = np.where(off, sep**2 / np.where(off, dist2, 1.0), 0.0)
    return max(val.max(), diag.max()), True


def _np_trig_eval(coef, x):
    # Horner evaluation of sum_{k=1}^{n/2-1} c_k z^k with z = e^{2 pi i x}
    n = coef.shape[0]
    z = np.exp(2j * np.pi * x)
    p = np.zeros_like(z)
    for k in range(n // 2 - 1, 0, -1):
        p = (p + coef[k]) * z
    return coef[0].real + 2.0 * p.real + coef[n // 2].real * np.cos(np.pi * n * x)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

@njit(cache=True)
def _nb_self_velocity_smooth(gam, nrm, kap, fdens, L, log2sin):
    n = gam.shape[0]
    sf = np.zeros((n, 2))
    sg = np.zeros((n, 2))
    ldiag = np.log(L / (2.0 * np.pi))
    for i in range(n):
        f0 = ldiag * fdens[i, 0]
        f1 = ldiag * fdens[i, 1]
        g0 = 0.0
        g1 = 0.0
        for j in range(n):
            if j == i:
                continue
            dx = gam[i, 0] - gam[j, 0]
            dy = gam[i, 1] - gam[j, 1]
            r2 = dx * dx + dy * dy
            if r2 == 0.0:
                return sf, sg, False
            lr = 0.5 * np.log(r2) - log2sin[(i - j) % n]
            f0 += lr * fdens[j, 0]
            f1 += lr * fdens[j, 1]
            w = kap[j] * (dx * nrm[j, 0] + dy * nrm[j, 1]) / r2
            g0 += w * dx
            g1 += w * dy
        sf[i, 0] = f0 / n
        sf[i, 1] = f1 / n
        sg[i, 0] = g0 / n
        sg[i, 1] = g1 / n
    return sf, sg, True


@njit(cache=True)
def _nb_self_velocity_reg(gam, nrm, kap, fdens, L, eps):
    n = gam.shape[0]
    sf = np.zeros((n, 2))
    sg = np.zeros((n, 2))
    e2 = (eps * L) ** 2
    for i in range(n):
        f0 = 0.0
        f1 = 0.0
        g0 = 0.0
        g1 = 0.0
        for j in range(n):
            dx = gam[i, 0] - gam[j, 0]
            dy = gam[i, 1] - gam[j, 1]
            r2 = dx * dx + dy * dy + e2
            lr = 0.5 * np.log(r2)
            f0 += lr * fdens[j, 0]
            f1 += lr * fdens[j, 1]
            w = kap[j] * (dx * nrm[j, 0] + dy * nrm[j, 1]) / r2
            g0 += w * dx
            g1 += w * dy
        sf[i, 0] = f0 / n
        sf[i, 1] = f1 / n
        sg[i, 0] = g0 / n
        sg[i, 1] = g1 / n
    return sf, sg


@njit(cache=True)
def _nb_field_velocity(gam, nrm, kap, pts):
    n = gam.shape[0]
    m = pts.shape[0]
    sf = np.zeros((m, 2))
    sg = np.zeros((m, 2))
    for i in range(m):
        f0 = 0.0
        f1 = 0.0
        g0 = 0.0
        g1 = 0.0
        for j in range(n):
            dx = pts[i, 0] - gam[j, 0]
            dy = pts[i, 1] - gam[j, 1]
            r2 = dx * dx + dy * dy
            lg = 0.5 * np.log(r2)
            f0 += lg * kap[j] * nrm[j, 0]
            f1 += lg * kap[j] * nrm[j, 1]
            w = kap[j] * (dx * nrm[j, 0] + dy * nrm[j, 1]) / r2
            g0 += w * dx
            g1 += w * dy
        sf[i, 0] = f0 / n
        sf[i, 1] = f1 / n
        sg[i, 0] = g0 / n
        sg[i, 1] = g1 / n
    return sf, sg


@njit(cache=True)
def _nb_field_pressure(gam, nrm, kap, pts):
    n = gam.shape[0]
    m = pts.shape[0]
    out = np.zeros(m)
    for i in range(m):
        acc = 0.0
        for j in range(n):
            dx = pts[i, 0] - gam[j, 0]
            dy = pts[i, 1] - gam[j, 1]
            r2 = dx * dx + dy * dy
            acc += kap[j] * (dx * nrm[j, 0] + dy * nrm[j, 1]) / r2
        out[i] = acc / n
    return out


@njit(cache=True)
def _nb_arc_chord(gam, L, diag):
    n = gam.shape[0]
    sup = diag.max()
    for i in range(n):
        for j in range(i + 1, n):
            dx = gam[i, 0] - gam[j, 0]
            dy = gam[i, 1] - gam[j, 1]
            r2 = dx * dx + dy * dy
            if r2 == 0.0:
                return np.inf, False
            k = j - i
            if n - k < k:
                k = n - k
            sep = L * k / n
            v = sep * sep / r2
            if v > sup:
                sup = v
    return sup, True


@njit(cache=True)
def _nb_trig_eval(coef, x):
    n = coef.shape[0]
    m = x.shape[0]
    out = np.empty(m)
    for i in range(m):
        z = np.exp(2j * np.pi * x[i])
        p = 0.0 + 0.0j
        for k in range(n // 2 - 1, 0, -1):
            p = (p + coef[k]) * z
        out[i] = coef[0].real + 2.0 * p.real + coef[n // 2].real * np.cos(np.pi * n * x[i])
    return out


_IMPLS = {
    "numpy": {
        "self_velocity_smooth": _np_self_velocity_smooth,
        "self_velocity_reg": _np_self_velocity_reg,
        "field_velocity": _np_field_velocity,
        "field_pressure": _np_field_pressure,
        "arc_chord": _np_arc_chord,
        "trig_eval": _np_trig_eval,
    },
    "numba": {
        "self_velocity_smooth": _nb_self_velocity_smooth,
        "self_velocity_reg": _nb_self_velocity_reg,
        "field_velocity": _nb_field_velocity,
        "field_pressure": _nb_field_pressure,
        "arc_chord": _nb_arc_chord,
        "trig_eval": _nb_trig_eval,
    },
}
if not HAVE_NUMBA:  # pragma: no cover
    _IMPLS["numba"] = _IMPLS["numpy"]


def self_velocity_smooth(gam, nrm, kap, fdens, L, log2sin):
    return _IMPLS[_backend]["self_velocity_smooth"](gam, nrm, kap, fdens, L, log2sin)


def self_velocity_reg(gam, nrm, kap, fdens, L, eps):
    return _IMPLS[_backend]["self_velocity_reg"](gam, nrm, kap, fdens, L, eps)


def field_velocity(gam, nrm, kap, pts):
    return _IMPLS[_backend]["field_velocity"](gam, nrm, kap, pts)


def field_pressure(gam, nrm, kap, pts):
    return _IMPLS[_backend]["field_pressure"](gam, nrm, kap, pts)


def arc_chord_pairs(gam, L, diag):
    return _IMPLS[_backend]["arc_chord"](gam, L, diag)


def trig_eval(coef, x):
    """Evaluate the trigonometric interpolant of a real field at points x.

    coef are the fft coefficients divided by N (fft ordering); the Nyquist
    mode is evaluated as a cosine so the interpolant is real.
    """
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _IMPLS[_backend]["trig_eval"](coef, x)
