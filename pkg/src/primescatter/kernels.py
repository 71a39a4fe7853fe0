"""
Direct nonuniform DFT kernels.

``amplitude[j] = sum_n w[n] * exp(-2 pi i k[j] x[n])``

Two implementations with the same contract:

* ``nudft_numba``: parallel over k, sequential Neumaier-compensated sum over
  atoms in ascending position order. Each k-sample is independent, so the
  result is bitwise identical whatever the thread count.
* ``nudft_numpy``: vectorized over k-chunks; atoms are grouped in fixed
  blocks, each block summed pairwise by numpy, and block sums combined with
  Neumaier compensation. Deterministic, but not bitwise equal to the numba
  path (agreement is at the 1e-13 relative level).

The phase k*x is reduced modulo 1 before the trigonometric call.
"""
import numpy as np

from ._accel import ENABLE_NUMBA, njit, prange

TWO_PI = 2.0 * np.pi
_ATOM_BLOCK = 256
_K_CHUNK = 32


@njit(parallel=True, fastmath=False)
def _nudft_compensated(x, w, k, out_re, out_im):
    nk = k.shape[0]
    na = x.shape[0]
    for j in prange(nk):
        kj = k[j]
        s_re = 0.0
        c_re = 0.0
        s_im = 0.0
        c_im = 0.0
        for n in range(na):
            t = kj * x[n]
            t = t - np.floor(t + 0.5)
            ph = -TWO_PI * t
            a = w[n] * np.cos(ph)
            b = w[n] * np.sin(ph)
            # Neumaier summation, real and imaginary parts separately
            tr = s_re + a
            if abs(s_re) >= abs(a):
                c_re += (s_re - tr) + a
            else:
                c_re += (a - tr) + s_re
            s_re = tr
            ti = s_im + b
            if abs(s_im) >= abs(b):
                c_im += (s_im - ti) + b
            else:
                c_im += (b - ti) + s_im
            s_im = ti
        out_re[j] = s_re + c_re
        out_im[j] = s_im + c_im


def nudft_numba(x: np.ndarray, w: np.ndarray, k: np.ndarray) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    k = np.ascontiguousarray(k, dtype=np.float64)
    re = np.empty(k.size)
    im = np.empty(k.size)
    _nudft_compensated(x, w, k, re, im)
    return re + 1j * im


def _neumaier_add(s, c, v):
    t = s + v
    big = np.abs(s) >= np.abs(v)
    c += np.where(big, (s - t) + v, (v - t) + s)
    return t, c


def nudft_numpy(x: np.ndarray, w: np.ndarray, k: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    out = np.empty(k.size, dtype=np.complex128)
    for j0 in range(0, k.size, _K_CHUNK):
        kc = k[j0 : j0 + _K_CHUNK, None]
        s_re = np.zeros(kc.shape[0])
        c_re = np.zeros(kc.shape[0])
        s_im = np.zeros(kc.shape[0])
        c_im = np.zeros(kc.shape[0])
        for n0 in range(0, x.size, _ATOM_BLOCK):
            t = kc * x[None, n0 : n0 + _ATOM_BLOCK]
            t -= np.floor(t + 0.5)
            ph = -TWO_PI * t
            wb = w[None, n0 : n0 + _ATOM_BLOCK]
            s_re, c_re = _neumaier_add(s_re, c_re, np.sum(wb * np.cos(ph), axis=1))
            s_im, c_im = _neumaier_add(s_im, c_im, np.sum(wb * np.sin(ph), axis=1))
        out[j0 : j0 + kc.shape[0]] = (s_re + c_re) + 1j * (s_im + c_im)
    return out


def nudft_kernel(x: np.ndarray, w: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Dispatch to the compiled kernel when numba is enabled."""
    if ENABLE_NUMBA:
        return nudft_numba(x, w, k)
    return nudft_numpy(x, w, k)
