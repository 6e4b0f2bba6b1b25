"""Vectorized Philox4x64-10 counter-based generator (numpy).

Counter layout used throughout the package::

    ctr = (block, path_index, substream, 0)      key = (seed, KEY_TAG)

Each block yields four 64-bit words, i.e. four time steps worth of draws.
The compiled kernel uses the same layout (see ``philox.h``), so both
backends draw identical words for a given (seed, path, substream, step).
"""

from __future__ import annotations

import numpy as np

M0 = np.uint64(0xD2E7470EE14C6C93)
M1 = np.uint64(0xCA5A826395121157)
W0 = np.uint64(0x9E3779B97F4A7C15)
W1 = np.uint64(0xBB67AE8584CAA73B)
KEY_TAG = 0x6269746562756C6C  # b"bitebull"
ROUNDS = 10

STREAM_NORMAL = 0
STREAM_UNIFORM = 1

_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_TWO_M53 = 2.0**-53


def _mulhilo(a: np.uint64, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full 64x64 -> 128 bit product of a constant and an array, split in halves."""
    a_lo = a & _MASK32
    a_hi = a >> _S32
    b_lo = b & _MASK32
    b_hi = b >> _S32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    hh = a_hi * b_hi
    mid = (ll >> _S32) + (lh & _MASK32) + (hl & _MASK32)
    hi = hh + (lh >> _S32) + (hl >> _S32) + (mid >> _S32)
    lo = a * b
    return hi, lo


def philox4x64(ctr: tuple, key: tuple) -> tuple[np.ndarray, ...]:
    """Apply the 10-round Philox4x64 bijection to broadcastable counter words."""
    with np.errstate(over="ignore"):
        c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) for c in ctr)
        c0, c1, c2, c3 = np.broadcast_arrays(c0, c1, c2, c3)
        k0 = np.uint64(key[0])
        k1 = np.uint64(key[1])
        for i in range(ROUNDS):
            if i:
                k0 = k0 + W0
                k1 = k1 + W1
            hi0, lo0 = _mulhilo(M0, c0)
            hi1, lo1 = _mulhilo(M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


def _raw_words(seed: int, paths: np.ndarray, stream: int, n_steps: int) -> np.ndarray:
    """Raw words, shape (len(paths), n_blocks * 4); column k belongs to step k."""
    n_blocks = (n_steps + 3) // 4
    blocks = np.arange(n_blocks, dtype=np.uint64)[None, :]
    pidx = np.asarray(paths, dtype=np.uint64)[:, None]
    words = philox4x64(
        (blocks, pidx, np.uint64(stream), np.uint64(0)),
        (np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(KEY_TAG)),
    )
    return np.stack(words, axis=-1).reshape(len(paths), n_blocks * 4)


def uniforms(seed: int, paths: np.ndarray, n_steps: int) -> np.ndarray:
    """Uniforms on [0, 1) from the bridge substream, shape (paths, n_steps)."""
    w = _raw_words(seed, paths, STREAM_UNIFORM, n_steps)[:, :n_steps]
    return (w >> _S11).astype(np.float64) * _TWO_M53


# AS241 (PPND16) coefficients, highest degree first.
_A = (2.5090809287301226727e+3, 3.3430575583588128105e+4, 6.7265770927008700853e+4,
      4.5921953931549871457e+4, 1.3731693765509461125e+4, 1.9715909503065514427e+3,
      1.3314166789178437745e+2, 3.3871328727963666080e0)
_B = (5.2264952788528545610e+3, 2.8729085735721942674e+4, 3.9307895800092710610e+4,
      2.1213794301586595867e+4, 5.3941960214247511077e+3, 6.8718700749205790830e+2,
      4.2313330701600911252e+1, 1.0)
_C = (7.74545014278341407640e-4, 2.27238449892691845833e-2, 2.41780725177450611770e-1,
      1.27045825245236838258e0, 3.64784832476320460504e0, 5.76949722146069140550e0,
      4.63033784615654529590e0, 1.42343711074968357734e0)
_D = (1.05075007164441684324e-9, 5.47593808499534494600e-4, 1.51986665636164571966e-2,
      1.48103976427480074590e-1, 6.89767334985100004550e-1, 1.67638483018380384940e0,
      2.05319162663775882187e0, 1.0)
_E = (2.01033439929228813265e-7, 2.71155556874348757815e-5, 1.24266094738807843860e-3,
      2.65321895265761230930e-2, 2.96560571828504891230e-1, 1.78482653991729133580e0,
      5.46378491116411436990e0, 6.65790464350110377720e0)
_F = (2.04426310338993978564e-15, 1.42151175831644588870e-7, 1.84631831751005468180e-5,
      7.86869131145613259100e-4, 1.48753612908506148525e-2, 1.36929880922735805310e-1,
      5.99832206555887937690e-1, 1.0)


def _horner(coef, x):
    acc = coef[0] * x + coef[1]
    for c in coef[2:]:
        acc = acc * x + c
    return acc


def ndtri(p: np.ndarray) -> np.ndarray:
    """Inverse standard normal CDF (Wichura's AS241), for p in (0, 1)."""
    p = np.asarray(p, dtype=np.float64)
    q = p - 0.5
    central = np.abs(q) <= 0.425
    r = 0.180625 - q * q
    z = q * _horner(_A, r) / _horner(_B, r)

    tail = ~central
    if tail.any():
        pt = p[tail]
        qt = q[tail]
        rt = np.sqrt(-np.log(np.where(qt < 0.0, pt, 1.0 - pt)))
        near = rt <= 5.0
        rn = rt - 1.6
        rf = rt - 5.0
        with np.errstate(all="ignore"):
            zt = np.where(near, _horner(_C, rn) / _horner(_D, rn), _horner(_E, rf) / _horner(_F, rf))
        z[tail] = np.where(qt < 0.0, -zt, zt)
    return z


def normals(seed: int, paths: np.ndarray, n_steps: int) -> np.ndarray:
    """Standard normals by inversion of the normal substream, shape (paths, n_steps)."""
    w = _raw_words(seed, paths, STREAM_NORMAL, n_steps)[:, :n_steps]
    return ndtri(((w >> _S11).astype(np.float64) + 0.5) * _TWO_M53)
