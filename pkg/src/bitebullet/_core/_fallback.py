"""Pure numpy path kernel, used when the compiled extension is unavailable.

Vectorized over time within a chunk of paths. The arithmetic mirrors
``_kernel.pyx`` operation for operation (sequential cumsums, same
expression order), so results agree with the compiled kernel up to
libm/numpy transcendental rounding.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import philox

CHUNK = 128


def _chunk(seed, paths, n_steps, dt, log_s0, drift1, vol1, drift2, vol2, q, r, K,
           tail1, tail2, ceiling, bridge, log_h, wfull, whalf, disc):
    m = len(paths)
    N = n_steps
    nb = len(log_h)
    z = philox.normals(seed, paths, N)

    logS1 = np.empty((m, N + 1))
    logS1[:, 0] = log_s0
    logS1[:, 1:] = drift1 + vol1 * z
    np.cumsum(logS1, axis=1, out=logS1)
    L2 = np.empty((m, N + 1))
    L2[:, 0] = 0.0
    L2[:, 1:] = drift2 + vol2 * z
    np.cumsum(L2, axis=1, out=L2)
    S1 = np.exp(logS1)
    E2 = np.exp(L2)
    del z

    t = np.arange(N + 1, dtype=np.float64) * dt
    use_bridge = bool(bridge) and vol1 > 0.0
    if use_bridge:
        u = philox.uniforms(seed, paths, N)

    rows = np.arange(m)
    kidx = np.arange(N + 1)[None, :]
    damage = np.empty((m, nb))
    tau = np.full((m, nb), np.nan)
    flag = np.zeros((m, nb), dtype=np.uint8)

    for j in range(nb):
        lb = log_h[j] + q * t
        direct = logS1 >= lb[None, :]
        event = direct.copy()
        if use_bridge:
            dprev = lb[None, :-1] - logS1[:, :-1]
            dnow = lb[None, 1:] - logS1[:, 1:]
            with np.errstate(over="ignore"):
                prob = np.exp(-2.0 * dprev * dnow / (vol1 * vol1))
            event[:, 1:] |= u < prob
        hit = event.any(axis=1)
        mi = np.where(hit, np.argmax(event, axis=1), N + 1)
        mi_c = np.minimum(mi, N)
        tau_j = np.where(direct[rows, mi_c], t[mi_c], t[mi_c] - 0.5 * dt)
        c = np.exp(logS1[rows, mi_c] - L2[rows, mi_c])

        S = np.where(kidx <= mi[:, None], S1, E2 * c[:, None])
        over = S > ceiling
        any_over = over.any(axis=1)
        e = np.where(any_over, np.argmax(over, axis=1), N)
        acted = hit & (mi <= e)

        terms = wfull[None, :] * S
        terms[:, 0] = whalf[0] * S[:, 0]
        cums = np.cumsum(terms, axis=1)
        S_e = S[rows, e]
        prev = cums[rows, np.maximum(e - 1, 0)]
        trap = np.where(e == 0, whalf[0] * S_e, prev + whalf[e] * S_e)
        tail = S_e * disc[e] * np.where(acted, tail2, tail1)
        d = trap + tail
        cost = K * np.exp((q - r) * np.where(acted, tau_j, 0.0))
        damage[:, j] = np.where(acted, d + cost, d)
        tau[:, j] = np.where(acted, tau_j, np.nan)
        flag[:, j] = any_over & (e < N)
    return damage, tau, flag


def simulate_block(seed, path_start, n_paths, n_steps, dt, log_s0, drift1, vol1,
                   drift2, vol2, q, r, K, tail1, tail2, ceiling, bridge,
                   log_h, wfull, whalf, disc, threads=1):
    log_h = np.ascontiguousarray(log_h, dtype=np.float64)
    nb = len(log_h)
    damage = np.empty((n_paths, nb))
    tau = np.empty((n_paths, nb))
    flag = np.zeros((n_paths, nb), dtype=np.uint8)
    if nb == 0 or n_paths == 0:
        return damage, tau, flag
    starts = range(0, n_paths, CHUNK)

    def work(s):
        paths = np.arange(path_start + s, path_start + min(s + CHUNK, n_paths), dtype=np.uint64)
        out = _chunk(seed, paths, n_steps, dt, log_s0, drift1, vol1, drift2, vol2, q, r,
                     K, tail1, tail2, ceiling, bridge, log_h, wfull, whalf, disc)
        sl = slice(s, s + len(paths))
        damage[sl], tau[sl], flag[sl] = out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(work, starts))
    else:
        for s in starts:
            work(s)
    return damage, tau, flag
