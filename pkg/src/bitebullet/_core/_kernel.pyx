# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled path kernel: regime-switching GBM against a set of barriers.

Every path is simulated once and scored against all barriers with the same
noise (common random numbers). Per-path results depend only on
(seed, path_index), so any thread count gives bit-identical output.
"""

import numpy as np

cimport cython
from cython.parallel cimport prange
from libc.math cimport exp, NAN
from libc.stdint cimport uint64_t

cdef extern from "philox.h" nogil:
    void bb_normals4(uint64_t seed, uint64_t path, uint64_t block, double z[4])
    void bb_uniforms4(uint64_t seed, uint64_t path, uint64_t block, double u[4])


ctypedef struct Params:
    uint64_t seed
    Py_ssize_t n_steps
    Py_ssize_t nb
    double dt
    double log_s0
    double drift1
    double vol1
    double drift2
    double vol2
    double q
    double r
    double K
    double tail1
    double tail2
    double ceiling
    bint bridge
    const double *log_h
    const double *wfull
    const double *whalf
    const double *disc


cdef inline void _close(const Params *P, Py_ssize_t j, Py_ssize_t kk, double S,
                        double *acc, double *damage, double *tau,
                        signed char *status) noexcept nogil:
    cdef double tail
    if status[j] == 1:
        tail = S * P.disc[kk] * P.tail2
    else:
        tail = S * P.disc[kk] * P.tail1
    damage[j] = (acc[j] + P.whalf[kk] * S) + tail
    if status[j] == 1:
        damage[j] = damage[j] + P.K * exp((P.q - P.r) * tau[j])
    status[j] = 2


cdef void _one_path(const Params *P, uint64_t path, double *damage, double *tau,
                    unsigned char *flag, double *acc, double *c,
                    signed char *status) noexcept nogil:
    cdef double z[4]
    cdef double u[4]
    cdef Py_ssize_t j, k, kk
    cdef Py_ssize_t n_pre = 0, n_open = P.nb
    cdef double logS1 = P.log_s0
    cdef double logS1_prev, S1, L2 = 0.0, E2 = 1.0, S, lb, dprev, dnow, prob, t, tauv
    cdef bint hit

    S1 = exp(logS1)
    for j in range(P.nb):
        acc[j] = P.whalf[0] * S1
        tau[j] = NAN
        flag[j] = 0
        if P.log_s0 >= P.log_h[j]:
            status[j] = 1
            c[j] = exp(logS1 - L2)
            tau[j] = 0.0
        else:
            status[j] = 0
            n_pre += 1
    if S1 > P.ceiling:
        for j in range(P.nb):
            if status[j] == 0:
                n_pre -= 1
            flag[j] = 1
            damage[j] = (P.whalf[0] * S1) + S1 * P.disc[0] * (P.tail2 if status[j] == 1 else P.tail1)
            if status[j] == 1:
                damage[j] = damage[j] + P.K
            status[j] = 2
        return

    logS1_prev = logS1
    for k in range(P.n_steps):
        if (k & 3) == 0:
            bb_normals4(P.seed, path, <uint64_t>(k >> 2), z)
            if n_pre > 0 and P.bridge:
                bb_uniforms4(P.seed, path, <uint64_t>(k >> 2), u)
        L2 = L2 + (P.drift2 + P.vol2 * z[k & 3])
        E2 = exp(L2)
        if n_pre > 0:
            logS1_prev = logS1
            logS1 = logS1 + (P.drift1 + P.vol1 * z[k & 3])
            S1 = exp(logS1)
        kk = k + 1
        t = kk * P.dt
        for j in range(P.nb):
            if status[j] == 2:
                continue
            if status[j] == 1:
                S = E2 * c[j]
            else:
                S = S1
                lb = P.log_h[j] + P.q * t
                hit = False
                if logS1 >= lb:
                    hit = True
                    tauv = t
                elif P.bridge and P.vol1 > 0.0:
                    dprev = (P.log_h[j] + P.q * (k * P.dt)) - logS1_prev
                    dnow = lb - logS1
                    prob = -2.0 * dprev * dnow / (P.vol1 * P.vol1)
                    # below -745.2 exp() underflows to 0 and can never beat u >= 0
                    if prob > -745.2 and u[k & 3] < exp(prob):
                        hit = True
                        tauv = t - 0.5 * P.dt
                if hit:
                    status[j] = 1
                    c[j] = exp(logS1 - L2)
                    tau[j] = tauv
                    n_pre -= 1
            if kk == P.n_steps or S > P.ceiling:
                if kk != P.n_steps:
                    flag[j] = 1
                if status[j] == 0:
                    n_pre -= 1
                _close(P, j, kk, S, acc, damage, tau, status)
                n_open -= 1
            else:
                acc[j] = acc[j] + P.wfull[kk] * S
        if n_open == 0:
            break


def simulate_block(
    uint64_t seed,
    Py_ssize_t path_start,
    Py_ssize_t n_paths,
    Py_ssize_t n_steps,
    double dt,
    double log_s0,
    double drift1,
    double vol1,
    double drift2,
    double vol2,
    double q,
    double r,
    double K,
    double tail1,
    double tail2,
    double ceiling,
    bint bridge,
    const double[::1] log_h,
    const double[::1] wfull,
    const double[::1] whalf,
    const double[::1] disc,
    int threads=1,
):
    """Simulate paths ``path_start .. path_start + n_paths - 1``.

    Returns ``(damage, tau, flag)`` arrays of shape ``(n_paths, len(log_h))``.
    ``tau`` is NaN where the barrier was never hit inside the horizon and
    ``flag`` marks paths closed early by the overflow ceiling.
    """
    cdef Py_ssize_t nb = log_h.shape[0]
    damage_a = np.empty((n_paths, nb), dtype=np.float64)
    tau_a = np.empty((n_paths, nb), dtype=np.float64)
    flag_a = np.zeros((n_paths, nb), dtype=np.uint8)
    acc_a = np.empty((n_paths, nb), dtype=np.float64)
    c_a = np.empty((n_paths, nb), dtype=np.float64)
    status_a = np.empty((n_paths, nb), dtype=np.int8)
    cdef double[:, ::1] damage = damage_a
    cdef double[:, ::1] tau = tau_a
    cdef unsigned char[:, ::1] flag = flag_a
    cdef double[:, ::1] acc = acc_a
    cdef double[:, ::1] c = c_a
    cdef signed char[:, ::1] status = status_a
    cdef Params P
    cdef Py_ssize_t p

    if nb == 0 or n_paths == 0:
        return damage_a, tau_a, flag_a
    if wfull.shape[0] < n_steps + 1 or whalf.shape[0] < n_steps + 1 or disc.shape[0] < n_steps + 1:
        raise ValueError("weight arrays must have n_steps + 1 entries")

    P.seed = seed
    P.n_steps = n_steps
    P.nb = nb
    P.dt = dt
    P.log_s0 = log_s0
    P.drift1 = drift1
    P.vol1 = vol1
    P.drift2 = drift2
    P.vol2 = vol2
    P.q = q
    P.r = r
    P.K = K
    P.tail1 = tail1
    P.tail2 = tail2
    P.ceiling = ceiling
    P.bridge = bridge
    P.log_h = &log_h[0]
    P.wfull = &wfull[0]
    P.whalf = &whalf[0]
    P.disc = &disc[0]

    for p in prange(n_paths, nogil=True, num_threads=max(threads, 1), schedule="dynamic", chunksize=64):
        _one_path(&P, <uint64_t>(path_start + p), &damage[p, 0], &tau[p, 0],
                  &flag[p, 0], &acc[p, 0], &c[p, 0], &status[p, 0])
    return damage_a, tau_a, flag_a
