# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gillespie kernel, the bit-identical twin of _gillespie_py.

The floating-point operation order here mirrors the pure-Python kernel
exactly (slot scan order, summation order, log1p waiting times), so both
kernels produce byte-identical simulation reports from the same uniform
stream. Keep the two in lockstep.
"""

from libc.math cimport log1p, sqrt


cdef inline double _bond_rate(long[::1] tau, long k, double qrate) noexcept nogil:
    cdef long a = tau[k]
    cdef long b = tau[k + 1]
    if a == b:
        return 0.0
    return 1.0 if a > b else qrate


def run_chunk(long[::1] tau, double[::1] slots, double[::1] lcol, double[::1] rcol,
              double qrate, long n_events, double[::1] u, double[::1] occ,
              long[::1] cl, long[::1] cr, long[::1] bondc, bint record, long stride,
              long start_index, long flat, long[::1] pw):
    """Advance up to n_events events; mutates tau, slots, occ, cl, cr, bondc.

    Returns (events_done, elapsed, recorded_time, flat, absorbed).
    """
    cdef long L = tau.shape[0]
    cdef long N = <long>(sqrt(<double>lcol.shape[0]) + 0.5)
    cdef long S = (L - 1) + 2 * N
    cdef long left_base = L - 1
    cdef long right_base = L - 1 + N
    cdef double elapsed = 0.0
    cdef double recorded = 0.0
    cdef bint absorbed = False
    cdef long t = 0
    cdef long s, k, j, i, a, b, chosen, last_active, base
    cdef double total, u1, u2, dt, target, acc, v

    with nogil:
        while t < n_events:
            total = 0.0
            for s in range(S):
                total += slots[s]
            if total == 0.0:
                absorbed = True
                break
            u1 = u[2 * t]
            u2 = u[2 * t + 1]
            dt = -log1p(-u1) / total
            elapsed += dt
            if record and (start_index + t) % stride == 0:
                occ[flat] += dt
                recorded += dt
            target = u2 * total
            acc = 0.0
            chosen = -1
            last_active = -1
            for s in range(S):
                v = slots[s]
                if v > 0.0:
                    last_active = s
                    acc += v
                    if target < acc:
                        chosen = s
                        break
            if chosen < 0:
                chosen = last_active
            if chosen < L - 1:
                k = chosen
                a = tau[k]
                b = tau[k + 1]
                tau[k] = b
                tau[k + 1] = a
                flat += (b - a) * pw[k] + (a - b) * pw[k + 1]
                if record:
                    bondc[k] += 1
                if k - 1 >= 0:
                    slots[k - 1] = _bond_rate(tau, k - 1, qrate)
                slots[k] = _bond_rate(tau, k, qrate)
                if k + 1 <= L - 2:
                    slots[k + 1] = _bond_rate(tau, k + 1, qrate)
                if k == 0:
                    base = tau[0] * N
                    for j in range(N):
                        slots[left_base + j] = lcol[base + j]
                if k + 1 == L - 1:
                    base = tau[L - 1] * N
                    for j in range(N):
                        slots[right_base + j] = rcol[base + j]
            elif chosen < right_base:
                j = chosen - left_base
                i = tau[0]
                tau[0] = j
                flat += (j - i) * pw[0]
                if record:
                    cl[i * N + j] += 1
                base = tau[0] * N
                for j in range(N):
                    slots[left_base + j] = lcol[base + j]
                if L == 1:
                    base = tau[L - 1] * N
                    for j in range(N):
                        slots[right_base + j] = rcol[base + j]
                else:
                    slots[0] = _bond_rate(tau, 0, qrate)
            else:
                j = chosen - right_base
                i = tau[L - 1]
                tau[L - 1] = j
                flat += (j - i) * pw[L - 1]
                if record:
                    cr[i * N + j] += 1
                base = tau[L - 1] * N
                for j in range(N):
                    slots[right_base + j] = rcol[base + j]
                if L == 1:
                    base = tau[0] * N
                    for j in range(N):
                        slots[left_base + j] = lcol[base + j]
                else:
                    slots[L - 2] = _bond_rate(tau, L - 2, qrate)
            t += 1

    return t, elapsed, recorded, flat, absorbed
