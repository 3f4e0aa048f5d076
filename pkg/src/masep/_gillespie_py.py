"""Pure-Python Gillespie kernel; the reference for the compiled twin.

Both kernels must execute the *identical* sequence of IEEE double operations
so that simulations agree bit for bit whichever one is selected: the slot
order, the summation order, and the waiting-time/selection formulas below are
part of the kernel contract. Change one, change both.

Transition slot layout, in scan order:
    slots[0 .. L-2]          bond swaps (bond k joins sites k, k+1)
    slots[L-1 .. L-2+N]      left boundary, target species 0..N-1
    slots[L-1+N .. L-2+2N]   right boundary, target species 0..N-1

Each event consumes exactly two uniforms: waiting time, then selection.
Recorded tallies: dwell time per configuration (occ, thinned by stride),
boundary transition counts per ordered species pair (cl, cr, row-major
source*N+target), and per-bond swap counts (bondc).
"""

from math import isqrt, log1p


def run_chunk(tau, slots, lcol, rcol, qrate, n_events, u, occ, cl, cr, bondc,
              record, stride, start_index, flat, pw):
    """Advance up to n_events events; mutates tau, slots, occ, cl, cr, bondc.

    Returns (events_done, elapsed, recorded_time, flat, absorbed).
    """
    L = len(tau)
    N = isqrt(len(lcol))
    S = (L - 1) + 2 * N
    t_list = [int(x) for x in tau]
    s_list = [float(x) for x in slots]
    lc = [float(x) for x in lcol]
    rc = [float(x) for x in rcol]
    pwl = [int(x) for x in pw]
    uu = u.tolist() if hasattr(u, "tolist") else list(u)
    q = float(qrate)
    left_base = L - 1
    right_base = L - 1 + N

    def bond_rate(k):
        a, b = t_list[k], t_list[k + 1]
        if a == b:
            return 0.0
        return 1.0 if a > b else q

    def refresh_bond(k):
        if 0 <= k <= L - 2:
            s_list[k] = bond_rate(k)

    def refresh_left():
        base = t_list[0] * N
        for j in range(N):
            s_list[left_base + j] = lc[base + j]

    def refresh_right():
        base = t_list[L - 1] * N
        for j in range(N):
            s_list[right_base + j] = rc[base + j]

    elapsed = 0.0
    recorded = 0.0
    absorbed = False
    t = 0
    while t < n_events:
        total = 0.0
        for s in range(S):
            total += s_list[s]
        if total == 0.0:
            absorbed = True
            break
        u1 = uu[2 * t]
        u2 = uu[2 * t + 1]
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
            v = s_list[s]
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
            a, b = t_list[k], t_list[k + 1]
            t_list[k], t_list[k + 1] = b, a
            flat += (b - a) * pwl[k] + (a - b) * pwl[k + 1]
            if record:
                bondc[k] += 1
            refresh_bond(k - 1)
            refresh_bond(k)
            refresh_bond(k + 1)
            if k == 0:
                refresh_left()
            if k + 1 == L - 1:
                refresh_right()
        elif chosen < right_base:
            j = chosen - left_base
            i = t_list[0]
            t_list[0] = j
            flat += (j - i) * pwl[0]
            if record:
                cl[i * N + j] += 1
            refresh_left()
            if L == 1:
                refresh_right()
            else:
                refresh_bond(0)
        else:
            j = chosen - right_base
            i = t_list[L - 1]
            t_list[L - 1] = j
            flat += (j - i) * pwl[L - 1]
            if record:
                cr[i * N + j] += 1
            refresh_right()
            if L == 1:
                refresh_left()
            else:
                refresh_bond(L - 2)
        t += 1
    for k in range(L):
        tau[k] = t_list[k]
    for s in range(S):
        slots[s] = s_list[s]
    return t, elapsed, recorded, flat, absorbed
