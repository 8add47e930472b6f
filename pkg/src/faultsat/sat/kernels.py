"""CDCL search kernel.

Everything here sticks to the numba nopython subset so the same source runs
compiled or interpreted (see ``faultsat._jit``).

Literal encoding inside the kernel: variable ``v`` (1-based) gives the positive
literal ``2*v`` and the negative literal ``2*v + 1``; negation is ``l ^ 1``.
Clause ``c`` owns ``lits[cstart[c]:cstart[c] + clen[c]]``.  Watch node
``2*c + k`` sits in the watch list of ``lits[cstart[c] + k]`` for k in {0, 1};
lists are singly linked through ``wnext`` and heads live in ``whead``.
"""

import numpy as np

from faultsat._jit import kernel

LEARNT = 1
DELETED = 2

SAT = 1
UNSAT = 0
UNKNOWN = -1


@kernel
def _val(assigns, lit):
    a = assigns[lit >> 1]
    if a < 0:
        return -1
    return a ^ (lit & 1)


@kernel
def _heap_up(heap, hpos, act, i):
    v = heap[i]
    while i > 0:
        p = (i - 1) >> 1
        u = heap[p]
        if act[v] > act[u] or (act[v] == act[u] and v < u):
            heap[i] = u
            hpos[u] = i
            i = p
        else:
            break
    heap[i] = v
    hpos[v] = i


@kernel
def _heap_down(heap, hpos, act, hsize, i):
    v = heap[i]
    while True:
        c = 2 * i + 1
        if c >= hsize:
            break
        if c + 1 < hsize:
            a = heap[c]
            b = heap[c + 1]
            if act[b] > act[a] or (act[b] == act[a] and b < a):
                c += 1
        u = heap[c]
        if act[u] > act[v] or (act[u] == act[v] and u < v):
            heap[i] = u
            hpos[u] = i
            i = c
        else:
            break
    heap[i] = v
    hpos[v] = i


@kernel
def _heap_insert(heap, hpos, act, hs, v):
    n = hs[0]
    heap[n] = v
    hpos[v] = n
    hs[0] = n + 1
    _heap_up(heap, hpos, act, n)


@kernel
def _heap_pop(heap, hpos, act, hs):
    v = heap[0]
    n = hs[0] - 1
    hs[0] = n
    hpos[v] = -1
    if n > 0:
        heap[0] = heap[n]
        hpos[heap[0]] = 0
        _heap_down(heap, hpos, act, n, 0)
    return v


@kernel
def _bump(v, act, inc, heap, hpos):
    act[v] += inc[0]
    if act[v] > 1e100:
        for i in range(act.shape[0]):
            act[i] *= 1e-100
        inc[0] *= 1e-100
    if hpos[v] >= 0:
        _heap_up(heap, hpos, act, hpos[v])


@kernel
def _luby(y, x):
    size = 1
    seq = 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return y**seq


@kernel
def _grow_i32(a, need):
    if need <= a.shape[0]:
        return a
    b = np.empty(max(need, 2 * a.shape[0] + 16), dtype=np.int32)
    b[: a.shape[0]] = a
    return b


@kernel
def _grow_i64(a, need):
    if need <= a.shape[0]:
        return a
    b = np.empty(max(need, 2 * a.shape[0] + 16), dtype=np.int64)
    b[: a.shape[0]] = a
    return b


@kernel
def _grow_i8(a, need):
    if need <= a.shape[0]:
        return a
    b = np.zeros(max(need, 2 * a.shape[0] + 16), dtype=np.int8)
    b[: a.shape[0]] = a
    return b


@kernel
def _propagate(lits, cstart, clen, cflags, whead, wnext, assigns, level, reason, trail, st, dlevel):
    tlen = st[0]
    qhead = st[1]
    confl = -1
    while qhead < tlen:
        p = trail[qhead]
        qhead += 1
        fl = p ^ 1
        prev = -1
        node = whead[fl]
        while node != -1:
            nxt = wnext[node]
            c = node >> 1
            if cflags[c] & DELETED:
                if prev == -1:
                    whead[fl] = nxt
                else:
                    wnext[prev] = nxt
                node = nxt
                continue
            k = node & 1
            s = cstart[c]
            other = lits[s + 1 - k]
            ov = _val(assigns, other)
            if ov == 1:
                prev = node
                node = nxt
                continue
            moved = False
            for j in range(s + 2, s + clen[c]):
                lj = lits[j]
                if _val(assigns, lj) != 0:
                    lits[j] = fl
                    lits[s + k] = lj
                    if prev == -1:
                        whead[fl] = nxt
                    else:
                        wnext[prev] = nxt
                    wnext[node] = whead[lj]
                    whead[lj] = node
                    moved = True
                    break
            if moved:
                node = nxt
                continue
            if ov == 0:
                confl = c
                break
            v = other >> 1
            assigns[v] = 1 - (other & 1)
            level[v] = dlevel
            reason[v] = c
            trail[tlen] = other
            tlen += 1
            prev = node
            node = nxt
        if confl >= 0:
            qhead = tlen
            break
    st[0] = tlen
    st[1] = qhead
    return confl


@kernel
def _analyze(confl, lits, cstart, clen, level, reason, trail, tlen, dlevel, seen, buf, act, inc, heap, hpos):
    """First-UIP learning; returns (learnt length, backjump level)."""
    path = 0
    p = -1
    outlen = 1
    idx = tlen - 1
    c = confl
    while True:
        s = cstart[c]
        for j in range(s, s + clen[c]):
            q = lits[j]
            v = q >> 1
            if p != -1 and v == (p >> 1):
                continue
            if seen[v] == 0 and level[v] > 0:
                _bump(v, act, inc, heap, hpos)
                seen[v] = 1
                if level[v] >= dlevel:
                    path += 1
                else:
                    buf[outlen] = q
                    outlen += 1
        while seen[trail[idx] >> 1] == 0:
            idx -= 1
        p = trail[idx]
        idx -= 1
        v = p >> 1
        c = reason[v]
        seen[v] = 0
        path -= 1
        if path <= 0:
            break
    buf[0] = p ^ 1
    orig = buf[:outlen].copy()
    # drop literals implied by the rest of the clause (local minimisation)
    j = 1
    for i in range(1, outlen):
        q = buf[i]
        r = reason[q >> 1]
        keep = True
        if r >= 0:
            keep = False
            s = cstart[r]
            for t in range(s, s + clen[r]):
                u = lits[t] >> 1
                if u != (q >> 1) and seen[u] == 0 and level[u] > 0:
                    keep = True
                    break
        if keep:
            buf[j] = q
            j += 1
    for i in range(1, outlen):
        seen[orig[i] >> 1] = 0
    outlen = j
    bt = 0
    mi = 1
    for i in range(1, outlen):
        lv = level[buf[i] >> 1]
        if lv > bt:
            bt = lv
            mi = i
    if outlen > 1:
        t = buf[1]
        buf[1] = buf[mi]
        buf[mi] = t
    return outlen, bt


@kernel
def _analyze_final(p, lits, cstart, clen, level, reason, trail, tlen, tstart, seen, out):
    """Collect the assumption decisions that force ``p`` false; writes into ``out``."""
    n = 1
    out[0] = p
    if level[p >> 1] == 0:
        return n
    seen[p >> 1] = 1
    for i in range(tlen - 1, tstart - 1, -1):
        x = trail[i] >> 1
        if seen[x]:
            r = reason[x]
            if r < 0:
                out[n] = trail[i]
                n += 1
            else:
                s = cstart[r]
                for t in range(s, s + clen[r]):
                    u = lits[t] >> 1
                    if u != x and level[u] > 0:
                        seen[u] = 1
            seen[x] = 0
    seen[p >> 1] = 0
    return n


@kernel
def _backtrack(lvl, dlevel, assigns, reason, trail, trail_lim, st, phase, act, heap, hpos, hs):
    if dlevel <= lvl:
        return
    start = trail_lim[lvl + 1]
    for i in range(st[0] - 1, start - 1, -1):
        v = trail[i] >> 1
        phase[v] = assigns[v]
        assigns[v] = -1
        reason[v] = -1
        if hpos[v] < 0:
            _heap_insert(heap, hpos, act, hs, v)
    st[0] = start
    st[1] = start


@kernel
def _reduce_db(cstart, clen, cflags, ncl, lits, assigns, reason):
    """Delete the longer half of unlocked learnt clauses (length > 2)."""
    cand = np.empty(ncl, dtype=np.int64)
    m = 0
    for c in range(ncl):
        if (cflags[c] & LEARNT) and not (cflags[c] & DELETED) and clen[c] > 2:
            s = cstart[c]
            a = lits[s] >> 1
            b = lits[s + 1] >> 1
            if (assigns[a] >= 0 and reason[a] == c) or (assigns[b] >= 0 and reason[b] == c):
                continue
            cand[m] = c
            m += 1
    if m == 0:
        return 0
    keys = np.empty(m, dtype=np.int64)
    for i in range(m):
        keys[i] = -clen[cand[i]]
    order = np.argsort(keys, kind="mergesort")
    for i in range(m // 2):
        cflags[cand[order[i]]] |= DELETED
    return m // 2


@kernel
def cdcl(nvars, lits, nlits, cstart, clen, cflags, ncl, assumptions, act, phase, max_conflicts):
    """Solve the stored clauses under ``assumptions``.

    Returns ``(status, assigns, core, lits, nlits, cstart, clen, cflags, ncl,
    conflicts)``; learnt clauses are appended to the clause arrays so the
    caller can keep them for the next call.  ``act`` and ``phase`` are updated
    in place.
    """
    n = nvars
    assigns = np.full(n + 1, -1, dtype=np.int8)
    level = np.zeros(n + 1, dtype=np.int32)
    reason = np.full(n + 1, -1, dtype=np.int32)
    trail = np.zeros(n + 1, dtype=np.int32)
    trail_lim = np.zeros(n + 2, dtype=np.int64)
    st = np.zeros(2, dtype=np.int64)
    seen = np.zeros(n + 1, dtype=np.int8)
    buf = np.zeros(n + 2, dtype=np.int32)
    core = np.zeros(0, dtype=np.int32)
    inc = np.ones(1, dtype=np.float64)
    heap = np.zeros(n + 1, dtype=np.int32)
    hpos = np.full(n + 1, -1, dtype=np.int32)
    hs = np.zeros(1, dtype=np.int64)
    whead = np.full(2 * n + 2, -1, dtype=np.int32)
    wnext = np.full(2 * cstart.shape[0], -1, dtype=np.int32)
    for v in range(1, n + 1):
        _heap_insert(heap, hpos, act, hs, v)

    status = -2
    n_learnt = 0
    n_orig = 0
    for c in range(ncl):
        if cflags[c] & DELETED:
            continue
        if cflags[c] & LEARNT:
            n_learnt += 1
        else:
            n_orig += 1
        if clen[c] >= 2:
            s = cstart[c]
            node = 2 * c
            wnext[node] = whead[lits[s]]
            whead[lits[s]] = node
            wnext[node + 1] = whead[lits[s + 1]]
            whead[lits[s + 1]] = node + 1
    for c in range(ncl):
        if cflags[c] & DELETED:
            continue
        if clen[c] == 0:
            status = UNSAT
            break
        if clen[c] == 1:
            q = lits[cstart[c]]
            qv = _val(assigns, q)
            if qv == 0:
                status = UNSAT
                break
            if qv < 0:
                v = q >> 1
                assigns[v] = 1 - (q & 1)
                level[v] = 0
                reason[v] = -1
                trail[st[0]] = q
                st[0] += 1

    max_learnts = max(n_orig // 3, 4000) + n_learnt
    dlevel = 0
    conflicts = 0
    restart_no = 0
    restart_limit = 100 * _luby(2.0, 0)
    since_restart = 0
    nassump = assumptions.shape[0]

    while status == -2:
        confl = _propagate(lits, cstart, clen, cflags, whead, wnext, assigns, level, reason, trail, st, dlevel)
        if confl >= 0:
            conflicts += 1
            since_restart += 1
            if dlevel == 0:
                status = UNSAT
                break
            outlen, bt = _analyze(
                confl, lits, cstart, clen, level, reason, trail, st[0], dlevel, seen, buf, act, inc, heap, hpos
            )
            _backtrack(bt, dlevel, assigns, reason, trail, trail_lim, st, phase, act, heap, hpos, hs)
            dlevel = bt
            if ncl + 1 > cstart.shape[0]:
                cstart = _grow_i64(cstart, ncl + 1)
                clen = _grow_i32(clen, cstart.shape[0])
                cflags = _grow_i8(cflags, cstart.shape[0])
                w2 = np.full(2 * cstart.shape[0], -1, dtype=np.int32)
                w2[: wnext.shape[0]] = wnext
                wnext = w2
            lits = _grow_i32(lits, nlits + outlen)
            c = ncl
            cstart[c] = nlits
            clen[c] = outlen
            cflags[c] = LEARNT
            for i in range(outlen):
                lits[nlits + i] = buf[i]
            nlits += outlen
            ncl += 1
            n_learnt += 1
            q = buf[0]
            v = q >> 1
            if outlen >= 2:
                wnext[2 * c] = whead[buf[0]]
                whead[buf[0]] = 2 * c
                wnext[2 * c + 1] = whead[buf[1]]
                whead[buf[1]] = 2 * c + 1
                reason[v] = c
            else:
                reason[v] = -1
            assigns[v] = 1 - (q & 1)
            level[v] = dlevel
            trail[st[0]] = q
            st[0] += 1
            inc[0] /= 0.95
            continue

        if max_conflicts >= 0 and conflicts >= max_conflicts:
            status = UNKNOWN
            break
        if since_restart >= restart_limit:
            _backtrack(0, dlevel, assigns, reason, trail, trail_lim, st, phase, act, heap, hpos, hs)
            dlevel = 0
            restart_no += 1
            restart_limit = 100 * _luby(2.0, restart_no)
            since_restart = 0
            continue
        if n_learnt > max_learnts:
            n_learnt -= _reduce_db(cstart, clen, cflags, ncl, lits, assigns, reason)
            max_learnts += max_learnts // 10

        nxt = -1
        while dlevel < nassump:
            p = assumptions[dlevel]
            pv = _val(assigns, p)
            if pv == 1:
                dlevel += 1
                trail_lim[dlevel] = st[0]
            elif pv == 0:
                out = np.zeros(nassump + 1, dtype=np.int32)
                tstart = trail_lim[1] if dlevel >= 1 else 0
                m = _analyze_final(p, lits, cstart, clen, level, reason, trail, st[0], tstart, seen, out)
                core = out[:m].copy()
                status = UNSAT
                break
            else:
                nxt = p
                break
        if status != -2:
            break
        if nxt == -1:
            while hs[0] > 0:
                v = _heap_pop(heap, hpos, act, hs)
                if assigns[v] < 0:
                    if phase[v] == 1:
                        nxt = 2 * v
                    else:
                        nxt = 2 * v + 1
                    break
            if nxt == -1:
                status = SAT
                break
        dlevel += 1
        trail_lim[dlevel] = st[0]
        v = nxt >> 1
        assigns[v] = 1 - (nxt & 1)
        level[v] = dlevel
        reason[v] = -1
        trail[st[0]] = nxt
        st[0] += 1

    for v in range(1, n + 1):
        if assigns[v] >= 0:
            phase[v] = assigns[v]
    return status, assigns, core, lits, nlits, cstart, clen, cflags, ncl, conflicts


@kernel
def brute_force_eval(nvars, lits, cstart, clen, n_hard, soft_weights):
    """Exhaustive oracle over all ``2**nvars`` assignments.

    Clauses ``[0, n_hard)`` are hard, the rest soft with ``soft_weights``.
    Literals use the external signed encoding.  Returns ``(min_cost, count)``
    where ``count`` is the number of assignments attaining it, or ``(-1, 0)``
    when the hard clauses are unsatisfiable.
    """
    ncl = cstart.shape[0]
    best = -1
    count = 0
    for a in range(1 << nvars):
        ok = True
        cost = 0
        for c in range(ncl):
            sat = False
            for j in range(cstart[c], cstart[c] + clen[c]):
                l = lits[j]
                v = l if l > 0 else -l
                bit = (a >> (v - 1)) & 1
                if (l > 0 and bit == 1) or (l < 0 and bit == 0):
                    sat = True
                    break
            if not sat:
                if c < n_hard:
                    ok = False
                    break
                cost += soft_weights[c - n_hard]
        if not ok:
            continue
        if best < 0 or cost < best:
            best = cost
            count = 1
        elif cost == best:
            count += 1
    return best, count
