"""Array-based CDCL search kernel.

One self-contained solver run per call: conflict-driven clause learning
with two watched literals, first-UIP learning, geometric restarts, phase
saving, VSIDS decisions with index tie-breaking, an optional conflict
budget, and an in-kernel projected-model enumeration mode that adds
blocking clauses without returning to Python.

Everything operates on flat numpy arrays so the identical code runs both
numba-compiled and interpreted (see :mod:`ubcount._jit`).

Internal encoding: variable v (1-based) has literal codes 2v (positive)
and 2v+1 (negative); ``code ^ 1`` negates.  The clause database ``db``
stores each clause as ``[size, next0, next1, lit0, lit1, ...]`` where
positions 0 and 1 hold the watched literals and ``next{0,1}`` chain the
per-literal watcher lists through the clauses themselves.

Statuses: mode 0 (solve) returns 1 SAT / -1 UNSAT / 0 budget exhausted.
Mode 1 (enumerate) returns 2 when the projected enumeration completed,
3 when the requested bound was reached, 0 on budget.
"""

import numpy as np

from ._jit import njit

STATUS_UNKNOWN = 0
STATUS_SAT = 1
STATUS_UNSAT = -1
STATUS_ENUM_DONE = 2
STATUS_ENUM_BOUND = 3


@njit(cache=True, nogil=True)
def _prior(act, u, v):
    # max-heap order: higher activity first, lowest index on ties
    if act[u] > act[v]:
        return True
    if act[u] < act[v]:
        return False
    return u < v


@njit(cache=True, nogil=True)
def _heap_up(heap, hpos, act, i):
    v = heap[i]
    while i > 0:
        p = (i - 1) >> 1
        if _prior(act, v, heap[p]):
            heap[i] = heap[p]
            hpos[heap[p]] = i
            i = p
        else:
            break
    heap[i] = v
    hpos[v] = i


@njit(cache=True, nogil=True)
def _heap_down(heap, hsize, hpos, act, i):
    v = heap[i]
    while True:
        left = 2 * i + 1
        if left >= hsize:
            break
        child = left
        right = left + 1
        if right < hsize and _prior(act, heap[right], heap[left]):
            child = right
        if _prior(act, heap[child], v):
            heap[i] = heap[child]
            hpos[heap[child]] = i
            i = child
        else:
            break
    heap[i] = v
    hpos[v] = i


@njit(cache=True, nogil=True)
def _heap_insert(heap, hpos, act, hsize, v):
    if hpos[v] >= 0:
        return hsize
    heap[hsize] = v
    hpos[v] = hsize
    _heap_up(heap, hpos, act, hsize)
    return hsize + 1


@njit(cache=True, nogil=True)
def _heap_pop(heap, hpos, act, hsize):
    root = heap[0]
    hpos[root] = -1
    hsize -= 1
    if hsize > 0:
        last = heap[hsize]
        heap[0] = last
        hpos[last] = 0
        _heap_down(heap, hsize, hpos, act, 0)
    return root, hsize


@njit(cache=True, nogil=True)
def _backtrack(
    to_level, trail, trail_lim, vlit, reason, polarity, heap, hpos, act,
    n_levels, trail_len, hsize,
):
    while n_levels > to_level:
        n_levels -= 1
        target = trail_lim[n_levels]
        while trail_len > target:
            code = trail[trail_len - 1]
            v = code >> 1
            polarity[v] = 1 if (code & 1) == 0 else 0
            vlit[code] = 0
            vlit[code ^ 1] = 0
            reason[v] = -1
            hsize = _heap_insert(heap, hpos, act, hsize, v)
            trail_len -= 1
    return n_levels, trail_len, hsize


@njit(cache=True, nogil=True)
def _propagate(db, whead, vlit, level, reason, trail, trail_len, qhead, cur_level):
    """Unit propagation to fixpoint.  Returns (conflict_ref, qhead, trail_len)."""
    while qhead < trail_len:
        p = trail[qhead]
        qhead += 1
        fl = p ^ 1  # this literal just became false
        cref = whead[fl]
        whead[fl] = -1  # detach the whole watcher list and rebuild it
        while cref != -1:
            size = db[cref]
            # normalize: keep fl in watch slot 1 (literal position 1)
            if db[cref + 3] == fl:
                db[cref + 3] = db[cref + 4]
                db[cref + 4] = fl
                tmp = db[cref + 1]
                db[cref + 1] = db[cref + 2]
                db[cref + 2] = tmp
            nxt = db[cref + 2]
            other = db[cref + 3]
            if vlit[other] == 1:
                db[cref + 2] = whead[fl]
                whead[fl] = cref
                cref = nxt
                continue
            found = -1
            for j in range(2, size):
                if vlit[db[cref + 3 + j]] != -1:
                    found = j
                    break
            if found >= 0:
                lj = db[cref + 3 + found]
                db[cref + 3 + found] = fl
                db[cref + 4] = lj
                db[cref + 2] = whead[lj]
                whead[lj] = cref
                cref = nxt
                continue
            # clause is unit (other unassigned) or conflicting (other false)
            db[cref + 2] = whead[fl]
            whead[fl] = cref
            if vlit[other] == -1:
                # conflict: reattach the rest of the detached list first
                while nxt != -1:
                    if db[nxt + 3] == fl:
                        db[nxt + 3] = db[nxt + 4]
                        db[nxt + 4] = fl
                        t2 = db[nxt + 1]
                        db[nxt + 1] = db[nxt + 2]
                        db[nxt + 2] = t2
                    nn = db[nxt + 2]
                    db[nxt + 2] = whead[fl]
                    whead[fl] = nxt
                    nxt = nn
                return cref, trail_len, trail_len
            v = other >> 1
            vlit[other] = 1
            vlit[other ^ 1] = -1
            level[v] = cur_level
            reason[v] = cref
            trail[trail_len] = other
            trail_len += 1
            cref = nxt
    return -1, qhead, trail_len


@njit(cache=True, nogil=True)
def run_solver(
    n_vars,
    cls_flat,
    cls_bounds,
    assumptions,
    mode,
    proj,
    bound,
    conflict_limit,
    restart_base,
    restart_mult,
    var_decay,
    model_out,
):
    n_clauses = cls_bounds.size - 1
    nlit = 2 * n_vars + 2
    n_assume = assumptions.size

    cap = cls_flat.size + 3 * n_clauses + 1024
    db = np.empty(cap, np.int32)
    db_used = 0
    whead = np.full(nlit, -1, np.int64)
    vlit = np.zeros(nlit, np.int8)
    level = np.zeros(n_vars + 1, np.int32)
    reason = np.full(n_vars + 1, -1, np.int64)
    trail = np.empty(n_vars + 1, np.int32)
    trail_len = 0
    trail_lim = np.empty(n_vars + n_assume + 2, np.int32)
    n_levels = 0
    qhead = 0
    act = np.zeros(n_vars + 1, np.float64)
    heap = np.empty(max(n_vars, 1), np.int32)
    hpos = np.full(n_vars + 1, -1, np.int32)
    hsize = 0
    polarity = np.zeros(n_vars + 1, np.int8)  # saved phase, 0 = assign false
    seen = np.zeros(n_vars + 1, np.int8)
    learnt = np.empty(n_vars + 1, np.int32)
    block = np.empty(proj.size + 1, np.int32)
    var_inc = 1.0
    conflicts_used = 0
    conflicts_since = 0
    restart_lim = float(restart_base)
    count = 0
    fail_status = STATUS_UNSAT if mode == 0 else STATUS_ENUM_DONE

    for v in range(1, n_vars + 1):
        hsize = _heap_insert(heap, hpos, act, hsize, v)

    # ingest input clauses: units go straight on the trail, the rest attach
    for ci in range(n_clauses):
        s = cls_bounds[ci]
        e = cls_bounds[ci + 1]
        ln = e - s
        if ln == 0:
            return fail_status, count, conflicts_used
        if ln == 1:
            l = cls_flat[s]
            code = 2 * l if l > 0 else -2 * l + 1
            if vlit[code] == -1:
                return fail_status, count, conflicts_used
            if vlit[code] == 0:
                vlit[code] = 1
                vlit[code ^ 1] = -1
                level[code >> 1] = 0
                trail[trail_len] = code
                trail_len += 1
            continue
        if db_used + 3 + ln > db.size:
            newdb = np.empty(max(db.size * 2, db_used + 3 + ln + 16), np.int32)
            newdb[:db_used] = db[:db_used]
            db = newdb
        ref = db_used
        db[ref] = ln
        for j in range(ln):
            l = cls_flat[s + j]
            db[ref + 3 + j] = 2 * l if l > 0 else -2 * l + 1
        db[ref + 1] = whead[db[ref + 3]]
        whead[db[ref + 3]] = ref
        db[ref + 2] = whead[db[ref + 4]]
        whead[db[ref + 4]] = ref
        db_used = ref + 3 + ln

    while True:
        confl, qhead, trail_len = _propagate(
            db, whead, vlit, level, reason, trail, trail_len, qhead, n_levels
        )
        if confl >= 0:
            conflicts_used += 1
            conflicts_since += 1
            if n_levels == 0:
                return fail_status, count, conflicts_used
            if conflicts_used > conflict_limit:
                return STATUS_UNKNOWN, count, conflicts_used

            # ---- first-UIP conflict analysis ----
            path_c = 0
            p = -1
            idx = trail_len - 1
            ln = 1
            c = confl
            while True:
                start = 0 if p == -1 else 1
                csize = db[c]
                for j in range(start, csize):
                    q = db[c + 3 + j]
                    v = q >> 1
                    if seen[v] == 0 and level[v] > 0:
                        seen[v] = 1
                        act[v] += var_inc
                        if act[v] > 1e100:
                            for u in range(1, n_vars + 1):
                                act[u] *= 1e-100
                            var_inc *= 1e-100
                        if hpos[v] >= 0:
                            _heap_up(heap, hpos, act, hpos[v])
                        if level[v] >= n_levels:
                            path_c += 1
                        else:
                            learnt[ln] = q
                            ln += 1
                while seen[trail[idx] >> 1] == 0:
                    idx -= 1
                p = trail[idx]
                c = reason[p >> 1]
                seen[p >> 1] = 0
                path_c -= 1
                idx -= 1
                if path_c <= 0:
                    break
            learnt[0] = p ^ 1
            if ln == 1:
                bt = 0
            else:
                mi = 1
                for j in range(2, ln):
                    if level[learnt[j] >> 1] > level[learnt[mi] >> 1]:
                        mi = j
                tmp = learnt[1]
                learnt[1] = learnt[mi]
                learnt[mi] = tmp
                bt = level[learnt[1] >> 1]
            for j in range(1, ln):
                seen[learnt[j] >> 1] = 0

            n_levels, trail_len, hsize = _backtrack(
                bt, trail, trail_lim, vlit, reason, polarity, heap, hpos, act,
                n_levels, trail_len, hsize,
            )
            qhead = trail_len

            # learn and assert the UIP literal
            code = learnt[0]
            if ln == 1:
                vlit[code] = 1
                vlit[code ^ 1] = -1
                level[code >> 1] = 0
                reason[code >> 1] = -1
                trail[trail_len] = code
                trail_len += 1
            else:
                if db_used + 3 + ln > db.size:
                    newdb = np.empty(max(db.size * 2, db_used + 3 + ln + 16), np.int32)
                    newdb[:db_used] = db[:db_used]
                    db = newdb
                ref = db_used
                db[ref] = ln
                for j in range(ln):
                    db[ref + 3 + j] = learnt[j]
                db[ref + 1] = whead[db[ref + 3]]
                whead[db[ref + 3]] = ref
                db[ref + 2] = whead[db[ref + 4]]
                whead[db[ref + 4]] = ref
                db_used = ref + 3 + ln
                vlit[code] = 1
                vlit[code ^ 1] = -1
                level[code >> 1] = n_levels
                reason[code >> 1] = ref
                trail[trail_len] = code
                trail_len += 1

            var_inc /= var_decay
            continue

        # ---- no conflict ----
        if trail_len == n_vars:
            # A falsified assumption here was propagation-forced from a pure
            # assumption prefix (heap decisions only start once every
            # assumption is placed), so it proves UNSAT under assumptions.
            for j in range(n_assume):
                l = assumptions[j]
                code = 2 * l if l > 0 else -2 * l + 1
                if vlit[code] == -1:
                    return fail_status, count, conflicts_used
            if mode == 0:
                for v in range(1, n_vars + 1):
                    model_out[v] = 1 if vlit[2 * v] == 1 else 0
                return STATUS_SAT, count, conflicts_used
            # enumerate: record this projection, block it, continue
            count += 1
            if count >= bound:
                return STATUS_ENUM_BOUND, count, conflicts_used
            bl = 0
            for j in range(proj.size):
                v = proj[j]
                # literal falsified by the current model
                block[bl] = 2 * v + 1 if vlit[2 * v] == 1 else 2 * v
                bl += 1
            n_levels, trail_len, hsize = _backtrack(
                0, trail, trail_lim, vlit, reason, polarity, heap, hpos, act,
                n_levels, trail_len, hsize,
            )
            qhead = trail_len
            kept = 0
            for j in range(bl):
                if vlit[block[j]] != -1:  # drop literals already false at level 0
                    block[kept] = block[j]
                    kept += 1
            if kept == 0:
                return STATUS_ENUM_DONE, count, conflicts_used
            if kept == 1:
                code = block[0]
                vlit[code] = 1
                vlit[code ^ 1] = -1
                level[code >> 1] = 0
                reason[code >> 1] = -1
                trail[trail_len] = code
                trail_len += 1
                continue
            if db_used + 3 + kept > db.size:
                newdb = np.empty(max(db.size * 2, db_used + 3 + kept + 16), np.int32)
                newdb[:db_used] = db[:db_used]
                db = newdb
            ref = db_used
            db[ref] = kept
            for j in range(kept):
                db[ref + 3 + j] = block[j]
            db[ref + 1] = whead[db[ref + 3]]
            whead[db[ref + 3]] = ref
            db[ref + 2] = whead[db[ref + 4]]
            whead[db[ref + 4]] = ref
            db_used = ref + 3 + kept
            continue

        if conflicts_since >= restart_lim and n_levels > 0:
            n_levels, trail_len, hsize = _backtrack(
                0, trail, trail_lim, vlit, reason, polarity, heap, hpos, act,
                n_levels, trail_len, hsize,
            )
            qhead = trail_len
            conflicts_since = 0
            restart_lim *= restart_mult
            continue

        # ---- decide ----
        if n_levels < n_assume:
            l = assumptions[n_levels]
            code = 2 * l if l > 0 else -2 * l + 1
            if vlit[code] == -1:
                return fail_status, count, conflicts_used
            trail_lim[n_levels] = trail_len
            n_levels += 1
            if vlit[code] == 0:
                vlit[code] = 1
                vlit[code ^ 1] = -1
                level[code >> 1] = n_levels
                reason[code >> 1] = -1
                trail[trail_len] = code
                trail_len += 1
            continue
        v = 0
        while hsize > 0:
            v, hsize = _heap_pop(heap, hpos, act, hsize)
            if vlit[2 * v] == 0:
                break
            v = 0
        if v == 0:
            # unreachable: trail_len < n_vars implies an unassigned var remains
            return STATUS_UNKNOWN, count, conflicts_used
        code = 2 * v if polarity[v] == 1 else 2 * v + 1
        trail_lim[n_levels] = trail_len
        n_levels += 1
        vlit[code] = 1
        vlit[code ^ 1] = -1
        level[v] = n_levels
        reason[v] = -1
        trail[trail_len] = code
        trail_len += 1
