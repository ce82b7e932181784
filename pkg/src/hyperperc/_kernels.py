"""Hot numeric kernels with two interchangeable backends.

The Monte Carlo sampling / union-find / enumeration loops dominate runtime,
so they are compiled with numba when available. A pure numpy/python twin of
every kernel exists for environments without numba and for cross-checking.

Backend selection: the ``HYPERPERC_BACKEND`` environment variable may be set
to ``numba``, ``numpy`` or ``auto`` (default: auto, prefers numba).
``implementations()`` exposes both backends so tests and the benchmark can
compare them on identical inputs.

Randomness is counter-based: every uniform is a pure hash of
(seed, sample_index, vertex_index) via splitmix64-style mixing, so samples
are reproducible and embarrassingly parallel, and both backends produce
bit-identical streams.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "implementations", "kernels"]

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO_NEG53 = 2.0 ** -53

# SWAR popcount constants; safe in int64 for masks below 2**32
_PC1 = 0x5555555555555555
_PC2 = 0x3333333333333333
_PC3 = 0x0F0F0F0F0F0F0F0F
_PC4 = 0x0101010101010101


def _choose_backend() -> str:
    env = os.environ.get("HYPERPERC_BACKEND", "auto").strip().lower() or "auto"
    if env not in ("auto", "numba", "numpy"):
        raise ValueError(f"HYPERPERC_BACKEND must be auto|numba|numpy, got {env!r}")
    if env == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if env == "numba":
            raise RuntimeError("HYPERPERC_BACKEND=numba but numba is not importable")
        return "numpy"
    return "numba"


BACKEND = _choose_backend()


# ---------------------------------------------------------------------------
# numpy-side RNG (vectorized)
# ---------------------------------------------------------------------------

def _mix_np(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _stream_key_np(seed: int, index: int) -> np.uint64:
    with np.errstate(over="ignore"):
        z0 = _mix_np(np.uint64(seed) ^ _GOLD)
        z1 = _mix_np(z0 ^ (_GOLD * np.uint64(int(index) + 1)))
    return z1


def _uniforms_np(n, seed, index):
    zs = _stream_key_np(seed, index)
    v = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = _mix_np(zs ^ (_GOLD * v))
    return (h >> np.uint64(11)).astype(np.float64) * _TWO_NEG53


def _bernoulli_np(n, p, seed, index):
    return (_uniforms_np(n, seed, index) < p).astype(np.uint8)


# ---------------------------------------------------------------------------
# shared-source loop kernels (compiled under numba, interpreted otherwise)
# ---------------------------------------------------------------------------

def _uf_find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]  # path halving
        a = parent[a]
    return a


def _uf_label_src(indptr, indices, active, parent, out):
    """Union-find labelling of active vertices; label = min vertex of cluster."""
    n = active.shape[0]
    for v in range(n):
        parent[v] = v
    for v in range(n):
        if active[v] == 0:
            continue
        for j in range(indptr[v], indptr[v + 1]):
            w = indices[j]
            if w <= v or active[w] == 0:
                continue
            a = v
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            b = w
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a != b:
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b
    for v in range(n):
        if active[v] == 0:
            out[v] = -1
        else:
            a = v
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            out[v] = a
    return out


def _bfs_src(indptr, indices, sources, dist, queue):
    n = dist.shape[0]
    for v in range(n):
        dist[v] = -1
    tail = 0
    for i in range(sources.shape[0]):
        s = sources[i]
        if dist[s] == -1:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        d1 = dist[v] + 1
        for j in range(indptr[v], indptr[v + 1]):
            w = indices[j]
            if dist[w] == -1:
                dist[w] = d1
                queue[tail] = w
                tail += 1
    return dist


def _walk_check_src(indptr, indices, boundary, shift, max_steps, stamp, ok):
    """Run a label-shift walk from every dart; ok[dart]=1 if self-avoiding."""
    n = indptr.shape[0] - 1
    for j in range(indices.shape[0]):
        ok[j] = 1
    for v in range(n):
        for j in range(indptr[v], indptr[v + 1]):
            prev = v
            cur = indices[j]
            stamp[prev] = j
            stamp[cur] = j
            steps = 1
            while steps < max_steps:
                if boundary[cur] == 1:
                    break  # truncated at the patch cut
                base = indptr[cur]
                deg = indptr[cur + 1] - base
                a = -1
                for k in range(base, base + deg):
                    if indices[k] == prev:
                        a = k - base
                        break
                t = (a + shift) % deg
                nxt = indices[base + t]
                if stamp[nxt] == j:
                    ok[j] = 0
                    break
                stamp[nxt] = j
                prev = cur
                cur = nxt
                steps += 1
    return ok


def _reach_counts_src(masks, start, targets, counts):
    """Exact enumeration over open/closed states of m<=24 vertices.

    masks[v] = bitmask of neighbors of v inside the enumeration set.
    counts[t, k] += 1 for each configuration with k open vertices in which
    `start` is open and its open component meets targets[t].
    """
    m = masks.shape[0]
    tcount = targets.shape[0]
    total = 1 << m
    for cfg in range(total):
        if (cfg >> start) & 1 == 0:
            continue
        reach = 1 << start
        frontier = reach
        while frontier != 0:
            acc = 0
            for v in range(m):
                if (frontier >> v) & 1:
                    acc |= masks[v]
            newbits = acc & cfg & ~reach
            reach |= newbits
            frontier = newbits
        x = cfg - ((cfg >> 1) & _PC1)
        x = (x & _PC2) + ((x >> 2) & _PC2)
        x = (x + (x >> 4)) & _PC3
        # the masked top byte works for both int64 wrap-around (numba) and
        # arbitrary-precision ints (python)
        k = ((x * _PC4) >> 56) & 0xFF
        for t in range(tcount):
            if reach & targets[t]:
                counts[t, k] += 1
    return counts


def _pq_ball_src(p, q, radius, rot, deg, complete, dist, budget):
    """Distance-ordered {p,q} ball construction maintaining the rotation
    system.

    rot rows hold each vertex's known neighbors in counterclockwise order;
    for incomplete vertices the single truncation gap sits between the last
    and first entry. Vertices are completed in passes of increasing graph
    distance; each completion closes the vertex's face fan deterministically,
    fanning counterclockwise from the gap's trailing end. Fresh vertices get
    their distance from the shortest route around the new face to one of the
    face's pre-existing members.

    Returns vertex count, -1 on budget overflow, -2 on a structural
    inconsistency (impossible for valid {p,q} regimes).
    """
    n = 1
    dist[0] = 0
    cyc = np.empty(p, np.int32)
    for d in range(radius):
        v = 0
        while v < n:
            if dist[v] != d or complete[v] == 1:
                v += 1
                continue
            while complete[v] == 0:
                dv = deg[v]
                closing = False
                if dv == 0:
                    # first face ever (root of the patch)
                    if n + p - 1 > budget:
                        return -1
                    cyc[0] = v
                    for i in range(1, p):
                        cyc[i] = n
                        dist[n] = d + (i if i <= p - i else p - i)
                        n += 1
                else:
                    closing = dv - 1 == q - 1
                    fresh = p - 3 if closing else p - 2
                    if n + fresh > budget:
                        return -1
                    cyc[0] = v
                    cyc[1] = rot[v, dv - 1]
                    if closing:
                        cyc[p - 1] = rot[v, 0]
                    for i in range(2, 2 + fresh):
                        cyc[i] = n
                        # distance via the face's existing members
                        best = d + (i if i <= p - i else p - i)
                        ge = dist[cyc[1]] + (i - 1 if i - 1 <= p - i + 1 else p - i + 1)
                        if ge < best:
                            best = ge
                        if closing:
                            step = p - 1 - i
                            gx = dist[cyc[p - 1]] + (step if step <= p - step else p - step)
                            if gx < best:
                                best = gx
                        dist[n] = best
                        n += 1
                # splice the new ccw face cycle into every member's rotation
                for i in range(p):
                    u = cyc[i]
                    a = cyc[(i - 1) % p]
                    b = cyc[(i + 1) % p]
                    du = deg[u]
                    pos_a = -1
                    pos_b = -1
                    for k in range(du):
                        if rot[u, k] == a:
                            pos_a = k
                        elif rot[u, k] == b:
                            pos_b = k
                    if pos_a >= 0 and pos_b >= 0:
                        # closes u's fan: corner (b, a) must be the wrap gap
                        if pos_b != du - 1 or pos_a != 0 or du != q:
                            return -2
                        complete[u] = 1
                    elif pos_b >= 0:
                        if pos_b != du - 1 or du >= q:
                            return -2
                        rot[u, du] = a
                        deg[u] = du + 1
                    elif pos_a >= 0:
                        if pos_a != 0 or du >= q:
                            return -2
                        for k in range(du, 0, -1):
                            rot[u, k] = rot[u, k - 1]
                        rot[u, 0] = b
                        deg[u] = du + 1
                    else:
                        if du != 0:
                            return -2
                        rot[u, 0] = b
                        rot[u, 1] = a
                        deg[u] = 2
            v += 1
    return n


# ---------------------------------------------------------------------------
# Monte Carlo kernels: numba sources (uint64 RNG inline)
# ---------------------------------------------------------------------------

def _make_numba_impls():
    import numba
    from numba import njit

    nj = lambda f: njit(cache=True, nogil=True)(f)  # noqa: E731

    @njit(cache=True, nogil=True, inline="always")
    def mix(z):
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))

    @njit(cache=True, nogil=True, inline="always")
    def stream_key(seed, index):
        z0 = mix(np.uint64(seed) ^ _GOLD)
        return mix(z0 ^ (_GOLD * np.uint64(index + 1)))

    @njit(cache=True, nogil=True)
    def uniforms(n, seed, index):
        zs = stream_key(seed, index)
        out = np.empty(n, np.float64)
        for v in range(n):
            h = mix(zs ^ (_GOLD * np.uint64(v + 1)))
            out[v] = np.float64(h >> np.uint64(11)) * _TWO_NEG53
        return out

    @njit(cache=True, nogil=True)
    def bernoulli(n, p, seed, index):
        zs = stream_key(seed, index)
        out = np.empty(n, np.uint8)
        for v in range(n):
            h = mix(zs ^ (_GOLD * np.uint64(v + 1)))
            u = np.float64(h >> np.uint64(11)) * _TWO_NEG53
            out[v] = 1 if u < p else 0
        return out

    uf_find = njit(cache=True, nogil=True, inline="always")(_uf_find)

    @njit(cache=True, nogil=True)
    def _fill_states(states, zs, p, state, n):
        for v in range(n):
            h = mix(zs ^ (_GOLD * np.uint64(v + 1)))
            u = np.float64(h >> np.uint64(11)) * _TWO_NEG53
            open_v = 1 if u < p else 0
            states[v] = 1 if open_v == state else 0

    @njit(cache=True, nogil=True)
    def _uf_pass(indptr, indices, active, parent):
        n = active.shape[0]
        for v in range(n):
            parent[v] = v
        for v in range(n):
            if active[v] == 0:
                continue
            for j in range(indptr[v], indptr[v + 1]):
                w = indices[j]
                if w <= v or active[w] == 0:
                    continue
                a = uf_find(parent, v)
                b = uf_find(parent, w)
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b

    @njit(cache=True, nogil=True)
    def pairs_connect_mc(indptr, indices, a_indptr, a_idx, b_indptr, b_idx,
                         p, seed, index0, nsamples, state):
        n = indptr.shape[0] - 1
        npairs = a_indptr.shape[0] - 1
        z0 = mix(np.uint64(seed) ^ _GOLD)
        active = np.empty(n, np.uint8)
        parent = np.empty(n, np.int64)
        aroots = np.empty(a_idx.shape[0], np.int64)
        hits = np.zeros(npairs, np.int64)
        for s in range(nsamples):
            zs = mix(z0 ^ (_GOLD * np.uint64(index0 + s + 1)))
            _fill_states(active, zs, p, state, n)
            _uf_pass(indptr, indices, active, parent)
            for t in range(npairs):
                na = 0
                for i in range(a_indptr[t], a_indptr[t + 1]):
                    a = a_idx[i]
                    if active[a] == 1:
                        aroots[na] = uf_find(parent, a)
                        na += 1
                if na == 0:
                    continue
                hit = 0
                for i in range(b_indptr[t], b_indptr[t + 1]):
                    b = b_idx[i]
                    if active[b] == 1:
                        rb = uf_find(parent, b)
                        for k in range(na):
                            if aroots[k] == rb:
                                hit = 1
                                break
                    if hit == 1:
                        break
                hits[t] += hit
        return hits

    @njit(cache=True, nogil=True)
    def crossing_count_mc(indptr, indices, core, boundary, p, seed, index0,
                          nsamples, state):
        n = indptr.shape[0] - 1
        z0 = mix(np.uint64(seed) ^ _GOLD)
        active = np.empty(n, np.uint8)
        parent = np.empty(n, np.int64)
        core_touch = np.zeros(n, np.uint8)
        bnd_touch = np.zeros(n, np.uint8)
        out = np.zeros(nsamples, np.int64)
        for s in range(nsamples):
            zs = mix(z0 ^ (_GOLD * np.uint64(index0 + s + 1)))
            _fill_states(active, zs, p, state, n)
            _uf_pass(indptr, indices, active, parent)
            cnt = 0
            for v in range(n):
                if active[v] == 0:
                    continue
                if core[v] == 0 and boundary[v] == 0:
                    continue
                r = uf_find(parent, v)
                if core[v] == 1:
                    core_touch[r] = 1
                if boundary[v] == 1:
                    bnd_touch[r] = 1
            for v in range(n):
                if active[v] == 1 and parent[v] == v:
                    if core_touch[v] == 1 and bnd_touch[v] == 1:
                        cnt += 1
            out[s] = cnt
            for v in range(n):
                core_touch[v] = 0
                bnd_touch[v] = 0
        return out

    @njit(cache=True, nogil=True)
    def phi_mc_counts(indptr, indices, v_local, f_indptr, f_indices, p, seed,
                      index0, nsamples):
        m = indptr.shape[0] - 1
        nf = f_indptr.shape[0] - 1
        z0 = mix(np.uint64(seed) ^ _GOLD)
        open_ = np.empty(m, np.uint8)
        reached = np.empty(m, np.uint8)
        queue = np.empty(m, np.int64)
        out = np.zeros(nsamples, np.int64)
        for s in range(nsamples):
            zs = mix(z0 ^ (_GOLD * np.uint64(index0 + s + 1)))
            _fill_states(open_, zs, p, 1, m)
            for v in range(m):
                reached[v] = 0
            cnt = 0
            if open_[v_local] == 1:
                reached[v_local] = 1
                queue[0] = v_local
                tail = 1
                head = 0
                while head < tail:
                    v = queue[head]
                    head += 1
                    for j in range(indptr[v], indptr[v + 1]):
                        w = indices[j]
                        if open_[w] == 1 and reached[w] == 0:
                            reached[w] = 1
                            queue[tail] = w
                            tail += 1
                for y in range(nf):
                    for j in range(f_indptr[y], f_indptr[y + 1]):
                        if reached[f_indices[j]] == 1:
                            cnt += 1
                            break
            out[s] = cnt
        return out

    impls = {
        "uniforms": uniforms,
        "bernoulli": bernoulli,
        "pairs_connect_mc": pairs_connect_mc,
        "crossing_count_mc": crossing_count_mc,
        "phi_mc_counts": phi_mc_counts,
        "uf_label": nj(_uf_label_src),
        "bfs": nj(_bfs_src),
        "walk_check": nj(_walk_check_src),
        "reach_counts": nj(_reach_counts_src),
        "pq_ball": nj(_pq_ball_src),
    }
    return impls


# ---------------------------------------------------------------------------
# pure numpy/python twins of the Monte Carlo kernels
# ---------------------------------------------------------------------------

def _states_for_sample(n, p, seed, index, state):
    st = _bernoulli_np(n, p, seed, index)
    if state == 0:
        st = (1 - st).astype(np.uint8)
    return st


def _pairs_connect_py(indptr, indices, a_indptr, a_idx, b_indptr, b_idx,
                      p, seed, index0, nsamples, state):
    n = indptr.shape[0] - 1
    npairs = a_indptr.shape[0] - 1
    parent = np.empty(n, np.int64)
    labels = np.empty(n, np.int64)
    hits = np.zeros(npairs, np.int64)
    for s in range(nsamples):
        active = _states_for_sample(n, p, seed, index0 + s, state)
        _uf_label_src(indptr, indices, active, parent, labels)
        for t in range(npairs):
            ar = {labels[a] for a in a_idx[a_indptr[t]:a_indptr[t + 1]]
                  if active[a]}
            if not ar:
                continue
            for b in b_idx[b_indptr[t]:b_indptr[t + 1]]:
                if active[b] and labels[b] in ar:
                    hits[t] += 1
                    break
    return hits


def _crossing_count_py(indptr, indices, core, boundary, p, seed, index0,
                       nsamples, state):
    n = indptr.shape[0] - 1
    parent = np.empty(n, np.int64)
    labels = np.empty(n, np.int64)
    out = np.zeros(nsamples, np.int64)
    core_b = core.astype(bool)
    bnd_b = boundary.astype(bool)
    for s in range(nsamples):
        active = _states_for_sample(n, p, seed, index0 + s, state)
        _uf_label_src(indptr, indices, active, parent, labels)
        act = active.astype(bool)
        core_roots = set(labels[act & core_b].tolist())
        bnd_roots = set(labels[act & bnd_b].tolist())
        out[s] = len(core_roots & bnd_roots)
    return out


def _phi_mc_counts_py(indptr, indices, v_local, f_indptr, f_indices, p, seed,
                      index0, nsamples):
    m = indptr.shape[0] - 1
    nf = f_indptr.shape[0] - 1
    out = np.zeros(nsamples, np.int64)
    for s in range(nsamples):
        open_ = _bernoulli_np(m, p, seed, index0 + s)
        if not open_[v_local]:
            continue
        reached = np.zeros(m, np.uint8)
        reached[v_local] = 1
        stack = [v_local]
        while stack:
            v = stack.pop()
            for j in range(indptr[v], indptr[v + 1]):
                w = indices[j]
                if open_[w] and not reached[w]:
                    reached[w] = 1
                    stack.append(w)
        cnt = 0
        for y in range(nf):
            for j in range(f_indptr[y], f_indptr[y + 1]):
                if reached[f_indices[j]]:
                    cnt += 1
                    break
        out[s] = cnt
    return out


def _make_numpy_impls():
    return {
        "uniforms": lambda n, seed, index: _uniforms_np(n, seed, index),
        "bernoulli": lambda n, p, seed, index: _bernoulli_np(n, p, seed, index),
        "pairs_connect_mc": _pairs_connect_py,
        "crossing_count_mc": _crossing_count_py,
        "phi_mc_counts": _phi_mc_counts_py,
        "uf_label": _uf_label_src,
        "bfs": _bfs_src,
        "walk_check": _walk_check_src,
        "reach_counts": _reach_counts_src,
        "pq_ball": _pq_ball_src,
    }


_IMPLS = {"numpy": _make_numpy_impls()}
if BACKEND == "numba":
    _IMPLS["numba"] = _make_numba_impls()


def implementations():
    """Mapping backend name -> kernel dict (for tests and the benchmark)."""
    return _IMPLS


def kernels():
    """Kernel dict for the active backend."""
    return _IMPLS[BACKEND]


# -- convenience wrappers used across the package ---------------------------

def uniforms(n, seed, index):
    return kernels()["uniforms"](int(n), int(seed), int(index))


def bernoulli(n, p, seed, index):
    return kernels()["bernoulli"](int(n), float(p), int(seed), int(index))


def uf_label(indptr, indices, active):
    n = active.shape[0]
    parent = np.empty(n, np.int64)
    out = np.empty(n, np.int64)
    return kernels()["uf_label"](indptr, indices, active, parent, out)


def bfs_distances(indptr, indices, sources):
    n = indptr.shape[0] - 1
    dist = np.empty(n, np.int32)
    queue = np.empty(n, np.int64)
    src = np.asarray(sources, dtype=np.int64)
    return kernels()["bfs"](indptr, indices, src, dist, queue)


def walk_check(indptr, indices, boundary, shift, max_steps):
    n = indptr.shape[0] - 1
    stamp = np.full(n, -1, np.int64)
    ok = np.empty(indices.shape[0], np.uint8)
    return kernels()["walk_check"](indptr, indices, boundary, int(shift),
                                   int(max_steps), stamp, ok)


def reach_counts(masks, start, targets):
    m = masks.shape[0]
    counts = np.zeros((targets.shape[0], m + 1), np.int64)
    return kernels()["reach_counts"](masks, int(start), targets, counts)


def _flatten_sets(sets):
    indptr = np.zeros(len(sets) + 1, dtype=np.int64)
    for i, s in enumerate(sets):
        indptr[i + 1] = indptr[i] + len(s)
    idx = np.empty(indptr[-1], dtype=np.int64)
    pos = 0
    for s in sets:
        for x in s:
            idx[pos] = int(x)
            pos += 1
    return indptr, idx


def pairs_connect_mc(indptr, indices, a_sets, b_sets, p, seed, index0,
                     nsamples, state):
    """Per-pair hit counts of the events {open a-set <-> open b-set}."""
    a_indptr, a_idx = _flatten_sets(a_sets)
    b_indptr, b_idx = _flatten_sets(b_sets)
    return kernels()["pairs_connect_mc"](
        indptr, indices, a_indptr, a_idx, b_indptr, b_idx,
        float(p), int(seed), int(index0), int(nsamples), int(state))


def crossing_count_mc(indptr, indices, core, boundary, p, seed, index0,
                      nsamples, state):
    return kernels()["crossing_count_mc"](
        indptr, indices, core, boundary, float(p), int(seed), int(index0),
        int(nsamples), int(state))


def phi_mc_counts(indptr, indices, v_local, f_indptr, f_indices, p, seed,
                  index0, nsamples):
    return kernels()["phi_mc_counts"](
        indptr, indices, int(v_local), f_indptr, f_indices, float(p),
        int(seed), int(index0), int(nsamples))


def pq_ball(p, q, radius, budget):
    """Run the ball generator, growing the preallocated arrays geometrically.

    Returns (n, rot, deg, complete, dist); n == -1 signals budget overflow,
    n == -2 a structural inconsistency (generator bug).
    """
    fill = kernels()["pq_ball"]
    cap = 4096
    while True:
        cap = min(cap, int(budget))
        rot = np.full((cap, q), -1, np.int32)
        deg = np.zeros(cap, np.int32)
        complete = np.zeros(cap, np.uint8)
        dist = np.zeros(cap, np.int32)
        n = int(fill(int(p), int(q), int(radius), rot, deg, complete, dist, cap))
        if n == -1 and cap < int(budget):
            cap *= 8
            continue
        return n, rot, deg, complete, dist
