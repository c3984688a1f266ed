"""Hot loops, compiled with numba when available.

Every kernel exists in two flavours:

* ``py_<name>``: plain Python / numpy, always importable;
* ``nb_<name>``: the same source compiled with ``numba.njit``.

The public name ``<name>`` is bound to the numba flavour unless the
environment variable ``ADDCOAL_NO_NUMBA`` is set to a truthy value (or numba
is missing), in which case it falls back to the plain flavour.  Results are
identical in both paths; only speed differs (see ``benchmarks/``).

All vertex ids inside kernels are 0-based.
"""
from __future__ import annotations

import heapq
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _flag("ADDCOAL_NO_NUMBA")


def _compile(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


# ---------------------------------------------------------------------------
# Pruefer decoding


def py_prufer_decode(seq, n):
    """Linear-time Pruefer decoding; returns edge endpoint arrays (0-based)."""
    eu = np.empty(max(n - 1, 0), dtype=np.int64)
    ev = np.empty(max(n - 1, 0), dtype=np.int64)
    if n < 2:
        return eu, ev
    degree = np.ones(n, dtype=np.int64)
    for x in seq:
        degree[x] += 1
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for i in range(n - 2):
        x = seq[i]
        eu[i] = leaf
        ev[i] = x
        degree[x] -= 1
        if degree[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    eu[n - 2] = leaf
    ev[n - 2] = n - 1
    return eu, ev


# ---------------------------------------------------------------------------
# Reverse-time union-find: the genealogy (merge tree) of the cuts


def py_merge_tree(n, eu, ev, order):
    """Replay edges from the last cut to the first, merging components.

    ``order`` lists edge indices by increasing cut time; branchpoint ``k``
    (node id ``n + k``) is the k-th cut.  Returns ``(child_a, child_b, size)``
    where ``child_a[k]`` is the node holding ``eu[order[k]]`` just after the
    cut, and ``size`` gives the vertex count of every node (leaves first).
    A negative ``child_a[0]`` signals a cycle.
    """
    m = n - 1
    uf = np.arange(n)
    uf_size = np.ones(n, dtype=np.int64)
    node_of = np.arange(n)
    child_a = np.empty(m, dtype=np.int64)
    child_b = np.empty(m, dtype=np.int64)
    size = np.ones(2 * n, dtype=np.int64)
    for k in range(m - 1, -1, -1):
        e = order[k]
        a = eu[e]
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        b = ev[e]
        while uf[b] != b:
            uf[b] = uf[uf[b]]
            b = uf[b]
        if a == b:
            child_a[0] = -1
            return child_a, child_b, size
        child_a[k] = node_of[a]
        child_b[k] = node_of[b]
        size[n + k] = uf_size[a] + uf_size[b]
        if uf_size[a] < uf_size[b]:
            a, b = b, a
        uf[b] = a
        uf_size[a] += uf_size[b]
        node_of[a] = n + k
    return child_a, child_b, size


def py_orient_cuts(n, root, eu, ev, order, child_a, child_b, size):
    """Split each merge into (entry side, far side) relative to the reference vertex.

    The first cut's reference vertex is ``root``; the far side of a cut gets
    the far endpoint as its reference, the entry side keeps its parent's.
    Returns ``(entry, far, near_v, far_v, parent)`` indexed by node id,
    with node ``2n - 1`` standing for the cut-tree root.
    """
    m = n - 1
    rho = 2 * n - 1
    lo = np.zeros(2 * n, dtype=np.int64)
    for k in range(m):
        node = n + k
        ca = child_a[k]
        lo[ca] = lo[node]
        lo[child_b[k]] = lo[node] + size[ca]
    entry = np.full(2 * n, -1, dtype=np.int64)
    far = np.full(2 * n, -1, dtype=np.int64)
    near_v = np.full(2 * n, -1, dtype=np.int64)
    far_v = np.full(2 * n, -1, dtype=np.int64)
    parent = np.full(2 * n, -1, dtype=np.int64)
    ref = np.zeros(2 * n, dtype=np.int64)
    top = n if n > 1 else 0
    entry[rho] = top
    parent[top] = rho
    ref[top] = root
    for k in range(m):
        node = n + k
        r = ref[node]
        pos = lo[r]
        ca = child_a[k]
        cb = child_b[k]
        e = order[k]
        if lo[ca] <= pos < lo[ca] + size[ca]:
            entry[node] = ca
            far[node] = cb
            near_v[node] = eu[e]
            far_v[node] = ev[e]
        else:
            entry[node] = cb
            far[node] = ca
            near_v[node] = ev[e]
            far_v[node] = eu[e]
        ref[entry[node]] = r
        ref[far[node]] = far_v[node]
        parent[ca] = node
        parent[cb] = node
    return entry, far, near_v, far_v, parent


# ---------------------------------------------------------------------------
# Prim order


def py_prim_order(n, root, ptr, nbr, lab):
    """Vertices in Prim order from ``root`` on a CSR adjacency with edge labels."""
    order = np.empty(n, dtype=np.int64)
    seen = np.zeros(n, dtype=np.bool_)
    seen[root] = True
    order[0] = root
    heap = [(lab[0], -1)]
    heap.pop()
    for j in range(ptr[root], ptr[root + 1]):
        heapq.heappush(heap, (lab[j], nbr[j]))
    for i in range(1, n):
        _, x = heapq.heappop(heap)
        seen[x] = True
        order[i] = x
        for j in range(ptr[x], ptr[x + 1]):
            y = nbr[j]
            if not seen[y]:
                heapq.heappush(heap, (lab[j], y))
    return order


# ---------------------------------------------------------------------------
# Forest components


def py_component_sizes(n, eu, ev, keep):
    """Sizes of the connected components of the forest made of kept edges."""
    uf = np.arange(n)
    sz = np.ones(n, dtype=np.int64)
    for e in range(eu.shape[0]):
        if not keep[e]:
            continue
        a = eu[e]
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        b = ev[e]
        while uf[b] != b:
            uf[b] = uf[uf[b]]
            b = uf[b]
        if a == b:
            continue
        if sz[a] < sz[b]:
            a, b = b, a
        uf[b] = a
        sz[a] += sz[b]
    count = 0
    for v in range(n):
        if uf[v] == v:
            count += 1
    out = np.empty(count, dtype=np.int64)
    j = 0
    for v in range(n):
        if uf[v] == v:
            out[j] = sz[v]
            j += 1
    return out


# ---------------------------------------------------------------------------
# Pac-Man accumulation along entry spines


def py_spine_accumulate(n, entry, far, tau, mass, out_h, out_f):
    """Single pass computing h1 and F(h1) for every branchpoint.

    Branchpoints are nodes ``n .. 2n-2`` in time order, so parents come first.
    Works on float arrays (compiled) and on object arrays of exact numbers.
    """
    acc_h = out_h.copy()
    acc_f = out_f.copy()
    for k in range(n - 1):
        node = n + k
        e = entry[node]
        h1 = acc_h[k] + mass[e]
        f1 = acc_f[k] + tau[node] * mass[e]
        out_h[k] = h1
        out_f[k] = f1
        if e >= n:
            acc_h[e - n] = acc_h[k]
            acc_f[e - n] = acc_f[k]
        g = far[node]
        if g >= n:
            acc_h[g - n] = h1
            acc_f[g - n] = f1
    return out_h, out_f


# ---------------------------------------------------------------------------
# Drifted running-infimum records on float grids


def py_first_record(values, h, t, tol):
    """Index of the first weak record after 0 of ``values - t*h``."""
    g = values - t * h
    prev = np.concatenate((np.array([np.inf]), np.minimum.accumulate(g)[:-1]))
    hits = np.flatnonzero(g[1:] <= prev[1:] + tol)
    return hits[0] + 1 if hits.size else g.shape[0] - 1


def nb_first_record_src(values, h, t, tol):
    run = values[0] - t * h[0]
    for i in range(1, values.shape[0]):
        g = values[i] - t * h[i]
        if g <= run + tol:
            return i
        if g < run:
            run = g
    return values.shape[0] - 1


def py_record_mask(values, h, t, tol):
    """Boolean mask of the weak records of ``values - t*h``."""
    g = values - t * h
    prev = np.concatenate((np.array([np.inf]), np.minimum.accumulate(g)[:-1]))
    return g <= prev + tol


def nb_record_mask_src(values, h, t, tol):
    out = np.zeros(values.shape[0], dtype=np.bool_)
    run = np.inf
    for i in range(values.shape[0]):
        g = values[i] - t * h[i]
        if g <= run + tol:
            out[i] = True
        if g < run:
            run = g
    return out


def py_largest_gap(values, h, t, tol):
    mask = py_record_mask(values, h, t, tol)
    pos = h[mask]
    return float(np.max(np.diff(pos))) if pos.shape[0] > 1 else 0.0


def nb_largest_gap_src(values, h, t, tol):
    run = np.inf
    last = h[0]
    best = 0.0
    for i in range(values.shape[0]):
        g = values[i] - t * h[i]
        if g <= run + tol:
            if h[i] - last > best:
                best = h[i] - last
            last = h[i]
        if g < run:
            run = g
    return best


# ---------------------------------------------------------------------------
# Binding

nb_prufer_decode = _compile(py_prufer_decode)
nb_merge_tree = _compile(py_merge_tree)
nb_orient_cuts = _compile(py_orient_cuts)
nb_prim_order = _compile(py_prim_order)
nb_component_sizes = _compile(py_component_sizes)
nb_spine_accumulate = _compile(py_spine_accumulate)
nb_first_record = _compile(nb_first_record_src)
nb_record_mask = _compile(nb_record_mask_src)
nb_largest_gap = _compile(nb_largest_gap_src)

KERNELS = (
    "prufer_decode",
    "merge_tree",
    "orient_cuts",
    "prim_order",
    "component_sizes",
    "spine_accumulate",
    "first_record",
    "record_mask",
    "largest_gap",
)


def variant(name, compiled=None):
    """Return the kernel ``name`` in the requested flavour (default: active one)."""
    if compiled is None:
        compiled = USE_NUMBA
    return globals()[("nb_" if compiled else "py_") + name]


prufer_decode = variant("prufer_decode")
merge_tree = variant("merge_tree")
orient_cuts = variant("orient_cuts")
prim_order = variant("prim_order")
component_sizes = variant("component_sizes")
first_record = variant("first_record")
record_mask = variant("record_mask")
largest_gap = variant("largest_gap")


def spine_accumulate(n, entry, far, tau, mass, out_h, out_f):
    # object arrays (exact arithmetic) never go through numba
    if USE_NUMBA and out_h.dtype != object:
        return nb_spine_accumulate(n, entry, far, tau, mass, out_h, out_f)
    return py_spine_accumulate(n, entry, far, tau, mass, out_h, out_f)
