# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled min-cost transportation kernel; mirrors ``_transport_py`` line for line."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

cdef double _TOL = 1e-12


def min_cost_transport(cost, supply, demand):
    cdef double[:, ::1] c = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t n1 = c.shape[0], n2 = c.shape[1], n = n1 + n2
    cdef cnp.int64_t[::1] sup = np.array(supply, dtype=np.int64)
    cdef cnp.int64_t[::1] dem = np.array(demand, dtype=np.int64)
    if np.asarray(sup).sum() != np.asarray(dem).sum():
        raise ValueError("unbalanced transportation problem")
    out = np.zeros((n1, n2), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] flow = out
    cdef double[::1] dist = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] pred = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t i, j, it, target, node, p
    cdef double di, dj, nd
    cdef bint changed
    cdef cnp.int64_t amount

    while True:
        for i in range(n):
            dist[i] = INFINITY
            pred[i] = -1
        for i in range(n1):
            if sup[i] > 0:
                dist[i] = 0.0
        for it in range(n):
            changed = False
            for i in range(n1):
                di = dist[i]
                if di == INFINITY:
                    continue
                for j in range(n2):
                    nd = di + c[i, j]
                    if nd < dist[n1 + j] - _TOL:
                        dist[n1 + j] = nd
                        pred[n1 + j] = i
                        changed = True
            for j in range(n2):
                dj = dist[n1 + j]
                if dj == INFINITY:
                    continue
                for i in range(n1):
                    if flow[i, j] > 0:
                        nd = dj - c[i, j]
                        if nd < dist[i] - _TOL:
                            dist[i] = nd
                            pred[i] = n1 + j
                            changed = True
            if not changed:
                break
        target = -1
        for j in range(n2):
            if dem[j] > 0 and dist[n1 + j] < INFINITY and (target < 0 or dist[n1 + j] < dist[n1 + target] - _TOL):
                target = j
        if target < 0:
            break
        amount = dem[target]
        node = n1 + target
        while pred[node] >= 0:
            p = pred[node]
            if node < n1 and flow[node, p - n1] < amount:
                amount = flow[node, p - n1]
            node = p
        if sup[node] < amount:
            amount = sup[node]
        dem[target] -= amount
        sup[node] -= amount
        node = n1 + target
        while pred[node] >= 0:
            p = pred[node]
            if node >= n1:
                flow[p, node - n1] += amount
            else:
                flow[node, p - n1] -= amount
            node = p
    for i in range(n1):
        if sup[i] != 0:
            raise RuntimeError("transport solver failed to route all mass")
    for j in range(n2):
        if dem[j] != 0:
            raise RuntimeError("transport solver failed to route all mass")
    return out
