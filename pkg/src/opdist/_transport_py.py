"""Pure-Python min-cost transportation kernel (fallback for the compiled ``_transport``)."""
import numpy as np

_TOL = 1e-12


def min_cost_transport(cost, supply, demand):
    """Optimal integral flow for a balanced transportation problem.

    Successive shortest paths on the residual bipartite graph, with
    Bellman-Ford from every row that still has supply. Ties go to the lowest
    index, so the result is deterministic.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n1, n2 = cost.shape
    c = cost.tolist()
    sup = [int(x) for x in supply]
    dem = [int(x) for x in demand]
    if sum(sup) != sum(dem):
        raise ValueError("unbalanced transportation problem")
    flow = [[0] * n2 for _ in range(n1)]
    n = n1 + n2
    inf = float("inf")
    while True:
        dist = [inf] * n
        pred = [-1] * n
        for i in range(n1):
            if sup[i] > 0:
                dist[i] = 0.0
        for _ in range(n):
            changed = False
            for i in range(n1):
                di = dist[i]
                if di == inf:
                    continue
                ci = c[i]
                for j in range(n2):
                    nd = di + ci[j]
                    if nd < dist[n1 + j] - _TOL:
                        dist[n1 + j] = nd
                        pred[n1 + j] = i
                        changed = True
            for j in range(n2):
                dj = dist[n1 + j]
                if dj == inf:
                    continue
                for i in range(n1):
                    if flow[i][j] > 0:
                        nd = dj - c[i][j]
                        if nd < dist[i] - _TOL:
                            dist[i] = nd
                            pred[i] = n1 + j
                            changed = True
            if not changed:
                break
        target = -1
        for j in range(n2):
            if dem[j] > 0 and dist[n1 + j] < inf and (target < 0 or dist[n1 + j] < dist[n1 + target] - _TOL):
                target = j
        if target < 0:
            break
        # bottleneck along the path
        amount = dem[target]
        node = n1 + target
        while pred[node] >= 0:
            p = pred[node]
            if node < n1:
                amount = min(amount, flow[node][p - n1])
            node = p
        amount = min(amount, sup[node])
        # augment
        dem[target] -= amount
        sup[node] -= amount
        node = n1 + target
        while pred[node] >= 0:
            p = pred[node]
            if node >= n1:
                flow[p][node - n1] += amount
            else:
                flow[node][p - n1] -= amount
            node = p
    if any(sup) or any(dem):
        raise RuntimeError("transport solver failed to route all mass")
    return np.array(flow, dtype=np.int64).reshape(n1, n2)
