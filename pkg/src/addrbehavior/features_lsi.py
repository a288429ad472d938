"""Local structural features S1-S9 of a k-hop subgraph.

Degrees count parallel edges. Path-based metrics (S4-S7) run on directed,
unweighted hop distances where parallel edges are collapsed (multiplicity
never changes a hop count); S9 keeps multiplicity. Degenerate cases emit 0,
with two forced exceptions on singleton graphs: PageRank = 1 (all mass) and
degree-distribution maxima = 1 (one node holds the whole distribution).

Degree correlation (S3) is the Pearson correlation of total degrees across
edge endpoints on the undirected view, evaluated in exact integer
arithmetic so regular graphs hit the zero-denominator fill exactly:
with A = sum(d_u*d_v), B = sum(d_u+d_v), C = sum(d_u^2+d_v^2) over the E
edges, r = (4*A*E - B^2) / (2*C*E - B^2).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ConvergenceError
from .manifest import LSI_IDS
from .subgraph import KHopSubgraph


@dataclass(frozen=True)
class LsiParams:
    alpha: float = 0.85
    tol: float = 1e-10
    max_iters: int = 200

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.tol <= 0 or self.max_iters < 1:
            raise ValueError("tol must be > 0 and max_iters >= 1")


def _degrees(sub: KHopSubgraph):
    n = sub.node_count
    d_in = [0] * n
    d_out = [0] * n
    for s, d in zip(sub.edge_src, sub.edge_dst):
        d_out[s] += 1
        d_in[d] += 1
    return d_in, d_out, [d_in[i] + d_out[i] for i in range(n)]


def _out_simple(sub: KHopSubgraph) -> list[list[int]]:
    """Deduplicated out-neighbor lists (sorted for determinism)."""
    seen: list[set[int]] = [set() for _ in range(sub.node_count)]
    for s, d in zip(sub.edge_src, sub.edge_dst):
        seen[s].add(d)
    return [sorted(t) for t in seen]


def _mean_std(xs: list[float]) -> tuple[float, float]:
    if not xs:
        return 0.0, 0.0
    mean = sum(xs) / len(xs)
    var = sum((x - mean) ** 2 for x in xs) / len(xs)
    return mean, var**0.5


def degree_stats(sub: KHopSubgraph) -> list[float]:
    """S1: mean and population std of in-, out-, and total degree."""
    d_in, d_out, d_tot = _degrees(sub)
    out = []
    for deg in (d_in, d_out, d_tot):
        mean, std = _mean_std([float(d) for d in deg])
        out += [mean, std]
    return out


def degree_distribution_max(sub: KHopSubgraph) -> list[float]:
    """S2: largest degree-distribution proportion per direction."""
    d_in, d_out, d_tot = _degrees(sub)
    n = sub.node_count
    out = []
    for deg in (d_in, d_out, d_tot):
        counts: dict[int, int] = {}
        for d in deg:
            counts[d] = counts.get(d, 0) + 1
        out.append(max(counts.values()) / n)
    return out


def degree_correlation(sub: KHopSubgraph) -> float:
    """S3: endpoint-degree assortativity over undirected-view edges."""
    if sub.edge_count == 0:
        return 0.0
    _, _, d_tot = _degrees(sub)
    a = b = c = 0
    for s, d in zip(sub.edge_src, sub.edge_dst):
        du, dv = d_tot[s], d_tot[d]
        a += du * dv
        b += du + dv
        c += du * du + dv * dv
    e = sub.edge_count
    num = 4 * a * e - b * b
    den = 2 * c * e - b * b
    return num / den if den else 0.0


def _bfs_dists(adj: list[list[int]], source: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def betweenness_origin(sub: KHopSubgraph) -> float:
    """S4: sum over ordered pairs (j, k), both != origin, of the fraction of
    directed shortest j->k paths passing through the origin (Brandes
    dependency accumulation, one source at a time)."""
    n = sub.node_count
    if n < 3:
        return 0.0
    adj = _out_simple(sub)
    origin = sub.origin
    total = 0.0
    for source in range(n):
        if source == origin:
            continue
        # BFS with path counts.
        dist = [-1] * n
        sigma = [0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        dist[source] = 0
        sigma[source] = 1
        order: list[int] = []
        queue = deque([source])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = [0.0] * n
        for v in reversed(order):
            for u in preds[v]:
                delta[u] += sigma[u] / sigma[v] * (1.0 + delta[v])
        total += delta[origin]
    return total


def avg_path_and_diameter(sub: KHopSubgraph) -> tuple[float, float]:
    """S5 and S6 over reachable ordered pairs (unreachable pairs excluded)."""
    adj = _out_simple(sub)
    total = 0
    pairs = 0
    longest = 0
    for source in range(sub.node_count):
        for d in _bfs_dists(adj, source):
            if d > 0:
                total += d
                pairs += 1
                if d > longest:
                    longest = d
    if pairs == 0:
        return 0.0, 0.0
    return total / pairs, float(longest)


def closeness_origin(sub: KHopSubgraph) -> float:
    """S7: reciprocal of summed directed distances from the origin."""
    dists = _bfs_dists(_out_simple(sub), sub.origin)
    total = sum(d for d in dists if d > 0)
    return 1.0 / total if total else 0.0


def pagerank_origin(sub: KHopSubgraph, params: LsiParams = LsiParams()) -> float:
    """S8: origin's PageRank; power iteration with parallel-edge weights and
    uniform redistribution of dangling mass."""
    n = sub.node_count
    if n == 1:
        return 1.0
    out_mult: list[dict[int, int]] = [{} for _ in range(n)]
    out_deg = [0] * n
    for s, d in zip(sub.edge_src, sub.edge_dst):
        out_mult[s][d] = out_mult[s].get(d, 0) + 1
        out_deg[s] += 1
    targets = [sorted(m.items()) for m in out_mult]
    alpha = params.alpha
    base = (1.0 - alpha) / n
    x = [1.0 / n] * n
    for _ in range(params.max_iters):
        nxt = [0.0] * n
        dangling = 0.0
        for j in range(n):
            if out_deg[j]:
                share = x[j] / out_deg[j]
                for i, mult in targets[j]:
                    nxt[i] += mult * share
            else:
                dangling += x[j]
        spread = dangling / n
        nxt = [base + alpha * (v + spread) for v in nxt]
        residual = sum(abs(nxt[i] - x[i]) for i in range(n))
        x = nxt
        if residual <= params.tol:
            return x[sub.origin]
    raise ConvergenceError(
        f"pagerank did not converge in {params.max_iters} iterations",
        residual=residual,
    )


def density(sub: KHopSubgraph) -> float:
    """S9: edges (with multiplicity) over ordered node pairs."""
    n = sub.node_count
    if n < 2:
        return 0.0
    return sub.edge_count / (n * (n - 1))


def compute_lsi(
    sub: KHopSubgraph, params: LsiParams = LsiParams()
) -> dict[str, float]:
    """The full 16-value structural feature map, in manifest order."""
    s1 = degree_stats(sub)
    s2 = degree_distribution_max(sub)
    avg_path, diameter = avg_path_and_diameter(sub)
    values = {f"S1-{i + 1}": s1[i] for i in range(6)}
    values.update({f"S2-{i + 1}": s2[i] for i in range(3)})
    values["S3"] = degree_correlation(sub)
    values["S4"] = betweenness_origin(sub)
    values["S5"] = avg_path
    values["S6"] = diameter
    values["S7"] = closeness_origin(sub)
    values["S8"] = pagerank_origin(sub, params)
    values["S9"] = density(sub)
    assert tuple(values) == LSI_IDS
    return values
