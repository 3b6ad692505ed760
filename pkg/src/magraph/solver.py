"""Optimal spacing-constrained point selection via a fixed-hop shortest path.

Sampling points 1..M become vertices of a DAG with an edge i -> j whenever
j - i >= a_min. A dummy source 0 feeds every point and every point feeds a
dummy sink M+1. Edge (i, j) costs -g_i (zero out of the source), so an
(N+1)-hop path 0 -> a_1 -> ... -> a_N -> M+1 costs exactly -(g_a1 + ... + g_aN).
A layered dynamic program over hop counts finds the cheapest such path in
O(N |E|) = O(N M^2) relaxations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import GainProfile


class InfeasibleError(ValueError):
    """No selection satisfies the spacing constraint."""


@dataclass(frozen=True)
class Selection:
    """Sorted 1-based indices a_1 < ... < a_N and their summed power gain.

    ``evaluations`` records the work the producing algorithm did (DP
    relaxations, enumerated combinations or gain lookups).
    """

    indices: tuple
    value: float
    evaluations: int = 0

    def __len__(self):
        return len(self.indices)

    def is_feasible(self, num_points: int, a_min: int) -> bool:
        return is_feasible(self.indices, num_points, a_min)


def is_feasible(indices, num_points: int, a_min: int) -> bool:
    idx = sorted(indices)
    if not idx or idx[0] < 1 or idx[-1] > num_points:
        return False
    return all(b - a >= a_min for a, b in zip(idx, idx[1:]))


def selection_value(power, indices) -> float:
    """Sum of gains in ascending index order (left fold, for reproducible rounding)."""
    total = 0.0
    for i in sorted(indices):
        total += float(power[i - 1])
    return total


def min_points_required(num_antennas: int, a_min: int) -> int:
    return (num_antennas - 1) * a_min + 1


def check_feasible(num_points: int, num_antennas: int, a_min: int) -> None:
    if num_antennas < 1:
        raise ValueError(f"need at least one antenna, got {num_antennas}")
    if a_min < 1:
        raise ValueError(f"a_min must be >= 1, got {a_min}")
    need = min_points_required(num_antennas, a_min)
    if num_points < need:
        raise InfeasibleError(
            f"{num_antennas} antennas with index spacing {a_min} need at least "
            f"{need} sampling points, grid has {num_points}"
        )


def interior_edge_count(num_points: int, a_min: int) -> int:
    """|E| = (M - a_min)(M - a_min + 1) / 2, or 0 when a_min >= M."""
    k = max(num_points - a_min, 0)
    return k * (k + 1) // 2


@dataclass
class PointGraph:
    """DAG on vertices 0..M+1 stored as incoming-neighbour lists.

    ``preds[v]`` holds the sorted sources of edges into ``v`` and
    ``pred_weights[v]`` their weights. Any per-edge weights are allowed as long
    as every edge goes from a lower to a higher vertex index.
    """

    num_points: int
    preds: list
    pred_weights: list
    a_min: int | None = None

    def __post_init__(self):
        n = self.num_points + 2
        if len(self.preds) != n or len(self.pred_weights) != n:
            raise ValueError("need one predecessor list per vertex 0..M+1")
        for v, (p, w) in enumerate(zip(self.preds, self.pred_weights)):
            if len(p) != len(w):
                raise ValueError(f"vertex {v}: predecessor/weight length mismatch")
            if len(p) and (np.any(np.diff(p) <= 0) or p[-1] >= v or p[0] < 0):
                raise ValueError(f"vertex {v}: predecessors must be sorted and < {v}")

    @property
    def sink(self) -> int:
        return self.num_points + 1

    @property
    def num_edges(self) -> int:
        return sum(len(p) for p in self.preds)

    @property
    def num_interior_edges(self) -> int:
        return sum(int(np.count_nonzero(p >= 1)) for p in self.preds[1:self.sink])

    def edges(self):
        """Yield (i, j, weight) for every edge, grouped by target."""
        for j, (p, w) in enumerate(zip(self.preds, self.pred_weights)):
            for i, wij in zip(p.tolist(), w.tolist()):
                yield i, j, wij

    def weight(self, i: int, j: int) -> float | None:
        """Weight of edge (i, j), or None when the edge is absent."""
        if not 0 <= j < len(self.preds):
            return None
        p = self.preds[j]
        k = int(np.searchsorted(p, i))
        if k < len(p) and p[k] == i:
            return float(self.pred_weights[j][k])
        return None

    def path_weight(self, path) -> float | None:
        total = 0.0
        for i, j in zip(path, path[1:]):
            w = self.weight(i, j)
            if w is None:
                return None
            total += w
        return total

    @classmethod
    def from_edges(cls, num_points: int, edges) -> "PointGraph":
        """Build from an iterable of (i, j, weight) on vertices 0..num_points+1."""
        buckets = [dict() for _ in range(num_points + 2)]
        for i, j, w in edges:
            if not 0 <= i < j <= num_points + 1:
                raise ValueError(f"edge ({i}, {j}) does not increase the vertex index")
            buckets[j][i] = float(w)
        preds, weights = [], []
        for b in buckets:
            keys = sorted(b)
            preds.append(np.array(keys, dtype=np.int64))
            weights.append(np.array([b[k] for k in keys], dtype=float))
        return cls(num_points, preds, weights)


def build_point_graph(gains: GainProfile | np.ndarray, a_min: int) -> PointGraph:
    """Augmented selection graph for the gain profile ``gains``."""
    power = np.asarray(getattr(gains, "power", gains), dtype=float)
    m = len(power)
    if m < 1:
        raise ValueError("gain profile is empty")
    if a_min < 1:
        raise ValueError(f"a_min must be >= 1, got {a_min}")
    neg = -power
    preds = [np.empty(0, dtype=np.int64)]
    weights = [np.empty(0)]
    for j in range(1, m + 1):
        src = np.arange(1, j - a_min + 1, dtype=np.int64)
        preds.append(np.concatenate(([0], src)))
        weights.append(np.concatenate(([0.0], neg[src - 1])))
    preds.append(np.arange(1, m + 1, dtype=np.int64))
    weights.append(neg.copy())
    return PointGraph(m, preds, weights, a_min=a_min)


@dataclass
class DpTable:
    """Layered k-hop costs from vertex 0.

    ``cost[k][v]`` is the weight of the cheapest k-hop path 0 -> v, +inf when
    none exists. ``pred[k][v]`` is the previous vertex on that path (-1 if none).
    """

    cost: list = field(default_factory=list)
    pred: list = field(default_factory=list)
    relaxations: int = 0

    def path_to(self, vertex: int, hops: int) -> tuple:
        if not np.isfinite(self.cost[hops][vertex]):
            raise InfeasibleError(f"no {hops}-hop path reaches vertex {vertex}")
        path = [vertex]
        for k in range(hops, 0, -1):
            vertex = int(self.pred[k][vertex])
            path.append(vertex)
        return tuple(reversed(path))


@dataclass(frozen=True)
class ShortestPath:
    path: tuple
    weight: float
    relaxations: int
    table: DpTable


def fixed_hop_table(graph: PointGraph, hops: int) -> DpTable:
    """Fill the DP table for 1..hops hops.

    Ties between equal-cost candidates go to the smallest predecessor index.
    """
    if hops < 1:
        raise ValueError(f"hops must be >= 1, got {hops}")
    n = graph.num_points + 2
    cost0 = np.full(n, np.inf)
    cost0[0] = 0.0
    table = DpTable([cost0], [np.full(n, -1, dtype=np.int64)])
    for _ in range(hops):
        prev = table.cost[-1]
        cur = np.full(n, np.inf)
        back = np.full(n, -1, dtype=np.int64)
        for v in range(1, n):
            p = graph.preds[v]
            if len(p) == 0:
                continue
            cand = prev[p] + graph.pred_weights[v]
            table.relaxations += len(p)
            k = int(np.argmin(cand))
            if np.isfinite(cand[k]):
                cur[v] = cand[k]
                back[v] = p[k]
        table.cost.append(cur)
        table.pred.append(back)
    return table


def fixed_hop_shortest_path(graph: PointGraph, hops: int) -> ShortestPath:
    """Cheapest path from 0 to M+1 using exactly ``hops`` edges."""
    if hops < 2:
        raise ValueError(f"a selection path needs at least 2 hops, got {hops}")
    if graph.a_min is not None:
        check_feasible(graph.num_points, hops - 1, graph.a_min)
    table = fixed_hop_table(graph, hops)
    weight = table.cost[hops][graph.sink]
    if not np.isfinite(weight):
        raise InfeasibleError(f"no {hops}-hop path from 0 to {graph.sink}")
    return ShortestPath(table.path_to(graph.sink, hops), float(weight), table.relaxations, table)


def solve_optimal(gains: GainProfile | np.ndarray, a_min: int, num_antennas: int) -> Selection:
    """Maximize the summed gain of ``num_antennas`` points spaced >= a_min apart."""
    power = np.asarray(getattr(gains, "power", gains), dtype=float)
    check_feasible(len(power), num_antennas, a_min)
    graph = build_point_graph(power, a_min)
    sp = fixed_hop_shortest_path(graph, num_antennas + 1)
    indices = sp.path[1:-1]
    return Selection(indices, -sp.weight, sp.relaxations)


def count_feasible(num_points: int, num_antennas: int, a_min: int) -> int:
    """C(M - (a_min - 1)(N - 1), N), the number of feasible selections."""
    top = num_points - (a_min - 1) * (num_antennas - 1)
    return math.comb(top, num_antennas) if top >= num_antennas else 0


def brute_force_oracle(
    gains: GainProfile | np.ndarray,
    a_min: int,
    num_antennas: int,
    max_combinations: int = 10**7,
) -> Selection:
    """Exhaustive maximizer over all feasible selections.

    Feasible selections are enumerated through the gap-compressing bijection
    a_n = b_n + (n - 1)(a_min - 1) with b_1 < ... < b_N drawn from
    1..M - (a_min - 1)(N - 1), in lexicographic order. Ties keep the first.
    """
    power = np.asarray(getattr(gains, "power", gains), dtype=float)
    m = len(power)
    check_feasible(m, num_antennas, a_min)
    total = count_feasible(m, num_antennas, a_min)
    if total > max_combinations:
        raise ValueError(f"{total} combinations exceed the cap of {max_combinations}")
    top = m - (a_min - 1) * (num_antennas - 1)
    offsets = [n * (a_min - 1) for n in range(num_antennas)]
    best, best_value, seen = None, -math.inf, 0
    for combo in itertools.combinations(range(1, top + 1), num_antennas):
        seen += 1
        idx = tuple(b + o for b, o in zip(combo, offsets))
        value = selection_value(power, idx)
        if value > best_value:
            best, best_value = idx, value
    return Selection(best, best_value, seen)
