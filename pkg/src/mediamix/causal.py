"""Constraint-based causal structure discovery over Gaussian variables.

The three classic phases: skeleton search by conditional-independence
pruning, collider orientation at unshielded triples, then orientation
propagation until fixpoint. Everything iterates in lexicographic order
because the algorithm is order-dependent and reruns must agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InsufficientSample, SingularSubmatrix

_COND_LIMIT = 1e12


def partial_correlation(r: np.ndarray, x: int, y: int, s: tuple[int, ...]) -> float:
    """Partial correlation of x and y given the set s.

    Taken from the precision matrix of the submatrix over {x, y} union s:
    -P_xy / sqrt(P_xx * P_yy). With s empty this is r[x, y] itself.
    """
    r = np.asarray(r, dtype=float)
    if x == y or x in s or y in s:
        raise ValueError("x and y must be distinct and outside the conditioning set")
    if not s:
        return float(r[x, y])
    idx = [x, y, *s]
    sub = r[np.ix_(idx, idx)]
    cond = np.linalg.cond(sub)
    if not math.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularSubmatrix(f"conditioning submatrix is numerically singular (cond {cond:.2e})")
    prec = np.linalg.inv(sub)
    return float(-prec[0, 1] / math.sqrt(prec[0, 0] * prec[1, 1]))


def ci_test(r: float, n: int, s: int, alpha: float) -> tuple[bool, float]:
    """Fisher-z independence test on a (partial) correlation.

    The statistic |arctanh(r)| * sqrt(n - s - 3) is compared against the
    standard normal; independent means p > alpha.
    """
    dof = n - s - 3
    if dof < 1:
        raise InsufficientSample(f"need n - s - 3 >= 1, got {dof}")
    if abs(r) >= 1.0:
        return False, 0.0
    stat = abs(math.atanh(r)) * math.sqrt(dof)
    p = math.erfc(stat / math.sqrt(2.0))
    return p > alpha, p


@dataclass(frozen=True)
class Edge:
    a: str
    b: str
    mark: str  # "undirected" | "directed" meaning a -> b


@dataclass(frozen=True)
class CPDAG:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    sepsets: dict[tuple[str, str], tuple[str, ...]]

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.nodes}
        for e in self.edges:
            adj[e.a].add(e.b)
            adj[e.b].add(e.a)
        return adj


@dataclass(frozen=True)
class CausalConfig:
    alpha: float = 0.05
    max_cond_size: int | None = None  # None means p - 2
    stable: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")


def _has_directed_path(oriented: dict[tuple[int, int], bool], p: int, src: int, dst: int) -> bool:
    """True when a directed path src -> ... -> dst exists."""
    seen = {src}
    stack = [src]
    children = {}
    for (a, b), is_dir in oriented.items():
        if is_dir:
            children.setdefault(a, []).append(b)
    while stack:
        v = stack.pop()
        if v == dst:
            return True
        for w in children.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


class _Pattern:
    """Mutable orientation state during phases 2 and 3.

    direction[(a, b)] = True records a -> b. The first orientation of an edge
    wins; later conflicting requests are ignored, as is any orientation that
    would close a directed cycle.
    """

    def __init__(self, p: int, adj: dict[int, set[int]]):
        self.p = p
        self.adj = adj
        self.direction: dict[tuple[int, int], bool] = {}

    def is_oriented(self, a: int, b: int) -> bool:
        return (a, b) in self.direction or (b, a) in self.direction

    def points(self, a: int, b: int) -> bool:
        return self.direction.get((a, b), False)

    def orient(self, a: int, b: int) -> bool:
        if b not in self.adj[a] or self.is_oriented(a, b):
            return False
        if _has_directed_path(self.direction, self.p, b, a):
            return False  # would create a directed cycle
        self.direction[(a, b)] = True
        return True


def pc_pattern(
    r: np.ndarray,
    n: int,
    config: CausalConfig = CausalConfig(),
    names: tuple[str, ...] | None = None,
) -> CPDAG:
    """PC search: skeleton, colliders, propagation.

    Skeleton: starting from the complete graph, grow the conditioning size
    l = 0, 1, 2, ... and for each ordered adjacent pair (x, y) test every
    size-l subset of adj(x) minus y; the first independence removes the edge
    and records the separating set. With config.stable the neighbor sets used
    for conditioning are frozen per level, removing order dependence.

    Colliders: every unshielded triple x - y - z with y outside sepset(x, z)
    becomes x -> y <- z. Propagation applies three rules until nothing fires:
    chain completion (x -> y with y - z undirected and x, z nonadjacent gives
    y -> z), acyclicity (x -> y -> z with x - z undirected gives x -> z), and
    the double-triangle rule (x - z, x - w, z -> y, w -> y, x - y undirected,
    z and w nonadjacent gives x -> y).
    """
    r = np.asarray(r, dtype=float)
    p = r.shape[0]
    if names is None:
        names = tuple(f"v{j + 1}" for j in range(p))
    if len(names) != p:
        raise ValueError("names must match the correlation order")
    max_cond = config.max_cond_size if config.max_cond_size is not None else max(p - 2, 0)

    adj: dict[int, set[int]] = {i: set(range(p)) - {i} for i in range(p)}
    sepsets: dict[tuple[int, int], tuple[int, ...]] = {}

    level = 0
    while level <= max_cond:
        frozen = {i: set(neigh) for i, neigh in adj.items()} if config.stable else adj
        any_candidate = False
        for x in range(p):
            for y in range(p):
                if y == x or y not in adj[x]:
                    continue
                pool = sorted(frozen[x] - {y})
                if len(pool) < level:
                    continue
                any_candidate = True
                removed = False
                for subset in combinations(pool, level):
                    rho = partial_correlation(r, x, y, subset)
                    independent, _ = ci_test(rho, n, level, config.alpha)
                    if independent:
                        adj[x].discard(y)
                        adj[y].discard(x)
                        key = (min(x, y), max(x, y))
                        sepsets[key] = subset
                        removed = True
                        break
                if removed:
                    continue
        if not any_candidate:
            break
        level += 1

    pattern = _Pattern(p, adj)

    # colliders: unshielded x - y - z with y not in sepset(x, z)
    for y in range(p):
        for x, z in combinations(sorted(adj[y]), 2):
            if z in adj[x]:
                continue
            sep = sepsets.get((min(x, z), max(x, z)), ())
            if y not in sep:
                pattern.orient(x, y)
                pattern.orient(z, y)

    changed = True
    while changed:
        changed = False
        for a in range(p):
            for b in sorted(adj[a]):
                if pattern.is_oriented(a, b):
                    continue
                # rule 1: c -> a, a - b, c and b nonadjacent
                for c in range(p):
                    if pattern.points(c, a) and b not in adj[c] and c != b:
                        if pattern.orient(a, b):
                            changed = True
                        break
                if pattern.is_oriented(a, b):
                    continue
                # rule 2: a -> c -> b with a - b undirected
                for c in range(p):
                    if pattern.points(a, c) and pattern.points(c, b):
                        if pattern.orient(a, b):
                            changed = True
                        break
                if pattern.is_oriented(a, b):
                    continue
                # rule 3: a - c and a - d undirected, c -> b, d -> b, c and d nonadjacent
                half = [c for c in sorted(adj[a]) if not pattern.is_oriented(a, c) and pattern.points(c, b)]
                done = False
                for c, d in combinations(half, 2):
                    if d not in adj[c]:
                        if pattern.orient(a, b):
                            changed = True
                        done = True
                        break
                if done:
                    continue

    edges: list[Edge] = []
    for x in range(p):
        for y in range(x + 1, p):
            if y not in adj[x]:
                continue
            if pattern.points(x, y):
                edges.append(Edge(names[x], names[y], "directed"))
            elif pattern.points(y, x):
                edges.append(Edge(names[y], names[x], "directed"))
            else:
                edges.append(Edge(names[x], names[y], "undirected"))
    named_sepsets = {
        (names[a], names[b]): tuple(names[i] for i in s) for (a, b), s in sepsets.items()
    }
    return CPDAG(tuple(names), tuple(edges), named_sepsets)


def export_dot(graph: CPDAG) -> str:
    """Render the pattern as DOT with undirected edges drawn arrowless.

    Nodes and edges come out in lexicographic order, so identical graphs
    produce identical text.
    """
    lines = ["digraph pattern {"]
    for node in sorted(graph.nodes):
        lines.append(f'  "{node}";')
    rendered = []
    for e in graph.edges:
        if e.mark == "directed":
            rendered.append(f'  "{e.a}" -> "{e.b}";')
        else:
            a, b = sorted((e.a, e.b))
            rendered.append(f'  "{a}" -> "{b}" [dir=none];')
    lines.extend(sorted(rendered))
    lines.append("}")
    return "\n".join(lines) + "\n"
