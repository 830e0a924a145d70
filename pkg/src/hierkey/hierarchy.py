"""Partially ordered set of security classes, stored as a DAG.

An edge (u, v) means u is a direct predecessor of v: u's clearance
strictly dominates v's.  Strict predecessor/successor queries walk the
transitive closure, recomputed on demand (hierarchies are desk-scale).
Hierarchy values are immutable; mutations return new snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import CycleCreated, DuplicateId, UnknownClass


@dataclass(frozen=True)
class Hierarchy:
    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]  # (predecessor, successor)

    @classmethod
    def build(cls, nodes: Iterable[str], edges: Iterable[tuple[str, str]] = ()) -> "Hierarchy":
        node_list = list(nodes)
        node_set = frozenset(node_list)
        if len(node_list) != len(node_set):
            dup = sorted({n for n in node_list if node_list.count(n) > 1})
            raise DuplicateId(f"repeated class id(s): {dup}")
        edge_set = frozenset(edges)
        for u, v in edge_set:
            for end in (u, v):
                if end not in node_set:
                    raise UnknownClass(f"edge endpoint {end!r} is not a class")
        h = cls(node_set, edge_set)
        h._check_acyclic()
        return h

    @classmethod
    def empty(cls) -> "Hierarchy":
        return cls(frozenset(), frozenset())

    # -- queries ---------------------------------------------------------

    def _parent_map(self) -> dict[str, set[str]]:
        parents: dict[str, set[str]] = {n: set() for n in self.nodes}
        for u, v in self.edges:
            parents[v].add(u)
        return parents

    def _child_map(self) -> dict[str, set[str]]:
        children: dict[str, set[str]] = {n: set() for n in self.nodes}
        for u, v in self.edges:
            children[u].add(v)
        return children

    def _check_acyclic(self) -> None:
        children = self._child_map()
        indegree = {n: 0 for n in self.nodes}
        for _, v in self.edges:
            indegree[v] += 1
        queue = [n for n, d in indegree.items() if d == 0]
        seen = 0
        while queue:
            n = queue.pop()
            seen += 1
            for c in children[n]:
                indegree[c] -= 1
                if indegree[c] == 0:
                    queue.append(c)
        if seen != len(self.nodes):
            raise CycleCreated("hierarchy contains a cycle")

    def _require(self, class_id: str) -> None:
        if class_id not in self.nodes:
            raise UnknownClass(f"unknown class {class_id!r}")

    def _reach(self, start: str, adjacency: dict[str, set[str]]) -> frozenset[str]:
        seen: set[str] = set()
        frontier = list(adjacency[start])
        while frontier:
            n = frontier.pop()
            if n in seen:
                continue
            seen.add(n)
            frontier.extend(adjacency[n])
        return frozenset(seen)

    def strict_predecessors(self, class_id: str) -> frozenset[str]:
        """Every class whose clearance strictly dominates class_id."""
        self._require(class_id)
        return self._reach(class_id, self._parent_map())

    def strict_successors(self, class_id: str) -> frozenset[str]:
        """Every class strictly dominated by class_id."""
        self._require(class_id)
        return self._reach(class_id, self._child_map())

    def predecessor_map(self) -> dict[str, frozenset[str]]:
        """Strict-predecessor sets for every class at once."""
        parents = self._parent_map()
        return {n: self._reach(n, parents) for n in self.nodes}

    def is_predecessor(self, viewer: str, target: str) -> bool:
        """True when viewer strictly dominates target."""
        return viewer in self.strict_predecessors(target)

    # -- mutation (returns new snapshots) --------------------------------

    def add_class(
        self,
        class_id: str,
        above: Iterable[str] = (),
        below: Iterable[str] = (),
    ) -> "Hierarchy":
        """Insert a class with the given direct predecessors and successors.

        above: classes that will dominate the new one; below: classes the
        new one will dominate.  Raises CycleCreated if the combination
        closes a loop through existing paths.
        """
        if class_id in self.nodes:
            raise DuplicateId(f"class {class_id!r} already exists")
        for other in list(above) + list(below):
            self._require(other)
        new_edges = set(self.edges)
        new_edges.update((u, class_id) for u in above)
        new_edges.update((class_id, v) for v in below)
        h = Hierarchy(self.nodes | {class_id}, frozenset(new_edges))
        h._check_acyclic()
        return h

    def remove_class(self, class_id: str) -> tuple["Hierarchy", frozenset[str]]:
        """Drop a class and its incident edges.

        Returns the new hierarchy and the set of strict successors of the
        removed class: exactly the classes whose predecessor sets shrank.
        Predecessors are not reconnected to successors; callers wanting to
        preserve reachability must add replacement edges explicitly.
        """
        self._require(class_id)
        affected = self.strict_successors(class_id)
        remaining = frozenset(n for n in self.nodes if n != class_id)
        edges = frozenset((u, v) for u, v in self.edges if class_id not in (u, v))
        return Hierarchy(remaining, edges), affected
