"""Rooted dependency trees induced by a generator.

Indices {1..N} form the nodes; each n >= 2 points at its parent alpha(n).
Parents are strictly smaller than their children, so every chain of parent
hops terminates at the root (index 1) and the structure is a tree by
construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import AxiomViolationError, DomainError
from .generators import GeneratorSpec, parent_indices, validate


@dataclass(frozen=True, eq=False)
class DependencyTree:
    """Parent pointers for nodes 2..size; node 1 is the root."""

    size: int
    parents: np.ndarray  # entry i: parent of node i + 2

    def __post_init__(self):
        if self.size < 1:
            raise DomainError(f"tree size must be >= 1, got {self.size}")
        parents = np.array(self.parents, dtype=np.int64)
        if parents.shape != (max(self.size - 1, 0),):
            raise DomainError(
                f"expected {self.size - 1} parent entries, got {parents.shape}"
            )
        children = np.arange(2, self.size + 1, dtype=np.int64)
        bad = (parents < 1) | (parents >= children)
        if np.any(bad):
            n = int(children[np.argmax(bad)])
            raise AxiomViolationError(
                f"node {n} has parent {int(parents[n - 2])}, outside 1..{n - 1}"
            )
        parents.flags.writeable = False
        object.__setattr__(self, "parents", parents)

    def parent_of(self, node: int) -> int:
        self._check_node(node)
        if node == 1:
            raise DomainError("the root (node 1) has no parent")
        return int(self.parents[node - 2])

    def edges(self):
        """(child, parent) pairs in ascending child order."""
        for node in range(2, self.size + 1):
            yield node, int(self.parents[node - 2])

    def to_parent_map(self) -> dict[int, int]:
        return dict(self.edges())

    def to_json(self) -> str:
        """JSON object mapping each non-root node to its parent."""
        return json.dumps(
            {str(node): parent for node, parent in self.edges()}, sort_keys=False
        )

    def _check_node(self, node: int) -> None:
        if not isinstance(node, (int, np.integer)) or isinstance(node, bool):
            raise DomainError(f"node index must be an integer, got {node!r}")
        if not 1 <= node <= self.size:
            raise DomainError(f"node index {node} outside 1..{self.size}")


def build_tree(spec: GeneratorSpec, size: int) -> DependencyTree:
    """Tree with an edge n -> alpha(n) for every n in {2..size}."""
    if size < 1:
        raise DomainError(f"tree size must be >= 1, got {size}")
    if size == 1:
        return DependencyTree(1, np.empty(0, dtype=np.int64))
    report = validate(spec, size)
    if not report.ok:
        first = report.violations[0]
        raise AxiomViolationError(
            f"generator {spec.kind!r} fails validation up to {size} "
            f"({len(report.violations)} violation(s); first: {first.reason})"
        )
    return DependencyTree(size, parent_indices(spec, size))


def path_to_root(tree: DependencyTree, node: int) -> list[int]:
    """Node indices from `node` down to the root: [n, alpha(n), ..., 1]."""
    tree._check_node(node)
    path = [node]
    while node != 1:
        node = tree.parent_of(node)
        path.append(node)
    return path


def tree_distance(tree: DependencyTree, m: int, n: int) -> int:
    """Edge count of the unique path between m and n.

    Walks the larger index up its parent chain until the two meet; because
    parents strictly decrease this converges at the lowest common ancestor.
    """
    tree._check_node(m)
    tree._check_node(n)
    distance = 0
    while m != n:
        if m > n:
            m = tree.parent_of(m)
        else:
            n = tree.parent_of(n)
        distance += 1
    return distance


def lowest_common_ancestor(tree: DependencyTree, m: int, n: int) -> int:
    tree._check_node(m)
    tree._check_node(n)
    while m != n:
        if m > n:
            m = tree.parent_of(m)
        else:
            n = tree.parent_of(n)
    return m


def export_dot(tree: DependencyTree) -> str:
    """DOT digraph with one edge line per node, ascending and layout-free."""
    lines = ["digraph dependencies {"]
    for node, parent in tree.edges():
        lines.append(f"  {node} -> {parent};")
    lines.append("}")
    return "\n".join(lines) + "\n"
