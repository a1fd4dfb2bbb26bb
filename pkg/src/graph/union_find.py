"""
Disjoint-set forest over vertices 0..size-1 with union by rank and path compression.
"""

from __future__ import annotations


class UnionFind:
    """
    Examples
    --------
    >>> uf = UnionFind(5)
    >>> uf.union(0, 1)
    >>> uf.union(1, 2)
    >>> uf.find(2) == uf.find(0)
    True
    >>> uf.size_of(0)
    3
    >>> uf.size_of(4)
    1
    """

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size
        self._size = [1] * size

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        # path compression
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        px = self.find(x)
        py = self.find(y)
        if px == py:
            return
        if self.rank[px] < self.rank[py]:
            px, py = py, px
        self.parent[py] = px
        self._size[px] += self._size[py]
        if self.rank[px] == self.rank[py]:
            self.rank[px] += 1

    def size_of(self, x: int) -> int:
        return self._size[self.find(x)]

    def component_sizes(self) -> list[int]:
        """Sizes of all components, one entry per root."""
        return [self._size[v] for v in range(len(self.parent)) if self.parent[v] == v]
