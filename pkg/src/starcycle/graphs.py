"""Admissible graphs: labeled directed graphs with ordered stars.

Internal vertices are 1..n, boundary vertices n+1..n+m.  Edges leave
internal vertices only; no self-loops; no repeated target inside one
star (parallel edges wedge the same angle form to zero, so they are
pruned at enumeration time).  Graphs stay fully labeled: symmetry is
handled by 1/(#Star(k))! prefactors at assembly, not by quotienting.
"""

from __future__ import annotations

import itertools


class AdmissibleGraph:
    __slots__ = ("n", "m", "stars")

    def __init__(self, n: int, m: int, stars):
        stars = tuple(tuple(int(t) for t in star) for star in stars)
        if n < 0 or m < 0:
            raise ValueError("n and m must be >= 0")
        if 2 * n + m - 3 < 0:
            raise ValueError("need 2n + m >= 3")
        if len(stars) != n:
            raise ValueError("expected %d stars, got %d" % (n, len(stars)))
        for k, star in enumerate(stars, start=1):
            for t in star:
                if t == k:
                    raise ValueError("self-loop at vertex %d" % k)
                if not 1 <= t <= n + m:
                    raise ValueError("target %d out of range" % t)
            if len(set(star)) != len(star):
                raise ValueError("repeated target in star of vertex %d" % k)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "stars", stars)

    def __setattr__(self, name, value):
        raise AttributeError("AdmissibleGraph is immutable")

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.stars)

    def edges(self):
        """Edges as (source, target) pairs, ordered by (source, star slot)."""
        return [(k, t) for k, star in enumerate(self.stars, start=1) for t in star]

    def is_boundary(self, v: int) -> bool:
        return v > self.n

    def is_star_graph(self) -> bool:
        return all(len(s) == 2 for s in self.stars)

    def _target_name(self, t: int) -> str:
        return "b%d" % (t - self.n) if t > self.n else str(t)

    def canonical_key(self) -> str:
        body = "|".join(",".join(self._target_name(t) for t in star) for star in self.stars)
        return "%d;%d;%s" % (self.n, self.m, body)

    @classmethod
    def from_key(cls, key: str) -> "AdmissibleGraph":
        parts = key.split(";")
        if len(parts) != 3:
            raise ValueError("bad graph key %r" % key)
        n, m = int(parts[0]), int(parts[1])
        stars = []
        if parts[2]:
            for chunk in parts[2].split("|"):
                star = []
                for name in chunk.split(","):
                    if not name:
                        continue
                    if name.startswith("b"):
                        star.append(n + int(name[1:]))
                    else:
                        star.append(int(name))
                stars.append(tuple(star))
        return cls(n, m, stars)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "stars": [[self._target_name(t) for t in star] for star in self.stars],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AdmissibleGraph":
        n, m = int(obj["n"]), int(obj["m"])
        stars = []
        for star in obj.get("stars", []):
            decoded = []
            for name in star:
                name = str(name)
                if name.startswith("b"):
                    decoded.append(n + int(name[1:]))
                else:
                    decoded.append(int(name))
            stars.append(tuple(decoded))
        return cls(n, m, stars)

    def add_boundary_vertex(self) -> "AdmissibleGraph":
        """Append an unused boundary vertex; existing target codes survive."""
        return AdmissibleGraph(self.n, self.m + 1, self.stars)

    def __eq__(self, other):
        if not isinstance(other, AdmissibleGraph):
            return NotImplemented
        return (self.n, self.m, self.stars) == (other.n, other.m, other.stars)

    def __hash__(self):
        return hash((self.n, self.m, self.stars))

    def __repr__(self):
        return "AdmissibleGraph(%r)" % self.canonical_key()


def top_edge_count(n: int, m: int) -> int:
    """Edge count of top-degree weight forms over the gauge-fixed slice."""
    return 2 * n + m - 3


def _compositions(total, parts, cap):
    """Ordered ways to write total as `parts` integers in [0, cap], lex order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap) + 1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first,) + rest


def enumerate_graphs(n: int, m: int, edge_count: int):
    """All labeled admissible graphs with the given totals, stable order."""
    if n < 0 or m < 0 or 2 * n + m < 3:
        raise ValueError("need n >= 0, m >= 0, 2n + m >= 3")
    if edge_count < 0 or (n > 0 and edge_count > n * (n - 1 + m)):
        return []
    if n == 0:
        return [AdmissibleGraph(0, m, [])] if edge_count == 0 else []
    allowed = [
        [t for t in range(1, n + m + 1) if t != k]
        for k in range(1, n + 1)
    ]
    out = []
    for degrees in _compositions(edge_count, n, n - 1 + m):
        pools = [itertools.permutations(allowed[k], d) for k, d in enumerate(degrees)]
        for stars in itertools.product(*pools):
            out.append(AdmissibleGraph(n, m, stars))
    return out


def star_graphs(n: int, m: int):
    """Graphs with out-degree exactly 2 everywhere (bivector insertions)."""
    if n < 1:
        raise ValueError("star_graphs needs n >= 1")
    allowed = [
        [t for t in range(1, n + m + 1) if t != k]
        for k in range(1, n + 1)
    ]
    pools = [itertools.permutations(a, 2) for a in allowed]
    return [AdmissibleGraph(n, m, stars) for stars in itertools.product(*pools)]
