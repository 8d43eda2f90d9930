"""Monte Carlo evaluation of graph weights.

The weight of a top-degree graph is the integral of the wedge of its
edge angle 1-forms over the gauge-fixed configuration space, normalized
by (2*pi) per edge.  Gauge fixing pins the boundary points: for m = 3
that absorbs all three PSL2(R) degrees of freedom and the integral runs
over the n interior points only; for m > 3 the extra boundary points
are integrated over their ordered arc; for m = 2 the classical
half-plane slice is used (boundary at 0 and 1, plain harmonic angle).

Stored table values carry no symmetry prefactors: the 1/n! and
1/(#Star(k))! factors are applied at operator assembly.  Determinism
contract: sampling is split into fixed chunks of 65536 samples, chunk c
is seeded from (seed, c), and the reduction runs in chunk order, so
results are byte-identical for any thread count.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .angles import TWO_PI, AngleContext
from .graphs import AdmissibleGraph, top_edge_count

CHUNK = 65536
MIN_DIST = 1e-9


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("STARCYCLE_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class WeightEntry:
    graph_key: str
    alphas: tuple
    value: float
    std_error: float
    samples: int
    seed: int
    exact: Fraction | None = None
    rejected: int = 0

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")
        if self.exact is None and self.samples <= 0:
            raise ValueError("Monte Carlo entries need samples > 0")
        if self.exact is not None and self.samples != 0:
            raise ValueError("exact entries carry samples = 0")

    def to_json(self) -> dict:
        return {
            "graph": self.graph_key,
            "alphas": list(self.alphas),
            "value": self.value,
            "std_error": self.std_error,
            "samples": self.samples,
            "seed": self.seed,
            "exact": None if self.exact is None else "%d/%d" % (self.exact.numerator, self.exact.denominator),
            "rejected": self.rejected,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WeightEntry":
        exact = obj.get("exact")
        return cls(
            graph_key=obj["graph"],
            alphas=tuple(float(a) for a in obj.get("alphas", [])),
            value=float(obj["value"]),
            std_error=float(obj.get("std_error", 0.0)),
            samples=int(obj.get("samples", 0)),
            seed=int(obj.get("seed", 0)),
            exact=None if exact is None else Fraction(exact),
            rejected=int(obj.get("rejected", 0)),
        )


def _alpha_key(alphas):
    return tuple(round(float(a), 12) for a in alphas)


@dataclass
class WeightTable:
    entries: dict = field(default_factory=dict)

    def add(self, entry: WeightEntry):
        self.entries[(entry.graph_key, _alpha_key(entry.alphas))] = entry

    def get(self, graph_key: str, alphas) -> WeightEntry | None:
        return self.entries.get((graph_key, _alpha_key(alphas)))

    def lookup_star(self, graph: AdmissibleGraph) -> WeightEntry | None:
        """Weight of a 2-boundary star graph: the native half-plane entry
        when present, else its 3-boundary embedding under alpha = (0, 0, 1)."""
        if graph.m == 2:
            native = self.get(graph.canonical_key(), ())
            if native is not None:
                return native
            graph = graph.add_boundary_vertex()
        return self.get(graph.canonical_key(), (0.0, 0.0, 1.0))

    def to_json(self) -> dict:
        items = sorted(self.entries.values(), key=lambda e: (e.graph_key, e.alphas))
        return {"entries": [e.to_json() for e in items]}

    @classmethod
    def from_json(cls, obj: dict) -> "WeightTable":
        table = cls()
        for item in obj.get("entries", []):
            table.add(WeightEntry.from_json(item))
        return table

    def save(self, path: str):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    def fingerprint(self) -> str:
        """sha256 of the canonical JSON serialization."""
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @classmethod
    def load(cls, path: str) -> "WeightTable":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    @classmethod
    def builtin(cls) -> "WeightTable":
        """Calibrated exact table shipped with the package."""
        from importlib.resources import files

        data = files("starcycle").joinpath("data/weights_exact.json").read_text()
        return cls.from_json(json.loads(data))

    def is_exact(self) -> bool:
        return all(e.exact is not None for e in self.entries.values())

    def provenance(self) -> dict:
        kinds = {"exact": 0, "monte_carlo": 0}
        for e in self.entries.values():
            kinds["exact" if e.exact is not None else "monte_carlo"] += 1
        return kinds


# -- disk-model sampler (m >= 3) ----------------------------------------------

def _chunk_plan(samples: int):
    out = []
    c = 0
    left = samples
    while left > 0:
        take = min(CHUNK, left)
        out.append((c, take))
        left -= take
        c += 1
    return out


def _cayley(z, xi):
    return 1j * (xi + z) / (xi - z)


def _disk_rows(graph, boundary_angles, edge_alphas, p, th_free):
    """Jacobian rows of all edge angle functions.

    p: (S, n) complex interior points; th_free: (S, m-3) free boundary
    angles (may be None).  Returns (S, E, D) with D = 2n + max(m-3, 0);
    column layout: x_1, y_1, .., x_n, y_n, th_4, .., th_m.
    """
    S = p.shape[0]
    n = graph.n
    m = graph.m
    nfree = max(0, m - 3)
    edges = graph.edges()
    D = 2 * n + nfree
    rows = np.zeros((S, len(edges), D))

    def theta_of(k):
        """Angle array of boundary point k (1-based), or scalar if pinned."""
        if k <= 3 or nfree == 0:
            return boundary_angles[k - 1]
        return th_free[:, k - 4]

    for row, (v, w) in enumerate(edges):
        pv = p[:, v - 1]
        cv = 2 * (v - 1)
        for k, alpha in enumerate(edge_alphas[row], start=1):
            if alpha == 0.0:
                continue
            xi = np.exp(1j * np.asarray(theta_of(k)))
            P = _cayley(pv, xi)
            tpv = 2j * xi / (xi - pv) ** 2
            k_free = k > 3
            if k_free:
                dP = 2 * pv * xi / (xi - pv) ** 2
            if w <= n:
                # interior target
                pw = p[:, w - 1]
                Q = _cayley(pw, xi)
                tqw = 2j * xi / (xi - pw) ** 2
                s1 = P - Q
                s2 = P - np.conj(Q)
                c = tpv * (1.0 / s1 + 1.0 / s2)
                rows[:, row, cv] += alpha * c.imag
                rows[:, row, cv + 1] += alpha * c.real
                cw = 2 * (w - 1)
                rows[:, row, cw] += alpha * ((-tqw / s1).imag + (-np.conj(tqw) / s2).imag)
                rows[:, row, cw + 1] += alpha * ((-1j * tqw / s1).imag + (1j * np.conj(tqw) / s2).imag)
                if k_free:
                    dQ = 2 * pw * xi / (xi - pw) ** 2
                    rows[:, row, 2 * n + (k - 4)] += alpha * (
                        ((dP - dQ) / s1).imag + ((dP - np.conj(dQ)) / s2).imag
                    )
            else:
                j = w - n
                if j == k:
                    continue  # angle to the reference point itself: zero form
                xij = np.exp(1j * np.asarray(theta_of(j)))
                Qj = (_cayley(xij, xi)).real
                s = P - Qj
                rows[:, row, cv] += alpha * 2 * (tpv / s).imag
                rows[:, row, cv + 1] += alpha * 2 * (tpv / s).real
                if j > 3 and nfree:
                    dQj = (2j * xi / (xi - xij) ** 2 * 1j * xij).real
                    rows[:, row, 2 * n + (j - 4)] += alpha * 2 * (-dQj / s).imag
                if k_free:
                    dQk = (2 * xij * xi / (xi - xij) ** 2).real
                    rows[:, row, 2 * n + (k - 4)] += alpha * 2 * ((dP - dQk) / s).imag
    return rows


def _disk_chunk(graph, ctx, edge_alphas, seed, chunk_index, size):
    n = graph.n
    m = graph.m
    nfree = max(0, m - 3)
    rng = np.random.default_rng(np.random.SeedSequence((seed, chunk_index)))
    u = rng.random((size, n))
    v = rng.random((size, n))
    p = np.sqrt(u) * np.exp(1j * TWO_PI * v)
    th_free = None
    if nfree:
        arc0 = ctx.boundary_angles[2]
        arc1 = ctx.boundary_angles[0] + TWO_PI
        th_free = arc0 + (arc1 - arc0) * np.sort(rng.random((size, nfree)), axis=1)

    reject = np.zeros(size, dtype=bool)
    for i in range(n):
        for jj in range(i + 1, n):
            reject |= np.abs(p[:, i] - p[:, jj]) < MIN_DIST
    pinned = [np.exp(1j * t) for t in ctx.boundary_angles[: min(m, 3)]]
    for i in range(n):
        for xi in pinned:
            reject |= np.abs(p[:, i] - xi) < MIN_DIST
        if nfree:
            reject |= np.min(np.abs(p[:, i, None] - np.exp(1j * th_free)), axis=1) < MIN_DIST

    rows = _disk_rows(graph, ctx.boundary_angles, edge_alphas, p, th_free)
    dets = np.linalg.det(rows)
    bad = ~np.isfinite(dets)
    reject |= bad
    dets = np.where(reject, 0.0, dets)
    rej = int(np.count_nonzero(reject))
    return float(np.sum(dets)), float(np.sum(dets * dets)), rej


def _reduce_chunks(worker, plan, threads):
    if threads <= 1:
        results = [worker(c, size) for c, size in plan]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(worker, c, size) for c, size in plan]
            results = [f.result() for f in futures]
    s1 = s2 = 0.0
    rej = 0
    for a, b, r in results:  # strict chunk order
        s1 += a
        s2 += b
        rej += r
    return s1, s2, rej


def _finalize(graph_key, alphas, norm, s1, s2, samples, seed, rejected):
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    if samples > 1:
        var *= samples / (samples - 1)
    std_error = norm * math.sqrt(var / samples)
    return WeightEntry(
        graph_key=graph_key,
        alphas=tuple(alphas),
        value=norm * mean,
        std_error=std_error,
        samples=samples,
        seed=seed,
        exact=None,
        rejected=rejected,
    )


def compute_weight(graph: AdmissibleGraph, ctx: AngleContext, samples: int, seed: int,
                   threads: int | None = None, edge_alphas=None) -> WeightEntry:
    """Monte Carlo weight of a top-degree graph under ctx.

    edge_alphas optionally overrides the alpha vector edge by edge (used
    by the mixed-form identity check); default is ctx.alphas for every
    edge.
    """
    if ctx.m != graph.m:
        raise ValueError("context boundary count %d != graph %d" % (ctx.m, graph.m))
    if samples <= 0:
        raise ValueError("samples must be positive")
    if threads is None:
        threads = default_threads()
    if graph.m == 2:
        if edge_alphas is not None:
            raise ValueError("edge_alphas is only supported on the disk route (m >= 3)")
        return halfplane_weight(graph, samples, seed, threads)
    E = graph.edge_count
    if E != top_edge_count(graph.n, graph.m):
        raise ValueError("graph has %d edges; top degree needs %d" % (E, top_edge_count(graph.n, graph.m)))
    if edge_alphas is None:
        edge_alphas = [ctx.alphas] * E
    else:
        edge_alphas = [tuple(float(a) for a in row) for row in edge_alphas]
        if len(edge_alphas) != E or any(len(r) != ctx.m for r in edge_alphas):
            raise ValueError("edge_alphas must give one length-m alpha vector per edge")

    nfree = graph.m - 3
    norm = math.pi ** graph.n / TWO_PI ** E
    if nfree > 0:
        arc = ctx.boundary_angles[0] + TWO_PI - ctx.boundary_angles[2]
        norm *= arc ** nfree / math.factorial(nfree)

    plan = _chunk_plan(samples)
    worker = lambda c, size: _disk_chunk(graph, ctx, edge_alphas, seed, c, size)
    s1, s2, rej = _reduce_chunks(worker, plan, threads)
    return _finalize(graph.canonical_key(), ctx.alphas, norm, s1, s2, samples, seed, rej)


# -- half-plane sampler (m = 2 cross-check route) ------------------------------

def _halfplane_chunk(graph, seed, chunk_index, size):
    n = graph.n
    rng = np.random.default_rng(np.random.SeedSequence((seed, chunk_index)))
    u = rng.random((size, n))
    v = rng.random((size, n))
    w = np.sqrt(u) * np.exp(1j * TWO_PI * v)
    z = 1j * (1 + w) / (1 - w)  # disk -> upper half-plane, area factor |dz/dw|^2
    jac = np.prod(4.0 / np.abs(1 - w) ** 4, axis=1)

    reject = np.zeros(size, dtype=bool)
    for i in range(n):
        for jj in range(i + 1, n):
            reject |= np.abs(z[:, i] - z[:, jj]) < MIN_DIST
        reject |= np.abs(z[:, i] - 0.0) < MIN_DIST
        reject |= np.abs(z[:, i] - 1.0) < MIN_DIST
        reject |= z[:, i].imag < MIN_DIST

    edges = graph.edges()
    rows = np.zeros((size, len(edges), 2 * n))
    for row, (vv, ww) in enumerate(edges):
        pv = z[:, vv - 1]
        cv = 2 * (vv - 1)
        if ww <= n:
            q = z[:, ww - 1]
            s1 = pv - q
            s2 = pv - np.conj(q)
            c = 1.0 / s1 + 1.0 / s2
            rows[:, row, cv] += c.imag
            rows[:, row, cv + 1] += c.real
            cw = 2 * (ww - 1)
            rows[:, row, cw] += (-1.0 / s1).imag + (-1.0 / s2).imag
            rows[:, row, cw + 1] += (-1j / s1).imag + (1j / s2).imag
        else:
            q = 0.0 if ww == n + 1 else 1.0
            s = pv - q
            rows[:, row, cv] += 2 * (1.0 / s).imag
            rows[:, row, cv + 1] += 2 * (1.0 / s).real
    dets = np.linalg.det(rows) * jac
    bad = ~np.isfinite(dets)
    reject |= bad
    dets = np.where(reject, 0.0, dets)
    return float(np.sum(dets)), float(np.sum(dets * dets)), int(np.count_nonzero(reject))


def halfplane_weight(graph: AdmissibleGraph, samples: int, seed: int,
                     threads: int | None = None) -> WeightEntry:
    """Classical 2-boundary weight over the half-plane slice (points at 0
    and 1, plain harmonic angle).  Top degree here is 2n edges: the
    quotient is by the 2-parameter affine group rather than PSL2(R)."""
    if graph.m != 2:
        raise ValueError("halfplane_weight needs m == 2")
    if graph.edge_count != 2 * graph.n:
        raise ValueError("graph has %d edges; the half-plane slice needs %d" % (graph.edge_count, 2 * graph.n))
    if threads is None:
        threads = default_threads()
    norm = math.pi ** graph.n / TWO_PI ** graph.edge_count
    plan = _chunk_plan(samples)
    worker = lambda c, size: _halfplane_chunk(graph, seed, c, size)
    s1, s2, rej = _reduce_chunks(worker, plan, threads)
    return _finalize(graph.canonical_key(), (), norm, s1, s2, samples, seed, rej)


def mixed_edge_integral(graph: AdmissibleGraph, ctx: AngleContext, replacement: AngleContext,
                        edge_index: int, samples: int, seed: int,
                        threads: int | None = None) -> WeightEntry:
    """Mixed integral with one edge's form replaced by the difference form
    d(phi_{alpha'} - phi_{alpha}).

    When sum(alpha') == sum(alpha) that difference depends only on the
    edge's start point, so retargeting the chosen edge (same source,
    same star slot) does not change the value."""
    E = graph.edge_count
    if not 0 <= edge_index < E:
        raise ValueError("edge_index out of range")
    if replacement.m != ctx.m or replacement.boundary_angles != ctx.boundary_angles:
        raise ValueError("contexts must share boundary data")
    edge_alphas = [ctx.alphas] * E
    edge_alphas[edge_index] = tuple(b - a for a, b in zip(ctx.alphas, replacement.alphas))
    return compute_weight(graph, ctx, samples, seed, threads, edge_alphas=edge_alphas)
