"""Star-product assembly and the theorem-level checks built on it.

Levels are assembled as

    B_n = (1/n!) (1/2^n) sum_{Gamma in star_graphs(n, 2)} w_Gamma U_Gamma

where w_Gamma is the stored table weight (the plain normalized angle-form
integral, one (2pi) factor per edge, no extra symmetry prefactors) and
U_Gamma is the Kontsevich contraction of the graph against n copies of the
bivector.  With the harmonic angles this yields B_1 = (1/2) pi^{ij} d_i(f)
d_j(g) and the Moyal 1/8-pattern at order 2.

Checks return JSON-friendly report dicts; exactness-critical checks
(associativity, cyclicity, closedness) refuse Monte Carlo-backed tables.
"""

import itertools
import math
import random
from fractions import Fraction

from .diffops import PolyDiffOperator
from .graphs import AdmissibleGraph, star_graphs
from .poly import Polynomial
from .polyvector import PolyVector, VolumeForm
from .weights import WeightTable


def _level_prefactor(n: int) -> Fraction:
    return Fraction(1, math.factorial(n) * 2 ** n)


def graph_to_operator(graph: AdmissibleGraph, gammas) -> PolyDiffOperator:
    """Kontsevich contraction of an admissible graph against multivectors.

    Sums over all assignments of an axis to every edge.  Internal vertex k
    contributes the component of gammas[k-1] picked out by its ordered
    star; every edge pointing at k differentiates that factor; edges into
    boundary vertices become derivatives on the argument slots.  The
    result has arity m.
    """
    gammas = list(gammas)
    if len(gammas) != graph.n:
        raise ValueError("expected %d multivectors, got %d" % (graph.n, len(gammas)))
    if not gammas:
        raise ValueError("need at least one multivector to infer the dimension")
    dim = gammas[0].dim
    for k, g in enumerate(gammas):
        if g.dim != dim:
            raise ValueError("multivector %d has dim %d, expected %d" % (k + 1, g.dim, dim))
        if len(graph.stars[k]) != g.degree + 1:
            raise ValueError("vertex %d has out-degree %d but its multivector needs %d"
                             % (k + 1, len(graph.stars[k]), g.degree + 1))
    n, m = graph.n, graph.m
    edges = graph.edges()
    out = {}
    for assign in itertools.product(range(1, dim + 1), repeat=len(edges)):
        out_idx = {v: [] for v in range(1, n + 1)}
        in_mi = {v: [0] * dim for v in range(1, n + 1)}
        bnd_mi = [[0] * dim for _ in range(m)]
        for (src, tgt), idx in zip(edges, assign):
            out_idx[src].append(idx)
            if tgt <= n:
                in_mi[tgt][idx - 1] += 1
            else:
                bnd_mi[tgt - n - 1][idx - 1] += 1
        coeff = Polynomial.one(dim)
        for v in range(1, n + 1):
            f = gammas[v - 1].coefficient(tuple(out_idx[v]))
            if not f.is_zero():
                f = f.derive(tuple(in_mi[v]))
            if f.is_zero():
                coeff = None
                break
            coeff = coeff * f
        if coeff is None:
            continue
        key = tuple(tuple(mi) for mi in bnd_mi)
        prev = out.get(key)
        out[key] = coeff if prev is None else prev + coeff
    return PolyDiffOperator(dim, m, out)


def _table_weight(table: WeightTable, graph: AdmissibleGraph):
    entry = table.lookup_star(graph)
    if entry is None:
        raise ValueError("weight table has no entry for graph %s" % graph.canonical_key())
    if entry.exact is not None:
        return entry.exact, True
    return Fraction(entry.value), False


class StarProduct:
    """Truncated star product: levels B_0..B_order, B_0 = multiplication."""

    __slots__ = ("pi", "order", "levels", "weight_source")

    def __init__(self, pi: PolyVector, order: int, levels, weight_source):
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "levels", tuple(levels))
        object.__setattr__(self, "weight_source", dict(weight_source))

    def __setattr__(self, name, value):
        raise AttributeError("StarProduct is immutable")

    @property
    def is_exact(self) -> bool:
        return self.weight_source.get("kind") == "exact"

    def apply(self, f: Polynomial, g: Polynomial):
        if f.dim != self.pi.dim or g.dim != self.pi.dim:
            raise ValueError("argument dimension mismatch")
        return [level.apply((f, g)) for level in self.levels]

    def to_json(self) -> dict:
        return {
            "pi": self.pi.to_json(),
            "order": self.order,
            "levels": [level.to_json() for level in self.levels],
            "weight_source": dict(self.weight_source),
        }


def assemble_star(pi: PolyVector, table: WeightTable, order: int = 2) -> StarProduct:
    """Build the star product through the given order.

    Requires a Poisson bivector and full table coverage of
    star_graphs(n, 2) for n <= order; a missing weight is an error.
    """
    if pi.degree != 1:
        raise ValueError("pi must be a bivector")
    if order < 0:
        raise ValueError("order must be >= 0")
    jac = pi.schouten(pi)
    if not jac.is_zero():
        key, comp = next(iter(sorted(jac.components.items())))
        raise ValueError("pi is not Poisson: [pi,pi] component %s = %s"
                         % (",".join(map(str, key)), comp.render()))
    dim = pi.dim
    levels = [PolyDiffOperator.multiplication(dim)]
    all_exact = True
    for n in range(1, order + 1):
        total = PolyDiffOperator.zero(dim, 2)
        for g in star_graphs(n, 2):
            w, exact = _table_weight(table, g)
            all_exact = all_exact and exact
            if w != 0:
                total = total + graph_to_operator(g, [pi] * n) * w
        levels.append(total * _level_prefactor(n))
    source = {"kind": "exact" if all_exact else "monte_carlo",
              "table_sha256": table.fingerprint()}
    return StarProduct(pi, order, levels, source)


def star_apply(s: StarProduct, f: Polynomial, g: Polynomial):
    """Coefficients of hbar^0..hbar^order of f * g."""
    return s.apply(f, g)


def _require_exact(s: StarProduct, what: str):
    if not s.is_exact:
        raise ValueError("%s needs an exact weight table (got Monte Carlo entries)" % what)


def _random_polynomial(dim: int, rng: random.Random, max_degree: int = 3) -> Polynomial:
    terms = {}
    for _ in range(rng.randint(2, 4)):
        total = rng.randint(0, max_degree)
        exps = [0] * dim
        for _ in range(total):
            exps[rng.randrange(dim)] += 1
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        exps = tuple(exps)
        terms[exps] = terms.get(exps, 0) + c
    p = Polynomial(dim, terms)
    return p if not p.is_zero() else Polynomial.one(dim)


def check_associative(s: StarProduct, trials: int = 20, seed: int = 0) -> dict:
    """(f*g)*h == f*(g*h) through hbar^order on random polynomial triples."""
    _require_exact(s, "associativity check")
    rng = random.Random(seed)
    dim = s.pi.dim
    failures = []
    for trial in range(trials):
        f, g, h = (_random_polynomial(dim, rng) for _ in range(3))
        for n in range(s.order + 1):
            res = Polynomial.zero(dim)
            for k in range(n + 1):
                bk, bl = s.levels[k], s.levels[n - k]
                res = res + bk.apply((bl.apply((f, g)), h)) - bk.apply((f, bl.apply((g, h))))
            if not res.is_zero():
                failures.append({"trial": trial, "order": n, "residual": res.render()})
    return {
        "check": "associative",
        "order": s.order,
        "trials": trials,
        "seed": seed,
        "failures": failures,
        "passed": not failures,
    }


def check_cyclic(s: StarProduct, vol: VolumeForm) -> dict:
    """int B_n(f,g) h Omega == int f B_n(g,h) Omega, exactly, per order.

    Per level this is nf(B_n(f,g)*h) == B_n, the arity-2 instance of the
    cyclic-shift fixed-point condition.
    """
    _require_exact(s, "cyclicity check")
    if vol.dim != s.pi.dim:
        raise ValueError("volume form dimension mismatch")
    orders = []
    for n, level in enumerate(s.levels):
        nf = level.extended_by_slot().ibp_normal_form(vol)
        residual = nf - level
        ok = residual.is_zero()
        orders.append({"order": n, "cyclic": ok,
                       "residual": None if ok else residual.render()})
    return {
        "check": "cyclic",
        "order": s.order,
        "orders": orders,
        "passed": all(o["cyclic"] for o in orders),
    }


def check_closed(s: StarProduct, vol: VolumeForm) -> dict:
    """int B_n(f,g) Omega == 0 for n >= 1, exactly, per order."""
    _require_exact(s, "closedness check")
    if vol.dim != s.pi.dim:
        raise ValueError("volume form dimension mismatch")
    orders = []
    for n, level in enumerate(s.levels):
        if n == 0:
            continue
        nf = level.ibp_normal_form(vol)
        ok = nf.is_zero()
        orders.append({"order": n, "closed": ok,
                       "residual": None if ok else nf.render()})
    return {
        "check": "closed",
        "order": s.order,
        "orders": orders,
        "passed": all(o["closed"] for o in orders),
    }


def assemble_trilinear(pi: PolyVector, alphas, table: WeightTable, order: int) -> PolyDiffOperator:
    """Alpha-weighted trilinear operator sum_Gamma W_Gamma^alpha U_Gamma.

    Same prefactor convention as the star levels; the table must cover
    star_graphs(order, 3) at the given alphas.
    """
    if pi.degree != 1:
        raise ValueError("pi must be a bivector")
    alphas = tuple(float(a) for a in alphas)
    total = PolyDiffOperator.zero(pi.dim, 3)
    for g in star_graphs(order, 3):
        entry = table.get(g.canonical_key(), alphas)
        if entry is None:
            raise ValueError("weight table has no entry for %s at alpha=%s"
                             % (g.canonical_key(), list(alphas)))
        w = entry.exact if entry.exact is not None else Fraction(entry.value)
        if w != 0:
            total = total + graph_to_operator(g, [pi] * order) * w
    return total * _level_prefactor(order)


def check_alpha_independence(pi: PolyVector, alphas, alphas2, table: WeightTable,
                             order: int, vol: VolumeForm, floor: float = 1e-3) -> dict:
    """Compare slot-1 normal forms of the two alpha-weighted trilinear
    functionals, coefficient by coefficient.

    Tolerance per coefficient is max(3 * propagated std error, floor);
    weight standard errors propagate linearly through the (exact)
    per-graph normal forms.  Equal alpha sums are a precondition of the
    underlying statement; differing sums are flagged as misuse.
    """
    if pi.dim != vol.dim:
        raise ValueError("volume form dimension mismatch")
    a1 = tuple(float(x) for x in alphas)
    a2 = tuple(float(x) for x in alphas2)
    if abs(sum(a1) - sum(a2)) > 1e-9:
        raise ValueError("alpha sums differ (%.6g vs %.6g): the statement "
                         "compares equal-sum weight systems" % (sum(a1), sum(a2)))
    pref = _level_prefactor(order)
    nfs = {}
    for g in star_graphs(order, 3):
        nfs[g.canonical_key()] = graph_to_operator(g, [pi] * order).ibp_normal_form(vol)

    def side(al):
        acc = {}
        for key, nf in nfs.items():
            entry = table.get(key, al)
            if entry is None:
                raise ValueError("weight table has no entry for %s at alpha=%s" % (key, list(al)))
            w = entry.exact if entry.exact is not None else Fraction(entry.value)
            sig = entry.std_error
            for opkey, cpoly in nf.terms.items():
                for exps, c in cpoly.terms.items():
                    cell = acc.setdefault((opkey, exps), [Fraction(0), 0.0])
                    cell[0] += w * c
                    cell[1] += (float(c) * sig) ** 2
        return acc

    s1, s2 = side(a1), side(a2)
    rows = []
    passed = True
    for cell_key in sorted(set(s1) | set(s2)):
        v1, var1 = s1.get(cell_key, (Fraction(0), 0.0))
        v2, var2 = s2.get(cell_key, (Fraction(0), 0.0))
        delta = abs(float(pref * (v1 - v2)))
        tol = max(3.0 * float(pref) * math.sqrt(var1 + var2), floor)
        ok = delta <= tol
        passed = passed and ok
        opkey, exps = cell_key
        rows.append({
            "slots": ["".join(str(e) for e in mi) for mi in opkey],
            "monomial": "".join(str(e) for e in exps),
            "delta": delta,
            "tolerance": tol,
            "ok": ok,
        })
    return {
        "check": "alpha",
        "order": order,
        "alphas": list(a1),
        "alphas2": list(a2),
        "divergence_free": pi.divergence(vol).is_zero(),
        "coefficients": rows,
        "passed": passed,
    }
