"""Polyvector fields on R^d: wedge product, Schouten bracket, divergence.

A k-vector field is stored through its strictly increasing basis keys,
i.e. as an element of the odd polynomial algebra in theta_1..theta_d
with Polynomial coefficients.  The Lie grading of the bracket is
degree = arity - 1, so functions sit in degree -1 and bivectors in
degree 1.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Polynomial


def _normalize_key(key):
    """Sort a basis key, returning (sorted_key, parity_sign) or None if repeated."""
    key = list(key)
    sign = 1
    for i in range(1, len(key)):
        j = i
        while j > 0 and key[j - 1] > key[j]:
            key[j - 1], key[j] = key[j], key[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(key)):
        if key[i - 1] == key[i]:
            return None
    return tuple(key), sign


class PolyVector:
    """Skew multivector field with Polynomial coefficients."""

    __slots__ = ("dim", "degree", "components")

    def __init__(self, dim: int, degree: int, components=None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if degree < -1:
            raise ValueError("degree must be >= -1")
        arity = degree + 1
        clean = {}
        for key, poly in (components or {}).items():
            key = tuple(int(i) for i in key)
            if len(key) != arity:
                raise ValueError("key %r has arity %d, expected %d" % (key, len(key), arity))
            if any(not 1 <= i <= dim for i in key):
                raise ValueError("axis out of range in key %r (dim=%d)" % (key, dim))
            norm = _normalize_key(key)
            if norm is None:
                continue
            skey, sign = norm
            if not isinstance(poly, Polynomial):
                poly = Polynomial.constant(dim, poly)
            if poly.dim != dim:
                raise ValueError("component polynomial dim %d != %d" % (poly.dim, dim))
            p = sign * poly
            if skey in clean:
                p = clean[skey] + p
            if p.is_zero():
                clean.pop(skey, None)
            else:
                clean[skey] = p
        # a nonzero multivector cannot exceed top degree; the zero one may
        # carry any degree label (wedge overflow returns such a zero)
        if clean and arity > dim:
            raise ValueError("degree %d exceeds dim-1=%d" % (degree, dim - 1))
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "components", clean)

    def __setattr__(self, name, value):
        raise AttributeError("PolyVector is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, dim: int, degree: int) -> "PolyVector":
        return cls(dim, degree, {})

    @classmethod
    def from_function(cls, p: Polynomial) -> "PolyVector":
        return cls(p.dim, -1, {(): p})

    @classmethod
    def vector(cls, dim: int, components) -> "PolyVector":
        """Vector field from {axis: Polynomial} or a length-dim sequence."""
        if not isinstance(components, dict):
            components = {i: p for i, p in enumerate(components, start=1)}
        return cls(dim, 0, {(i,): p for i, p in components.items()})

    # -- bookkeeping --------------------------------------------------------

    @property
    def arity(self) -> int:
        return self.degree + 1

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other):
        if not isinstance(other, PolyVector):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.components != other.components:
            return False
        # zero vectors compare equal across degrees only if degrees match
        return self.is_zero() or self.degree == other.degree

    def __hash__(self):
        return hash((self.dim, self.degree, frozenset(self.components.items())))

    def coefficient(self, indices) -> Polynomial:
        """Full skew tensor component for an arbitrary index tuple."""
        norm = _normalize_key(tuple(indices))
        if norm is None:
            return Polynomial.zero(self.dim)
        skey, sign = norm
        p = self.components.get(skey)
        if p is None:
            return Polynomial.zero(self.dim)
        return sign * p

    # -- linear structure ---------------------------------------------------

    def _check(self, other: "PolyVector"):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch: %d vs %d" % (self.dim, other.dim))

    def __add__(self, other):
        if not isinstance(other, PolyVector):
            return NotImplemented
        self._check(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("degree mismatch: %d vs %d" % (self.degree, other.degree))
        out = dict(self.components)
        for key, p in other.components.items():
            s = out.get(key, Polynomial.zero(self.dim)) + p
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return PolyVector(self.dim, self.degree, out)

    def __neg__(self):
        return PolyVector(self.dim, self.degree, {k: -p for k, p in self.components.items()})

    def __sub__(self, other):
        if not isinstance(other, PolyVector):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, Fraction, Polynomial)):
            return PolyVector(self.dim, self.degree, {k: p * scalar for k, p in self.components.items()})
        return NotImplemented

    __rmul__ = __mul__

    # -- odd calculus --------------------------------------------------------

    def theta_derivative(self, i: int) -> "PolyVector":
        """Left derivative with respect to theta_i; arity drops by one."""
        out = {}
        for key, p in self.components.items():
            if i not in key:
                continue
            pos = key.index(i)
            sign = -1 if pos % 2 else 1
            new_key = key[:pos] + key[pos + 1:]
            out[new_key] = sign * p
        return PolyVector(self.dim, max(self.degree - 1, -1) if not out else self.degree - 1, out)

    def x_derivative(self, i: int) -> "PolyVector":
        out = {}
        for key, p in self.components.items():
            d = p.partial(i)
            if not d.is_zero():
                out[key] = d
        return PolyVector(self.dim, self.degree, out)

    def wedge(self, other: "PolyVector") -> "PolyVector":
        """Exterior product; returns a zero multivector on degree overflow."""
        self._check(other)
        degree = self.degree + other.degree + 1
        out = {}
        for ka, pa in self.components.items():
            for kb, pb in other.components.items():
                norm = _normalize_key(ka + kb)
                if norm is None:
                    continue
                key, sign = norm
                p = sign * (pa * pb)
                s = out.get(key, Polynomial.zero(self.dim)) + p
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return PolyVector(self.dim, degree, out)

    def schouten(self, other: "PolyVector") -> "PolyVector":
        """Schouten-Nijenhuis bracket.

        In the odd-coordinate picture, with |A| the geometric arity,
            [A, B] = sum_i ( (-1)^{|A|+1} (d_theta_i A) ^ (d_x_i B)
                             - (d_x_i A) ^ (d_theta_i B) ).
        On two vector fields this is the Lie bracket; on a vector field
        and a function it is the directional derivative.
        """
        self._check(other)
        degree = self.degree + other.degree
        result = PolyVector.zero(self.dim, degree)
        sign_a = 1 if (self.arity + 1) % 2 == 0 else -1
        for i in range(1, self.dim + 1):
            ta = self.theta_derivative(i)
            if not ta.is_zero():
                xb = other.x_derivative(i)
                if not xb.is_zero():
                    result = result + sign_a * ta.wedge(xb)
            xa = self.x_derivative(i)
            if not xa.is_zero():
                tb = other.theta_derivative(i)
                if not tb.is_zero():
                    result = result - xa.wedge(tb)
        return result

    def divergence(self, vol: "VolumeForm") -> "PolyVector":
        """Divergence with respect to vol; degree drops by one.

        div(A) = sum_i ( d_x_i (d_theta_i A) + (d_x_i rho) * (d_theta_i A) )
        for the density exp(rho).
        """
        if self.dim != vol.dim:
            raise ValueError("dimension mismatch with volume form")
        if self.degree < 0:
            raise ValueError("divergence of a function (degree -1) is undefined")
        result = PolyVector.zero(self.dim, self.degree - 1)
        for i in range(1, self.dim + 1):
            ti = self.theta_derivative(i)
            if ti.is_zero():
                continue
            result = result + ti.x_derivative(i)
            drho = vol.log_density.partial(i)
            if not drho.is_zero():
                result = result + ti * drho
        return result

    def is_poisson(self) -> bool:
        """Jacobi identity [pi, pi] == 0; requires a bivector."""
        if self.degree != 1:
            raise ValueError("is_poisson requires a bivector (degree 1)")
        return self.schouten(self).is_zero()

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        comps = {",".join(str(i) for i in k): p.render() for k, p in sorted(self.components.items())}
        return {"dim": self.dim, "degree": self.degree, "components": comps}

    @classmethod
    def from_json(cls, obj: dict) -> "PolyVector":
        dim = int(obj["dim"])
        degree = int(obj["degree"])
        comps = {}
        for key, text in obj.get("components", {}).items():
            indices = tuple(int(s) for s in key.split(",")) if key else ()
            comps[indices] = Polynomial.parse(text, dim)
        return cls(dim, degree, comps)

    def render(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for key, p in sorted(self.components.items()):
            basis = "^".join("d%d" % i for i in key)
            if basis:
                parts.append("(%s) %s" % (p.render(), basis))
            else:
                parts.append("(%s)" % p.render())
        return " + ".join(parts)

    def __repr__(self):
        return "PolyVector(%d, %d, %s)" % (self.dim, self.degree, self.render())


class VolumeForm:
    """Volume form exp(rho) dx1^...^dxd with polynomial log-density rho."""

    __slots__ = ("dim", "log_density")

    def __init__(self, dim: int, log_density: Polynomial | None = None):
        if log_density is None:
            log_density = Polynomial.zero(dim)
        if log_density.dim != dim:
            raise ValueError("log_density dim mismatch")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "log_density", log_density)

    def __setattr__(self, name, value):
        raise AttributeError("VolumeForm is immutable")

    @classmethod
    def constant(cls, dim: int) -> "VolumeForm":
        return cls(dim)

    def is_constant(self) -> bool:
        return self.log_density.degree() <= 0

    def __eq__(self, other):
        if not isinstance(other, VolumeForm):
            return NotImplemented
        return self.dim == other.dim and self.log_density == other.log_density

    def to_json(self) -> dict:
        return {"dim": self.dim, "log_density": self.log_density.render()}

    @classmethod
    def from_json(cls, obj: dict) -> "VolumeForm":
        dim = int(obj["dim"])
        return cls(dim, Polynomial.parse(obj.get("log_density", "0"), dim))

    def __repr__(self):
        return "VolumeForm(%d, %s)" % (self.dim, self.log_density.render())
