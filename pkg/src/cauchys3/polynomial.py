"""Sparse real polynomials in ambient Euclidean coordinates.

These back the exact derivative mode: every scalar quantity that has an
ambient polynomial representative is stored as a :class:`Poly`, and
directional derivatives along linear vector fields map polynomials to
polynomials, so iterated frame derivatives stay exact.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Poly"]


class Poly:
    """Polynomial in ``nvars`` variables, stored as a monomial dict.

    Keys are exponent tuples of length ``nvars``; values are float
    coefficients.  Instances are treated as immutable: all operations
    return new polynomials.
    """

    __slots__ = ("nvars", "terms", "_exps", "_coefs")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = int(nvars)
        clean: dict[tuple, float] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != self.nvars:
                    raise ValueError(f"exponent tuple {e} has wrong length")
                c = float(c)
                if c != 0.0:
                    clean[e] = clean.get(e, 0.0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0.0}
        self._exps = None
        self._coefs = None

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, value: float, nvars: int) -> "Poly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def coordinate(cls, index: int, nvars: int) -> "Poly":
        """The linear monomial x_index (0-based)."""
        e = [0] * nvars
        e[index] = 1
        return cls(nvars, {tuple(e): 1.0})

    @classmethod
    def linear(cls, coeffs, nvars: int) -> "Poly":
        """sum_i coeffs[i] * x_i."""
        terms = {}
        for i, c in enumerate(coeffs):
            if c != 0.0:
                e = [0] * nvars
                e[i] = 1
                terms[tuple(e)] = float(c)
        return cls(nvars, terms)

    # -- algebra ------------------------------------------------------
    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError("polynomials over different variable counts")

    def __add__(self, other):
        if np.isscalar(other):
            other = Poly.constant(float(other), self.nvars)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return Poly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if np.isscalar(other):
            other = Poly.constant(float(other), self.nvars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return Poly(self.nvars, {e: c * float(other) for e, c in self.terms.items()})
        self._check(other)
        terms: dict[tuple, float] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0.0) + c1 * c2
        return Poly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0 or n != int(n):
            raise ValueError("only nonnegative integer powers")
        out = Poly.constant(1.0, self.nvars)
        for _ in range(int(n)):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------
    def partial(self, index: int) -> "Poly":
        """Partial derivative with respect to x_index."""
        terms: dict[tuple, float] = {}
        for e, c in self.terms.items():
            k = e[index]
            if k == 0:
                continue
            e2 = list(e)
            e2[index] = k - 1
            e2 = tuple(e2)
            terms[e2] = terms.get(e2, 0.0) + c * k
        return Poly(self.nvars, terms)

    def derive_along_linear(self, matrix) -> "Poly":
        """Directional derivative along the linear vector field x -> M x.

        Returns sum_m (dP/dx_m) * (M x)_m, again a polynomial.
        """
        M = np.asarray(matrix, dtype=float)
        out = Poly(self.nvars, {})
        for m in range(self.nvars):
            pm = self.partial(m)
            if not pm.terms:
                continue
            row = Poly.linear(M[m], self.nvars)
            out = out + pm * row
        return out

    def gradient(self) -> list["Poly"]:
        return [self.partial(i) for i in range(self.nvars)]

    # -- evaluation ---------------------------------------------------
    def _compile(self):
        if self._exps is None:
            if self.terms:
                self._exps = np.array(list(self.terms.keys()), dtype=np.int64)
                self._coefs = np.array(list(self.terms.values()), dtype=float)
            else:
                self._exps = np.zeros((0, self.nvars), dtype=np.int64)
                self._coefs = np.zeros(0)
        return self._exps, self._coefs

    def __call__(self, points):
        """Evaluate at points of shape (..., nvars).  Returns shape (...)."""
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.nvars:
            raise ValueError(f"points must have last dimension {self.nvars}")
        exps, coefs = self._compile()
        if len(coefs) == 0:
            return np.zeros(pts.shape[:-1])
        mono = np.prod(pts[..., None, :] ** exps, axis=-1)
        return mono @ coefs

    # -- misc ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        bits = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(
                f"x{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k
            )
            bits.append(f"{c:g}" + (f"*{mono}" if mono else ""))
        return "Poly(" + " + ".join(bits) + ")"
