"""Candidate Cauchy endomorphisms and the flat-connection residual.

A symmetric endomorphism field A on S^3 solves the central equation
when

    R(X,Y) + *d^nabla A(X,Y) + A(X) ^ A(Y) = 0   for all X, Y,

equivalently when the modified connection nabla^A = nabla + *(A(.)) is
flat.  This module evaluates that residual, the contracted
Gauss-Codazzi constraints, the known constant-frame solution families,
and the operators appearing in the linearized problem.
"""

from __future__ import annotations

import numpy as np

from .frame import Chirality, ScalarField, _as_array
from .tensor import gamma_round, hat, structure_constant, wedge_endo

__all__ = [
    "SymEnd3Field",
    "VectorField3",
    "KNOWN_KINDS",
    "known_example",
    "modified_connection",
    "flatness_residual",
    "flatness_residual_norms",
    "residual_norm",
    "gauss_codazzi_residual",
    "linearized_residual",
    "symmetry_residual",
    "xi_operator",
    "definiteness_check",
    "FRAME_PAIRS",
]

# the three independent frame pairs; bilinearity makes them sufficient
FRAME_PAIRS = ((1, 2), (1, 3), (2, 3))


def _coerce_entry(value) -> ScalarField:
    if isinstance(value, ScalarField):
        return value
    if np.isscalar(value):
        return ScalarField.constant(float(value))
    raise TypeError("matrix entries must be ScalarFields or numbers")


class SymEnd3Field:
    """Symmetric endomorphism field in an invariant orthonormal frame.

    Stores the six independent coefficient fields; entry (i, j) is the
    component <A e_j, e_i> in the frame of the declared chirality.
    """

    def __init__(self, entries, chirality: Chirality = Chirality.LEFT):
        """entries: 3x3 nested sequence of ScalarFields / numbers.

        The lower triangle is replaced by the upper one, so the field is
        symmetric by construction.
        """
        e = [[_coerce_entry(entries[i][j]) for j in range(3)] for i in range(3)]
        for i in range(3):
            for j in range(i + 1, 3):
                e[j][i] = e[i][j]
        self.entries = e
        self.chirality = chirality

    # -- constructors --------------------------------------------------
    @classmethod
    def from_constant_matrix(cls, m, chirality: Chirality = Chirality.LEFT) -> "SymEnd3Field":
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3) or not np.allclose(m, m.T, atol=1e-14):
            raise ValueError("expected a symmetric 3x3 matrix")
        sym = 0.5 * (m + m.T)
        return cls([[sym[i, j] for j in range(3)] for i in range(3)], chirality)

    @classmethod
    def identity(cls, scale: float = 1.0, chirality: Chirality = Chirality.LEFT):
        return cls.from_constant_matrix(scale * np.eye(3), chirality)

    # -- evaluation -----------------------------------------------------
    def matrix(self, points) -> np.ndarray:
        pts = _as_array(points)
        out = np.zeros(pts.shape[:-1] + (3, 3))
        for i in range(3):
            for j in range(i, 3):
                val = self.entries[i][j](pts)
                out[..., i, j] = val
                out[..., j, i] = val
        return out

    def frame_derivative_matrix(self, k: int, points) -> np.ndarray:
        """Entrywise e_k-derivative (same chirality as the frame)."""
        pts = _as_array(points)
        out = np.zeros(pts.shape[:-1] + (3, 3))
        for i in range(3):
            for j in range(i, 3):
                val = self.entries[i][j].frame_derivative(k, self.chirality)(pts)
                out[..., i, j] = val
                out[..., j, i] = val
        return out

    def trace(self, points) -> np.ndarray:
        pts = _as_array(points)
        return sum(self.entries[i][i](pts) for i in range(3))

    # -- linear structure (for curves A + t Adot) ------------------------
    def _binary(self, other, op):
        if self.chirality is not other.chirality:
            raise ValueError("chirality mismatch")
        return SymEnd3Field(
            [[op(self.entries[i][j], other.entries[i][j]) for j in range(3)] for i in range(3)],
            self.chirality,
        )

    def __add__(self, other: "SymEnd3Field") -> "SymEnd3Field":
        return self._binary(other, lambda a, b: a + b)

    def __mul__(self, scalar) -> "SymEnd3Field":
        return SymEnd3Field(
            [[self.entries[i][j] * scalar for j in range(3)] for i in range(3)],
            self.chirality,
        )

    __rmul__ = __mul__


class VectorField3:
    """Vector field with coefficient fields in an invariant frame."""

    def __init__(self, components, chirality: Chirality = Chirality.LEFT):
        self.components = [_coerce_entry(c) for c in components]
        if len(self.components) != 3:
            raise ValueError("expected three components")
        self.chirality = chirality

    @classmethod
    def frame_vector(cls, k: int, chirality: Chirality = Chirality.LEFT) -> "VectorField3":
        return cls([1.0 if i == k - 1 else 0.0 for i in range(3)], chirality)

    def values(self, points) -> np.ndarray:
        pts = _as_array(points)
        return np.stack([c(pts) for c in self.components], axis=-1)

    def frame_derivative_values(self, k: int, points) -> np.ndarray:
        pts = _as_array(points)
        return np.stack(
            [c.frame_derivative(k, self.chirality)(pts) for c in self.components], axis=-1
        )


# -- known solution families -------------------------------------------

KNOWN_KINDS = ("plus-id", "minus-id", "left-133", "right-133")

_KIND_DATA = {
    "plus-id": (np.diag([1.0, 1.0, 1.0]), Chirality.LEFT),
    "minus-id": (np.diag([-1.0, -1.0, -1.0]), Chirality.LEFT),
    "left-133": (np.diag([1.0, -3.0, -3.0]), Chirality.LEFT),
    "right-133": (np.diag([-1.0, 3.0, 3.0]), Chirality.RIGHT),
}


def right_family_left_frame() -> SymEnd3Field:
    """The right-invariant solution with eigenvalues (-1,3,3), written in
    the left-invariant frame.

    A = 3 Id - 4 xi' (x) xi' with xi' = i*q the right-invariant unit
    field; the coefficients <xi', e_a><xi', e_b> are exact quartic
    polynomials.  Useful for the Hopf reduction, which is taken with
    respect to the left field e_1 (the flow of e_1 is a right
    translation, so right-invariant tensors are e_1-invariant).
    """
    from .frame import FRAME_MATRICES
    from .polynomial import Poly

    L = FRAME_MATRICES[(Chirality.RIGHT, 1)]  # ambient matrix of q -> i*q
    cos = []
    for k in (1, 2, 3):
        R = FRAME_MATRICES[(Chirality.LEFT, k)]
        M = L.T @ R  # co_k(a) = (L a) . (R a) = a^T (L^T R) a
        p = Poly(4, {})
        for m in range(4):
            for n in range(4):
                if M[m, n] != 0.0:
                    e = [0, 0, 0, 0]
                    e[m] += 1
                    e[n] += 1
                    p = p + Poly(4, {tuple(e): M[m, n]})
        cos.append(p)
    entries = [
        [
            ScalarField(
                poly=(Poly.constant(3.0 if i == j else 0.0, 4)) - 4.0 * (cos[i] * cos[j])
            )
            for j in range(3)
        ]
        for i in range(3)
    ]
    return SymEnd3Field(entries, Chirality.LEFT)


def known_example(kind: str, rotation=None) -> SymEnd3Field:
    """One of the four known families, optionally frame-rotated.

    kind 'left-133' is the field with eigenvalues (1,-3,-3) constant in
    the left-invariant frame (eigenvalue 1 on e_1); 'right-133' the
    right-invariant field with eigenvalues (-1,3,3).  `rotation`
    conjugates the coefficient matrix by a constant orthogonal matrix
    (frame freedom).
    """
    if kind not in _KIND_DATA:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KNOWN_KINDS}")
    diag, chir = _KIND_DATA[kind]
    if rotation is None:
        m = diag
    else:
        r = np.asarray(rotation, dtype=float)
        if r.shape != (3, 3) or np.max(np.abs(r.T @ r - np.eye(3))) > 1e-10:
            raise ValueError("rotation must be a 3x3 orthogonal matrix")
        m = r @ diag @ r.T
    return SymEnd3Field.from_constant_matrix(m, chir)


# -- connection and residuals -------------------------------------------


def _cov_matrix(A: SymEnd3Field, k: int, points, M=None) -> np.ndarray:
    """nabla_{e_k} A as a frame matrix: dA_k + [Gamma_k, A]."""
    if M is None:
        M = A.matrix(points)
    dM = A.frame_derivative_matrix(k, points)
    G = gamma_round(k, A.chirality)
    return dM + G @ M - M @ G


def modified_connection(A: SymEnd3Field, points, a: int, b: int) -> np.ndarray:
    """nabla^A_{e_a} e_b = nabla_{e_a} e_b + (*A(e_a))(e_b), frame coefficients."""
    M = A.matrix(points)
    base = gamma_round(a, A.chirality)[:, b - 1]
    ea = np.zeros(3)
    ea[a - 1] = 1.0
    eb = np.zeros(3)
    eb[b - 1] = 1.0
    acol = np.einsum("...ij,j->...i", M, ea)
    return base + np.cross(acol, eb)


def flatness_residual(A: SymEnd3Field, points, x=None, y=None, pair=None) -> np.ndarray:
    """Residual R(X,Y) + *d^nabla A(X,Y) + A(X)^A(Y) as a dual 3-vector.

    X, Y are constant frame-coefficient vectors (or pass pair=(a,b) for
    frame pairs).  Zero for all pairs exactly when A solves the central
    equation at the sampled points.
    """
    if pair is not None:
        x = np.eye(3)[pair[0] - 1]
        y = np.eye(3)[pair[1] - 1]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pts = _as_array(points)
    M = A.matrix(pts)

    curv = -wedge_endo(x, y)  # R(X,Y) dual vector
    covx = np.zeros_like(M)
    covy = np.zeros_like(M)
    for k in range(3):
        if x[k] == 0.0 and y[k] == 0.0:
            continue
        ck = _cov_matrix(A, k + 1, pts, M)
        if x[k] != 0.0:
            covx = covx + x[k] * ck
        if y[k] != 0.0:
            covy = covy + y[k] * ck
    dvec = np.einsum("...ij,j->...i", covx, y) - np.einsum("...ij,j->...i", covy, x)
    ax = np.einsum("...ij,j->...i", M, x)
    ay = np.einsum("...ij,j->...i", M, y)
    return curv + dvec + np.cross(ax, ay)


def residual_norm(dual) -> np.ndarray:
    """Frobenius norm of the skew endomorphism with the given dual vector."""
    dual = np.asarray(dual, dtype=float)
    return np.sqrt(2.0) * np.linalg.norm(dual, axis=-1)


def flatness_residual_norms(A: SymEnd3Field, points) -> np.ndarray:
    """Frobenius residual norms over the three frame pairs: shape (...,3)."""
    vals = [residual_norm(flatness_residual(A, points, pair=p)) for p in FRAME_PAIRS]
    return np.stack(vals, axis=-1)


def gauss_codazzi_residual(A: SymEnd3Field, points):
    """(6 - tr(A)^2 + tr(A^2),  delta^nabla A + d tr A) on the round sphere."""
    pts = _as_array(points)
    M = A.matrix(pts)
    tr = np.trace(M, axis1=-2, axis2=-1)
    tr2 = np.einsum("...ij,...ji->...", M, M)
    scalar = 6.0 - tr**2 + tr2

    vec = np.zeros(M.shape[:-2] + (3,))
    for k in range(3):
        ck = _cov_matrix(A, k + 1, pts, M)
        vec = vec - ck[..., :, k]  # delta^nabla A
    for k in range(3):
        # d tr A = sum_k e_k(tr A) e_k
        dtr = sum(
            A.entries[i][i].frame_derivative(k + 1, A.chirality)(pts) for i in range(3)
        )
        vec[..., k] += dtr
    return scalar, vec


def linearized_residual(A: SymEnd3Field, Adot: SymEnd3Field, points, x=None, y=None, pair=None):
    """(d^{nabla^A} Adot)(X, Y): the linearization of the flatness residual.

    The intrinsic twisted exterior derivative of the 1-form Adot,

        nabla^A_X (Adot Y) - nabla^A_Y (Adot X) - Adot([X, Y]),

    is used: nabla^A carries torsion Abar(X)Y - Abar(Y)X, so this
    differs from (nabla^A_X Adot)Y - (nabla^A_Y Adot)X by Adot(torsion).
    The intrinsic form is the differential of the flat complex: it
    vanishes on nabla^A-exact deformations, and its Hodge dual is the
    t-derivative at 0 of flatness_residual along A + t Adot.
    """
    if A.chirality is not Adot.chirality:
        raise ValueError("A and Adot must share a frame chirality")
    if pair is not None:
        x = np.eye(3)[pair[0] - 1]
        y = np.eye(3)[pair[1] - 1]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pts = _as_array(points)
    M = A.matrix(pts)
    N = Adot.matrix(pts)
    lam = structure_constant(A.chirality)

    def deriv_of_image(k, vec):
        # nabla^A_{e_k} of the coefficient field q -> Adot(q) vec
        dN = Adot.frame_derivative_matrix(k, pts)
        ek = np.zeros(3)
        ek[k - 1] = 1.0
        GA = gamma_round(k, A.chirality) + hat(np.einsum("...ij,j->...i", M, ek))
        w = np.einsum("...ij,j->...i", N, vec)
        return np.einsum("...ij,j->...i", dN, vec) + np.einsum("...ij,...j->...i", GA, w)

    out = np.zeros(N.shape[:-2] + (3,))
    for k in range(3):
        if x[k] != 0.0:
            out = out + x[k] * deriv_of_image(k + 1, y)
        if y[k] != 0.0:
            out = out - y[k] * deriv_of_image(k + 1, x)
    bracket = lam * np.cross(x, y)
    return out - np.einsum("...ij,j->...i", N, bracket)


def _exterior_derivative_vector(X: VectorField3, points) -> np.ndarray:
    """dX of the metric-dual 1-form, as a dual 3-vector.

    Component c (cyclic pair (a,b,c)):
    e_a(x_b) - e_b(x_a) - lambda x_c, with lambda the structure constant.
    """
    pts = _as_array(points)
    lam = structure_constant(X.chirality)
    vals = X.values(pts)
    d = [X.frame_derivative_values(k, pts) for k in (1, 2, 3)]
    out = np.zeros_like(vals)
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        out[..., c] = d[a][..., b] - d[b][..., a] - lam * vals[..., c]
    return out


def symmetry_residual(A: SymEnd3Field, X: VectorField3, points, B=None) -> np.ndarray:
    """Left side of the symmetry condition, as a dual 3-vector:

    dX - *(X tr A - A X) + sum_k e_k ^ B(e_k),   B optional (matrix field).

    Vanishes exactly when d^{nabla^A} X + B is a symmetric endomorphism.
    """
    pts = _as_array(points)
    M = A.matrix(pts)
    vals = X.values(pts)
    tr = np.trace(M, axis1=-2, axis2=-1)
    w = vals * tr[..., None] - np.einsum("...ij,...j->...i", M, vals)
    res = _exterior_derivative_vector(X, pts) - w
    if B is not None:
        Bm = B.matrix(pts) if hasattr(B, "matrix") else np.asarray(B, dtype=float)
        for k in range(3):
            ek = np.zeros(3)
            ek[k] = 1.0
            res = res + np.cross(ek, Bm[..., :, k])
    return res


def xi_operator(A: SymEnd3Field, X: VectorField3, points):
    """Xi(X) = (dX - *(X tr A - A X), delta(X tr A - A X)).

    The first component is returned as a dual 3-vector, the second as a
    scalar.  In the invariant frame the codifferential of a 1-form w is
    -sum_k e_k(w_k) (the frame is divergence-free).
    """
    pts = _as_array(points)
    first = symmetry_residual(A, X, pts, B=None)

    M = A.matrix(pts)
    vals = X.values(pts)
    tr = np.trace(M, axis1=-2, axis2=-1)
    div = np.zeros(pts.shape[:-1])
    for k in range(3):
        # W_k = x_k tr A - (A x)_k; e_k W_k by the product rule
        dx = X.frame_derivative_values(k + 1, pts)
        dA = A.frame_derivative_matrix(k + 1, pts)
        dtr = np.trace(dA, axis1=-2, axis2=-1)
        div = div + (
            dx[..., k] * tr
            + vals[..., k] * dtr
            - np.einsum("...j,...j->...", dA[..., k, :], vals)
            - np.einsum("...j,...j->...", M[..., k, :], dx)
        )
    return first, -div


def definiteness_check(B):
    """Test the pairwise-eigenvalue-sum criterion on a symmetric matrix.

    Returns (is_definite, sign): is_definite is True when
    l1 l2 + l1 l3 + l2 l3 > 0, which forces B - tr(B) Id to be definite;
    sign is +1 / -1 for positive / negative definite (None otherwise).
    """
    B = np.asarray(B, dtype=float)
    lam = np.linalg.eigvalsh(0.5 * (B + B.T))
    pair_sum = lam[0] * lam[1] + lam[0] * lam[2] + lam[1] * lam[2]
    if pair_sum <= 0:
        return False, None
    shifted_eigs = lam - lam.sum()
    sign = 1 if np.all(shifted_eigs > 0) else -1
    return True, sign
