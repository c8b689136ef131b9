"""Pointwise exterior algebra and curvature tables in orthonormal frames.

A 2-form, its skew endomorphism, and (through the Hodge star) a vector
are all carried by one stored 3-vector: a skew object with dual vector
s acts as Z -> s x Z, i.e. as the matrix hat(s).  With this convention

    wedge(X, Y)      has dual vector X x Y,
    (X ^ Y) Z        = <X,Z> Y - <Y,Z> X,
    *e_1 = e_2 ^ e_3 (cyclically), orientation (e_1,e_2,e_3) positive,

and the interior product of X with the 2-form dual to s is s x X.
The star is the identity on storage; `hat`/`unhat` convert between the
3-vector and the skew matrix when an endomorphism has to act.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frame import Chirality

__all__ = [
    "hat",
    "unhat",
    "wedge_endo",
    "hodge_star",
    "interior_product",
    "structure_constant",
    "gamma_round",
    "levi_civita_round",
    "curvature_round",
    "BergerParams",
    "levi_civita_berger",
    "gamma_berger",
    "gamma_berger_orthonormal",
    "curvature_berger",
    "d_nabla_A",
    "divergence_A",
]


def hat(v) -> np.ndarray:
    """Skew matrix of the dual vector v: hat(v) Z = v x Z.  Batched."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    v1, v2, v3 = v[..., 0], v[..., 1], v[..., 2]
    out[..., 0, 1] = -v3
    out[..., 1, 0] = v3
    out[..., 0, 2] = v2
    out[..., 2, 0] = -v2
    out[..., 1, 2] = -v1
    out[..., 2, 1] = v1
    return out


def unhat(m) -> np.ndarray:
    """Dual vector of a skew matrix (inverse of hat)."""
    m = np.asarray(m, dtype=float)
    return np.stack([m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)


def wedge_endo(x, y) -> np.ndarray:
    """X ^ Y as a skew endomorphism, stored as its dual vector X x Y."""
    return np.cross(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def hodge_star(obj) -> np.ndarray:
    """Hodge star between vectors and 2-forms.

    Both sides are stored as the same 3-vector, so this is the identity
    on storage; it exists to mark the change of interpretation.
    """
    return np.array(obj, dtype=float)


def interior_product(x, form) -> np.ndarray:
    """X contracted into the 2-form with dual vector s: returns s x X."""
    return np.cross(np.asarray(form, dtype=float), np.asarray(x, dtype=float))


_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    _EPS[_i, _j, _k] = 1.0
    _EPS[_j, _i, _k] = -1.0


def structure_constant(chirality: Chirality) -> float:
    """lambda with [e_a, e_b] = lambda e_c for even permutations (a,b,c).

    +2 for the left-invariant frame, -2 for the right-invariant one; the
    test suite verifies both values against measured flow derivatives.
    """
    return 2.0 if chirality is Chirality.LEFT else -2.0


def gamma_round(a: int, chirality: Chirality = Chirality.LEFT) -> np.ndarray:
    """Matrix of nabla_{e_a} on the frame: column k holds nabla_{e_a} e_k."""
    lam = structure_constant(chirality)
    g = np.zeros((3, 3))
    for k in range(3):
        for c in range(3):
            g[c, k] = 0.5 * lam * _EPS[a - 1, k, c]
    return g


def levi_civita_round(a: int, b: int, chirality: Chirality = Chirality.LEFT) -> np.ndarray:
    """nabla_{e_a} e_b for the round metric, as frame coefficients.

    Left frame: nabla_{e_1} e_2 = e_3, nabla_{e_2} e_1 = -e_3, diagonal
    entries zero, and cyclic images thereof.
    """
    return gamma_round(a, chirality)[:, b - 1].copy()


def curvature_round(x, y) -> np.ndarray:
    """R(X,Y) = -X ^ Y on the round sphere, as a dual vector."""
    return -wedge_endo(x, y)


@dataclass(frozen=True)
class BergerParams:
    """Scales of the Berger metric a^2 e_1^2 + b^2 (e_2^2 + e_3^2)."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("Berger parameters must be positive")


def gamma_berger(p: BergerParams) -> list[np.ndarray]:
    """Connection matrices of the Berger metric in the Hopf frame.

    gamma[a][:, k] holds the (e_1,e_2,e_3)-coefficients of
    nabla^t_{e_{a+1}} e_{k+1}; the left-invariant bracket table is
    assumed (the Hopf frame is left-invariant).
    """
    r = p.a**2 / p.b**2
    g1 = np.zeros((3, 3))
    g1[2, 1] = 2.0 - r  # nabla_{e1} e2 = (2 - a^2/b^2) e3
    g1[1, 2] = r - 2.0
    g2 = np.zeros((3, 3))
    g2[2, 0] = -r  # nabla_{e2} e1 = -(a^2/b^2) e3
    g2[0, 2] = 1.0
    g3 = np.zeros((3, 3))
    g3[1, 0] = r
    g3[0, 1] = -1.0
    return [g1, g2, g3]


def levi_civita_berger(p: BergerParams, a: int, b: int) -> np.ndarray:
    """nabla^t_{e_a} e_b in the Hopf frame (unnormalized e_2, e_3)."""
    return gamma_berger(p)[a - 1][:, b - 1].copy()


def gamma_berger_orthonormal(p: BergerParams) -> list[np.ndarray]:
    """Connection matrices in the g_t-orthonormal frame (e_1/a, e_2/b, e_3/b).

    gamma[i][:, k] = coefficients of nabla_{f_{i+1}} f_{k+1} in (f_1,f_2,f_3).
    """
    scales = np.array([p.a, p.b, p.b])
    gam = gamma_berger(p)
    out = []
    for i in range(3):
        # nabla_{f_i} f_k = (1/(s_i s_k)) nabla_{e_i} e_k, re-expressed in f's
        m = np.zeros((3, 3))
        for k in range(3):
            vec_e = gam[i][:, k] / (scales[i] * scales[k])
            m[:, k] = vec_e * scales  # e_c = s_c f_c
        out.append(m)
    return out


def curvature_berger(p: BergerParams, a: int, b: int) -> float:
    """Coefficient of R^t(e_a, e_b) on the wedge basis element e_a ^ e_b.

    The printed values: R^t(e_1,e_2) = -(a^2/b^4) e_1^e_2 (same for
    (1,3)) and R^t(e_2,e_3) = ((3a^2-4b^2)/b^4) e_2^e_3, indices raised
    with g_t.  Only frame pairs are supported.
    """
    pair = tuple(sorted((a, b)))
    if pair == (1, 2) or pair == (1, 3):
        return -p.a**2 / p.b**4
    if pair == (2, 3):
        return (3.0 * p.a**2 - 4.0 * p.b**2) / p.b**4
    raise ValueError("expected a frame pair from {1,2,3}")


def d_nabla_A(A, points, x, y, connection="round", berger: BergerParams | None = None):
    """Twisted exterior derivative (d^nabla A)(X, Y) = (nabla_X A)Y - (nabla_Y A)X.

    A must expose `matrix(points) -> (...,3,3)` and
    `frame_derivative_matrix(k, points) -> (...,3,3)` (coefficients in
    its own invariant frame); X, Y are constant frame coefficient
    vectors.  With connection="berger", the Hopf-frame table for the
    given BergerParams is used and A's chirality must be left.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    M = A.matrix(points)
    if connection == "round":
        gammas = [gamma_round(k, A.chirality) for k in (1, 2, 3)]
    elif connection == "berger":
        if berger is None:
            raise ValueError("berger connection requires BergerParams")
        gammas = gamma_berger(berger)
    else:
        raise ValueError("connection must be 'round' or 'berger'")

    def cov(direction):
        # nabla_{e_dir} A  as a matrix: dA + [Gamma, A]
        out = np.zeros_like(M)
        for k in range(3):
            if direction[k] == 0.0:
                continue
            dM = A.frame_derivative_matrix(k + 1, points)
            G = gammas[k]
            out = out + direction[k] * (dM + G @ M - M @ G)
        return out

    covx = cov(x)
    covy = cov(y)
    return np.einsum("...ij,j->...i", covx, y) - np.einsum("...ij,j->...i", covy, x)


def divergence_A(A, points) -> np.ndarray:
    """delta^nabla A = -sum_k (nabla_{e_k} A)(e_k) for the round metric."""
    M = A.matrix(points)
    out = np.zeros(M.shape[:-2] + (3,))
    for k in range(3):
        dM = A.frame_derivative_matrix(k + 1, points)
        G = gamma_round(k + 1, A.chirality)
        covk = dM + G @ M - M @ G
        out = out - covk[..., :, k]
    return out
