"""Unitary decompositions of the per-site potential matrices.

A potential matrix is the identity except for two 2x2 blocks, each with
one identity row. Two routes express it through unitaries: the singular
value factorization A D B and the linear combination of unitaries (LCU)
built from its Hermitian and anti-Hermitian parts.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from qla2d.errors import DecompositionError
from qla2d.lattice.core_lattice import normalize_axis
from qla2d.lattice.operators import POTENTIAL_PAIRS

logger = logging.getLogger(__name__)

STRUCTURE_TOL = 1e-12
MERGE_TOL = 1e-14

LCUTerm = Tuple[float, np.ndarray]


def potential_matrix(axis: str, beta0: float, beta2: float) -> np.ndarray:
    """The literal 6x6 potential matrix of one axis for scalar angles."""
    axis = normalize_axis(axis)
    m = np.eye(6)
    for (a, b, sigma), beta in zip(POTENTIAL_PAIRS[axis], (beta0, beta2)):
        m[b, a] = sigma * np.sin(beta)
        m[b, b] = np.cos(beta)
    return m


def _allowed_pattern(axis: str) -> np.ndarray:
    allowed = np.eye(6, dtype=bool)
    for a, b, _ in POTENTIAL_PAIRS[axis]:
        allowed[b, a] = True
    return allowed


def potential_axis(V: np.ndarray) -> str:
    """Which axis' potential sparsity ``V`` has; raises DecompositionError if neither."""
    V = np.asarray(V)
    if V.shape != (6, 6):
        raise DecompositionError(f"potential matrix must be 6x6, got shape {V.shape}")
    if np.iscomplexobj(V) and np.any(np.abs(V.imag) > STRUCTURE_TOL):
        raise DecompositionError("potential matrix must be real")
    V = np.real(V).astype(np.float64)
    if not np.all(np.isfinite(V)):
        raise DecompositionError("potential matrix contains non-finite entries")
    for axis in ('y', 'x'):
        allowed = _allowed_pattern(axis)
        if np.any(np.abs(V[~allowed]) > STRUCTURE_TOL):
            continue
        touched = {b for _, b, _ in POTENTIAL_PAIRS[axis]}
        identity_rows = [r for r in range(6) if r not in touched]
        if np.all(np.abs(np.diag(V)[identity_rows] - 1.0) <= STRUCTURE_TOL):
            return axis
    raise DecompositionError("matrix does not have the potential-operator sparsity structure")


@dataclass(frozen=True)
class SVDFactors:
    """V = A (scale D) B with orthogonal A, B and D in [0, 1]."""

    A: np.ndarray
    D: np.ndarray
    B: np.ndarray
    scale: float

    def reconstruct(self) -> np.ndarray:
        return self.A @ (self.scale * self.D) @ self.B


def svd_decompose(V: np.ndarray) -> SVDFactors:
    """Block-wise singular value factorization renormalized by the largest singular value."""
    axis = potential_axis(V)
    V = np.real(np.asarray(V, dtype=np.float64))
    A = np.eye(6)
    B = np.eye(6)
    sigma = np.ones(6)
    for a, b, _ in POTENTIAL_PAIRS[axis]:
        idx = np.array([a, b])
        block = V[np.ix_(idx, idx)]
        if np.array_equal(block, np.eye(2)):
            continue
        u, s, vh = np.linalg.svd(block)
        A[np.ix_(idx, idx)] = u
        B[np.ix_(idx, idx)] = vh
        sigma[idx] = s
    scale = float(sigma.max())
    if scale == 0.0:
        raise DecompositionError("potential matrix is singular in every block")
    return SVDFactors(A=A, D=np.diag(sigma / scale), B=B, scale=scale)


def unitary_part(V: np.ndarray) -> np.ndarray:
    """Orthogonal polar factor A B of a potential matrix."""
    factors = svd_decompose(V)
    return factors.A @ factors.B


def _unitaries_from_hermitian(H: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """H = (F+ + F-) / 2 with unitary F+- = H +- i sqrt(I - H^2), for ||H|| <= 1."""
    w, Q = np.linalg.eigh(H)
    root = np.sqrt(np.clip(1.0 - w * w, 0.0, None))
    term = 1j * (Q * root) @ Q.conj().T
    return H + term, H - term


def _merge_terms(terms: List[LCUTerm]) -> List[LCUTerm]:
    merged: List[LCUTerm] = []
    for weight, U in terms:
        for k, (w_k, U_k) in enumerate(merged):
            if np.allclose(U, U_k, rtol=0.0, atol=MERGE_TOL):
                merged[k] = (w_k + weight, U_k)
                break
            if np.allclose(U, -U_k, rtol=0.0, atol=MERGE_TOL):
                merged[k] = (w_k - weight, U_k)
                break
        else:
            merged.append((weight, U))
    return [(w, U) for w, U in merged if abs(w) > MERGE_TOL]


def lcu_decompose(V: np.ndarray, method: str = 'hermitian') -> List[LCUTerm]:
    """Weighted sum of unitaries equal to ``V``.

    Args:
        V: 6x6 potential matrix.
        method: ``hermitian`` splits V / ||V|| into B + iC and writes each
            Hermitian part as the mean of two unitaries (at most four terms);
            ``svd`` does the same for the renormalized singular values
            (at most two terms).

    Returns:
        List of (weight, unitary) pairs. Unitaries are complex.
    """
    axis = potential_axis(V)
    V = np.real(np.asarray(V, dtype=np.float64))
    if method == 'svd':
        f = svd_decompose(V)
        d = np.diag(f.D).astype(np.complex128)
        root = 1j * np.sqrt(np.clip(1.0 - np.diag(f.D) ** 2, 0.0, None))
        terms = [
            (0.5 * f.scale, f.A @ np.diag(d + root) @ f.B),
            (0.5 * f.scale, f.A @ np.diag(d - root) @ f.B),
        ]
    elif method == 'hermitian':
        norm = float(np.linalg.norm(V, 2))
        A = V / norm
        herm = 0.5 * (A + A.T)
        F1, F2 = _unitaries_from_hermitian(herm.astype(np.complex128))
        terms = [(0.5 * norm, F1), (0.5 * norm, F2)]
        if np.any(np.abs(A - A.T) > MERGE_TOL):
            anti = -0.5j * (A - A.T)
            F3, F4 = _unitaries_from_hermitian(anti)
            terms += [(0.5 * norm, 1j * F3), (0.5 * norm, 1j * F4)]
    else:
        raise DecompositionError(f"unknown LCU method {method!r}")
    merged = _merge_terms(terms)
    logger.debug(f"LCU ({method}) of {axis}-potential: {len(merged)} terms")
    return merged


def reconstruct(terms: List[LCUTerm]) -> np.ndarray:
    total = np.zeros((6, 6), dtype=np.complex128)
    for weight, U in terms:
        total += weight * U
    return total
