"""Lie lattices sl_n and gl_n over Z/p^r.

A descriptor fixes an integer basis once; brackets, ad matrices, the trace
form and the commutator matrix of linear forms are all expressed in its
coordinates.  Structure constants are exact integers, so every reduction
mod p^r is the reduction of one integral object.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .matrices import as_residues, rref_mod_p, solve_mod_p
from .rings import LocalRing


def bracket(x: np.ndarray, y: np.ndarray, modulus: int | None = None) -> np.ndarray:
    """Matrix commutator x y - y x, optionally reduced."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise ValueError(f"bracket shape mismatch {x.shape} vs {y.shape}")
    out = x @ y - y @ x
    return out if modulus is None else out % modulus


def _exact_left_inverse(B: np.ndarray) -> np.ndarray:
    """Integer left inverse L with L B = I for an injective integer matrix.

    Solved over Q by Gaussian elimination; the bases used here all admit an
    integral solution, which is asserted.
    """
    rows, cols = B.shape
    frac = [[Fraction(int(B[i, j])) for j in range(cols)] + [Fraction(int(i == k)) for k in range(rows)] for i in range(rows)]
    piv_rows: list[int] = []
    lead = 0
    for col in range(cols):
        piv = next((i for i in range(lead, rows) if frac[i][col] != 0), None)
        if piv is None:
            raise ValueError("basis matrix is not injective")
        frac[lead], frac[piv] = frac[piv], frac[lead]
        inv = 1 / frac[lead][col]
        frac[lead] = [v * inv for v in frac[lead]]
        for i in range(rows):
            if i != lead and frac[i][col] != 0:
                f = frac[i][col]
                frac[i] = [a - f * b for a, b in zip(frac[i], frac[lead])]
        piv_rows.append(lead)
        lead += 1
    L = np.zeros((cols, rows), dtype=np.int64)
    for k, row in enumerate(piv_rows):
        for j in range(rows):
            val = frac[row][cols + j]
            if val.denominator != 1:
                raise ValueError("coordinate map is not integral for this basis")
            L[k, j] = int(val)
    return L


@dataclass(frozen=True)
class LieLattice:
    """Basis, structure constants and trace-form Gram matrix of sl_n or gl_n."""

    n: int
    kind: str
    basis: tuple
    structure: np.ndarray  # lambda[i, j, k]: [b_i, b_j] = sum_k lambda[i,j,k] b_k
    gram: np.ndarray
    coord_map: np.ndarray  # integer left inverse of vectorized basis

    @property
    def d(self) -> int:
        return len(self.basis)

    @property
    def h(self) -> int:
        return self.d // 2

    def coords(self, x: np.ndarray, modulus: int | None = None) -> np.ndarray:
        """Coordinates of a lattice element in the fixed basis."""
        v = np.asarray(x, dtype=np.int64).reshape(-1)
        c = self.coord_map @ v
        if modulus is not None:
            return c % modulus
        return c

    def from_coords(self, c: np.ndarray, modulus: int | None = None) -> np.ndarray:
        c = np.asarray(c, dtype=np.int64)
        out = np.tensordot(c, np.stack(self.basis), axes=(0, 0))
        return out if modulus is None else out % modulus

    def contains(self, x: np.ndarray, ring: LocalRing) -> bool:
        x = as_residues(x, ring)
        c = self.coords(x, ring.modulus)
        return bool(np.array_equal(self.from_coords(c, ring.modulus), x))

    def ad_matrix(self, x: np.ndarray, ring: LocalRing) -> np.ndarray:
        """Matrix of y -> [x, y] in the basis, over Z/p^r."""
        x = as_residues(x, ring)
        cols = [self.coords(bracket(x, np.asarray(b)), ring.modulus) for b in self.basis]
        return np.stack(cols, axis=1) % ring.modulus

    def dual_coordinates(self, x: np.ndarray, ring: LocalRing) -> np.ndarray:
        """Coordinates of the functional tr(x * -) in the dual basis.

        Requires the Gram determinant to be a unit mod p, so primitive
        elements map to primitive vectors and back.
        """
        g = self.gram % ring.modulus
        det = _int_det(self.gram)
        if det % ring.p == 0:
            raise ValueError(f"trace form is degenerate mod {ring.p} on {self.kind}{self.n}")
        return g @ self.coords(x, ring.modulus) % ring.modulus

    def element_from_dual(self, w: np.ndarray, ring: LocalRing) -> np.ndarray:
        g_inv = _inverse_mod_matrix(self.gram, ring)
        return self.from_coords(g_inv @ (np.asarray(w) % ring.modulus) % ring.modulus, ring.modulus)

    def commutator_matrix(self) -> "CommutatorMatrix":
        return CommutatorMatrix(self.structure.copy())

    def with_gram_scaled(self, unit: int) -> "LieLattice":
        """Same lattice with the bilinear form rescaled by a unit (for invariance tests)."""
        return LieLattice(self.n, self.kind, self.basis, self.structure, self.gram * unit, self.coord_map)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "basis": [np.asarray(b).tolist() for b in self.basis],
            "structure": self.structure.tolist(),
            "gram": self.gram.tolist(),
        }


def _int_det(M: np.ndarray) -> int:
    """Exact integer determinant by fraction-free expansion (small d)."""
    M = [[Fraction(int(v)) for v in row] for row in np.asarray(M)]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        inv = 1 / M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] * inv
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    assert det.denominator == 1
    return int(det)


def _inverse_mod_matrix(M: np.ndarray, ring: LocalRing) -> np.ndarray:
    """Inverse of an integer matrix mod p^r via Hensel lifting from mod p."""
    m = ring.modulus
    p = ring.p
    A = np.asarray(M, dtype=np.int64) % m
    n = A.shape[0]
    aug, pivots = rref_mod_p(np.hstack([A % p, np.eye(n, dtype=np.int64)]), p)
    if len(pivots) < n:
        raise ValueError("matrix is singular mod p")
    X = aug[:, n:] % p
    k = 1
    while k < ring.r:
        X = (2 * X - (X @ A % m) @ X) % m
        k *= 2
    return X % m


class CommutatorMatrix:
    """Antisymmetric matrix of linear forms R(Y)_{ij} = sum_k lambda_ijk Y_k."""

    def __init__(self, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if coeffs.ndim != 3 or coeffs.shape[0] != coeffs.shape[1]:
            raise ValueError("coefficient tensor must be (d', d', nvars)")
        self.coeffs = coeffs

    @property
    def size(self) -> int:
        return self.coeffs.shape[0]

    @property
    def nvars(self) -> int:
        return self.coeffs.shape[2]

    def evaluate(self, w: np.ndarray, ring: LocalRing) -> np.ndarray:
        w = np.asarray(w, dtype=np.int64) % ring.modulus
        return np.tensordot(self.coeffs, w, axes=(2, 0)) % ring.modulus

    def evaluate_batch(self, ws: np.ndarray, modulus: int) -> np.ndarray:
        """Evaluate at a stack of vectors: (N, nvars) -> (N, d', d')."""
        ws = np.asarray(ws, dtype=np.int64)
        flat = self.coeffs.reshape(-1, self.nvars)
        return (ws @ flat.T).reshape(ws.shape[0], self.size, self.size) % modulus

    def unused_variables(self) -> list[int]:
        """Indices of variables absent from every entry (their count is z_S)."""
        return [k for k in range(self.nvars) if not self.coeffs[:, :, k].any()]

    def entry_forms(self) -> list[list[list[int]]]:
        return self.coeffs.tolist()


def structure_constants(basis, coords_fn) -> np.ndarray:
    d = len(basis)
    lam = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(i + 1, d):
            c = coords_fn(bracket(basis[i], basis[j]))
            lam[i, j] = c
            lam[j, i] = -c
    return lam


def span_commutator_matrix(span_basis, p: int) -> CommutatorMatrix:
    """Commutator matrix of an F_p-span of matrices that is closed under bracket.

    Closure is verified pair by pair; a non-closed span is rejected with the
    offending basis pair.
    """
    mats = [np.asarray(b, dtype=np.int64) % p for b in span_basis]
    dS = len(mats)
    if dS == 0:
        return CommutatorMatrix(np.zeros((0, 0, 0), dtype=np.int64))
    B = np.stack([m.reshape(-1) for m in mats], axis=1) % p
    lam = np.zeros((dS, dS, dS), dtype=np.int64)
    for i in range(dS):
        for j in range(i + 1, dS):
            target = bracket(mats[i], mats[j], p).reshape(-1)
            c = solve_mod_p(B, target, p)
            if c is None or not np.array_equal(B @ c % p, target):
                raise ValueError(f"span is not bracket-closed at basis pair ({i}, {j})")
            lam[i, j] = c
            lam[j, i] = (-c) % p
    return CommutatorMatrix(lam)


def _sl_basis(n: int) -> list[np.ndarray]:
    def e(i, j):
        m = np.zeros((n, n), dtype=np.int64)
        m[i, j] = 1
        return m

    upper = [e(i, j) for i in range(n) for j in range(i + 1, n)]
    diagonal = [e(i, i) - e(i + 1, i + 1) for i in range(n - 1)]
    # (strict upper, traceless diagonal, strict lower); for n = 2 this is
    # (e12, e11 - e22, e21), for n = 3 (e12, e13, e23, h1, h2, e21, e31, e32)
    return upper + diagonal + [m.T for m in upper]


def _gl_basis(n: int) -> list[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(n):
            m = np.zeros((n, n), dtype=np.int64)
            m[i, j] = 1
            out.append(m)
    return out


_CACHE: dict[tuple[int, str], LieLattice] = {}


def lattice(n: int, kind: str = "sl") -> LieLattice:
    """The fixed descriptor for sl_n or gl_n (cached)."""
    key = (n, kind)
    if key in _CACHE:
        return _CACHE[key]
    if kind == "sl":
        basis = _sl_basis(n)
    elif kind == "gl":
        basis = _gl_basis(n)
    else:
        raise ValueError(f"unknown lattice kind {kind!r}")
    B = np.stack([b.reshape(-1) for b in basis], axis=1)
    L = _exact_left_inverse(B)
    coords_fn = lambda x: L @ np.asarray(x, dtype=np.int64).reshape(-1)
    lam = structure_constants(basis, coords_fn)
    d = len(basis)
    gram = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            gram[i, j] = int(np.trace(basis[i] @ basis[j]))
    desc = LieLattice(n, kind, tuple(basis), lam, gram, L)
    _CACHE[key] = desc
    return desc
