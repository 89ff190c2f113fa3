"""Dense matrices over Z/p^r and F_p.

Scalar routines work on small python-int numpy arrays and stay exact; the
batched routines (rank censuses) vectorize over a leading axis and are the
hot path of the level-1 enumerations.  Pivot choices are deterministic
(minimum valuation, then row-major order) so reports are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rings import LocalRing


def as_residues(a, ring: LocalRing) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % ring.modulus


@dataclass(frozen=True)
class Mat:
    """An immutable matrix over Z/p^r with canonical residue entries."""

    a: np.ndarray
    ring: LocalRing

    def __post_init__(self):
        arr = as_residues(self.a, self.ring)
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    @property
    def shape(self):
        return self.a.shape

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other, same_shape=True)
        return Mat(self.a + other.a, self.ring)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other, same_shape=True)
        return Mat(self.a - other.a, self.ring)

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.a.shape[1] != other.a.shape[0]:
            raise ValueError(f"shape mismatch {self.a.shape} @ {other.a.shape}")
        return Mat(self.a @ other.a, self.ring)

    def __neg__(self) -> "Mat":
        return Mat(-self.a, self.ring)

    def scale(self, c: int) -> "Mat":
        return Mat(self.a * (c % self.ring.modulus), self.ring)

    def trace(self) -> int:
        return int(np.trace(self.a)) % self.ring.modulus

    def transpose(self) -> "Mat":
        return Mat(self.a.T, self.ring)

    def reduce(self, r2: int) -> "Mat":
        return Mat(self.a, self.ring.reduced(r2))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Mat)
            and self.ring == other.ring
            and self.a.shape == other.a.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self):
        return hash((self.ring, self.a.shape, self.a.tobytes()))

    def _check(self, other: "Mat", same_shape: bool = False):
        if other.ring != self.ring:
            raise ValueError("mixed-ring matrix arithmetic")
        if same_shape and other.a.shape != self.a.shape:
            raise ValueError(f"shape mismatch {self.a.shape} vs {other.a.shape}")

    def to_json(self) -> dict:
        return {"p": self.ring.p, "r": self.ring.r, "entries": self.a.tolist()}

    @staticmethod
    def from_json(payload: dict) -> "Mat":
        ring = LocalRing(payload["p"], payload["r"])
        return Mat(np.asarray(payload["entries"], dtype=np.int64), ring)


def identity(n: int, ring: LocalRing) -> Mat:
    return Mat(np.eye(n, dtype=np.int64), ring)


# ----------------------------------------------------------------------
# residue-field linear algebra


def rref_mod_p(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form over F_p with deterministic pivot order.

    Returns (R, pivot_cols); rank is len(pivot_cols).
    """
    R = (np.asarray(M, dtype=np.int64) % p).copy()
    rows, cols = R.shape
    pivots: list[int] = []
    rank = 0
    for col in range(cols):
        piv = -1
        for i in range(rank, rows):
            if R[i, col] % p:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            R[[rank, piv]] = R[[piv, rank]]
        R[rank] = (R[rank] * pow(int(R[rank, col]), -1, p)) % p
        for i in range(rows):
            if i != rank and R[i, col]:
                R[i] = (R[i] - R[i, col] * R[rank]) % p
        pivots.append(col)
        rank += 1
        if rank == rows:
            break
    return R, pivots


def rank_mod_p(M: np.ndarray, p: int) -> int:
    _, pivots = rref_mod_p(M, p)
    return len(pivots)


def kernel_mod_p(M: np.ndarray, p: int) -> list[np.ndarray]:
    """Basis of the right kernel of M over F_p.

    Basis vectors carry a 1 in their free coordinate and are returned in
    ascending free-column order.
    """
    M = np.asarray(M, dtype=np.int64) % p
    rows, cols = M.shape
    R, pivots = rref_mod_p(M, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-R[i, f]) % p
        basis.append(v)
    return basis


def echelon_basis_mod_p(vectors, p: int) -> list[np.ndarray]:
    """Canonical (RREF-row) basis of the span of the given vectors over F_p."""
    if len(vectors) == 0:
        return []
    R, pivots = rref_mod_p(np.asarray(vectors, dtype=np.int64), p)
    return [R[i].copy() for i in range(len(pivots))]


def solve_mod_p(A: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution of A x = b over F_p, or None if inconsistent."""
    A = np.asarray(A, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    rows, cols = A.shape
    aug = np.hstack([A, b.reshape(rows, 1)])
    R, pivots = rref_mod_p(aug, p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = R[i, cols]
    return x


# ----------------------------------------------------------------------
# local-ring elimination


@dataclass(frozen=True)
class DivisorProfile:
    """Paired elementary-divisor exponents of an antisymmetric matrix, capped at r.

    For a d x d antisymmetric matrix the divisors pair up; the profile lists
    the h = floor(d/2) paired exponents in ascending order.  The single extra
    zero divisor of an odd d is implicit and never stored.
    """

    pairs: tuple[int, ...]
    level: int

    @property
    def h(self) -> int:
        return len(self.pairs)

    def capped(self, r2: int) -> "DivisorProfile":
        return DivisorProfile(tuple(min(a, r2) for a in self.pairs), r2)


def snf_exponents(M: np.ndarray, ring: LocalRing) -> list[int]:
    """Elementary-divisor exponents of M over Z/p^r, capped at r, ascending.

    Local PIR elimination: pick a minimum-valuation entry (row-major ties),
    normalize it to a power of p, clear its row and column, recurse.
    """
    m = ring.modulus
    p, r = ring.p, ring.r
    A = [[int(x) % m for x in row] for row in np.asarray(M)]
    rows = list(range(len(A)))
    cols = list(range(len(A[0]) if A else 0))
    exponents = []
    while rows and cols:
        best = None
        for i in rows:
            for j in cols:
                if A[i][j]:
                    v = ring.valuation(A[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            exponents.extend([r] * min(len(rows), len(cols)))
            break
        v, pi, pj = best
        piv = A[pi][pj]
        unit_inv = pow(piv // p**v, -1, m)
        for j in cols:
            A[pi][j] = A[pi][j] * unit_inv % m
        # pivot is now exactly p^v; clear its column, then its row
        for i in rows:
            if i != pi and A[i][pj]:
                f = A[i][pj] // p**v
                for j in cols:
                    A[i][j] = (A[i][j] - f * A[pi][j]) % m
        exponents.append(v)
        rows.remove(pi)
        cols.remove(pj)
    return sorted(exponents)


def antisymmetric_profile(M: np.ndarray, ring: LocalRing) -> DivisorProfile:
    """Paired divisor profile of an antisymmetric matrix over Z/p^r."""
    A = as_residues(M, ring)
    if A.shape[0] != A.shape[1]:
        raise ValueError("profile needs a square matrix")
    if not np.array_equal(A, (-A.T) % ring.modulus):
        raise ValueError("matrix is not antisymmetric")
    exps = snf_exponents(A, ring)
    d = A.shape[0]
    if d % 2:
        if exps[-1] != ring.r:
            raise ValueError("odd dimension without a vanishing extra divisor")
        exps = exps[:-1]
    pairs = []
    for k in range(0, len(exps), 2):
        if exps[k] != exps[k + 1]:
            raise ValueError(f"divisors failed to pair: {exps}")
        pairs.append(exps[k])
    # over the residue field this forces an even rank
    return DivisorProfile(tuple(pairs), ring.r)


def kernel_module_mod_m(A: np.ndarray, ring: LocalRing):
    """Generators of ker(A) as a Z/p^r-module, with their additive orders.

    Returns (gens, order_exponents): the kernel is the set of sums
    sum_i  y_i * gens[i]  with  y_i in [0, p^order_exponents[i]).
    """
    m, p, r = ring.modulus, ring.p, ring.r
    A = [[int(x) % m for x in row] for row in np.asarray(A)]
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    T = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    rows = list(range(nrows))
    cols = list(range(ncols))
    pivot_cols: list[tuple[int, int]] = []
    while rows and cols:
        best = None
        for i in rows:
            for j in cols:
                if A[i][j]:
                    v = ring.valuation(A[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, pi, pj = best
        unit_inv = pow(A[pi][pj] // p**v, -1, m)
        for i in range(nrows):
            A[i][pj] = A[i][pj] * unit_inv % m
        for i in range(ncols):
            T[i][pj] = T[i][pj] * unit_inv % m
        # clear the pivot row with column ops (mirrored on T)
        for j in cols:
            if j != pj and A[pi][j]:
                f = A[pi][j] // p**v
                for i in range(nrows):
                    A[i][j] = (A[i][j] - f * A[i][pj]) % m
                for i in range(ncols):
                    T[i][j] = (T[i][j] - f * T[i][pj]) % m
        # then clear the pivot column with row ops (kernel unaffected)
        for i in rows:
            if i != pi and A[i][pj]:
                f = A[i][pj] // p**v
                for j in cols:
                    A[i][j] = (A[i][j] - f * A[pi][j]) % m
        pivot_cols.append((pj, v))
        rows.remove(pi)
        cols.remove(pj)
    gens = []
    orders = []
    Tarr = np.array(T, dtype=np.int64) % m
    for pj, v in pivot_cols:
        if v > 0:
            gens.append(Tarr[:, pj] * p ** (r - v) % m)
            orders.append(v)
    pivot_set = {pj for pj, _ in pivot_cols}
    for j in range(ncols):
        if j not in pivot_set:
            gens.append(Tarr[:, j].copy())
            orders.append(r)
    return gens, orders


def kernel_mod_m_shadow_basis(A: np.ndarray, ring: LocalRing) -> list[np.ndarray]:
    """Mod-p reduction of ker(A) over Z/p^r, as a canonical F_p basis.

    Only generators of full additive order p^r survive reduction mod p.
    """
    gens, orders = kernel_module_mod_m(A, ring)
    full = [g % ring.p for g, o in zip(gens, orders) if o == ring.r]
    return echelon_basis_mod_p(full, ring.p)


# ----------------------------------------------------------------------
# determinants and inverses (n <= 3 closed forms, plus batched variants)


def det_mod(M: np.ndarray, ring: LocalRing) -> int:
    A = as_residues(M, ring)
    n = A.shape[0]
    m = ring.modulus
    a = A.tolist()
    if n == 1:
        return a[0][0] % m
    if n == 2:
        return (a[0][0] * a[1][1] - a[0][1] * a[1][0]) % m
    if n == 3:
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        ) % m
    # integer cofactor expansion stays exact for the small sizes used here
    import itertools

    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for i in range(n):
            if seen[i]:
                continue
            j, ln = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                ln += 1
            if ln % 2 == 0:
                sign = -sign
        term = sign
        for i in range(n):
            term *= a[i][perm[i]]
        total += term
    return total % m


def adjugate_mod(M: np.ndarray, ring: LocalRing) -> np.ndarray:
    A = as_residues(M, ring)
    n = A.shape[0]
    m = ring.modulus
    if n == 1:
        return np.array([[1]], dtype=np.int64)
    if n == 2:
        a, b, c, d = int(A[0, 0]), int(A[0, 1]), int(A[1, 0]), int(A[1, 1])
        return np.array([[d, -b], [-c, a]], dtype=np.int64) % m
    if n == 3:
        out = np.zeros((3, 3), dtype=np.int64)
        for i in range(3):
            for j in range(3):
                r0, r1 = [k for k in range(3) if k != j]
                c0, c1 = [k for k in range(3) if k != i]
                minor = int(A[r0, c0]) * int(A[r1, c1]) - int(A[r0, c1]) * int(A[r1, c0])
                out[i, j] = (minor if (i + j) % 2 == 0 else -minor) % m
        return out
    raise ValueError("adjugate only implemented for n <= 3")


def inverse_mod(M: np.ndarray, ring: LocalRing) -> np.ndarray:
    d = det_mod(M, ring)
    inv = ring.unit_inverse(d)
    if inv is None:
        raise ValueError("matrix is not invertible over the local ring")
    return adjugate_mod(M, ring) * inv % ring.modulus


# ----------------------------------------------------------------------
# batched residue-field ranks (the census hot path)


def batched_rank_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks over F_p of a stack of matrices, shape (N, rows, cols) -> (N,)."""
    A = (np.asarray(mats)).astype(np.int64, copy=True) % p
    N, rows, cols = A.shape
    inv_table = np.array([0] + [pow(i, -1, p) for i in range(1, p)], dtype=np.int64)
    row_idx = np.arange(rows)
    rank = np.zeros(N, dtype=np.int64)
    cur = np.zeros(N, dtype=np.int64)  # next pivot row per matrix
    for col in range(cols):
        colvals = A[:, :, col]
        eligible = (colvals != 0) & (row_idx[None, :] >= cur[:, None])
        has = eligible.any(axis=1)
        idx = np.nonzero(has)[0]
        if idx.size == 0:
            continue
        piv = np.argmax(eligible[idx], axis=1)
        r0 = cur[idx]
        # swap pivot row into position r0
        tmp = A[idx, piv, :].copy()
        A[idx, piv, :] = A[idx, r0, :]
        A[idx, r0, :] = tmp
        pivrow = A[idx, r0, :]
        inv = inv_table[pivrow[:, col]]
        below = row_idx[None, :] > r0[:, None]
        factors = np.where(below, A[idx, :, col], 0) * inv[:, None] % p
        A[idx] = (A[idx] - factors[:, :, None] * pivrow[:, None, :]) % p
        rank[idx] += 1
        cur[idx] += 1
    return rank


def batched_matmul_mod(x: np.ndarray, y: np.ndarray, modulus: int) -> np.ndarray:
    return np.matmul(x, y) % modulus


def batched_det3_mod(A: np.ndarray, modulus: int) -> np.ndarray:
    """Determinants of a stack of 3x3 matrices mod m."""
    a = A.astype(np.int64)
    d = (
        a[:, 0, 0] * (a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1])
        - a[:, 0, 1] * (a[:, 1, 0] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 0])
        + a[:, 0, 2] * (a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0])
    )
    return d % modulus


def batched_det2_mod(A: np.ndarray, modulus: int) -> np.ndarray:
    a = A.astype(np.int64)
    return (a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]) % modulus
