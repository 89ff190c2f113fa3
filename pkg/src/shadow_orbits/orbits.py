"""Adjoint orbits and shadows of sl_n(Z/p^r).

The workhorse is a full orbit partition of the lattice coordinate space
under the generator action, with a spanning-tree transversal.  Shadows
(mod-p images of stabilizers) come out of Schreier generators, so no
stabilizer is ever enumerated inside the big group.  Coadjoint censuses on
shadow duals use canonical representatives (minimum image key), keeping
every report deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import InfeasibleError, centralizer_subgroup_level1, elementary_generators, special_linear_order
from .lattices import LieLattice, bracket, lattice, span_commutator_matrix
from .matrices import (
    antisymmetric_profile,
    batched_rank_mod_p,
    det_mod,
    echelon_basis_mod_p,
    kernel_mod_m_shadow_basis,
    rank_mod_p,
    rref_mod_p,
    solve_mod_p,
)
from .rings import LocalRing

SPACE_BOUND = 4_000_000
GROUP_ORACLE_BOUND = 10**7
FUNCTIONAL_BOUND = 10**6
SIGNATURE_BOUND = 50_000


# ----------------------------------------------------------------------
# mod-p matrix keys and batched inverses


def encode_mats(mats: np.ndarray, base: int) -> np.ndarray:
    mats = np.asarray(mats, dtype=np.int64)
    flat = mats.reshape(len(mats), -1) % base
    powers = base ** np.arange(flat.shape[1] - 1, -1, -1, dtype=np.int64)
    return flat @ powers


def decode_keys(keys: np.ndarray, base: int, n: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    digits = np.empty((len(keys), n * n), dtype=np.int64)
    rem = keys.copy()
    for pos in range(n * n - 1, -1, -1):
        digits[:, pos] = rem % base
        rem //= base
    return digits.reshape(len(keys), n, n)


def batched_unimodular_inverse(mats: np.ndarray, m: int) -> np.ndarray:
    """Inverses of a stack of determinant-1 matrices mod m (n = 2 or 3)."""
    a = np.asarray(mats, dtype=np.int64)
    n = a.shape[-1]
    if n == 2:
        out = np.empty_like(a)
        out[..., 0, 0] = a[..., 1, 1]
        out[..., 0, 1] = -a[..., 0, 1]
        out[..., 1, 0] = -a[..., 1, 0]
        out[..., 1, 1] = a[..., 0, 0]
        return out % m
    if n == 3:
        # adjugate of a det-1 matrix is its inverse
        out = np.empty_like(a)
        for i in range(3):
            for j in range(3):
                r = [k for k in range(3) if k != j]
                c = [k for k in range(3) if k != i]
                minor = a[..., r[0], c[0]] * a[..., r[1], c[1]] - a[..., r[0], c[1]] * a[..., r[1], c[0]]
                out[..., i, j] = minor if (i + j) % 2 == 0 else -minor
        return out % m
    raise ValueError("batched inverse implemented for n <= 3")


# ----------------------------------------------------------------------
# subgroups of SL_n(F_p)


class Subgroup:
    """A subgroup of SL_n(F_p), stored as its full (key-sorted) element list."""

    def __init__(self, elements: np.ndarray, p: int):
        elements = np.asarray(elements, dtype=np.int64).reshape(-1, *np.asarray(elements).shape[-2:]) % p
        keys = encode_mats(elements, p)
        perm = np.argsort(keys)
        self.p = p
        self.n = elements.shape[1]
        self.elements = elements[perm]
        self.keys = tuple(int(k) for k in keys[perm])
        self.key_set = frozenset(self.keys)

    @property
    def order(self) -> int:
        return len(self.keys)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.p == other.p and self.keys == other.keys

    def __hash__(self):
        return hash((self.p, self.keys))

    def conjugated(self, g: np.ndarray) -> "Subgroup":
        g = np.asarray(g, dtype=np.int64) % self.p
        ginv = batched_unimodular_inverse(g[None], self.p)[0]
        mats = g[None] @ self.elements % self.p @ ginv[None] % self.p
        return Subgroup(mats, self.p)

    def contains_subgroup(self, other: "Subgroup") -> bool:
        return other.key_set <= self.key_set

    def element_inverses(self) -> np.ndarray:
        return batched_unimodular_inverse(self.elements, self.p)


def mulclose(mats: np.ndarray, p: int, limit: int = 10**6) -> Subgroup:
    """Closure of a set of mod-p matrices under multiplication."""
    mats = np.asarray(mats, dtype=np.int64) % p
    seen: dict[int, np.ndarray] = {}
    for g in mats:
        seen[int(encode_mats(g[None], p)[0])] = g
    gens = list(seen.values())
    frontier = gens
    while frontier:
        stack = np.stack(frontier)
        new = []
        for a in gens:
            prod = a[None] @ stack % p
            for mat, key in zip(prod, encode_mats(prod, p)):
                k = int(key)
                if k not in seen:
                    seen[k] = mat
                    new.append(mat)
                    if len(seen) > limit:
                        raise InfeasibleError("subgroup closure exceeded the limit")
        frontier = new
    return Subgroup(np.stack(list(seen.values())), p)


# ----------------------------------------------------------------------
# signatures


_SIG_CACHE: dict[tuple, tuple] = {}
_SPAN_CACHE: dict[tuple, list] = {}


def subgroup_span_sl_basis(sub: Subgroup) -> list[np.ndarray]:
    """Canonical basis of (additive span of the subgroup) intersect sl_n, over F_p.

    For a group shadow this is the attached Lie shadow.
    """
    cache_key = (sub.p, sub.n, sub.keys)
    if cache_key in _SPAN_CACHE:
        return _SPAN_CACHE[cache_key]
    p, n = sub.p, sub.n
    vecs = sub.elements.reshape(sub.order, n * n)
    basis = echelon_basis_mod_p(vecs, p)
    traces = [int(sum(v[i * n + i] for i in range(n))) % p for v in basis]
    if any(traces):
        pivot = next(i for i, t in enumerate(traces) if t)
        tinv = pow(traces[pivot], -1, p)
        adjusted = [
            (basis[i] - traces[i] * tinv * basis[pivot]) % p
            for i in range(len(basis))
            if i != pivot
        ]
        basis = echelon_basis_mod_p(adjusted, p) if adjusted else []
    out = [b.reshape(n, n) for b in basis]
    _SPAN_CACHE[cache_key] = out
    return out


def _span_action_matrices(sub: Subgroup, span: list[np.ndarray], actors: np.ndarray) -> np.ndarray:
    """Matrices of Ad_e on the span (in its RREF basis), for each actor e."""
    p, n = sub.p, sub.n
    dS = len(span)
    if dS == 0:
        return np.zeros((len(actors), 0, 0), dtype=np.int64)
    B = np.stack([b.reshape(-1) for b in span])
    _, pivots = rref_mod_p(B, p)
    piv = list(pivots)
    invs = batched_unimodular_inverse(actors, p)
    span_stack = np.stack(span)
    conj = actors[:, None] @ span_stack[None] % p @ invs[:, None] % p
    flat = conj.reshape(len(actors), dS, n * n) % p
    coords = flat[:, :, piv]
    recon = np.tensordot(coords, B, axes=(2, 0)) % p
    if not np.array_equal(recon, flat):
        raise AssertionError("span is not stable under the subgroup action")
    return coords.transpose(0, 2, 1) % p  # column j = coords of Ad_e(b_j)


def element_order_multiset(sub: Subgroup) -> tuple:
    p = sub.p
    eye = np.eye(sub.n, dtype=np.int64)
    counts: dict[int, int] = {}
    for g in sub.elements:
        k = 1
        cur = g.copy()
        while not np.array_equal(cur, eye):
            cur = cur @ g % p
            k += 1
        counts[k] = counts.get(k, 0) + 1
    return tuple(sorted(counts.items()))


def fixed_functional_dim(sub: Subgroup, span: list[np.ndarray]) -> int:
    """Dimension of the space of functionals on the span fixed by the subgroup."""
    dS = len(span)
    if dS == 0:
        return 0
    act = _span_action_matrices(sub, span, sub.element_inverses())
    blocks = [(a.T - np.eye(dS, dtype=np.int64)) % sub.p for a in act]
    stacked = np.vstack(blocks)
    return dS - rank_mod_p(stacked, sub.p)


def subgroup_signature(sub: Subgroup) -> tuple:
    """(order, span dimension, fixed-functional dimension, element-order multiset)."""
    cache_key = (sub.p, sub.n, sub.keys)
    if cache_key in _SIG_CACHE:
        return _SIG_CACHE[cache_key]
    if sub.order > SIGNATURE_BOUND:
        raise InfeasibleError(f"signature of a subgroup of order {sub.order} is out of bounds")
    span = subgroup_span_sl_basis(sub)
    sig = (sub.order, len(span), fixed_functional_dim(sub, span), element_order_multiset(sub))
    _SIG_CACHE[cache_key] = sig
    return sig


def subgroups_conjugate_gl(sub1: Subgroup, sub2: Subgroup, limit: int = 20_000) -> bool:
    """Whether some element of GL_n(F_p) conjugates one subgroup onto the other.

    A brute-force oracle for small q, stricter than signature equality; used
    to spot-check that signature classes of shadows are genuine conjugacy
    classes.
    """
    if sub1.p != sub2.p or sub1.n != sub2.n or sub1.order != sub2.order:
        return False
    p, n = sub1.p, sub1.n
    if p ** (n * n) > limit:
        raise InfeasibleError("GL enumeration for the conjugacy oracle is out of bounds")
    idx = np.arange(p ** (n * n), dtype=np.int64)
    digits = np.empty((len(idx), n * n), dtype=np.int64)
    rem = idx.copy()
    for pos in range(n * n - 1, -1, -1):
        digits[:, pos] = rem % p
        rem //= p
    mats = digits.reshape(-1, n, n)
    if n == 2:
        from .matrices import batched_det2_mod as _det
    else:
        from .matrices import batched_det3_mod as _det
    dets = _det(mats, p)
    target = sub2.key_set
    from .matrices import inverse_mod

    ring = LocalRing(p, 1)
    for g in mats[dets != 0]:
        ginv = inverse_mod(g, ring)
        conj = g[None] @ sub1.elements % p @ ginv[None] % p
        if set(encode_mats(conj, p).tolist()) == target:
            return True
    return False


# ----------------------------------------------------------------------
# the orbit partition


@dataclass
class OrbitData:
    root_key: int
    size: int


class AdjointPartition:
    """All SL_n(Z/p^r)-adjoint orbits on the lattice coordinate space.

    Builds the full partition with a spanning-tree transversal, plus the
    mod-p Schreier generator keys per orbit; shadows and signatures are
    materialized lazily per orbit.
    """

    def __init__(self, lat: LieLattice, ring: LocalRing, space_bound: int = SPACE_BOUND):
        self.lat = lat
        self.ring = ring
        m = ring.modulus
        d = lat.d
        if m**d > space_bound:
            raise InfeasibleError(f"coordinate space {m}^{d} exceeds the bound {space_bound}")
        self.m = m
        self.size = m**d
        self.group_order = special_linear_order(lat.n, ring)
        self._powers = m ** np.arange(d - 1, -1, -1, dtype=np.int64)
        self._gens = elementary_generators(lat.n, ring)
        self._ad_mats = [self._coords_action(g, ginv) for g, ginv in self._gens]
        self._shadow_cache: dict[int, Subgroup] = {}
        self._elem_shadow_cache: dict[tuple, Subgroup] = {}
        self._delta_cache: np.ndarray | None = None
        self._run_bfs()
        self._schreier_pass()

    # -- construction -------------------------------------------------

    def _coords_action(self, g, ginv):
        m = self.m
        cols = [
            self.lat.coords(g @ (np.asarray(b, dtype=np.int64) % m) % m @ ginv % m, m)
            for b in self.lat.basis
        ]
        return np.stack(cols, axis=1) % m

    def _run_bfs(self):
        m, d, n = self.m, self.lat.d, self.lat.n
        N = self.size
        orbit_id = np.full(N, -1, dtype=np.int32)
        U = np.zeros((N, n * n), dtype=np.int32)
        orbits: list[OrbitData] = []
        eye = np.eye(n, dtype=np.int64).reshape(-1)
        seed_ptr = 0
        assigned = 0
        while assigned < N:
            while orbit_id[seed_ptr] >= 0:
                seed_ptr += 1
            seed = seed_ptr
            oid = len(orbits)
            orbit_id[seed] = oid
            U[seed] = eye
            assigned += 1
            count = 1
            frontier = np.array([seed], dtype=np.int64)
            while frontier.size:
                coords = self._decode(frontier)
                Uf = U[frontier].astype(np.int64).reshape(-1, n, n)
                parts = []
                for (g, _), A in zip(self._gens, self._ad_mats):
                    keys = (coords @ A.T % m) @ self._powers
                    mask = orbit_id[keys] < 0
                    if not mask.any():
                        continue
                    uniq, first = np.unique(keys[mask], return_index=True)
                    orbit_id[uniq] = oid
                    moved = g[None] @ Uf[mask][first] % m
                    U[uniq] = moved.reshape(len(uniq), n * n)
                    parts.append(uniq)
                    count += len(uniq)
                    assigned += len(uniq)
                frontier = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
            orbits.append(OrbitData(root_key=seed, size=count))
        self.orbit_id = orbit_id
        self.transversal = U
        self.orbits = orbits

    def _schreier_pass(self, chunk: int = 400_000):
        """Mod-p keys of the Schreier stabilizer generators, grouped by orbit."""
        m, p, n = self.m, self.ring.p, self.lat.n
        N = self.size
        p_powers = p ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
        shift = p ** (n * n)
        pair_chunks = []
        for start in range(0, N, chunk):
            keys = np.arange(start, min(N, start + chunk), dtype=np.int64)
            coords = self._decode(keys)
            Uc = self.transversal[keys].astype(np.int64).reshape(-1, n, n)
            oid = self.orbit_id[keys].astype(np.int64)
            for (g, _), A in zip(self._gens, self._ad_mats):
                tkeys = (coords @ A.T % m) @ self._powers
                Uti = batched_unimodular_inverse(self.transversal[tkeys].astype(np.int64).reshape(-1, n, n), m)
                sch = Uti @ g[None] % m @ Uc % m
                skeys = (sch.reshape(len(keys), n * n) % p) @ p_powers
                pair_chunks.append(np.unique(oid * shift + skeys))
        pairs = np.unique(np.concatenate(pair_chunks))
        self._schreier_keys: dict[int, np.ndarray] = {}
        oid_of = pairs // shift
        key_of = pairs % shift
        for oid in range(len(self.orbits)):
            self._schreier_keys[oid] = key_of[oid_of == oid]

    # -- queries -------------------------------------------------------

    def _decode(self, keys: np.ndarray) -> np.ndarray:
        d = self.lat.d
        out = np.empty((len(keys), d), dtype=np.int64)
        rem = np.asarray(keys, dtype=np.int64).copy()
        for pos in range(d - 1, -1, -1):
            out[:, pos] = rem % self.m
            rem //= self.m
        return out

    def key_of(self, x: np.ndarray) -> int:
        c = self.lat.coords(np.asarray(x, dtype=np.int64) % self.m, self.m)
        return int(c @ self._powers)

    def element_from_key(self, key: int) -> np.ndarray:
        c = self._decode(np.array([key]))[0]
        return self.lat.from_coords(c, self.m)

    def orbit_shadow(self, oid: int) -> Subgroup:
        if oid not in self._shadow_cache:
            gens = decode_keys(self._schreier_keys[oid], self.ring.p, self.lat.n)
            shadow = mulclose(gens, self.ring.p)
            if self.group_order % self.orbits[oid].size:
                raise AssertionError("orbit size does not divide the group order")
            stab_order = self.group_order // self.orbits[oid].size
            if stab_order % shadow.order:
                raise AssertionError("shadow order does not divide the stabilizer order")
            self._shadow_cache[oid] = shadow
        return self._shadow_cache[oid]

    def orbit_signature(self, oid: int) -> tuple:
        return subgroup_signature(self.orbit_shadow(oid))

    def element_shadow(self, key: int) -> Subgroup:
        """Exact shadow subgroup of an element, by transversal conjugation."""
        oid = int(self.orbit_id[key])
        n = self.lat.n
        u = self.transversal[key].astype(np.int64).reshape(n, n) % self.ring.p
        ckey = (oid, int(encode_mats(u[None], self.ring.p)[0]))
        if ckey not in self._elem_shadow_cache:
            self._elem_shadow_cache[ckey] = self.orbit_shadow(oid).conjugated(u)
        return self._elem_shadow_cache[ckey]

    def lift_keys_from(self, coarse: "AdjointPartition", coarse_key: int) -> np.ndarray:
        """Keys of all lifts of a level-r element inside this level-(r+1) space."""
        if self.ring.p != coarse.ring.p or self.ring.r != coarse.ring.r + 1:
            raise ValueError("lift keys need consecutive levels over the same prime")
        base = coarse._decode(np.array([coarse_key], dtype=np.int64))[0]
        return (base @ self._powers) + self._delta_offsets()

    def _delta_offsets(self) -> np.ndarray:
        if self._delta_cache is None:
            d = self.lat.d
            p = self.ring.p
            step = p ** (self.ring.r - 1)
            idx = np.arange(p**d, dtype=np.int64)
            offsets = np.zeros(p**d, dtype=np.int64)
            for t in range(d):
                digit = (idx // p ** (d - 1 - t)) % p
                offsets += digit * step * self._powers[t]
            self._delta_cache = offsets
        return self._delta_cache


_PARTITION_CACHE: dict[tuple, AdjointPartition] = {}


def adjoint_partition(n: int, ring: LocalRing, kind: str = "sl") -> AdjointPartition:
    key = (n, kind, ring.p, ring.r)
    if key not in _PARTITION_CACHE:
        _PARTITION_CACHE[key] = AdjointPartition(lattice(n, kind), ring)
    return _PARTITION_CACHE[key]


def clear_caches():
    """Drop all memoized partitions/censuses (mainly for worker-count tests)."""
    _PARTITION_CACHE.clear()
    _COADJ_CACHE.clear()
    _SIG_CACHE.clear()
    _SPAN_CACHE.clear()


# ----------------------------------------------------------------------
# Lie shadows


def lie_shadow(a: np.ndarray, lat: LieLattice, ring: LocalRing, check_profile: bool = False):
    """Basis (mod p, lattice coordinates) and dimension of the Lie shadow of a.

    The basis spans the mod-p reduction of the centralizer of a in the
    lattice over Z/p^r.  With check_profile the dimension is recomputed from
    the divisor profile of the commutator matrix at the dual coordinates.
    """
    ad = lat.ad_matrix(a, ring)
    basis = kernel_mod_m_shadow_basis(ad, ring)
    dim = len(basis)
    if check_profile:
        w = lat.dual_coordinates(a, ring)
        prof = antisymmetric_profile(lat.commutator_matrix().evaluate(w, ring), ring)
        below = sum(1 for x in prof.pairs if x < ring.r)
        if dim != lat.d - 2 * below:
            raise AssertionError("profile dimension disagrees with the kernel dimension")
    return basis, dim


def lie_shadow_matrices(a: np.ndarray, lat: LieLattice, ring: LocalRing) -> list[np.ndarray]:
    """Lie shadow of a as matrices, echelonized in flattened form so the
    basis is canonical for span-coordinate extraction."""
    basis, _ = lie_shadow(a, lat, ring)
    mats = [lat.from_coords(v, ring.p) for v in basis]
    n = lat.n
    flat = echelon_basis_mod_p([m.reshape(-1) for m in mats], ring.p) if mats else []
    return [v.reshape(n, n) for v in flat]


# ----------------------------------------------------------------------
# group shadows


def group_shadow_oracle(a: np.ndarray, lat: LieLattice, ring: LocalRing) -> Subgroup:
    """Exact shadow by direct stabilizer computation.

    Level 1 goes through the commutant in gl_n; higher levels read the orbit
    partition (with its Schreier stabilizers) when the space is enumerable.
    """
    a = np.asarray(a, dtype=np.int64) % ring.modulus
    if ring.r == 1:
        return Subgroup(centralizer_subgroup_level1(a, ring.p), ring.p)
    part = adjoint_partition(lat.n, ring, lat.kind)
    return part.element_shadow(part.key_of(a))


def group_shadow_solve_level2(a: np.ndarray, lat: LieLattice, ring: LocalRing) -> Subgroup:
    """Exact shadow of a level-2 element by lifting level-1 stabilizer candidates.

    s stabilizing a mod p lies in the shadow iff the affine system
    [Y, a mod p] = -[s, a]/p  and  tr(adj(s) Y) = (1 - det s)/p   (mod p)
    has a solution Y, both conditions being linear in Y.
    """
    if ring.r != 2:
        raise ValueError("the lift-solve strategy handles level 2 only")
    from .matrices import adjugate_mod

    p, m, n = ring.p, ring.modulus, lat.n
    a = np.asarray(a, dtype=np.int64) % m
    abar = a % p
    candidates = centralizer_subgroup_level1(abar, p)
    cols = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=np.int64)
            e[i, j] = 1
            cols.append(bracket(e, abar, p).reshape(-1))
    K = np.stack(cols, axis=1)
    members = []
    for s in candidates:
        comm = bracket(s, a) % m
        if np.any(comm % p):
            continue
        rhs_comm = (-(comm // p)) % p
        det_lift = det_mod(s, ring)
        if (1 - det_lift) % p:
            raise AssertionError("candidate determinant is not 1 mod p")
        delta = (1 - det_lift) // p % p
        det_row = (adjugate_mod(s, ring).T % p).reshape(1, -1)
        A = np.vstack([K, det_row])
        b = np.concatenate([rhs_comm.reshape(-1), np.array([delta], dtype=np.int64)])
        if solve_mod_p(A, b, p) is not None:
            members.append(s)
    return Subgroup(np.stack(members), p)


def group_shadow_recursive(a: np.ndarray, lat: LieLattice, ring: LocalRing):
    """Shadow by the level-by-level stabilizer-of-a-functional recursion.

    At each level the walk needs a lift of the current reduction with the
    same shadow (found through Lie-shadow equality); the step replaces the
    shadow by the stabilizer of the duality functional c = tr(x_c . -) on
    the current Lie shadow.  Returns (Subgroup, chain_ok); results carry
    "recursive" provenance and are validated against the oracle on small
    cases rather than trusted blindly.
    """
    p = ring.p
    a = np.asarray(a, dtype=np.int64) % ring.modulus
    current = Subgroup(centralizer_subgroup_level1(a % p, p), p)
    for k in range(1, ring.r):
        rk = LocalRing(p, k)
        rk1 = LocalRing(p, k + 1)
        a_k = a % rk.modulus
        a_k1 = a % rk1.modulus
        b = _same_lie_shadow_lift(a_k, lat, rk, rk1)
        if b is None:
            return current, False
        x_c = ((a_k1 - b) % rk1.modulus) // rk.modulus
        span = lie_shadow_matrices(a_k, lat, rk)
        c_vec = np.array([int(np.trace(x_c @ s)) % p for s in span], dtype=np.int64)
        current = _functional_stabilizer(current, span, c_vec)
    return current, True


def _same_lie_shadow_lift(a_k, lat, rk, rk1):
    """A lift of a_k one level up with the same Lie shadow, or None."""
    basis, dim = lie_shadow(a_k, lat, rk)
    target = _basis_footprint(basis)
    p = rk.p
    d = lat.d
    coords = lat.coords(np.asarray(a_k) % rk.modulus, rk.modulus)
    for idx in range(p**d):
        delta = np.array([(idx // p ** (d - 1 - t)) % p for t in range(d)], dtype=np.int64)
        cand = lat.from_coords(coords + rk.modulus * delta, rk1.modulus)
        cb, cdim = lie_shadow(cand, lat, rk1)
        if cdim == dim and _basis_footprint(cb) == target:
            return cand
    return None


def _basis_footprint(basis) -> tuple:
    return tuple(tuple(int(x) for x in v) for v in basis)


def _functional_stabilizer(sub: Subgroup, span: list[np.ndarray], c_vec: np.ndarray) -> Subgroup:
    """Elements of the subgroup fixing the functional with the given coordinates."""
    if len(span) == 0:
        return sub
    act = _span_action_matrices(sub, span, sub.element_inverses())
    moved = np.einsum("gji,j->gi", act, c_vec) % sub.p
    mask = (moved == c_vec[None, :] % sub.p).all(axis=1)
    return Subgroup(sub.elements[mask], sub.p)


def group_shadow(a: np.ndarray, lat: LieLattice, ring: LocalRing, strategy: str = "oracle"):
    """Shadow of a with the requested strategy; returns (Subgroup, provenance)."""
    if strategy == "oracle":
        if ring.r == 1 or ring.modulus ** lat.d <= SPACE_BOUND:
            return group_shadow_oracle(a, lat, ring), "oracle"
        if ring.r == 2:
            return group_shadow_solve_level2(a, lat, ring), "oracle-solve"
        raise InfeasibleError("no exact shadow strategy fits these sizes")
    if strategy == "recursive":
        sub, ok = group_shadow_recursive(a, lat, ring)
        if not ok:
            raise RuntimeError("no shadow-preserving lift found along the recursion")
        return sub, "recursive"
    raise ValueError(f"unknown strategy {strategy!r}")


# ----------------------------------------------------------------------
# sl3 labels


def classify_shadow_sl3(a: np.ndarray, p: int) -> str:
    """Label (SL, L, J, R) of a level-1 sl3 element by its shadow type."""
    if p % 3 == 0 or p == 2:
        raise ValueError("sl3 classification needs p > 2 and p not dividing 3")
    ring = LocalRing(p, 1)
    a = np.asarray(a, dtype=np.int64) % p
    if not a.any():
        return "SL"
    lat = lattice(3, "sl")
    dim = 8 - rank_mod_p(lat.ad_matrix(a, ring), p)
    if dim == 2:
        return "R"
    if dim == 4:
        a2 = a @ a % p
        if not a2.any():
            return "J"
        # semisimple subregular: quadratic minimal polynomial with root pair
        # (t, -2t), t != 0, the only trace-compatible split form
        B = np.stack([a.reshape(-1), np.eye(3, dtype=np.int64).reshape(-1)], axis=1)
        sol = solve_mod_p(B, a2.reshape(-1), p)
        if sol is not None and np.array_equal(B @ sol % p, a2.reshape(-1) % p):
            c1, c0 = int(sol[0]), int(sol[1])
            alpha = (-c1) % p
            if alpha != 0 and c0 % p == 2 * alpha * alpha % p:
                return "L"
        return "OTHER(subregular)"
    return f"OTHER(dim{dim})"


# ----------------------------------------------------------------------
# coadjoint censuses


@dataclass
class CoadjointCensus:
    subgroup: Subgroup
    span_dim: int
    orbits: list  # (rep key, size, stabilizer Subgroup, stabilizer signature)
    fixed_dim: int

    @property
    def orbit_count(self) -> int:
        return len(self.orbits)

    def lambda_by_signature(self) -> dict:
        table: dict[tuple, int] = {}
        for _, size, _, sig in self.orbits:
            table[sig] = table.get(sig, 0) + size
        return table

    def signature_multiset(self) -> tuple:
        return tuple(sorted(sig for _, _, _, sig in self.orbits))


_COADJ_CACHE: dict[tuple, CoadjointCensus] = {}


def coadjoint_census(sub: Subgroup, span: list[np.ndarray] | None = None, functional_bound: int = FUNCTIONAL_BOUND) -> CoadjointCensus:
    """Orbits of a subgroup on the dual of a Lie shadow it stabilizes.

    The span defaults to (additive span of the subgroup) intersect sl, which
    agrees with the Lie shadow of the underlying element whenever the span
    identification holds (it can genuinely fail at q = 3, so element-tied
    censuses pass the honest centralizer-reduction basis instead).  The
    action is (g . c)(y) = c(Ad_{g^{-1}} y) in coordinates dual to the
    span's canonical basis; orbit representatives are minimum image keys.
    """
    p = sub.p
    if span is None:
        span = subgroup_span_sl_basis(sub)
    span_key = tuple(tuple(int(x) for x in b.reshape(-1)) for b in span)
    cache_key = (sub.p, sub.n, sub.keys, span_key)
    if cache_key in _COADJ_CACHE:
        return _COADJ_CACHE[cache_key]
    dS = len(span)
    if p**dS > functional_bound or sub.order > FUNCTIONAL_BOUND:
        raise InfeasibleError(f"coadjoint census at {p}^{dS} functionals is out of bounds")
    act = _span_action_matrices(sub, span, sub.element_inverses())
    actT = np.ascontiguousarray(act.transpose(0, 2, 1)) % p
    N = p**dS
    idx = np.arange(N, dtype=np.int64)
    digits = np.empty((dS, N), dtype=np.int64)
    for t in range(dS):
        digits[t] = (idx // p ** (dS - 1 - t)) % p
    powers = p ** np.arange(dS - 1, -1, -1, dtype=np.int64)
    canon = np.empty(N, dtype=np.int64)
    fix_count = np.zeros(N, dtype=np.int64)
    chunk = 4096
    for start in range(0, N, chunk):
        sl = slice(start, min(N, start + chunk))
        block = digits[:, sl]
        images = np.einsum("gij,jc->gic", actT, block) % p
        keys = np.einsum("gic,i->gc", images, powers)
        canon[sl] = keys.min(axis=0)
        fix_count[sl] = (keys == (powers @ block)[None, :]).sum(axis=0)
    reps, counts = np.unique(canon, return_counts=True)
    orbits = []
    for rep, size in zip(reps.tolist(), counts.tolist()):
        c_vec = np.array([(rep // p ** (dS - 1 - t)) % p for t in range(dS)], dtype=np.int64)
        moved = np.einsum("gij,j->gi", actT, c_vec) % p
        mask = (moved == c_vec[None]).all(axis=1)
        stab = Subgroup(sub.elements[mask], p)
        if stab.order * int(size) != sub.order:
            raise AssertionError("orbit-stabilizer mismatch in the coadjoint census")
        orbits.append((int(rep), int(size), stab, subgroup_signature(stab)))
    if sum(size for _, size, _, _ in orbits) != p**dS:
        raise AssertionError("coadjoint orbit sizes do not add up")
    fixed = int((fix_count == sub.order).sum())
    fixed_dim = 0
    while p**fixed_dim < fixed:
        fixed_dim += 1
    if p**fixed_dim != fixed:
        raise AssertionError("fixed functionals do not fill out a subspace")
    census = CoadjointCensus(sub, dS, orbits, fixed_dim)
    _COADJ_CACHE[cache_key] = census
    return census


def lambda_and_z(sub: Subgroup, span: list[np.ndarray] | None = None):
    """Transition counts Lambda(S, -) by stabilizer signature, plus z_S.

    Dual route: the group-side census is cross-checked against the kernel
    dimensions of the span commutator matrix before anything is returned.
    The kernel comparison reads stabilizer dimensions off subgroup spans, so
    it only applies when the span identification holds (q = 3 can break it;
    the fixed-point comparison is intrinsic and always enforced).
    Returns (table_by_signature, z, kernel_histogram).
    """
    if span is None:
        span = subgroup_span_sl_basis(sub)
    census = coadjoint_census(sub, span)
    p = sub.p
    dS = len(span)
    cm = span_commutator_matrix(span, p)
    N = p**dS
    idx = np.arange(N, dtype=np.int64)
    ws = np.empty((N, dS), dtype=np.int64)
    for t in range(dS):
        ws[:, t] = (idx // p ** (dS - 1 - t)) % p
    ranks = batched_rank_mod_p(cm.evaluate_batch(ws, p), p)
    kernel_hist: dict[int, int] = {}
    for kd, cnt in zip(*np.unique(dS - ranks, return_counts=True)):
        kernel_hist[int(kd)] = int(cnt)
    identified = _basis_footprint([b.reshape(-1) for b in span]) == _basis_footprint(
        [b.reshape(-1) for b in subgroup_span_sl_basis(sub)]
    )
    if identified:
        stab_hist: dict[int, int] = {}
        for _, size, _, sig in census.orbits:
            stab_hist[sig[1]] = stab_hist.get(sig[1], 0) + size
        if stab_hist != kernel_hist:
            raise AssertionError(f"kernel census {kernel_hist} != stabilizer census {stab_hist}")
    if kernel_hist.get(dS, 0) != p**census.fixed_dim:
        raise AssertionError("rank-0 functionals disagree with the fixed-point count")
    return census.lambda_by_signature(), census.fixed_dim, kernel_hist


# ----------------------------------------------------------------------
# lifts


def shadow_preserving_lift(a: np.ndarray, lat: LieLattice, ring: LocalRing):
    """A lift of a one level up with the same shadow subgroup, or None.

    Lifts are filtered by Lie-shadow dimension first (cheap), then confirmed
    on the group side; a lift's shadow always sits inside the shadow of a,
    so order equality settles set equality.
    """
    ring_up = LocalRing(ring.p, ring.r + 1)
    p = ring.p
    base_shadow, _ = group_shadow(a, lat, ring)
    _, base_dim = lie_shadow(a, lat, ring)
    coords = lat.coords(np.asarray(a) % ring.modulus, ring.modulus)
    d = lat.d
    for idx in range(p**d):
        delta = np.array([(idx // p ** (d - 1 - t)) % p for t in range(d)], dtype=np.int64)
        cand = lat.from_coords(coords + ring.modulus * delta, ring_up.modulus)
        _, cdim = lie_shadow(cand, lat, ring_up)
        if cdim != base_dim:
            continue
        cand_shadow, _ = group_shadow(cand, lat, ring_up)
        if not base_shadow.contains_subgroup(cand_shadow):
            raise AssertionError("a lift's shadow escaped the base shadow")
        if cand_shadow.order == base_shadow.order:
            return cand
    return None


def count_lifts_by_shadow(a: np.ndarray, lat: LieLattice, ring: LocalRing, mode: str = "oracle", sample: int = 512, seed: int = 0):
    """Lift counts of a (one level up), per shadow signature.

    Oracle mode classifies every lift through the orbit partition and asserts
    equality with the formula table q^(d - d_S) * Lambda.  Sampled mode only
    checks a deterministic sample of lifts for membership in the formula's
    signature support.
    """
    ring_up = LocalRing(ring.p, ring.r + 1)
    p = ring.p
    d = lat.d
    shadow, _ = group_shadow(a, lat, ring)
    if shadow_preserving_lift(a, lat, ring) is None:
        return {"applicable": False}
    span = lie_shadow_matrices(a, lat, ring)
    census = coadjoint_census(shadow, span)
    dS = len(span)
    factor = p ** (d - dS)
    formula = {sig: factor * lam for sig, lam in census.lambda_by_signature().items()}
    result = {"applicable": True, "formula": formula}
    if mode == "oracle":
        part_r = adjoint_partition(lat.n, ring, lat.kind)
        part_up = adjoint_partition(lat.n, ring_up, lat.kind)
        keys = part_up.lift_keys_from(part_r, part_r.key_of(a))
        direct: dict[tuple, int] = {}
        for oid, cnt in zip(*np.unique(part_up.orbit_id[keys], return_counts=True)):
            sig = part_up.orbit_signature(int(oid))
            direct[sig] = direct.get(sig, 0) + int(cnt)
        if sum(direct.values()) != p**d:
            raise AssertionError("lift classification missed elements")
        result["direct"] = direct
        result["match"] = direct == formula
    else:
        rng = np.random.default_rng(seed)
        coords = lat.coords(np.asarray(a) % ring.modulus, ring.modulus)
        picks = sorted(set(rng.integers(0, p**d, size=min(sample, p**d)).tolist()))
        support = {sig for sig in formula}
        hits: dict[tuple, int] = {}
        for idx in picks:
            delta = np.array([(idx // p ** (d - 1 - t)) % p for t in range(d)], dtype=np.int64)
            cand = lat.from_coords(coords + ring.modulus * delta, ring_up.modulus)
            sub = group_shadow(cand, lat, ring_up)[0]
            sig = subgroup_signature(sub)
            if sig not in support:
                raise AssertionError("sampled lift signature outside the formula support")
            hits[sig] = hits.get(sig, 0) + 1
        result["sampled"] = hits
    return result


def orbits_above(a: np.ndarray, lat: LieLattice, ring: LocalRing) -> list[dict]:
    """Census of the orbits one level up that contain a lift of a."""
    ring_up = LocalRing(ring.p, ring.r + 1)
    part_up = adjoint_partition(lat.n, ring_up, lat.kind)
    part = adjoint_partition(lat.n, ring, lat.kind)
    keys = part_up.lift_keys_from(part, part.key_of(a))
    ids, counts = np.unique(part_up.orbit_id[keys], return_counts=True)
    rows = []
    for oid, fib in zip(ids.tolist(), counts.tolist()):
        orbit = part_up.orbits[oid]
        shadow = part_up.orbit_shadow(oid)
        rows.append(
            {
                "orbit": int(oid),
                "size": orbit.size,
                "stabilizer_order": part_up.group_order // orbit.size,
                "shadow_order": shadow.order,
                "label": shadow_label(shadow, lat.n),
                "signature": part_up.orbit_signature(oid),
                "lifts_in_orbit": int(fib),
            }
        )
    return rows


# ----------------------------------------------------------------------
# shadow reports (the census/shadow JSON surface)


def shadow_label(sub: Subgroup, n: int, lie_dim: int | None = None) -> str:
    """Label of a shadow subgroup (sl2 and sl3 conventions).

    The dimension used is the honest Lie-shadow dimension when the caller
    knows it; the subgroup-span dimension otherwise (identical away from the
    q = 3 corner).
    """
    sig = subgroup_signature(sub)
    dim = lie_dim if lie_dim is not None else sig[1]
    p = sub.p
    full = special_linear_order(n, LocalRing(p, 1))
    if sub.order == full:
        return "SL"
    if n == 3:
        if dim == 2:
            return "R"
        if dim == 4:
            ref_l = subgroup_signature(Subgroup(centralizer_subgroup_level1(np.diag([1, 1, -2]) % p, p), p))
            e12 = np.zeros((3, 3), dtype=np.int64)
            e12[0, 1] = 1
            ref_j = subgroup_signature(Subgroup(centralizer_subgroup_level1(e12, p), p))
            if sig == ref_l:
                return "L"
            if sig == ref_j:
                return "J"
        return f"OTHER(d={dim})"
    if dim == 1:
        return "R"
    return f"OTHER(d={dim})"


def shadow_report(a: np.ndarray, n: int, p: int, r: int, strategy: str = "oracle") -> dict:
    """The serialized shadow record of one element."""
    ring = LocalRing(p, r)
    lat = lattice(n, "sl")
    a = np.asarray(a, dtype=np.int64) % ring.modulus
    if not lat.contains(a, ring):
        raise ValueError("element is not in the lattice (nonzero trace?)")
    sub, provenance = group_shadow(a, lat, ring, strategy)
    span = lie_shadow_matrices(a, lat, ring)
    table, z, _ = lambda_and_z(sub, span)
    label = shadow_label(sub, n, lie_dim=len(span))
    return {
        "element": a.tolist(),
        "level": r,
        "p": p,
        "shadowOrder": sub.order,
        "d_S": len(span),
        "z_S": z,
        "label": label,
        "lambdaTable": {str(list(k)): v for k, v in sorted(table.items())},
        "provenance": provenance,
    }
