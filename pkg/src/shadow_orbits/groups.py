"""SL_n over Z/p^r: membership, generators, adjoint action, exponential map.

The exponential of x in p * gl_n(Z/p^r) is the truncated series
sum x^i / i!, evaluated at lifted precision r + v_p(i_max!) so that every
division by a factorial is exact before the final reduction.
"""

from __future__ import annotations

from math import factorial

import numpy as np

from .matrices import (
    as_residues,
    batched_det2_mod,
    batched_det3_mod,
    det_mod,
    inverse_mod,
    kernel_mod_p,
)
from .rings import LocalRing, exp_truncation, factorial_valuation


class InfeasibleError(RuntimeError):
    """An enumeration bound was exceeded; the request is valid but too large."""


def sl_membership(M: np.ndarray, ring: LocalRing) -> bool:
    return det_mod(M, ring) == 1


def special_linear_order(n: int, ring: LocalRing) -> int:
    """|SL_n(Z/p^r)| = p^((r-1)(n^2-1)) * |SL_n(F_p)|."""
    p = ring.p
    level1 = p ** (n * (n - 1) // 2)
    for k in range(2, n + 1):
        level1 *= p**k - 1
    return p ** ((ring.r - 1) * (n * n - 1)) * level1


def elementary_generators(n: int, ring: LocalRing, scales: str = "powers"):
    """Generating set I + t e_ij of SL_n(Z/p^r), with inverses.

    t runs over {1} ("unit") or over {1, p, ..., p^(r-1)} ("powers"); the
    extra scales shorten orbit diameters without changing the generated group.
    """
    m = ring.modulus
    ts = [1] if scales == "unit" else [ring.p**k for k in range(ring.r)]
    gens = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for t in ts:
                g = np.eye(n, dtype=np.int64)
                g[i, j] = t % m
                ginv = np.eye(n, dtype=np.int64)
                ginv[i, j] = (-t) % m
                gens.append((g, ginv))
    return gens


def adjoint_action(g: np.ndarray, x: np.ndarray, ring: LocalRing, g_inv: np.ndarray | None = None) -> np.ndarray:
    """Ad_g(x) = g x g^{-1} over Z/p^r."""
    m = ring.modulus
    g = as_residues(g, ring)
    x = as_residues(x, ring)
    if g_inv is None:
        g_inv = inverse_mod(g, ring)
    return g @ x % m @ g_inv % m


def matrix_exp_series(x: np.ndarray, ring: LocalRing) -> np.ndarray:
    """Truncated exponential series of a square matrix with entries in p Z/p^r.

    Also evaluates stacks (..., n, n).  Rejects any entry of valuation 0.
    """
    if ring.p == 2:
        raise ValueError("p = 2 is rejected: the series does not converge there")
    x = np.asarray(x, dtype=np.int64) % ring.modulus
    if np.any(x % ring.p):
        raise ValueError("exponential needs every entry divisible by p")
    i_max, extra = exp_truncation(ring.p, ring.r)
    big = ring.lifted(extra)
    M = big.modulus
    n = x.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=np.int64), x.shape).copy()
    total = eye.copy()
    power = eye
    for i in range(1, i_max):
        power = np.matmul(power, x) % M
        v = factorial_valuation(i, ring.p)
        unit = factorial(i) // ring.p**v
        scaled, rem = np.divmod(power, ring.p**v)
        if rem.any():
            raise AssertionError("factorial division was not exact at the lifted precision")
        total = (total + scaled * pow(unit, -1, M)) % M
    return total % ring.modulus


def exponential(x: np.ndarray, ring: LocalRing) -> np.ndarray:
    """exp on p * gl_n(Z/p^r); lands in SL_n exactly when x is traceless."""
    return matrix_exp_series(x, ring)


def exp_lie_criterion(x: np.ndarray, ring: LocalRing) -> bool:
    """Whether exp(x) has determinant 1 (x in p * gl_n)."""
    return sl_membership(matrix_exp_series(x, ring), ring)


def enumerate_special_linear(n: int, ring: LocalRing, bound: int = 10**7) -> np.ndarray:
    """All elements of SL_n(Z/p^r) by generator closure, as an (N, n, n) array.

    Raises InfeasibleError when the group order exceeds the bound.
    """
    order = special_linear_order(n, ring)
    if order > bound:
        raise InfeasibleError(f"|SL_{n}(Z/{ring.p}^{ring.r})| = {order} exceeds bound {bound}")
    m = ring.modulus
    if m ** (n * n) >= 2**63:
        raise InfeasibleError("element keys overflow 64 bits")
    powers = m ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
    gens = np.stack([g for g, _ in elementary_generators(n, ring)])
    eye = np.eye(n, dtype=np.int64)[None]
    seen = {int(eye.reshape(-1) @ powers)}
    elements = [eye[0]]
    frontier = eye
    while frontier.size:
        prod = np.matmul(frontier[:, None], gens[None, :]) % m
        prod = prod.reshape(-1, n, n)
        keys = prod.reshape(len(prod), -1) @ powers
        fresh = []
        for k_val, mat in zip(keys.tolist(), prod):
            if k_val not in seen:
                seen.add(k_val)
                fresh.append(mat)
        frontier = np.stack(fresh) if fresh else np.empty((0, n, n), dtype=np.int64)
        elements.extend(fresh)
    out = np.stack(elements)
    if len(out) != order:
        raise AssertionError(f"closure found {len(out)} elements, expected {order}")
    return out


def centralizer_subgroup_level1(a: np.ndarray, p: int, combo_bound: int = 10**6) -> np.ndarray:
    """Elements of SL_n(F_p) commuting with a, via its commutant in gl_n.

    Enumerates the commutant solution space (dimension k, p^k candidates) and
    filters by det = 1; avoids touching the full group.
    """
    ring = LocalRing(p, 1)
    a = as_residues(a, ring)
    n = a.shape[0]
    cols = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=np.int64)
            e[i, j] = 1
            cols.append(((a @ e - e @ a) % p).reshape(-1))
    K = np.stack(cols, axis=1)
    basis = kernel_mod_p(K, p)
    k = len(basis)
    if p**k > combo_bound:
        raise InfeasibleError(f"commutant dimension {k} too large to enumerate at p = {p}")
    combos = np.zeros((p**k, n, n), dtype=np.int64)
    idx = np.arange(p**k)
    for t, vec in enumerate(basis):
        digit = (idx // p ** (k - 1 - t)) % p
        combos += digit[:, None, None] * vec.reshape(n, n)[None]
    combos %= p
    if n == 2:
        dets = batched_det2_mod(combos, p)
    elif n == 3:
        dets = batched_det3_mod(combos, p)
    else:
        dets = np.array([det_mod(c, ring) for c in combos])
    return combos[dets == 1]
