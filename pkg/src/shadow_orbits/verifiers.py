"""Instance verifiers: lift-correspondence theorems, the exponential suite,
and the shadow lemmas.

Each verifier runs every instance in its configured range and returns a
report dict with instance counts and explicit failure witnesses; an empty
failure list is the pass condition.  Reports contain no timestamps, so
identical configurations produce identical bytes.
"""

from __future__ import annotations

import numpy as np

from .groups import (
    InfeasibleError,
    matrix_exp_series,
)
from .lattices import LieLattice, lattice
from .matrices import batched_det2_mod, batched_det3_mod, echelon_basis_mod_p, kernel_module_mod_m
from .orbits import (
    adjoint_partition,
    classify_shadow_sl3,
    coadjoint_census,
    encode_mats,
    group_shadow,
    group_shadow_recursive,
    group_shadow_solve_level2,
    lie_shadow,
    lie_shadow_matrices,
    shadow_label,
    subgroup_span_sl_basis,
)
from .rings import LocalRing


# ----------------------------------------------------------------------
# exponential suite


def _batched_ad(lat: LieLattice, coords: np.ndarray, modulus: int) -> np.ndarray:
    # ad(x)_{kj} = sum_i coords_i * lambda[i, j, k]
    return np.einsum("ni,ijk->nkj", coords % modulus, lat.structure % modulus) % modulus


def verify_exponential_suite(algebra: str, p: int, r: int, samples: int = 1200, seed: int = 0) -> dict:
    """exp identities on p * gl_2, p * sl_2 (exhaustive) or p * gl_3 (sampled).

    Checks, for every x in the set: exp(x) exp(-x) = 1; full one-parameter
    additivity exp((a+b)x) = exp(ax) exp(bx) over all scalar pairs; the
    conjugation identity Ad_exp(x) = sum ad_x^i / i!; and det(exp x) = 1
    exactly for traceless x.
    """
    ring = LocalRing(p, r)
    m = ring.modulus
    failures: list = []
    if algebra not in ("gl2", "sl2", "gl3"):
        raise ValueError("algebra must be one of gl2, sl2, gl3")
    n = int(algebra[-1])
    kind = algebra[:2]
    lat = lattice(n, kind)
    # p * lattice(Z/p^r): free coordinates run mod p^(r-1)
    inner = p ** (r - 1)
    d = lat.d
    if algebra == "gl3":
        rng = np.random.default_rng(seed)
        coords_inner = rng.integers(0, inner, size=(max(samples, 1000), d), dtype=np.int64)
        mode = "sampled"
    else:
        total = inner**d
        if total > 200_000:
            raise InfeasibleError(f"{p}^{(r - 1) * d} elements is past the exhaustive bound")
        idx = np.arange(total, dtype=np.int64)
        coords_inner = np.empty((total, d), dtype=np.int64)
        rem = idx.copy()
        for pos in range(d - 1, -1, -1):
            coords_inner[:, pos] = rem % inner
            rem //= inner
        mode = "exhaustive"
    xs = np.tensordot(coords_inner * p % m, np.stack(lat.basis), axes=(1, 0)) % m
    N = len(xs)
    exp_x = matrix_exp_series(xs, ring)
    exp_neg = matrix_exp_series((-xs) % m, ring)
    eye = np.eye(n, dtype=np.int64)
    bad = ~(exp_x @ exp_neg % m == eye[None]).all(axis=(1, 2))
    for i in np.nonzero(bad)[0][:3]:
        failures.append({"check": "inverse", "x": xs[i].tolist()})
    # additivity over all scalar pairs, through the exp(c x) table:
    # f(c) = g^c for every c plus g^m = 1 is equivalent to all-pairs additivity
    scalars = np.arange(m, dtype=np.int64)
    for start in range(0, N, 2048):
        xs_c = xs[start : start + 2048]
        ex_c = exp_x[start : start + 2048]
        table = matrix_exp_series(xs_c[:, None] * scalars[None, :, None, None] % m, ring)
        g_pow = np.broadcast_to(eye, (len(xs_c), n, n)).copy()
        add_bad = np.zeros(len(xs_c), dtype=bool)
        for c in range(m):
            add_bad |= ~(table[:, c] == g_pow).all(axis=(1, 2))
            g_pow = g_pow @ ex_c % m
        add_bad |= ~(g_pow == eye[None]).all(axis=(1, 2))  # g^(p^r) = identity
        for i in np.nonzero(add_bad)[0][:3]:
            failures.append({"check": "additivity", "x": xs_c[i].tolist()})
    # Ad_exp(x) = sum ad_x^i / i!  (exp(-x) is the inverse, checked above)
    basis = np.stack(lat.basis) % m
    conj = exp_x[:, None] @ basis[None] % m @ exp_neg[:, None] % m
    flat = conj.reshape(N, d, n * n)
    ad_exp = np.einsum("kv,njv->nkj", lat.coord_map % m, flat) % m
    ad_x = _batched_ad(lat, coords_inner * p % m, m)
    ad_series = matrix_exp_series(ad_x, ring)
    ad_bad = ~(ad_exp == ad_series).all(axis=(1, 2))
    for i in np.nonzero(ad_bad)[0][:3]:
        failures.append({"check": "conjugation-series", "x": xs[i].tolist()})
    # det(exp x) = 1 iff trace(x) = 0 in Z/p^r
    dets = batched_det2_mod(exp_x, m) if n == 2 else batched_det3_mod(exp_x, m)
    traces = np.trace(xs, axis1=1, axis2=2) % m
    crit_bad = (dets == 1) != (traces == 0)
    for i in np.nonzero(crit_bad)[0][:3]:
        failures.append({"check": "lie-criterion", "x": xs[i].tolist()})
    checked = {
        "inverse": int(N),
        "additivity_pairs_per_element": m * m,
        "conjugation": int(N),
        "criterion": int(N),
    }
    report = {
        "target": "exp",
        "algebra": algebra,
        "p": p,
        "r": r,
        "mode": mode,
        "instances": int(N),
        "checked": checked,
        "failures": failures,
        "passed": not failures,
    }
    if algebra == "sl2":
        # the exp-vs-stabilizer-kernel instances live on small sl2 levels
        report["stabilizer_kernel"] = _verify_exp_stabilizer_kernel(p, min(r, 2))
        report["passed"] = report["passed"] and report["stabilizer_kernel"]["passed"]
    return report


def _ring_level_closure(gens: list[np.ndarray], m: int, limit: int = 200_000) -> list[np.ndarray]:
    seen: dict[int, np.ndarray] = {}
    for g in gens:
        seen[int(encode_mats(g[None], m)[0])] = g % m
    frontier = list(seen.values())
    base = list(seen.values())
    while frontier:
        new = []
        for a in base:
            prod = a[None] @ np.stack(frontier) % m
            for mat, key in zip(prod, encode_mats(prod, m)):
                if int(key) not in seen:
                    seen[int(key)] = mat
                    new.append(mat)
                    if len(seen) > limit:
                        raise InfeasibleError("stabilizer closure too large")
        frontier = new
    return list(seen.values())


def _verify_exp_stabilizer_kernel(p: int, r: int) -> dict:
    """exp maps p * (centralizer of b) bijectively onto the kernel of the
    stabilizer's mod-p reduction, on small sl2 instances."""
    from .orbits import shadow_preserving_lift

    lat = lattice(2, "sl")
    ring = LocalRing(p, r)
    ring_up = LocalRing(p, r + 1)
    m_up = ring_up.modulus
    part_up = adjoint_partition(2, ring_up)
    e12 = np.array([[0, 1], [0, 0]], dtype=np.int64)
    h = np.array([[1, 0], [0, -1]], dtype=np.int64)
    instances = 0
    failures = []
    for a in (e12, h, (e12 + h) % ring.modulus):
        b = shadow_preserving_lift(a, lat, ring)
        if b is None:
            failures.append({"check": "lift-exists", "a": np.asarray(a).tolist()})
            continue
        for t in (0, 1, p - 1):
            x = (b + ring.modulus * t * h) % m_up
            key = part_up.key_of(x)
            oid = int(part_up.orbit_id[key])
            stab_order = part_up.group_order // part_up.orbits[oid].size
            if stab_order > 20_000:
                continue
            # stabilizer of x = U Stab(root) U^{-1}, from ring-level Schreier closure
            root_gens = _stabilizer_generators(part_up, oid)
            u = part_up.transversal[key].astype(np.int64).reshape(2, 2)
            uinv = np.array([[u[1, 1], -u[0, 1]], [-u[1, 0], u[0, 0]]], dtype=np.int64) % m_up
            gens = [u @ g % m_up @ uinv % m_up for g in root_gens]
            stab = _ring_level_closure(gens, m_up)
            if len(stab) != stab_order:
                failures.append({"check": "stabilizer-order", "x": x.tolist(), "got": len(stab), "want": stab_order})
                continue
            kernel = {int(encode_mats(g[None], m_up)[0]) for g in stab if not ((g - np.eye(2, dtype=np.int64)) % p).any()}
            # p * centralizer of b in sl2(Z/p^(r+1))
            ad_b = lat.ad_matrix(b, ring_up)
            gens_mod, orders = kernel_module_mod_m(ad_b, ring_up)
            elems = {(0, 0, 0)}
            for g, o in zip(gens_mod, orders):
                elems = {
                    tuple(int(v) for v in (np.array(e) + t2 * g) % m_up)
                    for e in elems
                    for t2 in range(p**o)
                }
            # p * centralizer: distinct elements after the multiplication by p
            py_elems = sorted({tuple(int(v) for v in (p * np.array(e)) % m_up) for e in elems})
            images = set()
            for e in py_elems:
                y = lat.from_coords(np.array(e), m_up)
                img = matrix_exp_series(y, ring_up)
                images.add(int(encode_mats(img[None], m_up)[0]))
            instances += 1
            if len(images) != len(py_elems):
                failures.append({"check": "exp-injective", "x": x.tolist()})
            elif images != kernel:
                failures.append({"check": "exp-image", "x": x.tolist(), "image": len(images), "kernel": len(kernel)})
    return {"instances": instances, "failures": failures, "passed": not failures}


def _stabilizer_generators(part, oid: int) -> list[np.ndarray]:
    """Ring-level Schreier generators of the stabilizer of an orbit root."""
    from .orbits import batched_unimodular_inverse, decode_keys

    m = part.m
    n = part.lat.n
    out = []
    keys = np.nonzero(part.orbit_id == oid)[0]
    coords = part._decode(keys)
    U = part.transversal[keys].astype(np.int64).reshape(-1, n, n)
    for (g, _), A in zip(part._gens, part._ad_mats):
        tkeys = (coords @ A.T % m) @ part._powers
        Ut = part.transversal[tkeys].astype(np.int64).reshape(-1, n, n)
        Uti = batched_unimodular_inverse(Ut, m)
        sch = Uti @ g[None] % m @ U % m
        uniq = np.unique(encode_mats(sch, m))
        out.extend(decode_keys(uniq, m, n))
    return out


# ----------------------------------------------------------------------
# lift-correspondence verifiers (sl2 grids)


def verify_lift_theorems(p: int, r: int, targets=("thmA", "thmB", "thmD"), spot_stride: int = 500) -> dict:
    """Per-element verification of the lift-correspondence statements on sl2.

    For every element a of sl2(Z/p^r) admitting a shadow-preserving lift:
    (thmA) the number of orbits one level up meeting the fiber over a equals
    the coadjoint orbit count of the shadow of a; (thmB) the stabilizer
    signature multisets match on both sides; (thmD) the number of lifts with
    each shadow signature equals q^(d - d_S) * Lambda, and the table depends
    only on the shadow subgroup itself.
    """
    lat = lattice(2, "sl")
    ring = LocalRing(p, r)
    ring_up = LocalRing(p, r + 1)
    part = adjoint_partition(2, ring)
    part_up = adjoint_partition(2, ring_up)
    d = lat.d
    failures: list = []
    instances = 0
    no_lift = 0
    tables_by_shadow: dict[tuple, dict] = {}
    shadow_groups = 0
    for key in range(part.size):
        a = part.element_from_key(key)
        S_a = part.element_shadow(key)
        lifts = part_up.lift_keys_from(part, key)
        oids, counts = np.unique(part_up.orbit_id[lifts], return_counts=True)
        orders = [part_up.orbit_shadow(int(oid)).order for oid in oids]
        if S_a.order not in orders:
            no_lift += 1
            continue
        instances += 1
        if key % spot_stride == 0:
            # containment spot check: a lift's shadow sits inside shadow(a)
            sub = part_up.element_shadow(int(lifts[0]))
            if not S_a.contains_subgroup(sub):
                failures.append({"check": "containment", "a": a.tolist()})
        # the functionals live on the honest Lie shadow of a, which can be
        # strictly larger than span(S_a) cap sl at p = 3
        span = lie_shadow_matrices(a, lat, ring)
        census = coadjoint_census(S_a, span)
        witness = None
        if "thmA" in targets and len(oids) != census.orbit_count:
            witness = {"check": "thmA", "orbits_above": int(len(oids)), "coadjoint": census.orbit_count}
        sigs_above = tuple(sorted(part_up.orbit_signature(int(oid)) for oid in oids))
        if witness is None and "thmB" in targets and sigs_above != census.signature_multiset():
            witness = {"check": "thmB"}
        if witness is None and "thmD" in targets:
            direct: dict[tuple, int] = {}
            for oid, cnt in zip(oids, counts):
                sig = part_up.orbit_signature(int(oid))
                direct[sig] = direct.get(sig, 0) + int(cnt)
            dS = len(span)
            formula = {sig: p ** (d - dS) * lam for sig, lam in census.lambda_by_signature().items()}
            if direct != formula:
                witness = {"check": "thmD", "direct": _sig_table(direct), "formula": _sig_table(formula)}
            else:
                prev = tables_by_shadow.get(S_a.keys)
                if prev is None:
                    tables_by_shadow[S_a.keys] = direct
                    shadow_groups += 1
                elif prev != direct:
                    witness = {"check": "shadow-independence"}
        if witness is not None:
            witness["a"] = a.tolist()
            failures.append(witness)
            if len(failures) > 20:
                break
    return {
        "targets": list(targets),
        "algebra": "sl2",
        "p": p,
        "r": r,
        "elements": part.size,
        "instances": instances,
        "without_shadow_preserving_lift": no_lift,
        "distinct_shadow_subgroups": shadow_groups,
        "failures": failures,
        "passed": not failures,
    }


def _sig_table(table: dict) -> dict:
    return {str(list(k)): v for k, v in sorted(table.items())}


# ----------------------------------------------------------------------
# shadow lemmas


def _vec_basis_from_coords(lat: LieLattice, basis_coords, p: int):
    mats = [lat.from_coords(v, p) for v in basis_coords]
    return echelon_basis_mod_p([m.reshape(-1) for m in mats], p) if mats else []


def verify_shadow_lemmas(algebra: str, p: int, r: int, samples: int = 60, seed: int = 0) -> dict:
    """Additive-span lemma, strategy agreement, and label consistency.

    sl2 runs exhaustively over sl2(Z/p^r); sl3 samples level-1 and (r = 2)
    level-2 elements.  Every instance checks that the additive span of the
    group shadow intersected with sl equals the Lie shadow, and that the
    exact strategies agree wherever more than one applies.
    """
    failures: list = []
    instances = 0
    if algebra == "sl2":
        lat = lattice(2, "sl")
        ring = LocalRing(p, r)
        part = adjoint_partition(2, ring)
        for key in range(part.size):
            a = part.element_from_key(key)
            S_a = part.element_shadow(key)
            span = subgroup_span_sl_basis(S_a)
            span_keys = tuple(tuple(int(x) for x in b.reshape(-1)) for b in span)
            basis, _ = lie_shadow(a, lat, ring)
            lie_keys = tuple(tuple(int(x) for x in b) for b in _vec_basis_from_coords(lat, basis, p))
            instances += 1
            if span_keys != lie_keys:
                failures.append({"check": "additive-span", "a": a.tolist()})
            if r >= 2 and key % 97 == 0:
                rec, ok = group_shadow_recursive(a, lat, ring)
                if not ok or rec != S_a:
                    failures.append({"check": "recursive-strategy", "a": a.tolist()})
                if r == 2:
                    sol = group_shadow_solve_level2(a, lat, ring)
                    if sol != S_a:
                        failures.append({"check": "solve-strategy", "a": a.tolist()})
            if len(failures) > 10:
                break
    elif algebra == "sl3":
        lat = lattice(3, "sl")
        ring = LocalRing(p, r)
        rng = np.random.default_rng(seed)
        coords = rng.integers(0, ring.modulus, size=(samples, 8), dtype=np.int64)
        for c in coords:
            a = lat.from_coords(c, ring.modulus)
            if not (a % p).any():
                continue
            instances += 1
            if r == 1:
                S_a, _ = group_shadow(a, lat, ring)
            elif r == 2:
                S_a = group_shadow_solve_level2(a, lat, ring)
            else:
                raise InfeasibleError("sl3 shadow checks run at levels 1 and 2")
            span = subgroup_span_sl_basis(S_a)
            span_keys = tuple(tuple(int(x) for x in b.reshape(-1)) for b in span)
            basis, _ = lie_shadow(a, lat, ring)
            lie_keys = tuple(tuple(int(x) for x in b) for b in _vec_basis_from_coords(lat, basis, p))
            if span_keys != lie_keys:
                failures.append({"check": "additive-span", "a": a.tolist()})
            if r == 1:
                label = classify_shadow_sl3(a, p)
                if label != shadow_label(S_a, 3):
                    failures.append({"check": "label", "a": a.tolist(), "classified": label})
        # the zero element: its shadow is everything, its Lie shadow is sl3
        full_span = _full_group_span_dim(p)
        instances += 1
        if full_span != 8:
            failures.append({"check": "additive-span", "a": "zero", "span_dim": full_span})
    else:
        raise ValueError("algebra must be sl2 or sl3")
    return {
        "target": "shadows",
        "algebra": algebra,
        "p": p,
        "r": r,
        "instances": instances,
        "failures": failures,
        "passed": not failures,
    }


def _full_group_span_dim(p: int) -> int:
    """dim of span(SL_3(F_p)) intersect sl3, from a deterministic generator sample."""
    from .groups import elementary_generators

    ring = LocalRing(p, 1)
    gens = [g for g, _ in elementary_generators(3, ring)]
    words = [np.eye(3, dtype=np.int64)]
    cur = np.eye(3, dtype=np.int64)
    for k in range(60):
        cur = cur @ gens[k % len(gens)] % p
        words.append(cur.copy())
        cur = gens[(k + 3) % len(gens)] @ cur % p
        words.append(cur.copy())
    sub_like = np.stack(words)
    vecs = sub_like.reshape(len(sub_like), 9)
    basis = echelon_basis_mod_p(vecs, p)
    traces = [int(v.reshape(3, 3).trace()) % p for v in basis]
    dim = len(basis)
    if any(traces):
        dim -= 1
    return dim
