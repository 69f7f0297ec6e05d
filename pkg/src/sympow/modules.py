"""Decomposition of kG-modules into indecomposables.

The engine has three layers:

* hom spaces and endomorphism splits (`hom_basis`, `fitting_decompose`).
  Trivial direct summands are peeled deterministically through the pairing of
  fixed vectors against invariant functionals.  After that a random
  endomorphism phi is tried two ways: its stable power splits M into
  kernel and image (Fitting), and failing that the coprime factors of its
  minimal polynomial split M into primary components, which also handles
  invertible phi.  Indecomposability is declared after K consecutive failed
  draws, or certified exactly by an exhaustive idempotent scan when the
  endomorphism ring is small enough to enumerate.

* a bulk free-summand peel inside `decompose`: stacks of G-orbits of random
  vectors span free submodules, which are injective over a group algebra and
  therefore split off with complement isomorphic to the quotient.  For
  p-groups the peel is exact in one round: the trace operator's rank equals
  the free rank, and orbits of its pivot preimages are guaranteed to span a
  maximal free summand.  This is what makes degree-thousands modules
  tractable; the Fitting engine then only sees the small non-free remainder.

* the registry: canonical representatives of indecomposable classes, matched
  through `is_iso` behind a fingerprint prefilter (dimension, Brauer
  character, Jordan partitions of the Sylow generators, End dimension).
  DecompVectors are plain {id: multiplicity} dicts over registry ids.

Randomness is seed-threaded: every random choice derives from the caller's
seed and the module's content hash, so runs are bit-reproducible.
"""

from __future__ import annotations

import hashlib
import json
import math
import os

import numpy as np

from . import linalg as la
from .chars import BrauerChar, brauer_char
from .gf import (Field, make_field, poly_coprime_split, subfield_root,
                 embed_scalar)
from .groups import GroupData, ModuleRep, close_group, regular_rep, Representation

FITTING_K = 40
END_SCAN_SPACE = 2**16
ISO_SPAN_SPACE = 2**20


def child_seed(seed: int, *parts) -> int:
    h = hashlib.sha256()
    h.update(str(int(seed)).encode())
    for p in parts:
        h.update(b"|")
        h.update(p if isinstance(p, bytes) else str(p).encode())
    return int.from_bytes(h.digest()[:8], "big")


def child_rng(seed: int, *parts) -> np.random.Generator:
    return np.random.default_rng(child_seed(seed, *parts))


# -- hom spaces ---------------------------------------------------------------


def hom_basis(M: ModuleRep, N: ModuleRep) -> list[np.ndarray]:
    """Deterministic basis of Hom_kG(M, N) as dim(N) x dim(M) matrices.

    Solves phi @ rho_M(g) = rho_N(g) @ phi over the generators; the Kronecker
    assembly below only ever multiplies field entries by 0/1, so it is valid
    over any coefficient field.
    """
    if M.group is not N.group:
        raise ValueError("hom_basis needs modules over the same group")
    F = M.field
    dm, dn = M.dim, N.dim
    if not M.mats:
        blocks = [la.zeros(0, dn * dm)]
    else:
        blocks = []
        for A, B in zip(M.mats, N.mats):
            S = F.vec_sub(np.kron(la.identity(dn), A.T), np.kron(B, la.identity(dm)))
            blocks.append(S)
    K = la.kernel_basis(F, np.vstack(blocks))
    return [K[:, j].reshape(dn, dm) for j in range(K.shape[1])]


def direct_sum(M: ModuleRep, N: ModuleRep) -> ModuleRep:
    if M.group is not N.group:
        raise ValueError("direct_sum needs modules over the same group")
    mats = [la.block_diag([a, b]) for a, b in zip(M.mats, N.mats)]
    return ModuleRep(M.group, mats, dim=M.dim + N.dim)


# -- canonical sub/quotient constructions ------------------------------------


def _colspace_canonical(F: Field, C: np.ndarray):
    """Canonical basis of the column space: (basis dim x r, pivot row list)."""
    R, rk, piv = la.rref(F, C.T)
    return R[:rk].T.copy(), list(piv)


def submodule(M: ModuleRep, C: np.ndarray, verify: bool = True) -> ModuleRep:
    """The G-invariant column space of C as a module in a canonical basis.

    The canonical basis has identity rows at its pivot coordinates, so
    coordinates of any vector in the space are just its entries there.
    """
    F = M.field
    B, piv = _colspace_canonical(F, C)
    mats = []
    for A in M.mats:
        AB = la.mat_mul(F, A, B)
        X = AB[piv, :]
        if verify and not np.array_equal(la.mat_mul(F, B, X), AB):
            raise ValueError("column space is not invariant under the action")
        mats.append(X)
    return ModuleRep(M.group, mats, dim=B.shape[1])


def quotient_module(M: ModuleRep, C: np.ndarray) -> ModuleRep:
    """M modulo the G-invariant column space of C, on the free coordinates."""
    F = M.field
    R, rk, piv = la.rref(F, C.T)
    free = [c for c in range(M.dim) if c not in set(piv)]
    mats = []
    for A in M.mats:
        red = la.reduce_mod_rowspace(F, R[:rk], piv, A[:, free])
        mats.append(red[free, :])
    return ModuleRep(M.group, mats, dim=len(free))


# -- Fitting decomposition ----------------------------------------------------


def _span_element(F: Field, basis: list[np.ndarray], coeffs: np.ndarray) -> np.ndarray:
    out = la.zeros(*basis[0].shape)
    for c, E in zip(coeffs, basis):
        if c:
            out = F.vec_add(out, F.vec_mul(E, np.int64(int(c))))
    return out


def _fitting_power(F: Field, phi: np.ndarray) -> np.ndarray:
    """phi^(2^ceil(log2 dim)): stable kernel/image splitting power."""
    n = phi.shape[0]
    steps = max(1, math.ceil(math.log2(n))) if n > 1 else 1
    psi = phi
    for _ in range(steps):
        psi = la.mat_mul(F, psi, psi)
    return psi


def _ker_module(M: ModuleRep, U: np.ndarray) -> ModuleRep | None:
    """ker(U) as a module in kernel-basis coordinates; None when U is injective.

    The kernel basis carries an identity block on its free rows, so images of
    basis vectors read off their own coordinates there.
    """
    F = M.field
    R, rk, piv = la.rref(F, U)
    if rk == M.dim:
        return None
    free = [c for c in range(M.dim) if c not in set(piv)]
    K = la.kernel_from_rref(F, R, rk, piv, M.dim)
    mats = [la.mat_mul(F, A, K)[free, :] for A in M.mats]
    return ModuleRep(M.group, mats, dim=len(free))


def _split_by(M: ModuleRep, psi: np.ndarray) -> tuple[ModuleRep, ModuleRep] | None:
    """ker(psi) + im(psi) split when both are proper; None otherwise."""
    ker_mod = _ker_module(M, psi)
    if ker_mod is None or ker_mod.dim == M.dim:
        return None
    im_mod = submodule(M, psi, verify=False)  # im of an endomorphism is invariant
    return ker_mod, im_mod


def _idempotent_scan(M: ModuleRep, basis: list[np.ndarray]):
    """Exhaustively search span(basis) for a nontrivial idempotent.

    Returns a splitting (ker, im) pair, or None meaning M is certified
    indecomposable (an artinian endomorphism ring without nontrivial
    idempotents is local).
    """
    F = M.field
    q, k, d = F.q, len(basis), M.dim
    I = la.identity(d)
    stack = np.stack(basis)
    chunk = 2048
    codes = np.arange(q, dtype=np.int64)
    total = q**k
    for start in range(0, total, chunk):
        idxs = np.arange(start, min(start + chunk, total))
        combo = la.zeros(len(idxs), d * d).reshape(len(idxs), d, d)
        rest = idxs.copy()
        for i in range(k):
            rest, ci = np.divmod(rest, q)
            coeff = codes[ci]
            if np.any(coeff):
                combo = F.vec_add(combo, F.vec_mul(coeff[:, None, None], stack[i][None]))
        sq = _batched_mm(F, combo, combo)
        good = np.all(sq == combo, axis=(1, 2))
        good &= np.any(combo != 0, axis=(1, 2))
        good &= np.any(combo != I[None], axis=(1, 2))
        hits = np.nonzero(good)[0]
        for h in hits:
            split = _split_by(M, combo[h])
            if split is not None:
                return split
    return None


def _batched_mm(F: Field, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Exact batched matrix product for stacks of small matrices."""
    if F.e == 1:
        assert (F.p - 1) ** 2 * X.shape[-1] < 2**53
        return np.mod(X.astype(np.float64) @ Y.astype(np.float64), F.p).astype(np.int64)
    lx, ly = F.split_layers(X), F.split_layers(Y)
    conv = np.zeros((2 * F.e - 1,) + np.broadcast_shapes(X.shape, Y.shape), dtype=np.int64)
    for i in range(F.e):
        for j in range(F.e):
            prod = np.mod(lx[i].astype(np.float64) @ ly[j].astype(np.float64), F.p)
            conv[i + j] += prod.astype(np.int64)
            conv[i + j] %= F.p
    return F._reduce_layers(conv)


def fitting_decompose(M: ModuleRep, seed: int) -> list[ModuleRep]:
    """Split M into indecomposable summands (Krull-Schmidt multiset)."""
    out: list[ModuleRep] = []
    stack = [M]
    while stack:
        mod = stack.pop()
        if mod.dim == 0:
            continue
        split = _try_split(mod, seed)
        if split is None:
            out.append(mod)
        else:
            stack.extend(split)
    return out


def _peel_trivial_pair(M: ModuleRep) -> tuple[ModuleRep, ModuleRep] | None:
    """Deterministic split (trivial line, invariant complement), if one exists.

    A trivial direct summand exists exactly when some fixed vector pairs
    nonzero with some invariant functional; the functional's kernel is then a
    complement.  Declares None otherwise.  This disposes of trivial isotypic
    blocks without ever touching the endomorphism ring, whose dimension grows
    quadratically in their multiplicity.
    """
    F, d = M.field, M.dim
    I = la.identity(d)
    diffs = [F.vec_sub(A, I) for A in M.mats] or [la.zeros(d, d)]
    fixed = la.kernel_basis(F, np.vstack(diffs))
    if fixed.shape[1] == 0:
        return None
    funcs = la.kernel_basis(F, np.vstack([D.T for D in diffs]))
    if funcs.shape[1] == 0:
        return None
    pairing = la.mat_mul(F, funcs.T.copy(), fixed)
    hits = np.argwhere(pairing != 0)
    if hits.size == 0:
        return None
    lam = funcs[:, hits[0][0]]
    triv = ModuleRep(M.group, [la.identity(1) for _ in M.mats], dim=1)
    comp = submodule(M, la.kernel_basis(F, lam[None, :]), verify=False)
    return triv, comp


def _primary_split(mod: ModuleRep, phi: np.ndarray, rng) -> tuple[ModuleRep, ModuleRep] | None:
    """Split along a coprime factorization of phi's minimal polynomial.

    Works whether or not phi is invertible; returns None when the minimal
    polynomial is a power of one irreducible (no split through this phi).
    """
    F = mod.field
    f = la.min_poly(F, phi)
    if len(f) <= 2:
        return None
    parts = poly_coprime_split(F, f, rng)
    if parts is None:
        return None
    u, v = parts
    ker_u = _ker_module(mod, la.mat_eval_poly(F, u, phi))
    ker_v = _ker_module(mod, la.mat_eval_poly(F, v, phi))
    assert ker_u is not None and ker_v is not None
    assert ker_u.dim + ker_v.dim == mod.dim, "primary components must fill the module"
    return ker_u, ker_v


def _try_split(mod: ModuleRep, seed: int):
    F = mod.field
    if mod.dim == 1:
        return None
    split = _peel_trivial_pair(mod)
    if split is not None:
        return split
    E = hom_basis(mod, mod)
    k = len(E)
    if k == 1:
        return None  # End = k, local
    if F.q**k <= END_SCAN_SPACE:
        return _idempotent_scan(mod, E)
    rng = child_rng(seed, mod.key(), "fitting")
    for _ in range(FITTING_K):
        coeffs = rng.integers(0, F.q, size=k)
        phi = _span_element(F, E, coeffs)
        psi = _fitting_power(F, phi)
        split = _split_by(mod, psi)
        if split is not None:
            return split
        split = _primary_split(mod, phi, rng)
        if split is not None:
            return split
    return None


# -- isomorphism testing -------------------------------------------------------


def _sylow_gen_indices(G: GroupData) -> list[int]:
    syl = G.sylow()
    sel: list[int] = []
    closure = {0}
    for i in syl:
        if i not in closure:
            sel.append(i)
            closure = set(G.subgroup_closure(sel))
    return sel


def iso_invariants(M: ModuleRep) -> bytes:
    """Serialized (dim, Brauer character, Sylow-generator Jordan partitions)."""
    parts = [str(M.dim)]
    ch = brauer_char(M)
    parts.append(ch.serialize())
    for i in _sylow_gen_indices(M.group):
        parts.append(str(la.unipotent_jordan(M.field, M.act(i))))
    return hashlib.sha256(";".join(parts).encode()).digest()


def _iso_trials(q: int) -> int:
    return 64 * max(1, math.ceil(8 / q))


def _iso_detail(M: ModuleRep, N: ModuleRep, scale: int = 1) -> tuple[bool, bool]:
    """(isomorphic, certain).  Uncertainty only in the probabilistic regime."""
    if M.group is not N.group:
        raise ValueError("is_iso needs modules over the same group")
    if M.dim != N.dim:
        return False, True
    if M.dim == 0:
        return True, True
    if np.array_equal(np.stack(M.mats) if M.mats else la.zeros(0, 0),
                      np.stack(N.mats) if N.mats else la.zeros(0, 0)):
        return True, True
    if iso_invariants(M) != iso_invariants(N):
        return False, True
    F = M.field
    H = hom_basis(M, N)
    k = len(H)
    if k == 0:
        return False, True
    rng = child_rng(0, M.key(), N.key(), "iso")
    for _ in range(_iso_trials(F.q) * scale):
        phi = _span_element(F, H, rng.integers(0, F.q, size=k))
        if la.rank(F, phi) == M.dim:
            return True, True
    if F.q**k <= ISO_SPAN_SPACE:
        for code in range(1, F.q**k):
            coeffs = []
            c = code
            for _ in range(k):
                c, r = divmod(c, F.q)
                coeffs.append(r)
            phi = _span_element(F, H, np.array(coeffs, dtype=np.int64))
            if la.rank(F, phi) == M.dim:
                return True, True
        return False, True
    return False, False


def is_iso(M: ModuleRep, N: ModuleRep) -> bool:
    return _iso_detail(M, N)[0]


# -- registry -------------------------------------------------------------------


class Registry:
    """Canonical indecomposable representatives with stable integer ids."""

    def __init__(self, group: GroupData):
        self.group = group
        self.entries: dict[int, ModuleRep] = {}
        self.fingerprints: dict[int, bytes] = {}
        self.by_fp: dict[bytes, list[int]] = {}
        self.uncertain: list[tuple[int, str]] = []  # (id it was matched to, note)
        self._regular_vec: dict[int, int] | None = None

    def fingerprint(self, M: ModuleRep) -> bytes:
        h = hashlib.sha256()
        h.update(iso_invariants(M))
        h.update(str(len(hom_basis(M, M))).encode())
        return h.digest()

    def match_or_insert(self, M: ModuleRep) -> int:
        fp = self.fingerprint(M)
        for mid in self.by_fp.get(fp, []):
            ok, certain = _iso_detail(self.entries[mid], M)
            if ok:
                return mid
            if not certain:
                ok, certain = _iso_detail(self.entries[mid], M, scale=4)
                if ok:
                    return mid
                if not certain:
                    self.uncertain.append((mid, "treated as new class after escalated trials"))
        mid = len(self.entries)
        self.entries[mid] = M
        self.fingerprints[mid] = fp
        self.by_fp.setdefault(fp, []).append(mid)
        return mid

    def regular_vec(self, seed: int = 0) -> dict[int, int]:
        """Decomposition vector of the regular module kG (cached)."""
        if self._regular_vec is None:
            parts = fitting_decompose(regular_rep(self.group), child_seed(seed, "regular"))
            vec: dict[int, int] = {}
            for part in parts:
                mid = self.match_or_insert(part)
                vec[mid] = vec.get(mid, 0) + 1
            self._regular_vec = vec
        return dict(self._regular_vec)

    def dim_of(self, vec: dict[int, int]) -> int:
        return sum(mult * self.entries[mid].dim for mid, mult in vec.items())


# -- decomposition vectors -------------------------------------------------------


def dvec_add(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
        if out[k] == 0:
            del out[k]
    return out


def dvec_scale(a: dict[int, int], c: int) -> dict[int, int]:
    return {k: v * c for k, v in a.items()} if c else {}


def dvec_sub(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    return dvec_add(a, dvec_scale(b, -1))


# -- the main decompose ----------------------------------------------------------


def _orbit_stack(M: ModuleRep, V: np.ndarray) -> np.ndarray:
    """Rows of all G-translates of the columns of V (|G|*t rows, dim cols)."""
    G, F = M.group, M.field
    order_list, parents, gens = G.left_words()
    W: list[np.ndarray | None] = [None] * G.order
    W[0] = V
    for idx in order_list:
        if idx == 0:
            continue
        W[idx] = la.mat_mul(F, M.mats[gens[idx]], W[parents[idx]])
    return np.vstack([w.T for w in W])  # type: ignore[union-attr]


def _peel_free(M: ModuleRep, rng: np.random.Generator):
    """Split off s free summands; returns (s, remainder module).

    p-group route: pivot preimages of the trace operator span a maximal free
    summand in one round (the trace rank IS the free rank there).  General
    route: exponential ramp of random vectors, keeping orbit stacks only while
    the rank grows by |G| per vector.
    """
    G, F, D = M.group, M.field, M.dim
    n = G.order
    if n == 1 or D < n:
        return 0, M
    if G.p_part == n:
        # trace-pivot route
        T = la.zeros(D, D)
        order_list, parents, gens = G.left_words()
        acts: list[np.ndarray | None] = [None] * n
        acts[0] = la.identity(D)
        for idx in order_list:
            if idx:
                acts[idx] = la.mat_mul(F, M.mats[gens[idx]], acts[parents[idx]])
            T = F.vec_add(T, acts[idx])
        _, rkT, pivT = la.rref(F, T)
        if rkT == 0:
            return 0, M
        V = la.identity(D)[:, pivT]
        S = np.vstack([a[:, pivT].T for a in acts])  # type: ignore[index]
        R, rk, piv = la.rref(F, S)
        assert rk == rkT * n, "free span must have full orbit rank"
        Q = _quotient_from_rowspace(M, R[:rk], piv)
        return rkT, Q
    # ramp route
    state_R = la.zeros(0, D)
    state_piv: list[int] = []
    r = 0
    s = 0
    t = 1
    fails = 0
    while fails < 3 and r + n <= D:
        t = max(1, min(t, (D - r) // n))
        V = la.rand_mat(F, rng, D, t)
        S = _orbit_stack(M, V)
        stacked = np.vstack([state_R, S]) if r else S
        R, rk, piv = la.rref(F, stacked)
        if rk - r == t * n:
            state_R, state_piv, r, s = R[:rk], list(piv), rk, s + t
            t *= 2
            fails = 0
        elif t > 1:
            t //= 2
        else:
            fails += 1
    if s == 0:
        return 0, M
    Q = _quotient_from_rowspace(M, state_R, state_piv)
    return s, Q


def _quotient_from_rowspace(M: ModuleRep, R: np.ndarray, piv: list[int]) -> ModuleRep:
    F = M.field
    free = [c for c in range(M.dim) if c not in set(piv)]
    mats = []
    for A in M.mats:
        red = la.reduce_mod_rowspace(F, R, piv, A[:, free])
        mats.append(red[free, :])
    return ModuleRep(M.group, mats, dim=len(free))


def decompose(M: ModuleRep, registry: Registry, seed: int) -> dict[int, int]:
    """DecompVector of M over the registry, minting ids for unseen classes."""
    if M.group is not registry.group:
        raise ValueError("decompose: registry belongs to a different group")
    vec: dict[int, int] = {}
    work = M
    if M.dim >= M.group.order and M.group.order > 1:
        rng = child_rng(seed, M.key(), "peel")
        s, work = _peel_free(M, rng)
        if s:
            vec = dvec_scale(registry.regular_vec(seed), s)
    for part in fitting_decompose(work, seed):
        mid = registry.match_or_insert(part)
        vec[mid] = vec.get(mid, 0) + 1
    assert registry.dim_of(vec) == M.dim, "decomposition must preserve dimension"
    return vec


# -- projective / free parts -----------------------------------------------------


def projective_part_dim(M: ModuleRep) -> int:
    """#G_p times the rank of the Sylow trace operator on M."""
    from .groups import trace_operator

    G = M.group
    syl = G.sylow()
    T = la.zeros(M.dim, M.dim)
    for h in syl:
        T = M.field.vec_add(T, M.act(h))
    return len(syl) * la.rank(M.field, T)


def is_projective_id(registry: Registry, mid: int) -> bool:
    entry = registry.entries[mid]
    return projective_part_dim(entry) == entry.dim


def split_projective(vec: dict[int, int], registry: Registry):
    """(projective part, the rest) of a DecompVector, classified per id."""
    P: dict[int, int] = {}
    Pp: dict[int, int] = {}
    for mid, mult in vec.items():
        (P if is_projective_id(registry, mid) else Pp)[mid] = mult
    return P, Pp


def free_rank(vec: dict[int, int], registry: Registry, seed: int = 0) -> int:
    """Multiplicity of kG inside vec: max r with r*[kG] <= vec componentwise."""
    kg = registry.regular_vec(seed)
    return min((vec.get(mid, 0) // mult for mid, mult in kg.items()), default=0)


def nonfree(vec: dict[int, int], registry: Registry, seed: int = 0) -> dict[int, int]:
    r = free_rank(vec, registry, seed)
    return dvec_sub(vec, dvec_scale(registry.regular_vec(seed), r))


# -- scalar extension --------------------------------------------------------------


_EXT_GROUPS: dict[tuple[bytes, int], GroupData] = {}


def extend_scalars(M: ModuleRep, s: int) -> ModuleRep:
    """The same module viewed over GF(q^s) via the canonical embedding."""
    if s < 1:
        raise ValueError("extension degree must be >= 1")
    if s == 1:
        return M
    F = M.field
    big = make_field(F.p, F.e * s)
    root = subfield_root(big, F)
    table = np.array([embed_scalar(big, F, root, a) for a in range(F.q)], dtype=np.int64)
    key = (_group_key(M.group), s)
    if key not in _EXT_GROUPS:
        rep = Representation(big, tuple(table[g] for g in M.group.gens))
        _EXT_GROUPS[key] = close_group(rep)
    G2 = _EXT_GROUPS[key]
    return ModuleRep(G2, [table[m] for m in M.mats], dim=M.dim)


def _group_key(G: GroupData) -> bytes:
    h = hashlib.sha256()
    h.update(f"{G.field.p},{G.field.e},{G.dim};".encode())
    for g in G.gens:
        h.update(g.tobytes())
    return h.digest()


# -- registry persistence -----------------------------------------------------------


def save_registry(registry: Registry, path: str) -> None:
    os.makedirs(path, exist_ok=True)
    index = {}
    for mid, mod in registry.entries.items():
        lines = [f"# fingerprint {registry.fingerprints[mid].hex()}", f"# gens {len(mod.mats)} dim {mod.dim}"]
        for A in mod.mats:
            lines.append(la.mat_to_text(mod.field, A).rstrip("\n"))
        with open(os.path.join(path, f"{mid}.mod"), "w") as fh:
            fh.write("\n".join(lines) + "\n")
        index[registry.fingerprints[mid].hex()] = sorted(
            set(index.get(registry.fingerprints[mid].hex(), [])) | {mid}
        )
    with open(os.path.join(path, "index.json"), "w") as fh:
        json.dump(index, fh, sort_keys=True, indent=0)
        fh.write("\n")


def load_registry(path: str, group: GroupData) -> Registry:
    reg = Registry(group)
    index_path = os.path.join(path, "index.json")
    if not os.path.exists(index_path):
        return reg
    with open(index_path) as fh:
        index = json.load(fh)
    ids: list[tuple[int, bytes]] = []
    for fp_hex, mids in index.items():
        for mid in mids:
            ids.append((mid, bytes.fromhex(fp_hex)))
    F = group.field
    for mid, fp in sorted(ids):
        with open(os.path.join(path, f"{mid}.mod")) as fh:
            lines = fh.read().splitlines()
        header = lines[1].split()
        ngens, dim = int(header[2]), int(header[4])
        mats = []
        cursor = 2
        for _ in range(ngens):
            rows = int(lines[cursor].split()[0])
            block = "\n".join(lines[cursor:cursor + rows + 1])
            mats.append(la.mat_from_text(F, block))
            cursor += rows + 1
        mod = ModuleRep(group, mats, dim=dim)
        reg.entries[mid] = mod
        reg.fingerprints[mid] = fp
        reg.by_fp.setdefault(fp, []).append(mid)
    return reg
