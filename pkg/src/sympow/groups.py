"""Finite matrix groups over GF(p^e) and the representation constructors.

A group is closed by breadth-first products from its generators; the element
list is canonical (identity first, each BFS level sorted by serialized matrix
bytes), so element indices are stable across runs and safe to persist.  Every
element carries a word (parent index, generator index) which lets any module
action evaluate group elements with one product per element.

`ModuleRep` is the carrier for all downstream work: a kG-module given by the
action matrices of the group generators on a chosen basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gf import CapacityError, Field
from . import linalg as la

GROUP_CAP = 10_000
SYM_DIM_CAP = 50_000


def _mat_key(A: np.ndarray) -> bytes:
    return A.astype(np.int64).tobytes()


@dataclass(frozen=True)
class Representation:
    """A linear action on coordinates z_0..z_(dim-1): invertible generator mats."""

    field: Field
    gens: tuple[np.ndarray, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        names = self.names or tuple(f"g{i}" for i in range(len(self.gens)))
        object.__setattr__(self, "names", names)
        for A in self.gens:
            if A.ndim != 2 or A.shape[0] != A.shape[1]:
                raise ValueError("generators must be square matrices")
            if A.shape != self.gens[0].shape:
                raise ValueError("generators must share a dimension")

    @property
    def dim(self) -> int:
        return self.gens[0].shape[0] if self.gens else 1


class GroupData:
    """Closed element list with words, orders, Sylow subgroup, classes."""

    def __init__(self, field: Field, dim: int, gens: list[np.ndarray]):
        self.field = field
        self.dim = dim
        self.gens = [g.astype(np.int64) for g in gens]
        self.elements: list[np.ndarray] = []
        self.index: dict[bytes, int] = {}
        self.words: list[tuple[int, int]] = []  # (parent element, generator position)
        self._mult: dict[tuple[int, int], int] = {}
        self._orders: list[int] | None = None
        self._sylow: tuple[int, ...] | None = None
        self._conj_classes: list[tuple[int, ...]] | None = None
        self._left: tuple[list[int], np.ndarray, np.ndarray] | None = None

    # -- enumeration -----------------------------------------------------

    def _close(self, cap: int):
        F = self.field
        I = la.identity(self.dim)
        self.elements = [I]
        self.index = {_mat_key(I): 0}
        self.words = [(-1, -1)]
        frontier = [0]
        while frontier:
            discovered: list[tuple[bytes, np.ndarray, int, int]] = []
            seen_here: set[bytes] = set()
            for xi in frontier:
                X = self.elements[xi]
                for gi, G in enumerate(self.gens):
                    Y = la.mat_mul(F, X, G)
                    k = _mat_key(Y)
                    if k not in self.index and k not in seen_here:
                        seen_here.add(k)
                        discovered.append((k, Y, xi, gi))
            discovered.sort(key=lambda t: t[0])
            frontier = []
            for k, Y, xi, gi in discovered:
                idx = len(self.elements)
                if idx >= cap:
                    raise CapacityError(f"group order exceeds cap {cap}")
                self.index[k] = idx
                self.elements.append(Y)
                self.words.append((xi, gi))
                frontier.append(idx)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def p_part(self) -> int:
        n, p = self.order, self.field.p
        out = 1
        while n % p == 0:
            out *= p
            n //= p
        return out

    # -- index arithmetic --------------------------------------------------

    def mult(self, i: int, j: int) -> int:
        key = (i, j)
        if key not in self._mult:
            Y = la.mat_mul(self.field, self.elements[i], self.elements[j])
            self._mult[key] = self.index[_mat_key(Y)]
        return self._mult[key]

    def element_order(self, i: int) -> int:
        return self.element_orders[i]

    @property
    def element_orders(self) -> list[int]:
        if self._orders is None:
            out = []
            for i in range(self.order):
                k, x = 1, i
                while x != 0:
                    x = self.mult(x, i)
                    k += 1
                out.append(k)
            self._orders = out
        return self._orders

    def inv(self, i: int) -> int:
        x, n = i, self.element_order(i)
        return self.power(i, n - 1)

    def power(self, i: int, k: int) -> int:
        out, x = 0, i
        while k:
            if k & 1:
                out = self.mult(out, x)
            x = self.mult(x, x)
            k >>= 1
        return out

    def left_words(self) -> tuple[list[int], np.ndarray, np.ndarray]:
        """Left-multiplication BFS words: (visit order, parents, generator pos).

        Every nonidentity element y factors as gen * x with x visited earlier,
        so a full orbit {rho(g) v} costs one matrix-vector product per element.
        """
        if self._left is None:
            gidx = [self.index[_mat_key(g)] for g in self.gens]
            parents = np.full(self.order, -1, dtype=np.int64)
            genpos = np.full(self.order, -1, dtype=np.int64)
            visit = [0]
            seen = {0}
            frontier = [0]
            while frontier:
                nxt = []
                for x in frontier:
                    for pos, g in enumerate(gidx):
                        y = self.mult(g, x)
                        if y not in seen:
                            seen.add(y)
                            parents[y] = x
                            genpos[y] = pos
                            visit.append(y)
                            nxt.append(y)
                frontier = nxt
            self._left = (visit, parents, genpos)
        return self._left

    def subgroup_closure(self, idxs) -> tuple[int, ...]:
        seen = {0}
        frontier = [0]
        gens = sorted(set(idxs))
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mult(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return tuple(sorted(seen))

    # -- structure ---------------------------------------------------------

    def sylow(self) -> tuple[int, ...]:
        """Index set of a Sylow p-subgroup, p = field characteristic.

        Greedy closure over p-power-order elements in canonical order; each
        candidate is kept only if the closure stays a p-group.  Correctness is
        certified by the order count reaching p_part, not by conjugacy theory.
        """
        if self._sylow is not None:
            return self._sylow
        p, target = self.field.p, self.p_part
        current: tuple[int, ...] = (0,)
        grew = True
        while len(current) < target and grew:
            grew = False
            cur_set = set(current)
            for i in range(1, self.order):
                if i in cur_set or not _is_p_power(self.element_order(i), p):
                    continue
                cand = self.subgroup_closure(set(current) | {i})
                if _is_p_power(len(cand), p):
                    current = cand
                    cur_set = set(current)
                    grew = True
                    if len(current) == target:
                        break
        if len(current) != target:
            raise AssertionError(f"sylow search stopped at {len(current)} < {target}")
        self._sylow = current
        return current

    def conj_classes(self) -> list[tuple[int, ...]]:
        if self._conj_classes is None:
            seen: set[int] = set()
            classes = []
            for i in range(self.order):
                if i in seen:
                    continue
                orbit = set()
                for h in range(self.order):
                    orbit.add(self.mult(self.mult(h, i), self.inv(h)))
                seen |= orbit
                classes.append(tuple(sorted(orbit)))
            self._conj_classes = classes
        return self._conj_classes

    def p_regular_class_reps(self) -> list[int]:
        """Least-index representatives of the p-regular conjugacy classes."""
        p = self.field.p
        return [cls[0] for cls in self.conj_classes() if self.element_order(cls[0]) % p != 0]


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def close_group(rep: Representation, cap: int = GROUP_CAP) -> GroupData:
    F = rep.field
    for A in rep.gens:
        if la.rank(F, A) != A.shape[0]:
            raise ValueError("generator is not invertible")
    G = GroupData(F, rep.dim, list(rep.gens))
    G._close(cap)
    return G


class ModuleRep:
    """A kG-module: action matrices of the group generators on a basis.

    Convention is column-image: mats[g][i, j] is the z_i coefficient of the
    image of basis vector z_j.  Element actions are evaluated through the
    group's BFS words and memoized.
    """

    def __init__(self, group: GroupData, mats: list[np.ndarray], dim: int | None = None):
        if len(mats) != len(group.gens):
            raise ValueError("one action matrix per group generator required")
        self.group = group
        self.field = group.field
        self.mats = [m.astype(np.int64) for m in mats]
        if self.mats:
            self.dim = self.mats[0].shape[0]
        elif dim is not None:
            self.dim = dim
        else:
            raise ValueError("dim is required when there are no generators")
        for m in self.mats:
            if m.shape != (self.dim, self.dim):
                raise ValueError("action matrices must be square of equal size")
        self._acts: dict[int, np.ndarray] = {}

    def act(self, i: int) -> np.ndarray:
        """Action matrix of group element i."""
        if i not in self._acts:
            if i == 0:
                self._acts[0] = la.identity(self.dim)
            else:
                parent, gi = self.group.words[i]
                self._acts[i] = la.mat_mul(self.field, self.act(parent), self.mats[gi])
        return self._acts[i]

    def key(self) -> bytes:
        import hashlib

        h = hashlib.sha256()
        h.update(f"{self.field.p},{self.field.e},{self.dim},{len(self.mats)};".encode())
        for m in self.mats:
            h.update(m.tobytes())
        return h.digest()


# -- symmetric powers -------------------------------------------------------


def monomials(nvars: int, n: int) -> list[tuple[int, ...]]:
    """Degree-n exponent tuples in graded-lex order with z_0 > z_1 > ..."""
    if nvars == 1:
        return [(n,)]
    out = []
    for a0 in range(n, -1, -1):
        for rest in monomials(nvars - 1, n - a0):
            out.append((a0,) + rest)
    return out


_SYM_TOWERS: dict[tuple, dict[int, np.ndarray]] = {}


def sym_matrix(F: Field, A: np.ndarray, n: int) -> np.ndarray:
    """Matrix of Sym^n(A) on the graded-lex monomial basis.

    Towers are memoized per (field, generator), so repeated requests resume
    from the highest degree already built instead of restarting at zero.
    """
    key = (F.p, F.e, A.shape[0], A.tobytes())
    tower = _SYM_TOWERS.setdefault(key, {})
    if n in tower:
        return tower[n]
    below = [k for k in tower if k < n]
    start = (max(below), tower[max(below)]) if below else None
    for k, S in sym_matrix_stream(F, A, n, start=start):
        tower.setdefault(k, S)
    return tower[n]


def sym_matrix_stream(F: Field, A: np.ndarray, n: int, start=None):
    """Yield (k, Sym^k(A)) for k = 0..n, holding one degree at a time.

    Degree k columns are built from degree k-1: the column of a monomial is
    the column of the monomial with its leading variable peeled, multiplied by
    that variable's image.  Peeling the first positive exponent makes the
    recursion consistent, and grouping columns by peel variable vectorizes it.

    start, when given, is a pair (k0, Sym^k0(A)) to resume from; yields then
    begin at degree k0.
    """
    d1 = A.shape[0]
    if math.comb(n + d1 - 1, d1 - 1) > SYM_DIM_CAP:
        raise CapacityError(f"sym dimension exceeds cap {SYM_DIM_CAP}")
    if start is None:
        k0, prev = 0, la.identity(1)
    else:
        k0, prev = start[0], start[1].astype(np.int64)
    yield k0, prev
    mons_prev = monomials(d1, k0)
    for k in range(k0 + 1, n + 1):
        mons_k = monomials(d1, k)
        idx_k = {m: i for i, m in enumerate(mons_k)}
        Dk, Dp = len(mons_k), len(mons_prev)
        # row maps: where multiplication by z_i sends each degree-(k-1) monomial
        shift = [np.array([idx_k[m[:i] + (m[i] + 1,) + m[i + 1:]] for m in mons_prev]) for i in range(d1)]
        cur = la.zeros(Dk, Dk)
        # group target monomials by first variable with positive exponent
        by_peel: dict[int, list[int]] = {}
        for ci, mon in enumerate(mons_k):
            j = next(i for i in range(d1) if mon[i] > 0)
            by_peel.setdefault(j, []).append(ci)
        idx_prev = {m: i for i, m in enumerate(mons_prev)}
        for j, cols in by_peel.items():
            beta_idx = [
                idx_prev[mons_k[ci][:j] + (mons_k[ci][j] - 1,) + mons_k[ci][j + 1:]] for ci in cols
            ]
            block = prev[:, beta_idx]
            cols_arr = np.array(cols)
            for i in range(d1):
                a = int(A[i, j])
                if a == 0:
                    continue
                tgt = np.ix_(shift[i], cols_arr)
                cur[tgt] = F.vec_addmul(cur[tgt], np.int64(a), block)
        yield k, cur
        prev, mons_prev = cur, mons_k


def sym_power(rep: Representation, group: GroupData, n: int) -> ModuleRep:
    """The degree-n graded piece H^0(P^d, O(n)) as a module over `group`."""
    if n < 0:
        raise ValueError("sym_power needs n >= 0")
    d1 = rep.dim
    if math.comb(n + d1 - 1, d1 - 1) > SYM_DIM_CAP:
        raise CapacityError(f"sym dimension exceeds cap {SYM_DIM_CAP}")
    return ModuleRep(group, [sym_matrix(rep.field, A, n) for A in rep.gens])


def sym_power_stream(rep: Representation, group: GroupData, n_max: int):
    """Yield (k, Sym^k as ModuleRep) for k = 0..n_max without keeping a tower."""
    streams = [sym_matrix_stream(rep.field, A, n_max) for A in rep.gens]
    if not streams:
        for k in range(n_max + 1):
            yield k, ModuleRep(group, [], dim=math.comb(k + rep.dim - 1, rep.dim - 1))
        return
    for parts in zip(*streams):
        k = parts[0][0]
        yield k, ModuleRep(group, [S for _, S in parts])


# -- derived modules ---------------------------------------------------------


def trace_operator(M: ModuleRep, H) -> np.ndarray:
    """Sum of the action matrices over a subgroup's index set."""
    H = tuple(sorted(set(H)))
    Hset = set(H)
    for a in H:
        for b in H:
            if M.group.mult(a, b) not in Hset:
                raise ValueError("trace_operator: index set is not closed under product")
    out = la.zeros(M.dim, M.dim)
    for h in H:
        out = M.field.vec_add(out, M.act(h))
    return out


def regular_rep(G: GroupData) -> ModuleRep:
    mats = []
    for gi in range(len(G.gens)):
        g = G.index[_mat_key(G.gens[gi])]
        P = la.zeros(G.order, G.order)
        for h in range(G.order):
            P[G.mult(g, h), h] = 1
        mats.append(P)
    return ModuleRep(G, mats)


def restrict(M: ModuleRep, H) -> ModuleRep:
    """M as a module over the subgroup with index set H (re-closed canonically)."""
    H = sorted(set(H))
    sel: list[int] = []
    closure = {0}
    for i in H:
        if i not in closure:
            sel.append(i)
            closure = set(M.group.subgroup_closure(sel))
    if set(H) != closure:
        raise ValueError("restrict: index set is not a subgroup")
    sub = GroupData(M.field, M.group.dim, [M.group.elements[i] for i in sel])
    sub._close(GROUP_CAP)
    return ModuleRep(sub, [M.act(i) for i in sel], dim=M.dim)


def dual(M: ModuleRep) -> ModuleRep:
    return ModuleRep(M.group, [la.inv(M.field, A).T.copy() for A in M.mats])
