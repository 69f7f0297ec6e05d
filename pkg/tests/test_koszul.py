"""Koszul complex construction, exactness, and splitting checks.

The C2-on-the-plane fixture over GF(4) is small enough that each complex
builds in milliseconds, yet its cokernel and stage behavior are the real
thing.  Structured evaluation paths (scatter plans, derived quotient
classes) are differentially tested against dense products and against the
direct short-exact-sequence route so the fast paths cannot drift.
"""

import math

import numpy as np
import pytest

from sympow import linalg as la
from sympow.gf import make_field
from sympow.groups import (ModuleRep, Representation, close_group, monomials,
                           sym_power)
from sympow.koszul import (_tau_apply_left, build_complex, check_exact,
                           check_split_stagewise, choose_forms, euler_identity,
                           form_product, is_invariant_form, mul_form_matrix,
                           ses_split_check, surface_progression_check)
from sympow.modules import Registry, decompose, direct_sum

SEED = 11


def plane_fixture():
    F = make_field(2, 2)
    rep = Representation(F, (np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]], dtype=np.int64),))
    G = close_group(rep)
    forms, m = choose_forms(G, 2, SEED)
    return rep, G, forms, m


@pytest.fixture(scope="module")
def plane():
    return plane_fixture()


def test_trivial_group_line_complex():
    F = make_field(3)
    G = close_group(Representation(F, (np.eye(2, dtype=np.int64),)))
    forms, m = choose_forms(G, 1, seed=4)
    assert m == 1 and len(forms) == 1 and forms[0].shape == (2,)
    for t in (1, 2, 5):
        K = build_complex(G, forms, t=t, j=0)
        assert [T.dim for T in K.terms] == [t + 1, t]
        rep = check_exact(K)
        assert rep["exact"] and rep["coker_dim"] == 1 and rep["coker_matches"]


def test_term_dims_follow_binomials(plane):
    _, G, forms, m = plane
    K = build_complex(G, forms, t=3, j=1)
    expect = [math.comb(m * (3 - r) + 1 + 2, 2) * math.comb(2, r) for r in range(3)]
    assert [T.dim for T in K.terms] == expect


def test_build_rejects_bad_levels(plane):
    _, G, forms, m = plane
    with pytest.raises(ValueError):
        build_complex(G, forms, t=0, j=0)
    with pytest.raises(ValueError):
        build_complex(G, forms, t=2, j=m)


def test_norm_forms_are_invariant_and_generic_forms_are_not(plane):
    _, G, forms, m = plane
    for N in forms:
        assert is_invariant_form(G, N, m)
    y_sq = np.zeros(len(monomials(3, m)), dtype=np.int64)
    y_sq[monomials(3, m).index((0, 2, 0))] = 1
    assert not is_invariant_form(G, y_sq, m)


def test_form_product_expands_linear_factors():
    F = make_field(3)
    prod = form_product(F, [np.array([1, 1], dtype=np.int64),
                            np.array([1, 2], dtype=np.int64)])
    # (x + y)(x + 2y) = x^2 + 2y^2 over GF(3)
    assert prod.tolist() == [1, 0, 2]


def _poly_mul(F, a: dict, b: dict) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            key = tuple(x + y for x, y in zip(ma, mb))
            out[key] = F.add(out.get(key, 0), F.mul(ca, cb))
    return {k: v for k, v in out.items() if v}


def test_mul_form_matrix_matches_dict_oracle():
    F = make_field(2, 2)
    rng = np.random.default_rng(9)
    form = rng.integers(0, 4, size=len(monomials(3, 2)), dtype=np.int64)
    form[0] = 1
    M = mul_form_matrix(F, form, 2, 2, 3)
    fdict = {m: int(c) for m, c in zip(monomials(3, 2), form) if c}
    dst_index = {m: i for i, m in enumerate(monomials(3, 4))}
    for col, mono in enumerate(monomials(3, 2)):
        prod = _poly_mul(F, fdict, {mono: 1})
        expect = np.zeros(M.shape[0], dtype=np.int64)
        for m, c in prod.items():
            expect[dst_index[m]] = c
        assert np.array_equal(M[:, col], expect)


def test_tau_scatter_matches_dense_product(plane):
    _, G, forms, _ = plane
    K = build_complex(G, forms, t=3, j=0)
    rng = np.random.default_rng(2)
    for r in range(len(K.maps)):
        X = la.rand_mat(G.field, rng, K.maps[r].shape[1], 5)
        assert np.array_equal(_tau_apply_left(K, r, X),
                              la.mat_mul(G.field, K.maps[r], X))


def test_complex_identities_hold_densely(plane):
    _, G, forms, _ = plane
    K = build_complex(G, forms, t=3, j=1)
    F = G.field
    for r in range(len(K.maps) - 1):
        comp = la.mat_mul(F, K.maps[r], K.maps[r + 1])
        assert not np.any(comp)
    for r in range(len(K.maps)):
        src, dst = K.terms[r + 1], K.terms[r]
        for gi in range(len(G.gens)):
            left = la.mat_mul(F, K.maps[r], src.mats[gi])
            right = la.mat_mul(F, dst.mats[gi], K.maps[r])
            assert np.array_equal(left, right)


def test_exactness_across_levels(plane):
    _, G, forms, m = plane
    for t in (2, 3, 4):
        for j in (0, 1):
            rep = check_exact(build_complex(G, forms, t=t, j=j))
            assert rep["exact"], (t, j)
            assert rep["coker_dim"] == m ** 2 and rep["coker_matches"]


def test_repeated_form_breaks_exactness(plane):
    _, G, forms, _ = plane
    K = build_complex(G, [forms[0], forms[0]], t=2, j=0)
    rep = check_exact(K)
    assert not rep["exact"] and 1 in rep["inexact_at"]


def test_stagewise_matches_direct_ses_route(plane):
    _, G, forms, _ = plane
    reg = Registry(G)
    K = build_complex(G, forms, t=3, j=0)
    out = check_split_stagewise(K, reg, seed=SEED)
    assert out["all_split"] and out["coker_free"]
    assert out["coker_free_rank"] * G.order == 4
    F = G.field
    for stage in out["stages"]:
        r = stage["r"]
        Rr, rk, piv = K.map_rref(r - 1)
        Kb = la.kernel_from_rref(F, Rr, rk, piv, K.maps[r - 1].shape[1])
        assert ses_split_check(K.terms[r], Kb, reg, seed=SEED) == stage["split"]


def test_stagewise_accepts_precomputed_sym_vectors(plane):
    rep, G, forms, m = plane
    reg = Registry(G)
    degs = {m * (3 - r) + 1 for r in range(3)}
    sv = {k: decompose(sym_power(rep, G, k), reg, SEED) for k in degs}
    K = build_complex(G, forms, t=3, j=1)
    out = check_split_stagewise(K, reg, seed=SEED, sym_vectors=sv)
    assert out["all_split"] and out["coker_free"]


def jordan_module(G, size):
    J = np.eye(size, dtype=np.int64)
    J[np.arange(size - 1), np.arange(1, size)] = 1
    return ModuleRep(G, [J], dim=size)


def test_ses_split_check_soundness():
    """Direct-sum embeddings split; Jordan-block filtrations never do."""
    F = make_field(5)
    G = close_group(Representation(F, (np.array([[1, 1], [0, 1]], dtype=np.int64),)))
    reg = Registry(G)
    rng = np.random.default_rng(13)
    cases = 0
    for a in (1, 2, 3):
        for b in (2, 4):
            Mb = jordan_module(G, b)
            if a < b:
                # (sigma - 1)^(b-a) maps J_b onto its unique submodule J_a
                N = (Mb.mats[0] - np.eye(b, dtype=np.int64)) % 5
                P = N.copy()
                for _ in range(b - a - 1):
                    P = la.mat_mul(F, P, N)
                cols = P[:, la.rref(F, P)[2]]
                assert cols.shape[1] == a
                assert not ses_split_check(Mb, cols, reg, seed=1)
                cases += 1
            D = direct_sum(jordan_module(G, a), Mb)
            U = la.rand_invertible(F, rng, a + b)
            mats = [la.mat_mul(F, la.mat_mul(F, U, D.mats[0]), la.inv(F, U))]
            C = ModuleRep(G, mats, dim=a + b)
            sub_cols = la.mat_mul(F, U, np.eye(a + b, a, dtype=np.int64))
            assert ses_split_check(C, sub_cols, reg, seed=1)
            cases += 1
    assert cases >= 10


def test_euler_identity_on_plane(plane):
    rep, G, forms, m = plane
    reg = Registry(G)
    degs = {m * (2 - r) + j for r in range(3) for j in (0, 1)}
    sv = {k: decompose(sym_power(rep, G, k), reg, SEED) for k in degs}
    for j in (0, 1):
        out = euler_identity(reg, sv, d=2, m=m, j=j, t=2, seed=SEED)
        assert out["free_multiple"] is not None
        assert out["free_multiple"] * G.order == m ** 2
    with pytest.raises(ValueError):
        euler_identity(reg, sv, d=2, m=m, j=0, t=1, seed=SEED)


def test_surface_progression_stabilizes(plane):
    rep, G, forms, m = plane
    reg = Registry(G)
    sv = {}
    for t in range(1, 7):
        for j in (0, 1):
            k = m * t + j
            if k not in sv:
                sv[k] = decompose(sym_power(rep, G, k), reg, SEED)
    for j in (0, 1):
        out = surface_progression_check(reg, sv, m=m, j=j, t_range=range(1, 7), seed=SEED)
        assert out["ok"] and out["stable_from"] is not None
