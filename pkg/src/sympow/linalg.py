"""Dense exact linear algebra over GF(p^e).

A matrix is a 2-D numpy int64 array of field codes (see gf.Field); the field
travels alongside as an explicit argument.  Products go through float64 BLAS
on digit layers, with operand splitting whenever exactness bounds would be
violated, so every result is the exact field value.

Elimination uses first-nonzero pivoting (row order, then column order), which
makes every echelon form, kernel basis and solve deterministic.  The blocked
right-looking elimination `_echelon` performs the same field operations as
the one-pivot-at-a-time reference `_echelon_naive`, just reassociated into
matrix products; a differential test keeps the two in lockstep.

Matrix text format: a `rows cols` header line, then one row per line of
scalar serializations separated by spaces.
"""

from __future__ import annotations

import numpy as np

from .gf import Field

_PANEL = 128


def zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def _mm_prime(p: int, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact A @ B mod p for residue matrices, via float64 BLAS."""
    m, k = A.shape
    n = B.shape[1]
    if k == 0 or m == 0 or n == 0:
        return zeros(m, n)
    if (p - 1) ** 2 * k < 2**53:
        C = A.astype(np.float64) @ B.astype(np.float64)
        return C.astype(np.int64) % p
    if (p - 1) ** 2 <= 2**53:
        # split the inner dimension
        step = max(1, 2**53 // (p - 1) ** 2)
        acc = zeros(m, n)
        for s in range(0, k, step):
            C = A[:, s:s + step].astype(np.float64) @ B[s:s + step].astype(np.float64)
            acc += C.astype(np.int64) % p
        return acc % p
    # large prime: 16-bit operand split, exact for k up to 2**21
    a1, a0 = np.divmod(A, 1 << 16)
    b1, b0 = np.divmod(B, 1 << 16)
    parts = []
    for (x, y, shift) in ((a1, b1, 32), (a1, b0, 16), (a0, b1, 16), (a0, b0, 0)):
        C = (x.astype(np.float64) @ y.astype(np.float64)).astype(np.int64) % p
        parts.append(C * pow(2, shift, p) % p)
    return sum(parts) % p


def mat_mul(F: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact product of code matrices over F."""
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"dimension mismatch {A.shape} @ {B.shape}")
    if F.e == 1:
        return _mm_prime(F.p, A, B)
    e, p = F.e, F.p
    k = A.shape[1]
    la, lb = F.split_layers(A), F.split_layers(B)
    if k and (p - 1) ** 2 * k * e < 2**53:
        # all e**2 layer products fit float64 exactly, even summed per degree,
        # so cast each operand once and reduce mod p a single time
        laf = la.astype(np.float64)
        lbf = lb.astype(np.float64)
        conv: list = [None] * (2 * e - 1)
        for i in range(e):
            for j in range(e):
                C = laf[i] @ lbf[j]
                conv[i + j] = C if conv[i + j] is None else conv[i + j] + C
        acc = np.stack(conv).astype(np.int64) % p
        return F._reduce_layers(acc)
    conv2 = [zeros(A.shape[0], B.shape[1]) for _ in range(2 * e - 1)]
    for i in range(e):
        for j in range(e):
            conv2[i + j] = (conv2[i + j] + _mm_prime(p, la[i], lb[j])) % p
    acc = np.stack(conv2)
    return F._reduce_layers(acc)


def mat_pow(F: Field, A: np.ndarray, k: int) -> np.ndarray:
    if A.shape[0] != A.shape[1]:
        raise ValueError("mat_pow needs a square matrix")
    if k < 0:
        return mat_pow(F, inv(F, A), -k)
    result = identity(A.shape[0])
    base = A
    while k:
        if k & 1:
            result = mat_mul(F, result, base)
        base = mat_mul(F, base, base)
        k >>= 1
    return result


def _echelon_naive(F: Field, A: np.ndarray, reduce: bool = True):
    """Reference one-pivot-at-a-time (reduced) row echelon; returns (R, pivots)."""
    W = A.astype(np.int64, copy=True)
    m, n = W.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        rows = np.nonzero(W[r:, c])[0]
        if rows.size == 0:
            continue
        i = r + int(rows[0])
        if i != r:
            W[[r, i]] = W[[i, r]]
        W[r] = F.vec_mul(W[r], F.vec_inv(W[r, c:c + 1]))
        below = W[r + 1:, c]
        nz = np.nonzero(below)[0]
        if nz.size:
            rows_idx = r + 1 + nz
            W[rows_idx] = F.vec_sub(W[rows_idx], F.vec_mul(below[nz][:, None], W[r][None, :]))
        pivots.append(c)
        r += 1
    if reduce:
        for j in range(len(pivots) - 1, 0, -1):
            c = pivots[j]
            above = W[:j, c]
            nz = np.nonzero(above)[0]
            if nz.size:
                W[nz] = F.vec_sub(W[nz], F.vec_mul(above[nz][:, None], W[j][None, :]))
    return W, pivots


def _forward_solve(F: Field, M: np.ndarray, scales: np.ndarray, U: np.ndarray) -> None:
    """Finalize a panel's pivot rows against each other, in place.

    Row j of U becomes scales[j] * (U[j] - M[j, :j] @ U[:j]) with the earlier
    rows already final; splitting the strictly lower triangle M in half turns
    the row-at-a-time sweep into a few block products.
    """
    k = U.shape[0]
    if k <= 8:
        for j in range(k):
            if j and np.any(M[j, :j]):
                U[j] = F.vec_sub(U[j], mat_mul(F, M[j:j + 1, :j], U[:j])[0])
            U[j] = F.vec_mul(U[j], scales[j])
        return
    h = k // 2
    _forward_solve(F, M[:h, :h], scales[:h], U[:h])
    if np.any(M[h:, :h]):
        U[h:] = F.vec_sub(U[h:], mat_mul(F, M[h:, :h], U[:h]))
    _forward_solve(F, M[h:, h:], scales[h:], U[h:])


def _echelon(F: Field, A: np.ndarray, reduce: bool = True, panel: int = _PANEL):
    """Blocked elimination; field-op-identical to `_echelon_naive`."""
    W = A.astype(np.int64, copy=True)
    m, n = W.shape
    pivots: list[int] = []
    r = 0
    c0 = 0
    while r < m and c0 < n:
        c1 = min(c0 + panel, n)
        width = c1 - c0
        base = r
        # multiplier buffer, rows aligned with W[base:] through every swap
        M = zeros(m - base, width)
        inv_scales: list[int] = []
        k = 0
        for c in range(c0, c1):
            rows = np.nonzero(W[r:, c])[0]
            if rows.size == 0:
                continue
            i = r + int(rows[0])
            if i != r:
                W[[r, i]] = W[[i, r]]
                M[[r - base, i - base]] = M[[i - base, r - base]]
            s = int(F.vec_inv(W[r, c:c + 1])[0])
            # columns c0..c-1 are zero at and below row r, so skip them
            W[r, c:c1] = F.vec_mul(W[r, c:c1], np.int64(s))
            mult = W[r + 1:m, c].copy()
            nz = np.nonzero(mult)[0]
            if nz.size:
                rows_idx = r + 1 + nz
                W[rows_idx, c:c1] = F.vec_submul(
                    W[rows_idx, c:c1], mult[nz][:, None], W[r, c:c1][None, :]
                )
            M[r + 1 - base:, k] = mult
            inv_scales.append(s)
            pivots.append(c)
            r += 1
            k += 1
        if k and c1 < n:
            # forward-substitute the panel ops into the pivot rows' trailing parts
            U = W[base:base + k, c1:]
            _forward_solve(F, M[:k, :k], np.array(inv_scales, dtype=np.int64), U)
            # one product updates every row below the panel's pivot rows
            if base + k < m:
                corr = mat_mul(F, M[k:, :k], U)
                W[base + k:, c1:] = F.vec_sub(W[base + k:, c1:], corr)
        c0 = c1
    if reduce and pivots:
        R = len(pivots)
        b1 = R
        while b1 > 0:
            b0 = max(0, b1 - panel)
            # reduce the block's pivot rows against each other, later into earlier
            for j in range(b0 + 1, b1):
                c = pivots[j]
                above = W[b0:j, c]
                nz = np.nonzero(above)[0]
                if nz.size:
                    rows_idx = b0 + nz
                    W[rows_idx] = F.vec_submul(W[rows_idx], above[nz][:, None], W[j][None, :])
            if b0 > 0:
                C = W[:b0, [pivots[j] for j in range(b0, b1)]]
                if np.any(C):
                    corr = mat_mul(F, C, W[b0:b1])
                    W[:b0] = F.vec_sub(W[:b0], corr)
            b1 = b0
    return W, pivots


def rref(F: Field, A: np.ndarray):
    """Reduced row echelon form: returns (R, rank, pivot column list)."""
    R, pivots = _echelon(F, A, reduce=True)
    return R, len(pivots), pivots


def rank(F: Field, A: np.ndarray) -> int:
    return len(_echelon(F, A, reduce=False)[1])


def kernel_basis(F: Field, A: np.ndarray) -> np.ndarray:
    """Columns form the canonical RREF-derived basis of the right kernel.

    Shape (cols, cols - rank); free columns in ascending order, each basis
    vector has a 1 at its free coordinate.
    """
    R, rk, pivots = rref(F, A)
    return kernel_from_rref(F, R, rk, pivots, A.shape[1])


def kernel_from_rref(F: Field, R: np.ndarray, rk: int, pivots: list[int], n: int) -> np.ndarray:
    """The kernel_basis construction from an already computed rref."""
    free = [c for c in range(n) if c not in set(pivots)]
    K = zeros(n, len(free))
    if free:
        K[free, np.arange(len(free))] = 1
        if rk:
            K[np.ix_(pivots, np.arange(len(free)))] = F.vec_neg(R[:rk, free])
    return K


def solve(F: Field, A: np.ndarray, b: np.ndarray):
    """A particular solution of Ax = b, or None when inconsistent."""
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if b.shape[0] != A.shape[0]:
        raise ValueError("solve: incompatible shapes")
    aug = np.hstack([A, b[:, None]])
    R, rk, pivots = rref(F, aug)
    if pivots and pivots[-1] == A.shape[1]:
        return None
    x = np.zeros(A.shape[1], dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = R[i, A.shape[1]]
    return x


def inv(F: Field, A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("inv needs a square matrix")
    R, rk, pivots = rref(F, np.hstack([A, identity(n)]))
    if any(c >= n for c in pivots):
        raise ValueError("matrix is singular")
    return R[:, n:].copy()


def unipotent_jordan(F: Field, A: np.ndarray) -> tuple[int, ...]:
    """Jordan block sizes of a unipotent matrix, descending.

    Sizes come from ranks of powers of N = A - I: the number of blocks of
    size >= k is rank(N^(k-1)) - rank(N^k).
    """
    n = A.shape[0]
    N = F.vec_sub(A, identity(n))
    ranks = [n]
    P = N
    while np.any(P):
        ranks.append(rank(F, P))
        if len(ranks) > n + 1:
            raise ValueError("matrix is not unipotent")
        P = mat_mul(F, P, N)
    ranks.append(0)
    blocks_ge = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    partition: list[int] = []
    for k in range(len(blocks_ge), 0, -1):
        count = blocks_ge[k - 1] - (blocks_ge[k] if k < len(blocks_ge) else 0)
        partition.extend([k] * count)
    out = tuple(sorted(partition, reverse=True))
    if sum(out) != n:
        raise ValueError("matrix is not unipotent")
    return out


def min_poly(F: Field, A: np.ndarray) -> np.ndarray:
    """Minimal polynomial of a square matrix, monic little-endian coefficients.

    Stacks vectorized powers I, A, A^2, ... as columns; the first column that
    is dependent on its predecessors has index equal to the degree, and the
    dependence coefficients are the lower-order terms.
    """
    d = A.shape[0]
    if d == 0:
        return np.array([1], dtype=np.int64)
    cur = identity(d)
    cols = [cur.reshape(-1)]
    for _ in range(d):
        cur = mat_mul(F, cur, A)
        cols.append(cur.reshape(-1))
    S = np.stack(cols, axis=1)
    _, _, piv = rref(F, S)
    pivset = set(piv)
    deg = next(j for j in range(d + 1) if j not in pivset)
    low = solve(F, S[:, :deg], S[:, deg])
    assert low is not None, "powers of A below the minimal degree are independent"
    return np.concatenate([F.vec_neg(low), np.array([1], dtype=np.int64)])


def mat_eval_poly(F: Field, coeffs: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Evaluate a little-endian coefficient vector at a square matrix."""
    d = A.shape[0]
    out = zeros(d, d)
    I = identity(d)
    for c in reversed(np.asarray(coeffs, dtype=np.int64)):
        out = mat_mul(F, out, A)
        if c:
            out = F.vec_add(out, F.vec_mul(I, np.int64(int(c))))
    return out


def reduce_mod_rowspace(F: Field, R: np.ndarray, pivots: list[int], W: np.ndarray) -> np.ndarray:
    """Reduce the columns of W modulo the row space of an RREF matrix R."""
    if not pivots:
        return W.copy()
    rk = len(pivots)
    corr = mat_mul(F, R[:rk].T, W[pivots, :])
    return F.vec_sub(W, corr)


def block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    m = sum(b.shape[0] for b in blocks)
    n = sum(b.shape[1] for b in blocks)
    out = zeros(m, n)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


def rand_mat(F: Field, rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    return rng.integers(0, F.q, size=(m, n), dtype=np.int64)


def rand_invertible(F: Field, rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        A = rand_mat(F, rng, n, n)
        if rank(F, A) == n:
            return A


def mat_to_text(F: Field, A: np.ndarray) -> str:
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    for row in A:
        lines.append(" ".join(F.scalar_str(int(a)) for a in row))
    return "\n".join(lines) + "\n"


def mat_from_text(F: Field, text: str) -> np.ndarray:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    try:
        m, n = (int(t) for t in lines[0].split())
    except Exception as exc:
        raise ValueError(f"bad matrix header {lines[0]!r}") from exc
    if len(lines) != m + 1:
        raise ValueError(f"expected {m} rows, got {len(lines) - 1}")
    out = zeros(m, n)
    for i, ln in enumerate(lines[1:]):
        toks = ln.split()
        if len(toks) != n:
            raise ValueError(f"row {i} has {len(toks)} entries, expected {n}")
        out[i] = [F.scalar_parse(t) for t in toks]
    return out
