"""Arithmetic in GF(p^e) with canonical moduli, primitive roots, discrete logs.

A field element is carried as an integer code in [0, p^e): the code's base-p
digits, little-endian, are the coefficients of the element written in the
power basis 1, x, ..., x^(e-1) of GF(p)[x]/(f).  The defining modulus f is
canonical: the lexicographically least monic irreducible of degree e, where
coefficient tuples (c0, c1, ..., c_{e-1}) are compared left to right, so the
constant coefficient is most significant.  The distinguished generator is the
least primitive element in the same coefficient order.  Registries and caches
depend on both scans being reproducible, so do not reorder them.

Scalar arithmetic is polynomial arithmetic mod f (no log tables); only dlog
builds a power table, and only for fields of size at most 2**20.

Vectorized variants (vec_add and friends) act elementwise on numpy int64
arrays of codes and are the substrate for the linalg layer.
"""

from __future__ import annotations

import itertools

import numpy as np

FIELD_SIZE_CAP = 2**31
DLOG_CAP = 2**20
DEGREE_CAP = 16
# extension fields up to this size get q*q elementwise op tables (one gather
# per element instead of a digit-layer round trip)
TABLE_CAP = 512
# fused a +- m*b tables take q**3 entries, so they get a tighter cap
FUSED_CAP = 64


class CapacityError(RuntimeError):
    """A configured size cap (field size, group order, module dim) was hit."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division, n <= 2**31 or so."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# --- polynomial helpers over GF(p), coefficient lists little-endian ---------


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul_mod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce mod monic f
    e = len(f) - 1
    for k in range(len(prod) - 1, e - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for i in range(e):
                prod[k - e + i] = (prod[k - e + i] - c * f[i]) % p
    return _poly_trim(prod[:e])


def _poly_pow_mod(a: list[int], n: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = list(a)
    while n:
        if n & 1:
            result = _poly_mul_mod(result, base, f, p)
        base = _poly_mul_mod(base, base, f, p)
        n >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        inv_lead = pow(b[-1], p - 2, p)
        # a mod b
        a = list(a)
        while len(a) >= len(b) and _poly_trim(a):
            if not a or len(a) < len(b):
                break
            c = (a[-1] * inv_lead) % p
            shift = len(a) - len(b)
            for i in range(len(b)):
                a[shift + i] = (a[shift + i] - c * b[i]) % p
            _poly_trim(a)
        a, b = b, _poly_trim(a)
    return a


def _is_irreducible(f: list[int], p: int) -> bool:
    """Rabin test: f (monic, degree e) is irreducible over GF(p)."""
    e = len(f) - 1
    x = [0, 1]
    # x^(p^e) == x mod f
    t = x
    for _ in range(e):
        t = _poly_pow_mod(t, p, f, p)
    lhs = _poly_trim([(t[i] if i < len(t) else 0) - (x[i] if i < len(x) else 0) for i in range(max(len(t), 2))])
    lhs = [c % p for c in lhs]
    if _poly_trim(lhs):
        return False
    for ell in factorize(e):
        t = x
        for _ in range(e // ell):
            t = _poly_pow_mod(t, p, f, p)
        diff = [(t[i] if i < len(t) else 0) - (x[i] if i < len(x) else 0) for i in range(max(len(t), 2))]
        diff = _poly_trim([c % p for c in diff])
        g = _poly_gcd(f, diff, p)
        if len(g) - 1 > 0:
            return False
    return True


def _canonical_modulus(p: int, e: int) -> tuple[int, ...]:
    """Least monic irreducible of degree e, little-endian coefficient lex."""
    if e == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=e):
        f = list(tail) + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise AssertionError(f"no irreducible of degree {e} over GF({p})")


class Field:
    """GF(p^e) with canonical modulus; elements are int codes in [0, p^e).

    Instances are interned by :func:`make_field`; identity comparison is the
    intended equality test.
    """

    def __init__(self, p: int, e: int):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if not 1 <= e <= DEGREE_CAP:
            raise CapacityError(f"extension degree {e} outside [1, {DEGREE_CAP}]")
        if p**e > FIELD_SIZE_CAP:
            raise CapacityError(f"field size {p}^{e} exceeds {FIELD_SIZE_CAP}")
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = _canonical_modulus(p, e)  # length e+1, monic
        # reduction rows: x^(e+k) = sum_i red[k][i] x^i  (mod f), k = 0..e-2
        red = []
        if e > 1:
            cur = [(-c) % p for c in self.modulus[:e]]  # x^e fully reduced
            red.append(list(cur))
            for _ in range(e - 2):
                top = cur[e - 1]
                cur = [0] + cur[: e - 1]  # multiply by x, capture overflow
                if top:
                    cur = [(cur[i] + top * red[0][i]) % p for i in range(e)]
                red.append(list(cur))
        self._red = np.array(red, dtype=np.int64) if red else np.zeros((0, e), dtype=np.int64)
        self._pow_table: list[int] | None = None
        self._dlog_table: dict[int, int] | None = None
        self._root: int | None = None
        self._op_tables: tuple[np.ndarray, ...] | None = None
        self._fused_tables: tuple[np.ndarray, np.ndarray] | None = None

    # -- scalar codecs --------------------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.e):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def from_coeffs(self, cs) -> int:
        a = 0
        for c in reversed(list(cs)):
            a = a * self.p + int(c) % self.p
        return a

    def scalar_str(self, a: int) -> str:
        """e base-p digits, little-endian; fixed-width digits when p > 10."""
        w = len(str(self.p - 1))
        return "".join(str(c).zfill(w) for c in self.coeffs(a))

    def scalar_parse(self, s: str) -> int:
        w = len(str(self.p - 1))
        if len(s) != self.e * w:
            raise ValueError(f"scalar token {s!r} is not {self.e} digits of width {w}")
        digits = [int(s[i * w:(i + 1) * w]) for i in range(self.e)]
        if any(not 0 <= d < self.p for d in digits):
            raise ValueError(f"scalar token {s!r} has digits outside [0, {self.p})")
        return self.from_coeffs(digits)

    # -- scalar arithmetic ----------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        p = self.p
        out, mul = 0, 1
        for _ in range(self.e):
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * mul
            mul *= p
        return out

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        p = self.p
        out, mul = 0, 1
        for _ in range(self.e):
            a, ra = divmod(a, p)
            out += ((-ra) % p) * mul
            mul *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        f = list(self.modulus)
        prod = _poly_mul_mod(list(self.coeffs(a)), list(self.coeffs(b)), f, self.p)
        return self.from_coeffs(prod + [0] * (self.e - len(prod)))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(p^e)")
        return self.pow(a, self.q - 2)

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        result, base = 1, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise ZeroDivisionError("order of zero")
        n = self.q - 1
        for ell, k in factorize(n).items():
            for _ in range(k):
                if self.pow(a, n // ell) == 1:
                    n //= ell
                else:
                    break
        return n

    # -- canonical generator and dlog ------------------------------------

    def _lex_codes(self):
        """All codes in coefficient-lexicographic order (c0 most significant)."""
        for tup in itertools.product(range(self.p), repeat=self.e):
            yield self.from_coeffs(tup)

    @property
    def root(self) -> int:
        """Least primitive element in coefficient-lex order."""
        if self._root is None:
            n = self.q - 1
            primes = list(factorize(n))
            for a in self._lex_codes():
                if a == 0:
                    continue
                if n == 1 or all(self.pow(a, n // ell) != 1 for ell in primes):
                    self._root = a
                    break
        assert self._root is not None
        return self._root

    def dlog(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("dlog of zero")
        if self.q > DLOG_CAP:
            raise CapacityError(f"dlog table capped at field size {DLOG_CAP}")
        if self._dlog_table is None:
            table, x, r = {}, 1, self.root
            for k in range(self.q - 1):
                table[x] = k
                x = self.mul(x, r)
            self._dlog_table = table
        return self._dlog_table[a]

    # -- vectorized arithmetic on int64 code arrays ----------------------

    def split_layers(self, arr: np.ndarray) -> np.ndarray:
        """(e,) + arr.shape array of base-p digits of each code."""
        out = np.empty((self.e,) + arr.shape, dtype=np.int64)
        rem = arr.astype(np.int64, copy=True)
        for i in range(self.e):
            out[i] = rem % self.p
            rem //= self.p
        return out

    def join_layers(self, layers: np.ndarray) -> np.ndarray:
        out = np.zeros(layers.shape[1:], dtype=np.int64)
        for i in range(self.e - 1, -1, -1):
            out *= self.p
            out += layers[i] % self.p
        return out

    def _tables(self) -> tuple[np.ndarray, ...]:
        """(add, sub, mul, neg, inv) tables; binary ones flat, index a*q + b."""
        if self._op_tables is None:
            q = self.q
            a = np.repeat(np.arange(q, dtype=np.int64), q)
            b = np.tile(np.arange(q, dtype=np.int64), q)
            la, lb = self.split_layers(a), self.split_layers(b)
            add = self.join_layers(la + lb)
            sub = self.join_layers(la - lb + self.p)
            mul = self._mul_layered(a, b)
            ones = np.nonzero(mul == 1)[0]
            inv = np.zeros(q, dtype=np.int64)
            inv[ones // q] = ones % q
            self._op_tables = (add, sub, mul, sub[:q].copy(), inv)
        return self._op_tables

    def vec_add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (a + b) % self.p
        if self.q <= TABLE_CAP:
            tab = self._tables()[0]
            return tab[np.asarray(a, dtype=np.int64) * self.q + np.asarray(b, dtype=np.int64)]
        return self.join_layers(self.split_layers(a) + self.split_layers(b))

    def vec_neg(self, a: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (-a) % self.p
        if self.q <= TABLE_CAP:
            return self._tables()[3][np.asarray(a, dtype=np.int64)]
        return self.join_layers(-self.split_layers(a) % self.p)

    def vec_sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (a - b) % self.p
        if self.q <= TABLE_CAP:
            tab = self._tables()[1]
            return tab[np.asarray(a, dtype=np.int64) * self.q + np.asarray(b, dtype=np.int64)]
        return self.join_layers(self.split_layers(a) - self.split_layers(b) + self.p)

    def vec_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product of code arrays (broadcasting allowed)."""
        if self.e == 1:
            return (a * b) % self.p
        if self.q <= TABLE_CAP:
            tab = self._tables()[2]
            return tab[np.asarray(a, dtype=np.int64) * self.q + np.asarray(b, dtype=np.int64)]
        return self._mul_layered(np.asarray(a), np.asarray(b))

    def _mul_layered(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        la, lb = self.split_layers(a), self.split_layers(b)
        shape = np.broadcast_shapes(la.shape[1:], lb.shape[1:])
        acc = np.zeros((2 * self.e - 1,) + shape, dtype=np.int64)
        for i in range(self.e):
            for j in range(self.e):
                acc[i + j] += la[i] * lb[j]
        return self._reduce_layers(acc)

    def _reduce_layers(self, acc: np.ndarray) -> np.ndarray:
        """Fold layers e..2e-2 of a convolution back below degree e, mod p."""
        e = self.e
        for k in range(acc.shape[0] - 1, e - 1, -1):
            row = self._red[k - e]
            top = acc[k]
            for i in range(e):
                if row[i]:
                    acc[i] += row[i] * top
        # join_layers reduces each digit mod p itself; acc stays nonnegative
        return self.join_layers(acc[:e])

    def _fused(self) -> tuple[np.ndarray, np.ndarray]:
        """(submul, addmul) tables: entry (a*q + m)*q + b holds a -+ m*b."""
        if self._fused_tables is None:
            q = self.q
            add, sub, mul = self._tables()[:3]
            mb = mul[np.tile(np.arange(q * q, dtype=np.int64), q)]
            aq = np.repeat(np.arange(q, dtype=np.int64), q * q) * q
            self._fused_tables = (sub[aq + mb], add[aq + mb])
        return self._fused_tables

    def vec_submul(self, a: np.ndarray, m: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise a - m*b with broadcasting, the elimination kernel."""
        if self.e == 1:
            return (a - m * b) % self.p
        if self.q <= FUSED_CAP:
            idx = (np.asarray(a, dtype=np.int64) * self.q + np.asarray(m, dtype=np.int64)) * self.q
            return self._fused()[0][idx + np.asarray(b, dtype=np.int64)]
        return self.vec_sub(a, self.vec_mul(m, b))

    def vec_addmul(self, a: np.ndarray, m: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise a + m*b with broadcasting."""
        if self.e == 1:
            return (a + m * b) % self.p
        if self.q <= FUSED_CAP:
            idx = (np.asarray(a, dtype=np.int64) * self.q + np.asarray(m, dtype=np.int64)) * self.q
            return self._fused()[1][idx + np.asarray(b, dtype=np.int64)]
        return self.vec_add(a, self.vec_mul(m, b))

    def vec_inv(self, a: np.ndarray) -> np.ndarray:
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in GF(p^e)")
        if self.e == 1:
            return np.vectorize(lambda x: pow(int(x), self.p - 2, self.p), otypes=[np.int64])(a)
        if self.q <= TABLE_CAP:
            return self._tables()[4][np.asarray(a, dtype=np.int64)]
        result = np.ones_like(a)
        base = a
        n = self.q - 2
        while n:
            if n & 1:
                result = self.vec_mul(result, base)
            base = self.vec_mul(base, base)
            n >>= 1
        return result

    def __repr__(self):
        return f"GF({self.p}^{self.e})" if self.e > 1 else f"GF({self.p})"


_FIELDS: dict[tuple[int, int], Field] = {}


def make_field(p: int, e: int = 1) -> Field:
    """Canonical interned Field for GF(p^e)."""
    key = (p, e)
    if key not in _FIELDS:
        _FIELDS[key] = Field(p, e)
    return _FIELDS[key]


def subfield_root(big: Field, small: Field) -> int:
    """Image in `big` of `small`'s defining root, canonical choice.

    Scans big's codes in coefficient-lex order for the first root of small's
    modulus; all roots are Galois-conjugate, the scan just pins one.  Raises
    if small does not embed (big.e not a multiple of small.e or p mismatch).
    """
    if big.p != small.p or big.e % small.e != 0:
        raise ValueError(f"{small} does not embed in {big}")
    f = small.modulus
    for a in big._lex_codes():
        acc = 0
        for c in reversed(f):
            acc = big.add(big.mul(acc, a), c % big.p)
        if acc == 0:
            return a
    raise AssertionError("embedding root not found")


def embed_scalar(big: Field, small: Field, root_img: int, a: int) -> int:
    """Map a small-field code into big via the chosen image of the root."""
    acc = 0
    for c in reversed(small.coeffs(a)):
        acc = big.add(big.mul(acc, root_img), c)
    return acc


# -- univariate polynomials over a Field ----------------------------------------
#
# Coefficient vectors are little-endian int64 arrays of codes with no trailing
# zeros; the zero polynomial is the empty array.  These back the minimal
# polynomial splitting used by the module decomposer, so everything here is
# exact and seed-threaded where randomized.


def poly_trim(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    nz = np.nonzero(a)[0]
    return a[: nz[-1] + 1] if nz.size else a[:0]


def poly_deg(a: np.ndarray) -> int:
    return len(a) - 1


def poly_add(F: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=np.int64)
    out[: len(a)] = a
    out[: len(b)] = F.vec_add(out[: len(b)], np.asarray(b, dtype=np.int64))
    return poly_trim(out)


def poly_sub(F: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=np.int64)
    out[: len(a)] = a
    out[: len(b)] = F.vec_sub(out[: len(b)], np.asarray(b, dtype=np.int64))
    return poly_trim(out)


def poly_monic(F: Field, a: np.ndarray) -> np.ndarray:
    a = poly_trim(a)
    if not len(a) or a[-1] == 1:
        return a
    return F.vec_mul(a, np.int64(F.inv(int(a[-1]))))


def poly_mul(F: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = poly_trim(a), poly_trim(b)
    if not len(a) or not len(b):
        return a[:0]
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i, c in enumerate(a):
        if c:
            out[i : i + len(b)] = F.vec_addmul(out[i : i + len(b)], np.int64(int(c)), b)
    return out


def poly_divmod(F: Field, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    b = poly_trim(b)
    if not len(b):
        raise ZeroDivisionError("polynomial division by zero")
    r = poly_trim(a).copy()
    nb = len(b)
    if len(r) < nb:
        return r[:0], r
    li = F.inv(int(b[-1]))
    q = np.zeros(len(r) - nb + 1, dtype=np.int64)
    for i in range(len(r) - nb, -1, -1):
        c = F.mul(int(r[i + nb - 1]), li)
        if c:
            q[i] = c
            r[i : i + nb] = F.vec_submul(r[i : i + nb], np.int64(c), b)
    return poly_trim(q), poly_trim(r[: nb - 1])


def poly_mod(F: Field, a: np.ndarray, f: np.ndarray) -> np.ndarray:
    return poly_divmod(F, a, f)[1]


def poly_gcd(F: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = poly_trim(a), poly_trim(b)
    while len(b):
        a, b = b, poly_mod(F, a, b)
    return poly_monic(F, a)


def poly_powmod(F: Field, a: np.ndarray, n: int, f: np.ndarray) -> np.ndarray:
    result = poly_mod(F, np.array([1], dtype=np.int64), f)
    base = poly_mod(F, a, f)
    while n:
        if n & 1:
            result = poly_mod(F, poly_mul(F, result, base), f)
        n >>= 1
        if n:
            base = poly_mod(F, poly_mul(F, base, base), f)
    return result


def poly_eval(F: Field, a: np.ndarray, c: int) -> int:
    acc = 0
    for coeff in reversed(poly_trim(a)):
        acc = F.add(F.mul(acc, c), int(coeff))
    return acc


def _poly_saturate(F: Field, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """The largest divisor of f all of whose irreducible factors divide g."""
    power = poly_powmod(F, g, max(1, poly_deg(f)), f)
    if not len(power):
        return poly_monic(F, f)
    return poly_gcd(F, f, power)


def _equal_degree_divisor(F: Field, g: np.ndarray, i: int, rng, tries: int):
    """Proper divisor of squarefree g whose irreducible factors all have degree i.

    Cantor-Zassenhaus randomization; g is guaranteed reducible by the caller,
    so failure after `tries` draws is a coin-flip miracle reported as None.
    """
    n = poly_deg(g)
    one = np.array([1], dtype=np.int64)
    for _ in range(tries):
        a = poly_trim(rng.integers(0, F.q, size=n).astype(np.int64))
        if poly_deg(a) < 1:
            continue
        d = poly_gcd(F, g, a)
        if 0 < poly_deg(d) < n:
            return d
        if F.p == 2:
            # trace of a into the prime field, computed in F[x]/(g)
            b = poly_mod(F, a, g)
            acc = b
            for _ in range(F.e * i - 1):
                b = poly_mod(F, poly_mul(F, b, b), g)
                acc = poly_add(F, acc, b)
            candidates = (acc,)
        else:
            b = poly_powmod(F, a, (F.q**i - 1) // 2, g)
            candidates = (poly_sub(F, b, one), poly_add(F, b, one))
        for cand in candidates:
            d = poly_gcd(F, g, cand)
            if 0 < poly_deg(d) < n:
                return d
    return None


def poly_coprime_split(F: Field, f: np.ndarray, rng, tries: int = 40):
    """Split monic f as (u, v) with u*v = f, gcd(u, v) = 1, both nonconstant.

    Returns None when f is a power of a single irreducible (certified, except
    that the equal-degree step is randomized with failure odds ~2^-tries).
    Scans rational roots first, then distinct-degree classes.
    """
    f = poly_monic(F, f)
    n = poly_deg(f)
    if n <= 1:
        return None
    for c in range(F.q):
        if poly_eval(F, f, c) == 0:
            lin = np.array([F.neg(c), 1], dtype=np.int64)
            u = _poly_saturate(F, f, lin)
            if poly_deg(u) == n:
                return None  # f = (x - c)^n
            return u, poly_divmod(F, f, u)[0]
    r = np.array([0, 1], dtype=np.int64)
    for i in range(1, n + 1):
        r = poly_powmod(F, r, F.q, f)
        g = poly_gcd(F, f, poly_sub(F, r, np.array([0, 1], dtype=np.int64)))
        if poly_deg(g) < 1:
            continue
        u = _poly_saturate(F, f, g)
        if poly_deg(u) < n:
            return u, poly_divmod(F, f, u)[0]
        if poly_deg(g) == i:
            return None  # single irreducible factor of degree i
        t = _equal_degree_divisor(F, g, i, rng, tries)
        if t is None:
            return None
        u = _poly_saturate(F, f, t)
        return u, poly_divmod(F, f, u)[0]
    return None
