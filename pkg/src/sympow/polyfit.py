"""Exact polynomial structure detection for decomposition sequences.

Everything here is integer/rational arithmetic: a sequence is declared
polynomial only when its forward differences of the right order vanish on the
whole observed tail, and fitted Newton polynomials are re-validated against
every remaining element plus a holdout block.  No least squares anywhere; an
approximate fit would hide exactly the bugs this package exists to catch.

A "description" of a sequence of DecompVectors is a period m, a threshold
t_min and one rational polynomial per (residue, registry id) reproducing the
multiplicity of that id at degree n = t*m + a for all observed t >= t_min.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb


def delta(seq: list) -> list:
    return [b - a for a, b in zip(seq, seq[1:])]


def _newton_poly(tail: list, n0: int, dmax: int) -> list[Fraction]:
    """Coefficients (ascending) of the Newton form through tail[0..dmax] at n0."""
    diffs = [Fraction(x) for x in tail]
    leading = []
    for _ in range(dmax + 1):
        leading.append(diffs[0])
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    coeffs = [Fraction(0)] * (dmax + 1)
    basis = [Fraction(1)]  # (x - n0)(x - n0 - 1).../ell! built incrementally
    for ell, lead in enumerate(leading):
        scaled = [c * lead for c in basis]
        for i, c in enumerate(scaled):
            coeffs[i] += c
        root = Fraction(n0 + ell)
        nxt = [Fraction(0)] * (len(basis) + 1)
        for i, c in enumerate(basis):
            nxt[i + 1] += c
            nxt[i] -= c * root
        basis = [c / (ell + 1) for c in nxt]
    return coeffs


def eval_poly(coeffs: list[Fraction], x: int) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def fit_polynomial_tail(seq: list, dmax: int):
    """Least n0 with (dmax+1)-th differences zero from n0 on, plus the polynomial.

    Returns (n0, coeffs ascending) or None when no tail of the required length
    is polynomial of degree <= dmax.  The returned polynomial is validated on
    every element from n0 to the end, not just the fitted window.
    """
    if len(seq) < dmax + 3:
        raise ValueError("sequence too short for the requested degree bound")
    diffs = [Fraction(x) for x in seq]
    for _ in range(dmax + 1):
        diffs = delta(diffs)
    # diffs[i] is the (dmax+1)-th difference starting at seq index i
    n0 = len(diffs)
    while n0 > 0 and diffs[n0 - 1] == 0:
        n0 -= 1
    if n0 > len(seq) - (dmax + 2):
        return None
    coeffs = _newton_poly(seq[n0:], n0, dmax)
    for i in range(n0, len(seq)):
        if eval_poly(coeffs, i) != seq[i]:
            return None
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return n0, coeffs


@dataclass
class PolynomialDescription:
    """Period m, registry ids used, and one polynomial per (residue, id)."""

    m: int
    t_min: int
    ids: list[int]
    polys: dict[tuple[int, int], list[Fraction]] = field(default_factory=dict)

    def multiplicity(self, a: int, mid: int, t: int) -> int:
        coeffs = self.polys.get((a, mid))
        if coeffs is None:
            return 0
        val = eval_poly(coeffs, t)
        if val.denominator != 1 or val < 0:
            raise ValueError("description evaluated outside its validity range")
        return int(val)

    def vector_at(self, n: int) -> dict[int, int]:
        t, a = divmod(n, self.m)
        out = {}
        for mid in self.ids:
            mult = self.multiplicity(a, mid, t)
            if mult:
                out[mid] = mult
        return out

    def degree(self) -> int:
        return max((len(c) - 1 for c in self.polys.values()), default=0)

    def to_json(self) -> dict:
        residues = []
        for a in range(self.m):
            terms = []
            for mid in self.ids:
                coeffs = self.polys.get((a, mid))
                if coeffs:
                    terms.append({
                        "id": mid,
                        "coeffs": [f"{c.numerator}/{c.denominator}" for c in coeffs],
                    })
            residues.append({"a": a, "terms": terms})
        return {"m": self.m, "t_min": self.t_min, "residues": residues}


def detect_description(seq: list[dict[int, int]], m_candidates, dmax: int,
                       holdout: int = 3):
    """Least period m admitting an exact polynomial description of the tail.

    seq[n] is the DecompVector at degree n.  For each candidate m the
    multiplicity sequence of every id in every residue class is fitted with
    the final `holdout` entries withheld, then the whole description is
    replayed against every vector from t_min*m on, holdout included.
    """
    all_ids = sorted({mid for vec in seq for mid in vec})
    for m in sorted(set(int(m) for m in m_candidates)):
        if m < 1:
            continue
        per_residue = min(len(range(a, len(seq), m)) for a in range(m))
        if per_residue < dmax + 3 + holdout:
            continue
        desc = PolynomialDescription(m=m, t_min=0, ids=all_ids)
        ok = True
        t_min = 0
        for a in range(m):
            ns = list(range(a, len(seq), m))
            fit_ns = ns[:-holdout] if holdout else ns
            for mid in all_ids:
                counts = [seq[n].get(mid, 0) for n in fit_ns]
                fit = fit_polynomial_tail(counts, dmax)
                if fit is None:
                    ok = False
                    break
                n0, coeffs = fit
                t_min = max(t_min, n0)
                if any(c != 0 for c in coeffs):
                    desc.polys[(a, mid)] = coeffs
            if not ok:
                break
        if not ok:
            continue
        desc.t_min = t_min
        start = t_min * m
        if all(desc.vector_at(n) == seq[n] for n in range(start, len(seq))):
            desc.ids = sorted({mid for (_, mid) in desc.polys})
            return desc
    return None


def growth_degree(dims: list[int], m: int, dmax: int | None = None) -> dict:
    """Per-residue polynomial degree of a dimension sequence; max is d(M).

    A residue class that is identically zero in the window gets the "empty"
    sentinel instead of a numeric degree.
    """
    if m < 1:
        raise ValueError("period must be positive")
    bound = dmax if dmax is not None else max(0, min(len(dims) // m - 3, 8))
    residues = []
    degrees = []
    for a in range(m):
        vals = [dims[n] for n in range(a, len(dims), m)]
        if len(vals) < 4:
            raise ValueError("need at least 4 entries per residue")
        if not any(vals):
            residues.append({"a": a, "degree": "empty"})
            continue
        fit = None
        for d in range(0, bound + 1):
            if len(vals) < d + 3:
                break
            fit = fit_polynomial_tail(vals, d)
            if fit is not None:
                break
        if fit is None:
            return {"ok": False, "failed_residue": a, "residues": residues}
        n0, coeffs = fit
        deg = len(coeffs) - 1
        degrees.append(deg)
        residues.append({
            "a": a,
            "degree": deg,
            "threshold": n0,
            "coeffs": [f"{c.numerator}/{c.denominator}" for c in coeffs],
        })
    return {"ok": True, "degree": max(degrees) if degrees else "empty", "residues": residues}


def bounded_growth_check(seq: list[int], c: int, m: int = 1) -> dict:
    """Growth bound report: exact for c = 0, exact-fit-or-heuristic for c > 0."""
    if c < 0:
        raise ValueError("exponent must be nonnegative")
    if c == 0:
        bound = max(seq, default=0)
        attained = max((i for i, v in enumerate(seq) if v == bound), default=0)
        return {"c": 0, "bounded": True, "bound": bound, "last_attained": attained}
    fits = growth_degree(seq, m, dmax=c)
    if fits["ok"]:
        return {"c": c, "exact": True, "degree": fits["degree"], "residues": fits["residues"]}
    tail = [(v / (n**c)) for n, v in enumerate(seq) if n >= max(1, len(seq) // 2)]
    sup = max(tail, default=0.0)
    monotone = all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))
    return {"c": c, "exact": False, "heuristic": True, "sup_ratio": sup,
            "ratio_nonincreasing": monotone}


def binomial_dim(d: int, n: int) -> int:
    """dim Sym^n in d+1 variables, the Hilbert function of projective d-space."""
    return comb(n + d, d)
