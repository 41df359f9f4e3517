"""Arithmetic in F_{3^m}.

Elements are ints in [0, 3^m): the base-3 digits are the polynomial-basis
coefficients, constant term least significant.  Scalar methods take and
return ints; the ``*_arr`` methods work on numpy int64 arrays.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from . import trivec

DEFAULT_TABLE_LIMIT = 14


class FieldError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# polynomials over F_3 as coefficient lists, constant term first


def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mod(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Remainder of a modulo b over F_3 (b nonzero, trimmed)."""
    r = [x % 3 for x in a]
    _trim(r)
    db = len(b) - 1
    inv_lead = b[-1]  # 1 and 2 are self-inverse mod 3
    while len(r) - 1 >= db and r:
        c = (r[-1] * inv_lead) % 3
        shift = len(r) - 1 - db
        for i, bi in enumerate(b):
            r[shift + i] = (r[shift + i] - c * bi) % 3
        _trim(r)
    return r


def is_irreducible(poly: Sequence[int]) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = _trim([x % 3 for x in poly])
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in range(3**d):
            divisor = [(low // 3**i) % 3 for i in range(d)] + [1]
            if not poly_mod(poly, divisor):
                return False
    return True


@lru_cache(maxsize=None)
def find_irreducible(m: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree m, coefficients constant-first.

    Candidates t^m + sum a_i t^i are scanned in increasing order of
    sum a_i 3^i, which is the order of the coefficient vector read with the
    constant term last.
    """
    if m < 1:
        raise ValueError("degree must be >= 1")
    for low in range(3**m):
        poly = [(low // 3**i) % 3 for i in range(m)] + [1]
        if is_irreducible(poly):
            return tuple(poly)
    raise AssertionError("unreachable: irreducibles exist in every degree")


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


class GF3m:
    """The field F_{3^m} with a deterministic modulus and generator.

    Discrete log/exp tables are built when ``m <= table_limit``; above that
    every operation goes through polynomial arithmetic.
    """

    def __init__(self, m: int, table_limit: int = DEFAULT_TABLE_LIMIT):
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        self.m = m
        self.q = 3**m
        self.order = self.q - 1
        self.modulus = find_irreducible(m)
        self._pow3 = np.array([3**i for i in range(m)], dtype=np.int64)
        # x * t^i for i < 2m - 1 reduced mod the modulus, as encodings; used
        # by the polynomial multiplication path.
        self._reduce = self._reduction_rows()
        self.exp_table: np.ndarray | None = None
        self.log_table: np.ndarray | None = None
        self.generator = self._find_generator()
        if m <= table_limit:
            self._build_tables()

    def __repr__(self) -> str:
        return f"GF3m(m={self.m}, modulus={self.modulus_str()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF3m) and other.m == self.m and other.modulus == self.modulus

    def __hash__(self) -> int:
        return hash((self.m, self.modulus))

    def modulus_str(self) -> str:
        terms = []
        for i in range(self.m, -1, -1):
            c = self.modulus[i]
            if not c:
                continue
            mono = "1" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if i and c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}" if i else str(c))
        return " + ".join(terms)

    def header(self) -> dict:
        return {"m": self.m, "modulus": list(self.modulus), "generator": self.generator}

    @property
    def has_tables(self) -> bool:
        return self.exp_table is not None

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def nonzero(self) -> np.ndarray:
        return np.arange(1, self.q, dtype=np.int64)

    # -- encoding helpers --------------------------------------------------

    def to_coeffs(self, x: int) -> list[int]:
        return list(trivec.decode(int(x), self.m))

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        p = poly_mod(list(coeffs), self.modulus) if len(coeffs) > self.m else list(coeffs)
        return trivec.encode([c % 3 for c in p] + [0] * (self.m - len(p)))

    def _check(self, x) -> int:
        x = int(x)
        if not 0 <= x < self.q:
            raise FieldError(f"{x} is not an element of F_{self.q}")
        return x

    # -- polynomial path ---------------------------------------------------

    def _reduction_rows(self) -> np.ndarray:
        m = self.m
        rows = np.zeros((2 * m - 1, m), dtype=np.int64)
        cur = [1] + [0] * (m - 1)
        for k in range(2 * m - 1):
            rows[k] = cur
            # multiply by t: shift up, reduce the overflow with the modulus
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [(c - top * self.modulus[i]) % 3 for i, c in enumerate(cur)]
        return rows

    def poly_mul_arr(self, a, b) -> np.ndarray:
        """Schoolbook product with modular reduction, vectorized."""
        m = self.m
        da = trivec.digits(a, m).astype(np.int64)
        db = trivec.digits(b, m).astype(np.int64)
        da, db = np.broadcast_arrays(da, db)
        prod = np.zeros(da.shape[:-1] + (2 * m - 1,), dtype=np.int64)
        for i in range(m):
            prod[..., i:i + m] += da[..., i:i + 1] * db
        red = (prod @ self._reduce) % 3
        return red @ self._pow3

    def poly_mul(self, a: int, b: int) -> int:
        return int(self.poly_mul_arr(np.int64(a), np.int64(b)))

    def poly_pow(self, a: int, e: int) -> int:
        result, base = 1, int(a)
        while e:
            if e & 1:
                result = self.poly_mul(result, base)
            base = self.poly_mul(base, base)
            e >>= 1
        return result

    def _find_generator(self) -> int:
        if self.q == 3:
            return 2
        factors = _prime_factors(self.order)
        for g in range(2, self.q):
            if all(self.poly_pow(g, self.order // p) != 1 for p in factors):
                return g
        raise AssertionError("unreachable: F_q^* is cyclic")

    def _scale_tables(self, c: int) -> tuple[np.ndarray, np.ndarray, int]:
        h = (self.m + 1) // 2
        lo = np.arange(3**h, dtype=np.int64)
        hi = np.arange(3 ** (self.m - h), dtype=np.int64)
        return (self.poly_mul_arr(lo, np.int64(c)),
                self.poly_mul_arr(hi * 3**h, np.int64(c)), 3**h)

    def scale_arr(self, c: int, x: np.ndarray) -> np.ndarray:
        """c * x for a fixed c via split lookup tables (multiplication is F_3-linear)."""
        lo_t, hi_t, w = self._scale_tables(c)
        x = np.asarray(x, dtype=np.int64)
        return trivec.add_enc(lo_t[x % w], hi_t[x // w], self.m)

    def _build_tables(self) -> None:
        exp = np.empty(self.order, dtype=np.int64)
        exp[0] = 1
        filled = 1
        while filled < self.order:
            step = min(filled, self.order - filled)
            g_pow = self.poly_pow(self.generator, filled)
            exp[filled:filled + step] = self.scale_arr(g_pow, exp[:step])
            filled += step
        log = np.full(self.q, -1, dtype=np.int64)
        log[exp] = np.arange(self.order, dtype=np.int64)
        if (log[1:] < 0).any():
            raise AssertionError("generator does not have full order")
        dtype = np.int32 if self.q < 2**31 else np.int64
        self.exp_table = exp.astype(dtype)
        self.log_table = log.astype(dtype)

    # -- scalar operations -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return trivec.add_enc(self._check(a), self._check(b), self.m)

    def neg(self, a: int) -> int:
        return trivec.neg_enc(self._check(a), self.m)

    def sub(self, a: int, b: int) -> int:
        return trivec.sub_enc(self._check(a), self._check(b), self.m)

    def mul(self, a: int, b: int) -> int:
        a, b = self._check(a), self._check(b)
        if a == 0 or b == 0:
            return 0
        if self.has_tables:
            return int(self.exp_table[(int(self.log_table[a]) + int(self.log_table[b])) % self.order])
        return self.poly_mul(a, b)

    def inv(self, a: int) -> int:
        a = self._check(a)
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_%d" % self.q)
        if self.has_tables:
            return int(self.exp_table[(-int(self.log_table[a])) % self.order])
        return self.poly_pow(a, self.order - 1)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        a = self._check(a)
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if e == 0 else 0
        if self.has_tables:
            return int(self.exp_table[(int(self.log_table[a]) * e) % self.order])
        return self.poly_pow(a, e % self.order)

    def log(self, a: int) -> int:
        a = self._check(a)
        if a == 0:
            raise FieldError("log of zero")
        if self.has_tables:
            return int(self.log_table[a])
        # baby-step giant-step would do; fields without tables are large and
        # only reach this through user calls
        raise FieldError(f"discrete log unavailable without tables (m={self.m})")

    def frobenius(self, x: int, j: int = 1) -> int:
        """x ** (3 ** (j mod m))."""
        return self.pow(x, 3 ** (j % self.m))

    def chi(self, x: int) -> int:
        """Quadratic character: 0 at zero, +1 on nonzero squares, -1 otherwise."""
        x = self._check(x)
        if x == 0:
            return 0
        if self.has_tables:
            return -1 if int(self.log_table[x]) & 1 else 1
        return 1 if self.poly_pow(x, self.order // 2) == 1 else -1

    def chi_by_power(self, x: int) -> int:
        """Euler's criterion through polynomial arithmetic (independent of tables)."""
        x = self._check(x)
        if x == 0:
            return 0
        return 1 if self.poly_pow(x, self.order // 2) == 1 else -1

    def sqrt(self, x: int) -> int | None:
        """A square root of x (the one with smaller encoding), or None."""
        x = self._check(x)
        if x == 0:
            return 0
        if self.chi(x) < 0:
            return None
        if self.has_tables:
            r = int(self.exp_table[int(self.log_table[x]) // 2])
        else:
            r = self._tonelli_shanks(x)
        return min(r, self.neg(r))

    def _tonelli_shanks(self, x: int) -> int:
        s, t = 0, self.order
        while t % 2 == 0:
            s, t = s + 1, t // 2
        z = self.find_nonsquare()
        c = self.poly_pow(z, t)
        r = self.poly_pow(x, (t + 1) // 2)
        u = self.poly_pow(x, t)
        while u != 1:
            i, uu = 0, u
            while uu != 1:
                uu = self.poly_mul(uu, uu)
                i += 1
            b = self.poly_pow(c, 2 ** (s - i - 1))
            r = self.poly_mul(r, b)
            c = self.poly_mul(b, b)
            u = self.poly_mul(u, c)
            s = i
        return r

    def find_nonsquare(self) -> int:
        """Smallest-encoding non-square."""
        for x in range(1, self.q):
            if self.chi(x) == -1:
                return x
        raise AssertionError("unreachable")

    def multiplicative_order(self, x: int) -> int:
        x = self._check(x)
        if x == 0:
            raise FieldError("zero has no multiplicative order")
        order = self.order
        for p in _prime_factors(self.order):
            while order % p == 0 and self.pow(x, order // p) == 1:
                order //= p
        return order

    # -- vectorized operations ---------------------------------------------

    def add_arr(self, a, b) -> np.ndarray:
        return trivec.add_enc(a, b, self.m)

    def neg_arr(self, a) -> np.ndarray:
        return trivec.neg_enc(a, self.m)

    def sub_arr(self, a, b) -> np.ndarray:
        return trivec.sub_enc(a, b, self.m)

    def mul_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if not self.has_tables:
            return self.poly_mul_arr(a, b)
        la = self.log_table[a].astype(np.int64)
        lb = self.log_table[b].astype(np.int64)
        out = self.exp_table[(la + lb) % self.order].astype(np.int64)
        return np.where((a == 0) | (b == 0), 0, out)

    def square_arr(self, a) -> np.ndarray:
        return self.mul_arr(a, a)

    def inv_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if (a == 0).any():
            raise ZeroDivisionError("inverse of zero in F_%d" % self.q)
        if not self.has_tables:
            return np.array([self.inv(int(x)) for x in a.ravel()], dtype=np.int64).reshape(a.shape)
        return self.exp_table[(-self.log_table[a].astype(np.int64)) % self.order].astype(np.int64)

    def chi_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if not self.has_tables:
            return np.array([self.chi(int(x)) for x in a.ravel()], dtype=np.int64).reshape(a.shape)
        lg = self.log_table[a].astype(np.int64)
        return np.where(a == 0, 0, 1 - 2 * (lg & 1))

    def sqrt_arr(self, a) -> tuple[np.ndarray, np.ndarray]:
        """(roots, ok): the smaller-encoding root where one exists, ok marks those."""
        a = np.asarray(a, dtype=np.int64)
        if not self.has_tables:
            roots = [self.sqrt(int(x)) for x in a.ravel()]
            ok = np.array([r is not None for r in roots]).reshape(a.shape)
            vals = np.array([r or 0 for r in roots], dtype=np.int64).reshape(a.shape)
            return vals, ok
        lg = self.log_table[a].astype(np.int64)
        ok = (a == 0) | ((lg & 1) == 0)
        r = self.exp_table[np.where(ok & (a != 0), lg // 2, 0)].astype(np.int64)
        r = np.minimum(r, self.neg_arr(r))
        return np.where(a == 0, 0, np.where(ok, r, 0)), ok

    def frobenius_arr(self, a, j: int = 1) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        e = 3 ** (j % self.m)
        if not self.has_tables:
            return np.array([self.pow(int(x), e) for x in a.ravel()], dtype=np.int64).reshape(a.shape)
        lg = self.log_table[a].astype(np.int64)
        out = self.exp_table[(lg * e) % self.order].astype(np.int64)
        return np.where(a == 0, 0, out)

    def eval_poly_arr(self, coeffs: Sequence[int], x) -> np.ndarray:
        """Horner evaluation of a polynomial with F_3 coefficients (constant first)."""
        x = np.asarray(x, dtype=np.int64)
        val = np.zeros(x.shape, dtype=np.int64)
        for c in reversed(coeffs):
            val = self.add_arr(self.mul_arr(val, x), np.int64(c % 3))
        return val


@lru_cache(maxsize=None)
def field(m: int) -> GF3m:
    """Shared, cached field context (contexts are immutable once built)."""
    return GF3m(m)


def subfield_embedding(big: GF3m, small: GF3m) -> np.ndarray:
    """Table of a field embedding F_{3^k} -> F_{3^m}, indexed by encoding.

    The subfield variable is sent to the smallest-encoding root, inside the
    big field, of the subfield's modulus; the map is then F_3-linear in the
    polynomial basis, hence a ring homomorphism.
    """
    if big.m % small.m:
        raise FieldError(f"F_3^{small.m} is not a subfield of F_3^{big.m}")
    cand = big.elements()
    if big.has_tables:
        step = (big.q - 1) // (small.q - 1)
        cand = np.sort(np.concatenate([[0], big.exp_table[np.arange(0, big.order, step)].astype(np.int64)]))
    vals = big.eval_poly_arr(small.modulus, cand)
    roots = cand[vals == 0]
    if not roots.size:
        raise AssertionError("subfield modulus has no root in the extension")
    r = int(roots[0])
    basis = [1]
    for _ in range(small.m - 1):
        basis.append(big.mul(basis[-1], r))
    img = np.zeros(small.q, dtype=np.int64)
    ys = small.elements()
    digs = trivec.digits(ys, small.m)
    for i, b in enumerate(basis):
        term = np.where(digs[:, i] == 1, b, np.where(digs[:, i] == 2, big.neg(b), 0))
        img = big.add_arr(img, term)
    return img


def subfield_embed(big: GF3m, y: int) -> int:
    """Embed an element of F_{3^{m/2}} (encoded in that field's basis)."""
    if big.m % 2:
        raise FieldError("subfield_embed needs an even extension degree")
    return int(_embedding_table(big.m)[y])


@lru_cache(maxsize=None)
def _embedding_table(m: int) -> np.ndarray:
    return subfield_embedding(field(m), field(m // 2))
