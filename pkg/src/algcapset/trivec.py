"""Points of F_3^n and carry-free mod-3 arithmetic.

A point is exposed to callers as a tuple of trits.  Internally, collections of
points are numpy int64 arrays of base-3 encodings (trit ``i`` is the digit of
weight ``3**i``).  Tritwise sums of encodings are computed by chunked lookup
tables over 7-trit blocks, so ``third`` of two encodings is a handful of
gathers and never needs a round trip through digit vectors.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

CHUNK = 7
WIDTH = 3**CHUNK

Point = tuple[int, ...]


class DimensionError(ValueError):
    pass


@lru_cache(maxsize=None)
def _chunk_tables() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(ADD, THIRD, NEG) tables over one 7-trit chunk, flattened row-major."""
    vals = np.arange(WIDTH, dtype=np.int32)
    add = np.zeros((WIDTH, WIDTH), dtype=np.int32)
    third = np.zeros((WIDTH, WIDTH), dtype=np.int32)
    neg = np.zeros(WIDTH, dtype=np.int32)
    for i in range(CHUNK):
        d = ((vals // 3**i) % 3).astype(np.int8)
        s = d[:, None] + d[None, :]
        add += (s % 3).astype(np.int32) * 3**i
        third += ((3 - s) % 3).astype(np.int32) * 3**i
        neg += ((3 - d) % 3).astype(np.int32) * 3**i
    return add.ravel(), third.ravel(), neg


def _nchunks(n: int) -> int:
    return max(1, -(-n // CHUNK))


def _binary(table: np.ndarray, a, b, n: int):
    scalar = np.isscalar(a) and np.isscalar(b)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    scale = 1
    for _ in range(_nchunks(n)):
        out += table[(a % WIDTH) * WIDTH + (b % WIDTH)] * np.int64(scale)
        a = a // WIDTH
        b = b // WIDTH
        scale *= WIDTH
    return int(out) if scalar else out


def add_enc(a, b, n: int):
    """Tritwise a + b on encodings (ints or arrays)."""
    return _binary(_chunk_tables()[0], a, b, n)


def third_enc(a, b, n: int):
    """Tritwise -(a + b): the third point on the line through a and b."""
    return _binary(_chunk_tables()[1], a, b, n)


def neg_enc(a, n: int):
    neg = _chunk_tables()[2]
    scalar = np.isscalar(a)
    a = np.asarray(a, dtype=np.int64)
    out = np.zeros(a.shape, dtype=np.int64)
    scale = 1
    for _ in range(_nchunks(n)):
        out += neg[a % WIDTH] * np.int64(scale)
        a = a // WIDTH
        scale *= WIDTH
    return int(out) if scalar else out


def sub_enc(a, b, n: int):
    return add_enc(a, neg_enc(b, n), n)


def encode(trits: Sequence[int]) -> int:
    val = 0
    for t in reversed(trits):
        if t not in (0, 1, 2):
            raise ValueError(f"trit out of range: {t!r}")
        val = 3 * val + t
    return val


def decode(enc: int, n: int) -> Point:
    out = []
    for _ in range(n):
        enc, r = divmod(enc, 3)
        out.append(r)
    return tuple(out)


def digits(enc, n: int) -> np.ndarray:
    """Trit matrix of shape (len(enc), n), int8, trit 0 first."""
    enc = np.asarray(enc, dtype=np.int64)
    out = np.empty(enc.shape + (n,), dtype=np.int8)
    for i in range(n):
        out[..., i] = enc % 3
        enc = enc // 3
    return out


def from_digits(digs: np.ndarray) -> np.ndarray:
    digs = np.asarray(digs, dtype=np.int64)
    n = digs.shape[-1]
    return digs @ (3 ** np.arange(n, dtype=np.int64))


def _check_dims(P: Point, Q: Point) -> None:
    if len(P) != len(Q):
        raise DimensionError(f"dimension mismatch: {len(P)} vs {len(Q)}")


def pt_add(P: Point, Q: Point) -> Point:
    _check_dims(P, Q)
    return tuple((a + b) % 3 for a, b in zip(P, Q))


def pt_neg(P: Point) -> Point:
    return tuple((-a) % 3 for a in P)


def third_point(P: Point, Q: Point) -> Point:
    """The unique R with {P, Q, R} an F_3-line, i.e. R = -(P + Q)."""
    _check_dims(P, Q)
    if tuple(P) == tuple(Q):
        raise ValueError("third_point needs two distinct points")
    return tuple((-(a + b)) % 3 for a, b in zip(P, Q))


def flatten(coords: Iterable[int], m: int) -> int:
    """Encoding of a vector of F_{3^m} elements viewed in F_3^{dm}.

    Coordinate 0 supplies the lowest m trits; each coordinate contributes its
    polynomial-basis digits, constant term first.  With field elements encoded
    base 3 the same way, this is just positional notation in base 3^m.
    """
    q = 3**m
    val = 0
    for c in reversed(list(coords)):
        val = val * q + int(c)
    return val


def flatten_arr(coords: Sequence[np.ndarray], m: int) -> np.ndarray:
    q = np.int64(3**m)
    out = np.zeros(np.broadcast(*coords).shape, dtype=np.int64)
    for c in reversed(coords):
        out = out * q + np.asarray(c, dtype=np.int64)
    return out


def unflatten_arr(enc, d: int, m: int) -> list[np.ndarray]:
    q = 3**m
    enc = np.asarray(enc, dtype=np.int64)
    out = []
    for _ in range(d):
        out.append(enc % q)
        enc = enc // q
    return out


class CapSet:
    """A duplicate-free point set in F_3^n, kept sorted by encoding.

    ``points`` holds the encodings; ``index`` is a boolean bitmap over the
    ambient space when it fits ``bitmap_limit`` cells, else membership falls
    back to binary search.
    """

    bitmap_limit = 3**16

    def __init__(self, n: int, points=(), meta: dict | None = None):
        if n < 0:
            raise ValueError("dimension must be non-negative")
        self.n = n
        arr = np.unique(np.asarray(list(points) if not isinstance(points, np.ndarray) else points,
                                   dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= 3**n):
            raise DimensionError(f"point encoding outside F_3^{n}")
        self.points = arr
        self.meta = dict(meta or {})
        self._index: np.ndarray | None = None

    @classmethod
    def from_tuples(cls, pts: Iterable[Sequence[int]], n: int | None = None) -> "CapSet":
        pts = [tuple(p) for p in pts]
        if n is None:
            if not pts:
                raise ValueError("cannot infer dimension of an empty set")
            n = len(pts[0])
        for p in pts:
            if len(p) != n:
                raise DimensionError(f"point {p} is not in F_3^{n}")
        return cls(n, [encode(p) for p in pts])

    def __len__(self) -> int:
        return int(self.points.size)

    def __iter__(self):
        return (decode(int(e), self.n) for e in self.points)

    def __contains__(self, item) -> bool:
        if isinstance(item, (tuple, list)):
            if len(item) != self.n:
                return False
            item = encode(item)
        return bool(self.contains(np.int64(item)))

    def __eq__(self, other) -> bool:
        return isinstance(other, CapSet) and self.n == other.n and np.array_equal(self.points, other.points)

    def __repr__(self) -> str:
        return f"CapSet(n={self.n}, size={len(self)})"

    @property
    def index(self) -> np.ndarray | None:
        if self._index is None and 3**self.n <= self.bitmap_limit:
            bm = np.zeros(3**self.n, dtype=bool)
            bm[self.points] = True
            self._index = bm
        return self._index

    def contains(self, enc):
        """Vectorized membership test on encodings."""
        bm = self.index
        if bm is not None:
            return bm[enc]
        enc = np.asarray(enc, dtype=np.int64)
        pos = np.searchsorted(self.points, enc)
        pos = np.minimum(pos, max(len(self) - 1, 0))
        if not len(self):
            return np.zeros(enc.shape, dtype=bool)
        return self.points[pos] == enc

    def tuples(self) -> list[Point]:
        return list(self)

    def union(self, other: "CapSet") -> "CapSet":
        if other.n != self.n:
            raise DimensionError("dimension mismatch")
        return CapSet(self.n, np.concatenate([self.points, other.points]))

    def with_points(self, encs) -> "CapSet":
        return CapSet(self.n, np.concatenate([self.points, np.asarray(encs, dtype=np.int64)]), self.meta)


def write_capset(path, S: CapSet) -> None:
    """Text format: ``n=<int>`` then one point per line, trit 0 first."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"n={S.n}\n")
        digs = digits(S.points, S.n)
        for row in digs:
            fh.write("".join("012"[t] for t in row))
            fh.write("\n")


def format_point(enc: int, n: int) -> str:
    return "".join(str(t) for t in decode(int(enc), n))


class CapsetFileError(ValueError):
    pass


def read_capset(path) -> CapSet:
    with open(path, encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise CapsetFileError("missing 'n=<int>' header")
    try:
        n = int(lines[0][2:])
    except ValueError as exc:
        raise CapsetFileError(f"bad header {lines[0]!r}") from exc
    encs = []
    for lineno, ln in enumerate(lines[1:], start=2):
        if len(ln) != n or set(ln) - set("012"):
            raise CapsetFileError(f"line {lineno}: expected {n} digits in 0-2, got {ln!r}")
        encs.append(encode([int(c) for c in ln]))
    if len(set(encs)) != len(encs):
        raise CapsetFileError("duplicate points")
    return CapSet(n, encs)
