"""Capset and completeness certificates with checkable witnesses."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import trivec
from .trivec import CapSet, WIDTH, _chunk_tables, _nchunks

DEFAULT_BUDGET_BITS = 2**31
ROW_BLOCK_CELLS = 1 << 22


class NotACapsetError(ValueError):
    def __init__(self, report: "VerificationReport"):
        super().__init__("input is not a capset")
        self.report = report


class BudgetError(MemoryError):
    pass


@dataclass
class VerificationReport:
    kind: str
    n: int
    verdict: bool
    witness: tuple[int, ...] | None = None
    pairs_examined: int = 0
    coverage_size: int = 0
    wall_time_ms: int = 0
    extra: dict = dc_field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.verdict

    def witness_points(self) -> list[trivec.Point]:
        return [trivec.decode(w, self.n) for w in (self.witness or ())]

    def to_json(self) -> dict:
        out = {
            "format": 1,
            "kind": self.kind,
            "n": self.n,
            "verdict": self.verdict,
            "witness": None,
            "pairs_examined": self.pairs_examined,
            "coverage_size": self.coverage_size,
            "wall_time_ms": self.wall_time_ms,
        }
        if self.witness is not None:
            out["witness"] = [trivec.format_point(w, self.n) for w in self.witness]
        out.update(self.extra)
        return out


def lower_bound_check(N: int, n: int) -> bool:
    """Necessary size condition for a complete capset: N(N+1)/2 >= 3^n."""
    if N < 0 or n < 1:
        raise ValueError("need N >= 0 and n >= 1")
    return N * (N + 1) // 2 >= 3**n


def _row_chunks(points: np.ndarray, n: int) -> list[np.ndarray]:
    out = []
    x = points.copy()
    for _ in range(_nchunks(n)):
        out.append(x % WIDTH)
        x //= WIDTH
    return out


class _PairScan:
    """Walks all pairs i < j of a sorted point array in row blocks."""

    def __init__(self, S: CapSet):
        self.S = S
        self.n = S.n
        self.pts = S.points
        self.N = len(S)
        self.chunks = _row_chunks(self.pts, S.n)
        self.third = _chunk_tables()[1]
        block = max(1, ROW_BLOCK_CELLS // max(self.N, 1))
        self.blocks = [(s, min(s + block, self.N)) for s in range(0, max(self.N - 1, 0), block)]

    def thirds(self, s: int, e: int) -> tuple[np.ndarray, np.ndarray]:
        """Third points for rows [s, e) against columns (s, N), and the j > i mask."""
        idx = np.zeros((e - s, self.N - s - 1), dtype=np.int64)
        scale = 1
        for c in self.chunks:
            idx += self.third[c[s:e, None] * WIDTH + c[None, s + 1:]] * np.int64(scale)
            scale *= WIDTH
        rows = np.arange(s, e)[:, None]
        cols = np.arange(s + 1, self.N)[None, :]
        return idx, cols > rows

    def _growing_blocks(self):
        # small blocks first: most non-capsets are caught in the first rows
        s, size = 0, 16
        cap = max(1, ROW_BLOCK_CELLS // max(self.N, 1))
        while s < self.N - 1:
            e = min(s + size, self.N)
            yield s, e
            s, size = e, min(2 * size, cap)

    def first_violation(self) -> tuple[int, ...] | None:
        # the lex-smallest violating triple has its least point in the first hit block
        for s, e in self._growing_blocks():
            idx, mask = self.thirds(s, e)
            hit = self.S.contains(idx) & mask
            if hit.any():
                r, c = np.nonzero(hit)
                a = self.pts[s + r]
                b = self.pts[s + 1 + c]
                t = idx[r, c]
                triples = np.sort(np.stack([a, b, t], axis=1), axis=1)
                best = min(map(tuple, triples.tolist()))
                return best
        return None

    def coverage(self, threads: int = 1) -> np.ndarray:
        size = 3**self.n

        def work(blocks):
            cov = np.zeros(size, dtype=bool)
            for s, e in blocks:
                idx, mask = self.thirds(s, e)
                cov[idx[mask]] = True
            return cov

        if threads <= 1 or len(self.blocks) < 2:
            cov = work(self.blocks)
        else:
            parts = [self.blocks[i::threads] for i in range(threads)]
            with ThreadPoolExecutor(threads) as ex:
                covs = list(ex.map(work, parts))
            cov = covs[0]
            for other in covs[1:]:
                cov |= other
        return cov


def _pairs(N: int) -> int:
    return N * (N - 1) // 2


def is_capset(S: CapSet) -> VerificationReport:
    """No unordered pair of S has its third point in S."""
    t0 = time.perf_counter()
    witness = _PairScan(S).first_violation()
    return VerificationReport(
        kind="capset",
        n=S.n,
        verdict=witness is None,
        witness=witness,
        pairs_examined=_pairs(len(S)),
        wall_time_ms=int((time.perf_counter() - t0) * 1000),
    )


def _check_budget(n: int, budget_bits: int) -> None:
    if 3**n > budget_bits:
        raise BudgetError(f"3^{n} coverage cells exceed the budget of {budget_bits}")


def coverage_map(S: CapSet, threads: int = 1, budget_bits: int = DEFAULT_BUDGET_BITS) -> np.ndarray:
    """Bitmap of S together with every third point of a pair of S."""
    _check_budget(S.n, budget_bits)
    cov = _PairScan(S).coverage(threads)
    cov[S.points] = True
    return cov


def uncovered(S: CapSet, threads: int = 1, budget_bits: int = DEFAULT_BUDGET_BITS) -> np.ndarray:
    """Encodings of points neither in S nor on a line through two points of S."""
    return np.flatnonzero(~coverage_map(S, threads, budget_bits))


def is_complete(S: CapSet, threads: int = 1, budget_bits: int = DEFAULT_BUDGET_BITS) -> VerificationReport:
    """S is a capset and S plus its pair-third-points is the whole space.

    Raises NotACapsetError when S fails the capset test and BudgetError when
    the coverage bitmap would exceed ``budget_bits`` cells.
    """
    _check_budget(S.n, budget_bits)
    t0 = time.perf_counter()
    cap = is_capset(S)
    if not cap.verdict:
        raise NotACapsetError(cap)
    cov = coverage_map(S, threads, budget_bits)
    missing = np.flatnonzero(~cov)
    return VerificationReport(
        kind="complete",
        n=S.n,
        verdict=missing.size == 0,
        witness=(int(missing[0]),) if missing.size else None,
        pairs_examined=_pairs(len(S)),
        coverage_size=int(cov.sum()),
        wall_time_ms=int((time.perf_counter() - t0) * 1000),
        extra={"uncovered_count": int(missing.size)},
    )


def brute_is_capset(S: CapSet) -> bool:
    """Definitional check over all ordered triples of distinct points."""
    pts = [tuple(p) for p in S]
    N = len(pts)
    for i in range(N):
        for j in range(i + 1, N):
            for k in range(j + 1, N):
                if all((a + b + c) % 3 == 0 for a, b, c in zip(pts[i], pts[j], pts[k])):
                    return False
    return True


def greedy_complete(S: CapSet, pool=None, budget_bits: int = DEFAULT_BUDGET_BITS) -> CapSet:
    """Extend S by the smallest admissible pool point until none is left.

    Blocked points (S and thirds of its pairs) only ever accumulate, so one
    ascending pass over the pool reproduces the repeated-minimum greedy rule.
    """
    if not is_capset(S).verdict:
        raise NotACapsetError(is_capset(S))
    n = S.n
    blocked = coverage_map(S, budget_bits=budget_bits)
    pool = np.arange(3**n, dtype=np.int64) if pool is None else np.unique(np.asarray(pool, dtype=np.int64))
    pts = list(S.points.tolist())
    arr = np.asarray(pts, dtype=np.int64)
    pos, window = 0, 4096
    while pos < pool.size:
        win = pool[pos:pos + window]
        free = np.flatnonzero(~blocked[win])
        if not free.size:
            pos += window
            continue
        k = int(free[0])
        p = int(win[k])
        if arr.size:
            blocked[trivec.third_enc(np.int64(p), arr, n)] = True
        blocked[p] = True
        pts.append(p)
        arr = np.append(arr, np.int64(p))
        pos += k + 1
    return CapSet(n, pts, S.meta)
