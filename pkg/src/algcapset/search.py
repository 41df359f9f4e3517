"""Searches for large capset families of parabolas.

All searches work on nonzero field elements indexed by ``e - 1`` (so the
index order is the encoding order) and share a precomputed compatibility
table.  Multiplying every coefficient by one scalar preserves capsets, so a
badness test for {a, c, d} reduces to one for {1, c/a, d/a}; the table
stores those normalized answers in discrete-log coordinates.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from .field import field
from .parabolas import (CoeffFamily, family_is_capset, frobenius_orbit,
                        full_orbit_representatives)

log = logging.getLogger(__name__)

DEFAULT_NODE_CEILING = 50_000_000
BRUTE_MAX_N = 14


class SearchBudgetError(RuntimeError):
    pass


class Compat:
    """Badness of coefficient multisets for one field, as gatherable masks."""

    def __init__(self, m: int):
        F = field(m)
        if not F.has_tables:
            raise SearchBudgetError(f"searching needs log tables; m={m} is too large")
        self.m = m
        self.F = F
        Q = F.order
        self.Q = Q
        exp = F.exp_table.astype(np.int64)
        lg = F.log_table.astype(np.int64)
        # rel[u, v]: {1, g^u, g^v} is bad (u == 0 covers the doubled {1, 1, g^v})
        # d = -(r^2 + c) / (1 + r)^2 over r not in {0, -1}; see bad_thirds
        r = F.elements()
        one_r = F.add_arr(r, np.int64(1))
        keep = (r != 0) & (one_r != 0)
        r, one_r = r[keep], one_r[keep]
        r2 = F.square_arr(r)
        scale = F.neg_arr(F.inv_arr(F.square_arr(one_r)))
        rel = np.zeros((Q, Q), dtype=bool)
        block = max(1, (1 << 22) // r.size)
        for s in range(0, Q, block):
            c = exp[s:s + block, None]
            d = F.mul_arr(F.add_arr(r2[None, :], c), scale[None, :])
            rows = np.broadcast_to(np.arange(s, s + c.shape[0])[:, None], d.shape)
            rel[rows[d != 0], lg[d[d != 0]]] = True
        rel[0, 0] = False  # {1, 1, 1}: one parabola
        self.rel = rel
        self.log_of = lg[1:]  # log of element at index i (element i + 1)

    def forbidden(self, a: int, c: int) -> np.ndarray:
        """Mask over indices of d with {a, c, d} bad; a, c are indices (a != c allowed equal)."""
        la, lc = self.log_of[a], self.log_of[c]
        return self.rel[(lc - la) % self.Q, (self.log_of - la) % self.Q]

    def compatible(self, a: int) -> np.ndarray:
        """Mask of d such that neither {a, a, d} nor {a, d, d} is bad (and d != a)."""
        la = self.log_of[a]
        ok = ~self.rel[0, (self.log_of - la) % self.Q] & ~self.rel[0, (la - self.log_of) % self.Q]
        ok[a] = False
        return ok

    def admissible_after(self, S: list[int], cand: np.ndarray, new: int) -> np.ndarray:
        out = cand & self.compatible(new)
        for a in S:
            out &= ~self.forbidden(a, new)
        return out

    def family(self, idx) -> CoeffFamily:
        return CoeffFamily(self.m, tuple(int(i) + 1 for i in idx))


@lru_cache(maxsize=4)
def compat(m: int) -> Compat:
    return Compat(m)


def verify_family(fam: CoeffFamily) -> str:
    """Confirm a found family; brute force where 3^(2m) is affordable."""
    if 2 * fam.m <= BRUTE_MAX_N:
        if not family_is_capset(fam, "brute").verdict:
            raise AssertionError(f"search produced a non-capset family {fam}")
        return "brute"
    if not family_is_capset(fam, "fast").verdict:
        raise AssertionError(f"search produced a non-capset family {fam}")
    return "fast"


@dataclass
class SearchState:
    m: int
    mode: str
    best: list[int] = dc_field(default_factory=list)
    nodes: int = 0
    restarts: int = 0
    seed: int | None = None
    cursor: list[int] = dc_field(default_factory=list)
    done: bool = False
    started: float = dc_field(default_factory=time.perf_counter)

    def to_json(self) -> dict:
        return {"format": 1, "m": self.m, "mode": self.mode, "best": [i + 1 for i in self.best],
                "nodes": self.nodes, "restarts": self.restarts, "seed": self.seed,
                "cursor": [i + 1 for i in self.cursor], "done": self.done}

    @classmethod
    def from_json(cls, data: dict) -> "SearchState":
        return cls(m=data["m"], mode=data["mode"], best=[e - 1 for e in data["best"]],
                   nodes=data.get("nodes", 0), restarts=data.get("restarts", 0), seed=data.get("seed"),
                   cursor=[e - 1 for e in data.get("cursor", [])], done=data.get("done", False))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)


@dataclass
class SearchResult:
    family: CoeffFamily
    mode: str
    verified_by: str
    stats: dict

    @property
    def K(self) -> int:
        return self.family.K

    @property
    def size(self) -> int:
        return self.family.size

    def to_json(self) -> dict:
        return {**self.family.to_json(), "search": self.mode, "verified_by": self.verified_by, **self.stats}


def _progress(state: SearchState, depth: int, every: int) -> None:
    if every and state.nodes % every == 0:
        dt = time.perf_counter() - state.started
        log.info("nodes=%d rate=%d/s depth=%d best_K=%d", state.nodes,
                 int(state.nodes / dt) if dt else 0, depth, len(state.best))


def exhaustive_search(m: int, max_K: int | None = None, node_ceiling: int = DEFAULT_NODE_CEILING,
                      checkpoint: str | None = None, resume: SearchState | None = None,
                      progress_every: int = 0) -> SearchResult:
    """Branch and bound for a largest coefficient family, with 1 in the family.

    Uniform scaling sends any family to one containing 1, so fixing the
    first coefficient loses no optimum.  Candidates are taken in increasing
    encoding; a branch is cut when its size plus remaining candidates cannot
    beat the incumbent, so the first family found at each size is the
    encoding-lexicographically smallest one.  ``resume`` restarts from a
    checkpoint: the incumbent is restored and subtrees lexicographically
    before the stored cursor are skipped.
    """
    if 3**m - 1 > 8192:
        raise SearchBudgetError(f"exhaustive search at m={m} is out of reach")
    C = compat(m)
    state = resume or SearchState(m=m, mode="exhaustive")
    best = list(state.best)
    skip_to = tuple(state.cursor)
    start_nodes = state.nodes

    root = [0]
    cand = C.compatible(0)
    cand[0] = False

    def dfs(S: list[int], cand: np.ndarray, lo: int) -> bool:
        nonlocal best
        state.nodes += 1
        if state.nodes - start_nodes > node_ceiling:
            state.cursor = list(S)
            state.best = best
            if checkpoint:
                state.save(checkpoint)
            raise SearchBudgetError(f"node ceiling {node_ceiling} exceeded at m={m}")
        _progress(state, len(S), progress_every)
        if len(S) > len(best):
            best = list(S)
            state.best = best
            if checkpoint:
                state.cursor = list(S)
                state.save(checkpoint)
            if max_K is not None and len(best) >= max_K:
                return True
        idx = np.flatnonzero(cand[lo:]) + lo
        if len(S) + idx.size <= len(best):
            return False
        for pos, i in enumerate(idx):
            if len(S) + idx.size - pos <= len(best):
                break
            i = int(i)
            prefix = tuple(S) + (i,)
            if skip_to and prefix < skip_to[:len(prefix)]:
                continue
            sub = C.admissible_after(S, cand, i)
            if dfs(S + [i], sub, i + 1):
                return True
        return False

    dfs(root, cand, 1)
    state.done = True
    state.cursor = []
    fam = C.family(best)
    if checkpoint:
        state.save(checkpoint)
    return SearchResult(fam, "exhaustive", verify_family(fam),
                        {"nodes": state.nodes, "wall_time_ms": int((time.perf_counter() - state.started) * 1000)})


def _grow(C: Compat, rng: np.random.Generator, start: list[int]) -> list[int]:
    S: list[int] = []
    cand = np.ones(C.Q, dtype=bool)
    for i in start:
        if not cand[i]:
            break
        cand = C.admissible_after(S, cand, i)
        S.append(i)
    while True:
        idx = np.flatnonzero(cand)
        if not idx.size:
            return S
        i = int(rng.choice(idx))
        cand = C.admissible_after(S, cand, i)
        S.append(i)


def random_search(m: int, seed: int = 0, budget: int = 1000, floor: CoeffFamily | None = None,
                  progress_every: int = 0) -> SearchResult:
    """Seeded random restarts, each growing a family by random admissible picks.

    Every restart starts from the coefficient 1 (scaling again).  ``budget``
    counts restarts.  If ``floor`` is given and nothing larger is found, the
    floor family is returned and flagged as such.
    """
    C = compat(m)
    rng = np.random.default_rng(seed)
    state = SearchState(m=m, mode="random", seed=seed)
    best: list[int] = []
    for _ in range(budget):
        S = _grow(C, rng, [0])
        state.restarts += 1
        state.nodes += len(S)
        if len(S) > len(best) or (len(S) == len(best) and sorted(S) < sorted(best)):
            best = S
        if progress_every and state.restarts % progress_every == 0:
            log.info("restarts=%d best_K=%d", state.restarts, len(best))
    fam = C.family(sorted(best))
    source = "random"
    if floor is not None and floor.K > fam.K:
        fam, source = floor, "floor"
    return SearchResult(fam, "random", verify_family(fam),
                        {"seed": seed, "budget": budget, "restarts": state.restarts, "source": source,
                         "random_K": len(best),
                         "wall_time_ms": int((time.perf_counter() - state.started) * 1000)})


def orbit_search(m: int, k: int = 1, budget: int = 10**6) -> SearchResult | None:
    """Find k full Frobenius orbits whose union is a capset family.

    Orbits are named by their smallest element.  For k = 1 every orbit is
    tested; for k > 1 only orbits that work on their own can take part, and
    tuples are grown depth first in increasing representative order, each
    extension screened with the compatibility table.  ``budget`` caps the
    number of extension attempts.
    """
    if m % 2:
        raise ValueError("orbit families are considered for even m")
    F = field(m)
    C = compat(m)
    reps = full_orbit_representatives(F)
    orbits = {int(r): frobenius_orbit(F, int(r)) for r in reps}
    good = [r for r in orbits if family_is_capset(CoeffFamily(m, tuple(orbits[r])), "fast").verdict]
    attempts = 0
    found: list[int] | None = None

    def admissible(members: list[int], extra: list[int]) -> bool:
        S = list(members)
        cand = np.ones(C.Q, dtype=bool)
        for a in S:
            cand &= C.compatible(a)
        for x, a in enumerate(S):
            for c in S[x + 1:]:
                cand &= ~C.forbidden(a, c)
        for e in extra:
            if not cand[e]:
                return False
            cand = C.admissible_after(S, cand, e)
            S.append(e)
        return True

    def extend(chosen: list[int], start: int) -> bool:
        nonlocal attempts, found
        if len(chosen) == k:
            found = list(chosen)
            return True
        members = [e - 1 for r in chosen for e in orbits[r]]
        for pos in range(start, len(good)):
            attempts += 1
            if attempts > budget:
                return False
            r = good[pos]
            if admissible(members, [e - 1 for e in orbits[r]]):
                if extend(chosen + [r], pos + 1):
                    return True
        return False

    extend([], 0)
    if found is None:
        return None
    fam = CoeffFamily(m, tuple(e for r in found for e in orbits[r]))
    return SearchResult(fam, "orbit", verify_family(fam),
                        {"k": k, "representatives": found, "attempts": attempts,
                         "valid_single_orbits": len(good)})
