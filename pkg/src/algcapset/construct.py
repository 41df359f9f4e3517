"""Explicit capset constructions: two parabolas, small complete capsets, the elliptic quadric."""

from __future__ import annotations

import numpy as np

from . import verify
from .field import field, subfield_embedding, FieldError
from .trivec import CapSet, flatten_arr


def two_parabolas(m: int) -> CapSet:
    """{(x, x^2), (x, -x^2) : x != 0} in F_{3^m}^2, flattened to F_3^{2m}."""
    F = field(m)
    x = F.nonzero()
    y = F.square_arr(x)
    pts = np.concatenate([flatten_arr([x, y], m), flatten_arr([x, F.neg_arr(y)], m)])
    return CapSet(2 * m, pts, meta={"construction": "two-parabolas", "m": m, **_field_meta(F)})


def _field_meta(F) -> dict:
    return {"modulus": list(F.modulus), "generator": F.generator}


def nonsquare_patch(m: int) -> np.ndarray:
    """The elements lambda * (1 + x sqrt(d))^2, x in F_{3^{m/2}}^*, of F_{3^m}.

    d is the smallest non-square of the half-degree subfield (pushed through
    the subfield embedding) and lambda the smallest non-square of F_{3^m}.
    Taking -1 instead of +1 in front gives the same set, since x and -x both
    range over the subfield.  Returned sorted, as encodings.
    """
    if m % 2:
        raise FieldError("nonsquare_patch needs an even extension degree")
    F = field(m)
    K = field(m // 2)
    emb = subfield_embedding(F, K)
    d = int(emb[K.find_nonsquare()])
    root_d = F.sqrt(d)
    lam = F.find_nonsquare()
    xs = emb[K.nonzero()]
    vals = []
    for sign in (1, F.neg(1)):
        base = F.add_arr(np.int64(sign), F.mul_arr(xs, np.int64(root_d)))
        vals.append(F.mul_arr(np.int64(lam), F.square_arr(base)))
    return np.unique(np.concatenate(vals))


def patch_parameters(m: int) -> dict:
    F = field(m)
    K = field(m // 2)
    emb = subfield_embedding(F, K)
    return {"lambda": F.find_nonsquare(), "d": int(emb[K.find_nonsquare()]),
            "d_subfield": K.find_nonsquare()}


def _certify(S: CapSet, budget_bits: int) -> tuple[bool, bool]:
    """(is capset, is complete) for S."""
    if not verify.is_capset(S).verdict:
        return False, False
    return True, verify.is_complete(S, budget_bits=budget_bits).verdict


def complete_capset(n: int, certified: bool = True,
                    budget_bits: int = verify.DEFAULT_BUDGET_BITS) -> CapSet:
    """A complete capset in F_3^n of size O(3^(n/2)).

    Even n = 2m: the two parabolas, plus for even m the points (0, b) with b
    in the non-square patch.  Odd n: the even construction times {0, 1} in
    the new last coordinate.  When ``certified`` the result is checked and,
    if the literal construction is not complete, greedily completed: first
    inside the non-square points of the line x = 0, then in the whole space.
    ``meta['fallback_used']`` records whether that happened.
    """
    if n < 0:
        raise ValueError("dimension must be >= 0")
    if certified and 3**n > budget_bits:
        raise verify.BudgetError(f"cannot certify completeness in F_3^{n} within {budget_bits} cells")
    meta: dict = {"construction": "complete", "n": n}
    if n == 0:
        S = CapSet(0, [0])
    elif n % 2 == 0:
        m = n // 2
        S = two_parabolas(m)
        F = field(m)
        meta.update({"m": m, **_field_meta(F)})
        if m % 2 == 0:
            patch = nonsquare_patch(m)
            meta.update(patch_parameters(m))
            meta["patch_size"] = int(patch.size)
            S = S.with_points(patch * F.q)
    else:
        base = complete_capset(n - 1, certified=certified, budget_bits=budget_bits)
        lift = np.int64(3 ** (n - 1))
        S = CapSet(n, np.concatenate([base.points, base.points + lift]))
        inherited = {k: v for k, v in base.meta.items() if k not in ("construction", "n", "size", "verified")}
        meta.update(inherited)
        meta["base_fallback_used"] = base.meta.get("fallback_used", False)

    meta["fallback_used"] = False
    if certified:
        cap, complete = _certify(S, budget_bits)
        if not cap:
            raise AssertionError(f"construction for n={n} is not a capset")
        if not complete:
            meta["fallback_used"] = True
            meta["literal_size"] = len(S)
            if n % 2 == 0 and n >= 2:
                F = field(n // 2)
                nonsq = np.flatnonzero(F.chi_arr(F.elements()) == -1).astype(np.int64)
                S = verify.greedy_complete(S, pool=nonsq * F.q, budget_bits=budget_bits)
            S = verify.greedy_complete(S, budget_bits=budget_bits)
            cap, complete = _certify(S, budget_bits)
            if not (cap and complete):
                raise AssertionError("greedy completion failed to certify")
        meta["verified"] = True
    else:
        meta["verified"] = False
    if n % 2 and meta.get("base_fallback_used"):
        meta["fallback_used"] = True
    meta["size"] = len(S)
    meta["size_within_3_sqrt_3n"] = len(S) ** 2 <= 9 * 3**n
    S.meta = meta
    return S


def elliptic_quadric(m: int) -> CapSet:
    """{(x, y, x^2 - lambda y^2)} in F_{3^m}^3 with lambda the smallest non-square."""
    F = field(m)
    lam = F.find_nonsquare()
    x, y = np.meshgrid(F.elements(), F.elements(), indexing="ij")
    x, y = x.ravel(), y.ravel()
    z = F.sub_arr(F.square_arr(x), F.mul_arr(np.int64(lam), F.square_arr(y)))
    return CapSet(3 * m, flatten_arr([x, y, z], m),
                  meta={"construction": "quadric", "m": m, "lambda": lam, **_field_meta(F)})


def conic(m: int) -> CapSet:
    """The full parabola {(x, x^2) : x in F_{3^m}} in F_3^{2m}."""
    F = field(m)
    x = F.elements()
    return CapSet(2 * m, flatten_arr([x, F.square_arr(x)], m),
                  meta={"construction": "conic", "m": m, **_field_meta(F)})
