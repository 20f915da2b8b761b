"""Finite field towers F_{p^N} with all subfields in one ambient model.

Everything residue-field shaped in this package (residue fields of the
local tower, matrix entries in the finite linear groups, eigenvalues of
elliptic elements) lives in a single ambient field F_{p^N}.  Elements are
integers in [0, p^N): the base-p digits are the coordinates with respect
to the polynomial basis 1, x, ..., x^{N-1} of F_p[x]/(poly).  The subfield
F_{p^d} for d | N is realised inside the ambient field, generated by
gamma^{(p^N-1)/(p^d-1)} where gamma is the fixed primitive root x.

Multiplication runs on exp/log tables built during a "primitivity walk":
repeatedly multiply by x and reduce; the candidate polynomial is primitive
exactly when the walk first returns to 1 after p^N - 1 steps.  Conway
polynomials are used where we have them tabulated so that towers built by
different processes agree on the meaning of gamma; anything else falls
back to the lexicographically smallest primitive polynomial.

Tables can be cached on disk (see `build-cache` in the CLI).  The format
is deliberately dumb: magic, version, then little-endian int64 words.
"""

from __future__ import annotations

import os
import struct
from math import gcd

CACHE_ENV = "TLW_CACHE_DIR"
_CACHE_MAGIC = b"TLTW"
_CACHE_VERSION = 1

# Add tables cost card^2 ints; beyond this we add digit-wise.
_ADD_TABLE_MAX_CARD = 512

# Conway polynomials (low degree first, monic) for the (p, N) pairs the
# engine actually exercises.  Verified primitive at construction time, so
# a typo here fails loudly rather than corrupting gamma.
CONWAY = {
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
}


class CacheError(Exception):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _primitivity_walk(p: int, deg: int, poly: tuple[int, ...]) -> list[int] | None:
    """Return the exp table for gamma = x if poly is primitive, else None.

    poly is monic of degree deg with nonzero constant term.  The walk
    multiplies by x step by step; an early return to 1 means ord(x) is a
    proper divisor of p^deg - 1.
    """
    card = p ** deg
    red = tuple((-c) % p for c in poly[:deg])  # x^deg rewritten in lower powers
    exp = [0] * (card - 1)
    cur = [0] * deg
    cur[0] = 1
    for k in range(card - 1):
        enc = 0
        for i in range(deg - 1, -1, -1):
            enc = enc * p + cur[i]
        if enc == 1 and k > 0:
            return None
        exp[k] = enc
        lead = cur[deg - 1]
        nxt = [0] + cur[:-1]
        if lead:
            for i in range(deg):
                nxt[i] = (nxt[i] + lead * red[i]) % p
        cur = nxt
    # ord(x) divides card - 1 for any unit, so the walk must close up here.
    assert all(c == 0 for c in cur[1:]) and cur[0] == 1
    return exp


def _candidate_polys(p: int, deg: int):
    # Monic degree-deg polynomials with nonzero constant term, lex order on
    # (c_0, c_1, ..., c_{deg-1}).
    for code in range(p ** deg):
        digits = []
        rest = code
        for _ in range(deg):
            digits.append(rest % p)
            rest //= p
        if digits[0] == 0:
            continue
        yield tuple(digits) + (1,)


def smallest_primitive_poly(p: int, deg: int, skip: tuple[int, ...] | None = None) -> tuple[int, ...]:
    for poly in _candidate_polys(p, deg):
        if skip is not None and poly == skip:
            continue
        if _primitivity_walk(p, deg, poly) is not None:
            return poly
    raise ValueError(f"no primitive polynomial found for p={p}, deg={deg}")


def default_poly(p: int, deg: int) -> tuple[int, ...]:
    got = CONWAY.get((p, deg))
    if got is not None:
        return got
    return smallest_primitive_poly(p, deg)


def alternate_primitive_poly(p: int, deg: int) -> tuple[int, ...]:
    """A primitive polynomial different from the default; used by tests to
    confirm results do not depend on the choice of gamma."""
    return smallest_primitive_poly(p, deg, skip=default_poly(p, deg))


class ResidueTower:
    """Arithmetic in F_{p^deg} and all of its subfields.

    Elements are ints in [0, p^deg) (base-p digit vectors over the
    polynomial basis).  F_p sits inside as the constants 0..p-1.
    """

    def __init__(self, p: int, deg: int, poly: tuple[int, ...] | None = None,
                 cache_dir: str | None = None, q: int | None = None):
        if not _is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if deg < 1:
            raise ValueError("deg must be >= 1")
        self.p = p
        self.deg = deg
        self.q = q if q is not None else p  # informational, recorded in cache
        self.card = p ** deg
        self.poly = tuple(poly) if poly is not None else default_poly(p, deg)
        if len(self.poly) != deg + 1 or self.poly[deg] != 1 or self.poly[0] % p == 0:
            raise ValueError(f"polynomial {self.poly} is not monic degree {deg} with unit constant term")

        self.loaded_from_cache = False
        exp = None
        path = self._cache_path(cache_dir)
        if path is not None and os.path.exists(path):
            exp = self._load_cache(path)
            self.loaded_from_cache = True
        if exp is None:
            exp = _primitivity_walk(p, deg, self.poly)
            if exp is None:
                raise ValueError(f"polynomial {self.poly} is not primitive over F_{p}")
            if path is not None:
                self._save_cache(path, exp)

        self._exp = exp
        log = [-1] * self.card
        for k, e in enumerate(exp):
            log[e] = k
        self._log = log

        self._neg = [self._digit_neg(a) for a in range(self.card)]
        self._add = None
        if self.card <= _ADD_TABLE_MAX_CARD:
            add = []
            for a in range(self.card):
                add.append([self._digit_add(a, b) for b in range(self.card)])
            self._add = add

    # -- cache ---------------------------------------------------------

    def _cache_path(self, cache_dir: str | None) -> str | None:
        base = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV)
        if not base:
            return None
        os.makedirs(base, exist_ok=True)
        tag = "_".join(str(c) for c in self.poly)
        return os.path.join(base, f"residue_p{self.p}_d{self.deg}_{tag}.tltw")

    def _save_cache(self, path: str, exp: list[int]) -> None:
        # Word layout: p, q, N_amb, the N_amb+1 polynomial coefficients,
        # then the p^N_amb - 1 table entries.  Lengths are implied.
        words = [self.p, self.q, self.deg]
        words.extend(self.poly)
        words.extend(exp)
        blob = _CACHE_MAGIC + struct.pack("<H", _CACHE_VERSION)
        blob += struct.pack(f"<{len(words)}q", *words)
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)

    def _load_cache(self, path: str) -> list[int]:
        try:
            with open(path, "rb") as fh:
                blob = fh.read()
            if blob[:4] != _CACHE_MAGIC:
                raise CacheError("bad magic")
            (version,) = struct.unpack_from("<H", blob, 4)
            if version != _CACHE_VERSION:
                raise CacheError(f"unsupported cache version {version}")
            nwords = (len(blob) - 6) // 8
            if len(blob) != 6 + 8 * nwords or nwords != 3 + (self.deg + 1) + (self.card - 1):
                raise CacheError("truncated table")
            words = struct.unpack_from(f"<{nwords}q", blob, 6)
            p, _q, deg = words[:3]
            poly = tuple(words[3:4 + self.deg])
            exp = list(words[4 + self.deg:])
            if (p, deg) != (self.p, self.deg) or poly != self.poly:
                raise CacheError("header does not match requested tower")
            # Verify the whole multiply-by-x recursion; a loaded table is
            # trusted afterwards, so nothing short of a full sweep will do.
            if exp[0] != 1:
                raise CacheError("exp[0] != 1")
            cur = 1
            for k in range(1, self.card - 1):
                cur = self._mul_by_x(cur)
                if exp[k] != cur:
                    raise CacheError("table fails multiply-by-x check")
            if self._mul_by_x(cur) != 1:
                raise CacheError("table does not close up")
            return exp
        except (OSError, struct.error) as err:
            raise CacheError(str(err)) from err

    def _mul_by_x(self, enc: int) -> int:
        p, deg = self.p, self.deg
        digits = self.digits(enc)
        lead = digits[deg - 1]
        nxt = [0] + digits[:-1]
        if lead:
            for i in range(deg):
                nxt[i] = (nxt[i] - lead * self.poly[i]) % p
        out = 0
        for i in range(deg - 1, -1, -1):
            out = out * p + nxt[i]
        return out

    # -- encoding ------------------------------------------------------

    def digits(self, enc: int) -> list[int]:
        out = []
        for _ in range(self.deg):
            out.append(enc % self.p)
            enc //= self.p
        return out

    def from_digits(self, digits) -> int:
        out = 0
        for i, d in enumerate(digits):
            out += (d % self.p) * self.p ** i
        return out

    def elements(self):
        return range(self.card)

    # -- additive structure ---------------------------------------------

    def _digit_add(self, a: int, b: int) -> int:
        p = self.p
        out, mult = 0, 1
        while a or b:
            out += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def _digit_neg(self, a: int) -> int:
        p = self.p
        out, mult = 0, 1
        while a:
            out += (-a % p) * mult
            a //= p
            mult *= p
        return out

    def add(self, a: int, b: int) -> int:
        if self._add is not None:
            return self._add[a][b]
        return self._digit_add(a, b)

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    # -- multiplicative structure -----------------------------------------

    def gamma_pow(self, k: int) -> int:
        return self._exp[k % (self.card - 1)]

    @property
    def gamma(self) -> int:
        return self._exp[1] if self.card > 2 else 1

    def log(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("log of 0")
        return self._log[a]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.card - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._exp[-self._log[a] % (self.card - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k <= 0:
                raise ZeroDivisionError("0 ** nonpositive")
            return 0
        return self._exp[(self._log[a] * k) % (self.card - 1)]

    def frob(self, a: int, e: int = 1) -> int:
        """a ^ (p^e); e is reduced so huge exponents stay cheap."""
        if a == 0:
            return 0
        k = (self._log[a] * pow(self.p, e, self.card - 1)) % (self.card - 1)
        return self._exp[k]

    def order(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("order of 0")
        return (self.card - 1) // gcd(self._log[a], self.card - 1)

    # -- subfields -------------------------------------------------------

    def _substep(self, d: int) -> int:
        if self.deg % d:
            raise ValueError(f"F_p^{d} is not a subfield of F_p^{self.deg}")
        return (self.card - 1) // (self.p ** d - 1)

    def subfield_gen(self, d: int) -> int:
        return self._exp[self._substep(d) % (self.card - 1)]

    def in_subfield(self, a: int, d: int) -> bool:
        if a == 0:
            return True
        return self._log[a] % self._substep(d) == 0

    def subfield_elements(self, d: int) -> list[int]:
        step = self._substep(d)
        return [0] + [self._exp[(k * step) % (self.card - 1)] for k in range(self.p ** d - 1)]

    def sub_log(self, a: int, d: int) -> int:
        """Discrete log of a with respect to subfield_gen(d); a must be a
        unit of F_{p^d}."""
        step = self._substep(d)
        k = self.log(a)
        if k % step:
            raise ValueError(f"element {a} is not in F_{self.p}^{d}")
        return (k // step) % (self.p ** d - 1)

    def trace(self, a: int, d_from: int, d_to: int) -> int:
        """Trace F_{p^d_from} -> F_{p^d_to}; a must lie in the source field."""
        if d_from % d_to:
            raise ValueError("d_to must divide d_from")
        out = 0
        for i in range(d_from // d_to):
            out = self.add(out, self.frob(a, d_to * i))
        return out

    def norm(self, a: int, d_from: int, d_to: int) -> int:
        if d_from % d_to:
            raise ValueError("d_to must divide d_from")
        if a == 0:
            return 0
        e = (self.p ** d_from - 1) // (self.p ** d_to - 1)
        return self._exp[(self._log[a] * e) % (self.card - 1)]

    def trace_to_prime(self, a: int, d_from: int) -> int:
        """Trace down to F_p, returned as a plain int in 0..p-1."""
        t = self.trace(a, d_from, 1)
        assert t < self.p
        return t

    def __repr__(self) -> str:
        return f"ResidueTower(p={self.p}, deg={self.deg}, poly={self.poly})"
