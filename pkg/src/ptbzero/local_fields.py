"""The lattice of local fields, modeled exactly in equal characteristic.

The base field is F = F_q((t)).  On top of it sit the unramified
extensions L_0 (degree m) and L (degree n = 2m), the quadratic extension
E (unramified or ramified), and, in the ramified case, the compositum
M = LE together with the two remaining quadratic extensions L_1, L_2 of
L_0 inside M.  Everything embeds into a single ambient field:

  * e(E/F) = 1: ambient = L = F_{q^n}((t)), Galois group <phi> of order n;
  * e(E/F) = 2: ambient = M = F_{q^n}((s)) with s^2 = t, Galois group
    <phi> x <iota> where phi acts on coefficients by the q-power map and
    iota sends s to -s.

Galois elements are pairs (i, j) acting by  sum c_k u^k  |->
sum  c_k^{q^i} (-1)^{jk} u^k.  Every field in the lattice is the fixed
field of a stored subgroup, and traces/norms are computed as sums or
products over explicit coset representatives (never by dividing by the
degree, which the characteristic may kill).

Elements are truncated Laurent series in the ambient uniformizer with
coefficients in the ambient residue field.  Precision is an absolute
cutoff exponent tracked through arithmetic; reading a coefficient that
the cutoff does not cover raises PrecisionError rather than guessing.

Uniformizer conventions (fixed once, characters depend on them):
pi_F = t, pi_E = pi_M = pi_L1 = s with s^2 = t, pi_L = pi_L0 = t, and
pi_L2 = s·v where v = gamma^{(q^m+1)/2} is the standard square root in
L of a nonsquare of L_0.  L_2-coefficients at odd powers of s carry a
twist by v which `field_view` peels off.
"""

from __future__ import annotations

import itertools
from math import inf

from .residue import ResidueTower


class PrecisionError(Exception):
    """An operation needed coefficients beyond the tracked precision."""


FIELD_LABELS = ("F", "E", "L0", "L", "L1", "L2", "M")


class LocalField:
    """Descriptor of one member of the lattice.

    f is the residue degree over F, e the ramification index over F,
    w the ambient valuation of the chosen uniformizer, rho the residue
    twist on odd coefficient slots (1 for every field except L_2).
    """

    __slots__ = ("tower", "label", "f", "e", "w", "rho", "subgroup")

    def __init__(self, tower, label, f, e, w, rho, subgroup):
        self.tower = tower
        self.label = label
        self.f = f
        self.e = e
        self.w = w
        self.rho = rho
        self.subgroup = frozenset(subgroup)

    @property
    def residue_card(self) -> int:
        return self.tower.q ** self.f

    @property
    def residue_pdeg(self) -> int:
        return self.f * self.tower.s_deg

    def residue_gen(self) -> int:
        return self.tower.R.subfield_gen(self.residue_pdeg)

    def uniformizer(self) -> "Elt":
        return self.tower.elt(self.label, {1: 1})

    def __repr__(self):
        return f"<{self.label}: f={self.f}, e={self.e}>"


class Elt:
    """Truncated Laurent series in the ambient uniformizer.

    coeffs[k] is the ambient residue coefficient at exponent val + k;
    the element is known modulo u^prec_abs (prec_abs None means exact).
    Leading and trailing zero coefficients are stripped, so exact
    elements have a unique representation and == is reliable on them.
    """

    __slots__ = ("tower", "field", "val", "coeffs", "prec_abs")

    def __init__(self, tower, field, val, coeffs, prec_abs):
        coeffs = list(coeffs)
        lead = 0
        while lead < len(coeffs) and coeffs[lead] == 0:
            lead += 1
        coeffs = coeffs[lead:]
        val = val + lead
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if prec_abs is not None and coeffs:
            keep = prec_abs - val
            if keep <= 0:
                coeffs = []
            else:
                coeffs = coeffs[:keep]
                while coeffs and coeffs[-1] == 0:
                    coeffs.pop()
        self.tower = tower
        self.field = field
        self.val = val if coeffs else None
        self.coeffs = tuple(coeffs)
        self.prec_abs = prec_abs

    # -- bookkeeping ------------------------------------------------------

    def _known_until(self):
        return inf if self.prec_abs is None else self.prec_abs

    def _eff_val(self):
        # valuation if visible, else the best lower bound we can certify
        return self.val if self.coeffs else self._known_until()

    def is_exact_zero(self) -> bool:
        return not self.coeffs and self.prec_abs is None

    def is_unit_visible(self) -> bool:
        return bool(self.coeffs)

    def valuation(self) -> int:
        """Ambient valuation; PrecisionError if the element could be an
        invisible nonzero beyond the cutoff."""
        if self.coeffs:
            return self.val
        if self.prec_abs is None:
            raise ZeroDivisionError("valuation of exact zero")
        raise PrecisionError("valuation not determined at this precision")

    def coeff_at(self, k: int) -> int:
        if k >= self._known_until():
            raise PrecisionError(f"coefficient at {k} beyond precision")
        if not self.coeffs or k < self.val or k >= self.val + len(self.coeffs):
            return 0
        return self.coeffs[k - self.val]

    # -- arithmetic -------------------------------------------------------

    def _join(self, other) -> str:
        return self.tower.join_field(self.field, other.field)

    def __add__(self, other):
        other = self.tower.coerce(other)
        R = self.tower.R
        known = min(self._known_until(), other._known_until())
        terms = {}
        for x in (self, other):
            if x.coeffs:
                for k, c in enumerate(x.coeffs):
                    e = x.val + k
                    if e < known:
                        terms[e] = R.add(terms.get(e, 0), c)
        prec = None if known == inf else known
        if not terms:
            return Elt(self.tower, self._join(other), 0, (), prec)
        lo = min(terms)
        hi = max(terms)
        coeffs = [terms.get(k, 0) for k in range(lo, hi + 1)]
        return Elt(self.tower, self._join(other), lo, coeffs, prec)

    def __neg__(self):
        R = self.tower.R
        return Elt(self.tower, self.field, self.val if self.coeffs else 0,
                   [R.neg(c) for c in self.coeffs], self.prec_abs)

    def __sub__(self, other):
        return self + (-self.tower.coerce(other))

    def __mul__(self, other):
        other = self.tower.coerce(other)
        R = self.tower.R
        if self.is_exact_zero() or other.is_exact_zero():
            return self.tower.zero(self._join(other))
        known = min(self._known_until() + other._eff_val(),
                    other._known_until() + self._eff_val())
        if not self.coeffs or not other.coeffs:
            prec = None if known == inf else known
            return Elt(self.tower, self._join(other), 0, (), prec)
        nout = len(self.coeffs) + len(other.coeffs) - 1
        out = [0] * nout
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = R.add(out[i + j], R.mul(a, b))
        prec = None if known == inf else known
        return Elt(self.tower, self._join(other), self.val + other.val, out, prec)

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        out = self.tower.one(self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def scaled(self, c: int, shift: int = 0):
        """Multiply by the constant c (ambient residue int) times u^shift."""
        R = self.tower.R
        return Elt(self.tower, self.field, (self.val or 0) + shift,
                   [R.mul(c, a) for a in self.coeffs], None if self.prec_abs is None else self.prec_abs + shift)

    def inv(self, slots: int | None = None):
        """Inverse as a truncated series: x = c0 u^v (1 + b) gives
        x^{-1} = c0^{-1} u^{-v} (1 - b + b^2 - ...), cut at `slots`
        ambient slots past the leading term (tower default if omitted).
        The result always carries finite precision."""
        if not self.coeffs:
            if self.prec_abs is None:
                raise ZeroDivisionError("inverse of zero")
            raise PrecisionError("inverse of element with no visible term")
        R = self.tower.R
        if self.prec_abs is None and len(self.coeffs) == 1:
            # monomials invert exactly
            return Elt(self.tower, self.field, -self.val, (R.inv(self.coeffs[0]),), None)
        want = slots if slots is not None else self.tower.default_prec * self.tower.fields[self.field].w
        if self.prec_abs is not None:
            want = min(want, self.prec_abs - self.val)
        if want < 1:
            raise PrecisionError("no slots left for the inverse")
        c0i = R.inv(self.coeffs[0])
        b = [R.mul(c0i, c) for c in self.coeffs[:want]]
        b += [0] * (want - len(b))
        d = [0] * want
        d[0] = 1
        for k in range(1, want):
            acc = 0
            for j in range(1, k + 1):
                if b[j] and d[k - j]:
                    acc = R.add(acc, R.mul(b[j], d[k - j]))
            d[k] = R.neg(acc)
        return Elt(self.tower, self.field, -self.val,
                   [R.mul(c0i, c) for c in d], -self.val + want)

    def galois(self, sig):
        return self.tower.galois_apply(self, sig)

    def truncate(self, slots: int):
        """Keep `slots` significant field-uniformizer slots from the
        leading term (or from 0 for invisible elements)."""
        w = self.tower.fields[self.field].w
        base = self.val if self.coeffs else 0
        cut = base + slots * w
        if self.prec_abs is not None:
            cut = min(cut, self.prec_abs)
        return Elt(self.tower, self.field, self.val if self.coeffs else 0, self.coeffs, cut)

    # -- comparisons ------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Elt):
            other = self.tower.coerce(other)
        return (self.val, self.coeffs, self.prec_abs) == (other.val, other.coeffs, other.prec_abs)

    def __hash__(self):
        return hash((self.val, self.coeffs, self.prec_abs))

    def __repr__(self):
        u = self.tower.amb_symbol
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for k, c in enumerate(self.coeffs):
                if c:
                    parts.append(f"{c}*{u}^{self.val + k}")
            body = " + ".join(parts)
        tail = "" if self.prec_abs is None else f" + O({u}^{self.prec_abs})"
        return f"Elt[{self.field}]({body}{tail})"


class TameUnitClass:
    """Class of a nonzero element in K^*/(1+P_K): valuation in K's own
    normalization plus the discrete log of the leading residue unit."""

    __slots__ = ("field", "valuation", "residue_log")

    def __init__(self, field, valuation, residue_log):
        self.field = field
        self.valuation = valuation
        self.residue_log = residue_log

    def as_tuple(self):
        return (self.field, self.valuation, self.residue_log)

    def __eq__(self, other):
        return isinstance(other, TameUnitClass) and self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return f"TameUnitClass({self.field}, v={self.valuation}, log={self.residue_log})"


class Tower:
    """The whole configuration for one (p, q, m, e_E)."""

    def __init__(self, p, q, m, e_E, poly=None, cache_dir=None, default_prec=3):
        if q % 2 == 0:
            raise ValueError("q must be odd")
        if m < 2:
            raise ValueError("m must be >= 2 (n = 2m >= 4)")
        if e_E not in (1, 2):
            raise ValueError("e_E must be 1 or 2")
        s_deg = 0
        qq = q
        while qq % p == 0 and qq > 1:
            qq //= p
            s_deg += 1
        if qq != 1 or s_deg == 0:
            raise ValueError(f"q={q} is not a power of p={p}")
        self.p, self.q, self.m, self.e_E = p, q, m, e_E
        self.n = 2 * m
        self.s_deg = s_deg
        self.default_prec = default_prec
        self.R = ResidueTower(p, s_deg * self.n, poly=poly, cache_dir=cache_dir, q=q)
        self.amb_symbol = "s" if e_E == 2 else "t"

        n = self.n
        if e_E == 1:
            self.gal = [(i, 0) for i in range(n)]
            subs = {
                "F": {(i, 0) for i in range(n)},
                "E": {(i, 0) for i in range(0, n, 2)},
                "L0": {(i, 0) for i in range(0, n, m)},
                "L": {(0, 0)},
            }
            fields = {
                "F": (1, 1, 1, 1),
                "E": (2, 1, 1, 1),
                "L0": (m, 1, 1, 1),
                "L": (n, 1, 1, 1),
            }
            self.ambient = "L"
        else:
            self.gal = [(i, j) for i in range(n) for j in range(2)]
            subs = {
                "F": {(i, j) for i in range(n) for j in range(2)},
                "E": {(i, 0) for i in range(n)},
                "L0": {(0, 0), (m, 0), (0, 1), (m, 1)},
                "L": {(0, 0), (0, 1)},
                "L1": {(0, 0), (m, 0)},
                "L2": {(0, 0), (m, 1)},
                "M": {(0, 0)},
            }
            v = self.R.gamma_pow((q ** m + 1) // 2)
            fields = {
                "F": (1, 1, 2, 1),
                "E": (1, 2, 1, 1),
                "L0": (m, 1, 2, 1),
                "L": (n, 1, 2, 1),
                "L1": (m, 2, 1, 1),
                "L2": (m, 2, 1, v),
                "M": (n, 2, 1, 1),
            }
            self.ambient = "M"

        self.fields = {
            lab: LocalField(self, lab, f, e, w, rho, subs[lab])
            for lab, (f, e, w, rho) in fields.items()
        }
        self._join_cache = {}

        # distinguished elements
        self.v_res = self.R.gamma_pow((q ** m + 1) // 2)        # v^2 in k_{L0}, v^{q^m} = -v
        self.xi2 = self.R.subfield_gen(2 * s_deg)               # generates k of the unramified quadratic
        if e_E == 2:
            self.delta = self.fields["E"].uniformizer()
        else:
            d = self.R.pow(self.xi2, (q + 1) // 2)              # trace-zero unit of E
            self.delta = self.elt("E", {0: d})
        self.Delta = self.delta * self.delta
        self.sigma_E_F = (0, 1) if e_E == 2 else (1, 0)
        self.sigma_L_L0 = (m, 0)

    # -- group plumbing ---------------------------------------------------

    def gal_mul(self, a, b):
        return ((a[0] + b[0]) % self.n, (a[1] + b[1]) % 2)

    def gal_inv(self, a):
        return ((-a[0]) % self.n, a[1])

    def join_field(self, k1: str, k2: str) -> str:
        if k1 == k2:
            return k1
        key = (k1, k2)
        got = self._join_cache.get(key)
        if got is None:
            inter = self.fields[k1].subgroup & self.fields[k2].subgroup
            for lab, fld in self.fields.items():
                if fld.subgroup == inter:
                    got = lab
                    break
            else:
                raise ValueError(f"no field in the lattice for join of {k1}, {k2}")
            self._join_cache[key] = got
        return got

    def contains(self, outer: str, inner: str) -> bool:
        return self.fields[outer].subgroup <= self.fields[inner].subgroup

    def coset_reps(self, k_from: str, k_to: str):
        """Representatives of Gal(Amb/k_from) cosets inside Gal(Amb/k_to);
        k_to must be a subfield of k_from."""
        s_from = self.fields[k_from].subgroup
        s_to = self.fields[k_to].subgroup
        if not s_from <= s_to:
            raise ValueError(f"{k_to} is not a subfield of {k_from}")
        reps, seen = [], set()
        for g in sorted(s_to):
            coset = frozenset(self.gal_mul(g, h) for h in s_from)
            if coset not in seen:
                seen.add(coset)
                reps.append(g)
        return reps

    # -- element constructors ----------------------------------------------

    def zero(self, field: str = "F") -> Elt:
        return Elt(self, field, 0, (), None)

    def one(self, field: str = "F") -> Elt:
        return Elt(self, field, 0, (1,), None)

    def coerce(self, x) -> Elt:
        if isinstance(x, Elt):
            return x
        if isinstance(x, int):
            return Elt(self, "F", 0, (x % self.p,), None)
        raise TypeError(f"cannot coerce {x!r} into the tower")

    def elt(self, field: str, terms: dict[int, int], prec_slots: int | None = None) -> Elt:
        """Element of `field` from {pi_K-exponent: k_K residue coefficient}."""
        fld = self.fields[field]
        R = self.R
        amb = {}
        for k, c in terms.items():
            if c == 0:
                continue
            if not R.in_subfield(c, fld.residue_pdeg):
                raise ValueError(f"coefficient {c} not in the residue field of {field}")
            amb_c = R.mul(c, R.pow(fld.rho, k)) if fld.rho != 1 else c
            amb[k * fld.w] = amb_c
        prec = None
        if prec_slots is not None:
            base = min(terms) if terms else 0
            prec = (base + prec_slots) * fld.w
        if not amb:
            return Elt(self, field, 0, (), prec)
        lo, hi = min(amb), max(amb)
        return Elt(self, field, lo, [amb.get(k, 0) for k in range(lo, hi + 1)], prec)

    def teichmuller(self, cls: TameUnitClass) -> Elt:
        fld = self.fields[cls.field]
        c = self.R.pow(fld.residue_gen(), cls.residue_log)
        return self.elt(cls.field, {cls.valuation: c})

    def random_elt(self, field: str, rng, val_range=(-2, 3), slots: int | None = None) -> Elt:
        """Random exact element (Laurent polynomial) of the field."""
        fld = self.fields[field]
        card = fld.residue_card
        slots = slots if slots is not None else self.default_prec
        v0 = rng.randrange(val_range[0], val_range[1])
        sub = self.R.subfield_elements(fld.residue_pdeg)
        terms = {v0 + j: sub[rng.randrange(card)] for j in range(slots)}
        if all(c == 0 for c in terms.values()):
            terms[v0] = 1
        return self.elt(field, terms)

    # -- galois action, traces, norms --------------------------------------

    def galois_apply(self, x: Elt, sig) -> Elt:
        i, j = sig
        if self.e_E == 1 and j % 2:
            raise ValueError("no s-sign automorphism in the unramified tower")
        R = self.R
        if not x.coeffs:
            return Elt(self, x.field, 0, (), x.prec_abs)
        out = []
        for k, c in enumerate(x.coeffs):
            e = x.val + k
            img = R.frob(c, (i % self.n) * self.s_deg) if c else 0
            if j % 2 and e % 2:
                img = R.neg(img)
            out.append(img)
        return Elt(self, x.field, x.val, out, x.prec_abs)

    def fixed_by(self, x: Elt, sig) -> bool:
        return self.galois_apply(x, sig) == x

    def trace(self, x: Elt, k_to: str) -> Elt:
        out = self.zero(k_to)
        for g in self.coset_reps(x.field, k_to):
            out = out + self.galois_apply(x, g)
        return Elt(self, k_to, out.val if out.coeffs else 0, out.coeffs, out.prec_abs)

    def norm(self, x: Elt, k_to: str) -> Elt:
        out = self.one(k_to)
        for g in self.coset_reps(x.field, k_to):
            out = out * self.galois_apply(x, g)
        return Elt(self, k_to, out.val if out.coeffs else 0, out.coeffs, out.prec_abs)

    # -- views --------------------------------------------------------------

    def field_view(self, x: Elt, field: str | None = None):
        """(valuation, coefficients, precision) of x in `field`'s own
        uniformizer and residue field; raises ValueError if x visibly
        fails to lie in the field."""
        field = field or x.field
        fld = self.fields[field]
        R = self.R
        w, rho = fld.w, fld.rho
        out = {}
        for k, c in enumerate(x.coeffs):
            e = x.val + k
            if c == 0:
                continue
            if e % w:
                raise ValueError(f"support at exponent {e} not compatible with {field}")
            fe = e // w
            a = R.mul(c, R.inv(R.pow(rho, fe))) if rho != 1 else c
            if not R.in_subfield(a, fld.residue_pdeg):
                raise ValueError(f"coefficient at {e} not in the residue field of {field}")
            out[fe] = a
        if x.prec_abs is None:
            prec = None
        else:
            prec = -((-x.prec_abs) // w)  # ceil division
        if not out:
            return (None, (), prec)
        lo, hi = min(out), max(out)
        return (lo, tuple(out.get(k, 0) for k in range(lo, hi + 1)), prec)

    def unit_decompose(self, x: Elt, field: str | None = None):
        """(v, a0, unit tail) with x = pi^v (a0 + a1 pi + ...); the tail is
        reported to the precision available.  PrecisionError if x has no
        visible leading term."""
        field = field or x.field
        v, coeffs, prec = self.field_view(x, field)
        if v is None:
            if prec is None:
                raise ZeroDivisionError("unit decomposition of zero")
            raise PrecisionError("no visible leading coefficient")
        return v, coeffs[0], coeffs[1:], (None if prec is None else prec - v)

    def jordan_of_unit_class(self, x: Elt, field: str | None = None) -> TameUnitClass:
        field = field or x.field
        v, a0, _tail, _slots = self.unit_decompose(x, field)
        fld = self.fields[field]
        return TameUnitClass(field, v, self.R.sub_log(a0, fld.residue_pdeg))


def build_tower(p: int, q: int, m: int, e_E: int, poly=None, cache_dir=None,
                default_prec: int = 3) -> Tower:
    return Tower(p, q, m, e_E, poly=poly, cache_dir=cache_dir, default_prec=default_prec)
