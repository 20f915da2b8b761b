"""Characters of the tower fields with conductor at most 2.

A multiplicative character is stored by what it does to the three layers
of K^* = pi^Z x k^* x (1+P):

  * pi: Fraction in [0,1), the rotation chi(pi_K);
  * a:  integer mod |k_K^*|, so chi([c]) = e(a·log c / (q^f-1));
  * beta: element of k_K or None, so chi(1 + pi w) = e(Tr_{k/F_p}(beta·w)/p).

Every character of conductor <= 2 factors this way once the uniformizer
is fixed, and all values are rotation numbers (Fractions mod 1), which
keeps downstream Gauss sums exact.  `from_rule` reconstructs the triple
from any evaluation rule that is a homomorphism of conductor <= 2 and
raises ConductorError otherwise; this is how restriction, Galois twist
and norm composition are built, so a composition that would leave the
tame-plus-level-2 world (a ramified-step norm against a conductor-2
character) fails loudly instead of silently truncating.

Additive characters are the family psi_a(x) = psi0(Tr_{K/F}(a x)) where
psi0 on F reads the coefficient of t^{-1}.  The reported level follows
the convention d(psi_a) = v_K(a) + d0 with d0 = 0 on unramified members
and d0 = -1 on ramified ones; this is the normalization under which the
twist and induction identities close up (see the epsilon module).
"""

from __future__ import annotations

from fractions import Fraction

from .local_fields import Elt, PrecisionError, TameUnitClass, Tower


class ConductorError(Exception):
    """The requested character operation leaves conductor <= 2."""


class MultChar:
    __slots__ = ("tower", "field", "pi", "a", "beta")

    def __init__(self, tower: Tower, field: str, pi, a: int, beta: int | None):
        fld = tower.fields[field]
        self.tower = tower
        self.field = field
        self.pi = Fraction(pi) % 1
        self.a = a % (fld.residue_card - 1)
        if beta is not None and beta != 0 and not tower.R.in_subfield(beta, fld.residue_pdeg):
            raise ValueError(f"beta {beta} not in the residue field of {field}")
        self.beta = None if beta in (None, 0) else beta

    # -- structure ----------------------------------------------------------

    def conductor(self) -> int:
        if self.beta is not None:
            return 2
        return 1 if self.a else 0

    def is_tame(self) -> bool:
        return self.beta is None

    def is_trivial(self) -> bool:
        return self.pi == 0 and self.a == 0 and self.beta is None

    def order_divides(self, k: int) -> bool:
        return (self ** k).is_trivial()

    # -- evaluation ----------------------------------------------------------

    def value(self, x) -> Fraction:
        """chi(x) as a rotation number; x must lie in the character's field
        with enough precision for the conductor.  TameUnitClass inputs are
        accepted when the character is tame."""
        tw = self.tower
        fld = tw.fields[self.field]
        if isinstance(x, TameUnitClass):
            if x.field != self.field:
                raise ValueError("class belongs to a different field")
            if self.beta is not None:
                raise PrecisionError("tame class cannot feed a conductor-2 character")
            Q = fld.residue_card - 1
            return (x.valuation * self.pi + Fraction(self.a * x.residue_log, Q)) % 1
        v, a0, tail, slots = tw.unit_decompose(x, self.field)
        Q = fld.residue_card - 1
        r = v * self.pi + Fraction(self.a * tw.R.sub_log(a0, fld.residue_pdeg), Q)
        if self.beta is not None:
            if slots is not None and slots < 2:
                raise PrecisionError("conductor-2 character needs two unit slots")
            a1 = tail[0] if tail else 0
            w = tw.R.mul(a1, tw.R.inv(a0))
            r += Fraction(tw.R.trace_to_prime(tw.R.mul(self.beta, w), fld.residue_pdeg), tw.p)
        return r % 1

    def value_unit(self, c0: int, w: int) -> Fraction:
        """Fast path: value on c0·(1 + pi w) with c0 in k^*, w in k."""
        tw = self.tower
        fld = tw.fields[self.field]
        r = Fraction(self.a * tw.R.sub_log(c0, fld.residue_pdeg), fld.residue_card - 1)
        if self.beta is not None and w:
            r += Fraction(tw.R.trace_to_prime(tw.R.mul(self.beta, w), fld.residue_pdeg), tw.p)
        return r % 1

    def __call__(self, x: Elt) -> Fraction:
        return self.value(x)

    # -- group operations ----------------------------------------------------

    def _merge_beta(self, other_beta, sign=1):
        R = self.tower.R
        b1 = self.beta if self.beta is not None else 0
        b2 = other_beta if other_beta is not None else 0
        if sign < 0:
            b2 = R.neg(b2)
        out = R.add(b1, b2)
        return out if out else None

    def __mul__(self, other: "MultChar") -> "MultChar":
        if (self.tower, self.field) != (other.tower, other.field):
            raise ValueError("characters live on different fields")
        return MultChar(self.tower, self.field, self.pi + other.pi,
                        self.a + other.a, self._merge_beta(other.beta))

    def inverse(self) -> "MultChar":
        R = self.tower.R
        beta = None if self.beta is None else R.neg(self.beta)
        return MultChar(self.tower, self.field, -self.pi, -self.a, beta)

    def __pow__(self, k: int) -> "MultChar":
        R = self.tower.R
        beta = None
        if self.beta is not None:
            beta = R.mul(self.beta, k % self.tower.p)
        return MultChar(self.tower, self.field, k * self.pi, k * self.a, beta)

    def __truediv__(self, other: "MultChar") -> "MultChar":
        return self * other.inverse()

    # -- transport -----------------------------------------------------------

    def galois(self, sig) -> "MultChar":
        """chi^sigma with chi^sigma(x) = chi(sigma^{-1} x)."""
        tw = self.tower
        inv = tw.gal_inv(sig)
        return from_rule(tw, self.field,
                         lambda x: self.value(tw.galois_apply(x, inv)))

    def restrict_to(self, field: str) -> "MultChar":
        tw = self.tower
        if not tw.contains(self.field, field):
            raise ValueError(f"{field} is not a subfield of {self.field}")
        return from_rule(tw, field, self.value)

    def compose_norm_from(self, field: str) -> "MultChar":
        """chi o N_{field/self.field} as a character of the bigger field."""
        tw = self.tower
        if not tw.contains(field, self.field):
            raise ValueError(f"{self.field} is not a subfield of {field}")
        return from_rule(tw, field, lambda x: self.value(tw.norm(x, self.field)))

    def is_regular(self) -> bool:
        """Galois orbit over F is free (size [K:F]); tame characters only.
        Galois twisting fixes pi and multiplies a by q, so this is just the
        orbit length of a under mult-by-q."""
        if not self.is_tame():
            raise ValueError("regularity is defined here for tame characters")
        Q = self.tower.fields[self.field].residue_card - 1
        degree = len(self.tower.coset_reps(self.field, "F"))
        orbit = {self.a}
        x = (self.a * self.tower.q) % Q
        while x not in orbit:
            orbit.add(x)
            x = (x * self.tower.q) % Q
        return len(orbit) == degree

    # -- value semantics -------------------------------------------------------

    def key(self):
        return (self.field, self.pi, self.a, self.beta)

    def __eq__(self, other):
        return isinstance(other, MultChar) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        b = "-" if self.beta is None else str(self.beta)
        return f"MultChar({self.field}, pi={self.pi}, a={self.a}, beta={b})"

    def to_json(self) -> dict:
        tw = self.tower
        fld = tw.fields[self.field]
        beta_log = None
        if self.beta is not None:
            beta_log = tw.R.sub_log(self.beta, fld.residue_pdeg)
        return {
            "field": self.field,
            "pi_value": f"{self.pi.numerator}/{self.pi.denominator}",
            "a": self.a,
            "beta_log": beta_log,
        }


def char_from_json(tower: Tower, data: dict) -> MultChar:
    field = data["field"]
    num, den = data["pi_value"].split("/")
    pi = Fraction(int(num), int(den))
    beta = None
    if data.get("beta_log") is not None:
        fld = tower.fields[field]
        beta = tower.R.pow(fld.residue_gen(), int(data["beta_log"]))
    return MultChar(tower, field, pi, int(data["a"]), beta)


def from_rule(tower: Tower, field: str, rule) -> MultChar:
    """Reconstruct the (pi, a, beta) triple of a homomorphism K^* -> Q/Z of
    conductor <= 2 from its values; raise ConductorError if no beta fits.

    The scan over 1 + pi[w] for every w in k_K is exhaustive on a
    generating set of (1+P)/(1+P^3), which makes the match a proof for any
    homomorphic rule of conductor <= 3 (the worst our compositions can
    produce)."""
    fld = tower.fields[field]
    R = tower.R
    Q = fld.residue_card - 1
    pdeg = fld.residue_pdeg
    pi = rule(fld.uniformizer()) % 1
    ag = rule(tower.elt(field, {0: fld.residue_gen()})) % 1
    a_scaled = ag * Q
    if a_scaled.denominator != 1:
        raise ConductorError(f"rule is not tame on the residue generator of {field}")
    a = int(a_scaled) % Q
    sub = R.subfield_elements(pdeg)
    ell = {}
    for w in sub:
        if w == 0:
            ell[w] = Fraction(0)
            continue
        ell[w] = rule(tower.elt(field, {0: 1, 1: w})) % 1
    beta = None
    for cand in sub:
        if all(ell[w] == Fraction(R.trace_to_prime(R.mul(cand, w), pdeg), tower.p) % 1
               for w in sub):
            beta = cand
            break
    if beta is None:
        raise ConductorError(
            f"rule on {field} is not trivial on 1+P^2 (conductor beyond 2)")
    return MultChar(tower, field, pi, a, beta if beta else None)


def trivial_char(tower: Tower, field: str) -> MultChar:
    return MultChar(tower, field, 0, 0, None)


def eta_unramified(tower: Tower, field: str) -> MultChar:
    """The unramified quadratic character of the field."""
    return MultChar(tower, field, Fraction(1, 2), 0, None)


def omega_quadratic(tower: Tower, big: str, small: str) -> MultChar:
    """The order-2 character of small^* with kernel N_{big/small}(big^*),
    found by brute membership against the norm-class generators and
    verified unique (that uniqueness is the index-2 fact of class field
    theory, so it is asserted, not assumed)."""
    if not tower.contains(big, small):
        raise ValueError(f"{small} is not a subfield of {big}")
    if len(tower.coset_reps(big, small)) != 2:
        raise ValueError(f"{big}/{small} is not quadratic")
    bigf = tower.fields[big]
    Q = tower.fields[small].residue_card - 1
    n_pi = tower.norm(bigf.uniformizer(), small)
    n_gam = tower.norm(tower.elt(big, {0: bigf.residue_gen()}), small)
    survivors = []
    for pi in (Fraction(0), Fraction(1, 2)):
        for aa in (0, Q // 2):
            if pi == 0 and aa == 0:
                continue
            cand = MultChar(tower, small, pi, aa, None)
            if cand.value(n_pi) == 0 and cand.value(n_gam) == 0:
                survivors.append(cand)
    assert len(survivors) == 1, f"norm group of {big}/{small} does not have index 2"
    return survivors[0]


def regular_tame_a_values(tower: Tower, field: str = "L") -> list[int]:
    """Representatives of the free mult-by-q orbits on Z/(q^f - 1): the
    tame characters with these residue exponents are the regular ones.
    Orbit representatives are the smallest member of each orbit."""
    fld = tower.fields[field]
    Q = fld.residue_card - 1
    degree = len(tower.coset_reps(field, "F"))
    reps, seen = [], set()
    for a in range(Q):
        if a in seen:
            continue
        orbit = set()
        x = a
        while x not in orbit:
            orbit.add(x)
            x = (x * tower.q) % Q
        seen |= orbit
        if len(orbit) == degree:
            reps.append(a)
    return reps


def regular_tame_characters(tower: Tower, field: str = "L",
                            pi_order: int | None = None) -> list[MultChar]:
    """Regular tame characters up to Galois twisting, with chi(pi) ranging
    over the mu_{pi_order} grid (default: q^f - 1)."""
    fld = tower.fields[field]
    if pi_order is None:
        pi_order = fld.residue_card - 1
    out = []
    for a in regular_tame_a_values(tower, field):
        for k in range(pi_order):
            out.append(MultChar(tower, field, Fraction(k, pi_order), a, None))
    return out


def enumerate_admissible_pairs(tower: Tower, pi_order: int | None = None) -> list[MultChar]:
    """One regular tame character of L per Galois-twist class: the data of
    an admissible pair with the ambient tower."""
    return regular_tame_characters(tower, "L", pi_order)


def characters_of_conductor(tower: Tower, field: str, c_max: int,
                            pi_order: int) -> list[MultChar]:
    """All characters with conductor <= c_max and chi(pi) in mu_{pi_order}."""
    if c_max > 2:
        raise ConductorError("only conductor <= 2 is modeled")
    fld = tower.fields[field]
    Q = fld.residue_card - 1
    betas = [None]
    if c_max >= 2:
        betas += [b for b in tower.R.subfield_elements(fld.residue_pdeg) if b]
    out = []
    for k in range(pi_order):
        for a in range(Q):
            for b in betas:
                ch = MultChar(tower, field, Fraction(k, pi_order), a, b)
                if ch.conductor() <= c_max:
                    out.append(ch)
    return out


class AddChar:
    """psi_a(x) = e(Tr_{k_F/F_p}(coefficient of t^{-1} in Tr_{K/F}(a x))/p)."""

    __slots__ = ("tower", "field", "a")

    def __init__(self, tower: Tower, field: str, a: Elt):
        if a.prec_abs is not None:
            raise ValueError("additive twist must be exact")
        if a.is_exact_zero():
            raise ValueError("additive character must be nontrivial")
        tower.field_view(a, field)  # membership check
        self.tower = tower
        self.field = field
        self.a = a

    def level(self) -> int:
        """d(psi) = v_K(a) + d0 where d0 is the level of the base member:
        0 on unramified fields, +1 on ramified ones (the base character is
        trivial on P^{-1} there because odd powers have no trace)."""
        fld = self.tower.fields[self.field]
        v = self.tower.field_view(self.a, self.field)[0]
        return v + (0 if fld.e == 1 else 1)

    def value(self, x: Elt) -> Fraction:
        tw = self.tower
        y = self.a * x
        if not tw.contains(self.field, y.field):
            raise ValueError(f"argument does not lie in {self.field}")
        y = Elt(tw, self.field, y.val if y.coeffs else 0, y.coeffs, y.prec_abs)
        tr = tw.trace(y, "F")
        w_f = tw.fields["F"].w
        c = tr.coeff_at(-w_f)
        return Fraction(tw.R.trace_to_prime(c, tw.s_deg), tw.p) % 1

    def __call__(self, x: Elt) -> Fraction:
        return self.value(x)

    def twist(self, b: Elt) -> "AddChar":
        return AddChar(self.tower, self.field, self.a * b)

    def on_field(self, field: str) -> "AddChar":
        """Member of the same family on another field (same twist)."""
        return AddChar(self.tower, field, self.a)

    def galois(self, sig) -> "AddChar":
        """psi^sigma with psi^sigma(x) = psi(sigma^{-1} x), which equals the
        member of the family twisted by sigma(a)."""
        return AddChar(self.tower, self.field, self.tower.galois_apply(self.a, sig))

    def inverse(self) -> "AddChar":
        return self.twist(-self.tower.one("F"))

    def key(self):
        return (self.field, self.a.val, self.a.coeffs)

    def __eq__(self, other):
        return isinstance(other, AddChar) and self.key() == other.key()

    def __repr__(self):
        return f"AddChar({self.field}, a={self.a!r}, level={self.level()})"


def psi_of_level(tower: Tower, field: str, d: int) -> AddChar:
    """The standard family member on `field` with a = pi_F^j chosen so the
    reported level is exactly d."""
    fld = tower.fields[field]
    d0 = 0 if fld.e == 1 else 1
    # a = pi_F^j has v_K(a) = e_K * j
    if (d - d0) % fld.e:
        raise ValueError(f"no pi_F-power twist gives level {d} on {field}")
    j = (d - d0) // fld.e
    return AddChar(tower, field, tower.elt("F", {j: 1}))
