"""Depth-zero conjecture checker.

A case is a regular tame character of L (the depth-zero cuspidal datum),
a character of the quadratic subextension E with conductor at most 2, and
an additive character of F.  The engine evaluates three things separately
and then insists they cohere: the distinction predicate (a restriction
condition plus the ramified-tame obstruction), the symplecticity of the
attached induced parameter, and the epsilon factor of the twisted tensor,
computed mechanically from the Mackey decomposition with no appeal to the
closed sign law.  The sweep asserts the equivalence

    distinguished  <=>  symplectic and epsilon = omega(-1)^m mu(-1)^m

on every admissible pair, aborting loudly on any counterexample.
"""

from __future__ import annotations

from fractions import Fraction

from .characters import (
    AddChar,
    MultChar,
    characters_of_conductor,
    enumerate_admissible_pairs,
    eta_unramified,
    omega_quadratic,
    psi_of_level,
)
from .epsilon import EpsilonValue
from .green_ff import CuspidalFF, ff_distinction_dim, shalika_hom_dim
from .local_fields import Tower
from .weil_params import (
    MonomialParam,
    classify_selfduality,
    epsilon_param,
    tensor_with_quadratic,
)


class ConjectureCounterexample(AssertionError):
    """Raised when a sweep finds a case violating the equivalence."""


class PtbCase:
    """One admissible (chi, mu, psi) triple on a fixed tower.  Central
    compatibility mu^m|_{F^*} = chi|_{F^*} is part of the type: the
    conjecture presumes the central characters agree."""

    __slots__ = ("tower", "chi", "mu", "psi")

    def __init__(self, tower: Tower, chi: MultChar, mu: MultChar,
                 psi: AddChar | None = None):
        if chi.field != "L":
            raise ValueError("chi must live on L")
        if not chi.is_tame() or not chi.is_regular():
            raise ValueError("chi must be regular and tame")
        if mu.field != "E":
            raise ValueError("mu must live on E")
        if mu.conductor() > 2:
            raise ValueError("mu conductor above the modeled cap")
        if psi is None:
            psi = psi_of_level(tower, "F", 0)
        if psi.field != "F":
            raise ValueError("psi must live on F")
        if not central_compatible(tower, chi, mu):
            raise ValueError("central characters disagree")
        self.tower = tower
        self.chi = chi
        self.mu = mu
        self.psi = psi

    @property
    def m(self) -> int:
        return self.tower.m

    def key(self):
        def orderable(k):
            return tuple(-1 if v is None else v for v in k)

        return (self.tower.e_E, orderable(self.chi.key()),
                orderable(self.mu.key()), self.psi.level())

    def __repr__(self):
        return (f"PtbCase(e_E={self.tower.e_E}, chi={self.chi.key()[1:]}, "
                f"mu={self.mu.key()[1:]}, psi_level={self.psi.level()})")


def central_compatible(tower: Tower, chi: MultChar, mu: MultChar) -> bool:
    m = tower.m
    return ((mu ** m).restrict_to("F").key()
            == chi.restrict_to("F").key())


def restriction_parts(case: PtbCase) -> tuple[bool, bool]:
    """(uniformizer part, unit part) of chi|_{L_0^*} = mu|_{F^*} o N_{L_0/F}.
    The unit part is what the residue-field models can see."""
    lhs = case.chi.restrict_to("L0")
    rhs = case.mu.restrict_to("F").compose_norm_from("L0")
    return (lhs.pi == rhs.pi,
            lhs.a == rhs.a and lhs.beta == rhs.beta)


def restriction_matches(case: PtbCase) -> bool:
    pi_ok, unit_ok = restriction_parts(case)
    return pi_ok and unit_ok


def distinction_predicate(case: PtbCase) -> tuple[bool, int | None]:
    """Whether Hom_H(pi(chi), mu o det) is nonzero, with its dimension when
    the theorem pins it down (None encodes ">= 1, exact value open)."""
    if case.m < 2:
        raise ValueError("needs m >= 2")
    if not restriction_matches(case):
        return False, 0
    if case.tower.e_E == 2 and case.mu.is_tame():
        return False, 0
    if case.tower.e_E == 2:
        return True, None
    return True, 1


def symplectic_predicate(case: PtbCase) -> bool:
    """The restriction criterion, cross-checked against the bilinear-form
    classifier on the induced parameter whenever the twisting character is
    tame enough for the classifier to apply."""
    if case.m < 2:
        raise ValueError("needs m >= 2")
    out = restriction_matches(case)
    alpha = case.mu.restrict_to("F")
    if alpha.is_tame():
        tw = case.tower
        phi = MonomialParam(tw, "L", eta_unramified(tw, "L") * case.chi)
        kind = classify_selfduality(phi, alpha)
        if out != (kind == "symplectic"):
            raise RuntimeError(
                f"criterion/classifier disagreement on {case!r}: "
                f"criterion {out}, classifier {kind}")
    elif out:
        raise RuntimeError(f"wild twist cannot match a tame restriction: {case!r}")
    return out


def _sign_value(case: PtbCase) -> EpsilonValue:
    tw = case.tower
    omega = omega_quadratic(tw, "E", "F")
    minus_one_F = tw.elt("F", {0: tw.R.neg(1)})
    minus_one_E = tw.elt("E", {0: tw.R.neg(1)})
    rot = (case.m * (omega.value(minus_one_F) + case.mu.value(minus_one_E))) % 1
    return EpsilonValue.from_rotation(rot, tw.q)


def conjecture_expected(case: PtbCase) -> EpsilonValue:
    """The root of unity the conjecture compares epsilon against:
    omega_{E/F}(-1)^m mu(-1)^m."""
    return _sign_value(case)


def theorem_sign(case: PtbCase) -> EpsilonValue:
    """The proven value of the mechanical epsilon on restriction-matching
    cases: the conjecture sign, flipped exactly when E/F is ramified and
    mu is tame."""
    base = _sign_value(case)
    if case.tower.e_E == 2 and case.mu.is_tame():
        return EpsilonValue.from_rotation(
            (base.as_rotation() + Fraction(1, 2)) % 1, case.tower.q)
    return base


def epsilon_ptb(case: PtbCase) -> EpsilonValue:
    """epsilon(1/2, Ind(eta chi) (x) Ind(mu^{-1}), psi) assembled from the
    Mackey decomposition; nothing here knows the closed sign law."""
    tw = case.tower
    phi = MonomialParam(tw, "L", eta_unramified(tw, "L") * case.chi)
    return epsilon_param(tensor_with_quadratic(phi, case.mu), case.psi)


class PtbVerdict:
    __slots__ = ("case", "distinguished", "multiplicity", "symplectic",
                 "epsilon", "epsilon_expected", "conjecture_holds")

    def __init__(self, case: PtbCase):
        self.case = case
        self.distinguished, self.multiplicity = distinction_predicate(case)
        self.symplectic = symplectic_predicate(case)
        self.epsilon = epsilon_ptb(case)
        self.epsilon_expected = conjecture_expected(case)
        self.conjecture_holds = (
            self.distinguished
            == (self.symplectic and self.epsilon == self.epsilon_expected))

    def to_json(self) -> dict:
        return {
            "e_E": self.case.tower.e_E,
            "chi": self.case.chi.to_json(),
            "mu": self.case.mu.to_json(),
            "psi_level": self.case.psi.level(),
            "distinguished": self.distinguished,
            "multiplicity": ("unknown" if self.multiplicity is None
                             else self.multiplicity),
            "symplectic": self.symplectic,
            "epsilon": repr(self.epsilon),
            "epsilon_expected": repr(self.epsilon_expected),
            "conjecture_holds": self.conjecture_holds,
        }


def admissible_cases(tower: Tower, mu_conductor_max: int = 2,
                     pi_order_chi: int | None = None,
                     pi_order_mu: int | None = None,
                     mu_tame: bool | None = None,
                     psi: AddChar | None = None) -> list[PtbCase]:
    """All (chi, mu) pairs from the finite tame/conductor-2 universe that
    pass the central filter, in deterministic key order.  The centrally
    matching pairs are found by bucketing both sides on their restriction
    to F instead of scanning the full product."""
    if psi is None:
        psi = psi_of_level(tower, "F", 0)
    chis = enumerate_admissible_pairs(tower, pi_order_chi)
    if pi_order_mu is None:
        pi_order_mu = tower.fields["E"].residue_card - 1
    mus = characters_of_conductor(tower, "E", mu_conductor_max, pi_order_mu)
    if mu_tame is True:
        mus = [mu for mu in mus if mu.is_tame()]
    elif mu_tame is False:
        mus = [mu for mu in mus if not mu.is_tame()]
    buckets: dict = {}
    for mu in mus:
        buckets.setdefault((mu ** tower.m).restrict_to("F").key(), []).append(mu)
    cases = []
    for chi in chis:
        for mu in buckets.get(chi.restrict_to("F").key(), ()):
            cases.append(PtbCase(tower, chi, mu, psi))
    cases.sort(key=lambda c: c.key())
    return cases


def _residual_cross_checks(case: PtbCase, unit_ok: bool, cache: dict) -> None:
    """The finite-field models must reproduce the unit part of the
    restriction condition: GL_m(k_E)-distinction for tame mu when E is
    unramified, the twisted Shalika dimension for conductor-2 mu."""
    tw = case.tower
    n, q = 2 * tw.m, tw.q
    theta = case.chi.a
    if tw.e_E == 1 and case.mu.is_tame():
        key = ("ff", theta, case.mu.a)
        if key not in cache:
            pi = CuspidalFF(n, q, theta)
            cache[key] = ff_distinction_dim(pi, case.mu.a)
        if (cache[key] == 1) != unit_ok:
            raise ConjectureCounterexample(
                f"residual distinction dim {cache[key]} contradicts unit "
                f"restriction match {unit_ok} on {case!r}")
    elif not case.mu.is_tame():
        alpha = case.mu.restrict_to("F")
        if alpha.is_tame():
            key = ("shalika", theta, alpha.a)
            if key not in cache:
                pi = CuspidalFF(n, q, theta)
                cache[key] = shalika_hom_dim(pi, alpha.a)
            if (cache[key] == 1) != unit_ok:
                raise ConjectureCounterexample(
                    f"Shalika dim {cache[key]} contradicts unit restriction "
                    f"match {unit_ok} on {case!r}")


def _corollary_checks(case: PtbCase) -> None:
    """On the distinguished locus the twisted-selfduality relation
    chi^sigma = (mu|_F o N_{L/F}) chi^{-1} must hold and mu|_{F^*} must be
    tame."""
    tw = case.tower
    lhs = case.chi.galois(tw.sigma_L_L0)
    rhs = case.mu.restrict_to("F").compose_norm_from("L") * case.chi.inverse()
    if lhs.key() != rhs.key():
        raise ConjectureCounterexample(
            f"sigma-twist relation fails on distinguished case {case!r}")
    if not case.mu.restrict_to("F").is_tame():
        raise ConjectureCounterexample(
            f"mu|_F is wild on distinguished case {case!r}")


def sweep(tower: Tower, mu_conductor_max: int = 2,
          pi_order_chi: int | None = None, pi_order_mu: int | None = None,
          mu_tame: bool | None = None, psi_sample_stride: int = 17,
          cross_checks: bool = True) -> list[PtbVerdict]:
    """Exhaustive conjecture run over the admissible universe.  Returns all
    verdicts in deterministic order; raises ConjectureCounterexample with a
    case dump if any verdict breaks the equivalence or any side assertion
    fails."""
    cases = admissible_cases(tower, mu_conductor_max, pi_order_chi,
                             pi_order_mu, mu_tame)
    verdicts = []
    cache: dict = {}
    for idx, case in enumerate(cases):
        v = PtbVerdict(case)
        if not v.conjecture_holds:
            raise ConjectureCounterexample(f"equivalence fails: {v.to_json()}")
        pi_ok, unit_ok = restriction_parts(case)
        if pi_ok and unit_ok:
            if v.epsilon != theorem_sign(case):
                raise ConjectureCounterexample(
                    f"sign law fails: {v.to_json()}")
            if v.distinguished:
                _corollary_checks(case)
        if cross_checks:
            _residual_cross_checks(case, unit_ok, cache)
        if psi_sample_stride and idx % psi_sample_stride == 0:
            for level in (-1, 1):
                shifted = PtbCase(tower, case.chi, case.mu,
                                  psi_of_level(tower, "F", level))
                eps = epsilon_ptb(shifted)
                if pi_ok and unit_ok and eps != v.epsilon:
                    raise ConjectureCounterexample(
                        f"epsilon moved with psi level {level}: {v.to_json()}")
                holds = (v.distinguished
                         == (v.symplectic and eps == conjecture_expected(shifted)))
                if not holds:
                    raise ConjectureCounterexample(
                        f"equivalence fails at psi level {level}: {v.to_json()}")
        verdicts.append(v)
    return verdicts
