import random
from fractions import Fraction

import pytest

from ptbzero.characters import (
    AddChar,
    MultChar,
    characters_of_conductor,
    eta_unramified,
    omega_quadratic,
    psi_of_level,
    trivial_char,
)
from ptbzero.cyclotomic import Cyclotomic
from ptbzero.epsilon import (
    EpsilonValue,
    epsilon_char,
    epsilon_induced,
    lambda_constant,
    norm_coset_characters,
)
from ptbzero.local_fields import build_tower
from ptbzero.weil_params import (
    FiniteMatrixModel,
    MonomialParam,
    ParamSum,
    _mat_kron,
    _mat_det,
    _mat_mul,
    _sparse_nullspace,
    classify_selfduality,
    classify_selfduality_bruteforce,
    det_param,
    epsilon_param,
    selfduality_alphas,
    selfduality_block,
    selfduality_chis,
    tensor_with_quadratic,
)


@pytest.fixture(scope="module")
def tw_unram():
    return build_tower(3, 3, 2, 1)


@pytest.fixture(scope="module")
def tw_ram():
    return build_tower(3, 3, 2, 2)


def chi_L(tw, pi, a):
    return MultChar(tw, "L", Fraction(pi), a, None)


def alpha_F(tw, pi, a):
    return MultChar(tw, "F", Fraction(pi), a, None)


# -- inducing data -------------------------------------------------------------


def test_dimension_counts_cosets(tw_unram, tw_ram):
    assert MonomialParam(tw_unram, "L", chi_L(tw_unram, 0, 8)).dimension == 4
    assert MonomialParam(tw_unram, "E",
                         MultChar(tw_unram, "E", Fraction(0), 1, None)
                         ).dimension == 2
    lifted = chi_L(tw_ram, 0, 8).compose_norm_from("M")
    assert MonomialParam(tw_ram, "M", lifted).dimension == 8


def test_equivalence_is_galois_orbit_equality(tw_unram):
    tw = tw_unram
    chi = chi_L(tw, Fraction(3, 80), 7)
    phi = MonomialParam(tw, "L", chi)
    for sig in tw.coset_reps("L", "F"):
        assert phi.is_equivalent(MonomialParam(tw, "L", chi.galois(sig)))
    assert not phi.is_equivalent(MonomialParam(tw, "L", chi_L(tw, 0, 8)))


def test_irreducibility_is_regularity_for_tame(tw_unram):
    tw = tw_unram
    assert MonomialParam(tw, "L", chi_L(tw, 0, 8)).is_irreducible()
    # 40 * 3 == 40 mod 80: a Frobenius-fixed exponent
    assert not MonomialParam(tw, "L", chi_L(tw, 0, 40)).is_irreducible()


def test_inducing_character_must_live_on_inducing_field(tw_unram):
    with pytest.raises(ValueError, match="inducing field"):
        MonomialParam(tw_unram, "L",
                      MultChar(tw_unram, "E", Fraction(0), 1, None))


def test_param_sum_dimension_and_line_guard(tw_unram):
    tw = tw_unram
    ps = ParamSum((MonomialParam(tw, "L", chi_L(tw, 0, 8)),),
                  (alpha_F(tw, Fraction(1, 4), 1),))
    assert ps.dimension == 5
    assert len(list(ps)) == 2
    with pytest.raises(ValueError, match="live on F"):
        ParamSum((), (MultChar(tw, "E", Fraction(0), 1, None),))


# -- determinants --------------------------------------------------------------


def test_det_matches_matrix_determinants(tw_unram):
    tw = tw_unram
    gamma_F = tw.elt("F", {0: tw.fields["F"].residue_gen()})
    pi_F = tw.fields["F"].uniformizer()
    for (k, a) in [(Fraction(1, 2), 8), (Fraction(3, 80), 7),
                   (Fraction(0), 1), (Fraction(1, 8), 11), (Fraction(0), 0)]:
        phi = MonomialParam(tw, "L", chi_L(tw, k, a))
        model = FiniteMatrixModel(phi)
        d = det_param(phi)
        assert model.det_T() == Cyclotomic.from_rotation(d.value(gamma_F))
        assert model.det_Phi() == Cyclotomic.from_rotation(d.value(pi_F))


def test_det_of_quadratic_induction_is_omega_twist(tw_unram):
    tw = tw_unram
    om = omega_quadratic(tw, "E", "F")
    for mu in [MultChar(tw, "E", Fraction(5, 8), 3, None),
               MultChar(tw, "E", Fraction(0), 1, None),
               trivial_char(tw, "E")]:
        d = det_param(MonomialParam(tw, "E", mu))
        assert d.key() == (om * mu.restrict_to("F")).key()


def test_det_of_trivial_induction_is_coset_character_product(tw_unram):
    tw = tw_unram
    d = det_param(MonomialParam(tw, "L", trivial_char(tw, "L")))
    prod = trivial_char(tw, "F")
    for om in norm_coset_characters(tw, "L", "F"):
        prod = prod * om
    assert d.key() == prod.key()


def test_det_refuses_ramified_induction(tw_ram):
    tw = tw_ram
    lifted = chi_L(tw, 0, 8).compose_norm_from("M")
    with pytest.raises(ValueError, match="factor"):
        det_param(MonomialParam(tw, "M", lifted))


def test_det_of_sum_multiplies(tw_unram):
    tw = tw_unram
    phi = MonomialParam(tw, "L", chi_L(tw, Fraction(1, 8), 7))
    line = alpha_F(tw, Fraction(1, 4), 1)
    d = det_param(ParamSum((phi,), (line,)))
    assert d.key() == (det_param(phi) * line).key()


# -- the matrix model ------------------------------------------------------------


def test_sparse_nullspace_on_small_systems():
    one = Cyclotomic.one()
    i = Cyclotomic.from_rotation(Fraction(1, 4))

    def check(rows, ncols):
        basis = _sparse_nullspace([dict(r) for r in rows], ncols)
        for vec in basis:
            for row in rows:
                acc = Cyclotomic.zero()
                for c, v in row.items():
                    acc = acc + v * vec.get(c, Cyclotomic.zero())
                assert acc.is_zero()
        return basis

    assert check([{0: one}, {1: one}], 2) == []
    sol = check([{0: one, 1: -one}], 2)
    assert len(sol) == 1 and sol[0][0] == one
    assert len(check([{0: one, 2: -one}], 3)) == 2
    sol = check([{0: i, 1: one}], 2)
    assert len(sol) == 1
    # redundant and contradictory rows together leave only the zero space
    assert check([{0: one, 1: one}, {0: one, 1: one},
                  {0: one, 1: -one}], 2) == []


def test_matrix_model_satisfies_tame_commutation(tw_unram):
    tw = tw_unram
    model = FiniteMatrixModel(MonomialParam(tw, "L", chi_L(tw, Fraction(3, 80), 7)))
    Tq = tuple(tuple(Cyclotomic.from_rotation((tw.q * model.rots[i]) % 1)
                     if i == j else Cyclotomic.zero()
                     for j in range(model.n)) for i in range(model.n))
    assert _mat_mul(model.Phi, model.T) == _mat_mul(Tq, model.Phi)


def test_matrix_model_frobenius_power_reaches_the_corner(tw_unram):
    tw = tw_unram
    model = FiniteMatrixModel(MonomialParam(tw, "L", chi_L(tw, Fraction(3, 80), 7)))
    n = model.n
    corner = Cyclotomic.from_rotation(model.corner)
    full = model.group_element(0, n)
    for i in range(n):
        for j in range(n):
            expect = corner if i == j else Cyclotomic.zero()
            assert full[i][j] == expect
    assert model.trace(0, n) == corner * Cyclotomic.rational(n)
    assert model.trace(0, 1).is_zero()
    acc = Cyclotomic.zero()
    for r in model.rots:
        acc = acc + Cyclotomic.from_rotation(r)
    assert model.trace(1, 0) == acc


def test_matrix_model_guards(tw_unram, tw_ram):
    lifted = chi_L(tw_ram, 0, 8).compose_norm_from("M")
    with pytest.raises(ValueError, match="unramified"):
        FiniteMatrixModel(MonomialParam(tw_ram, "M", lifted))
    wild = MultChar(tw_unram, "L", Fraction(0), 1,
                    tw_unram.fields["L"].residue_gen())
    with pytest.raises(ValueError, match="tame"):
        FiniteMatrixModel(MonomialParam(tw_unram, "L", wild))


# -- selfduality ------------------------------------------------------------------


HAND_INSTANCES = [
    # (chi pi, chi a, alpha pi, alpha a, expected type)
    (Fraction(1, 2), 8, Fraction(0), 0, "symplectic"),
    (Fraction(0), 8, Fraction(0), 0, "orthogonal"),
    (Fraction(1, 8), 11, Fraction(0), 0, "not_selfdual"),
    (Fraction(0), 1, Fraction(0), 0, "not_selfdual"),
    # twisting by the unramified quadratic character changes nothing:
    # its norm composition to L0 is trivial
    (Fraction(1, 2), 8, Fraction(0), 40, "symplectic"),
    (Fraction(0), 8, Fraction(0), 40, "orthogonal"),
    # a quartic uniformizer value reaches L0 undoubled and swaps the types
    (Fraction(1, 2), 8, Fraction(1, 4), 0, "orthogonal"),
    (Fraction(0), 8, Fraction(1, 4), 0, "symplectic"),
    (Fraction(1, 8), 8, Fraction(1, 4), 0, "not_selfdual"),
]


@pytest.mark.parametrize("ck,ca,ak,ab,expected", HAND_INSTANCES)
def test_selfduality_hand_instances(tw_unram, ck, ca, ak, ab, expected):
    tw = tw_unram
    phi = MonomialParam(tw, "L", chi_L(tw, ck, ca))
    alpha = alpha_F(tw, ak, ab)
    assert classify_selfduality(phi, alpha) == expected
    assert classify_selfduality_bruteforce(phi, alpha) == expected


def test_selfduality_constant_on_galois_orbit(tw_unram):
    tw = tw_unram
    chi = chi_L(tw, Fraction(1, 2), 8)
    alpha = alpha_F(tw, 0, 0)
    for sig in tw.coset_reps("L", "F"):
        phi = MonomialParam(tw, "L", chi.galois(sig))
        assert classify_selfduality(phi, alpha) == "symplectic"
        assert classify_selfduality_bruteforce(phi, alpha) == "symplectic"


def test_selfduality_routes_agree_on_random_sample(tw_unram):
    tw = tw_unram
    rng = random.Random(20260815)
    chis = selfduality_chis(tw)
    alphas = selfduality_alphas(tw)
    eta = eta_unramified(tw, "F")
    for _ in range(25):
        chi = rng.choice(chis)
        alpha = rng.choice(alphas)
        phi = MonomialParam(tw, "L", chi)
        kind = classify_selfduality(phi, alpha)
        assert classify_selfduality_bruteforce(phi, alpha) == kind
        if kind == "not_selfdual":
            continue
        # selfdual detected: the determinant pins the type from the other side
        d = det_param(phi)
        a2 = alpha * alpha
        if kind == "symplectic":
            assert d.key() == a2.key()
        else:
            assert d.key() == (a2 * eta).key()


def test_symplectic_determinant_is_alpha_square(tw_unram):
    tw = tw_unram
    for (ck, ca, ak, ab) in [(Fraction(1, 2), 8, Fraction(0), 0),
                             (Fraction(0), 8, Fraction(1, 4), 0),
                             (Fraction(1, 2), 48, Fraction(0), 0)]:
        phi = MonomialParam(tw, "L", chi_L(tw, ck, ca))
        alpha = alpha_F(tw, ak, ab)
        assert classify_selfduality(phi, alpha) == "symplectic"
        assert det_param(phi).key() == (alpha * alpha).key()


def test_selfduality_guards(tw_unram):
    tw = tw_unram
    good = MonomialParam(tw, "L", chi_L(tw, Fraction(1, 2), 8))
    alpha = alpha_F(tw, 0, 0)
    with pytest.raises(ValueError, match="lives on F"):
        classify_selfduality(good, MultChar(tw, "E", Fraction(0), 1, None))
    from_E = MonomialParam(tw, "E", MultChar(tw, "E", Fraction(0), 1, None))
    with pytest.raises(ValueError, match="layer L"):
        classify_selfduality(from_E, alpha)
    wild = MonomialParam(tw, "L", MultChar(tw, "L", Fraction(0), 8,
                                           tw.fields["L"].residue_gen()))
    with pytest.raises(ValueError, match="tame"):
        classify_selfduality(wild, alpha)
    reducible = MonomialParam(tw, "L", chi_L(tw, 0, 40))
    with pytest.raises(ValueError, match="irreducible"):
        classify_selfduality(reducible, alpha)
    wild_alpha = MultChar(tw, "F", Fraction(0), 0, 1)
    with pytest.raises(ValueError, match="tame"):
        classify_selfduality_bruteforce(good, wild_alpha)


def test_selfduality_family_sizes_and_block(tw_unram):
    tw = tw_unram
    alphas = selfduality_alphas(tw)
    chis = selfduality_chis(tw)
    assert len(alphas) == 160
    assert len(chis) == 1440
    rows = selfduality_block(tw, chis[0], alphas[:6])
    assert len(rows) == 6
    for row in rows:
        assert row["agree"]
        assert row["criterion"] == row["bruteforce"]
        assert set(row) == {"chi", "alpha", "criterion", "bruteforce", "agree"}


# -- tensor decomposition ---------------------------------------------------------


def test_tensor_unramified_splits_into_two_inductions(tw_unram):
    tw = tw_unram
    phi = MonomialParam(tw, "L", chi_L(tw, Fraction(3, 80), 7))
    mu = MultChar(tw, "E", Fraction(1, 8), 3, 1)
    assert mu.conductor() == 2
    out = tensor_with_quadratic(phi, mu)
    assert [m.field for m in out.monomials] == ["L", "L"]
    assert [m.dimension for m in out.monomials] == [4, 4]
    assert not out.lines
    assert all(m.chi.conductor() == 2 for m in out.monomials)


def test_tensor_with_trivial_mu_gives_equivalent_summands(tw_unram):
    tw = tw_unram
    phi = MonomialParam(tw, "L", chi_L(tw, Fraction(3, 80), 7))
    out = tensor_with_quadratic(phi, trivial_char(tw, "E"))
    assert out.monomials[0].is_equivalent(out.monomials[1])
    assert out.monomials[0].is_equivalent(phi)


def test_tensor_ramified_collapses_to_the_compositum(tw_ram):
    tw = tw_ram
    phi = MonomialParam(tw, "L", chi_L(tw, Fraction(1, 2), 8))
    mu = next(m for m in characters_of_conductor(tw, "E", 2, 8)
              if m.conductor() == 2)
    out = tensor_with_quadratic(phi, mu)
    assert len(out.monomials) == 1 and not out.lines
    assert out.monomials[0].field == "M"
    assert out.monomials[0].dimension == 8
    assert out.monomials[0].chi.conductor() == 2


def test_tensor_guards(tw_unram):
    tw = tw_unram
    phi = MonomialParam(tw, "L", chi_L(tw, 0, 8))
    with pytest.raises(ValueError, match="induced from E"):
        tensor_with_quadratic(phi, alpha_F(tw, 0, 1))
    from_E = MonomialParam(tw, "E", MultChar(tw, "E", Fraction(0), 1, None))
    with pytest.raises(ValueError, match="layer L"):
        tensor_with_quadratic(from_E, MultChar(tw, "E", Fraction(0), 1, None))


def test_tensor_traces_match_the_kronecker_model(tw_unram):
    tw = tw_unram
    phi = MonomialParam(tw, "L", chi_L(tw, Fraction(3, 80), 7))
    mu = MultChar(tw, "E", Fraction(5, 8), 3, None)
    out = tensor_with_quadratic(phi, mu)
    mA = FiniteMatrixModel(phi)
    # the decomposition is of phi tensor the induction of mu^{-1}
    mB = FiniteMatrixModel(MonomialParam(tw, "E", mu.inverse()))
    mouts = [FiniteMatrixModel(m) for m in out.monomials]
    for (k, l) in [(0, 0), (1, 0), (0, 1), (3, 2), (2, 1), (5, 3), (7, 4),
                   (1, 4), (0, 2)]:
        lhs = mA.trace(k, l) * mB.trace(k, l)
        rhs = Cyclotomic.zero()
        for mo in mouts:
            rhs = rhs + mo.trace(k, l)
        assert lhs == rhs, (k, l)


def test_tensor_dimension_and_determinant_exhaustive(tw_unram):
    tw = tw_unram
    gamma_F = tw.elt("F", {0: tw.fields["F"].residue_gen()})
    pi_F = tw.fields["F"].uniformizer()
    mus = [MultChar(tw, "E", Fraction(k, 8), b, None)
           for b in range(8) for k in range(8)]
    from ptbzero.characters import regular_tame_a_values
    for a in regular_tame_a_values(tw, "L"):
        phi = MonomialParam(tw, "L", chi_L(tw, Fraction(1, 80), a))
        mA = FiniteMatrixModel(phi)
        for mu in mus:
            out = tensor_with_quadratic(phi, mu)
            assert sum(m.dimension for m in out.monomials) == 8
            mB = FiniteMatrixModel(MonomialParam(tw, "E", mu.inverse()))
            d = det_param(out)
            dT = _mat_det(_mat_kron(mA.T, mB.T))
            dP = _mat_det(_mat_kron(mA.Phi, mB.Phi))
            assert dT == Cyclotomic.from_rotation(d.value(gamma_F))
            assert dP == Cyclotomic.from_rotation(d.value(pi_F))


def test_ramified_composite_trivial_on_the_twisted_line(tw_ram):
    tw = tw_ram
    chi = chi_L(tw, Fraction(1, 2), 8)
    chi_L0 = chi.restrict_to("L0").key()
    phi = MonomialParam(tw, "L", chi)
    triv = trivial_char(tw, "L2").key()
    matching = [m for m in characters_of_conductor(tw, "E", 2, 8)
                if m.conductor() == 2
                and m.restrict_to("F").compose_norm_from("L0").key() == chi_L0]
    assert len(matching) == 8
    for mu in matching:
        comp = tensor_with_quadratic(phi, mu).monomials[0].chi
        assert comp.restrict_to("L2").key() == triv
    # with the quadratic-twisted inducing character the restriction is the
    # unramified quadratic character of the twisted line instead
    phi_eta = MonomialParam(tw, "L", eta_unramified(tw, "L") * chi)
    comp = tensor_with_quadratic(phi_eta, matching[0]).monomials[0].chi
    assert comp.restrict_to("L2").key() == eta_unramified(tw, "L2").key()


# -- epsilon through parameters ----------------------------------------------------


def test_epsilon_param_multiplies_over_sums(tw_unram):
    tw = tw_unram
    psi = psi_of_level(tw, "F", 0)
    phi = MonomialParam(tw, "L", chi_L(tw, Fraction(3, 80), 7))
    other = MonomialParam(tw, "L", chi_L(tw, Fraction(1, 8), 11))
    line = alpha_F(tw, Fraction(1, 4), 1)
    ps = ParamSum((phi, other), (line,))
    assert epsilon_param(ps, psi) == (epsilon_param(phi, psi)
                                      * epsilon_param(other, psi)
                                      * epsilon_char(line, psi))


@pytest.mark.parametrize("field", ["E", "L0", "L"])
def test_epsilon_of_trivial_induction_unfolds_lambda(tw_unram, field):
    tw = tw_unram
    psi = psi_of_level(tw, "F", 0)
    lhs = epsilon_induced(tw, trivial_char(tw, field), "F", psi)
    psi_up = AddChar(tw, field, psi.a)
    assert lhs == lambda_constant(tw, field, "F", psi) * \
        epsilon_char(trivial_char(tw, field), psi_up)


def test_epsilon_covariant_under_unramified_twist(tw_unram):
    # twisting chi' by an unramified character pulled through the norm
    # multiplies epsilon by that character's value at a predictable power
    # of the uniformizer; the two computation orders must agree
    tw = tw_unram
    psi = psi_of_level(tw, "F", 0)
    chi = chi_L(tw, Fraction(3, 80), 7)
    nu = alpha_F(tw, Fraction(7, 80), 0)
    nu_N = nu.compose_norm_from("L")
    shift = chi.conductor() + AddChar(tw, "L", psi.a).level()
    rot = (nu_N.value(tw.fields["L"].uniformizer()) * shift) % 1
    lhs = epsilon_induced(tw, chi * nu_N, "F", psi)
    rhs = EpsilonValue.from_rotation(rot, tw.q) * \
        epsilon_induced(tw, chi, "F", psi)
    assert lhs == rhs


def test_epsilon_param_guards(tw_unram):
    tw = tw_unram
    phi = MonomialParam(tw, "L", chi_L(tw, 0, 8))
    psi_up = psi_of_level(tw, "L", 0)
    with pytest.raises(ValueError, match="psi on F"):
        epsilon_param(phi, psi_up)
    psi = psi_of_level(tw, "F", 0)
    with pytest.raises(ValueError, match="live on F"):
        epsilon_param(MultChar(tw, "E", Fraction(0), 1, None), psi)
