import random
from fractions import Fraction

import pytest

from ptbzero.cyclotomic import Cyclotomic
from ptbzero.green_ff import (
    ConjInvariant,
    CuspidalFF,
    DistinctionEmbedding,
    ShalikaGroup,
    _compositions,
    _context,
    _det_prime,
    _partitions,
    char_poly,
    class_representative,
    companion_matrix,
    conjugacy_classes,
    cuspidality_defect,
    ff_distinction_dim,
    gl_order,
    invariant_of_class,
    irreducible_polys,
    jordan_decompose,
    mat_identity,
    mat_mul,
    mat_pow,
    mat_rank,
    norm_squared,
    parabolic_pairing,
    poly_mul,
    poly_pow,
    regular_theta_orbits,
    shalika_hom_dim,
)


# -- matrix and polynomial helpers ---------------------------------------------------


def _brute_char_poly(A, p):
    # cofactor expansion of det(xI - A), independent of the Hessenberg route
    n = len(A)
    M = [[((-A[i][j]) % p,) if i != j else ((-A[i][j]) % p, 1)
          for j in range(n)] for i in range(n)]

    def det(rows, cols):
        if len(rows) == 1:
            return M[rows[0]][cols[0]]
        out = (0,)
        for k, c in enumerate(cols):
            term = poly_mul(M[rows[0]][c], det(rows[1:], cols[:k] + cols[k + 1:]), p)
            if k % 2:
                term = tuple((-t) % p for t in term)
            size = max(len(out), len(term))
            out = tuple(((out[i] if i < len(out) else 0)
                         + (term[i] if i < len(term) else 0)) % p
                        for i in range(size))
        return out

    cp = det(tuple(range(n)), tuple(range(n)))
    return tuple(cp) + (0,) * (n + 1 - len(cp))


def test_char_poly_matches_cofactor_expansion():
    rng = random.Random(41)
    for _ in range(200):
        n = rng.choice([2, 3, 4])
        p = rng.choice([2, 3, 5])
        A = tuple(tuple(rng.randrange(p) for _ in range(n)) for _ in range(n))
        assert char_poly(A, p) == _brute_char_poly(A, p)


def test_char_poly_of_companion_matrix_is_the_polynomial():
    f = (1, 2, 0, 1, 1)  # monic quartic over F_3
    assert char_poly(companion_matrix(f, 3), 3) == f


def test_det_and_rank_basics():
    g = ((1, 2), (1, 1))
    assert _det_prime(g, 3) == (1 - 2) % 3
    assert mat_rank(g, 3) == 2
    assert _det_prime(((1, 2), (2, 1)), 3) == 0
    assert mat_rank(((1, 2), (2, 1)), 3) == 1


def test_mat_pow_matches_repeated_multiplication():
    g = ((1, 1, 0), (0, 1, 1), (1, 0, 2))
    acc = mat_identity(3)
    for e in range(6):
        assert mat_pow(g, e, 3) == acc
        acc = mat_mul(acc, g, 3)


@pytest.mark.parametrize("p,counts", [(3, [3, 3, 8, 18]), (5, [5, 10, 40, 150])])
def test_irreducible_poly_counts(p, counts):
    # necklace counts: (1/d) sum_{e|d} mu(e) p^(d/e)
    for d, want in zip(range(1, 5), counts):
        assert len(irreducible_polys(p, d)) == want


def test_irreducibles_have_no_roots_in_prime_field():
    for f in irreducible_polys(3, 3):
        for x in range(3):
            assert sum(c * x ** i for i, c in enumerate(f)) % 3 != 0


# -- conjugacy classes ---------------------------------------------------------------


def test_partitions_of_five():
    assert len(_partitions(5)) == 7
    assert all(sum(lam) == 5 for lam in _partitions(5))


@pytest.mark.parametrize("n,q,num", [(2, 3, 8), (3, 3, 24), (4, 3, 78), (2, 5, 24)])
def test_class_inventory_counts_and_total(n, q, num):
    classes = conjugacy_classes(n, q)
    assert len(classes) == num
    assert sum(size for _, size in classes) == gl_order(n, q)


def test_class_representatives_live_in_their_class():
    ctx = _context(4, 3)
    for data, _size in conjugacy_classes(4, 3):
        rep = class_representative(data, 3)
        s, u, inv = jordan_decompose(rep, ctx=ctx)
        assert mat_mul(s, u, 3) == rep
        assert mat_mul(s, u, 3) == mat_mul(u, s, 3)
        assert inv == invariant_of_class(data, ctx)


def test_jordan_decompose_rejects_singular():
    with pytest.raises(ValueError):
        jordan_decompose(((1, 0), (2, 0)), q=3)


def _inverse_by_order(x, p):
    o = 1
    acc = x
    while acc != mat_identity(len(x)):
        acc = mat_mul(acc, x, p)
        o += 1
    return mat_pow(x, o - 1, p)


def test_jordan_decompose_on_conjugates_is_constant():
    # the invariant must not depend on the representative
    ctx = _context(4, 3)
    rng = random.Random(3)
    g = class_representative((((2, 2, 1), (2,)),), 3)  # elliptic, one size-2 block
    base = jordan_decompose(g, ctx=ctx)[2]
    assert base is not None and base.d == 2 and base.jordan == (2,)
    for _ in range(20):
        while True:
            x = tuple(tuple(rng.randrange(3) for _ in range(4)) for _ in range(4))
            if mat_rank(x, 3) == 4:
                break
        conj = mat_mul(mat_mul(x, g, 3), _inverse_by_order(x, 3), 3)
        assert jordan_decompose(conj, ctx=ctx)[2] == base


def test_unipotent_invariant_reads_jordan_type():
    u = ((1, 1, 0, 0), (0, 1, 0, 0), (0, 0, 1, 1), (0, 0, 0, 1))
    _s, _u, inv = jordan_decompose(u, q=3)
    assert inv.d == 1 and inv.jordan == (2, 2) and inv.orbit == (0,)


def test_invariant_requires_matching_orbit_length():
    with pytest.raises(ValueError):
        ConjInvariant(2, (0,), (1,))


# -- the cuspidal character ----------------------------------------------------------


def test_regular_orbit_inventory():
    assert regular_theta_orbits(2, 3) == [1, 2, 5]
    orbits = regular_theta_orbits(4, 3)
    assert len(orbits) == 18
    assert all(len({t * 3 ** i % 80 for i in range(4)}) == 4 for t in orbits)


def test_rejects_non_regular_exponent():
    with pytest.raises(ValueError):
        CuspidalFF(4, 3, 10)  # orbit {10, 30, 10, 30} collapses
    with pytest.raises(ValueError):
        CuspidalFF(2, 3, 4)


def test_degree_and_identity_value():
    pi = CuspidalFF(4, 3, 1)
    assert pi.degree() == 416
    assert pi.value_at(mat_identity(4)) == Cyclotomic.rational(416)
    assert CuspidalFF(2, 3, 1).degree() == 2


def test_value_on_central_times_regular_unipotent():
    # single Jordan block at a central eigenvalue: value is -theta(z) for n=2
    pi = CuspidalFF(2, 3, 1)
    z = 2  # the nontrivial central element
    g = ((z, 1), (0, z))
    want = -Cyclotomic.from_rotation(Fraction(1 * 4, 8))  # log of 2 in F_9 is 4
    assert pi.value_at(g) == want


def test_value_on_elliptic_class():
    # eigenvalue gamma in F_9 minus F_3: value is -(theta(l) + theta(l^q))
    pi = CuspidalFF(2, 3, 1)
    g = companion_matrix((2, 2, 1), 3)  # Conway polynomial of F_9
    want = -(Cyclotomic.from_rotation(Fraction(1, 8))
             + Cyclotomic.from_rotation(Fraction(3, 8)))
    assert pi.value_at(g) == want


def test_vanishes_off_primary_classes():
    pi = CuspidalFF(2, 3, 1)
    assert pi.value_at(((1, 0), (0, 2))).is_zero()


def test_norm_one_n2_and_n4():
    assert norm_squared(CuspidalFF(2, 3, 1)) == 1
    assert norm_squared(CuspidalFF(4, 3, 1)) == 1
    assert norm_squared(CuspidalFF(2, 5, 1)) == 1


def test_galois_twist_gives_identical_values():
    ctx = _context(4, 3)
    pi = CuspidalFF(4, 3, 7)
    tw = CuspidalFF(4, 3, 7 * 3 % 80)
    for data, _size in conjugacy_classes(4, 3):
        inv = invariant_of_class(data, ctx)
        assert pi.value(inv) == tw.value(inv)


def test_cuspidality_projectors_vanish():
    pi = CuspidalFF(4, 3, 1)
    for comp in _compositions(4):
        assert cuspidality_defect(pi, comp) == 0


def test_no_constituent_in_parabolically_induced_trivial():
    pi = CuspidalFF(4, 3, 2)
    for comp in [(1, 3), (2, 2), (1, 1, 2)]:
        assert parabolic_pairing(pi, comp) == 0


# -- Shalika homs --------------------------------------------------------------------


def test_shalika_group_order():
    S = ShalikaGroup(4, 3)
    assert S.order == 48 * 81
    count = sum(1 for _ in S.elements())
    assert count == S.order


def test_shalika_embedding_shape():
    S = ShalikaGroup(4, 3)
    g = ((1, 1), (0, 1))
    x = ((0, 1), (2, 0))
    emb = S.embed(g, x)
    assert emb[0][:2] == (1, 1) and emb[2][2:] == (1, 1)
    assert emb[0][2:] == tuple(mat_mul(g, x, 3)[0])
    assert emb[2][:2] == (0, 0)


def test_shalika_dims_follow_exponent_rule_n4():
    # dim 1 exactly when theta restricted to scalars matches alpha after the
    # norm, i.e. theta = 4 alpha mod 8; checked for every regular orbit
    for theta in regular_theta_orbits(4, 3):
        pi = CuspidalFF(4, 3, theta)
        for b in (0, 1):
            want = 1 if (theta - 4 * b) % 8 == 0 else 0
            assert shalika_hom_dim(pi, b) == want


def test_shalika_dims_do_not_depend_on_psi():
    for theta in (4, 8, 11):
        pi = CuspidalFF(4, 3, theta)
        for b in (0, 1):
            assert shalika_hom_dim(pi, b, 1) == shalika_hom_dim(pi, b, 2)


def test_shalika_rejects_trivial_psi():
    with pytest.raises(ValueError):
        shalika_hom_dim(CuspidalFF(4, 3, 1), 0, psi_exp=3)


@pytest.mark.parametrize("q", [3, 5])
def test_shalika_dims_exponent_rule_n2(q):
    for theta in regular_theta_orbits(2, q):
        pi = CuspidalFF(2, q, theta)
        for b in range(q - 1):
            want = 1 if (theta - b) % (q - 1) == 0 else 0
            for e in range(1, q):
                assert shalika_hom_dim(pi, b, e) == want


# -- distinction by the quadratic-extension subgroup ---------------------------------


def test_distinction_embedding_order_and_delta():
    H = DistinctionEmbedding(4, 3)
    assert H.order == 5760
    assert H.Delta == 2  # the nonsquare of F_3
    count = sum(1 for _h, _d in H.elements())
    assert count == 5760


def test_embedded_elements_commute_with_the_twist_matrix():
    H = DistinctionEmbedding(4, 3)
    A = ((0, 0, 1, 0), (0, 0, 0, 1), (2, 0, 0, 0), (0, 2, 0, 0))
    for h, _dlog in list(H.elements())[:50]:
        assert mat_mul(h, A, 3) == mat_mul(A, h, 3)


def test_det_log_on_scalar_elements():
    # a = s I, b = 0 embeds the scalar s of F_q: det over F_{q^2} is s^m
    H = DistinctionEmbedding(4, 3)
    R = H.ctx.R
    want = {}
    for s in (1, 2):
        m = mat_identity(4) if s == 1 else tuple(
            tuple((s * v) % 3 for v in row) for row in mat_identity(4))
        want[m] = (2 * R.sub_log(s, 2)) % 8
    seen = {}
    for h, dlog in H.elements():
        if h in want:
            seen[h] = dlog
    assert seen == want


def test_ff_distinction_follows_exponent_rule_n4():
    for theta in regular_theta_orbits(4, 3):
        pi = CuspidalFF(4, 3, theta)
        for c in range(8):
            want = 1 if (theta - 4 * c) % 8 == 0 else 0
            assert ff_distinction_dim(pi, c) == want


def test_ff_distinction_needs_central_match():
    # mu with the wrong central restriction can never distinguish
    pi = CuspidalFF(4, 3, 8)
    for c in (1, 3, 5, 7):
        assert ff_distinction_dim(pi, c) == 0


@pytest.mark.parametrize("q", [3, 5])
def test_ff_distinction_torus_rule_n2(q):
    # n=2 sits outside the main tower hypothesis; the observed law is the
    # classical one for the nonsplit torus: multiplicity one exactly when mu
    # agrees with theta on scalars and is not a Frobenius twist of theta
    Q2 = q * q - 1
    for theta in regular_theta_orbits(2, q):
        pi = CuspidalFF(2, q, theta)
        orbit = {theta * q ** i % Q2 for i in range(2)}
        for c in range(Q2):
            want = 1 if ((c - theta) % (q - 1) == 0 and c not in orbit) else 0
            assert ff_distinction_dim(pi, c) == want


def test_hom_dims_are_exact_integers_by_construction():
    # the assembly divides once and insists on integrality; a fabricated
    # non-class-function would fail, the genuine ones must not
    pi = CuspidalFF(4, 3, 13)
    for b in (0, 1):
        assert shalika_hom_dim(pi, b) in (0, 1)
    for c in range(0, 8, 3):
        assert ff_distinction_dim(pi, c) in (0, 1)
