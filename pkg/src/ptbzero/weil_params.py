"""Monomial parameters of the tame Weil group.

A parameter here is an induced character Ind_{W_{K'}}^{W_F}(chi') presented
by its inducing data (K', chi'), plus formal direct sums of those.  The
module computes determinants, Mackey decompositions of tensor products with
two-dimensional induced parameters, and the selfduality type, the last one
twice: once through the restriction criterion and once by actually solving
for an equivariant bilinear form on an explicit matrix model of the tame
quotient.  Epsilon factors come from inductivity, never from the matrices.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .characters import (AddChar, MultChar, eta_unramified,
                         regular_tame_a_values)
from .cyclotomic import Cyclotomic
from .epsilon import (EpsilonValue, epsilon_char, epsilon_induced,
                      norm_coset_characters)
from .local_fields import Tower

SELFDUAL_KINDS = ("not_selfdual", "orthogonal", "symplectic")


class MonomialParam:
    """Ind_{W_{K'}}^{W_F}(chi'), stored as the inducing pair."""

    __slots__ = ("tower", "field", "chi")

    def __init__(self, tower: Tower, field: str, chi: MultChar):
        if chi.field != field or chi.tower is not tower:
            raise ValueError("inducing character must live on the inducing field")
        self.tower = tower
        self.field = field
        self.chi = chi

    @property
    def dimension(self) -> int:
        return len(self.tower.coset_reps(self.field, "F"))

    def galois_orbit(self) -> frozenset:
        """Keys of the Gal(K'/F) orbit of chi'; the induced parameters of
        two inducing characters agree exactly when the orbits do."""
        return frozenset(self.chi.galois(sig).key()
                         for sig in self.tower.coset_reps(self.field, "F"))

    def is_irreducible(self) -> bool:
        if self.chi.is_tame():
            return self.chi.is_regular()
        return len(self.galois_orbit()) == self.dimension

    def is_equivalent(self, other: "MonomialParam") -> bool:
        return self.field == other.field and \
            self.galois_orbit() == other.galois_orbit()

    def __repr__(self):
        return f"MonomialParam(Ind from {self.field} of {self.chi!r})"

    def to_json(self) -> dict:
        return {"inducing_field": self.field, "chi": self.chi.to_json()}


class ParamSum:
    """A formal direct sum of monomial parameters and characters of F^*."""

    __slots__ = ("monomials", "lines")

    def __init__(self, monomials=(), lines=()):
        self.monomials = tuple(monomials)
        self.lines = tuple(lines)
        for line in self.lines:
            if line.field != "F":
                raise ValueError("one-dimensional summands live on F")

    @property
    def dimension(self) -> int:
        return sum(m.dimension for m in self.monomials) + len(self.lines)

    def __iter__(self):
        yield from self.monomials
        yield from self.lines

    def to_json(self) -> dict:
        return {"monomials": [m.to_json() for m in self.monomials],
                "lines": [c.to_json() for c in self.lines]}


def det_param(obj) -> MultChar:
    """Determinant character on F^*: for one unramified induction it is
    (det of Ind 1) * chi'|_{F^*}, and the first factor is the product of
    the norm-coset characters; sums multiply."""
    if isinstance(obj, ParamSum):
        parts = [det_param(m) for m in obj]
        out = parts[0]
        for p in parts[1:]:
            out = out * p
        return out
    if isinstance(obj, MultChar):
        if obj.field != "F":
            raise ValueError("a bare character summand must live on F")
        return obj
    tw = obj.tower
    if tw.fields[obj.field].e != 1:
        raise ValueError("determinant of a ramified induction: factor "
                         "through the tower instead")
    out = obj.chi.restrict_to("F")
    for om in norm_coset_characters(tw, obj.field, "F"):
        out = out * om
    return out


# -- explicit matrices for the tame quotient ---------------------------------------


def _mat_mul(A, B):
    n, mid, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = Cyclotomic.zero()
            for k in range(mid):
                if A[i][k].is_zero() or B[k][j].is_zero():
                    continue
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _mat_transpose(A):
    return tuple(tuple(A[i][j] for i in range(len(A)))
                 for j in range(len(A[0])))


def _mat_kron(A, B):
    nb = len(B)
    out = []
    for i in range(len(A)):
        for k in range(nb):
            out.append(tuple(A[i][j] * B[k][l]
                             for j in range(len(A[0]))
                             for l in range(len(B[0]))))
    return tuple(out)


def _mat_det(A) -> Cyclotomic:
    n = len(A)
    M = [list(row) for row in A]
    det = Cyclotomic.one()
    for col in range(n):
        piv = next((r for r in range(col, n) if not M[r][col].is_zero()), None)
        if piv is None:
            return Cyclotomic.zero()
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det = det * M[col][col]
        inv = M[col][col].inverse()
        for r in range(col + 1, n):
            if M[r][col].is_zero():
                continue
            f = M[r][col] * inv
            for c in range(col, n):
                M[r][c] = M[r][c] - f * M[col][c]
    return det


def _unit_root(order: int, r: Fraction | int) -> Cyclotomic:
    """e(r) expressed at a fixed cyclotomic order (which r must divide)."""
    r = Fraction(r) % 1
    return Cyclotomic(order, {r.numerator * (order // r.denominator):
                              Fraction(1)})


def _eliminate(row, hit, prow):
    """Fraction-free step: scale `row` by the pivot coefficient and subtract
    the pivot row scaled by row's own coefficient at `hit`.  No inverses:
    inverting a sum of roots of unity costs a full Galois-norm product."""
    f = row.pop(hit)
    c = prow[hit]
    out = {k: v * c for k, v in row.items()}
    for c2, v2 in prow.items():
        if c2 == hit:
            continue
        fv = f * v2
        nv = out[c2] - fv if c2 in out else -fv
        if nv.is_zero():
            out.pop(c2, None)
        else:
            out[c2] = nv
    return out


def _sparse_nullspace(rows, ncols: int):
    """Nullspace basis of a system given as sparse rows {col: Cyclotomic}.
    Exact fraction-free row echelon; exactness is the whole point, a float
    rank would poison the dichotomy downstream."""
    pivots: dict[int, dict[int, Cyclotomic]] = {}
    for raw in rows:
        row = {c: v for c, v in raw.items() if not v.is_zero()}
        while True:
            hit = next((c for c in row if c in pivots), None)
            if hit is None:
                break
            row = _eliminate(row, hit, pivots[hit])
        if not row:
            continue
        lead = min(row)
        for pc in list(pivots):
            if lead in pivots[pc]:
                pivots[pc] = _eliminate(pivots[pc], lead, row)
        pivots[lead] = row
    basis = []
    for free in range(ncols):
        if free in pivots:
            continue
        vec = {free: Cyclotomic.one()}
        for pc, prow in pivots.items():
            v = prow.get(free)
            if v is not None and not v.is_zero():
                vec[pc] = -(v / prow[pc])
        basis.append(vec)
    return basis


class FiniteMatrixModel:
    """Images of the two tame Weil generators in the induced representation:
    T = diag(chi'(gamma^{q^i})) for the inertia generator and Phi the cyclic
    shift with chi'(pi) in the corner for Frobenius.  Only exists for tame
    chi' on an unramified K'."""

    __slots__ = ("param", "n", "rots", "corner", "T", "Phi", "cache")

    def __init__(self, param: MonomialParam):
        tw = param.tower
        fld = tw.fields[param.field]
        if fld.e != 1 or not param.chi.is_tame():
            raise ValueError("matrix model needs a tame character on an "
                             "unramified inducing field")
        n = param.dimension
        Q = fld.residue_card - 1
        rots = tuple(Fraction(param.chi.a * pow(tw.q, i, Q), Q) % 1
                     for i in range(n))
        # the tame relation Phi T Phi^{-1} = T^(q): the diagonal shifts one
        # step exactly when each rotation is q times the previous one
        assert all(rots[(i + 1) % n] == (tw.q * rots[i]) % 1 for i in range(n))
        self.param = param
        self.n = n
        self.rots = rots
        self.corner = param.chi.pi % 1
        self.cache = {}
        self.T = tuple(tuple(Cyclotomic.from_rotation(rots[i]) if i == j
                             else Cyclotomic.zero() for j in range(n))
                       for i in range(n))
        # corner at (n-1, 0): the other cyclic layout conjugates the diagonal
        # backwards and breaks the tame relation
        corner = Cyclotomic.from_rotation(self.corner)
        self.Phi = tuple(tuple(
            corner if (i, j) == (n - 1, 0)
            else (Cyclotomic.one() if j == i + 1 else Cyclotomic.zero())
            for j in range(n)) for i in range(n))

    def group_element(self, k: int, l: int):
        """T^k Phi^l as an explicit matrix."""
        out = tuple(tuple(Cyclotomic.one() if i == j else Cyclotomic.zero()
                          for j in range(self.n)) for i in range(self.n))
        for _ in range(k % (self.param.tower.fields[self.param.field]
                            .residue_card - 1)):
            out = _mat_mul(out, self.T)
        for _ in range(l):
            out = _mat_mul(out, self.Phi)
        return out

    def trace(self, k: int, l: int) -> Cyclotomic:
        g = self.group_element(k, l)
        acc = Cyclotomic.zero()
        for i in range(self.n):
            acc = acc + g[i][i]
        return acc

    def det_T(self) -> Cyclotomic:
        return _mat_det(self.T)

    def det_Phi(self) -> Cyclotomic:
        return _mat_det(self.Phi)


# -- selfduality -------------------------------------------------------------------


def _check_classifiable(phi: MonomialParam, alpha: MultChar):
    if alpha.field != "F":
        raise ValueError("the twisting character lives on F")
    if phi.field != "L":
        raise ValueError("the dichotomy is about inductions from the "
                         "unramified layer L")
    if phi.chi.conductor() > 1:
        raise ValueError("selfduality classification covers tame parameters")
    if not phi.is_irreducible():
        raise ValueError("selfduality classification needs an irreducible "
                         "parameter")
    if phi.dimension < 4:
        raise ValueError("the dichotomy needs dimension at least 4")


def _selfdual_state(tower: Tower) -> dict:
    st = getattr(tower, "_selfdual_state", None)
    if st is None:
        st = {"chi": {}, "alpha": {}, "alpha_vals": {}}
        tower._selfdual_state = st
    return st


def classify_selfduality(phi: MonomialParam, alpha: MultChar) -> str:
    """Restriction criterion: phi is alpha-selfdual iff chi'|_{L0} composed
    with the norm from L agrees with alpha composed with the norm from L;
    orthogonal when chi'|_{L0} is exactly alpha o N, symplectic when it is
    that times the unramified quadratic character of the step."""
    _check_classifiable(phi, alpha)
    tw = phi.tower
    st = _selfdual_state(tw)
    ck = phi.chi.key()
    if ck not in st["chi"]:
        restricted = phi.chi.restrict_to("L0")
        st["chi"][ck] = (restricted.key(),
                         restricted.compose_norm_from("L").key())
    r_key, r_norm_key = st["chi"][ck]
    ak = alpha.key()
    if ak not in st["alpha"]:
        base = alpha.compose_norm_from("L0")
        st["alpha"][ak] = (alpha.compose_norm_from("L").key(), base.key(),
                           (base * eta_unramified(tw, "L0")).key())
    a_norm_key, base_key, twisted_key = st["alpha"][ak]
    if r_norm_key != a_norm_key:
        return "not_selfdual"
    if r_key == base_key:
        return "orthogonal"
    if r_key == twisted_key:
        return "symplectic"
    raise AssertionError("selfdual parameter escaped the dichotomy")


def classify_selfduality_bruteforce(phi: MonomialParam, alpha: MultChar,
                                    model: FiniteMatrixModel | None = None
                                    ) -> str:
    """Solve T^t B T = alpha(gamma) B and Phi^t B Phi = alpha(pi) B for B
    over the cyclotomics and read the type off the solution space."""
    _check_classifiable(phi, alpha)
    if not alpha.is_tame():
        raise ValueError("the matrix model only sees tame twists")
    tw = phi.tower
    if model is None:
        model = FiniteMatrixModel(phi)
    n = model.n
    vals = _selfdual_state(tw)["alpha_vals"]
    ak = alpha.key()
    if ak not in vals:
        gamma_F = tw.elt("F", {0: tw.fields["F"].residue_gen()})
        vals[ak] = (alpha.value(gamma_F),
                    alpha.value(tw.fields["F"].uniformizer()))
    r_gamma, r_pi = vals[ak]
    # one common root-of-unity order keeps the elimination from rebasing
    # coefficients at every ring operation
    N = math.lcm(model.rots[0].denominator, model.corner.denominator,
                 r_gamma.denominator, r_pi.denominator)
    tkey = ("T", N, r_gamma)
    if tkey not in model.cache:
        a_gamma = _unit_root(N, r_gamma)
        trows = []
        for i in range(n):
            for j in range(n):
                lhs = (model.rots[i] + model.rots[j]) % 1
                trows.append({i * n + j: _unit_root(N, lhs) - a_gamma})
        model.cache[tkey] = trows
    skey = ("phi_src", N)
    if skey not in model.cache:
        # Phi has one nonzero entry per column (row j-1, wrapping through
        # the corner at column 0), so each equation has exactly two terms
        src = []
        for i in range(n):
            for j in range(n):
                c_rot = ((model.corner if i == 0 else 0)
                         + (model.corner if j == 0 else 0)) % 1
                src.append((((i - 1) % n) * n + (j - 1) % n,
                            _unit_root(N, c_rot), i * n + j))
        model.cache[skey] = src
    rows = list(model.cache[tkey])
    neg_pi = -_unit_root(N, r_pi)
    for col, coeff, tgt in model.cache[skey]:
        rows.append({col: coeff, tgt: neg_pi})
    basis = _sparse_nullspace(rows, n * n)
    if not basis:
        return "not_selfdual"
    if len(basis) > 1:
        raise ValueError("bilinear solution space has dimension "
                         f"{len(basis)}; the parameter cannot be irreducible")
    vec = basis[0]
    B = [[vec.get(i * n + j, Cyclotomic.zero()) for j in range(n)]
         for i in range(n)]
    symmetric = all(B[i][j] == B[j][i] for i in range(n) for j in range(n))
    alternate = all(B[i][j] == -B[j][i] for i in range(n) for j in range(n))
    if symmetric == alternate:
        raise AssertionError("equivariant form is not of a pure type")
    return "orthogonal" if symmetric else "symplectic"


def selfduality_alphas(tower: Tower, denominator: int | None = None):
    """The finite family of tame twists the exhaustive classification runs
    over: every residue exponent, uniformizer values of order dividing
    q^n - 1 (the same exponent that bounds the inducing characters)."""
    D = denominator or (tower.fields["L"].residue_card - 1)
    return [MultChar(tower, "F", Fraction(k, D), b, None)
            for b in range(tower.q - 1) for k in range(D)]


def selfduality_chis(tower: Tower):
    """One inducing character per parameter: regular residue exponents up
    to Frobenius orbit, crossed with every uniformizer value of order
    dividing q^n - 1.  Galois twists of these induce the same parameter."""
    Q = tower.fields["L"].residue_card - 1
    return [MultChar(tower, "L", Fraction(k, Q), a, None)
            for a in regular_tame_a_values(tower, "L") for k in range(Q)]


def selfduality_block(tower: Tower, chi: MultChar, alphas) -> list[dict]:
    """Classify one parameter against every twist, both ways; one row per
    twist, JSON-ready."""
    phi = MonomialParam(tower, "L", chi)
    model = FiniteMatrixModel(phi)
    rows = []
    for alpha in alphas:
        crit = classify_selfduality(phi, alpha)
        brute = classify_selfduality_bruteforce(phi, alpha, model=model)
        rows.append({"chi": chi.to_json(), "alpha": alpha.to_json(),
                     "criterion": crit, "bruteforce": brute,
                     "agree": crit == brute})
    return rows


# -- tensor decomposition ----------------------------------------------------------


def tensor_with_quadratic(phi: MonomialParam, mu: MultChar) -> ParamSum:
    """Mackey decomposition of phi tensor Ind_{W_E}^{W_F}(mu^{-1}).  The
    distinction pairing consumes the inverse of the distinguishing
    character, so that inverse is baked in here; call sites pass mu itself.
    When E is unramified the double cosets split the tensor into two
    inductions from the same field; when E is ramified the compositum M
    swallows everything into a single induction."""
    tw = phi.tower
    if mu.field != "E":
        raise ValueError("the quadratic factor is induced from E")
    if phi.field != "L":
        raise ValueError("tensor decomposition expects an induction from "
                         "the unramified layer L")
    if tw.e_E == 1:
        pulled = mu.inverse().compose_norm_from("L")
        twisted = mu.galois(tw.sigma_E_F).inverse().compose_norm_from("L")
        return ParamSum((MonomialParam(tw, "L", phi.chi * pulled),
                         MonomialParam(tw, "L", phi.chi * twisted)), ())
    lifted = phi.chi.compose_norm_from("M")
    pulled = mu.inverse().compose_norm_from("M")
    return ParamSum((MonomialParam(tw, "M", lifted * pulled),), ())


# -- epsilon via inductivity ---------------------------------------------------------


def epsilon_param(obj, psi: AddChar) -> EpsilonValue:
    """Epsilon of a parameter for psi on F: inductivity for each monomial
    summand, direct evaluation for one-dimensional ones, product over sums."""
    if psi.field != "F":
        raise ValueError("epsilon_param normalizes against psi on F")
    if isinstance(obj, ParamSum):
        out = EpsilonValue.one(psi.tower.q)
        for part in obj:
            out = out * epsilon_param(part, psi)
        return out
    if isinstance(obj, MultChar):
        if obj.field != "F":
            raise ValueError("a bare character summand must live on F")
        return epsilon_char(obj, psi)
    return epsilon_induced(obj.tower, obj.chi, "F", psi)
