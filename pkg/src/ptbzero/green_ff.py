"""Cuspidal characters of GL_n(F_q) and exact Hom dimensions.

The cuspidal character attached to a regular character of F_{q^n}^* is
evaluated through a closed form on primary conjugacy classes (it vanishes
elsewhere).  The formula is not taken on faith: the module carries its own
validation suite (degree, norm one over the full class inventory, zero
cuspidality projectors, agreement with an independently computed GL_2
character table) and everything downstream trusts it only because that
suite passes.

Matrices live over the prime field as tuples of int tuples; eigenvalues of
primary classes live in one ambient F_{q^n} through ResidueTower, so the
discrete logs here mean the same thing as the residue exponents used by
the character layer.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod

from .cyclotomic import Cyclotomic
from .residue import ResidueTower, _is_prime

# -- matrices over the prime field -------------------------------------------------


def mat_identity(n: int):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(A, B, p: int):
    n = len(A)
    m = len(B[0])
    k_range = range(len(B))
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in k_range) % p
                       for j in range(m)) for i in range(n))


def mat_pow(A, e: int, p: int):
    out = mat_identity(len(A))
    base = A
    while e:
        if e & 1:
            out = mat_mul(out, base, p)
        base = mat_mul(base, base, p)
        e >>= 1
    return out


def mat_rank(A, p: int) -> int:
    rows = [list(r) for r in A]
    ncols = len(A[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [(v * inv) % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(a - f * b) % p
                           for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _det_prime(A, p: int) -> int:
    det = 1
    mat = [list(r) for r in A]
    n = len(A)
    for col in range(n):
        piv = next((r for r in range(col, n) if mat[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        det = (det * mat[col][col]) % p
        inv = pow(mat[col][col], -1, p)
        for r in range(col + 1, n):
            f = (mat[r][col] * inv) % p
            if f:
                mat[r] = [(a - f * b) % p
                          for a, b in zip(mat[r], mat[col])]
    return det % p


def block_diag(blocks):
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    at = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[at + i][at + j] = v
        at += len(b)
    return tuple(tuple(r) for r in out)


# -- polynomials over the prime field ------------------------------------------------
# Coefficient tuples, constant term first, always monic where stated.


def poly_mul(a, b, p: int):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return tuple(out)


def poly_pow(f, e: int, p: int):
    out = (1,)
    for _ in range(e):
        out = poly_mul(out, f, p)
    return out


def poly_eval_residue(f, x: int, R: ResidueTower) -> int:
    """Evaluate f (prime-field coefficients) at an ambient-field element."""
    acc = 0
    for c in reversed(f):
        acc = R.add(R.mul(acc, x), c % R.p)
    return acc


def char_poly(A, p: int):
    """det(xI - A) by Hessenberg reduction; no divisions by integers, so
    small characteristic is safe."""
    n = len(A)
    H = [[v % p for v in row] for row in A]
    for col in range(n - 2):
        piv = next((r for r in range(col + 1, n) if H[r][col]), None)
        if piv is None:
            continue
        if piv != col + 1:
            H[col + 1], H[piv] = H[piv], H[col + 1]
            for row in H:
                row[col + 1], row[piv] = row[piv], row[col + 1]
        inv = pow(H[col + 1][col], -1, p)
        for r in range(col + 2, n):
            if not H[r][col]:
                continue
            f = (H[r][col] * inv) % p
            for c in range(n):
                H[r][c] = (H[r][c] - f * H[col + 1][c]) % p
            # similarity: the row operation is paired with a column one
            for ro in range(n):
                H[ro][col + 1] = (H[ro][col + 1] + f * H[ro][r]) % p
    # char polys of leading blocks, standard Hessenberg recurrence
    polys = [(1,)]
    for k in range(1, n + 1):
        term = poly_mul(polys[k - 1], ((-H[k - 1][k - 1]) % p, 1), p)
        term = list(term)
        run = 1
        for m in range(1, k):
            run = (run * H[k - m][k - m - 1]) % p
            coeff = (H[k - m - 1][k - 1] * run) % p
            if not coeff:
                continue
            low = polys[k - m - 1]
            for i, c in enumerate(low):
                term[i] = (term[i] - coeff * c) % p
        polys.append(tuple(term))
    return polys[n]


@lru_cache(maxsize=None)
def irreducible_polys(p: int, d: int):
    """Monic irreducibles of degree d over F_p, by trial multiplication:
    cross every factorization degree split out of the full product set."""
    if d == 1:
        return tuple((c % p, 1) for c in range(p))
    lower = {}
    for dd in range(1, d):
        lower[dd] = irreducible_polys(p, dd)
    reducible = set()

    def fill(deg_left, min_deg, acc):
        if deg_left == 0:
            reducible.add(acc)
            return
        for dd in range(min_deg, deg_left + 1):
            if dd == d:
                continue
            for f in lower.get(dd, ()):
                fill(deg_left - dd, dd, poly_mul(acc, f, p))

    fill(d, 1, (1,))
    out = []
    for code in range(p ** d):
        coeffs = []
        rest = code
        for _ in range(d):
            coeffs.append(rest % p)
            rest //= p
        f = tuple(coeffs) + (1,)
        if f not in reducible:
            out.append(f)
    return tuple(out)


# -- conjugacy invariants ------------------------------------------------------------


class ConjInvariant:
    """What a cuspidal character can see of a conjugacy class: the degree d
    of the (single) irreducible factor of the semisimple part, the Frobenius
    orbit of eigenvalue logs inside the ambient F_{q^n}, and the Jordan type
    of the unipotent part over the degree-d centralizer field."""

    __slots__ = ("d", "orbit", "jordan")

    def __init__(self, d: int, orbit, jordan):
        if len(orbit) != d:
            raise ValueError("eigenvalue orbit must have exactly d logs")
        self.d = d
        self.orbit = tuple(sorted(orbit))
        self.jordan = tuple(sorted(jordan, reverse=True))

    def key(self):
        return (self.d, self.orbit, self.jordan)

    def __eq__(self, other):
        return isinstance(other, ConjInvariant) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"ConjInvariant(d={self.d}, orbit={self.orbit}, jordan={self.jordan})"


class _ClassContext:
    """Shared per-(n, q) tables: the ambient field, the table of primary
    characteristic polynomials, and root logs of each irreducible factor."""

    __slots__ = ("n", "q", "R", "primary")

    def __init__(self, n: int, q: int, R: ResidueTower | None = None):
        if not _is_prime(q):
            raise ValueError("matrix layer models prime residue fields only")
        self.n = n
        self.q = q
        self.R = R if R is not None else ResidueTower(q, n)
        if self.R.p != q or self.R.deg % n:
            raise ValueError("ambient field does not contain F_{q^n}")
        self.primary = {}
        for d in range(1, n + 1):
            if n % d:
                continue
            for f in irreducible_polys(q, d):
                if f[0] == 0:
                    continue  # eigenvalue zero is not invertible
                root = next(x for x in self.R.subfield_elements(d)
                            if x and poly_eval_residue(f, x, self.R) == 0)
                logs = tuple(sorted((self.R.log(root) * pow(q, i, self.R.card - 1))
                                    % (self.R.card - 1) for i in range(d)))
                self.primary[poly_pow(f, n // d, q)] = (d, f, logs)


@lru_cache(maxsize=None)
def _context(n: int, q: int) -> _ClassContext:
    return _ClassContext(n, q)


def _semisimple_exponents(n: int, q: int):
    # q^A kills the unipotent part (blocks have size <= n) and M is a
    # multiple of every semisimple order
    qA = q
    while qA < n:
        qA *= q
    M = 1
    for d in range(1, n + 1):
        M = M * (q ** d - 1) // gcd(M, q ** d - 1)
    return qA * pow(qA, -1, M), M


def jordan_decompose(g, q: int | None = None,
                     ctx: _ClassContext | None = None):
    """Split g = s u into commuting semisimple and unipotent parts and
    extract the class invariant, or None when the characteristic polynomial
    has more than one irreducible factor (where cuspidal characters vanish).
    """
    if ctx is None:
        if q is None:
            raise ValueError("need q when no context is given")
        ctx = _context(len(g), q)
    n, q = ctx.n, ctx.q
    cp = char_poly(g, q)
    if cp[0] == 0:
        raise ValueError("matrix is singular")
    exp_s, M = _semisimple_exponents(n, q)
    s = mat_pow(g, exp_s, q)
    u = mat_mul(g, mat_pow(s, M - 1, q), q)
    hit = ctx.primary.get(cp)
    if hit is None:
        return s, u, None
    d, _f, logs = hit
    one = mat_identity(n)
    nil = tuple(tuple((u[i][j] - one[i][j]) % q for j in range(n))
                for i in range(n))
    ranks = [n]
    power = one
    while ranks[-1]:
        power = mat_mul(power, nil, q)
        ranks.append(mat_rank(power, q))
    blocks_ge = [(ranks[k - 1] - ranks[k]) // d for k in range(1, len(ranks))]
    jordan = []
    for size in range(len(blocks_ge), 0, -1):
        count = blocks_ge[size - 1] - (blocks_ge[size] if size < len(blocks_ge) else 0)
        jordan.extend([size] * count)
    return s, u, ConjInvariant(d, logs, jordan)


# -- class inventory -----------------------------------------------------------------


def gl_order(n: int, q: int) -> int:
    return prod(q ** n - q ** i for i in range(n))


@lru_cache(maxsize=None)
def _partitions(k: int):
    if k == 0:
        return ((),)
    out = []
    for first in range(k, 0, -1):
        for rest in _partitions(k - first):
            if not rest or rest[0] <= first:
                out.append((first,) + rest)
    return tuple(out)


def _unipotent_centralizer_order(Q: int, lam) -> int:
    conj = []
    for k in range(1, (lam[0] if lam else 0) + 1):
        conj.append(sum(1 for part in lam if part >= k))
    mult = {}
    for part in lam:
        mult[part] = mult.get(part, 0) + 1
    exp = sum(c * c for c in conj) - sum(m * (m + 1) // 2
                                         for m in mult.values())
    out = Q ** exp
    for m in mult.values():
        for i in range(1, m + 1):
            out *= Q ** i - 1
    return out


def conjugacy_classes(n: int, q: int):
    """All classes of GL_n(F_q) as (data, size) with data a sorted tuple of
    (irreducible factor, partition); sizes from exact centralizer orders.
    The inventory double-checks itself by summing to the group order."""
    polys = []
    for d in range(1, n + 1):
        polys.extend(f for f in irreducible_polys(q, d) if f[0] != 0)
    out = []

    def assign(idx, budget, acc):
        if idx == len(polys):
            if budget == 0:
                cent = 1
                for f, lam in acc:
                    cent *= _unipotent_centralizer_order(q ** (len(f) - 1), lam)
                data = tuple(sorted(acc))
                out.append((data, gl_order(n, q) // cent))
            return
        f = polys[idx]
        d = len(f) - 1
        assign(idx + 1, budget, acc)
        for e in range(1, budget // d + 1):
            for lam in _partitions(e):
                assign(idx + 1, budget - d * e, acc + [(f, lam)])

    assign(0, n, [])
    assert sum(size for _data, size in out) == gl_order(n, q)
    return out


def companion_matrix(f, p: int):
    d = len(f) - 1
    out = [[0] * d for _ in range(d)]
    for i in range(1, d):
        out[i][i - 1] = 1
    for i in range(d):
        out[i][d - 1] = (-f[i]) % p
    return tuple(tuple(r) for r in out)


def class_representative(data, q: int):
    blocks = []
    for f, lam in data:
        for part in lam:
            blocks.append(companion_matrix(poly_pow(f, part, q), q))
    return block_diag(blocks)


def invariant_of_class(data, ctx: _ClassContext) -> ConjInvariant | None:
    """Invariant straight from class data, bypassing matrices."""
    if len(data) != 1:
        return None
    f, lam = data[0]
    hit = ctx.primary.get(poly_pow(f, ctx.n // (len(f) - 1), ctx.q))
    d, _f, logs = hit
    return ConjInvariant(d, logs, lam)


# -- the cuspidal character ---------------------------------------------------------


class CuspidalFF:
    """Cuspidal character of GL_n(F_q) attached to the residue character
    x -> e(theta * log(x) / (q^n - 1)) of F_{q^n}^*; theta must have a full
    Frobenius orbit mod q^n - 1."""

    __slots__ = ("n", "q", "theta", "ctx", "memo")

    def __init__(self, n: int, q: int, theta: int,
                 ctx: _ClassContext | None = None):
        self.ctx = ctx if ctx is not None else _context(n, q)
        Q = q ** n - 1
        theta %= Q
        orbit = {theta * pow(q, i, Q) % Q for i in range(n)}
        if len(orbit) != n:
            raise ValueError(f"residue exponent {theta} is not regular")
        self.n = n
        self.q = q
        self.theta = theta
        self.memo = {}

    def degree(self) -> int:
        return prod(self.q ** i - 1 for i in range(1, self.n))

    def value(self, inv: ConjInvariant | None) -> Cyclotomic:
        if inv is None:
            return Cyclotomic.zero()
        key = inv.key()
        got = self.memo.get(key)
        if got is None:
            Q = self.q ** self.n - 1
            acc = Cyclotomic.zero()
            for lg in inv.orbit:
                acc = acc + Cyclotomic.from_rotation(
                    Fraction(self.theta * lg, Q))
            for j in range(1, len(inv.jordan)):
                acc = acc * Cyclotomic.rational(1 - self.q ** (inv.d * j))
            if self.n % 2 == 0:
                acc = -acc
            got = self.memo[key] = acc
        return got

    def value_at(self, g) -> Cyclotomic:
        _s, _u, inv = jordan_decompose(g, ctx=self.ctx)
        return self.value(inv)

    def to_json(self) -> dict:
        return {"n": self.n, "q": self.q, "theta": self.theta}


def _rational_or_die(value: Cyclotomic, what: str) -> Fraction:
    out = value.as_rational()
    if out is None:
        raise ValueError(f"{what} came out irrational")
    return out


def norm_squared(pi: CuspidalFF) -> Fraction:
    """<chi, chi> over the full class inventory; the cuspidal character
    formula has no authority until this is 1."""
    total = Cyclotomic.zero()
    for data, size in conjugacy_classes(pi.n, pi.q):
        v = pi.value(invariant_of_class(data, pi.ctx))
        if v.is_zero():
            continue
        total = total + v * v.conj() * Cyclotomic.rational(size)
    return _rational_or_die(total, "character norm") / gl_order(pi.n, pi.q)


def _compositions(n: int):
    if n == 1:
        return []
    out = []

    def walk(left, acc):
        if left == 0 and len(acc) > 1:
            out.append(tuple(acc))
        for first in range(1, left + 1):
            walk(left - first, acc + [first])

    walk(n, [])
    return out


def _block_cells(comp):
    bounds = []
    at = 0
    for c in comp:
        bounds.append((at, at + c))
        at += c
    cells = []
    for bi, (r0, r1) in enumerate(bounds):
        for bj, (c0, c1) in enumerate(bounds):
            if bj > bi:
                cells.extend((r, c) for r in range(r0, r1)
                             for c in range(c0, c1))
    return cells


def _radical_elements(comp, n: int, q: int):
    cells = _block_cells(comp)
    base = mat_identity(n)
    for code in range(q ** len(cells)):
        mat = [list(r) for r in base]
        rest = code
        for (r, c) in cells:
            mat[r][c] = rest % q
            rest //= q
        yield tuple(tuple(r) for r in mat)


def cuspidality_defect(pi: CuspidalFF, comp) -> Fraction:
    """Average of the character over the unipotent radical of the standard
    parabolic with the given block sizes: the dimension of the fixed space
    contributed at 1, which cuspidality forces to zero."""
    total = Cyclotomic.zero()
    count = 0
    for u in _radical_elements(comp, pi.n, pi.q):
        total = total + pi.value_at(u)
        count += 1
    return _rational_or_die(total, "cuspidality defect") / count


def parabolic_pairing(pi: CuspidalFF, comp) -> Fraction:
    """<chi, Ind_P 1> = <chi restricted to P, 1>, summed Levi-class-wise:
    the inner radical sum only depends on the Levi factor up to conjugacy."""
    q = pi.q
    levi_classes = [[(data, size) for data, size in conjugacy_classes(c, q)]
                    for c in comp]
    total = Cyclotomic.zero()
    m_order = prod(gl_order(c, q) for c in comp)
    count = 0

    def walk(idx, blocks, weight):
        nonlocal total, count
        if idx == len(comp):
            m = block_diag(blocks)
            inner = Cyclotomic.zero()
            for u in _radical_elements(comp, pi.n, pi.q):
                inner = inner + pi.value_at(mat_mul(m, u, q))
            total = total + inner * Cyclotomic.rational(weight)
            count += weight
            return
        for data, size in levi_classes[idx]:
            walk(idx + 1, blocks + [class_representative(data, q)],
                 weight * size)

    walk(0, [], 1)
    assert count == m_order
    radical = q ** len(_block_cells(comp))
    return _rational_or_die(total, "parabolic pairing") / (m_order * radical)


# -- Hom spaces ----------------------------------------------------------------------


def _as_dim(value: Cyclotomic, size: int, what: str) -> int:
    total = value * Cyclotomic.rational(Fraction(1, size))
    out = total.as_rational()
    if out is None or out.denominator != 1 or out < 0:
        raise ValueError(f"{what} dimension came out {out!r}; "
                         "the character formula is broken")
    return int(out)


class ShalikaGroup:
    """Pairs (g, x) with g in GL_m(F_q) and x an m-by-m matrix, embedded in
    GL_2m(F_q) as (g, gx; 0, g), carrying alpha(det g) psi(tr x)."""

    __slots__ = ("n", "m", "q", "ctx")

    def __init__(self, n: int, q: int, ctx: _ClassContext | None = None):
        if n % 2:
            raise ValueError("the Shalika subgroup needs even n")
        self.n = n
        self.m = n // 2
        self.q = q
        self.ctx = ctx if ctx is not None else _context(n, q)

    @property
    def order(self) -> int:
        return gl_order(self.m, self.q) * self.q ** (self.m * self.m)

    def elements(self):
        m, q = self.m, self.q
        for gcode in range(q ** (m * m)):
            rest = gcode
            g = [[0] * m for _ in range(m)]
            for i in range(m):
                for j in range(m):
                    g[i][j] = rest % q
                    rest //= q
            g = tuple(tuple(r) for r in g)
            if mat_rank(g, q) != m:
                continue
            for xcode in range(q ** (m * m)):
                rest = xcode
                x = [[0] * m for _ in range(m)]
                for i in range(m):
                    for j in range(m):
                        x[i][j] = rest % q
                        rest //= q
                yield g, tuple(tuple(r) for r in x)

    def embed(self, g, x):
        m, q = self.m, self.q
        gx = mat_mul(g, x, q)
        top = [tuple(g[i]) + tuple(gx[i]) for i in range(m)]
        bottom = [(0,) * m + tuple(g[i]) for i in range(m)]
        return tuple(top + bottom)

    def character_rotation(self, g, x, alpha_exp: int, psi_exp: int) -> Fraction:
        q = self.q
        det = _det_prime(g, q)
        tr = sum(x[i][i] for i in range(self.m)) % q
        return (Fraction(alpha_exp * self.ctx.R.sub_log(det, 1), q - 1)
                + Fraction(psi_exp * tr, q)) % 1


@lru_cache(maxsize=None)
def _shalika_counts(n: int, q: int):
    """One pass over the Shalika subgroup, counting elements by (class
    invariant, det log, trace): every (theta, alpha, psi) afterwards is a
    cheap reassembly of these counts."""
    ctx = _context(n, q)
    S = ShalikaGroup(n, q, ctx)
    counts: dict = {}
    invs: dict = {}
    seen = 0
    for g, x in S.elements():
        seen += 1
        _s, _u, inv = jordan_decompose(S.embed(g, x), ctx=ctx)
        if inv is None:
            continue
        det = _det_prime(g, q)
        tr = sum(x[i][i] for i in range(S.m)) % q
        key = (inv.key(), ctx.R.sub_log(det, 1), tr)
        counts[key] = counts.get(key, 0) + 1
        invs[inv.key()] = inv
    assert seen == S.order
    return counts, invs


def shalika_hom_dim(pi: CuspidalFF, alpha_exp: int, psi_exp: int = 1) -> int:
    """dim Hom over the Shalika subgroup against alpha(det) psi(tr), by the
    exact averaged sum; counts per (class invariant, character rotation)
    first, one cyclotomic assembly at the end."""
    if psi_exp % pi.q == 0:
        raise ValueError("psi must be nontrivial")
    counts, invs = _shalika_counts(pi.n, pi.q)
    total = Cyclotomic.zero()
    for (ikey, dlog, tr), cnt in counts.items():
        rot = (Fraction(alpha_exp * dlog, pi.q - 1)
               + Fraction(psi_exp * tr, pi.q)) % 1
        total = total + (pi.value(invs[ikey])
                         * Cyclotomic.from_rotation(-rot)
                         * Cyclotomic.rational(cnt))
    return _as_dim(total, ShalikaGroup(pi.n, pi.q, pi.ctx).order, "Shalika")


class DistinctionEmbedding:
    """GL_m(F_{q^2}) sitting inside GL_2m(F_q) as the centralizer of the
    reduction of ((0, I), (Delta I, 0)): block matrices ((a, b), (Delta b, a))
    with a + delta b invertible, delta a square root of Delta generating the
    quadratic residue extension."""

    __slots__ = ("n", "m", "q", "ctx", "delta", "Delta")

    def __init__(self, n: int, q: int, ctx: _ClassContext | None = None):
        if n % 2:
            raise ValueError("the embedded group needs even n")
        self.n = n
        self.m = n // 2
        self.q = q
        self.ctx = ctx if ctx is not None else _context(n, q)
        R = self.ctx.R
        self.delta = R.gamma_pow((R.card - 1) // (q * q - 1) * ((q + 1) // 2))
        self.Delta = R.mul(self.delta, self.delta)
        assert self.Delta < q and self.Delta != 0
        assert not R.in_subfield(self.delta, 1)

    @property
    def order(self) -> int:
        return prod(self.q ** (2 * self.m) - self.q ** (2 * i)
                    for i in range(self.m))

    def elements(self):
        """Yields (embedded 2m-by-2m matrix, log of det over F_{q^2})."""
        m, q = self.m, self.q
        R = self.ctx.R
        cells = m * m
        for acode in range(q ** cells):
            rest = acode
            a = [[0] * m for _ in range(m)]
            for i in range(m):
                for j in range(m):
                    a[i][j] = rest % q
                    rest //= q
            for bcode in range(q ** cells):
                rest = bcode
                b = [[0] * m for _ in range(m)]
                for i in range(m):
                    for j in range(m):
                        b[i][j] = rest % q
                        rest //= q
                det = self._det_quadratic(a, b)
                if det == 0:
                    continue
                top = [tuple(a[i]) + tuple(b[i]) for i in range(m)]
                bottom = [tuple((self.Delta * v) % q for v in b[i])
                          + tuple(a[i]) for i in range(m)]
                yield tuple(top + bottom), R.sub_log(det, 2)

    def _det_quadratic(self, a, b) -> int:
        R = self.ctx.R
        m = self.m
        ent = [[R.add(a[i][j] % R.p, R.mul(self.delta, b[i][j] % R.p))
                for j in range(m)] for i in range(m)]
        if m == 1:
            return ent[0][0]
        if m == 2:
            return R.sub(R.mul(ent[0][0], ent[1][1]),
                         R.mul(ent[0][1], ent[1][0]))
        det = 0
        for perm in itertools.permutations(range(m)):
            sign = 1
            for i in range(m):
                for j in range(i + 1, m):
                    if perm[i] > perm[j]:
                        sign = -sign
            term = 1 if sign > 0 else R.neg(1)
            for i in range(m):
                term = R.mul(term, ent[i][perm[i]])
            det = R.add(det, term)
        return det


@lru_cache(maxsize=None)
def _distinction_counts(n: int, q: int):
    """One pass over the embedded GL_m(F_{q^2}), counted by (class
    invariant, quadratic-extension det log); reused for every (theta, mu)."""
    ctx = _context(n, q)
    H = DistinctionEmbedding(n, q, ctx)
    counts: dict = {}
    invs: dict = {}
    seen = 0
    for h, detlog in H.elements():
        seen += 1
        _s, _u, inv = jordan_decompose(h, ctx=ctx)
        if inv is None:
            continue
        key = (inv.key(), detlog)
        counts[key] = counts.get(key, 0) + 1
        invs[inv.key()] = inv
    assert seen == H.order
    return counts, invs


def ff_distinction_dim(pi: CuspidalFF, mu_exp: int) -> int:
    """dim Hom over the embedded GL_m(F_{q^2}) against mu(det); exact."""
    counts, invs = _distinction_counts(pi.n, pi.q)
    Q2 = pi.q ** 2 - 1
    total = Cyclotomic.zero()
    for (ikey, detlog), cnt in counts.items():
        rot = Fraction(mu_exp * detlog, Q2) % 1
        total = total + (pi.value(invs[ikey])
                         * Cyclotomic.from_rotation(-rot)
                         * Cyclotomic.rational(cnt))
    return _as_dim(total, DistinctionEmbedding(pi.n, pi.q, pi.ctx).order,
                   "distinction")


def regular_theta_orbits(n: int, q: int) -> list[int]:
    """One regular residue exponent per Frobenius orbit; equivalent
    exponents give the same cuspidal character."""
    Q = q ** n - 1
    seen = set()
    out = []
    for a in range(Q):
        if a in seen:
            continue
        orbit = {a * pow(q, i, Q) % Q for i in range(n)}
        seen |= orbit
        if len(orbit) == n:
            out.append(a)
    return out
