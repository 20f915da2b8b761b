"""Exact character tables of GL_2(F_q) by Dixon's modular method.

Everything here is brute force on purpose: conjugacy classes come from
orbit enumeration (not from any parametrization shared with the cuspidal
character formula), eigenvalues of the class-multiplication matrices are
found modulo a large prime l = 1 mod exponent(G), and the exact cyclotomic
character values are recovered through the discrete Fourier transform of
the power map.  The table is the independent oracle the cuspidal formula
is checked against, so it must not lean on that formula anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .cyclotomic import Cyclotomic
from .green_ff import char_poly
from .residue import _is_prime

MAX_GROUP_ORDER = 100000


def _gl2_elements(q: int):
    out = []
    for a in range(q):
        for b in range(q):
            for c in range(q):
                for d in range(q):
                    if (a * d - b * c) % q:
                        out.append((a, b, c, d))
    return out


def _mul2(x, y, q: int):
    return ((x[0] * y[0] + x[1] * y[2]) % q, (x[0] * y[1] + x[1] * y[3]) % q,
            (x[2] * y[0] + x[3] * y[2]) % q, (x[2] * y[1] + x[3] * y[3]) % q)


def _inv2(x, q: int):
    det_inv = pow((x[0] * x[3] - x[1] * x[2]) % q, -1, q)
    return ((x[3] * det_inv) % q, (-x[1] * det_inv) % q,
            (-x[2] * det_inv) % q, (x[0] * det_inv) % q)


def _order2(x, q: int) -> int:
    e = (1, 0, 0, 1)
    acc = x
    n = 1
    while acc != e:
        acc = _mul2(acc, x, q)
        n += 1
    return n


def _primitive_root(l: int) -> int:
    fac = []
    m = l - 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            fac.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        fac.append(m)
    for g in range(2, l):
        if all(pow(g, (l - 1) // p, l) != 1 for p in fac):
            return g
    raise ValueError("no primitive root (modulus not prime?)")


def _rref_mod(A: np.ndarray, l: int):
    R = A % l
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        hit = next((i for i in range(r, rows) if R[i, c]), None)
        if hit is None:
            continue
        if hit != r:
            R[[r, hit]] = R[[hit, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, l)) % l
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % l
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def _nullspace_mod(A: np.ndarray, l: int) -> np.ndarray:
    R, pivots = _rref_mod(A, l)
    cols = A.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = (-int(R[r, fc])) % l
    return basis % l


class DixonTable:
    """Complete exact character table; classes in first-seen element order."""

    __slots__ = ("q", "group_order", "reps", "sizes", "orders", "degrees",
                 "values", "_class_index", "identity_index", "inverse_class",
                 "modulus")

    def __init__(self, q, group_order, reps, sizes, orders, degrees, values,
                 class_index, identity_index, inverse_class, modulus):
        self.q = q
        self.group_order = group_order
        self.reps = reps
        self.sizes = sizes
        self.orders = orders
        self.degrees = degrees
        self.values = values
        self._class_index = class_index
        self.identity_index = identity_index
        self.inverse_class = inverse_class
        self.modulus = modulus

    def class_of(self, g) -> int:
        flat = tuple(g) if len(g) == 4 else (g[0][0], g[0][1], g[1][0], g[1][1])
        return self._class_index[tuple(v % self.q for v in flat)]

    def num_classes(self) -> int:
        return len(self.reps)

    def cuspidal_rows(self) -> list[int]:
        """Cuspidal irreducibles of GL_2(F_q) are exactly those of degree
        q - 1 once q > 2 (every other degree is 1, q or q + 1)."""
        return [i for i, d in enumerate(self.degrees) if d == self.q - 1]

    def inner_product(self, i: int, j: int) -> Fraction:
        acc = Cyclotomic.zero()
        for k, size in enumerate(self.sizes):
            acc = acc + (self.values[i][k] * self.values[j][k].conj()
                         * Cyclotomic.rational(size))
        out = acc.as_rational()
        if out is None:
            raise ValueError("character inner product came out irrational")
        return out / self.group_order


@lru_cache(maxsize=None)
def dixon_table(q: int) -> DixonTable:
    if not _is_prime(q) or q < 3:
        raise ValueError("need an odd prime field size")
    order = (q * q - 1) * (q * q - q)
    if order > MAX_GROUP_ORDER:
        raise ValueError(f"group order {order} exceeds cap {MAX_GROUP_ORDER}")

    elements = _gl2_elements(q)
    assert len(elements) == order
    inverses = {x: _inv2(x, q) for x in elements}

    # conjugacy classes by orbit enumeration
    class_index: dict = {}
    reps = []
    members = []
    for g in elements:
        if g in class_index:
            continue
        idx = len(reps)
        orbit = set()
        for x in elements:
            orbit.add(_mul2(_mul2(x, g, q), inverses[x], q))
        for h in orbit:
            class_index[h] = idx
        reps.append(g)
        members.append(sorted(orbit))
    r = len(reps)
    sizes = tuple(len(m) for m in members)
    assert sum(sizes) == order
    orders = tuple(_order2(g, q) for g in reps)
    identity_index = class_index[(1, 0, 0, 1)]
    inverse_class = tuple(class_index[inverses[g]] for g in reps)

    # modulus: l = 1 mod exponent(G), l > 2 sqrt(|G|), so integers below
    # the degree bound lift uniquely
    exponent = 1
    for o in orders:
        exponent = exponent * o // gcd(exponent, o)
    l = exponent + 1
    while not _is_prime(l) or l * l <= 4 * order:
        l += exponent

    # class multiplication coefficients a_{ijk} = #{(x, y) in C_i x C_j : xy = z_k}
    mats = np.zeros((r, r, r), dtype=np.int64)
    for k, z in enumerate(reps):
        for i in range(r):
            for x in members[i]:
                j = class_index[_mul2(inverses[x], z, q)]
                mats[i, j, k] += 1

    # split the class-function space into common eigenlines mod l
    subspaces = [np.eye(r, dtype=np.int64)]
    for i in range(r):
        if all(w.shape[0] == 1 for w in subspaces):
            break
        nxt = []
        for W in subspaces:
            d = W.shape[0]
            if d == 1:
                nxt.append(W)
                continue
            rhs = (W @ mats[i].T) % l  # row form of v -> mats[i] @ v
            aug = np.concatenate([W.T % l, rhs.T], axis=1)
            R, pivots = _rref_mod(aug, l)
            # invariance of the subspace makes the system consistent with
            # exactly d pivots, all in the left block
            assert pivots == list(range(d)), "subspace not invariant"
            XT = R[:d, d:] % l  # W @ mats[i].T = XT.T @ W
            cp = char_poly(tuple(tuple(int(v) for v in row) for row in XT), l)
            for lam in range(l):
                acc = 0
                for c in reversed(cp):
                    acc = (acc * lam + c) % l
                if acc:
                    continue
                # row-coordinate eigenvectors: c with c @ XT.T = lam c
                shifted = (XT - lam * np.eye(d, dtype=np.int64)) % l
                basis = _nullspace_mod(shifted, l)
                if basis.shape[0]:
                    nxt.append((basis @ W) % l)
        assert sum(w.shape[0] for w in nxt) == r
        subspaces = nxt
    assert all(w.shape[0] == 1 for w in subspaces), "splitting incomplete"

    # normalize to central-character vectors, recover degrees and values mod l
    size_inv = [pow(int(s), -1, l) for s in sizes]
    omegas = []
    for W in subspaces:
        v = W[0]
        if v[identity_index] == 0:
            raise ValueError("eigenline misses the identity coordinate")
        omegas.append((v * pow(int(v[identity_index]), -1, l)) % l)
    degrees = []
    values_mod = []
    for w in omegas:
        s = sum(int(w[k]) * int(w[inverse_class[k]]) * size_inv[k]
                for k in range(r)) % l
        d2 = order * pow(s, -1, l) % l
        deg = next(t for t in range(1, isqrt(order) + 1)
                   if t * t % l == d2)
        degrees.append(deg)
        values_mod.append([deg * int(w[k]) * size_inv[k] % l for k in range(r)])
    assert sum(d * d for d in degrees) == order

    # exact lift: chi(g) = sum_j m_j e(j / o) with multiplicities m_j read
    # off the mod-l DFT of t -> chi(g^t)
    w0 = _primitive_root(l)
    values = []
    for row_mod, deg in zip(values_mod, degrees):
        row = []
        for k, g in enumerate(reps):
            o = orders[k]
            power_class = []
            acc = (1, 0, 0, 1)
            for _t in range(o):
                power_class.append(class_index[acc])
                acc = _mul2(acc, g, q)
            z = pow(w0, (l - 1) // o, l)
            o_inv = pow(o, -1, l)
            val = Cyclotomic.zero()
            for j in range(o):
                m = sum(row_mod[power_class[t]] * pow(z, -j * t, l)
                        for t in range(o)) * o_inv % l
                if m > deg:
                    raise ValueError("root multiplicity failed to lift")
                if m:
                    val = val + (Cyclotomic.from_rotation(Fraction(j, o))
                                 * Cyclotomic.rational(m))
            row.append(val)
        values.append(tuple(row))

    table = DixonTable(q, order, tuple(reps), sizes, orders, tuple(degrees),
                       tuple(values), class_index, identity_index,
                       inverse_class, l)
    _validate(table)
    return table


def _validate(table: DixonTable) -> None:
    r = table.num_classes()
    for i in range(r):
        if table.values[i][table.identity_index].as_rational() != table.degrees[i]:
            raise ValueError("degree disagrees with identity value")
    pairs = ([(i, j) for i in range(r) for j in range(r)] if r <= 16
             else [(i, i) for i in range(r)] + [(i, (i + 1) % r)
                                                for i in range(r)])
    for i, j in pairs:
        want = Fraction(1 if i == j else 0)
        if table.inner_product(i, j) != want:
            raise ValueError(f"orthogonality fails at rows {i}, {j}")
