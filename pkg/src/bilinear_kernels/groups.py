"""Finite groups as multiplication tables, the triple product property,
embedding-based matrix multiplication, and the two 8-multiplication
simultaneous 2x2 product kernels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .counting import (CountContext, Kind, TrackedScalar, TrackedVector, add,
                       apply_matrix, as_matrix, constant, mul, take, to_scalars,
                       vmul, zero_vector)
from .spectral import dft_matrix, idft_matrix


@dataclass(frozen=True)
class GroupTable:
    """A finite group given by an explicit multiplication table.

    product[a, b] is the index of the product of elements a and b; the
    group laws are checked exhaustively at construction for order <= 64.
    """

    order: int
    product: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...]
    element_names: tuple[str, ...]

    def __post_init__(self):
        n = self.order
        P = np.array(self.product, dtype=int)
        if P.shape != (n, n) or P.min() < 0 or P.max() >= n:
            raise ValueError("product table must be an order x order index table")
        if len(self.inverse) != n or len(self.element_names) != n:
            raise ValueError("inverse and element_names must have length order")
        e = self.identity
        if not (np.all(P[e] == np.arange(n)) and np.all(P[:, e] == np.arange(n))):
            raise ValueError("identity law fails")
        inv = np.array(self.inverse, dtype=int)
        if not (np.all(P[np.arange(n), inv] == e) and np.all(P[inv, np.arange(n)] == e)):
            raise ValueError("inverse law fails")
        if n <= 64:
            left = P[P, :]
            right = P[np.arange(n)[:, None, None], P[None, :, :]]
            if not np.all(left == right):
                raise ValueError("associativity fails")

    def table(self) -> np.ndarray:
        return np.array(self.product, dtype=int)

    def mul(self, a: int, b: int) -> int:
        return self.product[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]


def cyclic_group(n: int) -> GroupTable:
    """C_n with elements 1, g, ..., g^(n-1)."""
    if n < 1:
        raise ValueError("cyclic group needs n >= 1")
    product = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    inverse = tuple((-a) % n for a in range(n))
    names = tuple("1" if a == 0 else ("g" if a == 1 else f"g^{a}") for a in range(n))
    return GroupTable(n, product, 0, inverse, names)


def dihedral8() -> GroupTable:
    """D4 = <x, y | x^4 = y^2 = 1, yxy = x^-1> with element order
    (1, x, x^2, x^3, y, xy, x^2y, x^3y)."""

    def mul_el(p: int, q: int) -> int:
        a, e = p % 4, p // 4
        b, f0 = q % 4, q // 4
        if e == 0:
            return (a + b) % 4 + 4 * f0
        return (a - b) % 4 + 4 * (1 - f0)

    product = tuple(tuple(mul_el(p, q) for q in range(8)) for p in range(8))
    inverse = []
    for p in range(8):
        inverse.append(next(q for q in range(8) if product[p][q] == 0))
    names = ("1", "x", "x^2", "x^3", "y", "xy", "x^2y", "x^3y")
    return GroupTable(8, product, 0, tuple(inverse), names)


@dataclass
class GroupAlgebraElement:
    """Element of the group algebra: one coefficient per group element."""

    coefficients: list[TrackedScalar]


def tpp_check(G: GroupTable, S: Sequence[int], T: Sequence[int], U: Sequence[int]) -> bool:
    """Exhaustive triple product property test: every coincidence
    s*t*u = s'*t'*u' must force s = s', t = t', u = u'."""
    seen: dict[int, tuple[int, int, int]] = {}
    for s in S:
        for t in T:
            st = G.product[s][t]
            for u in U:
                g = G.product[st][u]
                prev = seen.get(g)
                if prev is None:
                    seen[g] = (s, t, u)
                elif prev != (s, t, u):
                    return False
    return True


def _coeffs(a) -> list[TrackedScalar]:
    return a.coefficients if isinstance(a, GroupAlgebraElement) else list(a)


def group_algebra_mul(G: GroupTable, a, b, ctx: CountContext):
    """Convolution over the group; structurally skips Constant-zero coefficients."""
    ca, cb = _coeffs(a), _coeffs(b)
    if len(ca) != G.order or len(cb) != G.order:
        raise ValueError("coefficient vectors must have length equal to the group order")
    out: list[TrackedScalar] = [constant(0)] * G.order
    sup_a = [i for i, s in enumerate(ca) if s.is_variable or s.value != 0]
    sup_b = [j for j, s in enumerate(cb) if s.is_variable or s.value != 0]
    for i in sup_a:
        for j in sup_b:
            k = G.product[i][j]
            out[k] = add(out[k], mul(ca[i], cb[j], ctx), ctx)
    result = out
    if isinstance(a, GroupAlgebraElement) or isinstance(b, GroupAlgebraElement):
        return GroupAlgebraElement(result)
    return result


def cu_matmul(G: GroupTable, S: Sequence[int], T: Sequence[int], U: Sequence[int],
              A, B, ctx: CountContext):
    """Matrix product read off a group-algebra product (reference path).

    A is embedded over s_i t_j^-1, B over t_i u_j^-1, and entry (i, k) of AB
    is the coefficient of s_i u_k^-1 in the convolution.
    """
    if not tpp_check(G, S, T, U):
        raise ValueError("subsets do not satisfy the triple product property")
    avals, aflags = as_matrix(A)
    bvals, bflags = as_matrix(B)
    m, n = avals.shape
    n2, p = bvals.shape
    if (m, n, p) != (len(S), len(T), len(U)) or n2 != n:
        raise ValueError("matrix shapes must match the subset cardinalities")
    ahat = [constant(0)] * G.order
    for i in range(m):
        for j in range(n):
            g = G.product[S[i]][G.inverse[T[j]]]
            s = TrackedScalar(complex(avals[i, j]),
                              Kind.VARIABLE if aflags[i, j] else Kind.CONSTANT)
            ahat[g] = add(ahat[g], s, ctx) if (ahat[g].is_variable or ahat[g].value != 0) else s
    bhat = [constant(0)] * G.order
    for i in range(n):
        for j in range(p):
            g = G.product[T[i]][G.inverse[U[j]]]
            s = TrackedScalar(complex(bvals[i, j]),
                              Kind.VARIABLE if bflags[i, j] else Kind.CONSTANT)
            bhat[g] = add(bhat[g], s, ctx) if (bhat[g].is_variable or bhat[g].value != 0) else s
    prod = group_algebra_mul(G, ahat, bhat, ctx)
    return [[prod[G.product[S[i]][G.inverse[U[k]]]] for k in range(p)] for i in range(m)]


# ---------------------------------------------------------------------------
# D4 representation data
# ---------------------------------------------------------------------------

_D4 = dihedral8()
_D4_TABLE = _D4.table()
_D4_INV = np.array(_D4.inverse, dtype=int)

# Four characters over (1, x, x^2, x^3, y, xy, x^2y, x^3y) and the
# two-dimensional representation.
_D4_CHARS = np.array([
    [1, 1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, -1, -1, -1, -1],
    [1, -1, 1, -1, 1, -1, 1, -1],
    [1, -1, 1, -1, -1, 1, -1, 1],
], dtype=complex)

_D4_REP2 = np.zeros((8, 2, 2), dtype=complex)
_D4_REP2[0] = np.eye(2)
_D4_REP2[1] = [[0, -1], [1, 0]]
_D4_REP2[2] = -np.eye(2)
_D4_REP2[3] = [[0, 1], [-1, 0]]
_D4_REP2[4] = [[1, 0], [0, -1]]
_D4_REP2[5] = [[0, 1], [1, 0]]
_D4_REP2[6] = [[-1, 0], [0, 1]]
_D4_REP2[7] = [[0, -1], [-1, 0]]

for _p in range(8):
    for _q in range(8):
        if np.abs(_D4_REP2[_p] @ _D4_REP2[_q] - _D4_REP2[_D4_TABLE[_p, _q]]).max() > 1e-12:
            raise AssertionError("two-dimensional representation is not a homomorphism")

# Support of the embedded left factor: x^2, y, x^2y, 1 (all diagonal in the
# two-dimensional representation, which is what caps the block product at
# four multiplications).
_A_SUPPORT = (2, 4, 6, 0)
_B_SUPPORT = (3, 6, 7, 0)
for _g in _A_SUPPORT:
    if abs(_D4_REP2[_g][0, 1]) > 0 or abs(_D4_REP2[_g][1, 0]) > 0:
        raise AssertionError("left-factor support is not diagonal in the 2d representation")

# Forward transforms: left factor -> 4 characters + 2 diagonal block entries,
# right factor -> 4 characters + the full 2x2 block (row-major).
_D4_FWD_A = np.zeros((6, 4), dtype=complex)
_D4_FWD_B = np.zeros((8, 4), dtype=complex)
for _col, _g in enumerate(_A_SUPPORT):
    _D4_FWD_A[0:4, _col] = _D4_CHARS[:, _g]
    _D4_FWD_A[4, _col] = _D4_REP2[_g][0, 0]
    _D4_FWD_A[5, _col] = _D4_REP2[_g][1, 1]
for _col, _g in enumerate(_B_SUPPORT):
    _D4_FWD_B[0:4, _col] = _D4_CHARS[:, _g]
    _D4_FWD_B[4, _col] = _D4_REP2[_g][0, 0]
    _D4_FWD_B[5, _col] = _D4_REP2[_g][0, 1]
    _D4_FWD_B[6, _col] = _D4_REP2[_g][1, 0]
    _D4_FWD_B[7, _col] = _D4_REP2[_g][1, 1]

# Inverse transform from the 8 product values (r0..r3, Q00, Q01, Q10, Q11)
# back to group-algebra coefficients: Fourier inversion on D4.
_D4_INV_MAP = np.zeros((8, 8), dtype=complex)
for _g in range(8):
    _gi = _D4_INV[_g]
    _D4_INV_MAP[_g, 0:4] = _D4_CHARS[:, _gi] / 8.0
    for _al in range(2):
        for _be in range(2):
            _D4_INV_MAP[_g, 4 + 2 * _be + _al] = 2.0 * _D4_REP2[_gi][_al, _be] / 8.0

_M1_COEFF = (1, 4, 7, 0)   # entries of AB at x, y, x^3y, 1
_M2_COEFF = (5, 2, 3, 6)   # entries of AB^f at xy, x^2, x^3, x^2y


def wedderburn_d4(coeffs) -> tuple[np.ndarray, np.ndarray]:
    """Block-diagonal coordinates of a group-algebra element:
    four character values plus the 2x2 block of the 2-dim representation."""
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (8,):
        raise ValueError("expected 8 coefficients")
    return _D4_CHARS @ c, np.einsum("g,gab->ab", c, _D4_REP2)


def wedderburn_d4_inverse(chars4, block) -> np.ndarray:
    """Recover the coefficient vector from the block-diagonal coordinates."""
    r = np.asarray(chars4, dtype=complex)
    Q = np.asarray(block, dtype=complex)
    prods = np.array([r[0], r[1], r[2], r[3], Q[0, 0], Q[0, 1], Q[1, 0], Q[1, 1]])
    return _D4_INV_MAP @ prods


def _grid2(vec: TrackedVector, idx: tuple[int, int, int, int]):
    s = to_scalars(take(vec, np.array(idx)))
    return [[s[0], s[1]], [s[2], s[3]]]


def d4_simultaneous(A, B, ctx: CountContext):
    """(AB, AB^f) with exactly eight multiplications; B^f swaps B's rows.

    Both factors are mapped to block-diagonal coordinates by constant
    transforms; the left factor's 2x2 block is structurally diagonal, so the
    block product needs four multiplications, plus one per one-dimensional
    coordinate.
    """
    avals, aflags = as_matrix(A)
    bvals, bflags = as_matrix(B)
    if avals.shape != (2, 2) or bvals.shape != (2, 2):
        raise ValueError("d4_simultaneous expects 2x2 factors")
    av = TrackedVector(avals.reshape(-1), aflags.reshape(-1))
    bv = TrackedVector(bvals.reshape(-1), bflags.reshape(-1))
    wa = apply_matrix(_D4_FWD_A, av, ctx)          # r0..r3, p11, p22
    wb = apply_matrix(_D4_FWD_B, bv, ctx)          # r0..r3, q11, q12, q21, q22
    left = take(wa, np.array([0, 1, 2, 3, 4, 4, 5, 5]))
    prods = vmul(left, wb, ctx)                    # exactly 8 bilinear products
    coeffs = apply_matrix(_D4_INV_MAP, prods, ctx)
    return _grid2(coeffs, _M1_COEFF), _grid2(coeffs, _M2_COEFF)


def x8_simultaneous(A, B, ctx: CountContext):
    """(AB, AB^g) with exactly eight multiplications.

    B^g swaps B's rows and then the two entries of the new first row.  Both
    factors embed as sparse degree-7 polynomials multiplied modulo x^8 - 1
    through the 8-point transform; the two products are read off disjoint
    coefficient sets of the same convolution.
    """
    avals, aflags = as_matrix(A)
    bvals, bflags = as_matrix(B)
    if avals.shape != (2, 2) or bvals.shape != (2, 2):
        raise ValueError("x8_simultaneous expects 2x2 factors")
    av = TrackedVector(avals.reshape(-1), aflags.reshape(-1))
    bv = TrackedVector(bvals.reshape(-1), bflags.reshape(-1))
    p = zero_vector(8, av)
    q = zero_vector(8, bv)
    asel = take(av, np.array([3, 1, 2, 0]))        # d, b, c, a at degrees 0..3
    bsel = take(bv, np.array([1, 3, 0, 2]))        # f, h, e, g at degrees 0, 2, 4, 6
    p.values[np.array([0, 1, 2, 3])] = asel.values
    p.variable[np.array([0, 1, 2, 3])] = asel.variable
    q.values[np.array([0, 2, 4, 6])] = bsel.values
    q.variable[np.array([0, 2, 4, 6])] = bsel.variable
    phat = apply_matrix(dft_matrix(8), p, ctx)
    qhat = apply_matrix(dft_matrix(8), q, ctx)
    u = apply_matrix(idft_matrix(8), vmul(phat, qhat, ctx), ctx)
    return _grid2(u, (7, 3, 6, 2)), _grid2(u, (5, 1, 4, 0))


def blocked_simultaneous(A, B, variant: str, ctx: CountContext):
    """(AB, AB^variant) for B with 2n columns, applying the 2x2 kernel per
    column pair: 8n multiplications.  variant 'f' swaps rows globally;
    variant 'g' additionally swaps the first-row entries within each pair."""
    if variant not in ("f", "g"):
        raise ValueError("variant must be 'f' or 'g'")
    avals, aflags = as_matrix(A)
    bvals, bflags = as_matrix(B)
    if avals.shape != (2, 2) or bvals.shape[0] != 2:
        raise ValueError("blocked_simultaneous expects a 2x2 A and a 2-row B")
    if bvals.shape[1] % 2 != 0:
        raise ValueError("B must have an even number of columns")
    kernel = d4_simultaneous if variant == "f" else x8_simultaneous
    agrid = [[TrackedScalar(complex(avals[i, j]),
                            Kind.VARIABLE if aflags[i, j] else Kind.CONSTANT)
              for j in range(2)] for i in range(2)]
    out1 = [[], []]
    out2 = [[], []]
    for pair in range(bvals.shape[1] // 2):
        cols = slice(2 * pair, 2 * pair + 2)
        block = [[TrackedScalar(complex(bvals[i, j]),
                                Kind.VARIABLE if bflags[i, j] else Kind.CONSTANT)
                  for j in range(*cols.indices(bvals.shape[1]))] for i in range(2)]
        m1, m2 = kernel(agrid, block, ctx)
        for i in range(2):
            out1[i].extend(m1[i])
            out2[i].extend(m2[i])
    return out1, out2
