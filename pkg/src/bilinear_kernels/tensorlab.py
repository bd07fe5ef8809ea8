"""Structure tensors as dense order-3 arrays, decomposition verification,
flattening and skew-contraction rank bounds, and the coefficient-sum
stability measure."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .structures import (SchemaError, SparsityPattern, StructureKind, basis,
                         dense_parts)


@dataclass(frozen=True)
class Tensor3:
    """Dense order-3 tensor; entry(i, j, k) = entries[i, j, k]."""

    entries: np.ndarray

    def __post_init__(self):
        if self.entries.ndim != 3:
            raise ValueError("Tensor3 needs a 3-dimensional array")
        if min(self.entries.shape) < 1:
            raise ValueError("tensor dims must be positive")
        if not np.all(np.isfinite(self.entries.view(float))):
            raise ValueError("tensor entries must be finite")

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.entries.shape


@dataclass
class DecompositionTerm:
    lam: complex
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray


@dataclass
class TensorDecomposition:
    """Weighted rank-one terms lam * u (x) v (x) w."""

    dims: tuple[int, int, int]
    terms: list[DecompositionTerm]

    def __post_init__(self):
        d1, d2, d3 = self.dims
        for k, t in enumerate(self.terms):
            if len(t.u) != d1 or len(t.v) != d2 or len(t.w) != d3:
                raise ValueError(f"term {k} factor lengths do not match dims {self.dims}")


def decomposition_tensor(D: TensorDecomposition) -> np.ndarray:
    out = np.zeros(D.dims, dtype=complex)
    for t in D.terms:
        out += t.lam * np.einsum("i,j,k->ijk", t.u, t.v, t.w)
    return out


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def structure_tensor(kind, n: int, f: complex | None = None,
                     pattern: SparsityPattern | None = None) -> Tensor3:
    """Matvec structure tensor over the canonical parameter basis:
    entry(p, j, k) = k-th coordinate of (basis_p @ e_j)."""
    kind = StructureKind(kind)
    if kind is StructureKind.F_CIRCULANT and f is None:
        f = -1.0
    mats = basis(kind, n, f=f, pattern=pattern)
    T = np.zeros((len(mats), n, n), dtype=complex)
    for p, B in enumerate(mats):
        values, _, _ = dense_parts(B)
        T[p] = values.T
    return Tensor3(T)


def matmul_tensor(m: int, n: int, p: int) -> Tensor3:
    """Matrix multiplication tensor: entry((i,j), (j,k), (i,k)) = 1, row-major."""
    T = np.zeros((m * n, n * p, m * p), dtype=complex)
    for i in range(m):
        for j in range(n):
            for k in range(p):
                T[i * n + j, j * p + k, i * p + k] = 1.0
    return Tensor3(T)


def complex_mul_tensor() -> Tensor3:
    """Multiplication of complex numbers over the reals, basis (1, i)."""
    T = np.zeros((2, 2, 2), dtype=complex)
    T[0, 0, 0] = 1.0
    T[1, 1, 0] = -1.0
    T[0, 1, 1] = 1.0
    T[1, 0, 1] = 1.0
    return Tensor3(T)


def so3_tensor() -> Tensor3:
    """Structure constants of the rotation Lie algebra (Levi-Civita symbol)."""
    T = np.zeros((3, 3, 3), dtype=complex)
    for i in range(1, 4):
        for j in range(1, 4):
            for k in range(1, 4):
                T[i - 1, j - 1, k - 1] = (i - j) * (j - k) * (k - i) / 2.0
    return Tensor3(T)


def commutator_beta_tensor() -> Tensor3:
    """The 3x3x3 bilinear form the 2x2 commutator reduces to:
    (s, t) -> (s1 t2 + s2 t3, -s2 t1 + s3 t2, -s1 t1 - s3 t3)."""
    T = np.zeros((3, 3, 3), dtype=complex)
    T[0, 1, 0] = 1.0
    T[1, 2, 0] = 1.0
    T[1, 0, 1] = -1.0
    T[2, 1, 1] = 1.0
    T[0, 0, 2] = -1.0
    T[2, 2, 2] = -1.0
    return Tensor3(T)


_NAMED_BUILDERS = {
    "complex_mul": lambda **kw: complex_mul_tensor(),
    "so3": lambda **kw: so3_tensor(),
    "commutator_beta": lambda **kw: commutator_beta_tensor(),
}


def build_structure_tensor(spec: str, n: int | None = None, f: complex | None = None,
                           pattern: SparsityPattern | None = None,
                           m: int | None = None, p: int | None = None) -> Tensor3:
    """Dispatch: a structured-matvec kind plus n, 'matmul' with (m, n, p),
    or one of the named builders complex_mul / so3 / commutator_beta."""
    if spec in _NAMED_BUILDERS:
        return _NAMED_BUILDERS[spec]()
    if spec == "matmul":
        if m is None or n is None or p is None:
            raise ValueError("matmul tensor needs m, n, p")
        return matmul_tensor(m, n, p)
    kind = StructureKind(spec)
    if n is None:
        raise ValueError("structured tensor needs n")
    return structure_tensor(kind, n, f=f, pattern=pattern)


# ---------------------------------------------------------------------------
# Verification and rank bounds
# ---------------------------------------------------------------------------

def contract(T: Tensor3, u, v) -> np.ndarray:
    """w[k] = sum_ij T(i,j,k) u[i] v[j]."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    d1, d2, _ = T.dims
    if u.shape != (d1,) or v.shape != (d2,):
        raise ValueError(f"contract expects vectors of lengths {d1} and {d2}")
    return np.einsum("ijk,i,j->k", T.entries, u, v)


@dataclass
class VerificationReport:
    max_abs_error: float
    term_count: int
    passed: bool


def verify_decomposition(T: Tensor3, D: TensorDecomposition, tol: float) -> VerificationReport:
    if tuple(D.dims) != tuple(T.dims):
        raise ValueError(f"decomposition dims {D.dims} do not match tensor dims {T.dims}")
    err = float(np.abs(T.entries - decomposition_tensor(D)).max(initial=0.0))
    return VerificationReport(err, len(D.terms), err <= tol)


def flattening_ranks(T: Tensor3, tol: float = 1e-9) -> tuple[int, int, int]:
    """Numerical ranks of the three unfoldings; each lower-bounds border rank."""
    ranks = []
    arr = T.entries
    for mode in range(3):
        mat = np.moveaxis(arr, mode, 0).reshape(arr.shape[mode], -1)
        s = np.linalg.svd(mat, compute_uv=False)
        if s.size == 0 or s[0] == 0:
            ranks.append(0)
        else:
            ranks.append(int((s > tol * s[0]).sum()))
    return tuple(ranks)


@dataclass
class OttavianiReport:
    nonsingular: bool
    det_magnitude: float


def ottaviani_test(T: Tensor3) -> OttavianiReport:
    """Border-rank >= 5 witness for 3x3x3 tensors.

    Builds the 9x9 skew contraction of the mode-1 slices,
    [[0, X3, -X2], [-X3, 0, X1], [X2, -X1, 0]], scales rows to unit norm,
    and reports nonsingularity of the determinant.  Rank <= 4 tensors always
    produce a singular matrix, so nonsingularity certifies border rank >= 5.
    """
    if T.dims != (3, 3, 3):
        raise ValueError(f"ottaviani test needs a 3x3x3 tensor, got {T.dims}")
    X1, X2, X3 = T.entries[0], T.entries[1], T.entries[2]
    Z = np.zeros((3, 3), dtype=complex)
    M = np.block([[Z, X3, -X2], [-X3, Z, X1], [X2, -X1, Z]])
    norms = np.linalg.norm(M, axis=1)
    if np.any(norms == 0):
        return OttavianiReport(False, 0.0)
    det = abs(np.linalg.det(M / norms[:, None]))
    return OttavianiReport(bool(det > 1e-6), float(det))


def stability_measure(D: TensorDecomposition) -> float:
    """Coefficient sum of the factor-normalized decomposition: sum |lam_i|
    after folding each term's factor norms into its coefficient."""
    total = 0.0
    for k, t in enumerate(D.terms):
        nu, nv, nw = np.linalg.norm(t.u), np.linalg.norm(t.v), np.linalg.norm(t.w)
        if nu == 0 or nv == 0 or nw == 0:
            raise ValueError(f"term {k} has a zero factor vector")
        total += abs(t.lam) * nu * nv * nw
    return total


# ---------------------------------------------------------------------------
# Reference decompositions of the complex-multiplication tensor
# ---------------------------------------------------------------------------

def complex_mul_decomposition(preset: str) -> TensorDecomposition:
    """Named decompositions of the complex-multiplication tensor.

    usual: the four-term schoolbook algorithm (coefficient sum 4).
    gauss: the three-term algorithm (coefficient sum 2(1+sqrt 2)).
    cube:  the three-term algorithm that is simultaneously rank- and
           stability-optimal; built from unit vectors at 120-degree spacing,
           with the input factors conjugated relative to the output factor
           (complex multiplication commutes with conjugation, which is what
           lets a symmetric family of cubes realize the non-symmetric tensor).
    """
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    if preset == "usual":
        terms = [
            DecompositionTerm(1.0, e1, e1, e1),
            DecompositionTerm(-1.0, e2, e2, e1),
            DecompositionTerm(1.0, e1, e2, e2),
            DecompositionTerm(1.0, e2, e1, e2),
        ]
    elif preset == "gauss":
        terms = [
            DecompositionTerm(1.0, e1 + e2, e1 + e2, e2),
            DecompositionTerm(1.0, e1, e1, e1 - e2),
            DecompositionTerm(-1.0, e2, e2, e1 + e2),
        ]
    elif preset == "cube":
        terms = []
        for theta in (0.0, 2 * np.pi / 3, 4 * np.pi / 3):
            inp = np.array([np.cos(theta), -np.sin(theta)])
            out = np.array([np.cos(theta), np.sin(theta)])
            terms.append(DecompositionTerm(4.0 / 3.0, inp, inp, out))
    else:
        raise ValueError(f"unknown preset {preset!r} (expected usual, gauss, or cube)")
    return TensorDecomposition((2, 2, 2), terms)


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

def serialize_decomposition(D: TensorDecomposition) -> str:
    return json.dumps({
        "dims": list(D.dims),
        "terms": [{
            "lambda": [complex(t.lam).real, complex(t.lam).imag],
            "u": [[complex(z).real, complex(z).imag] for z in t.u],
            "v": [[complex(z).real, complex(z).imag] for z in t.v],
            "w": [[complex(z).real, complex(z).imag] for z in t.w],
        } for t in D.terms],
    })


def _read_cvec(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list):
        raise SchemaError(f"{where}: expected a list of [re, im]")
    out = np.empty(len(obj), dtype=complex)
    for k, pair in enumerate(obj):
        if (not isinstance(pair, list)) or len(pair) != 2 \
                or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in pair):
            raise SchemaError(f"{where}[{k}]: expected [re, im]")
        out[k] = complex(pair[0], pair[1])
    return out


def parse_decomposition(text: str) -> TensorDecomposition:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"offset {exc.pos}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict) or "dims" not in doc or "terms" not in doc:
        raise SchemaError("top level: expected an object with dims and terms")
    dims = doc["dims"]
    if (not isinstance(dims, list)) or len(dims) != 3 \
            or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims):
        raise SchemaError("dims: expected three positive integers")
    if not isinstance(doc["terms"], list):
        raise SchemaError("terms: expected a list")
    terms = []
    for k, t in enumerate(doc["terms"]):
        where = f"terms[{k}]"
        if not isinstance(t, dict) or any(key not in t for key in ("lambda", "u", "v", "w")):
            raise SchemaError(f"{where}: expected an object with lambda, u, v, w")
        lam_pair = t["lambda"]
        if (not isinstance(lam_pair, list)) or len(lam_pair) != 2:
            raise SchemaError(f"{where}.lambda: expected [re, im]")
        lam = complex(lam_pair[0], lam_pair[1])
        terms.append(DecompositionTerm(lam, _read_cvec(t["u"], f"{where}.u"),
                                       _read_cvec(t["v"], f"{where}.v"),
                                       _read_cvec(t["w"], f"{where}.w")))
    return TensorDecomposition(tuple(dims), terms)
