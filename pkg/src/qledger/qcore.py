"""Dense complex linear algebra and quantum state primitives.

All spectral work in this package goes through ``hermitian_eig``, a cyclic
Jacobi eigensolver with complex rotations.  Target matrices are tiny
(dimension 2 to 16 in practice, 64 as a hard cap), a regime where Jacobi is
simple, accurate to machine precision and has no external dependencies
beyond numpy arrays.

Conventions:
  * matrices are dense ``numpy`` arrays of complex128, row-major,
  * eigenvalues are returned ascending with matching eigenvector columns,
  * eigenvector phases (and the basis inside a degenerate cluster) are
    arbitrary; downstream code only consumes basis-independent quantities,
  * the JSON wire format for a matrix is
    ``{"dim": n, "re": [...], "im": [...]}`` with row-major entry lists.
"""

from __future__ import annotations

import math

import numpy as np

MAX_DIM = 64

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-10
KRAUS_TOL = 1e-10

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

LOG_FLOOR = 1e-300


class ValidationError(ValueError):
    """Raised when an input violates a structural invariant."""


class NumericError(RuntimeError):
    """Raised when a numerical routine fails to meet its tolerance."""


class PropertyViolation(RuntimeError):
    """Raised when a physical property check fails during an audit."""


def _as_square(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite square complex128 array, dim in [1, MAX_DIM]."""
    a = np.asarray(getattr(m, "matrix", m), dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name}: expected a square matrix, got shape {a.shape}")
    if not (1 <= a.shape[0] <= MAX_DIM):
        raise ValidationError(f"{name}: dimension {a.shape[0]} outside [1, {MAX_DIM}]")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name}: entries must be finite")
    return a


def _hermiticity_defect(a: np.ndarray) -> float:
    return float(np.abs(a - a.conj().T).max())


class HermitianOperator:
    """A validated Hermitian matrix (observable or Hamiltonian)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix) -> None:
        a = _as_square(matrix, "HermitianOperator")
        defect = _hermiticity_defect(a)
        if defect > HERMITICITY_TOL:
            raise ValidationError(
                f"HermitianOperator: hermiticity defect {defect:.3e} exceeds {HERMITICITY_TOL:.0e}"
            )
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    def __setattr__(self, *_):
        raise AttributeError("HermitianOperator is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


class DensityMatrix:
    """A validated quantum state: Hermitian, unit trace, positive.

    The positivity check costs an eigendecomposition, so callers that
    already guarantee positivity (integrators with their own monitoring,
    algebraic constructions from a known spectrum) may pass
    ``check_psd=False``.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, check_psd: bool = True) -> None:
        a = _as_square(matrix, "DensityMatrix")
        defect = _hermiticity_defect(a)
        if defect > HERMITICITY_TOL:
            raise ValidationError(
                f"DensityMatrix: hermiticity defect {defect:.3e} exceeds {HERMITICITY_TOL:.0e}"
            )
        tr = a.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"DensityMatrix: trace {tr} deviates from 1 beyond {TRACE_TOL:.0e}")
        if check_psd:
            wmin = float(_jacobi(a, want_vectors=False)[0][0])
            if wmin < -PSD_TOL:
                raise ValidationError(
                    f"DensityMatrix: smallest eigenvalue {wmin:.3e} below -{PSD_TOL:.0e}"
                )
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    def __setattr__(self, *_):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, state: "PureState | np.ndarray") -> "DensityMatrix":
        v = state.amplitudes if isinstance(state, PureState) else np.asarray(state, np.complex128)
        return cls(np.outer(v, v.conj()), check_psd=False)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


class PureState:
    """A normalized complex state vector."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes) -> None:
        v = np.asarray(getattr(amplitudes, "amplitudes", amplitudes), dtype=np.complex128)
        if v.ndim != 1 or not (1 <= v.size <= MAX_DIM):
            raise ValidationError(f"PureState: expected a vector of length 1..{MAX_DIM}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("PureState: amplitudes must be finite")
        nrm = float(np.linalg.norm(v))
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValidationError(f"PureState: norm {nrm} deviates from 1 beyond {NORM_TOL:.0e}")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    def __setattr__(self, *_):
        raise AttributeError("PureState is immutable")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def to_density(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self)


class QuantumChannel:
    """A CPTP map given by Kraus operators with sum_k K_k^dag K_k = I."""

    __slots__ = ("kraus",)

    def __init__(self, kraus) -> None:
        ops = tuple(_as_square(k, "QuantumChannel kraus") for k in kraus)
        if not ops:
            raise ValidationError("QuantumChannel: at least one Kraus operator required")
        d = ops[0].shape[0]
        if any(k.shape[0] != d for k in ops):
            raise ValidationError("QuantumChannel: Kraus operators must share one dimension")
        acc = np.zeros((d, d), np.complex128)
        for k in ops:
            acc += k.conj().T @ k
        defect = float(np.abs(acc - np.eye(d)).max())
        if defect > KRAUS_TOL:
            raise ValidationError(
                f"QuantumChannel: completeness defect {defect:.3e} exceeds {KRAUS_TOL:.0e}"
            )
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    def __setattr__(self, *_):
        raise AttributeError("QuantumChannel is immutable")

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]


# ---------------------------------------------------------------------------
# cyclic Jacobi eigensolver

def _rotation(tau: float):
    """Tangent, cosine and sine of the Jacobi angle for a given tau."""
    if abs(tau) > 1e12:
        t = 1.0 / (2.0 * tau)
    else:
        t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return t, c, t * c


def _jacobi2(a: np.ndarray, want_vectors: bool):
    """Exact single-rotation diagonalization of a 2x2 Hermitian matrix."""
    d0 = a[0, 0].real
    d1 = a[1, 1].real
    b = complex(a[0, 1])
    r = abs(b)
    if r == 0.0:
        if d0 <= d1:
            return np.array([d0, d1]), (np.eye(2, dtype=np.complex128) if want_vectors else None)
        v = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128) if want_vectors else None
        return np.array([d1, d0]), v
    phase = b / r
    t, c, s = _rotation((d0 - d1) / (2.0 * r))
    w0 = d0 + t * r
    w1 = d1 - t * r
    if not want_vectors:
        return np.array([w0, w1] if w0 <= w1 else [w1, w0]), None
    col0 = (c, s * phase.conjugate())
    col1 = (-s * phase, c)
    if w0 > w1:
        w0, w1 = w1, w0
        col0, col1 = col1, col0
    return np.array([w0, w1]), np.array([[col0[0], col1[0]], [col0[1], col1[1]]], dtype=np.complex128)


def _jacobi(a: np.ndarray, want_vectors: bool = True):
    """Diagonalize a Hermitian matrix by cyclic Jacobi sweeps.

    Complex plane rotations annihilate one off-diagonal pair at a time;
    sweeps repeat until the off-diagonal Frobenius norm drops below
    ``JACOBI_TOL`` times the Frobenius norm of the input.  Raises
    ``NumericError`` after ``JACOBI_MAX_SWEEPS`` sweeps without convergence.

    The inner loops work on plain Python complex scalars.  At this package's
    dimensions (2 to 16 in practice) that is several times faster than
    slicing numpy arrays per rotation, and the fuzz suites sit inside
    wall-clock budgets.
    """
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0].real]), (np.eye(1, dtype=np.complex128) if want_vectors else None)
    if n == 2:
        return _jacobi2(a, want_vectors)

    norm_f = float(np.linalg.norm(a))
    if norm_f == 0.0:
        return np.zeros(n), (np.eye(n, dtype=np.complex128) if want_vectors else None)
    stop2 = (JACOBI_TOL * norm_f) ** 2
    # rotations on pairs below this threshold cannot push the off-diagonal
    # norm above the stopping level, so they are skipped
    skip = JACOBI_TOL * norm_f / (2.0 * n)

    A = [[complex(x) for x in row] for row in a.tolist()]
    V = [[1.0 + 0.0j if i == j else 0.0 + 0.0j for j in range(n)] for i in range(n)] if want_vectors else None

    for _ in range(JACOBI_MAX_SWEEPS):
        # summed directly over off-diagonal entries; subtracting the diagonal
        # from the full Frobenius norm would cancel catastrophically near
        # convergence
        off2 = 0.0
        for i in range(n - 1):
            row = A[i]
            for j in range(i + 1, n):
                x = row[j]
                off2 += 2.0 * (x.real * x.real + x.imag * x.imag)
        if off2 <= stop2:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p][q]
                r = abs(apq)
                if r <= skip:
                    continue
                phase = apq / r
                _, c, s = _rotation((A[p][p].real - A[q][q].real) / (2.0 * r))
                sf = s * phase              # s e^{+i phi}
                sc = sf.conjugate()         # s e^{-i phi}

                for i in range(n):
                    row = A[i]
                    aip = row[p]
                    aiq = row[q]
                    row[p] = c * aip + sc * aiq
                    row[q] = c * aiq - sf * aip
                rp = A[p]
                rq = A[q]
                for i in range(n):
                    aip = rp[i]
                    aiq = rq[i]
                    rp[i] = c * aip + sf * aiq
                    rq[i] = c * aiq - sc * aip
                rp[q] = 0.0
                rq[p] = 0.0
                rp[p] = rp[p].real
                rq[q] = rq[q].real
                if V is not None:
                    for i in range(n):
                        row = V[i]
                        vip = row[p]
                        viq = row[q]
                        row[p] = c * vip + sc * viq
                        row[q] = c * viq - sf * vip
    else:
        raise NumericError(
            f"Jacobi eigensolver did not converge within {JACOBI_MAX_SWEEPS} sweeps (dim {n})"
        )

    w = np.array([A[i][i].real for i in range(n)])
    order = np.argsort(w, kind="stable")
    w = w[order]
    if V is None:
        return w, None
    return w, np.array(V, dtype=np.complex128)[:, order]


def hermitian_eig(operator) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvector columns of a Hermitian matrix.

    Accepts a ``HermitianOperator``, ``DensityMatrix`` or bare array.
    """
    a = _as_square(operator, "hermitian_eig")
    defect = _hermiticity_defect(a)
    if defect > HERMITICITY_TOL:
        raise ValidationError(
            f"hermitian_eig: hermiticity defect {defect:.3e} exceeds {HERMITICITY_TOL:.0e}"
        )
    return _jacobi(a)


def hermitian_eigvals(operator) -> np.ndarray:
    """Eigenvalues only; skips eigenvector accumulation."""
    a = _as_square(operator, "hermitian_eigvals")
    return _jacobi(a, want_vectors=False)[0]


# ---------------------------------------------------------------------------
# composition and reduction

def tensor(*factors) -> np.ndarray:
    """Kronecker product of matrices (or vectors), left to right."""
    if len(factors) == 1 and not isinstance(factors[0], np.ndarray) and hasattr(factors[0], "__iter__"):
        factors = tuple(factors[0])
    if not factors:
        raise ValidationError("tensor: at least one factor required")
    out = np.asarray(getattr(factors[0], "matrix", factors[0]), dtype=np.complex128)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(getattr(f, "matrix", f), dtype=np.complex128))
    return out


def partial_trace(rho, dims, keep) -> DensityMatrix:
    """Reduced state over the subsystems listed in ``keep`` (ascending indices).

    ``dims`` gives the local dimension of every tensor factor of ``rho``.
    """
    a = _as_square(rho, "partial_trace")
    dims = [int(d) for d in dims]
    n = len(dims)
    if int(np.prod(dims)) != a.shape[0]:
        raise ValidationError(f"partial_trace: dims {dims} do not factor dimension {a.shape[0]}")
    keep = [int(k) for k in keep]
    if keep != sorted(set(keep)) or not keep or any(k < 0 or k >= n for k in keep):
        raise ValidationError(f"partial_trace: keep {keep} must be distinct ascending indices in 0..{n - 1}")
    reduced = _partial_trace_raw(a.reshape(dims + dims), n, keep)
    return DensityMatrix(reduced, check_psd=False)


def _partial_trace_raw(reshaped: np.ndarray, n: int, keep: list[int]) -> np.ndarray:
    keepset = set(keep)
    row = list(range(n))
    col = [i if i not in keepset else n + i for i in range(n)]
    out = [k for k in keep] + [n + k for k in keep]
    red = np.einsum(reshaped, row + col, out)
    d = int(np.prod([reshaped.shape[k] for k in keep]))
    return red.reshape(d, d)


def partial_trace_stack(states: np.ndarray, dims, keep) -> np.ndarray:
    """Vectorized partial trace over a (T, d, d) stack of states."""
    dims = [int(d) for d in dims]
    n = len(dims)
    keepset = set(int(k) for k in keep)
    t = states.shape[0]
    reshaped = states.reshape([t] + dims + dims)
    row = list(range(1, n + 1))
    col = [i if i - 1 not in keepset else n + i for i in range(1, n + 1)]
    out = [0] + [k + 1 for k in sorted(keepset)] + [n + k + 1 for k in sorted(keepset)]
    red = np.einsum(reshaped, [0] + row + col, out)
    d = int(np.prod([dims[k] for k in sorted(keepset)]))
    return red.reshape(t, d, d)


def apply_channel(channel: QuantumChannel, rho) -> DensityMatrix:
    """Apply a Kraus channel, sum_k K rho K^dag."""
    a = _as_square(rho, "apply_channel")
    if a.shape[0] != channel.dim:
        raise ValidationError(
            f"apply_channel: state dim {a.shape[0]} does not match channel dim {channel.dim}"
        )
    out = np.zeros_like(a)
    for k in channel.kraus:
        out += k @ a @ k.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out)


def matrix_log_hermitian(operator, floor: float = LOG_FLOOR) -> np.ndarray:
    """Matrix logarithm of a Hermitian operator via its spectrum.

    Eigenvalues below ``floor`` are clamped to ``floor`` before taking the
    log.  The default floor only guards against log(0); callers that need a
    support check must inspect the spectrum themselves.
    """
    w, v = hermitian_eig(operator)
    lw = np.log(np.maximum(w, floor))
    out = (v * lw) @ v.conj().T
    return 0.5 * (out + out.conj().T)


# ---------------------------------------------------------------------------
# JSON wire format

def matrix_to_json(m) -> dict:
    """Encode a matrix as {"dim": n, "re": [...], "im": [...]}, row-major."""
    a = _as_square(m, "matrix_to_json")
    return {
        "dim": int(a.shape[0]),
        "re": [float(x) for x in a.real.ravel()],
        "im": [float(x) for x in a.imag.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    """Decode the matrix wire format; strict about keys and lengths."""
    if not isinstance(obj, dict):
        raise ValidationError(f"matrix JSON: expected an object, got {type(obj).__name__}")
    extra = set(obj) - {"dim", "re", "im"}
    if extra:
        raise ValidationError(f"matrix JSON: unknown keys {sorted(extra)}")
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"matrix JSON: malformed fields ({exc})") from exc
    if not (1 <= dim <= MAX_DIM):
        raise ValidationError(f"matrix JSON: dim {dim} outside [1, {MAX_DIM}]")
    if re.shape != (dim * dim,) or im.shape != (dim * dim,):
        raise ValidationError(
            f"matrix JSON: re/im must each hold dim^2 = {dim * dim} entries"
        )
    a = (re + 1j * im).reshape(dim, dim)
    return _as_square(a, "matrix JSON")
