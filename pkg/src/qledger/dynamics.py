"""Fixed-step trajectory generators: exact unitary evolution and RK4
integration of a Lindblad master equation.

Both evolvers emit a ``measures.Trajectory`` on a uniform grid, because the
downstream finite-difference measures require one.  The generator sign
convention is drho/dt = -i[H, rho] + D(rho) with

    D(rho) = sum_ij gamma_ij (L_i rho L_j^dag - 1/2 {L_j^dag L_i, rho})

where the rate matrix gamma is Hermitian and positive semidefinite; plain
uncorrelated jumps sit on its diagonal.

The unitary path never steps: with a constant H the propagator is built
once from the eigendecomposition and applied per grid point, so case
studies that reduce to closed evolution carry no integrator error at all.

The Lindblad path is classical RK4 with fixed dt.  Each stage applies the
generator as one dense (d^2, d^2) superoperator times the vectorized
state; at this package's dimensions that is far cheaper than four chains
of matrix products per step.  Trace and hermiticity are watched every
step, positivity every ``psd_check_every`` steps through the qcore
eigensolver.  A tolerance breach raises ``NumericError`` asking for a
finer grid; nothing is ever renormalized silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import Trajectory
from .qcore import (
    MAX_DIM,
    DensityMatrix,
    HermitianOperator,
    NumericError,
    PureState,
    ValidationError,
    _as_square,
    _jacobi,
    hermitian_eig,
)

TRACE_DRIFT_TOL = 1e-8
POSITIVITY_FLOOR = -1e-7


@dataclass(frozen=True)
class GridSpec:
    """A uniform grid 0, dt, ..., t_max with dt = t_max/steps."""

    t_max: float
    steps: int

    def __post_init__(self):
        if not (isinstance(self.t_max, (int, float)) and self.t_max > 0 and math.isfinite(self.t_max)):
            raise ValidationError(f"GridSpec: t_max must be positive and finite, got {self.t_max!r}")
        if not (isinstance(self.steps, int) and self.steps >= 2):
            # two steps minimum: the measures need three grid points
            raise ValidationError(f"GridSpec: steps must be an integer >= 2, got {self.steps!r}")

    @property
    def dt(self) -> float:
        return self.t_max / self.steps

    def times(self) -> np.ndarray:
        return np.linspace(0.0, float(self.t_max), self.steps + 1)


class LindbladSpec:
    """Hamiltonian, jump operators and their (possibly correlated) rates.

    ``jumps`` is a sequence of ``(operator, rate)`` with rate >= 0;
    ``cross_terms`` an optional sequence of ``(i, j, gamma_ij)`` filling the
    off-diagonal of the rate matrix (the conjugate entry is implied).  The
    assembled rate matrix must be positive semidefinite, otherwise the
    generator is not completely positive.
    """

    __slots__ = ("hamiltonian", "jumps", "rate_matrix")

    def __init__(self, hamiltonian, jumps, cross_terms=None) -> None:
        h = hamiltonian if isinstance(hamiltonian, HermitianOperator) else HermitianOperator(hamiltonian)
        d = h.dim
        ops = []
        rates = []
        for entry in jumps:
            try:
                op, rate = entry
            except (TypeError, ValueError):
                raise ValidationError("LindbladSpec: jumps must be (operator, rate) pairs") from None
            a = _as_square(op, "LindbladSpec jump")
            if a.shape[0] != d:
                raise ValidationError(
                    f"LindbladSpec: jump dim {a.shape[0]} does not match Hamiltonian dim {d}"
                )
            rate = float(rate)
            if not (rate >= 0.0 and math.isfinite(rate)):
                raise ValidationError(f"LindbladSpec: jump rate must be >= 0 and finite, got {rate}")
            a = a.copy()
            a.setflags(write=False)
            ops.append(a)
            rates.append(rate)

        m = len(ops)
        gamma = np.zeros((m, m), dtype=np.complex128)
        for i, rate in enumerate(rates):
            gamma[i, i] = rate
        for entry in cross_terms or ():
            try:
                i, j, g = entry
            except (TypeError, ValueError):
                raise ValidationError("LindbladSpec: cross_terms must be (i, j, rate) triples") from None
            i, j = int(i), int(j)
            if not (0 <= i < m and 0 <= j < m) or i == j:
                raise ValidationError(f"LindbladSpec: cross term indices ({i}, {j}) invalid for {m} jumps")
            g = complex(g)
            if not (math.isfinite(g.real) and math.isfinite(g.imag)):
                raise ValidationError("LindbladSpec: cross term rate must be finite")
            gamma[i, j] = g
            gamma[j, i] = g.conjugate()
        if m:
            wmin = float(_jacobi(gamma, want_vectors=False)[0][0])
            if wmin < -1e-10 * max(1.0, float(np.abs(gamma).max())):
                raise ValidationError(
                    f"LindbladSpec: rate matrix has eigenvalue {wmin:.3e}; must be positive semidefinite"
                )
        gamma.setflags(write=False)

        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jumps", tuple(ops))
        object.__setattr__(self, "rate_matrix", gamma)

    def __setattr__(self, *_):
        raise AttributeError("LindbladSpec is immutable")

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim


def _liouvillian(spec: LindbladSpec) -> np.ndarray:
    """Dense superoperator of the generator, acting on row-major vec(rho).

    vec(A X B) = (A kron B^T) vec(X) for row-major stacking, so the
    commutator contributes -i(H kron I - I kron H^T) and each dissipator
    term gamma_ij (L_i kron conj(L_j) - anticommutator halves).
    """
    h = spec.hamiltonian.matrix
    d = h.shape[0]
    eye = np.eye(d)
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    gamma = spec.rate_matrix
    for i, li in enumerate(spec.jumps):
        for j, lj in enumerate(spec.jumps):
            g = gamma[i, j]
            if g == 0.0:
                continue
            a = lj.conj().T @ li  # L_j^dag L_i
            sup += g * np.kron(li, lj.conj())
            sup -= 0.5 * g * (np.kron(a, eye) + np.kron(eye, a.T))
    return sup


def lindblad_evolve(spec: LindbladSpec, rho0, grid: GridSpec, beta: float,
                    psd_check_every: int = 10) -> Trajectory:
    """Integrate the master equation with classical RK4 on a fixed grid.

    Raises ``NumericError`` when the trace drifts beyond 1e-8 or an
    eigenvalue of the state falls below -1e-7; both mean dt is too coarse
    for this generator and the caller should increase ``steps``.
    """
    state = rho0 if isinstance(rho0, DensityMatrix) else DensityMatrix(rho0)
    if state.dim != spec.dim:
        raise ValidationError(f"lindblad_evolve: state dim {state.dim} does not match spec dim {spec.dim}")
    if not (isinstance(psd_check_every, int) and psd_check_every >= 1):
        raise ValidationError(f"lindblad_evolve: psd_check_every must be an integer >= 1")

    d = spec.dim
    dt = grid.dt
    n = grid.steps
    sup = _liouvillian(spec)

    out = np.empty((n + 1, d, d), dtype=np.complex128)
    out[0] = state.matrix
    v = state.matrix.ravel().astype(np.complex128)

    sixth = dt / 6.0
    half = dt / 2.0
    for k in range(n):
        k1 = sup @ v
        k2 = sup @ (v + half * k1)
        k3 = sup @ (v + half * k2)
        k4 = sup @ (v + dt * k3)
        v = v + sixth * (k1 + 2.0 * (k2 + k3) + k4)

        rho = v.reshape(d, d)
        # project out the anti-Hermitian rounding noise; the exact flow keeps
        # rho Hermitian, and the projection never touches the trace
        rho = 0.5 * (rho + rho.conj().T)
        tr = rho.trace().real
        if abs(tr - 1.0) > TRACE_DRIFT_TOL:
            raise NumericError(
                f"lindblad_evolve: trace drifted to {tr} at t={grid.times()[k + 1]:.6g}; "
                f"increase steps (dt={dt:.3e} too coarse)"
            )
        if k % psd_check_every == psd_check_every - 1 or k == n - 1:
            wmin = float(_jacobi(rho, want_vectors=False)[0][0])
            if wmin < POSITIVITY_FLOOR:
                raise NumericError(
                    f"lindblad_evolve: eigenvalue {wmin:.3e} below {POSITIVITY_FLOOR:.0e} "
                    f"at t={grid.times()[k + 1]:.6g}; increase steps (dt={dt:.3e} too coarse)"
                )
        out[k + 1] = rho
        v = rho.ravel()

    return Trajectory(grid.times(), out, spec.hamiltonian, beta)


def schrodinger_evolve(hamiltonian, psi0, grid: GridSpec, beta: float) -> Trajectory:
    """Closed evolution under a constant H, as pure-state projectors.

    The propagator is exact: psi(t_k) = V exp(-i w t_k) V^dag psi(0) from
    one eigendecomposition, so norm and <H> are conserved to rounding.
    """
    h = hamiltonian if isinstance(hamiltonian, HermitianOperator) else HermitianOperator(hamiltonian)
    psi = psi0 if isinstance(psi0, PureState) else PureState(psi0)
    if psi.dim != h.dim:
        raise ValidationError(f"schrodinger_evolve: state dim {psi.dim} does not match H dim {h.dim}")

    w, vecs = hermitian_eig(h)
    a0 = vecs.conj().T @ psi.amplitudes
    times = grid.times()
    phases = np.exp(-1j * np.outer(times, w))
    amps = (phases * a0) @ vecs.T  # amps[k] = V (e^{-i w t_k} . a0)
    states = amps[:, :, None] * amps.conj()[:, None, :]
    return Trajectory(times, states, h, beta)
