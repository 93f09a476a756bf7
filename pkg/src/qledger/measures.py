"""Trajectory-level resource measures for charging processes.

Given a state trajectory rho(t) on a uniform time grid, held at inverse
temperature beta, this module evaluates the running extractable work, the
irreversible entropy anchored at t = 0, the backflow rate and the charging
power together with its split into a coherent and an incoherent part:

    S_ir(t) = S(rho_0||pi_0) - S(rho_t||pi_t)        (so S_ir(0) = 0)
    I(t)    = -dS_ir/dt
    P(t)    = I(t)/beta
    C_r(t)  = S(drho_t) - S(rho_t)
    P_c(t)  = (dC_r/dt)/beta
    P_i(t)  = dE/dt - (dS(drho)/dt - dlnZ/dt)/beta

where drho is the state with its energy-basis off-diagonals removed and
pi_t the Gibbs state of the instantaneous Hamiltonian.  Entropies are in
nats, energies in the Hamiltonian's units, hbar = k_B = 1.

Derivatives are second-order central differences with second-order
one-sided stencils at the endpoints (``np.gradient`` with edge_order=2),
matching the order of the integrators that produce the trajectories.
Relative entropy against a Gibbs state is evaluated in closed form,
S(rho||pi) = beta E + ln Z - S(rho), which is exact because pi has full
rank for any finite beta.  All series share the trajectory grid.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .qcore import (
    HERMITICITY_TOL,
    MAX_DIM,
    TRACE_TOL,
    DensityMatrix,
    HermitianOperator,
    ValidationError,
    _as_square,
    _jacobi,
    hermitian_eig,
    hermitian_eigvals,
)
from .thermo import _entropy_from_probs, _gibbs_probs


def dephase(rho, hamiltonian) -> DensityMatrix:
    """Remove energy-basis coherences: zero the off-diagonals of rho in the
    eigenbasis of H.

    Inside a degenerate level the basis is whatever the eigensolver
    returns; for a diagonal H that is the computational basis, which is
    the convention the case studies rely on.  Idempotent, since the solver
    is deterministic.
    """
    a = _as_square(rho, "dephase rho")
    h = _as_square(hamiltonian, "dephase hamiltonian")
    if a.shape != h.shape:
        raise ValidationError(f"dephase: state dim {a.shape[0]} does not match H dim {h.shape[0]}")
    _, v = hermitian_eig(h)
    pops = np.einsum("an,ab,bn->n", v.conj(), a, v).real
    m = (v * pops) @ v.conj().T
    return DensityMatrix(0.5 * (m + m.conj().T), check_psd=False)


def coherence(rho, hamiltonian) -> float:
    """Relative entropy of coherence, S(dephased rho) - S(rho), in nats.

    Nonnegative up to rounding: dephasing is doubly stochastic on the
    spectrum, so it can only raise the entropy.
    """
    a = _as_square(rho, "coherence rho")
    h = _as_square(hamiltonian, "coherence hamiltonian")
    if a.shape != h.shape:
        raise ValidationError(f"coherence: state dim {a.shape[0]} does not match H dim {h.shape[0]}")
    _, v = hermitian_eig(h)
    pops = np.clip(np.einsum("an,ab,bn->n", v.conj(), a, v).real, 0.0, None)
    w = np.clip(hermitian_eigvals(a), 0.0, None)
    return _entropy_from_probs(pops) - _entropy_from_probs(w)


class Trajectory:
    """An evolving state on a uniform time grid, with its Hamiltonian(s).

    ``states`` is a read-only (T, d, d) complex stack.  Hermiticity and
    unit trace are validated here; positivity is the producing
    integrator's job (its monitor has already walked every step, and an
    eigendecomposition per grid point would double the cost of a run).

    ``hamiltonians`` is a single (d, d) Hermitian matrix when the drive is
    constant, or a (T, d, d) stack otherwise.
    """

    __slots__ = ("times", "states", "hamiltonians", "beta", "dt")

    def __init__(self, times, states, hamiltonians, beta: float) -> None:
        t = np.asarray(times, dtype=np.float64)
        if t.ndim != 1 or t.size < 3:
            raise ValidationError("Trajectory: need a 1-d grid with at least 3 points")
        if not np.all(np.isfinite(t)):
            raise ValidationError("Trajectory: grid times must be finite")
        dt = float(t[1] - t[0])
        steps = np.diff(t)
        if not dt > 0.0 or steps.min() <= 0.0:
            raise ValidationError("Trajectory: grid must be strictly increasing")
        if np.abs(steps - dt).max() > 1e-9 * max(dt, 1.0):
            raise ValidationError("Trajectory: grid must be uniform")

        if isinstance(states, np.ndarray) and states.ndim == 3:
            s = np.asarray(states, dtype=np.complex128)
        else:
            s = np.stack([np.asarray(getattr(x, "matrix", x), dtype=np.complex128) for x in states])
        if s.ndim != 3 or s.shape[0] != t.size or s.shape[1] != s.shape[2]:
            raise ValidationError(
                f"Trajectory: states must be one square matrix per grid point, got shape {s.shape}"
            )
        d = s.shape[1]
        if not (1 <= d <= MAX_DIM):
            raise ValidationError(f"Trajectory: dimension {d} outside [1, {MAX_DIM}]")
        if not np.all(np.isfinite(s)):
            raise ValidationError("Trajectory: state entries must be finite")
        herm = np.abs(s - s.conj().transpose(0, 2, 1)).max()
        if herm > HERMITICITY_TOL:
            raise ValidationError(
                f"Trajectory: worst state hermiticity defect {herm:.3e} exceeds {HERMITICITY_TOL:.0e}"
            )
        trdev = np.abs(np.einsum("tii->t", s) - 1.0).max()
        if trdev > TRACE_TOL:
            raise ValidationError(
                f"Trajectory: worst state trace deviation {trdev:.3e} exceeds {TRACE_TOL:.0e}"
            )

        if isinstance(hamiltonians, (list, tuple)):
            h = np.stack([np.asarray(getattr(x, "matrix", x), dtype=np.complex128) for x in hamiltonians])
        else:
            h = np.asarray(getattr(hamiltonians, "matrix", hamiltonians), dtype=np.complex128)
        if h.ndim == 3 and h.shape[0] == 1:
            h = h[0]
        if h.ndim == 2:
            if h.shape != (d, d):
                raise ValidationError(f"Trajectory: Hamiltonian shape {h.shape} does not match states")
            hdef = np.abs(h - h.conj().T).max()
        elif h.ndim == 3:
            if h.shape != s.shape:
                raise ValidationError(
                    f"Trajectory: Hamiltonian stack shape {h.shape} does not match states {s.shape}"
                )
            hdef = np.abs(h - h.conj().transpose(0, 2, 1)).max()
        else:
            raise ValidationError("Trajectory: hamiltonians must be one matrix or one per grid point")
        if not np.all(np.isfinite(h)):
            raise ValidationError("Trajectory: Hamiltonian entries must be finite")
        if hdef > HERMITICITY_TOL:
            raise ValidationError(
                f"Trajectory: Hamiltonian hermiticity defect {hdef:.3e} exceeds {HERMITICITY_TOL:.0e}"
            )

        if not (isinstance(beta, (int, float)) and beta > 0 and np.isfinite(beta)):
            raise ValidationError(f"Trajectory: beta must be positive and finite, got {beta!r}")

        for arr in (t, s, h):
            arr.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "hamiltonians", h)
        object.__setattr__(self, "beta", float(beta))
        object.__setattr__(self, "dt", dt)

    def __setattr__(self, *_):
        raise AttributeError("Trajectory is immutable")

    def __len__(self) -> int:
        return self.times.size

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def constant_hamiltonian(self) -> bool:
        return self.hamiltonians.ndim == 2

    def state(self, k: int) -> DensityMatrix:
        """State at grid point k; positivity per the integrator's monitor."""
        return DensityMatrix(self.states[k], check_psd=False)

    def hamiltonian(self, k: int = 0) -> HermitianOperator:
        h = self.hamiltonians if self.constant_hamiltonian else self.hamiltonians[k]
        return HermitianOperator(h)

    def __repr__(self) -> str:
        return f"Trajectory(points={len(self)}, dim={self.dim}, dt={self.dt:g}, beta={self.beta:g})"


@dataclass(frozen=True, eq=False)
class MeasureSeries:
    """All per-step measures of one trajectory, one array per column.

    Attribute -> CSV column: times=t, energy=E, entropy=S, coherence=C_r,
    irr_entropy=S_ir, backflow=I, power=P, coherent_power=P_c,
    incoherent_power=P_i, extractable_work=W_f.
    """

    times: np.ndarray
    energy: np.ndarray
    entropy: np.ndarray
    coherence: np.ndarray
    irr_entropy: np.ndarray
    backflow: np.ndarray
    power: np.ndarray
    coherent_power: np.ndarray
    incoherent_power: np.ndarray
    extractable_work: np.ndarray

    def __post_init__(self):
        n = None
        for f in fields(self):
            a = np.asarray(getattr(self, f.name), dtype=np.float64)
            if a.ndim != 1:
                raise ValidationError(f"MeasureSeries: {f.name} must be 1-d")
            if n is None:
                n = a.size
            elif a.size != n:
                raise ValidationError("MeasureSeries: all columns must share one length")
            a.setflags(write=False)
            object.__setattr__(self, f.name, a)

    def __len__(self) -> int:
        return self.times.size


CSV_HEADER = "t,E,S,C_r,S_ir,I,P,P_c,P_i,W_f"

_CSV_FIELDS = (
    "times",
    "energy",
    "entropy",
    "coherence",
    "irr_entropy",
    "backflow",
    "power",
    "coherent_power",
    "incoherent_power",
    "extractable_work",
)


def format_csv(series: MeasureSeries, comments=()) -> str:
    """Render a series as CSV text, 12 significant digits per value.

    ``comments`` lines are emitted first, each prefixed with ``# ``; the
    parser skips them, so they are free-form (the CLI echoes its effective
    configuration here).
    """
    lines = [f"# {c}" for c in comments]
    lines.append(CSV_HEADER)
    cols = [getattr(series, f) for f in _CSV_FIELDS]
    for row in zip(*cols):
        # x + 0.0 folds negative zero into plain 0
        lines.append(",".join(format(x + 0.0, ".12g") for x in row))
    lines.append("")
    return "\n".join(lines)


def write_csv(series: MeasureSeries, path, comments=()) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_csv(series, comments))


def read_csv(source) -> MeasureSeries:
    """Parse CSV produced by ``format_csv``; strict about the header row."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r") as fh:
            text = fh.read()
    header_seen = False
    rows = []
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != CSV_HEADER:
                raise ValidationError(f"CSV line {ln}: expected header {CSV_HEADER!r}, got {line!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != len(_CSV_FIELDS):
            raise ValidationError(f"CSV line {ln}: expected {len(_CSV_FIELDS)} columns, got {len(parts)}")
        try:
            rows.append([float(x) for x in parts])
        except ValueError as exc:
            raise ValidationError(f"CSV line {ln}: {exc}") from exc
    if not header_seen:
        raise ValidationError("CSV: header row missing")
    data = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(_CSV_FIELDS))
    return MeasureSeries(**{f: data[:, i] for i, f in enumerate(_CSV_FIELDS)})


# ---------------------------------------------------------------------------
# per-step tables and the series operations

def _tables(tr: Trajectory):
    """Energy, entropy, dephased entropy and ln Z columns of a trajectory."""
    s = tr.states
    T = s.shape[0]
    beta = tr.beta

    s_rho = np.empty(T)
    for k in range(T):
        w = _jacobi(s[k], want_vectors=False)[0]
        s_rho[k] = _entropy_from_probs(np.clip(w, 0.0, None))

    if tr.constant_hamiltonian:
        h = tr.hamiltonians
        w, v = hermitian_eig(h)
        _, log_z0 = _gibbs_probs(w, beta)
        log_z = np.full(T, log_z0)
        energy = np.einsum("tij,ji->t", s, h).real
        diag = np.einsum("an,tab,bn->tn", v.conj(), s, v).real
    else:
        energy = np.einsum("tij,tji->t", s, tr.hamiltonians).real
        log_z = np.empty(T)
        diag = np.empty((T, tr.dim))
        for k in range(T):
            w, v = _jacobi(tr.hamiltonians[k])
            log_z[k] = _gibbs_probs(w, beta)[1]
            diag[k] = np.einsum("an,ab,bn->n", v.conj(), s[k], v).real

    q = np.clip(diag, 0.0, None)
    s_deph = -(q * np.log(np.where(q > 0.0, q, 1.0))).sum(axis=1)
    return energy, s_rho, s_deph, log_z


def _ddt(y: np.ndarray, dt: float) -> np.ndarray:
    # the one finite-difference stencil of the package: second-order central,
    # second-order one-sided at the ends
    return np.gradient(y, dt, edge_order=2)


def irreversible_entropy_series(tr: Trajectory) -> np.ndarray:
    """S_ir(t_k) = S(rho_0||pi_0) - S(rho_k||pi_k); zero at the first point.

    The Gibbs reference has full rank, so the relative entropies are always
    finite and the closed form beta E + ln Z - S(rho) applies.
    """
    energy, s_rho, _, log_z = _tables(tr)
    relent = tr.beta * energy + log_z - s_rho
    return relent[0] - relent


def non_markovianity_series(tr: Trajectory) -> np.ndarray:
    """Backflow rate I(t) = -dS_ir/dt; positive stretches mark memory effects."""
    return -_ddt(irreversible_entropy_series(tr), tr.dt)


def charging_power_series(tr: Trajectory) -> np.ndarray:
    """P(t) = I(t)/beta, the rate of change of extractable work."""
    return non_markovianity_series(tr) / tr.beta


def coherent_power_series(tr: Trajectory) -> np.ndarray:
    """P_c(t) = (dC_r/dt)/beta, the coherent share of the charging power."""
    _, s_rho, s_deph, _ = _tables(tr)
    return _ddt(s_deph - s_rho, tr.dt) / tr.beta


def incoherent_power_series(tr: Trajectory) -> np.ndarray:
    """P_i(t) = dE/dt - (dS(drho)/dt - dlnZ/dt)/beta.

    With a constant Hamiltonian the partition-function term is identically
    zero and is skipped, not differentiated numerically.
    """
    energy, _, s_deph, log_z = _tables(tr)
    de = _ddt(energy, tr.dt)
    if tr.constant_hamiltonian:
        return de - _ddt(s_deph, tr.dt) / tr.beta
    return de - (_ddt(s_deph, tr.dt) - _ddt(log_z, tr.dt)) / tr.beta


def measure_series(tr: Trajectory) -> MeasureSeries:
    """All measures of one trajectory in a single pass over the grid."""
    energy, s_rho, s_deph, log_z = _tables(tr)
    beta = tr.beta
    dt = tr.dt

    relent = beta * energy + log_z - s_rho
    s_ir = relent[0] - relent
    coh = s_deph - s_rho
    backflow = -_ddt(s_ir, dt)
    de = _ddt(energy, dt)
    if tr.constant_hamiltonian:
        p_i = de - _ddt(s_deph, dt) / beta
    else:
        p_i = de - (_ddt(s_deph, dt) - _ddt(log_z, dt)) / beta

    return MeasureSeries(
        times=tr.times.copy(),
        energy=energy,
        entropy=s_rho,
        coherence=coh,
        irr_entropy=s_ir,
        backflow=backflow,
        power=backflow / beta,
        coherent_power=_ddt(coh, dt) / beta,
        incoherent_power=p_i,
        extractable_work=relent / beta,
    )
