"""Seeded random states, observables and channels for fuzz tests and audits.

Everything takes an explicit ``numpy.random.Generator``: determinism is a
package-level guarantee, so no function here ever touches global RNG
state.
"""

from __future__ import annotations

import numpy as np

from .qcore import (
    DensityMatrix,
    HermitianOperator,
    PureState,
    QuantumChannel,
    ValidationError,
    hermitian_eig,
)
from .thermo import gibbs_state


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> HermitianOperator:
    g = _ginibre(rng, dim, dim)
    return HermitianOperator(0.5 * scale * (g + g.conj().T))


def spectral_span_bound(op) -> float:
    """Gershgorin upper bound on the eigenvalue spread of a Hermitian matrix.

    Cheap and never an underestimate, so capping beta * span_bound keeps
    every thermal population above float support in randomized sweeps.
    """
    m = np.asarray(op.matrix if isinstance(op, HermitianOperator) else op)
    radii = np.abs(m).sum(axis=1) - np.abs(np.diag(m))
    d = np.diag(m).real
    return float((d + radii).max() - (d - radii).min())


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> DensityMatrix:
    """Normalized Gram matrix of a Gaussian block; rank defaults to full."""
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise ValidationError(f"random_density: rank {rank} outside [1, {dim}]")
    g = _ginibre(rng, dim, rank)
    m = g @ g.conj().T
    # a Gram matrix is positive semidefinite by construction
    return DensityMatrix(m / m.trace().real, check_psd=False)


def random_pure(rng: np.random.Generator, dim: int) -> PureState:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(v / np.linalg.norm(v))


def random_channel(rng: np.random.Generator, dim: int, n_kraus: int = 3) -> QuantumChannel:
    """Random CPTP map: QR-orthonormalized Gaussian blocks as Kraus operators.

    The stacked (n_kraus*dim, dim) Gaussian matrix is reduced to an
    isometry W, and W's dim-sized blocks satisfy sum K^dag K = W^dag W = I
    exactly up to rounding.
    """
    if n_kraus < 1:
        raise ValidationError(f"random_channel: n_kraus must be >= 1, got {n_kraus}")
    g = _ginibre(rng, n_kraus * dim, dim)
    w, _ = np.linalg.qr(g)
    return QuantumChannel([w[k * dim:(k + 1) * dim] for k in range(n_kraus)])


def gibbs_preserving_channel(rng: np.random.Generator, hamiltonian, beta: float) -> QuantumChannel:
    """A random channel with the Gibbs state of (H, beta) as a fixed point.

    Convex mixture of three commuting building blocks: a unitary generated
    by H with random per-level phases, full replacement by the Gibbs state,
    and dephasing in the H eigenbasis.  Each fixes the Gibbs state, hence
    so does the mixture.
    """
    spec = gibbs_state(hamiltonian, beta)
    w, v = hermitian_eig(spec.hamiltonian)
    d = w.size

    weights = rng.dirichlet(np.ones(3))
    kraus = []

    # random phases per energy level: commutes with H
    phases = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=d))
    kraus.append(np.sqrt(weights[0]) * ((v * phases) @ v.conj().T))

    # full replacement: K_kj = sqrt(p_k) |e_k><e_j|, maps anything to Gibbs
    pops = np.maximum(np.diag(v.conj().T @ spec.state.matrix @ v).real, 0.0)
    for k in range(d):
        for j in range(d):
            kraus.append(
                np.sqrt(weights[1] * pops[k]) * np.outer(v[:, k], v[:, j].conj())
            )

    # dephasing onto the energy eigenprojectors
    for k in range(d):
        kraus.append(np.sqrt(weights[2]) * np.outer(v[:, k], v[:, k].conj()))

    return QuantumChannel(kraus)


def ground_damping_channel(dim: int, strength: float) -> QuantumChannel:
    """Decay of every excited basis level toward |0> with given strength.

    Not Gibbs-preserving for any finite temperature; used to exhibit
    negative irreversible-entropy differences in the audit.
    """
    if not 0.0 < strength <= 1.0:
        raise ValidationError(f"ground_damping_channel: strength {strength} outside (0, 1]")
    keep = np.eye(dim, dtype=np.complex128)
    for k in range(1, dim):
        keep[k, k] = np.sqrt(1.0 - strength)
    kraus = [keep]
    for k in range(1, dim):
        drop = np.zeros((dim, dim), dtype=np.complex128)
        drop[0, k] = np.sqrt(strength)
        kraus.append(drop)
    return QuantumChannel(kraus)
