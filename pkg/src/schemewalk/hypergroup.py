"""The commutative hypergroup induced on normalized idempotents.

The normalized idempotents e_j = E_j / m_j of a commutative scheme close
under the entrywise product:

    e_i o e_j = sum_k (e_i * e_j)(k) e_k,
    (e_i * e_j)(k) = (m_k / (m_i m_j)) q_{ij}^k,

and each weight vector (e_i * e_j)(.) is a probability distribution over
the indices {0..d} -- nonnegativity is the Krein condition and the total
mass 1 follows from the trace identity sum_k m_k q_{ij}^k = m_i m_j.
(The raw weights are used as-is; dividing additionally by the vertex
count, as is sometimes seen, would give every slice total mass 1/n.)

Convolving with a fixed index (or a convex combination of indices) turns
the hypergroup into a classical Markov chain on {0..d}; its stationary
law is the Plancherel distribution k -> m_k / n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, ValidationError
from .parameters import KreinTensor
from .spectral import BoseMesnerDecomposition

# Float-noise negatives are clamped to zero; anything below the hard
# floor is a genuine Krein violation and is rejected.
_CLAMP_FLOOR = -1e-8
_SLICE_SUM_TOL = 1e-8
_DIST_TOL = 1e-10


@dataclass(frozen=True)
class Hypergroup:
    """Convolution tensor on indices {0..d} plus the idempotent data."""

    size: int
    convolution: np.ndarray
    multiplicities: tuple[int, ...]
    normalized_idempotents: tuple[np.ndarray, ...]

    def __post_init__(self):
        self.convolution.setflags(write=False)
        for e in self.normalized_idempotents:
            e.setflags(write=False)

    def plancherel(self) -> np.ndarray:
        m = np.array(self.multiplicities, dtype=np.float64)
        return m / m.sum()


def hypergroup_from(dec: BoseMesnerDecomposition, q: KreinTensor) -> Hypergroup:
    """Build the hypergroup of a decomposition and its Krein tensor.

    Raises CertificationError when a weight falls below the clamping
    floor or a slice's total mass strays from 1 by more than 1e-8.
    """
    if q.d != dec.d:
        raise ValidationError(
            f"Krein tensor has d={q.d} but decomposition has d={dec.d}"
        )
    d = dec.d
    m = np.array(dec.multiplicities, dtype=np.float64)
    conv = q.q * m[np.newaxis, np.newaxis, :] / np.outer(m, m)[:, :, np.newaxis]

    low = float(conv.min())
    if low < _CLAMP_FLOOR:
        i, j, k = np.unravel_index(int(np.argmin(conv)), conv.shape)
        raise CertificationError(
            f"convolution weight ({i},{j},{k}) = {low:.3e} below the floor {_CLAMP_FLOOR}"
        )
    conv = np.where(conv < 0.0, 0.0, conv)

    sums = conv.sum(axis=2)
    drift = float(np.max(np.abs(sums - 1.0)))
    if drift > _SLICE_SUM_TOL:
        i, j = np.unravel_index(int(np.argmax(np.abs(sums - 1.0))), sums.shape)
        raise CertificationError(
            f"convolution slice ({i},{j}) has total mass {sums[i, j]!r}, off by {drift:.3e}"
        )

    # index 0 is the identity: verify, then store it exactly
    delta = np.eye(d + 1)
    if np.max(np.abs(conv[0] - delta)) > _SLICE_SUM_TOL:
        raise CertificationError("index 0 does not act as the hypergroup identity")
    conv[0] = delta
    conv[:, 0, :] = delta

    normalized = tuple(e / mult for e, mult in zip(dec.idempotents, dec.multiplicities))
    return Hypergroup(
        size=d + 1,
        convolution=conv,
        multiplicities=dec.multiplicities,
        normalized_idempotents=normalized,
    )


def _as_distribution(vec, size: int, what: str) -> np.ndarray:
    v = np.asarray(vec, dtype=np.float64)
    if v.shape != (size,):
        raise ValidationError(f"{what} must have length {size}, got shape {v.shape}")
    if v.min() < -_DIST_TOL:
        raise ValidationError(f"{what} has a negative entry: {v.min()!r}")
    if abs(v.sum() - 1.0) > _DIST_TOL:
        raise ValidationError(f"{what} sums to {v.sum()!r}, not 1")
    return np.clip(v, 0.0, None)


def _coin_measure(h: Hypergroup, coin) -> np.ndarray:
    if isinstance(coin, (int, np.integer)):
        if not 0 <= int(coin) < h.size:
            raise ValidationError(f"coin index {coin} out of range 0..{h.size - 1}")
        measure = np.zeros(h.size)
        measure[int(coin)] = 1.0
        return measure
    return _as_distribution(coin, h.size, "coin weights")


def convolve(h: Hypergroup, mu, nu) -> np.ndarray:
    """Bilinear extension (mu * nu)(k) = sum_ij mu(i) nu(j) conv[i][j][k]."""
    a = _as_distribution(mu, h.size, "left measure")
    b = _as_distribution(nu, h.size, "right measure")
    return np.einsum("i,j,ijk->k", a, b, h.convolution)


def classical_chain(h: Hypergroup, coin) -> np.ndarray:
    """Column-stochastic transition matrix of convolution with the coin.

    T[k][j] = probability of moving j -> k, so distributions evolve as
    column vectors under T @ v.
    """
    c = _coin_measure(h, coin)
    # T[k][j] = sum_i c_i conv[i][j][k]
    return np.einsum("i,ijk->kj", c, h.convolution)


def walk(h: Hypergroup, coin, start, steps: int) -> list[np.ndarray]:
    """Iterate the coin chain from `start`; returns steps+1 distributions."""
    if steps < 0:
        raise ValidationError("steps must be >= 0")
    t = classical_chain(h, coin)
    current = _as_distribution(start, h.size, "start distribution")
    history = [current]
    for _ in range(steps):
        current = t @ current
        history.append(current)
    return history
