"""Quantum Markov chain machinery.

Four independent pieces:

* Schur-multiplier channels M -> e o M, with complete positivity
  certified through the Choi matrix (CP holds iff the multiplier is
  positive semidefinite, and the Choi spectrum makes that visible: it is
  the multiplier's spectrum padded with zeros).
* Unitary dilation of a probability vector p: an orthogonal matrix whose
  first row is (sqrt(p_0), ..., sqrt(p_{d-1})).
* Entangled transition expectations E(X) = V' X V for the isometry
  V|e_i> = sum_j sqrt(P[i][j]) |e_i>|e_j> built from a row-stochastic P;
  unital and completely positive by construction (Stinespring form), with
  the equivalent entrywise closed form M o (sqrtP N sqrtP^T) exposed for
  cross-checking.  The classical chain sits on the diagonal:
  E(I (x) diag(v)) = diag(P v).
* The Szegedy walk unitary U = S(2 A A' - I) on the pair space of a
  stochastic matrix.

Stochasticity conventions: transition expectations take row-stochastic
matrices; `szegedy_walk` accepts either convention via a flag and works
column-stochastic internally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, ValidationError

_PSD_TOL = 1e-10
_STOCHASTIC_TOL = 1e-12
# Pair-space operators are dense (n^2 x n^2); refuse sizes that would
# silently eat gigabytes.
_SZEGEDY_MAX_VERTICES = 64


def _require_square(m: np.ndarray, what: str) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{what} must be a square matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class SchurChannel:
    """The map M -> multiplier o M (entrywise product)."""

    multiplier: np.ndarray

    def __post_init__(self):
        e = _require_square(self.multiplier, "multiplier").astype(np.complex128)
        if np.max(np.abs(e - e.conj().T)) > _PSD_TOL:
            raise ValidationError("multiplier must be Hermitian")
        e.setflags(write=False)
        object.__setattr__(self, "multiplier", e)

    @property
    def dim(self) -> int:
        return self.multiplier.shape[0]


@dataclass(frozen=True)
class CPReport:
    is_cp: bool
    choi_min_eigenvalue: float
    multiplier_min_eigenvalue: float
    multiplier_psd: bool
    verdicts_agree: bool
    tolerance: float


def schur_channel_apply(c: SchurChannel, m: np.ndarray) -> np.ndarray:
    a = np.asarray(m)
    if a.shape != c.multiplier.shape:
        raise ValidationError(
            f"matrix shape {a.shape} does not match channel dimension {c.multiplier.shape}"
        )
    return c.multiplier * a


def choi_matrix(c: SchurChannel) -> np.ndarray:
    """Choi matrix sum_ab E_ab (x) T(E_ab) of the Schur channel.

    T(E_ab) = e[a][b] E_ab, so the Choi matrix is the multiplier spread
    onto the (a*n+a, b*n+b) positions of the pair space.
    """
    n = c.dim
    choi = np.zeros((n * n, n * n), dtype=np.complex128)
    idx = np.arange(n) * (n + 1)
    choi[np.ix_(idx, idx)] = c.multiplier
    return choi


def certify_cp(c: SchurChannel, tolerance: float = _PSD_TOL) -> CPReport:
    """Certify complete positivity two ways and report both verdicts.

    The direct route eigendecomposes the Choi matrix; the criterion route
    checks the multiplier's own spectrum.  For Schur channels they must
    agree; the report says whether they do rather than assuming it.
    """
    choi_min = float(np.linalg.eigvalsh(choi_matrix(c)).min())
    mult_min = float(np.linalg.eigvalsh(c.multiplier).min())
    is_cp = choi_min >= -tolerance
    mult_psd = mult_min >= -tolerance
    return CPReport(
        is_cp=is_cp,
        choi_min_eigenvalue=choi_min,
        multiplier_min_eigenvalue=mult_min,
        multiplier_psd=mult_psd,
        verdicts_agree=is_cp == mult_psd,
        tolerance=tolerance,
    )


def dilation_unitary(p) -> np.ndarray:
    """Orthogonal matrix carrying the distribution p in its first row.

    U[0][j] = sqrt(p_j); U[i][0] = -sqrt(p_i); and for i, j >= 1
    U[i][j] = delta_ij - sqrt(p_i p_j) / (1 + sqrt(p_0)).  Orthogonality
    is exact algebra; the construction only takes square roots.
    """
    vec = np.asarray(p, dtype=np.float64)
    if vec.ndim != 1 or vec.size < 1:
        raise ValidationError("distribution must be a non-empty vector")
    if vec.min() < 0.0:
        raise ValidationError(f"distribution has a negative entry: {vec.min()!r}")
    if abs(vec.sum() - 1.0) > _STOCHASTIC_TOL:
        raise ValidationError(f"distribution sums to {vec.sum()!r}, not 1")
    root = np.sqrt(vec)
    d = vec.size
    u = np.eye(d)
    u[0, :] = root
    u[1:, 0] = -root[1:]
    u[1:, 1:] -= np.outer(root[1:], root[1:]) / (1.0 + root[0])
    return u


@dataclass(frozen=True)
class TransitionExpectation:
    """Stinespring data for the entangled transition expectation of P."""

    dim: int
    transition: np.ndarray
    isometry_V: np.ndarray

    def __post_init__(self):
        self.transition.setflags(write=False)
        self.isometry_V.setflags(write=False)


def make_transition_expectation(p) -> TransitionExpectation:
    """Build V with column i = sum_j sqrt(P[i][j]) e_i (x) e_j.

    V is (d^2) x d; V'V = diag(row sums of P) = I, certified at 1e-12.
    """
    mat = _require_square(np.asarray(p, dtype=np.float64), "transition matrix")
    if mat.min() < -_STOCHASTIC_TOL:
        raise ValidationError(f"transition matrix has a negative entry: {mat.min()!r}")
    mat = np.clip(mat, 0.0, None)
    rows = mat.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > _STOCHASTIC_TOL:
        raise ValidationError(
            f"transition matrix is not row-stochastic (row sums {rows})"
        )
    d = mat.shape[0]
    v = np.zeros((d * d, d))
    root = np.sqrt(mat)
    for i in range(d):
        v[i * d: (i + 1) * d, i] = root[i]
    residual = float(np.max(np.abs(v.T @ v - np.eye(d))))
    if residual > 1e-12:
        raise CertificationError(f"V'V = I fails with residual {residual:.3e}")
    return TransitionExpectation(dim=d, transition=mat, isometry_V=v)


def _check_sites(te: TransitionExpectation, m: np.ndarray, n: np.ndarray):
    if m.shape != (te.dim, te.dim) or n.shape != (te.dim, te.dim):
        raise ValidationError(
            f"site matrices must be {te.dim}x{te.dim}, got {m.shape} and {n.shape}"
        )


def apply_transition_expectation(te: TransitionExpectation, m, n) -> np.ndarray:
    """E(M (x) N) = V' (M (x) N) V (the Stinespring evaluation path)."""
    a = np.asarray(m)
    b = np.asarray(n)
    _check_sites(te, a, b)
    v = te.isometry_V
    return v.conj().T @ np.kron(a, b) @ v


def transition_expectation_closed_form(te: TransitionExpectation, m, n) -> np.ndarray:
    """Entrywise form M o (sqrtP N sqrtP^T), with sqrtP = entrywise root."""
    a = np.asarray(m)
    b = np.asarray(n)
    _check_sites(te, a, b)
    root = np.sqrt(te.transition)
    return a * (root @ b @ root.T)


def transition_expectation_dual(te: TransitionExpectation, rho: np.ndarray) -> np.ndarray:
    """One site-to-site step of the chain in the state picture.

    rho -> Tr_1(V rho V') = sum_i rho_ii |r_i><r_i| with |r_i> the
    entrywise root of row i of P.  Trace-preserving (each |r_i> is a unit
    vector) and embeds the classical chain on the diagonal.
    """
    root = np.sqrt(te.transition)
    return np.einsum("i,ij,ik->jk", np.diagonal(rho), root, root)


@dataclass(frozen=True)
class ChannelTrajectory:
    states: tuple[np.ndarray, ...]
    trace_factors: tuple[float, ...]


def _check_density(rho: np.ndarray, dim: int) -> np.ndarray:
    r = _require_square(rho, "density matrix").astype(np.complex128)
    if r.shape[0] != dim:
        raise ValidationError(f"density matrix must be {dim}x{dim}, got {r.shape}")
    if np.max(np.abs(r - r.conj().T)) > _PSD_TOL:
        raise ValidationError("density matrix must be Hermitian")
    if abs(complex(np.trace(r)).real - 1.0) > 1e-10:
        raise ValidationError(f"density matrix has trace {complex(np.trace(r)).real!r}, not 1")
    low = float(np.linalg.eigvalsh(r).min())
    if low < -_PSD_TOL:
        raise ValidationError(f"density matrix has eigenvalue {low:.3e} < 0")
    return r


def iterate_channel(channel, rho0, steps: int) -> ChannelTrajectory:
    """Run a quantum chain, renormalizing trace-decreasing channels.

    `channel` is a SchurChannel (state picture: rho -> e o rho, not
    generally trace-preserving, so each step's trace is divided out and
    reported) or a TransitionExpectation (its state-picture dual, which
    is trace-preserving; factors come out 1).  Complete positivity is a
    precondition and is certified before iterating.
    """
    if steps < 0:
        raise ValidationError("steps must be >= 0")
    if isinstance(channel, SchurChannel):
        if float(np.linalg.eigvalsh(channel.multiplier).min()) < -_PSD_TOL:
            raise CertificationError(
                "channel is not completely positive (multiplier has a negative eigenvalue)"
            )
        dim = channel.dim
        step = lambda rho: schur_channel_apply(channel, rho)  # noqa: E731
    elif isinstance(channel, TransitionExpectation):
        dim = channel.dim
        step = lambda rho: transition_expectation_dual(channel, rho)  # noqa: E731
    else:
        raise ValidationError(
            f"cannot iterate {type(channel).__name__}; "
            "expected SchurChannel or TransitionExpectation"
        )

    rho = _check_density(np.asarray(rho0), dim)
    states = [rho]
    factors = []
    for _ in range(steps):
        nxt = step(rho)
        tr = complex(np.trace(nxt)).real
        if tr < 1e-14:
            raise CertificationError(
                f"channel absorbed the state (trace {tr:.3e} after step {len(factors) + 1})"
            )
        rho = nxt / tr
        low = float(np.linalg.eigvalsh(rho).min())
        if low < -_PSD_TOL:
            raise CertificationError(
                f"state lost positivity at step {len(factors) + 1} (eigenvalue {low:.3e})"
            )
        states.append(rho)
        factors.append(tr)
    return ChannelTrajectory(states=tuple(states), trace_factors=tuple(factors))


@dataclass(frozen=True)
class WalkOperator:
    """Szegedy walk data on the pair space of a column-stochastic matrix."""

    dim_v: int
    column_stochastic: np.ndarray
    A_op: np.ndarray
    projector: np.ndarray
    swap: np.ndarray
    U: np.ndarray

    def __post_init__(self):
        for field in (self.column_stochastic, self.A_op, self.projector, self.swap, self.U):
            field.setflags(write=False)


def szegedy_walk(d_matrix, convention: str = "column") -> WalkOperator:
    """Quantize a stochastic matrix: A|v> = sum_w sqrt(D[w][v]) |v,w>,
    Pi = AA', S|v,w> = |w,v>, U = S(2 Pi - I).

    `convention` says how to read the input ("column": D[w][v] is the
    probability v -> w, columns sum to 1; "row": rows sum to 1 and the
    transpose is used).  Pair index (v, w) -> v*n + w.
    """
    mat = _require_square(np.asarray(d_matrix, dtype=np.float64), "stochastic matrix")
    if convention not in ("column", "row"):
        raise ValidationError(f"convention must be 'column' or 'row', got {convention!r}")
    if mat.min() < -_STOCHASTIC_TOL:
        raise ValidationError(f"stochastic matrix has a negative entry: {mat.min()!r}")
    mat = np.clip(mat, 0.0, None)
    col = mat if convention == "column" else mat.T
    sums = col.sum(axis=0)
    if np.max(np.abs(sums - 1.0)) > _STOCHASTIC_TOL:
        raise ValidationError(
            f"matrix is not {convention}-stochastic (mass per state: {sums})"
        )
    n = col.shape[0]
    if n > _SZEGEDY_MAX_VERTICES:
        raise ValidationError(
            f"walk on {n} vertices needs a {n * n}x{n * n} dense pair space; "
            f"capped at {_SZEGEDY_MAX_VERTICES} vertices"
        )

    a_op = np.zeros((n * n, n))
    root = np.sqrt(col)
    for v in range(n):
        a_op[v * n: (v + 1) * n, v] = root[:, v]
    projector = a_op @ a_op.T
    perm = np.arange(n * n).reshape(n, n).T.ravel()
    swap = np.eye(n * n)[perm]
    u = swap @ (2.0 * projector - np.eye(n * n))

    for residual, bound, label in (
        (float(np.max(np.abs(a_op.T @ a_op - np.eye(n)))), 1e-12, "A'A = I"),
        (float(np.max(np.abs(projector @ projector - projector))), 1e-12, "Pi^2 = Pi"),
        (float(np.max(np.abs(swap @ swap - np.eye(n * n)))), 0.0, "S^2 = I"),
        (float(np.max(np.abs(u.T @ u - np.eye(n * n)))), 1e-10, "U'U = I"),
    ):
        if residual > bound:
            raise CertificationError(f"{label} fails with residual {residual:.3e}")

    return WalkOperator(
        dim_v=n, column_stochastic=col, A_op=a_op, projector=projector, swap=swap, U=u
    )


def stationary_distribution(column_stochastic) -> np.ndarray:
    """Stationary law of a column-stochastic matrix via its unit eigenvector."""
    mat = _require_square(np.asarray(column_stochastic, dtype=np.float64), "stochastic matrix")
    vals, vecs = np.linalg.eig(mat)
    pick = int(np.argmin(np.abs(vals - 1.0)))
    v = vecs[:, pick]
    v = np.real_if_close(v / v.sum(), tol=1e6)
    pi = np.real(v)
    if np.min(pi) < -1e-9 or abs(pi.sum() - 1.0) > 1e-9:
        raise CertificationError("unit eigenvector is not a probability distribution")
    return np.clip(pi, 0.0, None)
