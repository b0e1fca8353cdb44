"""Anyon fusion systems: rules, dimensions, braiding, consistency checks.

A fusion system is a finite set of labels (index 0 = vacuum) with
non-negative integer multiplicities N_{ab}^c, optionally decorated with
F-matrices (recoupling), R-phases (exchange), and twists.  The systems
in scope are commutative and multiplicity-free; the two built-ins are

* ising:    sigma x sigma = 1 + psi,  sigma x psi = sigma,  psi x psi = 1
* fibonacci: f x f = 1 + f

F-matrices are stored sparsely: only blocks of dimension >= 2 and
1-dimensional blocks with a non-trivial sign need entries; every other
admissible block defaults to 1 (the gauge fixed here).  The stored data
is never trusted blindly -- `verify_pentagon` (and, for rank-2 systems,
`verify_hexagon`) recertify it.

`scheme_fusion_bridge` compares a scheme's Krein tensor against fusion
multiplicities up to label bijection and per-index positive rescaling,
which is the precise sense in which Krein parameters of small group
schemes "are" fusion rules.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import ValidationError
from .parameters import KreinTensor
from .spectral import BoseMesnerDecomposition

_UNITARITY_TOL = 1e-12
_DIM_CONSISTENCY_TOL = 1e-10
PENTAGON_THRESHOLD = 1e-10
HEXAGON_THRESHOLD = 1e-10
BRIDGE_THRESHOLD = 1e-6

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class FusionSystem:
    """Labels, fusion tensor, and optional F/R/twist data.

    F maps (a, b, c, e) -> the unitary block [F^{abc}_e]_{xy}; rows x and
    columns y run over the admissible intermediate labels in ascending
    index order.  R maps (a, b, c) -> the exchange phase R^{ab}_c.
    """

    labels: tuple[str, ...]
    N: np.ndarray
    dual: tuple[int, ...]
    dims: np.ndarray
    F: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    R: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    twist: tuple[complex, ...] | None = None

    def __post_init__(self):
        self.N.setflags(write=False)
        self.dims.setflags(write=False)

    @property
    def rank(self) -> int:
        return len(self.labels)

    def label_index(self, label) -> int:
        if isinstance(label, (int, np.integer)):
            if 0 <= int(label) < self.rank:
                return int(label)
            raise ValidationError(f"label index {label} out of range 0..{self.rank - 1}")
        if label in self.labels:
            return self.labels.index(label)
        raise ValidationError(f"unknown label {label!r}; labels are {self.labels}")


def _dims_from_tensor(n_tensor: np.ndarray, labels: tuple[str, ...]) -> np.ndarray:
    """Quantum dimensions: d_a = spectral radius of (N_a)_{bc} = N_{ab}^c."""
    rank = n_tensor.shape[0]
    dims = np.array(
        [float(np.max(np.abs(np.linalg.eigvals(n_tensor[a].astype(np.float64)))))
         for a in range(rank)]
    )
    products = np.einsum("abc,c->ab", n_tensor.astype(np.float64), dims)
    residual = float(np.max(np.abs(np.outer(dims, dims) - products)))
    if residual > _DIM_CONSISTENCY_TOL:
        # diagnose: a label not connected to the vacuum cannot carry a
        # consistent dimension
        reach = {0}
        frontier = [0]
        while frontier:
            b = frontier.pop()
            for a in range(rank):
                for c in range(rank):
                    if n_tensor[a, b, c] > 0 and c not in reach:
                        reach.add(c)
                        frontier.append(c)
        stranded = [labels[c] for c in range(rank) if c not in reach]
        if stranded:
            raise ValidationError(
                f"fusion tensor is reducible: label {stranded[0]!r} is not "
                f"connected to the vacuum"
            )
        raise ValidationError(
            f"no consistent quantum dimensions: d_a d_b = sum_c N_ab^c d_c "
            f"fails with residual {residual:.3e}"
        )
    return dims


def quantum_dimensions(fs: FusionSystem) -> np.ndarray:
    return _dims_from_tensor(fs.N, fs.labels)


def _tree_rows(n, a, b, c, e):
    return tuple(x for x in range(n.shape[0]) if n[a, b, x] and n[x, c, e])


def _tree_cols(n, a, b, c, e):
    return tuple(y for y in range(n.shape[0]) if n[b, c, y] and n[a, y, e])


def make_fusion_system(labels, n_tensor, f_data=None, r_data=None, twist=None) -> FusionSystem:
    """Validate and assemble a FusionSystem.

    Checks: vacuum unit law, commutativity, associativity, existence of
    duals, quantum-dimension consistency, unitarity of every F block,
    unit modulus of every R phase.
    """
    labels = tuple(str(x) for x in labels)
    if not labels or len(set(labels)) != len(labels):
        raise ValidationError("labels must be non-empty and distinct")
    rank = len(labels)
    n = np.asarray(n_tensor, dtype=np.int64)
    if n.shape != (rank, rank, rank):
        raise ValidationError(f"fusion tensor must be {rank}^3, got {n.shape}")
    if n.min() < 0:
        raise ValidationError("fusion multiplicities must be non-negative")

    eye = np.eye(rank, dtype=np.int64)
    if not np.array_equal(n[0], eye) or not np.array_equal(n[:, 0, :], eye):
        raise ValidationError("label 0 must be the fusion unit (N_0b^c = delta_bc)")
    if not np.array_equal(n, n.transpose(1, 0, 2)):
        raise ValidationError("fusion must be commutative (N_ab^c = N_ba^c)")
    left = np.einsum("abe,ecx->abcx", n, n)
    right = np.einsum("bcf,afx->abcx", n, n)
    if not np.array_equal(left, right):
        a, b, c, x = np.argwhere(left != right)[0]
        raise ValidationError(
            f"fusion is not associative at ({labels[a]} {labels[b]} {labels[c]} "
            f"-> {labels[x]})"
        )
    dual = []
    for a in range(rank):
        mates = np.nonzero(n[a, :, 0])[0]
        if mates.size != 1 or n[a, mates[0], 0] != 1:
            raise ValidationError(f"label {labels[a]!r} has no unique dual")
        dual.append(int(mates[0]))

    dims = _dims_from_tensor(n, labels)

    f_table = {}
    for key, mat in (f_data or {}).items():
        a, b, c, e = (int(v) for v in key)
        rows = _tree_rows(n, a, b, c, e)
        cols = _tree_cols(n, a, b, c, e)
        block = np.asarray(mat, dtype=np.complex128)
        if block.shape != (len(rows), len(cols)):
            raise ValidationError(
                f"F block {key} must have shape {(len(rows), len(cols))}, got {block.shape}"
            )
        if len(rows) != len(cols):
            raise ValidationError(f"F block {key} is not square; fusion data inconsistent")
        if np.max(np.abs(block.conj().T @ block - np.eye(len(rows)))) > _UNITARITY_TOL:
            raise ValidationError(f"F block {key} is not unitary")
        block.setflags(write=False)
        f_table[(a, b, c, e)] = block

    r_table = {}
    for key, phase in (r_data or {}).items():
        a, b, c = (int(v) for v in key)
        if not n[a, b, c]:
            raise ValidationError(f"R phase given for forbidden channel {key}")
        val = complex(phase)
        if abs(abs(val) - 1.0) > _UNITARITY_TOL:
            raise ValidationError(f"R phase {key} has modulus {abs(val)!r}, not 1")
        r_table[(a, b, c)] = val

    if twist is not None:
        twist = tuple(complex(t) for t in twist)
        if len(twist) != rank:
            raise ValidationError("twist must list one phase per label")

    return FusionSystem(
        labels=labels,
        N=n,
        dual=tuple(dual),
        dims=dims,
        F=MappingProxyType(f_table),
        R=MappingProxyType(r_table),
        twist=twist,
    )


def builtin_fusion_system(name: str) -> FusionSystem:
    """The two stock systems, with certified F/R data.

    Ising F data: the sigma-sigma-sigma block is (1/sqrt2)[[1,1],[1,-1]]
    (plus sign gauge) and the psi-sandwich blocks carry the forced -1;
    everything else is 1.  R_{sigma sigma} = e^{i pi/8} diag(1, i) over
    the (1, psi) channels, R_{psi psi} = -1; twists (1, e^{i pi/8}, -1).
    Fibonacci F/R constants are standard gauge choices certified by the
    pentagon/hexagon checks (see tests); twists are not stored.
    """
    if name == "ising":
        labels = ("1", "sigma", "psi")
        n = np.zeros((3, 3, 3), dtype=np.int64)
        n[0] = np.eye(3, dtype=np.int64)
        n[:, 0, :] = np.eye(3, dtype=np.int64)
        n[1, 1, 0] = n[1, 1, 2] = 1      # sigma x sigma = 1 + psi
        n[1, 2, 1] = n[2, 1, 1] = 1      # sigma x psi = sigma
        n[2, 2, 0] = 1                   # psi x psi = 1
        h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
        f_data = {
            (1, 1, 1, 1): h,
            (2, 1, 2, 1): np.array([[-1.0]]),
            (1, 2, 1, 2): np.array([[-1.0]]),
        }
        phase8 = np.exp(1j * np.pi / 8.0)
        r_data = {
            (1, 1, 0): phase8,
            (1, 1, 2): phase8 * 1j,
            (2, 2, 0): -1.0 + 0.0j,
        }
        return make_fusion_system(labels, n, f_data, r_data,
                                  twist=(1.0, phase8, -1.0))
    if name == "fibonacci":
        labels = ("1", "f")
        n = np.zeros((2, 2, 2), dtype=np.int64)
        n[0] = np.eye(2, dtype=np.int64)
        n[:, 0, :] = np.eye(2, dtype=np.int64)
        n[1, 1, 0] = n[1, 1, 1] = 1      # f x f = 1 + f
        inv = 1.0 / GOLDEN_RATIO
        f_data = {
            (1, 1, 1, 1): np.array([[inv, np.sqrt(inv)], [np.sqrt(inv), -inv]]),
        }
        r_data = {
            (1, 1, 0): np.exp(4j * np.pi / 5.0),
            (1, 1, 1): np.exp(-3j * np.pi / 5.0),
        }
        return make_fusion_system(labels, n, f_data, r_data)
    raise ValidationError(f"unknown fusion system {name!r}; built-ins: ising, fibonacci")


def cyclic_fusion_system(order: int) -> FusionSystem:
    """Group-like fusion ring of Z_n: a x b = a+b (mod n), all dims 1."""
    if order < 1:
        raise ValidationError("order must be >= 1")
    labels = tuple("1" if a == 0 else f"g{a}" for a in range(order))
    n = np.zeros((order, order, order), dtype=np.int64)
    for a in range(order):
        for b in range(order):
            n[a, b, (a + b) % order] = 1
    return make_fusion_system(labels, n)


def fuse(fs: FusionSystem, a, b) -> np.ndarray:
    """Multiplicity vector c -> N_{ab}^c."""
    return fs.N[fs.label_index(a), fs.label_index(b)].copy()


def _f_block(fs: FusionSystem, a, b, c, e):
    """(rows, cols, matrix) of [F^{abc}_e]; default identity when absent."""
    rows = _tree_rows(fs.N, a, b, c, e)
    cols = _tree_cols(fs.N, a, b, c, e)
    stored = fs.F.get((a, b, c, e))
    if stored is not None:
        return rows, cols, stored
    if len(rows) != len(cols):
        raise ValidationError(
            f"F block ({a},{b},{c};{e}) is {len(rows)}x{len(cols)}; fusion data inconsistent"
        )
    if len(rows) > 1:
        raise ValidationError(
            f"missing F data: block ({a},{b},{c};{e}) has dimension {len(rows)}"
        )
    return rows, cols, np.eye(len(rows), dtype=np.complex128)


def _f_entry(fs: FusionSystem, a, b, c, e, x, y) -> complex:
    """[F^{abc}_e]_{xy}; zero when either fusion tree is inadmissible."""
    n = fs.N
    if not (n[a, b, x] and n[x, c, e] and n[b, c, y] and n[a, y, e]):
        return 0.0
    rows, cols, mat = _f_block(fs, a, b, c, e)
    return complex(mat[rows.index(x), cols.index(y)])


def _r_phase(fs: FusionSystem, a, b, c) -> complex:
    if not fs.N[a, b, c]:
        raise ValidationError(f"channel {(a, b, c)} is forbidden; no exchange phase exists")
    stored = fs.R.get((a, b, c))
    if stored is not None:
        return stored
    if a == 0 or b == 0:
        return 1.0 + 0.0j   # exchanging with the vacuum is trivial
    raise ValidationError(f"missing R data for channel {(a, b, c)}")


@dataclass(frozen=True)
class BraidGenerators:
    label: str
    sigma1: np.ndarray
    sigma2: np.ndarray
    b_matrix: np.ndarray
    braid_residual: float

    def __post_init__(self):
        self.sigma1.setflags(write=False)
        self.sigma2.setflags(write=False)
        self.b_matrix.setflags(write=False)


def braid_generators(fs: FusionSystem, label=None) -> BraidGenerators:
    """Exchange generators on the three-identical-anyon fusion space.

    sigma1 = diag(R^{aa}_x) over the intermediate channels x, sigma2 =
    F sigma1 F^{-1} with F the recoupling block of (a,a,a)->a, and the
    non-adjacent exchange B = F R^2 F^{-1} is exposed alongside.  The
    braid relation sigma1 sigma2 sigma1 = sigma2 sigma1 sigma2 is
    evaluated up to a global phase and the residual reported.
    """
    if label is None:
        candidates = [
            a for a in range(1, fs.rank)
            if len([x for x in range(fs.rank) if fs.N[a, a, x] and fs.N[x, a, a]]) == 2
        ]
        if not candidates:
            raise ValidationError(
                "no label has a 2-dimensional three-anyon fusion space"
            )
        a = candidates[0]
    else:
        a = fs.label_index(label)
    channels = [x for x in range(fs.rank) if fs.N[a, a, x] and fs.N[x, a, a]]
    if not channels:
        raise ValidationError(f"label {fs.labels[a]!r} has an empty three-anyon space")

    sigma1 = np.diag([_r_phase(fs, a, a, x) for x in channels])
    rows, cols, f_mat = _f_block(fs, a, a, a, a)
    if list(rows) != channels:
        raise ValidationError("F block channels disagree with the R channels")
    f_inv = np.linalg.inv(f_mat)
    sigma2 = f_mat @ sigma1 @ f_inv
    b_matrix = f_mat @ sigma1 @ sigma1 @ f_inv

    for name, mat in (("sigma1", sigma1), ("sigma2", sigma2), ("B", b_matrix)):
        drift = float(np.max(np.abs(mat.conj().T @ mat - np.eye(len(channels)))))
        if drift > _UNITARITY_TOL:
            raise ValidationError(f"{name} is not unitary (residual {drift:.3e})")

    lhs = sigma1 @ sigma2 @ sigma1
    rhs = sigma2 @ sigma1 @ sigma2
    overlap = complex(np.sum(rhs.conj() * lhs))
    aligned = lhs * (overlap.conjugate() / abs(overlap)) if abs(overlap) > 0 else lhs
    residual = float(np.max(np.abs(aligned - rhs)))
    return BraidGenerators(
        label=fs.labels[a],
        sigma1=sigma1,
        sigma2=sigma2,
        b_matrix=b_matrix,
        braid_residual=residual,
    )


@dataclass(frozen=True)
class PentagonReport:
    max_residual: float
    identities_checked: int
    threshold: float = PENTAGON_THRESHOLD

    @property
    def passed(self) -> bool:
        return self.max_residual < self.threshold


def _require_small_multiplicity_free(fs: FusionSystem, what: str, max_rank: int):
    if fs.rank > max_rank:
        raise ValidationError(
            f"{what} check supports rank <= {max_rank} systems; got rank {fs.rank}"
        )
    if fs.N.max() > 1:
        raise ValidationError(f"{what} check supports multiplicity-free systems only")


def verify_pentagon(fs: FusionSystem) -> PentagonReport:
    """Evaluate the four-anyon recoupling consistency on all label sets.

    The identity checked, for external labels (a,b,c,d -> e) and
    left/right tree labels (x,y) / (w,v):

      F[xcd;e]_{yw} F[abw;e]_{xv} = sum_z F[abc;y]_{xz} F[azd;e]_{yv} F[bcd;v]_{zw}

    Missing F blocks of dimension >= 2 are reported before evaluation.
    """
    _require_small_multiplicity_free(fs, "pentagon", max_rank=3)
    rank = fs.rank
    missing = []
    for a, b, c, e in itertools.product(range(rank), repeat=4):
        rows = _tree_rows(fs.N, a, b, c, e)
        cols = _tree_cols(fs.N, a, b, c, e)
        if len(rows) != len(cols):
            raise ValidationError(
                f"block ({a},{b},{c};{e}) is {len(rows)}x{len(cols)}; data inconsistent"
            )
        if len(rows) > 1 and (a, b, c, e) not in fs.F:
            missing.append((a, b, c, e))
    if missing:
        raise ValidationError(f"incomplete F data; missing blocks: {missing}")

    n = fs.N
    worst = 0.0
    checked = 0
    for a, b, c, d, e in itertools.product(range(rank), repeat=5):
        for x in range(rank):
            for y, w, v in itertools.product(range(rank), repeat=3):
                # restrict to admissible outer trees; others are 0 = 0
                if not (n[a, b, x] and n[x, c, y] and n[y, d, e]):
                    continue
                if not (n[c, d, w] and n[b, w, v] and n[a, v, e]):
                    continue
                lhs = _f_entry(fs, x, c, d, e, y, w) * _f_entry(fs, a, b, w, e, x, v)
                rhs = sum(
                    _f_entry(fs, a, b, c, y, x, z)
                    * _f_entry(fs, a, z, d, e, y, v)
                    * _f_entry(fs, b, c, d, v, z, w)
                    for z in range(rank)
                )
                worst = max(worst, abs(lhs - rhs))
                checked += 1
    return PentagonReport(max_residual=worst, identities_checked=checked)


@dataclass(frozen=True)
class HexagonReport:
    max_residual: float
    max_residual_inverse: float
    identities_checked: int
    threshold: float = HEXAGON_THRESHOLD

    @property
    def passed(self) -> bool:
        return max(self.max_residual, self.max_residual_inverse) < self.threshold


def verify_hexagon(fs: FusionSystem) -> HexagonReport:
    """Braiding/recoupling compatibility, rank-2 multiplicity-free only.

    Checks, for both exchange orientations,

      R[ca;e] F[acb;d]_{eg} R[cb;g] = sum_f F[cab;d]_{ef} R[cf;d] F[abc;d]_{fg}

    (second orientation with every R conjugated).  Larger systems are
    refused rather than risking a convention-dependent wrong answer.
    """
    _require_small_multiplicity_free(fs, "hexagon", max_rank=2)
    n = fs.N
    rank = fs.rank
    residuals = [0.0, 0.0]
    checked = 0
    for conjugate in (False, True):
        def phase(i, j, k):
            val = _r_phase(fs, i, j, k)
            return val.conjugate() if conjugate else val

        worst = 0.0
        for a, b, c, d in itertools.product(range(rank), repeat=4):
            for e, g in itertools.product(range(rank), repeat=2):
                if not (n[c, a, e] and n[e, b, d] and n[c, b, g] and n[a, g, d]):
                    continue
                lhs = phase(c, a, e) * _f_entry(fs, a, c, b, d, e, g) * phase(c, b, g)
                rhs = sum(
                    _f_entry(fs, c, a, b, d, e, f_mid)
                    * phase(c, f_mid, d)
                    * _f_entry(fs, a, b, c, d, f_mid, g)
                    for f_mid in range(rank)
                    if n[a, b, f_mid] and n[c, f_mid, d]
                )
                worst = max(worst, abs(lhs - rhs))
                checked += 1
        residuals[int(conjugate)] = worst
    return HexagonReport(
        max_residual=residuals[0],
        max_residual_inverse=residuals[1],
        identities_checked=checked,
    )


@dataclass(frozen=True)
class BridgeReport:
    matched: bool
    bijection: tuple[int, ...]
    scalars: tuple[float, ...]
    deviation: float
    threshold: float = BRIDGE_THRESHOLD


def scheme_fusion_bridge(dec: BoseMesnerDecomposition, q: KreinTensor,
                         fs: FusionSystem) -> BridgeReport:
    """Match a Krein tensor against fusion multiplicities.

    For every label bijection fixing the vacuum, positive per-index
    scalars s (s_0 = 1) are fitted by least squares in log space so that
    q_{ij}^k s_i s_j / s_k approximates N over the matched labels; the
    best bijection, its scalars, and the max deviation from N are
    reported.  `matched` requires deviation below 1e-6.
    """
    if q.d != dec.d:
        raise ValidationError("Krein tensor and decomposition disagree on d")
    rank = dec.d + 1
    if fs.rank != rank:
        raise ValidationError(
            f"rank mismatch: scheme has {rank} idempotents, fusion system has {fs.rank} labels"
        )
    if rank > 9:
        raise ValidationError("bridge search enumerates bijections; rank capped at 9")

    q_arr = q.q
    n_arr = fs.N.astype(np.float64)
    best = None
    for perm_rest in itertools.permutations(range(1, rank)):
        perm = (0,) + perm_rest
        target = n_arr[np.ix_(perm, perm, perm)]

        rows = []
        rhs = []
        for (i, j, k), t_val in np.ndenumerate(target):
            q_val = q_arr[i, j, k]
            if t_val >= 0.5 and q_val > 1e-8:
                row = np.zeros(rank - 1)
                for idx, sign in ((i, 1.0), (j, 1.0), (k, -1.0)):
                    if idx > 0:
                        row[idx - 1] += sign
                rows.append(row)
                rhs.append(np.log(t_val) - np.log(q_val))
        if rows:
            x, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        else:
            x = np.zeros(rank - 1)
        log_s = np.concatenate(([0.0], x))
        scale = np.exp(log_s[:, None, None] + log_s[None, :, None] - log_s[None, None, :])
        deviation = float(np.max(np.abs(q_arr * scale - target)))
        if best is None or deviation < best[0]:
            best = (deviation, perm, tuple(np.exp(log_s)))

    deviation, perm, scalars = best
    return BridgeReport(
        matched=deviation < BRIDGE_THRESHOLD,
        bijection=perm,
        scalars=scalars,
        deviation=deviation,
    )
