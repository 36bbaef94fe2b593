"""Dense state vectors, density matrices, operators and projective measurements
over a labeled tensor-product Hilbert space.

Index convention: subsystems are ordered as in the layout, the first one being
the most significant digit of the flat index (row-major, same as ``np.kron``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

ATOL = 1e-12
PSD_ATOL = 1e-10
OTHER = "other"


class LayoutError(ValueError):
    """Subsystem names or dimensions do not line up."""


class InvariantViolation(RuntimeError):
    """A physical invariant that valid inputs can never break was broken."""


@dataclass(frozen=True)
class Subsystem:
    name: str
    dim: int
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.dim < 1:
            raise LayoutError(f"subsystem {self.name!r} has non-positive dimension {self.dim}")
        if len(self.labels) != self.dim:
            raise LayoutError(
                f"subsystem {self.name!r}: {len(self.labels)} labels for dimension {self.dim}"
            )
        if len(set(self.labels)) != self.dim:
            raise LayoutError(f"subsystem {self.name!r} has repeated basis labels")

    @classmethod
    def qubit(cls, name: str) -> "Subsystem":
        return cls(name, 2, ("0", "1"))


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered tuple of named subsystems."""

    subsystems: tuple[Subsystem, ...]

    def __post_init__(self):
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        names = [s.name for s in self.subsystems]
        if len(set(names)) != len(names):
            raise LayoutError(f"duplicate subsystem names in {names}")

    @classmethod
    def of(cls, *subsystems: Subsystem) -> "SubsystemLayout":
        return cls(tuple(subsystems))

    @classmethod
    def qubits(cls, names: Iterable[str]) -> "SubsystemLayout":
        return cls(tuple(Subsystem.qubit(n) for n in names))

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.subsystems)

    @cached_property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subsystems)

    @cached_property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    @cached_property
    def _plans(self) -> dict:
        return {}

    def plan(self, acts_on: tuple[str, ...]) -> tuple[tuple[int, ...], tuple[int, ...], int]:
        """(axis permutation bringing ``acts_on`` to the front, its inverse, local dim)."""
        try:
            return self._plans[acts_on]
        except KeyError:
            pos = self.positions(acts_on)
            perm = tuple(pos) + tuple(p for p in range(len(self)) if p not in pos)
            inv = tuple(int(i) for i in np.argsort(perm))
            k = int(np.prod([self.dims[p] for p in pos], dtype=np.int64))
            self._plans[acts_on] = plan = (perm, inv, k)
            return plan

    def __len__(self) -> int:
        return len(self.subsystems)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def __add__(self, other: "SubsystemLayout") -> "SubsystemLayout":
        clash = set(self.names) & set(other.names)
        if clash:
            raise LayoutError(f"subsystem name collision: {sorted(clash)}")
        return SubsystemLayout(self.subsystems + other.subsystems)

    def position(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise LayoutError(f"no subsystem named {name!r} in {self.names}") from None

    def positions(self, names: Sequence[str]) -> list[int]:
        if len(set(names)) != len(names):
            raise LayoutError(f"repeated names in {list(names)}")
        return [self.position(n) for n in names]

    def subset(self, names: Sequence[str]) -> "SubsystemLayout":
        """Sub-layout with the given names, in the order given."""
        return SubsystemLayout(tuple(self.subsystems[p] for p in self.positions(names)))

    def without(self, names: Iterable[str]) -> "SubsystemLayout":
        drop = set(names)
        return SubsystemLayout(tuple(s for s in self.subsystems if s.name not in drop))

    def index(self, labels: Mapping[str, str] | Sequence[str]) -> int:
        """Flat index of a product basis state, given one label per subsystem."""
        if isinstance(labels, Mapping):
            if set(labels) != set(self.names):
                raise LayoutError(f"need labels for exactly {self.names}, got {sorted(labels)}")
            labels = [labels[n] for n in self.names]
        if len(labels) != len(self):
            raise LayoutError(f"need {len(self)} labels, got {len(labels)}")
        digits = []
        for sub, lab in zip(self.subsystems, labels):
            try:
                digits.append(sub.labels.index(lab))
            except ValueError:
                raise LayoutError(f"{lab!r} is not a basis label of {sub.name!r}") from None
        return int(np.ravel_multi_index(digits, self.dims)) if digits else 0

    def labels_of(self, index: int) -> tuple[str, ...]:
        digits = np.unravel_index(index, self.dims)
        return tuple(s.labels[d] for s, d in zip(self.subsystems, digits))


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains NaN or Inf")


@dataclass(frozen=True, eq=False)
class StateVector:
    layout: SubsystemLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != self.layout.dim:
            raise LayoutError(
                f"{amps.shape[0]} amplitudes for a layout of dimension {self.layout.dim}"
            )
        _check_finite(amps, "state vector")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, layout: SubsystemLayout, labels: Mapping[str, str] | Sequence[str]) -> "StateVector":
        amps = np.zeros(layout.dim, dtype=np.complex128)
        amps[layout.index(labels)] = 1.0
        return cls(layout, amps)

    @classmethod
    def from_terms(
        cls, layout: SubsystemLayout, terms: Iterable[tuple[complex, Sequence[str]]]
    ) -> "StateVector":
        """Build sum_k c_k |labels_k>; not normalized."""
        amps = np.zeros(layout.dim, dtype=np.complex128)
        for coeff, labels in terms:
            amps[layout.index(labels)] += coeff
        return cls(layout, amps)

    @property
    def norm(self) -> float:
        return math.sqrt(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.layout, self.amplitudes / n)

    def amplitude(self, labels: Mapping[str, str] | Sequence[str]) -> complex:
        return complex(self.amplitudes[self.layout.index(labels)])

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))

    def support(self, atol: float = ATOL) -> dict[tuple[str, ...], complex]:
        """Nonzero amplitudes keyed by basis labels; handy for debugging and tests."""
        idx = np.flatnonzero(np.abs(self.amplitudes) > atol)
        return {self.layout.labels_of(int(i)): complex(self.amplitudes[i]) for i in idx}


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, trace-one, positive semidefinite matrix; validated on construction."""

    layout: SubsystemLayout
    entries: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        rho = np.array(self.entries, dtype=np.complex128)
        d = self.layout.dim
        if rho.shape != (d, d):
            raise LayoutError(f"density matrix of shape {rho.shape} for layout dimension {d}")
        _check_finite(rho, "density matrix")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)
        if self.validate:
            self.check()

    def check(self, atol: float = ATOL, psd_atol: float = PSD_ATOL) -> None:
        rho = self.entries
        asym = np.max(np.abs(rho - rho.conj().T)) if rho.size else 0.0
        if asym > atol:
            raise InvariantViolation(f"density matrix not Hermitian (max asymmetry {asym:.3e})")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > atol:
            raise InvariantViolation(f"density matrix trace {tr!r} != 1")
        lam = self.eigenvalues().min()
        if lam < -psd_atol:
            raise InvariantViolation(f"density matrix has eigenvalue {lam:.3e} < 0")

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.entries + self.entries.conj().T))

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def element(self, row: Mapping[str, str] | Sequence[str], col: Mapping[str, str] | Sequence[str]) -> complex:
        return complex(self.entries[self.layout.index(row), self.layout.index(col)])


@dataclass(frozen=True, eq=False)
class Operator:
    """Square matrix acting on the named subsystems (in ``acts_on`` order)."""

    acts_on: tuple[str, ...]
    matrix: np.ndarray
    unitary: bool = False
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "acts_on", tuple(self.acts_on))
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise LayoutError(f"operator matrix must be square, got shape {m.shape}")
        _check_finite(m, "operator")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.unitary:
            err = unitarity_error(m)
            if err > ATOL:
                raise InvariantViolation(f"operator {self.name!r} flagged unitary but |U^dag U - I| = {err:.3e}")

    def embed(self, layout: SubsystemLayout) -> np.ndarray:
        """Full-space matrix: this operator on its factors, identity elsewhere."""
        return _apply_matrix(self.matrix, self.acts_on, layout, np.eye(layout.dim, dtype=np.complex128))


def unitarity_error(matrix: np.ndarray) -> float:
    """max |U^dag U - I| entrywise."""
    m = np.asarray(matrix)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def _front(layout: SubsystemLayout, acts_on: tuple[str, ...], amps: np.ndarray) -> tuple[np.ndarray, tuple, int]:
    """Reshape ``amps`` to (local dim, everything else) with ``acts_on`` in front."""
    perm, inv, k = layout.plan(acts_on)
    # trailing axes of ``amps`` beyond the first are carried along as a batch
    batch = amps.shape[1:]
    nb = len(batch)
    t = amps.reshape(layout.dims + batch).transpose(perm + tuple(range(len(perm), len(perm) + nb)))
    return t.reshape(k, -1), t.shape, inv


def _back(m: np.ndarray, shape: tuple, inv: tuple[int, ...], out_shape: tuple) -> np.ndarray:
    nb = len(shape) - len(inv)
    return m.reshape(shape).transpose(inv + tuple(range(len(inv), len(inv) + nb))).reshape(out_shape)


def _apply_matrix(matrix: np.ndarray, acts_on: Sequence[str], layout: SubsystemLayout, amps: np.ndarray) -> np.ndarray:
    acts_on = tuple(acts_on)
    t, shape, inv = _front(layout, acts_on, amps)
    if matrix.shape[0] != t.shape[0]:
        raise LayoutError(
            f"operator of dimension {matrix.shape[0]} cannot act on {list(acts_on)} (dimension {t.shape[0]})"
        )
    return _back(matrix @ t, shape, inv, amps.shape)


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    return StateVector(a.layout + b.layout, np.kron(a.amplitudes, b.amplitudes))


def apply_operator(op: Operator, psi: StateVector) -> StateVector:
    out = StateVector(psi.layout, _apply_matrix(op.matrix, op.acts_on, psi.layout, psi.amplitudes))
    if op.unitary and abs(out.norm - psi.norm) > ATOL:
        raise InvariantViolation(f"unitary {op.name!r} changed the norm")
    return out


def partial_trace(state: Union[StateVector, DensityMatrix], keep: Sequence[str]) -> DensityMatrix:
    """Reduced density matrix on ``keep``; kept factors stay in layout order."""
    keep = list(keep)
    if not keep:
        raise ValueError("partial_trace needs at least one subsystem to keep")
    layout = state.layout
    pos = sorted(layout.positions(keep))
    kept = SubsystemLayout(tuple(layout.subsystems[p] for p in pos))
    traced = [p for p in range(len(layout)) if p not in pos]
    dk = kept.dim
    if isinstance(state, StateVector):
        t = np.moveaxis(state.tensor(), pos, range(len(pos))).reshape(dk, -1)
        rho = t @ t.conj().T
    else:
        n = len(layout)
        t = state.entries.reshape(layout.dims + layout.dims)
        order = pos + traced + [n + p for p in pos] + [n + p for p in traced]
        t = t.transpose(order)
        dt = int(np.prod([layout.dims[p] for p in traced], dtype=np.int64))
        rho = np.einsum("ajbj->ab", t.reshape(dk, dt, dk, dt))
    return DensityMatrix(kept, rho)


def overlap(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    if a.layout != b.layout:
        raise LayoutError("overlap needs identical layouts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|, i.e. equality up to global phase when both are normalized."""
    return abs(overlap(a, b))


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Named, mutually orthogonal outcome subspaces on a set of subsystems.

    Each outcome holds an orthonormal set of vectors as rows of a (k, d) array,
    with d the dimension of the acted-on factors taken in ``acts_on`` order.
    """

    acts_on: tuple[str, ...]
    dims: tuple[int, ...]
    outcomes: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        object.__setattr__(self, "acts_on", tuple(self.acts_on))
        object.__setattr__(self, "dims", tuple(self.dims))
        d = self.dim
        clean = []
        for label, vecs in self.outcomes:
            v = np.atleast_2d(np.array(vecs, dtype=np.complex128))
            if v.shape[1] != d:
                raise LayoutError(f"outcome {label!r}: vectors of length {v.shape[1]}, expected {d}")
            v.setflags(write=False)
            clean.append((label, v))
        object.__setattr__(self, "outcomes", tuple(clean))
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise ValueError(f"repeated outcome labels {labels}")
        allv = np.vstack([v for _, v in clean]) if clean else np.zeros((0, d))
        gram = allv.conj() @ allv.T
        if np.max(np.abs(gram - np.eye(len(allv))), initial=0.0) > ATOL:
            raise InvariantViolation("measurement outcome vectors are not orthonormal")

    @classmethod
    def build(
        cls,
        layout: SubsystemLayout,
        acts_on: Sequence[str],
        outcomes: Mapping[str, Sequence[np.ndarray]] | Sequence[tuple[str, Sequence[np.ndarray]]],
        complete: bool = True,
    ) -> "MeasurementBasis":
        """Basis on ``acts_on`` of ``layout``; vectors are normalized here.

        With ``complete``, an ``"other"`` outcome is appended holding the
        orthogonal complement, found by Gram-Schmidt over the canonical basis
        vectors taken in index order.
        """
        sub = layout.subset(acts_on)
        items = list(outcomes.items()) if isinstance(outcomes, Mapping) else list(outcomes)
        normed = []
        for label, vecs in items:
            rows = [np.asarray(v, dtype=np.complex128) / np.linalg.norm(v) for v in vecs]
            normed.append((label, np.array(rows)))
        if complete:
            span = np.vstack([v for _, v in normed]) if normed else np.zeros((0, sub.dim))
            comp = complement(span, sub.dim)
            if len(comp):
                normed.append((OTHER, comp))
        return cls(tuple(acts_on), sub.dims, tuple(normed))

    @classmethod
    def computational(cls, layout: SubsystemLayout, name: str) -> "MeasurementBasis":
        sub = layout.subset([name]).subsystems[0]
        eye = np.eye(sub.dim)
        return cls((name,), (sub.dim,), tuple((lab, eye[i:i + 1]) for i, lab in enumerate(sub.labels)))

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.outcomes)

    def vectors(self, label: str) -> np.ndarray:
        for lab, v in self.outcomes:
            if lab == label:
                return v
        raise KeyError(label)

    @cached_property
    def projectors(self) -> dict[str, np.ndarray]:
        return {label: v.T @ v.conj() for label, v in self.outcomes}

    def completeness_error(self) -> float:
        total = sum(self.projectors.values())
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def full_projectors(self, layout: SubsystemLayout) -> dict[str, np.ndarray]:
        self._check_layout(layout)
        return {lab: Operator(self.acts_on, p).embed(layout) for lab, p in self.projectors.items()}

    def _check_layout(self, layout: SubsystemLayout) -> None:
        perm, _, _ = layout.plan(self.acts_on)
        dims = tuple(layout.dims[p] for p in perm[: len(self.acts_on)])
        if dims != self.dims:
            raise LayoutError(f"basis built for dimensions {self.dims}, layout has {dims}")

    def project(self, psi: StateVector, label: str) -> np.ndarray:
        """Unnormalized projection of ``psi`` onto outcome ``label``."""
        self._check_layout(psi.layout)
        return _apply_matrix(self.projectors[label], self.acts_on, psi.layout, psi.amplitudes)


def complement(span: np.ndarray, dim: int, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal rows completing the rows of ``span`` to a basis of C^dim."""
    basis = [row for row in np.asarray(span, dtype=np.complex128)]
    extra = []
    for j in range(dim):
        v = np.zeros(dim, dtype=np.complex128)
        v[j] = 1.0
        for _ in range(2):  # second pass mops up rounding
            for b in basis:
                v = v - np.vdot(b, v) * b
        nv = np.linalg.norm(v)
        if nv > tol:
            v = v / nv
            basis.append(v)
            extra.append(v)
        if len(basis) == dim:
            break
    return np.array(extra).reshape(-1, dim)


def born_distribution(state: Union[StateVector, DensityMatrix], basis: MeasurementBasis) -> list[tuple[str, float]]:
    """Born probabilities in declared outcome order."""
    basis._check_layout(state.layout)
    if isinstance(state, StateVector):
        probs = [float(np.vdot(p, p).real) for p in (basis.project(state, lab) for lab in basis.labels)]
    else:
        probs = [
            float(np.trace(P @ state.entries).real)
            for P in basis.full_projectors(state.layout).values()
        ]
    return list(zip(basis.labels, probs))


def measure(psi: StateVector, basis: MeasurementBasis, rng_draw: float) -> tuple[str, StateVector, float]:
    """Sample one outcome with a single uniform draw against the cumulative Born distribution.

    Returns the outcome label, the normalized post-measurement state and the
    pre-measurement probability of that outcome.
    """
    if not 0.0 <= rng_draw < 1.0:
        raise ValueError(f"rng_draw must lie in [0, 1), got {rng_draw}")
    basis._check_layout(psi.layout)
    t, shape, inv = _front(psi.layout, basis.acts_on, psi.amplitudes)
    coeffs = [v.conj() @ t for _, v in basis.outcomes]
    probs = np.array([np.vdot(c, c).real for c in coeffs])
    total = probs.sum()
    if abs(total - psi.norm ** 2) > 1e-9:
        raise InvariantViolation(f"measurement basis is incomplete (captured {total:.3e})")
    cum = np.cumsum(probs) / total
    k = int(np.searchsorted(cum, rng_draw, side="right"))
    k = min(k, len(probs) - 1)
    # skip zero-probability outcomes that a rounding-level cum value could select
    while probs[k] == 0.0 and k + 1 < len(probs):
        k += 1
    label, v = basis.outcomes[k]
    vec = _back(v.T @ coeffs[k], shape, inv, psi.amplitudes.shape)
    p = probs[k] / total
    if p <= 0.0:
        raise InvariantViolation(f"selected outcome {label!r} has zero probability")
    return label, StateVector(psi.layout, vec / np.sqrt(probs[k])), float(p)


def random_state(layout: SubsystemLayout, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state (normalized complex Gaussian)."""
    v = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return StateVector(layout, v / np.linalg.norm(v))


def joint_distribution(
    psi: StateVector, first: MeasurementBasis, second: MeasurementBasis
) -> dict[tuple[str, str], float]:
    """P(a, b) for measuring ``first`` and then ``second``, exact."""
    out = {}
    for a in first.labels:
        pa = StateVector(psi.layout, first.project(psi, a))
        for b in second.labels:
            v = second.project(pa, b)
            out[(a, b)] = float(np.vdot(v, v).real)
    return out
