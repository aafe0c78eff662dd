"""Information atoms: per-point contributions to the Fisher information.

A design point contributes either a rank-one term x x^T (stored as the vector
x) or a full symmetric PSD matrix when the per-point information has higher
rank (e.g. multi-category responses).  ``AtomSet`` keeps a whole pool in one
ndarray so that reductions over the pool stay vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPSD

# relative eigenvalue slack below which a matrix atom still counts as PSD
PSD_RTOL = 1e-8


def _check_psd_stack(mats: np.ndarray) -> None:
    eigs = np.linalg.eigvalsh(mats)
    lam_min = eigs[..., 0]
    lam_max = eigs[..., -1]
    bad = lam_min < -PSD_RTOL * np.maximum(lam_max, 0.0)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NotPSD(f"atom {i} has eigenvalue {lam_min[i]:.3e} (max {lam_max[i]:.3e})")


@dataclass(frozen=True)
class InfoAtom:
    """A single design point's information contribution.

    Exactly one of ``vector`` (rank-one contribution x x^T) or ``matrix``
    (full symmetric PSD contribution) is set.
    """

    vector: np.ndarray | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if (self.vector is None) == (self.matrix is None):
            raise ValueError("exactly one of vector or matrix must be given")
        if self.vector is not None:
            v = np.asarray(self.vector, dtype=float)
            if v.ndim != 1:
                raise DimensionMismatch("vector atom must be one-dimensional")
            object.__setattr__(self, "vector", v)
        else:
            m = np.asarray(self.matrix, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise DimensionMismatch("matrix atom must be square")
            m = 0.5 * (m + m.T)
            _check_psd_stack(m[None])
            object.__setattr__(self, "matrix", m)

    @property
    def k(self) -> int:
        return self.vector.shape[0] if self.vector is not None else self.matrix.shape[0]

    def as_matrix(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        return np.outer(self.vector, self.vector)


class AtomSet:
    """Homogeneous pool of atoms backed by a single array.

    kind == "vector": data has shape (N, k), atom i contributes x_i x_i^T.
    kind == "matrix": data has shape (N, k, k), symmetric PSD slices.
    """

    __slots__ = ("kind", "data", "k")

    def __init__(self, kind: str, data: np.ndarray, *, validate: bool = True):
        if kind not in ("vector", "matrix"):
            raise ValueError(f"unknown atom kind {kind!r}")
        data = np.asarray(data, dtype=float)
        if kind == "vector":
            if data.ndim != 2:
                raise DimensionMismatch("vector atom pool must have shape (N, k)")
        else:
            if data.ndim != 3 or data.shape[1] != data.shape[2]:
                raise DimensionMismatch("matrix atom pool must have shape (N, k, k)")
            data = 0.5 * (data + np.swapaxes(data, 1, 2))
            if validate and len(data):
                _check_psd_stack(data)
        self.kind = kind
        self.data = data
        self.k = data.shape[1]

    @classmethod
    def from_vectors(cls, X) -> "AtomSet":
        return cls("vector", X)

    @classmethod
    def from_matrices(cls, mats, *, validate: bool = True) -> "AtomSet":
        return cls("matrix", mats, validate=validate)

    def __len__(self) -> int:
        return self.data.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i: int) -> InfoAtom:
        if self.kind == "vector":
            return InfoAtom(vector=self.data[i])
        return InfoAtom(matrix=self.data[i])

    def subset(self, idx) -> "AtomSet":
        return AtomSet(self.kind, self.data[idx], validate=False)

    def weighted_sum(self, w) -> np.ndarray:
        """Sum of w_i * atom_i as a (k, k) symmetric matrix.

        Sparse weight vectors (e.g. steepest-gradient measures) are reduced
        over their support only.
        """
        w = np.asarray(w, dtype=float)
        if w.shape[0] != len(self):
            raise DimensionMismatch(f"{w.shape[0]} weights for {len(self)} atoms")
        nz = np.flatnonzero(w)
        if nz.size < 0.5 * len(self):
            data = self.data[nz]
            w = w[nz]
        else:
            data = self.data
        if self.kind == "vector":
            M = (data * w[:, None]).T @ data
        else:
            M = np.tensordot(w, data, axes=(0, 0))
        return 0.5 * (M + M.T)

    def quad_forms(self, B: np.ndarray) -> np.ndarray:
        """Per-atom values of Tr(B @ atom_i) for a symmetric (k, k) matrix B."""
        if B.shape != (self.k, self.k):
            raise DimensionMismatch("B must be (k, k)")
        if self.kind == "vector":
            return np.einsum("ni,ni->n", self.data @ B, self.data)
        return np.tensordot(self.data, B, axes=([1, 2], [0, 1]))


def as_atom_set(atoms) -> AtomSet:
    """Normalize lists of atoms or raw arrays into an AtomSet."""
    if isinstance(atoms, AtomSet):
        return atoms
    if isinstance(atoms, np.ndarray):
        if atoms.ndim == 2:
            return AtomSet.from_vectors(atoms)
        if atoms.ndim == 3:
            return AtomSet.from_matrices(atoms)
        raise DimensionMismatch("atom array must be (N, k) or (N, k, k)")
    items = list(atoms)
    if not items:
        raise ValueError("empty atom collection")
    norm = []
    for a in items:
        if isinstance(a, InfoAtom):
            norm.append(a)
        else:
            arr = np.asarray(a, dtype=float)
            norm.append(InfoAtom(vector=arr) if arr.ndim == 1 else InfoAtom(matrix=arr))
    ks = {a.k for a in norm}
    if len(ks) != 1:
        raise DimensionMismatch(f"atoms have mixed dimensions {sorted(ks)}")
    if all(a.vector is not None for a in norm):
        return AtomSet.from_vectors(np.stack([a.vector for a in norm]))
    return AtomSet.from_matrices(np.stack([a.as_matrix() for a in norm]), validate=False)
