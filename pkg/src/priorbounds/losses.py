"""Loss functions: pseudometrics for estimation and matrices for finite actions."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import EmptyActionSet


class Pseudometric:
    """Estimation loss ``rho(theta, estimate)``.

    ``kind`` is ``"abs"`` (scalar absolute difference) or ``"l1"``
    (L1 norm over the last axis).
    """

    KINDS = ("abs", "l1")

    def __init__(self, kind: str = "abs"):
        if kind not in self.KINDS:
            raise ValueError(f"unknown pseudometric {kind!r}")
        self.kind = kind

    def __call__(self, theta, estimates) -> np.ndarray:
        diff = np.abs(np.asarray(estimates, dtype=float) - np.asarray(theta, dtype=float))
        if self.kind == "l1":
            return diff.sum(axis=-1)
        return diff

    def __repr__(self):
        return f"Pseudometric({self.kind!r})"

    def __eq__(self, other):
        return isinstance(other, Pseudometric) and other.kind == self.kind

    def __hash__(self):
        return hash(("Pseudometric", self.kind))


ABSOLUTE = Pseudometric("abs")
L1 = Pseudometric("l1")


class LossMatrix:
    """Loss ``L(theta_k, a_j)`` tabulated for finitely many parameters and actions.

    Learners evaluated against a matrix loss output integer action indices.
    """

    def __init__(self, values, thetas, action_labels=None):
        values = np.array(values, dtype=float)
        if values.ndim != 2:
            raise ValueError("loss matrix must be 2-D")
        if values.shape[1] == 0:
            raise EmptyActionSet("loss matrix has no actions")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("loss entries must be finite and non-negative")
        thetas = np.array(thetas, dtype=float)
        if thetas.shape[0] != values.shape[0]:
            raise ValueError("need one theta per loss-matrix row")
        self.values = values
        self.thetas = thetas
        if action_labels is None:
            action_labels = [f"a{j}" for j in range(values.shape[1])]
        self.action_labels = [str(a) for a in action_labels]
        if len(self.action_labels) != values.shape[1]:
            raise ValueError("need one label per action column")

    @property
    def num_actions(self) -> int:
        return self.values.shape[1]

    def row_index(self, theta) -> int:
        diff = np.abs(self.thetas - np.asarray(theta, dtype=float))
        if diff.ndim > 1:
            diff = diff.max(axis=1)
        hits = np.flatnonzero(diff <= 1e-12)
        if hits.size == 0:
            raise KeyError(f"{theta!r} has no loss row")
        return int(hits[0])

    def __call__(self, theta, actions) -> np.ndarray:
        return self.values[self.row_index(theta)][np.asarray(actions, dtype=np.int64)]

    def subset(self, columns) -> "LossMatrix":
        columns = list(columns)
        return LossMatrix(self.values[:, columns], self.thetas,
                          [self.action_labels[c] for c in columns])

    @classmethod
    def from_pseudometric(cls, points, metric: Pseudometric) -> "LossMatrix":
        """Estimation loss with the action set equal to the parameter points."""
        points = np.asarray(points, dtype=float)
        values = np.array([metric(t, points) for t in points])
        return cls(values, points, [repr(p.tolist()) if np.ndim(p) else f"{p:g}" for p in points])

    @classmethod
    def from_csv(cls, path) -> "LossMatrix":
        """First row: action labels (after a corner cell); first column: theta."""
        with open(Path(path), newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
        if len(rows) < 2:
            raise ValueError(f"{path}: need a header row and at least one data row")
        labels = [c.strip() for c in rows[0][1:]]
        thetas = [float(r[0]) for r in rows[1:]]
        values = [[float(c) for c in r[1:]] for r in rows[1:]]
        if any(len(v) != len(labels) for v in values):
            raise ValueError(f"{path}: ragged loss matrix")
        return cls(values, thetas, labels)

    def to_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["theta", *self.action_labels])
            for t, row in zip(self.thetas, self.values):
                w.writerow([f"{t:.17g}", *(f"{v:.17g}" for v in row)])
