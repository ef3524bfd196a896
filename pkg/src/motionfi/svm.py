"""Cubic-kernel one-vs-one SVM trained by sequential minimal optimization.

One binary soft-margin SVM is trained per unordered class pair; prediction
is the class with the most pairwise wins. Features are standardized (zero
mean, unit variance per feature) before kernel evaluation because the
polynomial kernel is scale-sensitive; the standardization statistics travel
with the model.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .errors import DataError, InputError, TrainingError
from .validation import as_feature_matrix

MODEL_SCHEMA_VERSION = 1


def cubic_kernel(u, v) -> float:
    """Cubic polynomial kernel (1 + u . v)^3 between two feature vectors."""
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise InputError(f"kernel inputs must be equal-length vectors, got {a.shape} and {b.shape}")
    return float((1.0 + a @ b) ** 3)


def cubic_kernel_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kernel matrix K[i, j] = (1 + a_i . b_j)^3 for row-stacked inputs."""
    return (1.0 + a @ b.T) ** 3


def smo_solve(
    kernel: np.ndarray,
    y: np.ndarray,
    c_reg: float,
    tol: float = 1e-3,
    max_iter: int | None = None,
) -> tuple[np.ndarray, float, int, float]:
    """Solve the soft-margin dual with sequential minimal optimization.

    The working pair is chosen as the maximal violating pair (most-violated
    coordinate in each feasible direction), which makes the iteration
    deterministic for a fixed sample order; ties resolve to the lowest
    index. Stops once the pairwise violation gap is at most ``tol``.

    Args:
        kernel: precomputed kernel Gram matrix, shape (n, n).
        y: labels in {-1, +1}.
        c_reg: box constraint on the dual variables.
        tol: maximal allowed violation gap.
        max_iter: iteration cap; defaults to max(10_000, 200 * n).

    Returns:
        (alpha, bias, iterations, gap): dual variables, intercept of the
        decision function, iterations used, and the final violation gap.
    """
    n = y.shape[0]
    if max_iter is None:
        max_iter = max(10_000, 200 * n)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    iterations = 0
    gap = np.inf
    for iterations in range(1, max_iter + 1):
        yg = -y * grad
        up = ((y > 0) & (alpha < c_reg)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < c_reg))
        up_vals = np.where(up, yg, -np.inf)
        low_vals = np.where(low, yg, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        hi = up_vals[i]
        lo = low_vals[j]
        gap = hi - lo
        if gap <= tol:
            iterations -= 1
            break
        quad = kernel[i, i] + kernel[j, j] - 2.0 * kernel[i, j]
        if quad <= 0:
            quad = 1e-12
        step = (hi - lo) / quad
        step = min(step, c_reg - alpha[i] if y[i] > 0 else alpha[i])
        step = min(step, alpha[j] if y[j] > 0 else c_reg - alpha[j])
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        grad += step * y * (kernel[:, i] - kernel[:, j])

    yg = -y * grad
    slack = 1e-8 * c_reg
    free = (alpha > slack) & (alpha < c_reg - slack)
    if np.any(free):
        bias = float(yg[free].mean())
    else:
        up = ((y > 0) & (alpha < c_reg)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < c_reg))
        hi = np.max(np.where(up, yg, -np.inf))
        lo = np.min(np.where(low, yg, np.inf))
        bias = float((hi + lo) / 2.0)
    return alpha, bias, iterations, float(gap)


@dataclass(frozen=True)
class PairwiseSvm:
    """One trained binary SVM for an unordered class pair.

    ``support_vectors`` live in the standardized feature space;
    ``dual_coef`` holds the signed values alpha_i * y_i (positive rows
    support ``class_a``). A positive decision value votes for ``class_a``.
    """

    class_a: str
    class_b: str
    support_vectors: np.ndarray
    dual_coef: np.ndarray
    bias: float

    def decision(self, standardized: np.ndarray) -> np.ndarray:
        k = cubic_kernel_matrix(standardized, self.support_vectors)
        return k @ self.dual_coef + self.bias


@dataclass(frozen=True)
class OvoSvmModel:
    """Trained one-vs-one cubic-kernel SVM."""

    classes: tuple[str, ...]
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    pairs: tuple[PairwiseSvm, ...]
    c_reg: float
    metadata: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return self.feature_mean.shape[0]

    def standardize(self, features: np.ndarray) -> np.ndarray:
        f = as_feature_matrix(features)
        if f.shape[1] != self.n_features:
            raise InputError(
                f"feature dimension {f.shape[1]} does not match the model's {self.n_features}"
            )
        return (f - self.feature_mean) / self.feature_scale

    def pairwise_votes(self, features: np.ndarray) -> np.ndarray:
        """Votes per class for each feature row, shape (n, n_classes)."""
        z = self.standardize(features)
        votes = np.zeros((z.shape[0], len(self.classes)), dtype=np.int64)
        index = {label: k for k, label in enumerate(self.classes)}
        for pair in self.pairs:
            decision = pair.decision(z)
            a, b = index[pair.class_a], index[pair.class_b]
            votes[decision >= 0, a] += 1
            votes[decision < 0, b] += 1
        return votes

    def predict(self, features: np.ndarray) -> list[str]:
        """Most-voted class per row; vote ties resolve to the lowest index."""
        votes = self.pairwise_votes(features)
        return [self.classes[int(k)] for k in np.argmax(votes, axis=1)]

    def to_dict(self) -> dict:
        return {
            "schema_version": MODEL_SCHEMA_VERSION,
            "kind": "ovo-cubic-svm",
            "classes": list(self.classes),
            "c_reg": self.c_reg,
            "feature_mean": self.feature_mean.tolist(),
            "feature_scale": self.feature_scale.tolist(),
            "pairs": [
                {
                    "class_a": p.class_a,
                    "class_b": p.class_b,
                    "support_vectors": p.support_vectors.tolist(),
                    "dual_coef": p.dual_coef.tolist(),
                    "bias": p.bias,
                }
                for p in self.pairs
            ],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "OvoSvmModel":
        if payload.get("kind") != "ovo-cubic-svm":
            raise InputError(f"not a model file (kind={payload.get('kind')!r})")
        if payload.get("schema_version") != MODEL_SCHEMA_VERSION:
            raise InputError(
                f"unsupported model schema_version {payload.get('schema_version')!r}"
            )
        pairs = []
        for entry in payload["pairs"]:
            dual = np.asarray(entry["dual_coef"], dtype=np.float64)
            if abs(dual.sum()) > 1e-6:
                raise InputError(
                    f"pair {entry['class_a']}/{entry['class_b']}: signed dual "
                    f"coefficients must sum to zero, got {dual.sum()!r}"
                )
            pairs.append(
                PairwiseSvm(
                    class_a=entry["class_a"],
                    class_b=entry["class_b"],
                    support_vectors=np.asarray(entry["support_vectors"], dtype=np.float64),
                    dual_coef=dual,
                    bias=float(entry["bias"]),
                )
            )
        return cls(
            classes=tuple(payload["classes"]),
            feature_mean=np.asarray(payload["feature_mean"], dtype=np.float64),
            feature_scale=np.asarray(payload["feature_scale"], dtype=np.float64),
            pairs=tuple(pairs),
            c_reg=float(payload["c_reg"]),
            metadata=dict(payload.get("metadata", {})),
        )


@dataclass(frozen=True)
class LabeledDataset:
    """Feature rows with class labels and an ordered class list."""

    features: np.ndarray
    labels: tuple[str, ...]
    classes: tuple[str, ...]

    def __post_init__(self):
        feats = as_feature_matrix(self.features)
        labels = tuple(str(l) for l in self.labels)
        if feats.shape[0] != len(labels):
            raise InputError(
                f"{feats.shape[0]} feature rows but {len(labels)} labels"
            )
        known = set(self.classes)
        for label in labels:
            if label not in known:
                raise InputError(f"label {label!r} is not in the class list {self.classes}")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "classes", tuple(self.classes))

    @classmethod
    def build(cls, features, labels, classes=None) -> "LabeledDataset":
        labels = tuple(str(l) for l in labels)
        if classes is None:
            classes = tuple(sorted(set(labels)))
        return cls(features=np.asarray(features, dtype=np.float64), labels=labels, classes=classes)


def train(
    dataset: LabeledDataset,
    c_reg: float = 1.0,
    kkt_tol: float = 1e-3,
    max_iter: int | None = None,
    standardize: bool = True,
) -> OvoSvmModel:
    """Train a one-vs-one cubic-kernel SVM.

    Deterministic for a fixed sample order. Raises TrainingError when the
    dataset has fewer than two classes or an empty class, and DataError on
    non-finite features.
    """
    if c_reg <= 0:
        raise InputError(f"c_reg must be positive, got {c_reg!r}")
    features = dataset.features
    if not np.all(np.isfinite(features)):
        raise DataError("features contain non-finite values")
    labels = np.asarray(dataset.labels)
    classes = dataset.classes
    if len(classes) < 2:
        raise TrainingError(f"need at least 2 classes to train, got {classes}")
    for cls_label in classes:
        if not np.any(labels == cls_label):
            raise TrainingError(f"class {cls_label!r} has no samples")

    if standardize:
        mean = features.mean(axis=0)
        scale = features.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
    else:
        mean = np.zeros(features.shape[1])
        scale = np.ones(features.shape[1])
    z = (features - mean) / scale

    pairs = []
    for ia in range(len(classes)):
        for ib in range(ia + 1, len(classes)):
            class_a, class_b = classes[ia], classes[ib]
            mask = (labels == class_a) | (labels == class_b)
            za = z[mask]
            y = np.where(labels[mask] == class_a, 1.0, -1.0)
            gram = cubic_kernel_matrix(za, za)
            alpha, bias, _, _ = smo_solve(gram, y, c_reg, tol=kkt_tol, max_iter=max_iter)
            sv = alpha > 1e-12
            pairs.append(
                PairwiseSvm(
                    class_a=class_a,
                    class_b=class_b,
                    support_vectors=za[sv],
                    dual_coef=alpha[sv] * y[sv],
                    bias=bias,
                )
            )
    return OvoSvmModel(
        classes=classes,
        feature_mean=mean,
        feature_scale=scale,
        pairs=tuple(pairs),
        c_reg=c_reg,
        metadata={"n_samples": int(features.shape[0]), "kkt_tol": kkt_tol},
    )


def predict(model: OvoSvmModel, features) -> tuple[str, np.ndarray]:
    """Label and per-class pairwise vote counts for a single feature vector."""
    votes = model.pairwise_votes(np.asarray(features, dtype=np.float64).reshape(1, -1))[0]
    return model.classes[int(np.argmax(votes))], votes


class CubicSvmClassifier(BaseEstimator, ClassifierMixin):
    """Scikit-learn style wrapper around :func:`train` and :func:`predict`."""

    def __init__(
        self,
        c_reg: float = 1.0,
        kkt_tol: float = 1e-3,
        max_iter: int | None = None,
        standardize: bool = True,
    ):
        self.c_reg = c_reg
        self.kkt_tol = kkt_tol
        self.max_iter = max_iter
        self.standardize = standardize

    def fit(self, X, y):
        dataset = LabeledDataset.build(X, list(y))
        self.model_ = train(
            dataset,
            c_reg=self.c_reg,
            kkt_tol=self.kkt_tol,
            max_iter=self.max_iter,
            standardize=self.standardize,
        )
        self.classes_ = np.asarray(self.model_.classes)
        self.n_features_in_ = self.model_.n_features
        return self

    def predict(self, X):
        return np.asarray(self.model_.predict(as_feature_matrix(X)))

    def pairwise_votes(self, X):
        return self.model_.pairwise_votes(as_feature_matrix(X))
