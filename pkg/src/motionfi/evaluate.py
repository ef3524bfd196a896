"""Stratified cross-validation and the evaluation report."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .svm import LabeledDataset, train


def stratified_folds(labels, n_folds: int, seed: int = 0) -> list[np.ndarray]:
    """Deterministic stratified fold assignment.

    Indices of each class are shuffled with the seed and dealt round-robin
    across folds, so every fold holds a near-proportional share of every
    class. Raises when any class has fewer samples than folds.
    """
    labels = np.asarray([str(l) for l in labels])
    if n_folds < 2:
        raise InputError(f"n_folds must be >= 2, got {n_folds!r}")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(n_folds)]
    for cls in sorted(set(labels)):
        idx = np.flatnonzero(labels == cls)
        if idx.shape[0] < n_folds:
            raise InputError(
                f"class {cls!r} has {idx.shape[0]} samples, fewer than {n_folds} folds"
            )
        rng.shuffle(idx)
        for position, sample in enumerate(idx):
            folds[position % n_folds].append(int(sample))
    return [np.sort(np.asarray(fold, dtype=np.int64)) for fold in folds]


@dataclass
class EvalReport:
    """Cross-validation outcome.

    The confusion matrix is oriented rows = true class, columns = predicted
    class; row sums equal the per-class sample counts and the accuracy is
    trace(matrix) / total.
    """

    classes: tuple[str, ...]
    confusion: np.ndarray
    folds: int
    fold_accuracies: tuple[float, ...]
    fold_sizes: tuple[int, ...]
    counting_error_ratios: tuple[float, ...] = ()

    @property
    def accuracy(self) -> float:
        total = self.confusion.sum()
        return float(np.trace(self.confusion) / total) if total else 0.0

    def precision(self, cls: str) -> float:
        k = self.classes.index(cls)
        col = self.confusion[:, k].sum()
        return float(self.confusion[k, k] / col) if col else 0.0

    def recall(self, cls: str) -> float:
        k = self.classes.index(cls)
        row = self.confusion[k, :].sum()
        return float(self.confusion[k, k] / row) if row else 0.0

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "confusion_matrix": self.confusion.tolist(),
            "accuracy": self.accuracy,
            "per_class": {
                cls: {"precision": self.precision(cls), "recall": self.recall(cls)}
                for cls in self.classes
            },
            "folds": self.folds,
            "fold_accuracies": list(self.fold_accuracies),
            "fold_sizes": list(self.fold_sizes),
            "counting_error_ratios": list(self.counting_error_ratios),
        }


def cross_validate(
    dataset: LabeledDataset,
    n_folds: int = 10,
    c_reg: float = 1.0,
    seed: int = 0,
) -> EvalReport:
    """Stratified k-fold cross-validation of the one-vs-one SVM."""
    labels = np.asarray(dataset.labels)
    classes = dataset.classes
    index = {cls: k for k, cls in enumerate(classes)}
    folds = stratified_folds(labels, n_folds, seed=seed)
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    fold_accuracies = []
    fold_sizes = []
    for held_out in folds:
        mask = np.ones(labels.shape[0], dtype=bool)
        mask[held_out] = False
        train_set = LabeledDataset(
            features=dataset.features[mask],
            labels=tuple(labels[mask]),
            classes=classes,
        )
        model = train(train_set, c_reg=c_reg)
        predicted = model.predict(dataset.features[held_out])
        correct = 0
        for sample, guess in zip(held_out, predicted):
            confusion[index[labels[sample]], index[guess]] += 1
            correct += guess == labels[sample]
        fold_accuracies.append(correct / held_out.shape[0])
        fold_sizes.append(int(held_out.shape[0]))
    return EvalReport(
        classes=classes,
        confusion=confusion,
        folds=n_folds,
        fold_accuracies=tuple(fold_accuracies),
        fold_sizes=tuple(fold_sizes),
    )
