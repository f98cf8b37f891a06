"""Labeling, balancing, classifiers and evaluation.

Labels are encoded as integers ``0 = low, 1 = med, 2 = high``; features are
an ``(n, 11)`` 0/1 matrix. Every stochastic step takes an explicit seed.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import BalancingError, DatasetError

log = logging.getLogger(__name__)

LABELS = ("low", "med", "high")
LOW, MED, HIGH = 0, 1, 2
DEFAULT_FACTORS = {MED: 5, HIGH: 20}


def encode_labels(labels) -> np.ndarray:
    index = {name: i for i, name in enumerate(LABELS)}
    try:
        return np.array([index[l] for l in labels], dtype=np.int64)
    except KeyError as exc:
        raise DatasetError(f"unknown label {exc.args[0]!r}") from None


def decode_labels(y) -> list:
    return [LABELS[int(i)] for i in y]


def _seed_int(seed) -> int:
    return int(np.random.SeedSequence(seed).generate_state(1)[0])


def spawn_seeds(seed, n) -> list:
    """Independent integer seeds derived from ``seed``."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


@dataclass
class LabeledDataset:
    X: np.ndarray
    y: np.ndarray
    label_kind: str = "issue"
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.int8)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2 or len(self.X) != len(self.y):
            raise DatasetError("X must be 2-D with one row per label")
        if self.label_kind not in ("issue", "change"):
            raise DatasetError(f"label kind must be issue or change, not {self.label_kind!r}")
        if len(self.y) and (self.y.min() < 0 or self.y.max() > 2):
            raise DatasetError("labels must be in {low, med, high}")

    def __len__(self):
        return len(self.y)


# ---------------------------------------------------------------- labeling

def pareto_cuts(counts) -> tuple[int, int]:
    """Count values at 1-based sorted positions ceil(0.8 n) and ceil(0.96 n)."""
    ordered = sorted(counts)
    n = len(ordered)
    if n == 0:
        raise DatasetError("cannot label an empty dataset")
    i80 = -(-80 * n // 100)
    i96 = -(-96 * n // 100)
    return ordered[i80 - 1], ordered[i96 - 1]


def pareto_label(counts) -> list:
    """Double-Pareto labels (80 / 16 / 4) using value cuts so ties share a label."""
    t1, t2 = pareto_cuts(counts)
    return [LABELS[LOW] if c <= t1 else LABELS[MED] if c <= t2 else LABELS[HIGH]
            for c in counts]


# --------------------------------------------------------------- balancing

def hamming_neighbors(X, i, candidates, k) -> np.ndarray:
    """The ``k`` candidates nearest to row ``i`` (Hamming), ties by row order."""
    others = candidates[candidates != i]
    dist = np.count_nonzero(X[others] != X[i], axis=1)
    order = np.argsort(dist, kind="stable")
    return others[order[:k]]


def smote(X, y, factors=None, k: int = 5, seed=0, return_base=False):
    """Binary-feature SMOTE. Class ``c`` grows to ``factors[c]`` times its size.

    Original rows are kept in place; synthetic rows are appended in label
    order, base-row order. With ``return_base`` a third array maps every
    output row to the original row it was derived from.
    """
    X = np.asarray(X, dtype=np.int8)
    y = np.asarray(y, dtype=np.int64)
    factors = DEFAULT_FACTORS if factors is None else factors
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    new_X, new_y, bases = [X], [y], [np.arange(len(y))]
    for label in sorted(factors):
        factor = int(factors[label])
        if factor < 1:
            raise BalancingError(f"factor for {LABELS[label]} must be >= 1")
        if factor == 1:
            continue
        members = np.flatnonzero(y == label)
        if len(members) < 2:
            raise BalancingError(
                f"class {LABELS[label]!r} has {len(members)} member(s); SMOTE needs at "
                f"least 2 - lower its factor (currently {factor}) to 1")
        kk = min(k, len(members) - 1)
        synth = np.empty(((factor - 1) * len(members), X.shape[1]), dtype=np.int8)
        bases.append(np.repeat(members, factor - 1))
        row = 0
        for i in members:
            nbrs = hamming_neighbors(X, i, members, kk)
            for _ in range(factor - 1):
                nb = X[nbrs[rng.integers(len(nbrs))]]
                gap = rng.random()
                value = X[i] + gap * (nb - X[i])
                s = np.where(value > 0.5, 1, 0).astype(np.int8)
                tie = value == 0.5
                s[tie] = X[i][tie]
                synth[row] = s
                row += 1
        new_X.append(synth)
        new_y.append(np.full(len(synth), label, dtype=np.int64))
    if return_base:
        return np.concatenate(new_X), np.concatenate(new_y), np.concatenate(bases)
    return np.concatenate(new_X), np.concatenate(new_y)


# ------------------------------------------------------------- classifiers

def _pattern_codes(X, features) -> np.ndarray:
    codes = np.zeros(len(X), dtype=np.int64)
    for f in features:
        codes = codes * 2 + X[:, f]
    return codes


def _majority(counts) -> int:
    # argmax returns the first maximum, i.e. low < med < high priority
    return int(np.argmax(counts))


class DecisionTable:
    """Kohavi-style decision table with best-first feature-subset search.

    Subsets are scored by inner ``inner_folds``-fold CV accuracy; ties prefer
    smaller subsets, then lexicographically smaller feature tuples.
    """

    def __init__(self, seed=0, inner_folds: int = 5, max_stale: int = 5):
        self.seed = seed
        self.inner_folds = inner_folds
        self.max_stale = max_stale

    def _cv_correct(self, X, y, folds, features):
        codes = _pattern_codes(X, features)
        n_patterns = 1 << len(features)
        key = codes * 3 + y
        total = np.bincount(key, minlength=3 * n_patterns).reshape(n_patterns, 3)
        correct = 0
        for fold in folds:
            fold_counts = np.bincount(key[fold], minlength=3 * n_patterns).reshape(n_patterns, 3)
            train = total - fold_counts
            fallback = _majority(train.sum(axis=0))
            seen = train.sum(axis=1) > 0
            table = np.where(seen, np.argmax(train, axis=1), fallback)
            correct += int(np.count_nonzero(table[codes[fold]] == y[fold]))
        return correct

    def select_features(self, X, y) -> tuple:
        n, m = X.shape
        rng = np.random.default_rng(self.seed)
        perm = rng.permutation(n)
        folds = [f for f in np.array_split(perm, min(self.inner_folds, n)) if len(f)]
        scored = {}

        def key(subset):
            if subset not in scored:
                scored[subset] = self._cv_correct(X, y, folds, subset)
            return (-scored[subset], len(subset), subset)

        best = key(())
        frontier = [best]
        stale = 0
        while frontier and stale < self.max_stale:
            _, _, node = heapq.heappop(frontier)
            improved = False
            for f in range(m):
                if f in node:
                    continue
                child = tuple(sorted(node + (f,)))
                if child in scored:
                    continue
                ck = key(child)
                heapq.heappush(frontier, ck)
                if ck < best:
                    best = ck
                    improved = True
            stale = 0 if improved else stale + 1
        return best[2]

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if len(y) == 0:
            raise DatasetError("cannot train on an empty dataset")
        self.features_ = self.select_features(X, y)
        codes = _pattern_codes(X, self.features_)
        self.default_ = _majority(np.bincount(y, minlength=3))
        self.table_ = {}
        for code in np.unique(codes):
            self.table_[int(code)] = _majority(np.bincount(y[codes == code], minlength=3))
        return self

    def predict(self, X) -> np.ndarray:
        codes = _pattern_codes(np.asarray(X, dtype=np.int64), self.features_)
        return np.array([self.table_.get(int(c), self.default_) for c in codes], dtype=np.int64)


class NaiveBayes:
    """Bernoulli naive Bayes with add-one smoothed likelihoods."""

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if len(y) == 0:
            raise DatasetError("cannot train on an empty dataset")
        class_n = np.bincount(y, minlength=3).astype(float)
        ones = np.vstack([X[y == c].sum(axis=0) for c in range(3)])
        self.prior_ = class_n / class_n.sum()
        self.p1_ = (ones + 1.0) / (class_n[:, None] + 2.0)
        return self

    def log_posterior(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        with np.errstate(divide="ignore"):
            log_prior = np.log(self.prior_)
        ll = X @ np.log(self.p1_).T + (1 - X) @ np.log(1 - self.p1_).T
        return ll + log_prior

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.log_posterior(X), axis=1).astype(np.int64)


class UniformBaseline:
    """Predicts each label with probability 1/3."""

    def __init__(self, seed=0):
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def fit(self, X=None, y=None):
        self._rng = np.random.default_rng(self.seed)
        return self

    def predict(self, X) -> np.ndarray:
        return self._rng.integers(0, 3, size=len(X)).astype(np.int64)


def train_decision_table(X, y, seed=0) -> DecisionTable:
    return DecisionTable(seed=seed).fit(X, y)


def train_naive_bayes(X, y, seed=None) -> NaiveBayes:
    return NaiveBayes().fit(X, y)


def baseline_uniform(seed=0) -> UniformBaseline:
    return UniformBaseline(seed)


TRAINERS = {
    "decision-table": train_decision_table,
    "naive-bayes": train_naive_bayes,
    "uniform": lambda X, y, seed=0: UniformBaseline(seed).fit(X, y),
}


# ----------------------------------------------------------------- metrics

@dataclass
class EvalResult:
    confusion: np.ndarray            # [predicted, actual] in LABELS order
    precision: dict
    recall: dict
    macro_precision: float
    macro_recall: float
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "labels": list(LABELS),
            "confusion_predicted_by_actual": self.confusion.astype(int).tolist(),
            "precision": {k: round(v, 12) for k, v in self.precision.items()},
            "recall": {k: round(v, 12) for k, v in self.recall.items()},
            "macro_precision": round(self.macro_precision, 12),
            "macro_recall": round(self.macro_recall, 12),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d) -> "EvalResult":
        res = confusion_metrics(np.array(d["confusion_predicted_by_actual"]))
        res.meta = d.get("meta", {})
        return res


def confusion_matrix(y_true, y_pred) -> np.ndarray:
    m = np.zeros((3, 3), dtype=np.int64)
    np.add.at(m, (np.asarray(y_pred), np.asarray(y_true)), 1)
    return m


def confusion_metrics(matrix) -> EvalResult:
    m = np.asarray(matrix, dtype=np.int64)
    if m.shape != (3, 3) or (m < 0).any():
        raise ValueError("expected a non-negative 3x3 matrix")
    diag = np.diag(m).astype(float)
    pred_tot = m.sum(axis=1).astype(float)
    act_tot = m.sum(axis=0).astype(float)
    prec = np.divide(diag, pred_tot, out=np.zeros(3), where=pred_tot > 0)
    rec = np.divide(diag, act_tot, out=np.zeros(3), where=act_tot > 0)
    return EvalResult(m, dict(zip(LABELS, prec.tolist())), dict(zip(LABELS, rec.tolist())),
                      float(prec.mean()), float(rec.mean()))


def evaluate(model, X, y) -> EvalResult:
    return confusion_metrics(confusion_matrix(y, model.predict(X)))


# -------------------------------------------------------- cross-validation

def can_stratify(y, folds: int) -> bool:
    y = np.asarray(y)
    return all(np.count_nonzero(y == c) >= folds for c in np.unique(y))


def stratified_folds(y, folds: int, seed) -> list:
    """Seeded fold assignment; stratified unless some class is smaller than ``folds``."""
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    present = np.unique(y)
    if not can_stratify(y, folds):
        log.warning("a class has fewer than %d rows; using unstratified folds", folds)
        return [np.sort(f) for f in np.array_split(rng.permutation(len(y)), folds)]
    buckets = [[] for _ in range(folds)]
    offset = 0
    for c in present:
        idx = rng.permutation(np.flatnonzero(y == c))
        for j, i in enumerate(idx):
            buckets[(offset + j) % folds].append(i)
        offset += len(idx)
    return [np.sort(np.array(b, dtype=np.int64)) for b in buckets]


def cross_validate(X, y, folds: int = 10, seed=0, trainer=train_decision_table,
                   smote_factors=None, smote_k: int = 5) -> EvalResult:
    """k-fold CV with summed confusion matrices.

    If ``smote_factors`` is given, SMOTE is applied to each training split
    only (strict balancing); otherwise the data is used as is.
    """
    X = np.asarray(X, dtype=np.int8)
    y = np.asarray(y, dtype=np.int64)
    if len(y) < folds:
        raise DatasetError(f"need at least {folds} rows for {folds}-fold CV, got {len(y)}")
    partition = stratified_folds(y, folds, _seed_int(seed))
    fold_seeds = spawn_seeds(seed, folds)
    total = np.zeros((3, 3), dtype=np.int64)
    for test_idx, fseed in zip(partition, fold_seeds):
        mask = np.ones(len(y), dtype=bool)
        mask[test_idx] = False
        Xtr, ytr = X[mask], y[mask]
        if smote_factors is not None:
            Xtr, ytr = smote(Xtr, ytr, smote_factors, smote_k, fseed)
        model = trainer(Xtr, ytr, fseed)
        total += confusion_matrix(y[test_idx], model.predict(X[test_idx]))
    res = confusion_metrics(total)
    res.meta = {"folds": folds, "seed": seed, "stratified": can_stratify(y, folds),
                "balancing": "strict" if smote_factors is not None else "none"}
    return res


def cross_system(train_sets, test_set, seed=0, trainer=train_decision_table) -> EvalResult:
    """Train on several systems downsampled to a common size, test on another."""
    train_sets = [d for d in train_sets if len(d)]
    if not train_sets:
        raise DatasetError("empty training pool")
    size = min(len(d) for d in train_sets)
    seeds = spawn_seeds(seed, len(train_sets) + 1)
    Xs, ys = [], []
    for d, s in zip(train_sets, seeds):
        idx = np.sort(np.random.default_rng(s).choice(len(d), size=size, replace=False))
        Xs.append(d.X[idx])
        ys.append(d.y[idx])
    model = trainer(np.concatenate(Xs), np.concatenate(ys), seeds[-1])
    res = evaluate(model, test_set.X, test_set.y)
    res.meta = {"train_size_per_system": size, "train_systems": len(train_sets), "seed": seed}
    return res
