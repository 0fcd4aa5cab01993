"""Per-user comprehension classifier: gradient-boosted trees with logistic loss,
stratified cross-validation, sequential backward feature selection, and the
weighted evaluation metrics used for imbalanced labels."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional, Sequence

import numpy as np
from numba import njit

DEPTH_GRID = (4, 6, 8, 10)
L2_GRID = (1.0, 3.0, 5.0, 7.0)
TEMPERATURE_GRID = (0.2, 0.5, 1.0)
DEFAULT_N_TREES = 100
DEFAULT_LEARNING_RATE = 0.1
DEFAULT_FOLDS = 5
SBS_MARGIN = 0.01
MAX_BINS = 16
MODEL_FORMAT_VERSION = 1

_GAIN_EPS = 1e-12
# boosting rounds stop once mean training logloss drops below this: the
# margins are saturated and further trees cannot change any decision
EARLY_EXIT_LOSS = 0.02


@dataclass(frozen=True)
class Hyperparams:
    tree_depth: int = 6
    l2_leaf_reg: float = 3.0
    bagging_temperature: float = 0.0
    n_trees: int = DEFAULT_N_TREES
    learning_rate: float = DEFAULT_LEARNING_RATE
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.tree_depth < 1:
            raise ValueError("tree_depth must be >= 1")
        if self.bagging_temperature < 0:
            raise ValueError("bagging_temperature must be >= 0")


@dataclass
class Tree:
    """One regression tree as flat arrays; node 0 is the root."""
    feature: np.ndarray  # original feature index per node, -1 at leaves
    threshold: np.ndarray  # raw-value threshold, go left when x <= threshold
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # log-odds contribution at leaves

    def to_record(self, node: int = 0) -> dict:
        if self.feature[node] < 0:
            return {"leaf": float(self.value[node])}
        return {
            "feature": int(self.feature[node]),
            "threshold": float(self.threshold[node]),
            "left": self.to_record(int(self.left[node])),
            "right": self.to_record(int(self.right[node])),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Tree":
        feat, thr, left, right, val = [], [], [], [], []

        def add(node: dict) -> int:
            idx = len(feat)
            feat.append(-1); thr.append(0.0); left.append(-1); right.append(-1); val.append(0.0)
            if "leaf" in node:
                val[idx] = float(node["leaf"])
            else:
                feat[idx] = int(node["feature"])
                thr[idx] = float(node["threshold"])
                left[idx] = add(node["left"])
                right[idx] = add(node["right"])
            return idx

        add(rec)
        return cls(np.array(feat, dtype=np.int32), np.array(thr, dtype=float),
                   np.array(left, dtype=np.int32), np.array(right, dtype=np.int32),
                   np.array(val, dtype=float))


@dataclass
class ComprehensionModel:
    trees: list
    selected_features: list  # original feature indices, ascending
    hyperparams: Hyperparams
    base_score: float
    loss_history: list = field(default_factory=list)


@dataclass
class EvalReport:
    weighted_recall: float
    weighted_precision: float
    weighted_f1: float
    confusion: dict  # tp/fp/fn/tn with "understood" as the positive class
    selected_features: Optional[list] = None

    def to_dict(self) -> dict:
        return asdict(self)


# --- binning ----------------------------------------------------------------

def _bin_columns(X: np.ndarray, max_bins: int = MAX_BINS):
    """Quantile-style binning: per-column uint8 codes plus raw cut values.

    Going left at cut c means x <= cuts[c]; cut index doubles as the split id.
    """
    n, f = X.shape
    codes = np.zeros((n, f), dtype=np.uint8)
    cuts: list[np.ndarray] = []
    for j in range(f):
        col = X[:, j]
        uniq = np.unique(col)
        if len(uniq) <= max_bins:
            cut = (uniq[:-1] + uniq[1:]) / 2.0
        else:
            qs = np.quantile(col, np.linspace(0, 1, max_bins + 1)[1:-1])
            cut = np.unique(qs)
        codes[:, j] = np.searchsorted(cut, col, side="left")
        cuts.append(cut.astype(float))
    return codes, cuts


@njit(cache=True)
def _fit_boosted(codes, y, weights, max_depth, l2, lr, base_score, n_bins,
                 tree_feat, tree_cut, tree_left, tree_right, tree_val, tree_size, losses,
                 val_codes, val_margin, early_exit_loss):
    n, nf = codes.shape
    rounds = weights.shape[0]
    margin = np.full(n, base_score)
    n_val = val_codes.shape[0]
    for i in range(n_val):
        val_margin[i] = base_score
    max_nodes = tree_feat.shape[1]
    node_of = np.zeros(n, np.int32)
    for r in range(rounds):
        p = 1.0 / (1.0 + np.exp(-margin))
        loss = 0.0
        for i in range(n):
            pi = min(max(p[i], 1e-15), 1.0 - 1e-15)
            loss -= y[i] * math.log(pi) + (1.0 - y[i]) * math.log(1.0 - pi)
        losses[r] = loss / n
        if losses[r] < early_exit_loss:
            return r
        g = np.empty(n)
        h = np.empty(n)
        for i in range(n):
            w = weights[r, i]
            g[i] = w * (y[i] - p[i])
            h[i] = w * p[i] * (1.0 - p[i])

        feat = tree_feat[r]
        cutb = tree_cut[r]
        left = tree_left[r]
        right = tree_right[r]
        val = tree_val[r]
        for q in range(max_nodes):
            feat[q] = -1
            left[q] = -1
            right[q] = -1
            val[q] = 0.0
        node_of[:] = 0
        n_nodes = 1
        level_start = 0
        for depth in range(max_depth):
            level_end = n_nodes
            n_level = level_end - level_start
            if n_level == 0:
                break
            hg = np.zeros((n_level, nf, n_bins))
            hh = np.zeros((n_level, nf, n_bins))
            hc = np.zeros((n_level, nf, n_bins), np.int32)
            for i in range(n):
                local = node_of[i] - level_start
                if local < 0:
                    continue
                for j in range(nf):
                    b = codes[i, j]
                    hg[local, j, b] += g[i]
                    hh[local, j, b] += h[i]
                    hc[local, j, b] += 1
            any_split = False
            for local in range(n_level):
                node = level_start + local
                gt = 0.0
                ht = 0.0
                ct = 0
                for b in range(n_bins):
                    gt += hg[local, 0, b]
                    ht += hh[local, 0, b]
                    ct += hc[local, 0, b]
                parent = gt * gt / (ht + l2)
                best_gain = _GAIN_EPS
                best_f = -1
                best_b = -1
                if ct >= 2:
                    for j in range(nf):
                        gl = 0.0
                        hl = 0.0
                        cl = 0
                        for b in range(n_bins - 1):
                            gl += hg[local, j, b]
                            hl += hh[local, j, b]
                            cl += hc[local, j, b]
                            if cl == 0 or cl == ct:
                                continue
                            gr = gt - gl
                            hr = ht - hl
                            gain = gl * gl / (hl + l2) + gr * gr / (hr + l2) - parent
                            if gain > best_gain:
                                best_gain = gain
                                best_f = j
                                best_b = b
                if best_f >= 0:
                    feat[node] = best_f
                    cutb[node] = best_b
                    left[node] = n_nodes
                    right[node] = n_nodes + 1
                    n_nodes += 2
                    any_split = True
                else:
                    val[node] = gt / (ht + l2)
            if any_split:
                for i in range(n):
                    nd = node_of[i]
                    if nd >= level_start and feat[nd] >= 0:
                        if codes[i, feat[nd]] <= cutb[nd]:
                            node_of[i] = left[nd]
                        else:
                            node_of[i] = right[nd]
            level_start = level_end
            if not any_split:
                break
        # leaf values for the last level
        for local_node in range(level_start, n_nodes):
            if feat[local_node] < 0 and left[local_node] < 0:
                gt = 0.0
                ht = 0.0
                for i in range(n):
                    if node_of[i] == local_node:
                        gt += g[i]
                        ht += h[i]
                val[local_node] = gt / (ht + l2)
        if feat[0] < 0 and n_nodes == 1:
            tree_size[r] = 0  # no useful split anywhere: tree contributes nothing
            continue
        tree_size[r] = n_nodes
        for i in range(n):
            margin[i] += lr * val[node_of[i]]
        for i in range(n_val):
            node = 0
            while feat[node] >= 0:
                if val_codes[i, feat[node]] <= cutb[node]:
                    node = left[node]
                else:
                    node = right[node]
            val_margin[i] += lr * val[node]
    return rounds


def _bagging_weights(rng: np.random.Generator, rounds: int, n: int, temperature: float) -> np.ndarray:
    if temperature == 0:
        return np.ones((rounds, n))
    u = 1.0 - rng.random((rounds, n))  # (0, 1]
    return (-np.log(u)) ** temperature


def _base_score(y: np.ndarray) -> float:
    pos = float(y.sum())
    if pos == 0 or pos == len(y):
        raise ValueError("degenerate labels")
    p = pos / len(y)
    return math.log(p / (1 - p))


def _check_training_input(X: np.ndarray, y: np.ndarray) -> None:
    if X.ndim != 2 or len(y) != X.shape[0]:
        raise ValueError("X and y shapes disagree")
    if X.shape[0] < 10:
        raise ValueError("need at least 10 rows")
    if np.isnan(X).any():
        raise ValueError("NaN features")


def _run_boosting(codes: np.ndarray, cuts: list, y: np.ndarray, hp: Hyperparams,
                  rng: np.random.Generator, val_codes: Optional[np.ndarray] = None):
    """Shared fit path; returns (packed tree arrays, rounds, base, losses, val margins)."""
    base_score = _base_score(y)
    n_bins = max((len(c) for c in cuts), default=0) + 1
    weights = _bagging_weights(rng, hp.n_trees, len(y), hp.bagging_temperature)
    if val_codes is None:
        val_codes = np.empty((0, codes.shape[1]), np.uint8)
    val_margin = np.empty(val_codes.shape[0])

    max_nodes = 2 ** (hp.tree_depth + 1) - 1
    packed = tuple(np.zeros((hp.n_trees, max_nodes), dt)
                   for dt in (np.int32, np.int32, np.int32, np.int32, np.float64))
    tree_size = np.zeros(hp.n_trees, np.int32)
    losses = np.zeros(hp.n_trees)
    rounds = _fit_boosted(codes, y, weights, hp.tree_depth, float(hp.l2_leaf_reg),
                          float(hp.learning_rate), base_score, n_bins,
                          *packed, tree_size, losses, val_codes, val_margin,
                          EARLY_EXIT_LOSS)
    return packed, tree_size, int(rounds), base_score, losses, val_margin


def train_gbdt(X: np.ndarray, y: Sequence[bool], hp: Hyperparams,
               feature_indices: Optional[Sequence[int]] = None,
               rng: Optional[np.random.Generator] = None) -> ComprehensionModel:
    """Fit the boosted ensemble; split indices refer to original feature ids."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_training_input(X, y)
    if feature_indices is None:
        feature_indices = list(range(X.shape[1]))
    feature_indices = list(feature_indices)
    if len(feature_indices) != X.shape[1]:
        raise ValueError("feature_indices must name every column of X")
    if rng is None:
        rng = np.random.default_rng(hp.seed)

    codes, cuts = _bin_columns(X)
    packed, tree_size, rounds, base_score, losses, _ = _run_boosting(codes, cuts, y, hp, rng)
    tree_feat, tree_cut, tree_left, tree_right, tree_val = packed

    # raw thresholds: pad per-feature cut arrays into one lookup matrix
    max_cuts = max((len(c) for c in cuts), default=1)
    cut_matrix = np.zeros((len(cuts), max(max_cuts, 1)))
    for j, c in enumerate(cuts):
        cut_matrix[j, :len(c)] = c
    fidx = np.array(feature_indices, dtype=np.int32)

    trees: list[Tree] = []
    for r in range(rounds):
        size = int(tree_size[r])
        if size == 0:
            continue
        feat = tree_feat[r, :size]
        internal = feat >= 0
        thr = np.zeros(size)
        thr[internal] = cut_matrix[feat[internal], tree_cut[r, :size][internal]]
        ofeat = np.where(internal, fidx[np.clip(feat, 0, None)], -1).astype(np.int32)
        trees.append(Tree(ofeat, thr, tree_left[r, :size].copy(),
                          tree_right[r, :size].copy(), tree_val[r, :size].copy()))
    return ComprehensionModel(trees=trees, selected_features=feature_indices,
                              hyperparams=hp, base_score=base_score,
                              loss_history=list(losses[:rounds]))


def _tree_margin(tree: Tree, X: np.ndarray, col_of: dict) -> np.ndarray:
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int32)
    while True:
        internal = tree.feature[node] >= 0
        if not internal.any():
            break
        idx = np.nonzero(internal)[0]
        feats = tree.feature[node[idx]]
        cols = np.array([col_of[f] for f in feats])
        go_left = X[idx, cols] <= tree.threshold[node[idx]]
        node[idx] = np.where(go_left, tree.left[node[idx]], tree.right[node[idx]])
    return tree.value[node]


def predict(model: ComprehensionModel, X: np.ndarray) -> np.ndarray:
    """P(understood) per row; X columns must align with model.selected_features."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(model.selected_features):
        raise ValueError("feature columns do not align with model.selected_features")
    col_of = {f: i for i, f in enumerate(model.selected_features)}
    margin = np.full(X.shape[0], model.base_score)
    for tree in model.trees:
        margin += model.hyperparams.learning_rate * _tree_margin(tree, X, col_of)
    return 1.0 / (1.0 + np.exp(-margin))


def predict_full(model: ComprehensionModel, X_full: np.ndarray) -> np.ndarray:
    """Predict from a full 16-column matrix by selecting the model's features."""
    X_full = np.asarray(X_full, dtype=float)
    return predict(model, X_full[:, model.selected_features])


def classify_threshold(scores: np.ndarray) -> np.ndarray:
    """score >= 0.5 means understood; below triggers simplification."""
    return np.asarray(scores) >= 0.5


# --- metrics ---------------------------------------------------------------

def weighted_metrics(y_true: Sequence[bool], y_pred: Sequence[bool]) -> EvalReport:
    y_true = np.asarray(y_true, dtype=bool)
    y_pred = np.asarray(y_pred, dtype=bool)
    if len(y_true) != len(y_pred):
        raise ValueError("length mismatch")
    if len(y_true) == 0:
        raise ValueError("empty label vectors")
    total = len(y_true)
    w_recall = w_precision = w_f1 = 0.0
    for cls in (True, False):
        support = int((y_true == cls).sum())
        if support == 0:
            continue
        tp = int(((y_true == cls) & (y_pred == cls)).sum())
        fp = int(((y_true != cls) & (y_pred == cls)).sum())
        fn = support - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        weight = support / total
        w_recall += weight * recall
        w_precision += weight * precision
        w_f1 += weight * f1
    tp = int((y_true & y_pred).sum())
    fp = int((~y_true & y_pred).sum())
    fn = int((y_true & ~y_pred).sum())
    tn = total - tp - fp - fn
    return EvalReport(weighted_recall=w_recall, weighted_precision=w_precision,
                      weighted_f1=w_f1, confusion={"tp": tp, "fp": fp, "fn": fn, "tn": tn})


# --- cross-validation and selection ------------------------------------------

def stratified_kfold_indices(y: Sequence[bool], k: int, seed: int) -> list[np.ndarray]:
    y = np.asarray(y, dtype=bool)
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xF01D]))
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in (True, False):
        idx = np.nonzero(y == cls)[0]
        if len(idx) < k:
            raise ValueError(f"class {cls} too small to stratify into {k} folds")
        rng.shuffle(idx)
        for i, sample in enumerate(idx):
            folds[i % k].append(int(sample))
    return [np.array(sorted(f), dtype=int) for f in folds]


def _cv_binned(codes: np.ndarray, cuts: list, y: np.ndarray, hp: Hyperparams, k: int) -> float:
    """CV score on a prebinned matrix; avoids per-fold rebinning and tree unpacking."""
    folds = stratified_kfold_indices(y, k, hp.seed)
    scores = []
    for fold_id, val_idx in enumerate(folds):
        mask = np.ones(len(y), dtype=bool)
        mask[val_idx] = False
        if y[mask].all() or not y[mask].any() or len(y[mask]) < 10:
            raise ValueError("fold too small or single-class; reduce k")
        rng = np.random.default_rng(np.random.SeedSequence([hp.seed, fold_id]))
        *_, val_margin = _run_boosting(codes[mask], cuts, y[mask].astype(float), hp, rng,
                                       val_codes=codes[val_idx])
        preds = val_margin >= 0.0  # sigmoid(m) >= 0.5
        scores.append(weighted_metrics(y[val_idx], preds).weighted_f1)
    return float(np.mean(scores))


def cross_validate(X: np.ndarray, y: Sequence[bool], hp: Hyperparams, k: int = DEFAULT_FOLDS) -> float:
    """Mean held-out weighted F1 over stratified folds."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=bool)
    codes, cuts = _bin_columns(X)
    return _cv_binned(codes, cuts, y, hp, k)


def sequential_backward_selection(X: np.ndarray, y: Sequence[bool], hp: Hyperparams,
                                  k: int = DEFAULT_FOLDS,
                                  feature_indices: Optional[Sequence[int]] = None):
    """Greedy backward elimination; stops when the best removal no longer
    improves the CV weighted F1 by SBS_MARGIN. Returns (selected, trace, cv_f1)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=bool)
    if feature_indices is None:
        feature_indices = list(range(X.shape[1]))
    selected = list(feature_indices)
    if len(selected) < 2:
        raise ValueError("need at least 2 features")
    col_of = {f: i for i, f in enumerate(feature_indices)}
    codes, cuts = _bin_columns(X)

    def score(feats: list) -> float:
        cols = [col_of[f] for f in feats]
        return _cv_binned(np.ascontiguousarray(codes[:, cols]), [cuts[c] for c in cols], y, hp, k)

    current = score(selected)
    trace: list[tuple[int, float]] = []
    while len(selected) > 1:
        best_f1 = -1.0
        best_feat = None
        for f in selected:
            f1 = score([s for s in selected if s != f])
            if f1 > best_f1:
                best_f1 = f1
                best_feat = f
        if best_f1 < current + SBS_MARGIN:
            break
        selected.remove(best_feat)
        current = best_f1
        trace.append((best_feat, best_f1))
    return selected, trace, current


@dataclass
class GridSearchResult:
    best_hp: Hyperparams
    selected_features: list
    cv_f1: float
    cells: list  # (hp, selected, cv_f1) per grid cell


def grid_cells() -> list[tuple[int, float, float]]:
    return list(itertools.product(DEPTH_GRID, L2_GRID, TEMPERATURE_GRID))


def grid_search_train(X_train: np.ndarray, y_train: Sequence[bool], k: int = DEFAULT_FOLDS,
                      seed: int = 0, n_trees: int = DEFAULT_N_TREES,
                      learning_rate: float = DEFAULT_LEARNING_RATE):
    """48-cell grid search; each cell runs SBS under its own derived seed.

    Ties break toward smaller depth, then l2, then temperature; the winner is
    refit on the full training set with its surviving features.
    """
    X_train = np.asarray(X_train, dtype=float)
    y_train = np.asarray(y_train, dtype=bool)
    cells = []
    best = None
    for idx, (depth, l2, temp) in enumerate(grid_cells()):
        cell_seed = int(np.random.SeedSequence([seed, idx]).generate_state(1)[0])
        hp = Hyperparams(tree_depth=depth, l2_leaf_reg=l2, bagging_temperature=temp,
                         n_trees=n_trees, learning_rate=learning_rate, seed=cell_seed)
        selected, trace, cv_f1 = sequential_backward_selection(X_train, y_train, hp, k)
        cells.append((hp, selected, cv_f1))
        if best is None or cv_f1 > best[2]:
            best = (hp, selected, cv_f1)
    hp, selected, cv_f1 = best
    rng = np.random.default_rng(np.random.SeedSequence([hp.seed, 0x5EED]))
    model = train_gbdt(X_train[:, selected], y_train, hp,
                       feature_indices=selected, rng=rng)
    return model, GridSearchResult(best_hp=hp, selected_features=selected,
                                   cv_f1=cv_f1, cells=cells)


def split_dataset(X: np.ndarray, y: Sequence[bool], seed: int, train_frac: float = 0.7):
    """Stratified 7:3 split; returns (train_idx, test_idx), deterministic per seed."""
    y = np.asarray(y, dtype=bool)
    if len(y) < 10:
        raise ValueError("need at least 10 rows")
    if y.all() or not y.any():
        raise ValueError("degenerate labels")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5B117]))
    train, test = [], []
    for cls in (True, False):
        idx = np.nonzero(y == cls)[0]
        n_train = int(round(train_frac * len(idx)))
        if n_train == 0 or n_train == len(idx):
            raise ValueError(f"class {cls} too small to split")
        rng.shuffle(idx)
        train.extend(idx[:n_train])
        test.extend(idx[n_train:])
    return np.array(sorted(train), dtype=int), np.array(sorted(test), dtype=int)


# --- persistence -------------------------------------------------------------

def model_to_dict(model: ComprehensionModel) -> dict:
    return {
        "version": MODEL_FORMAT_VERSION,
        "base_score": model.base_score,
        "selected_features": list(model.selected_features),
        "hyperparams": asdict(model.hyperparams),
        "trees": [t.to_record() for t in model.trees],
    }


def model_from_dict(d: dict) -> ComprehensionModel:
    if d.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model version: {d.get('version')}")
    return ComprehensionModel(
        trees=[Tree.from_record(r) for r in d["trees"]],
        selected_features=list(d["selected_features"]),
        hyperparams=Hyperparams(**d["hyperparams"]),
        base_score=float(d["base_score"]),
    )


def save_model(path, model: ComprehensionModel) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_dict(model), f, indent=1)


def load_model(path) -> ComprehensionModel:
    with open(path, encoding="utf-8") as f:
        return model_from_dict(json.load(f))
