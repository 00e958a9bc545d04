"""
Random forest of Gini classification trees grown on bootstrap resamples.
"""

import math

import numpy as np
from numba import njit

from ..popgen import DevelopmentSample
from ..seeding import generator
from .design import column_scale
from .schemas import Diagnostics, FittedModel, TreeArrays

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


MIN_GAIN = 1e-12


@njit(cache=True)
def _gini(events, count):
    if count == 0:
        return 0.0
    p = events / count
    return 2.0 * p * (1.0 - p)


@njit(cache=True)
def _best_split(X, y, rows, columns, min_leaf):
    """Best (column, value, gain) over the candidate columns; column -1 when none."""
    n = rows.shape[0]
    node_y = y[rows]
    total_events = node_y.sum()
    parent = _gini(total_events, n)
    best_column = -1
    best_value = 0.0
    best_gain = MIN_GAIN
    for c in columns:
        values = X[rows, c]
        order = np.argsort(values, kind="mergesort")
        sorted_values = values[order]
        sorted_y = node_y[order]
        left_events = 0.0
        for i in range(n - 1):
            left_events += sorted_y[i]
            if sorted_values[i] == sorted_values[i + 1]:
                continue
            n_left = i + 1
            n_right = n - n_left
            if n_left < min_leaf or n_right < min_leaf:
                continue
            impurity = (
                n_left * _gini(left_events, n_left)
                + n_right * _gini(total_events - left_events, n_right)
            ) / n
            gain = parent - impurity
            if gain > best_gain:
                best_gain = gain
                best_column = c
                value = 0.5 * (sorted_values[i] + sorted_values[i + 1])
                if value >= sorted_values[i + 1]:
                    value = sorted_values[i]
                best_value = value
    return best_column, best_value, best_gain


@njit(cache=True)
def _traverse(X, split_column, split_value, left, right, leaf_probability):
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        node = 0
        while split_column[node] >= 0:
            if X[i, split_column[node]] <= split_value[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = leaf_probability[node]
    return out


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    max_depth: int,
    mtry: int,
    min_leaf: int,
    rng: np.random.Generator,
) -> TreeArrays:
    """Grow one tree depth-first; rows go left when x <= split value."""
    n_columns = X.shape[1]
    split_column = [-1]
    split_value = [0.0]
    left = [-1]
    right = [-1]
    leaf_probability = [float(y[rows].mean())]

    stack = [(0, rows, 0)]
    while stack:
        node, node_rows, depth = stack.pop()
        probability = leaf_probability[node]
        if depth >= max_depth or node_rows.shape[0] < 2 * min_leaf or probability in (0.0, 1.0):
            continue
        columns = rng.choice(n_columns, size=min(mtry, n_columns), replace=False).astype(np.int64)
        column, value, _ = _best_split(X, y, node_rows, columns, min_leaf)
        if column < 0:
            continue

        goes_left = X[node_rows, column] <= value
        children = []
        for child_rows in (node_rows[goes_left], node_rows[~goes_left]):
            children.append(len(split_column))
            split_column.append(-1)
            split_value.append(0.0)
            left.append(-1)
            right.append(-1)
            leaf_probability.append(float(y[child_rows].mean()))
        split_column[node] = int(column)
        split_value[node] = float(value)
        left[node], right[node] = children
        stack.append((children[1], node_rows[~goes_left], depth + 1))
        stack.append((children[0], node_rows[goes_left], depth + 1))

    return TreeArrays(
        split_column=split_column,
        split_value=split_value,
        left=left,
        right=right,
        leaf_probability=leaf_probability,
    )


def predict_tree(tree: TreeArrays, X: np.ndarray) -> np.ndarray:
    return _traverse(
        np.ascontiguousarray(X, dtype=np.float64),
        np.asarray(tree.split_column, dtype=np.int64),
        np.asarray(tree.split_value, dtype=np.float64),
        np.asarray(tree.left, dtype=np.int64),
        np.asarray(tree.right, dtype=np.int64),
        np.asarray(tree.leaf_probability, dtype=np.float64),
    )


def predict_forest(trees: list[TreeArrays], X: np.ndarray) -> np.ndarray:
    """Mean leaf probability over trees."""
    total = np.zeros(X.shape[0])
    for tree in trees:
        total += predict_tree(tree, X)
    return total / len(trees)


def fit_random_forest(
    sample: DevelopmentSample,
    n_trees: int = 100,
    max_depth: int = 3,
    mtry: int | None = None,
    min_leaf: int = 1,
    rng_seed: int = 0,
) -> FittedModel:
    """Bagged Gini trees; each tree's stream is keyed by (rng_seed, tree index)."""
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if max_depth < 0 or min_leaf < 1:
        raise ValueError("max_depth must be >= 0 and min_leaf >= 1")
    X = np.ascontiguousarray(sample.casemix.rows, dtype=np.float64)
    y = np.asarray(sample.outcome, dtype=np.float64)
    n, n_columns = X.shape
    mtry = mtry or max(1, math.ceil(math.sqrt(n_columns)))

    trees = []
    for index in range(n_trees):
        rng = generator(rng_seed, index)
        rows = rng.integers(0, n, size=n)
        if n_columns == 0:
            rows_y = float(y[rows].mean())
            trees.append(TreeArrays([-1], [0.0], [-1], [-1], [rows_y]))
            continue
        trees.append(grow_tree(X, y, rows, max_depth, mtry, min_leaf, rng))

    return FittedModel(
        kind="forest",
        column_names=sample.casemix.names,
        scale=column_scale(sample.casemix),
        forest=trees,
        diagnostics=Diagnostics(converged=True, iterations=n_trees),
    )
