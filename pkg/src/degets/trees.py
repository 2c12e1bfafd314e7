"""Regression trees: CART fitting, extremely randomized ensembles,
leaf partitions and cost-complexity pruning.

Trees serve two roles here. As regressors they predict leaf means; as
partitioners they map training rows to leaf subpopulations that the
augmentation pipeline models one mixture at a time. Splits maximize the
reduction in the sum of squared errors; leaves remember their training
rows and outcome sums so pruning never needs the raw outcomes again.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

# Gains below this (relative to the outcome's sum of squares) are treated
# as zero so cancellation noise never splits a constant node.
_GAIN_RTOL = 1e-10


@dataclass
class TreeNode:
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    leaf_id: int = -1
    prediction: float = 0.0
    row_ids: np.ndarray | None = None
    y_sum: float = 0.0
    y_sumsq: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass
class TreeModel:
    nodes: list[TreeNode]
    max_depth: int
    min_leaf: int
    seed: int
    n_features: int
    max_leaf_nodes: int | None = None

    @property
    def n_leaves(self) -> int:
        return sum(1 for n in self.nodes if n.is_leaf)

    def leaves(self) -> list[TreeNode]:
        out = [n for n in self.nodes if n.is_leaf]
        out.sort(key=lambda n: n.leaf_id)
        return out


@dataclass
class ForestModel:
    trees: list[TreeModel]
    n_estimators: int
    seed: int


@dataclass
class LeafPartition:
    """Row indices per leaf, in leaf-id order, for one fitted tree."""

    subpopulations: list[np.ndarray]
    source_tree: TreeModel = field(repr=False, default=None)


def _node_sse(node: TreeNode) -> float:
    n = len(node.row_ids)
    return node.y_sumsq - node.y_sum**2 / n


def _best_split_exhaustive(X, y, rows, min_leaf):
    """Best (feature, threshold, gain) over all midpoint thresholds.

    Ties keep the lowest feature index, then the lowest threshold; a
    candidate is valid only when both children hold at least min_leaf
    rows. Returns None when no candidate strictly reduces the SSE.
    """
    ysub = y[rows]
    n = len(rows)
    total_sum = ysub.sum()
    total_sq = float(ysub @ ysub)
    sse_parent = total_sq - total_sum**2 / n
    floor = _GAIN_RTOL * max(1.0, total_sq)
    best = None
    for f in range(X.shape[1]):
        xs = X[rows, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        ys_sorted = ysub[order]
        csum = np.cumsum(ys_sorted)
        csq = np.cumsum(ys_sorted**2)
        # split after position i (1-based left size i+1)
        idx = np.arange(n - 1)
        valid = (xs_sorted[:-1] < xs_sorted[1:]) & (idx + 1 >= min_leaf) & (n - idx - 1 >= min_leaf)
        if not valid.any():
            continue
        cand = idx[valid]
        n_left = cand + 1
        n_right = n - n_left
        sse_left = csq[cand] - csum[cand] ** 2 / n_left
        sse_right = (total_sq - csq[cand]) - (total_sum - csum[cand]) ** 2 / n_right
        gains = sse_parent - sse_left - sse_right
        j = int(np.argmax(gains))  # first max -> lowest threshold
        gain = float(gains[j])
        if gain > floor and (best is None or gain > best[2]):
            thr = float((xs_sorted[cand[j]] + xs_sorted[cand[j] + 1]) / 2.0)
            best = (f, thr, gain)
    return best


def _best_split_random(X, y, rows, min_leaf, rng):
    """Extra-trees candidate: one uniform threshold per feature.

    One uniform is drawn for every feature (even constant ones, keeping
    the stream aligned); the best positive-gain candidate wins, ties to
    the lowest feature index.
    """
    ysub = y[rows]
    ysq = ysub * ysub
    n = len(rows)
    total_sum = ysub.sum()
    total_sq = float(ysq.sum())
    sse_parent = total_sq - total_sum**2 / n
    floor = _GAIN_RTOL * max(1.0, total_sq)
    draws = rng.uniform(size=X.shape[1])
    best = None
    Xsub = X[rows]
    for f in range(X.shape[1]):
        xs = Xsub[:, f]
        lo = xs.min()
        hi = xs.max()
        if not lo < hi:
            continue
        thr = float(lo + draws[f] * (hi - lo))
        mask = xs <= thr
        n_left = int(np.count_nonzero(mask))
        n_right = n - n_left
        if n_left < min_leaf or n_right < min_leaf:
            continue
        sum_left = float(ysub @ mask)
        sq_left = float(ysq @ mask)
        sse_left = sq_left - sum_left**2 / n_left
        sse_right = (total_sq - sq_left) - (total_sum - sum_left) ** 2 / n_right
        gain = sse_parent - sse_left - sse_right
        if gain > floor and (best is None or gain > best[2]):
            best = (f, thr, gain)
    return best


def _finalize_leaf(node: TreeNode, y: np.ndarray, rows: np.ndarray) -> None:
    ysub = y[rows]
    total = float(ysub.sum())
    node.prediction = total / len(rows)
    node.row_ids = rows
    node.y_sum = total
    node.y_sumsq = float(ysub @ ysub)


def _grow(X, y, max_depth, min_leaf, seed, chooser, max_leaf_nodes=None) -> TreeModel:
    if len(y) == 0:
        raise ValueError("cannot fit a tree on zero rows")
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    if min_leaf < 1:
        raise ValueError(f"min_leaf must be >= 1, got {min_leaf}")
    if max_leaf_nodes is not None and max_leaf_nodes < 2:
        raise ValueError(f"max_leaf_nodes must be >= 2, got {max_leaf_nodes}")
    if max_leaf_nodes is None:
        nodes = _grow_depth_first(X, y, max_depth, min_leaf, chooser)
    else:
        nodes = _grow_best_first(X, y, max_depth, min_leaf, chooser, max_leaf_nodes)
    return TreeModel(nodes=nodes, max_depth=max_depth, min_leaf=min_leaf, seed=seed,
                     n_features=X.shape[1], max_leaf_nodes=max_leaf_nodes)


def _grow_depth_first(X, y, max_depth, min_leaf, chooser) -> list[TreeNode]:
    nodes: list[TreeNode] = []
    leaf_counter = 0

    def build(rows: np.ndarray, depth: int) -> int:
        nonlocal leaf_counter
        nid = len(nodes)
        nodes.append(TreeNode())
        split = None
        if depth < max_depth and len(rows) >= 2 * min_leaf:
            split = chooser(X, y, rows, min_leaf)
        node = nodes[nid]
        if split is None:
            node.leaf_id = leaf_counter
            leaf_counter += 1
            _finalize_leaf(node, y, rows)
        else:
            f, thr, _ = split
            mask = X[rows, f] <= thr
            node.feature = f
            node.threshold = thr
            node.left = build(rows[mask], depth + 1)
            node.right = build(rows[~mask], depth + 1)
        return nid

    build(np.arange(len(y), dtype=np.int64), 0)
    return nodes


def _grow_best_first(X, y, max_depth, min_leaf, chooser, max_leaf_nodes) -> list[TreeNode]:
    """Expand the frontier node with the largest split gain until the leaf
    budget is reached; remaining frontier nodes finalize as leaves. Gain
    ties break toward the earlier-created node so growth is deterministic.
    """
    nodes: list[TreeNode] = [TreeNode()]
    heap: list = []
    counter = 0

    def push(nid: int, rows: np.ndarray, depth: int) -> None:
        nonlocal counter
        split = None
        if depth < max_depth and len(rows) >= 2 * min_leaf:
            split = chooser(X, y, rows, min_leaf)
        if split is None:
            _finalize_leaf(nodes[nid], y, rows)
        else:
            heapq.heappush(heap, (-split[2], counter, nid, rows, depth, split))
            counter += 1

    push(0, np.arange(len(y), dtype=np.int64), 0)
    n_leaves = 1
    while heap and n_leaves < max_leaf_nodes:
        _, _, nid, rows, depth, split = heapq.heappop(heap)
        f, thr, _ = split
        node = nodes[nid]
        node.feature = f
        node.threshold = thr
        mask = X[rows, f] <= thr
        node.left = len(nodes)
        nodes.append(TreeNode())
        node.right = len(nodes)
        nodes.append(TreeNode())
        push(node.left, rows[mask], depth + 1)
        push(node.right, rows[~mask], depth + 1)
        n_leaves += 1
    while heap:
        _, _, nid, rows, _, _ = heapq.heappop(heap)
        _finalize_leaf(nodes[nid], y, rows)

    leaf_counter = 0

    def assign(nid: int) -> None:
        nonlocal leaf_counter
        node = nodes[nid]
        if node.is_leaf:
            node.leaf_id = leaf_counter
            leaf_counter += 1
        else:
            assign(node.left)
            assign(node.right)

    assign(0)
    return nodes


def fit_tree(X, y, max_depth: int, min_leaf: int = 5, seed: int = 0,
             max_leaf_nodes: int | None = None) -> TreeModel:
    """Greedy CART regression tree on (X, y).

    Thresholds are midpoints between consecutive sorted unique feature
    values; a node becomes a leaf at max_depth, below 2 * min_leaf rows,
    or when no split strictly reduces the SSE. With max_leaf_nodes the
    tree grows best-first (largest gain expanded next) until the leaf
    budget is spent. The fit is deterministic; seed is stored for
    provenance only.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return _grow(X, y, max_depth, min_leaf, seed, _best_split_exhaustive, max_leaf_nodes)


def fit_extra_trees(X, y, n_estimators: int = 10, max_depth: int = 10,
                    min_leaf: int = 5, seed: int = 0,
                    max_leaf_nodes: int | None = None) -> ForestModel:
    """Extremely randomized forest: per-node random thresholds, no bootstrap.

    Every tree sees all rows; every feature proposes one uniform threshold
    between its node-local min and max and the best candidate by SSE
    reduction wins. With max_leaf_nodes each member grows best-first under
    the leaf budget. Tree seeds are spawned from seed, so members are
    independent and the fit is schedule independent.
    """
    if n_estimators < 1:
        raise ValueError(f"n_estimators must be >= 1, got {n_estimators}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    children = np.random.SeedSequence(seed).spawn(n_estimators)
    trees = []
    for i in range(n_estimators):
        rng = np.random.default_rng(children[i])

        def chooser(Xc, yc, rows, ml, _rng=rng):
            return _best_split_random(Xc, yc, rows, ml, _rng)

        trees.append(_grow(X, y, max_depth, min_leaf, seed, chooser, max_leaf_nodes))
    return ForestModel(trees=trees, n_estimators=n_estimators, seed=seed)


def _route(model: TreeModel, X: np.ndarray) -> np.ndarray:
    """Node index of the leaf each row lands in."""
    out = np.zeros(len(X), dtype=np.int64)
    stack = [(0, np.arange(len(X), dtype=np.int64))]
    while stack:
        nid, rows = stack.pop()
        if len(rows) == 0:
            continue
        node = model.nodes[nid]
        if node.is_leaf:
            out[rows] = nid
        else:
            mask = X[rows, node.feature] <= node.threshold
            stack.append((node.left, rows[mask]))
            stack.append((node.right, rows[~mask]))
    return out


def assign_leaves(model: TreeModel, X) -> LeafPartition:
    """Partition rows of X by the leaf they fall into.

    Subpopulations come back in leaf-id order; they are disjoint and
    cover every row. On the training matrix every subpopulation is
    nonempty by construction.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != model.n_features:
        raise ValueError("feature count does not match the fitted tree")
    landed = _route(model, X)
    leaf_nid = {n.leaf_id: i for i, n in enumerate(model.nodes) if n.is_leaf}
    subpops = [
        np.nonzero(landed == leaf_nid[k])[0].astype(np.int64)
        for k in range(len(leaf_nid))
    ]
    return LeafPartition(subpopulations=subpops, source_tree=model)


def predict_tree(model: TreeModel | ForestModel, X) -> np.ndarray:
    """Leaf-mean predictions; a forest averages its members."""
    X = np.asarray(X, dtype=np.float64)
    if isinstance(model, ForestModel):
        return np.mean([predict_tree(t, X) for t in model.trees], axis=0)
    if X.shape[1] != model.n_features:
        raise ValueError("feature count does not match the fitted tree")
    landed = _route(model, X)
    preds = np.array([model.nodes[i].prediction for i in range(len(model.nodes))])
    return preds[landed]


def leaf_boxes(model: TreeModel) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-leaf feature cells (lo, hi) in leaf-id order.

    A leaf's cell is {x : lo < x <= hi} componentwise, with infinities
    where the path never constrains a feature; the cells partition the
    feature space exactly as routing does.
    """
    boxes: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def walk(nid: int, lo: np.ndarray, hi: np.ndarray) -> None:
        node = model.nodes[nid]
        if node.is_leaf:
            boxes[node.leaf_id] = (lo, hi)
            return
        hi_left = hi.copy()
        hi_left[node.feature] = min(hi_left[node.feature], node.threshold)
        lo_right = lo.copy()
        lo_right[node.feature] = max(lo_right[node.feature], node.threshold)
        walk(node.left, lo, hi_left)
        walk(node.right, lo_right, hi)

    walk(0, np.full(model.n_features, -np.inf), np.full(model.n_features, np.inf))
    return [boxes[k] for k in range(len(boxes))]


def rule_count(model: TreeModel) -> int:
    """Number of leaves, i.e. one decision rule per root-to-leaf path."""
    return model.n_leaves


def export_rules(model: TreeModel, feature_names: list[str] | None = None) -> str:
    """Debug listing: one line per leaf, predicates joined by 'and'."""
    names = feature_names or [f"x{j}" for j in range(model.n_features)]
    lines: list[str] = []

    def walk(nid: int, preds: list[str]) -> None:
        node = model.nodes[nid]
        if node.is_leaf:
            clause = " and ".join(preds) if preds else "(always)"
            lines.append(f"{clause} -> {node.prediction:.6g}")
        else:
            name = names[node.feature]
            walk(node.left, preds + [f"{name} <= {node.threshold:.6g}"])
            walk(node.right, preds + [f"{name} > {node.threshold:.6g}"])

    walk(0, [])
    return "\n".join(lines)


def _effective_leaves(model: TreeModel, nid: int, pruned_at: set[int]) -> list[int]:
    if nid in pruned_at or model.nodes[nid].is_leaf:
        return [nid]
    node = model.nodes[nid]
    return _effective_leaves(model, node.left, pruned_at) + _effective_leaves(
        model, node.right, pruned_at
    )


def _collapse_stats(model: TreeModel, nid: int) -> tuple[np.ndarray, float, float]:
    """(row ids, y sum, y sumsq) over the original subtree below nid."""
    ids, s, sq = [], 0.0, 0.0
    stack = [nid]
    while stack:
        node = model.nodes[stack.pop()]
        if node.is_leaf:
            ids.append(node.row_ids)
            s += node.y_sum
            sq += node.y_sumsq
        else:
            stack.extend((node.left, node.right))
    return np.sort(np.concatenate(ids)), s, sq


def _collapsed_sse(model: TreeModel, nid: int) -> float:
    ids, s, sq = _collapse_stats(model, nid)
    return sq - s**2 / len(ids)


def cost_complexity_path(model: TreeModel) -> list[tuple[float, frozenset[int]]]:
    """Weakest-link pruning path: (critical alpha, nodes collapsed) pairs.

    The first entry is (0.0, nothing pruned); each following entry
    collapses the internal nodes whose per-leaf SSE increase is minimal.
    Critical alphas are nondecreasing.
    """
    pruned_at: set[int] = set()
    path = [(0.0, frozenset())]
    while len(_effective_leaves(model, 0, pruned_at)) > 1:
        candidates = []
        stack = [0]
        while stack:
            nid = stack.pop()
            if nid in pruned_at or model.nodes[nid].is_leaf:
                continue
            leaves = _effective_leaves(model, nid, pruned_at)
            r_subtree = sum(_collapsed_sse(model, lid) for lid in leaves)
            g = (_collapsed_sse(model, nid) - r_subtree) / (len(leaves) - 1)
            candidates.append((g, nid))
            stack.extend((model.nodes[nid].left, model.nodes[nid].right))
        g_min = min(g for g, _ in candidates)
        tol = 1e-12 * max(1.0, abs(g_min))
        for g, nid in candidates:
            if g <= g_min + tol:
                pruned_at.add(nid)
        # collapsed descendants of a collapsed node are redundant
        pruned_at = {
            nid
            for nid in pruned_at
            if not any(a in pruned_at for a in _ancestors(model, nid))
        }
        path.append((max(g_min, path[-1][0]), frozenset(pruned_at)))
    return path


def _ancestors(model: TreeModel, nid: int) -> list[int]:
    parents = {}
    for i, node in enumerate(model.nodes):
        if not node.is_leaf:
            parents[node.left] = i
            parents[node.right] = i
    out = []
    while nid in parents:
        nid = parents[nid]
        out.append(nid)
    return out


def _build_pruned(model: TreeModel, pruned_at: frozenset[int]) -> TreeModel:
    nodes: list[TreeNode] = []
    leaf_counter = 0

    def copy(nid: int) -> int:
        nonlocal leaf_counter
        src = model.nodes[nid]
        out = len(nodes)
        nodes.append(TreeNode())
        node = nodes[out]
        if nid in pruned_at or src.is_leaf:
            ids, s, sq = _collapse_stats(model, nid)
            node.leaf_id = leaf_counter
            leaf_counter += 1
            node.row_ids = ids
            node.y_sum = s
            node.y_sumsq = sq
            node.prediction = s / len(ids)
        else:
            node.feature = src.feature
            node.threshold = src.threshold
            node.left = copy(src.left)
            node.right = copy(src.right)
        return out

    copy(0)
    return TreeModel(nodes=nodes, max_depth=model.max_depth, min_leaf=model.min_leaf,
                     seed=model.seed, n_features=model.n_features,
                     max_leaf_nodes=model.max_leaf_nodes)


def prune_cost_complexity(model: TreeModel, alphas, X_val, y_val) -> TreeModel:
    """Weakest-link pruning with alpha chosen by validation squared error.

    For each candidate alpha the optimal subtree is the path entry with
    the largest critical alpha <= alpha; among candidates the one with
    minimal validation SSE wins, ties going to the smaller tree. The
    result reuses the original split parameters, so it is a subtree of
    the input.
    """
    alphas = sorted(set(float(a) for a in alphas))
    if not alphas:
        raise ValueError("need at least one candidate alpha")
    if any(a < 0 for a in alphas):
        raise ValueError("alphas must be nonnegative")
    X_val = np.asarray(X_val, dtype=np.float64)
    y_val = np.asarray(y_val, dtype=np.float64)
    path = cost_complexity_path(model)
    chosen: dict[frozenset[int], TreeModel] = {}
    for alpha in alphas:
        entry = path[0]
        for crit, pruned in path:
            if crit <= alpha:
                entry = (crit, pruned)
            else:
                break
        chosen.setdefault(entry[1], _build_pruned(model, entry[1]))
    best = None
    for sub in chosen.values():
        resid = y_val - predict_tree(sub, X_val)
        sse = float(resid @ resid)
        key = (sse, sub.n_leaves)
        if best is None or key < best[0]:
            best = (key, sub)
    return best[1]


__all__ = [
    "ForestModel",
    "LeafPartition",
    "TreeModel",
    "TreeNode",
    "assign_leaves",
    "cost_complexity_path",
    "export_rules",
    "fit_extra_trees",
    "fit_tree",
    "leaf_boxes",
    "predict_tree",
    "prune_cost_complexity",
    "rule_count",
]
