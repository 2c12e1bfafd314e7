"""Tree-partitioned Gaussian-mixture augmentation.

The pipeline splits training data by treatment group, fits a regression
tree (or an extremely randomized forest) per group over covariates
versus outcome, models each leaf's joint (covariates, outcome) vector
with a BIC-selected Gaussian mixture, and samples an equal share of the
generation budget from every leaf. Generated rows inherit the group's
treatment label; merging them with the originals rebalances thin regions
without touching a single original value.

Defaults: tree depth max(1, ceil(log2(d)) - 1), budget half the training
size, 1 to 5 mixture components, 10 forest members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, OutcomeKind, save_csv, split_by_treatment
from .gmm import sample as gmm_sample
from .gmm import select_components
from .trees import assign_leaves, fit_extra_trees, fit_tree, leaf_boxes

DEGEDT = "degedt"
DEGEF = "degef"
VARIANTS = (DEGEDT, DEGEF)

# substream tags under plan.seed
_TAG_TREE, _TAG_GMM, _TAG_DRAW = 0, 1, 2


@dataclass(frozen=True)
class AugmentationPlan:
    """Resolved knobs for one augmentation run."""

    n_generated: int
    max_depth: int
    k_range: tuple[int, int] = (1, 5)
    variant: str = DEGEF
    n_estimators: int = 10
    min_leaf: int = 5
    seed: int = 1

    def __post_init__(self):
        if self.n_generated < 0:
            raise ValueError(f"n_generated must be >= 0, got {self.n_generated}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        lo, hi = self.k_range
        if not 1 <= lo <= hi:
            raise ValueError(f"invalid component range {self.k_range}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got '{self.variant}'")
        if self.n_estimators < 1:
            raise ValueError(f"n_estimators must be >= 1, got {self.n_estimators}")
        if self.min_leaf < 1:
            raise ValueError(f"min_leaf must be >= 1, got {self.min_leaf}")


def default_plan(train: Dataset, variant: str = DEGEF, seed: int = 1) -> AugmentationPlan:
    """Published defaults resolved against the training data.

    Depth is ceil(log2(d)) - 1 floored at 1; the budget is half the
    training size (rounded).
    """
    depth = max(1, math.ceil(math.log2(max(train.d, 1))) - 1)
    return AugmentationPlan(
        n_generated=int(round(0.5 * train.n)),
        max_depth=depth,
        variant=variant,
        seed=seed,
    )


@dataclass(frozen=True)
class Provenance:
    """Per-generated-row origin, aligned with the generated rows in order:
    source group label, forest member (0 for the single-tree variant) and
    leaf id within that tree."""

    group: np.ndarray
    tree_id: np.ndarray
    leaf_id: np.ndarray


@dataclass(frozen=True)
class AugmentedDataset:
    merged: Dataset
    generated_mask: np.ndarray
    provenance: Provenance

    @property
    def n_generated(self) -> int:
        return int(self.generated_mask.sum())


def _leaf_budgets(total: int, n_leaves: int) -> np.ndarray:
    """Equal split of a group budget: floor everywhere, remainder one per
    leaf in leaf-id order. Sums exactly to total."""
    base, extra = divmod(total, n_leaves)
    counts = np.full(n_leaves, base, dtype=np.int64)
    counts[:extra] += 1
    return counts


def _leaf_matrix(group: Dataset, rows: np.ndarray) -> np.ndarray:
    return np.column_stack([group.covariates[rows], group.outcome[rows]])


def _in_cell(X: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.all((X > lo) & (X <= hi), axis=1)


def _sample_in_cell(model, count, rng, lo, hi) -> np.ndarray:
    """Mixture draws whose covariate part lies inside the leaf cell (lo, hi].

    The partition assigns each leaf a disjoint feature-space cell, so a
    leaf's generative model only owns mass inside its own cell; draws that
    land outside are redrawn. After the round cap any stragglers clamp
    into the cell so the draw count stays exact.
    """
    d = len(lo)
    out = gmm_sample(model, count, rng)
    for _ in range(100):
        bad = np.nonzero(~_in_cell(out[:, :d], lo, hi))[0]
        if len(bad) == 0:
            return out
        out[bad] = gmm_sample(model, len(bad), rng)
    bad = np.nonzero(~_in_cell(out[:, :d], lo, hi))[0]
    if len(bad):
        floor = np.nextafter(lo, np.inf)
        out[bad, :d] = np.minimum(np.maximum(out[bad, :d], floor), hi)
    return out


def _seed(plan_seed: int, *tags: int) -> int:
    return int(np.random.SeedSequence([plan_seed, *tags]).generate_state(1, np.uint32)[0])


def _generate_degedt(group: Dataset, label: int, budget: int, plan: AugmentationPlan):
    tree = fit_tree(group.covariates, group.outcome, plan.max_depth, plan.min_leaf,
                    seed=_seed(plan.seed, label, _TAG_TREE))
    partition = assign_leaves(tree, group.covariates)
    boxes = leaf_boxes(tree)
    n_leaves = len(partition.subpopulations)
    counts = _leaf_budgets(budget, n_leaves)
    ks = range(plan.k_range[0], plan.k_range[1] + 1)
    draws, tree_ids, leaf_ids = [], [], []
    for leaf, rows in enumerate(partition.subpopulations):
        if counts[leaf] == 0:
            continue
        model = select_components(_leaf_matrix(group, rows), ks,
                                  seed=_seed(plan.seed, label, _TAG_GMM, 0, leaf))
        rng = np.random.default_rng(
            np.random.SeedSequence([plan.seed, label, _TAG_DRAW, 0, leaf]))
        lo, hi = boxes[leaf]
        draws.append(_sample_in_cell(model, int(counts[leaf]), rng, lo, hi))
        tree_ids.append(np.zeros(counts[leaf], dtype=np.int64))
        leaf_ids.append(np.full(counts[leaf], leaf, dtype=np.int64))
    return draws, tree_ids, leaf_ids


def _generate_degef(group: Dataset, label: int, budget: int, plan: AugmentationPlan):
    """Per draw: a uniformly random forest member, then a uniformly random
    leaf of that member, then one mixture sample from the leaf. Draws are
    batched per (tree, leaf) pair on derived substreams, which keeps the
    result independent of fitting order."""
    forest = fit_extra_trees(group.covariates, group.outcome, plan.n_estimators,
                             plan.max_depth, plan.min_leaf,
                             seed=_seed(plan.seed, label, _TAG_TREE))
    partitions = [assign_leaves(t, group.covariates) for t in forest.trees]
    boxes_by_tree = [leaf_boxes(t) for t in forest.trees]
    leaf_counts = np.array([len(p.subpopulations) for p in partitions])
    ks = range(plan.k_range[0], plan.k_range[1] + 1)
    rng = np.random.default_rng(np.random.SeedSequence([plan.seed, label, _TAG_DRAW]))
    tree_choice = rng.integers(0, plan.n_estimators, size=budget)
    leaf_choice = (rng.random(budget) * leaf_counts[tree_choice]).astype(np.int64)
    out = np.empty((budget, group.d + 1))
    for ti, li in sorted(set(zip(tree_choice.tolist(), leaf_choice.tolist()))):
        sel = np.nonzero((tree_choice == ti) & (leaf_choice == li))[0]
        rows = partitions[ti].subpopulations[li]
        model = select_components(_leaf_matrix(group, rows), ks,
                                  seed=_seed(plan.seed, label, _TAG_GMM, ti, li))
        draw_rng = np.random.default_rng(
            np.random.SeedSequence([plan.seed, label, _TAG_DRAW, ti, li]))
        lo, hi = boxes_by_tree[ti][li]
        out[sel] = _sample_in_cell(model, len(sel), draw_rng, lo, hi)
    return [out], [tree_choice], [leaf_choice]


def augment(train: Dataset, plan: AugmentationPlan) -> AugmentedDataset:
    """Run the generative-tree pipeline and merge generated rows.

    The budget is split half per treatment group (the treated side takes
    the floor on odd budgets), then equally across that group's leaves.
    Merged row order is: originals in input order, then treated
    generations, then control generations. Original rows are preserved
    bit for bit; generated rows carry no potential outcomes and are
    flagged 0 on the experimental column when the input has one.
    """
    treated, control = split_by_treatment(train)
    if plan.n_generated == 0:
        empty = np.zeros(0, dtype=np.int64)
        return AugmentedDataset(
            merged=train,
            generated_mask=np.zeros(train.n, dtype=bool),
            provenance=Provenance(group=empty, tree_id=empty.copy(), leaf_id=empty.copy()),
        )
    generate = _generate_degedt if plan.variant == DEGEDT else _generate_degef
    budgets = {1: plan.n_generated // 2, 0: plan.n_generated - plan.n_generated // 2}
    parts, groups, tree_ids, leaf_ids = [], [], [], []
    for label, group in ((1, treated), (0, control)):
        draws, t_ids, l_ids = generate(group, label, budgets[label], plan)
        block = np.concatenate(draws) if draws else np.empty((0, train.d + 1))
        parts.append(block)
        groups.append(np.full(len(block), label, dtype=np.int64))
        tree_ids.append(np.concatenate(t_ids) if t_ids else np.zeros(0, dtype=np.int64))
        leaf_ids.append(np.concatenate(l_ids) if l_ids else np.zeros(0, dtype=np.int64))
    gen = np.concatenate(parts)
    gen_t = np.concatenate(groups)
    X_gen = gen[:, : train.d]
    y_gen = gen[:, train.d]
    if train.outcome_kind is OutcomeKind.BINARY:
        y_gen = (np.clip(y_gen, 0.0, 1.0) >= 0.5).astype(np.float64)
    merged = Dataset(
        covariates=np.vstack([train.covariates, X_gen]),
        treatment=np.concatenate([train.treatment, gen_t]),
        outcome=np.concatenate([train.outcome, y_gen]),
        potential_outcomes=None,
        experimental_flag=None
        if train.experimental_flag is None
        else np.concatenate([train.experimental_flag, np.zeros(len(gen), dtype=np.int64)]),
        outcome_kind=train.outcome_kind,
    )
    mask = np.zeros(merged.n, dtype=bool)
    mask[train.n :] = True
    return AugmentedDataset(
        merged=merged,
        generated_mask=mask,
        provenance=Provenance(
            group=gen_t,
            tree_id=np.concatenate(tree_ids),
            leaf_id=np.concatenate(leaf_ids),
        ),
    )


def generated_fraction_by_region(aug: AugmentedDataset, predicate) -> float:
    """Share of generated rows satisfying predicate(X, t, y) (vectorized
    boolean mask); 0.0 when nothing was generated."""
    mask = aug.generated_mask
    if not mask.any():
        return 0.0
    X = aug.merged.covariates[mask]
    t = aug.merged.treatment[mask]
    y = aug.merged.outcome[mask]
    sat = np.asarray(predicate(X, t, y), dtype=bool)
    return float(sat.mean())


def save_augmented_csv(aug: AugmentedDataset, path) -> None:
    """Dataset CSV format plus a trailing generated 0/1 column."""
    save_csv(aug.merged, path,
             extra={"generated": aug.generated_mask.astype(np.int64)})


__all__ = [
    "AugmentationPlan",
    "AugmentedDataset",
    "DEGEDT",
    "DEGEF",
    "Provenance",
    "VARIANTS",
    "augment",
    "default_plan",
    "generated_fraction_by_region",
    "save_augmented_csv",
]
