"""Minimum-redundancy maximum-relevance selection over discretized variables.

Mutual information uses the plug-in (maximum-likelihood) estimate on binned
labels, computed as H(a) + H(b) - H(a,b). Joint-entropy summation runs over
sorted cell counts so that mutual_information(a, b) == mutual_information(b, a)
bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DimensionMismatchError


@dataclass(frozen=True)
class DiscretizedVariable:
    """Integer bin labels per sample; bin_edges only for continuous sources."""

    labels: np.ndarray
    bin_count: int
    bin_edges: np.ndarray | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.size == 0:
            raise DataError("discretized variable has no samples")
        if labels.min() < 0 or labels.max() >= self.bin_count:
            raise DataError(
                f"labels must lie in [0, {self.bin_count}), got "
                f"[{labels.min()}, {labels.max()}]"
            )

    @property
    def sample_count(self) -> int:
        return self.labels.size


def discretize(values, bin_count: int) -> DiscretizedVariable:
    """Equal-width bins over [min, max]; the maximum lands in the top bin.

    Constant input collapses to a single bin (entropy 0).
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise DataError("cannot discretize an empty vector")
    if not np.isfinite(values).all():
        raise DataError("cannot discretize non-finite values")
    if bin_count < 2:
        raise DataError(f"bin_count must be >= 2, got {bin_count}")
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        return DiscretizedVariable(
            labels=np.zeros(values.size, dtype=np.int64),
            bin_count=1,
            bin_edges=np.array([lo, hi]),
        )
    width = (hi - lo) / bin_count
    labels = np.minimum(((values - lo) / width).astype(np.int64), bin_count - 1)
    edges = lo + width * np.arange(bin_count + 1)
    return DiscretizedVariable(labels=labels, bin_count=bin_count, bin_edges=edges)


def binary_variable(values) -> DiscretizedVariable:
    """Pass a 0/1 feature through unchanged (bin_count 2, no edges)."""
    values = np.asarray(values)
    labels = values.astype(np.int64)
    if not np.isin(labels, (0, 1)).all() or not np.all(labels == values):
        raise DataError("binary variable must contain only 0 and 1")
    return DiscretizedVariable(labels=labels, bin_count=2)


def _entropy_from_counts(counts: np.ndarray) -> float:
    counts = np.sort(counts[counts > 0])
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def entropy(a: DiscretizedVariable) -> float:
    """Plug-in Shannon entropy in nats."""
    return _entropy_from_counts(np.bincount(a.labels, minlength=a.bin_count))


def mutual_information(a: DiscretizedVariable, b: DiscretizedVariable) -> float:
    """Plug-in mutual information in nats; symmetric, non-negative."""
    if a.sample_count != b.sample_count:
        raise DimensionMismatchError(
            f"sample counts differ: {a.sample_count} vs {b.sample_count}"
        )
    joint = np.bincount(
        a.labels * b.bin_count + b.labels, minlength=a.bin_count * b.bin_count
    )
    value = entropy(a) + entropy(b) - _entropy_from_counts(joint)
    return value if value > 0.0 else 0.0


@dataclass(frozen=True)
class FeatureSet:
    """Candidate features plus the target, all with one shared sample count."""

    features: tuple
    names: tuple
    target: DiscretizedVariable

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "names", tuple(self.names))
        if len(self.features) != len(self.names):
            raise DataError("feature and name counts differ")
        if not self.features:
            raise DataError("feature set is empty")
        m = self.target.sample_count
        for name, feat in zip(self.names, self.features):
            if feat.sample_count != m:
                raise DimensionMismatchError(
                    f"feature {name} has {feat.sample_count} samples, target has {m}"
                )

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class SelectionResult:
    """Greedy pick order plus the relevance/redundancy/score trace after each pick."""

    selected_indices: tuple
    relevance_trace: tuple
    redundancy_trace: tuple
    score_trace: tuple


def relevance(selected, target: DiscretizedVariable) -> float:
    """Mean mutual information between the selected features and the target."""
    selected = list(selected)
    if not selected:
        raise DataError("relevance of an empty subset is undefined")
    return sum(mutual_information(x, target) for x in selected) / len(selected)


def redundancy(selected) -> float:
    """Mean pairwise mutual information over all ordered pairs, self-pairs
    included (so a singleton's redundancy is its entropy)."""
    selected = list(selected)
    if not selected:
        raise DataError("redundancy of an empty subset is undefined")
    total = sum(
        mutual_information(xi, xj) for xi in selected for xj in selected
    )
    return total / len(selected) ** 2


def select_features(features: FeatureSet, k: int) -> SelectionResult:
    """Greedy forward selection by the incremental difference criterion.

    The first pick maximizes relevance to the target; every later pick
    maximizes I(x, target) minus the mean mutual information with the
    already-selected features. Ties go to the lowest feature index.
    """
    m = len(features)
    if not 1 <= k <= m:
        raise DataError(f"k must be in 1..{m}, got {k}")

    target_mi = [mutual_information(x, features.target) for x in features.features]
    pair_mi: dict[tuple[int, int], float] = {}

    def pair(i: int, j: int) -> float:
        key = (i, j) if i <= j else (j, i)
        if key not in pair_mi:
            pair_mi[key] = mutual_information(
                features.features[key[0]], features.features[key[1]]
            )
        return pair_mi[key]

    selected: list[int] = []
    redundancy_sum = np.zeros(m)  # sum of MI against selected, per candidate
    relevance_trace, redundancy_trace, score_trace = [], [], []

    for _ in range(k):
        best_idx = -1
        best_score = -np.inf
        for i in range(m):
            if i in selected:
                continue
            if selected:
                score = target_mi[i] - redundancy_sum[i] / len(selected)
            else:
                score = target_mi[i]
            if score > best_score:
                best_score = score
                best_idx = i
        selected.append(best_idx)
        for i in range(m):
            if i not in selected:
                redundancy_sum[i] += pair(i, best_idx)

        d = sum(target_mi[i] for i in selected) / len(selected)
        r = sum(pair(i, j) for i in selected for j in selected) / len(selected) ** 2
        relevance_trace.append(d)
        redundancy_trace.append(r)
        score_trace.append(d - r)

    return SelectionResult(
        selected_indices=tuple(selected),
        relevance_trace=tuple(relevance_trace),
        redundancy_trace=tuple(redundancy_trace),
        score_trace=tuple(score_trace),
    )


def format_selection_report(result: SelectionResult, names) -> str:
    """Two-column rank/name table followed by the per-pick traces."""
    lines = ["rank\tfeature"]
    for rank, idx in enumerate(result.selected_indices, start=1):
        lines.append(f"{rank}\t{names[idx]}")
    lines.append("")
    lines.append("pick\trelevance\tredundancy\tscore")
    for rank, (d, r, s) in enumerate(
        zip(result.relevance_trace, result.redundancy_trace, result.score_trace),
        start=1,
    ):
        lines.append(f"{rank}\t{d!r}\t{r!r}\t{s!r}")
    return "\n".join(lines) + "\n"
