"""Histograms, logarithmic binning and the two scaling fits.

Power laws are fitted by least squares on log-binned densities, the
synset-size scaling by least squares of log geometric-mean supremacy
against synset size.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import InterlingualLink, PartOfSpeech, WordnetError, WordnetGraph


class NonPositiveValue(WordnetError, ValueError):
    def __init__(self, index: int, value):
        self.index = index
        self.value = value
        super().__init__(f"value {value!r} at index {index} is below 1")


class InsufficientBins(WordnetError, ValueError):
    pass


class InsufficientClasses(WordnetError, ValueError):
    pass


class ZeroSupremacy(WordnetError, ValueError):
    pass


# --------------------------------------------------------------------------
# histograms


@dataclass(frozen=True)
class Histogram:
    counts: dict[int, int]
    key: str = "all"

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def rows(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items())

    @property
    def max_value(self) -> int | None:
        return max(self.counts) if self.counts else None


def _key(pos: PartOfSpeech | None) -> str:
    return pos.label if pos is not None else "all"


def synset_size_histogram(graph: WordnetGraph, pos_filter: PartOfSpeech | None = None) -> Histogram:
    sizes = Counter(
        ss.size for ss in graph.synsets if pos_filter is None or ss.part_of_speech is pos_filter
    )
    return Histogram(dict(sizes), _key(pos_filter))


def polysemy_histogram(graph: WordnetGraph, pos_filter: PartOfSpeech | None = None) -> Histogram:
    """Number of lexemes per sense count.

    Within one POS a lexeme is a (lemma, POS) pair; without a filter the
    lemma alone is the identity and senses are pooled across POS.
    """
    senses: Counter = Counter()
    for ss in graph.synsets:
        if pos_filter is not None and ss.part_of_speech is not pos_filter:
            continue
        for lx in ss.lexemes:
            senses[lx.lemma if pos_filter is None else lx.identity] += 1
    return Histogram(dict(Counter(senses.values())), _key(pos_filter))


def relation_census(graph: WordnetGraph) -> dict[str, int]:
    counts = Counter(str(e.relation_type) for e in graph.edges)
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


def ilink_census(links: Iterable[InterlingualLink]) -> dict[str, int]:
    counts = Counter(str(lk.link_type) for lk in links)
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


# --------------------------------------------------------------------------
# logarithmic binning


def bin_edge(k: int, bins_per_decade: int) -> float:
    return 10.0 ** (k / bins_per_decade)


@dataclass(frozen=True)
class Bin:
    k: int
    lower: float
    upper: float
    count: int
    midpoint: float
    density: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class BinnedDistribution:
    bins_per_decade: int
    bins: tuple[Bin, ...]
    total: int

    def __iter__(self):
        return iter(self.bins)

    def __len__(self) -> int:
        return len(self.bins)

    @property
    def counts(self) -> np.ndarray:
        return np.array([b.count for b in self.bins], dtype=np.int64)

    def nonempty(self) -> list[Bin]:
        return [b for b in self.bins if b.count > 0]

    @classmethod
    def from_counts(cls, counts: dict[int, int], bins_per_decade: int) -> "BinnedDistribution":
        """Build bins ``k_min..k_max`` from a ``{k: count}`` mapping; gaps become empty bins."""
        total = int(sum(counts.values()))
        if not counts:
            return cls(bins_per_decade, (), 0)
        bins = []
        for k in range(min(counts), max(counts) + 1):
            lo, hi = bin_edge(k, bins_per_decade), bin_edge(k + 1, bins_per_decade)
            c = int(counts.get(k, 0))
            bins.append(Bin(k, lo, hi, c, math.sqrt(lo * hi), c / (total * (hi - lo))))
        return cls(bins_per_decade, tuple(bins), total)

    @classmethod
    def from_densities(cls, points: Sequence[tuple[int, float]], bins_per_decade: int) -> "BinnedDistribution":
        """Bins carrying given densities directly; counts are set to 1 so they count as nonempty."""
        bins = []
        for k, density in points:
            lo, hi = bin_edge(k, bins_per_decade), bin_edge(k + 1, bins_per_decade)
            bins.append(Bin(k, lo, hi, 1, math.sqrt(lo * hi), float(density)))
        return cls(bins_per_decade, tuple(bins), len(bins))


def bin_indices(values, bins_per_decade: int = 5) -> np.ndarray:
    """Bin index ``floor(b * log10(v))`` of each value, exact at the edges.

    Integer inputs are placed with exact integer arithmetic
    (``v**b >= 10**k``); floats are corrected against the same float edges
    that :class:`Bin` reports, so every value lands in the bin whose
    ``[lower, upper)`` interval contains it.
    """
    if bins_per_decade < 1:
        raise ValueError("bins_per_decade must be >= 1")
    arr = np.asarray(values)
    if arr.size == 0:
        return np.zeros(0, dtype=np.int64)
    bad = np.flatnonzero(~(arr >= 1))
    if bad.size:
        raise NonPositiveValue(int(bad[0]), arr[bad[0]].item())
    b = bins_per_decade
    k = np.floor(b * np.log10(arr.astype(np.float64))).astype(np.int64)
    if np.issubdtype(arr.dtype, np.integer):
        return _fix_integer_bins(arr, k, b)
    k_lo, k_hi = int(k.min()) - 1, int(k.max()) + 2
    edges = 10.0 ** (np.arange(k_lo, k_hi + 1) / b)
    for _ in range(2):
        k -= arr < edges[k - k_lo]
        k += arr >= edges[k + 1 - k_lo]
    return k


def _fix_integer_bins(arr: np.ndarray, k: np.ndarray, b: int) -> np.ndarray:
    out = k.copy()
    # only values near an edge can be misplaced by rounding
    frac = b * np.log10(arr.astype(np.float64)) - k
    near = np.flatnonzero((frac < 1e-9) | (frac > 1 - 1e-9))
    for i in near.tolist():
        v, kk = int(arr[i]), int(k[i])
        while v ** b < 10 ** kk:
            kk -= 1
        while v ** b >= 10 ** (kk + 1):
            kk += 1
        out[i] = kk
    return out


def log_bin(values, bins_per_decade: int = 5) -> BinnedDistribution:
    """Logarithmically bin values >= 1, ``bins_per_decade`` bins per decade.

    Bin ``k`` covers ``[10**(k/b), 10**((k+1)/b))``.  Empty bins between
    the smallest and largest occupied bin are kept with count 0.
    """
    k = bin_indices(values, bins_per_decade)
    if k.size == 0:
        return BinnedDistribution(bins_per_decade, (), 0)
    k0 = int(k.min())
    counts = np.bincount(k - k0)
    return BinnedDistribution.from_counts({k0 + i: int(c) for i, c in enumerate(counts)}, bins_per_decade)


# --------------------------------------------------------------------------
# power law


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    s_min: float
    s_max: float
    r_squared: float
    n_bins: int
    intercept: float


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares slope, intercept and R^2."""
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def fit_power_law(dist: BinnedDistribution, s_min: float = 1.0) -> PowerLawFit:
    """Exponent of ``density ~ s**-gamma`` from nonempty bins with midpoint >= s_min."""
    used = [b for b in dist.bins if b.count > 0 and b.density > 0 and b.midpoint >= s_min]
    if len(used) < 3:
        raise InsufficientBins(f"need at least 3 nonempty bins at or above s_min={s_min}, have {len(used)}")
    x = np.log10([b.midpoint for b in used])
    y = np.log10([b.density for b in used])
    slope, intercept, r2 = _linear_fit(x, y)
    return PowerLawFit(-slope, max(s_min, used[0].lower), used[-1].upper, r2, len(used), intercept)


# --------------------------------------------------------------------------
# supremacy vs synset size


@dataclass(frozen=True)
class ProfileRow:
    size: int
    geometric_mean: float
    count: int


def geometric_profile(pairs: Iterable[tuple[int, float]]) -> list[ProfileRow]:
    """Geometric mean of s per size class from raw (size, s) pairs."""
    logs: dict[int, list[float]] = {}
    for size, s in pairs:
        if s <= 0:
            raise ZeroSupremacy(
                "supremacy 0 found; geometric means need self-inclusive supremacy (include_self=True)"
            )
        logs.setdefault(int(size), []).append(math.log(s))
    return [ProfileRow(l, math.exp(math.fsum(v) / len(v)), len(v)) for l, v in sorted(logs.items())]


def supremacy_size_profile(graph: WordnetGraph, table) -> list[ProfileRow]:
    """Geometric-mean supremacy for each synset size ``l``, ordered by ``l``."""
    return geometric_profile((ss.size, table[ss.id]) for ss in graph.synsets)


@dataclass(frozen=True)
class ExponentialScalingFit:
    exponent: float
    intercept: float
    l_min: int
    l_max: int
    coverage: float
    r_squared: float


def fit_exponential_scaling(profile: Sequence[ProfileRow], coverage: float = 0.99) -> ExponentialScalingFit:
    """Fit ``<s>(l) ~ exp(alpha * l)`` over the smallest prefix of size classes
    holding at least *coverage* of all synsets."""
    if not 0 < coverage <= 1:
        raise ValueError("coverage must lie in (0, 1]")
    rows = sorted(profile, key=lambda r: r.size)
    total = sum(r.count for r in rows)
    used, acc = [], 0
    for r in rows:
        used.append(r)
        acc += r.count
        if acc >= coverage * total:
            break
    if len(used) < 3:
        raise InsufficientClasses(f"need at least 3 size classes in the fit range, have {len(used)}")
    x = np.array([r.size for r in used], dtype=np.float64)
    y = np.log([r.geometric_mean for r in used])
    slope, intercept, r2 = _linear_fit(x, y)
    return ExponentialScalingFit(slope, intercept, used[0].size, used[-1].size, acc / total, r2)
