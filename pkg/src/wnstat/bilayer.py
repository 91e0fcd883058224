"""Two wordnet layers joined by inter-lingual links, and the null model
for how links of one type are spread over supremacy classes.

The expected number of links between supremacy bins ``i`` (layer A) and
``j`` (layer B) when links are placed at random is ``p_a[i] * p_b[j] * L``,
where ``p`` is the fraction of a layer's synsets falling in a bin and
``L`` the number of links.  ``R = log10(observed / expected)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import SupremacyTable, supremacy_all
from .model import (
    I_SYNONYMY,
    BilayerNetwork,
    InterlingualLink,
    LinkType,
    SupremacyConfig,
    WordnetError,
    WordnetGraph,
)
from .stats import BinnedDistribution, bin_indices

log = logging.getLogger(__name__)


class IdenticalLayerTags(WordnetError, ValueError):
    pass


class EmptyPairSet(WordnetError, ValueError):
    pass


def build_bilayer(layer_a: WordnetGraph, layer_b: WordnetGraph, links: Iterable[InterlingualLink]) -> BilayerNetwork:
    """Join two layers; links whose endpoints do not resolve are dropped and counted."""
    if layer_a.language_tag == layer_b.language_tag:
        raise IdenticalLayerTags(f"both layers are tagged {layer_a.language_tag!r}")
    kept, dropped = [], 0
    for lk in links:
        if lk.source_id in layer_a and lk.target_id in layer_b:
            kept.append(lk)
        else:
            dropped += 1
    if dropped:
        log.warning("dropped %d inter-lingual links with unresolved endpoints", dropped)
    return BilayerNetwork(layer_a, layer_b, tuple(kept), dropped)


@dataclass(frozen=True)
class SupremacyPair:
    link: InterlingualLink
    s_source: int
    s_target: int


@dataclass(frozen=True)
class SupremacyPairSet:
    pairs: tuple[SupremacyPair, ...]
    table_a: SupremacyTable
    table_b: SupremacyTable
    link_type: LinkType
    # only used to attach lexemes in mismatch reports
    bilayer: BilayerNetwork | None = None

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def swapped(self) -> "SupremacyPairSet":
        """The same pairs seen from layer B."""
        pairs = tuple(
            sorted(
                (SupremacyPair(InterlingualLink(p.link.target_id, p.link.source_id, p.link.link_type), p.s_target, p.s_source)
                 for p in self.pairs),
                key=lambda p: (p.link.source_id, p.link.target_id),
            )
        )
        bl = self.bilayer
        if bl is not None:
            bl = BilayerNetwork(bl.layer_b, bl.layer_a, tuple(p.link for p in pairs), bl.dropped_links)
        return SupremacyPairSet(pairs, self.table_b, self.table_a, self.link_type, bl)


def supremacy_pairs(
    bilayer: BilayerNetwork,
    link_type: LinkType = I_SYNONYMY,
    config_a: SupremacyConfig | None = None,
    config_b: SupremacyConfig | None = None,
    threads: int | None = None,
) -> SupremacyPairSet:
    """Supremacy of both endpoints of every link of *link_type*, sorted by (source, target)."""
    config_a = config_a or SupremacyConfig()
    config_b = config_b or SupremacyConfig()
    if not (config_a.include_self and config_b.include_self):
        raise ValueError("supremacy pairs need self-inclusive supremacy on both layers")
    table_a = supremacy_all(bilayer.layer_a, config_a, threads)
    table_b = supremacy_all(bilayer.layer_b, config_b, threads)
    chosen = sorted(
        (lk for lk in bilayer.links if lk.link_type == link_type),
        key=lambda lk: (lk.source_id, lk.target_id),
    )
    pairs = tuple(SupremacyPair(lk, table_a[lk.source_id], table_b[lk.target_id]) for lk in chosen)
    return SupremacyPairSet(pairs, table_a, table_b, link_type, bilayer)


# --------------------------------------------------------------------------
# null model


@dataclass(frozen=True)
class RMatrix:
    """Observed vs. randomized link counts on a grid of supremacy bins.

    Row ``i`` is bin ``axis_a.bins[i]``, column ``j`` is ``axis_b.bins[j]``.
    ``ratio`` is NaN wherever R is undefined (no observed links, or no
    expected mass).
    """

    axis_a: BinnedDistribution
    axis_b: BinnedDistribution
    observed: np.ndarray
    expected: np.ndarray
    ratio: np.ndarray
    marginals: str

    @property
    def link_count(self) -> int:
        return int(self.observed.sum())

    def defined(self) -> np.ndarray:
        return ~np.isnan(self.ratio)

    def cells(self):
        """Yield ``(bin_a, bin_b, observed, expected, R or None)`` in row-major order."""
        for i, ba in enumerate(self.axis_a.bins):
            for j, bb in enumerate(self.axis_b.bins):
                r = self.ratio[i, j]
                yield ba, bb, int(self.observed[i, j]), float(self.expected[i, j]), None if np.isnan(r) else float(r)

    def transposed(self) -> "RMatrix":
        return RMatrix(self.axis_b, self.axis_a, self.observed.T.copy(), self.expected.T.copy(), self.ratio.T.copy(), self.marginals)


def _axis(values: np.ndarray, bins_per_decade: int) -> tuple[BinnedDistribution, np.ndarray]:
    """Bins covering *values*, and each value's row in that axis."""
    k = bin_indices(values, bins_per_decade)
    k0 = int(k.min())
    counts = np.bincount(k - k0)
    axis = BinnedDistribution.from_counts({k0 + i: int(c) for i, c in enumerate(counts)}, bins_per_decade)
    return axis, k - k0


def _layer_axes(pairs: SupremacyPairSet, bins_per_decade: int):
    """Axes spanning every synset of each layer, plus the bin rows of each layer's synsets."""
    axis_a, rows_a = _axis(pairs.table_a.values, bins_per_decade)
    axis_b, rows_b = _axis(pairs.table_b.values, bins_per_decade)
    return axis_a, rows_a, axis_b, rows_b


def null_model_matrix(pairs: SupremacyPairSet, bins_per_decade: int = 5, marginals: str = "all") -> RMatrix:
    """Observed link counts per (bin_a, bin_b) cell against ``p_a * p_b * L``.

    ``marginals="all"`` takes ``p`` over all synsets of a layer;
    ``"linked"`` takes it over the link endpoints only.
    """
    if not pairs.pairs:
        raise EmptyPairSet("no links of the requested type")
    if marginals not in ("all", "linked"):
        raise ValueError("marginals must be 'all' or 'linked'")
    axis_a, rows_a, axis_b, rows_b = _layer_axes(pairs, bins_per_decade)
    na, nb = len(axis_a), len(axis_b)
    ka0, kb0 = axis_a.bins[0].k, axis_b.bins[0].k
    src = bin_indices(np.array([p.s_source for p in pairs.pairs]), bins_per_decade) - ka0
    dst = bin_indices(np.array([p.s_target for p in pairs.pairs]), bins_per_decade) - kb0
    L = len(pairs.pairs)
    observed = np.bincount(src * nb + dst, minlength=na * nb).reshape(na, nb)
    if marginals == "all":
        p_a = np.bincount(rows_a, minlength=na) / rows_a.size
        p_b = np.bincount(rows_b, minlength=nb) / rows_b.size
    else:
        p_a = np.bincount(src, minlength=na) / L
        p_b = np.bincount(dst, minlength=nb) / L
    expected = np.outer(p_a, p_b) * L
    ratio = np.full((na, nb), np.nan)
    ok = (observed > 0) & (expected > 0)
    ratio[ok] = np.log10(observed[ok] / expected[ok])
    return RMatrix(axis_a, axis_b, observed, expected, ratio, marginals)


@dataclass(frozen=True)
class MonteCarloNull:
    axis_a: BinnedDistribution
    axis_b: BinnedDistribution
    mean: np.ndarray
    std: np.ndarray
    trials: int
    seed: int

    @property
    def standard_error(self) -> np.ndarray:
        return self.std / math.sqrt(self.trials)


def monte_carlo_null(
    bilayer: BilayerNetwork,
    link_type: LinkType = I_SYNONYMY,
    trials: int = 1000,
    seed: int = 0,
    bins_per_decade: int = 5,
    config_a: SupremacyConfig | None = None,
    config_b: SupremacyConfig | None = None,
    pairs: SupremacyPairSet | None = None,
) -> MonteCarloNull:
    """Randomize link placement and tabulate the per-cell link counts.

    Each trial redraws both endpoints of every link uniformly over the
    synsets of their layer.  Trial ``t`` uses its own generator seeded with
    ``(seed, t)``, so results do not depend on how trials are scheduled.
    Pass *pairs* to reuse already computed supremacy tables.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if pairs is None:
        pairs = supremacy_pairs(bilayer, link_type, config_a, config_b)
    L = len(pairs.pairs)
    axis_a, rows_a, axis_b, rows_b = _layer_axes(pairs, bins_per_decade)
    na, nb = len(axis_a), len(axis_b)
    acc = np.zeros(na * nb, dtype=np.float64)
    acc2 = np.zeros(na * nb, dtype=np.float64)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        a = rows_a[rng.integers(0, rows_a.size, L)]
        b = rows_b[rng.integers(0, rows_b.size, L)]
        c = np.bincount(a * nb + b, minlength=na * nb).astype(np.float64)
        acc += c
        acc2 += c * c
    mean = acc / trials
    var = np.maximum(acc2 / trials - mean * mean, 0.0)
    if trials > 1:
        var *= trials / (trials - 1)
    return MonteCarloNull(axis_a, axis_b, mean.reshape(na, nb), np.sqrt(var).reshape(na, nb), trials, seed)


# --------------------------------------------------------------------------
# mismatches


@dataclass(frozen=True)
class Mismatch:
    source_id: str
    target_id: str
    source_lemmas: tuple[str, ...]
    target_lemmas: tuple[str, ...]
    s_source: int
    s_target: int
    score: float


@dataclass(frozen=True)
class MismatchReport:
    records: tuple[Mismatch, ...]
    threshold: float

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def mismatch_score(s_source: float, s_target: float) -> float:
    hi, lo = max(s_source, s_target), min(s_source, s_target)
    return math.log10(hi / lo)


def mismatch_report(pairs: SupremacyPairSet | Sequence[SupremacyPair], threshold: float = 2.0) -> MismatchReport:
    """Links whose endpoint supremacies differ by at least *threshold* decades, worst first."""
    bilayer = getattr(pairs, "bilayer", None)
    records = []
    for p in pairs:
        if p.s_source <= 0 or p.s_target <= 0:
            raise ValueError("mismatch scores need self-inclusive (positive) supremacies")
        score = mismatch_score(p.s_source, p.s_target)
        if score < threshold:
            continue
        src_lemmas = tgt_lemmas = ()
        if bilayer is not None:
            src_lemmas = bilayer.layer_a[p.link.source_id].lemmas
            tgt_lemmas = bilayer.layer_b[p.link.target_id].lemmas
        records.append(Mismatch(p.link.source_id, p.link.target_id, src_lemmas, tgt_lemmas, p.s_source, p.s_target, score))
    records.sort(key=lambda m: (-m.score, m.source_id, m.target_id))
    return MismatchReport(tuple(records), threshold)
