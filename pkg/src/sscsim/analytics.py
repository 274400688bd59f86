"""Ground-truth statistics of a simulated trace and their expectations.

Overlap convention: the overlap size of read i is (L - (T_{i+1} - T_i))^+
where T is the sorted start vector and the successor of the last read is the
first one, with cyclic gap (T_1 - T_K) mod n.  Two reads merge into the same
island when the overlap between them strictly exceeds a threshold (0 for the
plain island decomposition).

The expectation formulas come in two flavors.  The plain ones
(``expected_island_count`` etc.) are the classical closed forms, which treat
start collisions as negligible; they are what the channel analysis predicts
and what the verification campaigns quote as "expected".  The ``*_exact``
variants account for duplicate starts and match brute-force enumeration to
machine precision (up to the probability that the reads close the full
circle, which is astronomically small at campaign scales).  At desk-scale n
the two differ by several percent, which matters when comparing against
Monte Carlo means with tight standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, SimTrace, bits_to_str
from .errors import ParameterError

_MAX_PACK_BITS = 62  # packed read prefixes must fit in int64


# ---------------------------------------------------------------------------
# per-trace statistics


def overlap_sizes(trace: SimTrace) -> np.ndarray:
    """Per-read overlap with its successor, as an int64 vector of length K."""
    starts = trace.starts
    n = trace.params.n
    L = trace.params.read_len
    K = len(starts)
    if K == 1:
        # a single read is its own successor; define its overlap as 0
        return np.zeros(1, dtype=np.int64)
    gaps = np.empty(K, dtype=np.int64)
    gaps[: K - 1] = np.diff(starts)
    gaps[K - 1] = (starts[0] - starts[-1]) % n
    return np.maximum(L - gaps, 0)


def _coverage_gaps(trace: SimTrace) -> np.ndarray:
    """Successor gaps with the cyclic entry measured all the way around."""
    starts = trace.starts
    n = trace.params.n
    K = len(starts)
    gaps = np.empty(K, dtype=np.int64)
    gaps[: K - 1] = np.diff(starts)
    gaps[K - 1] = n - starts[-1] + starts[0]
    return gaps


def covered_bit_count(trace: SimTrace) -> int:
    """Number of circular positions covered by at least one read."""
    L = trace.params.read_len
    return int(np.minimum(_coverage_gaps(trace), L).sum())


def coverage(trace: SimTrace) -> float:
    """Fraction of positions covered by at least one read; n*coverage is integer."""
    return covered_bit_count(trace) / trace.params.n


@dataclass(frozen=True)
class OverlapHistogram:
    """Counts of reads per overlap size in bits; zero-count sizes are omitted."""

    counts: dict[int, int]
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ParameterError("overlap histogram counts do not sum to K")


def overlap_histogram(trace: SimTrace) -> OverlapHistogram:
    """Tabulates overlap_sizes; the counts sum to K."""
    ov = overlap_sizes(trace)
    sizes, counts = np.unique(ov, return_counts=True)
    return OverlapHistogram(
        counts={int(s): int(c) for s, c in zip(sizes, counts)},
        total=len(ov),
    )


@dataclass(frozen=True)
class IslandSet:
    """Maximal merged substrings with their 1-based start positions.

    ``covered_bits`` is the sum of island lengths.  For the plain
    decomposition (threshold 0) the islands are pairwise non-overlapping and
    covered_bits equals n * coverage; with a positive merge threshold adjacent
    islands may share up to ``threshold`` bits, so covered_bits can exceed it.
    """

    islands: list[tuple[int, str]]
    covered_bits: int
    is_full_circle: bool


def _ender_mask(trace: SimTrace, threshold_bits: int) -> np.ndarray:
    """True where a read does NOT merge with its successor (overlap <= threshold)."""
    return overlap_sizes(trace) <= threshold_bits


def _circular_slice(codeword: np.ndarray, start: int, length: int) -> str:
    idx = (start - 1 + np.arange(length)) % len(codeword)
    return bits_to_str(codeword[idx])


def islands_with_threshold(trace: SimTrace, threshold_bits: int = 0) -> IslandSet:
    """Merges consecutive reads whose overlap strictly exceeds the threshold.

    Threshold 0 gives the plain island decomposition.  If every read merges
    with its successor the chain closes: the result is one island, covering
    the whole circle unless all starts coincide (then it is a single read).
    """
    if threshold_bits < 0:
        raise ParameterError(f"threshold must be >= 0, got {threshold_bits}")
    params = trace.params
    n, L, K = params.n, params.read_len, params.num_reads
    starts = trace.starts
    enders = np.flatnonzero(_ender_mask(trace, threshold_bits))
    if len(enders) == 0:
        if starts[0] == starts[-1]:
            length = L  # all reads stacked on one position
        else:
            length = n
        content = _circular_slice(trace.codeword, int(starts[0]), length)
        return IslandSet(
            islands=[(int(starts[0]), content)],
            covered_bits=length,
            is_full_circle=(length == n),
        )
    islands = []
    total = 0
    prev = enders[-1]  # island after the last ender wraps to the front
    for e in enders:
        first = (prev + 1) % K
        span = int((starts[e] - starts[first]) % n) + L
        islands.append((int(starts[first]), _circular_slice(trace.codeword, int(starts[first]), span)))
        total += span
        prev = e
    return IslandSet(islands=islands, covered_bits=total, is_full_circle=False)


def island_decomposition(trace: SimTrace) -> IslandSet:
    """Islands obtained by merging every positive true overlap."""
    return islands_with_threshold(trace, 0)


def island_count(trace: SimTrace) -> int:
    """Number of islands; equals the number of zero overlaps, or 1 if none."""
    return apparent_island_count(trace, 0)


def apparent_island_count(trace: SimTrace, threshold_bits: int) -> int:
    """Island count when only overlaps > threshold_bits are merged (no content built)."""
    z = int(_ender_mask(trace, threshold_bits).sum())
    return z if z > 0 else 1


def island_read_counts(trace: SimTrace, threshold_bits: int = 0) -> np.ndarray:
    """Number of reads composing each island (cyclic run lengths between enders)."""
    K = trace.params.num_reads
    enders = np.flatnonzero(_ender_mask(trace, threshold_bits))
    if len(enders) == 0:
        return np.array([K], dtype=np.int64)
    sizes = np.diff(enders, prepend=enders[-1] - K)
    return sizes.astype(np.int64)


def max_reads_per_island(trace: SimTrace) -> int:
    """Maximum number of reads composing a single island; K in the closed-chain case."""
    return int(island_read_counts(trace).max())


# ---------------------------------------------------------------------------
# prefix counting


@dataclass(frozen=True)
class PrefixCountTable:
    """Occurrence counts of read prefixes; absent strings have count 0."""

    counts: dict[str, int] = field(default_factory=dict)

    def count(self, z: str) -> int:
        return self.counts.get(z, 0)

    def length_total(self, length: int) -> int:
        return sum(c for z, c in self.counts.items() if len(z) == length)


def pack_reads(reads: np.ndarray) -> np.ndarray:
    """Packs a (K, L) bit matrix into int64 values, first bit most significant."""
    L = reads.shape[1]
    if L > _MAX_PACK_BITS:
        raise ParameterError(f"read length {L} too large to pack into int64")
    weights = (np.int64(1) << np.arange(L - 1, -1, -1, dtype=np.int64))
    return reads.astype(np.int64) @ weights


def prefix_spectrum(reads: np.ndarray, max_len: int) -> list[np.ndarray]:
    """Counts of every possible prefix value per length 1..max_len.

    Entry ell-1 is an int64 array of size 2**ell where slot v counts reads
    whose first ell bits read as the binary number v.
    """
    L = reads.shape[1]
    if not (1 <= max_len <= L):
        raise ParameterError(f"max_len {max_len} outside [1, {L}]")
    if max_len > 26:
        raise ParameterError(f"max_len {max_len} too large for dense spectrum arrays")
    packed = pack_reads(reads)
    out = []
    for ell in range(1, max_len + 1):
        vals = packed >> (L - ell)
        out.append(np.bincount(vals, minlength=2**ell).astype(np.int64))
    return out


def prefix_counts(reads: np.ndarray, max_len: int) -> PrefixCountTable:
    """Tabulates how often each string of length 1..max_len prefixes a read."""
    L = reads.shape[1]
    if not (1 <= max_len <= L):
        raise ParameterError(f"max_len {max_len} outside [1, {L}]")
    packed = pack_reads(reads)
    table: dict[str, int] = {}
    for ell in range(1, max_len + 1):
        vals, counts = np.unique(packed >> (L - ell), return_counts=True)
        for v, cnt in zip(vals, counts):
            table[format(int(v), f"0{ell}b")] = int(cnt)
    return PrefixCountTable(counts=table)


def max_prefix_multiplicity(reads: np.ndarray, min_len: int, max_len: int) -> int:
    """Largest count of any single prefix with length in [min_len, max_len]."""
    L = reads.shape[1]
    packed = pack_reads(reads)
    best = 0
    for ell in range(min_len, max_len + 1):
        _, counts = np.unique(packed >> (L - ell), return_counts=True)
        best = max(best, int(counts.max()))
    return best


# ---------------------------------------------------------------------------
# expectations


def expected_coverage(params: ChannelParams) -> float:
    """Exact E[coverage] = 1 - (1 - L/n)^K."""
    n, L, K = params.n, params.read_len, params.num_reads
    return 1.0 - math.exp(K * math.log1p(-L / n))


def coverage_limit(params: ChannelParams) -> float:
    """Large-n limit of the expected coverage, 1 - e^{-c} at the realized c."""
    return 1.0 - math.exp(-params.realized_coverage)


def _empty_window_prob(params: ChannelParams, w: int) -> float:
    """Probability that w specified positions receive none of the K starts."""
    if w <= 0:
        return 1.0
    return math.exp(params.num_reads * math.log1p(-w / params.n))


def expected_island_count(params: ChannelParams) -> float:
    """Collision-free island count expectation K (1 - L/n)^{K-1}."""
    n, L, K = params.n, params.read_len, params.num_reads
    return K * math.exp((K - 1) * math.log1p(-L / n))


def island_count_limit(params: ChannelParams) -> float:
    """Large-n limit K e^{-c} at the realized c."""
    return params.num_reads * math.exp(-params.realized_coverage)


def expected_island_count_exact(params: ChannelParams) -> float:
    """Duplicate-start-aware E[island count], n [(1-(L-1)/n)^K - (1-L/n)^K].

    Exact up to the probability that the merged reads close the full circle,
    which is negligible whenever K e^{-c} is more than a few units.
    """
    n, L = params.n, params.read_len
    if L == 1:
        return n * (1.0 - _empty_window_prob(params, 1))
    return n * (_empty_window_prob(params, L - 1) - _empty_window_prob(params, L))


def expected_overlap_count_bounds(params: ChannelParams, overlap_bits: int) -> tuple[float, float]:
    """Sandwich bounds on E[G(o)], the number of reads with overlap exactly o.

    Valid for o in [1, L]; the bounds converge as n grows.  Overlap 0 is the
    island-count statistic and is handled by expected_island_count instead.
    """
    n, L, K = params.n, params.read_len, params.num_reads
    if not (1 <= overlap_bits <= L):
        raise ParameterError(f"overlap size {overlap_bits} outside [1, {L}]")
    gap = L - overlap_bits
    base = K * (K - 1) / n
    lower = base * (1 - (gap + 1) / n) ** (K - 2)
    upper = base * (1 - gap / n) ** (K - 2)
    return lower, upper


def expected_overlap_count_limit(params: ChannelParams, overlap_bits: int) -> float:
    """Limit of E[G(o)] (log2 n)^2 / n, equal to (c/lbar)^2 e^{-c (1 - gamma/lbar)}."""
    n, L = params.n, params.read_len
    if not (1 <= overlap_bits <= L):
        raise ParameterError(f"overlap size {overlap_bits} outside [1, {L}]")
    c = params.realized_coverage
    lbar = params.lbar
    gamma = overlap_bits / math.log2(n)
    return (c / lbar) ** 2 * math.exp(-c * (1 - gamma / lbar))


def expected_overlap_count_exact(params: ChannelParams, overlap_bits: int) -> float:
    """Duplicate-start-aware E[G(o)] matching brute-force enumeration."""
    n, L, K = params.n, params.read_len, params.num_reads
    if not (1 <= overlap_bits <= L):
        raise ParameterError(f"overlap size {overlap_bits} outside [1, {L}]")
    if K == 1:
        return 0.0
    if overlap_bits == L:
        # adjacent duplicate starts, plus the all-equal wraparound case
        distinct = n * (1.0 - _empty_window_prob(params, 1))
        return K - distinct + n ** (1 - K)
    g = L - overlap_bits
    q = lambda w: _empty_window_prob(params, w)
    return n * (q(g - 1) - 2 * q(g) + q(g + 1))


def expected_apparent_island_count(params: ChannelParams, threshold_bits: int) -> float:
    """Collision-free expectation K (1 - (L - t)/n)^{K-1} of the thresholded island count."""
    n, L, K = params.n, params.read_len, params.num_reads
    if threshold_bits < 0:
        raise ParameterError(f"threshold must be >= 0, got {threshold_bits}")
    w = L - threshold_bits
    if w <= 0:
        return float(K)
    return K * math.exp((K - 1) * math.log1p(-w / n))


def apparent_island_count_limit(params: ChannelParams, threshold_bits: int) -> float:
    """Scaled limit (c/lbar) e^{-c sigma} of (log2 n / n) E[count], sigma = 1 - t/(lbar log2 n)."""
    c = params.realized_coverage
    sigma = 1.0 - threshold_bits / (params.lbar * math.log2(params.n))
    return (c / params.lbar) * math.exp(-c * sigma)


def expected_apparent_island_count_exact(params: ChannelParams, threshold_bits: int) -> float:
    """Duplicate-start-aware expectation of the thresholded island count."""
    n, L, K = params.n, params.read_len, params.num_reads
    if threshold_bits < 0:
        raise ParameterError(f"threshold must be >= 0, got {threshold_bits}")
    w = L - threshold_bits
    if w <= 0:
        return float(K)
    if w == 1:
        return n * (1.0 - _empty_window_prob(params, 1))
    return n * (_empty_window_prob(params, w - 1) - _empty_window_prob(params, w))


# ---------------------------------------------------------------------------
# per-trial record


def trial_stats(trace: SimTrace) -> dict:
    """Flat JSON-ready record of the headline statistics of one trace."""
    hist = overlap_histogram(trace)
    zeros = hist.counts.get(0, 0)
    return {
        "phi": coverage(trace),
        "k_prime": island_count(trace),
        "d_max": max_reads_per_island(trace),
        "overlap_histogram": dict(sorted(hist.counts.items())),
        "full_circle": zeros == 0 and covered_bit_count(trace) == trace.params.n,
    }
