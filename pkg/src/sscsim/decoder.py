"""Brute-force merge search over read orderings and claimed overlaps.

The search assigns every read slot a claimed overlap in [0:L] (a partition
vector), filters the assignments through concentration bands around the
expected coverage, island count, and per-size overlap counts, and then tries
every permutation of the reads: if each read's claimed suffix matches the
next read's prefix, the merged substrings form one candidate island set.
Decoding keeps the codewords that contain some candidate set as circular
substrings.

Everything here is exponential in the number of reads by design and guarded
by an explicit loop-count budget; it is meant for small instances and for
cross-checking against independent enumeration, not for practical assembly.

Reads and codewords are handled as ASCII '0'/'1' strings.  The successor
structure is cyclic: slot K's claimed overlap is checked against slot 1, and
a partition whose merges close the full circle yields a single circular
island that is compared against codewords by rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product
from typing import Optional, Sequence

import numpy as np

from . import analytics
from .channel import ChannelParams, SimTrace
from .errors import BudgetExceededError, ParameterError

DEFAULT_BUDGET = 10**8


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class AdmissibilityParams:
    """Relative-width bands a partition vector must satisfy to be searched.

    The targets are the finite-n expectations of the coverage fraction, the
    island count, and each per-size overlap count (sandwich midpoint).
    """

    eps: float
    coverage_target: float
    island_target: float
    overlap_targets: tuple[float, ...]  # index o-1 holds the target for overlap o

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise ParameterError(f"eps must lie in (0, 1), got {self.eps}")

    @classmethod
    def from_channel(cls, params: ChannelParams, eps: float) -> "AdmissibilityParams":
        mids = []
        for o in range(1, params.read_len + 1):
            lo, hi = analytics.expected_overlap_count_bounds(params, o)
            mids.append(0.5 * (lo + hi))
        return cls(
            eps=eps,
            coverage_target=analytics.expected_coverage(params),
            island_target=analytics.expected_island_count(params),
            overlap_targets=tuple(mids),
        )


def partition_coverage(p: Sequence[int], params: ChannelParams) -> float:
    """Coverage fraction (K L - sum p_i) / n implied by a partition vector."""
    K, L = params.num_reads, params.read_len
    p = np.asarray(p, dtype=np.int64)
    if len(p) != K:
        raise ParameterError(f"partition vector length {len(p)} != K = {K}")
    return (K * L - int(p.sum())) / params.n


def is_admissible(p: Sequence[int], params: ChannelParams, adm: AdmissibilityParams) -> bool:
    """True iff the claimed coverage, island count, and overlap counts all sit
    inside the adm.eps relative bands around their targets."""
    L = params.read_len
    p = np.asarray(p, dtype=np.int64)
    if p.min() < 0 or p.max() > L:
        raise ParameterError("partition entries must lie in [0, L]")
    cov = partition_coverage(p, params)
    if abs(cov - adm.coverage_target) > adm.eps * adm.coverage_target:
        return False
    counts = np.bincount(p, minlength=L + 1)
    if abs(counts[0] - adm.island_target) > adm.eps * adm.island_target:
        return False
    targets = np.asarray(adm.overlap_targets)
    return bool(np.all(np.abs(counts[1:] - targets) <= adm.eps * targets))


# ---------------------------------------------------------------------------
# merging


@dataclass(frozen=True)
class CandidateIslandSet:
    """Canonical multiset of merged substrings from one successful merge pass.

    Linear islands are kept as a sorted tuple.  A merge pass whose claimed
    overlaps close the cycle produces a single circular island, stored as its
    lexicographically minimal rotation with ``circular`` set.
    """

    islands: tuple[str, ...]
    circular: bool = False


def _min_rotation(s: str) -> str:
    return min(s[i:] + s[:i] for i in range(len(s)))


def try_merge(
    p: Sequence[int], perm: Sequence[int], reads: Sequence[str]
) -> Optional[CandidateIslandSet]:
    """Attempts the merge implied by (partition vector, permutation).

    Slot i holds read perm[i]; its claimed overlap p[i] must match the
    length-p[i] suffix of that read against the prefix of the next slot's
    read (cyclically).  Returns the resulting island set, or None when any
    check fails.  Failure is a value, not an exception.
    """
    K = len(perm)
    if len(p) != K:
        raise ParameterError(f"partition vector length {len(p)} != permutation length {K}")
    ordered = [reads[j] for j in perm]
    L = len(ordered[0])
    for i in range(K):
        pi = p[i]
        if not (0 <= pi <= L):
            raise ParameterError(f"claimed overlap {pi} outside [0, {L}]")
        if pi and ordered[i][L - pi :] != ordered[(i + 1) % K][:pi]:
            return None
    cut_slots = [i for i in range(K) if p[i] == 0]
    if not cut_slots:
        # the chain closes on itself: one circular island
        concat = ordered[0] + "".join(ordered[i + 1][p[i] :] for i in range(K - 1))
        ring_len = K * L - sum(p)
        if ring_len == 0:
            # every read fully overlaps the next, so all reads are identical
            # and stacked on one position; the merged content is one read
            return CandidateIslandSet(islands=(ordered[0],), circular=False)
        return CandidateIslandSet(islands=(_min_rotation(concat[:ring_len]),), circular=True)
    islands = []
    prev = cut_slots[-1]
    for z in cut_slots:
        i = (prev + 1) % K
        chunk = ordered[i]
        while i != z:
            chunk += ordered[(i + 1) % K][p[i] :]
            i = (i + 1) % K
        islands.append(chunk)
        prev = z
    return CandidateIslandSet(islands=tuple(sorted(islands)), circular=False)


def pm_loop_count(params: ChannelParams) -> int:
    """Worst-case work K (L+1)^K K! of the brute-force search."""
    K, L = params.num_reads, params.read_len
    return K * (L + 1) ** K * math.factorial(K)


def partition_and_merge(
    reads: Sequence[str],
    params: ChannelParams,
    adm: Optional[AdmissibilityParams],
    budget: int = DEFAULT_BUDGET,
) -> frozenset[CandidateIslandSet]:
    """All candidate island sets over admissible partitions and permutations.

    ``adm=None`` disables the admissibility filter (every partition vector is
    searched), which is the configuration the small-instance enumeration
    oracle is compared against.

    Raises:
        BudgetExceededError: when K (L+1)^K K! exceeds ``budget``.
    """
    K, L = params.num_reads, params.read_len
    if len(reads) != K:
        raise ParameterError(f"expected {K} reads, got {len(reads)}")
    if any(len(r) != L for r in reads):
        raise ParameterError(f"every read must have length {L}")
    loops = pm_loop_count(params)
    if loops > budget:
        raise BudgetExceededError(loops, budget)
    if K == 1:
        # a single read is its own successor; it forms one island as-is
        return frozenset({CandidateIslandSet(islands=(reads[0],))})
    ci: set[CandidateIslandSet] = set()
    perms = list(permutations(range(K)))
    for p in product(range(L + 1), repeat=K):
        if adm is not None and not is_admissible(p, params, adm):
            continue
        for perm in perms:
            cand = try_merge(p, perm, reads)
            if cand is not None:
                ci.add(cand)
    return frozenset(ci)


# ---------------------------------------------------------------------------
# containment and decoding


def circular_contains(codeword: str, piece: str) -> bool:
    """True iff ``piece`` appears in the codeword read circularly.

    Pieces longer than n must match the periodic extension of the codeword
    (a merge chain can lap the circle more than once).
    """
    n = len(codeword)
    reps = len(piece) // n + 2
    return piece in codeword * reps


def candidate_fits(codeword: str, cand: CandidateIslandSet) -> bool:
    """True iff every island of the candidate is circularly contained.

    A circular island must tile the codeword exactly: its length must be a
    multiple of n and its content a rotation of the codeword repeated that
    many times.
    """
    if cand.circular:
        (ring,) = cand.islands
        m = len(ring)
        n = len(codeword)
        if m % n != 0:
            return False
        tiled = codeword * (m // n)
        return ring in tiled + tiled
    return all(circular_contains(codeword, isl) for isl in cand.islands)


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of a codebook decode: status in {'decoded', 'ambiguous', 'none'}.

    ``message`` is the 1-based codeword index when status == 'decoded'.
    """

    status: str
    message: Optional[int] = None


def _containment_decision(codebook: Sequence[str], fits) -> DecodeResult:
    matches = [w for w in range(len(codebook)) if fits(codebook[w])]
    if len(matches) == 1:
        return DecodeResult("decoded", matches[0] + 1)
    if matches:
        return DecodeResult("ambiguous")
    return DecodeResult("none")


def decode(
    codebook: Sequence[str],
    reads: Sequence[str],
    params: ChannelParams,
    adm: Optional[AdmissibilityParams],
    budget: int = DEFAULT_BUDGET,
) -> DecodeResult:
    """Runs the merge search, then keeps codewords containing some candidate set.

    Returns the unique such codeword's index (1-based), or an ambiguous/none
    result.  Raises BudgetExceededError when the search is too large.
    """
    _validate_codebook(codebook, params)
    ci = partition_and_merge(reads, params, adm, budget)
    return _containment_decision(
        codebook, lambda w: any(candidate_fits(w, cand) for cand in ci)
    )


def optimal_reads_decoder(
    codebook: Sequence[str], reads: Sequence[str], params: ChannelParams
) -> DecodeResult:
    """Keeps codewords that contain every read as a circular substring."""
    _validate_codebook(codebook, params)
    if any(len(r) != params.read_len for r in reads):
        raise ParameterError(f"every read must have length {params.read_len}")
    return _containment_decision(
        codebook, lambda w: all(circular_contains(w, r) for r in reads)
    )


def _validate_codebook(codebook: Sequence[str], params: ChannelParams) -> None:
    if not codebook:
        raise ParameterError("codebook must not be empty")
    if any(len(w) != params.n for w in codebook):
        raise ParameterError(f"every codeword must have length {params.n}")


# ---------------------------------------------------------------------------
# genie merges (ground-truth side information)


def genie_islands(trace: SimTrace, threshold_bits: int = 0) -> analytics.IslandSet:
    """Islands a genie forms by merging only true overlaps above a threshold.

    The genie sees the sorted start vector and merges consecutive reads whose
    true overlap strictly exceeds ``threshold_bits``; threshold 0 reproduces
    the plain island decomposition.  A threshold of L or more merges nothing
    and leaves K single-read islands.
    """
    return analytics.islands_with_threshold(trace, threshold_bits)


# formula companions live with the other expectations
expected_apparent_island_count = analytics.expected_apparent_island_count
expected_apparent_island_count_exact = analytics.expected_apparent_island_count_exact
