"""Simulator for the shotgun-sequencing channel.

One channel use takes a length-n binary codeword, draws K starting points
i.i.d. uniform on [1:n] (sampling with replacement, so duplicate starts are
possible), sorts them, and extracts a length-L read at each start.  Reads wrap
around the end of the codeword, i.e. the codeword is treated as circular.
The decoder-visible output is the unordered multiset of reads, represented
here as a seeded random permutation of the reads.

Positions are 1-based in every public value (starts, read extraction); the
internal numpy arrays are 0-based.  All randomness flows through an explicit
``numpy.random.Generator`` so every operation is a pure function of its
inputs and the seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


def _round_half_up(x: float) -> int:
    # round() does banker's rounding; half-up keeps L and K stable
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class ChannelParams:
    """One parameter point of the channel.

    Attributes:
        n: block length in bits.
        lbar: normalized read length; the read length is lbar * log2(n).
        c: nominal coverage depth.
        read_len: realized read length L = round(lbar * log2 n).
        num_reads: realized read count K = round(c * n / L).
        realized_coverage: K * L / n.  All finite-n expectation formulas use
            this value, not the nominal ``c``.
    """

    n: int
    lbar: float
    c: float
    read_len: int
    num_reads: int
    realized_coverage: float

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if not (1 <= self.read_len <= self.n):
            raise ParameterError(
                f"read length {self.read_len} outside [1, {self.n}]"
            )
        if self.num_reads < 1:
            raise ParameterError(f"read count must be >= 1, got {self.num_reads}")
        exact = self.num_reads * self.read_len / self.n
        if abs(exact - self.realized_coverage) > 1e-12:
            raise ParameterError(
                f"realized coverage {self.realized_coverage} != K*L/n = {exact}"
            )


def make_params(n: int, lbar: float, c: float) -> ChannelParams:
    """Derives a valid parameter point from (n, lbar, c).

    Args:
        n: block length, at least 4.
        lbar: normalized read length, positive.
        c: coverage depth, positive.

    Returns:
        ChannelParams with L = round(lbar * log2 n) and K = round(c * n / L).

    Raises:
        ParameterError: if the inputs are out of range or the derived L falls
            outside [1, n] or the derived K is below 1.
    """
    if n < 4:
        raise ParameterError(f"n must be >= 4, got {n}")
    if lbar <= 0:
        raise ParameterError(f"lbar must be positive, got {lbar}")
    if c <= 0:
        raise ParameterError(f"c must be positive, got {c}")
    read_len = _round_half_up(lbar * math.log2(n))
    if read_len < 1:
        raise ParameterError(f"derived read length {read_len} < 1 (lbar too small)")
    if read_len > n:
        raise ParameterError(f"derived read length {read_len} > n = {n}")
    num_reads = _round_half_up(c * n / read_len)
    if num_reads < 1:
        raise ParameterError(f"derived read count {num_reads} < 1 (c too small)")
    return ChannelParams(
        n=n,
        lbar=float(lbar),
        c=float(c),
        read_len=read_len,
        num_reads=num_reads,
        realized_coverage=num_reads * read_len / n,
    )


def trial_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Derives a per-trial generator from a master seed and an index path.

    The stream for (master_seed, point, trial) is independent of every other
    path, so trials can run in any order or in parallel and still reproduce.
    """
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, path)]))


def random_codeword(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draws n i.i.d. uniform bits as a uint8 array."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def sample_starts(params: ChannelParams, rng: np.random.Generator) -> np.ndarray:
    """Draws K starting points i.i.d. uniform on [1:n], sorted non-decreasing.

    Duplicates are permitted (sampling with replacement); two identical starts
    yield identical reads and a full overlap of L bits.
    """
    starts = rng.integers(1, params.n + 1, size=params.num_reads, dtype=np.int64)
    starts.sort()
    return starts


def extract_read(codeword: np.ndarray, t: int, read_len: int) -> np.ndarray:
    """Extracts the circular read of ``read_len`` bits starting at position t.

    t is 1-based; indices past n wrap around to the beginning.
    """
    n = len(codeword)
    if not (1 <= t <= n):
        raise ParameterError(f"start {t} outside [1, {n}]")
    if not (1 <= read_len <= n):
        raise ParameterError(f"read length {read_len} outside [1, {n}]")
    idx = (t - 1 + np.arange(read_len)) % n
    return codeword[idx]


def extract_reads(codeword: np.ndarray, starts: np.ndarray, read_len: int) -> np.ndarray:
    """Extracts one read per start as a (K, L) uint8 matrix."""
    n = len(codeword)
    idx = (starts[:, None] - 1 + np.arange(read_len)[None, :]) % n
    return codeword[idx]


@dataclass(frozen=True, eq=False)
class SimTrace:
    """Ground truth of one channel use.

    ``starts`` is the sorted start vector; ``reads_ordered`` keeps the reads
    in start order (hidden from decoders), and ``reads_shuffled`` is the same
    multiset in a seeded random permutation (what a decoder sees).
    """

    params: ChannelParams
    codeword: np.ndarray
    starts: np.ndarray
    reads_ordered: np.ndarray
    reads_shuffled: np.ndarray

    def reads_as_strings(self, shuffled: bool = True) -> list[str]:
        mat = self.reads_shuffled if shuffled else self.reads_ordered
        return [bits_to_str(row) for row in mat]

    def codeword_str(self) -> str:
        return bits_to_str(self.codeword)


def transmit(codeword: np.ndarray, params: ChannelParams, rng: np.random.Generator) -> SimTrace:
    """Simulates one channel use.

    Draws the start vector, extracts all reads, and shuffles the multiset.
    The generator is consumed in a fixed order (starts, then the shuffle
    permutation), so a trace is fully reproducible from (codeword, seed).
    """
    if len(codeword) != params.n:
        raise ParameterError(
            f"codeword length {len(codeword)} != n = {params.n}"
        )
    starts = sample_starts(params, rng)
    reads = extract_reads(codeword, starts, params.read_len)
    perm = rng.permutation(params.num_reads)
    return SimTrace(
        params=params,
        codeword=codeword,
        starts=starts,
        reads_ordered=reads,
        reads_shuffled=reads[perm],
    )


def trace_from_starts(
    codeword: np.ndarray,
    params: ChannelParams,
    starts,
    rng: np.random.Generator | None = None,
) -> SimTrace:
    """Builds a trace from explicit starting points (sorted for the caller).

    Intended for tests and worked examples; ``rng`` only drives the output
    shuffle and defaults to the identity permutation.
    """
    starts = np.sort(np.asarray(starts, dtype=np.int64))
    if len(starts) != params.num_reads:
        raise ParameterError(
            f"expected {params.num_reads} starts, got {len(starts)}"
        )
    if starts[0] < 1 or starts[-1] > params.n:
        raise ParameterError("starts must lie in [1, n]")
    if len(codeword) != params.n:
        raise ParameterError(f"codeword length {len(codeword)} != n = {params.n}")
    reads = extract_reads(codeword, starts, params.read_len)
    perm = np.arange(params.num_reads) if rng is None else rng.permutation(params.num_reads)
    return SimTrace(
        params=params,
        codeword=codeword,
        starts=starts,
        reads_ordered=reads,
        reads_shuffled=reads[perm],
    )


def bits_to_str(bits: np.ndarray) -> str:
    """Renders a bit array as an ASCII '0'/'1' string, first position first."""
    return (np.asarray(bits, dtype=np.uint8) + ord("0")).tobytes().decode("ascii")


def str_to_bits(s: str) -> np.ndarray:
    """Parses an ASCII '0'/'1' string into a uint8 bit array."""
    arr = np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")
    if arr.size and arr.max() > 1:
        raise ParameterError(f"bitstring contains characters other than 0/1: {s!r}")
    return arr.astype(np.uint8)


def trace_to_json(trace: SimTrace, seed: int) -> str:
    """Serializes a trace with the seed that produced it."""
    p = trace.params
    doc = {
        "n": p.n,
        "lbar": p.lbar,
        "c": p.c,
        "L": p.read_len,
        "K": p.num_reads,
        "seed": int(seed),
        "codeword": trace.codeword_str(),
        "starts": [int(t) for t in trace.starts],
        "reads": trace.reads_as_strings(shuffled=True),
    }
    return json.dumps(doc, indent=2)


def trace_from_json(text: str) -> SimTrace:
    """Rebuilds a trace from its JSON form, re-deriving the ordered reads."""
    doc = json.loads(text)
    params = ChannelParams(
        n=doc["n"],
        lbar=doc["lbar"],
        c=doc["c"],
        read_len=doc["L"],
        num_reads=doc["K"],
        realized_coverage=doc["K"] * doc["L"] / doc["n"],
    )
    codeword = str_to_bits(doc["codeword"])
    starts = np.asarray(doc["starts"], dtype=np.int64)
    reads_ordered = extract_reads(codeword, starts, params.read_len)
    shuffled = np.stack([str_to_bits(r) for r in doc["reads"]])
    ordered_sorted = sorted(map(bits_to_str, reads_ordered))
    shuffled_sorted = sorted(doc["reads"])
    if ordered_sorted != shuffled_sorted:
        raise ParameterError("serialized reads are not a permutation of the start-derived reads")
    return SimTrace(
        params=params,
        codeword=codeword,
        starts=starts,
        reads_ordered=reads_ordered,
        reads_shuffled=shuffled,
    )
