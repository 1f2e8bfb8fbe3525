"""Strings over the alphabet ``{1..N}``: weights, frontiers, composed maps, and theta streams.

An address ``sigma`` is a plain tuple of ints.  Its weight ``e(sigma)`` is
the sum of the exponents of its symbols and ``e_minus`` drops the last
symbol.  The frontier ``S_n`` collects the addresses with
``e(sigma) >= n > e_minus(sigma)``; the images ``f_sigma(p)`` over a
frontier partition ``p``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .geometry import Similitude, compose, invert

Address = tuple[int, ...]

DEFAULT_FRONTIER_CAP = 10**7


class LevelTooLarge(RuntimeError):
    pass


class PrefixExhausted(IndexError):
    pass


class StreamSpecError(ValueError):
    pass


def format_address(sigma: Sequence[int]) -> str:
    if any(n > 9 for n in sigma):
        return ",".join(map(str, sigma))
    return "".join(map(str, sigma))


def parse_address(text: str) -> Address:
    text = text.strip()
    if not text:
        return ()
    if "," in text:
        return tuple(int(t) for t in text.split(","))
    return tuple(int(ch) for ch in text)


def _check(sigma: Sequence[int], N: int) -> None:
    for n in sigma:
        if not 1 <= n <= N:
            raise ValueError(f"symbol {n} outside 1..{N}")


def weight(sigma: Sequence[int], pair) -> tuple[int, int]:
    """``(e(sigma), e_minus(sigma))``; symbols are 1-based."""
    if not sigma:
        return 0, 0
    exps = pair.exponents
    _check(sigma, len(exps))
    e = sum(exps[n - 1] for n in sigma)
    return e, e - exps[sigma[-1] - 1]


def frontier_size(exponents: Sequence[int], n: int) -> int:
    """``|S_n|`` by the recursion on the remaining weight budget."""
    exps = tuple(exponents)

    @lru_cache(maxsize=None)
    def count(m: int) -> int:
        return sum(1 if a >= m else count(m - a) for a in exps)

    if n < 1:
        raise ValueError("frontier level must be >= 1")
    # fill the cache bottom-up to keep recursion shallow
    for m in range(1, n):
        count(m)
    return count(n)


@dataclass(frozen=True)
class Frontier:
    level: int
    addresses: tuple[Address, ...]

    def __len__(self) -> int:
        return len(self.addresses)

    def __iter__(self):
        return iter(self.addresses)


def walk_frontier(exponents: Sequence[int], n: int) -> Iterator[Address]:
    """Depth-first, lexicographic enumeration of ``S_n``."""
    N = len(exponents)
    stack: list[tuple[Address, int]] = [((), 0)]
    while stack:
        sigma, e = stack.pop()
        if e >= n:
            yield sigma
            continue
        for k in range(N, 0, -1):
            stack.append((sigma + (k,), e + exponents[k - 1]))


def frontier(pair, n: int, cap: int = DEFAULT_FRONTIER_CAP) -> Frontier:
    size = frontier_size(pair.exponents, n)
    if size > cap:
        raise LevelTooLarge(f"|S_{n}| = {size} exceeds the cap {cap}")
    return Frontier(n, tuple(walk_frontier(pair.exponents, n)))


def map_of(sigma: Sequence[int], pair) -> Similitude:
    """``f_sigma = f_{sigma_1} o ... o f_{sigma_k}``."""
    _check(sigma, pair.N)
    f = Similitude.identity()
    for n in sigma:
        f = compose(f, pair.maps[n - 1])
    return f


def inverse_map_of(sigma: Sequence[int], pair) -> Similitude:
    """``f_{-sigma} = f_{sigma_1}^-1 o ... o f_{sigma_k}^-1``."""
    _check(sigma, pair.N)
    f = Similitude.identity()
    for n in sigma:
        f = compose(f, invert(pair.maps[n - 1]))
    return f


# ---------------------------------------------------------------------------
# theta streams


def _champernowne(N: int) -> Iterator[int]:
    for length in itertools.count(1):
        for word in itertools.product(range(1, N + 1), repeat=length):
            yield from word


@dataclass(frozen=True)
class ThetaStream:
    """Descriptor of an infinite driver string over ``{1..N}``.

    kinds: ``periodic`` (word), ``evp`` (prefix + repeated word),
    ``champernowne``, ``random`` (seed, weights), ``explicit`` (finite word).
    """

    kind: str
    N: int
    word: Address = ()
    prefix_word: Address = ()
    seed: int = 0
    weights: tuple[float, ...] = ()
    p_min: float = 0.0

    def __post_init__(self) -> None:
        if self.N < 1:
            raise StreamSpecError("alphabet size must be positive")
        if self.kind not in ("periodic", "evp", "champernowne", "random", "explicit"):
            raise StreamSpecError(f"unknown stream kind {self.kind!r}")
        if self.kind in ("periodic", "evp") and not self.word:
            raise StreamSpecError("periodic word must be nonempty")
        for s in self.word + self.prefix_word:
            if not 1 <= s <= self.N:
                raise StreamSpecError(f"symbol {s} outside 1..{self.N}")
        if self.kind == "random":
            if len(self.weights) != self.N or abs(sum(self.weights) - 1) > 1e-9:
                raise StreamSpecError("random stream needs N weights summing to 1")
            if min(self.weights) <= 0 or min(self.weights) < self.p_min:
                raise StreamSpecError("every symbol probability must be at least p > 0")

    # constructors
    @classmethod
    def periodic(cls, word: Sequence[int], N: int) -> "ThetaStream":
        return cls("periodic", N, word=tuple(word))

    @classmethod
    def eventually_periodic(cls, prefix: Sequence[int], word: Sequence[int], N: int) -> "ThetaStream":
        return cls("evp", N, word=tuple(word), prefix_word=tuple(prefix))

    @classmethod
    def champernowne(cls, N: int) -> "ThetaStream":
        return cls("champernowne", N)

    @classmethod
    def random(cls, seed: int, N: int, weights: Sequence[float] | None = None, p: float = 0.0) -> "ThetaStream":
        w = tuple(weights) if weights is not None else tuple([1.0 / N] * N)
        return cls("random", N, seed=int(seed), weights=w, p_min=p)

    @classmethod
    def explicit(cls, word: Sequence[int], N: int) -> "ThetaStream":
        return cls("explicit", N, word=tuple(word))

    def prefix(self, k: int) -> Address:
        """``theta|k``, the first k symbols."""
        if k < 0:
            raise ValueError("prefix length must be >= 0")
        if self.kind == "periodic":
            w = self.word
            return tuple(w[i % len(w)] for i in range(k))
        if self.kind == "evp":
            b, w = self.prefix_word, self.word
            return tuple(b[i] if i < len(b) else w[(i - len(b)) % len(w)] for i in range(k))
        if self.kind == "champernowne":
            return tuple(itertools.islice(_champernowne(self.N), k))
        if self.kind == "random":
            rng = np.random.Generator(np.random.PCG64(self.seed))
            cdf = np.cumsum(self.weights)
            u = rng.random(k)
            idx = np.searchsorted(cdf, u, side="right")
            return tuple(int(min(i, self.N - 1)) + 1 for i in idx)
        if k > len(self.word):
            raise PrefixExhausted(f"explicit stream has only {len(self.word)} symbols")
        return self.word[:k]

    def __getitem__(self, i: int) -> int:
        """1-based symbol ``theta_i``."""
        if i < 1:
            raise IndexError(i)
        return self.prefix(i)[-1]

    def max_length(self) -> int | None:
        return len(self.word) if self.kind == "explicit" else None

    def spec(self) -> str:
        """The mini-language string this stream parses from."""
        if self.kind == "periodic":
            return "periodic:" + format_address(self.word)
        if self.kind == "evp":
            return f"evp:{format_address(self.prefix_word)}|{format_address(self.word)}"
        if self.kind == "champernowne":
            return "champernowne"
        if self.kind == "random":
            uniform = all(abs(w - 1.0 / self.N) < 1e-15 for w in self.weights)
            base = f"random:seed={self.seed}"
            if self.p_min:
                base += f",p={self.p_min:g}"
            if not uniform:
                base += ",weights=" + "/".join(f"{w:.17g}" for w in self.weights)
            return base
        return "explicit:" + format_address(self.word)


def parse_stream(text: str, N: int) -> ThetaStream:
    """Parse ``periodic:12``, ``evp:2|11``, ``champernowne``, ``random:seed=7,p=0.5``, ``explicit:121``."""
    text = text.strip()
    kind, _, rest = text.partition(":")
    try:
        if kind == "periodic":
            return ThetaStream.periodic(parse_address(rest), N)
        if kind in ("evp", "eventually-periodic"):
            pre, bar, word = rest.partition("|")
            if not bar:
                raise StreamSpecError("evp needs 'prefix|word'")
            return ThetaStream.eventually_periodic(parse_address(pre), parse_address(word), N)
        if kind == "champernowne":
            return ThetaStream.champernowne(N)
        if kind == "random":
            opts = dict(item.split("=", 1) for item in rest.split(",") if item)
            weights = None
            if "weights" in opts:
                weights = [float(x) for x in opts["weights"].split("/")]
            return ThetaStream.random(int(opts.get("seed", 0)), N, weights, float(opts.get("p", 0.0)))
        if kind == "explicit":
            return ThetaStream.explicit(parse_address(rest), N)
    except (ValueError, KeyError) as exc:
        if isinstance(exc, StreamSpecError):
            raise
        raise StreamSpecError(f"cannot parse stream {text!r}: {exc}") from exc
    raise StreamSpecError(f"unknown stream kind in {text!r}")


def stream_prefix(theta: ThetaStream, k: int) -> Address:
    return theta.prefix(k)


def inverse_prefix(theta: ThetaStream, k: int, pair) -> Similitude:
    """``f_{-(theta|k)}``."""
    return inverse_map_of(theta.prefix(k), pair)


def thread_count() -> int:
    """Worker cap from SELFSIM_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("SELFSIM_THREADS", "1")))
    except ValueError:
        return 1
