"""Involutive edge alphabets, reduced words and factor extraction.

Every other module manipulates the words defined here.  A letter is an
oriented edge; the positive edge with index i gets code ``2i`` and its
inverse code ``2i + 1``, so taking inverses is ``code ^ 1`` and the
topological (unoriented) edge of a code is ``code >> 1``.

Path literals use whitespace-separated tokens, an edge name optionally
suffixed with ``'`` for its inverse, e.g. ``a b' a``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError, MalformedInputError, PreconditionError
from .kernels import tighten_codes

NAME_RE = re.compile(r"\A[a-z][a-z0-9]*\Z")

# below this length the list-based tighten beats the array round trip
_KERNEL_CUTOFF = 512


class EdgeAlphabet:
    """Ordered alphabet of oriented edges closed under a fixed-point-free
    involution.

    Constructed from the positive edge names only; inverse letters are
    implicit.  The canonical total order interleaves each edge with its
    inverse: ``a, a', b, b', ...``.
    """

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise MalformedInputError("alphabet needs at least one edge name")
        seen = set()
        for name in names:
            if not NAME_RE.match(name):
                raise MalformedInputError(f"bad edge name {name!r}")
            if name in seen:
                raise MalformedInputError(f"duplicate edge name {name!r}")
            seen.add(name)
        self.names = names
        self._index = {name: 2 * i for i, name in enumerate(names)}

    @property
    def size(self) -> int:
        """Number of oriented letters (always even and >= 2)."""
        return 2 * len(self.names)

    def letters(self) -> range:
        return range(self.size)

    def positive_letters(self) -> range:
        return range(0, self.size, 2)

    @staticmethod
    def inverse(code: int) -> int:
        return code ^ 1

    @staticmethod
    def topological(code: int) -> int:
        return code >> 1

    def contains(self, code: int) -> bool:
        return 0 <= code < self.size

    def token(self, code: int) -> str:
        if not self.contains(code):
            raise MalformedInputError(f"letter code {code} not in alphabet")
        return self.names[code >> 1] + ("'" if code & 1 else "")

    def index(self, token: str) -> int:
        name, inv = (token[:-1], 1) if token.endswith("'") else (token, 0)
        base = self._index.get(name)
        if base is None or not NAME_RE.match(name):
            raise MalformedInputError(f"unknown edge token {token!r}")
        return base | inv

    def parse(self, text: str) -> tuple[int, ...]:
        return tuple(self.index(tok) for tok in text.split())

    def format(self, codes: Iterable[int]) -> str:
        return " ".join(self.token(c) for c in codes)

    def __eq__(self, other):
        return isinstance(other, EdgeAlphabet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"EdgeAlphabet({', '.join(self.names)})"


@dataclass(frozen=True)
class EdgePath:
    """A finite word over an :class:`EdgeAlphabet`; may be empty."""

    alphabet: EdgeAlphabet
    letters: tuple[int, ...]

    def __post_init__(self):
        for c in self.letters:
            if not self.alphabet.contains(c):
                raise MalformedInputError(f"letter code {c} not in alphabet")

    @classmethod
    def from_text(cls, alphabet: EdgeAlphabet, text: str) -> "EdgePath":
        return cls(alphabet, alphabet.parse(text))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def inverse(self) -> "EdgePath":
        return EdgePath(self.alphabet, inverse_codes(self.letters))

    def is_reduced(self) -> bool:
        return is_reduced(self.letters)

    def text(self) -> str:
        return self.alphabet.format(self.letters)

    def __repr__(self):
        return f"EdgePath({self.text()!r})" if self.letters else "EdgePath('')"


def inverse_codes(codes) -> tuple[int, ...]:
    return tuple(c ^ 1 for c in reversed(codes))


def is_reduced(codes) -> bool:
    return all(codes[i] != codes[i + 1] ^ 1 for i in range(len(codes) - 1))


def tighten_raw(codes) -> tuple[int, ...]:
    """Stack-cancellation on raw code sequences."""
    if len(codes) >= _KERNEL_CUTOFF:
        return tuple(int(c) for c in tighten_codes(np.asarray(codes, dtype=np.int32)))
    out = []
    for c in codes:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def cyclic_tighten_raw(codes) -> tuple[int, ...]:
    word = list(tighten_raw(codes))
    lo, hi = 0, len(word)
    while hi - lo >= 2 and word[lo] == word[hi - 1] ^ 1:
        lo += 1
        hi -= 1
    return tuple(word[lo:hi])


def least_rotation(codes) -> tuple[int, ...]:
    """Lexicographically least rotation via the two-pointer scan, O(n)."""
    word = tuple(codes)
    n = len(word)
    if n <= 1:
        return word
    i, j, k = 0, 1, 0
    while i < n and j < n and k < n:
        a = word[(i + k) % n]
        b = word[(j + k) % n]
        if a == b:
            k += 1
            continue
        if a > b:
            i += k + 1
        else:
            j += k + 1
        if i == j:
            j += 1
        k = 0
    start = min(i, j)
    return word[start:] + word[:start]


def tighten(path: EdgePath) -> EdgePath:
    """The unique reduced word freely equal to ``path``."""
    return EdgePath(path.alphabet, tighten_raw(path.letters))


def cyclic_tighten(path: EdgePath) -> EdgePath:
    """A cyclically reduced conjugate of ``path``.

    Deterministic: among the rotations of the cyclically reduced core the
    lexicographically least one is returned.
    """
    return EdgePath(path.alphabet, least_rotation(cyclic_tighten_raw(path.letters)))


def iter_factors_raw(codes, n_max: int) -> Iterator[tuple[int, ...]]:
    codes = tuple(codes)
    for length in range(1, min(n_max, len(codes)) + 1):
        for start in range(len(codes) - length + 1):
            yield codes[start:start + length]


def factors(word: EdgePath, n: int) -> set[EdgePath]:
    """All distinct contiguous subwords of ``word`` with length in [1, n].

    ``word`` must be reduced; asking for n = 0 is a domain error.
    """
    if n < 1:
        raise DomainError("factor length bound must be >= 1")
    if not word.is_reduced():
        raise PreconditionError("factors expects a reduced word")
    return {EdgePath(word.alphabet, f) for f in set(iter_factors_raw(word.letters, n))}
