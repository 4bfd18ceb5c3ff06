"""Primitive substitutions, eigenrays, factor languages and complexity.

Two enumeration routes are provided and cross-checked in the tests:

* :func:`factor_language` materializes the length strata up to ``n_max`` by
  iterating the substitution on every letter until a full extra round adds
  nothing;
* :func:`complexity_counts` only counts: it runs the distinct-substring
  kernel over a long eigenray prefix and certifies the result by doubling
  the prefix until the counts stop changing.

The second route is what makes covering-bound tables to n = 5000 cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .config import size_cap
from .errors import (DomainError, InsufficientDataError, MalformedInputError,
                     NotAnEigenletterError, PreconditionError, SizeCapExceeded,
                     UnderEnumerationError)
from .graphmaps import GraphSelfMap, OrientationResult, analyze_matrix
from .kernels import expand_codes, substring_counts
from .words import iter_factors_raw

__all__ = [
    "Substitution",
    "FactorLanguage",
    "from_train_track",
    "eigen_exponent",
    "eigenray_prefix",
    "factor_language",
    "complexity_counts",
    "complexity_table",
    "entropy_estimate",
    "growth_equivalence_witness",
    "linear_fit_constant",
    "EquivalenceWitness",
]


class Substitution:
    """A letter-to-nonempty-word map over a plain finite alphabet."""

    __slots__ = ("letters", "images", "_index", "_tables", "_analysis")

    def __init__(self, letters: Sequence[str], images: Sequence[Sequence[int]]):
        self.letters = tuple(letters)
        self.images = tuple(tuple(img) for img in images)
        if len(self.letters) != len(self.images):
            raise MalformedInputError("one image per letter required")
        if not self.letters:
            raise MalformedInputError("alphabet must be nonempty")
        for letter, img in zip(self.letters, self.images):
            if not img:
                raise MalformedInputError(f"image of {letter!r} is empty")
            if any(not 0 <= c < len(self.letters) for c in img):
                raise MalformedInputError(f"image of {letter!r} uses unknown letters")
        self._index = {s: i for i, s in enumerate(self.letters)}
        self._tables = None
        self._analysis = None

    @classmethod
    def from_tokens(cls, rules: Mapping[str, Sequence[str]]) -> "Substitution":
        """Build from ``letter -> token sequence`` rules; alphabet inferred."""
        letters = sorted(rules)
        index = {s: i for i, s in enumerate(letters)}
        images = []
        for letter in letters:
            try:
                images.append(tuple(index[t] for t in rules[letter]))
            except KeyError as exc:
                raise MalformedInputError(
                    f"image of {letter!r} uses letter {exc.args[0]!r} with no rule")
        return cls(letters, images)

    @property
    def sigma(self) -> int:
        return len(self.letters)

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise MalformedInputError(f"unknown letter {token!r}")

    def format(self, codes: Iterable[int]) -> str:
        return " ".join(self.letters[c] for c in codes)

    def tables(self):
        if self._tables is None:
            offsets = [0]
            data = []
            for img in self.images:
                data.extend(img)
                offsets.append(len(data))
            self._tables = (np.asarray(offsets, dtype=np.int64),
                            np.asarray(data, dtype=np.int32))
        return self._tables

    def apply(self, codes, cap=None) -> np.ndarray:
        """One substitution round on a word of letter codes."""
        cap = size_cap(cap)
        offsets, data = self.tables()
        arr = np.asarray(codes, dtype=np.int32)
        predicted = int((offsets[arr + 1] - offsets[arr]).sum()) if arr.size else 0
        if predicted > cap:
            raise SizeCapExceeded(
                f"substituted word of {predicted} letters exceeds the cap {cap}",
                attempted=predicted, cap=cap)
        return expand_codes(arr, offsets, data)

    def occurrence_matrix(self) -> np.ndarray:
        """Entry (i, j) counts letter i in the image of letter j."""
        mat = np.zeros((self.sigma, self.sigma), dtype=np.int64)
        for j, img in enumerate(self.images):
            for c in img:
                mat[c, j] += 1
        return mat

    def analysis(self):
        if self._analysis is None:
            self._analysis = analyze_matrix(self.occurrence_matrix())
        return self._analysis

    def is_primitive(self) -> bool:
        return self.analysis().primitive

    def __repr__(self):
        rules = ", ".join(f"{letter} -> {''.join(self.letters[c] for c in img)}"
                          for letter, img in zip(self.letters, self.images))
        return f"Substitution({rules})"


def from_train_track(gsm: GraphSelfMap, orientation: OrientationResult) -> Substitution:
    """The substitution carried by an expanding primitive train track map.

    Non-orientable maps extend to a substitution over all oriented edges
    (inverse letters map to inverse words); orientable maps restrict to the
    preferred positive edges.  Either way the result is primitive whenever
    the map is.
    """
    alphabet = gsm.graph.alphabet
    if orientation.orientable:
        if orientation.positive_letters is None:
            raise DomainError("orientable result must carry its preferred letters")
        codes = sorted(orientation.positive_letters)
        letters = [alphabet.token(c) for c in codes]
        position = {c: i for i, c in enumerate(codes)}
        images = []
        for c in codes:
            img = gsm.image(c)
            if any(y not in position for y in img):
                raise DomainError(
                    "orientation mismatch: an image leaves the preferred side")
            images.append(tuple(position[y] for y in img))
        sub = Substitution(letters, images)
    else:
        codes = list(alphabet.letters())
        letters = [alphabet.token(c) for c in codes]
        images = [tuple(gsm.image(c)) for c in codes]  # codes double as indices
        sub = Substitution(letters, images)
    if not sub.is_primitive():
        raise PreconditionError(
            "the induced substitution is not primitive; the map must be "
            "primitive, expanding and train track")
    return sub


# ---------------------------------------------------------------------------
# eigenrays
# ---------------------------------------------------------------------------

def eigen_exponent(sub: Substitution, seed: int) -> int:
    """Least k >= 1 with the first letter of theta^k(seed) equal to seed and
    the image growing; raises when the first-letter orbit never returns."""
    first = [img[0] for img in sub.images]
    k = 1
    current = first[seed]
    while current != seed and k <= sub.sigma:
        current = first[current]
        k += 1
    if current != seed:
        raise NotAnEigenletterError(
            f"letter {sub.letters[seed]!r} never returns to first position")
    word = (seed,)
    for _ in range(k):
        word = tuple(c for letter in word for c in sub.images[letter])
    if len(word) < 2:
        raise NotAnEigenletterError(
            f"letter {sub.letters[seed]!r} is periodic and never grows")
    return k


def default_eigenletter(sub: Substitution) -> int:
    """The least letter sitting on a growing first-letter cycle."""
    for seed in range(sub.sigma):
        try:
            eigen_exponent(sub, seed)
            return seed
        except NotAnEigenletterError:
            continue
    raise NotAnEigenletterError("no letter generates an eigenray")


def eigenray_prefix(sub: Substitution, seed, target_len: int, cap=None) -> np.ndarray:
    """A prefix of the eigenray of ``seed`` with length >= target_len.

    Successive iterates of theta^k extend each other, so the returned word
    is a genuine prefix of the infinite fixed ray.
    """
    if isinstance(seed, str):
        seed = sub.index(seed)
    if target_len < 1:
        raise DomainError("target length must be >= 1")
    k = eigen_exponent(sub, seed)
    cap = size_cap(cap)
    word = np.asarray([seed], dtype=np.int32)
    while word.size < target_len:
        for _ in range(k):
            word = sub.apply(word, cap)
        if word.size > target_len:
            # a prefix of theta^k(w) is still a prefix of the eigenray
            word = word[:target_len]
    return word


# ---------------------------------------------------------------------------
# factor languages (materialized strata)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorLanguage:
    """Length-stratified factor set of a language generator."""

    letters: tuple[str, ...]
    strata: tuple[frozenset, ...]  # strata[n] = factors of length n, index 0 empty
    source: str

    @property
    def complete_to(self) -> int:
        return len(self.strata) - 1

    def p(self, n: int) -> int:
        if not 1 <= n <= self.complete_to:
            raise UnderEnumerationError(
                f"p({n}) not enumerated (depth {self.complete_to})",
                achieved=self.complete_to, required=n)
        return len(self.strata[n])

    def beta(self, n: int) -> int:
        return sum(self.p(m) for m in range(1, n + 1))

    def p_counts(self) -> list[int]:
        return [len(self.strata[n]) for n in range(1, len(self.strata))]

    def members(self, n: int):
        return sorted(self.strata[n])


def factor_language(sub: Substitution, n_max: int, cap=None) -> FactorLanguage:
    """All factors of length <= n_max of the substitution language.

    Iterates the substitution on every letter, harvesting factors each
    round; stops once a full extra round adds nothing and every iterate is
    either stable or has length at least twice ``n_max``.  Primitivity is
    required for the stabilization guarantee.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if not sub.is_primitive():
        raise DomainError("factor enumeration requires a primitive substitution")
    cap = size_cap(cap)
    strata = [set() for _ in range(n_max + 1)]

    def harvest(word) -> bool:
        added = False
        seen = set()
        word = tuple(int(c) for c in word)
        for f in iter_factors_raw(word, n_max):
            if f not in seen:
                seen.add(f)
                stratum = strata[len(f)]
                if f not in stratum:
                    stratum.add(f)
                    added = True
        return added

    words = [np.asarray([c], dtype=np.int32) for c in range(sub.sigma)]
    prev_lengths = [w.size for w in words]
    for w in words:
        harvest(w)
    while True:
        words = [sub.apply(w, cap) for w in words]
        lengths = [w.size for w in words]
        added = False
        for w in words:
            if harvest(w):
                added = True
        grown_enough = all(n >= 2 * n_max for n in lengths)
        stable = lengths == prev_lengths
        prev_lengths = lengths
        if not added and (grown_enough or stable):
            break
    return FactorLanguage(sub.letters,
                          tuple(frozenset(s) for s in strata),
                          source=f"substitution over {len(sub.letters)} letters")


# ---------------------------------------------------------------------------
# counting route
# ---------------------------------------------------------------------------

def complexity_counts(sub: Substitution, n_max: int, cap=None,
                      prefix_limit: int = 1 << 21) -> np.ndarray:
    """Exact p(n) for n = 1..n_max without materializing the language.

    Counts distinct substrings of an eigenray prefix and doubles the prefix
    until the whole table is unchanged, which certifies that every factor of
    length <= n_max already occurs (the language equals the factor set of
    any eigenray).  Index 0 of the returned array is 0.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if not sub.is_primitive():
        raise DomainError("complexity counting requires a primitive substitution")
    seed = default_eigenletter(sub)
    n = max(1024, 4 * n_max)
    ray = eigenray_prefix(sub, seed, min(2 * n, prefix_limit), cap)
    counts = substring_counts(ray[:n], sub.sigma, n_max)
    while True:
        if 2 * n > prefix_limit:
            raise UnderEnumerationError(
                f"factor counts did not stabilize within a {prefix_limit}-letter "
                "eigenray prefix", achieved=n, required=2 * n)
        if ray.size < 2 * n:
            ray = eigenray_prefix(sub, seed, 2 * n, cap)
        doubled = substring_counts(ray[:2 * n], sub.sigma, n_max)
        if np.array_equal(counts, doubled):
            return counts
        counts = doubled
        n *= 2


# ---------------------------------------------------------------------------
# tables and estimates
# ---------------------------------------------------------------------------

def _p_values(lang) -> list[int]:
    if isinstance(lang, FactorLanguage):
        return lang.p_counts()
    values = list(int(v) for v in lang)
    if values and values[0] == 0:  # counts arrays carry the unused index 0
        values = values[1:]
    return values


def complexity_table(lang) -> list[tuple[int, int, int]]:
    """Rows (n, p(n), beta(n)) with beta the running total of p."""
    rows = []
    beta = 0
    for n, p in enumerate(_p_values(lang), start=1):
        beta += p
        rows.append((n, p, beta))
    return rows


def linear_fit_constant(p_values) -> float:
    """The least C with p(n) <= C*n across the table."""
    values = _p_values(p_values)
    if not values:
        raise InsufficientDataError("empty complexity table")
    return max(p / n for n, p in enumerate(values, start=1))


@dataclass(frozen=True)
class EntropyEstimate:
    sequence: tuple[float, ...]  # log p(n) / n
    estimate: float


def entropy_estimate(lang) -> EntropyEstimate:
    """The sequence log p(n)/n and the mean of its last quartile."""
    values = _p_values(lang)
    if len(values) < 4:
        raise InsufficientDataError("entropy estimate needs a table of length >= 4")
    seq = tuple(float(np.log(p)) / n for n, p in enumerate(values, start=1))
    tail = seq[-(len(seq) // 4):]
    return EntropyEstimate(seq, float(np.mean(tail)))


@dataclass(frozen=True)
class EquivalenceWitness:
    constant: Optional[int]
    tested_to: int
    frontier: tuple[tuple[int, int, str], ...]  # (C, violated n, side)

    @property
    def equivalent(self) -> bool:
        return self.constant is not None


def growth_equivalence_witness(f_values, g_values, c_max: int) -> EquivalenceWitness:
    """Least C <= c_max with f(n) <= C*g(C*n) and g(n) <= C*f(C*n) on the
    overlap of the two tables; reports the first violation per C otherwise.

    A success is evidence on the finite window, not a proof.
    """
    f_vals = _p_values(f_values)
    g_vals = _p_values(g_values)
    n_max = min(len(f_vals), len(g_vals))
    if n_max < 1 or c_max < 1:
        raise InsufficientDataError("growth comparison needs nonempty tables")
    frontier = []
    for c in range(1, c_max + 1):
        limit = n_max // c
        if limit < 1:
            frontier.append((c, 0, "window empty"))
            continue
        violation = None
        for n in range(1, limit + 1):
            if f_vals[n - 1] > c * g_vals[c * n - 1]:
                violation = (c, n, "f(n) > C*g(Cn)")
                break
            if g_vals[n - 1] > c * f_vals[c * n - 1]:
                violation = (c, n, "g(n) > C*f(Cn)")
                break
        if violation is None:
            return EquivalenceWitness(c, n_max, tuple(frontier))
        frontier.append(violation)
    return EquivalenceWitness(None, n_max, tuple(frontier))
