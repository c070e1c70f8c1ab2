"""The mod-2 Lambda algebra.

Generators ``λ_i`` (i ≥ 0) have bidegree (s, t) = (1, i + 1).  A word
``λ_{i_1}...λ_{i_s}`` is admissible when ``2 i_k ≥ i_{k+1}``; admissible words
form a basis.  For ``j > 2i`` write ``j = 2i + 1 + n``; the defining relation is

    λ_i λ_{2i+1+n} = Σ_{k ≥ 0} C(n-k-1, k) λ_{i+n-k} λ_{2i+1+k}

and the differential is the derivation with

    d(λ_n) = Σ_{j ≥ 1} C(n-j, j) λ_{n-j} λ_{j-1}.

Polynomials are frozensets of index tuples (GF(2) coefficients).  Words are
plain tuples internally; :class:`LambdaWord` is the public wrapper.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

Word = tuple


def binom2(n: int, k: int) -> int:
    """C(n, k) mod 2 by Lucas' theorem."""
    if k < 0 or n < 0 or k > n:
        return 0
    return int((n & k) == k)


def is_admissible(word) -> bool:
    return all(2 * word[i] >= word[i + 1] for i in range(len(word) - 1))


def bidegree(word) -> tuple[int, int]:
    return len(word), len(word) + sum(word)


@dataclass(frozen=True, order=True)
class LambdaWord:
    indices: tuple

    def __post_init__(self):
        if any(i < 0 for i in self.indices):
            raise ValueError(f"negative index in {self.indices}")

    @property
    def s(self) -> int:
        return len(self.indices)

    @property
    def t(self) -> int:
        return len(self.indices) + sum(self.indices)

    @property
    def admissible(self) -> bool:
        return is_admissible(self.indices)

    def __mul__(self, other: "LambdaWord") -> "LambdaWord":
        return LambdaWord(self.indices + other.indices)

    def __str__(self) -> str:
        return format_word(self.indices)


class LambdaPolynomial:
    """GF(2) sum of words sharing one bidegree."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable = ()):
        acc: set = set()
        for w in terms:
            w = w.indices if isinstance(w, LambdaWord) else tuple(w)
            acc ^= {w}
        degs = {bidegree(w) for w in acc}
        if len(degs) > 1:
            raise ValueError(f"mixed bidegrees {sorted(degs)}")
        self.terms = frozenset(acc)

    @property
    def bidegree(self):
        for w in self.terms:
            return bidegree(w)
        return None

    def __add__(self, other: "LambdaPolynomial") -> "LambdaPolynomial":
        return LambdaPolynomial(self.terms ^ other.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, LambdaPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join("λ(" + format_word(w) + ")" for w in sorted(self.terms))


# ---------------------------------------------------------------------------
# bases


@lru_cache(maxsize=None)
def _admissible(length: int, total: int, cap: int) -> tuple:
    """Admissible words of given length and index sum whose first index ≤ cap."""
    if length == 0:
        return ((),) if total == 0 else ()
    out = []
    for first in range(0, min(cap, total) + 1):
        for rest in _admissible(length - 1, total - first, 2 * first):
            out.append((first,) + rest)
    return tuple(out)


def admissible_basis(s: int, t: int) -> list[LambdaWord]:
    """Admissible words of length s and internal degree t, lexicographic."""
    return [LambdaWord(w) for w in admissible_words(s, t)]


def admissible_words(s: int, t: int, first_max: int | None = None) -> tuple:
    if s < 0 or t < s:
        return ()
    total = t - s
    return _admissible(s, total, total if first_max is None else first_max)


def count_admissible(s: int, t: int) -> int:
    return _count(s, t - s, t - s)


@lru_cache(maxsize=None)
def _count(length: int, total: int, cap: int) -> int:
    if length == 0:
        return int(total == 0)
    return sum(_count(length - 1, total - f, 2 * f) for f in range(0, min(cap, total) + 1))


# ---------------------------------------------------------------------------
# relations and normal form


@lru_cache(maxsize=None)
def relation(i: int, j: int) -> tuple:
    """Admissible expansion of the inadmissible pair λ_i λ_j (j > 2i)."""
    n = j - 2 * i - 1
    if n < 0:
        raise ValueError(f"pair ({i}, {j}) is admissible")
    out = []
    k = 0
    while n - k - 1 >= k:
        if binom2(n - k - 1, k):
            out.append((i + n - k, 2 * i + 1 + k))
        k += 1
    return tuple(out)


_memo_lock = threading.Lock()
_prepend_memo: dict = {}
_d_memo: dict = {}


def _xor_into(acc: set, terms) -> None:
    for w in terms:
        if w in acc:
            acc.remove(w)
        else:
            acc.add(w)


def prepend(i: int, word: tuple) -> frozenset:
    """Normal form of λ_i · word for an admissible ``word``."""
    if not word or 2 * i >= word[0]:
        return frozenset(((i,) + word,))
    key = (i, word)
    hit = _prepend_memo.get(key)
    if hit is not None:
        return hit
    acc: set = set()
    rest = word[1:]
    for a, b in relation(i, word[0]):
        for w in prepend(b, rest):
            _xor_into(acc, prepend(a, w))
    res = frozenset(acc)
    with _memo_lock:
        _prepend_memo[key] = res
    return res


def normalize_tuple(word: tuple) -> frozenset:
    """Normal form of an arbitrary word, as a set of admissible tuples."""
    cur = {()}
    for i in reversed(word):
        nxt: set = set()
        for w in cur:
            _xor_into(nxt, prepend(i, w))
        cur = nxt
        if not cur:
            break
    return frozenset(cur)


def normalize_set(words: Iterable) -> frozenset:
    acc: set = set()
    for w in words:
        _xor_into(acc, normalize_tuple(w))
    return frozenset(acc)


def normalize(word) -> LambdaPolynomial:
    """GF(2) sum of admissible words equal to ``word``."""
    if isinstance(word, LambdaPolynomial):
        return LambdaPolynomial(normalize_set(word.terms))
    w = word.indices if isinstance(word, LambdaWord) else tuple(word)
    return LambdaPolynomial(normalize_tuple(w))


def tail_normalize(word) -> LambdaPolynomial:
    """Straighten everything after the leading index; the leading index stays."""
    w = word.indices if isinstance(word, LambdaWord) else tuple(word)
    if not w:
        raise ValueError("tail_normalize needs a nonempty word")
    return LambdaPolynomial((w[0],) + v for v in normalize_tuple(w[1:]))


def normalize_leftmost(word: tuple) -> frozenset:
    """Normal form by always rewriting the leftmost inadmissible pair.

    Independent of :func:`prepend`'s right-to-left strategy; agreement of the
    two on overlapping triples is the confluence check for the relations.
    """
    todo = {tuple(word)}
    done: set = set()
    while todo:
        nxt: set = set()
        for w in todo:
            for p in range(len(w) - 1):
                if 2 * w[p] < w[p + 1]:
                    for a, b in relation(w[p], w[p + 1]):
                        _xor_into(nxt, [w[:p] + (a, b) + w[p + 2:]])
                    break
            else:
                _xor_into(done, [w])
        todo = nxt
    return frozenset(done)


# ---------------------------------------------------------------------------
# differential


@lru_cache(maxsize=None)
def d_generator(n: int) -> tuple:
    """d(λ_n) as a tuple of admissible length-2 words."""
    out = []
    j = 1
    while n - j >= j:
        if binom2(n - j, j):
            out.append((n - j, j - 1))
        j += 1
    return tuple(out)


def d_tuple(word: tuple) -> frozenset:
    """Differential of an admissible word (set of admissible words)."""
    if not word:
        return frozenset()
    hit = _d_memo.get(word)
    if hit is not None:
        return hit
    i, rest = word[0], word[1:]
    acc: set = set()
    for a, b in d_generator(i):
        for w in prepend(b, rest):
            _xor_into(acc, prepend(a, w))
    for w in d_tuple(rest):
        _xor_into(acc, prepend(i, w))
    res = frozenset(acc)
    with _memo_lock:
        _d_memo[word] = res
    return res


def d_set(words: Iterable) -> frozenset:
    acc: set = set()
    for w in words:
        _xor_into(acc, d_tuple(w))
    return frozenset(acc)


def d_free(word: tuple) -> frozenset:
    """Leibniz differential of an arbitrary word, then normalized."""
    acc: set = set()
    for p, i in enumerate(word):
        for a, b in d_generator(i):
            _xor_into(acc, normalize_tuple(word[:p] + (a, b) + word[p + 1:]))
    return frozenset(acc)


def differential(x) -> LambdaPolynomial:
    """d of an admissible word or polynomial, as an admissible polynomial."""
    if isinstance(x, LambdaPolynomial):
        return LambdaPolynomial(d_set(x.terms))
    w = x.indices if isinstance(x, LambdaWord) else tuple(x)
    if not is_admissible(w):
        raise ValueError(f"differential expects an admissible word, got {w}")
    return LambdaPolynomial(d_tuple(w))


def clear_memo() -> None:
    with _memo_lock:
        _prepend_memo.clear()
        _d_memo.clear()


# ---------------------------------------------------------------------------
# text syntax: "(n) i_1 ... i_s" with a cell, "i_1 ... i_s" without


def format_word(word, cell: int | None = None) -> str:
    body = " ".join(str(i) for i in word)
    if cell is None:
        return body
    return f"({cell}) {body}".rstrip()


def parse_word(text: str) -> tuple[int | None, tuple]:
    """Parse word syntax; returns (cell or None, indices)."""
    text = text.strip()
    cell = None
    if text.startswith("("):
        close = text.index(")")
        cell = int(text[1:close])
        text = text[close + 1:]
    parts = text.split()
    try:
        idx = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"bad Lambda word syntax: {text!r}") from exc
    if any(i < 0 for i in idx) or (cell is not None and cell < 0):
        raise ValueError(f"negative index in {text!r}")
    return cell, idx
