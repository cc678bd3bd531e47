"""Braid words in B_N, the crossing-to-generator translation, and exact
equivalence tests for B_3.

Conventions
-----------
A word is read left to right in increasing loop angle.  The letter
(i, +1) is the generator sigma_{i(i+1)}: the band with (i+1)-th largest
real part crosses the band with i-th largest real part from above
(larger imaginary part); (i, -1) is its inverse.

``permutation_of`` composes the letters' transpositions with the first
letter applied first, so permutation_of(a * b) = permutation_of(b) o
permutation_of(a).  With the convention that a tracked band path's closure
permutation maps each band's final value to the starting band it lands on,
permutation_of(tau_to_sigma(crossings)) equals that closure permutation.

Equivalence in B_3 is decided exactly through the reduced Burau
representation over integer Laurent polynomials (faithful for three
strands), so the word problem is a decision, not a numeric test.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import Inconclusive, NonAdjacentCrossing


@dataclass(frozen=True)
class Permutation:
    """A bijection on {1..N}; images[k-1] is the image of k."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"not a bijection on 1..{n}: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> "Permutation":
        images = list(range(1, n + 1))
        images[a - 1], images[b - 1] = b, a
        return cls(tuple(images))

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition self o other (other applied first)."""
        return Permutation(tuple(self(other(x)) for x in range(1, len(self.images) + 1)))

    def inverse(self) -> "Permutation":
        images = [0] * len(self.images)
        for x, y in enumerate(self.images, start=1):
            images[y - 1] = x
        return Permutation(tuple(images))

    def cycle_type(self) -> tuple[int, ...]:
        """Sorted cycle lengths; equal cycle types = conjugate in S_N."""
        seen, lengths = set(), []
        for start in range(1, len(self.images) + 1):
            if start in seen:
                continue
            length, x = 0, start
            while x not in seen:
                seen.add(x)
                x = self(x)
                length += 1
            lengths.append(length)
        return tuple(sorted(lengths))

    def is_identity(self) -> bool:
        return all(self(x) == x for x in range(1, len(self.images) + 1))


@dataclass(frozen=True)
class BraidWord:
    """A word in the Artin generators of B_strands.

    letters is a tuple of (generator index i in 1..strands-1, sign in
    {+1, -1}); the empty tuple is the identity.
    """

    strands: int
    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.strands < 2:
            raise ValueError("need at least two strands")
        for idx, sign in self.letters:
            if not 1 <= idx <= self.strands - 1:
                raise ValueError(f"generator index {idx} out of range for "
                                 f"{self.strands} strands")
            if sign not in (1, -1):
                raise ValueError(f"letter sign must be +-1, got {sign}")

    @classmethod
    def identity(cls, strands: int = 3) -> "BraidWord":
        return cls(strands, ())

    @classmethod
    def generator(cls, idx: int, sign: int = 1, strands: int = 3) -> "BraidWord":
        return cls(strands, ((idx, sign),))

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if self.strands != other.strands:
            raise ValueError("cannot multiply words on different strand counts")
        return BraidWord(self.strands, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands,
                         tuple((i, -s) for i, s in reversed(self.letters)))

    def to_text(self) -> str:
        """Textual form like "s12 s23 s12' s23'"; empty string is identity."""
        return " ".join(f"s{i}{i + 1}" + ("" if s > 0 else "'")
                        for i, s in self.letters)

    @classmethod
    def from_text(cls, text: str, strands: int = 3) -> "BraidWord":
        if strands > 9:
            raise ValueError("textual form is unambiguous only for strands <= 9")
        letters = []
        for token in text.split():
            tok = token
            sign = 1
            if tok.endswith("'"):
                sign = -1
                tok = tok[:-1]
            if (len(tok) != 3 or tok[0] != "s" or not tok[1:].isdigit()
                    or int(tok[2]) != int(tok[1]) + 1):
                raise ValueError(f"bad braid letter {token!r}")
            letters.append((int(tok[1]), sign))
        return cls(strands, tuple(letters))

    def __str__(self):
        return self.to_text() if self.letters else "<identity>"


def tau_to_sigma(crossings, strands: int = 3) -> BraidWord:
    """Translate an ordered crossing list tau_(i,j) into a braid word.

    The tau labels are continuation labels; sigma letters are indexed by
    instantaneous real-part rank.  A running permutation Z (rank -> label,
    updated as Z_{m+1} = s_{m+1} Z_m with s the label transposition of the
    m+1-th crossing) converts one to the other: tau_(i,j) becomes the
    generator at ranks k = Z^-1(i), l = Z^-1(j), positive when k < l.

    Crossings may be (i, j) pairs or objects with a ``pair`` attribute.
    Raises NonAdjacentCrossing when |k - l| != 1, which signals a band
    tracking error upstream.
    """
    rank_to_label = list(range(1, strands + 1))
    letters = []
    for m, crossing in enumerate(crossings):
        i, j = crossing.pair if hasattr(crossing, "pair") else tuple(crossing)
        if i == j or not (1 <= i <= strands and 1 <= j <= strands):
            raise ValueError(f"bad crossing labels ({i}, {j})")
        k = rank_to_label.index(i) + 1
        l = rank_to_label.index(j) + 1
        if abs(k - l) != 1:
            raise NonAdjacentCrossing(
                f"crossing #{m + 1} tau_({i},{j}) maps to ranks ({k},{l})")
        letters.append((min(k, l), 1 if k < l else -1))
        rank_to_label[k - 1], rank_to_label[l - 1] = (rank_to_label[l - 1],
                                                      rank_to_label[k - 1])
    return BraidWord(strands, tuple(letters))


def free_reduce(word: BraidWord) -> BraidWord:
    """Delete adjacent sigma sigma^-1 pairs until none remain (idempotent)."""
    stack: list[tuple[int, int]] = []
    for letter in word.letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return BraidWord(word.strands, tuple(stack))


def permutation_of(word: BraidWord) -> Permutation:
    """Underlying permutation, first letter applied first."""
    acc = Permutation.identity(word.strands)
    for idx, _ in word.letters:
        acc = Permutation.transposition(word.strands, idx, idx + 1) * acc
    return acc


def exponent_sum(word: BraidWord) -> int:
    """Sum of letter signs (the abelianization of B_N)."""
    return sum(s for _, s in word.letters)


# ---------------------------------------------------------------------------
# Exact linear algebra over integer Laurent polynomials for the reduced
# Burau representation of B_3.


class LaurentPoly:
    """Integer Laurent polynomial in one variable t."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, int] | None = None):
        self.coeffs = {e: c for e, c in (coeffs or {}).items() if c != 0}

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, exponent: int, c: int = 1) -> "LaurentPoly":
        return cls({exponent: c})

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*t^{e}" for e, c in sorted(self.coeffs.items()))


_ZERO = LaurentPoly()
_ONE = LaurentPoly.const(1)
_T = LaurentPoly.monomial(1)
_TINV = LaurentPoly.monomial(-1)

# Reduced Burau images of sigma_1, sigma_2 and inverses (2x2 over Z[t, 1/t]).
_BURAU3 = {
    (1, 1): ((-_T, _ONE), (_ZERO, _ONE)),
    (1, -1): ((-_TINV, _TINV), (_ZERO, _ONE)),
    (2, 1): ((_ONE, _ZERO), (_T, -_T)),
    (2, -1): ((_ONE, _ZERO), (_ONE, -_TINV)),
}

_BURAU3_ID = ((_ONE, _ZERO), (_ZERO, _ONE))


def _mat_mul(a, b):
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(2)), _ZERO) for j in range(2))
        for i in range(2))


def burau(word: BraidWord):
    """Reduced Burau image of a B_3 word (2x2 Laurent-polynomial matrix).

    Faithful on three strands: the image is the identity matrix exactly
    when the word is trivial in B_3.
    """
    if word.strands != 3:
        raise NotImplementedError("reduced Burau matrices implemented for B_3 only")
    acc = _BURAU3_ID
    for letter in word.letters:
        acc = _mat_mul(acc, _BURAU3[letter])
    return acc


def _burau_trace(m) -> LaurentPoly:
    return m[0][0] + m[1][1]


def _conjugator_candidates(max_length: int):
    """Freely reduced words over the four B_3 letters up to max_length."""
    letters = [(1, 1), (1, -1), (2, 1), (2, -1)]
    frontier = [()]
    yield ()
    for _ in range(max_length):
        new = []
        for w in frontier:
            for letter in letters:
                if w and w[-1][0] == letter[0] and w[-1][1] == -letter[1]:
                    continue
                nw = w + (letter,)
                new.append(nw)
                yield nw
        frontier = new


def equivalent(a: BraidWord, b: BraidWord, up_to_conjugacy: bool = False,
               max_conjugator_length: int = 6) -> bool:
    """Decide a == b in B_3, optionally up to conjugacy.

    Plain equality is exact (Burau plus permutation).  Conjugacy first
    filters by the invariants (exponent sum, permutation cycle type, Burau
    trace); survivors are resolved by searching conjugators g with
    |g| <= max_conjugator_length, testing g a = b g.  Raises Inconclusive
    when the search exhausts its bound without a decision.
    """
    if a.strands != b.strands:
        raise ValueError("strand counts differ")
    if a.strands == 2:
        return exponent_sum(a) == exponent_sum(b)
    if a.strands != 3:
        raise NotImplementedError("equivalence implemented for B_2 and B_3 only")

    a, b = free_reduce(a), free_reduce(b)
    ba, bb = burau(a), burau(b)
    equal = ba == bb
    if not up_to_conjugacy:
        return equal and permutation_of(a) == permutation_of(b)
    if equal:
        return True
    if exponent_sum(a) != exponent_sum(b):
        return False
    if permutation_of(a).cycle_type() != permutation_of(b).cycle_type():
        return False
    if _burau_trace(ba) != _burau_trace(bb):
        return False
    for g_letters in _conjugator_candidates(max_conjugator_length):
        bg = burau(BraidWord(3, g_letters))
        if _mat_mul(bg, ba) == _mat_mul(bb, bg):
            return True
    raise Inconclusive(
        f"no conjugator of length <= {max_conjugator_length} found and "
        "invariants do not separate the words")
