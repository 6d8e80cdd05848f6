"""Transition-matrix model of a shift of finite type.

The space is the set of bi-infinite symbol sequences x with
trans[x_n][x_{n+1}] = 1 for every n, under the left shift
(shift(x))_n = x_{n+1}.  Only vertex shifts are supported: the matrix
has entries in {0, 1}.  Path counts are kept as exact Python integers
because they grow like lambda^L and serve as the ground truth for every
trace computation downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class ZeroRowOrColumn(ValueError):
    """A symbol with no successor or no predecessor."""

    def __init__(self, symbol: int, axis: str):
        self.symbol = symbol
        self.axis = axis
        super().__init__(f"symbol {symbol} has an all-zero {axis}")


class InvalidMatrix(ValueError):
    """Matrix is not square 0/1 (edge shifts with entries > 1 are rejected)."""


@dataclass(frozen=True)
class Sft:
    """Shift of finite type given by an n x n 0/1 transition matrix.

    trans[i][j] == 1 means symbol j may follow symbol i.  Immutable;
    all operations on it are pure functions.
    """

    trans: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        n = len(self.trans)
        if n < 1:
            raise InvalidMatrix("empty transition matrix")
        for row in self.trans:
            if len(row) != n:
                raise InvalidMatrix("transition matrix must be square")
            for e in row:
                if e not in (0, 1):
                    raise InvalidMatrix(
                        f"entry {e!r} not in {{0, 1}}; recode edge shifts as vertex shifts"
                    )
        if self.labels is not None and len(self.labels) != n:
            raise InvalidMatrix("label count does not match matrix size")

    @property
    def n(self) -> int:
        return len(self.trans)

    def allowed(self, i: int, j: int) -> bool:
        return self.trans[i][j] == 1

    def successors(self, i: int) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if self.trans[i][j])

    def predecessors(self, j: int) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.trans[i][j])

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def symbol_of(self, lab: str) -> int:
        if self.labels is not None:
            return self.labels.index(lab)
        return int(lab)


@dataclass(frozen=True)
class Word:
    """Finite window of a point: symbols occupying [start, start + len)."""

    start: int
    symbols: tuple[int, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def end(self) -> int:
        return self.start + len(self.symbols)


def make_sft(matrix, labels=None) -> Sft:
    """Build and validate an Sft from nested sequences."""
    sft = Sft(tuple(tuple(int(e) for e in row) for row in matrix),
              tuple(labels) if labels is not None else None)
    validate(sft)
    return sft


def validate(sft: Sft) -> None:
    """Raise ZeroRowOrColumn unless every symbol has a successor and a predecessor."""
    for i, row in enumerate(sft.trans):
        if not any(row):
            raise ZeroRowOrColumn(i, "row")
    for j in range(sft.n):
        if not any(sft.trans[i][j] for i in range(sft.n)):
            raise ZeroRowOrColumn(j, "column")


def is_mixing(sft: Sft) -> bool:
    """True iff the transition matrix is primitive (some power entrywise positive).

    Checked up to the Wielandt bound (n-1)^2 + 1.  Single-symbol systems are
    treated as not mixing so that the measure machinery downstream always works
    with at least two symbols.
    """
    n = sft.n
    if n < 2:
        return False
    bound = (n - 1) ** 2 + 1
    reach = [[bool(e) for e in row] for row in sft.trans]
    for _ in range(bound):
        if all(all(row) for row in reach):
            return True
        reach = [
            [any(reach[i][k] and sft.trans[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]
    return False


def is_admissible(sft: Sft, w: Word) -> bool:
    """True iff every adjacent transition of the word is allowed (vacuous if short)."""
    for s in w.symbols:
        if not 0 <= s < sft.n:
            raise ValueError(f"symbol {s} out of range")
    return all(sft.allowed(a, b) for a, b in zip(w.symbols, w.symbols[1:]))


def _mat_mul(a, b, n):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _mat_pow(m, e, n):
    # repeated squaring over exact integers
    result = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    base = m
    while e > 0:
        if e & 1:
            result = _mat_mul(result, base, n)
        base = _mat_mul(base, base, n)
        e >>= 1
    return result


def count_paths(sft: Sft, i: int, j: int, length: int) -> int:
    """Exact number of admissible paths of `length` steps from i to j.

    Returns (trans^length)[i][j] as an arbitrary-precision integer;
    length 0 gives the identity matrix entry.
    """
    if length < 0:
        raise ValueError("path length must be >= 0")
    if not (0 <= i < sft.n and 0 <= j < sft.n):
        raise ValueError("symbol out of range")
    return _mat_pow(sft.trans, length, sft.n)[i][j]


def sft_to_json(sft: Sft) -> str:
    """Serialize as the documented matrix format; round-trips bit-exactly."""
    doc = {
        "symbols": [sft.label(i) for i in range(sft.n)],
        "matrix": [list(row) for row in sft.trans],
    }
    return json.dumps(doc, sort_keys=True, separators=(", ", ": "))


def sft_from_json(text: str) -> Sft:
    doc = json.loads(text)
    if "matrix" not in doc:
        raise InvalidMatrix("missing 'matrix' field")
    return make_sft(doc["matrix"], doc.get("symbols"))
