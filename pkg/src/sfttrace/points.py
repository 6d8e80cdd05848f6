"""Periodic orbits, eventually-periodic rays, and heteroclinic points.

A left ray describes all coordinates below an end index: periodic with a
given primitive cyclic word up to a splice, then an explicit body word.
A right ray is the mirror image.  A heteroclinic point glues a left ray
over an orbit of Q, an explicit middle word, and a right ray over an
orbit of P; such points are exactly the sequences that are backward
asymptotic to Q and forward asymptotic to P.

Every object is kept in a canonical form so that equality of the
underlying sequences is plain tuple equality:

  * rays absorb any body prefix/suffix that merely continues the
    periodic pattern (maximal splice for left rays, minimal for right);
  * points absorb redundant middle symbols into the periodic sides, and
    an empty middle's junction is slid right as far as it goes; a fully
    periodic point is anchored at junction 0.

Phases are anchored at the splice: a left ray's symbol at splice-1 is
orbit.word[phase]; a right ray's symbol at its splice is orbit.word[phase].
"""

from __future__ import annotations

from dataclasses import dataclass

from .sft import Sft, Word, is_admissible


class InadmissibleRay(ValueError):
    pass


class InadmissibleOrbit(ValueError):
    pass


class IncompatibleAtZero(ValueError):
    """Bracket of two points whose symbols at index 0 differ."""


def _min_rotation(word):
    return min(tuple(word[i:] + word[:i]) for i in range(len(word)))


@dataclass(frozen=True)
class Orbit:
    """A primitive admissible cyclic word, stored as its minimal rotation."""

    word: tuple[int, ...]

    def __post_init__(self):
        if not self.word:
            raise InadmissibleOrbit("empty cyclic word")
        if self.word != _min_rotation(self.word):
            raise InadmissibleOrbit(f"{self.word} is not the minimal rotation")
        p = len(self.word)
        for d in range(1, p):
            if p % d == 0 and self.word == self.word[d:] + self.word[:d]:
                raise InadmissibleOrbit(f"{self.word} is not primitive")

    @property
    def period(self) -> int:
        return len(self.word)

    def validate(self, sft: Sft) -> None:
        wrapped = Word(0, self.word + (self.word[0],))
        if not is_admissible(sft, wrapped):
            raise InadmissibleOrbit(f"cyclic word {self.word} not admissible")


def make_orbit(word, sft: Sft | None = None) -> Orbit:
    orb = Orbit(_min_rotation(tuple(word)))
    if sft is not None:
        orb.validate(sft)
    return orb


@dataclass(frozen=True)
class PeriodicOrbitSet:
    """A finite shift-invariant set given as a list of disjoint orbits."""

    orbits: tuple[Orbit, ...]

    def __post_init__(self):
        if len(set(self.orbits)) != len(self.orbits):
            raise InadmissibleOrbit("orbit set contains duplicates")

    def __contains__(self, orbit: Orbit) -> bool:
        return orbit in self.orbits

    def isdisjoint(self, other: "PeriodicOrbitSet") -> bool:
        return not set(self.orbits) & set(other.orbits)


def make_orbit_set(words, sft: Sft | None = None) -> PeriodicOrbitSet:
    return PeriodicOrbitSet(tuple(make_orbit(w, sft) for w in words))


@dataclass(frozen=True)
class LeftRay:
    """Coordinates below `end`: orbit-periodic up to `splice`, then `body`."""

    orbit: Orbit
    phase: int
    splice: int
    body: tuple[int, ...]
    end: int

    def __post_init__(self):
        if self.splice + len(self.body) != self.end:
            raise InadmissibleRay("body length does not match [splice, end)")
        if not 0 <= self.phase < self.orbit.period:
            raise InadmissibleRay("phase out of range")

    def symbol_at(self, m: int) -> int:
        if m >= self.end:
            raise IndexError(f"left ray undefined at {m} >= {self.end}")
        if m >= self.splice:
            return self.body[m - self.splice]
        p = self.orbit.period
        return self.orbit.word[(self.phase + (m - self.splice + 1)) % p]

    @property
    def terminal(self) -> int:
        """Symbol at end - 1."""
        return self.symbol_at(self.end - 1)

    def shift(self, n: int) -> "LeftRay":
        return LeftRay(self.orbit, self.phase, self.splice - n, self.body, self.end - n)

    def extend(self, symbols) -> "LeftRay":
        """Append symbols on [end, end + len)."""
        return _canonical_left(self.orbit, self.phase, self.splice,
                               self.body + tuple(symbols), self.end + len(symbols))

    def truncate(self, c: int) -> "LeftRay":
        """Restriction to coordinates < c (c <= end)."""
        if c > self.end:
            raise IndexError("cannot truncate beyond defined coordinates")
        if c >= self.splice:
            return _canonical_left(self.orbit, self.phase, self.splice,
                                   self.body[: c - self.splice], c)
        p = self.orbit.period
        phase = (self.phase + (c - self.splice)) % p
        return LeftRay(self.orbit, phase, c, (), c)


@dataclass(frozen=True)
class RightRay:
    """Coordinates at and above `start`: `body` on [start, splice), then periodic."""

    orbit: Orbit
    phase: int
    start: int
    body: tuple[int, ...]
    splice: int

    def __post_init__(self):
        if self.start + len(self.body) != self.splice:
            raise InadmissibleRay("body length does not match [start, splice)")
        if not 0 <= self.phase < self.orbit.period:
            raise InadmissibleRay("phase out of range")

    def symbol_at(self, m: int) -> int:
        if m < self.start:
            raise IndexError(f"right ray undefined at {m} < {self.start}")
        if m < self.splice:
            return self.body[m - self.start]
        p = self.orbit.period
        return self.orbit.word[(self.phase + (m - self.splice)) % p]

    @property
    def initial(self) -> int:
        """Symbol at start."""
        return self.symbol_at(self.start)

    def shift(self, n: int) -> "RightRay":
        return RightRay(self.orbit, self.phase, self.start - n, self.body, self.splice - n)

    def extend(self, symbols) -> "RightRay":
        """Prepend symbols on [start - len, start)."""
        symbols = tuple(symbols)
        return _canonical_right(self.orbit, self.phase, self.start - len(symbols),
                                symbols + self.body, self.splice)

    def truncate(self, c: int) -> "RightRay":
        """Restriction to coordinates >= c (c >= start)."""
        if c < self.start:
            raise IndexError("cannot truncate before defined coordinates")
        if c <= self.splice:
            return _canonical_right(self.orbit, self.phase, c,
                                    self.body[c - self.start:], self.splice)
        p = self.orbit.period
        phase = (self.phase + (c - self.splice)) % p
        return RightRay(self.orbit, phase, c, (), c)


def _canonical_left(orbit, phase, splice, body, end):
    p = orbit.period
    body = tuple(body)
    while body and body[0] == orbit.word[(phase + 1) % p]:
        phase = (phase + 1) % p
        splice += 1
        body = body[1:]
    return LeftRay(orbit, phase, splice, body, end)


def _canonical_right(orbit, phase, start, body, splice):
    p = orbit.period
    body = tuple(body)
    while body and body[-1] == orbit.word[(phase - 1) % p]:
        phase = (phase - 1) % p
        splice -= 1
        body = body[:-1]
    return RightRay(orbit, phase, start, body, splice)


def make_left_ray(sft: Sft, orbit: Orbit, phase: int, splice: int, body, end: int) -> LeftRay:
    """Validated, canonical left ray."""
    body = tuple(body)
    orbit.validate(sft)
    if body:
        junction = orbit.word[phase % orbit.period]
        if not is_admissible(sft, Word(0, (junction,) + body)):
            raise InadmissibleRay(f"ray body {body} breaks admissibility")
    return _canonical_left(orbit, phase, splice, body, end)


def make_right_ray(sft: Sft, orbit: Orbit, phase: int, start: int, body, splice: int) -> RightRay:
    """Validated, canonical right ray."""
    body = tuple(body)
    orbit.validate(sft)
    if body:
        junction = orbit.word[phase % orbit.period]
        if not is_admissible(sft, Word(0, body + (junction,))):
            raise InadmissibleRay(f"ray body {body} breaks admissibility")
    return _canonical_right(orbit, phase, start, body, splice)


def periodic_left_ray(sft: Sft, orbit: Orbit, end: int, phase_at_end: int = None) -> LeftRay:
    """Pure periodic past below `end`; phase taken so symbol at end-1 is word[phase]."""
    phase = 0 if phase_at_end is None else phase_at_end
    return make_left_ray(sft, orbit, phase, end, (), end)


def periodic_right_ray(sft: Sft, orbit: Orbit, start: int, phase_at_start: int = None) -> RightRay:
    """Pure periodic future from `start`; symbol at start is word[phase]."""
    phase = 0 if phase_at_start is None else phase_at_start
    return make_right_ray(sft, orbit, phase, start, (), start)


@dataclass(frozen=True)
class HeteroclinicPoint:
    """A bi-infinite sequence, backward asymptotic to `left_orbit`, forward to
    `right_orbit`, in canonical form.

    Coordinates < n_left follow the left orbit (symbol at n_left-1 is
    word[left_phase]);  [n_left, m_right) is the explicit middle;
    coordinates >= m_right follow the right orbit (symbol at m_right is
    word[right_phase]).
    """

    left_orbit: Orbit
    left_phase: int
    n_left: int
    middle: tuple[int, ...]
    right_orbit: Orbit
    right_phase: int
    m_right: int

    def __post_init__(self):
        if self.n_left + len(self.middle) != self.m_right:
            raise ValueError("middle length does not match window")

    @property
    def window(self) -> tuple[int, int]:
        return (self.n_left, self.m_right)

    def symbol_at(self, m: int) -> int:
        if m < self.n_left:
            p = self.left_orbit.period
            return self.left_orbit.word[(self.left_phase + (m - self.n_left + 1)) % p]
        if m < self.m_right:
            return self.middle[m - self.n_left]
        p = self.right_orbit.period
        return self.right_orbit.word[(self.right_phase + (m - self.m_right)) % p]

    def segment(self, lo: int, hi: int) -> tuple[int, ...]:
        return tuple(self.symbol_at(m) for m in range(lo, hi))

    def past_ray(self, c: int) -> LeftRay:
        """The point's coordinates below c as a canonical left ray."""
        if c <= self.n_left:
            p = self.left_orbit.period
            phase = (self.left_phase + (c - self.n_left)) % p
            return LeftRay(self.left_orbit, phase, c, (), c)
        return _canonical_left(self.left_orbit, self.left_phase, self.n_left,
                               self.segment(self.n_left, c), c)

    def future_ray(self, c: int) -> RightRay:
        """The point's coordinates at and above c as a canonical right ray."""
        if c >= self.m_right:
            p = self.right_orbit.period
            phase = (self.right_phase + (c - self.m_right)) % p
            return RightRay(self.right_orbit, phase, c, (), c)
        return _canonical_right(self.right_orbit, self.right_phase, c,
                                self.segment(c, self.m_right), self.m_right)

    def render(self, sft: Sft | None = None) -> str:
        lab = (lambda s: sft.label(s)) if sft is not None else str
        lw = "".join(lab(s) for s in self.left_orbit.word)
        rw = "".join(lab(s) for s in self.right_orbit.word)
        mid = "".join(lab(s) for s in self.middle) or ""
        return f"({lw})^inf [{self.n_left}|{mid}|{self.m_right}) ({rw})^inf"


def make_point(left_orbit, left_phase, n_left, middle, right_orbit, right_phase,
               m_right) -> HeteroclinicPoint:
    """Canonicalize arbitrary gluing data into a HeteroclinicPoint."""
    middle = tuple(middle)
    if n_left + len(middle) != m_right:
        raise ValueError("middle length does not match window")
    pl, pr = left_orbit.period, right_orbit.period
    # absorb middle into the periodic sides
    while middle and middle[0] == left_orbit.word[(left_phase + 1) % pl]:
        left_phase = (left_phase + 1) % pl
        n_left += 1
        middle = middle[1:]
    while middle and middle[-1] == right_orbit.word[(right_phase - 1) % pr]:
        right_phase = (right_phase - 1) % pr
        m_right -= 1
        middle = middle[:-1]
    if not middle:
        assert n_left == m_right
        if left_orbit == right_orbit and (left_phase + 1) % pl == right_phase:
            # fully periodic: anchor the junction at 0
            right_phase = (right_phase - n_left) % pr
            left_phase = (right_phase - 1) % pr
            n_left = m_right = 0
        else:
            # slide the junction right as far as it goes; distinct primitive
            # patterns must disagree within pl + pr steps
            for _ in range(pl + pr + 1):
                if right_orbit.word[right_phase] != left_orbit.word[(left_phase + 1) % pl]:
                    break
                left_phase = (left_phase + 1) % pl
                right_phase = (right_phase + 1) % pr
                n_left += 1
                m_right += 1
            else:
                raise AssertionError("junction slide did not terminate")
    return HeteroclinicPoint(left_orbit, left_phase, n_left, middle,
                             right_orbit, right_phase, m_right)


def splice_point(past: LeftRay, middle, future: RightRay) -> HeteroclinicPoint:
    """Point whose coordinates < past.end come from `past`, then `middle`,
    then `future` from future.start onward.  Requires contiguity."""
    middle = tuple(middle)
    if past.end + len(middle) != future.start:
        raise ValueError("rays and middle do not tile the line")
    return make_point(past.orbit, past.phase, past.splice,
                      past.body + middle + future.body,
                      future.orbit, future.phase, future.splice)


def point_is_admissible(sft: Sft, z: HeteroclinicPoint) -> bool:
    """Check every transition around the non-periodic window (the periodic
    tails are admissible whenever their orbits are)."""
    z.left_orbit.validate(sft)
    z.right_orbit.validate(sft)
    pl, pr = z.left_orbit.period, z.right_orbit.period
    lo = z.n_left - pl
    hi = z.m_right + pr
    return is_admissible(sft, Word(lo, z.segment(lo, hi + 1)))


def shift_point(z: HeteroclinicPoint, n: int) -> HeteroclinicPoint:
    """Canonical form of the n-th shift image: (shift^n z)_m = z_{m+n}."""
    return make_point(z.left_orbit, z.left_phase, z.n_left - n, z.middle,
                      z.right_orbit, z.right_phase, z.m_right - n)


def bracket(x: HeteroclinicPoint, y: HeteroclinicPoint) -> HeteroclinicPoint:
    """The point taking its past from y and its future from x.

    Defined when x_0 = y_0; satisfies bracket(x, x) = x.
    """
    if x.symbol_at(0) != y.symbol_at(0):
        raise IncompatibleAtZero(
            f"symbols at index 0 differ: {x.symbol_at(0)} vs {y.symbol_at(0)}"
        )
    lo = min(y.n_left, 0)
    hi = max(x.m_right, 0)
    middle = tuple(y.symbol_at(m) for m in range(lo, 0)) + tuple(
        x.symbol_at(m) for m in range(0, hi)
    )
    return make_point(y.left_orbit, y.past_ray(lo).phase, lo, middle,
                      x.right_orbit, x.future_ray(hi).phase, hi)


def matches_past(z: HeteroclinicPoint, ray: LeftRay, upto: int) -> bool:
    """True iff z's coordinates below `upto` equal the ray's (upto <= ray.end).

    Cheap: one orbit/phase alignment check plus an explicit scan of the
    finitely many coordinates where either side is non-periodic.
    """
    if z.left_orbit != ray.orbit:
        return False
    lo = min(z.n_left, ray.splice)
    p = ray.orbit.period
    if (z.left_phase + (lo - z.n_left)) % p != (ray.phase + (lo - ray.splice)) % p:
        return False
    return all(z.symbol_at(i) == ray.symbol_at(i) for i in range(lo, upto))


def matches_future(z: HeteroclinicPoint, ray: RightRay, start: int) -> bool:
    """True iff z's coordinates from `start` on equal the ray's (start >= ray.start)."""
    if z.right_orbit != ray.orbit:
        return False
    hi = max(z.m_right, ray.splice)
    p = ray.orbit.period
    if (z.right_phase + (hi - z.m_right)) % p != (ray.phase + (hi - ray.splice)) % p:
        return False
    return all(z.symbol_at(i) == ray.symbol_at(i) for i in range(start, hi))


def in_unstable_class(z: HeteroclinicPoint, q: PeriodicOrbitSet) -> bool:
    """True iff z's past follows an orbit of q (z is unstably equivalent to q)."""
    return z.left_orbit in q


def in_stable_class(z: HeteroclinicPoint, p: PeriodicOrbitSet) -> bool:
    """True iff z's future follows an orbit of p."""
    return z.right_orbit in p


def _sort_key(z: HeteroclinicPoint):
    return (z.n_left, z.m_right, z.middle, z.left_orbit.word, z.left_phase,
            z.right_orbit.word, z.right_phase)


def enumerate_heteroclinic(sft: Sft, p_set: PeriodicOrbitSet, q_set: PeriodicOrbitSet,
                           window: int) -> list[HeteroclinicPoint]:
    """All heteroclinic points whose canonical window lies within
    [-window, window], in a fixed lexicographic order.

    Generates canonical gluing data directly, so no deduplication pass is
    needed: distinct canonical tuples are distinct points.
    """
    if window < 0:
        raise ValueError("window must be >= 0")
    out = []
    for q_orbit in q_set.orbits:
        q_orbit.validate(sft)
        pl = q_orbit.period
        for p_orbit in p_set.orbits:
            p_orbit.validate(sft)
            pr = p_orbit.period
            for lphase in range(pl):
                for rphase in range(pr):
                    for n in range(-window, window + 1):
                        _emit_middles(sft, q_orbit, lphase, n, p_orbit, rphase,
                                      window, out)
    out.sort(key=_sort_key)
    return out


def _emit_middles(sft, lorb, lphase, n, rorb, rphase, window, out):
    pl, pr = lorb.period, rorb.period
    left_sym = lorb.word[lphase]           # symbol at n - 1
    left_cont = lorb.word[(lphase + 1) % pl]   # the symbol a longer periodic past would put at n
    right_sym = rorb.word[rphase]          # symbol at the junction for empty middles
    right_pre = rorb.word[(rphase - 1) % pr]

    # empty middle: junction at n
    if sft.allowed(left_sym, right_sym):
        if lorb == rorb and (lphase + 1) % pl == rphase:
            if n == 0:
                out.append(HeteroclinicPoint(lorb, lphase, 0, (), rorb, rphase, 0))
        elif right_sym != left_cont:
            out.append(HeteroclinicPoint(lorb, lphase, n, (), rorb, rphase, n))

    # nonempty middles on [n, m), m <= window
    def grow(prefix, last):
        m = n + len(prefix)
        if (prefix[-1] != right_pre and sft.allowed(last, right_sym)):
            out.append(HeteroclinicPoint(lorb, lphase, n, prefix, rorb, rphase, m))
        if m >= window:
            return
        for s in range(sft.n):
            if sft.allowed(last, s):
                grow(prefix + (s,), s)

    if n < window:
        for s in range(sft.n):
            if s != left_cont and sft.allowed(left_sym, s):
                grow((s,), s)
