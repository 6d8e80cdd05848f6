"""The fundamental representation on square-summable sequences over the
heteroclinic set, and exact operator-trace asymptotics.

Basis vectors are indexed by heteroclinic points.  A stable element acts
by past replacement wherever the point matches the term's source
cylinder; an unstable element replaces futures.  The single unitary
induced by the shift (u xi = xi o shift^{-1}) implements the algebra
automorphism on both sides.

Traces of products are computed symbolically, never by materializing a
Hilbert-space truncation.  For a stable term at window N and an unstable
term at window M, conjugating by the k-th shift power moves the
constraints to coordinates < N - k and >= M + k.  When the constraint
regions are disjoint, a diagonal pair contributes the exact number of
admissible bridges between them - a transfer-matrix count - and any
off-diagonal pair contributes nothing (the replacement would have to
alter a pinned coordinate).  When the regions overlap, all coordinates
of a candidate fixed point are pinned, and the contribution is 1 or 0
according to four ray-segment consistency checks.  Everything is exact
integer arithmetic; the lambda^{-2k} scaling is applied through
logarithms of big integers when plain floats would overflow.

An independent brute-force route (`trace_product_oracle`) enumerates
basis points inside a sufficient window and applies the operators
vector by vector; it must agree with the symbolic route exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (
    AlgebraElement,
    SideMismatch,
    StableBisection,
    UnstableBisection,
    apply_alpha,
    tau_s,
    tau_u,
)
from .perron import PerronData
from .points import (
    HeteroclinicPoint,
    PeriodicOrbitSet,
    enumerate_heteroclinic,
    matches_future,
    matches_past,
    shift_point,
    splice_point,
)
from .sft import count_paths

# basis vectors are indexed by heteroclinic points
BasisVector = HeteroclinicPoint


class WindowOverflow(RuntimeError):
    """Support window exceeds the configured cap; input too large for desk scale."""


class WindowTooSmall(ValueError):
    """Oracle enumeration window does not cover all affected basis points."""


class OrbitsNotDisjoint(ValueError):
    """The forward and backward orbit sets share an orbit."""


# ---------------------------------------------------------------------------
# exact traces


def _frac_to_float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


@dataclass(frozen=True)
class ExactTrace:
    """A trace value as a sum of coefficient x big-integer-count pairs.

    Counts are nonnegative path counts; coefficients are the complex term
    products.  Aggregation happens over exact rationals so two routes to
    the same trace compare exactly, independent of summation order.
    """

    pairs: tuple[tuple[complex, int], ...]

    @staticmethod
    def from_pairs(pairs) -> "ExactTrace":
        merged: dict = {}
        for c, n in pairs:
            if n and c != 0:
                merged[c] = merged.get(c, 0) + n
        return ExactTrace(tuple(sorted(
            ((c, n) for c, n in merged.items() if n),
            key=lambda p: (p[0].real, p[0].imag),
        )))

    def exact_total(self) -> tuple[Fraction, Fraction]:
        re = sum((Fraction(c.real) * n for c, n in self.pairs), Fraction(0))
        im = sum((Fraction(c.imag) * n for c, n in self.pairs), Fraction(0))
        return re, im

    def total(self) -> complex:
        re, im = self.exact_total()
        return complex(_frac_to_float(re), _frac_to_float(im))

    def as_int(self) -> int:
        """The exact value when it is a plain integer (raises otherwise)."""
        re, im = self.exact_total()
        if im != 0 or re.denominator != 1:
            raise ValueError("trace is not an integer")
        return re.numerator

    def scaled(self, lam: float, k: int) -> complex:
        """The value divided by lam^{2k}, big-integer safe."""
        out = 0j
        for c, n in self.pairs:
            out += c * _scaled_count(n, lam, k)
        return out

    def render(self) -> str:
        """Decimal string; exact integers in full precision."""
        re, im = self.exact_total()
        if im == 0 and re.denominator == 1:
            return str(re.numerator)
        z = self.total()
        if z.imag == 0:
            return repr(z.real)
        return f"{z.real!r}{z.imag:+}j"

    def __eq__(self, other):
        if not isinstance(other, ExactTrace):
            return NotImplemented
        return self.exact_total() == other.exact_total()

    def __hash__(self):
        return hash(self.exact_total())


def _scaled_count(n: int, lam: float, k: int) -> float:
    if n == 0:
        return 0.0
    # stay in exact float arithmetic while representable (keeps the full
    # shift's powers of two exactly cancelling); fall back to logs
    if n.bit_length() < 970 and 2 * k * math.log2(lam) < 970:
        return n / lam ** (2 * k)
    return math.exp(math.log(n) - 2 * k * math.log(lam))


# ---------------------------------------------------------------------------
# the representation


def _apply_stable(e: StableBisection, w: HeteroclinicPoint):
    """Past replacement, or None when w misses the source cylinder."""
    n = e.window
    if not matches_past(w, e.source, n):
        return None
    upper = max(n, w.m_right)
    return splice_point(e.target, w.segment(n, upper), w.future_ray(upper))


def _apply_unstable(f: UnstableBisection, w: HeteroclinicPoint):
    m = f.window
    if not matches_future(w, f.source, m):
        return None
    lower = min(m, w.n_left)
    return splice_point(w.past_ray(lower), w.segment(lower, m), f.target)


def _apply_bisection(b, w):
    if isinstance(b, StableBisection):
        return _apply_stable(b, w)
    return _apply_unstable(b, w)


def apply_element(x: AlgebraElement, w: HeteroclinicPoint) -> dict:
    """The image of a basis vector: a finitely supported point -> coefficient map."""
    out: dict[HeteroclinicPoint, complex] = {}
    for c, b in x.terms:
        y = _apply_bisection(b, w)
        if y is not None:
            out[y] = out.get(y, 0j) + c
    return {pt: c for pt, c in out.items() if c != 0}


def apply_to_combination(x: AlgebraElement, vec: dict) -> dict:
    out: dict[HeteroclinicPoint, complex] = {}
    for w, cw in vec.items():
        for y, cy in apply_element(x, w).items():
            out[y] = out.get(y, 0j) + cy * cw
    return {pt: c for pt, c in out.items() if c != 0}


def unitary_conjugation_check(x: AlgebraElement, n: int, sample_points) -> bool:
    """Verify that the shift unitary implements the automorphism on samples:
    applying the n-shifted element equals conjugating the action by u^n."""
    xn = apply_alpha(x, n)
    for w in sample_points:
        lhs = apply_element(xn, w)
        inner = apply_element(x, shift_point(w, -n))
        rhs = {shift_point(z, n): c for z, c in inner.items()}
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# finite-rank products


@dataclass
class FiniteOperator:
    """A finitely supported operator: (row point, column point) -> coefficient."""

    entries: dict = field(default_factory=dict)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def __sub__(self, other: "FiniteOperator") -> "FiniteOperator":
        out = dict(self.entries)
        for key, c in other.entries.items():
            out[key] = out.get(key, 0j) - c
        return FiniteOperator({k: c for k, c in out.items() if c != 0})

    def diagonal_sum(self) -> complex:
        return sum((c for (r, co), c in self.entries.items() if r == co), 0j)

    def _matrix(self):
        rows = sorted({r for r, _ in self.entries}, key=_point_key)
        cols = sorted({c for _, c in self.entries}, key=_point_key)
        ridx = {p: i for i, p in enumerate(rows)}
        cidx = {p: i for i, p in enumerate(cols)}
        mat = np.zeros((len(rows), len(cols)), dtype=complex)
        for (r, c), v in self.entries.items():
            mat[ridx[r], cidx[c]] = v
        return mat

    def rank(self, tol: float = 1e-10) -> int:
        if self.is_zero:
            return 0
        return int(np.linalg.matrix_rank(self._matrix(), tol=tol))


def _point_key(z: HeteroclinicPoint):
    return (z.n_left, z.m_right, z.middle, z.left_orbit.word, z.left_phase,
            z.right_orbit.word, z.right_phase)


def operator_norm(t: FiniteOperator) -> float:
    """Largest singular value of the finite matrix (0 for the zero operator)."""
    if t.is_zero:
        return 0.0
    return float(np.linalg.svd(t._matrix(), compute_uv=False)[0])


def _bridges(sft, start_symbol, end_symbol, width):
    """Admissible words w of the given width with start -> w -> end allowed."""
    if width == 0:
        return [()] if sft.allowed(start_symbol, end_symbol) else []
    out = []

    def grow(prefix, last):
        if len(prefix) == width:
            if sft.allowed(last, end_symbol):
                out.append(prefix)
            return
        for s in range(sft.n):
            if sft.allowed(last, s):
                grow(prefix + (s,), s)

    for s in range(sft.n):
        if sft.allowed(start_symbol, s):
            grow((s,), s)
    return out


def product_operator(a: AlgebraElement, b: AlgebraElement, p: PerronData,
                     order: str = "ab", window_cap: int = 16) -> FiniteOperator:
    """The exact matrix of the product of a stable and an unstable element.

    order "ab" applies the unstable element first (the operator a.b);
    "ba" applies the stable element first.  The support is provably
    finite: the unstable side pins futures, the stable side pins pasts,
    and only an explicit bridge window remains free.  Raises
    WindowOverflow when that window exceeds `window_cap`.
    """
    if a.side != "stable" or b.side != "unstable":
        raise SideMismatch("product needs a stable and an unstable element")
    if order not in ("ab", "ba"):
        raise ValueError("order must be 'ab' or 'ba'")
    sft = p.sft
    entries: dict = {}
    for ca, e in a.terms:
        for cb, f in b.terms:
            coeff = ca * cb
            n, m = e.window, f.window
            alpha, beta = e.target, e.source
            gamma, delta = f.target, f.source
            if n <= m:
                # both products agree: source pinned outside [n, m), free bridge inside
                width = m - n
                if width > window_cap:
                    raise WindowOverflow(
                        f"free window of width {width} exceeds cap {window_cap}"
                    )
                for mid in _bridges(sft, beta.terminal, delta.initial, width):
                    w_pt = splice_point(beta, mid, delta)
                    v_pt = splice_point(alpha, mid, gamma)
                    entries[(v_pt, w_pt)] = entries.get((v_pt, w_pt), 0j) + coeff
            elif order == "ab":
                # overlap [m, n): the intermediate future-replacement must
                # already match the stable source there
                if all(gamma.symbol_at(i) == beta.symbol_at(i) for i in range(m, n)):
                    w_pt = splice_point(beta.truncate(m), (), delta)
                    v_pt = splice_point(alpha, (), gamma.truncate(n))
                    entries[(v_pt, w_pt)] = entries.get((v_pt, w_pt), 0j) + coeff
            else:
                if all(alpha.symbol_at(i) == delta.symbol_at(i) for i in range(m, n)):
                    w_pt = splice_point(beta, (), delta.truncate(n))
                    v_pt = splice_point(alpha.truncate(m), (), gamma)
                    entries[(v_pt, w_pt)] = entries.get((v_pt, w_pt), 0j) + coeff
    return FiniteOperator({k: c for k, c in entries.items() if abs(c) >= 1e-15})


# ---------------------------------------------------------------------------
# exact traces of conjugated products


@dataclass(frozen=True)
class TraceDiagnostics:
    """How the trace decomposed: bridge-counting pairs vs pinned-overlap pairs,
    and how many off-diagonal pairs admitted a roundtrip fixed point."""

    bridge_pairs: int = 0
    overlap_pairs: int = 0
    offdiag_pairs: int = 0
    offdiag_fixed_points: int = 0


def trace_product_detail(a: AlgebraElement, b: AlgebraElement, k: int,
                         p: PerronData) -> tuple[ExactTrace, TraceDiagnostics]:
    """Exact trace of (shift^k-conjugated a) x (shift^{-k}-conjugated b),
    with diagnostics."""
    if a.side != "stable" or b.side != "unstable":
        raise SideMismatch("trace needs a stable and an unstable element")
    if k < 0:
        raise ValueError("k must be >= 0")
    sft = p.sft
    pairs = []
    bridge = overlap = offdiag = fixed = 0
    for ca, e in a.terms:
        for cb, f in b.terms:
            coeff = ca * cb
            n = e.window - k
            m = f.window + k
            diag = e.is_diagonal and f.is_diagonal
            if not diag:
                offdiag += 1
            if m >= n:
                bridge += 1
                if diag:
                    length = m - n + 1
                    pairs.append(
                        (coeff, count_paths(sft, e.source.terminal, f.source.initial, length))
                    )
                # off-diagonal pairs with disjoint constraints have no fixed
                # points: the replacement would alter a pinned coordinate
            else:
                overlap += 1
                alpha = e.target.shift(k)
                beta = e.source.shift(k)
                gamma = f.target.shift(-k)
                delta = f.source.shift(-k)
                consistent = (
                    alpha.truncate(m) == beta.truncate(m)
                    and gamma.truncate(n) == delta.truncate(n)
                    and all(alpha.symbol_at(i) == delta.symbol_at(i) for i in range(m, n))
                    and all(gamma.symbol_at(i) == beta.symbol_at(i) for i in range(m, n))
                )
                if consistent:
                    pairs.append((coeff, 1))
                    if not diag:
                        fixed += 1
    return ExactTrace.from_pairs(pairs), TraceDiagnostics(bridge, overlap, offdiag, fixed)


def trace_product(a: AlgebraElement, b: AlgebraElement, k: int, p: PerronData) -> ExactTrace:
    return trace_product_detail(a, b, k, p)[0]


def required_window(a: AlgebraElement, b: AlgebraElement, k: int) -> int:
    """A window guaranteed to contain the canonical windows of every basis
    point that can contribute to the k-th conjugated trace."""
    req = 0
    for _, e in a.terms:
        for ray in (e.target, e.source):
            req = max(req, abs(ray.splice - k), abs(ray.end - k))
    for _, f in b.terms:
        for ray in (f.target, f.source):
            req = max(req, abs(ray.splice + k), abs(ray.start + k))
    return req


def trace_product_oracle(a: AlgebraElement, b: AlgebraElement, k: int, window: int,
                         p: PerronData, p_set: PeriodicOrbitSet,
                         q_set: PeriodicOrbitSet) -> ExactTrace:
    """Brute-force trace: enumerate basis points and apply the operators.

    Requires `window` at least `required_window(a, b, k)` so that every
    affected point is enumerated; the sum is aggregated exactly and must
    equal `trace_product` exactly.
    """
    req = required_window(a, b, k)
    if window < req:
        raise WindowTooSmall(f"need window >= {req}, got {window}")
    a_k = apply_alpha(a, k)
    b_k = apply_alpha(b, -k)
    pairs = []
    for w in enumerate_heteroclinic(p.sft, p_set, q_set, req):
        for cb, f in b_k.terms:
            y = _apply_bisection(f, w)
            if y is None:
                continue
            for ca, e in a_k.terms:
                z = _apply_bisection(e, y)
                if z == w:
                    pairs.append((ca * cb, 1))
    return ExactTrace.from_pairs(pairs)


# ---------------------------------------------------------------------------
# trace reports


@dataclass(frozen=True)
class TraceRow:
    k: int
    trace: ExactTrace
    scaled: complex
    target: complex
    abs_err: float


@dataclass(frozen=True)
class TraceReport:
    """Scaled trace values against the product of the two traces."""

    rows: tuple[TraceRow, ...]
    target: complex
    lam: float

    def csv_lines(self) -> list[str]:
        lines = ["k,trace,scaled,target,abs_err"]
        for r in self.rows:
            lines.append(
                f"{r.k},{r.trace.render()},{_fmt(r.scaled)},{_fmt(r.target)},{r.abs_err!r}"
            )
        return lines

    def final_error(self) -> float:
        return self.rows[-1].abs_err if self.rows else math.nan

    def fitted_decay_rate(self) -> float:
        """Least-squares slope of log-error per step over the rows with
        nonzero error; nan when fewer than two such rows exist."""
        pts = [(r.k, math.log(r.abs_err)) for r in self.rows if r.abs_err > 0]
        if len(pts) < 2:
            return math.nan
        ks = np.array([q[0] for q in pts], dtype=float)
        ys = np.array([q[1] for q in pts], dtype=float)
        slope = np.polyfit(ks, ys, 1)[0]
        return float(math.exp(slope))


def _fmt(z: complex) -> str:
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{z.imag:+}j"


def scaled_trace_sequence(a: AlgebraElement, b: AlgebraElement, k_range,
                          p: PerronData) -> TraceReport:
    """Rows (k, exact trace, lambda^{-2k}-scaled value, target, error) for
    monotone k, where the target is the product of the two traces."""
    target = tau_s(a, p) * tau_u(b, p)
    rows = []
    for k in sorted(k_range):
        tr = trace_product(a, b, k, p)
        scaled = tr.scaled(p.lam, k)
        rows.append(TraceRow(k, tr, scaled, target, abs(scaled - target)))
    return TraceReport(tuple(rows), target, p.lam)


# ---------------------------------------------------------------------------
# norm decay checks


def vanishing_product_check(a: AlgebraElement, b: AlgebraElement, p: PerronData,
                            p_set: PeriodicOrbitSet, q_set: PeriodicOrbitSet,
                            n_max: int, window_cap: int = 16):
    """Norms of both products of the backward-conjugated stable element with
    the unstable one, for n = 0..n_max.

    Requires the forward and backward orbit sets to be disjoint (with a
    shared orbit the products need not die off).  With disjoint orbit
    sets the products are exactly zero once the overlap outgrows the
    point where the two periodic patterns can agree.
    """
    if not p_set.isdisjoint(q_set):
        raise OrbitsNotDisjoint("orbit sets share an orbit")
    rows = []
    for n in range(n_max + 1):
        a_n = apply_alpha(a, -n)
        t_ab = product_operator(a_n, b, p, "ab", window_cap)
        t_ba = product_operator(a_n, b, p, "ba", window_cap)
        rows.append((n, operator_norm(t_ab), operator_norm(t_ba)))
    return rows


def commutator_decay(a: AlgebraElement, b: AlgebraElement, p: PerronData,
                     n_range, window_cap: int = 16):
    """Norms of the commutator of the two conjugated elements.

    Once the stable constraint window N - n drops below the unstable one
    M + n for every term pair, both products coincide term by term
    (identical bridge expansions), so the commutator is exactly zero and
    is reported as such without materializing the two operators.
    """
    rows = []
    for n in sorted(n_range):
        decoupled = all(
            e.window - n <= f.window + n
            for _, e in a.terms
            for _, f in b.terms
        )
        if decoupled:
            rows.append((n, 0.0))
            continue
        a_n = apply_alpha(a, n)
        b_n = apply_alpha(b, -n)
        t_ab = product_operator(a_n, b_n, p, "ab", window_cap)
        t_ba = product_operator(a_n, b_n, p, "ba", window_cap)
        rows.append((n, operator_norm(t_ab - t_ba)))
    return rows
