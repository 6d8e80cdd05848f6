import math
import random

import pytest

from sfttrace.algebra import (
    StableBisection,
    apply_alpha,
    convolve,
    diagonal,
    element,
)
from sfttrace.fixtures import (
    canonical_pair,
    fixture_pairs,
    full_shift,
    golden_mean,
    mixed_pair,
    offdiagonal_stable,
    three_symbol,
)
from sfttrace.points import (
    enumerate_heteroclinic,
    make_left_ray,
    make_point,
    periodic_left_ray,
    shift_point,
)
from sfttrace.rep import (
    ExactTrace,
    FiniteOperator,
    OrbitsNotDisjoint,
    WindowOverflow,
    WindowTooSmall,
    apply_element,
    apply_to_combination,
    commutator_decay,
    operator_norm,
    product_operator,
    required_window,
    scaled_trace_sequence,
    trace_product,
    trace_product_detail,
    trace_product_oracle,
    unitary_conjugation_check,
    vanishing_product_check,
)
from sfttrace.sft import count_paths

PHI = (1 + math.sqrt(5)) / 2

FULL = full_shift()
GOLDEN = golden_mean()
THREE = three_symbol()


def fib(n):
    # fast-doubling Fibonacci, exact
    def doubling(m):
        if m == 0:
            return (0, 1)
        a, b = doubling(m >> 1)
        c = a * ((b << 1) - a)
        d = a * a + b * b
        return (d, c + d) if m & 1 else (c, d)

    return doubling(n)[0]


def split_point_full():
    # ...111|000...
    orb1 = FULL.q_set.orbits[0]
    orb0 = FULL.p_set.orbits[0]
    return make_point(orb1, 0, 0, (), orb0, 0, 0)


def test_apply_diagonal_projection():
    a, _ = canonical_pair(FULL)
    w = split_point_full()
    assert apply_element(a, w) == {w: 1 + 0j}
    # a point outside the source cylinder maps to nothing
    outside = shift_point(w, 1)  # switch moved to -1, so a 0 sits at -1
    assert apply_element(a, outside) == {}


def test_apply_replaces_past():
    # replace the past "...1 1 0" by "...1 1 1"; the map needs one extra
    # window step so each piece has matching junction symbols
    orb1 = FULL.q_set.orbits[0]
    pieces = []
    for s in (0, 1):
        target = make_left_ray(FULL.sft, orb1, 0, 0, (s,), 1)
        source = make_left_ray(FULL.sft, orb1, 0, -1, (0, s), 1)
        pieces.append((1, StableBisection(target, source)))
    e = element("stable", pieces)
    orb0 = FULL.p_set.orbits[0]
    w = make_point(orb1, 0, -1, (0,), orb0, 0, 0)  # ...110|000...
    out = apply_element(e, w)
    assert out == {split_point_full(): 1 + 0j}


def test_apply_unstable_replaces_future():
    _, b = canonical_pair(FULL)
    w = split_point_full()
    assert apply_element(b, w) == {w: 1 + 0j}


def test_representation_is_multiplicative():
    rng = random.Random(9)
    sys = GOLDEN
    a1, _ = mixed_pair(sys)
    a2 = offdiagonal_stable(sys)
    prod = convolve(a1, a2)
    pts = enumerate_heteroclinic(sys.sft, sys.p_set, sys.q_set, 4)
    sample = rng.sample(pts, 12)
    for w in sample:
        direct = apply_element(prod, w)
        staged = apply_to_combination(a1, apply_element(a2, w))
        assert direct == staged


def test_unitary_conjugation():
    sys = FULL
    a, b = canonical_pair(sys)
    pts = enumerate_heteroclinic(sys.sft, sys.p_set, sys.q_set, 3)[:10]
    assert unitary_conjugation_check(a, 0, pts)
    assert unitary_conjugation_check(a, 1, pts)
    assert unitary_conjugation_check(b, 2, pts)
    assert unitary_conjugation_check(b, -1, pts)
    off = offdiagonal_stable(GOLDEN)
    gpts = enumerate_heteroclinic(GOLDEN.sft, GOLDEN.p_set, GOLDEN.q_set, 3)[:10]
    assert unitary_conjugation_check(off, -2, gpts)


def test_product_operator_rank_one():
    a, b = canonical_pair(FULL)
    t_ab = product_operator(a, b, FULL.perron, "ab")
    w = split_point_full()
    assert t_ab.entries == {(w, w): 1 + 0j}
    assert t_ab.rank() == 1
    t_ba = product_operator(a, b, FULL.perron, "ba")
    assert t_ba.rank() == 1


def test_product_operator_conflicting_constraints_vanish():
    a, b = canonical_pair(FULL)
    a_shifted = apply_alpha(a, -1)  # past constraint now reaches index 0
    assert product_operator(a_shifted, b, FULL.perron, "ab").is_zero
    assert product_operator(a_shifted, b, FULL.perron, "ba").is_zero


def test_product_operator_window_cap():
    a, b = canonical_pair(FULL)
    with pytest.raises(WindowOverflow):
        product_operator(apply_alpha(a, 40), b, FULL.perron, "ab", window_cap=30)


def test_operator_norm_examples():
    a, b = canonical_pair(FULL)
    t = product_operator(a, b, FULL.perron, "ab")
    assert operator_norm(t) == pytest.approx(1.0, abs=1e-10)
    assert operator_norm(FiniteOperator({})) == 0.0
    w = split_point_full()
    v = shift_point(w, 1)
    assert operator_norm(FiniteOperator({(w, v): 2 + 0j})) == pytest.approx(2.0, abs=1e-10)


def test_trace_product_full_shift():
    a, b = canonical_pair(FULL)
    tr = trace_product(a, b, 3, FULL.perron)
    assert tr.as_int() == 64
    assert count_paths(FULL.sft, 1, 0, 7) == 64


def test_trace_product_golden():
    a, b = canonical_pair(GOLDEN)
    assert trace_product(a, b, 1, GOLDEN.perron).as_int() == 3
    for k in range(0, 12):
        assert trace_product(a, b, k, GOLDEN.perron).as_int() == fib(2 * k + 2)


def test_trace_product_offdiagonal_vanishes():
    a = offdiagonal_stable(GOLDEN)
    _, b = canonical_pair(GOLDEN)
    for k in range(0, 10):
        tr, diag = trace_product_detail(a, b, k, GOLDEN.perron)
        assert tr.as_int() == 0
        assert diag.offdiag_fixed_points == 0


def test_trace_product_matches_operator_diagonal():
    for sys in (FULL, GOLDEN, THREE):
        for name, a, b in fixture_pairs(sys):
            for k in range(0, 3):
                tr = trace_product(a, b, k, sys.perron)
                op = product_operator(
                    apply_alpha(a, k), apply_alpha(b, -k), sys.perron, "ab"
                )
                assert tr.total() == pytest.approx(op.diagonal_sum(), abs=1e-12), (
                    sys.name, name, k)


def test_trace_product_linear():
    sys = GOLDEN
    a1, b = mixed_pair(sys)
    a2 = offdiagonal_stable(sys)
    k = 2
    lhs = trace_product(a1 + a2, b, k, sys.perron).exact_total()
    t1 = trace_product(a1, b, k, sys.perron).exact_total()
    t2 = trace_product(a2, b, k, sys.perron).exact_total()
    assert lhs == (t1[0] + t2[0], t1[1] + t2[1])


def test_oracle_examples():
    a, b = canonical_pair(FULL)
    assert trace_product_oracle(a, b, 2, 6, FULL.perron, FULL.p_set, FULL.q_set).as_int() == 16
    ag, bg = canonical_pair(GOLDEN)
    assert trace_product_oracle(ag, bg, 1, 4, GOLDEN.perron, GOLDEN.p_set, GOLDEN.q_set).as_int() == 3
    off = offdiagonal_stable(GOLDEN)
    assert trace_product_oracle(off, bg, 5, 10, GOLDEN.perron, GOLDEN.p_set, GOLDEN.q_set).as_int() == 0


def test_oracle_window_guard():
    a, b = canonical_pair(FULL)
    with pytest.raises(WindowTooSmall):
        trace_product_oracle(a, b, 5, 2, FULL.perron, FULL.p_set, FULL.q_set)
    assert required_window(a, b, 5) == 5


@pytest.mark.parametrize("sys", [FULL, GOLDEN, THREE], ids=lambda s: s.name)
def test_oracle_equivalence(sys):
    # the symbolic route and the basis-enumeration route agree exactly
    for name, a, b in fixture_pairs(sys):
        for k in range(0, 4):
            sym = trace_product(a, b, k, sys.perron)
            brute = trace_product_oracle(a, b, k, 10, sys.perron, sys.p_set, sys.q_set)
            assert sym == brute, (sys.name, name, k)


def test_scaled_sequence_full_shift_exact():
    a, b = canonical_pair(FULL)
    report = scaled_trace_sequence(a, b, range(0, 12), FULL.perron)
    assert report.target == pytest.approx(1.0, abs=1e-12)
    for row in report.rows:
        assert row.scaled == pytest.approx(1.0, abs=1e-12)
        assert row.abs_err <= 1e-12


def test_scaled_sequence_golden_closed_form():
    a, b = canonical_pair(GOLDEN)
    report = scaled_trace_sequence(a, b, range(0, 30), GOLDEN.perron)
    assert report.target == pytest.approx(PHI ** 2 / math.sqrt(5), abs=1e-10)
    for row in report.rows:
        assert row.trace.as_int() == fib(2 * row.k + 2)
        closed = PHI ** (-4 * row.k - 2) / math.sqrt(5)
        assert row.abs_err == pytest.approx(closed, abs=1e-12)
    # scaled values increase toward the target (up to float rounding)
    scaled = [row.scaled.real for row in report.rows]
    assert all(s2 >= s1 - 1e-13 for s1, s2 in zip(scaled, scaled[1:]))


def test_scaled_sequence_empty_range():
    a, b = canonical_pair(FULL)
    report = scaled_trace_sequence(a, b, [], FULL.perron)
    assert report.rows == ()


def test_trace_product_period_two_orbits():
    # orbit sets built on the 2-cycle orbit of the golden mean: phases move
    # under conjugation, the bridge formula and the oracle must still agree
    from sfttrace.algebra import diagonal
    from sfttrace.points import make_orbit_set, periodic_left_ray, periodic_right_ray

    sft = GOLDEN.sft
    p = GOLDEN.perron
    cyc = make_orbit_set([[0, 1]], sft)
    for lphase in (0, 1):
        for rphase in (0, 1):
            a = diagonal("stable", periodic_left_ray(sft, cyc.orbits[0], 0, lphase))
            b = diagonal("unstable", periodic_right_ray(sft, cyc.orbits[0], 0, rphase))
            for k in range(0, 4):
                sym = trace_product(a, b, k, p)
                expect = count_paths(sft, cyc.orbits[0].word[lphase],
                                     cyc.orbits[0].word[rphase], 2 * k + 1)
                assert sym.as_int() == expect
                brute = trace_product_oracle(a, b, k, 10, p, cyc, cyc)
                assert sym == brute


def test_enumeration_additive_over_orbit_sets():
    from sfttrace.points import make_orbit_set

    sft = FULL.sft
    q = FULL.q_set
    p_single = FULL.p_set
    p_cycle = make_orbit_set([[0, 1]], sft)
    p_both = make_orbit_set([[0], [0, 1]], sft)
    for w in range(0, 4):
        n_single = len(enumerate_heteroclinic(sft, p_single, q, w))
        n_cycle = len(enumerate_heteroclinic(sft, p_cycle, q, w))
        n_both = len(enumerate_heteroclinic(sft, p_both, q, w))
        assert n_both == n_single + n_cycle


def test_oracle_equivalence_random_elements():
    # seeded random elements, not just shipped fixtures: the symbolic trace
    # must match the basis enumeration exactly in every regime
    import random as _random

    from sfttrace.fixtures import random_element

    rng = _random.Random(77)
    for _ in range(5):
        a = random_element(rng, GOLDEN, "stable", 2)
        b = random_element(rng, GOLDEN, "unstable", 2)
        for k in range(0, 4):
            assert trace_product(a, b, k, GOLDEN.perron) == trace_product_oracle(
                a, b, k, 12, GOLDEN.perron, GOLDEN.p_set, GOLDEN.q_set
            )


def test_trace_product_argument_guards():
    a, b = canonical_pair(FULL)
    with pytest.raises(ValueError):
        trace_product(a, b, -1, FULL.perron)
    from sfttrace.algebra import SideMismatch
    with pytest.raises(SideMismatch):
        trace_product(b, b, 1, FULL.perron)
    with pytest.raises(SideMismatch):
        product_operator(b, b, FULL.perron)


def test_scaled_traces_converge_for_all_fixture_pairs():
    # the limit statement holds for every shipped elementary pair
    for sys in (FULL, GOLDEN, THREE):
        for name, a, b in fixture_pairs(sys):
            report = scaled_trace_sequence(a, b, [0, 5, 40], sys.perron)
            first, mid, last = (row.abs_err for row in report.rows)
            assert last <= 1e-10, (sys.name, name)
            assert last <= first + 1e-15, (sys.name, name)
            assert mid <= first + 1e-15, (sys.name, name)


def test_trace_positive_for_nonnegative_diagonals():
    for sys in (FULL, GOLDEN, THREE):
        a, b = canonical_pair(sys)
        for k in range(0, 6):
            assert trace_product(a, b, k, sys.perron).as_int() >= 0


def test_scaled_traces_grow_without_bound_for_growing_support():
    # diagonal indicators over ever-larger past cylinders have ever-larger
    # trace; their scaled traces exceed any fixed bound (here 10^3)
    _, b = canonical_pair(FULL)
    orb1 = FULL.q_set.orbits[0]
    values = []
    for m in (4, 8, 12):
        a_m = diagonal("stable", periodic_left_ray(FULL.sft, orb1, -m))
        report = scaled_trace_sequence(a_m, b, range(0, 3), FULL.perron)
        vals = {row.scaled.real for row in report.rows}
        assert len(vals) == 1  # constant in k on the full shift
        values.append(vals.pop())
    assert values[0] < values[1] < values[2]
    assert values[2] == pytest.approx(2 ** 12, rel=1e-12)
    assert values[2] > 1e3


def test_big_k_log_scaling():
    a, b = canonical_pair(FULL)
    tr = trace_product(a, b, 300, FULL.perron)
    assert tr.as_int() == 2 ** 600
    assert tr.scaled(2.0, 300) == pytest.approx(1.0, rel=1e-9)


def test_exact_trace_render():
    assert ExactTrace.from_pairs([((1 + 0j), 5)]).render() == "5"
    assert ExactTrace.from_pairs([((1 + 0j), 2 ** 200)]).render() == str(2 ** 200)
    assert ExactTrace.from_pairs([((0.5 + 0j), 3)]).render() == "1.5"


def test_vanishing_product_disjoint_orbits():
    a, b = canonical_pair(FULL)
    rows = vanishing_product_check(a, b, FULL.perron, FULL.p_set, FULL.q_set, 6)
    assert rows[0][1] == pytest.approx(1.0, abs=1e-10)
    assert rows[0][2] == pytest.approx(1.0, abs=1e-10)
    for n, nab, nba in rows[1:]:
        assert nab == 0.0 and nba == 0.0


def test_vanishing_product_requires_disjoint():
    a, b = canonical_pair(GOLDEN)  # P = Q here
    with pytest.raises(OrbitsNotDisjoint):
        vanishing_product_check(a, b, GOLDEN.perron, GOLDEN.p_set, GOLDEN.q_set, 3)


def test_commutator_zero_for_diagonal_pairs():
    a, b = canonical_pair(GOLDEN)
    for n, norm in commutator_decay(a, b, GOLDEN.perron, range(0, 6)):
        assert norm == 0.0


def test_commutator_decays_and_decouples():
    # off-diagonal stable element at window 2 against the canonical future:
    # nonzero commutator while the windows overlap, exactly zero after
    sys = GOLDEN
    orb0 = sys.q_set.orbits[0]
    alpha = periodic_left_ray(sys.sft, orb0, 2)
    # the source deviates from the periodic pattern inside [0, 2), where the
    # future constraint will overlap at n = 0
    beta = make_left_ray(sys.sft, orb0, 0, 0, (1, 0), 2)
    a = element("stable", [(1, StableBisection(alpha, beta))])
    _, b = canonical_pair(sys)
    rows = commutator_decay(a, b, sys.perron, range(0, 8))
    assert rows[0][1] > 0
    decoupled = [norm for n, norm in rows if 2 * n >= 2]
    assert all(norm == 0.0 for norm in decoupled)
    assert rows[-1][1] < rows[0][1]
