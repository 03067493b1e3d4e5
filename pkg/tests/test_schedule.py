import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdcluster.geometry import Lattice, MoleculeGeometry
from qdcluster.schedule import (
    ChargeConfig,
    ChargeState,
    CouplingMatrix,
    Schedule,
    ScheduleError,
    Step,
    bulk_coefficients,
    chain_period,
    gen_2d_three_step,
    gen_m_step,
    gen_one_step,
    gen_three_step,
    net_coupling,
    pair_sign,
    residual_ratio,
    step_signs,
    window_pattern,
)

U, D, N = ChargeState.UP, ChargeState.DOWN, ChargeState.NEUTRAL
F = Fraction
GEOM = MoleculeGeometry()


def test_pair_sign_table():
    assert pair_sign(N, U) == 0
    assert pair_sign(N, N) == 0
    assert pair_sign(D, N) == 0
    assert pair_sign(U, U) == 1
    assert pair_sign(D, D) == 1
    assert pair_sign(U, D) == -1
    assert pair_sign(D, U) == -1


def test_one_step():
    two = net_coupling(gen_one_step(Lattice.chain(2)))
    assert two[0, 1] == 1
    c = net_coupling(gen_one_step(Lattice.chain(7)))
    assert all(v == 1 for _, v in c.items())
    assert c[3, 3] == 0


def test_three_step_table_rows():
    sched = gen_three_step(Lattice.chain(32))
    ks = range(1, 8)
    rows = [[s * step.duration for s in signs] for signs, step in zip(step_signs(sched, 0, ks), sched.steps)]
    h = F(1, 2)
    assert rows[0] == [h, -h, -h, h, h, -h, -h]
    assert rows[1] == [-h, -h, h, h, -h, -h, h]
    assert rows[2] == [1] * 7
    assert sched.total_time == 2


@pytest.mark.parametrize("anchor", [0, 1, 3])
def test_three_step_totals_every_site(anchor):
    sched = gen_three_step(Lattice.chain(32), anchor)
    c = net_coupling(sched)
    expected = [1, 0, 1, 2, 1, 0, 1]
    for p in range(32 - 7):
        assert [c[p, p + k] for k in range(1, 8)] == expected


@pytest.mark.parametrize("m", range(4, 9))
def test_m_step_totals(m):
    sched = gen_m_step(Lattice.chain(5 * m), m)
    assert sched.total_time == 2
    assert len(sched.steps) == m + 1
    c = net_coupling(sched)
    expected = {1: 4, m - 1: 4, m: 8, m + 1: 4, m + 2: 0}
    for k in range(2, m - 1):
        expected[k] = 0
    for p in range(5 * m - m - 2):
        for k, want in expected.items():
            assert 4 * c[p, p + k] == want


@pytest.mark.parametrize("m", range(4, 9))
def test_m_step_nearest_sign_counts(m):
    sched = gen_m_step(Lattice.chain(3 * m), m)
    for j in range(m):
        signs = [row[0] for row in step_signs(sched, j, [1])[:m]]
        assert signs.count(-1) == 2
        assert signs.count(1) == m - 2


@pytest.mark.parametrize("m", [3, 9])
def test_m_step_range(m):
    with pytest.raises(ScheduleError, match="4 <= m <= 8"):
        gen_m_step(Lattice.chain(40), m)


def test_window_pattern_moves_left():
    assert window_pattern(8, 1) == "UUDDDDDD"
    assert window_pattern(8, 2) == "UDDDDDDU"
    assert window_pattern(8, 3) == "DDDDDDUU"


def test_two_d_three_step():
    grid = Lattice.grid(6, 6)
    sched = gen_2d_three_step(grid)
    assert sched.total_time == 3
    c = net_coupling(sched)
    for p, q in grid.pairs():
        dr, dc = map(abs, grid.offset(p, q))
        if (dr, dc) == (1, 1):
            assert c[p, q] == 0
        elif dr + dc == 1:
            assert c[p, q] == 1


def test_single_uniform_step_couples_everything():
    sched = Schedule(Lattice.chain(6), (Step(ChargeConfig.uniform(Lattice.chain(6)), F(1)),))
    c = net_coupling(sched)
    assert all(c[0, k] == 1 for k in range(1, 6))


def _random_schedule(draw_configs, durations, lattice):
    return Schedule(
        lattice,
        tuple(Step(ChargeConfig.from_string(lattice, s), d) for s, d in zip(draw_configs, durations)),
    )


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_net_coupling_permutation_invariant(data):
    n = data.draw(st.integers(2, 9))
    steps = data.draw(st.integers(1, 6))
    lattice = Lattice.chain(n)
    configs = [data.draw(st.text("UDN", min_size=n, max_size=n)) for _ in range(steps)]
    durations = [F(data.draw(st.integers(0, 12)), 4) for _ in range(steps)]
    sched = _random_schedule(configs, durations, lattice)
    order = data.draw(st.permutations(range(steps)))
    assert net_coupling(sched) == net_coupling(sched.permuted(order))


def test_flipped_step_restores_coupling():
    lattice = Lattice.chain(12)
    base = gen_three_step(lattice)
    config = ChargeConfig.from_string(lattice, "UUDDUUDDUUDD")
    # swapping every other site flips the sign of every odd-separation pair
    flipped = ChargeConfig.from_string(lattice, "UDDUUDDUUDDU")
    extra = Schedule(lattice, base.steps + (Step(config, F(3, 4)), Step(flipped, F(3, 4))))
    before, after = net_coupling(base), net_coupling(extra)
    for p, q in lattice.pairs():
        if (q - p) % 2:
            assert after[p, q] == before[p, q]


def test_two_molecule_inverse_step():
    lattice = Lattice.chain(2)
    sched = Schedule(
        lattice,
        (
            Step(ChargeConfig.from_string(lattice, "UU"), F(1, 3)),
            Step(ChargeConfig.from_string(lattice, "UD"), F(1, 3)),
        ),
    )
    assert net_coupling(sched)[0, 1] == 0


def test_lattice_mismatch_rejected():
    with pytest.raises(ScheduleError):
        Schedule(Lattice.chain(4), (Step(ChargeConfig.uniform(Lattice.chain(5)), F(1)),))
    with pytest.raises(ScheduleError):
        net_coupling(Schedule(Lattice.chain(4), ()))


def test_negative_duration_rejected():
    with pytest.raises(ScheduleError):
        Step(ChargeConfig.uniform(Lattice.chain(3)), F(-1, 4))


def test_coupling_matrix_algebra():
    lattice = Lattice.chain(4)
    c = net_coupling(gen_three_step(Lattice.chain(4)))
    assert c - c == CouplingMatrix(lattice, [[0] * 4] * 4)
    assert (-c)[0, 1] == -c[0, 1]
    assert c[1, 0] == c[0, 1]
    nn = CouplingMatrix.nearest_neighbour(lattice)
    assert [nn[p, q] for p, q in lattice.pairs()] == [1, 0, 0, 1, 0, 1]


@pytest.mark.parametrize(
    "sched",
    [
        gen_one_step(Lattice.chain(3)),
        gen_three_step(Lattice.chain(9), anchor=2),
        gen_m_step(Lattice.chain(16), 7),
        gen_2d_three_step(Lattice.grid(3, 4)),
    ],
)
def test_text_round_trip(sched):
    text = sched.to_text()
    back = Schedule.from_text(text)
    assert back == sched
    assert back.to_text() == text


def test_text_format_layout():
    text = gen_three_step(Lattice.chain(4)).to_text()
    assert text == "chain 4\n1/2 UUDD\n1/2 UDDU\n1/1 UUUU\n"
    grid = gen_2d_three_step(Lattice.grid(2, 2)).to_text().splitlines()
    assert grid[0] == "grid 2 2"
    assert grid[1] == "1/1 UNND"


@pytest.mark.parametrize(
    "text",
    ["", "ring 4\n1/2 UUUU\n", "chain 4\n1/2 UUUX\n", "chain 4\n1/2 UUU\n", "chain 4\nhalf UUUU\n", "chain 4\n1/0 UUUU\n"],
)
def test_text_parse_errors(text):
    with pytest.raises(ScheduleError):
        Schedule.from_text(text)


def test_chain_period_detection():
    assert chain_period(gen_three_step(Lattice.chain(12))) == 4
    assert chain_period(gen_m_step(Lattice.chain(24), 8)) == 8
    assert chain_period(gen_one_step(Lattice.chain(5))) == 1
    with pytest.raises(ScheduleError):
        chain_period(gen_m_step(Lattice.chain(12), 8))


def test_bulk_coefficients_match_finite_chain():
    sched = gen_m_step(Lattice.chain(40), 6)
    c = net_coupling(sched)
    for j in range(6):
        assert bulk_coefficients(sched, j, range(1, 13)) == [c[j + 10, j + 10 + k] for k in range(1, 13)]


def test_residual_ratios():
    lattice = Lattice.chain(32)
    assert residual_ratio(gen_one_step(lattice), GEOM) == pytest.approx(0.20329256436, abs=1e-7)
    assert residual_ratio(gen_three_step(lattice), GEOM) == pytest.approx(0.08998429499, abs=1e-7)
    assert residual_ratio(gen_m_step(lattice, 8), GEOM) == pytest.approx(0.00985791519, abs=1e-7)


def test_residual_ratio_rejects_zero_nearest():
    lattice = Lattice.chain(8)
    sched = Schedule(lattice, (Step(ChargeConfig.from_string(lattice, "UDUDUDUD"), F(1)), Step(ChargeConfig.uniform(lattice), F(1))))
    with pytest.raises(ScheduleError, match="nearest"):
        residual_ratio(sched, GEOM)


def test_bulk_translation_invariance_three_step():
    sched = gen_three_step(Lattice.chain(40))
    c = net_coupling(sched)
    for k in range(1, 9):
        vals = {c[p, p + k] for p in range(8, 40 - 8 - k)}
        assert len(vals) == 1


def test_config_from_string_rejects_garbage():
    with pytest.raises(ScheduleError):
        ChargeConfig.from_string(Lattice.chain(3), "UX1")


def test_all_pair_signs_via_enum():
    for a, b in itertools.product(ChargeState, repeat=2):
        assert pair_sign(a, b) == pair_sign(b, a)
