import io

import pytest

from gtdyn.trajectory import Trajectory, UniformStream, child_seeds, make_rng


def test_child_seeds_stable_and_distinct():
    a = child_seeds(42, 5)
    assert a == child_seeds(42, 5)
    assert child_seeds(42, 3) == a[:3]
    assert len(set(a)) == 5


def test_uniform_stream_matches_generator_order():
    stream = UniformStream(make_rng(1), block=3)
    values = [stream.next() for _ in range(7)]
    ref = make_rng(1)
    expected = list(ref.random(3)) + list(ref.random(3)) + list(ref.random(3))[:1]
    assert values == expected
    assert all(0 <= v < 1 for v in values)
    assert UniformStream(make_rng(2)).exponential(3.0) > 0


def test_occupation_and_csv():
    tr = Trajectory([0.0, 1.0, 2.5], [(1, 0), (2, 0), (2, -1)], seed=0, t_max=4.0, labels=("l1", "l2"))
    assert tr.occupation() == {(1, 0): 1.0, (2, 0): 1.5, (2, -1): 1.5}
    assert tr.occupation_frequencies()[(2, 0)] == pytest.approx(1.5 / 4)
    assert tr.final_state == (2, -1) and tr.event_count == 2
    assert tr.to_csv() == "time,l1,l2\n0.0,1,0\n1.0,2,0\n2.5,2,-1\n"
    buf = io.StringIO()
    tr.write_csv(buf, trajectory_index=3)
    assert buf.getvalue().splitlines()[0] == "3,0.0,1,0"


def test_zero_horizon_frequencies():
    tr = Trajectory([0.0], [5], seed=0, t_max=0.0)
    assert tr.occupation_frequencies() == {5: 1.0}
