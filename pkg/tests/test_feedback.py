import numpy as np
import pytest

from dynbgs.feedback import FeedbackState, update_dmin, update_r, update_t, update_v, weight


def state(**maps):
    st = FeedbackState.create((1, 1))
    for k, v in maps.items():
        getattr(st, k)[:] = v
    return st


def test_initial_state():
    st = FeedbackState.create((2, 3))
    assert (st.r == 1).all() and (st.t_rate == 2).all() and (st.v == 0.1).all()
    assert (st.d_min == 0).all()


def test_dmin_examples():
    st = state(d_min_short=0.5, d_min_long=0.0)
    update_dmin(st, np.array([[0.1]]))
    assert st.d_min_short[0, 0] == pytest.approx(0.484, rel=1e-9)
    st = state(d_min_short=0.0, d_min_long=0.0)
    update_dmin(st, np.array([[1.0]]))
    assert st.d_min_long[0, 0] == pytest.approx(0.01, rel=1e-9)


def test_dmin_fixed_point():
    st = state()
    for _ in range(3000):
        update_dmin(st, np.array([[0.37]]))
    assert st.d_min_short[0, 0] == pytest.approx(0.37, rel=1e-9)
    assert st.d_min_long[0, 0] == pytest.approx(0.37, rel=1e-9)


def test_weights():
    dr = np.array([0, 1, 1, 0])
    dist = np.array([0.5, 0.5, 0.3, 0.3])
    feed = np.array([0.2, 0.2, 0.2, 0.9])
    assert weight(dr, dist, feed).tolist() == [1.0, 1.5, 0.8, 1.0]


@pytest.mark.parametrize("v0,blinked,w,v1", [(1.0, True, 1.5, 2.5), (0.15, False, 1.0, 0.1), (1.0, False, 1.0, 0.9)])
def test_v_examples(v0, blinked, w, v1):
    st = state(v=v0)
    update_v(st, np.array([[blinked]]), np.array([[w]]))
    assert st.v[0, 0] == pytest.approx(v1, rel=1e-9)


@pytest.mark.parametrize("r0,d,v,r1", [(1.0, 0.5, 1.0, 2.0), (5.0, 0.5, 2.0, 4.5), (1.2, 0.0, 10.0, 1.1)])
def test_r_examples(r0, d, v, r1):
    st = state(r=r0, d_min_short=d, d_min_long=d, v=v)
    update_r(st)
    assert st.r[0, 0] == pytest.approx(r1, rel=1e-9)


def test_r_settles_at_one():
    st = state(r=1.2, v=10.0)
    for _ in range(5):
        update_r(st)
    assert st.r[0, 0] == 1.0


@pytest.mark.parametrize("t0,fg,v,d,t1", [(100, True, 1, 0.1, 110), (100, False, 1, 0.1, 90), (3, False, 10, 0.01, 2)])
def test_t_examples(t0, fg, v, d, t1):
    st = state(t_rate=t0, v=v, d_min_short=d, d_min_long=d)
    update_t(st, np.array([[fg]]))
    assert st.t_rate[0, 0] == pytest.approx(t1, rel=1e-9)


def test_t_upper_clamp():
    st = state(t_rate=250, v=0.1, d_min_short=0.0)
    update_t(st, np.array([[True]]))
    assert st.t_rate[0, 0] == 256


def test_dmin_uses_larger_average():
    st = state(d_min_short=0.2, d_min_long=0.3)
    assert st.d_min[0, 0] == 0.3


def test_random_fuzz_keeps_ranges(rs):
    st = FeedbackState.create((16, 16))
    prev = np.zeros((16, 16), bool)
    for _ in range(1000):
        fg = rs.random((16, 16)) < rs.random()
        update_dmin(st, rs.random((16, 16)))
        w = weight(rs.random((16, 16)) < 0.5, rs.random((16, 16)), rs.random((16, 16)))
        update_v(st, fg != prev, w)
        update_r(st)
        update_t(st, fg)
        st.check_invariants()
        prev = fg


def test_blinking_pixel_gets_larger_r():
    st = FeedbackState.create((1, 2))
    for k in range(400):
        update_dmin(st, np.array([[0.3, 0.0]]))
        update_v(st, np.array([[True, False]]), np.array([[1.5, 1.0]]))
        update_r(st)
    assert st.r[0, 0] > st.r[0, 1]


def test_weight_gate_direction():
    w = weight(np.array([1, 1]), np.array([0.5, 0.1]), np.array([0.2, 0.2]), dist_gate_above=False)
    assert w.tolist() == [0.8, 1.5]
