import math

import pytest
from hypothesis import given, strategies as st

from guideline_qa.errors import ValidationError
from guideline_qa.trapezoid import Trapezoid, trapezoid_membership, validate_trapezoid


class TestWorkedValues:
    def test_membership_80h_of_0_0_72_120(self):
        trap = Trapezoid(0, 0, 72, 120)
        assert trap.membership(80) == pytest.approx(5.0 / 6.0, abs=1e-9)
        # equivalently the line -t/48 + 2.5 on the falling edge
        assert trap.membership(80) == pytest.approx(-80.0 / 48.0 + 2.5, abs=1e-12)

    def test_membership_75h_of_0_0_72_80(self):
        assert Trapezoid(0, 0, 72, 80).membership(75) == 0.625

    def test_membership_130h_beyond_d(self):
        assert Trapezoid(0, 0, 72, 120).membership(130) == 0.0

    def test_membership_10h_on_plateau(self):
        assert Trapezoid(0, 0, 72, 120).membership(10) == 1.0


class TestBoundaries:
    def test_plateau_endpoints_are_one(self):
        trap = Trapezoid(10, 20, 30, 40)
        assert trap.membership(20) == 1.0
        assert trap.membership(30) == 1.0

    def test_feet_are_zero(self):
        trap = Trapezoid(10, 20, 30, 40)
        assert trap.membership(10) == 0.0
        assert trap.membership(40) == 0.0

    def test_degenerate_foot_on_plateau_scores_one(self):
        # a == b: plateau wins at the shared point
        trap = Trapezoid(0, 0, 72, 120)
        assert trap.membership(0) == 1.0

    def test_point_trapezoid(self):
        trap = Trapezoid(0, 0, 0, 0)
        assert trap.membership(0) == 1.0
        assert trap.membership(0.001) == 0.0
        assert trap.membership(-0.001) == 0.0

    def test_rising_slope_midpoint(self):
        assert Trapezoid(0, 10, 20, 30).membership(5) == 0.5

    def test_infinite_feet(self):
        trap = Trapezoid(-math.inf, 0, 72, math.inf)
        assert trap.membership(-1000) == 1.0  # a = -inf: never too early
        assert trap.membership(50) == 1.0
        assert trap.membership(10_000) == 1.0  # d = +inf: never too late

    def test_one_sided_infinity(self):
        trap = Trapezoid(-math.inf, 24, 72, 120)
        assert trap.membership(0) == 1.0
        assert trap.membership(96) == 0.5


class TestValidation:
    def test_valid_paper_shape(self):
        validate_trapezoid(Trapezoid(0, 0, 72, 120))  # should not raise

    def test_a_greater_than_b_rejected(self):
        with pytest.raises(ValidationError, match="a <= b"):
            Trapezoid(10, 5, 72, 120)

    def test_b_greater_than_c_rejected(self):
        with pytest.raises(ValidationError, match="b <= c"):
            Trapezoid(0, 80, 72, 120)

    def test_c_greater_than_d_rejected(self):
        with pytest.raises(ValidationError, match="c <= d"):
            Trapezoid(0, 0, 130, 120)

    def test_infinite_plateau_rejected(self):
        with pytest.raises(ValidationError, match="finite"):
            Trapezoid(0, 0, math.inf, math.inf)

    def test_nan_rejected(self):
        with pytest.raises(ValidationError, match="NaN"):
            Trapezoid(0, math.nan, 72, 120)


class TestSerialization:
    def test_round_trip_finite(self):
        trap = Trapezoid(0, 0, 72, 120)
        assert Trapezoid.from_json(trap.to_json()) == trap

    def test_round_trip_infinite(self):
        trap = Trapezoid(-math.inf, 0, 72, math.inf)
        doc = trap.to_json()
        assert doc["a"] == "-inf" and doc["d"] == "+inf"
        assert Trapezoid.from_json(doc) == trap


@st.composite
def trapezoids(draw):
    pts = sorted(
        draw(
            st.lists(
                st.floats(min_value=0, max_value=1000, allow_nan=False),
                min_size=4,
                max_size=4,
            )
        )
    )
    return Trapezoid(*pts)


class TestProperties:
    @given(trapezoids(), st.floats(min_value=-100, max_value=1100, allow_nan=False))
    def test_range(self, trap, t):
        assert 0.0 <= trap.membership(t) <= 1.0

    @given(
        trapezoids(),
        st.floats(min_value=-100, max_value=1100, allow_nan=False),
        st.floats(min_value=0, max_value=100, allow_nan=False),
    )
    def test_shape_monotone(self, trap, t, delta):
        # non-decreasing left of the plateau, non-increasing right of it
        if t + delta <= trap.b:
            assert trap.membership(t) <= trap.membership(t + delta) + 1e-12
        if t >= trap.c:
            assert trap.membership(t) >= trap.membership(t + delta) - 1e-12

    @given(trapezoids(), st.floats(min_value=-100, max_value=1100, allow_nan=False))
    def test_functional_alias(self, trap, t):
        assert trapezoid_membership(t, trap) == trap.membership(t)

    @given(trapezoids(), st.floats(min_value=-99, max_value=1099, allow_nan=False))
    def test_continuity(self, trap, t):
        eps = 1e-7
        here = trap.membership(t)
        near = trap.membership(t + eps)
        # piecewise-linear with bounded slope except at degenerate edges
        rise_slope = 1.0 / (trap.b - trap.a) if trap.b > trap.a else None
        fall_slope = 1.0 / (trap.d - trap.c) if trap.d > trap.c else None
        max_slope = max(s for s in (rise_slope, fall_slope, 0.0) if s is not None)
        if (trap.a == trap.b and abs(t - trap.a) < eps) or (
            trap.c == trap.d and abs(t - trap.d) < eps
        ):
            return  # genuine jump allowed only at a degenerate (zero-width) edge
        assert abs(near - here) <= max_slope * eps * 1.01 + 1e-12
