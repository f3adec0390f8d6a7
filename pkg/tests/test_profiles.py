import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isocap.errors import EvalError, ProfileSyntaxError, UnknownIdentifier
from isocap.profiles import NonSmoothTie, eval_d2, parse, to_text


def fd_oracle(text, r, params=None, h=1e-4):
    """Central finite differences; h=1e-4 keeps roundoff below truncation."""
    f = lambda x: eval_d2(parse(text), x, params)[0]
    d1 = (f(r + h) - f(r - h)) / (2 * h)
    d2 = (f(r + h) - 2 * f(r) + f(r - h)) / (h * h)
    return d1, d2


class TestParser:
    def test_number(self):
        assert eval_d2(parse("2.5"), 1.0) == (2.5, 0.0, 0.0)

    def test_variable(self):
        assert eval_d2(parse("r"), 3.0) == (3.0, 1.0, 0.0)

    def test_square(self):
        assert eval_d2(parse("r^2"), 3.0) == (9.0, 6.0, 2.0)

    def test_precedence_mul_add(self):
        v, _, _ = eval_d2(parse("1 + 2*3"), 0.0)
        assert v == 7.0

    def test_power_binds_tighter_than_neg(self):
        # -r^2 parses as -(r^2)
        v, _, _ = eval_d2(parse("-r^2"), 3.0)
        assert v == -9.0

    def test_power_right_assoc(self):
        v, _, _ = eval_d2(parse("2^3^2"), 0.0)
        assert v == 512.0

    def test_pi(self):
        v, d1, _ = eval_d2(parse("pi*r"), 2.0)
        assert v == pytest.approx(2 * math.pi)
        assert d1 == pytest.approx(math.pi)

    def test_functions(self):
        v, d1, d2 = eval_d2(parse("sqrt(1 - 2/r)"), 4.0)
        assert v == pytest.approx(math.sqrt(0.5))
        fd1, fd2 = fd_oracle("sqrt(1 - 2/r)", 4.0)
        assert d1 == pytest.approx(fd1, abs=1e-8)
        assert d2 == pytest.approx(fd2, abs=1e-5)

    def test_two_arg_functions(self):
        v, _, _ = eval_d2(parse("max(r, 2)"), 5.0)
        assert v == 5.0
        v, _, _ = eval_d2(parse("pow(r, 3)"), 2.0)
        assert v == 8.0

    def test_parameters(self):
        v, d1, _ = eval_d2(parse("m*r"), 3.0, {"m": 2.0})
        assert (v, d1) == (6.0, 2.0)

    def test_whitespace(self):
        assert to_text(parse(" r +  1 ")) == to_text(parse("r+1"))


class TestParserErrors:
    def test_syntax_error_offset(self):
        with pytest.raises(ProfileSyntaxError) as exc:
            parse("r + * 2")
        assert exc.value.offset == 4

    def test_syntax_error_expected(self):
        with pytest.raises(ProfileSyntaxError) as exc:
            parse("(r + 1")
        assert ")" in exc.value.expected

    def test_trailing_garbage(self):
        with pytest.raises(ProfileSyntaxError):
            parse("r + 1 )")

    def test_unknown_function(self):
        with pytest.raises(UnknownIdentifier):
            parse("sinh(r)")

    def test_unbound_parameter_at_eval(self):
        expr = parse("m*r")
        with pytest.raises(UnknownIdentifier):
            eval_d2(expr, 1.0)

    def test_empty(self):
        with pytest.raises(ProfileSyntaxError):
            parse("")


class TestEval:
    def test_domain_violation(self):
        with pytest.raises(EvalError):
            eval_d2(parse("sqrt(r - 10)"), 1.0)

    def test_log_of_negative(self):
        with pytest.raises(EvalError):
            eval_d2(parse("log(r)"), -1.0)

    def test_division_by_zero(self):
        with pytest.raises(EvalError):
            eval_d2(parse("1/r"), 0.0)

    def test_minmax_tie_warns(self):
        with pytest.warns(NonSmoothTie):
            eval_d2(parse("max(r, 2)"), 2.0)

    def test_minmax_away_from_tie_is_quiet(self):
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            eval_d2(parse("max(r, 2)"), 5.0)

    def test_negative_base_integer_power(self):
        v, d1, _ = eval_d2(parse("(0 - r)^3"), 2.0)
        assert v == -8.0
        assert d1 == pytest.approx(-12.0)

    def test_variable_exponent(self):
        v, d1, _ = eval_d2(parse("2^r"), 3.0)
        assert v == pytest.approx(8.0)
        assert d1 == pytest.approx(8.0 * math.log(2.0))


DERIV_CASES = [
    ("r^2 + 3*r + 1", 2.0, None),
    ("r*sin(r)", 1.3, None),
    ("exp(-4*(r-3)^2)", 2.5, None),
    ("r + 1.5*exp(-4*(r-3)^2)", 3.1, None),
    ("sqrt(1 - 2*m/r)", 5.0, {"m": 1.0}),
    ("tanh((r-5)/2)", 4.0, None),
    ("cos(r)/(1 + r^2)", 0.7, None),
    ("log(1 + r^2)", 1.1, None),
    ("min(r^2, 10*r)", 3.0, None),
]


@pytest.mark.parametrize("text,r,params", DERIV_CASES)
def test_derivatives_match_finite_differences(text, r, params):
    v, d1, d2 = eval_d2(parse(text), r, params)
    fd1, fd2 = fd_oracle(text, r, params)
    assert d1 == pytest.approx(fd1, rel=1e-6, abs=1e-7)
    assert d2 == pytest.approx(fd2, rel=1e-4, abs=1e-4)


class TestRoundTrip:
    @given(st.integers(min_value=-50, max_value=50),
           st.integers(min_value=1, max_value=9),
           st.sampled_from(["+", "-", "*", "/"]))
    @settings(max_examples=60, deadline=None)
    def test_arith_round_trip(self, k, d, op):
        text = f"({k}/{d}) {op} r"
        expr = parse(text)
        again = parse(to_text(expr))
        r = 1.7
        assert eval_d2(again, r) == eval_d2(expr, r)

    @given(st.floats(min_value=0.5, max_value=20.0,
                     allow_nan=False, allow_infinity=False))
    @settings(max_examples=60, deadline=None)
    def test_neck_round_trip_pointwise(self, r):
        text = "r + 1.5*exp(-4*(r-3)^2)"
        expr = parse(text)
        again = parse(to_text(expr))
        assert eval_d2(again, r) == eval_d2(expr, r)

    def test_canonical_text_is_stable(self):
        t1 = to_text(parse("r + 2*r^2"))
        t2 = to_text(parse(t1))
        assert t1 == t2
