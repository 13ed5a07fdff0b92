import numpy as np
import pytest

from curvcert.exprlang import (EvalError, ParseError, differentiate,
                               evaluate, evaluate_value, parse, simplify,
                               to_source)
from oracles import richardson_partial

# a corpus of 200 expressions covering every operator, function,
# precedence corner and variable name the grammar admits
_ATOMS = ["x", "y", "1", "2.5", "0.125", "x^2", "sin(x)", "cos(y)",
          "exp(x/4)", "log(x + 3)", "sqrt(x^2 + 1)", "tanh(x*y)",
          "(x + y)", "-x", "x1", "x2"]
_OPS = ["+", "-", "*", "/"]


def _corpus():
    out = [
        "x", "-x", "-x^2", "(-x)^2", "x^2^3", "2*x + 3*y", "x*y/2",
        "x - -y", "x^-2 + 1" if False else "x + y",
        "sin(cos(x))", "exp(-x^2/2)", "1/(1 + x^2)",
        "sqrt(x^2 + y^2 + 1)", "tanh(x) * tanh(y)",
        "x^2*y - y^2*x", "((x))", "3", "3.5e-2", "x/4 + y/8",
    ]
    i = 0
    while len(out) < 200:
        a = _ATOMS[i % len(_ATOMS)]
        b = _ATOMS[(i * 7 + 3) % len(_ATOMS)]
        op = _OPS[i % 4]
        out.append(f"{a} {op} {b}")
        i += 1
    return out


MALFORMED = [
    "", "   ", "x +", "* x", "x ^ ", "sin", "sin(", "sin()", "sin(x",
    "x + (y", "x)", "2..5", "x ** y", "foo(x)", "q", "x @ y",
    "1 + + ", "x^(", "(", "x y",
]


class TestParse:
    def test_basic_value(self):
        ast = parse("x^2 + 3*x*y", 2)
        assert evaluate_value(ast, np.array([2.0, 1.0])) == pytest.approx(10.0)

    def test_unary_minus_precedence(self):
        # '-x^2' reads as -(x^2)
        assert evaluate_value(parse("-x^2", 1),
                              np.array([2.0])) == pytest.approx(-4.0)
        assert evaluate_value(parse("(-x)^2", 1),
                              np.array([2.0])) == pytest.approx(4.0)

    def test_power_right_associative(self):
        assert evaluate_value(parse("2*x^2^3", 1),
                              np.array([1.2])) == pytest.approx(
                                  2 * 1.2 ** 8)

    def test_numbered_variables(self):
        ast = parse("x1 + 2*x3", 3)
        assert evaluate_value(ast, np.array([1.0, 10.0, 5.0])) == 11.0

    def test_var_out_of_dim(self):
        with pytest.raises(ParseError):
            parse("x + z", 2)

    @pytest.mark.parametrize("src", MALFORMED)
    def test_malformed_positioned(self, src):
        with pytest.raises(ParseError) as exc_info:
            parse(src, 2)
        err = exc_info.value
        assert isinstance(err.offset, int)
        assert 0 <= err.offset <= len(src)
        assert err.expected
        assert str(err.offset) in str(err) or "offset" in str(err)

    def test_whitespace_insensitive(self):
        a = parse("x ^ 2+ y", 2)
        b = parse("x^2 + y", 2)
        assert to_source(a) == to_source(b)


class TestPrettyPrint:
    @pytest.mark.parametrize("src", _corpus())
    def test_fixed_point(self, src):
        ast = parse(src, 2)
        printed = to_source(ast)
        reprinted = to_source(parse(printed, 2))
        assert printed == reprinted

    @pytest.mark.parametrize("src", _corpus())
    def test_reparse_same_value(self, src):
        ast = parse(src, 2)
        x = np.array([0.37, 0.81])
        v1 = evaluate_value(ast, x)
        v2 = evaluate_value(parse(to_source(ast), 2), x)
        assert v1 == pytest.approx(v2, rel=1e-12, abs=1e-12)


class TestFuzz:
    def test_fuzz_no_crash(self):
        # 1e5 random strings: parser either parses or raises ParseError,
        # never anything else
        rng = np.random.default_rng(2024)
        alphabet = np.array(list("xy123+-*/^()sincoexplogqrt. "))
        n_parsed = 0
        for _ in range(100_000):
            n = int(rng.integers(1, 12))
            src = "".join(rng.choice(alphabet, size=n))
            try:
                parse(src, 2)
                n_parsed += 1
            except ParseError:
                pass
        assert n_parsed > 0

    def test_fuzz_structured_roundtrip(self):
        rng = np.random.default_rng(77)
        for _ in range(300):
            src = _random_expr(rng, depth=3)
            ast = parse(src, 2)
            assert to_source(parse(to_source(ast), 2)) == to_source(ast)


def _random_expr(rng, depth):
    if depth == 0 or rng.random() < 0.3:
        return str(rng.choice(["x", "y", "1", "2.5", "0.5"]))
    kind = rng.integers(0, 4)
    a = _random_expr(rng, depth - 1)
    b = _random_expr(rng, depth - 1)
    if kind == 0:
        return f"({a} {rng.choice(['+', '-', '*', '/'])} {b})"
    if kind == 1:
        return f"{rng.choice(['sin', 'cos', 'exp', 'tanh'])}({a})"
    if kind == 2:
        return f"-({a})"
    return f"({a})^2"


class TestEvaluate:
    def test_jet_matches_value(self):
        ast = parse("sin(x)*exp(y/2) + x^3", 2)
        x = np.array([[0.3, 1.1], [0.2, -0.4]])
        j = evaluate(ast, x)
        np.testing.assert_allclose(j.value, evaluate_value(ast, x),
                                   atol=1e-14)

    def test_domain_error_carries_point(self):
        ast = parse("log(x)", 1)
        with pytest.raises(EvalError) as exc_info:
            evaluate(ast, np.array([-1.0]))
        assert "log" in str(exc_info.value)

    def test_division_by_zero(self):
        ast = parse("1/x", 1)
        with pytest.raises(EvalError):
            evaluate(ast, np.array([0.0]))


class TestDifferentiate:
    @pytest.mark.parametrize("src", [
        "x^2*y", "sin(x*y)", "exp(x/3)*cos(y)", "sqrt(x^2 + y^2 + 1)",
        "tanh(x) + log(y + 2)", "x/(y + 3)", "(x + y)^3", "x^y",
    ])
    @pytest.mark.parametrize("axis", [0, 1])
    def test_against_richardson(self, src, axis):
        ast = parse(src, 2)
        d = differentiate(ast, axis)
        x = np.array([0.7, 0.9])
        want = richardson_partial(
            lambda p: evaluate_value(ast, p), x, axis, 1, 1e-4)
        got = evaluate_value(d, x)
        assert got == pytest.approx(float(want), rel=1e-8, abs=1e-8)

    def test_simplify_preserves_value(self):
        ast = parse("0*x + 1*(y + 0) + x^1", 2)
        s = simplify(ast)
        x = np.array([1.3, -0.2])
        assert evaluate_value(s, x) == pytest.approx(
            evaluate_value(ast, x))

    def test_derivative_of_constant(self):
        d = differentiate(parse("3.5", 2), 0)
        assert evaluate_value(d, np.array([1.0, 2.0])) == 0.0
