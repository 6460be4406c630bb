import math
import random
import re
from importlib import resources

import pytest

from lbeval.dsl import (ParseError, format_expression, format_model,
                        parse_expression, parse_model_file, tokenize)
from lbeval.expr import (BinaryOp, Constant, LaggedOutput, Pow, UnaryCall,
                         const, mul, power, structurally_equal, sub, x)

from gen import random_source, random_tree

SHIPPED = ["sine.nmx", "duffing.nmx", "duffing_verbatim.nmx"]


def shipped_text(name):
    return resources.files("lbeval.models").joinpath(name).read_text()


def test_eq7_tree():
    tree = parse_expression("2.6868*x[0] - 0.2462*x[0]^3")
    expected = sub(mul(const(2.6868), x(0)),
                   mul(const(0.2462), power(x(0), 3)))
    assert structurally_equal(tree, expected)


def test_eq8_tree_keeps_grouping():
    tree = parse_expression("2.6868*x[0] - (0.2462*x[0])*x[0]^2")
    expected = sub(mul(const(2.6868), x(0)),
                   mul(mul(const(0.2462), x(0)), power(x(0), 2)))
    assert structurally_equal(tree, expected)
    assert not structurally_equal(
        tree, parse_expression("2.6868*x[0] - 0.2462*x[0]^3"))


def test_single_lag():
    assert parse_expression("x[0]") == LaggedOutput(0)


def test_sine_system_tree_and_pi_keyword():
    tree = parse_expression("1.2*3.141592653589793*sin(x[0])")
    assert tree == BinaryOp("*", BinaryOp("*", Constant(1.2),
                                          Constant(math.pi)),
                            UnaryCall("sin", LaggedOutput(0)))
    assert structurally_equal(tree, parse_expression("1.2*pi*sin(x[0])"))


@pytest.mark.parametrize("a, b", [
    ("a+b*c", "a+(b*c)"),
    ("a-b-c", "(a-b)-c"),
    ("a/b*c", "(a/b)*c"),
    ("-a^2", "-(a^2)"),
    ("-a*b", "(-a)*b"),
])
def test_precedence_and_associativity(a, b):
    sub_vars = lambda s: s.replace("a", "x[0]").replace("b", "x[1]") \
        .replace("c", "x[2]")  # noqa: E731
    assert structurally_equal(parse_expression(sub_vars(a)),
                              parse_expression(sub_vars(b)))


def test_grouping_preserved():
    assert not structurally_equal(parse_expression("x[0]*(x[1]*x[2])"),
                                  parse_expression("(x[0]*x[1])*x[2]"))


def test_negative_literal_folds_but_negated_power_does_not():
    assert parse_expression("-0.5") == Constant(-0.5)
    tree = parse_expression("-0.5^2")
    assert not isinstance(tree, Constant)
    assert isinstance(tree.operand, Pow)


def test_format_keeps_explicit_product_grouping():
    text = format_expression(
        parse_expression("2.6868*x[0] - (0.2462*x[0])*x[0]^2"))
    assert "(0.2462*x[0])" in text
    assert text == "2.6868*x[0] - (0.2462*x[0])*x[0]^2"


def test_format_left_associated_sum():
    tree = parse_expression("x[0]-x[1]+x[2]")
    text = format_expression(tree)
    assert text == "x[0] - x[1] + x[2]"
    assert structurally_equal(parse_expression(text), tree)
    assert tree.op == "+" and tree.left.op == "-"


def test_round_trip_literal_product():
    tree = parse_expression("(0.1*0.2)*0.3")
    assert structurally_equal(parse_expression(format_expression(tree)), tree)


@pytest.mark.parametrize("seed", range(200))
def test_round_trip_random_trees(seed):
    tree = random_tree(random.Random(seed))
    assert structurally_equal(parse_expression(format_expression(tree)), tree)


@pytest.mark.parametrize("seed", range(200))
def test_round_trip_random_sources(seed):
    tree = parse_expression(random_source(random.Random(seed)))
    again = parse_expression(format_expression(tree))
    assert structurally_equal(again, tree)


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_files_round_trip(name):
    mf = parse_model_file(shipped_text(name))
    text = "".join(format_model(m) for m in mf)
    again = parse_model_file(text)
    assert list(again.models) == list(mf.models)
    for m in mf:
        other = again[m.name]
        assert structurally_equal(other.update, m.update)
        assert other.initial_conditions == m.initial_conditions
        assert other.max_output_lag == m.max_output_lag
        assert other.requires_input == m.requires_input


def test_model_block_fields():
    mf = parse_model_file("""
        model G {   # comment after brace
            lags = 1;
            init = 0.5, -0.25;
            input = 1;
            update = x[0] + 0.1*u[1];
        }
    """)
    g = mf["G"]
    assert g.max_output_lag == 1
    assert g.initial_conditions == (0.5, -0.25)
    assert g.requires_input and g.max_input_lag == 1


def _error(text):
    with pytest.raises(ParseError) as info:
        parse_model_file(text)
    diags = info.value.diagnostics
    assert diags and diags[0].severity == "error"
    return diags[0]


BLOCK = "model M {{ lags = {lags}; init = {init}; {extra}update = {upd}; }}"


def block(upd="x[0]", lags=0, init="1", extra=""):
    return BLOCK.format(upd=upd, lags=lags, init=init, extra=extra)


def test_error_syntax():
    d = _error(block(upd="x[0] +"))
    assert "operand" in d.message


def test_error_unknown_identifier():
    d = _error(block(upd="y[0]"))
    assert "unknown identifier" in d.message
    assert d.column == block().index("x[0]") + 1


@pytest.mark.parametrize("upd", ["x[0]^0", "x[0]^2.5", "x[0]^-1", "x[0]^x[0]"])
def test_error_bad_exponent(upd):
    d = _error(block(upd=upd))
    assert "exponent" in d.message


def test_error_lag_too_deep():
    src = block(upd="x[0] + x[2]", lags=1, init="1, 1")
    d = _error(src)
    assert "exceeds" in d.message
    assert d.column == src.index("x[2]") + 1


def test_error_input_lag_too_deep_and_missing_input():
    assert "exceeds" in _error(block(upd="u[2]", lags=2, init="0,0,0",
                                     extra="input = 1; ")).message
    assert "input" in _error(block(upd="u[0]")).message


def test_error_init_count():
    d = _error(block(lags=2, init="1, 2"))
    assert "init" in d.message


def test_error_duplicate_model():
    d = _error(block() + "\n" + block())
    assert "duplicate" in d.message
    assert d.line == 2


def test_error_missing_update():
    assert "missing" in _error("model M { lags = 0; init = 1; }").message


def test_error_position_on_later_line():
    src = "model M {\n  lags = 0;\n  init = 1;\n  update = x[0] $ 2;\n}"
    d = _error(src)
    assert (d.line, d.column) == (4, 17)


def test_unused_input_is_a_warning():
    mf = parse_model_file(block(extra="input = 0; "))
    assert [w.severity for w in mf.warnings] == ["warning"]


@pytest.mark.parametrize("seed", range(100))
def test_fuzzed_bad_character_position(seed):
    rng = random.Random(seed)
    src = random_source(rng).replace("\n", " ")
    pos = rng.randrange(len(src) + 1)
    bad = src[:pos] + "@" + src[pos:]
    with pytest.raises(ParseError) as info:
        parse_expression(bad)
    d = info.value.diagnostics[0]
    assert d.line == 1
    # either the '@' itself or the start of the lexeme it broke up
    assert d.column <= pos + 1
    assert re.fullmatch(r"[\w.]*", bad[d.column - 1:pos])


@pytest.mark.parametrize("seed", range(100))
def test_fuzzed_truncation_reports_a_token_position(seed):
    rng = random.Random(seed)
    src = random_source(rng).replace("\n", " ")
    cut = src.rstrip()[:-1].rstrip()
    try:
        parse_expression(cut)
    except ParseError as exc:
        d = exc.diagnostics[0]
        starts = {t.column for t in tokenize(cut)}
        assert d.line == 1 and d.column in starts
