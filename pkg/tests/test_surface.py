from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubind import surface as S
from cubind.stdlib import STDLIB_FILES, read_file


@pytest.mark.parametrize("name", sorted(STDLIB_FILES))
def test_printing_a_parsed_file_gives_back_its_text(name):
    text = read_file(name)
    assert S.print_file(S.parse(text)) == text


@pytest.mark.parametrize("name", sorted(STDLIB_FILES))
def test_parse_print_parse_is_parse(name):
    first = S.parse(read_file(name))
    assert S.parse(S.print_file(first)) == first


def test_circle_declaration():
    (d,) = S.parse("data circle = base | lp(x) [x=0 -> base | x=1 -> base]").decls
    assert isinstance(d, S.SData)
    assert [c.label for c in d.ctors] == ["base", "lp"]
    assert [i.name for i in d.ctors[1].items] == ["x"] and d.ctors[1].items[0].type is None
    assert len(d.ctors[1].boundary) == 2


def test_eval_directive():
    (d,) = S.parse("eval lp(0)").decls
    assert isinstance(d, S.SEval) and d.expect is None
    assert d.expr == S.SCall("lp", (S.SNum(0),), False)


def test_trace_directive_with_bound():
    (d,) = S.parse("trace lp(0) max 3").decls
    assert isinstance(d, S.STrace) and d.max == 3


def test_application_associates_to_the_left():
    e = S.parse_expr("f a b")
    assert isinstance(e, S.SApp) and isinstance(e.fn, S.SApp)
    assert e.arg == S.SName("b")


def test_parse_error_carries_line_and_column():
    with pytest.raises(S.ParseError) as info:
        S.parse("def one : nat = 1\ndata x = | |")
    assert info.value.pos == (2, 10)
    assert str(info.value).startswith("2:10:")


def test_trailing_input_after_an_expression_is_rejected():
    with pytest.raises(S.ParseError):
        S.parse_expr("lp(0) )")


@given(st.lists(st.integers(0, 9), min_size=1, max_size=4))
def test_printed_applications_reparse(nums):
    e = S.SName("f")
    for n in nums:
        e = S.SApp(e, S.SNum(n))
    assert S.parse_expr(S.print_expr(e)) == e
