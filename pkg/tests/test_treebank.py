import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coordnli.treebank import (
    ParseError,
    internal,
    leaf,
    parse_bracketed,
    serialize,
    yield_tokens,
)

from .conftest import FIG2_TREE


def test_minimal_two_leaf_tree():
    tree = parse_bracketed("(NP (DT a) (NN resident))")
    assert tree.label == "NP"
    assert not tree.is_leaf
    assert tree.span == (0, 2)
    assert [c.token for c in tree.children] == ["a", "resident"]
    assert [c.span for c in tree.children] == [(0, 1), (1, 2)]


def test_round_trip_single_leaf():
    text = "(X a)"
    assert serialize(parse_bracketed(text)) == text


def test_fig2_sentence_yield():
    tree = parse_bracketed(FIG2_TREE)
    tokens = yield_tokens(tree)
    assert len(tokens) == 13
    assert tokens == [
        "He", "is", "a", "Worcester", "resident", "and", "a", "member",
        "of", "the", "Democratic", "Party", ".",
    ]
    assert tree.span == (0, 13)


def test_whitespace_tolerance():
    assert serialize(parse_bracketed("  ( NP ( DT a )\n (NN resident) ) ")) == \
        "(NP (DT a) (NN resident))"


def test_lrb_rrb_normalized_and_reescaped():
    tree = parse_bracketed("(NP (-LRB- -LRB-) (NN x) (-RRB- -RRB-))")
    assert [c.token for c in tree.children] == ["(", "x", ")"]
    assert serialize(tree) == "(NP (-LRB- -LRB-) (NN x) (-RRB- -RRB-))"


def test_functional_tags_kept_verbatim():
    tree = parse_bracketed("(NP-SBJ (NN dog))")
    assert tree.label == "NP-SBJ"
    assert tree.base_label == "NP"


@pytest.mark.parametrize("text,fragment", [
    ("", "empty input"),
    ("(NP (DT a)", "unbalanced"),
    ("(NP (DT a)))", "trailing"),
    ("(())", "empty label"),
    ("(NP a (DT b))", "both token and children"),
    ("(NP (DT b) a)", "both token and children"),
    ("(NP a b)", "more than one token"),
    ("(X)", "neither token nor children"),
])
def test_malformed_inputs_are_structured_errors(text, fragment):
    with pytest.raises(ParseError) as err:
        parse_bracketed(text)
    assert fragment in str(err.value)
    assert "char" in str(err.value)


def test_leaf_yield():
    assert yield_tokens(leaf("NN", "dog")) == ["dog"]


_LABELS = st.sampled_from(["S", "NP", "VP", "PP", "ADJP", "NP-SBJ", "X", "CC"])
_TOKENS = st.text(alphabet="abcdefgh'-.,", min_size=1, max_size=6)


@st.composite
def trees(draw):
    max_depth = draw(st.integers(min_value=0, max_value=3))

    def build(depth, start):
        if depth == 0 or draw(st.booleans()):
            return leaf(draw(_LABELS), draw(_TOKENS), start)
        kids = []
        pos = start
        for _ in range(draw(st.integers(min_value=1, max_value=3))):
            kid = build(depth - 1, pos)
            kids.append(kid)
            pos = kid.span[1]
        return internal(draw(_LABELS), kids)

    return build(max_depth, 0)


@given(trees())
def test_parse_serialize_round_trip(tree):
    assert parse_bracketed(serialize(tree)) == tree


@given(trees())
def test_span_lengths_sum(tree):
    def check(node):
        if not node.is_leaf:
            assert len(node) == sum(len(c) for c in node.children)
            for child in node.children:
                check(child)
    check(tree)
    assert len(yield_tokens(tree)) == len(tree)


@given(trees(), st.data())
@settings(max_examples=200)
def test_bracket_mutation_never_crashes(tree, data):
    text = list(serialize(tree))
    for _ in range(data.draw(st.integers(min_value=1, max_value=4))):
        op = data.draw(st.sampled_from(["insert", "delete", "swap"]))
        pos = data.draw(st.integers(min_value=0, max_value=max(0, len(text) - 1)))
        if op == "insert":
            text.insert(pos, data.draw(st.sampled_from("()")))
        elif op == "delete" and text:
            text.pop(pos)
        elif text:
            text[pos] = data.draw(st.sampled_from("() "))
    mutated = "".join(text)
    try:
        parse_bracketed(mutated)
    except ParseError:
        pass  # structured failure is the contract; anything else would escape
