import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cohomolab.presentation import (
    GroupPresentation,
    GroupRingElement,
    PresentationError,
    Word,
    fox_derivative,
    free_reduce,
    preset,
)

from oracles import eval_word, fox, reduce_word

letters = st.sampled_from("abcABC")
words = st.text(alphabet="abcABC", max_size=12)


def W(s):
    return Word.parse(s)


def test_free_reduce_examples():
    assert W("aA").reduced() == W("")
    assert W("").reduced() == W("")
    assert W("abBa").reduced() == W("aa")


def test_word_text_round_trip():
    assert str(W("abAB")) == "abAB"
    assert str(W("1")) == "1"
    assert W("abAB").inverse() == W("baBA")
    with pytest.raises(PresentationError):
        W("a2")


@given(words)
def test_reduction_matches_oracle(s):
    w = W(s)
    assert str(w.reduced()) == (reduce_word(s) or "1")
    assert w.reduced().is_reduced()
    assert w.reduced().reduced() == w.reduced()


@given(words)
def test_word_times_inverse_is_identity(s):
    w = W(s)
    assert (w * w.inverse()).letters == ()


def test_group_ring_arithmetic():
    x = GroupRingElement.parse("+1*1 + -1*abA")
    assert str(x) == "+1*1 + -1*abA"
    assert GroupRingElement.parse(str(x)) == x
    assert (x - x).is_zero()
    assert x.augmentation() == 0
    y = GroupRingElement.of(W("a")) * GroupRingElement.of(W("A"))
    assert y == GroupRingElement.of(W(""))


def test_fox_examples():
    r = W("abAB")
    assert fox_derivative(r, 0) == GroupRingElement.parse("+1*1 + -1*abA")
    assert fox_derivative(W("aaa"), 0) == GroupRingElement.parse("1*1 + 1*a + 1*aa")
    assert fox_derivative(W("aaa"), 1).is_zero()
    assert fox_derivative(W("A"), 0) == GroupRingElement.parse("-1*A")


@given(words, st.sampled_from("abc"))
def test_fox_matches_product_rule_oracle(s, g):
    r = W(s).reduced()
    ours = {str(w) if w.letters else "": c for w, c in fox_derivative(r, "abc".index(g)).terms}
    assert ours == dict(fox(str(r) if r.letters else "", g))


@settings(max_examples=30)
@given(st.text(alphabet="abAB", min_size=1, max_size=10), st.integers(0, 2**32 - 1))
def test_fundamental_identity(s, seed):
    # sum_g (dr/dg)(g - 1) = r - 1 under random invertible matrices
    rng = np.random.default_rng(seed)
    mats = {g: rng.standard_normal((3, 3)) + 3 * np.eye(3) for g in "ab"}
    r = W(s)
    lhs = np.zeros((3, 3), dtype=complex)
    for j, g in enumerate("ab"):
        D = sum((c * eval_word(str(w) if w.letters else "", mats) for w, c in fox_derivative(r, j).terms),
                np.zeros((3, 3), dtype=complex))
        lhs += D @ (mats[g] - np.eye(3))
    rhs = eval_word(s, mats) - np.eye(3)
    assert np.allclose(lhs, rhs, atol=1e-8 * (1 + np.abs(rhs).max()))


def test_presentation_parse_and_errors():
    P = GroupPresentation.parse("# torus\ngens: 2\nrel: abAB\n")
    assert P.generator_count == 2 and P.relators == (W("abAB"),)
    assert GroupPresentation.parse(P.to_text()) == P
    with pytest.raises(PresentationError, match="line 2"):
        GroupPresentation.parse("gens: 1\nrel: a?b\n")
    with pytest.raises(PresentationError, match="not freely reduced"):
        GroupPresentation(1, (W("aA"),))
    with pytest.raises(PresentationError, match="out of range"):
        GroupPresentation(1, (W("ab"),))
    with pytest.raises(PresentationError, match="missing"):
        GroupPresentation.parse("rel: a\n")


def test_presets_and_exponents():
    assert preset("Z3").exponent_matrix() == [[3]]
    assert preset("Z2").exponent_matrix() == [[0, 0]]
    assert len(preset("F2").symmetric_generators) == 4
    with pytest.raises(PresentationError):
        preset("Q8")
