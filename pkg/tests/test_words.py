import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadeq.words import (
    Alphabet,
    Generator,
    Word,
    commutator,
    cyclic_normalize,
    cyclically_equal,
    is_proper_power,
    nth_root,
    reduce,
    root_of,
    substitute,
    u_decompose,
)

AB = Alphabet(("a", "b", "c"))
a, b, c = AB.gen("a"), AB.gen("b"), AB.gen("c")


def W(*names):
    return AB.word(*names)


# --- reduction -------------------------------------------------------------

def test_reduce_cancellation():
    assert reduce([a, a.inv(), b]) == W("b")


def test_reduce_empty():
    assert reduce([]) == Word()
    assert len(Word()) == 0


def test_reduce_nested():
    assert reduce([a, b, b.inv(), a.inv(), c]) == W("c")


letters = st.tuples(st.integers(0, 2), st.sampled_from((1, -1))).map(
    lambda t: Generator(*t)
)
raw_words = st.lists(letters, max_size=12)


@given(raw_words)
def test_reduce_idempotent(seq):
    w = reduce(seq)
    assert reduce(w.letters) == w


@given(raw_words, raw_words)
def test_product_length_subadditive(s1, s2):
    u, v = reduce(s1), reduce(s2)
    assert len(u * v) <= len(u) + len(v)


@given(raw_words)
def test_inverse_involution(seq):
    w = reduce(seq)
    assert w.inverse().inverse() == w
    assert len(w * w.inverse()) == 0


# --- commutator ------------------------------------------------------------

def test_commutator_formula():
    lhs = commutator(W("a"), W("b"))
    assert lhs == W("-a", "-b", "a", "b")
    assert len(lhs) == 4


def test_commutator_self_trivial():
    assert commutator(W("a"), W("a")) == Word()


def test_commutator_ab_b():
    got = commutator(W("a", "b"), W("b"))
    assert got == W("-b", "-a", "-b", "a", "b", "b")
    assert len(got) == 6


@given(raw_words, raw_words)
def test_commutator_antisymmetry(s1, s2):
    x, y = reduce(s1), reduce(s2)
    assert commutator(x, y).inverse() == commutator(y, x)


# --- cyclic words ----------------------------------------------------------

def test_cyclic_strip_conjugation():
    assert cyclic_normalize(W("a", "b", "-a")) == cyclic_normalize(W("b"))


def test_cyclic_rotation_canonical():
    assert cyclic_normalize(W("b", "a")) == cyclic_normalize(W("a", "b"))
    assert cyclic_normalize(W("b", "a")).representative == W("a", "b")


def test_cyclic_reduce_then_rotate():
    assert cyclic_normalize(W("-a", "b", "a", "a")) == cyclic_normalize(W("a", "b"))


@given(raw_words, st.integers(0, 2), st.sampled_from((1, -1)))
def test_cyclic_conjugation_invariant(seq, sym, sign):
    w = reduce(seq)
    g = Word((Generator(sym, sign),))
    assert cyclic_normalize(g * w * g.inverse()) == cyclic_normalize(w)


def test_cyclically_equal():
    assert cyclically_equal(W("a", "b"), W("b", "a"))
    assert not cyclically_equal(W("a", "b"), W("a", "-b"))


# --- powers and roots -------------------------------------------------------

def test_proper_power():
    assert is_proper_power(W("a", "a"))
    assert not is_proper_power(W("a", "b"))
    assert is_proper_power(W("a", "b", "a", "b"))


def test_root_of():
    r, k = root_of(W("a", "b", "a", "b"))
    assert r == W("a", "b") and k == 2


def test_nth_root():
    assert nth_root(W("a", "b") ** 3, 3) == W("a", "b")
    assert nth_root(W("a"), 2) is None
    w = W("b") * (W("a") ** 2) * W("-b")
    assert nth_root(w, 2) == W("b", "a", "-b")


# --- U-decomposition --------------------------------------------------------

def test_u_decompose_flanked_run():
    w = W("a") * (W("b") ** 5) * W("a")
    d = u_decompose(w, W("b"))
    assert d.head == W("a", "b")
    assert len(d.blocks) == 1
    blk = d.blocks[0]
    assert (blk.eps, blk.run) == (1, 3)
    assert blk.tail == W("b", "a")
    assert d.reassemble() == w


def test_u_decompose_no_occurrence():
    w = W("a", "c", "a")
    d = u_decompose(w, W("b"))
    assert d.head == w and d.blocks == ()
    assert d.reassemble() == w


def test_u_decompose_pure_power():
    w = W("b") ** 5
    d = u_decompose(w, W("b"))
    assert d.head == W("b")
    assert d.blocks[0].eps == 1 and d.blocks[0].run == 3
    assert d.blocks[0].tail == W("b")
    assert d.reassemble() == w


def test_u_decompose_negative_run():
    w = W("a") * (W("b") ** -4) * W("c")
    d = u_decompose(w, W("b"))
    assert len(d.blocks) == 1
    assert d.blocks[0].eps == -1 and d.blocks[0].run == 2
    assert d.reassemble() == w


def test_u_decompose_rejects_bad_base():
    with pytest.raises(ValueError):
        u_decompose(W("a"), Word())
    with pytest.raises(ValueError):
        u_decompose(W("a"), W("b", "b"))
    with pytest.raises(ValueError):
        u_decompose(W("a"), W("b", "a", "-b"))


@given(raw_words, st.sampled_from(["a", "b", "ab"]))
@settings(max_examples=200)
def test_u_decompose_reassembles(seq, base):
    w = reduce(seq)
    u = W("a") if base == "a" else W("b") if base == "b" else W("a", "b")
    d = u_decompose(w, u)
    assert d.reassemble() == w


# --- substitution -----------------------------------------------------------

def test_substitute_cancel():
    # template x a with x -> a^-1 over combined alphabet (a,b,c=vars? use c as var)
    template = W("c", "a")
    assert substitute(template, {2: W("-a")}) == Word()


def test_substitute_commutator_identity():
    tmpl = commutator(W("b"), W("c"))
    got = substitute(tmpl, {1: W("b"), 2: W("a")})
    assert got == commutator(W("b"), W("a"))
    assert got == commutator(W("a"), W("b")).inverse()


def test_substitute_identity():
    w = W("a", "b", "a")
    assert substitute(W("c"), {2: w}) == w


def test_substitute_unassigned_error():
    from quadeq.words import UnassignedVariableError

    with pytest.raises(UnassignedVariableError):
        substitute(W("c"), {}, variables={2})


# --- alphabet / formatting ---------------------------------------------------

def test_format_powers():
    w = W("a", "b", "b", "b", "-a")
    assert AB.format(w) == "a b^3 a^-1"
    assert AB.format(Word()) == "1"


def test_alphabet_limits():
    with pytest.raises(Exception):
        Alphabet(tuple(f"g{i}" for i in range(65)))
    with pytest.raises(Exception):
        Alphabet(("a", "a"))
