import pytest

from quadeq.equations import (
    Equation,
    EquationError,
    EquationSystem,
    parse_system,
    triangular_constant_form,
    triangulate,
)
from quadeq.parsing import parse_word
from quadeq.words import Word, substitute


def sys_of(text):
    return parse_system(text)


def test_parse_system_roundtrip():
    s = sys_of("""
    gens: a b
    vars: x y
    [x,y] [a,b] = 1
    """)
    assert s.gens == ("a", "b")
    assert s.variables == ("x", "y")
    assert s.is_quadratic()
    assert s.total_length() == 8
    # render -> parse is stable
    s2 = parse_system(s.render())
    assert s2 == s


def test_two_sided_equation():
    s = sys_of("gens: a\nvars: x\nx^2 = a a")
    assert s.equations[0].rhs == parse_word("a a", s.alphabet)
    assert s.is_quadratic()


def test_occurrence_counts_and_quadratic():
    s = sys_of("gens: a\nvars: x y\nx a y = 1\ny^-1 a x^-1 = 1")
    assert s.occurrence_counts() == {s.var_sym("x"): 2, s.var_sym("y"): 2}
    assert s.is_quadratic()
    s2 = sys_of("gens: a\nvars: x\nx a = 1")
    assert not s2.is_quadratic()


def test_check_assignment():
    s = sys_of("gens: a b\nvars: x y\n[x,y] [a,b] = 1")
    assert s.check({"x": s.alphabet.word("b"), "y": s.alphabet.word("a")})
    assert not s.check({"x": s.alphabet.word("a"), "y": s.alphabet.word("b")})


def test_bad_system():
    with pytest.raises(EquationError):
        sys_of("vars: x\nx = 1")
    with pytest.raises(EquationError):
        sys_of("gens: a\nvars: a\n")


# --- triangulation -----------------------------------------------------------

def test_triangulate_five_letters():
    s = sys_of("gens: a\nvars: y1 y2 y3 y4 y5\ny1 y2 y3 y4 y5 = 1")
    t = triangulate(s)
    assert len(t.system.equations) == 3
    al = t.system.alphabet
    words = [t.system.format_word(eq.relator()) for eq in t.system.equations]
    assert words == ["y1 y2 x1", "x1^-1 y3 x2", "x2^-1 y4 y5"]
    assert al is not None


def test_triangulate_short_unchanged():
    s = sys_of("gens: a\nvars: x y\nx y a = 1")
    t = triangulate(s)
    assert t.system.equations == (Equation(s.equations[0].relator()),)
    assert t.fresh == ()


def test_triangulate_quadratic_preserved():
    s = sys_of("gens: a\nvars: x y\n[x,y] a = 1")
    assert s.is_quadratic()
    t = triangulate(s)
    assert t.system.is_quadratic()
    counts = t.system.occurrence_counts()
    for name in t.fresh:
        assert counts[t.system.var_sym(name)] == 2


def test_triangulate_size_bound():
    s = sys_of("gens: a b\nvars: x y z\nx a y b z x^-1 y^-1 a z^-1 = 1")
    t = triangulate(s)
    n = s.total_length()
    assert t.system.total_length() <= (n - 2) * 3 * n


def test_triangulate_lift_project():
    s = sys_of("gens: a b\nvars: x y\n[x,y] [a,b] = 1")
    t = triangulate(s)
    # find a solution of S by brute force over tiny words, then lift
    from quadeq.oracle import SearchBound, enumerate_solutions

    sols = list(enumerate_solutions(s, SearchBound(1)))
    assert sols, "sanity: the corpus equation should have a tiny solution"
    for sol in sols[:5]:
        lifted = t.lift(sol)
        assert t.system.check(lifted)
        assert t.project(lifted) == sol


# --- triangular + constant form ----------------------------------------------

def test_tcf_shapes():
    s = sys_of("gens: a b\nvars: x y\nx a y b x^-1 y^-1 = 1")
    f = triangular_constant_form(s)
    assert not f.trivially_false
    # every equation is a pure triple or a constant binding
    base = len(f.system.gens)
    for eq in f.system.equations:
        rel = eq.lhs
        if len(eq.rhs) == 0 and len(rel) == 3:
            assert all(g.sym >= base for g in rel)
        else:
            assert len(eq.lhs) == 1 and eq.lhs[0].sym >= base
            assert f.system.is_constant_word(eq.rhs)
    assert f.system.is_quadratic()


def test_tcf_single_constant_equation():
    s = sys_of("gens: a\nvars: x\nx = a")
    f = triangular_constant_form(s)
    assert f.triples == ()
    assert len(f.constant_eqs) == 1


def test_tcf_lift_solves():
    s = sys_of("gens: a b\nvars: x y\n[x,y] [a,b] = 1")
    f = triangular_constant_form(s)
    from quadeq.oracle import SearchBound, enumerate_solutions

    count = 0
    for sol in enumerate_solutions(s, SearchBound(1), limit=3):
        full = f.lift(sol)
        assert f.system.check(full)
        count += 1
    assert count


def test_tcf_trivially_false():
    s = sys_of("gens: a\nvars: x\na a = 1\nx x^-1 a^0 = 1")
    f = triangular_constant_form(s)
    assert f.trivially_false
