import pytest

from quadeq.equations import parse_system
from quadeq.oracle import SearchBound, enumerate_solutions, is_satisfiable
from quadeq.solver import (
    CancellationDiagrams,
    GenusResult,
    SolverError,
    form_min_genus,
    genus_nonorientable,
    genus_orientable,
    solve_quadratic,
    tuple_genus,
)
from quadeq.standardize import NONORIENTABLE, ORIENTABLE
from quadeq.words import Alphabet, Word, commutator

AB = Alphabet(("a", "b"))
GENS = ("a", "b")
a, b = AB.word("a"), AB.word("b")


# --- classical genus values ------------------------------------------------------

def test_commutator_genus_one():
    assert tuple_genus([commutator(a, b)], ORIENTABLE, GENS) == 1


def test_commutator_square_genus_two():
    assert tuple_genus([commutator(a, b) ** 2], ORIENTABLE, GENS) == 2


def test_commutator_cube_genus_two():
    # the classical cancellation-diagram example: genus 2, not 3
    assert tuple_genus([commutator(a, b) ** 3], ORIENTABLE, GENS) == 2


def test_nonorientable_square():
    assert tuple_genus([a * a], NONORIENTABLE, GENS) == 1


def test_nonorientable_commutator_needs_three():
    # a commutator is not a product of two squares
    assert tuple_genus([commutator(a, b)], NONORIENTABLE, GENS) == 3


def test_unbalanced_tuple_unsolvable():
    assert tuple_genus([a], ORIENTABLE, GENS) is None
    assert tuple_genus([a], NONORIENTABLE, GENS) is None  # a is not a square


def test_conjugate_pair_genus_zero():
    # z^-1 C1 z C = 1 needs C1 ~ C^-1
    assert tuple_genus([a * b, (a * b).inverse()], ORIENTABLE, GENS) == 0
    assert tuple_genus([a * b, a.inverse() * b.inverse()], ORIENTABLE, GENS) == 0
    # (ab, ba) is letter-unbalanced: unsolvable at every genus
    assert tuple_genus([a * b, b * a], ORIENTABLE, GENS) is None


def test_nonconjugate_pair_positive_genus():
    # z^-1 (ab) z (ab) = 1 is impossible orientably, genus 1 non-orientably
    assert tuple_genus([a * b, a * b], ORIENTABLE, GENS) is None
    assert tuple_genus([a * b, a * b], NONORIENTABLE, GENS) == 1


def test_flipped_sphere_costs_one():
    # single-letter version of the same phenomenon
    assert tuple_genus([a, a], NONORIENTABLE, GENS) == 1


# --- genus_* operations (spec-level shapes) -----------------------------------------

def test_genus_orientable_examples():
    r = genus_orientable([commutator(a, b)], 1, GENS)
    assert r.solvable and r.witness is not None
    r0 = genus_orientable([commutator(a, b)], 0, GENS, want_witness=False)
    assert not r0.solvable
    triv = genus_orientable([Word()], 0, GENS)
    assert triv.solvable


def test_genus_nonorientable_examples():
    r = genus_nonorientable([a * a], 1, GENS)
    assert r.solvable and r.witness is not None
    # frozen from oracle exhaustion + Lyndon's theorem: [a,b] needs 3 squares
    assert not genus_nonorientable([commutator(a, b)], 2, GENS, want_witness=False).solvable
    assert genus_nonorientable([commutator(a, b)], 3, GENS, want_witness=False).solvable
    assert not genus_nonorientable([a], 1, GENS, want_witness=False).solvable
    with pytest.raises(SolverError):
        genus_nonorientable([a], 0, GENS)


def test_genus_monotone():
    for g in range(1, 4):
        assert genus_orientable([commutator(a, b)], g, GENS, want_witness=False).solvable


# --- solve_quadratic ----------------------------------------------------------------

def solve_text(text, bound=None):
    return solve_quadratic(parse_system(text), bound=bound)


def test_solve_square_root():
    r = solve_text("gens: a b\nvars: x\nx^2 = (a b)^2")
    assert r.status == "sat"
    assert r.witness["x"] == a * b


def test_solve_commutator():
    r = solve_text("gens: a b\nvars: x y\n[x,y] = [a,b]")
    assert r.status == "sat"


def test_solve_unsat_square():
    r = solve_text("gens: a b\nvars: x\nx^2 = a")
    assert r.status == "unsat"


def test_solve_coupled_system():
    r = solve_text("gens: a b\nvars: x y\nx a = y\ny^-1 x^-1 = a")
    # y = x a; second: a^-1 x^-1 x^-1 = a  =>  x^2 = a^-2, x = a^-1, y = 1
    assert r.status == "sat"


def test_solve_trivially_unsat_constant():
    # eliminating x leaves the constant relator a^2
    r = solve_text("gens: a b\nvars: x y\nx y = 1\ny^-1 x^-1 a^2 = 1")
    assert r.status == "unsat"


def test_solve_non_quadratic_rejected():
    with pytest.raises(SolverError):
        solve_text("gens: a\nvars: x\nx a = 1")


def test_conjugation_equation():
    r = solve_text("gens: a b\nvars: z\nz^-1 (a b) z = b a")
    assert r.status == "sat"


def test_unsolvable_conjugation():
    r = solve_text("gens: a b\nvars: z\nz^-1 a z = b")
    assert r.status == "unsat"


# --- agreement with the oracle on a small corpus --------------------------------------

CORPUS = [
    "x^2 = a^2",
    "x^2 = a b",
    "x^2 a^2 = 1",
    "x a x b = 1",
    "x a x^-1 = b",
    "x a x^-1 b^-1 = 1",
    "x y x^-1 y^-1 [a,b] = 1",
    "x y x y = a^2",
    "x a y b x^-1 y^-1 = 1",
    "x a y a x^-1 y^-1 = 1",
    "x y a x b y = 1",
    "x^2 y^2 = a^2 b^2",
    "x^2 y^2 [a,b] = 1",
    "x b a x b a = 1",
    "x a b x^-1 a b = 1",
]


@pytest.mark.parametrize("eq", CORPUS)
def test_solver_oracle_agreement(eq):
    s = parse_system(f"gens: a b\nvars: {' '.join(v for v in 'xyz' if v in eq.split('=')[0] or v in eq)}\n{eq}")
    res = solve_quadratic(s)
    oracle_hit = is_satisfiable(s, SearchBound(3))
    if res.status == "sat":
        assert s.check(res.witness)
        # the oracle must re-find a witness at that length
        ell = max((len(w) for w in res.witness.values()), default=0)
        assert is_satisfiable(s, SearchBound(max(ell, 1))) is not None
    else:
        assert res.status == "unsat"
        assert oracle_hit is None, f"oracle found {oracle_hit} but solver says unsat"
