from quadeq.equations import parse_system
from quadeq.oracle import (
    SearchBound,
    enumerate_solutions,
    is_satisfiable,
    min_solution_stats,
    reduced_words,
)
from quadeq.words import Word


def test_reduced_words_order_and_counts():
    ws = reduced_words(2, 2)
    # 1 empty + 4 of length 1 + 12 of length 2
    assert len(ws) == 17
    assert ws[0] == Word()
    lens = [len(w) for w in ws]
    assert lens == sorted(lens)
    # duplicate-free
    assert len({w.letters for w in ws}) == len(ws)
    # length-lex: within a length, keys ascend
    for i in range(1, len(ws)):
        assert ws[i - 1].key() < ws[i].key()


def test_centralizer_enumeration():
    s = parse_system("gens: a b\nvars: x\nx^-1 a x = a")
    got = [sol["x"] for sol in enumerate_solutions(s, SearchBound(1))]
    al = s.alphabet
    assert got == [Word(), al.word("a"), al.word("-a")]


def test_square_root_unsat():
    s = parse_system("gens: a b\nvars: x\nx^2 = a")
    assert list(enumerate_solutions(s, SearchBound(5))) == []


def test_commutator_solutions():
    s = parse_system("gens: a b\nvars: x y\n[x,y] [a,b] = 1")
    sols = list(enumerate_solutions(s, SearchBound(1)))
    pairs = {(s_["x"].letters, s_["y"].letters) for s_ in sols}
    al = s.alphabet
    assert (al.word("b").letters, al.word("a").letters) in pairs
    for sol in sols:
        assert s.check(sol)


def test_stream_is_sorted_and_duplicate_free():
    s = parse_system("gens: a b\nvars: x y\nx^-1 y = 1")
    sols = list(enumerate_solutions(s, SearchBound(2)))
    keys = [tuple(sol[v].key() for v in ("x", "y")) for sol in sols]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    # x = y always: completeness within bound
    assert len(sols) == 17


def test_doubling_bound_keeps_solutions():
    s = parse_system("gens: a b\nvars: x\nx^-1 a x = a")
    small = {sol["x"].letters for sol in enumerate_solutions(s, SearchBound(1))}
    big = {sol["x"].letters for sol in enumerate_solutions(s, SearchBound(2))}
    assert small <= big


def test_min_solution_stats_examples():
    s = parse_system("gens: a b\nvars: x y\n[x,y] [a,b] = 1")
    assert min_solution_stats(s, SearchBound(2)) == 1

    s = parse_system("gens: a b\nvars: x\nx = a")
    assert min_solution_stats(s, SearchBound(2)) == 1

    s = parse_system("gens: a b\nvars: x\nx^2 a^2 = 1")
    assert min_solution_stats(s, SearchBound(2)) == 1

    s = parse_system("gens: a b\nvars: x\nx^2 = a")
    assert min_solution_stats(s, SearchBound(3)) is None


def test_total_bound():
    s = parse_system("gens: a b\nvars: x y\nx^-1 y = 1")
    sols = list(enumerate_solutions(s, SearchBound(2, total=2)))
    assert all(len(sol["x"]) + len(sol["y"]) <= 2 for sol in sols)


def test_witness_for_conjugate_words():
    s = parse_system("gens: a b\nvars: z\nz^-1 (a b) z = b a")
    sol = is_satisfiable(s, SearchBound(2))
    assert sol is not None
    assert s.check(sol)


def test_multi_equation_coupling():
    s = parse_system("gens: a b\nvars: x y\nx a = y\ny^-1 x^-1 = a")
    # x a = y and y x = a^-1 => (x a) x = a^-1
    sols = list(enumerate_solutions(s, SearchBound(3)))
    for sol in sols:
        assert s.check(sol)
