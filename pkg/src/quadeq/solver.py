"""Decision procedure for quadratic systems over free groups.

Pipeline: decouple the system (eliminating variables shared between two
equations), normalize each surviving equation to standard form, then decide
solvability by searching cancellation diagrams: perfect matchings of the
coefficient letters (inverse letters for orientable forms; arbitrary signs,
glued with a flip, for non-orientable forms).  Each complete matching glues
the coefficient discs into closed components whose cost in handles/crosscaps
is exact:

    orientable form:      cost(component) = orientable genus
    non-orientable form:  sphere with coherent disc orientations      -> 0
                          sphere needing a disc flip                  -> 1
                          orientable genus h >= 1                     -> 2h + 1
                          non-orientable, Euler characteristic chi    -> 2 - chi

The equation is solvable at genus g iff some matching has total cost <= g.
SAT answers carry witnesses found by bounded search on the standard form and
transported back; UNSAT is a complete verdict (the matching space is finite),
so it is not bound-limited.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .equations import EquationError, EquationSystem, Equation
from .oracle import SearchBound, is_satisfiable
from .standardize import (
    NONORIENTABLE,
    ORIENTABLE,
    Normalization,
    StandardForm,
    standardize,
)
from .words import Generator, Word, substitute


class SolverError(ValueError):
    pass


# --- cancellation diagrams ----------------------------------------------------


class _UndoUF:
    """Union-find with rollback, optional parity weights on the edges."""

    def __init__(self, n: int, parity: bool = False):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.par = [0] * n if parity else None
        self.trail: list[tuple[int, int]] = []

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    def parity_to_root(self, x: int) -> int:
        p = 0
        while self.parent[x] != x:
            p ^= self.par[x]  # type: ignore[index]
            x = self.parent[x]
        return p

    def union(self, x: int, y: int, edge_parity: int = 0) -> bool:
        """Union returning True when two classes merged (False: already same)."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        px = self.parity_to_root(x) if self.par is not None else 0
        py = self.parity_to_root(y) if self.par is not None else 0
        if self.rank[rx] > self.rank[ry]:
            rx, ry = ry, rx
            px, py = py, px
            x, y = y, x
        # attach rx under ry
        self.trail.append((rx, self.rank[ry]))
        self.parent[rx] = ry
        if self.par is not None:
            self.par[rx] = px ^ py ^ edge_parity
        if self.rank[rx] == self.rank[ry]:
            self.rank[ry] += 1
        return True

    def consistent(self, x: int, y: int, edge_parity: int) -> bool:
        return (self.parity_to_root(x) ^ self.parity_to_root(y)) == edge_parity

    def mark(self) -> int:
        return len(self.trail)

    def rollback(self, mark: int):
        # LIFO order guarantees ry is a root again when its union unwinds
        while len(self.trail) > mark:
            rx, old_rank = self.trail.pop()
            ry = self.parent[rx]
            self.parent[rx] = rx
            self.rank[ry] = old_rank
            if self.par is not None:
                self.par[rx] = 0


@dataclass
class _Cluster:
    discs: int
    letters: int
    unmatched: int
    corners: int           # live corner-class count
    flip0: int             # discs at parity 0 relative to root
    flip1: int
    twisted: bool          # an orientation contradiction occurred


class CancellationDiagrams:
    """Minimal-genus search over letter matchings of the coefficient discs."""

    def __init__(self, coefficients: Sequence[Word], kind: str):
        self.kind = kind
        self.discs = [w for w in coefficients]
        for w in self.discs:
            if len(w) == 0 or not w.is_cyclically_reduced():
                raise SolverError("coefficients must be nonempty and cyclically reduced")
        self.positions: list[tuple[int, int]] = [
            (d, i) for d, w in enumerate(self.discs) for i in range(len(w))
        ]
        self.letter = {p: self.discs[p[0]][p[1]] for p in self.positions}
        self.pos_index = {p: k for k, p in enumerate(self.positions)}
        self.n = len(self.positions)
        self.total_edges = self.n // 2
        self.match: dict[tuple[int, int], tuple[int, int]] = {}

    # corners are indexed like positions: corner k sits before letter k of its disc
    def _corner(self, d: int, i: int) -> int:
        return self.pos_index[(d, i % len(self.discs[d]))]

    def balanced(self) -> bool:
        counts: dict[tuple[int, int], int] = {}
        for p in self.positions:
            g = self.letter[p]
            counts[(g.sym, g.sign)] = counts.get((g.sym, g.sign), 0) + 1
        if self.kind == ORIENTABLE:
            syms = {s for s, _ in counts}
            return all(counts.get((s, 1), 0) == counts.get((s, -1), 0) for s in syms)
        syms = {s for s, _ in counts}
        return all((counts.get((s, 1), 0) + counts.get((s, -1), 0)) % 2 == 0 for s in syms)

    def solvable_within(self, budget: int) -> bool:
        if self.n == 0:
            return budget >= 0
        if self.n % 2:
            return False
        if not self.balanced():
            return False

        corners = _UndoUF(self.n)
        disc_uf = _UndoUF(len(self.discs), parity=True)
        clusters: dict[int, _Cluster] = {
            disc_uf.find(d): _Cluster(
                discs=1,
                letters=len(w),
                unmatched=len(w),
                corners=len(w),
                flip0=1,
                flip1=0,
                twisted=False,
            )
            for d, w in enumerate(self.discs)
        }
        state = {"closed_cost": 0}
        order = sorted(self.positions)
        matched: set[tuple[int, int]] = set()

        def cluster_of(d: int) -> _Cluster:
            return clusters[disc_uf.find(d)]

        def component_cost(c: _Cluster) -> int:
            chi = c.corners - c.letters // 2 + c.discs
            if self.kind == ORIENTABLE:
                assert not c.twisted and c.flip1 == 0
                assert (2 - chi) % 2 == 0
                return (2 - chi) // 2
            if c.twisted:
                return 2 - chi
            h2 = 2 - chi
            assert h2 % 2 == 0
            if chi == 2:
                return 0 if (c.flip0 == 0 or c.flip1 == 0) else 1
            return h2 + 1  # orientable genus h >= 1: 2h + 1 crosscaps

        def open_lower_bound() -> int:
            open_v = sum(c.corners for c in clusters.values() if c.unmatched)
            open_e = sum(c.letters for c in clusters.values() if c.unmatched) // 2
            open_f = sum(c.discs for c in clusters.values() if c.unmatched)
            if open_f == 0:
                return 0
            chi_max = open_v - open_e + open_f
            raw = 2 - chi_max
            if self.kind == ORIENTABLE:
                return max(0, -(-raw // 2))  # ceil(raw / 2)
            return max(0, raw)

        def do_match(p: tuple[int, int], q: tuple[int, int]):
            """Glue positions p and q; returns an undo token or None on prune."""
            cm = corners.mark()
            dm = disc_uf.mark()
            gp, gq = self.letter[p], self.letter[q]
            same = gp.sign == gq.sign
            edge_parity = 1 if same else 0
            dp, dq = p[0], q[0]
            rp, rq = disc_uf.find(dp), disc_uf.find(dq)
            snapshot = {
                "rp": (rp, clusters.get(rp)),
                "rq": (rq, clusters.get(rq)),
                "state": dict(state),
                "merged_root": None,
            }
            if rp != rq:
                c1, c2 = clusters.pop(rp), clusters.pop(rq)
                disc_uf.union(dp, dq, edge_parity)
                root = disc_uf.find(dp)
                snapshot["merged_root"] = root
                # recompute flip counts relative to the new root
                merged = _Cluster(
                    discs=c1.discs + c2.discs,
                    letters=c1.letters + c2.letters,
                    unmatched=c1.unmatched + c2.unmatched,
                    corners=c1.corners + c2.corners,
                    flip0=0,
                    flip1=0,
                    twisted=c1.twisted or c2.twisted,
                )
                # parity bookkeeping: whichever old root got re-rooted has its
                # discs' parities shifted by its new parity-to-root
                sh1 = disc_uf.parity_to_root(rp)
                sh2 = disc_uf.parity_to_root(rq)
                f0 = (c1.flip0 if sh1 == 0 else c1.flip1) + (
                    c2.flip0 if sh2 == 0 else c2.flip1
                )
                f1 = (c1.flip1 if sh1 == 0 else c1.flip0) + (
                    c2.flip1 if sh2 == 0 else c2.flip0
                )
                merged.flip0, merged.flip1 = f0, f1
                clusters[root] = merged
                cl = merged
            else:
                cl = clusters[rp]
                if not disc_uf.consistent(dp, dq, edge_parity):
                    cl = _Cluster(**{**cl.__dict__})
                    cl.twisted = True
                    clusters[rp] = cl
                else:
                    cl = _Cluster(**{**cl.__dict__})
                    clusters[rp] = cl
            if self.kind == ORIENTABLE and cl.twisted:
                # cannot happen: orientable matchings only add parity-0 edges
                raise AssertionError("twist in orientable matching")

            # corner identifications
            (d1, i1), (d2, i2) = p, q
            n1, n2 = len(self.discs[d1]), len(self.discs[d2])
            if same:
                pairs = [
                    (self._corner(d1, i1), self._corner(d2, i2)),
                    (self._corner(d1, i1 + 1), self._corner(d2, i2 + 1)),
                ]
            else:
                pairs = [
                    (self._corner(d1, i1), self._corner(d2, i2 + 1)),
                    (self._corner(d1, i1 + 1), self._corner(d2, i2)),
                ]
            drop = 0
            for a, b in pairs:
                if corners.union(a, b):
                    drop += 1
            cl.corners -= drop
            cl.unmatched -= 2
            matched.add(p)
            matched.add(q)
            disc_unmatched[p[0]] -= 1
            disc_unmatched[q[0]] -= 1
            self.match[p] = q
            self.match[q] = p

            if cl.unmatched == 0:
                state["closed_cost"] += component_cost(cl)
            return (cm, dm, snapshot, p, q)

        def undo(token):
            cm, dm, snapshot, p, q = token
            corners.rollback(cm)
            matched.discard(p)
            matched.discard(q)
            disc_unmatched[p[0]] += 1
            disc_unmatched[q[0]] += 1
            del self.match[p]
            del self.match[q]
            rp, c1 = snapshot["rp"]
            rq, c2 = snapshot["rq"]
            if snapshot["merged_root"] is not None:
                clusters.pop(snapshot["merged_root"], None)
            disc_uf.rollback(dm)
            if rp != rq:
                if c1 is not None:
                    clusters[rp] = c1
                if c2 is not None:
                    clusters[rq] = c2
            else:
                if c1 is not None:
                    clusters[rp] = c1
            state.update(snapshot["state"])

        letter_ok = (
            (lambda a, b: a.sym == b.sym and a.sign == -b.sign)
            if self.kind == ORIENTABLE
            else (lambda a, b: a.sym == b.sym)
        )

        disc_unmatched = [len(w) for w in self.discs]

        def candidates(p: tuple[int, int]) -> list[tuple[int, int]]:
            gp = self.letter[p]
            return [
                q
                for q in order
                if q != p and q not in matched and letter_ok(gp, self.letter[q])
            ]

        def pick_pivot() -> tuple[int, int] | None:
            # first unmatched position: the pivot is a deterministic function
            # of the partial state, so each complete matching is generated
            # along exactly one path
            for p in order:
                if p not in matched:
                    return p
            return None

        def rec() -> bool:
            p = pick_pivot()
            if p is None:
                return state["closed_cost"] <= budget
            seen_untouched: set[tuple[tuple[Generator, ...], int]] = set()
            for q in candidates(p):
                # symmetry: identical wholly-unmatched discs are interchangeable
                dq = q[0]
                if dq != p[0] and all(
                    (dq, i) not in matched for i in range(len(self.discs[dq]))
                ):
                    key = (self.discs[dq].letters, q[1])
                    if key in seen_untouched:
                        continue
                    seen_untouched.add(key)
                token = do_match(p, q)
                if state["closed_cost"] + open_lower_bound() <= budget:
                    if rec():
                        return True
                undo(token)
            return False

        return rec()

    def min_genus(self, cutoff: int) -> int | None:
        for g in range(cutoff + 1):
            if self.solvable_within(g):
                return g
        return None


def _normalized_discs(form: StandardForm) -> list[Word]:
    """Cyclically reduced, nontrivial coefficient discs of a standard form.

    Conjugators absorb the cyclic reduction of each C_j; the whole equation
    may be conjugated, which cyclically reduces C.  The tuple's last entry is
    C^-1... no: the equation reads prod(...) * C = 1, so the discs are
    C_1..C_{m-1} and C itself (a cancellation diagram of the full left side).
    """
    discs = []
    for c in form.coefficients:
        core, _ = c.cyclic_reduce()
        if len(core):
            discs.append(core)
    core, _ = form.tail.cyclic_reduce()
    if len(core):
        discs.append(core)
    return discs


def form_solvable(form: StandardForm) -> bool:
    """Complete decision at the form's own genus."""
    discs = _normalized_discs(form)
    diag = CancellationDiagrams(discs, form.kind)
    return diag.solvable_within(form.genus)


def form_min_genus(form: StandardForm, cutoff: int | None = None) -> int | None:
    discs = _normalized_discs(form)
    if cutoff is None:
        cutoff = sum(len(d) for d in discs) // 2 + 1
    diag = CancellationDiagrams(discs, form.kind)
    return diag.min_genus(cutoff)


# --- the solver -----------------------------------------------------------------


@dataclass(frozen=True)
class SolveResult:
    status: str  # "sat" | "unsat" | "bound_exceeded"
    witness: dict[str, Word] | None
    bound_used: int
    detail: str = ""

    @property
    def satisfiable(self) -> bool:
        return self.status == "sat"


def default_bound(form: StandardForm) -> int:
    """The cited minimal-solution bounds: 2s orientable, 12 s^4 otherwise."""
    s = sum(len(c) for c in form.coefficients) + len(form.tail)
    if form.kind == ORIENTABLE:
        return max(1, 2 * s)
    return max(1, 12 * s ** 4)


def _decouple(system: EquationSystem) -> tuple[list[Word], list[tuple[int, Word]], bool]:
    """Eliminate variables occurring in two different relators.

    Returns (independent relators, eliminations in order, trivially_unsat).
    Each elimination (sym, expr) defines that variable in terms of later
    material; evaluate in reverse order when rebuilding witnesses.
    """
    relators = [eq.relator() for eq in system.equations]
    nc = system.n_constants
    elim: list[tuple[int, Word]] = []
    while True:
        owner: dict[int, list[int]] = {}
        for idx, r in enumerate(relators):
            for g in r:
                if g.sym >= nc:
                    owner.setdefault(g.sym, []).append(idx)
        shared = None
        for sym, idxs in owner.items():
            uniq = sorted(set(idxs))
            if len(uniq) == 2:
                shared = (sym, uniq[0], uniq[1])
                break
        if shared is None:
            break
        sym, i, j = shared
        r = relators[i]
        pos = [k for k, g in enumerate(r) if g.sym == sym]
        assert len(pos) == 1, "shared variable must occur once per relator"
        k = pos[0]
        u, v = r.subword(0, k), r.subword(k + 1, len(r))
        img = u.inverse() * v.inverse()
        if r[k].sign < 0:
            img = img.inverse()
        elim.append((sym, img))
        relators[j] = substitute(relators[j], {sym: img})
        del relators[i]
    out = []
    unsat = False
    for r in relators:
        if all(g.sym < nc for g in r):
            if len(r):
                unsat = True
            continue
        out.append(r)
    return out, elim, unsat


def solve_quadratic(
    system: EquationSystem,
    bound: int | None = None,
) -> SolveResult:
    """Decide a quadratic system; SAT answers carry verified witnesses.

    UNSAT verdicts are complete (diagram search is finite); the bound only
    caps the witness search, defaulting to the cited free-group bounds.
    """
    if not system.is_quadratic():
        raise SolverError("system is not quadratic")
    relators, elim, unsat = _decouple(system)
    if unsat:
        return SolveResult("unsat", None, bound or 0, "constant relator is nontrivial")

    assignment: dict[int, Word] = {}
    used_bound = 0
    for rel in relators:
        rel_vars = sorted({g.sym for g in rel if g.sym >= system.n_constants})
        names = tuple(system.var_name(s) for s in rel_vars)
        remap = {s: system.n_constants + i for i, s in enumerate(rel_vars)}
        rel_local = Word(
            Generator(remap.get(g.sym, g.sym), g.sign) for g in rel
        )
        sub = EquationSystem(system.gens, names, (Equation(rel_local),))
        nz = standardize(sub)
        if not form_solvable(nz.form):
            return SolveResult("unsat", None, bound or 0, "no cancellation diagram")
        b = bound if bound is not None else default_bound(nz.form)
        used_bound = max(used_bound, b)
        found = None
        for ell in range(b + 1):
            found = is_satisfiable(nz.system, SearchBound(ell))
            if found is not None:
                break
        if found is None:
            return SolveResult(
                "bound_exceeded", None, b,
                "diagram is solvable but no witness within the bound",
            )
        back = nz.to_original(found)
        for name, w in back.items():
            assignment[system.var_sym(name)] = w

    # free variables and eliminated ones
    for name in system.variables:
        sym = system.var_sym(name)
        if sym not in assignment and sym not in {s for s, _ in elim}:
            assignment[sym] = Word()
    for sym, expr in reversed(elim):
        assignment[sym] = substitute(expr, assignment)

    witness = {system.var_name(s): w for s, w in assignment.items()}
    if not system.check(witness):
        raise AssertionError("internal: witness failed verification")
    return SolveResult("sat", witness, bound if bound is not None else used_bound)


# --- genus of tuples ---------------------------------------------------------------


@dataclass(frozen=True)
class GenusResult:
    solvable: bool
    witness: dict[str, Word] | None


def _tuple_form(coefficients: Sequence[Word], g: int, kind: str) -> StandardForm:
    if not coefficients:
        raise SolverError("need at least the final coefficient C")
    return StandardForm(
        kind=kind,
        genus=g,
        coefficients=tuple(coefficients[:-1]),
        tail=coefficients[-1],
    )


def _genus_at(
    coefficients: Sequence[Word], g: int, kind: str, gens: tuple[str, ...],
    want_witness: bool,
) -> GenusResult:
    form = _tuple_form(coefficients, g, kind)
    if not form_solvable(form):
        return GenusResult(False, None)
    if not want_witness:
        return GenusResult(True, None)
    sysm = form.system(gens)
    b = default_bound(form)
    for ell in range(b + 1):
        sol = is_satisfiable(sysm, SearchBound(ell))
        if sol is not None:
            assert sysm.check(sol)
            return GenusResult(True, sol)
    raise SolverError("diagram solvable but witness search exhausted the bound")


def genus_orientable(
    coefficients: Sequence[Word], g: int, gens: tuple[str, ...],
    want_witness: bool = True,
) -> GenusResult:
    """Is the orientable-form equation solvable at genus g?"""
    if g < 0:
        raise SolverError("genus must be >= 0")
    return _genus_at(coefficients, g, ORIENTABLE, gens, want_witness)


def genus_nonorientable(
    coefficients: Sequence[Word], g: int, gens: tuple[str, ...],
    want_witness: bool = True,
) -> GenusResult:
    """Is the non-orientable-form equation solvable at genus g (g >= 1)?"""
    if g < 1:
        raise SolverError("non-orientable genus must be >= 1")
    return _genus_at(coefficients, g, NONORIENTABLE, gens, want_witness)


def tuple_genus(
    coefficients: Sequence[Word], kind: str, gens: tuple[str, ...],
    cutoff: int | None = None,
) -> int | None:
    """Least solvable genus, or None up to the cutoff.

    Cutoff defaults to total coefficient length / 2 + 1; the diagram model
    never needs more (costs are bounded by the letter count), and for
    non-orientable forms the search starts at 1.
    """
    s = sum(len(c) for c in coefficients)
    if cutoff is None:
        cutoff = s // 2 + 1
    start = 0 if kind == ORIENTABLE else 1
    form0 = _tuple_form(coefficients, 0, kind)
    discs = _normalized_discs(form0)
    diag = CancellationDiagrams(discs, kind)
    for g in range(start, cutoff + 1):
        if diag.solvable_within(g):
            return g
    return None
