"""Normalization of a single quadratic equation to standard form.

Standard forms over F(A) with coefficients C_1..C_{m-1}, C:

    orientable:      [x_1,y_1]...[x_g,y_g] z_1^-1 C_1 z_1 ... z_{m-1}^-1 C_{m-1} z_{m-1} C = 1
    non-orientable:  x_1^2 ... x_g^2       z_1^-1 C_1 z_1 ... z_{m-1}^-1 C_{m-1} z_{m-1} C = 1

The normalizer applies invertible substitutions (plus rotations, which do not
touch solutions) to the equation word:

* square collection:   A x B x C        -> A x^2 B^-1 C        via x -> x B^-1
* handle collection:   x A y B x^-1 C y^-1 D -> (CB) x y x^-1 y^-1 (AD)
* block slides:        D Z E            -> Z D E               via z -> D^-1 z D
* crosscap absorption: w^2 x y x^-1 y^-1    -> w^2 y'^2 x'^2   (seven moves)

Each substitution is recorded, so solutions transport in both directions;
every variable occurring in the input occurs exactly twice (quadraticity) and
the moves preserve that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .equations import EquationError, EquationSystem, Equation
from .words import Generator, Word, substitute

ORIENTABLE = "orientable"
NONORIENTABLE = "nonorientable"

_MAX_STEPS = 10_000


class StandardizeError(ValueError):
    pass


@dataclass(frozen=True)
class StandardForm:
    """Shape data of a normalized quadratic equation."""

    kind: str
    genus: int
    coefficients: tuple[Word, ...]  # C_1 .. C_{m-1}, over the constant alphabet
    tail: Word                      # C

    @property
    def n_conjugators(self) -> int:
        return len(self.coefficients)

    def variable_names(self, gens: tuple[str, ...]) -> tuple[list[str], list[str]]:
        """Canonical (genus vars, conjugators), dodging generator names."""
        taken = set(gens)

        def fresh(base: str) -> str:
            name = base
            while name in taken:
                name += "_"
            taken.add(name)
            return name

        genus_names: list[str] = []
        if self.kind == ORIENTABLE:
            for i in range(self.genus):
                genus_names.append(fresh(f"x{i+1}"))
                genus_names.append(fresh(f"y{i+1}"))
        else:
            for i in range(self.genus):
                genus_names.append(fresh(f"x{i+1}"))
        conj_names = [fresh(f"z{j+1}") for j in range(self.n_conjugators)]
        return genus_names, conj_names

    def system(self, gens: tuple[str, ...]) -> EquationSystem:
        """The standard equation as a one-equation system over fresh names."""
        genus_names, conj_names = self.variable_names(gens)
        names = tuple(genus_names + conj_names)
        sys = EquationSystem(gens, names, ())
        al = sys.alphabet
        w = Word()
        if self.kind == ORIENTABLE:
            for i in range(self.genus):
                x, y = al.gen(genus_names[2 * i]), al.gen(genus_names[2 * i + 1])
                w = w * Word((x.inv(), y.inv(), x, y))
        else:
            for i in range(self.genus):
                x = al.gen(genus_names[i])
                w = w * Word((x, x))
        for j, c in enumerate(self.coefficients):
            z = al.gen(conj_names[j])
            w = w * Word((z.inv(),)) * c * Word((z,))
        w = w * self.tail
        return EquationSystem(gens, names, (Equation(w),))


def standard_form_system(form: StandardForm, gens: tuple[str, ...]) -> EquationSystem:
    return form.system(gens)


@dataclass
class Normalization:
    """Standardization result with two-way solution transport.

    ``to_original`` evaluates a solution of the standard-form system back to
    the input equation's variables; ``to_standard`` pushes an input solution
    onto the standard form.  Both directions are exact (substitution records).
    """

    original: EquationSystem
    form: StandardForm
    system: EquationSystem  # the standard equation over canonical names
    _fwd: dict[int, Word]          # original var sym -> word over final internal syms
    _bwd: dict[int, Word]          # internal var sym -> word over original var syms
    _out_names: dict[int, str]     # final internal sym -> canonical output name

    def to_original(self, assignment: Mapping[str, Word]) -> dict[str, Word]:
        by_sym: dict[int, Word] = {}
        name_to_out = {n: s for s, n in self._out_names.items()}
        for name, w in assignment.items():
            if name not in name_to_out:
                raise StandardizeError(f"unknown standard-form variable {name!r}")
            # translate the value (over gens + output vars) to internal syms
            out_sys = self.system
            conv = []
            for g in w:
                if g.sym < out_sys.n_constants:
                    conv.append(g)
                else:
                    conv.append(Generator(name_to_out[out_sys.var_name(g.sym)], g.sign))
            by_sym[name_to_out[name]] = Word(conv)
        out: dict[str, Word] = {}
        for name in self.original.variables:
            sym = self.original.var_sym(name)
            expr = self._fwd[sym]
            out[name] = substitute(expr, by_sym)
        # variables that vanished entirely default to the identity
        for name, w in out.items():
            if any(g.sym >= self.original.n_constants for g in w):
                out[name] = substitute(w, {g.sym: Word() for g in w
                                           if g.sym >= self.original.n_constants})
        return out

    def to_standard(self, assignment: Mapping[str, Word]) -> dict[str, Word]:
        by_sym = {self.original.var_sym(n): w for n, w in assignment.items()}
        out: dict[str, Word] = {}
        for sym, name in self._out_names.items():
            expr = self._bwd[sym]
            val = substitute(expr, by_sym)
            if any(g.sym >= self.original.n_constants for g in val):
                val = substitute(val, {g.sym: Word() for g in val
                                       if g.sym >= self.original.n_constants})
            out[name] = val
        return out


class _Normalizer:
    def __init__(self, system: EquationSystem):
        if len(system.equations) != 1:
            raise StandardizeError("standardize expects a single equation")
        counts = {}
        rel = system.equations[0].relator()
        for g in rel:
            if g.sym >= system.n_constants:
                counts[g.sym] = counts.get(g.sym, 0) + 1
        if any(c != 2 for c in counts.values()):
            raise StandardizeError("equation is not quadratic")
        self.sys = system
        self.nc = system.n_constants
        self.word = rel
        self.fwd = {s: Word((Generator(s, 1),)) for s in system.var_syms}
        self.bwd = {s: Word((Generator(s, 1),)) for s in system.var_syms}
        self.steps = 0
        self._cyclic_reduce()

    # --- primitive moves ------------------------------------------------------

    def _tick(self):
        self.steps += 1
        if self.steps > _MAX_STEPS:
            raise AssertionError("normalization did not terminate")

    def _cyclic_reduce(self):
        w = self.word
        while len(w) >= 2 and w[0] == w[-1].inv():
            w = w.subword(1, len(w) - 1)
        self.word = w

    def subst(self, mapping: dict[int, Word], inverse: dict[int, Word]):
        """Apply an invertible substitution; update word and transport maps."""
        self._tick()
        self.word = substitute(self.word, mapping)
        self.fwd = {s: substitute(w, mapping) for s, w in self.fwd.items()}
        new_bwd = dict(self.bwd)
        for sym, inv_img in inverse.items():
            new_bwd[sym] = substitute(inv_img, self.bwd)
        self.bwd = new_bwd
        self._cyclic_reduce()

    def subst1(self, sym: int, image: Word, inverse_image: Word):
        self.subst({sym: image}, {sym: inverse_image})

    def flip(self, sym: int):
        g = Word((Generator(sym, -1),))
        self.subst1(sym, g, g)

    def rotate(self, k: int):
        self._tick()
        w = self.word
        self.word = Word._raw(w.letters[k:] + w.letters[:k])
        self._cyclic_reduce()

    def conjugate_block(self, syms: set[int], d: Word):
        """z -> d^-1 z d for each block variable: slides a contiguous all-
        variable block (square or handle) left over the segment d."""
        if not len(d) or not syms:
            return
        mapping = {}
        inverse = {}
        for s in syms:
            v = Word((Generator(s, 1),))
            mapping[s] = d.inverse() * v * d
            inverse[s] = d * v * d.inverse()
        self.subst(mapping, inverse)

    def slide_conj_block(self, sym: int, d: Word):
        """x -> x d slides a coefficient block x^-1 K x left over d
        (the constant interior K must stay outside the substitution)."""
        if not len(d):
            return
        v = Word((Generator(sym, 1),))
        self.subst1(sym, v * d, v * d.inverse())

    # --- scanning helpers -------------------------------------------------------

    def occurrences(self, sym: int) -> list[int]:
        return [i for i, g in enumerate(self.word) if g.sym == sym]

    def var_syms_present(self) -> list[int]:
        return sorted({g.sym for g in self.word if g.sym >= self.nc})

    def segment(self, i: int, j: int) -> Word:
        return self.word.subword(i, j)

    # --- block recognition --------------------------------------------------------

    def blocks(self) -> tuple[list[tuple[int, int]], list[tuple[int, int, int]], dict[int, tuple[int, int]]]:
        """Recognize closed blocks in the current word.

        Returns (squares, handles, spans): squares as (sym, pos); handles as
        (sym1, sym2, pos); spans maps each closed var to its block extent.
        """
        w = self.word
        squares: list[tuple[int, int]] = []
        handles: list[tuple[int, int, int]] = []
        spans: dict[int, tuple[int, int]] = {}
        i = 0
        n = len(w)
        while i < n:
            g = w[i]
            if g.sym >= self.nc:
                if (
                    i + 3 < n
                    and w[i + 2].sym == g.sym
                    and w[i + 2].sign == -g.sign
                    and w[i + 1].sym >= self.nc
                    and w[i + 3].sym == w[i + 1].sym
                    and w[i + 3].sign == -w[i + 1].sign
                    and w[i + 1].sym != g.sym
                ):
                    handles.append((g.sym, w[i + 1].sym, i))
                    spans[g.sym] = (i, i + 4)
                    spans[w[i + 1].sym] = (i, i + 4)
                    i += 4
                    continue
                if i + 1 < n and w[i + 1] == g:
                    squares.append((g.sym, i))
                    spans[g.sym] = (i, i + 2)
                    i += 2
                    continue
            i += 1
        return squares, handles, spans

    def conj_blocks(self) -> list[tuple[int, int, int]]:
        """Closed conjugated-coefficient blocks x^-1 K x: (sym, start, end)."""
        out = []
        w = self.word
        for s in self.var_syms_present():
            occ = self.occurrences(s)
            if len(occ) != 2:
                continue
            i, j = occ
            if w[i].sign == -1 and w[j].sign == 1 and w[i].sym == w[j].sym:
                if all(self.nc > w[k].sym for k in range(i + 1, j)):
                    out.append((s, i, j + 1))
        return out

    # --- phases -----------------------------------------------------------------

    def collect_squares(self):
        while True:
            target = None
            for s in self.var_syms_present():
                occ = self.occurrences(s)
                if len(occ) != 2:
                    continue
                i, j = occ
                if self.word[i].sign == self.word[j].sign and j > i + 1:
                    target = (s, i, j)
                    break
            if target is None:
                return
            s, i, j = target
            if self.word[i].sign == -1:
                self.flip(s)
                i, j = self.occurrences(s)
            b = self.segment(i + 1, j)
            x = Word((Generator(s, 1),))
            self.subst1(s, x * b.inverse(), x * b)

    def _find_linked(self) -> tuple[int, int] | None:
        w = self.word
        _, _, spans = self.blocks()
        for s in self.var_syms_present():
            if s in spans:
                continue  # already sits in a collected block
            occ = self.occurrences(s)
            if len(occ) != 2:
                continue
            i, j = occ
            if w[i].sign == w[j].sign:
                continue  # same-sign pair (square phase handles these)
            for k in range(i + 1, j):
                g = w[k]
                if g.sym < self.nc or g.sym == s or g.sym in spans:
                    continue
                other = [t for t in self.occurrences(g.sym) if t != k]
                if other and not (i < other[0] < j):
                    return s, g.sym
        return None

    def collect_handles(self):
        while True:
            pair = self._find_linked()
            if pair is None:
                return
            x, y = pair
            # sign flips act in place, so positions survive them
            occ = self.occurrences(x)
            if self.word[occ[0]].sign == -1:
                self.flip(x)
            i1, _i2 = self.occurrences(x)
            self.rotate(i1)
            occ = self.occurrences(x)
            assert occ[0] == 0 and self.word[0].sign == 1
            ys = [k for k in self.occurrences(y) if 0 < k < occ[1]]
            assert len(ys) == 1, "linked partner must sit inside the gap"
            k = ys[0]
            if self.word[k].sign == -1:
                self.flip(y)
            # word = x A y B x^-1 C y^-1 D
            i2 = self.occurrences(x)[1]
            j2 = [t for t in self.occurrences(y) if t != k][0]
            assert k < i2 < j2
            a = self.segment(1, k)
            yw = Word((Generator(y, 1),))
            xw = Word((Generator(x, 1),))
            if len(a):
                self.subst1(y, a.inverse() * yw, a * yw)
            # word = x y B x^-1 C y^-1 D'
            k = self.occurrences(y)[0]
            i2 = self.occurrences(x)[1]
            b = self.segment(k + 1, i2)
            if len(b):
                self.subst1(y, yw * b.inverse(), yw * b)
            # word = x y x^-1 (CB) y^-1 D'
            i2 = self.occurrences(x)[1]
            j2 = self.occurrences(y)[1]
            cb = self.segment(i2 + 1, j2)
            if len(cb):
                self.subst1(x, cb * xw, cb.inverse() * xw)
            # word = (CB) x y x^-1 y^-1 (AD)

    def absorb_handles_into_squares(self):
        """Non-orientable cleanup: w^2 [x,y]-block -> three squares."""
        while True:
            squares, handles, _ = self.blocks()
            if not handles or not squares:
                return
            v, vpos = squares[0]
            if self.word[vpos].sign == -1:
                self.flip(v)
                squares, handles, _ = self.blocks()
                v, vpos = squares[0]
            # slide the square to the front
            self.conjugate_block({v}, self.segment(0, vpos))
            squares, handles, _ = self.blocks()
            p, q, hpos = handles[0]
            # slide the handle right behind the square
            self.conjugate_block({p, q}, self.segment(2, hpos))
            w = self.word
            assert w[0].sym == v and w[1].sym == v
            assert w[2].sym == p and w[3].sym == q
            vw = Word((Generator(v, 1),))
            pw = Word((Generator(p, 1),))
            qw = Word((Generator(q, 1),))
            # seven-move script: v v p q p^-1 q^-1 R  ->  v^2 q^2 p^2 R
            self.subst1(v, vw * pw.inverse(), vw * pw)      # v p^-1 v q p^-1 q^-1 R
            self.flip(p)                                     # v p v q p q^-1 R
            i, j = self.occurrences(p)
            b = self.segment(i + 1, j)
            self.subst1(p, pw * b.inverse(), pw * b)         # v p p q^-1 v^-1 q^-1 R
            self.flip(q)                                     # v p p q v^-1 q R
            i, j = self.occurrences(q)
            b = self.segment(i + 1, j)
            self.subst1(q, qw * b.inverse(), qw * b)         # v p^2 q^2 v R
            i, j = self.occurrences(v)
            b = self.segment(i + 1, j)
            self.subst1(v, vw * b.inverse(), vw * b)         # v^2 (q^-2 p^-2) R
            self.flip(p)
            self.flip(q)

    def collect_coefficients(self):
        while True:
            _, _, spans = self.blocks()
            conj = {s for s, _i, _j in self.conj_blocks()}
            open_vars = [
                s for s in self.var_syms_present() if s not in spans and s not in conj
            ]
            if not open_vars:
                return
            # innermost open pair: no open-variable letters strictly inside
            target = None
            for s in open_vars:
                i, j = self.occurrences(s)
                inner_ok = True
                for k in range(i + 1, j):
                    g = self.word[k]
                    if g.sym >= self.nc and g.sym in open_vars:
                        inner_ok = False
                        break
                if inner_ok:
                    target = s
                    break
            assert target is not None, "open pairs must nest after handle collection"
            s = target
            # vacate closed blocks from the interior by sliding them to front
            while True:
                occ = self.occurrences(s)
                if len(occ) != 2:
                    break  # the pair cancelled away mid-slide
                i, j = occ
                _, _, spans = self.blocks()
                conj_list = self.conj_blocks()
                moved = False
                for cs, ci, cj in conj_list:
                    if i < ci and cj <= j:
                        self.slide_conj_block(cs, self.segment(0, ci))
                        moved = True
                        break
                if moved:
                    continue
                for bs, (bi, bj) in sorted(spans.items(), key=lambda kv: kv[1][0]):
                    if i < bi and bj <= j:
                        blockvars = {
                            t for t, sp in spans.items() if sp == (bi, bj)
                        }
                        self.conjugate_block(blockvars, self.segment(0, bi))
                        moved = True
                        break
                if not moved:
                    break
            occ = self.occurrences(s)
            if len(occ) != 2:
                continue  # the pair cancelled away; variable became free
            i, j = occ
            assert all(self.word[k].sym < self.nc for k in range(i + 1, j))
            if self.word[i].sign == 1:
                self.flip(s)

    def assemble(self) -> tuple[list[int], list[tuple[int, int]], list[tuple[int, Word]], Word]:
        """Slide blocks into canonical order; return the final layout."""
        squares, handles, _ = self.blocks()
        conj = self.conj_blocks()
        kind_nonor = bool(squares)
        assert not (squares and handles), "mixed blocks must be absorbed first"

        ordered_vars: list[int] = []
        prefix_len = 0

        def slide_to(pos_from: int, pos_to_len: int, syms: set[int]):
            d = self.segment(pos_to_len, pos_from)
            self.conjugate_block(syms, d)

        if kind_nonor:
            order = sorted(s for s, _ in squares)
            for s in order:
                if self.word[self.occurrences(s)[0]].sign == -1:
                    self.flip(s)
                i = self.occurrences(s)[0]
                slide_to(i, prefix_len, {s})
                prefix_len += 2
                ordered_vars.append(s)
            genus_vars = [(s, -1) for s in order]
        else:
            order = sorted(handles, key=lambda h: min(h[0], h[1]))
            genus_vars = []
            for p, q, _ in order:
                _, hs, _ = self.blocks()
                pos = [h[2] for h in hs if {h[0], h[1]} == {p, q}][0]
                slide_to(pos, prefix_len, {p, q})
                # normalize to the commutator shape x^-1 y^-1 x y
                p = self.word[prefix_len].sym
                q = self.word[prefix_len + 1].sym
                if self.word[prefix_len].sign == 1:
                    self.flip(p)
                if self.word[prefix_len + 1].sign == 1:
                    self.flip(q)
                prefix_len += 4
                ordered_vars += [p, q]
                genus_vars.append((p, q))

        coeff_list: list[tuple[int, Word]] = []
        placed: set[int] = set(ordered_vars)
        while True:
            # re-scan every round: slides can cancel or re-expose pairs
            pending = []
            for s in self.var_syms_present():
                if s in placed:
                    continue
                occ = self.occurrences(s)
                if len(occ) != 2:
                    continue
                i, j = occ
                if all(self.word[k].sym < self.nc for k in range(i + 1, j)):
                    pending.append((s, i, j))
            if not pending:
                break
            s, i, j = min(pending)
            if self.word[i].sign == 1:
                self.flip(s)
            i, j = self.occurrences(s)
            self.slide_conj_block(s, self.segment(prefix_len, i))
            i2, j2 = self.occurrences(s)
            assert i2 == prefix_len
            coeff_list.append((s, self.segment(i2 + 1, j2)))
            prefix_len = j2 + 1
            ordered_vars.append(s)
            placed.add(s)

        tail = self.segment(prefix_len, len(self.word))
        assert all(g.sym < self.nc for g in tail), "tail must be constant"
        return ordered_vars, genus_vars, coeff_list, tail


def standardize(system: EquationSystem) -> Normalization:
    """Normalize a one-equation quadratic system to its standard form.

    Returns the form, the canonical standard system, and exact two-way
    solution transport.  The kind is non-orientable exactly when some
    variable occurs twice with the same sign (a square survives).
    """
    nz = _Normalizer(system)
    nz.collect_squares()
    nz.collect_handles()
    nz.absorb_handles_into_squares()
    nz.collect_coefficients()
    # a late square can appear if coefficient collection freed something: rerun
    for _ in range(3):
        squares, handles, _ = nz.blocks()
        if handles and squares:
            nz.absorb_handles_into_squares()
        else:
            break
    ordered, genus_vars, coeff_list, tail = nz.assemble()

    squares, handles, _ = nz.blocks()
    kind = NONORIENTABLE if squares else ORIENTABLE
    genus = len(squares) if squares else len(handles)
    form = StandardForm(
        kind=kind,
        genus=genus,
        coefficients=tuple(k for _s, k in coeff_list),
        tail=tail,
    )
    out_sys = form.system(system.gens)

    # canonical names for the surviving internal variables, in layout order
    genus_names, conj_names = form.variable_names(system.gens)
    out_names: dict[int, str] = {}
    if kind == ORIENTABLE:
        for i, (p, q) in enumerate(genus_vars):
            out_names[p] = genus_names[2 * i]
            out_names[q] = genus_names[2 * i + 1]
    else:
        for i, (s, _) in enumerate(genus_vars):
            out_names[s] = genus_names[i]
    for j, (s, _k) in enumerate(coeff_list):
        out_names[s] = conj_names[j]

    # sanity: rebuilding the final word from the form matches the normalizer
    rebuilt = out_sys.equations[0].relator()
    translated = []
    for g in nz.word:
        if g.sym < nz.nc:
            translated.append(g)
        else:
            translated.append(Generator(out_sys.var_sym(out_names[g.sym]), g.sign))
    assert Word(translated) == rebuilt, "assembled word must equal the standard shape"

    return Normalization(
        original=system,
        form=form,
        system=out_sys,
        _fwd=nz.fwd,
        _bwd=nz.bwd,
        _out_names=out_names,
    )
