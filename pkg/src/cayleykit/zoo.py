"""Built-in group models: presentations plus exact word-problem oracles.

Every model couples a presentation (where one exists) with a solver that
produces canonical normal forms, and optionally an exact word-metric
formula.  One-endedness and sci-candidacy are metadata, not computed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

from .errors import OracleError, PreconditionError
from .presentation import (
    GroupPresentation,
    DehnTable,
    is_trivial as dehn_is_trivial,
    presentation_from_strings,
)
from .rewriting import CompletionBudget, RewritingSystem, knuth_bendix_complete
from .words import Word, free_multiply, free_reduce, invert, word_key


class Solver:
    """Word-problem strategy yielding canonical normal forms.

    Invariants: nf is idempotent; nf(w) is empty iff w represents the
    identity; equal elements have letter-identical normal forms.
    """

    strategy = "oracle"
    normal_form_kind = ""
    exact_key = True

    def nf(self, word: Sequence[int]) -> Word:
        raise NotImplementedError

    def key(self, word: Sequence[int]):
        return self.nf(word)

    def is_trivial(self, word: Sequence[int]) -> bool:
        return self.key(word) == self.key(())


@dataclass
class GroupModel:
    name: str
    presentation: Optional[GroupPresentation]
    solver: Solver
    dist_formula: Optional[Callable[[Sequence[int]], int]] = None
    one_ended: bool = False
    sci_candidate: bool = False
    finitely_presented: bool = True
    lattice_dims: Optional[int] = None
    planar_winding: bool = False
    involutive: bool = False
    growth_ratio: float = 2.0

    @property
    def alphabet(self):
        if self.presentation is not None:
            return self.presentation.alphabet
        return self._alphabet

    @property
    def n_generators(self) -> int:
        return len(self.alphabet)

    def estimate_ball(self, radius: int) -> int:
        """Vertex-count estimate used for budget refusals (exact for lattices)."""
        if self.lattice_dims:
            return self._l1_ball(self.lattice_dims, radius)
        first = self.n_generators if self.involutive else 2 * self.n_generators
        total = 1.0
        sphere = float(first)
        for _ in range(radius):
            total += sphere
            sphere *= self.growth_ratio
        return int(total)

    @staticmethod
    def _l1_ball(d: int, radius: int) -> int:
        from math import comb

        return sum(comb(d, k) * 2**k * comb(radius, k) for k in range(d + 1))


# ---------------------------------------------------------------------------
# Free abelian lattices


class ZdSolver(Solver):
    normal_form_kind = "sorted exponent word a^e1 b^e2 ..."

    def __init__(self, d: int):
        self.d = d

    def exponents(self, word: Sequence[int]) -> Tuple[int, ...]:
        e = [0] * self.d
        for l in word:
            e[abs(l) - 1] += 1 if l > 0 else -1
        return tuple(e)

    def key(self, word):
        return self.exponents(word)

    def nf(self, word):
        out = []
        for i, e in enumerate(self.exponents(word), start=1):
            out.extend([i if e > 0 else -i] * abs(e))
        return tuple(out)


def _zd_model(d: int) -> GroupModel:
    if d < 1:
        raise PreconditionError("Zd requires d >= 1")
    names = [chr(ord("a") + i) for i in range(d)] if d <= 26 else [f"x{i}" for i in range(d)]
    rels = []
    for i in range(d):
        for j in range(i + 1, d):
            a, b = names[i], names[j]
            rels.append(a + b + a[0].upper() + a[1:] + b[0].upper() + b[1:])
    pres = presentation_from_strings(f"Z{d}", names, rels)
    solver = ZdSolver(d)
    return GroupModel(
        name=f"Zd({d})",
        presentation=pres,
        solver=solver,
        dist_formula=lambda w: sum(abs(e) for e in solver.exponents(w)),
        one_ended=d >= 2,
        sci_candidate=d >= 2,
        lattice_dims=d,
        planar_winding=d == 2,
        growth_ratio=1.5,
    )


class Zd2DiagSolver(Solver):
    """Z^2 with generating set {a, b, ab}; used for quasi-isometry checks."""

    normal_form_kind = "a^p b^q c^k with c the diagonal"

    def exponents(self, word):
        m = n = 0
        for l in word:
            s = 1 if l > 0 else -1
            g = abs(l)
            if g == 1:
                m += s
            elif g == 2:
                n += s
            else:
                m += s
                n += s
        return (m, n)

    def key(self, word):
        return self.exponents(word)

    def nf(self, word):
        m, n = self.exponents(word)
        if m * n > 0:
            s = 1 if m > 0 else -1
            k = min(abs(m), abs(n))
            m -= s * k
            n -= s * k
        else:
            k = 0
            s = 1
        out = []
        out.extend([1 if m > 0 else -1] * abs(m))
        out.extend([2 if n > 0 else -2] * abs(n))
        out.extend([3 * s] * k)
        return tuple(out)


def _zd2_diag_model() -> GroupModel:
    pres = presentation_from_strings("Z2diag", ["a", "b", "c"], ["abAB", "cBA"])
    solver = Zd2DiagSolver()

    def dist(word):
        m, n = solver.exponents(word)
        if m * n >= 0:
            return max(abs(m), abs(n))
        return abs(m) + abs(n)

    return GroupModel(
        name="zd2_diag",
        presentation=pres,
        solver=solver,
        dist_formula=dist,
        one_ended=True,
        sci_candidate=False,
        growth_ratio=1.6,
    )


# ---------------------------------------------------------------------------
# Free groups


class FreeSolver(Solver):
    normal_form_kind = "freely reduced word"

    def nf(self, word):
        return free_reduce(word)


def _free_model(k: int) -> GroupModel:
    if k < 1:
        raise PreconditionError("free requires k >= 1")
    names = [chr(ord("a") + i) for i in range(k)] if k <= 26 else [f"x{i}" for i in range(k)]
    pres = presentation_from_strings(f"F{k}", names, [])
    return GroupModel(
        name=f"free({k})",
        presentation=pres,
        solver=FreeSolver(),
        dist_formula=lambda w: len(free_reduce(w)),
        one_ended=False,
        sci_candidate=False,
        growth_ratio=2 * k - 1,
    )


# ---------------------------------------------------------------------------
# Genus-2 surface group (C'(1/6), Dehn strategy with invariant buckets)


class SurfaceSolver(Solver):
    """Dehn's algorithm for the octagon presentation.

    Equality is decided exactly by cyclic Dehn reduction.  Ball
    deduplication uses invariant buckets: the abelianization in Z^4 plus
    two free-group images (a,b,c,d) -> (x,y,y,x) and (x,x,y,y); bucket
    collisions fall back to the exact oracle.  Canonical normal forms are
    shortlex-least geodesic words, materialized lazily from a cached ball.
    """

    strategy = "dehn"
    normal_form_kind = "shortlex-least geodesic word"
    exact_key = False

    PHI = {1: 1, 2: 2, 3: 2, 4: 1}
    PSI = {1: 1, 2: 1, 3: 2, 4: 2}

    def __init__(self, presentation: GroupPresentation):
        self.presentation = presentation
        self._table = DehnTable(presentation)
        self._nf_cache = None
        self._model: Optional[GroupModel] = None

    def is_trivial(self, word):
        return dehn_is_trivial(self.presentation, word, _table=self._table)

    def equal(self, w1, w2) -> bool:
        return self.is_trivial(free_multiply(w1, invert(w2)))

    def bucket_start(self):
        return ((0, 0, 0, 0), (), ())

    def bucket_step(self, state, letter):
        ab, phi, psi = state
        s = 1 if letter > 0 else -1
        g = abs(letter)
        ab = tuple(ab[i] + (s if i == g - 1 else 0) for i in range(4))
        phi = free_multiply(phi, (s * self.PHI[g],))
        psi = free_multiply(psi, (s * self.PSI[g],))
        return (ab, phi, psi)

    def bucket_key(self, word):
        state = self.bucket_start()
        for l in word:
            state = self.bucket_step(state, l)
        return state

    def nf(self, word, max_vertices: int = 400_000):
        """Shortlex-least geodesic representative via a cached ball."""
        w = free_reduce(word)
        if not w:
            return ()
        if self.is_trivial(w):
            return ()
        from .presentation import dehn_reduce

        short = dehn_reduce(self.presentation, w)
        radius = len(short)
        from .cayley import build_ball

        if self._nf_cache is None or self._nf_cache.radius < radius:
            self._nf_cache = build_ball(self._model, radius, max_vertices=max_vertices)
        ball = self._nf_cache
        vid = ball.vertex_for_word(short)
        if vid is None:
            raise OracleError("normal form lookup fell outside the cached ball")
        return ball.words[vid]


def _surface_model() -> GroupModel:
    pres = presentation_from_strings("surface2", ["a", "b", "c", "d"], ["abABcdCD"])
    solver = SurfaceSolver(pres)
    model = GroupModel(
        name="surface2",
        presentation=pres,
        solver=solver,
        one_ended=True,
        sci_candidate=True,
        growth_ratio=7.0,
    )
    solver._model = model
    return model


# ---------------------------------------------------------------------------
# Right-angled Coxeter groups


class RewritingSolver(Solver):
    strategy = "rewriting"
    normal_form_kind = "shortlex-least word (confluent rewriting)"

    def __init__(self, system: RewritingSystem):
        if not system.confluent:
            raise OracleError("rewriting solver requires a confluent system")
        self.system = system

    def nf(self, word):
        return self.system.rewrite(word)


def _racg_model(spec: str) -> GroupModel:
    """racg(graph): vertices commute along edges; every generator is an involution.

    ``spec`` is either the preset name ``pentagon`` or an edge list like
    ``1-2,2-3,3-1`` on vertices 1..n.
    """
    if spec in ("pentagon", "c5", "C5"):
        n = 5
        edges = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]
        one_ended = True
    else:
        edges = []
        n = 0
        for chunk in spec.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            try:
                i, j = (int(x) for x in chunk.split("-"))
            except ValueError as exc:
                raise PreconditionError(f"bad racg edge {chunk!r}") from exc
            if i == j:
                raise PreconditionError("racg graph has no loops")
            edges.append((min(i, j), max(i, j)))
            n = max(n, i, j)
        if n < 1:
            raise PreconditionError("racg graph needs at least one vertex")
        one_ended = False  # unknown in general; pentagon is the vetted zoo entry
    names = [f"s{i}" for i in range(1, n + 1)]
    rels = [f"s{i}s{i}" for i in range(1, n + 1)]
    for i, j in sorted(set(edges)):
        rels.append(f"s{i}s{j}s{i}s{j}")
    pres = presentation_from_strings(f"racg[{spec}]", names, rels)
    system = knuth_bendix_complete(
        pres, CompletionBudget(max_rules=4000, max_lhs_len=16, max_equations=400_000)
    )
    if not system.confluent:
        raise OracleError(
            f"racg({spec}): completion did not terminate; no normal form oracle"
        )
    solver = RewritingSolver(system)
    return GroupModel(
        name=f"racg({spec})",
        presentation=pres,
        solver=solver,
        dist_formula=lambda w: len(solver.nf(w)),
        one_ended=one_ended,
        sci_candidate=False,
        involutive=True,
        growth_ratio=2.7,
    )


# ---------------------------------------------------------------------------
# Baumslag-Solitar BS(1,2), by affine maps x -> 2^k x + q


class Bs12Solver(Solver):
    normal_form_kind = "t^p a^m t^-v with minimal v"

    def state(self, word) -> Tuple[int, Fraction]:
        k = 0
        q = Fraction(0)
        for l in word:
            g, s = abs(l), l > 0
            if g == 1:
                q += 1 if s else -1
            else:
                if s:
                    k += 1
                    q *= 2
                else:
                    k -= 1
                    q /= 2
        return (k, q)

    def key(self, word):
        k, q = self.state(word)
        return (k, q.numerator, q.denominator)

    def nf(self, word):
        k, q = self.state(word)
        if q == 0:
            v = max(0, -k)
        else:
            num2 = (q.numerator & -q.numerator).bit_length() - 1
            den2 = (q.denominator & -q.denominator).bit_length() - 1
            v = max(0, den2 - num2, -k)
        p = k + v
        m = q * 2**v
        assert m.denominator == 1
        m = m.numerator
        return (2,) * p + ((1,) if m > 0 else (-1,)) * abs(m) + (-2,) * v


def _bs12_model() -> GroupModel:
    pres = presentation_from_strings("BS12", ["a", "t"], ["TatAA"])
    return GroupModel(
        name="bs12",
        presentation=pres,
        solver=Bs12Solver(),
        one_ended=True,
        sci_candidate=False,
        growth_ratio=1.7,
    )


# ---------------------------------------------------------------------------
# Lamplighter Z2 wr Z (finitely generated only)


class LamplighterSolver(Solver):
    normal_form_kind = "two-sweep walk with first-visit toggles"

    def state(self, word):
        lamps = set()
        head = 0
        for l in word:
            if abs(l) == 1:
                if head in lamps:
                    lamps.remove(head)
                else:
                    lamps.add(head)
            else:
                head += 1 if l > 0 else -1
        return (frozenset(lamps), head)

    def key(self, word):
        lamps, head = self.state(word)
        return (tuple(sorted(lamps)), head)

    @staticmethod
    def _sweep_word(lamps, head, left_first: bool) -> Word:
        lo = min(list(lamps) + [0, head])
        hi = max(list(lamps) + [0, head])
        word = []
        pos = 0
        pending = set(lamps)

        def visit():
            if pos in pending:
                word.append(1)
                pending.discard(pos)

        visit()
        legs = [(lo, hi, head)] if left_first else [(hi, lo, head)]
        start, mid, end = legs[0]
        for target in (start, mid, end):
            step = 2 if target > pos else -2
            while pos != target:
                word.append(step)
                pos += 1 if step > 0 else -1
                visit()
        return tuple(word)

    def nf(self, word):
        lamps, head = self.state(word)
        if not lamps and head == 0:
            return ()
        left = self._sweep_word(lamps, head, True)
        right = self._sweep_word(lamps, head, False)
        if len(left) != len(right):
            return left if len(left) < len(right) else right
        return min(left, right, key=word_key)


def _lamplighter_model() -> GroupModel:
    from .words import Alphabet

    solver = LamplighterSolver()

    def dist(word):
        lamps, head = solver.state(word)
        if not lamps:
            return abs(head)
        lo = min(min(lamps), 0, head)
        hi = max(max(lamps), 0, head)
        return len(lamps) + 2 * (hi - lo) - abs(head)

    model = GroupModel(
        name="lamplighter",
        presentation=None,
        solver=solver,
        dist_formula=dist,
        one_ended=True,
        sci_candidate=False,
        finitely_presented=False,
        growth_ratio=2.1,
    )
    model._alphabet = Alphabet(["a", "t"])
    return model


# ---------------------------------------------------------------------------
# Trefoil knot group Z *_Z Z  (x^2 = y^3)


class TrefoilSolver(Solver):
    """Amalgam normal form (m, seq): x^(2m) . alternating reps from {x} and {y, Y}."""

    normal_form_kind = "central power times alternating coset word"

    def state(self, word):
        m = 0
        seq: list[str] = []

        def mul_x():
            nonlocal m
            if seq and seq[-1] == "x":
                seq.pop()
                m += 1
            else:
                seq.append("x")

        def mul_y():
            nonlocal m
            if seq and seq[-1] == "y":
                seq[-1] = "Y"
                m += 1
            elif seq and seq[-1] == "Y":
                seq.pop()
            else:
                seq.append("y")

        for l in word:
            g, pos = abs(l), l > 0
            if g == 1:
                if pos:
                    mul_x()
                else:
                    m -= 1
                    mul_x()
            else:
                if pos:
                    mul_y()
                else:
                    m -= 1
                    mul_y()
                    mul_y()
        return (m, tuple(seq))

    def key(self, word):
        return self.state(word)

    def nf(self, word):
        m, seq = self.state(word)
        out = [1 if m > 0 else -1] * (2 * abs(m))
        for c in seq:
            out.append({"x": 1, "y": 2, "Y": -2}[c])
        return tuple(out)


def _trefoil_model() -> GroupModel:
    pres = presentation_from_strings("trefoil", ["x", "y"], ["xxYYY"])
    return GroupModel(
        name="trefoil_amalgam",
        presentation=pres,
        solver=TrefoilSolver(),
        one_ended=True,
        sci_candidate=False,
        growth_ratio=1.9,
    )


def normal_form(solver: Solver, word: Sequence[int]) -> Word:
    """Canonical representative under the solver's strategy.

    Raises OracleError/PreconditionError when the strategy cannot produce
    canonical forms (non-confluent rewriting with no oracle fallback).
    """
    return solver.nf(tuple(word))


# ---------------------------------------------------------------------------
# Registry

_surface_model_singleton: Optional[GroupModel] = None


def zoo_group(name: str) -> GroupModel:
    """Look up a zoo model by name string.

    Accepted: ``Zd:2`` / ``Zd(2)``, ``free:2``, ``surface2``,
    ``racg:pentagon`` / ``racg:1-2,2-3,...``, ``bs12``, ``lamplighter``,
    ``trefoil_amalgam``, and the comparison variant ``zd2_diag``.
    """
    global _surface_model_singleton
    text = name.strip()
    low = text.lower().replace("(", ":").rstrip(")")
    if low.startswith("zd2_diag") or low.startswith("zd:2:diag"):
        return _zd2_diag_model()
    if low.startswith("zd:"):
        return _zd_model(int(low.split(":")[1]))
    if low.startswith("free:"):
        return _free_model(int(low.split(":")[1]))
    if low == "surface2":
        if _surface_model_singleton is None:
            _surface_model_singleton = _surface_model()
        return _surface_model_singleton
    if low.startswith("racg:"):
        return _racg_model(text.split(":", 1)[1].strip())
    if low == "bs12":
        return _bs12_model()
    if low == "lamplighter":
        return _lamplighter_model()
    if low in ("trefoil_amalgam", "trefoil"):
        return _trefoil_model()
    raise PreconditionError(f"unknown zoo group {name!r}")
