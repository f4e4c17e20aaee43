"""Amalgamated products and HNN extensions: pinches, Britton reduction,
and the loop-shortening step.

Orientation convention: the stable letter satisfies c_j = t^-1 a_j t, so
conjugating an H-word by t^-1 ... t rewrites it to a K-word.  Subgroup
copies inside a ball are left cosets, located by the membership oracle
after translating by the coset representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import OracleError, PreconditionError, WindowError
from .filling import Loop, loop_vertices, make_loop
from .words import Word, free_multiply, free_reduce, invert
from .zoo import GroupModel, zoo_group


@dataclass
class SubgroupEmbedding:
    """A finitely generated subgroup given by oracles.

    ``generators`` are ambient words; ``membership`` decides ambient words;
    ``expression`` writes a member as a word in the subgroup generators
    (signed 1-based indices).  ``one_ended`` is metadata: the shortening
    machinery runs regardless, but results on multi-ended subgroups are
    labeled machinery-only.
    """

    ambient: GroupModel
    generators: List[Word]
    membership: Callable[[Word], bool]
    expression: Callable[[Word], Optional[List[int]]]
    one_ended: bool = False

    def spell(self, indices: Sequence[int]) -> Word:
        out: Word = ()
        for i in indices:
            g = self.generators[abs(i) - 1]
            out = free_multiply(out, g if i > 0 else invert(g))
        return out


@dataclass
class AmalgamModel:
    group: GroupModel  # G = G1 *_H G2, letters split between the factors
    factor_letters: Tuple[frozenset, frozenset]
    h_in_1: SubgroupEmbedding  # oracles take G-words
    h_in_2: SubgroupEmbedding
    name: str = "amalgam"

    def factor_of(self, letter: int) -> int:
        if abs(letter) in self.factor_letters[0]:
            return 1
        if abs(letter) in self.factor_letters[1]:
            return 2
        raise PreconditionError(f"letter {letter} belongs to neither factor")


@dataclass
class HnnModel:
    group: GroupModel  # base generators plus the stable letter
    stable_letter: int
    h: SubgroupEmbedding  # H with generators a_j (G-words)
    k: SubgroupEmbedding  # K with generators c_j = t^-1 a_j t
    name: str = "hnn"
    base_nf: Optional[Callable[[Word], Word]] = None  # base-group normalizer

    def h_to_k(self, indices: Sequence[int]) -> Word:
        return self.k.spell(indices)

    def k_to_h(self, indices: Sequence[int]) -> Word:
        return self.h.spell(indices)


# ---------------------------------------------------------------------------
# Built-in combined models


def trefoil_amalgam_model() -> AmalgamModel:
    """Z *_Z Z with x^2 = y^3 (the trefoil knot group)."""
    g = zoo_group("trefoil_amalgam")
    solver = g.solver

    def member(word) -> bool:
        m, seq = solver.state(word)
        return not seq

    def express(word):
        m, seq = solver.state(word)
        if seq:
            return None
        return [1] * m if m >= 0 else [-1] * (-m)

    h1 = SubgroupEmbedding(
        ambient=g, generators=[(1, 1)], membership=member, expression=express
    )
    h2 = SubgroupEmbedding(
        ambient=g, generators=[(2, 2, 2)], membership=member, expression=express
    )
    return AmalgamModel(
        group=g,
        factor_letters=(frozenset({1}), frozenset({2})),
        h_in_1=h1,
        h_in_2=h2,
        name="trefoil_amalgam",
    )


def bs12_hnn_model() -> HnnModel:
    """BS(1,2) as an HNN extension of Z = <a> with H = <a>, K = <a^2>."""
    g = zoo_group("bs12")
    solver = g.solver

    def in_h(word) -> bool:
        k, q = solver.state(word)
        return k == 0 and q.denominator == 1

    def in_k(word) -> bool:
        k, q = solver.state(word)
        return k == 0 and q.denominator == 1 and q.numerator % 2 == 0

    def express_h(word):
        k, q = solver.state(word)
        if k != 0 or q.denominator != 1:
            return None
        m = q.numerator
        return [1] * m if m >= 0 else [-1] * (-m)

    def express_k(word):
        k, q = solver.state(word)
        if k != 0 or q.denominator != 1 or q.numerator % 2:
            return None
        m = q.numerator // 2
        return [1] * m if m >= 0 else [-1] * (-m)

    h = SubgroupEmbedding(ambient=g, generators=[(1,)], membership=in_h, expression=express_h)
    k = SubgroupEmbedding(
        ambient=g, generators=[(1, 1)], membership=in_k, expression=express_k
    )
    return HnnModel(group=g, stable_letter=2, h=h, k=k, name="bs12")


# ---------------------------------------------------------------------------
# Syllable words


@dataclass
class HnnSyllableWord:
    """g0 t^i1 g1 ... t^in gn with nonzero exponents."""

    gs: List[Word]
    ts: List[int]

    @property
    def t_weight(self) -> int:
        return sum(abs(i) for i in self.ts)

    def to_word(self, stable: int) -> Word:
        out: List[int] = list(self.gs[0])
        for i, g in zip(self.ts, self.gs[1:]):
            out.extend([stable if i > 0 else -stable] * abs(i))
            out.extend(g)
        return free_reduce(out)


@dataclass
class AmalgamSyllableWord:
    """Alternating factor syllables; consecutive syllables in different factors."""

    syllables: List[Tuple[int, Word]]  # (factor 1|2, word)

    @property
    def length(self) -> int:
        return len(self.syllables)

    def to_word(self) -> Word:
        out: List[int] = []
        for _, w in self.syllables:
            out.extend(w)
        return free_reduce(out)


def hnn_syllables(m: HnnModel, word: Sequence[int]) -> HnnSyllableWord:
    t = m.stable_letter
    gs: List[Word] = []
    ts: List[int] = []
    cur: List[int] = []
    for l in free_reduce(word):
        if abs(l) == t:
            sign = 1 if l > 0 else -1
            if ts and not cur and (ts[-1] > 0) == (sign > 0):
                ts[-1] += sign
            else:
                gs.append(tuple(cur))
                cur = []
                ts.append(sign)
        else:
            cur.append(l)
    gs.append(tuple(cur))
    return HnnSyllableWord(gs=gs, ts=ts)


def amalgam_syllables(m: AmalgamModel, word: Sequence[int]) -> AmalgamSyllableWord:
    syllables: List[Tuple[int, Word]] = []
    cur: List[int] = []
    cur_factor: Optional[int] = None
    for l in free_reduce(word):
        f = m.factor_of(l)
        if cur_factor is None or f == cur_factor:
            cur.append(l)
            cur_factor = f
        else:
            syllables.append((cur_factor, tuple(cur)))
            cur = [l]
            cur_factor = f
    if cur:
        syllables.append((cur_factor, tuple(cur)))
    return AmalgamSyllableWord(syllables=syllables)


# ---------------------------------------------------------------------------
# Pinches and Britton reduction


def amalgam_pinch(m: AmalgamModel, w: AmalgamSyllableWord) -> int:
    """Least syllable index lying in the amalgamated subgroup.

    For words representing the identity such an index exists by the
    structure theorem; absence signals a nontrivial word or an unsound
    oracle and raises OracleError.
    """
    if w.length < 1:
        raise PreconditionError("syllable word is empty")
    for i, (factor, word) in enumerate(w.syllables):
        emb = m.h_in_1 if factor == 1 else m.h_in_2
        if emb.membership(word):
            return i
    raise OracleError(
        "no pinch found: word is not trivial or a membership oracle is unsound"
    )


def britton_reduce(m: HnnModel, w: HnnSyllableWord, trace: Optional[list] = None) -> HnnSyllableWord:
    """Remove all pinches t g t^-1 (g in K) and t^-1 g t (g in H).

    Each step drops the t-weight by exactly 2 and terminates; the output
    has no pinch.  Base syllables are normalized by the group solver at
    the end.  When given, ``trace`` collects the t-weight after each step.
    """
    gs = [tuple(g) for g in w.gs]
    ts = list(w.ts)
    solver = m.group.solver
    while True:
        found = None
        for k in range(len(ts) - 1):
            g_k = gs[k + 1]
            if ts[k] > 0 and ts[k + 1] < 0 and m.k.membership(g_k):
                idx = m.k.expression(g_k)
                if idx is None:
                    raise OracleError("K-membership and K-expression disagree")
                image = m.h.spell(idx)  # t g t^-1 = h with phi(h) = g
                if not m.h.membership(image):
                    raise OracleError("unsound oracle: H-image fails re-membership")
                found = (k, image)
                break
            if ts[k] < 0 and ts[k + 1] > 0 and m.h.membership(g_k):
                idx = m.h.expression(g_k)
                if idx is None:
                    raise OracleError("H-membership and H-expression disagree")
                image = m.k.spell(idx)  # t^-1 g t = phi(g) in K
                if not m.k.membership(image):
                    raise OracleError("unsound oracle: K-image fails re-membership")
                found = (k, image)
                break
        if found is None:
            break
        k, image = found
        # contract t^{i_k} g_k t^{i_{k+1}} around the pinch
        ts[k] -= 1 if ts[k] > 0 else -1
        ts[k + 1] += 1 if ts[k + 1] < 0 else -1
        new_g = image
        # merge into neighbors as exponents vanish
        left_g = gs[k]
        right_g = gs[k + 2]
        if ts[k] == 0 and ts[k + 1] == 0:
            merged = free_multiply(free_multiply(left_g, new_g), right_g)
            gs[k : k + 3] = [merged]
            ts[k : k + 2] = []
        elif ts[k] == 0:
            merged = free_multiply(left_g, new_g)
            gs[k : k + 2] = [merged]
            ts[k : k + 1] = []
        elif ts[k + 1] == 0:
            merged = free_multiply(new_g, right_g)
            gs[k + 1 : k + 3] = [merged]
            ts[k + 1 : k + 2] = []
        else:
            gs[k + 1] = new_g
        if trace is not None:
            trace.append(sum(abs(i) for i in ts))
    base_nf = getattr(m, "base_nf", None) or solver.nf
    gs = [base_nf(g) for g in gs]
    return HnnSyllableWord(gs=gs, ts=ts)


# ---------------------------------------------------------------------------
# Loop shortening (one step of the amalgam/HNN filling induction)


@dataclass
class ShortenCertificate:
    kind: str  # amalgam | hnn
    pinch_index: int
    subpath_range: Tuple[int, int]  # letter positions [start, end) of the replaced part
    replaced_word: Word
    replacement_word: Word
    copy_path: Tuple[int, ...]  # vertices of the connecting path p (coset copy)
    radius_floor: int  # all of p stays at dist > radius_floor
    subloop: Optional[Loop]  # l-tilde followed by p reversed, for filling


def _coset_hop_path(
    ball,
    embedding: SubgroupEmbedding,
    spell_words: List[Word],
    u: int,
    v: int,
    floor: int,
    max_hops: int = 4096,
) -> Optional[List[Tuple[int, int]]]:
    """BFS over the subgroup-copy graph from u to v.

    Nodes are ball vertices in the coset u.H; a hop applies one subgroup
    generator word (in the given spelling) edge by edge, requiring every
    intermediate vertex to stay in the ball and outside B(floor).
    Returns the hop sequence [(signed gen index, target vertex), ...].
    """
    from collections import deque

    hops = []
    for j, w in enumerate(spell_words, start=1):
        hops.append((j, w))
        hops.append((-j, invert(w)))

    def apply_hop(x, word):
        cur = x
        for l in word:
            cur = ball.step(cur, l)
            if cur < 0 or ball.dist[cur] <= floor:
                return None
        return cur

    parents = {u: None}
    queue = deque([u])
    count = 0
    while queue and count < max_hops:
        x = queue.popleft()
        count += 1
        if x == v:
            break
        for j, w in hops:
            y = apply_hop(x, w)
            if y is not None and y not in parents:
                parents[y] = (x, j, w)
                queue.append(y)
    if v not in parents:
        return None
    path = []
    cur = v
    while parents[cur] is not None:
        x, j, w = parents[cur]
        path.append((j, cur))
        cur = x
    path.reverse()
    return path


def shorten_loop(
    model,
    ball,
    loop: Loop,
    r: int,
    c: int,
    c1: int,
) -> Tuple[Loop, Optional[ShortenCertificate]]:
    """One step of the loop-shortening procedure.

    Locates the pinch syllable, reroutes it through a path p inside the
    corresponding subgroup copy avoiding B(c*r), and absorbs the result
    into the neighboring syllables.  The declared complexity (syllable
    length for amalgams, t-weight for HNN) strictly decreases.  Returns
    the loop unchanged with no certificate at the base case.
    """
    if loop.min_dist <= c1 * r:
        raise PreconditionError(f"loop must lie outside B(c1*r) = B({c1 * r})")
    if loop.letters != free_reduce(loop.letters):
        raise PreconditionError("loop word must be freely reduced")
    floor = c * r
    if isinstance(model, AmalgamModel):
        syl = amalgam_syllables(model, loop.letters)
        if syl.length <= 1:
            return loop, None
        i = amalgam_pinch(model, syl)
        factor, word = syl.syllables[i]
        start = sum(len(w) for _, w in syl.syllables[:i])
        end = start + len(word)
        other = model.h_in_2 if factor == 1 else model.h_in_1
        same = model.h_in_1 if factor == 1 else model.h_in_2
        spell_words = other.generators  # spell p in the other factor to merge
    elif isinstance(model, HnnModel):
        syl = hnn_syllables(model, loop.letters)
        if syl.t_weight == 0:
            return loop, None
        hit = None
        for k in range(len(syl.ts) - 1):
            g_k = syl.gs[k + 1]
            if syl.ts[k] > 0 and syl.ts[k + 1] < 0 and model.k.membership(g_k):
                hit = (k, model.h, +1)
                break
            if syl.ts[k] < 0 and syl.ts[k + 1] > 0 and model.h.membership(g_k):
                hit = (k, model.k, -1)
                break
        if hit is None:
            raise OracleError("no Britton pinch: loop word is not trivial?")
        k, target, sign = hit
        # letter positions of t^{sgn} g_k t^{-sgn}: the innermost t pair
        pos = 0
        for a in range(k):
            pos += len(syl.gs[a]) + abs(syl.ts[a])
        pos += len(syl.gs[k])
        start = pos + abs(syl.ts[k]) - 1  # the last t of the k-th block
        end = start + 1 + len(syl.gs[k + 1]) + 1
        if end > len(loop.letters):
            raise PreconditionError("pinch pattern wraps the base point; rotate the loop first")
        spell_words = target.generators
        same = target
        word = tuple(loop.letters[start:end])
    else:
        raise PreconditionError("model must be an AmalgamModel or HnnModel")

    verts = loop_vertices(ball, loop)
    u = verts[start]
    v = verts[end % len(loop.letters)] if loop.letters else loop.base
    hop_path = _coset_hop_path(ball, same, spell_words, u, v, floor)
    if hop_path is None:
        raise WindowError(
            f"no connecting path inside the subgroup copy outside B({floor});"
            " enlarge the window (end-depth bound sets the needed radius)"
        )
    replacement: List[int] = []
    copy_vertices = [u]
    for j, target_vertex in hop_path:
        w = spell_words[abs(j) - 1]
        replacement.extend(w if j > 0 else invert(w))
        copy_vertices.append(target_vertex)
    new_letters = free_reduce(
        loop.letters[:start] + tuple(replacement) + loop.letters[end:]
    )
    new_loop = make_loop(ball, loop.base, new_letters)
    subloop_letters = tuple(loop.letters[start:end]) + invert(tuple(replacement))
    subloop = make_loop(ball, u, subloop_letters)
    cert = ShortenCertificate(
        kind="amalgam" if isinstance(model, AmalgamModel) else "hnn",
        pinch_index=i if isinstance(model, AmalgamModel) else k,
        subpath_range=(start, end),
        replaced_word=word,
        replacement_word=tuple(replacement),
        copy_path=tuple(copy_vertices),
        radius_floor=floor,
        subloop=subloop,
    )
    # progress check: the declared complexity strictly decreases
    if isinstance(model, AmalgamModel):
        before, after = syl.length, amalgam_syllables(model, new_letters).length
    else:
        before, after = syl.t_weight, hnn_syllables(model, new_letters).t_weight
    if not after < before:
        raise OracleError(f"shortening did not reduce complexity ({before} -> {after})")
    return new_loop, cert


def replay_shorten_certificate(model, ball, loop: Loop, cert: ShortenCertificate) -> bool:
    """Independent validation of a shortening certificate."""
    start, end = cert.subpath_range
    if tuple(loop.letters[start:end]) != cert.replaced_word:
        raise OracleError("certificate subpath does not match the loop")
    verts = loop_vertices(ball, loop)
    u = verts[start]
    # the copy path must stay in the coset and outside the floor
    emb = None
    if isinstance(model, AmalgamModel):
        factor = model.factor_of(cert.replaced_word[0]) if cert.replaced_word else 1
        emb = model.h_in_1 if factor == 1 else model.h_in_2
    else:
        emb = model.h if model.h.membership(
            free_multiply(invert(ball.words[u]), ball.words[cert.copy_path[-1]])
        ) else model.k
    for x in cert.copy_path:
        if ball.dist[x] <= cert.radius_floor:
            raise OracleError("copy path touches the forbidden ball")
        rel = free_multiply(invert(ball.words[u]), ball.words[x])
        if not emb.membership(rel):
            raise OracleError("copy path leaves the subgroup copy")
    if cert.subloop is not None:
        wloop = make_loop(ball, cert.subloop.base, cert.subloop.letters)
        if wloop.min_dist <= cert.radius_floor:
            raise OracleError("subloop touches the forbidden ball")
    return True


def iterate_shortening(model, ball, loop: Loop, r: int, c: int, c1: int):
    """Run shorten_loop to the base case, collecting certificates."""
    steps = []
    cur = loop
    while True:
        nxt, cert = shorten_loop(model, ball, cur, r, c, c1)
        if cert is None:
            return cur, steps
        replay_shorten_certificate(model, ball, cur, cert)
        steps.append(cert)
        cur = nxt


# ---------------------------------------------------------------------------
# Syllable-word literals (CLI)


def parse_hnn_literal(m: HnnModel, text: str) -> HnnSyllableWord:
    """Literal format: ``g0 | t^2 | g1 | ...`` with letter words between bars."""
    alphabet = m.group.alphabet
    t_name = alphabet.names[m.stable_letter - 1]
    gs: List[Word] = []
    ts: List[int] = []
    expecting_g = True
    for raw in text.split("|"):
        part = raw.strip()
        if part.startswith(t_name + "^") or part in (t_name, t_name.upper()):
            if part == t_name:
                exp = 1
            elif part == t_name.upper():
                exp = -1
            else:
                exp = int(part.split("^", 1)[1])
            if exp == 0:
                raise PreconditionError("t exponent must be nonzero")
            if expecting_g:
                gs.append(())
            ts.append(exp)
            expecting_g = True
        else:
            word = alphabet.parse_word(part) if part else ()
            if any(abs(l) == m.stable_letter for l in word):
                raise PreconditionError("base syllables must avoid the stable letter")
            gs.append(word)
            expecting_g = False
    if expecting_g:
        gs.append(())
    if len(gs) != len(ts) + 1:
        gs = gs + [()] * (len(ts) + 1 - len(gs))
    return HnnSyllableWord(gs=gs, ts=ts)


def parse_amalgam_literal(m: AmalgamModel, text: str) -> AmalgamSyllableWord:
    alphabet = m.group.alphabet
    syllables = []
    for raw in text.split("|"):
        part = raw.strip()
        if not part:
            continue
        word = alphabet.parse_word(part)
        if not word:
            continue
        factor = m.factor_of(word[0])
        if any(m.factor_of(l) != factor for l in word):
            raise PreconditionError(f"syllable {part!r} mixes factors")
        syllables.append((factor, word))
    return AmalgamSyllableWord(syllables=syllables)


# ---------------------------------------------------------------------------
# Combined-model files


def _bounded_embedding(
    factor_model: GroupModel,
    generator_words: List[Word],
    offset: int,
    ambient: GroupModel,
    bound: int,
) -> SubgroupEmbedding:
    """Subgroup oracles by bounded enumeration over the factor.

    ``generator_words`` are spelled in the factor's alphabet; ``offset``
    translates combined-alphabet letters down to the factor's.  Membership
    is sound within products of up to ``bound`` subgroup generators;
    longer members test False, which the reduction ops surface as a
    missing-pinch diagnostic.
    """
    solver = factor_model.solver
    table = {solver.key(()): []}
    frontier = [((), [])]
    for _ in range(bound):
        nxt = []
        for word, expr in frontier:
            for j, g in enumerate(generator_words, start=1):
                for sign, gw in ((1, g), (-1, invert(g))):
                    w2 = free_multiply(word, gw)
                    k = solver.key(w2)
                    if k not in table:
                        table[k] = expr + [sign * j]
                        nxt.append((w2, expr + [sign * j]))
        frontier = nxt

    def to_factor(word: Word) -> Word:
        out = []
        for l in word:
            idx = abs(l) - offset
            if not 1 <= idx <= len(factor_model.alphabet):
                raise PreconditionError("word leaves the factor's alphabet")
            out.append(idx if l > 0 else -idx)
        return tuple(out)

    def membership(word) -> bool:
        return solver.key(to_factor(tuple(word))) in table

    def expression(word):
        return table.get(solver.key(to_factor(tuple(word))))

    ambient_gens = [
        tuple((l + offset if l > 0 else l - offset) for l in g) for g in generator_words
    ]
    return SubgroupEmbedding(
        ambient=ambient,
        generators=ambient_gens,
        membership=membership,
        expression=expression,
    )


def _factor_model(name: str, gens: List[str], rels: List[str]) -> GroupModel:
    from .presentation import presentation_from_strings
    from .rewriting import knuth_bendix_complete
    from .zoo import RewritingSolver

    pres = presentation_from_strings(name, gens, rels)
    system = knuth_bendix_complete(pres)
    if not system.confluent:
        raise OracleError(
            f"factor {name!r}: completion did not terminate; no factor oracle"
        )
    return GroupModel(name=name, presentation=pres, solver=RewritingSolver(system))


def load_combined_model(text: str, enumeration_bound: int = 6):
    """Parse an amalgam/HNN model file.

    Amalgam format: ``type: amalgam``, factor sections ``gens1:``/``rel1:``
    and ``gens2:``/``rel2:``, and ``subgroup:`` lines
    ``<word in factor 1> | <word in factor 2>`` identifying the subgroup
    generators.  HNN format: ``type: hnn``, ``gens:``/``rel:`` for the
    base, ``stable: <name>``, and ``subgroup:`` lines ``<H word> -> <K word>``
    for the correspondence c_j = t^-1 a_j t.
    """
    from .presentation import presentation_from_strings
    from .words import Alphabet

    kind = None
    name = "combined"
    gens = {1: None, 2: None}
    rels = {1: [], 2: []}
    base_gens = None
    base_rels = []
    stable = "t"
    subgroup_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if key == "type":
            kind = value
        elif key == "name":
            name = value
        elif key == "gens1":
            gens[1] = value.split()
        elif key == "gens2":
            gens[2] = value.split()
        elif key == "rel1":
            rels[1].append(value)
        elif key == "rel2":
            rels[2].append(value)
        elif key == "gens":
            base_gens = value.split()
        elif key == "rel":
            base_rels.append(value)
        elif key == "stable":
            stable = value
        elif key == "subgroup":
            subgroup_lines.append((lineno, value))
        else:
            raise PreconditionError(f"unknown key {key!r} in model file (line {lineno})")
    if kind == "amalgam":
        if gens[1] is None or gens[2] is None or not subgroup_lines:
            raise PreconditionError("amalgam file needs gens1:, gens2: and subgroup:")
        f1 = _factor_model(f"{name}.factor1", gens[1], rels[1])
        f2 = _factor_model(f"{name}.factor2", gens[2], rels[2])
        words1, words2 = [], []
        for lineno, spec in subgroup_lines:
            left, bar, right = spec.partition("|")
            if not bar:
                raise PreconditionError(
                    f"amalgam subgroup line needs '<factor1 word> | <factor2 word>' (line {lineno})"
                )
            words1.append(f1.alphabet.parse_word(left.strip()))
            words2.append(f2.alphabet.parse_word(right.strip()))
        combined_alpha = gens[1] + gens[2]
        offset2 = len(gens[1])
        identification = []
        for w1, w2 in zip(words1, words2):
            lifted2 = tuple((l + offset2 if l > 0 else l - offset2) for l in w2)
            identification.append(tuple(w1) + invert(lifted2))
        combined = presentation_from_strings(
            name,
            combined_alpha,
            [f1.alphabet.format_word(r) for r in f1.presentation.relators]
            + [
                Alphabet(combined_alpha).format_word(
                    tuple((l + offset2 if l > 0 else l - offset2) for l in r)
                )
                for r in f2.presentation.relators
            ]
            + [Alphabet(combined_alpha).format_word(w) for w in identification],
        )
        group = GroupModel(name=name, presentation=combined, solver=_NoSolver())
        h1 = _bounded_embedding(f1, words1, 0, group, enumeration_bound)
        h2 = _bounded_embedding(f2, words2, offset2, group, enumeration_bound)
        return AmalgamModel(
            group=group,
            factor_letters=(
                frozenset(range(1, offset2 + 1)),
                frozenset(range(offset2 + 1, offset2 + len(gens[2]) + 1)),
            ),
            h_in_1=h1,
            h_in_2=h2,
            name=name,
        )
    if kind == "hnn":
        if base_gens is None or not subgroup_lines:
            raise PreconditionError("hnn file needs gens: and subgroup:")
        base = _factor_model(f"{name}.base", base_gens, base_rels)
        h_words, k_words = [], []
        for lineno, spec in subgroup_lines:
            left, arrow, right = spec.partition("->")
            if not arrow:
                raise PreconditionError(
                    f"hnn subgroup line needs '<H word> -> <K word>' (line {lineno})"
                )
            h_words.append(base.alphabet.parse_word(left.strip()))
            k_words.append(base.alphabet.parse_word(right.strip()))
        combined_alpha = base_gens + [stable]
        t_index = len(combined_alpha)
        rel_strings = [base.alphabet.format_word(r) for r in base.presentation.relators]
        alpha = Alphabet(combined_alpha)
        for hw, kw in zip(h_words, k_words):
            rel = (-t_index,) + tuple(hw) + (t_index,) + invert(tuple(kw))
            rel_strings.append(alpha.format_word(rel))
        combined = presentation_from_strings(name, combined_alpha, rel_strings)
        group = GroupModel(name=name, presentation=combined, solver=_NoSolver())
        h = _bounded_embedding(base, h_words, 0, group, enumeration_bound)
        k = _bounded_embedding(base, k_words, 0, group, enumeration_bound)
        return HnnModel(
            group=group,
            stable_letter=t_index,
            h=h,
            k=k,
            name=name,
            base_nf=lambda w: base.solver.nf(tuple(w)),
        )
    raise PreconditionError("model file needs 'type: amalgam' or 'type: hnn'")


class _NoSolver:
    """Placeholder for combined groups without a word-problem oracle.

    Word-level operations (pinch detection, Britton reduction) never call
    it; ball construction does, and fails with a clear message.
    """

    strategy = "oracle"
    normal_form_kind = "unavailable"
    exact_key = True

    def nf(self, word):
        raise OracleError(
            "no word-problem oracle for this combined group; only syllable-level"
            " operations are available"
        )

    def key(self, word):
        return self.nf(word)

    def is_trivial(self, word):
        return self.nf(word) == ()
