"""Bracket-expression relations: grammar, evaluation, quotient builds.

Grammar (whitespace-insensitive, `#` comments in files):

    expr := term (('+'|'-') term)*
    term := [int '*'] atom
    atom := 'x' int | '[' expr ',' expr ']' | 'ad(' expr ')^' int '(' expr ')'

Every expression must be weight-homogeneous.  `evaluate` computes the
exact value inside a built algebra.  `build_from_relations` grows the
quotient of the free Lie superalgebra by the ideal an explicit relation
set generates: each layer is the span of generator brackets with the
previous layer, cut by the anticommutativity and Jacobi instances tying
it to the layers below and by the relation values landing there.
`discover_relations` compares that growth against the maximal-ideal
construction and emits the missing relations weight by weight.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import gf
from .algebra import BasisElement, GradedAlgebra, build, with_field
from .cartan import CartanDatum, normalize, serre_exponents
from .errors import HeightExceeded, InhomogeneousSum, RelationSyntaxError
from .gf import Field


# --- abstract syntax ----------------------------------------------------

@dataclass(frozen=True)
class Gen:
    k: int                      # 1-based generator index


@dataclass(frozen=True)
class Br:
    a: object
    b: object


@dataclass(frozen=True)
class AdPow:
    op: object
    exp: int
    arg: object


@dataclass(frozen=True)
class Scale:
    c: int
    e: object


@dataclass(frozen=True)
class Sum:
    terms: tuple


def max_generator(expr) -> int:
    if isinstance(expr, Gen):
        return expr.k
    if isinstance(expr, Br):
        return max(max_generator(expr.a), max_generator(expr.b))
    if isinstance(expr, AdPow):
        return max(max_generator(expr.op), max_generator(expr.arg))
    if isinstance(expr, Scale):
        return max_generator(expr.e)
    return max(max_generator(t) for t in expr.terms)


def weight(expr, n: int) -> tuple[int, ...]:
    """Multidegree in the generators; raises on inhomogeneous sums."""
    if isinstance(expr, Gen):
        return tuple(1 if i == expr.k - 1 else 0 for i in range(n))
    if isinstance(expr, Br):
        return tuple(a + b for a, b in zip(weight(expr.a, n), weight(expr.b, n)))
    if isinstance(expr, AdPow):
        w_op = weight(expr.op, n)
        w_arg = weight(expr.arg, n)
        return tuple(expr.exp * a + b for a, b in zip(w_op, w_arg))
    if isinstance(expr, Scale):
        return weight(expr.e, n)
    ws = {weight(t, n) for t in expr.terms}
    if len(ws) != 1:
        raise InhomogeneousSum(f"terms carry distinct weights {sorted(ws)}")
    return ws.pop()


def render(expr) -> str:
    if isinstance(expr, Gen):
        return f"x{expr.k}"
    if isinstance(expr, Br):
        return f"[{render(expr.a)},{render(expr.b)}]"
    if isinstance(expr, AdPow):
        return f"ad({render(expr.op)})^{expr.exp}({render(expr.arg)})"
    if isinstance(expr, Scale):
        if expr.c == -1:
            return f"-{render(expr.e)}"
        return f"{expr.c}*{render(expr.e)}"
    parts = []
    for i, t in enumerate(expr.terms):
        s = render(t)
        if i and not s.startswith("-"):
            parts.append("+ " + s)
        elif i:
            parts.append("- " + s[1:])
        else:
            parts.append(s)
    return " ".join(parts)


# --- parser -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(x\d+|\d+|ad|[\[\],()^+\-*])")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip():
                    raise RelationSyntaxError(f"unexpected character {text[pos]!r}", pos)
                break
            self.toks.append((m.group(1), m.start(1)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def next(self):
        if self.i >= len(self.toks):
            raise RelationSyntaxError("unexpected end of input", len(self.text))
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, want: str):
        tok, pos = self.next()
        if tok != want:
            raise RelationSyntaxError(f"expected {want!r}, found {tok!r}", pos)

    def expr(self):
        terms = [self.term()]
        while self.peek() in ("+", "-"):
            op, _ = self.next()
            t = self.term()
            terms.append(Scale(-1, t) if op == "-" else t)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        tok = self.peek()
        if tok is not None and tok.isdigit():
            c, _ = self.next()
            self.expect("*")
            return Scale(int(c), self.atom())
        return self.atom()

    def atom(self):
        tok, pos = self.next()
        if tok.startswith("x"):
            return Gen(int(tok[1:]))
        if tok == "[":
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect("]")
            return Br(a, b)
        if tok == "ad":
            self.expect("(")
            op = self.expr()
            self.expect(")")
            self.expect("^")
            etok, epos = self.next()
            if not etok.isdigit() or int(etok) < 1:
                raise RelationSyntaxError("ad exponent must be a positive integer", epos)
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return AdPow(op, int(etok), arg)
        raise RelationSyntaxError(f"unexpected token {tok!r}", pos)


def parse(text: str, n: int | None = None):
    """Parse one relation; validates weight homogeneity and generator range."""
    p = _Parser(text)
    ast = p.expr()
    if p.i != len(p.toks):
        raise RelationSyntaxError(f"trailing input {p.toks[p.i][0]!r}", p.toks[p.i][1])
    m = max_generator(ast)
    if n is not None and m > n:
        raise RelationSyntaxError(f"generator x{m} exceeds rank {n}", 0)
    weight(ast, n if n is not None else m)
    return ast


def parse_relation_file(text: str, n: int | None = None) -> list[tuple[str, object]]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((line, parse(line, n)))
    return out


# --- relation sets -------------------------------------------------------

@dataclass(frozen=True)
class Relation:
    text: str
    expr: object
    provenance: str             # serre | paper-nonserre | discovered


@dataclass
class RelationSet:
    algebra: str | None
    index: int | None
    relations: list[Relation]

    def texts(self):
        return [r.text for r in self.relations]


def serre_relations(d: CartanDatum) -> list[Relation]:
    """The relation set read off the matrix alone: ad-power relations for
    distinct generators, squares of odd zero-diagonal generators, and
    cubes of odd diagonal-1 generators at characteristic 3."""
    d = normalize(d)
    exps = serre_exponents(d)
    rels = []
    n = d.n
    for i in range(n):
        if exps.self_square[i]:
            rels.append(f"[x{i + 1},x{i + 1}]")
        if exps.self_cube[i]:
            rels.append(f"[x{i + 1},[x{i + 1},x{i + 1}]]")
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            k = exps.k[i][j]
            if k == 1:
                rels.append(f"[x{i + 1},x{j + 1}]")
            else:
                rels.append(f"ad(x{i + 1})^{k}(x{j + 1})")
    return [Relation(t, parse(t, n), "serre") for t in rels]


def evaluate(g, expr) -> dict:
    """Exact value of a relation inside a built algebra (an expansion)."""
    f = g.field
    if isinstance(expr, Gen):
        if expr.k > g.n:
            raise RelationSyntaxError(f"generator x{expr.k} exceeds rank {g.n}", 0)
        return g.generator(expr.k - 1)
    if isinstance(expr, Br):
        return g.bracket(evaluate(g, expr.a), evaluate(g, expr.b))
    if isinstance(expr, AdPow):
        op = evaluate(g, expr.op)
        val = evaluate(g, expr.arg)
        for _ in range(expr.exp):
            val = g.bracket(op, val)
        return val
    if isinstance(expr, Scale):
        c = f.of(expr.c)
        out = {}
        for k, v in evaluate(g, expr.e).items():
            cv = f.mul(c, v)
            if cv:
                out[k] = cv
        return out
    out = {}
    for t in expr.terms:
        for k, v in evaluate(g, t).items():
            s = f.add(out.get(k, f.zero()), v)
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


@dataclass
class VerifyResult:
    entries: list[tuple[str, str, bool]]    # (text, provenance, holds)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.entries)


def verify_set(g: GradedAlgebra, relations: list, include_serre: bool = True) -> VerifyResult:
    """Evaluate every relation; the generated standard set is prepended."""
    rels = serre_relations(g.datum) + list(relations) if include_serre else list(relations)
    entries = []
    for r in rels:
        val = evaluate(g, r.expr)
        entries.append((r.text, r.provenance, not val))
    return VerifyResult(entries)


# --- quotients of the free superalgebra ----------------------------------

class FreeQuotient:
    """Positive part of the free Lie superalgebra on the generators of a
    datum, cut by the ideal a homogeneous relation set generates."""

    def __init__(self, datum: CartanDatum):
        self.datum = datum
        self.field: Field = datum.field
        self.n = datum.n
        self.elems: list[BasisElement] = []
        self.weights: dict[tuple[int, ...], list[int]] = {}
        self.raising: dict[tuple[int, int], dict] = {}
        self.complete = False
        self.height_built = 0
        self._pair_memo: dict = {}
        for i in range(self.n):
            self._add_elem(tuple(1 if k == i else 0 for k in range(self.n)), i, None)
        self.height_built = 1

    def _combine(self, dst: dict, src: dict, coeff) -> None:
        f = self.field
        for k, c in src.items():
            v = f.add(dst.get(k, f.zero()), f.mul(coeff, c))
            if v:
                dst[k] = v
            else:
                dst.pop(k, None)

    def _add_elem(self, weight, gen, parent) -> int:
        uid = len(self.elems)
        parity = sum(c * p for c, p in zip(weight, self.datum.parity)) % 2
        self.elems.append(BasisElement(uid, weight, sum(weight), parity, gen, parent))
        self.weights.setdefault(weight, []).append(uid)
        return uid

    def basis_at(self, w) -> list[int]:
        return self.weights.get(tuple(w), [])

    def multiplicity(self, w) -> int:
        return len(self.basis_at(w))

    def dimensions(self) -> dict[tuple[int, ...], int]:
        return {w: len(uids) for w, uids in self.weights.items()}

    def generator(self, i: int) -> dict:
        return {i: self.field.one()}

    def word(self, uid: int) -> str:
        e = self.elems[uid]
        if e.parent is None:
            return f"x{e.gen + 1}"
        return f"[x{e.gen + 1},{self.word(e.parent)}]"

    def word_expr(self, uid: int):
        e = self.elems[uid]
        if e.parent is None:
            return Gen(e.gen + 1)
        return Br(Gen(e.gen + 1), self.word_expr(e.parent))

    def pair_bracket(self, a: int, b: int) -> dict:
        got = self._pair_memo.get((a, b))
        if got is not None:
            return got
        ea = self.elems[a]
        if ea.height == 1:
            out = dict(self.raising[(b, ea.gen)])
        else:
            g, w = ea.gen, ea.parent
            out = {}
            for k, c in self.pair_bracket(w, b).items():
                self._combine(out, self.raising[(k, g)], c)
            sign = self.field.of(
                1 if (self.datum.parity[g] and self.elems[w].parity) else -1
            )
            for k, c in self.raising[(b, g)].items():
                self._combine(out, self.pair_bracket(w, k), self.field.mul(sign, c))
        self._pair_memo[(a, b)] = out
        return out

    def bracket(self, x: dict, y: dict) -> dict:
        f = self.field
        out: dict = {}
        for ka, ca in x.items():
            for kb, cb in y.items():
                self._combine(out, self.pair_bracket(ka, kb), f.mul(ca, cb))
        return out


def _candidate_list(fq: FreeQuotient, beta) -> list[tuple[int, int]]:
    cands = []
    for i in range(fq.n):
        if beta[i] == 0:
            continue
        gamma = tuple(c - (1 if k == i else 0) for k, c in enumerate(beta))
        for u in fq.basis_at(gamma):
            cands.append((i, u))
    return cands


def _btc(fq: FreeQuotient, u: int, v: int, index: dict) -> dict:
    """[u, v] at the frontier weight, written over candidate coordinates."""
    f = fq.field
    eu = fq.elems[u]
    if eu.height == 1:
        return {index[(eu.gen, v)]: f.one()}
    g, w = eu.gen, eu.parent
    out: dict = {}
    for k, c in fq.pair_bracket(w, v).items():
        fq._combine(out, {index[(g, k)]: f.one()}, c)
    sign = f.of(1 if (fq.datum.parity[g] and fq.elems[w].parity) else -1)
    for k, c in fq.raising[(v, g)].items():
        fq._combine(out, _btc(fq, w, k, index), f.mul(sign, c))
    return out


def _btc_bilinear(fq: FreeQuotient, x: dict, y: dict, index: dict) -> dict:
    f = fq.field
    out: dict = {}
    for ka, ca in x.items():
        for kb, cb in y.items():
            fq._combine(out, _btc(fq, ka, kb, index), f.mul(ca, cb))
    return out


def _value_to_candidates(fq: FreeQuotient, expr, beta, index) -> dict:
    """Value of a weight-beta expression over the frontier candidates."""
    f = fq.field
    if isinstance(expr, Sum):
        out: dict = {}
        for t in expr.terms:
            fq._combine(out, _value_to_candidates(fq, t, beta, index), f.one())
        return out
    if isinstance(expr, Scale):
        inner = _value_to_candidates(fq, expr.e, beta, index)
        out = {}
        for k, v in inner.items():
            cv = f.mul(f.of(expr.c), v)
            if cv:
                out[k] = cv
        return out
    if isinstance(expr, AdPow):
        rest = AdPow(expr.op, expr.exp - 1, expr.arg) if expr.exp > 1 else expr.arg
        return _btc_bilinear(fq, evaluate(fq, expr.op), evaluate(fq, rest), index)
    if isinstance(expr, Br):
        return _btc_bilinear(fq, evaluate(fq, expr.a), evaluate(fq, expr.b), index)
    raise ValueError("a bare generator cannot sit at a composite weight")


def _structural_rows(fq: FreeQuotient, beta, index) -> list[dict]:
    """Anticommutativity and Jacobi instances binding the frontier layer
    to the layers below it."""
    f = fq.field
    n = fq.n
    rows = []
    gammas = sorted(w for w in fq.weights if all(a <= b for a, b in zip(w, beta)))
    for gamma in gammas:
        delta = tuple(b - a for a, b in zip(gamma, beta))
        if delta not in fq.weights or delta < gamma:
            continue
        same = delta == gamma
        for u in fq.basis_at(gamma):
            for v in fq.basis_at(delta):
                pu, pv = fq.elems[u].parity, fq.elems[v].parity
                if same and (v < u or (u == v and pu)):
                    continue
                # [u,v] + (-1)^{pu pv}[v,u] = 0
                row = _btc(fq, u, v, index)
                fq._combine(row, _btc(fq, v, u, index), f.of(-1 if (pu and pv) else 1))
                if row:
                    rows.append(row)
    for i in range(n):
        for j in range(n):
            gamma = list(beta)
            gamma[i] -= 1
            gamma[j] -= 1
            if min(gamma) < 0:
                continue
            pi, pj = fq.datum.parity[i], fq.datum.parity[j]
            sign = f.of(-1 if (pi and pj) else 1)
            for w in fq.basis_at(tuple(gamma)):
                # [e_i,[e_j,w]] - [[e_i,e_j],w] - (-1)^{pi pj}[e_j,[e_i,w]] = 0
                row: dict = {}
                for k, c in fq.raising[(w, j)].items():
                    fq._combine(row, {index[(i, k)]: f.one()}, c)
                for k, c in fq.raising[(j, i)].items():
                    fq._combine(row, _btc(fq, k, w, index), f.neg(c))
                for k, c in fq.raising[(w, i)].items():
                    fq._combine(row, {index[(j, k)]: f.one()}, f.neg(f.mul(sign, c)))
                if row:
                    rows.append(row)
    return rows


def _build_layer(fq: FreeQuotient, beta, relations=None, extra_rows=None):
    """Reduce the frontier at one weight; nothing is committed.

    Returns (cands, accepted, expansions): `accepted` lists the candidate
    positions that survive, `expansions[ck]` expresses candidate ck over
    the accepted positions.
    """
    f = fq.field
    cands = _candidate_list(fq, beta)
    index = {cand: k for k, cand in enumerate(cands)}
    if not cands:
        return cands, [], {}
    rows = _structural_rows(fq, beta, index)
    for r in relations or []:
        val = _value_to_candidates(fq, r.expr, beta, index)
        if val:
            rows.append(val)
    for row in extra_rows or []:
        rows.append(dict(row))

    echelon: dict[int, tuple[dict, dict]] = {}        # pivot -> (vec, combo)

    def reduce(vec: dict, combo: dict):
        """Invariant: element(vec_0) = element(vec) - combo over accepted."""
        while vec:
            pivot = min(vec)
            hit = echelon.get(pivot)
            if hit is None:
                return vec, combo, pivot
            c = vec[pivot]
            fq._combine(vec, hit[0], f.neg(c))
            fq._combine(combo, hit[1], f.neg(c))
        return vec, combo, None

    for row in rows:
        vec, combo, pivot = reduce(dict(row), {})
        if pivot is not None:
            scale = f.inv(vec[pivot])
            echelon[pivot] = (
                {k: f.mul(scale, v) for k, v in vec.items()},
                {k: f.mul(scale, v) for k, v in combo.items()},
            )

    accepted: list[int] = []
    expansions: dict[int, dict] = {}
    for ck in range(len(cands)):
        vec, combo, pivot = reduce({ck: f.one()}, {})
        if pivot is None:
            # unit(ck) = -combo over accepted (rows with empty combo are zero)
            expansions[ck] = {k: f.neg(v) for k, v in combo.items()}
        else:
            pos = len(accepted)
            accepted.append(ck)
            scale = f.inv(vec[pivot])
            rcombo = {k: f.mul(scale, v) for k, v in combo.items()}
            rcombo[pos] = f.add(rcombo.get(pos, f.zero()), scale)
            echelon[pivot] = (
                {k: f.mul(scale, v) for k, v in vec.items()},
                rcombo,
            )
            expansions[ck] = {pos: f.one()}
    return cands, accepted, expansions


def _commit_layer(fq: FreeQuotient, beta, cands, accepted, expansions) -> int:
    pos_to_uid = {}
    for pos, ck in enumerate(accepted):
        i, parent = cands[ck]
        pos_to_uid[pos] = fq._add_elem(beta, i, parent)
    for ck, (i, parent) in enumerate(cands):
        fq.raising[(parent, i)] = {
            pos_to_uid[pos]: c for pos, c in expansions[ck].items()
        }
    return len(accepted)


def _frontier_weights(fq: FreeQuotient, h: int):
    prev = [u for u in range(len(fq.elems)) if fq.elems[u].height == h - 1]
    return sorted({
        tuple(c + (1 if k == i else 0) for k, c in enumerate(fq.elems[u].weight))
        for u in prev for i in range(fq.n)
    })


def build_from_relations(d: CartanDatum, f: Field | None, relations: list,
                         max_height: int = 64) -> FreeQuotient:
    """Grow Free/(ideal generated by the relation set) height by height.

    Raises HeightExceeded, carrying the partial quotient, when the growth
    has not stopped by `max_height`.
    """
    d = normalize(with_field(d, f) if f is not None else d)
    fq = FreeQuotient(d)
    n = d.n
    rel_by_weight: dict[tuple[int, ...], list] = {}
    for r in relations:
        rel_by_weight.setdefault(weight(r.expr, n), []).append(r)

    for h in range(2, max_height + 1):
        new_total = 0
        for beta in _frontier_weights(fq, h):
            cands, accepted, expansions = _build_layer(
                fq, beta, relations=rel_by_weight.get(beta, [])
            )
            new_total += _commit_layer(fq, beta, cands, accepted, expansions)
        fq.height_built = h
        if new_total == 0:
            fq.complete = True
            break
    if not fq.complete:
        raise HeightExceeded(
            f"quotient still growing at height {max_height}", partial=fq
        )
    return fq


def _coeff_int(field: Field, c):
    return field.signed_lift(c) if field.p else c


def _kernel_of_images(field: Field, images: list[dict], columns: list) -> list[dict]:
    """Combos of the given expansions that vanish, by echelon over an
    augmented tracking block; deterministic."""
    col = {key: k for k, key in enumerate(columns)}
    m = len(images)
    ncols = len(columns)
    aug = []
    for r, img in enumerate(images):
        row = [field.zero()] * (ncols + m)
        for key, c in img.items():
            row[col[key]] = c
        row[ncols + r] = field.one()
        aug.append(row)
    red, _ = gf.rref(field, aug)
    kernel = []
    for row in red:
        lead = next((c for c, x in enumerate(row) if x), None)
        if lead is not None and lead >= ncols:
            kernel.append({k: row[ncols + k] for k in range(m) if row[ncols + k]})
    return kernel


def discover_relations(d: CartanDatum, f: Field | None = None,
                       max_height: int = 64) -> RelationSet:
    """Defining relations read off the maximal-ideal construction.

    The generated standard set is seeded (labeled `serre`); per weight, a
    basis of the kernel of the free quotient onto the built algebra is
    rendered over the construction words and labeled `discovered`.
    """
    d0 = normalize(with_field(d, f) if f is not None else d)
    rad = build(d0, max_height=max_height)
    seeds = serre_relations(d0)
    out: list[Relation] = list(seeds)
    field = d0.field
    n = d0.n

    fq = FreeQuotient(d0)
    rel_by_weight: dict[tuple[int, ...], list] = {}
    for r in seeds:
        rel_by_weight.setdefault(weight(r.expr, n), []).append(r)
    phi: dict[int, dict] = {i: {i: field.one()} for i in range(n)}

    for h in range(2, max_height + 1):
        new_total = 0
        for beta in _frontier_weights(fq, h):
            rels = rel_by_weight.get(beta, [])
            cands, accepted, expansions = _build_layer(fq, beta, relations=rels)
            if accepted:
                images = []
                for ck in accepted:
                    i_g, parent = cands[ck]
                    img: dict = {}
                    for k, c in phi[parent].items():
                        fq._combine(img, rad.raising[(k, i_g)], c)
                    images.append(img)
                kernel = _kernel_of_images(field, images, rad.basis_at(beta))
                if kernel:
                    extra = []
                    for combo in kernel:
                        extra.append({accepted[pos]: c for pos, c in combo.items()})
                        terms = []
                        for pos in sorted(combo):
                            i_g, parent = cands[accepted[pos]]
                            word = Br(Gen(i_g + 1), fq.word_expr(parent))
                            terms.append(Scale(_coeff_int(field, combo[pos]), word))
                        expr = _tidy(terms[0] if len(terms) == 1 else Sum(tuple(terms)))
                        out.append(Relation(render(expr), expr, "discovered"))
                    cands, accepted, expansions = _build_layer(
                        fq, beta, relations=rels, extra_rows=extra
                    )
            new_total += _commit_layer(fq, beta, cands, accepted, expansions)
            for pos, ck in enumerate(accepted):
                i_g, parent = cands[ck]
                uid = fq.basis_at(beta)[pos]
                img = {}
                for k, c in phi[parent].items():
                    fq._combine(img, rad.raising[(k, i_g)], c)
                phi[uid] = img
        fq.height_built = h
        if new_total == 0:
            fq.complete = True
            break
    return RelationSet(None, None, out)


def _tidy(expr):
    """Drop unit scales for readability."""
    if isinstance(expr, Scale):
        inner = _tidy(expr.e)
        return inner if expr.c == 1 else Scale(expr.c, inner)
    if isinstance(expr, Sum):
        return Sum(tuple(_tidy(t) for t in expr.terms))
    if isinstance(expr, Br):
        return Br(_tidy(expr.a), _tidy(expr.b))
    return expr
