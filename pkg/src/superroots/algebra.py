"""Weight-graded construction of the superalgebra attached to a pair (A, I).

The positive part grows height by height: candidates at a weight are the
brackets of generators with the previous layer, and a combination is
declared zero exactly when every lowering operator kills it inside the
already-built layers.  The negative part mirrors the positive one and is
never stored; mixed brackets go through the twist e_i -> f_i,
f_i -> (-1)^p(i) e_i, h -> -h, which is an automorphism of the defining
relations.

Expansions are dicts mapping keys to scalars.  Keys are ints (positive
basis elements, by creation order), ('h', t) for the Cartan generators,
and ('m', u) for the mirror of positive element u.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from . import gf
from .cartan import CartanDatum, make_datum, normalize, signed_lift
from .errors import HeightExceeded, Incomplete, NotUnique
from .gf import Field


@dataclass
class BasisElement:
    uid: int
    weight: tuple[int, ...]
    height: int
    parity: int
    gen: int                  # the element is [e_gen, parent]
    parent: int | None        # None for the generators themselves


@dataclass
class AlgebraReport:
    sdim_full: tuple[int, int]
    sdim_derived: tuple[int, int]
    center_dim_derived: int
    sdim_simple: tuple[int, int]
    positive_root_count: int
    roots: list[tuple[tuple[int, ...], int, int]]   # (coeffs, multiplicity, parity)

    def as_dict(self):
        return {
            "sdim_full": list(self.sdim_full),
            "sdim_derived": list(self.sdim_derived),
            "center_dim": self.center_dim_derived,
            "sdim_simple": list(self.sdim_simple),
            "positive_roots": [
                {"coeffs": list(c), "multiplicity": m, "parity": p}
                for c, m, p in self.roots
            ],
        }


class GradedAlgebra:
    """The built algebra: basis of the positive part plus action tables."""

    def __init__(self, datum: CartanDatum, max_height: int):
        self.datum = datum
        self.field: Field = datum.field
        self.n = datum.n
        self.max_height = max_height
        self.elems: list[BasisElement] = []
        self.weights: dict[tuple[int, ...], list[int]] = {}
        self.lowering: dict[tuple[int, int], dict] = {}
        self.raising: dict[tuple[int, int], dict] = {}
        self.complete = False
        self.height_built = 0
        self._pair_memo: dict = {}
        self._A = [list(row) for row in datum.entries]

    # -- scalars ---------------------------------------------------------

    def eig(self, t: int, weight) -> object:
        """Eigenvalue of h_t on the weight space: sum_k weight_k A[t][k]."""
        f = self.field
        acc = f.zero()
        for k, c in enumerate(weight):
            if c:
                acc = f.add(acc, f.mul(f.of(c), self._A[t][k]))
        return acc

    def key_parity(self, key) -> int:
        if isinstance(key, int):
            return self.elems[key].parity
        if key[0] == "m":
            return self.elems[key[1]].parity
        return 0

    def key_weight(self, key):
        if isinstance(key, int):
            return self.elems[key].weight
        if key[0] == "m":
            return tuple(-c for c in self.elems[key[1]].weight)
        return (0,) * self.n

    # -- construction ------------------------------------------------------

    def _add_elem(self, weight, parity, gen, parent) -> int:
        uid = len(self.elems)
        self.elems.append(BasisElement(uid, weight, sum(weight), parity, gen, parent))
        self.weights.setdefault(weight, []).append(uid)
        return uid

    def basis_at(self, weight) -> list[int]:
        return self.weights.get(tuple(weight), [])

    def multiplicity(self, weight) -> int:
        return len(self.basis_at(weight))

    def word(self, uid: int) -> str:
        e = self.elems[uid]
        if e.parent is None:
            return f"x{e.gen + 1}"
        return f"[x{e.gen + 1},{self.word(e.parent)}]"

    # -- bracket engine ----------------------------------------------------

    def _mirror(self, exp: dict) -> dict:
        out = {}
        for k, c in exp.items():
            if isinstance(k, int):
                out[("m", k)] = c
            elif k[0] == "h":
                out[k] = self.field.neg(c)
            else:
                out[k[1]] = c
        return out

    def _combine(self, dst: dict, src: dict, coeff) -> None:
        f = self.field
        for k, c in src.items():
            v = f.add(dst.get(k, f.zero()), f.mul(coeff, c))
            if v:
                dst[k] = v
            else:
                dst.pop(k, None)

    def left_mul(self, key, exp: dict) -> dict:
        out = {}
        for k, c in exp.items():
            self._combine(out, self.pair_bracket(key, k), c)
        return out

    def bracket(self, x: dict, y: dict) -> dict:
        """Exact product of two expansions."""
        f = self.field
        out = {}
        for ka, ca in x.items():
            for kb, cb in y.items():
                self._combine(out, self.pair_bracket(ka, kb), f.mul(ca, cb))
        return out

    def pair_bracket(self, ka, kb) -> dict:
        memo = self._pair_memo
        got = memo.get((ka, kb))
        if got is not None:
            return got
        out = self._pair_bracket(ka, kb)
        memo[(ka, kb)] = out
        return out

    def _pair_bracket(self, ka, kb) -> dict:
        f = self.field
        if not isinstance(ka, int) and ka[0] == "h":
            t = ka[1]
            if not isinstance(kb, int) and kb[0] == "h":
                return {}
            v = self.eig(t, self.key_weight(kb))
            return {kb: v} if v else {}
        if not isinstance(kb, int) and kb[0] == "h":
            inner = self.pair_bracket(kb, ka)
            return {k: f.neg(c) for k, c in inner.items()}

        if isinstance(ka, int):
            a = self.elems[ka]
            if a.height == 1:
                i = a.gen
                if isinstance(kb, int):
                    return dict(self.raising[(kb, i)])
                u = kb[1]
                mirr = self._mirror(self.lowering[(u, i)])
                if a.parity:
                    mirr = {k: f.neg(c) for k, c in mirr.items()}
                return mirr
            # ka = [e_g, w]: [[e_g, w], y] = [e_g,[w,y]] - (-1)^{p_g p_w}[w,[e_g,y]]
            g_uid = self._gen_uid(a.gen)
            w = a.parent
            t1 = self.left_mul(g_uid, self.pair_bracket(w, kb))
            t2 = self.left_mul(w, self.pair_bracket(g_uid, kb))
            sign_neg = self.elems[g_uid].parity and self.elems[w].parity
            out = t1
            self._combine(out, t2, f.of(1 if sign_neg else -1))
            return out

        # ka is a mirror
        a = self.elems[ka[1]]
        if a.height == 1:
            i = a.gen
            if isinstance(kb, int):
                return dict(self.lowering[(kb, i)])
            return self._mirror(self.raising[(kb[1], i)])
        g_key = ("m", self._gen_uid(a.gen))
        w_key = ("m", a.parent)
        t1 = self.left_mul(g_key, self.pair_bracket(w_key, kb))
        t2 = self.left_mul(w_key, self.pair_bracket(g_key, kb))
        sign_neg = self.key_parity(g_key) and self.key_parity(w_key)
        out = t1
        self._combine(out, t2, f.of(1 if sign_neg else -1))
        return out

    def _gen_uid(self, i: int) -> int:
        return i  # generators are created first, in order

    def generator(self, i: int) -> dict:
        return {self._gen_uid(i): self.field.one()}


def _unit(n, i):
    w = [0] * n
    w[i] = 1
    return tuple(w)


def with_field(d: CartanDatum, f: Field) -> CartanDatum:
    """Reinterpret the integer lift of a datum over another field."""
    if f == d.field:
        return d
    return make_datum(f, signed_lift(d), d.parity, d.even_zero)


def build(datum: CartanDatum, f: Field | None = None, max_height: int = 64,
          allow_incomplete: bool = False) -> GradedAlgebra:
    """Grow the positive part of the algebra of (A, I) by height.

    A candidate combination at a new weight survives exactly when some
    lowering operator acts nonzero on it; eliminated combinations are the
    layer of the maximal ideal missing the Cartan subalgebra.
    """
    if f is not None:
        datum = with_field(datum, f)
    datum = normalize(datum)
    g = GradedAlgebra(datum, max_height)
    field = g.field
    n = g.n
    for i in range(n):
        g._add_elem(_unit(n, i), datum.parity[i], i, None)
    for i in range(n):
        for j in range(n):
            if i == j:
                # [f_i, e_i] = -(-1)^{p_i} h_i
                coeff = field.of(1 if datum.parity[i] else -1)
                g.lowering[(i, j)] = {("h", i): coeff}
            else:
                g.lowering[(i, j)] = {}
    g.height_built = 1

    for h in range(2, max_height + 1):
        prev = [u for u in range(len(g.elems)) if g.elems[u].height == h - 1]
        weights = sorted({
            tuple(c + (1 if k == i else 0) for k, c in enumerate(g.elems[u].weight))
            for u in prev for i in range(n)
        })
        new_total = 0
        for beta in weights:
            new_total += _process_weight(g, beta)
        g.height_built = h
        if new_total == 0:
            g.complete = True
            break
    if not g.complete and not allow_incomplete:
        raise HeightExceeded(
            f"algebra still growing at height {max_height}", partial=g
        )
    return g


def _process_weight(g: GradedAlgebra, beta) -> int:
    """Reduce the candidate layer at one weight; returns the multiplicity."""
    field = g.field
    n = g.n
    candidates = []
    for i in range(n):
        if beta[i] == 0:
            continue
        gamma = tuple(c - (1 if k == i else 0) for k, c in enumerate(beta))
        for u in g.basis_at(gamma):
            candidates.append((i, u))
    if not candidates:
        return 0

    echelon: list[tuple[object, dict, dict]] = []   # (pivot, vec, combo over accepted)
    accepted = 0
    for (i, u) in candidates:
        lowvecs = {j: _lower_candidate(g, i, u, j) for j in range(n)}
        vec = {}
        for j, exp in lowvecs.items():
            for key, c in exp.items():
                vec[(j, key)] = c
        combo_acc: dict[int, object] = {}
        for pivot, rvec, rcombo in echelon:
            c = vec.get(pivot)
            if c:
                g._combine(vec, rvec, field.neg(c))
                vec.pop(pivot, None)
                g._combine(combo_acc, rcombo, c)
        if vec:
            uid = g._add_elem(
                beta, sum(c * p for c, p in zip(beta, g.datum.parity)) % 2, i, u
            )
            for j in range(n):
                g.lowering[(uid, j)] = lowvecs[j]
            g.raising[(u, i)] = {uid: field.one()}
            pivot = min(vec, key=_pivot_order)
            scale = field.inv(vec[pivot])
            rvec = {k: field.mul(scale, c) for k, c in vec.items()}
            rcombo = {uid: scale}
            g._combine(rcombo, combo_acc, field.neg(scale))
            echelon.append((pivot, rvec, rcombo))
            accepted += 1
        else:
            g.raising[(u, i)] = combo_acc
    return accepted


def _pivot_order(key):
    j, inner = key
    if isinstance(inner, int):
        return (j, 0, inner)
    return (j, 1, inner[1])


def _lower_candidate(g: GradedAlgebra, i: int, u: int, j: int) -> dict:
    """[f_j, [e_i, u]] expanded in the built layers below."""
    field = g.field
    out = {}
    if i == j:
        # [[f_i, e_i], u] = -(-1)^{p_i} eig(i, wt(u)) u
        sign = field.of(1 if g.datum.parity[i] else -1)
        v = field.mul(sign, g.eig(i, g.elems[u].weight))
        if v:
            out[u] = v
    sign = field.of(
        -1 if (g.datum.parity[i] and g.datum.parity[j]) else 1
    )
    for key, c in g.lowering[(u, j)].items():
        coeff = field.mul(sign, c)
        if isinstance(key, int):
            g._combine(out, g.raising[(key, i)], coeff)
        else:
            # [e_i, h_t] = -A[t][i] e_i
            t = key[1]
            v = field.mul(coeff, field.neg(g._A[t][i]))
            if v:
                out[g._gen_uid(i)] = field.add(out.get(g._gen_uid(i), field.zero()), v)
                if not out[g._gen_uid(i)]:
                    out.pop(g._gen_uid(i))
    return out


def report(g: GradedAlgebra) -> AlgebraReport:
    """Superdimensions, center and the root list of a completed build."""
    if not g.complete:
        raise Incomplete("report requires a completed algebra")
    n = g.n
    field = g.field
    l = gf.rank(field, g._A)
    e_pos = sum(1 for e in g.elems if e.parity == 0)
    o_pos = len(g.elems) - e_pos
    center = n - l
    roots = sorted(
        (
            (w, len(uids), sum(c * p for c, p in zip(w, g.datum.parity)) % 2)
            for w, uids in g.weights.items()
        ),
        key=lambda t: (sum(t[0]), t[0]),
    )
    return AlgebraReport(
        sdim_full=(2 * n - l + 2 * e_pos, 2 * o_pos),
        sdim_derived=(n + 2 * e_pos, 2 * o_pos),
        center_dim_derived=center,
        sdim_simple=(n + 2 * e_pos - center, 2 * o_pos),
        positive_root_count=len(g.elems),
        roots=roots,
    )


def maximal_root(g: GradedAlgebra):
    """Coefficients, eigenvalue vector and a representative word of the
    unique top-height weight."""
    if not g.complete:
        raise Incomplete("maximal root requires a completed algebra")
    top = max(e.height for e in g.elems)
    tops = sorted(w for w in g.weights if sum(w) == top)
    if len(tops) != 1:
        raise NotUnique(f"{len(tops)} weights at top height {top}")
    coeffs = tops[0]
    eigen = [g.eig(t, coeffs) for t in range(g.n)]
    rep = g.word(g.weights[coeffs][0])
    return coeffs, eigen, rep
