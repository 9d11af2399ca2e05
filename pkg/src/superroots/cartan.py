"""The pair (A, I): a square matrix over the working field plus root parities.

Covers normalization, equivalence up to index permutation and row
rescaling, node classification, Serre exponents, Dynkin-Kac diagrams and
exact inversion.  A diagonal entry can be a genuine 0 (odd "grey" root)
or the empty marker for an even root with no self-pairing; the two are
kept distinct.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from . import gf
from .errors import MalformedRow, Singular
from .gf import Field


@dataclass(frozen=True)
class CartanDatum:
    """n x n matrix over `field` with a parity bit per simple root.

    `even_zero[i]` marks an even row whose diagonal is the empty marker
    (stored as the scalar 0 in `entries`).
    """

    field: Field
    entries: tuple[tuple[object, ...], ...]
    parity: tuple[int, ...]
    even_zero: tuple[bool, ...]

    def __post_init__(self):
        n = self.n
        if len(self.parity) != n or len(self.even_zero) != n:
            raise ValueError("parity/even_zero length must equal matrix size")
        for i in range(n):
            if len(self.entries[i]) != n:
                raise ValueError("matrix is not square")
            if self.even_zero[i] and (self.parity[i] != 0 or self.entries[i][i]):
                raise ValueError("empty-diagonal marker requires an even root with 0 entry")

    @property
    def n(self) -> int:
        return len(self.entries)

    def row(self, i):
        return self.entries[i]


def make_datum(field: Field, rows, parity, even_zero=None) -> CartanDatum:
    n = len(rows)
    ez = tuple(even_zero) if even_zero is not None else (False,) * n
    entries = tuple(tuple(field.of(x) for x in row) for row in rows)
    return CartanDatum(field, entries, tuple(int(b) for b in parity), ez)


def normalize(d: CartanDatum) -> CartanDatum:
    """Rescale rows so even diagonals become 2 and odd nonzero diagonals 1.

    Rows with zero diagonal (grey or empty) admit any nonzero factor and
    are left untouched, so normalize is idempotent and fixes every
    matrix already printed in normalized form.
    """
    f = d.field
    rows = []
    for i in range(d.n):
        diag = d.entries[i][i]
        if not diag:
            rows.append(list(d.entries[i]))
            continue
        target = f.of(1) if d.parity[i] else f.of(2)
        scale = f.div(target, diag)
        rows.append([f.mul(scale, x) for x in d.entries[i]])
    return make_datum(f, rows, d.parity, d.even_zero)


@dataclass(frozen=True)
class Witness:
    """Index permutation and row scalars carrying one datum to another.

    target[i][j] = scalars[i] * source[perm[i]][perm[j]].
    """

    perm: tuple[int, ...]
    scalars: tuple[object, ...]


def apply_witness(d: CartanDatum, w: Witness) -> CartanDatum:
    f = d.field
    rows = [
        [f.mul(w.scalars[i], d.entries[w.perm[i]][w.perm[j]]) for j in range(d.n)]
        for i in range(d.n)
    ]
    parity = [d.parity[w.perm[i]] for i in range(d.n)]
    ez = [d.even_zero[w.perm[i]] for i in range(d.n)]
    return make_datum(f, rows, parity, ez)


def _row_profile(d: CartanDatum, i: int):
    zeros = tuple(bool(x) for x in d.entries[i])
    return (d.parity[i], d.even_zero[i], d.entries[i][i], sum(zeros))


def equivalent(a: CartanDatum, b: CartanDatum) -> Witness | None:
    """Witness mapping `a` to `b` by index permutation plus row rescaling.

    Exhaustive over permutations (n <= 7 here) with per-row profile
    pruning; scalars are forced by the first nonzero entry of each row.
    """
    if a.field != b.field or a.n != b.n:
        return None
    n = a.n
    profs_a = [_row_profile(a, i) for i in range(n)]
    profs_b = [_row_profile(b, i) for i in range(n)]
    if sorted(profs_a) != sorted(profs_b):
        return None
    f = a.field

    def check(perm):
        scalars = []
        for i in range(n):
            si = perm[i]
            lam = None
            for j in range(n):
                x = a.entries[si][perm[j]]
                y = b.entries[i][j]
                if bool(x) != bool(y):
                    return None
                if x and lam is None:
                    lam = f.div(y, x)
                elif x and f.mul(lam, x) != y:
                    return None
            scalars.append(lam if lam is not None else f.one())
        return Witness(tuple(perm), tuple(scalars))

    candidates = [
        [s for s in range(n) if profs_a[s] == profs_b[i]] for i in range(n)
    ]
    for perm in itertools.permutations(range(n)):
        if all(perm[i] in candidates[i] for i in range(n)):
            w = check(perm)
            if w is not None:
                return w
    return None


class NodeKind(Enum):
    GREY = "grey"          # odd, zero diagonal
    BLACK = "black"        # odd, diagonal 1
    WHITE = "white"        # even, diagonal 2
    STAR = "star"          # even, empty diagonal

    @property
    def glyph(self) -> str:
        return {"grey": "⊗", "black": "●", "white": "○", "star": "✻"}[self.value]


_NODE_TAGS = {
    NodeKind.GREY: "sl(1|1)",
    NodeKind.BLACK: "osp(1|2)",
    NodeKind.WHITE: "sl(2)",
    NodeKind.STAR: "heisenberg",
}


def classify_node(d: CartanDatum, i: int) -> tuple[NodeKind, str]:
    """Node kind of root i of a normalized datum, with its rank-1 subalgebra tag."""
    diag = d.entries[i][i]
    if d.parity[i]:
        kind = NodeKind.GREY if not diag else NodeKind.BLACK
        if diag and diag != d.field.of(1):
            raise MalformedRow(f"odd row {i + 1} has diagonal {diag}, expected 0 or 1")
    else:
        if d.even_zero[i]:
            kind = NodeKind.STAR
        elif diag == d.field.of(2):
            kind = NodeKind.WHITE
        else:
            raise MalformedRow(f"even row {i + 1} has diagonal {diag}, expected 2 or empty")
    return kind, _NODE_TAGS[kind]


def signed_lift(d: CartanDatum) -> list[list[int]]:
    """Integer matrix lifting entries: diagonal to its canonical residue,
    nonzero off-diagonal entries to negative representatives."""
    f = d.field
    out = []
    for i in range(d.n):
        row = []
        for j in range(d.n):
            x = d.entries[i][j]
            if f.p == 0:
                if x.denominator != 1:
                    raise ValueError(f"entry {x} is not an integer")
                row.append(int(x))
            elif i == j:
                row.append(int(x))
            else:
                row.append(int(x) - f.p if x else 0)
        out.append(row)
    return out


@dataclass(frozen=True)
class SerreExponents:
    """Bracket-length data for the standard higher relations.

    k[i][j] (i != j) is the ad-power annihilating generator j under
    generator i; self_square marks odd zero-diagonal rows, self_cube odd
    diagonal-1 rows at characteristic 3.
    """

    b: tuple[tuple[int, ...], ...]
    k: tuple[tuple[int, ...], ...]
    self_square: tuple[bool, ...]
    self_cube: tuple[bool, ...]


def serre_exponents(d: CartanDatum) -> SerreExponents:
    n = d.n
    lift = signed_lift(d)
    b = []
    for i in range(n):
        diag = d.entries[i][i]
        if not diag:
            row = [(-1 if lift[i][j] else 0) for j in range(n)]
            row[i] = 0
        elif d.parity[i]:
            row = [2 * x for x in lift[i]]
        else:
            row = list(lift[i])
        b.append(row)
    k = [
        [1 - b[i][j] if i != j else 0 for j in range(n)]
        for i in range(n)
    ]
    for i in range(n):
        for j in range(n):
            if i != j and k[i][j] < 1:
                raise MalformedRow(
                    f"entry A[{i + 1}][{j + 1}] lifts to a positive value; "
                    "matrix is not in normalized form"
                )
    self_square = tuple(bool(d.parity[i]) and not d.entries[i][i] for i in range(n))
    self_cube = tuple(
        d.field.p == 3 and bool(d.parity[i]) and bool(d.entries[i][i])
        for i in range(n)
    )
    return SerreExponents(
        tuple(tuple(r) for r in b), tuple(tuple(r) for r in k), self_square, self_cube
    )


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    multiplicity: int
    arrow_to: int | None      # index of the shorter root, None for no arrow
    grey_pair: bool           # both ends grey: labels carry the raw entries
    labels: tuple[int, int]   # lifted A_ij, A_ji


@dataclass(frozen=True)
class Diagram:
    kinds: tuple[NodeKind, ...]
    edges: tuple[Edge, ...]
    warnings: tuple[str, ...]

    def glyphs(self) -> str:
        return "".join(k.glyph for k in self.kinds)

    def text(self) -> str:
        lines = [
            " ".join(f"{i + 1}:{k.glyph}" for i, k in enumerate(self.kinds))
        ]
        for e in self.edges:
            arrow = "" if e.arrow_to is None else f" ->{e.arrow_to + 1}"
            extra = f" [{e.labels[0]},{e.labels[1]}]" if e.grey_pair else ""
            lines.append(f"{e.i + 1} -- {e.j + 1} x{e.multiplicity}{arrow}{extra}")
        lines.extend(f"warning: {w}" for w in self.warnings)
        return "\n".join(lines)

    def dot(self) -> str:
        out = ["graph dynkin {"]
        for i, k in enumerate(self.kinds):
            out.append(f'  n{i + 1} [label="{i + 1}:{k.glyph}"];')
        for e in self.edges:
            attrs = [f'label="{e.multiplicity}"'] if e.multiplicity > 1 else []
            if e.arrow_to is not None:
                attrs.append(f'taillabel=">{e.arrow_to + 1}"')
            if e.grey_pair:
                attrs.append(f'xlabel="({e.labels[0]},{e.labels[1]})"')
            attr = f" [{', '.join(attrs)}]" if attrs else ""
            out.append(f"  n{e.i + 1} -- n{e.j + 1}{attr};")
        out.append("}")
        return "\n".join(out)


def diagram(d: CartanDatum) -> Diagram:
    """Dynkin-Kac diagram of a normalized datum.

    Edge multiplicity is the larger absolute lifted entry of the pair;
    an arrow points at the root with the smaller one.  Adjacent grey
    nodes are flagged: the matrix is not recoverable from the picture.
    """
    n = d.n
    kinds = tuple(classify_node(d, i)[0] for i in range(n))
    lift = signed_lift(d)
    edges = []
    warnings = []
    for i in range(n):
        for j in range(i + 1, n):
            a, b = lift[i][j], lift[j][i]
            if not a and not b:
                continue
            grey_pair = kinds[i] == NodeKind.GREY and kinds[j] == NodeKind.GREY
            mult = max(abs(a), abs(b))
            arrow = None
            if abs(a) != abs(b) and not grey_pair:
                arrow = j if abs(a) < abs(b) else i
            edges.append(Edge(i, j, mult, arrow, grey_pair, (a, b)))
            if grey_pair:
                warnings.append(
                    f"grey nodes {i + 1},{j + 1} adjacent: entries ({a},{b}) kept as labels"
                )
    return Diagram(kinds, tuple(edges), tuple(warnings))


def invert(d: CartanDatum) -> list[list]:
    """Exact inverse of the matrix; Singular signals a degenerate datum."""
    try:
        return gf.inverse(d.field, [list(r) for r in d.entries])
    except Singular:
        raise Singular(
            f"Cartan matrix is degenerate (rank {gf.rank(d.field, d.entries)} < {d.n})"
        ) from None


# --- matrix file format ------------------------------------------------
#
# line 1: p=<int>
# line 2: parity=<n space-separated 0/1>
# then n rows of n whitespace-separated tokens, each an integer or `*`
# for the empty diagonal marker.  `#` starts a comment.

def parse_matrix_file(text: str) -> CartanDatum:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if len(lines) < 2 or not lines[0].startswith("p=") or not lines[1].startswith("parity="):
        raise ValueError("matrix file must start with p=<int> and parity=<bits>")
    field = Field(int(lines[0][2:]))
    parity = [int(t) for t in lines[1][len("parity="):].split()]
    n = len(parity)
    if len(lines) != 2 + n:
        raise ValueError(f"expected {n} matrix rows, found {len(lines) - 2}")
    rows, even_zero = [], [False] * n
    for i, line in enumerate(lines[2:]):
        toks = line.split()
        if len(toks) != n:
            raise ValueError(f"row {i + 1} has {len(toks)} entries, expected {n}")
        row = []
        for j, t in enumerate(toks):
            if t == "*":
                if i != j:
                    raise ValueError("`*` is only valid on the diagonal")
                even_zero[i] = True
                row.append(0)
            else:
                row.append(int(t))
        rows.append(row)
    return make_datum(field, rows, parity, even_zero)


def format_matrix_file(d: CartanDatum, lift_entries: bool = True) -> str:
    """Render a datum in the matrix file format (lifted signed entries)."""
    lines = [f"p={d.field.p}", "parity=" + " ".join(map(str, d.parity))]
    ints = signed_lift(d) if lift_entries else [[int(x) for x in row] for row in d.entries]
    width = max(len(str(x)) for row in ints for x in row)
    for i, row in enumerate(ints):
        toks = ["*" if (j == i and d.even_zero[i]) else str(x) for j, x in enumerate(row)]
        lines.append(" ".join(t.rjust(width) for t in toks))
    return "\n".join(lines) + "\n"
