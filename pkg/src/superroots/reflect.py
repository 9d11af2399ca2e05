"""Odd reflections of simple-root systems and closure enumeration.

A reflection is taken in an odd root with zero diagonal.  The reflected
Cartan matrix is read off inside the algebra: the new generator triples
are formed at height <= 2 and the matrix entries are the eigenvalues of
the new Cartan elements h'_j = [e'_j, f'_j] on the new simple roots.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import build
from .cartan import CartanDatum, Witness, diagram, equivalent, make_datum, normalize
from .errors import Diverged, MalformedRow, NotApplicable


@dataclass(frozen=True)
class ReflectionStep:
    source: CartanDatum
    root_index: int                     # zero-based
    target: CartanDatum
    new_simple_roots: tuple[tuple[int, ...], ...]   # in the source basis


def applicable(d: CartanDatum, i: int) -> bool:
    return bool(d.parity[i]) and not d.entries[i][i]


def odd_reflect(d: CartanDatum, i: int) -> ReflectionStep:
    """Reflect the simple-root system in grey root i (zero-based)."""
    d = normalize(d)
    if not applicable(d, i):
        raise NotApplicable(
            f"root {i + 1} is not odd with zero diagonal; reflection undefined"
        )
    n = d.n
    f = d.field
    A = d.entries
    for j in range(n):
        if j != i and bool(A[i][j]) != bool(A[j][i]):
            raise MalformedRow(
                f"zero pattern of row/column {i + 1} is asymmetric at {j + 1}; "
                "the root action and the generator map would disagree"
            )

    g = build(d, max_height=2, allow_incomplete=True)

    roots = []
    for j in range(n):
        alpha = [0] * n
        if j == i:
            alpha[i] = -1
        else:
            alpha[j] = 1
            if A[j][i]:
                alpha[i] = 1
        roots.append(tuple(alpha))

    h_new = []
    for j in range(n):
        if j == i or not A[i][j]:
            # [f_i, e_i] = h_i for an odd root; untouched generators keep h_j
            h_new.append({("h", j): f.one()})
            continue
        e_new = g.raising[(j, i)]
        f_new = {("m", u): c for u, c in e_new.items()}
        h_new.append(g.bracket(e_new, f_new))

    rows = []
    for j in range(n):
        row = []
        for k in range(n):
            acc = f.zero()
            for key, c in h_new[j].items():
                acc = f.add(acc, f.mul(c, g.eig(key[1], roots[k])))
            row.append(acc)
        rows.append(row)

    parity = [
        (d.parity[j] + (d.parity[i] if (j != i and A[j][i]) else 0)) % 2
        for j in range(n)
    ]
    even_zero = [parity[j] == 0 and not rows[j][j] for j in range(n)]
    target = normalize(make_datum(f, rows, parity, even_zero))
    return ReflectionStep(d, i, target, tuple(roots))


@dataclass
class ReflectionTable:
    """Closure of a seed under all applicable odd reflections.

    `table[c][i]` is the 1-based class index reached from class c by
    reflecting in root i, or None where the reflection does not apply.
    """

    classes: list[CartanDatum]
    table: list[list[int | None]]
    deduplicated: bool

    def as_dict(self):
        from .cartan import format_matrix_file

        return {
            "classes": [
                {
                    "index": c + 1,
                    "matrix": format_matrix_file(d).splitlines(),
                    "diagram": diagram(d).glyphs(),
                }
                for c, d in enumerate(self.classes)
            ],
            "table": self.table,
        }


def _exact_key(d: CartanDatum):
    return (d.entries, d.parity, d.even_zero)


def _equiv_invariant(d: CartanDatum):
    rows = []
    for i in range(d.n):
        pattern = tuple(sorted(bool(x) for x in d.entries[i]))
        col = tuple(sorted(bool(d.entries[j][i]) for j in range(d.n)))
        rows.append((d.parity[i], d.even_zero[i], d.entries[i][i], pattern, col))
    return tuple(sorted(rows))


def enumerate_classes(seed: CartanDatum, keep_redundant: bool = False,
                      cap: int = 64) -> ReflectionTable:
    """Breadth-first closure of `seed` under odd reflections.

    Classes are deduplicated up to equivalence (or up to literal equality
    with `keep_redundant`); numbering is discovery order with the seed
    first.
    """
    seed = normalize(seed)
    classes = [seed]
    keys = {_exact_key(seed): 0}
    buckets: dict = {_equiv_invariant(seed): [0]}
    table: list[list[int | None]] = []
    c = 0
    while c < len(classes):
        d = classes[c]
        row: list[int | None] = []
        for i in range(d.n):
            if not applicable(d, i):
                row.append(None)
                continue
            target = odd_reflect(d, i).target
            idx = keys.get(_exact_key(target))
            if idx is None and not keep_redundant:
                for j in buckets.get(_equiv_invariant(target), []):
                    if equivalent(classes[j], target) is not None:
                        idx = j
                        break
            if idx is None:
                if len(classes) >= cap:
                    raise Diverged(f"more than {cap} classes reached from the seed")
                idx = len(classes)
                classes.append(target)
                keys[_exact_key(target)] = idx
                buckets.setdefault(_equiv_invariant(target), []).append(idx)
            row.append(idx + 1)
        table.append(row)
        c += 1
    return ReflectionTable(classes, table, not keep_redundant)


def reflection_graph_dot(t: ReflectionTable) -> str:
    """One node per class, one dashed edge per applicable reflection."""
    out = ["digraph reflections {"]
    for c, d in enumerate(t.classes):
        out.append(f'  c{c + 1} [label="{c + 1}: {diagram(d).glyphs()}"];')
    for c, row in enumerate(t.table):
        for i, cell in enumerate(row):
            if cell is not None:
                out.append(f'  c{c + 1} -> c{cell} [style=dashed, label="{i + 1}"];')
    out.append("}")
    return "\n".join(out)


def table_isomorphism(printed: list[list[int | None]],
                      printed_data: list[CartanDatum],
                      t: ReflectionTable) -> list[int] | None:
    """Map printed matrices onto enumerated classes compatibly with both
    reflection tables; returns the (possibly non-injective) class map as
    1-based indices, or None if no witness-consistent map exists.

    The printed table may keep equivalent duplicates, so the map can
    collapse rows; cells must agree under the per-row equivalence
    witnesses' index permutations.
    """
    phi: list[int] = []
    perms: list[Witness] = []
    for d in printed_data:
        hit = None
        for c, cls in enumerate(t.classes):
            w = equivalent(cls, d)
            if w is not None:
                hit = (c, w)
                break
        if hit is None:
            return None
        phi.append(hit[0] + 1)
        perms.append(hit[1])
    for r, row in enumerate(printed):
        c = phi[r] - 1
        w = perms[r]
        for i, cell in enumerate(row):
            # printed root i corresponds to root perm[i] of the enumerated class
            ours = t.table[c][w.perm[i]]
            if (cell is None) != (ours is None):
                return None
            if cell is not None and phi[cell - 1] != ours:
                return None
    return phi
