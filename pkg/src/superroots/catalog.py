"""Embedded transcription of the printed data for the ten algebras.

One corpus file per algebra: all its matrices with parities, the
reflection table, the non-Serre relation lists, the maximal-root data
and the inverse matrices where printed.  Values that fail their own
consistency check as printed carry an erratum note plus the recomputed
value; nothing is silently corrected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from importlib import resources

from .cartan import CartanDatum, make_datum
from .errors import CorpusCorrupt, NotFound
from .gf import Field
from .relations import Relation, parse

NAMES = (
    "g(2,3)", "g(1,6)", "g(3,6)", "g(3,3)", "g(4,3)",
    "g(2,6)", "g(8,3)", "g(4,6)", "g(6,6)", "g(8,6)",
)

_FILES = {
    "g(2,3)": "g2_3.txt", "g(1,6)": "g1_6.txt", "g(3,6)": "g3_6.txt",
    "g(3,3)": "g3_3.txt", "g(4,3)": "g4_3.txt", "g(2,6)": "g2_6.txt",
    "g(8,3)": "g8_3.txt", "g(4,6)": "g4_6.txt", "g(6,6)": "g6_6.txt",
    "g(8,6)": "g8_6.txt",
}

EXPECTED_COUNTS = dict(zip(NAMES, (5, 2, 7, 10, 10, 6, 21, 7, 21, 8)))


@dataclass
class MaxRoot:
    coeffs: tuple[int, ...]
    weight: tuple[int, ...]
    coeffs_erratum: str | None = None
    coeffs_computed: tuple[int, ...] | None = None
    weight_erratum: str | None = None
    weight_computed: tuple[int, ...] | None = None

    def best_coeffs(self):
        return self.coeffs_computed if self.coeffs_erratum else self.coeffs

    def best_weight(self):
        return self.weight_computed if self.weight_erratum else self.weight


@dataclass
class InverseEntry:
    printed: tuple[tuple[int, ...], ...]
    erratum: str | None = None
    computed: tuple[tuple[int, ...], ...] | None = None

    def best(self):
        return self.computed if self.erratum else self.printed


@dataclass
class CatalogEntry:
    name: str
    p: int
    n: int
    count: int
    headline_sdim: tuple[int, int]
    headline_means: str                # derived | simple | unresolved
    degenerate: bool
    raw_matrices: list[list[list[int]]]
    matrices: list[CartanDatum]
    parities: list[tuple[int, ...]]
    table: list[list[int | None]]
    relations: list[list[Relation]]
    maxroots: list[MaxRoot]
    inverses: list[InverseEntry | None]
    source: str

    def datum(self, index: int) -> CartanDatum:
        return self.matrices[index - 1]


_cache: list[CatalogEntry] | None = None


def _read_corpus(fname: str) -> str:
    return resources.files("superroots.corpus").joinpath(fname).read_text()


def _int_row(line: str) -> list[int]:
    return [int(t) for t in line.split()]


_SECTION = re.compile(r"\[(\w+)(?:\s+(\d+))?\]")


def _parse_corpus(name: str, text: str) -> CatalogEntry:
    head: dict[str, str] = {}
    sections: list[tuple[str, int | None, list[str]]] = []
    current: list[str] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _SECTION.fullmatch(line.strip())
        if m:
            current = []
            sections.append((m.group(1), int(m.group(2)) if m.group(2) else None, current))
        elif current is not None:
            current.append(line.strip())
        else:
            if "=" not in line:
                raise CorpusCorrupt(f"{name}: line {lineno}: expected key = value")
            k, v = line.split("=", 1)
            head[k.strip()] = v.strip()

    try:
        p = int(head["p"])
        n = int(head["n"])
        count = int(head["count"])
        sdim = tuple(int(x) for x in head["headline_sdim"].split("|"))
        means = head.get("headline_means", "unresolved")
        degenerate = head.get("degenerate", "no") == "yes"
    except KeyError as e:
        raise CorpusCorrupt(f"{name}: missing header key {e}") from None
    field = Field(p)

    raws: dict[int, list[list[int]]] = {}
    pars: dict[int, tuple[int, ...]] = {}
    table: list[list[int | None]] = []
    rels: dict[int, list[Relation]] = {}
    maxroots: dict[int, MaxRoot] = {}
    inverses: dict[int, InverseEntry] = {}
    inv_computed: dict[int, tuple] = {}

    for kind, idx, lines in sections:
        if kind == "matrix":
            kv = {k.strip(): v.strip() for k, v in
                  (l.split("=", 1) for l in lines if "=" in l)}
            rows = [_int_row(l) for l in lines if "=" not in l]
            if len(rows) != n or any(len(r) != n for r in rows):
                raise CorpusCorrupt(f"{name}: matrix {idx} is not {n}x{n}")
            raws[idx] = rows
            pars[idx] = tuple(int(t) for t in kv["parity"].split())
        elif kind == "table":
            for l in lines:
                row = [None if t == "-" else int(t) for t in l.split()]
                if len(row) != n:
                    raise CorpusCorrupt(f"{name}: table row has {len(row)} cells")
                table.append(row)
        elif kind == "relations":
            out = []
            for l in lines:
                out.append(Relation(l, parse(l, n), "paper-nonserre"))
            rels[idx] = out
        elif kind == "maxroot":
            kv = {k.strip(): v.strip() for k, v in
                  (l.split("=", 1) for l in lines)}
            maxroots[idx] = MaxRoot(
                coeffs=tuple(int(t) for t in kv["coeffs"].split()),
                weight=tuple(int(t) for t in kv["weight"].split()),
                coeffs_erratum=kv.get("coeffs_erratum"),
                coeffs_computed=tuple(int(t) for t in kv["coeffs_computed"].split())
                if "coeffs_computed" in kv else None,
                weight_erratum=kv.get("weight_erratum"),
                weight_computed=tuple(int(t) for t in kv["weight_computed"].split())
                if "weight_computed" in kv else None,
            )
        elif kind == "inverse":
            note = None
            rows = []
            for l in lines:
                if l.startswith("erratum"):
                    note = l.split("=", 1)[1].strip()
                else:
                    rows.append(_int_row(l))
            if len(rows) != n or any(len(r) != n for r in rows):
                raise CorpusCorrupt(f"{name}: inverse {idx} is not {n}x{n}")
            inverses[idx] = InverseEntry(tuple(tuple(r) for r in rows), note)
        elif kind == "inverse_computed":
            rows = [_int_row(l) for l in lines]
            inv_computed[idx] = tuple(tuple(r) for r in rows)
        else:
            raise CorpusCorrupt(f"{name}: unknown section [{kind}]")

    for idx, rows in inv_computed.items():
        if idx not in inverses:
            raise CorpusCorrupt(f"{name}: computed inverse {idx} without printed entry")
        inverses[idx].computed = rows

    if sorted(raws) != list(range(1, count + 1)):
        raise CorpusCorrupt(f"{name}: expected matrices 1..{count}, found {sorted(raws)}")
    if len(table) != count:
        raise CorpusCorrupt(f"{name}: table has {len(table)} rows, expected {count}")
    if sorted(maxroots) != list(range(1, count + 1)):
        raise CorpusCorrupt(f"{name}: maximal roots incomplete")
    for idx in range(1, count + 1):
        rels.setdefault(idx, [])

    matrices = [
        make_datum(field, raws[i], pars[i]) for i in range(1, count + 1)
    ]
    return CatalogEntry(
        name=name, p=p, n=n, count=count, headline_sdim=sdim,
        headline_means=means, degenerate=degenerate,
        raw_matrices=[raws[i] for i in range(1, count + 1)],
        matrices=matrices,
        parities=[pars[i] for i in range(1, count + 1)],
        table=table,
        relations=[rels[i] for i in range(1, count + 1)],
        maxroots=[maxroots[i] for i in range(1, count + 1)],
        inverses=[inverses.get(i) for i in range(1, count + 1)],
        source=text,
    )


def load() -> list[CatalogEntry]:
    """All ten catalog entries, in the printed order; cached."""
    global _cache
    if _cache is None:
        entries = []
        for name in NAMES:
            entry = _parse_corpus(name, _read_corpus(_FILES[name]))
            if entry.count != EXPECTED_COUNTS[name]:
                raise CorpusCorrupt(
                    f"{name}: {entry.count} matrices, expected {EXPECTED_COUNTS[name]}"
                )
            entries.append(entry)
        _cache = entries
    return _cache


def entry(name: str) -> CatalogEntry:
    for e in load():
        if e.name == name:
            return e
    raise NotFound(f"no catalog algebra named {name!r} (known: {', '.join(NAMES)})")


def lookup(name: str, index: int):
    """(datum, relations, maxroot, inverse-or-None) for one catalog slot."""
    e = entry(name)
    if not 1 <= index <= e.count:
        raise NotFound(f"{name} has matrices 1..{e.count}, not {index}")
    i = index - 1
    return e.matrices[i], e.relations[i], e.maxroots[i], e.inverses[i]


def parse_slot(spec: str) -> tuple[str, int]:
    """Split 'g(2,3)/1' into name and index."""
    if "/" not in spec:
        raise NotFound(f"expected NAME/INDEX, got {spec!r}")
    name, _, idx = spec.rpartition("/")
    if not idx.isdigit():
        raise NotFound(f"index in {spec!r} must be a positive integer")
    return name, int(idx)
