"""Embedded catalog of example groups with recorded pattern fixtures.

Data layout (under ``apat/data/``):

    catalog.json   {"schema": "apat-catalog/1", "entries": [...]}
    catalog/*.pc   one pc presentation per entry
    forest.json    descent edges between the catalogued identifiers

An entry records a SmallGroups-style identifier ``<order>.<number>``,
the presentation file, a designated generator pair (x, y) as exponent
vectors (when the group has one of the digit-encodable abelianization
shapes), and fixture values.  Every fixture carries a provenance tag:

    paper-example   value printed in the source example being reproduced
    oracle-derived  value computed and frozen by the derivation tooling

so a failing golden test can report exactly which authority it
contradicts.  Entries may also carry ``flags`` (machine-readable
anomaly markers, e.g. a suspected transposed display in the printed
source of a tau fixture) and free-text ``notes``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .pcgroup import PcGroup, parse_pc, check_consistency, DEFAULT_ENUM_BOUND
from .core import is_isomorphic_small

DATA_DIR = Path(__file__).resolve().parent / "data"
CATALOG_SCHEMA = "apat-catalog/1"


class CatalogError(KeyError):
    """Unknown id, missing data file, or corrupt embedded data."""


def enumeration_bound():
    """Effective element bound; ``APAT_MAX_ORDER`` overrides the default."""
    raw = os.environ.get("APAT_MAX_ORDER")
    if raw is None:
        return DEFAULT_ENUM_BOUND
    try:
        value = int(raw)
    except ValueError:
        raise CatalogError("APAT_MAX_ORDER must be an integer, got %r" % raw)
    if value < 1:
        raise CatalogError("APAT_MAX_ORDER must be positive")
    return value


@dataclass
class CatalogEntry:
    """One catalogued group: identifier, presentation, fixtures."""

    id: str
    order: int
    file: str
    aliases: list
    x_vec: tuple          # exponent vector of the designated x, or None
    y_vec: tuple
    note: str
    fixtures: dict        # name -> {"value": ..., "provenance": ...}
    flags: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    _pres: object = None
    _group: object = None

    @property
    def presentation(self):
        if self._pres is None:
            path = DATA_DIR / self.file
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise CatalogError(
                    "presentation file %s missing for %s" % (path, self.id)
                ) from exc
            blocks = parse_pc(text)
            if len(blocks) != 1:
                raise CatalogError(
                    "%s: expected one presentation block" % self.file)
            self._pres = blocks[0]
        return self._pres

    def group(self, bound=None):
        """The verified PcGroup: consistency holds, order matches the id."""
        if self._group is None:
            if bound is None:
                bound = enumeration_bound()
            report = check_consistency(self.presentation, bound=bound)
            if not report:
                raise CatalogError(
                    "%s: embedded presentation is inconsistent (witness %r)"
                    % (self.id, report.witness))
            if report.order != self.order:
                raise CatalogError(
                    "%s: presentation has order %d, id says %d"
                    % (self.id, report.order, self.order))
            self._group = PcGroup(self.presentation, bound=bound)
        return self._group

    def designated(self):
        """Element ids of the designated generator pair, or (None, None)."""
        if self.x_vec is None or self.y_vec is None:
            return None, None
        G = self.group()
        return G.id_of(tuple(self.x_vec)), G.id_of(tuple(self.y_vec))

    def fixture(self, name):
        rec = self.fixtures.get(name)
        return None if rec is None else rec["value"]

    def provenance(self, name):
        rec = self.fixtures.get(name)
        return None if rec is None else rec["provenance"]


_CACHE = {}


def catalog_load():
    """All catalog entries, in file order.  Parsed once per process."""
    if "entries" not in _CACHE:
        path = DATA_DIR / "catalog.json"
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise CatalogError("catalog data missing at %s" % path) from exc
        except json.JSONDecodeError as exc:
            raise CatalogError("catalog.json is corrupt: %s" % exc) from exc
        if data.get("schema") != CATALOG_SCHEMA:
            raise CatalogError(
                "unexpected catalog schema %r" % data.get("schema"))
        entries = []
        for row in data["entries"]:
            entries.append(CatalogEntry(
                id=row["id"],
                order=int(row["order"]),
                file=row["file"],
                aliases=list(row.get("aliases", ())),
                x_vec=tuple(row["x"]) if row.get("x") is not None else None,
                y_vec=tuple(row["y"]) if row.get("y") is not None else None,
                note=row.get("note", ""),
                fixtures=row.get("fixtures", {}),
                flags=list(row.get("flags", ())),
                notes=list(row.get("notes", ())),
            ))
        byname = {}
        for e in entries:
            for key in [e.id] + e.aliases:
                k = key.lower()
                if k in byname:
                    raise CatalogError("duplicate catalog key %r" % key)
                byname[k] = e
        _CACHE["entries"] = entries
        _CACHE["byname"] = byname
    return list(_CACHE["entries"])


def catalog_get(key):
    """Entry for an id like ``243.6`` or an alias like ``q8``."""
    catalog_load()
    entry = _CACHE["byname"].get(str(key).strip().lower())
    if entry is None:
        raise CatalogError("unknown catalog id %r" % key)
    return entry


def forest_path():
    return str(DATA_DIR / "forest.json")


def resolve_ref(ref):
    """Map a forest presentation-ref to (group, x, y) for searches."""
    catalog_load()
    for e in _CACHE["entries"]:
        if e.file == ref:
            x, y = e.designated()
            return e.group(), x, y
    raise CatalogError("presentation-ref %r matches no catalog entry" % ref)


def identify_group(G, candidates=None):
    """Catalog entry isomorphic to G, or None.

    Candidates are narrowed by order before the explicit isomorphism
    search runs, so the test stays affordable for parent quotients.
    """
    if candidates is None:
        candidates = catalog_load()
    pool = [e for e in candidates if e.order == G.order]
    for e in pool:
        if is_isomorphic_small(G, e.group()):
            return e
    return None
