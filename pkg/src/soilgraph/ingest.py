"""Workbook-tab ingestion: raw CSV tables to typed, uniquely keyed records.

A mapping dictionary standardizes raw column headers onto ontology
property names, synthesizes row UIDs by concatenating key columns, and
marks foreign-key columns that become graph links. Cell sentinels are
exact and case-sensitive: ``"NaN"`` marks a missing value, ``"None"`` an
empty one; everything else is data.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .ontology import Ontology

Scalar = str | float | int | bool | date

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


@dataclass(frozen=True)
class CellValue:
    """Exactly one of: a missing marker, an empty marker, or text."""

    kind: str  # 'missing' | 'empty' | 'value'
    text: str | None = None

    @property
    def is_missing(self) -> bool:
        return self.kind == "missing"

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"


MISSING = CellValue("missing")
EMPTY = CellValue("empty")


def normalize_missing(cell: str) -> CellValue:
    """Classify one raw cell: ``NaN`` missing, ``None`` empty, else a value.

    Matching is exact and case-sensitive; values are trimmed of
    surrounding whitespace.
    """
    if cell == "NaN":
        return MISSING
    if cell == "None":
        return EMPTY
    return CellValue("value", cell.strip())


@dataclass
class RawTable:
    """One workbook tab: ordered headers, cell-text rows, optional notes."""

    tab_name: str
    columns: list[str]
    rows: list[list[str]]
    notes: dict[str, str] | None = None
    uids: list[str] | None = None

    def __post_init__(self) -> None:
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(
                    f"{self.tab_name}: row {i} has {len(row)} cells, expected {width}"
                )

    def column(self, header: str) -> int:
        try:
            return self.columns.index(header)
        except ValueError:
            raise KeyError(f"{self.tab_name}: no column {header!r}") from None


@dataclass(frozen=True)
class LinkColumn:
    object_property: str
    target_class: str


@dataclass
class TabMapping:
    """How one tab maps onto the ontology."""

    target_class: str
    column_map: dict[str, str]
    key_columns: list[str]
    link_columns: dict[str, LinkColumn] = field(default_factory=dict)


MappingDictionary = dict[str, TabMapping]


@dataclass(frozen=True)
class IngestIssue:
    tab: str
    code: str
    message: str
    row: int | None = None
    column: str | None = None

    def __str__(self) -> str:
        where = self.tab
        if self.row is not None:
            where += f" row {self.row}"
        if self.column is not None:
            where += f" column {self.column!r}"
        return f"{where}: {self.code}: {self.message}"


class IngestError(Exception):
    """Raised when a tab cannot be normalized; carries every issue found."""

    def __init__(self, issues: list[IngestIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


@dataclass
class NormalizedRecord:
    """One typed row: uid, owning class, literal values, and link targets."""

    uid: str
    class_name: str
    values: dict[str, Scalar]
    links: dict[str, str] = field(default_factory=dict)


def load_mapping(path: str | Path) -> MappingDictionary:
    """Read a mapping dictionary from its JSON file format."""
    doc = json.loads(Path(path).read_text("utf-8"))
    return mapping_from_json(doc)


def mapping_from_json(doc: dict) -> MappingDictionary:
    mapping: MappingDictionary = {}
    for tab, spec in doc.items():
        links = {
            header: LinkColumn(entry["objectProperty"], entry["targetClass"])
            for header, entry in spec.get("linkColumns", {}).items()
        }
        mapping[tab] = TabMapping(
            target_class=spec["targetClass"],
            column_map=dict(spec.get("columnMap", {})),
            key_columns=list(spec.get("keyColumns", [])),
            link_columns=links,
        )
    return mapping


def mapping_to_json(mapping: MappingDictionary) -> dict:
    doc: dict = {}
    for tab, m in mapping.items():
        doc[tab] = {
            "targetClass": m.target_class,
            "columnMap": dict(m.column_map),
            "keyColumns": list(m.key_columns),
            "linkColumns": {
                header: {"objectProperty": lc.object_property, "targetClass": lc.target_class}
                for header, lc in m.link_columns.items()
            },
        }
    return doc


def validate_mapping(mapping: MappingDictionary, o: Ontology) -> list[IngestIssue]:
    """Check that every mapped target resolves in the ontology."""
    issues: list[IngestIssue] = []
    for tab, m in mapping.items():
        if m.target_class not in o.classes:
            issues.append(IngestIssue(tab, "unknown-class", f"target class {m.target_class!r} not declared"))
        if not m.key_columns:
            issues.append(IngestIssue(tab, "no-key-columns", "keyColumns must be non-empty"))
        seen_props: dict[str, str] = {}
        for header, prop in m.column_map.items():
            if prop in seen_props:
                issues.append(
                    IngestIssue(
                        tab,
                        "duplicate-target",
                        f"property {prop!r} mapped from both {seen_props[prop]!r} and {header!r}",
                    )
                )
            seen_props[prop] = header
            pdef = o.data_properties.get(prop)
            if pdef is None:
                issues.append(IngestIssue(tab, "unknown-property", f"{prop!r} not declared", column=header))
            elif pdef.domain != m.target_class:
                issues.append(
                    IngestIssue(
                        tab,
                        "domain-mismatch",
                        f"{prop!r} has domain {pdef.domain!r}, tab targets {m.target_class!r}",
                        column=header,
                    )
                )
        for header, link in m.link_columns.items():
            odef = o.object_properties.get(link.object_property)
            if odef is None:
                issues.append(
                    IngestIssue(tab, "unknown-property", f"{link.object_property!r} not declared", column=header)
                )
                continue
            if link.target_class not in o.classes:
                issues.append(
                    IngestIssue(tab, "unknown-class", f"link target {link.target_class!r} not declared", column=header)
                )
            ends = {odef.domain, odef.range}
            if not {m.target_class, link.target_class} <= ends:
                issues.append(
                    IngestIssue(
                        tab,
                        "domain-mismatch",
                        f"{link.object_property!r} relates {odef.domain!r} to {odef.range!r}, "
                        f"not {m.target_class!r} to {link.target_class!r}",
                        column=header,
                    )
                )
    return issues


def normalize_columns(t: RawTable, m: MappingDictionary) -> RawTable:
    """Replace raw headers with ontology names per the tab's mapping.

    Data columns take their mapped property name, foreign-key columns
    take their object-property name. Any header the mapping does not
    cover aborts the tab, reporting the full list of unknowns.
    """
    tab = m[t.tab_name]
    new_columns: list[str] = []
    unmapped: list[str] = []
    for header in t.columns:
        if header in tab.column_map:
            new_columns.append(tab.column_map[header])
        elif header in tab.link_columns:
            new_columns.append(tab.link_columns[header].object_property)
        else:
            unmapped.append(header)
            new_columns.append(header)
    if unmapped:
        raise IngestError(
            [IngestIssue(t.tab_name, "unmapped-header", f"no mapping for headers {unmapped}")]
        )
    return RawTable(t.tab_name, new_columns, t.rows, notes=t.notes, uids=t.uids)


def assign_uids(t: RawTable, key_columns: list[str]) -> RawTable:
    """Synthesize row UIDs by joining the key cells with ``_``.

    Key cells must be real values; duplicate UIDs report both offending
    row indices.
    """
    issues: list[IngestIssue] = []
    indices = []
    for header in key_columns:
        try:
            indices.append(t.column(header))
        except KeyError:
            issues.append(IngestIssue(t.tab_name, "missing-key-column", f"no column {header!r}"))
    if issues:
        raise IngestError(issues)

    uids: list[str] = []
    first_seen: dict[str, int] = {}
    for row_idx, row in enumerate(t.rows):
        parts: list[str] = []
        for header, col_idx in zip(key_columns, indices):
            cell = normalize_missing(row[col_idx])
            if cell.kind != "value" or cell.text == "":
                issues.append(
                    IngestIssue(
                        t.tab_name,
                        "missing-key-cell",
                        f"key cell is {cell.kind}",
                        row=row_idx,
                        column=header,
                    )
                )
                parts = []
                break
            parts.append(cell.text)
        if not parts:
            uids.append("")
            continue
        uid = "_".join(parts)
        if uid in first_seen:
            issues.append(
                IngestIssue(
                    t.tab_name,
                    "duplicate-uid",
                    f"uid {uid!r} synthesized by rows {first_seen[uid]} and {row_idx}",
                    row=row_idx,
                )
            )
        else:
            first_seen[uid] = row_idx
        uids.append(uid)

    if issues:
        raise IngestError(issues)
    return RawTable(t.tab_name, t.columns, t.rows, notes=t.notes, uids=uids)


def parse_scalar(text: str, range_: str) -> Scalar:
    """Parse one cell under a declared property range."""
    if range_ == "string":
        return text
    if range_ == "float":
        value = float(text)
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"not a finite number: {text!r}")
        return value
    if range_ == "int":
        return int(text)
    if range_ == "bool":
        lowered = text.lower()
        if lowered in ("true", "1"):
            return True
        if lowered in ("false", "0"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if range_ == "date":
        if not _DATE_RE.match(text):
            raise ValueError(f"not an ISO date (YYYY-MM-DD): {text!r}")
        return date.fromisoformat(text)
    raise ValueError(f"unknown range {range_!r}")


def typecheck_records(t: RawTable, o: Ontology, m: MappingDictionary) -> list[NormalizedRecord]:
    """Parse a normalized, keyed table into typed records.

    Missing cells assert nothing. Empty cells assert an empty string
    under string-ranged properties and nothing under any other range;
    the audit counts live in the ingest report, not on the record.
    """
    tab = m[t.tab_name]
    if t.uids is None:
        raise ValueError(f"{t.tab_name}: assign_uids must run before typecheck_records")

    link_props = {lc.object_property: lc for lc in tab.link_columns.values()}
    issues: list[IngestIssue] = []
    plan: list[tuple[int, str, str | None, LinkColumn | None]] = []
    for idx, header in enumerate(t.columns):
        if header in link_props:
            plan.append((idx, header, None, link_props[header]))
            continue
        pdef = o.data_properties.get(header)
        if pdef is None:
            issues.append(IngestIssue(t.tab_name, "unknown-property", f"{header!r} not declared", column=header))
            continue
        if pdef.domain != tab.target_class:
            issues.append(
                IngestIssue(
                    t.tab_name,
                    "domain-mismatch",
                    f"{header!r} has domain {pdef.domain!r}, tab targets {tab.target_class!r}",
                    column=header,
                )
            )
            continue
        plan.append((idx, header, pdef.range, None))
    if issues:
        raise IngestError(issues)

    records: list[NormalizedRecord] = []
    for row_idx, row in enumerate(t.rows):
        values: dict[str, Scalar] = {}
        links: dict[str, str] = {}
        for idx, name, range_, link in plan:
            cell = normalize_missing(row[idx])
            if cell.is_missing:
                continue
            if link is not None:
                if not cell.is_empty and cell.text != "":
                    links[name] = cell.text
                continue
            if cell.is_empty:
                if range_ == "string":
                    values[name] = ""
                continue
            try:
                values[name] = parse_scalar(cell.text, range_)
            except ValueError as exc:
                issues.append(
                    IngestIssue(t.tab_name, "type-error", str(exc), row=row_idx, column=name)
                )
        records.append(NormalizedRecord(t.uids[row_idx], tab.target_class, values, links))

    if issues:
        raise IngestError(issues)
    return records


@dataclass
class TabReport:
    rows: int = 0
    missing_cells: int = 0
    empty_cells: int = 0
    warnings: list[str] = field(default_factory=list)


@dataclass
class IngestReport:
    tabs: dict[str, TabReport] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "tabs": {
                name: {
                    "rows": r.rows,
                    "missingCells": r.missing_cells,
                    "emptyCells": r.empty_cells,
                    "warnings": r.warnings,
                }
                for name, r in sorted(self.tabs.items())
            },
            "errors": self.errors,
        }


def read_csv_table(path: str | Path) -> RawTable:
    """Load one UTF-8 CSV file; file stem is the tab name, first row headers."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            columns = next(reader)
        except StopIteration:
            raise IngestError([IngestIssue(path.stem, "empty-file", "no header row")]) from None
        rows = [row for row in reader]
    return RawTable(path.stem, columns, rows)


def _count_sentinels(t: RawTable, report: TabReport) -> None:
    for row in t.rows:
        for cell in row:
            value = normalize_missing(cell)
            if value.is_missing:
                report.missing_cells += 1
            elif value.is_empty:
                report.empty_cells += 1


def ingest_table(t: RawTable, o: Ontology, m: MappingDictionary) -> tuple[list[NormalizedRecord], TabReport]:
    """Run the per-tab pipeline: key synthesis, header mapping, typing."""
    report = TabReport(rows=len(t.rows))
    _count_sentinels(t, report)
    keyed = assign_uids(t, m[t.tab_name].key_columns)
    normalized = normalize_columns(keyed, m)
    records = typecheck_records(normalized, o, m)
    return records, report


def ingest_directory(
    directory: str | Path, mapping: MappingDictionary, o: Ontology
) -> tuple[list[NormalizedRecord], IngestReport]:
    """Ingest every ``*.csv`` tab in a directory, merged in tab-name order.

    Raises :class:`IngestError` carrying all issues if any tab fails;
    the report is attached to the error for auditing.
    """
    directory = Path(directory)
    report = IngestReport()
    issues: list[IngestIssue] = []

    issues.extend(validate_mapping(mapping, o))

    paths = sorted(directory.glob("*.csv"))
    covered = {p.stem for p in paths}
    for tab in sorted(set(mapping) - covered):
        tab_report = report.tabs.setdefault(tab, TabReport())
        tab_report.warnings.append("mapping entry has no matching CSV file")

    records: list[NormalizedRecord] = []
    for path in paths:
        table = read_csv_table(path)
        if table.tab_name not in mapping:
            issues.append(
                IngestIssue(table.tab_name, "unmapped-tab", "no mapping dictionary entry for this tab")
            )
            continue
        try:
            tab_records, tab_report = ingest_table(table, o, mapping)
        except IngestError as exc:
            tab_report = TabReport(rows=len(table.rows))
            _count_sentinels(table, tab_report)
            issues.extend(exc.issues)
        else:
            records.extend(tab_records)
        report.tabs[table.tab_name] = tab_report

    if issues:
        report.errors = [str(i) for i in issues]
        error = IngestError(issues)
        error.report = report  # type: ignore[attr-defined]
        raise error
    return records, report
