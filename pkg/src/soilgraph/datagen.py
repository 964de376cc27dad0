"""Deterministic synthetic field-experiment dataset with a ground-truth ledger.

The generator emits the workbook tabs (one CSV per tab), the mapping
dictionary that ingests them, and a ledger of expected graph statistics
and per-treatment SOC-stock means. Ledger stocks are computed with
plain scalar arithmetic at emission time, from the cell texts as they
will be parsed back, so the ledger is an independent oracle for the
analytics pipeline rather than a replay of it.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from . import schema
from .ingest import mapping_to_json

LEDGER_WINDOW = (0.0, 30.0)

CROPS = ("corn", "sorghum", "soybean", "oat+clover")

# kg N/ha per (crop, level); level "0" is always 0
NITROGEN_RATES = {
    ("corn", "low"): 33.0,
    ("corn", "high"): 67.0,
    ("sorghum", "low"): 33.0,
    ("sorghum", "high"): 67.0,
    ("soybean", "low"): 90.0,
    ("soybean", "high"): 180.0,
    ("oat+clover", "low"): 90.0,
    ("oat+clover", "high"): 180.0,
}

ROTATIONS = {
    "corn": ("continuous corn", "corn/soybean (2-yr)"),
    "sorghum": ("continuous sorghum", "sorghum/soybean (2-yr)"),
    "soybean": ("corn/soybean (2-yr)", "soybean/wheat (2-yr)"),
    "oat+clover": ("oat+clover/corn (2-yr)",),
}

FERTILIZER_CLASSES = ("organic", "synthetic", "none")
TILLAGES = ("none", "disk", "chisel")
RESIDUE_REMOVALS = ("full", "partial", "none")
IRRIGATIONS = (schema.IRRIGATION_APPLIED, schema.IRRIGATION_NOT_APPLIED)

STATES = ("NE", "IN", "IA", "CO", "TX", "MN")
CITIES = ("Mead", "West Lafayette", "Ames", "Akron", "Bushland", "Morris")


def nitrogen_rate(crop: str, level: str) -> float:
    """Applied nitrogen for one crop and level ("0", "low", "high")."""
    if level == "0":
        return 0.0
    try:
        return NITROGEN_RATES[(crop, level)]
    except KeyError:
        raise ValueError(f"no nitrogen rate for crop {crop!r} at level {level!r}") from None


@dataclass(frozen=True)
class GenConfig:
    seed: int = 42
    n_sites: int = 2
    fields_per_site: int = 2
    units_per_field: int = 12
    years: int = 5
    samples_per_unit_per_year: int = 2
    depth_scheme: tuple[tuple[float, float], ...] = ((0.0, 10.0), (10.0, 15.0), (15.0, 40.0))
    shallow_fraction: float = 0.2
    missing_fraction: float = 0.1

    def __post_init__(self) -> None:
        if not 0 <= self.shallow_fraction <= 1:
            raise ValueError(f"shallow_fraction {self.shallow_fraction} outside [0, 1]")
        if not 0 <= self.missing_fraction <= 1:
            raise ValueError(f"missing_fraction {self.missing_fraction} outside [0, 1]")
        cursor = -1.0
        for upper, lower in self.depth_scheme:
            if not 0 <= upper < lower or upper < cursor:
                raise ValueError(f"depth scheme not ascending/non-overlapping: {self.depth_scheme}")
            cursor = lower

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "nSites": self.n_sites,
            "fieldsPerSite": self.fields_per_site,
            "unitsPerField": self.units_per_field,
            "years": self.years,
            "samplesPerUnitPerYear": self.samples_per_unit_per_year,
            "depthScheme": [list(pair) for pair in self.depth_scheme],
            "shallowFraction": self.shallow_fraction,
            "missingFraction": self.missing_fraction,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GenConfig":
        return cls(
            seed=doc.get("seed", 42),
            n_sites=doc.get("nSites", 2),
            fields_per_site=doc.get("fieldsPerSite", 2),
            units_per_field=doc.get("unitsPerField", 12),
            years=doc.get("years", 5),
            samples_per_unit_per_year=doc.get("samplesPerUnitPerYear", 2),
            depth_scheme=tuple(tuple(pair) for pair in doc.get("depthScheme", [[0, 10], [10, 15], [15, 40]])),
            shallow_fraction=doc.get("shallowFraction", 0.2),
            missing_fraction=doc.get("missingFraction", 0.1),
        )


@dataclass
class GroundTruthLedger:
    """Expected pipeline outputs, computed independently at generation time."""

    stats: dict[str, int]
    treatment_mean_stock: dict[str, float]
    treatment_profile_counts: dict[str, int]
    n_profiles: int
    too_shallow_profiles: int
    window: tuple[float, float] = LEDGER_WINDOW

    def to_json(self) -> dict:
        return {
            "window": list(self.window),
            "stats": self.stats,
            "treatmentMeanStockKgCPerHa": self.treatment_mean_stock,
            "treatmentProfileCounts": self.treatment_profile_counts,
            "nProfiles": self.n_profiles,
            "tooShallowProfiles": self.too_shallow_profiles,
        }


def build_mapping() -> dict:
    """Mapping dictionary covering every generated tab."""
    from .ingest import LinkColumn, TabMapping

    return {
        "site": TabMapping(
            target_class=schema.SITE,
            column_map={
                "Site ID": schema.SITE_ID,
                "State": "state",
                "City": "city",
                "Elevation m": "elevation_m",
            },
            key_columns=["Site ID"],
        ),
        "field": TabMapping(
            target_class=schema.FIELD,
            column_map={"Field ID": schema.FIELD_ID},
            key_columns=["Field ID"],
            link_columns={"Site ID": LinkColumn(schema.PART_OF_SITE, schema.SITE)},
        ),
        "experimental_unit": TabMapping(
            target_class=schema.EXPERIMENTAL_UNIT,
            column_map={
                "Unit ID": schema.UNIT_ID,
                "Latitude deg": schema.LATITUDE,
                "Longitude deg": schema.LONGITUDE,
            },
            key_columns=["Unit ID"],
            link_columns={
                "Treatment ID": LinkColumn(schema.APPLIED_TREATMENT, schema.TREATMENT),
                "Field ID": LinkColumn(schema.LOCATED_IN_FIELD, schema.FIELD),
            },
        ),
        "treatment": TabMapping(
            target_class=schema.TREATMENT,
            column_map={
                "Treatment ID": schema.TREATMENT_ID,
                "Crop": schema.CROP,
                "Rotation": schema.ROTATION,
                "Nitrogen Level": schema.NITROGEN_LEVEL,
                "Applied Nitrogen kg/ha": schema.APPLIED_NITROGEN,
                "Fertilizer Class": schema.FERTILIZER_CLASS,
                "Tillage": schema.TILLAGE,
                "Residue Removal": schema.RESIDUE_REMOVAL,
                "Irrigation": schema.IRRIGATION,
            },
            key_columns=["Treatment ID"],
        ),
        "soil_chemical_sample": TabMapping(
            target_class=schema.SOIL_CHEMICAL_SAMPLE,
            column_map={
                "Sample Date": schema.CHEMICAL.date_prop,
                "Upper Depth cm": schema.CHEMICAL.upper_prop,
                "Lower Depth cm": schema.CHEMICAL.lower_prop,
                "Organic C gC/kg": schema.ORGANIC_CARBON,
                "pH": schema.SOIL_PH,
            },
            key_columns=["Unit ID", "Sample Date", "Upper Depth cm", "Lower Depth cm"],
            link_columns={"Unit ID": LinkColumn(schema.HAS_CHEM_SAMPLE, schema.EXPERIMENTAL_UNIT)},
        ),
        "soil_physical_sample": TabMapping(
            target_class=schema.SOIL_PHYSICAL_SAMPLE,
            column_map={
                "Sample Date": schema.PHYSICAL.date_prop,
                "Upper Depth cm": schema.PHYSICAL.upper_prop,
                "Lower Depth cm": schema.PHYSICAL.lower_prop,
                "Bulk Density g/cm3": schema.BULK_DENSITY,
            },
            key_columns=["Unit ID", "Sample Date", "Upper Depth cm", "Lower Depth cm"],
            link_columns={"Unit ID": LinkColumn(schema.HAS_PHYS_SAMPLE, schema.EXPERIMENTAL_UNIT)},
        ),
        "soil_biological_sample": TabMapping(
            target_class=schema.SOIL_BIOLOGICAL_SAMPLE,
            column_map={
                "Sample Date": schema.BIOLOGICAL.date_prop,
                "Upper Depth cm": schema.BIOLOGICAL.upper_prop,
                "Lower Depth cm": schema.BIOLOGICAL.lower_prop,
                "Microbial Biomass C mgC/kg": schema.MICROBIAL_BIOMASS,
                "FAME": schema.FAME,
            },
            key_columns=["Unit ID", "Sample Date", "Upper Depth cm", "Lower Depth cm"],
            link_columns={"Unit ID": LinkColumn(schema.HAS_BIO_SAMPLE, schema.EXPERIMENTAL_UNIT)},
        ),
    }


def _fmt(value: float, digits: int = 3) -> str:
    """Cell text for a measurement; parse(text) is what the ledger uses."""
    return f"{value:.{digits}f}"


def _depth_text(value: float) -> str:
    return f"{value:g}"


@dataclass
class _Tally:
    """Running ledger counters, advanced as cells are written."""

    entities: int = 0
    links: int = 0
    literals: int = 0
    classes: set = field(default_factory=set)
    predicates: set = field(default_factory=set)
    properties: set = field(default_factory=set)

    def entity(self, class_name: str) -> None:
        self.entities += 1
        self.classes.add(class_name)

    def literal(self, prop: str) -> None:
        self.literals += 1
        self.properties.add(prop)

    def link(self, predicate: str) -> None:
        self.links += 1
        self.predicates.add(predicate)


def generate(cfg: GenConfig, out_dir: str | Path) -> GroundTruthLedger:
    """Write the dataset, mapping, ontology copy, and ledger into ``out_dir``.

    The same seed produces byte-identical output.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(cfg.seed)
    tally = _Tally()

    site_rows: list[list[str]] = []
    field_rows: list[list[str]] = []
    unit_rows: list[list[str]] = []
    treatment_rows: list[list[str]] = []
    chem_rows: list[list[str]] = []
    phys_rows: list[list[str]] = []
    bio_rows: list[list[str]] = []

    # treatments first so units can reference them
    n_treatments = max(4, min(12, cfg.n_sites * cfg.fields_per_site * 2))
    treatment_ids: list[str] = []
    for t in range(n_treatments):
        tid = f"T{t + 1:02d}"
        crop = rng.choice(CROPS)
        rotation = rng.choice(ROTATIONS[crop])
        level = rng.choice(("0", "low", "high"))
        rate = nitrogen_rate(crop, level)
        row = [
            tid,
            crop,
            rotation,
            level,
            _depth_text(rate),
            rng.choice(FERTILIZER_CLASSES),
            rng.choice(TILLAGES),
            rng.choice(RESIDUE_REMOVALS),
            rng.choice(IRRIGATIONS),
        ]
        treatment_rows.append(row)
        treatment_ids.append(tid)
        tally.entity(schema.TREATMENT)
        for prop in (
            schema.TREATMENT_ID,
            schema.CROP,
            schema.ROTATION,
            schema.NITROGEN_LEVEL,
            schema.APPLIED_NITROGEN,
            schema.FERTILIZER_CLASS,
            schema.TILLAGE,
            schema.RESIDUE_REMOVAL,
            schema.IRRIGATION,
        ):
            tally.literal(prop)

    shallow_scheme = tuple(
        pair for pair in cfg.depth_scheme if pair[1] < LEDGER_WINDOW[1]
    ) or cfg.depth_scheme[:1]

    profile_stocks: dict[str, list[float]] = {}
    n_profiles = 0
    too_shallow = 0

    for s in range(cfg.n_sites):
        site_id = f"S{s + 1}"
        state = STATES[s % len(STATES)]
        city = CITIES[s % len(CITIES)]
        base_lat = 35.0 + s * 2.5
        base_lon = -100.0 + s * 3.0
        site_rows.append([site_id, state, city, _fmt(rng.uniform(200, 1200), 1)])
        tally.entity(schema.SITE)
        for prop in (schema.SITE_ID, "state", "city", "elevation_m"):
            tally.literal(prop)

        for f_idx in range(cfg.fields_per_site):
            field_id = f"{site_id}_F{f_idx + 1}"
            field_rows.append([field_id, site_id])
            tally.entity(schema.FIELD)
            tally.literal(schema.FIELD_ID)
            tally.link(schema.PART_OF_SITE)

            for u_idx in range(cfg.units_per_field):
                unit_id = f"{field_id}_U{u_idx + 1:02d}"
                tid = rng.choice(treatment_ids)
                unit_rows.append(
                    [
                        unit_id,
                        tid,
                        field_id,
                        _fmt(base_lat + rng.uniform(-0.05, 0.05), 5),
                        _fmt(base_lon + rng.uniform(-0.05, 0.05), 5),
                    ]
                )
                tally.entity(schema.EXPERIMENTAL_UNIT)
                for prop in (schema.UNIT_ID, schema.LATITUDE, schema.LONGITUDE):
                    tally.literal(prop)
                tally.link(schema.APPLIED_TREATMENT)
                tally.link(schema.LOCATED_IN_FIELD)

                for year_ofs in range(cfg.years):
                    year = 2008 + year_ofs
                    taken_dates: set[str] = set()
                    for _ in range(cfg.samples_per_unit_per_year):
                        while True:
                            sample_date = f"{year}-{rng.randint(3, 11):02d}-{rng.randint(1, 28):02d}"
                            if sample_date not in taken_dates:
                                taken_dates.add(sample_date)
                                break
                        shallow = rng.random() < cfg.shallow_fraction
                        scheme = shallow_scheme if shallow else cfg.depth_scheme
                        n_profiles += 1
                        layer_values: list[tuple[float, float, float, float]] = []
                        for upper, lower in scheme:
                            oc_text = _fmt(rng.uniform(2.0, 30.0))
                            bd_text = _fmt(rng.uniform(0.9, 1.7))
                            upper_text = _depth_text(upper)
                            lower_text = _depth_text(lower)
                            layer_values.append(
                                (upper, lower, float(oc_text), float(bd_text))
                            )

                            ph_text = (
                                "NaN" if rng.random() < cfg.missing_fraction else _fmt(rng.uniform(4.5, 8.5), 2)
                            )
                            chem_rows.append(
                                [unit_id, sample_date, upper_text, lower_text, oc_text, ph_text]
                            )
                            tally.entity(schema.SOIL_CHEMICAL_SAMPLE)
                            tally.link(schema.HAS_CHEM_SAMPLE)
                            for prop in (
                                schema.CHEMICAL.date_prop,
                                schema.CHEMICAL.upper_prop,
                                schema.CHEMICAL.lower_prop,
                                schema.ORGANIC_CARBON,
                            ):
                                tally.literal(prop)
                            if ph_text != "NaN":
                                tally.literal(schema.SOIL_PH)

                            phys_rows.append([unit_id, sample_date, upper_text, lower_text, bd_text])
                            tally.entity(schema.SOIL_PHYSICAL_SAMPLE)
                            tally.link(schema.HAS_PHYS_SAMPLE)
                            for prop in (
                                schema.PHYSICAL.date_prop,
                                schema.PHYSICAL.upper_prop,
                                schema.PHYSICAL.lower_prop,
                                schema.BULK_DENSITY,
                            ):
                                tally.literal(prop)

                            mbc_text = (
                                "NaN" if rng.random() < cfg.missing_fraction else _fmt(rng.uniform(50, 800), 1)
                            )
                            fame_text = (
                                "NaN" if rng.random() < cfg.missing_fraction else _fmt(rng.uniform(0.5, 40.0), 2)
                            )
                            bio_rows.append(
                                [unit_id, sample_date, upper_text, lower_text, mbc_text, fame_text]
                            )
                            tally.entity(schema.SOIL_BIOLOGICAL_SAMPLE)
                            tally.link(schema.HAS_BIO_SAMPLE)
                            for prop in (
                                schema.BIOLOGICAL.date_prop,
                                schema.BIOLOGICAL.upper_prop,
                                schema.BIOLOGICAL.lower_prop,
                            ):
                                tally.literal(prop)
                            if mbc_text != "NaN":
                                tally.literal(schema.MICROBIAL_BIOMASS)
                            if fame_text != "NaN":
                                tally.literal(schema.FAME)

                        # ledger arithmetic: same formula, independent code path
                        deepest = max(lower for _, lower, _, _ in layer_values)
                        if deepest < LEDGER_WINDOW[1]:
                            too_shallow += 1
                            continue
                        stock = 0.0
                        for upper, lower, oc, bd in layer_values:
                            seg_upper = max(upper, LEDGER_WINDOW[0])
                            seg_lower = min(lower, LEDGER_WINDOW[1])
                            if seg_lower > seg_upper:
                                stock += oc * bd * (seg_lower - seg_upper) * 100.0
                        profile_stocks.setdefault(tid, []).append(stock)

    tabs = {
        "site": (["Site ID", "State", "City", "Elevation m"], site_rows),
        "field": (["Field ID", "Site ID"], field_rows),
        "experimental_unit": (
            ["Unit ID", "Treatment ID", "Field ID", "Latitude deg", "Longitude deg"],
            unit_rows,
        ),
        "treatment": (
            [
                "Treatment ID",
                "Crop",
                "Rotation",
                "Nitrogen Level",
                "Applied Nitrogen kg/ha",
                "Fertilizer Class",
                "Tillage",
                "Residue Removal",
                "Irrigation",
            ],
            treatment_rows,
        ),
        "soil_chemical_sample": (
            ["Unit ID", "Sample Date", "Upper Depth cm", "Lower Depth cm", "Organic C gC/kg", "pH"],
            chem_rows,
        ),
        "soil_physical_sample": (
            ["Unit ID", "Sample Date", "Upper Depth cm", "Lower Depth cm", "Bulk Density g/cm3"],
            phys_rows,
        ),
        "soil_biological_sample": (
            ["Unit ID", "Sample Date", "Upper Depth cm", "Lower Depth cm", "Microbial Biomass C mgC/kg", "FAME"],
            bio_rows,
        ),
    }
    for tab, (headers, rows) in tabs.items():
        with (out / f"{tab}.csv").open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(headers)
            writer.writerows(rows)

    (out / "mapping.json").write_text(
        json.dumps(mapping_to_json(build_mapping()), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    (out / "ontology.ttl").write_text(schema.bundled_ontology_text(), encoding="utf-8")

    ledger = GroundTruthLedger(
        stats={
            "n_classes_used": len(tally.classes),
            "n_object_property_types_used": len(tally.predicates),
            "n_data_property_types_used": len(tally.properties),
            "n_entities": tally.entities,
            "n_links": tally.links,
            "n_literal_assertions": tally.literals,
        },
        treatment_mean_stock={
            tid: sum(stocks) / len(stocks) for tid, stocks in sorted(profile_stocks.items())
        },
        treatment_profile_counts={tid: len(stocks) for tid, stocks in sorted(profile_stocks.items())},
        n_profiles=n_profiles,
        too_shallow_profiles=too_shallow,
    )
    (out / "ledger.json").write_text(
        json.dumps(ledger.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (out / "gen_config.json").write_text(
        json.dumps(cfg.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return ledger
