"""Soil-organic-carbon stock computation over depth profiles.

Per layer, stock (kgC/ha) is organic carbon (gC/kg soil) times bulk
density (g soil/cm^3) times layer thickness (cm) times 100. A profile's
stock over an analysis window sums its layers inside the window; the
layer straddling the window's lower bound contributes proportionally
(uniform carbon and density within a layer). Profiles that do not reach
the window's lower depth are filtered out rather than extrapolated.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from . import schema
from .graph import KnowledgeGraph


@dataclass(frozen=True)
class SoilLayer:
    upper_cm: float
    lower_cm: float
    oc_gC_per_kg: float
    bd_g_per_cm3: float

    def __post_init__(self) -> None:
        if not 0 <= self.upper_cm < self.lower_cm:
            raise ValueError(f"bad depth bounds [{self.upper_cm}, {self.lower_cm}]")
        if self.oc_gC_per_kg < 0:
            raise ValueError(f"negative organic carbon: {self.oc_gC_per_kg}")
        if self.bd_g_per_cm3 <= 0:
            raise ValueError(f"non-positive bulk density: {self.bd_g_per_cm3}")


@dataclass(frozen=True)
class DepthProfile:
    """Non-overlapping layers of one unit at one date, sorted by depth."""

    unit_uid: str
    date: date | str
    layers: tuple[SoilLayer, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.layers, key=lambda l: (l.upper_cm, l.lower_cm)))
        object.__setattr__(self, "layers", ordered)
        for a, b in zip(ordered, ordered[1:]):
            if a.lower_cm > b.upper_cm:
                raise ValueError(
                    f"{self.unit_uid} {self.date}: layers [{a.upper_cm},{a.lower_cm}] and "
                    f"[{b.upper_cm},{b.lower_cm}] overlap"
                )


@dataclass(frozen=True)
class StockResult:
    stock_kgC_per_ha: float
    interpolated: bool
    layers_used: int


@dataclass(frozen=True)
class AggregateResult:
    mean_stock_kgC_per_ha: float | None
    n_samples: int
    n_units: int

    def to_json(self) -> dict:
        return {
            "mean_stock_kgC_per_ha": self.mean_stock_kgC_per_ha,
            "n_samples": self.n_samples,
            "n_units": self.n_units,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "AggregateResult":
        return cls(doc["mean_stock_kgC_per_ha"], doc["n_samples"], doc["n_units"])


class WindowError(Exception):
    """A profile cannot be evaluated over the requested depth window."""


class TooShallow(WindowError):
    pass


class GapInWindow(WindowError):
    pass


class StartsBelowWindow(WindowError):
    pass


def layer_stock(l: SoilLayer, effective_lower_cm: float) -> float:
    """Stock contribution of one layer down to ``effective_lower_cm``.

    The effective lower bound is the layer's own lower bound, or the
    truncation point when the analysis window ends inside the layer.
    """
    if not l.upper_cm <= effective_lower_cm <= l.lower_cm:
        raise ValueError(
            f"effective lower {effective_lower_cm} outside layer [{l.upper_cm}, {l.lower_cm}]"
        )
    return l.oc_gC_per_kg * l.bd_g_per_cm3 * (effective_lower_cm - l.upper_cm) * 100.0


def _segment_stock(l: SoilLayer, seg_upper: float, seg_lower: float) -> float:
    return l.oc_gC_per_kg * l.bd_g_per_cm3 * (seg_lower - seg_upper) * 100.0


def profile_stock(p: DepthProfile, target_upper_cm: float, target_lower_cm: float) -> StockResult:
    """Sum layer stocks over ``[target_upper_cm, target_lower_cm]``.

    A layer straddling a window bound contributes its proportional
    slice, assuming uniform carbon and density within the layer. Raises
    :class:`TooShallow` when the profile stops above the window's lower
    depth, :class:`StartsBelowWindow` when it begins below the window's
    upper depth, and :class:`GapInWindow` when coverage is broken inside
    the window.
    """
    if not target_upper_cm < target_lower_cm:
        raise ValueError(f"bad window [{target_upper_cm}, {target_lower_cm}]")
    if not p.layers:
        raise ValueError(f"{p.unit_uid} {p.date}: profile has no layers")

    deepest = max(l.lower_cm for l in p.layers)
    if deepest < target_lower_cm:
        raise TooShallow(
            f"{p.unit_uid} {p.date}: profile reaches {deepest} cm, window needs {target_lower_cm} cm"
        )
    relevant = [
        l for l in p.layers if l.lower_cm > target_upper_cm and l.upper_cm < target_lower_cm
    ]
    if not relevant or relevant[0].upper_cm > target_upper_cm:
        raise StartsBelowWindow(
            f"{p.unit_uid} {p.date}: profile starts below {target_upper_cm} cm"
        )

    total = 0.0
    layers_used = 0
    interpolated = False
    cursor = target_upper_cm
    for layer in relevant:
        if layer.upper_cm > cursor:
            raise GapInWindow(
                f"{p.unit_uid} {p.date}: no coverage between {cursor} and {layer.upper_cm} cm"
            )
        seg_upper = max(layer.upper_cm, target_upper_cm)
        seg_lower = min(layer.lower_cm, target_lower_cm)
        total += _segment_stock(layer, seg_upper, seg_lower)
        layers_used += 1
        if seg_upper != layer.upper_cm or seg_lower != layer.lower_cm:
            interpolated = True
        cursor = seg_lower
        if cursor >= target_lower_cm:
            break
    if cursor < target_lower_cm:
        raise GapInWindow(
            f"{p.unit_uid} {p.date}: no coverage between {cursor} and {target_lower_cm} cm"
        )
    return StockResult(total, interpolated, layers_used)


@dataclass(frozen=True)
class RejectedProfile:
    unit_uid: str
    date: date | str
    reason: str


def assemble_profiles(
    g: KnowledgeGraph, units: set[str] | None = None
) -> tuple[list[DepthProfile], list[RejectedProfile]]:
    """Join chemical-sample carbon with physical-sample density into profiles.

    Layers join on exact (upper, lower) depth equality per unit and
    date; a depth interval lacking either measurement is dropped. A
    (unit, date) group whose joined layers overlap is rejected with a
    diagnostic instead of failing the whole assembly.
    """
    oc_by_layer = _measurements(g, schema.CHEMICAL, schema.ORGANIC_CARBON, units)
    bd_by_layer = _measurements(g, schema.PHYSICAL, schema.BULK_DENSITY, units)

    profiles: list[DepthProfile] = []
    rejected: list[RejectedProfile] = []
    for key in sorted(set(oc_by_layer) & set(bd_by_layer)):
        unit_uid, sample_date = key
        oc_layers = oc_by_layer[key]
        bd_layers = bd_by_layer[key]
        joined = []
        for bounds in sorted(set(oc_layers) & set(bd_layers)):
            upper, lower = bounds
            joined.append(SoilLayer(upper, lower, oc_layers[bounds], bd_layers[bounds]))
        if not joined:
            continue
        try:
            profiles.append(DepthProfile(unit_uid, sample_date, tuple(joined)))
        except ValueError as exc:
            rejected.append(RejectedProfile(unit_uid, sample_date, str(exc)))
    return profiles, rejected


def _measurements(
    g: KnowledgeGraph,
    kind: schema.SampleKind,
    measure_prop: str,
    units: set[str] | None,
) -> dict[tuple[str, object], dict[tuple[float, float], float]]:
    """(unit, date) -> (upper, lower) -> measured value, for one sample kind."""
    sample_unit: dict[str, str] = {}
    for link in g.predicate_index.get(kind.link, ()):
        if units is None or link.subject_uid in units:
            sample_unit[link.object_uid] = link.subject_uid

    out: dict[tuple[str, object], dict[tuple[float, float], float]] = {}
    for sample in g.entities_of(kind.class_name):
        unit_uid = sample_unit.get(sample.uid)
        if unit_uid is None:
            continue
        values = sample.values
        measure = values.get(measure_prop)
        sample_date = values.get(kind.date_prop)
        upper = values.get(kind.upper_prop)
        lower = values.get(kind.lower_prop)
        if measure is None or sample_date is None or upper is None or lower is None:
            continue
        layers = out.setdefault((unit_uid, sample_date), {})
        layers[(upper, lower)] = measure
    return out


def grouped_mean_stock(
    g: KnowledgeGraph, group_by: str, window: tuple[float, float]
) -> dict[str, AggregateResult]:
    """Unweighted mean profile stock per treatment, field, or site.

    Every dated profile is one observation. Profiles failing the window
    checks are skipped, mirroring the stated filtering; groups with no
    surviving profile are omitted.
    """
    members = group_members(g, group_by)
    target_upper, target_lower = window
    out: dict[str, AggregateResult] = {}
    for group_uid in sorted(members):
        profiles, _ = assemble_profiles(g, members[group_uid])
        stocks: list[float] = []
        units_seen: set[str] = set()
        for profile in profiles:
            try:
                result = profile_stock(profile, target_upper, target_lower)
            except WindowError:
                continue
            stocks.append(result.stock_kgC_per_ha)
            units_seen.add(profile.unit_uid)
        if stocks:
            out[group_uid] = AggregateResult(sum(stocks) / len(stocks), len(stocks), len(units_seen))
    return out


def group_members(g: KnowledgeGraph, group_by: str) -> dict[str, set[str]]:
    """Experimental-unit membership per group uid."""
    if group_by == "treatment":
        members: dict[str, set[str]] = {}
        for link in g.predicate_index.get(schema.APPLIED_TREATMENT, ()):
            members.setdefault(link.object_uid, set()).add(link.subject_uid)
        return members
    if group_by == "field":
        members = {}
        for link in g.predicate_index.get(schema.LOCATED_IN_FIELD, ()):
            members.setdefault(link.object_uid, set()).add(link.subject_uid)
        return members
    if group_by == "site":
        field_site: dict[str, str] = {}
        for link in g.predicate_index.get(schema.PART_OF_SITE, ()):
            field_site[link.subject_uid] = link.object_uid
        members = {}
        for link in g.predicate_index.get(schema.LOCATED_IN_FIELD, ()):
            site = field_site.get(link.object_uid)
            if site is not None:
                members.setdefault(site, set()).add(link.subject_uid)
        return members
    raise ValueError(f"unknown group_by {group_by!r}; expected treatment, field, or site")


@dataclass
class WindowSurvey:
    """Per-outcome tally of every assembled profile over one window."""

    stocks: dict[tuple[str, object], float]
    too_shallow: int = 0
    gaps: int = 0
    starts_below: int = 0
    rejected: int = 0


def survey_window(
    g: KnowledgeGraph, window: tuple[float, float], units: set[str] | None = None
) -> WindowSurvey:
    """Evaluate every profile, recording stocks and filter outcomes."""
    profiles, rejected = assemble_profiles(g, units)
    survey = WindowSurvey(stocks={}, rejected=len(rejected))
    for profile in profiles:
        try:
            result = profile_stock(profile, window[0], window[1])
        except TooShallow:
            survey.too_shallow += 1
        except GapInWindow:
            survey.gaps += 1
        except StartsBelowWindow:
            survey.starts_below += 1
        else:
            survey.stocks[(profile.unit_uid, profile.date)] = result.stock_kgC_per_ha
    return survey


def pooled_mean(survey: WindowSurvey) -> AggregateResult:
    """Collapse a survey into one aggregate over all surviving profiles."""
    if not survey.stocks:
        return AggregateResult(None, 0, 0)
    values = list(survey.stocks.values())
    units = {unit for unit, _ in survey.stocks}
    return AggregateResult(sum(values) / len(values), len(values), len(units))
