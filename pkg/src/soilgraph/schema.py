"""Canonical class and property names of the field-experiment ontology.

The analytics, cube, and service layers resolve soil measurements
through these names; the bundled ontology declares all of them. Keeping
them in one place is what lets the SOC-stock procedure find organic
carbon on chemical samples and bulk density on physical samples without
scanning for look-alike property names.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

SITE = "Site"
FIELD = "Field"
EXPERIMENTAL_UNIT = "ExperimentalUnit"
TREATMENT = "Treatment"
SOIL_PHYSICAL_SAMPLE = "SoilPhysicalSample"
SOIL_CHEMICAL_SAMPLE = "SoilChemicalSample"
SOIL_BIOLOGICAL_SAMPLE = "SoilBiologicalSample"

# object properties
HAS_CHEM_SAMPLE = "hasChemSample"
HAS_PHYS_SAMPLE = "hasPhysicalSample"
HAS_BIO_SAMPLE = "hasBiologicalSample"
APPLIED_TREATMENT = "appliedTreatment"
LOCATED_IN_FIELD = "locatedInField"
PART_OF_SITE = "partOfSite"

# treatment attributes backing the faceted filters
TREATMENT_ID = "treatmentId"
CROP = "crop"
ROTATION = "rotation"
NITROGEN_LEVEL = "nitrogenLevel"
APPLIED_NITROGEN = "appliedNitrogen_kg_per_ha"
FERTILIZER_CLASS = "fertilizerClass"
TILLAGE = "tillage"
RESIDUE_REMOVAL = "residueRemoval"
IRRIGATION = "irrigation"

IRRIGATION_APPLIED = "applied"
IRRIGATION_NOT_APPLIED = "not-applied"

UNIT_ID = "unitId"
FIELD_ID = "fieldId"
SITE_ID = "siteId"
LATITUDE = "latitude_deg"
LONGITUDE = "longitude_deg"

ORGANIC_CARBON = "organicCarbon_gC_per_kg"
BULK_DENSITY = "bulkDensity_g_per_cm_cubed"
SOIL_PH = "pH"
MICROBIAL_BIOMASS = "microbialBiomassCarbon_mgC_per_kg"
FAME = "fattyAcidMethylEsters"


@dataclass(frozen=True)
class SampleKind:
    """Where one kind of soil sample keeps its date and depth bounds."""

    name: str
    class_name: str
    link: str
    date_prop: str
    upper_prop: str
    lower_prop: str


CHEMICAL = SampleKind(
    "chemical",
    SOIL_CHEMICAL_SAMPLE,
    HAS_CHEM_SAMPLE,
    "chemSampleDate",
    "chemUpperDepth_cm",
    "chemLowerDepth_cm",
)
PHYSICAL = SampleKind(
    "physical",
    SOIL_PHYSICAL_SAMPLE,
    HAS_PHYS_SAMPLE,
    "physSampleDate",
    "physUpperDepth_cm",
    "physLowerDepth_cm",
)
BIOLOGICAL = SampleKind(
    "biological",
    SOIL_BIOLOGICAL_SAMPLE,
    HAS_BIO_SAMPLE,
    "bioSampleDate",
    "bioUpperDepth_cm",
    "bioLowerDepth_cm",
)

SAMPLE_KINDS = {k.name: k for k in (CHEMICAL, PHYSICAL, BIOLOGICAL)}

# facet field -> treatment property
FACET_FIELDS = {
    "crop": CROP,
    "fertilizer_class": FERTILIZER_CLASS,
    "residue_removal": RESIDUE_REMOVAL,
    "tillage": TILLAGE,
    "irrigation": IRRIGATION,
    "nitrogen_level": NITROGEN_LEVEL,
    "rotation": ROTATION,
}

DEFAULT_BASE_URI = "https://idir.uta.edu/sockg-ontology/docs/"

ONTOLOGY_RESOURCE = "field_experiment_ontology.ttl"
CUBE_SPEC_RESOURCE = "default_cube.json"


def bundled_ontology_text() -> str:
    """Text of the ontology file shipped with the package."""
    return resources.files("soilgraph.data").joinpath(ONTOLOGY_RESOURCE).read_text("utf-8")


def bundled_cube_spec_text() -> str:
    """Text of the default cube dimension config shipped with the package."""
    return resources.files("soilgraph.data").joinpath(CUBE_SPEC_RESOURCE).read_text("utf-8")
