"""Wire-level constants shared by the document renderers and parsers."""
from __future__ import annotations

import enum


class FormatKind(str, enum.Enum):
    FHIR_JSON = "FHIR_JSON"
    HL7_V2 = "HL7_V2"
    CSV_EXTRACT = "CSV_EXTRACT"
    NARRATIVE = "NARRATIVE"

    @property
    def extension(self) -> str:
        return EXTENSIONS[self]

    @property
    def priority(self) -> int:
        """Lower wins when conflicting values tie on timestamp."""
        return _PRIORITY[self]


EXTENSIONS = {
    FormatKind.FHIR_JSON: "fhir.json",
    FormatKind.HL7_V2: "hl7",
    FormatKind.CSV_EXTRACT: "csv",
    FormatKind.NARRATIVE: "txt",
}
_PRIORITY = {
    FormatKind.FHIR_JSON: 0,
    FormatKind.HL7_V2: 1,
    FormatKind.CSV_EXTRACT: 2,
    FormatKind.NARRATIVE: 3,
}


class UnsupportedCategoryError(ValueError):
    """The target format has no representation for an event category."""


# ---------------------------------------------------------------- FHIR

FHIR_SYSTEM_URLS = {
    "LOINC": "http://loinc.org",
    "SNOMED": "http://snomed.info/sct",
    "RXNORM": "http://www.nlm.nih.gov/research/umls/rxnorm",
    "ICD10": "http://hl7.org/fhir/sid/icd-10",
}
FHIR_SYSTEMS_BY_URL = {url: name for name, url in FHIR_SYSTEM_URLS.items()}
FHIR_CATEGORY_TAG = "http://clinistruct.local/fhir/variable-category"
FHIR_VALUE_EXT = "http://clinistruct.local/fhir/StructureDefinition/variable-value"
FHIR_TIME_EXT = "http://clinistruct.local/fhir/StructureDefinition/event-time"
UCUM_URL = "http://unitsofmeasure.org"

FHIR_RESOURCE = {
    "Observations": "Observation",
    "Conditions": "Condition",
    "Symptoms": "Condition",
    "Medications": "MedicationRequest",
    "Immunizations": "Immunization",
    "Procedures": "Procedure",
    "Care-plans": "CarePlan",
    "Devices": "Device",
    "Codes": "Encounter",
    "Names": "Encounter",
}
# category assumed when a resource carries no category tag
FHIR_DEFAULT_CATEGORY = {
    "Observation": "Observations",
    "Condition": "Conditions",
    "MedicationRequest": "Medications",
    "Immunization": "Immunizations",
    "Procedure": "Procedures",
    "CarePlan": "Care-plans",
    "Device": "Devices",
    "Encounter": "Codes",
}
# (element name, is a list of CodeableConcept)
FHIR_CODE_ELEMENT = {
    "Observation": ("code", False),
    "Condition": ("code", False),
    "MedicationRequest": ("medicationCodeableConcept", False),
    "Immunization": ("vaccineCode", False),
    "Procedure": ("code", False),
    "CarePlan": ("category", True),
    "Device": ("type", False),
    "Encounter": ("type", True),
}
# dotted path of the event time; None means the event-time extension
FHIR_TIME_ELEMENT = {
    "Observation": "effectiveDateTime",
    "Condition": "onsetDateTime",
    "MedicationRequest": "authoredOn",
    "Immunization": "occurrenceDateTime",
    "Procedure": "performedDateTime",
    "CarePlan": "created",
    "Device": None,
    "Encounter": "period.start",
}
FHIR_SUBJECT_ELEMENT = {"Immunization": "patient", "Device": "patient"}

# ---------------------------------------------------------------- HL7 v2

HL7_SEGMENT = {
    "Observations": "OBX",
    "Conditions": "DG1",
    "Immunizations": "RXA",
    "Medications": "RXE",
    "Procedures": "PR1",
}
HL7_CATEGORY = {seg: cat for cat, seg in HL7_SEGMENT.items()}
HL7_SYSTEM_IDS = {"LOINC": "LN", "SNOMED": "SCT", "RXNORM": "RXNORM", "ICD10": "I10"}
HL7_SYSTEMS_BY_ID = {v: k for k, v in HL7_SYSTEM_IDS.items()}
HL7_KNOWN_SEGMENTS = frozenset({"MSH", "PID", *HL7_CATEGORY})
HL7_SEGMENT_SEP = "\r"

_HL7_ESCAPES = (("\\", "\\E\\"), ("|", "\\F\\"), ("^", "\\S\\"), ("&", "\\T\\"), ("~", "\\R\\"))


def hl7_escape(text: str) -> str:
    for raw, esc in _HL7_ESCAPES:
        text = text.replace(raw, esc)
    return text.replace("\r", " ").replace("\n", " ")


def hl7_unescape(text: str) -> str:
    if "\\" not in text:
        return text
    out = []
    i = 0
    table = {esc[1:-1]: raw for raw, esc in _HL7_ESCAPES}
    while i < len(text):
        if text[i] == "\\":
            end = text.find("\\", i + 1)
            if end != -1 and text[i + 1:end] in table:
                out.append(table[text[i + 1:end]])
                i = end + 1
                continue
        out.append(text[i])
        i += 1
    return "".join(out)


# ---------------------------------------------------------------- CSV

CSV_HEADER = ("event_id", "timestamp", "category", "code", "display", "value", "unit")

# ---------------------------------------------------------------- narrative

NARRATIVE_TITLES = (
    "CLINICAL SUMMARY REPORT",
    "PROGRESS NOTE",
    "DISCHARGE SUMMARY",
    "OUTPATIENT CONSULTATION",
    "LABORATORY AND IMAGING REPORT",
)
NARRATIVE_SECTIONS = {
    "Observations": "RESULTS AND MEASUREMENTS",
    "Conditions": "PROBLEM LIST",
    "Symptoms": "PRESENTING COMPLAINTS",
    "Medications": "MEDICATION ORDERS",
    "Immunizations": "IMMUNIZATION HISTORY",
    "Procedures": "INTERVENTIONS",
    "Care-plans": "PLANNING",
    "Devices": "DURABLE EQUIPMENT",
    "Codes": "ENCOUNTER LOG",
    "Names": "VISIT HISTORY",
}
# {term} surface form, {value} rendered value, {ts} timestamp text
NARRATIVE_TEMPLATES = {
    "numeric": (
        "{term} measured at {value} on {ts}.",
        "{term}: {value}; collected {ts}.",
        "{ts}: {term} was {value}.",
    ),
    "text": (
        "{term}: {value}; recorded on {ts}.",
        "{term} documented as {value}; dated {ts}.",
        "On {ts}, {term} reported as {value}.",
    ),
    "date": (
        "{term} on {ts}.",
        "{term} documented {ts}.",
        "{ts}: {term}.",
    ),
}
