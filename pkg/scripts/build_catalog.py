"""Author the bundled disease catalog (src/clinistruct/data/catalog.json).

Per-disease variable counts are the published counts scaled by 0.22,
rounded up, floored at 8. Codes are real where well known and otherwise
synthetic but shaped like their code system.

    python scripts/build_catalog.py [--check]
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "clinistruct" / "data" / "catalog.json"

PUBLISHED_COUNTS = {
    "colorectal_cancer": 105,
    "prostate_cancer": 50,
    "contraceptives": 67,
    "female_reproduction": 25,
    "gout": 41,
    "attention_deficit_disorder": 41,
    "epilepsy": 36,
    "copd": 75,
    "asthma": 67,
    "allergic_rhinitis": 42,
    "bronchitis": 51,
    "dermatitis": 42,
    "atopy": 25,
    "food_allergies": 35,
    "appendicitis": 43,
    "ear_infections": 36,
}
SCALE = 0.22

DEFAULT_SYSTEM = {
    "Observations": "LOINC",
    "Conditions": "ICD10",
    "Medications": "RXNORM",
}


def N(lo, hi, dec, unit):
    return {"min": lo, "max": hi, "decimals": dec, "unit": unit}


def C(*options, weights=None):
    dom = {"options": list(options)}
    if weights:
        dom["weights"] = list(weights)
    return dom


def B(p_true=0.85):
    return {"p_true": p_true}


SEV = C("mild", "moderate", "severe")
STATUS = C("active", "completed", "stopped")
CLASS = C("ambulatory", "inpatient", "emergency")


def slug(text):
    return re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")


def V(name, cat, kind, dom=None, syn=(), code=None, system=None, concept=None,
      amb=None, p=0.8, reps=(1, 1), extra=()):
    return dict(name=name, cat=cat, kind=kind, dom=dom or {}, syn=list(syn),
                code=code, system=system, concept=concept, amb=amb, p=p,
                reps=reps, extra=list(extra))


# shared concepts: identical name/first synonym/binding wherever used
def FLU(**kw):
    return V("Influenza vaccine", "Immunizations", "date",
             syn=["influenza vaccine", "flu shot", "seasonal flu vaccine", *kw.pop("syn", ())],
             code="86198006", system="SNOMED", concept="influenza_vaccine", **kw)


def ALBUTEROL(**kw):
    return V("Albuterol inhaler", "Medications", "coded",
             C("90 mcg 2 puffs as needed", "90 mcg 2 puffs every 4 hours", "90 mcg 1 puff as needed"),
             syn=["albuterol inhaler", "salbutamol", "rescue inhaler", *kw.pop("syn", ())],
             code="745679", system="RXNORM", concept="albuterol", **kw)


def AMOX(**kw):
    return V("Amoxicillin", "Medications", "coded",
             C("500 mg three times daily", "875 mg twice daily", "250 mg three times daily"),
             syn=["amoxicillin", "amoxil", *kw.pop("syn", ())],
             code="308182", system="RXNORM", concept="amoxicillin", **kw)


def CHECKUP(**kw):
    return V("Encounter for check-up", "Codes", "date",
             syn=["encounter for check-up", "check-up encounter", "routine check-up"],
             code="185349003", system="SNOMED", concept="checkup_encounter", **kw)


def HGB(**kw):
    return V("Hemoglobin", "Observations", "numeric", N(9.0, 17.5, 1, "g/dL"),
             syn=["hemoglobin", "haemoglobin", "Hgb"], code="718-7", system="LOINC",
             concept="hemoglobin", **kw)


CATALOG = {
    "colorectal_cancer": dict(
        name="Colorectal Cancer", group="Oncology", sex="any", age=(45, 85), years=8,
        variables=[
            V("Malignant tumor of colon", "Conditions", "date", syn=["malignant tumor of colon", "colon cancer", "colorectal carcinoma"], code="C18.9", extra=[("SNOMED", "363406005")], p=0.95),
            V("Tumor stage", "Observations", "coded", C("Stage I", "Stage IIA", "Stage IIB", "Stage IIIA", "Stage IIIB", "Stage IIIC", "Stage IV"), syn=["tumor stage", "TNM stage", "cancer stage"], p=0.9),
            V("Primary tumor location", "Observations", "coded", C("cecum", "ascending colon", "transverse colon", "descending colon", "sigmoid colon", "rectum"), syn=["primary tumor location", "tumor site"], p=0.85),
            V("CEA level", "Observations", "numeric", N(0.5, 80.0, 1, "ng/mL"), syn=["CEA level", "carcinoembryonic antigen", "CEA"], code="2039-6", reps=(1, 3)),
            HGB(reps=(1, 3)),
            V("Fecal occult blood test", "Observations", "coded", C("positive", "negative"), syn=["fecal occult blood test", "FOBT", "stool guaiac"], p=0.6),
            V("KRAS mutation status", "Observations", "coded", C("wild type", "G12D mutation", "G12V mutation", "G13D mutation"), syn=["KRAS mutation status", "KRAS status"], p=0.6),
            V("Microsatellite instability", "Observations", "coded", C("MSI-H", "MSS", "MSI-L"), syn=["microsatellite instability", "MSI status"], p=0.6),
            V("Anemia", "Conditions", "date", syn=["anemia disorder", "anaemia"], code="D64.9", p=0.4),
            V("Abdominal pain", "Symptoms", "coded", SEV, syn=["abdominal pain", "belly pain", "stomach ache"], code="21522001", p=0.7, reps=(1, 2)),
            V("Fatigue", "Symptoms", "coded", SEV, syn=["fatigue", "tiredness", "exhaustion"], code="84229001", p=0.7),
            V("Rectal bleeding", "Symptoms", "boolean", B(0.8), syn=["rectal bleeding", "hematochezia", "blood in stool"], code="405729008", p=0.6),
            V("Oxaliplatin injection", "Medications", "coded", C("85 mg/m2 every 2 weeks", "130 mg/m2 every 3 weeks"), syn=["oxaliplatin injection", "oxaliplatin", "eloxatin"], code="1736854", p=0.6),
            V("Leucovorin injection", "Medications", "coded", C("400 mg/m2 every 2 weeks", "200 mg/m2 every 2 weeks"), syn=["leucovorin injection", "leucovorin", "folinic acid"], code="1720975", p=0.6),
            V("Fluorouracil", "Medications", "coded", C("400 mg/m2 bolus", "2400 mg/m2 over 46 hours"), syn=["fluorouracil", "5-FU"], code="4492", p=0.6),
            V("Colonoscopy", "Procedures", "date", syn=["colonoscopy", "lower endoscopy"], code="73761001", p=0.9),
            V("Biopsy of colon", "Procedures", "date", syn=["biopsy of colon", "colon biopsy", "colonic biopsy"], code="76164006", p=0.85),
            V("Partial resection of colon", "Procedures", "coded", C("laparoscopic", "open", "robotic"), syn=["partial resection of colon", "colectomy", "hemicolectomy"], code="43075005", p=0.6),
            V("Chemotherapy encounter", "Names", "date", syn=["chemotherapy encounter", "chemo visit", "infusion visit"], p=0.6, reps=(1, 3)),
            V("Routine colonoscopy encounter", "Names", "date", syn=["routine colonoscopy encounter", "screening colonoscopy visit"], p=0.7),
            CHECKUP(p=0.8, reps=(1, 2)),
            V("Cancer care plan", "Care-plans", "coded", STATUS, syn=["cancer care plan", "oncology care plan"], code="395082007", p=0.8),
            V("Colostomy bag", "Devices", "boolean", B(0.9), syn=["colostomy bag", "ostomy pouch", "stoma appliance"], p=0.25),
            FLU(p=0.5),
        ]),
    "prostate_cancer": dict(
        name="Prostate Cancer", group="Oncology", sex="male", age=(50, 85), years=10,
        variables=[
            V("iPSA", "Observations", "numeric", N(2.0, 60.0, 1, "ng/mL"), syn=["initial PSA", "iPSA", "PSA", "prostate specific antigen"], code="2857-1", p=0.95, reps=(1, 3)),
            V("ISUP score in biopsy specimen", "Observations", "coded", C("3", "4", "5", "7 (3+4)", "8 (3+5)", "10 (5+5)"), syn=["ISUP score in biopsy specimen", "ISUP grade", "ISUP score", "Gleason grade group"], p=0.8),
            V("Date of biopsy", "Procedures", "date", syn=["prostate biopsy", "biopsy of prostate", "transrectal biopsy"], code="65575008", p=0.8),
            V("Imaging for primary staging", "Procedures", "coded", C("PSMA-PET/CT or PET/MR", "MRI OF THE PELVIS-PROSTATE", "PET/CT scan", "PET/CT imaging", "PET/CT"), syn=["imaging for primary staging", "staging imaging", "primary staging scan"], p=0.9),
            V("ADT duration", "Medications", "numeric", N(1, 48, 0, "months"), syn=["ADT duration", "androgen deprivation therapy duration", "hormone therapy duration"], p=0.5),
            V("Other systemic therapy primary treatment", "Medications", "coded", C("Enzalutamide", "Abiraterone", "Docetaxel"), syn=["other systemic therapy primary treatment", "systemic therapy", "additional systemic therapy"], p=0.5),
            V("Radiation prostate", "Procedures", "boolean", B(0.95), syn=["radiation prostate", "prostate radiotherapy", "radiation therapy to prostate"], p=0.7),
            V("Number of pelvic lymph nodes in imaging", "Observations", "numeric", N(0, 8, 0, "1"), syn=["number of pelvic lymph nodes in imaging", "pelvic lymph node count", "positive pelvic nodes"], p=0.35),
            V("Type of local salvage treatment", "Procedures", "free-text", C("Radiotherapy of the thoracic segment of the spinal column", "HDR", "Conventional-fractionation IMRT combined with HDR", "SBRT plus HDR", "SBRT plus HDR for 2 months", "IMRT (Intensity-Modulated Radiation Therapy)", "Brachytherapy", "Brachytherapy monotherapy"), syn=["type of local salvage treatment", "local salvage treatment", "salvage therapy"], p=0.6),
            V("Malignant neoplasm of prostate", "Conditions", "date", syn=["malignant neoplasm of prostate", "prostate cancer", "prostatic adenocarcinoma"], code="C61", extra=[("SNOMED", "399068003")], p=0.95),
            V("Testosterone level", "Observations", "numeric", N(10, 800, 0, "ng/dL"), syn=["testosterone level", "serum testosterone"], code="2986-8", p=0.5, reps=(1, 2)),
        ]),
    "contraceptives": dict(
        name="Contraceptives", group="Reproductive Health", sex="female", age=(16, 45), years=6,
        variables=[
            V("Contraceptive method", "Medications", "coded", C("combined oral contraceptive", "progestin-only pill", "levonorgestrel IUD", "copper IUD", "etonogestrel implant", "medroxyprogesterone injection"), syn=["contraceptive method", "birth control method"], p=0.95),
            V("Levonorgestrel and ethinyl estradiol", "Medications", "coded", C("0.15 mg/0.03 mg daily", "0.1 mg/0.02 mg daily"), syn=["levonorgestrel and ethinyl estradiol", "combined pill", "levora"], code="748962", p=0.4),
            V("Medroxyprogesterone injection", "Medications", "coded", C("150 mg every 3 months", "104 mg every 3 months"), syn=["medroxyprogesterone injection", "depo-provera", "contraceptive injection"], code="1000126", p=0.25),
            V("Norethindrone", "Medications", "coded", C("0.35 mg daily"), syn=["norethindrone", "mini pill"], code="198042", p=0.2),
            V("Intrauterine device", "Devices", "coded", C("levonorgestrel 52 mg", "copper T380A"), syn=["intrauterine device", "IUD", "coil"], code="268460000", p=0.35),
            V("Contraceptive implant", "Devices", "boolean", B(0.95), syn=["contraceptive implant", "etonogestrel implant", "nexplanon"], p=0.2),
            V("Insertion of intrauterine device", "Procedures", "date", syn=["insertion of intrauterine device", "IUD insertion", "IUD placement"], code="65200003", p=0.35),
            V("Removal of intrauterine device", "Procedures", "date", syn=["removal of intrauterine device", "IUD removal"], code="68254000", p=0.15),
            V("Body mass index", "Observations", "numeric", N(16.0, 42.0, 1, "kg/m2"), syn=["body mass index", "BMI"], code="39156-5", concept="bmi", p=0.9, reps=(1, 3)),
            V("Systolic blood pressure", "Observations", "numeric", N(95, 165, 0, "mm[Hg]"), syn=["systolic blood pressure", "systolic BP", "SBP"], code="8480-6", concept="sbp", p=0.9, reps=(1, 3)),
            V("Pregnancy test", "Observations", "coded", C("negative", "positive"), syn=["pregnancy test", "urine hCG", "hCG test"], code="2106-3", p=0.7),
            V("Contraception care plan", "Care-plans", "coded", STATUS, syn=["contraception care plan", "family planning plan"], code="698360004", p=0.8),
            V("Encounter for contraceptive counseling", "Codes", "date", syn=["encounter for contraceptive counseling", "contraceptive counseling visit"], p=0.85),
            V("Family planning encounter", "Names", "date", syn=["family planning encounter", "family planning visit"], p=0.7),
            V("Human papillomavirus vaccine", "Immunizations", "date", syn=["human papillomavirus vaccine", "HPV vaccine", "gardasil"], code="428570002", p=0.6),
        ]),
    "female_reproduction": dict(
        name="Female Reproduction", group="Reproductive Health", sex="female", age=(18, 45), years=6,
        variables=[
            V("Normal pregnancy", "Conditions", "date", syn=["normal pregnancy", "intrauterine pregnancy"], code="Z34.90", p=0.6),
            V("Gestational age", "Observations", "numeric", N(6, 41, 0, "weeks"), syn=["gestational age", "weeks of gestation"], code="18185-9", p=0.6, reps=(1, 3)),
            V("Menstrual cycle regularity", "Observations", "coded", C("regular", "irregular", "absent"), syn=["menstrual cycle regularity", "cycle regularity"], p=0.8),
            V("Polycystic ovary syndrome", "Conditions", "date", syn=["polycystic ovary syndrome", "PCOS"], code="E28.2", p=0.3),
            V("Pelvic pain", "Symptoms", "coded", SEV, syn=["pelvic pain", "lower abdominal cramping"], code="30473006", p=0.5),
            V("Pelvic ultrasound", "Procedures", "date", syn=["pelvic ultrasound", "transvaginal ultrasound"], code="268445003", p=0.7),
            V("Prenatal visit", "Names", "date", syn=["prenatal visit", "antenatal visit"], p=0.6, reps=(1, 3)),
            V("Prenatal care plan", "Care-plans", "coded", STATUS, syn=["prenatal care plan", "antenatal care plan"], code="134435003", p=0.55),
        ]),
    "gout": dict(
        name="Gout", group="Endocrine & Metabolic Disorders", sex="any", age=(35, 85), years=8,
        variables=[
            V("Gout", "Conditions", "date", syn=["gout", "gouty arthritis"], code="M10.9", extra=[("SNOMED", "90560007")], p=0.95),
            V("Serum uric acid", "Observations", "numeric", N(3.0, 13.0, 1, "mg/dL"), syn=["serum uric acid", "urate level", "uric acid"], code="3084-1", p=0.95, reps=(1, 3)),
            V("Serum creatinine", "Observations", "numeric", N(0.5, 2.5, 2, "mg/dL"), syn=["serum creatinine", "creatinine"], code="2160-0", concept="creatinine", p=0.8, reps=(1, 2)),
            V("Joint pain", "Symptoms", "coded", SEV, syn=["joint pain", "arthralgia"], code="57676002", p=0.9),
            V("Joint swelling", "Symptoms", "boolean", B(0.9), syn=["joint swelling", "swollen joint"], code="299060006", p=0.7),
            V("Allopurinol", "Medications", "coded", C("100 mg daily", "300 mg daily", "200 mg daily"), syn=["allopurinol", "zyloprim"], code="519", p=0.75),
            V("Colchicine", "Medications", "coded", C("0.6 mg twice daily", "0.6 mg daily"), syn=["colchicine", "colcrys"], code="2683", p=0.6),
            V("Arthrocentesis", "Procedures", "date", syn=["arthrocentesis", "joint aspiration"], code="74010007", p=0.35),
            V("Gout management plan", "Care-plans", "coded", STATUS, syn=["gout management plan", "urate lowering plan"], p=0.7),
            CHECKUP(p=0.8, reps=(1, 2)),
        ]),
    "attention_deficit_disorder": dict(
        name="Attention Deficit Disorder (ADD)", group="Neurological & Psychiatric Conditions", sex="any", age=(6, 40), years=8,
        variables=[
            V("Attention deficit hyperactivity disorder", "Conditions", "date", syn=["attention deficit hyperactivity disorder", "ADHD", "attention deficit disorder"], code="F90.9", p=0.95),
            V("ADHD presentation", "Observations", "coded", C("predominantly inattentive", "predominantly hyperactive-impulsive", "combined"), syn=["ADHD presentation", "ADHD subtype"], p=0.85),
            V("Vanderbilt assessment score", "Observations", "numeric", N(0, 54, 0, "score"), syn=["Vanderbilt assessment score", "Vanderbilt score"], p=0.7, reps=(1, 3)),
            V("Methylphenidate", "Medications", "coded", C("10 mg twice daily", "18 mg daily", "36 mg daily", "54 mg daily"), syn=["methylphenidate", "ritalin", "concerta"], code="6901", p=0.6),
            V("Amphetamine salts", "Medications", "coded", C("10 mg daily", "20 mg daily", "30 mg daily"), syn=["amphetamine salts", "adderall"], code="725", p=0.4),
            V("Difficulty concentrating", "Symptoms", "coded", SEV, syn=["difficulty concentrating", "poor concentration", "inattention"], code="26329005", p=0.85),
            V("Hyperactivity", "Symptoms", "boolean", B(0.8), syn=["hyperactivity", "hyperactive behavior"], code="44548000", p=0.6),
            V("Psychological evaluation", "Procedures", "date", syn=["psychological evaluation", "neuropsychological testing"], code="710841007", p=0.7),
            V("Behavioral therapy plan", "Care-plans", "coded", STATUS, syn=["behavioral therapy plan", "behaviour management plan"], p=0.6),
            V("Psychiatry follow-up encounter", "Names", "date", syn=["psychiatry follow-up encounter", "psychiatric follow-up"], p=0.7, reps=(1, 3)),
        ]),
    "epilepsy": dict(
        name="Epilepsy", group="Neurological & Psychiatric Conditions", sex="any", age=(5, 75), years=8,
        variables=[
            V("Epilepsy", "Conditions", "date", syn=["epilepsy", "seizure disorder"], code="G40.909", p=0.95),
            V("Seizure type", "Observations", "coded", C("focal aware", "focal impaired awareness", "generalized tonic-clonic", "absence"), syn=["seizure type", "seizure classification"], p=0.85),
            V("Seizure frequency per month", "Observations", "numeric", N(0, 30, 0, "1"), syn=["seizure frequency per month", "monthly seizure count"], p=0.8, reps=(1, 3)),
            V("Levetiracetam", "Medications", "coded", C("500 mg twice daily", "750 mg twice daily", "1000 mg twice daily"), syn=["levetiracetam", "keppra"], code="114477", p=0.6),
            V("Lamotrigine", "Medications", "coded", C("100 mg twice daily", "200 mg twice daily"), syn=["lamotrigine", "lamictal"], code="28439", p=0.35),
            V("Electroencephalogram", "Procedures", "date", syn=["electroencephalogram", "EEG"], code="54550000", p=0.85),
            V("Seizure action plan", "Care-plans", "coded", STATUS, syn=["seizure action plan", "epilepsy care plan"], p=0.7),
            V("Vagus nerve stimulator", "Devices", "boolean", B(0.95), syn=["vagus nerve stimulator", "VNS device"], p=0.1),
        ]),
    "copd": dict(
        name="COPD", group="Respiratory Conditions", sex="any", age=(45, 85), years=10,
        variables=[
            V("Chronic obstructive pulmonary disease", "Conditions", "date", syn=["chronic obstructive pulmonary disease", "COPD", "chronic obstructive lung disease"], code="J44.9", extra=[("SNOMED", "13645005")], p=0.95),
            V("FEV1", "Observations", "numeric", N(0.6, 3.5, 2, "L"), syn=["FEV1", "forced expiratory volume in 1 second"], code="20150-9", p=0.9, reps=(1, 3)),
            V("FEV1/FVC ratio", "Observations", "numeric", N(30, 69, 0, "%"), syn=["FEV1/FVC ratio", "Tiffeneau index"], code="19926-5", p=0.85, reps=(1, 2)),
            V("Oxygen saturation", "Observations", "numeric", N(84, 99, 0, "%"), syn=["oxygen saturation", "SpO2", "pulse oximetry"], code="59408-5", concept="spo2", p=0.9, reps=(1, 3)),
            V("GOLD stage", "Observations", "coded", C("GOLD 1", "GOLD 2", "GOLD 3", "GOLD 4"), syn=["GOLD stage", "GOLD grade"], p=0.85),
            V("Smoking status", "Observations", "coded", C("current smoker", "former smoker", "never smoker"), syn=["smoking status", "tobacco use"], code="72166-2", concept="smoking_status", p=0.9),
            V("Chronic cough", "Symptoms", "coded", SEV, syn=["chronic cough", "persistent cough", "cough"], code="68154008", p=0.8),
            V("Dyspnea", "Symptoms", "coded", SEV, syn=["dyspnea", "breathlessness"], code="267036007", p=0.85),
            V("Tiotropium", "Medications", "coded", C("18 mcg inhaled daily", "2.5 mcg 2 puffs daily"), syn=["tiotropium", "spiriva"], code="274783", p=0.7),
            ALBUTEROL(p=0.75),
            V("Prednisone", "Medications", "coded", C("40 mg daily for 5 days", "20 mg daily for 5 days"), syn=["prednisone", "oral steroid burst"], code="8640", concept="prednisone", p=0.4),
            V("Spirometry", "Procedures", "date", syn=["spirometry", "pulmonary function test"], code="127783003", concept="spirometry", p=0.85),
            V("Pulmonary rehabilitation plan", "Care-plans", "coded", STATUS, syn=["pulmonary rehabilitation plan", "pulmonary rehab"], p=0.6),
            V("Oxygen concentrator", "Devices", "boolean", B(0.95), syn=["oxygen concentrator", "home oxygen"], code="426160001", p=0.3),
            FLU(p=0.7),
            V("Pneumococcal polysaccharide vaccine", "Immunizations", "date", syn=["pneumococcal polysaccharide vaccine", "PPSV23", "pneumonia vaccine"], concept="ppsv23", p=0.6),
            V("Encounter for problem", "Codes", "date", syn=["encounter for problem", "problem-focused encounter"], code="390906007", concept="problem_encounter", p=0.8, reps=(1, 3)),
        ]),
    "asthma": dict(
        name="Asthma", group="Respiratory Conditions", sex="any", age=(5, 70), years=8,
        variables=[
            V("Asthma", "Conditions", "date", syn=["asthma", "bronchial asthma", "reactive airway disease"], code="J45.909", extra=[("SNOMED", "195967001")], p=0.95),
            V("Asthma severity", "Observations", "coded", C("intermittent", "mild persistent", "moderate persistent", "severe persistent"), syn=["asthma severity", "asthma classification"], p=0.85),
            V("Peak expiratory flow", "Observations", "numeric", N(150, 650, 0, "L/min"), syn=["peak expiratory flow", "peak flow", "PEF"], code="19935-6", p=0.85, reps=(1, 3)),
            V("Asthma control test score", "Observations", "numeric", N(5, 25, 0, "score"), syn=["asthma control test score", "ACT score"], p=0.7, reps=(1, 2)),
            V("Blood eosinophil count", "Observations", "numeric", N(0.0, 1.5, 2, "10*3/uL"), syn=["blood eosinophil count", "eosinophils"], code="711-2", concept="eosinophils", p=0.5),
            V("Nocturnal cough", "Symptoms", "coded", SEV, syn=["nocturnal cough", "night cough", "cough"], code="161947006", amb="respiratory-cough", p=0.7),
            V("Wheezing", "Symptoms", "coded", SEV, syn=["wheezing", "wheeze"], code="56018004", concept="wheezing", p=0.85),
            V("Chest tightness", "Symptoms", "boolean", B(0.85), syn=["chest tightness", "tight chest"], code="23924001", p=0.6),
            ALBUTEROL(p=0.9, syn=["inhaler"], amb="asthma-inhaler"),
            V("Fluticasone inhaler", "Medications", "coded", C("110 mcg 2 puffs twice daily", "220 mcg 2 puffs twice daily", "44 mcg 2 puffs twice daily"), syn=["fluticasone inhaler", "flovent", "inhaler"], code="896188", amb="asthma-inhaler", p=0.7),
            V("Montelukast", "Medications", "coded", C("10 mg daily", "5 mg daily", "4 mg daily"), syn=["montelukast", "singulair"], code="88249", p=0.4),
            V("Spirometry", "Procedures", "date", syn=["spirometry", "pulmonary function test"], code="127783003", concept="spirometry", p=0.7),
            V("Asthma self management plan", "Care-plans", "coded", STATUS, syn=["asthma self management plan", "asthma action plan"], code="699728000", p=0.8),
            V("Spacer device", "Devices", "boolean", B(0.95), syn=["spacer device", "inhaler spacer", "aerochamber"], p=0.35),
            FLU(p=0.65),
        ]),
    "allergic_rhinitis": dict(
        name="Allergic Rhinitis", group="Immunological & Allergic Disorders", sex="any", age=(5, 70), years=6,
        variables=[
            V("Allergic rhinitis", "Conditions", "date", syn=["allergic rhinitis", "hay fever", "seasonal allergies"], code="J30.9", p=0.95),
            V("Nasal congestion", "Symptoms", "coded", SEV, syn=["nasal congestion", "stuffy nose", "blocked nose"], code="68235000", p=0.85),
            V("Sneezing", "Symptoms", "boolean", B(0.9), syn=["sneezing", "sneezes"], code="76067001", p=0.75),
            V("Itchy eyes", "Symptoms", "coded", SEV, syn=["itchy eyes", "ocular pruritus"], code="74776002", p=0.6),
            V("Total IgE", "Observations", "numeric", N(5, 900, 0, "IU/mL"), syn=["total IgE", "serum IgE", "immunoglobulin E"], code="19113-0", concept="total_ige", p=0.5),
            V("Skin prick test result", "Observations", "coded", C("grass pollen positive", "dust mite positive", "cat dander positive", "ragweed positive", "negative"), syn=["skin prick test result", "allergy skin test"], concept="skin_prick", p=0.6),
            V("Cetirizine", "Medications", "coded", C("10 mg daily", "5 mg daily"), syn=["cetirizine", "zyrtec"], code="20610", concept="cetirizine", p=0.7),
            V("Fluticasone nasal spray", "Medications", "coded", C("50 mcg 2 sprays each nostril daily", "50 mcg 1 spray each nostril daily"), syn=["fluticasone nasal spray", "flonase"], code="895994", p=0.6),
            V("Allergen immunotherapy", "Procedures", "date", syn=["allergen immunotherapy", "allergy shots"], code="180256009", p=0.25),
            V("Allergy management plan", "Care-plans", "coded", STATUS, syn=["allergy management plan", "allergen avoidance plan"], concept="allergy_plan", p=0.6),
        ]),
    "bronchitis": dict(
        name="Bronchitis", group="Respiratory Conditions", sex="any", age=(5, 80), years=5,
        variables=[
            V("Acute bronchitis", "Conditions", "date", syn=["acute bronchitis", "bronchitis", "chest cold"], code="J20.9", extra=[("SNOMED", "10509002")], p=0.95),
            V("Productive cough", "Symptoms", "coded", SEV, syn=["productive cough", "wet cough", "cough"], code="28743005", amb="respiratory-cough", p=0.85),
            V("Dry cough", "Symptoms", "coded", SEV, syn=["dry cough", "nonproductive cough", "cough"], code="11833005", amb="respiratory-cough", p=0.6),
            V("Shortness of breath", "Symptoms", "coded", SEV, syn=["shortness of breath", "SOB", "breathing difficulty"], code="230145002", amb="bronchitis-breath", p=0.7),
            V("Wheezing", "Symptoms", "coded", SEV, syn=["wheezing", "wheeze", "breathing difficulty"], code="56018004", concept="wheezing", amb="bronchitis-breath", p=0.6),
            V("Body temperature", "Observations", "numeric", N(36.5, 39.8, 1, "Cel"), syn=["body temperature", "temperature"], code="8310-5", concept="temperature", p=0.8, reps=(1, 3)),
            V("Oxygen saturation", "Observations", "numeric", N(84, 99, 0, "%"), syn=["oxygen saturation", "SpO2", "pulse oximetry"], code="59408-5", concept="spo2", p=0.7, reps=(1, 2)),
            AMOX(syn=["antibiotic"], amb="bronchitis-antibiotic", p=0.55),
            V("Azithromycin", "Medications", "coded", C("500 mg day 1 then 250 mg daily", "500 mg daily for 3 days"), syn=["azithromycin", "z-pack", "antibiotic"], code="18631", amb="bronchitis-antibiotic", p=0.45),
            V("Dextromethorphan", "Medications", "coded", C("30 mg every 6 hours", "20 mg every 4 hours"), syn=["dextromethorphan", "cough suppressant"], code="3289", p=0.5),
            FLU(syn=["vaccination"], amb="bronchitis-vaccine", p=0.7),
            V("Pneumococcal polysaccharide vaccine", "Immunizations", "date", syn=["pneumococcal polysaccharide vaccine", "PPSV23", "pneumonia vaccine", "vaccination"], concept="ppsv23", amb="bronchitis-vaccine", p=0.6),
        ]),
    "dermatitis": dict(
        name="Dermatitis", group="Immunological & Allergic Disorders", sex="any", age=(2, 70), years=6,
        variables=[
            V("Atopic dermatitis", "Conditions", "date", syn=["atopic dermatitis", "eczema"], code="L20.9", concept="atopic_dermatitis", p=0.95),
            V("Eczema area and severity index", "Observations", "numeric", N(0.0, 72.0, 1, "score"), syn=["eczema area and severity index", "EASI score"], p=0.75, reps=(1, 3)),
            V("Affected body area", "Observations", "coded", C("face", "hands", "flexural creases", "trunk", "legs"), syn=["affected body area", "lesion location"], p=0.8),
            V("Pruritus", "Symptoms", "coded", SEV, syn=["pruritus", "itching", "itchy skin"], code="418290006", p=0.9),
            V("Skin redness", "Symptoms", "boolean", B(0.9), syn=["skin redness", "erythema"], code="247441003", p=0.75),
            V("Hydrocortisone cream", "Medications", "coded", C("1% twice daily", "2.5% twice daily"), syn=["hydrocortisone cream", "topical hydrocortisone"], code="106258", p=0.65),
            V("Tacrolimus ointment", "Medications", "coded", C("0.03% twice daily", "0.1% twice daily"), syn=["tacrolimus ointment", "protopic"], code="313190", p=0.35),
            V("Patch test", "Procedures", "date", syn=["patch test", "contact allergy testing"], code="252569009", p=0.3),
            V("Skin care plan", "Care-plans", "coded", STATUS, syn=["skin care plan", "emollient regimen"], p=0.75),
            V("Dermatology consultation", "Names", "date", syn=["dermatology consultation", "dermatology visit"], p=0.7),
        ]),
    "atopy": dict(
        name="Atopy", group="Immunological & Allergic Disorders", sex="any", age=(2, 60), years=6,
        variables=[
            V("Atopic predisposition", "Conditions", "date", syn=["atopic predisposition", "atopy"], code="Z91.048", p=0.9),
            V("Total IgE", "Observations", "numeric", N(5, 900, 0, "IU/mL"), syn=["total IgE", "serum IgE", "immunoglobulin E"], code="19113-0", concept="total_ige", p=0.8),
            V("Blood eosinophil count", "Observations", "numeric", N(0.0, 1.5, 2, "10*3/uL"), syn=["blood eosinophil count", "eosinophils"], code="711-2", concept="eosinophils", p=0.6),
            V("Skin prick test result", "Observations", "coded", C("grass pollen positive", "dust mite positive", "cat dander positive", "ragweed positive", "negative"), syn=["skin prick test result", "allergy skin test"], concept="skin_prick", p=0.7),
            V("Family history of allergy", "Observations", "boolean", B(0.8), syn=["family history of allergy", "familial atopy"], p=0.7),
            V("Cetirizine", "Medications", "coded", C("10 mg daily", "5 mg daily"), syn=["cetirizine", "zyrtec"], code="20610", concept="cetirizine", p=0.5),
            V("Allergy management plan", "Care-plans", "coded", STATUS, syn=["allergy management plan", "allergen avoidance plan"], concept="allergy_plan", p=0.6),
            V("Allergy clinic encounter", "Names", "date", syn=["allergy clinic encounter", "allergist visit"], concept="allergy_clinic", p=0.7),
        ]),
    "food_allergies": dict(
        name="Food Allergies", group="Immunological & Allergic Disorders", sex="any", age=(1, 60), years=6,
        variables=[
            V("Food allergy", "Conditions", "date", syn=["food allergy", "food hypersensitivity"], code="Z91.018", p=0.95),
            V("Primary allergen", "Observations", "coded", C("peanut", "tree nut", "shellfish", "egg", "milk", "wheat", "soy"), syn=["primary allergen", "culprit food"], p=0.9),
            V("Peanut specific IgE", "Observations", "numeric", N(0.1, 100.0, 1, "kU/L"), syn=["peanut specific IgE", "peanut IgE"], code="6206-7", p=0.5),
            V("Anaphylaxis", "Symptoms", "boolean", B(0.7), syn=["anaphylaxis", "anaphylactic reaction"], code="39579001", p=0.4),
            V("Hives", "Symptoms", "coded", SEV, syn=["hives", "urticaria"], code="126485001", p=0.6),
            V("Epinephrine auto-injector", "Medications", "coded", C("0.3 mg as needed", "0.15 mg as needed"), syn=["epinephrine auto-injector", "epipen"], code="727386", p=0.8),
            V("Oral food challenge", "Procedures", "date", syn=["oral food challenge", "food challenge test"], p=0.3),
            V("Allergy clinic encounter", "Names", "date", syn=["allergy clinic encounter", "allergist visit"], concept="allergy_clinic", p=0.7),
        ]),
    "appendicitis": dict(
        name="Appendicitis", group="Infectious & Inflammatory Diseases", sex="any", age=(8, 70), years=3,
        variables=[
            V("Acute appendicitis", "Conditions", "date", syn=["acute appendicitis", "appendicitis"], code="K35.80", extra=[("SNOMED", "85189001")], p=0.95),
            V("White blood cell count", "Observations", "numeric", N(4.0, 22.0, 1, "10*3/uL"), syn=["white blood cell count", "WBC", "leukocyte count"], code="6690-2", p=0.9, reps=(1, 3)),
            V("C-reactive protein", "Observations", "numeric", N(1, 250, 0, "mg/L"), syn=["C-reactive protein", "CRP"], code="1988-5", p=0.7),
            V("Alvarado score", "Observations", "numeric", N(0, 10, 0, "score"), syn=["Alvarado score", "Alvarado"], p=0.6),
            V("Right lower quadrant pain", "Symptoms", "coded", SEV, syn=["right lower quadrant pain", "RLQ pain"], code="301754002", p=0.9),
            V("Nausea", "Symptoms", "boolean", B(0.85), syn=["nausea", "queasiness"], code="422587007", p=0.7),
            V("Appendectomy", "Procedures", "coded", C("laparoscopic", "open"), syn=["appendectomy", "appendicectomy"], code="80146002", p=0.85),
            V("Ceftriaxone", "Medications", "coded", C("1 g IV daily", "2 g IV daily"), syn=["ceftriaxone", "rocephin"], code="2193", p=0.6),
            V("Emergency department encounter", "Codes", "coded", CLASS, syn=["emergency department encounter", "ED visit"], code="50849002", p=0.85),
            V("CT abdomen", "Procedures", "date", syn=["CT abdomen", "abdominal CT scan"], code="169070004", p=0.7),
        ]),
    "ear_infections": dict(
        name="Ear Infections", group="Infectious & Inflammatory Diseases", sex="any", age=(1, 12), years=4,
        variables=[
            V("Otitis media", "Conditions", "date", syn=["otitis media", "ear infection", "middle ear infection"], code="H66.90", extra=[("SNOMED", "65363002")], p=0.95),
            V("Ear pain", "Symptoms", "coded", SEV, syn=["ear pain", "otalgia", "ear discomfort"], code="16001004", amb="ear-symptom", p=0.85),
            V("Middle ear effusion", "Symptoms", "coded", SEV, syn=["middle ear effusion", "effusion", "ear discomfort"], code="80327007", amb="ear-symptom", p=0.7),
            V("Body temperature", "Observations", "numeric", N(36.5, 39.8, 1, "Cel"), syn=["body temperature", "temperature"], code="8310-5", concept="temperature", p=0.8, reps=(1, 3)),
            AMOX(syn=["antibiotic"], amb="ear-antibiotic", p=0.7),
            V("Amoxicillin-clavulanate", "Medications", "coded", C("875 mg/125 mg twice daily", "500 mg/125 mg three times daily"), syn=["amoxicillin-clavulanate", "augmentin", "antibiotic"], code="562508", amb="ear-antibiotic", p=0.4),
            V("Pneumococcal conjugate vaccine", "Immunizations", "date", syn=["pneumococcal conjugate vaccine", "PCV13", "vaccination"], code="871833000", amb="ear-vaccine", p=0.8),
            FLU(syn=["vaccination"], amb="ear-vaccine", p=0.6),
        ]),
}


def _hash_int(key, mod):
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big") % mod


def _loinc_check(digits):
    # mod-10 (Luhn-style) check digit as used by LOINC
    total = 0
    for i, ch in enumerate(reversed(digits)):
        d = int(ch)
        if i % 2 == 0:
            d *= 2
            d = d // 10 + d % 10
        total += d
    return str((10 - total % 10) % 10)


def synthetic_code(system, key):
    if system == "LOINC":
        body = str(90000 + _hash_int(key, 9999))
        return f"{body}-{_loinc_check(body)}"
    if system == "SNOMED":
        return str(700000000 + _hash_int(key, 99999999) * 10)
    if system == "RXNORM":
        return str(2000000 + _hash_int(key, 999999))
    if system == "ICD10":
        n = _hash_int(key, 1000)
        return f"U{n // 10:02d}.{n % 10}"
    raise ValueError(system)


def build():
    diseases = []
    seen_codes = {}
    for disease_id, d in CATALOG.items():
        target = max(8, math.ceil(PUBLISHED_COUNTS[disease_id] * SCALE))
        if len(d["variables"]) != target:
            raise SystemExit(f"{disease_id}: {len(d['variables'])} variables, expected {target}")
        variables, templates = [], []
        for v in d["variables"]:
            vid = f"{disease_id}.{slug(v['name'])}"
            concept = v["concept"] or vid
            system = v["system"] or DEFAULT_SYSTEM.get(v["cat"], "SNOMED")
            code = v["code"] or synthetic_code(system, concept)
            owner = seen_codes.setdefault((system, code), concept)
            if owner != concept:
                raise SystemExit(f"code {system}:{code} reused by {owner} and {concept}")
            bindings = [{"system": system, "code": code}]
            bindings += [{"system": s, "code": c} for s, c in v["extra"]]
            variables.append({
                "variable_id": vid,
                "name": v["name"],
                "category": v["cat"],
                "value_kind": v["kind"],
                "domain": v["dom"],
                "code_bindings": bindings,
                "synonyms": v["syn"],
                "ambiguity_class": v["amb"],
            })
            templates.append({"variable_id": vid, "probability": v["p"], "repeats": list(v["reps"])})
        diseases.append({
            "disease_id": disease_id,
            "name": d["name"],
            "group": d["group"],
            "demographics": {"sex": d["sex"], "age": list(d["age"]), "history_years": d["years"]},
            "variables": variables,
            "event_templates": templates,
        })
    return {"catalog_version": 1, "diseases": diseases}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check", action="store_true", help="fail if the bundled file is stale")
    args = parser.parse_args(argv)
    text = json.dumps(build(), indent=1, ensure_ascii=False) + "\n"
    if args.check:
        if OUT.read_text(encoding="utf-8") != text:
            print("catalog.json is stale", file=sys.stderr)
            return 1
        return 0
    OUT.write_text(text, encoding="utf-8")
    n = sum(len(d["variables"]) for d in json.loads(text)["diseases"])
    print(f"wrote {OUT} ({n} variables)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
