"""Synthetic corrupted-corpus generator with recorded ground truth.

Every record starts from canonical field values; corruptions are planted on
top and each one is recorded as (record_id, field, expected_value), so the
acceptance check can score exactly which plants were repaired.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from querygov.cleaning import RawRecord

CITY_COUNTRY = [
    ("Moscow", "Russia"),
    ("Saint Petersburg", "Russia"),
    ("Ankara", "Turkey"),
    ("Istanbul", "Turkey"),
]
ROLE_DEPT = [
    ("Civil Engineer", "Engineering"),
    ("Electrical Engineer", "Engineering"),
    ("HR Specialist", "Human Resources"),
    ("Accountant", "Finance"),
    ("Project Manager", "Engineering"),
]
SCHOOLS = [
    "Middle East Technical University",
    "Istanbul Technical University",
    "Moscow State University",
    "Konya Anatolian High School",
]
PROJECTS = ["GPP", "Metro Line", "Airport Terminal"]
FIRST_NAMES = ["Ivan", "Olga", "Mehmet", "Ayse", "Pavel", "Elif", "Boris", "Zeynep"]
LAST_NAMES = ["Petrov", "Smirnova", "Yilmaz", "Kaya", "Volkov", "Demir", "Ivanov", "Sahin"]

# Known-variant corruptions per canonical value (entity tables or the
# translation dictionary both recover these).
VARIANTS = {
    "Moscow": ["Moskva", "Москва", "moskova", "moscow"],
    "Saint Petersburg": ["St. Petersburg", "St Petersburg", "Санкт-Петербург"],
    "Ankara": ["Анкара", "ankara", "ANKARA"],
    "Istanbul": ["İstanbul", "Стамбул", "istanbul"],
    "Middle East Technical University": [
        "ODTÜ", "ODTU", "METU", "Orta Doğu Teknik Üniversitesi",
        "Orta Dogu Teknik Universitesi",
    ],
    "Istanbul Technical University": ["İTÜ", "ITU", "İstanbul Teknik Üniversitesi"],
    "Moscow State University": ["MGU", "МГУ", "Московский государственный университет"],
    "Konya Anatolian High School": ["Konya anadolu", "Konya anadolu lisesi"],
    "GPP": ["Gpp", "gpp project", "GPP project", "gpp proj"],
    "Metro Line": ["metro", "metro line project", "metroline"],
    "Airport Terminal": ["airport", "airport terminal project"],
    "Civil Engineer": ["civil engineer", "civil eng", "CIVIL ENGINEER"],
    "Electrical Engineer": ["electrical engineer", "electrical eng"],
    "HR Specialist": ["hr specialist", "İK uzmanı"],
    "Accountant": ["accountant", "ACCOUNTANT"],
    "Project Manager": ["project manager", "proj manager"],
    "Human Resources": ["İnsan kaynakları", "insan kaynaklari", "Отдел кадров", "HR"],
    "Engineering": ["Mühendislik", "Инженерия", "engineering"],
    "Finance": ["Finans", "Финансы", "finance"],
}

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"

CORRUPTIBLE_FIELDS = (
    "actual_working_city", "egitimOkulAdi", "role_eng", "department", "c_project_eng",
)


@dataclass(frozen=True)
class Plant:
    record_id: str
    field: str
    corrupted: str
    expected: str
    kind: str  # "typo" | "variant" | "mixed_language"


def _typo(rng: random.Random, value: str) -> str | None:
    """One or two character edits inside a long-enough word."""
    words = value.split()
    candidates = [i for i, w in enumerate(words) if len(w) >= 5 and w.isalpha()]
    if not candidates:
        return None
    i = rng.choice(candidates)
    word = words[i]
    edits = 2 if len(word) >= 7 and rng.random() < 0.4 else 1
    chars = list(word)
    for _ in range(edits):
        op = rng.choice(["sub", "del", "ins"])
        pos = rng.randrange(1, len(chars))  # keep the first letter stable
        if op == "sub":
            chars[pos] = rng.choice(_ALPHABET)
        elif op == "del" and len(chars) > 4:
            del chars[pos]
        else:
            chars.insert(pos, rng.choice(_ALPHABET))
    words[i] = "".join(chars)
    corrupted = " ".join(words)
    return None if corrupted == value else corrupted


def generate_corpus(
    count: int, seed: int = 314, corruption_rate: float = 0.8
) -> tuple[list[RawRecord], list[RawRecord], list[Plant]]:
    """Returns (clean_records, corrupted_records, plants)."""
    rng = random.Random(seed)
    clean_records: list[RawRecord] = []
    corrupted_records: list[RawRecord] = []
    plants: list[Plant] = []
    for i in range(count):
        record_id = f"G{i:05d}"
        city, country = CITY_COUNTRY[rng.randrange(len(CITY_COUNTRY))]
        role, dept = ROLE_DEPT[rng.randrange(len(ROLE_DEPT))]
        employment = rng.choice(["payroll", "contractor"])
        fields = {
            "first_name": rng.choice(FIRST_NAMES),
            "last_name": rng.choice(LAST_NAMES),
            "actual_working_city": city,
            "country": country,
            "egitimOkulAdi": rng.choice(SCHOOLS),
            "role_eng": role,
            "department": dept,
            "c_project_eng": rng.choice(PROJECTS),
            "employment_type": employment,
            "is_payroll": "true" if employment == "payroll" else "false",
            "employee_status": rng.choice(["true", "true", "true", "false"]),
            "adines_number": f"2{i:010d}",
            "hire_year": str(rng.randint(2008, 2024)),
        }
        modified = f"2024-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}T{rng.randint(0, 23):02d}:00:00"
        clean_records.append(RawRecord(record_id, modified, dict(fields)))

        corrupted = dict(fields)
        if rng.random() < corruption_rate:
            target_fields = rng.sample(
                CORRUPTIBLE_FIELDS, k=1 if rng.random() < 0.6 else 2
            )
            for field in target_fields:
                expected = fields[field]
                kind = rng.choice(["typo", "variant", "mixed_language"])
                if kind == "typo":
                    bad = _typo(rng, expected)
                    if bad is None:
                        continue
                else:
                    options = VARIANTS.get(expected, [])
                    if kind == "mixed_language":
                        non_ascii = [v for v in options if any(ord(c) > 127 for c in v)]
                        options = non_ascii or options
                    if not options:
                        continue
                    bad = rng.choice(options)
                    if bad == expected:
                        continue
                corrupted[field] = bad
                plants.append(Plant(record_id, field, bad, expected, kind))
        corrupted_records.append(RawRecord(record_id, modified, corrupted))
    return clean_records, corrupted_records, plants
