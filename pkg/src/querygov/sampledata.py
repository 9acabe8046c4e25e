"""Sample-domain fixtures: seed rows, the labeled desk corpus, policy corpora.

The desk corpus freezes expected answers computed by plain Python filtering
over the literal seed rows below; that evaluation never touches SQL, so it
serves as the independent oracle for end-to-end result checks. The same
module wires the demo service used by the CLI and the acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .catalog import SchemaCatalog, load_catalog
from .cleaning import CleaningPipeline, load_pipeline_config
from .embedding import HashingEmbedder
from .engine import PromptTemplate, ScriptedProvider, preprocess_question, translate_question
from .guard import run_guard
from .resources import data_path
from .retrieval import ExamplePair, VectorIndex
from .service.audit import MemoryAuditLog
from .service.config import ServiceConfig
from .service.executor import AnalyticsStore, create_schema
from .service.jobs import QueryService
from .service.sessions import SessionRegistry
from .spelling import load_dictionary
from .translation import default_translator

ANALYST_TOKEN = "analyst-session-0001"
RESTRICTED_TOKEN = "restricted-session-0002"


@dataclass(frozen=True)
class Employee:
    record_id: str
    first_name: str
    last_name: str
    city: str
    country: str
    school: str
    role: str
    department: str
    project: str
    employment_type: str
    is_payroll: str
    employee_status: str
    adines_number: str
    hire_year: int


METU = "Middle East Technical University"
ITU = "Istanbul Technical University"
MGU = "Moscow State University"
KONYA = "Konya Anatolian High School"

SEED_EMPLOYEES: tuple[Employee, ...] = (
    # The four active payroll civil engineers on GPP in Moscow: the
    # headline scenario count.
    Employee("E001", "Ivan", "Petrov", "Moscow", "Russia", MGU, "Civil Engineer", "Engineering", "GPP", "payroll", "true", "true", "10000000001", 2018),
    Employee("E002", "Mehmet", "Yilmaz", "Moscow", "Russia", METU, "Civil Engineer", "Engineering", "GPP", "payroll", "true", "true", "10000000002", 2019),
    Employee("E003", "Anna", "Sokolova", "Moscow", "Russia", MGU, "Civil Engineer", "Engineering", "GPP", "payroll", "true", "true", "10000000003", 2020),
    Employee("E004", "Elif", "Demir", "Moscow", "Russia", METU, "Civil Engineer", "Engineering", "GPP", "payroll", "true", "true", "10000000004", 2021),
    Employee("E005", "Boris", "Ivanov", "Moscow", "Russia", MGU, "Civil Engineer", "Engineering", "GPP", "payroll", "true", "false", "10000000005", 2015),
    Employee("E006", "Ayse", "Kaya", "Ankara", "Turkey", METU, "Civil Engineer", "Engineering", "GPP", "payroll", "true", "true", "10000000006", 2017),
    Employee("E007", "Can", "Celik", "Ankara", "Turkey", ITU, "Civil Engineer", "Engineering", "GPP", "payroll", "true", "true", "10000000007", 2022),
    Employee("E008", "Olga", "Smirnova", "Moscow", "Russia", MGU, "Civil Engineer", "Engineering", "Metro Line", "payroll", "true", "true", "10000000008", 2016),
    Employee("E009", "Deniz", "Arslan", "Moscow", "Russia", METU, "Civil Engineer", "Engineering", "Metro Line", "payroll", "true", "true", "10000000009", 2019),
    Employee("E010", "Pavel", "Volkov", "Moscow", "Russia", MGU, "Electrical Engineer", "Engineering", "GPP", "payroll", "true", "true", "10000000010", 2018),
    Employee("E011", "Zeynep", "Sahin", "Istanbul", "Turkey", ITU, "Electrical Engineer", "Engineering", "Metro Line", "payroll", "true", "true", "10000000011", 2020),
    Employee("E012", "Emre", "Koc", "Istanbul", "Turkey", ITU, "Electrical Engineer", "Engineering", "Metro Line", "payroll", "true", "true", "10000000012", 2021),
    Employee("E013", "Maria", "Orlova", "Moscow", "Russia", MGU, "HR Specialist", "Human Resources", "GPP", "payroll", "true", "true", "10000000013", 2014),
    Employee("E014", "Fatma", "Aydin", "Ankara", "Turkey", KONYA, "HR Specialist", "Human Resources", "", "payroll", "true", "true", "10000000014", 2013),
    Employee("E015", "Selin", "Ozturk", "Ankara", "Turkey", KONYA, "HR Specialist", "Human Resources", "", "payroll", "true", "true", "10000000015", 2023),
    Employee("E016", "Dmitri", "Fedorov", "Istanbul", "Turkey", MGU, "Accountant", "Finance", "", "payroll", "true", "true", "10000000016", 2012),
    Employee("E017", "Hasan", "Polat", "Istanbul", "Turkey", ITU, "Accountant", "Finance", "", "payroll", "true", "true", "10000000017", 2019),
    Employee("E018", "Vera", "Morozova", "Moscow", "Russia", MGU, "Accountant", "Finance", "", "payroll", "true", "false", "10000000018", 2011),
    Employee("E019", "Murat", "Erdogan", "Moscow", "Russia", METU, "Project Manager", "Engineering", "GPP", "payroll", "true", "true", "10000000019", 2010),
    Employee("E020", "Irina", "Lebedeva", "Ankara", "Turkey", MGU, "Project Manager", "Engineering", "Metro Line", "payroll", "true", "true", "10000000020", 2016),
    Employee("E021", "Kemal", "Gunes", "Istanbul", "Turkey", ITU, "Project Manager", "Engineering", "Airport Terminal", "payroll", "true", "true", "10000000021", 2018),
    Employee("E022", "Nikolai", "Pavlov", "Saint Petersburg", "Russia", MGU, "Project Manager", "Engineering", "GPP", "payroll", "true", "false", "10000000022", 2015),
    Employee("E023", "Sergei", "Kozlov", "Moscow", "Russia", MGU, "Civil Engineer", "Engineering", "GPP", "contractor", "false", "true", "10000000023", 2021),
    Employee("E024", "Burak", "Aksoy", "Ankara", "Turkey", METU, "Civil Engineer", "Engineering", "Metro Line", "contractor", "false", "true", "10000000024", 2022),
    Employee("E025", "Leyla", "Cetin", "Istanbul", "Turkey", ITU, "Electrical Engineer", "Engineering", "Airport Terminal", "contractor", "false", "true", "10000000025", 2023),
    Employee("E026", "Oksana", "Belova", "Moscow", "Russia", MGU, "HR Specialist", "Human Resources", "", "contractor", "false", "true", "10000000026", 2020),
    Employee("E027", "Ali", "Dogan", "Saint Petersburg", "Russia", METU, "Civil Engineer", "Engineering", "Airport Terminal", "payroll", "true", "true", "10000000027", 2017),
    Employee("E028", "Galina", "Titova", "Ankara", "Turkey", MGU, "Electrical Engineer", "Engineering", "GPP", "payroll", "true", "true", "10000000028", 2014),
    Employee("E029", "Cem", "Yildiz", "Ankara", "Turkey", KONYA, "Accountant", "Finance", "", "payroll", "true", "true", "10000000029", 2021),
    Employee("E030", "Tatiana", "Egorova", "Moscow", "Russia", MGU, "Project Manager", "Engineering", "Metro Line", "payroll", "true", "true", "10000000030", 2019),
)

SEED_PROJECTS: tuple[tuple[str, str, str, int], ...] = (
    ("GPP", "Gas Processing Plant", "Moscow", 120),
    ("Metro Line", "Metro Line Extension", "Ankara", 80),
    ("Airport Terminal", "Airport Terminal Build", "Istanbul", 60),
)

EMPLOYEE_COLUMNS = (
    "first_name", "last_name", "actual_working_city", "country", "egitimOkulAdi",
    "role_eng", "department", "c_project_eng", "employment_type", "is_payroll",
    "employee_status", "adines_number", "hire_year",
)


def employee_fields(e: Employee) -> dict[str, str]:
    return {
        "first_name": e.first_name,
        "last_name": e.last_name,
        "actual_working_city": e.city,
        "country": e.country,
        "egitimOkulAdi": e.school,
        "role_eng": e.role,
        "department": e.department,
        "c_project_eng": e.project,
        "employment_type": e.employment_type,
        "is_payroll": e.is_payroll,
        "employee_status": e.employee_status,
        "adines_number": e.adines_number,
        "hire_year": str(e.hire_year),
    }


def seed_analytics_store(path: str | Path, catalog: SchemaCatalog) -> AnalyticsStore:
    store = AnalyticsStore(path)
    conn = store.connect()
    create_schema(conn, catalog)
    modified = "2024-01-01T00:00:00"
    for e in SEED_EMPLOYEES:
        conn.execute(
            "INSERT INTO employees (record_id, modified_at, first_name, last_name, "
            "actual_working_city, country, egitimOkulAdi, role_eng, department, "
            "c_project_eng, employment_type, is_payroll, employee_status, "
            "adines_number, hire_year) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
            (
                e.record_id, modified, e.first_name, e.last_name, e.city, e.country,
                e.school, e.role, e.department, e.project, e.employment_type,
                e.is_payroll, e.employee_status, e.adines_number, e.hire_year,
            ),
        )
    for code, name, city, headcount in SEED_PROJECTS:
        conn.execute(
            "INSERT INTO projects (project_code, project_name, project_city, "
            "headcount_plan) VALUES (?, ?, ?, ?)",
            (code, name, city, headcount),
        )
    conn.commit()
    conn.close()
    return store


# -- desk corpus with its pure-Python oracle ---------------------------------


@dataclass(frozen=True)
class DeskCase:
    case_id: str
    question: str
    language: str
    sql: str
    expected_rows: tuple[tuple[str, ...], ...]
    question_en: str = ""


def _active(e: Employee) -> bool:
    return e.employee_status == "true"


def _count(pred) -> tuple[tuple[str, ...], ...]:
    return ((str(sum(1 for e in SEED_EMPLOYEES if pred(e))),),)


def _group_count(key, pred) -> tuple[tuple[str, ...], ...]:
    counts: dict[str, int] = {}
    for e in SEED_EMPLOYEES:
        if pred(e):
            counts[key(e)] = counts.get(key(e), 0) + 1
    return tuple((k, str(v)) for k, v in sorted(counts.items()))


def build_desk_corpus(catalog: SchemaCatalog, translator) -> list[DeskCase]:
    cases: list[DeskCase] = []

    def add(question: str, sql: str, expected: tuple[tuple[str, ...], ...], language: str = "en"):
        cases.append(
            DeskCase(f"desk-{len(cases) + 1:03d}", question, language, sql, expected)
        )

    role_city = [
        ("Civil Engineer", "Moscow"), ("Civil Engineer", "Ankara"),
        ("Electrical Engineer", "Istanbul"), ("Electrical Engineer", "Moscow"),
        ("HR Specialist", "Moscow"), ("HR Specialist", "Ankara"),
        ("Accountant", "Istanbul"), ("Accountant", "Ankara"),
        ("Project Manager", "Moscow"), ("Project Manager", "Ankara"),
    ]
    for role, city in role_city:
        add(
            f"How many active {role}s are working in {city}?",
            "SELECT COUNT(*) FROM employees WHERE role_eng = '%s' "
            "AND actual_working_city = '%s' AND employee_status = 'true'" % (role, city),
            _count(lambda e, r=role, c=city: e.role == r and e.city == c and _active(e)),
        )

    for project in ("GPP", "Metro Line", "Airport Terminal"):
        add(
            f"How many payroll staff are on the {project} project?",
            "SELECT COUNT(*) FROM employees WHERE c_project_eng = '%s' "
            "AND is_payroll = 'true' AND employee_status = 'true'" % project,
            _count(lambda e, p=project: e.project == p and e.is_payroll == "true" and _active(e)),
        )
        add(
            f"How many people are on the {project} project?",
            "SELECT COUNT(*) FROM employees WHERE c_project_eng = '%s' "
            "AND employee_status = 'true'" % project,
            _count(lambda e, p=project: e.project == p and _active(e)),
        )

    for dept in ("Engineering", "Human Resources", "Finance"):
        add(
            f"How many active employees are in the {dept} department?",
            "SELECT COUNT(*) FROM employees WHERE department = '%s' "
            "AND employee_status = 'true'" % dept,
            _count(lambda e, d=dept: e.department == d and _active(e)),
        )

    for city in ("Moscow", "Ankara", "Istanbul", "Saint Petersburg"):
        add(
            f"How many active employees are based in {city}?",
            "SELECT COUNT(*) FROM employees WHERE actual_working_city = '%s' "
            "AND employee_status = 'true'" % city,
            _count(lambda e, c=city: e.city == c and _active(e)),
        )

    for role in ("Civil Engineer", "Electrical Engineer", "HR Specialist",
                 "Accountant", "Project Manager"):
        expected = tuple(
            (e.first_name, e.last_name)
            for e in sorted(
                (e for e in SEED_EMPLOYEES if e.role == role and _active(e)),
                key=lambda e: (e.last_name, e.first_name),
            )
        )
        add(
            f"List the names of active {role}s",
            "SELECT first_name, last_name FROM employees WHERE role_eng = '%s' "
            "AND employee_status = 'true' ORDER BY last_name, first_name" % role,
            expected,
        )

    for school in (METU, ITU, MGU, KONYA):
        add(
            f"How many employees studied at {school}?",
            "SELECT COUNT(*) FROM employees WHERE egitimOkulAdi = '%s'" % school,
            _count(lambda e, s=school: e.school == s),
        )

    add(
        "How many active employees are there per city?",
        "SELECT actual_working_city, COUNT(*) FROM employees "
        "WHERE employee_status = 'true' GROUP BY actual_working_city "
        "ORDER BY actual_working_city",
        _group_count(lambda e: e.city, _active),
    )
    add(
        "How many active employees are there per department?",
        "SELECT department, COUNT(*) FROM employees WHERE employee_status = 'true' "
        "GROUP BY department ORDER BY department",
        _group_count(lambda e: e.department, _active),
    )
    add(
        "How many active employees are there per role?",
        "SELECT role_eng, COUNT(*) FROM employees WHERE employee_status = 'true' "
        "GROUP BY role_eng ORDER BY role_eng",
        _group_count(lambda e: e.role, _active),
    )

    project_city = {code: city for code, _, city, _ in SEED_PROJECTS}
    for city in ("Moscow", "Ankara", "Istanbul"):
        add(
            f"How many active employees work on projects located in {city}?",
            "SELECT COUNT(*) FROM employees JOIN projects "
            "ON employees.c_project_eng = projects.project_code "
            "WHERE projects.project_city = '%s' "
            "AND employees.employee_status = 'true'" % city,
            _count(lambda e, c=city: project_city.get(e.project) == c and _active(e)),
        )

    add(
        "How many contractors are currently active?",
        "SELECT COUNT(*) FROM employees WHERE employment_type = 'contractor' "
        "AND employee_status = 'true'",
        _count(lambda e: e.employment_type == "contractor" and _active(e)),
    )
    add(
        "How many payroll employees are currently active?",
        "SELECT COUNT(*) FROM employees WHERE employment_type = 'payroll' "
        "AND employee_status = 'true'",
        _count(lambda e: e.employment_type == "payroll" and _active(e)),
    )
    add(
        "How many civil engineers are working on the GPP project in Moscow?",
        "SELECT COUNT(*) FROM employees WHERE role_eng = 'Civil Engineer' "
        "AND c_project_eng = 'GPP' AND actual_working_city = 'Moscow' "
        "AND is_payroll = 'true' AND employee_status = 'true'",
        _count(
            lambda e: e.role == "Civil Engineer" and e.project == "GPP"
            and e.city == "Moscow" and e.is_payroll == "true" and _active(e)
        ),
    )
    add(
        "How many employees were hired after 2019?",
        "SELECT COUNT(*) FROM employees WHERE hire_year > 2019",
        _count(lambda e: e.hire_year > 2019),
    )
    add(
        "How many employees were hired before 2015?",
        "SELECT COUNT(*) FROM employees WHERE hire_year < 2015",
        _count(lambda e: e.hire_year < 2015),
    )
    add(
        "What is the earliest hire year on record?",
        "SELECT MIN(hire_year) FROM employees",
        ((str(min(e.hire_year for e in SEED_EMPLOYEES)),),),
    )
    add(
        "What is the latest hire year on record?",
        "SELECT MAX(hire_year) FROM employees",
        ((str(max(e.hire_year for e in SEED_EMPLOYEES)),),),
    )
    add(
        "What is the combined planned headcount across all projects?",
        "SELECT SUM(headcount_plan) FROM projects",
        ((str(sum(h for _, _, _, h in SEED_PROJECTS)),),),
    )
    add(
        "How many payroll staff are there per project?",
        "SELECT c_project_eng, COUNT(*) FROM employees WHERE is_payroll = 'true' "
        "AND employee_status = 'true' GROUP BY c_project_eng ORDER BY c_project_eng",
        _group_count(lambda e: e.project, lambda e: e.is_payroll == "true" and _active(e)),
    )
    add(
        "How many employees work in cities starting with A?",
        "SELECT COUNT(*) FROM employees WHERE actual_working_city LIKE 'A%'",
        _count(lambda e: e.city.startswith("A")),
    )
    add(
        "How many active employees are based in Moscow or Ankara?",
        "SELECT COUNT(*) FROM employees WHERE actual_working_city IN "
        "('Moscow', 'Ankara') AND employee_status = 'true'",
        _count(lambda e: e.city in ("Moscow", "Ankara") and _active(e)),
    )
    add(
        "How many active employees went to Konya Anatolian High School?",
        "SELECT COUNT(*) FROM employees WHERE egitimOkulAdi = '%s' "
        "AND employee_status = 'true'" % KONYA,
        _count(lambda e: e.school == KONYA and _active(e)),
    )

    # Freeze the English-normalized question each case keys on.
    finished: list[DeskCase] = []
    for case in cases:
        normalized, language = preprocess_question(case.question)
        question_en = translate_question(normalized, language, translator, catalog)
        finished.append(
            DeskCase(case.case_id, case.question, case.language, case.sql,
                     case.expected_rows, question_en)
        )
    return finished


# -- policy corpora -----------------------------------------------------------

_FORBIDDEN_TEMPLATES = {
    "en": [
        "What is the average {term} of civil engineers?",
        "Show me the {term} for everyone in Moscow",
        "Which project has the highest {term}?",
        "List employees by {term}",
    ],
    "tr": [
        "Mühendislerin {term} bilgisi nedir?",
        "Moskova'daki çalışanların {term} listesi",
        "GPP projesinde {term} ne kadar?",
        "Hangi departmanda {term} daha yüksek?",
    ],
    "ru": [
        "Какая {term} у инженеров в Москве?",
        "Покажи {term} сотрудников GPP",
        "Где самая высокая {term}?",
        "Список сотрудников и их {term}",
    ],
}

_FORBIDDEN_TERMS_BY_LANG = {
    "en": ["salary", "bonus", "premium", "compensation", "wage"],
    "tr": ["maaş", "ikramiye", "prim", "tazminat", "ücret"],
    "ru": ["зарплата", "премия", "бонус", "компенсация", "оклад"],
}


def build_forbidden_corpus() -> list[tuple[str, str]]:
    """60 forbidden questions: 20 per language, each with a restricted term."""
    corpus: list[tuple[str, str]] = []
    for lang, templates in _FORBIDDEN_TEMPLATES.items():
        terms = _FORBIDDEN_TERMS_BY_LANG[lang]
        count = 0
        i = 0
        while count < 20:
            template = templates[i % len(templates)]
            term = terms[i % len(terms)]
            corpus.append((lang, template.format(term=term)))
            count += 1
            i += 1
    return corpus


def build_benign_corpus() -> list[tuple[str, str]]:
    """60 benign questions: no restricted terms in any language."""
    en = [
        "How many engineers are working in {city}?",
        "How many active employees are in the {dept} department?",
        "List the names of active employees in {city}",
        "How many people are on the {project} project?",
    ]
    tr = [
        "{city} şehrinde kaç mühendis çalışıyor?",
        "GPP projesinde kaç aktif çalışan var?",
        "{dept} departmanında kaç kişi çalışıyor?",
    ]
    ru = [
        "Сколько инженеров работает в {city}?",
        "Сколько активных сотрудников в отделе {dept}?",
        "Сколько сотрудников на проекте {project}?",
    ]
    cities = ["Moscow", "Ankara", "Istanbul", "Saint Petersburg"]
    depts = ["Engineering", "Finance", "Human Resources"]
    projects = ["GPP", "Metro Line", "Airport Terminal"]
    corpus: list[tuple[str, str]] = []
    i = 0
    while len(corpus) < 24:
        corpus.append(("en", en[i % len(en)].format(
            city=cities[i % len(cities)], dept=depts[i % len(depts)],
            project=projects[i % len(projects)])))
        i += 1
    i = 0
    while len(corpus) < 42:
        corpus.append(("tr", tr[i % len(tr)].format(
            city=cities[i % len(cities)], dept=depts[i % len(depts)],
            project=projects[i % len(projects)])))
        i += 1
    i = 0
    while len(corpus) < 60:
        corpus.append(("ru", ru[i % len(ru)].format(
            city=cities[i % len(cities)], dept=depts[i % len(depts)],
            project=projects[i % len(projects)])))
        i += 1
    return corpus


# -- demo wiring ---------------------------------------------------------------

GENERIC_BENIGN_SQL = (
    "SELECT COUNT(*) FROM employees WHERE employee_status = 'true'"
)


def load_sample_catalog() -> SchemaCatalog:
    return load_catalog(data_path("catalog.json"))


def build_sample_pipeline(catalog: SchemaCatalog | None = None) -> CleaningPipeline:
    catalog = catalog or load_sample_catalog()
    return CleaningPipeline(
        catalog,
        load_pipeline_config(data_path("pipeline.json")),
        load_dictionary(data_path("dictionary.txt")),
        default_translator(),
    )


def build_demo_service(
    workdir: str | Path,
    *,
    provider=None,
    examples_k: int = 5,
    audit_log=None,
    dimension: int = 1536,
    corpus_mode: str = "exact",
    config: ServiceConfig | None = None,
):
    """A fully wired in-process service over the seeded sample store.

    Returns (service, desk_corpus). The default provider replays each desk
    question's validated SQL and answers anything else with a generic
    headcount query.
    """
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    catalog = load_sample_catalog()
    translator = default_translator()
    embedder = HashingEmbedder(dimension)

    store_path = workdir / "analytics.db"
    if not store_path.exists():
        seed_analytics_store(store_path, catalog)
    store = AnalyticsStore(store_path)

    desk = build_desk_corpus(catalog, translator)

    def guard_validator(sql: str) -> None:
        outcome = run_guard(sql, catalog)
        if not outcome.passed:
            raise ValueError(
                f"example SQL rejected by guard: {outcome.verdict.to_text()}"
            )

    index = VectorIndex(dimension, mode=corpus_mode, validator=guard_validator)
    for case in desk:
        index.add(
            ExamplePair(
                example_id=case.case_id,
                question_text=case.question_en,
                sql_text=case.sql,
                language_of_origin=case.language,
                embedding=embedder.embed(case.question_en),
                validated_at="2024-01-01T00:00:00",
            )
        )

    if provider is None:
        provider = ScriptedProvider(
            {case.question_en: case.sql for case in desk},
            default=GENERIC_BENIGN_SQL,
        )

    service = QueryService(
        catalog=catalog,
        index=index,
        embedder=embedder,
        translator=translator,
        provider=provider,
        store=store,
        audit_log=audit_log if audit_log is not None else MemoryAuditLog(),
        sessions=SessionRegistry.from_config(
            {
                ANALYST_TOKEN: {"allowed_tables": ["employees", "projects"]},
                RESTRICTED_TOKEN: {"allowed_tables": ["projects"]},
            },
            catalog,
        ),
        template=PromptTemplate.load(data_path("system_prompt.txt")),
        config=config or ServiceConfig(examples_k=examples_k),
    )
    return service, desk
