"""Translation provider interface and the deterministic dictionary double.

Production deployments plug an HTTP translation service in through
``HttpTranslationProvider``; everything else (tests, the demo pipeline, the
acceptance suite) runs on ``DictionaryTranslator``, which is a pure function
of its mapping tables.
"""

from __future__ import annotations

import json
import urllib.request

from .textnorm import fold_key


class TranslationError(Exception):
    """Provider-level failure; callers keep the original value and flag it."""


class DictionaryTranslator:
    """Deterministic dictionary-backed translator.

    ``to_english`` maps folded source phrases (or single tokens) to English.
    ``from_english`` maps, per target language, folded English phrases to the
    target form. Unknown text is returned unchanged: the double never fails.
    """

    def __init__(
        self,
        to_english: dict[str, str] | None = None,
        from_english: dict[str, dict[str, str]] | None = None,
    ):
        self._to_en = {fold_key(k): v for k, v in (to_english or {}).items()}
        self._from_en = {
            lang: {fold_key(k): v for k, v in table.items()}
            for lang, table in (from_english or {}).items()
        }

    def translate(self, text: str, source_lang: str | None = None, target_lang: str = "en") -> str:
        if not text.strip():
            return text
        if target_lang == "en":
            return self._lookup(self._to_en, text)
        table = self._from_en.get(target_lang)
        if table is None:
            return text
        return self._lookup(table, text)

    @staticmethod
    def _lookup(table: dict[str, str], text: str) -> str:
        hit = table.get(fold_key(text))
        if hit is not None:
            return hit
        tokens = text.split()
        if len(tokens) <= 1:
            return text
        out = []
        for tok in tokens:
            core = tok.strip(".,!?;:()\"'")
            mapped = table.get(fold_key(core)) if core else None
            if mapped is None:
                out.append(tok)
            else:
                head, _, tail = tok.partition(core)
                out.append(head + mapped + tail)
        return " ".join(out)


class HttpTranslationProvider:
    """Adapter for an external HTTP translation service.

    Wire format: POST ``{"text": ..., "source": ..., "target": ...}`` and the
    response body carries ``{"text": ...}``.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def translate(self, text: str, source_lang: str | None = None, target_lang: str = "en") -> str:
        payload = json.dumps(
            {"text": text, "source": source_lang, "target": target_lang}
        ).encode("utf-8")
        req = urllib.request.Request(
            self.endpoint, data=payload, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                body = json.loads(resp.read().decode("utf-8"))
        except Exception as exc:
            raise TranslationError(f"translation service failed: {exc}") from exc
        if "text" not in body:
            raise TranslationError("translation service returned no text field")
        return body["text"]


def default_translator() -> DictionaryTranslator:
    """The shipped dictionary double covering the sample-domain vocabulary."""
    to_english = {
        # Cities and transliterations.
        "moskva": "Moscow",
        "москва": "Moscow",
        "moskova": "Moscow",
        "санкт-петербург": "Saint Petersburg",
        "стамбул": "Istanbul",
        "анкара": "Ankara",
        "i̇stanbul": "Istanbul",
        "istanbul": "Istanbul",
        # Departments.
        "insan kaynakları": "Human Resources",
        "отдел кадров": "Human Resources",
        "mühendislik": "Engineering",
        "инженерия": "Engineering",
        "finans": "Finance",
        "финансы": "Finance",
        # Schools.
        "orta doğu teknik üniversitesi": "Middle East Technical University",
        "московский государственный университет": "Moscow State University",
        # Question vocabulary (token level) for Turkish.
        "kaç": "how many",
        "kac": "how many",
        "çalışan": "working",
        "çalışıyor": "working",
        "mühendis": "engineer",
        "mühendisler": "engineers",
        "mühendisleri": "engineers",
        "projesinde": "in project",
        "projede": "in the project",
        "şehrinde": "in city",
        "aktif": "active",
        "kişi": "people",
        "hangi": "which",
        "listele": "list",
        "göster": "show",
        "uzmanı": "specialist",
        "departmanında": "in department",
        # Question vocabulary (token level) for Russian.
        "сколько": "how many",
        "инженеров": "engineers",
        "инженер": "engineer",
        "работают": "working",
        "работает": "working",
        "проекте": "in project",
        "городе": "in city",
        "активных": "active",
        "сотрудников": "employees",
        "сотрудники": "employees",
        "покажи": "show",
        "список": "list",
        "отделе": "in department",
    }
    from_english = {
        "tr": {
            "city": "Şehir",
            "count": "Sayı",
            "role": "Rol",
            "department": "Departman",
            "project": "Proje",
            "school": "Okul",
            "country": "Ülke",
            "employees": "Çalışanlar",
            "headcount": "Kişi Sayısı",
            "Moscow": "Moskova",
            "Istanbul": "İstanbul",
            "Human Resources": "İnsan Kaynakları",
            "Engineering": "Mühendislik",
            "Finance": "Finans",
        },
        "ru": {
            "city": "Город",
            "count": "Количество",
            "role": "Роль",
            "department": "Отдел",
            "project": "Проект",
            "school": "Школа",
            "country": "Страна",
            "employees": "Сотрудники",
            "headcount": "Численность",
            "Moscow": "Москва",
            "Istanbul": "Стамбул",
            "Saint Petersburg": "Санкт-Петербург",
            "Human Resources": "Отдел кадров",
            "Engineering": "Инженерия",
            "Finance": "Финансы",
        },
    }
    return DictionaryTranslator(to_english, from_english)
