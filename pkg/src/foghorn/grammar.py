"""Marine bulletin grammar: structured representation, canonical renderer,
strict parser, rule validation and forecast segmentation.

Canonical text for an area group reads, in fixed order:

    Dover, Wight. Southwesterly 5 to 7. Moderate or rough. Rain.
    Good, becoming moderate. Gale warning: gale imminent.

Sentences are period-terminated and sentence-cased; clauses within a
sentence are comma-joined. "becoming" precedes its clause; the other timing
phrases follow theirs. An empty weather clause list renders as "Fair.".
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import (
    ClauseSyntaxError,
    ForecastStructureError,
    UnknownArea,
    ValidationFailed,
    ValueOutOfRange,
)
from .grid import SeaArea, load_area_registry
from .scales import COMPASS_8, DOUGLAS_LABELS, VISIBILITY_LABELS

TIMING_PHRASES = ("at first", "later", "soon", "occasionally", "becoming")
SUFFIX_TIMINGS = ("at first", "later", "soon", "occasionally")

GALE_SEVERITIES = ("gale", "severe gale", "storm", "violent storm",
                   "hurricane force")
GALE_TIMINGS = ("imminent", "soon", "later")

#: Beaufort force implied by each gale severity label
SEVERITY_FORCE = {"gale": 8, "severe gale": 9, "storm": 10,
                  "violent storm": 11, "hurricane force": 12}
FORCE_SEVERITY = {v: k for k, v in SEVERITY_FORCE.items()}


@dataclass
class WindClause:
    direction: str                    # 8-point label
    force_low: int
    force_high: int
    timing: str | None = None


@dataclass
class StateClause:
    label: str
    label_high: str | None = None     # optional range: "moderate or rough"
    timing: str | None = None


@dataclass
class WeatherClause:
    phrase: str
    timing: str | None = None


@dataclass
class GaleWarning:
    severity: str                     # gale .. hurricane force
    timing: str                       # imminent | soon | later


@dataclass
class Bulletin:
    areas: list[str]
    wind: list[WindClause]
    sea_state: list[StateClause]
    weather: list[WeatherClause] = field(default_factory=list)
    visibility: list[StateClause] = field(default_factory=list)
    gale: GaleWarning | None = None


@dataclass
class PressureSystem:
    kind: str                          # low | high
    pressure_hpa: int
    position: str                      # label from the pressure overlay grid
    tendency: str                      # deepening | filling | steady
    motion_direction: str | None = None  # 8-point label, None if stationary
    motion_speed: str | None = None    # slowly .. very rapidly


@dataclass
class Synopsis:
    systems: list[PressureSystem]


@dataclass
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass
class Fragment:
    """One segmented piece of a full forecast."""

    kind: str                          # synopsis | attribute
    areas: tuple = ()
    attribute: str | None = None       # wind | sea_state | weather | visibility
    text: str = ""
    excluded: bool = False


# --- rendering ---------------------------------------------------------------

def _sentence_case(s: str) -> str:
    return s[0].upper() + s[1:] if s else s


def _with_timing(body: str, timing: str | None) -> str:
    if timing is None:
        return body
    if timing == "becoming":
        return f"becoming {body}"
    return f"{body} {timing}"


def _force_text(low: int, high: int) -> str:
    return str(low) if low == high else f"{low} to {high}"


def _wind_clause_text(c: WindClause) -> str:
    return _with_timing(f"{c.direction} {_force_text(c.force_low, c.force_high)}",
                        c.timing)


def _state_clause_text(c: StateClause) -> str:
    body = c.label if c.label_high is None else f"{c.label} or {c.label_high}"
    return _with_timing(body, c.timing)


def _weather_clause_text(c: WeatherClause) -> str:
    return _with_timing(c.phrase, c.timing)


def render_wind_sentence(b: Bulletin) -> str:
    return _sentence_case(", ".join(_wind_clause_text(c) for c in b.wind)) + "."


def render_sea_state_sentence(b: Bulletin) -> str:
    return _sentence_case(", ".join(_state_clause_text(c) for c in b.sea_state)) + "."


def render_weather_sentence(b: Bulletin) -> str:
    if not b.weather:
        return "Fair."
    return _sentence_case(", ".join(_weather_clause_text(c) for c in b.weather)) + "."


def render_visibility_sentence(b: Bulletin) -> str:
    return _sentence_case(", ".join(_state_clause_text(c) for c in b.visibility)) + "."


def render_gale_sentence(g: GaleWarning) -> str:
    return f"Gale warning: {g.severity} {g.timing}."


def render_bulletin(b: Bulletin, registry: dict[str, SeaArea] | None = None) -> str:
    """Deterministic canonical text for a validated bulletin."""
    registry = registry or load_area_registry()
    violations = validate(b, registry)
    if violations:
        raise ValidationFailed(violations)
    parts = [", ".join(b.areas) + ".",
             render_wind_sentence(b),
             render_sea_state_sentence(b),
             render_weather_sentence(b),
             render_visibility_sentence(b)]
    if b.gale is not None:
        parts.append(render_gale_sentence(b.gale))
    return " ".join(parts)


def attribute_fragments(b: Bulletin) -> dict[str, str]:
    """Per-attribute canonical sentences; the gale warning rides with wind."""
    wind = render_wind_sentence(b)
    if b.gale is not None:
        wind += " " + render_gale_sentence(b.gale)
    return {
        "wind": wind,
        "sea_state": render_sea_state_sentence(b),
        "weather": render_weather_sentence(b),
        "visibility": render_visibility_sentence(b),
    }


def render_synopsis(s: Synopsis) -> str:
    """Minimal synopsis text: one sentence per pressure system."""
    if not s.systems:
        return "Nothing significant."
    sentences = []
    for sys in s.systems:
        body = f"{sys.kind} {sys.pressure_hpa} at {sys.position}, {sys.tendency}"
        if sys.motion_direction is not None:
            body += f", moving {sys.motion_direction} {sys.motion_speed}"
        sentences.append(_sentence_case(body) + ".")
    return " ".join(sentences)


# --- parsing ----------------------------------------------------------------

_FORCE_RE = re.compile(r"^(\d+)(?: to (\d+))?$")

# longest labels first so "very rough" wins over "rough"
_SEA_LABELS = tuple(sorted(DOUGLAS_LABELS, key=len, reverse=True))
_VIS_LABELS = tuple(sorted(VISIBILITY_LABELS, key=len, reverse=True))


def _split_sentences(text: str) -> list[str]:
    return [s.strip() for s in text.strip().split(".") if s.strip()]


def _strip_timing(clause: str, attribute: str) -> tuple[str, str | None]:
    timing = None
    if clause.startswith("becoming "):
        timing = "becoming"
        clause = clause[len("becoming "):]
    for t in SUFFIX_TIMINGS:
        if clause.endswith(" " + t):
            if timing is not None:
                raise ClauseSyntaxError(attribute, clause, "two timing phrases")
            timing = t
            clause = clause[: -len(t) - 1]
            break
    return clause.strip(), timing


def _parse_wind_clause(clause: str) -> WindClause:
    body, timing = _strip_timing(clause, "wind")
    parts = body.split(" ", 1)
    if len(parts) != 2 or parts[0] not in COMPASS_8:
        raise ClauseSyntaxError("wind", clause)
    m = _FORCE_RE.match(parts[1])
    if not m:
        raise ClauseSyntaxError("wind", clause)
    low = int(m.group(1))
    high = int(m.group(2)) if m.group(2) else low
    if not (0 <= low <= 12 and 0 <= high <= 12):
        raise ValueOutOfRange(f"force outside 0-12 in {clause!r}")
    return WindClause(direction=parts[0], force_low=low, force_high=high,
                      timing=timing)


def _parse_state_clause(clause: str, attribute: str, labels: tuple[str, ...]
                        ) -> StateClause:
    body, timing = _strip_timing(clause, attribute)
    label_high = None
    if " or " in body:
        lhs, rhs = body.split(" or ", 1)
        label, label_high = lhs.strip(), rhs.strip()
    else:
        label = body
    for lab in (label, label_high):
        if lab is not None and lab not in labels:
            raise ClauseSyntaxError(attribute, clause, f"unknown label {lab!r}")
    return StateClause(label=label, label_high=label_high, timing=timing)


def _parse_weather_clause(clause: str) -> WeatherClause:
    body, timing = _strip_timing(clause, "weather")
    if not body:
        raise ClauseSyntaxError("weather", clause, "empty phrase")
    return WeatherClause(phrase=body, timing=timing)


def _parse_gale_sentence(sentence: str) -> GaleWarning:
    prefix = "gale warning:"
    if not sentence.startswith(prefix):
        raise ClauseSyntaxError("gale", sentence)
    body = sentence[len(prefix):].strip()
    for sev in sorted(GALE_SEVERITIES, key=len, reverse=True):
        if body.startswith(sev + " "):
            timing = body[len(sev) + 1:]
            if timing not in GALE_TIMINGS:
                raise ClauseSyntaxError("gale", sentence,
                                        f"unknown timing {timing!r}")
            return GaleWarning(severity=sev, timing=timing)
    raise ClauseSyntaxError("gale", sentence, "unknown severity")


def parse_bulletin(text: str, registry: dict[str, SeaArea] | None = None
                   ) -> Bulletin:
    """Strict inverse of render_bulletin; tolerant of case and whitespace."""
    registry = registry or load_area_registry()
    sentences = _split_sentences(text.lower())
    if len(sentences) not in (5, 6):
        raise ClauseSyntaxError(
            "bulletin", text.strip()[:80],
            f"expected 5 or 6 sentences, got {len(sentences)}")

    canonical = {name.lower(): name for name in registry}
    areas = []
    for token in sentences[0].split(","):
        name = token.strip()
        if name not in canonical:
            raise UnknownArea(f"unknown sea area {name!r}")
        areas.append(canonical[name])

    wind = [_parse_wind_clause(c.strip()) for c in sentences[1].split(",")]
    sea = [_parse_state_clause(c.strip(), "sea_state", DOUGLAS_LABELS)
           for c in sentences[2].split(",")]
    if sentences[3] == "fair":
        weather: list[WeatherClause] = []
    else:
        weather = [_parse_weather_clause(c.strip())
                   for c in sentences[3].split(",")]
    vis = [_parse_state_clause(c.strip(), "visibility", VISIBILITY_LABELS)
           for c in sentences[4].split(",")]
    gale = _parse_gale_sentence(sentences[5]) if len(sentences) == 6 else None
    return Bulletin(areas=areas, wind=wind, sea_state=sea, weather=weather,
                    visibility=vis, gale=gale)


# --- validation ---------------------------------------------------------------

def validate(b: Bulletin, registry: dict[str, SeaArea] | None = None
             ) -> list[Violation]:
    """All rule violations for a bulletin; empty list means valid."""
    registry = registry or load_area_registry()
    out: list[Violation] = []

    if not b.areas:
        out.append(Violation("EmptyAreas", "bulletin names no sea area"))
    unknown = [a for a in b.areas if a not in registry]
    for a in unknown:
        out.append(Violation("UnknownAreaName", f"{a!r} not in registry"))
    if len(set(b.areas)) != len(b.areas):
        out.append(Violation("DuplicateAreaName", "area repeated in group"))
    known = [a for a in b.areas if a in registry]
    order = [registry[a].order_index for a in known]
    if order != sorted(order):
        out.append(Violation("AreaOrderInvalid",
                             "areas not in canonical broadcast order"))

    if not b.wind:
        out.append(Violation("EmptyWindClauses", "no wind clause"))
    for c in b.wind:
        if c.direction not in COMPASS_8:
            out.append(Violation("UnknownDirection", f"{c.direction!r}"))
        if not (0 <= c.force_low <= 12 and 0 <= c.force_high <= 12):
            out.append(Violation("ForceOutOfRange",
                                 f"{c.force_low}-{c.force_high}"))
        elif c.force_low > c.force_high:
            out.append(Violation("ForceRangeInverted",
                                 f"{c.force_low} > {c.force_high}"))
        elif c.force_high - c.force_low > 3:
            out.append(Violation("ForceSpanTooWide",
                                 f"span {c.force_high - c.force_low} > 3"))
        if c.timing is not None and c.timing not in TIMING_PHRASES:
            out.append(Violation("TimingInvalid", f"{c.timing!r}"))

    out.extend(_validate_state(b.sea_state, "sea_state", DOUGLAS_LABELS))
    out.extend(_validate_state(b.visibility, "visibility", VISIBILITY_LABELS))

    for c in b.weather:
        if len(c.phrase.split()) > 5:
            out.append(Violation("WeatherTooLong",
                                 f"{c.phrase!r} exceeds 5 words"))
        if c.timing is not None and c.timing not in TIMING_PHRASES:
            out.append(Violation("TimingInvalid", f"{c.timing!r}"))

    peak = max((c.force_high for c in b.wind), default=0)
    if peak >= 8 and b.gale is None:
        out.append(Violation("MissingGaleWarning",
                             f"wind reaches force {peak} with no gale warning"))
    if peak < 8 and b.gale is not None:
        out.append(Violation("SpuriousGaleWarning",
                             "gale warning with no force >= 8 clause"))
    if b.gale is not None:
        if b.gale.severity not in SEVERITY_FORCE:
            out.append(Violation("GaleSeverityInvalid", f"{b.gale.severity!r}"))
        elif peak >= 8 and SEVERITY_FORCE[b.gale.severity] != peak:
            out.append(Violation(
                "GaleSeverityMismatch",
                f"severity {b.gale.severity!r} vs peak force {peak}"))
        if b.gale.timing not in GALE_TIMINGS:
            out.append(Violation("GaleTimingInvalid", f"{b.gale.timing!r}"))
    return out


def _validate_state(clauses, attribute: str, labels) -> list[Violation]:
    out = []
    if not clauses:
        out.append(Violation(f"Empty{attribute.title().replace('_', '')}Clauses",
                             f"no {attribute} clause"))
    for c in clauses:
        for lab in (c.label, c.label_high):
            if lab is not None and lab not in labels:
                out.append(Violation("UnknownLabel",
                                     f"{attribute}: {lab!r}"))
        if (c.label in labels and c.label_high in labels):
            gap = labels.index(c.label_high) - labels.index(c.label)
            if gap not in (1, 2):
                out.append(Violation("RangeNotAdjacent",
                                     f"{c.label!r} or {c.label_high!r}"))
        if c.timing is not None and c.timing not in TIMING_PHRASES:
            out.append(Violation("TimingInvalid", f"{c.timing!r}"))
    return out


# --- forecast segmentation -----------------------------------------------------

def segment_forecast(full_text: str, registry: dict[str, SeaArea] | None = None
                     ) -> list[Fragment]:
    """Split a complete issued forecast into synopsis and per-attribute
    fragments.

    Blocks are separated by blank lines. A block whose first sentence is a
    comma-list of registry area names is an area bulletin; anything else is
    treated as synopsis text. Multi-area bulletins are segmented but flagged
    excluded.
    """
    registry = registry or load_area_registry()
    blocks = [b.strip() for b in re.split(r"\n\s*\n", full_text) if b.strip()]
    if not blocks:
        raise ForecastStructureError("empty forecast text")
    canonical = {name.lower(): name for name in registry}

    fragments: list[Fragment] = []
    saw_bulletin = False
    for block in blocks:
        flat = " ".join(block.split())
        first = flat.split(".", 1)[0]
        names = [t.strip().lower() for t in first.split(",")]
        if all(n in canonical for n in names):
            saw_bulletin = True
            bulletin = parse_bulletin(flat, registry)
            excluded = len(bulletin.areas) > 1
            for attribute, text in attribute_fragments(bulletin).items():
                fragments.append(Fragment(kind="attribute",
                                          areas=tuple(bulletin.areas),
                                          attribute=attribute, text=text,
                                          excluded=excluded))
        else:
            fragments.append(Fragment(kind="synopsis", text=flat))
    if not saw_bulletin:
        raise ForecastStructureError("no recognizable sea-area bulletins")
    return fragments


# --- JSON serialization ---------------------------------------------------------

def bulletin_to_dict(b: Bulletin) -> dict:
    return {
        "areas": list(b.areas),
        "wind": [{"direction": c.direction, "force_low": c.force_low,
                  "force_high": c.force_high, "timing": c.timing}
                 for c in b.wind],
        "sea_state": [{"label": c.label, "label_high": c.label_high,
                       "timing": c.timing} for c in b.sea_state],
        "weather": [{"phrase": c.phrase, "timing": c.timing}
                    for c in b.weather],
        "visibility": [{"label": c.label, "label_high": c.label_high,
                        "timing": c.timing} for c in b.visibility],
        "gale": None if b.gale is None else {"severity": b.gale.severity,
                                             "timing": b.gale.timing},
    }


def bulletin_from_dict(d: dict) -> Bulletin:
    return Bulletin(
        areas=list(d["areas"]),
        wind=[WindClause(**c) for c in d["wind"]],
        sea_state=[StateClause(**c) for c in d["sea_state"]],
        weather=[WeatherClause(**c) for c in d["weather"]],
        visibility=[StateClause(**c) for c in d["visibility"]],
        gale=None if d.get("gale") is None else GaleWarning(**d["gale"]),
    )


def bulletin_to_json(b: Bulletin) -> str:
    return json.dumps(bulletin_to_dict(b), ensure_ascii=False)


def bulletin_from_json(s: str) -> Bulletin:
    return bulletin_from_dict(json.loads(s))
