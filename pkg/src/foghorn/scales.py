"""Categorical vocabularies of the marine bulletin: Beaufort wind force,
Douglas sea state, four-category visibility, the 8-point compass and weather
code phrases, plus the color scales used when rendering frames.

Bin tables live in data/scales.json; every bin is lower-inclusive,
upper-exclusive.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .errors import UnknownAttribute, UnknownWeatherCode, ValueOutOfRange

_DATA_DIR = Path(__file__).parent / "data"

COMPASS_8 = ("northerly", "northeasterly", "easterly", "southeasterly",
             "southerly", "southwesterly", "westerly", "northwesterly")

DOUGLAS_LABELS = ("smooth", "slight", "moderate", "rough", "very rough",
                  "high", "very high", "phenomenal")

VISIBILITY_LABELS = ("fog", "poor", "moderate", "good")


def _hex_to_rgb(s: str) -> tuple[int, int, int]:
    s = s.lstrip("#")
    return tuple(int(s[i:i + 2], 16) for i in (0, 2, 4))


def _bound(x) -> float:
    if x == "inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    return float(x)


@dataclass(frozen=True)
class Bin:
    lower: float              # inclusive
    upper: float              # exclusive
    label: str
    color: tuple[int, int, int]


@dataclass(frozen=True)
class CategoricalScale:
    """Ordered, contiguous value bins with labels and display colors."""

    attribute: str
    units: str
    bins: tuple[Bin, ...]
    mode: str = "categorical"          # categorical | continuous
    rotation_deg: float = 0.0          # pre-rotation for circular attributes

    def __post_init__(self):
        lowers = [b.lower for b in self.bins]
        uppers = [b.upper for b in self.bins]
        if any(l >= u for l, u in zip(lowers, uppers)):
            raise ValueOutOfRange(f"{self.attribute}: non-ascending bin bounds")
        if any(u != l for u, l in zip(uppers[:-1], lowers[1:])):
            raise ValueOutOfRange(f"{self.attribute}: bins not contiguous")
        labels = [b.label for b in self.bins]
        if len(set(labels)) != len(labels):
            raise ValueOutOfRange(f"{self.attribute}: duplicate bin labels")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(b.label for b in self.bins)

    def index(self, value: float) -> int:
        """Bin index for a value (lower-inclusive)."""
        if math.isnan(value):
            raise ValueOutOfRange(f"{self.attribute}: NaN cannot be classified")
        v = value
        if self.rotation_deg:
            v = (v + self.rotation_deg) % 360.0
        for i, b in enumerate(self.bins):
            if b.lower <= v < b.upper:
                return i
        # the topmost closed bound (e.g. exactly 360 deg) belongs to the last bin
        if v == self.bins[-1].upper:
            return len(self.bins) - 1
        raise ValueOutOfRange(f"{self.attribute}: {value} outside scale range")

    def classify(self, value: float) -> str:
        return self.bins[self.index(value)].label

    def index_of_label(self, label: str) -> int:
        for i, b in enumerate(self.bins):
            if b.label == label:
                return i
        raise ValueOutOfRange(f"{self.attribute}: unknown label {label!r}")


@dataclass(frozen=True)
class WeatherCodeMap:
    """Integer weather code -> bulletin phrase (each phrase <= 5 words)."""

    entries: tuple            # of (code, phrase), sorted by code

    def __post_init__(self):
        object.__setattr__(self, "entries",
                           tuple(sorted((int(c), p) for c, p in self.entries)))
        codes = [c for c, _ in self.entries]
        if len(set(codes)) != len(codes):
            raise ValueOutOfRange("duplicate weather codes")
        for c, phrase in self.entries:
            if len(phrase.split()) > 5:
                raise ValueOutOfRange(f"phrase for code {c} exceeds 5 words")

    def phrase(self, code: int) -> str:
        for c, p in self.entries:
            if c == code:
                return p
        raise UnknownWeatherCode(f"weather code {code} not in map")

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.entries)


@lru_cache(maxsize=None)
def _load_scales(path: str | None = None) -> dict:
    p = Path(path) if path else _DATA_DIR / "scales.json"
    return json.loads(p.read_text(encoding="utf-8"))


def scale_for(attribute: str, mode: str = "categorical",
              path: str | None = None) -> CategoricalScale:
    """Fetch the bin table for an attribute in categorical or continuous mode."""
    doc = _load_scales(path)
    if attribute not in doc:
        raise UnknownAttribute(f"no scale for attribute {attribute!r}")
    if mode not in ("categorical", "continuous"):
        raise ValueOutOfRange(f"unknown scale mode {mode!r}")
    spec = doc[attribute]
    bins = tuple(Bin(lower=_bound(b["lower"]), upper=_bound(b["upper"]),
                     label=b["label"], color=_hex_to_rgb(b["color"]))
                 for b in spec["bins"])
    return CategoricalScale(attribute=attribute, units=spec["units"],
                            bins=bins, mode=mode,
                            rotation_deg=float(spec.get("rotation_deg", 0.0)))


def load_weather_codes(path: str | Path | None = None) -> WeatherCodeMap:
    p = Path(path) if path else _DATA_DIR / "weather_codes.json"
    doc = json.loads(p.read_text(encoding="utf-8"))
    return WeatherCodeMap(entries=tuple(doc["entries"].items()))


# --- classifiers ------------------------------------------------------------

def classify_beaufort(speed_kn: float) -> int:
    """Beaufort force 0-12 from wind speed in knots (WMO bands)."""
    if speed_kn < 0:
        raise ValueOutOfRange(f"negative wind speed {speed_kn}")
    return scale_for("wind_speed").index(speed_kn)


def classify_douglas(height_m: float) -> str:
    """Douglas sea-state label from significant wave height in meters."""
    if height_m < 0:
        raise ValueOutOfRange(f"negative wave height {height_m}")
    return scale_for("wave_height").classify(height_m)


def classify_visibility(vis_m: float) -> str:
    """good / moderate / poor / fog from visibility in meters.

    fog < 1000 m <= poor < 2 nmi <= moderate < 5 nmi <= good.
    """
    if vis_m < 0:
        raise ValueOutOfRange(f"negative visibility {vis_m}")
    return scale_for("visibility").classify(vis_m)


def compass_8(direction_deg: float) -> str:
    """8-point compass label for a wind-from direction in [0, 360]."""
    if not 0 <= direction_deg <= 360:
        raise ValueOutOfRange(f"direction {direction_deg} outside [0, 360]")
    idx = int(((direction_deg + 22.5) % 360.0) // 45.0)
    return COMPASS_8[idx]


def classify_weather(code: int, code_map: WeatherCodeMap) -> str:
    """Bulletin phrase for an integer weather code."""
    return code_map.phrase(code)
