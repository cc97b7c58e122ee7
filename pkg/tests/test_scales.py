import math

import numpy as np
import pytest

from foghorn.errors import UnknownAttribute, UnknownWeatherCode, ValueOutOfRange
from foghorn.scales import (
    COMPASS_8,
    classify_beaufort,
    classify_douglas,
    classify_visibility,
    classify_weather,
    compass_8,
    load_weather_codes,
    scale_for,
)

# Published oracle tables, independent of the packaged scales.json.
# Beaufort (WMO, knots): force -> [lower, upper)
BEAUFORT_TABLE = {
    0: (0, 1), 1: (1, 4), 2: (4, 7), 3: (7, 11), 4: (11, 17), 5: (17, 22),
    6: (22, 28), 7: (28, 34), 8: (34, 41), 9: (41, 48), 10: (48, 56),
    11: (56, 64), 12: (64, math.inf),
}

# Douglas sea state (significant wave height, m)
DOUGLAS_TABLE = {
    "smooth": (0, 0.5), "slight": (0.5, 1.25), "moderate": (1.25, 2.5),
    "rough": (2.5, 4.0), "very rough": (4.0, 6.0), "high": (6.0, 9.0),
    "very high": (9.0, 14.0), "phenomenal": (14.0, math.inf),
}

# Marine visibility categories (m); nautical mile = 1852 m
NM = 1852.0
VISIBILITY_TABLE = {
    "fog": (0, 1000.0), "poor": (1000.0, 2 * NM),
    "moderate": (2 * NM, 5 * NM), "good": (5 * NM, math.inf),
}


def beaufort_oracle(speed):
    for force, (lo, hi) in BEAUFORT_TABLE.items():
        if lo <= speed < hi:
            return force


def table_oracle(table, value):
    for label, (lo, hi) in table.items():
        if lo <= value < hi:
            return label


class TestBeaufort:
    def test_calm(self):
        assert classify_beaufort(0) == 0

    def test_gale_band(self):
        assert beaufort_oracle(35) == 8
        assert classify_beaufort(35) == 8

    def test_hurricane(self):
        assert beaufort_oracle(64) == 12
        assert classify_beaufort(64) == 12

    def test_negative_rejected(self):
        with pytest.raises(ValueOutOfRange):
            classify_beaufort(-0.1)

    def test_all_boundaries_lower_inclusive(self):
        for force, (lo, _) in BEAUFORT_TABLE.items():
            assert classify_beaufort(lo) == force
            if lo > 0:
                assert classify_beaufort(lo - 1e-9) == force - 1

    def test_matches_oracle_dense(self):
        for speed in np.linspace(0, 80, 2000):
            assert classify_beaufort(speed) == beaufort_oracle(speed)


class TestDouglas:
    @pytest.mark.parametrize("height,label", [
        (0.05, "smooth"), (3.0, "rough"), (15.0, "phenomenal")])
    def test_examples(self, height, label):
        assert table_oracle(DOUGLAS_TABLE, height) == label
        assert classify_douglas(height) == label

    def test_boundaries_lower_inclusive(self):
        for label, (lo, _) in DOUGLAS_TABLE.items():
            assert classify_douglas(lo) == label

    def test_negative_rejected(self):
        with pytest.raises(ValueOutOfRange):
            classify_douglas(-1)

    def test_matches_oracle_dense(self):
        for height in np.linspace(0, 20, 2000):
            assert classify_douglas(height) == table_oracle(DOUGLAS_TABLE, height)


class TestVisibility:
    @pytest.mark.parametrize("vis,label", [
        (999, "fog"), (1000, "poor"), (12000, "good")])
    def test_examples(self, vis, label):
        assert table_oracle(VISIBILITY_TABLE, vis) == label
        assert classify_visibility(vis) == label

    def test_boundaries_lower_inclusive(self):
        for label, (lo, _) in VISIBILITY_TABLE.items():
            assert classify_visibility(lo) == label

    def test_negative_rejected(self):
        with pytest.raises(ValueOutOfRange):
            classify_visibility(-5)

    def test_matches_oracle_dense(self):
        for vis in np.linspace(0, 30000, 2000):
            assert classify_visibility(vis) == table_oracle(VISIBILITY_TABLE, vis)


class TestCompass8:
    @pytest.mark.parametrize("deg,label", [
        (0, "northerly"), (200, "southerly"), (22.5, "northeasterly"),
        (337.5, "northerly"), (360, "northerly"), (90, "easterly"),
        (157.5, "southerly"), (202.4999, "southerly"), (202.5, "southwesterly")])
    def test_bins(self, deg, label):
        assert compass_8(deg) == label

    def test_out_of_range(self):
        for deg in (-0.1, 360.1):
            with pytest.raises(ValueOutOfRange):
                compass_8(deg)

    def test_bins_are_45_degrees_centered(self):
        for i, label in enumerate(COMPASS_8):
            center = i * 45.0
            assert compass_8(center % 360.0) == label
            assert compass_8((center - 22.4999) % 360.0) == label
            assert compass_8((center + 22.4999) % 360.0) == label


class TestWeatherCodes:
    def test_lookup(self):
        code_map = load_weather_codes()
        assert classify_weather(4, code_map) == "rain"
        assert classify_weather(10, code_map) == "thundery showers"

    def test_unknown_code(self):
        code_map = load_weather_codes()
        with pytest.raises(UnknownWeatherCode):
            classify_weather(255, code_map)

    def test_all_phrases_within_five_words(self):
        code_map = load_weather_codes()
        for code in code_map.codes:
            assert len(code_map.phrase(code).split()) <= 5


class TestScaleFor:
    def test_visibility_four_bins_distinct_colors(self):
        scale = scale_for("visibility", "categorical")
        assert len(scale.bins) == 4
        assert len({b.color for b in scale.bins}) == 4

    def test_beaufort_thirteen_bins(self):
        scale = scale_for("wind_speed", "categorical")
        assert len(scale.bins) == 13
        assert scale.labels == tuple(str(f) for f in range(13))

    def test_pressure_four_hpa_bins(self):
        scale = scale_for("pressure", "categorical")
        finite = [b for b in scale.bins
                  if math.isfinite(b.lower) and math.isfinite(b.upper)]
        assert all(b.upper - b.lower == 4.0 for b in finite)
        assert finite[0].lower >= 940 and finite[-1].upper <= 1052

    def test_unknown_attribute(self):
        with pytest.raises(UnknownAttribute):
            scale_for("salinity")

    def test_continuous_mode_flag(self):
        assert scale_for("wave_height", "continuous").mode == "continuous"

    def test_no_scale_uses_background_gray(self):
        from foghorn.frames import BACKGROUND_RGB
        for attr in ("wind_speed", "wind_direction", "wave_height",
                     "visibility", "pressure", "weather_code"):
            for b in scale_for(attr).bins:
                assert b.color != BACKGROUND_RGB


class TestTotality:
    """Exhaustive/exclusive bins: every valid input maps to exactly one label."""

    @pytest.mark.parametrize("attr,lo,hi", [
        ("wind_speed", 0, 100), ("wave_height", 0, 25),
        ("visibility", 0, 50000), ("pressure", 900, 1080)])
    def test_dense_grid_no_gaps(self, attr, lo, hi):
        scale = scale_for(attr)
        prev = -1
        for v in np.linspace(lo, hi, 5000):
            idx = scale.index(v)
            assert 0 <= idx < len(scale.bins)
            assert idx >= prev  # monotone non-decreasing in the input
            prev = idx

    def test_compass_total_on_circle(self):
        for v in np.linspace(0, 360, 5000):
            assert compass_8(v) in COMPASS_8
