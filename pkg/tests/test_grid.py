import json

import numpy as np
import pytest

from foghorn.errors import (
    BundleMalformed,
    EmptyDomain,
    EmptyMask,
    PayloadSizeMismatch,
    TimeAxisInvalid,
)
from foghorn.grid import (
    EnsembleField,
    GridField,
    DOMAIN_BBOX,
    area_series,
    crop_domain,
    load_grid_bundle,
    mask_sea_area,
    reduce_percentile,
    write_grid_bundle,
)

from conftest import box_area, constant_field, hourly_times, make_field


# --- independent oracles --------------------------------------------------------

def percentile_oracle(members, p):
    """Sort finite members and linearly interpolate between order statistics."""
    xs = sorted(m for m in members if not np.isnan(m))
    if not xs:
        return np.nan
    if len(xs) == 1:
        return xs[0]
    rank = p / 100.0 * (len(xs) - 1)
    lo = int(np.floor(rank))
    hi = int(np.ceil(rank))
    frac = rank - lo
    return xs[lo] * (1 - frac) + xs[hi] * frac


def point_in_polygon_oracle(lat, lon, ring):
    """Ray casting along increasing longitude."""
    inside = False
    for (lat1, lon1), (lat2, lon2) in zip(ring, ring[1:]):
        if (lat1 > lat) != (lat2 > lat):
            x = lon1 + (lat - lat1) / (lat2 - lat1) * (lon2 - lon1)
            if lon < x:
                inside = not inside
    return inside


def make_ensemble(values):
    values = np.asarray(values, dtype=np.float64)
    m, _, nlat, nlon = values.shape
    return EnsembleField(variable="wind_speed", units="kn",
                         lats=np.linspace(30, 70, nlat),
                         lons=np.linspace(-20, 10, nlon),
                         times=hourly_times(), values=values, members=m)


# --- bundle I/O -------------------------------------------------------------------

class TestBundleIO:
    def test_roundtrip_single_member(self, tmp_path):
        fld = make_field(np.random.default_rng(0).normal(size=(24, 40, 30)))
        write_grid_bundle(fld, tmp_path / "b")
        loaded = load_grid_bundle(tmp_path / "b")
        assert isinstance(loaded, GridField)
        assert loaded.values.shape == (24, 40, 30)
        np.testing.assert_array_equal(loaded.values, fld.values)

    def test_ensemble_member_count(self, tmp_path):
        ens = make_ensemble(np.zeros((18, 24, 5, 4)))
        write_grid_bundle(ens, tmp_path / "e")
        loaded = load_grid_bundle(tmp_path / "e")
        assert isinstance(loaded, EnsembleField)
        assert loaded.members == 18

    def test_missing_header(self, tmp_path):
        (tmp_path / "values.f64le").write_bytes(b"")
        with pytest.raises(BundleMalformed):
            load_grid_bundle(tmp_path)

    def test_short_payload(self, tmp_path):
        fld = constant_field(1.0, nlat=5, nlon=4)
        write_grid_bundle(fld, tmp_path / "b")
        payload = tmp_path / "b" / "values.f64le"
        payload.write_bytes(payload.read_bytes()[:-7])
        with pytest.raises(PayloadSizeMismatch):
            load_grid_bundle(tmp_path / "b")

    def test_bad_time_axis(self, tmp_path):
        fld = constant_field(1.0, nlat=3, nlon=3)
        write_grid_bundle(fld, tmp_path / "b")
        header = json.loads((tmp_path / "b" / "header.json").read_text())
        header["times"] = header["times"][:23] + ["2030-01-01T00:00:00"]
        (tmp_path / "b" / "header.json").write_text(json.dumps(header))
        with pytest.raises(TimeAxisInvalid):
            load_grid_bundle(tmp_path / "b")

    def test_nan_preserved(self, tmp_path):
        values = np.ones((24, 3, 3))
        values[5, 1, 2] = np.nan
        write_grid_bundle(make_field(values), tmp_path / "b")
        loaded = load_grid_bundle(tmp_path / "b")
        assert np.isnan(loaded.values[5, 1, 2])
        assert np.isfinite(loaded.values).sum() == 24 * 9 - 1


# --- percentile reduction ----------------------------------------------------------

class TestReducePercentile:
    def test_odd_count_median(self):
        ens = make_ensemble(np.array([1.0, 2.0, 3.0]).reshape(3, 1, 1, 1)
                            * np.ones((3, 24, 1, 1)))
        assert reduce_percentile(ens, 50).values[0, 0, 0] == 2.0

    def test_even_count_median_interpolates(self):
        ens = make_ensemble(np.array([1.0, 3.0]).reshape(2, 1, 1, 1)
                            * np.ones((2, 24, 1, 1)))
        assert reduce_percentile(ens, 50).values[0, 0, 0] == pytest.approx(2.0)

    def test_p85_interpolation(self):
        # 85th percentile falls between the 3rd and 4th order statistics;
        # continuous linear interpolation puts it at 35.5
        ens = make_ensemble(np.array([10.0, 20, 30, 40]).reshape(4, 1, 1, 1)
                            * np.ones((4, 24, 1, 1)))
        expected = percentile_oracle([10, 20, 30, 40], 85)
        assert expected == pytest.approx(35.5)
        assert reduce_percentile(ens, 85).values[0, 0, 0] == pytest.approx(expected)

    def test_matches_oracle_on_random_cells(self):
        rng = np.random.default_rng(42)
        values = rng.normal(size=(7, 24, 5, 5)) * 10
        values[rng.random(values.shape) < 0.1] = np.nan
        ens = make_ensemble(values)
        checks = 0
        for p in rng.uniform(0, 100, size=20):
            reduced = reduce_percentile(ens, p).values
            for _ in range(50):
                t, i, j = rng.integers(24), rng.integers(5), rng.integers(5)
                got = reduced[t, i, j]
                want = percentile_oracle(values[:, t, i, j], p)
                if np.isnan(want):
                    assert np.isnan(got)
                else:
                    assert got == pytest.approx(want, rel=1e-12, abs=1e-12)
                checks += 1
        assert checks == 1000

    def test_single_member_identity(self):
        rng = np.random.default_rng(1)
        values = rng.normal(size=(1, 24, 4, 4))
        ens = make_ensemble(values)
        np.testing.assert_array_equal(reduce_percentile(ens, 50).values,
                                      values[0])

    def test_monotone_in_p(self):
        rng = np.random.default_rng(2)
        ens = make_ensemble(rng.normal(size=(9, 24, 3, 3)))
        lo = reduce_percentile(ens, 20).values
        hi = reduce_percentile(ens, 80).values
        assert np.all(lo <= hi + 1e-12)

    def test_all_nan_cell_stays_nan(self):
        values = np.ones((3, 24, 2, 2))
        values[:, 4, 0, 1] = np.nan
        out = reduce_percentile(make_ensemble(values), 50)
        assert np.isnan(out.values[4, 0, 1])

    def test_percentile_tag(self):
        ens = make_ensemble(np.zeros((2, 24, 2, 2)))
        assert reduce_percentile(ens, 85).percentile == 85.0


# --- domain crop ---------------------------------------------------------------------

class TestCropDomain:
    def test_paper_bbox_on_global_grid(self):
        lats = np.arange(-90, 90.1, 0.25)
        lons = np.arange(-180, 180.0, 0.25)
        fld = make_field(np.zeros((24, lats.size, lons.size)),
                         lats=lats, lons=lons)
        out = crop_domain(fld, DOMAIN_BBOX)
        assert out.lats.min() == 30.0 and out.lats.max() == 70.0
        assert out.lons.min() == -20.0 and out.lons.max() == 10.0
        assert np.all((out.lats >= 30) & (out.lats <= 70))
        assert np.all((out.lons >= -20) & (out.lons <= 10))

    def test_idempotent(self):
        fld = constant_field(5.0)
        once = crop_domain(fld, DOMAIN_BBOX)
        twice = crop_domain(once, DOMAIN_BBOX)
        np.testing.assert_array_equal(once.values, twice.values)
        np.testing.assert_array_equal(once.lats, twice.lats)

    def test_empty_intersection(self):
        fld = constant_field(5.0)
        with pytest.raises(EmptyDomain):
            crop_domain(fld, (-60, -50, 100, 120))


# --- sea-area masking ------------------------------------------------------------------

class TestMaskSeaArea:
    def test_full_domain_polygon_is_identity(self):
        fld = constant_field(3.0, nlat=11, nlon=11)
        area = box_area("big", 0, 90, -90, 90)
        out = mask_sea_area(fld, area)
        np.testing.assert_array_equal(out.values, fld.values)

    def test_single_cell_polygon(self):
        fld = constant_field(3.0, nlat=11, nlon=11)
        lat, lon = fld.lats[5], fld.lons[5]
        area = box_area("one", lat - 0.1, lat + 0.1, lon - 0.1, lon + 0.1)
        out = mask_sea_area(fld, area)
        assert np.isfinite(out.values).sum() == 24
        assert np.isfinite(out.values[0]).sum() == 1

    def test_matches_ray_casting_oracle(self):
        fld = constant_field(1.0, nlat=21, nlon=21)
        # vertices kept off the cell-center lattice so no center sits
        # exactly on the boundary (where conventions legitimately differ)
        ring = ((40.03, -10.02), (45.01, 5.03), (60.02, 7.01),
                (65.01, -15.02), (40.03, -10.02))
        from foghorn.grid import SeaArea
        area = SeaArea(name="poly", order_index=1, polygon=ring)
        out = mask_sea_area(fld, area)
        for i, lat in enumerate(fld.lats):
            for j, lon in enumerate(fld.lons):
                want = point_in_polygon_oracle(lat, lon, ring)
                got = np.isfinite(out.values[0, i, j])
                assert got == want, (lat, lon)

    def test_degenerate_polygon(self):
        fld = constant_field(1.0, nlat=5, nlon=5)
        area = box_area("dot", 50.0, 50.0001, 0.0, 0.0001)
        with pytest.raises(EmptyMask):
            mask_sea_area(fld, area)

    def test_idempotent(self):
        fld = constant_field(2.0, nlat=11, nlon=11)
        area = box_area("mid", 45, 60, -10, 5)
        once = mask_sea_area(fld, area)
        twice = mask_sea_area(once, area)
        np.testing.assert_array_equal(once.values, twice.values)


# --- per-area series ----------------------------------------------------------------------

class TestAreaSeries:
    area = box_area("mid", 45, 60, -10, 5)

    def test_constant_field(self):
        fld = constant_field(7.0, nlat=11, nlon=11)
        for reducer in ("areal-mean", "areal-max"):
            s = area_series(fld, self.area, reducer)
            np.testing.assert_allclose(s.values, 7.0)
            assert s.reducer == reducer

    def test_two_cell_arithmetic(self):
        fld = constant_field(0.0, nlat=5, nlon=5)
        values = np.full((24, 5, 5), np.nan)
        values[:, 2, 2] = 4.0
        values[:, 2, 3] = 8.0
        fld = make_field(values, lats=fld.lats, lons=fld.lons)
        big = box_area("all", 0, 90, -90, 90)
        assert area_series(fld, big, "areal-mean").values[0] == pytest.approx(6.0)
        assert area_series(fld, big, "areal-max").values[0] == pytest.approx(8.0)

    def test_nan_hour_propagates(self):
        values = np.full((24, 5, 5), 2.0)
        values[7] = np.nan
        fld = make_field(values)
        big = box_area("all", 0, 90, -90, 90)
        s = area_series(fld, big, "areal-mean")
        assert np.isnan(s.values[7])
        assert np.isfinite(np.delete(s.values, 7)).all()

    def test_max_geq_mean(self):
        rng = np.random.default_rng(3)
        fld = make_field(rng.normal(size=(24, 11, 11)))
        mean = area_series(fld, self.area, "areal-mean").values
        mx = area_series(fld, self.area, "areal-max").values
        assert np.all(mx >= mean - 1e-12)

    def test_circular_mean_wraps(self):
        values = np.zeros((24, 5, 5))
        values[:, :, :2] = 350.0
        values[:, :, 3:] = 10.0
        values[:, :, 2] = 0.0
        fld = make_field(values, variable="wind_direction", units="deg")
        big = box_area("all", 0, 90, -90, 90)
        s = area_series(fld, big, "areal-circular-mean")
        # vector mean of 350/0/10 sits near north, never near 180
        assert min(s.values[0], 360 - s.values[0]) < 5.0
