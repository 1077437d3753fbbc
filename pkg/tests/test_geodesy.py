import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from iropskit.errors import ConvergenceError, ValidationError
from iropskit.feature_pipeline import latlon_to_unit_vector, vincenty_distance


def oracle_vincenty(lat1, lon1, lat2, lon2, tol=1e-13, max_iter=400):
    """Independent textbook implementation of the inverse problem.

    Written from the classical formulation (reduced latitudes, lambda
    iteration, A/B series) without reference to the package code.
    """
    a = 6378137.0
    f = 1 / 298.257223563
    b = a * (1 - f)
    u1 = math.atan((1 - f) * math.tan(math.radians(lat1)))
    u2 = math.atan((1 - f) * math.tan(math.radians(lat2)))
    ell = math.radians(lon2 - lon1)
    lam = ell
    for _ in range(max_iter):
        sl, cl = math.sin(lam), math.cos(lam)
        ss = math.sqrt(
            (math.cos(u2) * sl) ** 2
            + (math.cos(u1) * math.sin(u2) - math.sin(u1) * math.cos(u2) * cl) ** 2
        )
        if ss == 0:
            return 0.0
        cs = math.sin(u1) * math.sin(u2) + math.cos(u1) * math.cos(u2) * cl
        sigma = math.atan2(ss, cs)
        sa = math.cos(u1) * math.cos(u2) * sl / ss
        c2a = 1 - sa * sa
        c2sm = 0.0 if c2a == 0 else cs - 2 * math.sin(u1) * math.sin(u2) / c2a
        cc = f / 16 * c2a * (4 + f * (4 - 3 * c2a))
        lam_old = lam
        lam = ell + (1 - cc) * f * sa * (
            sigma + cc * ss * (c2sm + cc * cs * (-1 + 2 * c2sm * c2sm))
        )
        if abs(lam - lam_old) < tol:
            break
    else:
        raise ConvergenceError("oracle did not converge")
    usq = c2a * (a * a - b * b) / (b * b)
    aa = 1 + usq / 16384 * (4096 + usq * (-768 + usq * (320 - 175 * usq)))
    bb = usq / 1024 * (256 + usq * (-128 + usq * (74 - 47 * usq)))
    dsigma = bb * ss * (
        c2sm
        + bb / 4 * (cs * (-1 + 2 * c2sm**2)
                    - bb / 6 * c2sm * (-3 + 4 * ss**2) * (-3 + 4 * c2sm**2))
    )
    return b * aa * (sigma - dsigma)


class TestUnitVector:
    def test_origin(self):
        assert latlon_to_unit_vector(0, 0) == pytest.approx((1, 0, 0), abs=1e-15)

    def test_north_pole(self):
        for lon in (-180, -55, 0, 120):
            x, y, z = latlon_to_unit_vector(90, lon)
            assert (x, y, z) == pytest.approx((0, 0, 1), abs=1e-12)

    def test_forty_five(self):
        x, y, z = latlon_to_unit_vector(45, 45)
        assert (x, y, z) == pytest.approx((0.5, 0.5, math.sqrt(2) / 2), abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            latlon_to_unit_vector(90.5, 0)
        with pytest.raises(ValidationError):
            latlon_to_unit_vector(0, 181)

    @given(
        st.floats(min_value=-90, max_value=90),
        st.floats(min_value=-180, max_value=180),
    )
    def test_unit_norm(self, lat, lon):
        x, y, z = latlon_to_unit_vector(lat, lon)
        assert x * x + y * y + z * z == pytest.approx(1.0, abs=1e-12)


class TestVincenty:
    def test_identical_points(self):
        assert vincenty_distance((40.0, -75.0), (40.0, -75.0)) == 0.0

    def test_equatorial_degree(self):
        d = vincenty_distance((0.0, 0.0), (0.0, 1.0))
        assert d == pytest.approx(111_319.491, abs=0.01)

    def test_symmetry_and_positivity(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            p1 = (rng.uniform(-80, 80), rng.uniform(-180, 180))
            p2 = (rng.uniform(-80, 80), rng.uniform(-180, 180))
            d12 = vincenty_distance(p1, p2)
            d21 = vincenty_distance(p2, p1)
            assert d12 == d21
            assert d12 > 0

    def test_matches_independent_oracle(self):
        rng = np.random.default_rng(123)
        checked = 0
        while checked < 1000:
            lat1, lat2 = rng.uniform(-80, 80, 2)
            lon1, lon2 = rng.uniform(-180, 180, 2)
            try:
                expected = oracle_vincenty(lat1, lon1, lat2, lon2)
            except ConvergenceError:
                continue  # near-antipodal; both sides refuse such pairs
            got = vincenty_distance((lat1, lon1), (lat2, lon2))
            assert got == pytest.approx(expected, abs=1e-3)  # 1 mm
            checked += 1

    def test_near_antipodal_raises_with_last_iterate(self):
        with pytest.raises(ConvergenceError) as excinfo:
            vincenty_distance((0.0, 0.0), (0.5, 179.7))
        assert excinfo.value.last_iterate is not None
        assert "lambda" in excinfo.value.last_iterate

    def test_haversine_fallback_flag(self):
        d = vincenty_distance((0.0, 0.0), (0.5, 179.7), fallback_haversine=True)
        assert 1.9e7 < d < 2.1e7  # roughly half the circumference
