"""Geographic encodings: spherical direction vectors and ellipsoidal distance."""

from __future__ import annotations

import math

from ..errors import ConvergenceError, ValidationError

# WGS-84
WGS84_A = 6_378_137.0
WGS84_F = 1.0 / 298.257223563
WGS84_B = (1.0 - WGS84_F) * WGS84_A

VINCENTY_TOL = 1e-12
VINCENTY_MAX_ITER = 200


def _check_latlon(lat: float, lon: float) -> None:
    if not -90.0 <= lat <= 90.0:
        raise ValidationError(f"latitude out of range: {lat}")
    if not -180.0 <= lon <= 180.0:
        raise ValidationError(f"longitude out of range: {lon}")


def latlon_to_unit_vector(lat: float, lon: float) -> tuple[float, float, float]:
    """Unit direction vector (x, y, z) of a point on the unit sphere."""
    _check_latlon(lat, lon)
    phi = math.radians(lat)
    lam = math.radians(lon)
    return (
        math.cos(phi) * math.cos(lam),
        math.cos(phi) * math.sin(lam),
        math.sin(phi),
    )


def vincenty_distance(
    p1: tuple[float, float],
    p2: tuple[float, float],
    fallback_haversine: bool = False,
) -> float:
    """Inverse geodesic distance in meters on the WGS-84 ellipsoid.

    Iterates the inverse problem until the longitude difference moves by less
    than 1e-12 rad (at most 200 iterations). Near-antipodal pairs for which the
    iteration stalls raise ConvergenceError carrying the last iterate, unless
    ``fallback_haversine`` requests a spherical approximation instead.
    """
    lat1, lon1 = p1
    lat2, lon2 = p2
    _check_latlon(lat1, lon1)
    _check_latlon(lat2, lon2)

    if lat1 == lat2 and lon1 == lon2:
        return 0.0
    # canonical argument order makes d(p1, p2) == d(p2, p1) bit-for-bit
    if (lat2, lon2) < (lat1, lon1):
        lat1, lon1, lat2, lon2 = lat2, lon2, lat1, lon1

    a, b, f = WGS84_A, WGS84_B, WGS84_F
    u1 = math.atan((1.0 - f) * math.tan(math.radians(lat1)))
    u2 = math.atan((1.0 - f) * math.tan(math.radians(lat2)))
    big_l = math.radians(lon2 - lon1)
    sin_u1, cos_u1 = math.sin(u1), math.cos(u1)
    sin_u2, cos_u2 = math.sin(u2), math.cos(u2)

    lam = big_l
    for _ in range(VINCENTY_MAX_ITER):
        sin_lam, cos_lam = math.sin(lam), math.cos(lam)
        sin_sigma = math.hypot(
            cos_u2 * sin_lam,
            cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_lam,
        )
        cos_sigma = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_lam
        if sin_sigma == 0.0:
            return 0.0  # coincident on the auxiliary sphere
        sigma = math.atan2(sin_sigma, cos_sigma)
        sin_alpha = cos_u1 * cos_u2 * sin_lam / sin_sigma
        cos_sq_alpha = 1.0 - sin_alpha * sin_alpha
        if cos_sq_alpha == 0.0:
            cos2_sigma_m = 0.0  # equatorial line
        else:
            cos2_sigma_m = cos_sigma - 2.0 * sin_u1 * sin_u2 / cos_sq_alpha
        c = f / 16.0 * cos_sq_alpha * (4.0 + f * (4.0 - 3.0 * cos_sq_alpha))
        lam_prev = lam
        lam = big_l + (1.0 - c) * f * sin_alpha * (
            sigma
            + c * sin_sigma * (cos2_sigma_m + c * cos_sigma * (-1.0 + 2.0 * cos2_sigma_m**2))
        )
        if abs(lam - lam_prev) < VINCENTY_TOL:
            break
    else:
        if fallback_haversine:
            return haversine_distance(p1, p2)
        raise ConvergenceError(
            f"vincenty iteration did not converge for {p1} -> {p2} "
            f"(near-antipodal pair?)",
            last_iterate={"lambda": lam, "sigma": sigma},
        )

    u_sq = cos_sq_alpha * (a * a - b * b) / (b * b)
    big_a = 1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)))
    big_b = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)))
    delta_sigma = big_b * sin_sigma * (
        cos2_sigma_m
        + big_b / 4.0 * (
            cos_sigma * (-1.0 + 2.0 * cos2_sigma_m**2)
            - big_b / 6.0 * cos2_sigma_m
            * (-3.0 + 4.0 * sin_sigma**2)
            * (-3.0 + 4.0 * cos2_sigma_m**2)
        )
    )
    return b * big_a * (sigma - delta_sigma)


def haversine_distance(p1: tuple[float, float], p2: tuple[float, float]) -> float:
    """Great-circle distance on a sphere of radius WGS84_A (fallback only)."""
    lat1, lon1 = map(math.radians, p1)
    lat2, lon2 = map(math.radians, p2)
    s = math.sin((lat2 - lat1) / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(
        (lon2 - lon1) / 2.0
    ) ** 2
    return 2.0 * WGS84_A * math.asin(math.sqrt(s))
