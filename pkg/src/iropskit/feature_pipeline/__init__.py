"""Feature engineering and scaling for flight-schedule data."""

from .assemble import delay_code_labels, engineer_features
from .encodings import (
    ShiftSchedule,
    aircraft_seats,
    encode_date,
    encode_shift_fraction,
    encode_time_of_day,
    one_hot,
)
from .geodesy import haversine_distance, latlon_to_unit_vector, vincenty_distance
from .scaling import (
    ScalerMethod,
    ScalerModel,
    apply_scaler,
    fit_scaler,
    fit_yeo_johnson_lambda,
    inverse_scaler,
    yeo_johnson,
    yeo_johnson_inverse,
    yeo_johnson_loglik,
)

__all__ = [
    "ShiftSchedule",
    "ScalerMethod",
    "ScalerModel",
    "aircraft_seats",
    "apply_scaler",
    "delay_code_labels",
    "encode_date",
    "encode_shift_fraction",
    "encode_time_of_day",
    "engineer_features",
    "fit_scaler",
    "fit_yeo_johnson_lambda",
    "haversine_distance",
    "inverse_scaler",
    "latlon_to_unit_vector",
    "one_hot",
    "vincenty_distance",
    "yeo_johnson",
    "yeo_johnson_inverse",
    "yeo_johnson_loglik",
]
