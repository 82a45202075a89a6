"""End-to-end pipelines: correlation decay, fits, the dichotomy and the rotation-class lower bound."""
from .correlations import DecaySeries, cesaro_decay
from .dichotomy import DichotomyConfig, dichotomy_run
from .fitting import LOG_POWER, POWER_LAW, fit_decay
from .rotation import (LowerBoundCertificate, RotationRepresentation, denjoy_koksma_check,
                       lower_bound_construct, rotation_representation)
