"""Primal-dual bounds for weighted trigonometric approximation on Z, Z_n and Z^2."""

from .acsets import (
    All,
    Complement,
    Explicit,
    HalfLine,
    Negate,
    Sector2,
    Translate,
    classify_ac,
    contains,
    parse_frequency_set,
    reduce_measure,
    window,
)
from .dual import (
    DualCertificate,
    density_check,
    dual_bound,
    dual_maximize_matrix,
    dual_maximize_scalar,
    dual_value_scalar,
    gap_report,
)
from .groups import GroupSpec, InvalidInput, character_samples, quadrature
from .laspace import Exponents, TrigPolynomial, fourier_coefficient, gram_matrix, lalpha_norm
from .measures import (
    MatrixWeight,
    SpectralMeasure,
    constant_weight,
    moore_penrose,
    normalize_equivalence,
    polynomial_modulus_weight,
    range_projection,
    restrict,
)
from .primal import PrimalResult, UnsupportedScenario, primal_bound, primal_l2, primal_lalpha

__version__ = "0.1.0"
