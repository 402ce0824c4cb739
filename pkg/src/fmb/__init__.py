"""Linear-programming bounds for moments of isotropic measures, energies of
tight frames and p-frame energies of projective codes over R, C and H."""
from .algebra import Field, KMatrix
from .bounds import (
    BoundResult,
    best_frame_energy_bound,
    etf_energy_bound,
    infinity_moment_bound,
    lp_bound,
    max_simplex_params,
    measure_frame_energy_bound,
    moment_bound,
    p_frame_energy_lower_bound,
    welch_bound,
    yudin_lower_bound,
)
from .constructor import family_matrix, family_spec, sharp_code
from .errors import FMBError
from .frames import TightFrame, WeightedPointSet, catalog, isotropy_check, q_energy, q_moment
from .gale import duality_check, gale_dual_isotropic

__version__ = "0.1.0"

__all__ = [
    "BoundResult", "FMBError", "Field", "KMatrix", "TightFrame", "WeightedPointSet",
    "best_frame_energy_bound", "catalog", "duality_check", "etf_energy_bound", "family_matrix",
    "family_spec", "gale_dual_isotropic", "infinity_moment_bound", "isotropy_check", "lp_bound",
    "max_simplex_params", "measure_frame_energy_bound", "moment_bound", "p_frame_energy_lower_bound",
    "q_energy", "q_moment", "sharp_code", "welch_bound", "yudin_lower_bound",
]
