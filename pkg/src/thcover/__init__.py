"""Thermodynamic formalism and shrinking-target covering experiments
for binary shifts and the doubling map of the circle."""

__version__ = "0.1.0"

from .symbolic import CirclePoint, Orbit, Word, neighbor_cylinders, project_to_circle
from .thermo import (
    GibbsChain,
    GibbsConstants,
    Potential,
    TransferSystem,
    cylinder_measure,
    gibbs_chain,
    gibbs_constants,
    normalize,
    pressure,
    sample_orbit,
    stream,
    transfer_system,
)
from .spectrum import (
    CoverPrediction,
    Spectrum,
    SpectrumProfile,
    entropy_spectrum,
    local_entropy_extremes,
    predict_cover,
    t_of_q,
)
from .hitting import (
    HittingProfile,
    cylinder_sequence_profile,
    hitting_times,
    lcp_profile,
    return_profile,
    star_hitting_times,
)
from .covering import (
    CensusReport,
    CoverEstimate,
    circle_cover_report,
    estimate_dims,
    hit_census,
    subword_census,
)
from .typicality import (
    CantorReport,
    GoodCylinderSet,
    cantor_lower_bound,
    good_cylinders,
    tree_counts,
    visit_counts,
)
from .sft import SftSpec, SftSystem, sft_extremes, sft_predict, sft_pressure, sft_spectrum
