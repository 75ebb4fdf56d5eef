"""bandcast: a numerical laboratory for causal prediction of anticausal
convolutions of band-limited and high-frequency signals."""

from .engine import (
    PredictionResult,
    anticausal_convolve_oracle,
    causal_convolve,
    error_norms,
    fourier_forward,
    fourier_inverse,
    mixed_predict,
    spectral_predict,
)
from .errors import BandcastError
from .grids import GridSpec, default_grid
from .kernels import (
    RationalAnticausalKernel,
    ResidueExpansion,
    build_kernel,
    eval_time_kernel,
    eval_transfer,
    kernel_from_json,
    kernel_l2_norm,
    kernel_to_json,
    partial_fraction_expand,
)
from .predictor import (
    DeviationGrid,
    FrequencyDomain,
    PredictorTransfer,
    alpha_coefficient,
    deviation_norm,
    eval_compensator,
    eval_predictor_transfer,
    hardy_boundary_check,
    mobius_real_part,
    synthesize_time_predictor,
)
from .signals import (
    GaussianBump,
    MixedSpectrum,
    RaisedCosineBump,
    SampledDensity,
    SampledSignal,
    SampledSpectrum,
    add_outofband_noise,
    cstar_norm,
    ideal_lowpass_split,
    make_bandlimited_signal,
    make_highfreq_signal,
    make_mixed_signal,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
