from polsynth.synth.copula import TabularModel, fit, load_model, sample, sample_conditional, save_model
from polsynth.synth.enforce import DistortionConfig, EnforcementReport, distort, generate_enforced
from polsynth.synth.gmm import ModeModel, fit_gmm, mode_denormalize, mode_normalize

__all__ = [
    "DistortionConfig", "EnforcementReport", "ModeModel", "TabularModel", "distort", "fit", "fit_gmm",
    "generate_enforced", "load_model", "mode_denormalize", "mode_normalize", "sample",
    "sample_conditional", "save_model",
]
