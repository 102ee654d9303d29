"""perturbkit: perturb AI-generated text, score it with detectors, calibrate
thresholds, and measure attack success and text quality."""

__version__ = "0.1.0"
