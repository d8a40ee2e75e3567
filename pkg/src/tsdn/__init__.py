"""Two-step image dehazing toolkit.

Generates multi-distribution synthetic haze from the atmospheric
scattering model, trains a multi-to-one dehazing network with
loss-supervised easy-sample mining and intra-domain adversarial
alignment, then adapts to an unlabeled real domain constrained to the
mined easy samples.  Ships metrics (PSNR/SSIM, loss-dispersion
statistics) and a CLI (`tsdn`) tying generation, training, marking,
evaluation and single-image inference together.
"""

__version__ = "0.1.0"
