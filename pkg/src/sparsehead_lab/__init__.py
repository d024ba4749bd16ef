"""
sparsehead-lab - contrastive learning with L2,1-sparse projection heads.

A define-by-run autodiff core, encoder/head models, InfoNCE with the
SparseHead regularizer, synthetic worlds with ground-truth latents, and
spectral, distance and alignment diagnostics.
"""

__version__ = "0.1.0"
