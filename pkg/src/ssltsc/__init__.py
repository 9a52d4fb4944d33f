"""Label-efficient contrastive self-supervised learning for physiological
time series: synthetic cohort generation, windowed datasets, view
augmentations, a from-scratch neural kernel, two-phase training, and a
leave-one-subject-out evaluation harness.
"""

__version__ = "0.1.0"
