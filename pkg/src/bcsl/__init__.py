"""Rate-equivocation bounds for a three-receiver broadcast channel.

Subpackages and modules:
  channel_core  probability containers, entropy / mutual information
  orderings     degraded, less-noisy, more-capable receiver comparisons
  regions       inner and outer rate-equivocation bound evaluation
  fme           exact Fourier-Motzkin re-derivation of the bound lists
  codec_sim     desk-scale secure coding scheme and exact equivocation
  cli           command-line front end
"""

__version__ = "0.1.0"
