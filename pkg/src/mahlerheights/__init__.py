"""Heights of algebraic numbers and hypersurfaces as sums of per-place
Mahler-type integrals, with equidistribution experiments on the projective
line."""

__version__ = "0.1.0"
