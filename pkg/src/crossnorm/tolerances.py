"""Single ledger of numerical tolerances.

Every module compares against these constants instead of inventing its
own, so thresholds stay mutually consistent.
"""

# Hermiticity, trace normalization, projector/channel algebra checks.
ATOL_HERMITIAN = 1e-9

# Most negative eigenvalue tolerated before a state is rejected; smaller
# negatives are clamped to zero.
ATOL_PSD = 1e-9

# Eigenvalues / singular values below this are treated as exact zeros
# (support projections, dropped expansion terms, branch probabilities).
SUPPORT_CUTOFF = 1e-12

# Factorization reconstruction residuals (SVD, eigh, Schmidt forms).
ATOL_RECONSTRUCTION = 1e-10

# Hilbert-Schmidt residual above which a tensor decomposition is not
# accepted as a certificate for an upper bound.
WITNESS_RESIDUAL = 1e-8

# Unit-norm check for pure-state amplitudes.
ATOL_UNIT_NORM = 1e-10

# Half-width of the band around 1 used by separability verdicts.
VERDICT_MARGIN = 1e-6
