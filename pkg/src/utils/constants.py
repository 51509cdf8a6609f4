# -------------------------
# Numeric constants & defaults
# -------------------------

import numpy as np

SQRT2 = np.sqrt(2.0)

# Density-matrix invariants
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
XPARAM_TOL = 1e-12

# Separability / rank
PPT_TOL = 1e-10
RANK_TOL = 1e-10
SINGULAR_CLAMP = 1e-15

# Spectral tie-breaking: eigenvalues closer than this count as degenerate
DEGENERACY_TOL = 1e-12
AXIS_NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
LU_EQUIV_TOL = 1e-10
LU_SEARCH_TOL = 1e-6

# Conjecture monitoring
CONJECTURE_BOUND = 0.25
COUNTEREXAMPLE_GAP = -1e-6

# Search defaults
DEFAULT_SEED = 0
DEFAULT_TERMS = 6
DEFAULT_REFINE_ITERS = 500
DEFAULT_STEP0 = 0.25
MIN_STEP = 1e-9
PPT_MAX_ATTEMPTS = 10**6

# f(k) maximization
K_MIN = 1e-6
K_MAX = 1e3
FOURTH_DERIVATIVE_STEP = 0.02

# Oracles
AXIS_GRID_POINTS = 50_000
GRID_CERTIFY_N = 40
PROP2_GRID_N = 300

# Serialization
FLOAT_FORMAT = ".17g"

# Pauli matrices, order (I, sigma_x, sigma_y, sigma_z)
PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)

# PAULI_PRODUCTS[a, b] = sigma_a (x) sigma_b
PAULI_PRODUCTS = np.einsum("aij,bkl->abikjl", PAULI, PAULI).reshape(4, 4, 4, 4)

# Matrix of the unique separable X state with maximal discord
RHO_STAR = (1.0 / (4.0 * SQRT2)) * np.array(
    [
        [SQRT2 + 1, 0, 0, 1],
        [0, SQRT2 + 1, 1, 0],
        [0, 1, SQRT2 - 1, 0],
        [1, 0, 0, SQRT2 - 1],
    ],
    dtype=np.complex128,
)

# (|00><00| + |+1><+1|) / 2
SIGMA_STAR = 0.25 * np.array(
    [
        [2, 0, 0, 0],
        [0, 1, 0, 1],
        [0, 0, 0, 0],
        [0, 1, 0, 1],
    ],
    dtype=np.complex128,
)

# Local unitaries as printed alongside the rho*/sigma equivalence.
_UP = np.sqrt(4 + 2 * SQRT2)
_UM = np.sqrt(4 - 2 * SQRT2)
PRINTED_U = np.array(
    [[(1 + SQRT2) / _UP, (1 - SQRT2) / _UM], [1 / _UP, 1 / _UM]],
    dtype=np.complex128,
)
PRINTED_V = np.array([[1, 1], [1, -1]], dtype=np.complex128) / SQRT2

# The printed U rotates sigma_x to (sigma_x - sigma_z)/sqrt2; composing with
# sigma_z on the right flips it to (sigma_z - sigma_x)/sqrt2 as sigma requires.
WITNESS_U = PRINTED_U @ PAULI[3]
WITNESS_V = PRINTED_V
