# shared.py
from canonical import CanonicalProblem

# Reference configuration used by the allocation table, figure sweeps and defaults
REFERENCE_LAMBDA = (2.0, 3.0, 1.0)
REFERENCE_LAMBDA_HAT = (3.0, 1.0, 1.0)

# Known three-decimal allocations at R = 0.1, 2.1, 4.1: (CR rates, NoCR rates)
REFERENCE_TABLE = {
    0.1: ((0.058, 0.031, 0.011), (0.1, 0.0, 0.0)),
    2.1: ((0.929, 0.726, 0.445), (0.999, 0.749, 0.353)),
    4.1: ((1.641, 1.407, 1.051), (1.665, 1.415, 1.019)),
}

reference_problem = CanonicalProblem.from_eigenvalues(REFERENCE_LAMBDA, REFERENCE_LAMBDA_HAT)
