"""Numerical laboratory for a singular parabolic free-boundary problem.

Subpackages cover the regularized model and its closed-form solutions
(model), confluent hypergeometric special functions (specfun), a shared
adaptive radial ODE integrator with barrier-inequality verifiers (radial),
self-similar profiles (selfsim), traveling waves and colliding fronts
(waves), a monotone IMEX solver for the regularized evolution with uniform
-estimate monitors (pde), backward-kernel weighted monotonicity diagnostics
(weiss), and a CLI tying them into reproducible runs (cli).
"""

__version__ = "0.1.0"
