"""Compare catalog series against correlated-Gaussian Monte Carlo.

    python demos/monte_carlo_check.py [samples]
"""

import sys

from gkbound import ccp
from gkbound.gaussmc import CorrelationSpec, sample_pair
from gkbound.series import eval_series

n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
for name in ("grothendieck", "haagerup", "kappa"):
    d = ccp.catalog(name)
    h = ccp.h_series(d, 41)
    for rho in (-0.5, 0.5, 0.9):
        est = sample_pair(CorrelationSpec(d.k, rho), d.sampler, n=n, seed=1)
        z = (est.mean - eval_series(h, rho)) / est.stderr
        print(f"{name:>12} rho={rho:+.1f}  series={eval_series(h, rho):.6f}  mc={est.mean:.6f}  z={z:+.2f}")

print(f"\nP(X<=0, Y<=0) at rho=1/2: {ccp.gaussian_df_series(0.5, [0.0], [0.0]):.12f}")
