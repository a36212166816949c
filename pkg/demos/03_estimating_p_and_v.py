"""Plug-in estimates of the non-null proportion and slab variance.

The cosine-sum estimate of p is unbiased up to a factor ``1 - m^(-V gamma)``,
but its standard deviation is about ``m^(gamma - 1/2) / p``. It becomes
useful only once ``m^(1 - 2 gamma) p^2`` is large. The slab variance estimate
inherits all of that error through the division by p.
"""
import numpy as np

from bayes_stepdown import CovarianceFamily, MixtureParams, estimate_p, estimate_v, sample_dataset
from bayes_stepdown.model import noise_transform

gamma, v = 0.25, 25.0
for m, p in ((10_000, 0.063), (10_000, 0.3), (200_000, 0.1)):
    fam = CovarianceFamily("block", m, 0.5, block_size=5)
    t = noise_transform(fam)
    ratios, vr = [], []
    for r in range(30):
        _, x = sample_dataset(fam, MixtureParams(p, v), seed=1, replicate=r, transform=t)
        raw, clamped = estimate_p(x, gamma)
        ratios.append(raw / p)
        vr.append(estimate_v(x, clamped)[1] / v)
    print(
        f"m={m:>7} p={p:<5} m^(1-2g)p^2={m ** (1 - 2 * gamma) * p * p:7.1f}  "
        f"p_hat/p mean {np.mean(ratios):.3f} sd {np.std(ratios):.3f}  "
        f"V_hat/V median {np.median(vr):.3f}"
    )
