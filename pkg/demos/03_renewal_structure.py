"""Regeneration times along one long stretch of uniforms.

When the product of thresholds stays positive, some sites regenerate the
whole future: everything after them is a function of the uniforms from
there on. Their gaps follow P(gap > m) = rho_m.
"""

import numpy as np

from regensim import BinaryARSpec, GeometricTail, UniformField, renewal_scan, rho_table

spec = BinaryARSpec(0.2, [], tail=GeometricTail(0.5, 0.5, 1))  # a*_k = 1 - 2^-(k+1)
schedule = spec.schedule()

report = renewal_scan(0, 59, UniformField(3), schedule, kernel=spec)
print("times:", report.times.tolist())
for (a, b), block in list(zip(report.blocks, report.block_symbols))[:5]:
    print(f"  block [{a}, {b}):", "".join("+" if x == 1 else "-" for x in block))

horizon = 200_000
long = renewal_scan(0, horizon - 1, UniformField(4), schedule)
gaps = np.diff(long.times[long.times < horizon - 64])
rho = rho_table(schedule, 8).rho
print(f"\n{len(gaps)} gaps; P(gap > m) vs rho_m")
for m in range(1, 7):
    print(f"  m={m}: {np.mean(gaps > m):.4f}  {rho[m]:.4f}")
