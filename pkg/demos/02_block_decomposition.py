"""Partial-sum decomposition S_n = S_A + S_B + S_C on a moving-average path.

The moving average X_k = eps_k + eps_{k-1} has the lag-1 zero-mean property,
so major-block sums form a martingale difference sequence in the block index.
The demo checks the identity exactly and shows the minor part shrinking
relative to the major part as the horizon grows.
"""

import numpy as np

from lagmart import build_fixed_lag_blocks, decompose, generate_ma_process

for n in (100, 1_000, 10_000, 100_000):
    path = generate_ma_process(q=1, p=1, coeffs=[1.0, 1.0], innovations_sd=1.0,
                               n=n, seed=(2024, n))
    scheme = build_fixed_lag_blocks(p=1, s=2, k_max=n)
    d = decompose(path, scheme)
    gap = abs((d.s_a + d.s_b + d.s_c) - d.s_n)
    print(
        f"n = {n:>7}: S_n = {d.s_n:+10.3f}  S_A = {d.s_a:+8.3f}  "
        f"S_B = {d.s_b:+10.3f}  S_C = {d.s_c:+7.3f}  "
        f"|identity gap| = {gap:.2e}  (j_a = {d.j_a}, j_b = {d.j_b})"
    )

print()
print("minor-to-total magnitude over replicates at n = 20,000:")
ratios = []
for r in range(200):
    path = generate_ma_process(q=1, p=1, coeffs=[1.0, 1.0], innovations_sd=1.0,
                               n=20_000, seed=(7, r))
    scheme = build_fixed_lag_blocks(p=1, s=2, k_max=20_000)
    d = decompose(path, scheme)
    ratios.append(abs(d.s_a) / max(abs(d.s_b), 1e-12))
ratios = np.array(ratios)
print(f"median |S_A| / |S_B| = {np.median(ratios):.3f}")
print("the minor part is asymptotically negligible; the major part carries the CLT")
