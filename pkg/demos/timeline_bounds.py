"""How the discretized timeline relates to the step counter.

With the stepsize 1/(L + alpha/mu_k) the elapsed time t_k is a
nontrivial function of k: exponentially decaying mu reaches only a
finite time horizon (the flow turns ill-posed there), while power decay
mu_k = mu0 (k+1)^-gamma keeps t_k growing for gamma <= 1. The closed
forms below sandwich the exact recursion on both axes.
"""

import smoothflow as sf
from smoothflow.harness import timeline_csv

L, alpha, mu0 = 2.0, 1.0, 1.0

print("exponential decay mu_k = 0.9^k: the timeline saturates")
table = sf.timeline_table("exponential", L, alpha, mu0, 0.9, 2000)
for i in (0, 9, 99, 999, 1999):
    print(
        f"  k = {int(table['k'][i]):5d}: t in [{table['t_lower'][i]:.4f}, "
        f"{table['t_upper'][i]:.4f}], actual {table['t_actual'][i]:.4f}"
    )
print(f"  supremum of reachable time: mu0/(alpha/mu0 (1-lam)) = {mu0 / (alpha / mu0) / 0.1:.1f}")

print("\npower decay, three regimes:")
for gamma in (0.5, 1.0, 2.0):
    table = sf.timeline_table("power", L, alpha, mu0, gamma, 10_000)
    last = -1
    print(
        f"  gamma = {gamma:3g}: t_10000 = {table['t_actual'][last]:9.3f} "
        f"in [{table['t_lower'][last]:9.3f}, {table['t_upper'][last]:9.3f}]"
    )

# gamma = 1 also sandwiches the step index by exponentials of elapsed time
b = sf.timeline_bounds_power(L, alpha, mu0, 1.0, 1000)
print(f"\ngamma = 1 at k = 1000: k bracketed by [{b.k_lower:.1f}, {b.k_upper:.1f}]")

# the same table serializes to the bounds-report CSV the CLI emits
print("\nfirst lines of the bounds report:")
print("\n".join(timeline_csv(sf.timeline_table("power", L, alpha, mu0, 1.0, 3)).split("\n")[:4]))
