# %% [markdown]
# # From a confidence value to an action
#
# The decision engine sends confident objects straight to the arm, hopeless
# ones to the human, and solves the game only in between.

# %%
from collections import Counter

from gresilience import Gresilience, RandomSource, SamplingMode, SystemFactors, decide, sampling_probability, solve

factors = SystemFactors(t_h=0.4, t_a=0.6, h=0.3, co2=0.5)
policy = Gresilience(eps_low=0.3, eps_high=0.7)
rng = RandomSource(7)

for eps in (0.95, 0.7, 0.5, 0.3, 0.1):
    d = decide(eps, factors, policy, rng)
    print(f"eps={eps:<5} -> {d.action.name:<6} ({d.rationale.value})")

# %% [markdown]
# Inside the band the engine draws from the equilibrium. Each sampling mode
# turns the two sigma values into one probability of choosing the robot.

# %%
sol = solve(factors, 0.5)
for mode in SamplingMode:
    print(f"{mode.name:<26} P(robot) = {sampling_probability(sol.msne, mode):.4f}")

# %%
rng = RandomSource(123)
counts = Counter(decide(0.5, factors, policy, rng).action.name for _ in range(10_000))
print(counts, "expected robot share", round(sampling_probability(sol.msne, policy.sampling), 4))
