# %% [markdown]
# # Game-driven recovery against fixed rules
#
# Five seeds per policy on the reference scenario. The half-widths are 95%
# normal-approximation intervals.

# %%
from gresilience import aggregate, build_report, reference_scenario, run_scenario
from gresilience.scenario import with_override, with_policy

base = reference_scenario()
reports = []
for policy in ("gresilience", "always-robot", "always-human", "threshold:0.6"):
    for i in range(5):
        cfg = with_override(with_policy(base, policy), "seed", base.seed + i)
        reports.append(build_report(run_scenario(cfg).log, cfg, policy))

fields = ("recovery_mean_s", "co2e_g", "human_interactions", "combined_score")
print(f"{'policy':<15}" + "".join(f"{f:>22}" for f in fields))
for name, s in aggregate(reports).items():
    cells = "".join(f"{s.fields[f].mean:>14.3f} ±{s.fields[f].half_width:>6.3f}" for f in fields)
    print(f"{name:<15}{cells}")

# %% [markdown]
# Sweeping the upper edge of the game band: a higher edge sends more objects
# through the slowdown and the game.

# %%
for edge in (0.5, 0.6, 0.7, 0.8, 0.9):
    cfg = with_override(base, "policy.eps_high", edge)
    r = build_report(run_scenario(cfg).log, cfg, "gresilience")
    print(f"eps_high={edge}: episodes={r.episodes:>3} recovery={r.recovery_mean_s:6.2f}s co2e={r.co2e_g:.3f} g")
