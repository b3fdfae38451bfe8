# %% [markdown]
# # Ten minutes on the conveyor
#
# The reference scenario ships with the package: 6 objects a minute, a mix of
# known and novel colors, seed 42.

# %%
from gresilience import build_report, detect_episodes, reference_scenario, run_scenario

cfg = reference_scenario()
res = run_scenario(cfg)
print(res.counters)

# %% [markdown]
# Every step is in the event log. The first object's story:

# %%
for e in res.log.events:
    if e.object_id == 0:
        print(e.to_line())

# %% [markdown]
# Degradation episodes start when the conveyor slows for a second look or an
# unknown color goes to the learning queue. They end once the object is done
# and the belt is back to full speed.

# %%
for ep in detect_episodes(res.log)[:8]:
    print(ep)

# %%
report = build_report(res.log, cfg, res.policy)
print(f"recovery mean {report.recovery_mean_s:.2f}s, p95 {report.recovery_p95_s:.2f}s")
print(f"energy {report.energy_wh:.2f} Wh, CO2e {report.co2e_g:.2f} g, score {report.combined_score:.3f}")

# %% [markdown]
# Same seed, same bytes.

# %%
assert run_scenario(cfg).log.to_text() == res.log.to_text()
