# %% [markdown]
# # The resilience/green game for one uncertain object
#
# Player 1 wants the cell back to full speed quickly. Player 2 wants the
# smallest CO2 bill. Both pick between letting the arm classify (a1) and
# handing the object to the human (a2).

# %%
from gresilience import P2ScaleMode, SystemFactors, build_bimatrix, solve
from gresilience.cli import format_solution

factors = SystemFactors(t_h=5, t_a=2, h=1, co2=3)
sol = solve(factors, eps=0.8)
print(format_solution(sol))

# %% [markdown]
# Both pure profiles on the diagonal are equilibria; the players only disagree
# on which one they prefer. The mixed equilibrium puts 0.5 on a1 for player 1
# and 0.25 for player 2.

# %%
for eps in (0.2, 0.5, 0.8, 0.95):
    s = solve(factors, eps).msne
    print(f"eps={eps:<5} sigma_p1={s.sigma_p1_a1:.4f} sigma_p2={s.sigma_p2_a1:.4f}")

# %% [markdown]
# Confidence scales each player's payoffs but not the ratios between payoff
# gaps, so the mixing probabilities stay put. Only t_a and h move them:
# sigma_p2 = t_a / (3 t_a + 2 h).

# %%
for h in (0.25, 1, 4):
    s = solve(SystemFactors(5, 2, h, 3), 0.8).msne
    print(f"h={h:<5} sigma_p2={s.sigma_p2_a1:.4f} closed form={2 / (6 + 2 * h):.4f}")

# %%
for mode in P2ScaleMode:
    m = build_bimatrix(factors, 0.8, mode)
    print(f"{mode.name:<10} a..d = {m.a:.2f} {m.b:.2f} {m.c:.2f} {m.d:.2f}")
