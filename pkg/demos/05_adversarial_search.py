"""
Hunting for bad instances: random sweeps and local search
=========================================================

Random sweeps give breadth; hill climbing gives depth. Starting from the
worst instance a sweep found, the climber perturbs one coordinate at a
time and keeps changes that increase the distortion ratio, restarting
with a larger kick when it stalls.
"""

import districtvote as dv

objective = dv.parse_objective("max.max")
mechanism = dv.parse_mechanism("compose:plurality-matching,arbitrary",
                               objective)
bound = dv.claimed_bound(mechanism, objective)
print("mechanism:", mechanism.spec, " claimed bound:", bound)

# Stage 1: a seeded random sweep. Trial i is generated from the pair
# (seed, i), so any witness can be regenerated independently of how many
# trials ran before it.
sweep = dv.sweep(mechanism, objective,
                 dv.GeneratorSpec(n_range=(2, 10), m_range=(2, 5),
                                  k_range=(2, 4)),
                 trials=3_000, seed=0)
print(f"\nsweep over {sweep.evaluated} instances: worst ratio "
      f"{sweep.max_ratio:.4f}")
print("worst instance has", sweep.witness.num_agents, "agents in",
      sweep.witness.num_districts, "districts")

# Stage 2: climb from the sweep's witness.
climbed = dv.hill_climb(mechanism, objective, sweep.witness,
                        steps=2_000, seed=1)
print(f"after hill climbing: ratio {climbed.max_ratio:.4f} "
      f"({climbed.evaluated} evaluations)")
print("claimed bound still respected:",
      climbed.max_ratio <= bound + 1e-9)

# The witness is an ordinary instance; inspect how the mechanism loses.
report = dv.evaluate(mechanism, climbed.witness, objective)
print("\non the climbed witness:")
print("  representatives:", report.trace.representatives)
print("  winner:", report.winner, "cost", round(report.winner_cost, 4))
print("  optimum:", report.optimal_alternative, "cost",
      round(report.optimal_cost, 4))

# Witnesses serialize like any instance, so a found counterexample can
# be saved, shared, and replayed.
import tempfile, os
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "witness.json")
    dv.save_instance(climbed.witness, path)
    replay = dv.evaluate(mechanism, dv.load_instance(path), objective)
    print("\nreplayed from JSON, same ratio:",
          replay.ratio == report.ratio)
