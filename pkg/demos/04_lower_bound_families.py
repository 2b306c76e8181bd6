"""
Adversarial families: forcing every mechanism to show its worst side
====================================================================

An upper bound says a mechanism never exceeds some ratio. A lower-bound
family is the matching construction: a small set of instances arranged
so that every mechanism of a given class loses at least the target ratio
on one of them. Certification just runs the mechanism on each member and
takes the worst ratio.
"""

import math

import districtvote as dv

# The unanimity trap: two districts, two alternatives of cost 1 and 3,
# and four labelings of the same geometry. Unanimity pins one
# representative to each alternative, and however the over step decides,
# one labeling makes the expensive alternative win.
trap = dv.gen_max_max_instance(x=2)
print("unanimity trap, target ratio", trap.target_ratio)
for spec in ("compose:optimal,optimal",
             "compose:plurality-matching,plurality-matching",
             "arbitrary-dictator"):
    mech = dv.parse_mechanism(spec, trap.objective)
    print(f"  {spec:<48} forced to",
          round(dv.certify_lower_bound(trap, mech), 4))

# The threshold mechanism is not unanimous, so the trap has no hold on it.
arl = dv.parse_mechanism("arl:2", trap.objective)
print("  arl:2 (not unanimous)                            forced to",
      round(dv.certify_lower_bound(trap, arl), 4))

# Ranking-only mechanisms fare worse. The golden-ratio families use
# district counts from consecutive Fibonacci numbers to push the forced
# ratio toward 2 + sqrt(5) = 4.2360...
print("\ngolden-ratio family targets by size:")
print(f"{'fib index':>9} {'avg.max target':>15} {'max.avg target':>15}")
for i in range(5, 15):
    am = dv.gen_avg_max_family(i).target_ratio
    ma = dv.gen_max_avg_family(i).target_ratio
    print(f"{i:>9} {am:>15.6f} {ma:>15.6f}")
print(f"{'limit':>9} {2 + math.sqrt(5):>15.6f} {2 + math.sqrt(5):>15.6f}")

family = dv.gen_avg_max_family(10)
print("\nforced ratios on the avg.max family (fib index 10):")
for spec in ("compose:plurality-matching,plurality-matching",
             "compose:plurality-matching,median",
             "arbitrary-median"):
    mech = dv.parse_mechanism(spec, family.objective)
    details = [round(r, 4) for r in dv.certify_details(family, mech)]
    print(f"  {spec:<48} members {details} -> forced "
          f"{max(details)}")

# A mechanism that sees the metric dodges this particular family; the
# construction only binds rules limited to rankings.
cardinal = dv.parse_mechanism("compose:optimal,optimal", family.objective)
print("  compose:optimal,optimal (cardinal)               forced to",
      dv.certify_lower_bound(family, cardinal))

# Every family explains its own case analysis.
print("\ndecision script of the avg.max family:")
print(" ", family.decision_script)

# Families export as JSON bundles for use outside this package.
import tempfile
with tempfile.TemporaryDirectory() as tmp:
    manifest = dv.export_family(family, tmp)
    print("\nexported bundle manifest:", manifest.split("/")[-1])
