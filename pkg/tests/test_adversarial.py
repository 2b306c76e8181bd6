"""Worst-case instance families and lower-bound certification."""

import json
import math

import pytest

import districtvote as dv

EXACT = 1e-12
GOLDEN_LIMIT = 2.0 + math.sqrt(5.0)
SQ2 = math.sqrt(2.0)

ORDINAL_SHIPPED = [
    "compose:plurality-matching,plurality-matching",
    "compose:plurality-matching,arbitrary",
    "compose:plurality-matching,median",
    "arbitrary-median",
    "arbitrary-dictator",
]
CARDINAL_SHIPPED = [
    "compose:optimal,optimal",
    "compose:optimal,optimal,reps-only",
    "arl:1",
    "arl:2",
    "arl:4",
]


def make(spec, objective="max.max"):
    return dv.parse_mechanism(spec, dv.parse_objective(objective))


# ---------------------------------------------------------------------------
# fibonacci
# ---------------------------------------------------------------------------

def test_fibonacci_values():
    assert [dv.fibonacci(i) for i in range(1, 11)] == [
        1, 1, 2, 3, 5, 8, 13, 21, 34, 55]
    assert dv.fibonacci(19) == 4181


def test_fibonacci_rejects_nonpositive():
    with pytest.raises(ValueError):
        dv.fibonacci(0)


# ---------------------------------------------------------------------------
# family construction
# ---------------------------------------------------------------------------

ALL_FAMILIES = [
    ("avg-max-golden", {"fib_index": 8}),
    ("avg-max-golden", {"fib_index": 10}),
    ("max-max-unanimity", {"x": 1}),
    ("max-max-unanimity", {"x": 2}),
    ("max-avg-golden", {"fib_index": 8}),
    ("max-avg-golden", {"fib_index": 10}),
    ("cardinal-line", {}),
]


@pytest.mark.parametrize("name,kwargs", ALL_FAMILIES)
def test_role_costs_match_recomputed_costs(name, kwargs):
    family = dv.build_family(name, **kwargs)
    assert len(family.roles) == len(family.instances)
    assert len(family.role_costs) == len(family.instances)
    for inst, roles, expected in zip(family.instances, family.roles,
                                     family.role_costs):
        costs = dv.cost_vector(inst, family.objective)
        for role, alt_id in roles.items():
            assert costs[alt_id] == pytest.approx(expected[role], abs=EXACT), (
                name, role)


def test_family_registry_round_trip():
    for name in dv.FAMILY_NAMES:
        assert dv.build_family(name).name == name
    with pytest.raises(ValueError):
        dv.build_family("mystery-family")


def test_family_targets():
    assert dv.gen_avg_max_family(10).target_ratio == pytest.approx(
        144.0 / 34.0, abs=EXACT)
    assert dv.gen_max_avg_family(10).target_ratio == pytest.approx(
        144.0 / 34.0, abs=EXACT)
    assert dv.gen_max_max_instance().target_ratio == 3.0
    assert dv.gen_cardinal_line_family().target_ratio == pytest.approx(
        1.0 + SQ2, abs=EXACT)


def test_family_objectives():
    assert dv.build_family("avg-max-golden").objective.spec == "avg.max"
    assert dv.build_family("max-avg-golden").objective.spec == "max.avg"
    assert dv.build_family("max-max-unanimity").objective.spec == "max.max"
    assert dv.build_family("cardinal-line").objective.spec == "max.max"


def test_golden_targets_climb_toward_limit():
    for name in ("avg-max-golden", "max-avg-golden"):
        targets = [dv.build_family(name, fib_index=i).target_ratio
                   for i in range(5, 13)]
        for earlier, later in zip(targets, targets[1:]):
            assert later >= earlier - EXACT, name
        for t in targets:
            assert t <= GOLDEN_LIMIT + EXACT
        assert targets[-1] == pytest.approx(GOLDEN_LIMIT, abs=1e-3)


def test_generator_size_guards():
    with pytest.raises(ValueError):
        dv.gen_avg_max_family(4)
    with pytest.raises(dv.TooLarge):
        dv.gen_avg_max_family(20)
    with pytest.raises(ValueError):
        dv.gen_max_avg_family(3)
    with pytest.raises(dv.TooLarge):
        dv.gen_max_avg_family(25)
    with pytest.raises(ValueError):
        dv.gen_max_max_instance(0)
    with pytest.raises(dv.TooLarge):
        dv.gen_max_max_instance(6_000)


def test_unanimity_family_shape():
    family = dv.gen_max_max_instance(2)
    assert len(family.instances) == 4
    for inst in family.instances:
        assert inst.num_districts == 2
        assert inst.num_agents == 4
        assert inst.num_alternatives == 2


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

def test_certify_details_one_ratio_per_member():
    family = dv.gen_cardinal_line_family()
    details = dv.certify_details(family, make("arl:2"))
    assert len(details) == len(family.instances)
    assert all(r >= 1.0 for r in details)


def test_ordinal_mechanisms_forced_on_avg_max_family():
    family = dv.gen_avg_max_family(10)
    for spec in ORDINAL_SHIPPED:
        mech = make(spec, "avg.max")
        assert dv.certify_lower_bound(family, mech) == pytest.approx(
            5.0, abs=EXACT), spec


def test_cardinal_mechanism_dodges_avg_max_family():
    # seeing the metric beats the ranking-only trap; this family only
    # binds mechanisms restricted to ordinal information
    family = dv.gen_avg_max_family(10)
    mech = make("compose:optimal,optimal", "avg.max")
    assert dv.certify_lower_bound(family, mech) == 1.0


def test_unanimous_mechanisms_forced_on_unanimity_trap():
    family = dv.gen_max_max_instance(2)
    for spec in ORDINAL_SHIPPED + ["compose:optimal,optimal",
                                   "compose:optimal,optimal,reps-only"]:
        mech = make(spec, "max.max")
        assert dv.certify_lower_bound(family, mech) == pytest.approx(
            3.0, abs=EXACT), spec


def test_threshold_mechanism_dodges_unanimity_trap():
    family = dv.gen_max_max_instance(2)
    for spec in ("arl:1", "arl:2"):
        assert dv.certify_lower_bound(family, make(spec)) == 1.0, spec


def test_ordinal_mechanisms_forced_on_max_avg_family():
    family = dv.gen_max_avg_family(10)
    for spec in ORDINAL_SHIPPED:
        mech = make(spec, "max.avg")
        details = dv.certify_details(family, mech)
        assert details[0] == pytest.approx(1.0, abs=EXACT), spec
        assert details[1] == pytest.approx(144.0 / 34.0, rel=1e-9), spec
        assert dv.certify_lower_bound(family, mech) >= 4.2, spec


def test_every_shipped_mechanism_forced_on_cardinal_line():
    family = dv.gen_cardinal_line_family()
    for spec in ORDINAL_SHIPPED + CARDINAL_SHIPPED + [
            f"arl:{1.0 + SQ2!r}"]:
        mech = make(spec, "max.max")
        got = dv.certify_lower_bound(family, mech)
        assert got == pytest.approx(1.0 + SQ2, abs=1e-9), spec


def test_certify_floors_at_one():
    # a family never certifies below 1 even if every member is won cleanly
    family = dv.gen_max_max_instance(1)
    assert dv.certify_lower_bound(family, make("arl:1")) == 1.0


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def test_export_family_round_trip(tmp_path):
    family = dv.gen_cardinal_line_family()
    manifest_path = dv.export_family(family, str(tmp_path / "bundle"))
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    assert manifest["family"] == "cardinal-line"
    assert manifest["objective"] == "max.max"
    assert manifest["target_ratio"] == pytest.approx(1.0 + SQ2, abs=EXACT)
    assert manifest["decision_script"]
    assert manifest["roles"] == [dict(r) for r in family.roles]
    assert len(manifest["instances"]) == 4
    for fname, original in zip(manifest["instances"], family.instances):
        loaded = dv.load_instance(str(tmp_path / "bundle" / fname))
        assert loaded.content_key() == original.content_key()
