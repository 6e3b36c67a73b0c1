import math

import pytest

import mobai


def near_tie(eps=1.0):
    return mobai.Instance([[100.0, 0.0, 50.0], [0.0, 100.0, 50.0 + eps]])


def test_instance_roundtrip():
    inst = mobai.gen_synthetic(5, 3, 7)
    assert inst.arms == 5 and inst.objectives == 3
    again = mobai.Instance.from_csv(inst.to_csv())
    assert again.means == inst.means
    assert len(inst.best_arms()) == 3


def test_tied_instance_rejected():
    with pytest.raises(mobai.MobaiError):
        mobai.Instance([[1.0], [1.0]])


def test_lower_bound_constant():
    w, value = mobai.optimize_allocation(near_tie(), None, 2000)
    assert 1.0 / value == pytest.approx(8.0, rel=1e-3)
    assert sum(w) == pytest.approx(1.0)


def test_surrogate_is_feasible_and_not_worse():
    inst = mobai.gen_synthetic(4, 2, 3)
    w = [0.25] * 4
    s, value = mobai.surrogate_proportion(inst, w, 0.1)
    floor = mobai.eta_floor(4, 0.1)
    assert sum(s) == pytest.approx(1.0, abs=1e-12)
    assert min(s) >= floor - 1e-12
    assert value >= mobai.h(inst, w, w) - 1e-12


def test_f_machinery():
    x = mobai.f_inverse(0.01, 1)
    assert x == pytest.approx(math.log(100.0), abs=1e-8)
    assert mobai.f_eval(x, 1) == pytest.approx(0.01, rel=1e-9)


def test_z_statistic_matches_t_times_g():
    inst = near_tie()
    counts = [30, 70]
    t = sum(counts)
    z = mobai.z_statistic(counts, inst.means)
    assert z == pytest.approx(t * mobai.g(inst, [c / t for c in counts]), rel=1e-12)


@pytest.mark.parametrize("policy", ["mobai", "baseline", "mose"])
def test_trials_are_reproducible(policy):
    inst = mobai.gen_synthetic(3, 2, 11)
    a = mobai.run_trial(inst, policy, seed=4)
    b = mobai.run_trial(inst, policy, seed=4)
    assert a["tau"] == b["tau"] and a["recommendation"] == b["recommendation"]
    assert a["error"] == ""


def test_batch_summary():
    inst = mobai.gen_synthetic(3, 2, 11)
    rows, summary = mobai.run_batch(inst, "mobai", trials=4, seed=1, workers=2)
    assert len(rows) == 4
    assert summary["trials"] == 4
    assert summary["tau_mean"] == pytest.approx(sum(r["tau"] for r in rows) / 4)


def test_lowerbound_report():
    report = mobai.lowerbound_report(near_tie(), eta=0.1, iterations=2000, grid=200)
    assert report["c_star"] == pytest.approx(8.0, rel=1e-3)
    assert report["relaxation_holds"]
