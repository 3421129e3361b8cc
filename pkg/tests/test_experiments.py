import json
import math

import numpy as np
import pytest

from bandlim.experiments import (
    EXPERIMENTS,
    PILOT_OFFSET,
    ExperimentReport,
    bmo_line_experiment,
    g1_growth_experiment,
    g3_sample_growth,
    one_sided_experiment,
    random_average_experiment,
    tent_sum_average,
)

SMALL = dict(radii=(50, 100), per_unit=4, pilot=4)


class TestRandomAverage:
    def test_small_run_shape(self):
        rep = random_average_experiment(seed=1, M=6, **SMALL)
        assert len(rep.per_realization) == 6
        assert [r["realization"] for r in rep.per_realization] == list(range(6))
        assert set(rep.verdicts) == {"ceiling", "no_trend"}
        assert rep.params["K"] >= 1.25 * 100

    def test_thread_count_does_not_matter(self):
        a = random_average_experiment(seed=5, M=8, workers=1, **SMALL)
        b = random_average_experiment(seed=5, M=8, workers=4, **SMALL)
        assert a.digest() == b.digest()
        assert a.to_json() == b.to_json()

    def test_realization_depends_only_on_seed_and_index(self):
        a = random_average_experiment(seed=2, M=3, **SMALL)
        b = random_average_experiment(seed=2, M=6, **SMALL)
        assert a.per_realization == b.per_realization[:3]
        c = random_average_experiment(seed=3, M=3, **SMALL)
        assert a.per_realization != c.per_realization

    def test_zero_noise(self):
        rep = random_average_experiment(seed=0, alpha=0.0, M=2, **SMALL)
        assert all(x == 0.0 for r in rep.per_realization for x in r["averages"])

    def test_linearity_in_alpha(self):
        a = random_average_experiment(seed=4, alpha=0.5, M=2, **SMALL)
        b = random_average_experiment(seed=4, alpha=1.0, M=2, **SMALL)
        for ra, rb in zip(a.per_realization, b.per_realization):
            assert np.allclose(rb["averages"], 2 * np.array(ra["averages"]), rtol=1e-13, atol=0)

    def test_window_too_small(self):
        with pytest.raises(ValueError, match="window"):
            random_average_experiment(M=1, radii=(100,), K=100)

    def test_pilot_disjoint_from_realizations(self):
        assert PILOT_OFFSET > 10**6

    def test_emit_curves(self, tmp_path):
        rep = random_average_experiment(seed=0, M=2, emit_curves=str(tmp_path), **SMALL)
        assert rep.artifacts and open(rep.artifacts[0]).readline().strip() == "r,mean_average"


class TestOneSided:
    def test_zero_data(self):
        rep = one_sided_experiment(alpha=0.0, M=2, radii=(25, 50), per_unit=4)
        assert all(s == 0.0 for r in rep.per_realization for s in r["sups"])

    def test_log_sequence_grows(self):
        rep = one_sided_experiment(M=2, radii=(50, 100, 200, 400), per_unit=4)
        s = rep.summary["log_sequence_sups"]
        assert all(b > a for a, b in zip(s, s[1:]))
        assert rep.verdicts["log_sequence_grows"].passed


class TestBmoLine:
    def test_homogeneity_and_kappa(self):
        rep = bmo_line_experiment(seed=0, M=3, r=50.0, per_unit=4, offsets_per_scale=8)
        assert rep.verdicts["homogeneity"].passed
        assert rep.summary["homogeneity_error"] <= 1e-12
        assert rep.summary["kappa_r"] > 0

    def test_zero_data(self):
        rep = bmo_line_experiment(seed=0, alpha=0.0, M=2, r=25.0, per_unit=4, offsets_per_scale=4)
        assert all(r["bmo_r"] == 0.0 for r in rep.per_realization)

    def test_height_must_be_positive(self):
        with pytest.raises(ValueError):
            bmo_line_experiment(c=0.0, M=1, r=10.0)


class TestDeterministicExperiments:
    def test_g1_growth(self):
        rep = g1_growth_experiment()
        assert rep.passed, {k: v.value for k, v in rep.verdicts.items()}
        assert rep.summary["slope"] > 0.25

    def test_tent_oracle_increases(self):
        vals = [tent_sum_average(r) for r in (50, 100, 200, 400, 800)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_g3_growth_identities(self):
        rep = g3_sample_growth(n_max=16, bmo_levels=(8, 10))
        for k in ("A_slope", "B_integer_samples_unbounded", "C_sparse_bounded"):
            assert rep.verdicts[k].passed, k
        assert abs(rep.summary["slope"] + math.sqrt(3) / 2) < 1e-6

    def test_g3_bmo_contrast_records_growth(self):
        # BMO estimates are not stable for G3; the verdict fails and records the values
        rep = g3_sample_growth(n_max=12, bmo_levels=(8, 10))
        d = rep.verdicts["D_bmo_stable"]
        assert rep.summary["bmo"][1] > rep.summary["bmo"][0]
        assert d.passed == (d.value < 0.05 and rep.summary["sups"][1] > rep.summary["sups"][0])
        assert not rep.passed

    def test_n_max_range(self):
        with pytest.raises(ValueError):
            g3_sample_growth(n_max=41)


def test_report_serialization_and_provenance():
    rep = random_average_experiment(seed=0, M=2, **SMALL)
    d = json.loads(rep.to_json())
    assert d["experiment"] == "random-average" and d["seed"] == 0
    for v in d["verdicts"].values():
        assert {"passed", "value", "threshold", "comparison", "provenance"} <= set(v)
    assert isinstance(rep, ExperimentReport)


def test_registry():
    assert set(EXPERIMENTS) == {"random-average", "one-sided", "bmo-line", "g1-growth", "g3-growth"}
