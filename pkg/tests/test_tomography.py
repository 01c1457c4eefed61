import numpy as np
import pytest

from wgstate.measurement import CountRecord, setting_outcome_kets, tomography_settings
from wgstate.qmath import DensityMatrix, PureState2Q, fidelity, trace_distance
from wgstate.stategen import weighted_graph_state
from wgstate.stats import DegenerateDataError
from wgstate.tomography import (ReconstructionReport, TomographyDataset,
                                mle_reconstruct, monte_carlo_report,
                                read_dataset_csv, simulate_tomography,
                                write_dataset_csv)


def brute_force_probs(state, setting):
    """Independent Born-rule oracle: explicit projector sandwiches."""
    rho = state.density().matrix if isinstance(state, PureState2Q) else state.matrix
    kets = setting_outcome_kets(setting)
    return np.array([np.real(kets[o].conj() @ rho @ kets[o])
                     for o in ("++", "+-", "-+", "--")])


class TestSimulateTomography:
    def test_maximally_mixed_uniform(self):
        rho = DensityMatrix(np.eye(4) / 4)
        data = simulate_tomography(rho, rate=100.0, duration=10.0)
        assert np.all(data.counts == 250)

    def test_hh_eigenstate(self):
        state = PureState2Q(np.array([1, 0, 0, 0], dtype=complex))
        data = simulate_tomography(state, rate=150.0, duration=10.0)
        labels = [s.label for s in tomography_settings()]
        assert data.records[labels.index("HxH")].counts[0] == 1500
        assert data.records[labels.index("VxV")].counts[0] == 0

    def test_counts_match_brute_force_probabilities(self):
        state = weighted_graph_state(np.pi)
        data = simulate_tomography(state, rate=1000.0, duration=1.0)
        for setting, record in zip(tomography_settings(), data.records):
            expected = np.rint(1000.0 * brute_force_probs(state, setting))
            assert np.array_equal(record.counts, expected.astype(int)), setting.label

    def test_poisson_mode_deterministic(self):
        state = weighted_graph_state(0.5)
        a = simulate_tomography(state, 150.0, 10.0, seed=3, poisson=True)
        b = simulate_tomography(state, 150.0, 10.0, seed=3, poisson=True)
        assert np.array_equal(a.counts, b.counts)

    def test_dataset_needs_sixteen_records(self):
        with pytest.raises(ValueError):
            TomographyDataset(records=tuple(
                CountRecord(counts=np.ones(4, dtype=int)) for _ in range(15)))


class TestMLE:
    def test_exact_counts_recover_max_weight_state(self):
        target = weighted_graph_state(np.pi)
        data = simulate_tomography(target, rate=150.0, duration=10.0)
        rho = mle_reconstruct(data)
        assert fidelity(rho, target) >= 0.999

    def test_uniform_counts_give_maximally_mixed(self):
        records = tuple(CountRecord(counts=np.full(4, 375)) for _ in range(16))
        rho = mle_reconstruct(TomographyDataset(records=records))
        assert trace_distance(rho, DensityMatrix(np.eye(4) / 4)) < 1e-3

    def test_intermediate_entangled_state(self):
        target = PureState2Q(
            np.array([1, 0, 0, -np.exp(1j * np.pi / 2)], dtype=complex) / np.sqrt(2))
        data = simulate_tomography(target, rate=150.0, duration=10.0)
        assert fidelity(mle_reconstruct(data), target) >= 0.999

    def test_transmitted_only_mode(self):
        target = weighted_graph_state(np.pi / 2)
        data = simulate_tomography(target, rate=1500.0, duration=10.0)
        rho = mle_reconstruct(data, outcomes="transmitted")
        assert fidelity(rho, target) >= 0.999

    def test_poisson_likelihood_flag(self):
        target = weighted_graph_state(3 * np.pi / 4)
        data = simulate_tomography(target, rate=150.0, duration=10.0)
        rho = mle_reconstruct(data, likelihood="poisson")
        assert fidelity(rho, target) >= 0.999

    def test_scale_invariance(self):
        target = weighted_graph_state(np.pi / 4)
        base = simulate_tomography(target, rate=150.0, duration=10.0)
        scaled = TomographyDataset(records=tuple(
            CountRecord(counts=r.counts * 7, duration=r.duration)
            for r in base.records))
        assert trace_distance(mle_reconstruct(base), mle_reconstruct(scaled)) < 1e-6

    def test_output_physical_for_noisy_counts(self):
        rng = np.random.default_rng(17)
        records = tuple(CountRecord(counts=rng.integers(0, 400, size=4))
                        for _ in range(16))
        rho = mle_reconstruct(TomographyDataset(records=records))
        assert isinstance(rho, DensityMatrix)

    def test_all_zero_rejected(self):
        records = tuple(CountRecord(counts=np.zeros(4, dtype=int)) for _ in range(16))
        with pytest.raises(DegenerateDataError):
            mle_reconstruct(TomographyDataset(records=records))


class TestMonteCarloReport:
    def test_default_sample_count(self):
        import inspect
        assert inspect.signature(monte_carlo_report).parameters["n"].default == 100

    def test_deterministic_given_seed(self):
        target = weighted_graph_state(np.pi)
        data = simulate_tomography(target, 150.0, 10.0, seed=5, poisson=True)
        a = monte_carlo_report(data, target, n=8, seed=11)
        b = monte_carlo_report(data, target, n=8, seed=11)
        assert a.fidelity_to_target == b.fidelity_to_target
        assert a.concurrence == b.concurrence

    def test_huge_rate_shrinks_stdev(self):
        target = weighted_graph_state(np.pi)
        data = simulate_tomography(target, rate=1e6, duration=10.0)
        report = monte_carlo_report(data, target, n=12, seed=13)
        assert isinstance(report, ReconstructionReport)
        assert report.fidelity_stdev < 1e-3
        assert report.fidelity_to_target > 0.999

    def test_needs_two_samples(self):
        target = weighted_graph_state(np.pi)
        data = simulate_tomography(target, 150.0, 10.0)
        with pytest.raises(ValueError):
            monte_carlo_report(data, target, n=1)


class TestCsvRoundTrip:
    def test_round_trip(self, tmp_path):
        data = simulate_tomography(weighted_graph_state(1.1), 150.0, 10.0,
                                   seed=19, poisson=True)
        path = tmp_path / "dataset.csv"
        write_dataset_csv(path, data)
        loaded = read_dataset_csv(path)
        assert np.array_equal(loaded.counts, data.counts)
        assert loaded.records[0].duration == data.records[0].duration

    def test_malformed_csv_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("setting_index,projector_label\n0,HxH\n")
        with pytest.raises(ValueError):
            read_dataset_csv(path)

    def test_truncated_csv_rejected(self, tmp_path):
        data = simulate_tomography(weighted_graph_state(1.1), 150.0, 10.0)
        path = tmp_path / "short.csv"
        write_dataset_csv(path, data)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:10]) + "\n")
        with pytest.raises(ValueError):
            read_dataset_csv(path)
