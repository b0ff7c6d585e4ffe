import math

import numpy as np
import pytest

from fullbatch_lb.instance import canonical_params
from fullbatch_lb.oracle import OracleAnswer, full_batch_oracle, sample_oracle
from fullbatch_lb.optim import (
    AxisProbeGD,
    FullBatchAlgorithm,
    HeavyBall,
    NoisyGD,
    ProjectedGD,
    RegularizedGD,
    make_algorithm,
    project_unit_ball,
    run_full_batch,
    sgd,
)
from fullbatch_lb.properties import draw_conditioned_sample
from fullbatch_lb.rng import stream
from fullbatch_lb.sampling import draw_sample
from fullbatch_lb.spanlab import build_basis, span_residual


def oracle_for(sample):
    return lambda w: full_batch_oracle(w, sample)


class TestProjectedGD:
    def test_first_step_from_origin(self):
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(1, "gd"))
        eta = 0.3
        trajectory = run_full_batch(
            ProjectedGD(params.dim, eta), oracle_for(sample), 2, stream(1, "run")
        )
        g0 = full_batch_oracle(np.zeros(params.dim), sample).grad
        expected = project_unit_ball(-eta * g0)
        assert np.array_equal(trajectory.queries[0], np.zeros(params.dim))
        assert np.array_equal(trajectory.queries[1], expected)

    def test_zero_step_size_stays_at_origin(self):
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(2, "gd0"))
        trajectory = run_full_batch(
            ProjectedGD(params.dim, 0.0), oracle_for(sample), 4, stream(2, "run")
        )
        for w in trajectory.queries:
            assert np.array_equal(w, np.zeros(params.dim))

    def test_iterates_stay_in_gradient_span(self):
        params = canonical_params(0.2, 6, 96, 2)
        sample = draw_conditioned_sample(
            params, stream(3, "cond"), min_survivors=params.T + 1
        )
        trajectory = run_full_batch(
            ProjectedGD(params.dim, 1 / math.sqrt(params.T)),
            oracle_for(sample),
            params.T,
            stream(3, "run"),
        )
        basis = build_basis(sample, params.T + 1)
        for w in trajectory.queries:
            assert span_residual(w, basis) <= 1e-9
        assert span_residual(trajectory.output, basis) <= 1e-9

    def test_last_iterate_output(self):
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(4, "last"))
        algorithm = ProjectedGD(params.dim, 0.2, averaging="last")
        trajectory = run_full_batch(algorithm, oracle_for(sample), 3, stream(4, "run"))
        assert np.array_equal(trajectory.output, trajectory.queries[-1])

    def test_uniform_average_output(self):
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(5, "avg"))
        trajectory = run_full_batch(
            ProjectedGD(params.dim, 0.2), oracle_for(sample), 3, stream(5, "run")
        )
        assert np.allclose(
            trajectory.output, np.mean(trajectory.queries, axis=0), atol=1e-15
        )


class TestRegularizedGD:
    def test_lambda_zero_follows_quoted_structure(self):
        # with lambda = 0 the quoted rule keeps no w_t term: w_{t+1} = Pi[-eta g_t]
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(6, "reg"))
        eta = 0.25
        trajectory = run_full_batch(
            RegularizedGD(params.dim, lam=0.0, eta=eta), oracle_for(sample), 3,
            stream(6, "run"),
        )
        for t in range(1, 3):
            expected = project_unit_ball(-eta * trajectory.answers[t - 1].grad)
            assert np.array_equal(trajectory.queries[t], expected)

    def test_update_map_is_a_contraction(self):
        # for (1 - eta) * 2 lambda < 1 the update contracts distances exactly
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(7, "contract"))
        lam, eta = 0.4, 0.1
        algorithm = RegularizedGD(params.dim, lam=lam, eta=eta)
        rng = stream(7, "pair")
        w_a = 0.05 * rng.standard_normal(params.dim)
        w_b = 0.05 * rng.standard_normal(params.dim)
        answer = full_batch_oracle(np.zeros(params.dim), sample)
        next_a = algorithm.next_query([(w_a, answer)], rng)
        next_b = algorithm.next_query([(w_b, answer)], rng)
        factor = (1 - eta) * 2 * lam
        assert factor < 1
        assert np.linalg.norm(next_a - next_b) == pytest.approx(
            factor * np.linalg.norm(w_a - w_b), rel=1e-12
        )

    def test_strong_regularization_pulls_iterates_toward_zero(self):
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(7, "contract"))
        eta = lambda t: 0.1 / math.sqrt(t)
        trajectory = run_full_batch(
            RegularizedGD(params.dim, lam=0.4, eta=eta), oracle_for(sample), 10,
            stream(7, "run"),
        )
        norms = [float(np.linalg.norm(w)) for w in trajectory.queries]
        assert max(norms[4:]) < norms[1]
        assert np.mean(norms[-3:]) < 0.8 * np.mean(norms[1:4])

    def test_rejects_negative_lambda(self):
        with pytest.raises(ValueError):
            RegularizedGD(4, lam=-1.0, eta=0.1)


class TestNoisyAndMomentum:
    def test_zero_noise_matches_projected_gd(self):
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(8, "noise"))
        plain = run_full_batch(
            ProjectedGD(params.dim, 0.2), oracle_for(sample), 5, stream(8, "shared")
        )
        noisy = run_full_batch(
            NoisyGD(params.dim, 0.2, noise_std=0.0), oracle_for(sample), 5,
            stream(8, "shared"),
        )
        for a, b in zip(plain.queries, noisy.queries):
            assert np.array_equal(a, b)

    def test_zero_momentum_matches_projected_gd(self):
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(9, "mom"))
        plain = run_full_batch(
            ProjectedGD(params.dim, 0.2), oracle_for(sample), 5, stream(9, "shared")
        )
        ball = run_full_batch(
            HeavyBall(params.dim, 0.2, momentum=0.0), oracle_for(sample), 5,
            stream(9, "shared"),
        )
        for a, b in zip(plain.queries, ball.queries):
            assert np.array_equal(a, b)

    def test_noisy_gd_is_seed_deterministic(self):
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(10, "det"))
        runs = [
            run_full_batch(
                NoisyGD(params.dim, 0.2, noise_std=0.05), oracle_for(sample), 5,
                stream(10, "alg"),
            )
            for _ in range(2)
        ]
        for a, b in zip(runs[0].queries, runs[1].queries):
            assert np.array_equal(a, b)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            NoisyGD(4, 0.1, noise_std=-0.1)
        with pytest.raises(ValueError):
            HeavyBall(4, 0.1, momentum=1.0)


class TestRunner:
    def test_constant_query_gets_identical_answers(self):
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(11, "const"))

        class Origin(FullBatchAlgorithm):
            dim = params.dim

            def next_query(self, history, rng):
                return np.zeros(params.dim)

        trajectory = run_full_batch(Origin(), oracle_for(sample), 4, stream(11, "run"))
        assert trajectory.oracle_calls == 4
        first = trajectory.answers[0]
        for answer in trajectory.answers[1:]:
            assert np.array_equal(answer.grad, first.grad)
            assert answer.value == first.value

    def test_out_of_ball_query_projected_and_counted(self):
        params = canonical_params(0.2, 4, 24, 2)
        sample = draw_sample(params, stream(12, "ball"))

        class Escaper(FullBatchAlgorithm):
            dim = params.dim

            def next_query(self, history, rng):
                w = np.zeros(params.dim)
                w[0] = 2.0
                return w

        trajectory = run_full_batch(Escaper(), oracle_for(sample), 3, stream(12, "run"))
        assert trajectory.domain_warnings == 3
        for w in trajectory.queries:
            assert np.linalg.norm(w) <= 1.0 + 1e-12

    def test_replay_invariance(self):
        # resampling S while replaying the recorded answers leaves the
        # trajectory unchanged: queries depend on answers only
        params = canonical_params(0.2, 5, 48, 2)
        sample = draw_sample(params, stream(13, "replay"))
        recorded = run_full_batch(
            ProjectedGD(params.dim, 0.3), oracle_for(sample), 5, stream(13, "alg")
        )
        answers = iter(recorded.answers)
        replayed = run_full_batch(
            ProjectedGD(params.dim, 0.3),
            lambda w: next(answers),
            5,
            stream(13, "alg"),
        )
        for a, b in zip(recorded.queries, replayed.queries):
            assert np.array_equal(a, b)

    def test_requires_positive_budget(self):
        with pytest.raises(ValueError):
            run_full_batch(ProjectedGD(4, 0.1), lambda w: None, 0, stream(14, "t"))


class TestSGD:
    def test_single_sample_first_step_matches_gd(self):
        params = canonical_params(0.2, 4, 16, 1)
        sample = draw_sample(params, stream(15, "sgd1"))
        eta = 0.4
        strajectory = sgd(sample, eta)
        gd = run_full_batch(
            ProjectedGD(params.dim, eta), oracle_for(sample), 1, stream(15, "gd")
        )
        g0 = sample_oracle(np.zeros(params.dim), sample.alphas[0], params).grad
        expected = project_unit_ball(-eta * g0)
        assert np.array_equal(strajectory.output, expected)
        assert np.array_equal(
            gd.answers[0].grad, strajectory.answers[0].grad
        )  # n = 1: the batch gradient is the sample gradient

    def test_zero_step_size(self):
        params = canonical_params(0.2, 4, 16, 3)
        sample = draw_sample(params, stream(16, "sgd0"))
        assert np.array_equal(sgd(sample, 0.0).output, np.zeros(params.dim))

    def test_one_pass_budget(self):
        params = canonical_params(0.2, 4, 16, 4)
        sample = draw_sample(params, stream(17, "pass"))
        trajectory = sgd(sample, 0.2, stream(17, "order"))
        assert trajectory.oracle_calls == params.n
        assert len(trajectory.queries) == params.n

    def test_shuffle_determinism(self):
        params = canonical_params(0.2, 4, 16, 4)
        sample = draw_sample(params, stream(18, "shuf"))
        a = sgd(sample, 0.2, stream(18, "order"))
        b = sgd(sample, 0.2, stream(18, "order"))
        assert np.array_equal(a.output, b.output)


class TestMakeAlgorithm:
    @pytest.mark.parametrize("name", [
        "projected_gd", "regularized_gd", "noisy_gd", "heavy_ball", "axis_probe_gd",
    ])
    def test_known_names(self, name):
        algorithm = make_algorithm(name, 8, {"eta": 0.1})
        assert isinstance(algorithm, FullBatchAlgorithm)

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            make_algorithm("adam", 8, {})

    def test_probe_stays_in_ball(self):
        algorithm = AxisProbeGD(6, 0.2, probe_scale=0.5)
        rng = stream(19, "probe")
        history = []
        w = algorithm.next_query(history, rng)
        assert np.linalg.norm(w) <= 1.0 + 1e-12
        history.append((w, OracleAnswer(grad=np.ones(6), value=0.0)))
        w2 = algorithm.next_query(history, rng)
        assert np.linalg.norm(w2) <= 1.0 + 1e-12
