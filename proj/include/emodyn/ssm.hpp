#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "emodyn/error.hpp"
#include "emodyn/matrix.hpp"
#include "emodyn/parallel.hpp"
#include "emodyn/rng.hpp"

namespace emodyn::ssm {

inline constexpr double kSymmetryTolerance = 1e-9;
inline constexpr double kDiagonalSlack = 1e-12;
inline constexpr double kConditionLimit = 1e12;
inline constexpr double kNoiseFloor = 1e-9;

/// Gaussian state belief (mean, covariance) at one step.
struct GaussianBelief {
    Matrix mean;  // n x 1
    Matrix cov;   // n x n

    /// Validates shape and symmetry, then symmetrizes and clamps tiny
    /// negative diagonal entries (float drift) to zero.
    static GaussianBelief make(Matrix mean, Matrix cov) {
        if (mean.cols() != 1)
            throw DimensionError("belief mean must be a column vector, got " +
                                 Matrix::shape_string(mean.rows(), mean.cols()));
        if (cov.rows() != cov.cols() || cov.rows() != mean.rows())
            throw DimensionError("belief covariance must be " +
                                 Matrix::shape_string(mean.rows(), mean.rows()) + ", got " +
                                 Matrix::shape_string(cov.rows(), cov.cols()));
        if (!mean.all_finite() || !cov.all_finite())
            throw NumericError("belief contains non-finite entries");
        if (cov.max_asymmetry() > kSymmetryTolerance)
            throw NumericError("belief covariance asymmetric beyond tolerance: " +
                               std::to_string(cov.max_asymmetry()));
        Matrix sym = symmetrized(cov);
        for (std::size_t i = 0; i < sym.rows(); ++i) {
            if (sym(i, i) < -kDiagonalSlack)
                throw NumericError("belief covariance has negative variance " +
                                   std::to_string(sym(i, i)));
            if (sym(i, i) < 0.0) sym(i, i) = 0.0;
        }
        return GaussianBelief{std::move(mean), std::move(sym)};
    }

    std::size_t dim() const { return mean.rows(); }
};

/// Model parameters: transition A, observation C, and the two noise
/// covariances Q (transition) and R (observation).
struct SsmParams {
    Matrix A;  // n x n
    Matrix C;  // m x n
    Matrix Q;  // n x n
    Matrix R;  // m x m

    SsmParams(Matrix a, Matrix c, Matrix q, Matrix r)
        : A(std::move(a)), C(std::move(c)), Q(std::move(q)), R(std::move(r)) {
        if (A.rows() != A.cols()) throw DimensionError("A must be square");
        const std::size_t n = A.rows();
        const std::size_t m = C.rows();
        if (n == 0 || m == 0) throw DimensionError("state and observation dims must be >= 1");
        if (C.cols() != n)
            throw DimensionError("C must be m x n, got " + Matrix::shape_string(m, C.cols()));
        check_noise_cov(Q, n, "Q");
        check_noise_cov(R, m, "R");
        if (!A.all_finite() || !C.all_finite())
            throw NumericError("parameters contain non-finite entries");
    }

    static SsmParams univariate(double a, double c, double q, double r) {
        return SsmParams(Matrix::scalar(a), Matrix::scalar(c), Matrix::scalar(q),
                         Matrix::scalar(r));
    }

    std::size_t state_dim() const { return A.rows(); }
    std::size_t obs_dim() const { return C.rows(); }

private:
    static void check_noise_cov(const Matrix& cov, std::size_t dim, const char* name) {
        if (cov.rows() != dim || cov.cols() != dim)
            throw DimensionError(std::string(name) + " must be " +
                                 Matrix::shape_string(dim, dim) + ", got " +
                                 Matrix::shape_string(cov.rows(), cov.cols()));
        if (!cov.all_finite())
            throw NumericError(std::string(name) + " contains non-finite entries");
        if (cov.max_asymmetry() > kSymmetryTolerance)
            throw NumericError(std::string(name) + " asymmetric beyond tolerance");
        for (std::size_t i = 0; i < dim; ++i)
            if (cov(i, i) < 0.0)
                throw NumericError(std::string(name) + " has negative diagonal entry " +
                                   std::to_string(cov(i, i)));
    }
};

/// Per-step measurement quantities: residual, its covariance, and the gain.
struct FilterStepStats {
    Matrix residual;        // m x 1
    Matrix innovation_cov;  // m x m
    Matrix gain;            // n x m
};

/// Backward-pass gain for one step.
struct SmoothStepStats {
    Matrix gain;  // n x n
};

/// Frozen belief about the state before the first observation. The mean is
/// fixed per sequence (the first observed value in the standard setup) and
/// the covariance defaults to 2 * I.
struct InitialBelief {
    Matrix mean;  // n x 1
    Matrix cov;   // n x n

    static InitialBelief make(Matrix mean, Matrix cov) {
        GaussianBelief b = GaussianBelief::make(std::move(mean), std::move(cov));
        return InitialBelief{std::move(b.mean), std::move(b.cov)};
    }

    static InitialBelief univariate(double mean, double variance = 2.0) {
        return make(Matrix::scalar(mean), Matrix::scalar(variance));
    }

    GaussianBelief as_belief() const { return GaussianBelief{mean, cov}; }
};

namespace detail {

inline void require_obs_dim(const Matrix& y, const SsmParams& p) {
    if (y.cols() != 1 || y.rows() != p.obs_dim())
        throw DimensionError("observation must be " + Matrix::shape_string(p.obs_dim(), 1) +
                             ", got " + Matrix::shape_string(y.rows(), y.cols()));
}

/// log N(r; 0, S) given S^{-1} and log|S|.
inline double gaussian_logpdf(const Matrix& residual, const Matrix& s_inv, double log_det_s) {
    const std::size_t m = residual.rows();
    const Matrix quad = residual.transpose() * (s_inv * residual);
    return -0.5 * (static_cast<double>(m) * std::log(2.0 * std::numbers::pi) + log_det_s +
                   quad.value());
}

}  // namespace detail

/// One-step-ahead prediction: mean A*z, covariance A*Sigma*A^T + Q.
inline GaussianBelief predict_step(const GaussianBelief& prior, const SsmParams& params) {
    if (prior.dim() != params.state_dim())
        throw DimensionError("prior dim " + std::to_string(prior.dim()) +
                             " does not match state dim " + std::to_string(params.state_dim()));
    Matrix mean = params.A * prior.mean;
    Matrix cov = params.A * prior.cov * params.A.transpose() + params.Q;
    return GaussianBelief::make(std::move(mean), symmetrized(cov));
}

/// Measurement update. Throws NumericError when the innovation covariance
/// is singular (pivot-ratio condition above 1e12) or not positive definite.
inline std::pair<GaussianBelief, FilterStepStats> update_step(const GaussianBelief& predicted,
                                                              const Matrix& y,
                                                              const SsmParams& params) {
    detail::require_obs_dim(y, params);
    if (predicted.dim() != params.state_dim())
        throw DimensionError("predicted belief dim does not match state dim");

    const Matrix residual = y - params.C * predicted.mean;
    const Matrix s = symmetrized(params.C * predicted.cov * params.C.transpose() + params.R);
    const InverseResult s_inv = invert(s, kConditionLimit);
    if (s_inv.det_sign <= 0)
        throw NumericError("innovation covariance not positive definite");

    const Matrix gain = predicted.cov * params.C.transpose() * s_inv.inverse;
    Matrix mean = predicted.mean + gain * residual;
    const Matrix ikc = Matrix::identity(params.state_dim()) - gain * params.C;
    Matrix cov = symmetrized(ikc * predicted.cov);

    GaussianBelief posterior = GaussianBelief::make(std::move(mean), std::move(cov));
    return {std::move(posterior), FilterStepStats{residual, s, gain}};
}

/// Forward pass output. `filtered[t]` conditions on observations up to t;
/// `predicted[t]` is the belief just before seeing observation t. The
/// log-likelihood is the innovation decomposition sum_t log N(y_t; C z_pred,
/// S_t).
struct FilterResult {
    std::vector<GaussianBelief> filtered;
    std::vector<GaussianBelief> predicted;
    std::vector<FilterStepStats> stats;
    double loglik = 0.0;
};

inline FilterResult filter(const std::vector<Matrix>& observations, const SsmParams& params,
                           const InitialBelief& init) {
    if (observations.empty()) throw InputError("filter requires at least one observation");
    if (init.mean.rows() != params.state_dim())
        throw DimensionError("initial belief dim does not match state dim");

    FilterResult out;
    out.filtered.reserve(observations.size());
    out.predicted.reserve(observations.size());
    out.stats.reserve(observations.size());

    GaussianBelief current = init.as_belief();
    for (std::size_t t = 0; t < observations.size(); ++t) {
        try {
            GaussianBelief predicted = predict_step(current, params);
            auto [posterior, stats] = update_step(predicted, observations[t], params);

            const InverseResult s_inv = invert(stats.innovation_cov, kConditionLimit);
            out.loglik += detail::gaussian_logpdf(stats.residual, s_inv.inverse,
                                                  s_inv.log_abs_det);

            out.predicted.push_back(std::move(predicted));
            out.stats.push_back(std::move(stats));
            out.filtered.push_back(std::move(posterior));
            current = out.filtered.back();
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " (filter step " + std::to_string(t + 1) +
                               " of " + std::to_string(observations.size()) + ")");
        }
    }
    return out;
}

/// Innovation-form log-likelihood; identical to filter(...).loglik.
inline double log_likelihood(const std::vector<Matrix>& observations, const SsmParams& params,
                             const InitialBelief& init) {
    return filter(observations, params, init).loglik;
}

/// Backward (RTS) pass output. `gains[t]` maps the step-(t+1) smoothed
/// correction onto step t, so there are T-1 of them; smoothed.back() equals
/// the last filtered belief exactly.
struct SmoothResult {
    std::vector<GaussianBelief> smoothed;
    std::vector<SmoothStepStats> gains;
    FilterResult forward;
};

inline SmoothResult smooth(const std::vector<Matrix>& observations, const SsmParams& params,
                           const InitialBelief& init) {
    SmoothResult out;
    out.forward = filter(observations, params, init);
    const std::size_t steps = observations.size();

    out.smoothed.resize(steps);
    out.smoothed[steps - 1] = out.forward.filtered[steps - 1];
    out.gains.resize(steps > 0 ? steps - 1 : 0);

    for (std::size_t t = steps - 1; t-- > 0;) {
        const GaussianBelief& filt = out.forward.filtered[t];
        const GaussianBelief& pred_next = out.forward.predicted[t + 1];
        Matrix gain;
        try {
            gain = filt.cov * params.A.transpose() * invert(pred_next.cov, kConditionLimit).inverse;
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " (smoother backward step " +
                               std::to_string(t + 1) + ")");
        }
        if (!gain.all_finite()) throw NumericError("smoother gain has non-finite entries");

        Matrix mean = filt.mean + gain * (out.smoothed[t + 1].mean - pred_next.mean);
        Matrix cov = filt.cov +
                     gain * (out.smoothed[t + 1].cov - pred_next.cov) * gain.transpose();
        out.smoothed[t] = GaussianBelief::make(std::move(mean), symmetrized(cov));
        out.gains[t] = SmoothStepStats{std::move(gain)};
    }
    return out;
}

/// Which parameters the M-step updates. Initial beliefs stay frozen unless
/// explicitly requested.
struct EmUpdates {
    bool A = true;
    bool C = true;
    bool Q = true;
    bool R = true;
    bool initial = false;
};

/// One observation sequence with its frozen initial belief.
struct ObservationSequence {
    std::vector<Matrix> observations;
    InitialBelief init;
};

struct EmResult {
    SsmParams params;
    std::vector<double> loglik_trace;       // n_iter + 1 entries
    std::vector<InitialBelief> initials;    // updated only when requested
    std::vector<std::string> diagnostics;   // noise floors, degenerate stats
};

namespace detail {

/// Pooled expected sufficient statistics from one E-step.
struct EmStats {
    Matrix s00, s10, s11;  // transition pairs: prev/prev, curr/prev, curr/curr
    Matrix szz, syz, syy;  // observation terms
    double n_trans = 0.0;
    double n_obs = 0.0;
    double loglik = 0.0;
    GaussianBelief initial_smoothed;  // per-sequence; pooled stats leave it empty

    explicit EmStats(std::size_t n, std::size_t m)
        : s00(n, n), s10(n, n), s11(n, n), szz(n, n), syz(m, n), syy(m, m) {}

    void accumulate(const EmStats& o) {
        s00 = s00 + o.s00;
        s10 = s10 + o.s10;
        s11 = s11 + o.s11;
        szz = szz + o.szz;
        syz = syz + o.syz;
        syy = syy + o.syy;
        n_trans += o.n_trans;
        n_obs += o.n_obs;
        loglik += o.loglik;
    }
};

inline Matrix second_moment(const GaussianBelief& b) {
    return b.cov + b.mean * b.mean.transpose();
}

/// E-step for one sequence: smoothing extended to the initial state, plus
/// the lag-one covariance recursion seeded with (I - K_T C) A Sigma_{T-1|T-1}.
inline EmStats sequence_stats(const ObservationSequence& seq, const SsmParams& params) {
    const std::size_t n = params.state_dim();
    const std::size_t steps = seq.observations.size();
    EmStats stats(n, params.obs_dim());

    SmoothResult sm = smooth(seq.observations, params, seq.init);
    stats.loglik = sm.forward.loglik;

    // Smooth one step past the front, onto the initial state itself.
    const Matrix init_gain =
        seq.init.cov * params.A.transpose() * invert(sm.forward.predicted[0].cov).inverse;
    Matrix init_mean =
        seq.init.mean + init_gain * (sm.smoothed[0].mean - sm.forward.predicted[0].mean);
    Matrix init_cov = seq.init.cov + init_gain *
                                         (sm.smoothed[0].cov - sm.forward.predicted[0].cov) *
                                         init_gain.transpose();
    stats.initial_smoothed = GaussianBelief::make(std::move(init_mean), symmetrized(init_cov));

    // Observation statistics over every step.
    for (std::size_t t = 0; t < steps; ++t) {
        const Matrix& y = seq.observations[t];
        const Matrix& m = sm.smoothed[t].mean;
        stats.syy = stats.syy + y * y.transpose();
        stats.syz = stats.syz + y * m.transpose();
        stats.szz = stats.szz + second_moment(sm.smoothed[t]);
    }
    stats.n_obs = static_cast<double>(steps);

    // Transition statistics. Length-1 sequences contribute none.
    if (steps < 2) return stats;

    // cross[t] = Cov(z_{t}, z_{t-1} | all observations), with index -1 being
    // the initial state; built by the standard backward recursion.
    std::vector<Matrix> cross(steps);
    const FilterStepStats& last = sm.forward.stats[steps - 1];
    const Matrix ikc = Matrix::identity(n) - last.gain * params.C;
    cross[steps - 1] = ikc * params.A * sm.forward.filtered[steps - 2].cov;
    for (std::size_t t = steps - 1; t-- > 0;) {
        const Matrix& prev_gain = (t == 0) ? init_gain : sm.gains[t - 1].gain;
        const Matrix& filt_cov = sm.forward.filtered[t].cov;
        cross[t] = filt_cov * prev_gain.transpose() +
                   sm.gains[t].gain * (cross[t + 1] - params.A * filt_cov) *
                       prev_gain.transpose();
    }

    for (std::size_t t = 0; t < steps; ++t) {
        const GaussianBelief& curr = sm.smoothed[t];
        const GaussianBelief& prev = (t == 0) ? stats.initial_smoothed : sm.smoothed[t - 1];
        stats.s11 = stats.s11 + second_moment(curr);
        stats.s10 = stats.s10 + cross[t] + curr.mean * prev.mean.transpose();
        stats.s00 = stats.s00 + second_moment(prev);
    }
    stats.n_trans = static_cast<double>(steps);
    return stats;
}

/// Clamps covariance diagonals at the noise floor; reports when it fires.
inline Matrix floor_noise(Matrix cov, const char* name, std::vector<std::string>& diagnostics) {
    bool floored = false;
    for (std::size_t i = 0; i < cov.rows(); ++i) {
        if (cov(i, i) < kNoiseFloor) {
            cov(i, i) = kNoiseFloor;
            floored = true;
        }
    }
    if (floored)
        diagnostics.push_back(std::string(name) +
                              " floored at 1e-9: degenerate statistics (near-constant data)");
    return cov;
}

}  // namespace detail

/// EM parameter estimation pooled over sequences. The trace holds the
/// log-likelihood before each M-step plus one final evaluation, n_iter + 1
/// entries in total, and is non-decreasing up to float slack.
inline EmResult em_fit(const std::vector<ObservationSequence>& sequences,
                       const SsmParams& init_params, int n_iter, EmUpdates which = {}) {
    if (sequences.empty()) throw InputError("em_fit requires at least one sequence");
    if (n_iter < 0) throw InputError("n_iter must be >= 0");
    for (const auto& seq : sequences) {
        if (seq.observations.empty()) throw InputError("em_fit sequences must be non-empty");
        if (seq.init.mean.rows() != init_params.state_dim())
            throw DimensionError("sequence initial belief does not match state dim");
    }

    const std::size_t n = init_params.state_dim();
    const std::size_t m = init_params.obs_dim();

    EmResult result{init_params, {}, {}, {}};
    result.initials.reserve(sequences.size());
    for (const auto& seq : sequences) result.initials.push_back(seq.init);

    auto e_step = [&](const SsmParams& params) {
        std::vector<detail::EmStats> per_seq(sequences.size(), detail::EmStats(n, m));
        parallel_for(sequences.size(), [&](std::size_t i) {
            ObservationSequence seq{sequences[i].observations, result.initials[i]};
            per_seq[i] = detail::sequence_stats(seq, params);
        });
        detail::EmStats pooled(n, m);
        for (const auto& s : per_seq) pooled.accumulate(s);  // fixed order
        if (which.initial) {
            for (std::size_t i = 0; i < sequences.size(); ++i)
                result.initials[i] = InitialBelief{per_seq[i].initial_smoothed.mean,
                                                   per_seq[i].initial_smoothed.cov};
        }
        return pooled;
    };

    for (int iter = 0; iter < n_iter; ++iter) {
        const detail::EmStats stats = e_step(result.params);
        result.loglik_trace.push_back(stats.loglik);

        Matrix a = result.params.A;
        Matrix c = result.params.C;
        if ((which.A || which.Q) && stats.n_trans < 1.0)
            throw InputError("transition updates need at least one sequence of length >= 2");

        if (which.A) a = stats.s10 * invert(stats.s00, kConditionLimit).inverse;
        if (which.C) c = stats.syz * invert(stats.szz, kConditionLimit).inverse;

        Matrix q = result.params.Q;
        if (which.Q) {
            Matrix raw = stats.s11 - a * stats.s10.transpose() - stats.s10 * a.transpose() +
                         a * stats.s00 * a.transpose();
            q = detail::floor_noise(symmetrized(raw * (1.0 / stats.n_trans)), "Q",
                                    result.diagnostics);
        }
        Matrix r = result.params.R;
        if (which.R) {
            Matrix raw = stats.syy - c * stats.syz.transpose() - stats.syz * c.transpose() +
                         c * stats.szz * c.transpose();
            r = detail::floor_noise(symmetrized(raw * (1.0 / stats.n_obs)), "R",
                                    result.diagnostics);
        }
        result.params = SsmParams(std::move(a), std::move(c), std::move(q), std::move(r));
    }

    // Final evaluation under the fitted parameters.
    std::vector<double> final_logliks(sequences.size());
    parallel_for(sequences.size(), [&](std::size_t i) {
        final_logliks[i] =
            filter(sequences[i].observations, result.params, result.initials[i]).loglik;
    });
    double total = 0.0;
    for (double v : final_logliks) total += v;
    result.loglik_trace.push_back(total);
    return result;
}

struct SimulationResult {
    std::vector<Matrix> latent;    // z_1..z_T
    std::vector<Matrix> observed;  // y_1..y_T
};

/// Draws one trajectory: the first latent state comes from the initial
/// belief, then the transition/observation recursions with Gaussian noise.
/// Deterministic for a fixed seed.
inline SimulationResult simulate(const SsmParams& params, const InitialBelief& init,
                                 std::size_t steps, std::uint64_t seed) {
    if (steps < 1) throw InputError("simulate requires at least one step");
    if (init.mean.rows() != params.state_dim())
        throw DimensionError("initial belief dim does not match state dim");

    const std::size_t n = params.state_dim();
    const std::size_t m = params.obs_dim();
    const Matrix l_init = cholesky_psd(init.cov);
    const Matrix l_q = cholesky_psd(params.Q);
    const Matrix l_r = cholesky_psd(params.R);

    Rng rng(seed);
    auto draw = [&rng](std::size_t dim) {
        Matrix v(dim, 1);
        for (std::size_t i = 0; i < dim; ++i) v(i, 0) = rng.normal();
        return v;
    };

    SimulationResult out;
    out.latent.reserve(steps);
    out.observed.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        Matrix z = (t == 0) ? init.mean + l_init * draw(n)
                            : params.A * out.latent.back() + l_q * draw(n);
        Matrix y = params.C * z + l_r * draw(m);
        out.latent.push_back(std::move(z));
        out.observed.push_back(std::move(y));
    }
    return out;
}

/// Wraps scalars as 1x1 observation matrices for the univariate models.
inline std::vector<Matrix> to_observations(const std::vector<double>& values) {
    std::vector<Matrix> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(Matrix::scalar(v));
    return out;
}

}  // namespace emodyn::ssm
