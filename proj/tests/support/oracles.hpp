#pragma once

// Brute-force references for the state-space tests. Everything here computes
// posteriors by directly forming the joint Gaussian over latent states and
// observations and conditioning on the observed block. Deliberately naive and
// self-contained: no code shared with the recursions under test beyond the
// Matrix container.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracles {

// Solves A x = b by plain Gaussian elimination with partial pivoting.
// Dimensions stay tiny (<= 8), so nothing clever is needed.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0) throw std::runtime_error("oracle: singular system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

struct UnivariateProblem {
    double a, c, q, r;
    double init_mean, init_var;
    std::vector<double> ys;
};

struct GaussianMoments {
    double mean, var;
};

// Joint second moments of (z_0..z_T, y_1..y_T) for the univariate model
// z_t = a z_{t-1} + eps, y_t = c z_t + delta, z_0 ~ N(init_mean, init_var).
class JointGaussian {
public:
    explicit JointGaussian(const UnivariateProblem& p) : p_(p), steps_(p.ys.size()) {
        const std::size_t states = steps_ + 1;
        z_mean_.assign(states, 0.0);
        z_cov_.assign(states, std::vector<double>(states, 0.0));
        z_mean_[0] = p.init_mean;
        z_cov_[0][0] = p.init_var;
        for (std::size_t t = 1; t < states; ++t) {
            z_mean_[t] = p.a * z_mean_[t - 1];
            for (std::size_t s = 0; s < t; ++s) {
                z_cov_[t][s] = p.a * z_cov_[t - 1][s];
                z_cov_[s][t] = z_cov_[t][s];
            }
            z_cov_[t][t] = p.a * p.a * z_cov_[t - 1][t - 1] + p.q;
        }
    }

    // P(z_t | y_1..y_k), 1-indexed state and observation counts.
    GaussianMoments condition(std::size_t t, std::size_t k) const {
        std::vector<std::vector<double>> yy(k, std::vector<double>(k, 0.0));
        std::vector<double> zy(k), gap(k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                yy[i][j] = p_.c * p_.c * z_cov_[i + 1][j + 1];
                if (i == j) yy[i][j] += p_.r;
            }
            zy[i] = p_.c * z_cov_[t][i + 1];
            gap[i] = p_.ys[i] - p_.c * z_mean_[i + 1];
        }
        const std::vector<double> w = solve_dense(yy, zy);    // Sigma_yy^{-1} Sigma_yz
        const std::vector<double> g = solve_dense(yy, gap);   // Sigma_yy^{-1} (y - mu_y)
        double mean = z_mean_[t];
        double var = z_cov_[t][t];
        for (std::size_t i = 0; i < k; ++i) {
            mean += zy[i] * g[i];
            var -= zy[i] * w[i];
        }
        return {mean, var};
    }

    GaussianMoments filtered(std::size_t t) const { return condition(t, t); }
    GaussianMoments smoothed(std::size_t t) const { return condition(t, steps_); }

    // Cov(z_t, z_s | y_1..y_T); state index 0 is the initial state.
    double smoothed_cross(std::size_t t, std::size_t s) const {
        const std::size_t k = steps_;
        std::vector<std::vector<double>> yy(k, std::vector<double>(k, 0.0));
        std::vector<double> sy(k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                yy[i][j] = p_.c * p_.c * z_cov_[i + 1][j + 1];
                if (i == j) yy[i][j] += p_.r;
            }
            sy[i] = p_.c * z_cov_[s][i + 1];
        }
        const std::vector<double> w = solve_dense(yy, sy);  // Sigma_yy^{-1} Sigma_y,zs
        double cov = z_cov_[t][s];
        for (std::size_t i = 0; i < k; ++i) cov -= p_.c * z_cov_[t][i + 1] * w[i];
        return cov;
    }

private:
    UnivariateProblem p_;
    std::size_t steps_;
    std::vector<double> z_mean_;
    std::vector<std::vector<double>> z_cov_;
};

// Counts monomials of total degree <= degree over `width` variables by naive
// enumeration; reference for the expansion-size identity C(d+p, p).
inline std::size_t count_monomials(std::size_t width, std::size_t degree) {
    if (width == 0) return 1;
    std::size_t count = 0;
    // exponent vectors enumerated by odometer
    std::vector<std::size_t> expo(width, 0);
    while (true) {
        std::size_t total = 0;
        for (std::size_t e : expo) total += e;
        if (total <= degree) ++count;
        std::size_t i = 0;
        while (i < width) {
            if (++expo[i] <= degree) break;
            expo[i] = 0;
            ++i;
        }
        if (i == width) break;
    }
    return count;
}

}  // namespace oracles
