#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "emodyn/error.hpp"
#include "emodyn/evalstats.hpp"
#include "emodyn/lexicons.hpp"
#include "emodyn/matrix.hpp"
#include "emodyn/rng.hpp"

namespace emodyn::verse {

/// Mean-pool and max-pool of the verse's word rows, concatenated. Tokens
/// outside the vocabulary are skipped; an empty or all-miss verse pools to
/// the zero vector.
inline std::vector<double> verse_features(const std::vector<std::string>& tokens,
                                          const lex::WordFeatureMatrix& matrix) {
    const std::size_t cols = matrix.cols;
    std::vector<double> mean(cols, 0.0), peak(cols, 0.0);
    std::size_t hits = 0;
    for (const auto& token : tokens) {
        const auto row = matrix.row_of(token);
        if (!row) continue;
        if (hits == 0) {
            std::copy(row->begin(), row->end(), peak.begin());
        } else {
            for (std::size_t i = 0; i < cols; ++i) peak[i] = std::max(peak[i], (*row)[i]);
        }
        for (std::size_t i = 0; i < cols; ++i) mean[i] += (*row)[i];
        ++hits;
    }
    std::vector<double> out(2 * cols, 0.0);
    if (hits == 0) return out;
    for (std::size_t i = 0; i < cols; ++i) {
        out[i] = mean[i] / static_cast<double>(hits);
        out[cols + i] = peak[i];
    }
    return out;
}

/// Closed-form linear head for one emotion.
struct RidgeModel {
    std::string emotion;
    std::vector<double> weights;
    double intercept = 0.0;
    double lambda = 0.0;
    std::size_t feature_dim = 0;
    double label_scale = 1.0;  // factor already applied to the training labels
    std::optional<double> cv_score;  // mean CV Pearson r of the winning lambda
};

inline std::vector<double> default_lambda_grid() {
    return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
}

/// Per-lambda cross-validation outcome; lambdas that fail to solve are
/// reported and skipped.
struct CvEntry {
    double lambda = 0.0;
    std::optional<double> mean_r;
    std::string note;
};

namespace detail {

struct FitOutput {
    std::vector<double> weights;
    double intercept = 0.0;
};

/// Ridge with an unpenalized intercept via centering. Uses the normal
/// equations when rows >= dim, otherwise the kernel (dual) identity
/// w = Xc^T (Xc Xc^T + lambda I)^{-1} yc, which is exact for lambda > 0.
inline FitOutput fit_ridge(const std::vector<std::vector<double>>& features,
                           const std::vector<double>& labels,
                           std::span<const std::size_t> rows, double lambda) {
    const std::size_t n = rows.size();
    const std::size_t dim = features.front().size();
    if (n == 0) throw InputError("ridge fit with no rows");

    std::vector<double> col_mean(dim, 0.0);
    double y_mean = 0.0;
    for (const std::size_t r : rows) {
        const auto& x = features[r];
        for (std::size_t j = 0; j < dim; ++j) col_mean[j] += x[j];
        y_mean += labels[r];
    }
    for (double& v : col_mean) v /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);

    FitOutput out;
    out.weights.assign(dim, 0.0);

    if (n >= dim) {
        Matrix gram(dim, dim);
        Matrix xty(dim, 1);
        for (const std::size_t r : rows) {
            const auto& x = features[r];
            const double yc = labels[r] - y_mean;
            for (std::size_t i = 0; i < dim; ++i) {
                const double xi = x[i] - col_mean[i];
                xty(i, 0) += xi * yc;
                for (std::size_t j = i; j < dim; ++j)
                    gram(i, j) += xi * (x[j] - col_mean[j]);
            }
        }
        for (std::size_t i = 0; i < dim; ++i) {
            gram(i, i) += lambda;
            for (std::size_t j = i + 1; j < dim; ++j) gram(j, i) = gram(i, j);
        }
        const Matrix w = solve_spd(gram, xty);
        for (std::size_t i = 0; i < dim; ++i) out.weights[i] = w(i, 0);
    } else {
        Matrix kernel(n, n);
        Matrix yc(n, 1);
        std::vector<std::vector<double>> centered(n, std::vector<double>(dim));
        for (std::size_t a = 0; a < n; ++a) {
            const auto& x = features[rows[a]];
            for (std::size_t j = 0; j < dim; ++j) centered[a][j] = x[j] - col_mean[j];
            yc(a, 0) = labels[rows[a]] - y_mean;
        }
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a; b < n; ++b) {
                double dot = 0.0;
                for (std::size_t j = 0; j < dim; ++j) dot += centered[a][j] * centered[b][j];
                kernel(a, b) = dot;
                kernel(b, a) = dot;
            }
            kernel(a, a) += lambda;
        }
        const Matrix alpha = solve_spd(kernel, yc);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t j = 0; j < dim; ++j)
                out.weights[j] += alpha(a, 0) * centered[a][j];
    }

    out.intercept = y_mean;
    for (std::size_t j = 0; j < dim; ++j) out.intercept -= out.weights[j] * col_mean[j];
    return out;
}

inline double dot_weights(const RidgeModel& model, std::span<const double> features) {
    if (features.size() != model.feature_dim)
        throw DimensionError("feature dim " + std::to_string(features.size()) +
                             " does not match model dim " + std::to_string(model.feature_dim));
    double v = model.intercept;
    for (std::size_t i = 0; i < features.size(); ++i) v += model.weights[i] * features[i];
    return v;
}

}  // namespace detail

/// Selects lambda by mean cross-validated Pearson r (folds shuffled by
/// seed), then refits on all rows. Lambdas whose systems fail to solve are
/// reported and skipped; if no lambda produces a defined correlation (for
/// example constant labels) the first solvable one is used.
inline RidgeModel train_ridge(const std::vector<std::vector<double>>& features,
                              const std::vector<double>& labels,
                              const std::vector<double>& lambda_grid, std::size_t k_folds,
                              std::uint64_t seed, std::vector<CvEntry>* report = nullptr) {
    if (features.empty()) throw InputError("train_ridge requires data");
    if (features.size() != labels.size())
        throw DimensionError("train_ridge: " + std::to_string(features.size()) +
                             " rows vs " + std::to_string(labels.size()) + " labels");
    if (k_folds < 2) throw InputError("train_ridge requires k_folds >= 2");
    if (features.size() < k_folds)
        throw InputError("train_ridge requires at least k_folds rows");
    if (lambda_grid.empty()) throw InputError("train_ridge: empty lambda grid");
    const std::size_t dim = features.front().size();
    for (const auto& row : features)
        if (row.size() != dim) throw DimensionError("train_ridge: ragged feature rows");

    std::vector<std::size_t> order(features.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::pair<std::size_t, std::size_t>> fold_bounds;
    const std::size_t base = order.size() / k_folds;
    const std::size_t extra = order.size() % k_folds;
    for (std::size_t f = 0, cursor = 0; f < k_folds; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        fold_bounds.emplace_back(cursor, cursor + size);
        cursor += size;
    }

    std::vector<CvEntry> entries;
    for (const double lambda : lambda_grid) {
        CvEntry entry;
        entry.lambda = lambda;
        double r_sum = 0.0;
        std::size_t r_count = 0;
        try {
            for (const auto& [begin, end] : fold_bounds) {
                std::vector<std::size_t> train_rows;
                train_rows.reserve(order.size() - (end - begin));
                for (std::size_t i = 0; i < order.size(); ++i)
                    if (i < begin || i >= end) train_rows.push_back(order[i]);
                const detail::FitOutput fit =
                    detail::fit_ridge(features, labels, train_rows, lambda);

                std::vector<double> preds, truth;
                preds.reserve(end - begin);
                for (std::size_t i = begin; i < end; ++i) {
                    const auto& x = features[order[i]];
                    double v = fit.intercept;
                    for (std::size_t j = 0; j < dim; ++j) v += fit.weights[j] * x[j];
                    preds.push_back(v);
                    truth.push_back(labels[order[i]]);
                }
                try {
                    r_sum += stats::pearson(preds, truth);
                    ++r_count;
                } catch (const UndefinedCorrelation&) {
                    // fold with zero variance contributes nothing
                }
            }
            if (r_count > 0) entry.mean_r = r_sum / static_cast<double>(r_count);
        } catch (const NumericError& e) {
            entry.note = e.what();
        }
        entries.push_back(std::move(entry));
    }

    const CvEntry* best = nullptr;
    for (const auto& entry : entries) {
        if (!entry.note.empty()) continue;
        if (!best) {
            best = &entry;
            continue;
        }
        if (entry.mean_r && (!best->mean_r || *entry.mean_r > *best->mean_r)) best = &entry;
    }
    if (report) *report = entries;
    if (!best) throw NumericError("train_ridge: every lambda in the grid failed to solve");

    std::vector<std::size_t> all_rows(features.size());
    for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
    const detail::FitOutput fit = detail::fit_ridge(features, labels, all_rows, best->lambda);

    RidgeModel model;
    model.weights = fit.weights;
    model.intercept = fit.intercept;
    model.lambda = best->lambda;
    model.feature_dim = dim;
    model.cv_score = best->mean_r;
    return model;
}

/// Affine prediction w . x + b; optionally clamped to [0, 1].
inline double predict(const RidgeModel& model, std::span<const double> features,
                      bool clamp_unit = false) {
    const double v = detail::dot_weights(model, features);
    if (!clamp_unit) return v;
    return std::clamp(v, 0.0, 1.0);
}

inline std::vector<double> predict_all(const RidgeModel& model,
                                       const std::vector<std::vector<double>>& features,
                                       bool clamp_unit = false) {
    std::vector<double> out;
    out.reserve(features.size());
    for (const auto& row : features) out.push_back(predict(model, row, clamp_unit));
    return out;
}

/// One TSV block per model:
///   #model <tab> emotion=.. lambda=.. dim=.. label_scale=.. intercept=.. cv_r=..
///   w0 <tab> w1 <tab> ...
inline std::string models_to_tsv(std::span<const RidgeModel> models) {
    std::string out = "#emodyn-ridge-models\tv1\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& m : models) {
        out += "#model\temotion=" + m.emotion + "\tlambda=" + fmt(m.lambda) +
               "\tdim=" + std::to_string(m.feature_dim) +
               "\tlabel_scale=" + fmt(m.label_scale) + "\tintercept=" + fmt(m.intercept) +
               "\tcv_r=" + (m.cv_score ? fmt(*m.cv_score) : "NA") + "\n";
        for (std::size_t i = 0; i < m.weights.size(); ++i) {
            if (i) out += '\t';
            out += fmt(m.weights[i]);
        }
        out += '\n';
    }
    return out;
}

inline std::vector<RidgeModel> models_from_tsv_stream(std::istream& in,
                                                      const std::string& origin) {
    std::string line;
    if (!std::getline(in, line) || line != "#emodyn-ridge-models\tv1")
        throw InputError(origin + ": not a v1 ridge-model file");

    std::vector<RidgeModel> models;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string context = origin + ":" + std::to_string(line_no);
        if (line.rfind("#model\t", 0) != 0)
            throw InputError(context + ": expected a #model header");

        RidgeModel model;
        for (const auto& field : lex::detail::split_tabs(line)) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = field.substr(0, eq);
            const std::string value = field.substr(eq + 1);
            if (key == "emotion") model.emotion = value;
            else if (key == "lambda") model.lambda = std::stod(value);
            else if (key == "dim") model.feature_dim = std::stoul(value);
            else if (key == "label_scale") model.label_scale = std::stod(value);
            else if (key == "intercept") model.intercept = std::stod(value);
            else if (key == "cv_r" && value != "NA") model.cv_score = std::stod(value);
        }
        if (model.emotion.empty()) throw InputError(context + ": model without emotion");

        if (!std::getline(in, line)) throw InputError(context + ": missing weights row");
        ++line_no;
        for (const auto& field : lex::detail::split_tabs(line))
            model.weights.push_back(
                lex::detail::parse_number(field, origin + ":" + std::to_string(line_no)));
        if (model.weights.size() != model.feature_dim)
            throw InputError(context + ": expected " + std::to_string(model.feature_dim) +
                             " weights, got " + std::to_string(model.weights.size()));
        models.push_back(std::move(model));
    }
    return models;
}

}  // namespace emodyn::verse
