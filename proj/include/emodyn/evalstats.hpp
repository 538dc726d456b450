#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emodyn/emotions.hpp"
#include "emodyn/error.hpp"
#include "emodyn/rng.hpp"

namespace emodyn::stats {

/// Sample Pearson correlation. Throws UndefinedCorrelation instead of ever
/// returning NaN when either vector has zero variance.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DimensionError("pearson length mismatch: " + std::to_string(x.size()) + " vs " +
                             std::to_string(y.size()));
    if (x.size() < 2) throw InputError("pearson requires at least two points");

    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw UndefinedCorrelation("pearson undefined: zero variance in " +
                                   std::string(sxx == 0.0 ? "first" : "second") + " vector");
    return sxy / std::sqrt(sxx * syy);
}

namespace detail {

/// Continued-fraction part of the regularized incomplete beta (Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete beta did not converge");
}

/// Regularized incomplete beta I_x(a, b), |error| < 1e-8 over the needed range.
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw InputError("incomplete beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log(1.0 - x);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_cf(a, b, x) / a;
    return 1.0 - std::exp(log_front + std::log(beta_cf(b, a, 1.0 - x)) - std::log(b));
}

}  // namespace detail

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw InputError("degrees of freedom must be positive");
    if (t == 0.0) return 1.0;
    const double x = df / (df + t * t);
    return detail::regularized_incomplete_beta(0.5 * df, 0.5, x);
}

struct WilliamsResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// Williams significance test for the difference between two dependent
/// correlations r13 and r23 that share variable 3 (the gold labels), with
/// r12 the correlation between the two predictors.
inline WilliamsResult williams_test(double r13, double r23, double r12, std::size_t n) {
    for (double r : {r13, r23, r12})
        if (!(std::abs(r) < 1.0))
            throw InputError("williams_test requires correlations strictly inside (-1, 1)");
    if (n < 4) throw InputError("williams_test requires n >= 4");

    const double nn = static_cast<double>(n);
    const double det = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
    if (det <= 0.0)
        throw NumericError("inconsistent correlation triple: correlation matrix not PD");

    const double df = nn - 3.0;
    if (r13 == r23) return WilliamsResult{0.0, df, 1.0};

    const double r_bar = 0.5 * (r13 + r23);
    const double denom = 2.0 * det * (nn - 1.0) / (nn - 3.0) +
                         r_bar * r_bar * std::pow(1.0 - r12, 3.0);
    const double t = (r13 - r23) * std::sqrt((nn - 1.0) * (1.0 + r12) / denom);
    return WilliamsResult{t, df, student_t_two_sided_p(t, df)};
}

/// Disjoint, exhaustive song folds: shuffled by seed, sizes differing by at
/// most one.
inline std::vector<std::vector<std::string>> kfold_songs(std::vector<std::string> song_ids,
                                                         std::size_t k, std::uint64_t seed) {
    if (k < 2) throw InputError("k-fold split requires k >= 2");
    if (k > song_ids.size())
        throw InputError("cannot split " + std::to_string(song_ids.size()) + " songs into " +
                         std::to_string(k) + " folds");
    Rng rng(seed);
    rng.shuffle(song_ids);

    std::vector<std::vector<std::string>> folds(k);
    const std::size_t base = song_ids.size() / k;
    const std::size_t extra = song_ids.size() % k;
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        folds[f].assign(song_ids.begin() + cursor, song_ids.begin() + cursor + size);
        cursor += size;
    }
    return folds;
}

/// Half-open range of verse rows belonging to one song.
struct SongSpan {
    std::string song_id;
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct SongEval {
    std::string song_id;
    std::array<std::optional<double>, kEmotionCount> r;
    std::size_t verse_count = 0;
};

/// Pooled per-emotion correlations over all verses; per-song rows optional.
/// Zero-variance columns are reported as undefined, never NaN.
struct EvalReport {
    std::array<std::optional<double>, kEmotionCount> pooled_r;
    std::size_t verse_count = 0;
    std::vector<SongEval> per_song;

    std::string to_csv() const {
        std::string out = "scope,emotion,song_id,r,n\n";
        char buf[64];
        auto format_r = [&](const std::optional<double>& r) -> std::string {
            if (!r) return "NA";
            std::snprintf(buf, sizeof(buf), "%.10g", *r);
            return buf;
        };
        for (std::size_t e = 0; e < kEmotionCount; ++e)
            out += std::string("pooled,") + kEmotionNames[e] + ",," + format_r(pooled_r[e]) +
                   "," + std::to_string(verse_count) + "\n";
        for (const auto& song : per_song)
            for (std::size_t e = 0; e < kEmotionCount; ++e)
                out += std::string("song,") + kEmotionNames[e] + "," + song.song_id + "," +
                       format_r(song.r[e]) + "," + std::to_string(song.verse_count) + "\n";
        return out;
    }
};

namespace detail {

inline std::optional<double> correlation_or_undefined(std::span<const double> a,
                                                      std::span<const double> b) {
    try {
        return pearson(a, b);
    } catch (const UndefinedCorrelation&) {
        return std::nullopt;
    }
}

}  // namespace detail

/// Pools all verses per emotion, matching the single-number-per-emotion
/// reporting. Pass song spans to additionally get per-song correlations.
inline EvalReport evaluate(const std::vector<EmotionScores>& predictions,
                           const std::vector<EmotionScores>& gold,
                           const std::vector<SongSpan>* songs = nullptr) {
    if (predictions.size() != gold.size())
        throw DimensionError("evaluate: " + std::to_string(predictions.size()) +
                             " predictions vs " + std::to_string(gold.size()) + " gold rows");
    if (predictions.size() < 2) throw InputError("evaluate requires at least two verses");

    EvalReport report;
    report.verse_count = predictions.size();

    std::vector<double> pred_col(predictions.size()), gold_col(predictions.size());
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            pred_col[i] = predictions[i][e];
            gold_col[i] = gold[i][e];
        }
        report.pooled_r[e] = detail::correlation_or_undefined(pred_col, gold_col);
    }

    if (songs) {
        for (const auto& span : *songs) {
            if (span.offset + span.length > predictions.size())
                throw DimensionError("evaluate: song span exceeds verse rows");
            SongEval eval;
            eval.song_id = span.song_id;
            eval.verse_count = span.length;
            for (std::size_t e = 0; e < kEmotionCount; ++e) {
                if (span.length < 2) continue;
                std::vector<double> p(span.length), g(span.length);
                for (std::size_t i = 0; i < span.length; ++i) {
                    p[i] = predictions[span.offset + i][e];
                    g[i] = gold[span.offset + i][e];
                }
                eval.r[e] = detail::correlation_or_undefined(p, g);
            }
            report.per_song.push_back(std::move(eval));
        }
    }
    return report;
}

}  // namespace emodyn::stats
