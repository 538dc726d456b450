#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "emodyn/corpus.hpp"
#include "emodyn/emotions.hpp"
#include "emodyn/error.hpp"
#include "emodyn/evalstats.hpp"
#include "emodyn/lexicons.hpp"
#include "emodyn/parallel.hpp"
#include "emodyn/plot.hpp"
#include "emodyn/ssm.hpp"
#include "emodyn/verse_model.hpp"

namespace emodyn::pipeline {

enum class Mode { verse_only, filter, smoother, filter_em, smoother_em };

inline Mode mode_from_string(const std::string& s) {
    if (s == "verse-only") return Mode::verse_only;
    if (s == "filter") return Mode::filter;
    if (s == "smoother") return Mode::smoother;
    if (s == "filter-em") return Mode::filter_em;
    if (s == "smoother-em") return Mode::smoother_em;
    throw InputError("unknown mode: " + s +
                     " (expected verse-only|filter|smoother|filter-em|smoother-em)");
}

inline std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::verse_only: return "verse-only";
        case Mode::filter: return "filter";
        case Mode::smoother: return "smoother";
        case Mode::filter_em: return "filter-em";
        case Mode::smoother_em: return "smoother-em";
    }
    return "?";
}

inline bool uses_em(Mode mode) { return mode == Mode::filter_em || mode == Mode::smoother_em; }
inline bool uses_smoother(Mode mode) {
    return mode == Mode::smoother || mode == Mode::smoother_em;
}

/// Everything the end-to-end run needs. Defaults mirror the standard
/// experiment: A = C = 1, Q = 1, R = 5, ten EM iterations, ten-fold
/// song-level cross-validation, degree-3 polynomial features.
struct PipelineConfig {
    std::filesystem::path lexicon_dir;
    std::filesystem::path source_path;
    std::filesystem::path songs_path;
    std::filesystem::path output_dir;

    std::size_t poly_degree = 3;  // 0 = raw 25-dim features
    double a = 1.0;
    double c = 1.0;
    double q = 1.0;
    double r = 5.0;
    double init_cov = 2.0;
    int n_iter = 10;
    Mode mode = Mode::smoother_em;
    std::size_t k_folds = 10;
    std::uint64_t seed = 42;

    std::vector<double> lambda_grid = verse::default_lambda_grid();
    std::size_t ridge_folds = 10;
    ssm::EmUpdates em_updates;  // all four parameters by default
    bool clamp_predictions = false;
    bool per_song_eval = false;
    std::vector<double> sweep_a;  // extra transition values for sweep runs

    void validate() const {
        if (lexicon_dir.empty() || source_path.empty() || songs_path.empty())
            throw InputError("lexicons, source and songs paths are all required");
        if (q < 0.0 || r < 0.0 || init_cov < 0.0)
            throw InputError("covariances must be non-negative");
        if (n_iter < 0) throw InputError("n-iter must be >= 0");
        if (lambda_grid.empty()) throw InputError("lambda grid must not be empty");
        if (ridge_folds < 2) throw InputError("ridge-folds must be >= 2");
        if (uses_em(mode) && k_folds < 2) throw InputError("k must be >= 2 for EM modes");
    }

    ssm::SsmParams ssm_params() const { return ssm::SsmParams::univariate(a, c, q, r); }
};

/// Test/inspection hooks. on_em_fit fires before each EM fit with the songs
/// whose sequences enter the statistics; it may be called from worker
/// threads, one fold at a time.
struct PipelineHooks {
    std::function<void(const std::string& emotion, std::size_t fold,
                       const std::vector<std::string>& train_song_ids)>
        on_em_fit;
};

struct FoldParams {
    std::string emotion;
    std::size_t fold = 0;
    double a = 0.0, c = 0.0, q = 0.0, r = 0.0;
};

struct WilliamsRow {
    std::optional<stats::WilliamsResult> result;
    std::optional<double> r_ssm, r_verse, r_pair;
    std::string note;
};

struct PipelineResult {
    std::size_t song_count = 0;
    std::size_t verse_count = 0;
    std::size_t source_count = 0;
    std::size_t vocab_size = 0;
    std::size_t feature_cols = 0;
    Mode mode = Mode::smoother_em;
    std::vector<std::string> missing_lexicons;

    std::vector<verse::RidgeModel> models;                // one per emotion
    std::vector<EmotionScores> verse_predictions;         // all verses, file order
    std::vector<stats::SongSpan> song_spans;              // file order
    std::vector<EmotionScores> ssm_means, ssm_sds;        // empty in verse-only mode

    std::optional<stats::EvalReport> verse_eval;          // present when gold exists
    std::optional<stats::EvalReport> ssm_eval;
    std::array<WilliamsRow, kEmotionCount> williams;
    std::vector<FoldParams> fold_params;
    std::vector<plot::DynamicsTrace> traces;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace detail

/// Loaded corpora plus the trained verse-level stage; the song-level stage
/// and sweep runs reuse it.
struct VerseStage {
    std::vector<std::string> missing_lexicons;
    std::vector<corpus::SourceRecord> records;
    std::vector<corpus::SongSequence> songs;
    lex::WordFeatureMatrix matrix;
    std::vector<verse::RidgeModel> models;
    std::vector<EmotionScores> verse_predictions;
    std::vector<stats::SongSpan> song_spans;
};

/// Lexicon features + per-emotion ridge heads + predictions for every verse.
inline VerseStage run_verse_stage(const PipelineConfig& cfg) {
    VerseStage prep;
    const auto tables = lex::load_lexicon_directory(cfg.lexicon_dir, &prep.missing_lexicons);
    prep.records = corpus::load_headlines(cfg.source_path);
    prep.songs = corpus::load_songs(cfg.songs_path);
    if (prep.records.empty()) throw InputError("source dataset has no records");
    if (prep.songs.empty()) throw InputError("songs file has no songs");

    // vocabulary from the text of both corpora
    std::vector<std::vector<std::string>> streams;
    streams.reserve(prep.records.size() + corpus::total_verses(prep.songs));
    for (const auto& rec : prep.records) streams.push_back(corpus::tokenize(rec.text));
    for (const auto& song : prep.songs)
        for (const auto& verse : song.verses) streams.push_back(corpus::tokenize(verse.text));

    const lex::WordFeatureMatrix& matrix = prep.matrix =
        lex::WordFeatureMatrix::build(lex::build_vocabulary(streams), tables, cfg.poly_degree);

    std::vector<std::vector<double>> source_features;
    source_features.reserve(prep.records.size());
    for (std::size_t i = 0; i < prep.records.size(); ++i)
        source_features.push_back(verse::verse_features(streams[i], matrix));

    std::vector<std::vector<double>> verse_feats;
    verse_feats.reserve(streams.size() - prep.records.size());
    for (std::size_t i = prep.records.size(); i < streams.size(); ++i)
        verse_feats.push_back(verse::verse_features(streams[i], matrix));

    // one ridge head per emotion, labels scaled from [0, 100] to [0, 1]
    prep.models.resize(kEmotionCount);
    parallel_for(kEmotionCount, [&](std::size_t e) {
        std::vector<double> labels;
        labels.reserve(prep.records.size());
        for (const auto& rec : prep.records) labels.push_back(rec.scores[e] / 100.0);
        verse::RidgeModel model = verse::train_ridge(source_features, labels, cfg.lambda_grid,
                                                     cfg.ridge_folds, cfg.seed);
        model.emotion = kEmotionNames[e];
        model.label_scale = 0.01;
        prep.models[e] = std::move(model);
    });

    prep.verse_predictions.resize(verse_feats.size());
    for (std::size_t v = 0; v < verse_feats.size(); ++v)
        for (std::size_t e = 0; e < kEmotionCount; ++e)
            prep.verse_predictions[v][e] =
                verse::predict(prep.models[e], verse_feats[v], cfg.clamp_predictions);

    std::size_t offset = 0;
    for (const auto& song : prep.songs) {
        prep.song_spans.push_back({song.song_id, offset, song.verses.size()});
        offset += song.verses.size();
    }
    return prep;
}

/// Runs the song-level stage: per CV fold, EM-fitted or fixed parameters,
/// then each held-out song filtered/smoothed with its own frozen initial
/// belief (first verse-level prediction, covariance init_cov).
namespace detail {

inline void run_ssm_stage(const PipelineConfig& cfg, const VerseStage& prep,
                          const PipelineHooks& hooks, PipelineResult& result) {
    const std::size_t songs = prep.songs.size();
    result.ssm_means.resize(prep.verse_predictions.size());
    result.ssm_sds.resize(prep.verse_predictions.size());

    // song partition shared by all emotions
    std::vector<std::string> ids;
    for (const auto& song : prep.songs) ids.push_back(song.song_id);
    std::vector<std::vector<std::size_t>> folds;  // song indices per fold
    if (uses_em(cfg.mode)) {
        std::map<std::string, std::size_t> by_id;
        for (std::size_t i = 0; i < ids.size(); ++i) by_id[ids[i]] = i;
        for (const auto& fold : stats::kfold_songs(ids, cfg.k_folds, cfg.seed)) {
            std::vector<std::size_t> indices;
            for (const auto& id : fold) indices.push_back(by_id.at(id));
            folds.push_back(std::move(indices));
        }
    } else {
        std::vector<std::size_t> all(songs);
        for (std::size_t i = 0; i < songs; ++i) all[i] = i;
        folds.push_back(std::move(all));
    }

    auto observations_for = [&](std::size_t song, std::size_t emotion) {
        const auto& span = prep.song_spans[song];
        std::vector<double> ys(span.length);
        for (std::size_t t = 0; t < span.length; ++t)
            ys[t] = prep.verse_predictions[span.offset + t][emotion];
        return ys;
    };

    struct Task {
        std::size_t emotion, fold;
    };
    std::vector<Task> tasks;
    for (std::size_t e = 0; e < kEmotionCount; ++e)
        for (std::size_t f = 0; f < folds.size(); ++f) tasks.push_back({e, f});

    std::vector<FoldParams> fold_params(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t task_idx) {
        const auto [e, f] = tasks[task_idx];
        const std::string emotion = kEmotionNames[e];

        ssm::SsmParams params = cfg.ssm_params();
        if (uses_em(cfg.mode)) {
            std::set<std::size_t> held(folds[f].begin(), folds[f].end());
            std::vector<ssm::ObservationSequence> train;
            std::vector<std::string> train_ids;
            for (std::size_t s = 0; s < songs; ++s) {
                if (held.count(s)) continue;
                std::vector<double> ys = observations_for(s, e);
                train.push_back(ssm::ObservationSequence{
                    ssm::to_observations(ys),
                    ssm::InitialBelief::univariate(ys.front(), cfg.init_cov)});
                train_ids.push_back(ids[s]);
            }
            if (hooks.on_em_fit) hooks.on_em_fit(emotion, f, train_ids);
            try {
                params = ssm::em_fit(train, params, cfg.n_iter, cfg.em_updates).params;
            } catch (const Error& err) {
                throw NumericError("EM fit failed for emotion " + emotion + ", fold " +
                                   std::to_string(f) + ": " + err.what());
            }
        }
        fold_params[task_idx] = FoldParams{emotion, f, params.A.value(), params.C.value(),
                                           params.Q.value(), params.R.value()};

        for (const std::size_t s : folds[f]) {
            const auto& span = prep.song_spans[s];
            const std::vector<double> ys = observations_for(s, e);
            const ssm::InitialBelief init =
                ssm::InitialBelief::univariate(ys.front(), cfg.init_cov);
            try {
                if (uses_smoother(cfg.mode)) {
                    const ssm::SmoothResult sm =
                        ssm::smooth(ssm::to_observations(ys), params, init);
                    for (std::size_t t = 0; t < span.length; ++t) {
                        result.ssm_means[span.offset + t][e] = sm.smoothed[t].mean.value();
                        result.ssm_sds[span.offset + t][e] =
                            std::sqrt(std::max(0.0, sm.smoothed[t].cov.value()));
                    }
                } else {
                    const ssm::FilterResult fr =
                        ssm::filter(ssm::to_observations(ys), params, init);
                    for (std::size_t t = 0; t < span.length; ++t) {
                        result.ssm_means[span.offset + t][e] = fr.filtered[t].mean.value();
                        result.ssm_sds[span.offset + t][e] =
                            std::sqrt(std::max(0.0, fr.filtered[t].cov.value()));
                    }
                }
            } catch (const NumericError& err) {
                throw NumericError("song " + ids[s] + ", emotion " + emotion + ": " +
                                   err.what());
            } catch (const InputError& err) {
                throw InputError("song " + ids[s] + ", emotion " + emotion + ": " +
                                 err.what());
            }
        }
    });
    result.fold_params = std::move(fold_params);
}

/// Gold rows pooled over the songs that carry labels.
struct GoldView {
    std::vector<EmotionScores> gold;
    std::vector<std::size_t> verse_rows;  // indices into the pooled verse arrays
    std::vector<stats::SongSpan> spans;   // spans within the gold-only view
};

inline GoldView collect_gold(const VerseStage& prep) {
    GoldView view;
    for (std::size_t s = 0; s < prep.songs.size(); ++s) {
        const auto& song = prep.songs[s];
        if (!song.has_gold()) continue;
        const auto& span = prep.song_spans[s];
        view.spans.push_back({song.song_id, view.gold.size(), span.length});
        for (std::size_t t = 0; t < span.length; ++t) {
            view.gold.push_back(*song.verses[t].gold);
            view.verse_rows.push_back(span.offset + t);
        }
    }
    return view;
}

inline std::vector<EmotionScores> select_rows(const std::vector<EmotionScores>& all,
                                              const std::vector<std::size_t>& rows) {
    std::vector<EmotionScores> out;
    out.reserve(rows.size());
    for (const std::size_t r : rows) out.push_back(all[r]);
    return out;
}

inline void evaluate_stage(const PipelineConfig& cfg, const VerseStage& prep,
                           PipelineResult& result) {
    const GoldView gold = collect_gold(prep);
    if (gold.gold.size() < 2) return;  // nothing to score against

    const auto verse_rows = select_rows(prep.verse_predictions, gold.verse_rows);
    result.verse_eval = stats::evaluate(verse_rows, gold.gold,
                                        cfg.per_song_eval ? &gold.spans : nullptr);
    if (result.ssm_means.empty()) return;

    const auto ssm_rows = select_rows(result.ssm_means, gold.verse_rows);
    result.ssm_eval =
        stats::evaluate(ssm_rows, gold.gold, cfg.per_song_eval ? &gold.spans : nullptr);

    // Williams test: SSM estimates vs the verse-level baseline against gold
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
        WilliamsRow row;
        row.r_ssm = result.ssm_eval->pooled_r[e];
        row.r_verse = result.verse_eval->pooled_r[e];
        std::vector<double> a(gold.gold.size()), b(gold.gold.size());
        for (std::size_t i = 0; i < gold.gold.size(); ++i) {
            a[i] = ssm_rows[i][e];
            b[i] = verse_rows[i][e];
        }
        try {
            row.r_pair = stats::pearson(a, b);
            if (!row.r_ssm || !row.r_verse) throw UndefinedCorrelation("correlation undefined");
            row.result = stats::williams_test(*row.r_ssm, *row.r_verse, *row.r_pair,
                                              gold.gold.size());
        } catch (const Error& err) {
            row.note = err.what();
        }
        result.williams[e] = std::move(row);
    }
}

inline void build_traces(const VerseStage& prep, PipelineResult& result) {
    for (std::size_t s = 0; s < prep.songs.size(); ++s) {
        const auto& song = prep.songs[s];
        const auto& span = prep.song_spans[s];
        plot::DynamicsTrace trace;
        trace.song_id = song.song_id;
        trace.has_gold = song.has_gold();
        trace.has_ssm = !result.ssm_means.empty();
        for (std::size_t t = 0; t < span.length; ++t) {
            trace.verse_ids.push_back(song.verses[t].verse_id);
            trace.verse_scores.push_back(prep.verse_predictions[span.offset + t]);
            if (trace.has_gold) trace.gold.push_back(*song.verses[t].gold);
            if (trace.has_ssm) {
                trace.ssm_mean.push_back(result.ssm_means[span.offset + t]);
                trace.ssm_sd.push_back(result.ssm_sds[span.offset + t]);
            }
        }
        result.traces.push_back(std::move(trace));
    }
}

}  // namespace detail

/// End-to-end run: verse stage (lexicon features + ridge), song stage
/// (filter/smoother with fixed or EM-selected parameters under song-level
/// CV), evaluation against gold, dynamics traces. Deterministic per seed.
inline PipelineResult assemble_result(const PipelineConfig& cfg, const VerseStage& prep,
                                      const PipelineHooks& hooks = {}) {
    PipelineResult result;
    result.mode = cfg.mode;
    result.missing_lexicons = prep.missing_lexicons;
    result.song_count = prep.songs.size();
    result.verse_count = prep.verse_predictions.size();
    result.source_count = prep.records.size();
    result.vocab_size = prep.matrix.vocab.size();
    result.feature_cols = prep.matrix.cols;
    result.models = prep.models;
    result.verse_predictions = prep.verse_predictions;
    result.song_spans = prep.song_spans;

    if (cfg.mode != Mode::verse_only) detail::run_ssm_stage(cfg, prep, hooks, result);
    detail::evaluate_stage(cfg, prep, result);
    detail::build_traces(prep, result);
    return result;
}

inline PipelineResult run_pipeline(const PipelineConfig& cfg,
                                   const PipelineHooks& hooks = {}) {
    cfg.validate();
    return assemble_result(cfg, run_verse_stage(cfg), hooks);
}

/// One sweep entry: the song-level stage re-run with a different transition
/// value on the same verse predictions.
struct SweepEntry {
    double a = 0.0;
    std::array<std::optional<double>, kEmotionCount> ssm_r;
    std::size_t verse_count = 0;
};

inline std::vector<SweepEntry> run_sweep_on(const VerseStage& prep, const PipelineConfig& cfg,
                                            const PipelineHooks& hooks = {}) {
    if (cfg.mode == Mode::verse_only)
        throw InputError("sweep requires a song-level mode");
    if (cfg.sweep_a.empty()) throw InputError("sweep requires at least one A value");

    std::vector<SweepEntry> entries;
    for (const double a : cfg.sweep_a) {
        PipelineConfig sub = cfg;
        sub.a = a;
        PipelineResult result;
        result.mode = sub.mode;
        detail::run_ssm_stage(sub, prep, hooks, result);
        detail::evaluate_stage(sub, prep, result);

        SweepEntry entry;
        entry.a = a;
        if (result.ssm_eval) {
            entry.ssm_r = result.ssm_eval->pooled_r;
            entry.verse_count = result.ssm_eval->verse_count;
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

inline std::vector<SweepEntry> run_sweep(const PipelineConfig& cfg,
                                         const PipelineHooks& hooks = {}) {
    cfg.validate();
    return run_sweep_on(run_verse_stage(cfg), cfg, hooks);
}

// ---------------------------------------------------------------------------
// File emission
// ---------------------------------------------------------------------------

inline constexpr const char* kVersePredictionsHeader = "#emodyn-verse-predictions\tv1";

inline std::string verse_predictions_to_tsv(const std::vector<stats::SongSpan>& spans,
                                            const std::vector<std::string>& verse_ids,
                                            const std::vector<EmotionScores>& predictions) {
    std::string out = std::string(kVersePredictionsHeader) + "\n" + "song_id\tverse_id";
    for (const char* name : kEmotionNames) out += std::string("\t") + name;
    out += "\n";
    for (const auto& span : spans) {
        for (std::size_t t = 0; t < span.length; ++t) {
            const std::size_t row = span.offset + t;
            out += span.song_id + "\t" + verse_ids[row];
            for (std::size_t e = 0; e < kEmotionCount; ++e)
                out += "\t" + detail::fmt(predictions[row][e]);
            out += "\n";
        }
    }
    return out;
}

struct VersePredictionFile {
    std::vector<stats::SongSpan> spans;
    std::vector<std::string> verse_ids;
    std::vector<EmotionScores> predictions;
};

inline VersePredictionFile read_verse_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open verse predictions: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kVersePredictionsHeader)
        throw InputError(path.string() + ": not a v1 verse-prediction file");
    if (!std::getline(in, line))
        throw InputError(path.string() + ": missing column header");

    VersePredictionFile out;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string context = path.filename().string() + ":" + std::to_string(line_no);
        const auto fields = lex::detail::split_tabs(line);
        if (fields.size() != 2 + kEmotionCount)
            throw InputError(context + ": expected " + std::to_string(2 + kEmotionCount) +
                             " columns");
        EmotionScores scores;
        for (std::size_t e = 0; e < kEmotionCount; ++e)
            scores[e] = lex::detail::parse_number(fields[2 + e], context);

        if (out.spans.empty() || out.spans.back().song_id != fields[0])
            out.spans.push_back({fields[0], out.predictions.size(), 0});
        out.spans.back().length += 1;
        out.verse_ids.push_back(fields[1]);
        out.predictions.push_back(scores);
    }
    if (out.predictions.empty()) throw InputError(path.string() + ": no prediction rows");
    return out;
}

inline std::string fold_params_to_csv(const std::vector<FoldParams>& rows) {
    std::string out = "emotion,fold,A,C,Q,R\n";
    for (const auto& p : rows)
        out += p.emotion + "," + std::to_string(p.fold) + "," + detail::fmt(p.a) + "," +
               detail::fmt(p.c) + "," + detail::fmt(p.q) + "," + detail::fmt(p.r) + "\n";
    return out;
}

inline std::string williams_to_csv(const std::array<WilliamsRow, kEmotionCount>& rows) {
    std::string out = "emotion,r_ssm,r_verse,r_pair,t,df,p,note\n";
    auto opt = [&](const std::optional<double>& v) {
        return v ? detail::fmt(*v) : std::string("NA");
    };
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
        const auto& row = rows[e];
        out += std::string(kEmotionNames[e]) + "," + opt(row.r_ssm) + "," + opt(row.r_verse) +
               "," + opt(row.r_pair) + ",";
        if (row.result)
            out += detail::fmt(row.result->t) + "," + detail::fmt(row.result->df) + "," +
                   detail::fmt(row.result->p);
        else
            out += "NA,NA,NA";
        out += "," + row.note + "\n";
    }
    return out;
}

inline std::string sweep_to_csv(const std::vector<SweepEntry>& entries) {
    std::string out = "A,emotion,r,n\n";
    for (const auto& entry : entries)
        for (std::size_t e = 0; e < kEmotionCount; ++e)
            out += detail::fmt(entry.a) + "," + kEmotionNames[e] + "," +
                   (entry.ssm_r[e] ? detail::fmt(*entry.ssm_r[e]) : "NA") + "," +
                   std::to_string(entry.verse_count) + "\n";
    return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write output file: " + path.string());
    out << content;
    if (!out.good()) throw InputError("failed while writing: " + path.string());
}

}  // namespace detail

/// Writes every artifact of a run into cfg.output_dir:
/// models.tsv, verse_predictions.tsv, eval_verse.csv / eval_ssm.csv /
/// williams.csv (when gold exists), fold_params.csv, traces.csv and one SVG
/// per song under plots/.
inline void write_outputs(const PipelineResult& result, const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.output_dir.empty()) throw InputError("output directory is required");
    fs::create_directories(cfg.output_dir);

    detail::write_file(cfg.output_dir / "models.tsv", verse::models_to_tsv(result.models));

    std::vector<std::string> verse_ids;
    verse_ids.reserve(result.verse_count);
    for (const auto& trace : result.traces)
        for (const auto& id : trace.verse_ids) verse_ids.push_back(id);
    detail::write_file(
        cfg.output_dir / "verse_predictions.tsv",
        verse_predictions_to_tsv(result.song_spans, verse_ids, result.verse_predictions));

    if (result.verse_eval)
        detail::write_file(cfg.output_dir / "eval_verse.csv", result.verse_eval->to_csv());
    if (result.ssm_eval) {
        detail::write_file(cfg.output_dir / "eval_ssm.csv", result.ssm_eval->to_csv());
        detail::write_file(cfg.output_dir / "williams.csv", williams_to_csv(result.williams));
    }
    if (!result.fold_params.empty())
        detail::write_file(cfg.output_dir / "fold_params.csv",
                           fold_params_to_csv(result.fold_params));

    detail::write_file(cfg.output_dir / "traces.csv", plot::traces_to_csv(result.traces));

    fs::create_directories(cfg.output_dir / "plots");
    for (const auto& trace : result.traces)
        plot::emit_plot(trace, plot::PlotFormat::svg,
                        cfg.output_dir / "plots" / (trace.song_id + ".svg"));
}

}  // namespace emodyn::pipeline
