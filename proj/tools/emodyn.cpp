// emodyn command line: verse-level emotion scoring for song lyrics and the
// song-level state-space stage (Kalman filter / RTS smoother, EM-fitted),
// plus evaluation and plot emission.
//
// Exit codes: 0 ok, 1 input error, 2 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emodyn/pipeline.hpp"

namespace fs = std::filesystem;
using namespace emodyn;

namespace {

struct CommonSsmOptions {
    double a = 1.0, c = 1.0, q = 1.0, r = 5.0;
    double init_cov = 2.0;
    int n_iter = 10;
    std::string em_update = "ACQR";
};

ssm::EmUpdates parse_em_updates(const std::string& spec) {
    ssm::EmUpdates u;
    u.A = u.C = u.Q = u.R = false;
    for (char ch : spec) {
        switch (ch) {
            case 'A': u.A = true; break;
            case 'C': u.C = true; break;
            case 'Q': u.Q = true; break;
            case 'R': u.R = true; break;
            case 'I': u.initial = true; break;
            default:
                throw InputError(std::string("bad --em-update letter '") + ch +
                                 "' (use A, C, Q, R, I)");
        }
    }
    return u;
}

void add_ssm_options(CLI::App* cmd, CommonSsmOptions& opts) {
    cmd->add_option("--A", opts.a, "transition matrix value")->capture_default_str();
    cmd->add_option("--C", opts.c, "observation matrix value")->capture_default_str();
    cmd->add_option("--Q", opts.q, "transition noise covariance")->capture_default_str();
    cmd->add_option("--R", opts.r, "observation noise covariance")->capture_default_str();
    cmd->add_option("--init-cov", opts.init_cov, "initial state covariance")
        ->capture_default_str();
    cmd->add_option("--n-iter", opts.n_iter, "EM iterations")->capture_default_str();
    cmd->add_option("--em-update", opts.em_update,
                    "parameters updated by EM (letters from ACQR, plus I for the "
                    "initial beliefs)")
        ->capture_default_str();
}

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write: " + path.string());
    out << content;
}

void print_eval(const char* label, const stats::EvalReport& report) {
    std::printf("%s (n = %zu verses)\n", label, report.verse_count);
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
        if (report.pooled_r[e])
            std::printf("  %-9s r = %+.4f\n", kEmotionNames[e], *report.pooled_r[e]);
        else
            std::printf("  %-9s r = undefined (zero variance)\n", kEmotionNames[e]);
    }
}

// ---------------------------------------------------------------------------

int cmd_pipeline(const pipeline::PipelineConfig& cfg) {
    const pipeline::VerseStage stage = pipeline::run_verse_stage(cfg);
    const pipeline::PipelineResult result = pipeline::assemble_result(cfg, stage);
    pipeline::write_outputs(result, cfg);

    std::printf("pipeline: %zu source sentences, %zu songs, %zu verses, |V| = %zu, "
                "%zu feature columns, mode = %s\n",
                result.source_count, result.song_count, result.verse_count,
                result.vocab_size, result.feature_cols,
                pipeline::to_string(result.mode).c_str());
    for (const auto& name : result.missing_lexicons)
        std::printf("  note: lexicon '%s' not present, using an empty table\n", name.c_str());
    if (result.verse_eval) print_eval("verse-level baseline", *result.verse_eval);
    if (result.ssm_eval) print_eval("song-level model", *result.ssm_eval);

    if (!cfg.sweep_a.empty() && cfg.mode != pipeline::Mode::verse_only) {
        const auto entries = pipeline::run_sweep_on(stage, cfg);
        write_text(cfg.output_dir / "sweep.csv", pipeline::sweep_to_csv(entries));
        std::printf("sweep over A = {");
        for (std::size_t i = 0; i < cfg.sweep_a.size(); ++i)
            std::printf("%s%g", i ? ", " : "", cfg.sweep_a[i]);
        std::printf("} written to sweep.csv\n");
    }
    std::printf("outputs in %s\n", cfg.output_dir.string().c_str());
    return 0;
}

int cmd_train_verse(const pipeline::PipelineConfig& cfg) {
    const pipeline::VerseStage stage = pipeline::run_verse_stage(cfg);
    fs::create_directories(cfg.output_dir);
    write_text(cfg.output_dir / "models.tsv", verse::models_to_tsv(stage.models));
    write_text(cfg.output_dir / "word_features.tsv", stage.matrix.to_tsv());

    std::printf("trained %zu per-emotion models on %zu sentences (|V| = %zu, %zu columns)\n",
                stage.models.size(), stage.records.size(), stage.matrix.vocab.size(),
                stage.matrix.cols);
    for (const auto& model : stage.models) {
        if (model.cv_score)
            std::printf("  %-9s lambda = %-8g cv r = %+.4f\n", model.emotion.c_str(),
                        model.lambda, *model.cv_score);
        else
            std::printf("  %-9s lambda = %-8g cv r = undefined\n", model.emotion.c_str(),
                        model.lambda);
    }
    return 0;
}

int cmd_predict_verse(const fs::path& model_path, const fs::path& features_path,
                      const fs::path& songs_path, const fs::path& out_path, bool clamp) {
    std::ifstream model_in(model_path);
    if (!model_in) throw InputError("cannot open model file: " + model_path.string());
    const auto models = verse::models_from_tsv_stream(model_in, model_path.string());
    if (models.size() != kEmotionCount)
        throw InputError("expected " + std::to_string(kEmotionCount) + " models, found " +
                         std::to_string(models.size()));

    const auto matrix = lex::WordFeatureMatrix::load_tsv(features_path);
    const auto songs = corpus::load_songs(songs_path);
    if (songs.empty()) throw InputError("songs file has no songs");

    std::vector<stats::SongSpan> spans;
    std::vector<std::string> verse_ids;
    std::vector<EmotionScores> predictions;
    for (const auto& song : songs) {
        spans.push_back({song.song_id, predictions.size(), song.verses.size()});
        for (const auto& verse : song.verses) {
            const auto features = verse::verse_features(corpus::tokenize(verse.text), matrix);
            EmotionScores scores;
            for (std::size_t e = 0; e < kEmotionCount; ++e)
                scores[e] = verse::predict(models[e], features, clamp);
            verse_ids.push_back(verse.verse_id);
            predictions.push_back(scores);
        }
    }
    write_text(out_path, pipeline::verse_predictions_to_tsv(spans, verse_ids, predictions));
    std::printf("predicted %zu verses across %zu songs -> %s\n", predictions.size(),
                songs.size(), out_path.string().c_str());
    return 0;
}

int cmd_smooth(const fs::path& pred_path, const fs::path& out_dir, const std::string& mode_str,
               const CommonSsmOptions& opts) {
    const pipeline::Mode mode = pipeline::mode_from_string(mode_str);
    if (mode == pipeline::Mode::verse_only)
        throw InputError("smooth needs a song-level mode");
    const auto file = pipeline::read_verse_predictions(pred_path);
    const ssm::EmUpdates updates = parse_em_updates(opts.em_update);

    std::vector<EmotionScores> means(file.predictions.size()), sds(file.predictions.size());
    std::vector<pipeline::FoldParams> params_rows(kEmotionCount);

    parallel_for(kEmotionCount, [&](std::size_t e) {
        ssm::SsmParams params = ssm::SsmParams::univariate(opts.a, opts.c, opts.q, opts.r);
        std::vector<ssm::ObservationSequence> sequences;
        for (const auto& span : file.spans) {
            std::vector<double> ys(span.length);
            for (std::size_t t = 0; t < span.length; ++t)
                ys[t] = file.predictions[span.offset + t][e];
            sequences.push_back(ssm::ObservationSequence{
                ssm::to_observations(ys),
                ssm::InitialBelief::univariate(ys.front(), opts.init_cov)});
        }
        if (pipeline::uses_em(mode))
            params = ssm::em_fit(sequences, params, opts.n_iter, updates).params;
        params_rows[e] = pipeline::FoldParams{kEmotionNames[e], 0, params.A.value(),
                                              params.C.value(), params.Q.value(),
                                              params.R.value()};

        for (std::size_t s = 0; s < file.spans.size(); ++s) {
            const auto& span = file.spans[s];
            const auto& seq = sequences[s];
            if (pipeline::uses_smoother(mode)) {
                const auto sm = ssm::smooth(seq.observations, params, seq.init);
                for (std::size_t t = 0; t < span.length; ++t) {
                    means[span.offset + t][e] = sm.smoothed[t].mean.value();
                    sds[span.offset + t][e] =
                        std::sqrt(std::max(0.0, sm.smoothed[t].cov.value()));
                }
            } else {
                const auto fr = ssm::filter(seq.observations, params, seq.init);
                for (std::size_t t = 0; t < span.length; ++t) {
                    means[span.offset + t][e] = fr.filtered[t].mean.value();
                    sds[span.offset + t][e] =
                        std::sqrt(std::max(0.0, fr.filtered[t].cov.value()));
                }
            }
        }
    });

    std::vector<plot::DynamicsTrace> traces;
    for (const auto& span : file.spans) {
        plot::DynamicsTrace trace;
        trace.song_id = span.song_id;
        trace.has_gold = false;
        trace.has_ssm = true;
        for (std::size_t t = 0; t < span.length; ++t) {
            trace.verse_ids.push_back(file.verse_ids[span.offset + t]);
            trace.verse_scores.push_back(file.predictions[span.offset + t]);
            trace.ssm_mean.push_back(means[span.offset + t]);
            trace.ssm_sd.push_back(sds[span.offset + t]);
        }
        traces.push_back(std::move(trace));
    }

    fs::create_directories(out_dir);
    write_text(out_dir / "traces.csv", plot::traces_to_csv(traces));
    write_text(out_dir / "params.csv", pipeline::fold_params_to_csv(params_rows));
    std::printf("%s over %zu songs (%zu verses) -> %s\n", mode_str.c_str(),
                file.spans.size(), file.predictions.size(), out_dir.string().c_str());
    return 0;
}

int cmd_evaluate(const fs::path& pred_path, const fs::path& songs_path,
                 const fs::path& out_path, bool per_song) {
    const auto file = pipeline::read_verse_predictions(pred_path);
    const auto songs = corpus::load_songs(songs_path);

    std::map<std::string, const corpus::SongSequence*> by_id;
    for (const auto& song : songs) by_id[song.song_id] = &song;

    std::vector<EmotionScores> preds, gold;
    std::vector<stats::SongSpan> spans;
    for (const auto& span : file.spans) {
        const auto it = by_id.find(span.song_id);
        if (it == by_id.end())
            throw InputError("song '" + span.song_id + "' not present in the gold file");
        const auto& song = *it->second;
        if (song.verses.size() != span.length)
            throw InputError("song '" + span.song_id + "' has " +
                             std::to_string(song.verses.size()) + " gold verses but " +
                             std::to_string(span.length) + " predictions");
        if (!song.has_gold()) continue;
        spans.push_back({span.song_id, preds.size(), span.length});
        for (std::size_t t = 0; t < span.length; ++t) {
            preds.push_back(file.predictions[span.offset + t]);
            gold.push_back(*song.verses[t].gold);
        }
    }
    if (preds.size() < 2) throw InputError("no gold-labelled verses to evaluate against");

    const auto report = stats::evaluate(preds, gold, per_song ? &spans : nullptr);
    write_text(out_path, report.to_csv());
    print_eval("evaluation", report);
    std::printf("-> %s\n", out_path.string().c_str());
    return 0;
}

int cmd_plot(const fs::path& trace_path, const fs::path& out_dir, const std::string& format) {
    const plot::PlotFormat fmt = plot::plot_format_from_string(format);
    std::ifstream in(trace_path);
    if (!in) throw InputError("cannot open trace file: " + trace_path.string());
    const auto traces = plot::traces_from_csv_stream(in, trace_path.string());
    if (traces.empty()) throw InputError("trace file holds no songs");

    fs::create_directories(out_dir);
    const char* ext = fmt == plot::PlotFormat::svg ? ".svg" : ".csv";
    for (const auto& trace : traces)
        plot::emit_plot(trace, fmt, out_dir / (trace.song_id + ext));
    std::printf("wrote %zu %s plot file(s) to %s\n", traces.size(), format.c_str(),
                out_dir.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"emodyn: verse-level emotion intensities and song-level dynamics"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key=value config file with one [subcommand] section per command; "
                   "command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::ignore_all);

    // pipeline ---------------------------------------------------------
    pipeline::PipelineConfig cfg;
    std::string mode_str = "smoother-em";
    std::string em_update_str = "ACQR";
    std::vector<double> sweep_values;

    CLI::App* pipe = app.add_subcommand("pipeline", "end-to-end run");
    pipe->fallthrough();
    pipe->add_option("--lexicons", cfg.lexicon_dir, "directory of lexicon TSV files")
        ->required();
    pipe->add_option("--source", cfg.source_path, "sentence-level source dataset (TSV)")
        ->required();
    pipe->add_option("--songs", cfg.songs_path, "songs file (JSONL)")->required();
    pipe->add_option("--out", cfg.output_dir, "output directory")->required();
    pipe->add_option("--mode", mode_str,
                     "verse-only|filter|smoother|filter-em|smoother-em")
        ->capture_default_str();
    pipe->add_option("--poly", cfg.poly_degree, "polynomial degree (0 = raw features)")
        ->capture_default_str();
    pipe->add_option("--A", cfg.a, "transition matrix value")->capture_default_str();
    pipe->add_option("--C", cfg.c, "observation matrix value")->capture_default_str();
    pipe->add_option("--Q", cfg.q, "transition noise covariance")->capture_default_str();
    pipe->add_option("--R", cfg.r, "observation noise covariance")->capture_default_str();
    pipe->add_option("--init-cov", cfg.init_cov, "initial state covariance")
        ->capture_default_str();
    pipe->add_option("--n-iter", cfg.n_iter, "EM iterations")->capture_default_str();
    pipe->add_option("--k", cfg.k_folds, "song-level CV folds")->capture_default_str();
    pipe->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    pipe->add_option("--lambda-grid", cfg.lambda_grid, "ridge lambda grid")
        ->delimiter(',');
    pipe->add_option("--ridge-folds", cfg.ridge_folds, "sentence-level CV folds")
        ->capture_default_str();
    pipe->add_option("--em-update", em_update_str, "EM parameter subset (ACQR, I)")
        ->capture_default_str();
    pipe->add_flag("--clamp", cfg.clamp_predictions, "clamp verse predictions to [0, 1]");
    pipe->add_flag("--per-song", cfg.per_song_eval, "add per-song rows to eval CSVs");
    pipe->add_option("--sweep", sweep_values,
                     "extra transition values A to sweep (writes sweep.csv)")
        ->delimiter(',');

    // train-verse ------------------------------------------------------
    pipeline::PipelineConfig train_cfg;
    CLI::App* train = app.add_subcommand("train-verse", "train the verse-level models");
    train->fallthrough();
    train->add_option("--lexicons", train_cfg.lexicon_dir, "lexicon directory")->required();
    train->add_option("--source", train_cfg.source_path, "source dataset (TSV)")->required();
    train->add_option("--songs", train_cfg.songs_path,
                      "songs file (JSONL), needed to build the vocabulary")
        ->required();
    train->add_option("--out", train_cfg.output_dir, "output directory")->required();
    train->add_option("--poly", train_cfg.poly_degree, "polynomial degree")
        ->capture_default_str();
    train->add_option("--lambda-grid", train_cfg.lambda_grid, "ridge lambda grid")
        ->delimiter(',');
    train->add_option("--ridge-folds", train_cfg.ridge_folds, "CV folds")
        ->capture_default_str();
    train->add_option("--seed", train_cfg.seed, "random seed")->capture_default_str();

    // predict-verse ----------------------------------------------------
    fs::path model_path, features_path, songs_path, out_path;
    bool clamp = false;
    CLI::App* predict = app.add_subcommand("predict-verse", "score verses with saved models");
    predict->fallthrough();
    predict->add_option("--model", model_path, "models.tsv from train-verse")->required();
    predict->add_option("--features", features_path, "word_features.tsv from train-verse")
        ->required();
    predict->add_option("--songs", songs_path, "songs file (JSONL)")->required();
    predict->add_option("--out", out_path, "output verse-prediction TSV")->required();
    predict->add_flag("--clamp", clamp, "clamp predictions to [0, 1]");

    // smooth -----------------------------------------------------------
    fs::path smooth_pred, smooth_out;
    std::string smooth_mode = "smoother-em";
    CommonSsmOptions smooth_opts;
    CLI::App* smoothc = app.add_subcommand("smooth", "song-level stage on saved predictions");
    smoothc->fallthrough();
    smoothc->add_option("--pred", smooth_pred, "verse-prediction TSV")->required();
    smoothc->add_option("--out", smooth_out, "output directory")->required();
    smoothc->add_option("--mode", smooth_mode, "filter|smoother|filter-em|smoother-em")
        ->capture_default_str();
    add_ssm_options(smoothc, smooth_opts);

    // evaluate ---------------------------------------------------------
    fs::path eval_pred, eval_songs, eval_out;
    bool eval_per_song = false;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Pearson r against gold labels");
    evaluate->fallthrough();
    evaluate->add_option("--pred", eval_pred, "verse-prediction TSV")->required();
    evaluate->add_option("--songs", eval_songs, "songs file with gold (JSONL)")->required();
    evaluate->add_option("--out", eval_out, "output CSV")->required();
    evaluate->add_flag("--per-song", eval_per_song, "add per-song rows");

    // plot --------------------------------------------------------------
    fs::path plot_trace, plot_out;
    std::string plot_fmt = "svg";
    CLI::App* plotc = app.add_subcommand("plot", "render dynamics traces");
    plotc->fallthrough();
    plotc->add_option("--trace", plot_trace, "traces.csv from pipeline/smooth")->required();
    plotc->add_option("--out", plot_out, "output directory")->required();
    plotc->add_option("--format", plot_fmt, "svg|csv")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*pipe) {
            cfg.mode = pipeline::mode_from_string(mode_str);
            cfg.em_updates = parse_em_updates(em_update_str);
            cfg.sweep_a = sweep_values;
            return cmd_pipeline(cfg);
        }
        if (*train) {
            train_cfg.mode = pipeline::Mode::verse_only;
            return cmd_train_verse(train_cfg);
        }
        if (*predict)
            return cmd_predict_verse(model_path, features_path, songs_path, out_path, clamp);
        if (*smoothc) return cmd_smooth(smooth_pred, smooth_out, smooth_mode, smooth_opts);
        if (*evaluate) return cmd_evaluate(eval_pred, eval_songs, eval_out, eval_per_song);
        if (*plotc) return cmd_plot(plot_trace, plot_out, plot_fmt);
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 2;
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
