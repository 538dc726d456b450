#include <catch2/catch_amalgamated.hpp>

#include <mutex>
#include <set>

#include "emodyn/pipeline.hpp"
#include "support/tmpdir.hpp"

using Catch::Matchers::WithinAbs;
using namespace emodyn;
using namespace emodyn::pipeline;

namespace {

PipelineConfig fixture_config() {
    PipelineConfig cfg;
    cfg.lexicon_dir = std::filesystem::path(EMODYN_FIXTURE_DIR) / "lexicons";
    cfg.source_path = std::filesystem::path(EMODYN_FIXTURE_DIR) / "headlines.tsv";
    cfg.songs_path = std::filesystem::path(EMODYN_FIXTURE_DIR) / "songs.jsonl";
    cfg.k_folds = 5;  // five fixture songs
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("mode parsing", "[pipeline]") {
    CHECK(mode_from_string("verse-only") == Mode::verse_only);
    CHECK(mode_from_string("smoother-em") == Mode::smoother_em);
    CHECK(to_string(Mode::filter_em) == "filter-em");
    CHECK_THROWS_AS(mode_from_string("kalman"), InputError);
}

TEST_CASE("verse-only mode produces no song-level artifacts", "[pipeline]") {
    PipelineConfig cfg = fixture_config();
    cfg.mode = Mode::verse_only;
    const PipelineResult result = run_pipeline(cfg);

    CHECK(result.song_count == 5);
    CHECK(result.source_count == 50);
    CHECK(result.verse_count == 38);
    CHECK(result.feature_cols == 267);
    CHECK(result.missing_lexicons.size() == 7);
    CHECK(result.ssm_means.empty());
    CHECK(result.fold_params.empty());
    REQUIRE(result.verse_eval.has_value());
    CHECK_FALSE(result.ssm_eval.has_value());
    for (const auto& trace : result.traces) CHECK_FALSE(trace.has_ssm);
}

TEST_CASE("full smoother-em run on the fixture corpus", "[pipeline]") {
    PipelineConfig cfg = fixture_config();
    cfg.mode = Mode::smoother_em;
    const PipelineResult result = run_pipeline(cfg);

    REQUIRE(result.verse_eval.has_value());
    REQUIRE(result.ssm_eval.has_value());
    CHECK(result.ssm_means.size() == result.verse_count);
    CHECK(result.fold_params.size() == kEmotionCount * 5);
    CHECK(result.traces.size() == 5);

    // the fixture carries usable signal: the verse stage must find it
    REQUIRE(result.verse_eval->pooled_r[3].has_value());  // joy
    CHECK(*result.verse_eval->pooled_r[3] > 0.3);

    // spans follow file order and tile the verse rows
    std::size_t offset = 0;
    for (const auto& span : result.song_spans) {
        CHECK(span.offset == offset);
        offset += span.length;
    }
    CHECK(offset == result.verse_count);

    // williams rows exist for every emotion (possibly with a note)
    for (const auto& row : result.williams)
        CHECK((row.result.has_value() || !row.note.empty()));
}

TEST_CASE("runs are deterministic for a fixed seed", "[pipeline]") {
    PipelineConfig cfg = fixture_config();
    cfg.mode = Mode::smoother_em;
    const PipelineResult a = run_pipeline(cfg);
    const PipelineResult b = run_pipeline(cfg);

    CHECK(plot::traces_to_csv(a.traces) == plot::traces_to_csv(b.traces));
    REQUIRE(a.ssm_eval.has_value());
    REQUIRE(b.ssm_eval.has_value());
    CHECK(a.ssm_eval->to_csv() == b.ssm_eval->to_csv());
    CHECK(verse::models_to_tsv(a.models) == verse::models_to_tsv(b.models));
    CHECK(fold_params_to_csv(a.fold_params) == fold_params_to_csv(b.fold_params));

    PipelineConfig other = cfg;
    other.seed = 43;
    const PipelineResult c = run_pipeline(other);
    CHECK(fold_params_to_csv(a.fold_params) != fold_params_to_csv(c.fold_params));
}

TEST_CASE("held-out songs never enter their fold's EM statistics", "[pipeline]") {
    PipelineConfig cfg = fixture_config();
    cfg.mode = Mode::filter_em;

    std::mutex mu;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> calls;
    PipelineHooks hooks;
    hooks.on_em_fit = [&](const std::string&, std::size_t fold,
                          const std::vector<std::string>& train_ids) {
        std::lock_guard<std::mutex> lock(mu);
        calls.emplace_back(fold, train_ids);
    };
    const PipelineResult result = run_pipeline(cfg, hooks);
    (void)result;

    std::vector<std::string> ids = {"s1", "s2", "s3", "s4", "s5"};
    const auto folds = stats::kfold_songs(ids, cfg.k_folds, cfg.seed);
    REQUIRE(calls.size() == kEmotionCount * folds.size());
    for (const auto& [fold, train_ids] : calls) {
        const std::set<std::string> train(train_ids.begin(), train_ids.end());
        CHECK(train.size() == ids.size() - folds[fold].size());
        for (const auto& held : folds[fold]) CHECK_FALSE(train.count(held));
    }
}

TEST_CASE("identity smoothing keeps the verse-level correlations", "[pipeline]") {
    PipelineConfig cfg = fixture_config();
    cfg.mode = Mode::filter;
    cfg.q = 1.0;
    cfg.r = 1e-12;  // the filter trusts the observations completely
    const PipelineResult result = run_pipeline(cfg);

    REQUIRE(result.verse_eval.has_value());
    REQUIRE(result.ssm_eval.has_value());
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
        REQUIRE(result.verse_eval->pooled_r[e].has_value() ==
                result.ssm_eval->pooled_r[e].has_value());
        if (result.verse_eval->pooled_r[e])
            CHECK_THAT(*result.ssm_eval->pooled_r[e],
                       WithinAbs(*result.verse_eval->pooled_r[e], 1e-6));
    }
}

TEST_CASE("fixed-parameter smoother runs without cross-validation", "[pipeline]") {
    PipelineConfig cfg = fixture_config();
    cfg.mode = Mode::smoother;
    const PipelineResult result = run_pipeline(cfg);
    REQUIRE(result.fold_params.size() == kEmotionCount);  // one pseudo-fold
    for (const auto& p : result.fold_params) {
        CHECK(p.a == 1.0);
        CHECK(p.r == 5.0);
    }
    REQUIRE(result.ssm_eval.has_value());
}

TEST_CASE("transition sweep reuses the verse stage", "[pipeline]") {
    PipelineConfig cfg = fixture_config();
    cfg.mode = Mode::smoother;
    cfg.sweep_a = {0.5, 1.0, 2.0};
    const auto entries = run_sweep(cfg);
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].a == 0.5);
    CHECK(entries[2].a == 2.0);
    for (const auto& entry : entries) CHECK(entry.verse_count == 38);
    const std::string csv = sweep_to_csv(entries);
    CHECK(csv.rfind("A,emotion,r,n\n", 0) == 0);
    CHECK(csv.find("2,joy,") != std::string::npos);

    cfg.sweep_a.clear();
    CHECK_THROWS_AS(run_sweep(cfg), InputError);
}

TEST_CASE("output files are written and stable", "[pipeline]") {
    testsupport::TempDir tmp;
    PipelineConfig cfg = fixture_config();
    cfg.mode = Mode::smoother_em;
    cfg.output_dir = tmp.path() / "run1";
    const PipelineResult result = run_pipeline(cfg);
    write_outputs(result, cfg);

    for (const char* name : {"models.tsv", "verse_predictions.tsv", "eval_verse.csv",
                             "eval_ssm.csv", "williams.csv", "fold_params.csv", "traces.csv"})
        CHECK(std::filesystem::exists(cfg.output_dir / name));
    CHECK(std::filesystem::exists(cfg.output_dir / "plots" / "s1.svg"));

    PipelineConfig cfg2 = cfg;
    cfg2.output_dir = tmp.path() / "run2";
    write_outputs(run_pipeline(cfg2), cfg2);
    for (const char* name : {"verse_predictions.tsv", "eval_verse.csv", "eval_ssm.csv",
                             "traces.csv", "williams.csv"})
        CHECK(testsupport::read_file(cfg.output_dir / name) ==
              testsupport::read_file(cfg2.output_dir / name));

    // the prediction file reloads into the same rows
    const auto reread = read_verse_predictions(cfg.output_dir / "verse_predictions.tsv");
    REQUIRE(reread.predictions.size() == result.verse_count);
    CHECK(reread.spans.size() == result.song_spans.size());
    for (std::size_t v = 0; v < reread.predictions.size(); ++v)
        for (std::size_t e = 0; e < kEmotionCount; ++e)
            CHECK_THAT(reread.predictions[v][e],
                       WithinAbs(result.verse_predictions[v][e], 1e-9));
}

TEST_CASE("config validation", "[pipeline]") {
    PipelineConfig cfg = fixture_config();
    cfg.n_iter = -1;
    CHECK_THROWS_AS(cfg.validate(), InputError);

    cfg = fixture_config();
    cfg.lambda_grid.clear();
    CHECK_THROWS_AS(cfg.validate(), InputError);

    cfg = fixture_config();
    cfg.mode = Mode::smoother_em;
    cfg.k_folds = 7;  // more folds than songs
    CHECK_THROWS_AS(run_pipeline(cfg), InputError);
}
