#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "emodyn/plot.hpp"
#include "support/tmpdir.hpp"

using namespace emodyn;
using namespace emodyn::plot;

namespace {

DynamicsTrace three_verse_trace(bool with_gold = true) {
    DynamicsTrace trace;
    trace.song_id = "s1";
    trace.verse_ids = {"s1v1", "s1v2", "s1v3"};
    trace.has_gold = with_gold;
    trace.has_ssm = true;
    for (std::size_t t = 0; t < 3; ++t) {
        EmotionScores gold, verse, mean, sd;
        for (std::size_t e = 0; e < kEmotionCount; ++e) {
            gold[e] = static_cast<double>(t) + 0.1 * static_cast<double>(e);
            verse[e] = gold[e] + 0.5;
            mean[e] = gold[e] + 0.25;
            sd[e] = 0.3;
        }
        if (with_gold) trace.gold.push_back(gold);
        trace.verse_scores.push_back(verse);
        trace.ssm_mean.push_back(mean);
        trace.ssm_sd.push_back(sd);
    }
    return trace;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("trace csv row counts", "[plot]") {
    const auto trace = three_verse_trace();
    std::string csv = std::string(kTraceCsvHeader) + "\n";
    append_trace_csv(csv, trace);
    // gold + verse + ssm + ssm_lo + ssm_hi = 5 series, 3 verses, 6 emotions
    CHECK(count_lines(csv) == 1 + 5 * 3 * kEmotionCount);

    const auto no_gold = three_verse_trace(false);
    std::string csv2 = std::string(kTraceCsvHeader) + "\n";
    append_trace_csv(csv2, no_gold);
    CHECK(count_lines(csv2) == 1 + 4 * 3 * kEmotionCount);
}

TEST_CASE("trace csv round-trips", "[plot]") {
    const std::vector<DynamicsTrace> traces = {three_verse_trace()};
    const std::string csv = traces_to_csv(traces);
    std::istringstream in(csv);
    const auto reloaded = traces_from_csv_stream(in, "mem");
    REQUIRE(reloaded.size() == 1);
    CHECK(reloaded[0].song_id == "s1");
    CHECK(reloaded[0].has_gold);
    CHECK(reloaded[0].has_ssm);
    REQUIRE(reloaded[0].length() == 3);
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t e = 0; e < kEmotionCount; ++e) {
            CHECK(std::abs(reloaded[0].gold[t][e] - traces[0].gold[t][e]) < 1e-9);
            CHECK(std::abs(reloaded[0].verse_scores[t][e] - traces[0].verse_scores[t][e]) <
                  1e-9);
            CHECK(std::abs(reloaded[0].ssm_mean[t][e] - traces[0].ssm_mean[t][e]) < 1e-9);
            CHECK(std::abs(reloaded[0].ssm_sd[t][e] - 0.3) < 1e-9);
        }
}

TEST_CASE("svg output", "[plot]") {
    SECTION("identical gold and model series overlap exactly") {
        auto trace = three_verse_trace();
        trace.ssm_mean = trace.gold;
        for (auto& sd : trace.ssm_sd) sd = EmotionScores{};
        const std::string svg = trace_to_svg(trace);
        REQUIRE(svg.find("<svg") == 0);

        // the gold polyline and the model polyline carry the same points
        const std::string gold_marker = "stroke=\"#228833\"";
        const std::string ssm_marker = "stroke=\"#4477aa\"";
        const auto gold_pos = svg.find("points=\"", svg.find(gold_marker));
        const auto ssm_pos =
            svg.find("points=\"", svg.find(ssm_marker, svg.find("<polyline")));
        REQUIRE(gold_pos != std::string::npos);
        REQUIRE(ssm_pos != std::string::npos);
        const std::string gold_pts = svg.substr(gold_pos, svg.find('"', gold_pos + 8) + 1 -
                                                              gold_pos);
        CHECK(svg.find(gold_pts, ssm_pos) != std::string::npos);
    }
    SECTION("one 800x300 viewport per emotion") {
        const std::string svg = trace_to_svg(three_verse_trace());
        CHECK(svg.find("viewBox=\"0 0 800.00 1800.00\"") != std::string::npos);
        std::size_t charts = 0, pos = 0;
        while ((pos = svg.find("height=\"300.00\"", pos)) != std::string::npos) {
            ++charts;
            pos += 1;
        }
        CHECK(charts == kEmotionCount);
        for (const char* name : kEmotionNames)
            CHECK(svg.find(std::string("/ ") + name) != std::string::npos);
    }
    SECTION("single-verse traces still render") {
        auto trace = three_verse_trace();
        trace.verse_ids.resize(1);
        trace.gold.resize(1);
        trace.verse_scores.resize(1);
        trace.ssm_mean.resize(1);
        trace.ssm_sd.resize(1);
        CHECK(trace_to_svg(trace).find("<svg") == 0);
    }
}

TEST_CASE("emit_plot validates input and destination", "[plot]") {
    testsupport::TempDir tmp;
    const auto trace = three_verse_trace();

    emit_plot(trace, PlotFormat::csv, tmp.path() / "trace.csv");
    emit_plot(trace, PlotFormat::svg, tmp.path() / "trace.svg");
    CHECK(testsupport::read_file(tmp.path() / "trace.csv").rfind(kTraceCsvHeader, 0) == 0);
    CHECK(testsupport::read_file(tmp.path() / "trace.svg").rfind("<svg", 0) == 0);

    DynamicsTrace empty;
    empty.song_id = "sx";
    CHECK_THROWS_AS(emit_plot(empty, PlotFormat::csv, tmp.path() / "x.csv"), InputError);

    CHECK_THROWS_AS(emit_plot(trace, PlotFormat::svg, tmp.path() / "missing" / "x.svg"),
                    InputError);

    CHECK(plot_format_from_string("svg") == PlotFormat::svg);
    CHECK_THROWS_AS(plot_format_from_string("png"), InputError);
}
