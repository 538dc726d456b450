#include <catch2/catch_amalgamated.hpp>

#include "emodyn/corpus.hpp"
#include "support/tmpdir.hpp"

using Catch::Matchers::ContainsSubstring;
using namespace emodyn;
using namespace emodyn::corpus;

TEST_CASE("tokenizer", "[corpus]") {
    CHECK(tokenize("When it rain and rain,") ==
          std::vector<std::string>{"when", "it", "rain", "and", "rain"});
    CHECK(tokenize("don't Stop") == std::vector<std::string>{"don't", "stop"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("  ...  ").empty());
    CHECK(tokenize("rock'n'roll!") == std::vector<std::string>{"rock'n'roll"});
    CHECK(tokenize("'ello end'") == std::vector<std::string>{"ello", "end"});
    CHECK(tokenize("ABC123 x-y") == std::vector<std::string>{"abc123", "x", "y"});
    // multibyte letters survive as word characters
    CHECK(tokenize("na\xc3\xafve song") == std::vector<std::string>{"na\xc3\xafve", "song"});
}

TEST_CASE("utf-8 validation", "[corpus]") {
    CHECK(valid_utf8("plain ascii"));
    CHECK(valid_utf8("na\xc3\xafve"));
    CHECK(valid_utf8("\xe2\x9d\xa4"));
    CHECK_FALSE(valid_utf8("\xc3"));            // truncated
    CHECK_FALSE(valid_utf8("\x80stray"));       // bare continuation
    CHECK_FALSE(valid_utf8("\xc0\xaf"));        // overlong
    CHECK_FALSE(valid_utf8("\xed\xa0\x80"));    // surrogate
}

namespace {

std::string valid_headline_line(const std::string& id, const std::string& text) {
    return id + "\t" + text + "\t10\t0\t5\t80\t2\t0\t55\n";
}

}  // namespace

TEST_CASE("headline loading", "[corpus]") {
    testsupport::TempDir tmp;

    SECTION("valid fixture") {
        const auto path = tmp.write("headlines.tsv", valid_headline_line("h1", "storm hits") +
                                                         valid_headline_line("h2", "sunny day"));
        const auto records = load_headlines(path);
        REQUIRE(records.size() == 2);
        CHECK(records[0].id == "h1");
        CHECK(records[0].scores[3] == 80.0);
        CHECK(records[0].valence == 55.0);
    }
    SECTION("out-of-range score names line and column") {
        const auto path = tmp.write("headlines.tsv",
                                    valid_headline_line("h1", "fine") +
                                        "h2\tbroken\t10\t0\t101\t3\t2\t0\t0\n");
        CHECK_THROWS_WITH(load_headlines(path),
                          ContainsSubstring(":2") && ContainsSubstring("fear"));
    }
    SECTION("missing column") {
        const auto path = tmp.write("headlines.tsv", "h1\tshort\t1\t2\t3\n");
        CHECK_THROWS_WITH(load_headlines(path), ContainsSubstring("9 columns"));
    }
    SECTION("bad utf-8") {
        const auto path = tmp.write("headlines.tsv", "h1\tbr\xc0\xafken\t1\t2\t3\t4\t5\t6\t7\n");
        CHECK_THROWS_WITH(load_headlines(path), ContainsSubstring("UTF-8"));
    }
    SECTION("valence range enforced") {
        const auto path = tmp.write("headlines.tsv", "h1\ttext\t1\t2\t3\t4\t5\t6\t-150\n");
        CHECK_THROWS_WITH(load_headlines(path), ContainsSubstring("valence"));
    }
}

TEST_CASE("song loading", "[corpus]") {
    testsupport::TempDir tmp;
    const std::string gold =
        R"({"anger": 1, "disgust": 0, "fear": 2, "joy": 8.5, "sadness": 0.5, "surprise": 0})";

    SECTION("fixture with two songs") {
        const std::string jsonl =
            R"({"song_id": "s1", "verses": [)"
            R"({"verse_id": "s1v1", "text": "first", "gold": )" + gold + R"(},)"
            R"({"verse_id": "s1v2", "text": "second", "gold": )" + gold + R"(},)"
            R"({"verse_id": "s1v3", "text": "third", "gold": )" + gold + R"(}]})" "\n"
            R"({"song_id": "s2", "verses": [)"
            R"({"verse_id": "s2v1", "text": "one"},)"
            R"({"verse_id": "s2v2", "text": "two"}]})" "\n";
        const auto songs = load_songs(tmp.write("songs.jsonl", jsonl));
        REQUIRE(songs.size() == 2);
        CHECK(total_verses(songs) == 5);
        CHECK(songs[0].has_gold());
        CHECK_FALSE(songs[1].has_gold());
        CHECK(songs[0].verses[0].gold->values[3] == 8.5);
        // verse order is exactly file order
        CHECK(songs[0].verses[2].verse_id == "s1v3");
    }
    SECTION("gold on only some verses is rejected") {
        const std::string jsonl =
            R"({"song_id": "s1", "verses": [)"
            R"({"verse_id": "v1", "text": "a", "gold": )" + gold + R"(},)"
            R"({"verse_id": "v2", "text": "b"}]})" "\n";
        CHECK_THROWS_WITH(load_songs(tmp.write("songs.jsonl", jsonl)),
                          ContainsSubstring("mixes"));
    }
    SECTION("empty song is rejected") {
        CHECK_THROWS_WITH(
            load_songs(tmp.write("songs.jsonl", R"({"song_id": "s1", "verses": []})" "\n")),
            ContainsSubstring("no verses"));
    }
    SECTION("malformed line carries its number") {
        const std::string jsonl =
            R"({"song_id": "s1", "verses": [{"verse_id": "v1", "text": "a"}]})" "\n"
            "{not json\n";
        CHECK_THROWS_WITH(load_songs(tmp.write("songs.jsonl", jsonl)),
                          ContainsSubstring(":2"));
    }
    SECTION("gold out of range") {
        const std::string jsonl =
            R"({"song_id": "s1", "verses": [{"verse_id": "v1", "text": "a", "gold": )"
            R"({"anger": 11, "disgust": 0, "fear": 0, "joy": 0, "sadness": 0, "surprise": 0}}]})"
            "\n";
        CHECK_THROWS_WITH(load_songs(tmp.write("songs.jsonl", jsonl)),
                          ContainsSubstring("outside [0, 10]"));
    }
}

TEST_CASE("canonical serialization is idempotent", "[corpus]") {
    testsupport::TempDir tmp;

    const auto headlines = tmp.write("headlines.tsv",
                                     valid_headline_line("h1", "storm hits coast") +
                                         valid_headline_line("h2", "don't panic"));
    const auto records = load_headlines(headlines);
    const std::string once = serialize_headlines(records);
    const auto reloaded = load_headlines(tmp.write("again.tsv", once));
    CHECK(serialize_headlines(reloaded) == once);
    CHECK(reloaded.size() == records.size());
    CHECK(reloaded[1].text == "don't panic");

    const std::string jsonl =
        R"({"song_id": "s9", "verses": [{"verse_id": "v1", "text": "la la"}]})" "\n";
    const auto songs = load_songs(tmp.write("songs.jsonl", jsonl));
    const std::string canonical = serialize_songs(songs);
    const auto songs2 = load_songs(tmp.write("songs2.jsonl", canonical));
    CHECK(serialize_songs(songs2) == canonical);
}
