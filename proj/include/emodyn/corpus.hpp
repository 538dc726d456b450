#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emodyn/emotions.hpp"
#include "emodyn/error.hpp"

namespace emodyn::corpus {

/// Strict UTF-8 validity check (rejects overlong forms and surrogates).
inline bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = s[i];
        std::size_t extra;
        unsigned char lo = 0x80, hi = 0xBF;
        if (c <= 0x7F) {
            ++i;
            continue;
        } else if (c >= 0xC2 && c <= 0xDF) {
            extra = 1;
        } else if (c == 0xE0) {
            extra = 2;
            lo = 0xA0;
        } else if (c >= 0xE1 && c <= 0xEC) {
            extra = 2;
        } else if (c == 0xED) {
            extra = 2;
            hi = 0x9F;
        } else if (c >= 0xEE && c <= 0xEF) {
            extra = 2;
        } else if (c == 0xF0) {
            extra = 3;
            lo = 0x90;
        } else if (c >= 0xF1 && c <= 0xF3) {
            extra = 3;
        } else if (c == 0xF4) {
            extra = 3;
            hi = 0x8F;
        } else {
            return false;
        }
        if (i + extra >= s.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            const unsigned char cc = s[i + k];
            const unsigned char lo_k = (k == 1) ? lo : 0x80;
            const unsigned char hi_k = (k == 1) ? hi : 0xBF;
            if (cc < lo_k || cc > hi_k) return false;
        }
        i += extra + 1;
    }
    return true;
}

/// Lowercases and splits on anything that is not alphanumeric, keeping
/// apostrophes that sit inside a word ("don't"). Bytes above 0x7F are kept
/// as word characters so UTF-8 letters survive intact.
inline std::vector<std::string> tokenize(std::string_view text) {
    auto is_word_char = [](unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; };

    std::vector<std::string> tokens;
    std::string current;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const unsigned char c = text[i];
        if (is_word_char(c)) {
            current += static_cast<char>(std::tolower(c));
        } else if (c == '\'' && !current.empty() && i + 1 < text.size() &&
                   is_word_char(static_cast<unsigned char>(text[i + 1]))) {
            current += '\'';
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

/// One sentence of the source dataset with its six emotion scores in
/// [0, 100] and a valence in [-100, 100] (parsed, unused downstream).
struct SourceRecord {
    std::string id;
    std::string text;
    EmotionScores scores;
    double valence = 0.0;
};

/// One verse of a song; gold intensities in [0, 10] are all-or-none per song.
struct Verse {
    std::string verse_id;
    std::string text;
    std::optional<EmotionScores> gold;
};

/// Ordered verses of one song; verse order is the file order and is the time
/// axis of the song-level model.
struct SongSequence {
    std::string song_id;
    std::vector<Verse> verses;

    bool has_gold() const { return !verses.empty() && verses.front().gold.has_value(); }
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

inline double parse_score(const std::string& field, double lo, double hi,
                          const std::string& context) {
    if (field.empty()) throw InputError(context + ": empty score");
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size())
        throw InputError(context + ": non-numeric score '" + field + "'");
    if (!(v >= lo && v <= hi))
        throw InputError(context + ": score " + field + " outside [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
    return v;
}

inline std::string format_score(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace detail

/// Canonical headlines TSV:
///   id \t text \t anger \t disgust \t fear \t joy \t sadness \t surprise \t valence
inline std::vector<SourceRecord> load_headlines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open source dataset: " + path.string());

    std::vector<SourceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string context = path.filename().string() + ":" + std::to_string(line_no);
        if (!valid_utf8(line)) throw InputError(context + ": invalid UTF-8");

        const auto fields = detail::split_tabs(line);
        if (fields.size() != 2 + kEmotionCount + 1)
            throw InputError(context + ": expected 9 columns, got " +
                             std::to_string(fields.size()));
        SourceRecord rec;
        rec.id = fields[0];
        rec.text = fields[1];
        if (rec.id.empty()) throw InputError(context + ": empty id");
        if (rec.text.empty()) throw InputError(context + ": empty text");
        for (std::size_t e = 0; e < kEmotionCount; ++e)
            rec.scores[e] = detail::parse_score(
                fields[2 + e], 0.0, 100.0,
                context + " column " + std::string(kEmotionNames[e]));
        rec.valence = detail::parse_score(fields[2 + kEmotionCount], -100.0, 100.0,
                                          context + " column valence");
        records.push_back(std::move(rec));
    }
    return records;
}

inline std::string serialize_headlines(const std::vector<SourceRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += rec.id + "\t" + rec.text;
        for (std::size_t e = 0; e < kEmotionCount; ++e)
            out += "\t" + detail::format_score(rec.scores[e]);
        out += "\t" + detail::format_score(rec.valence) + "\n";
    }
    return out;
}

/// Songs are JSONL, one object per line:
///   {"song_id": "...", "verses": [{"verse_id": "...", "text": "...",
///     "gold": {"anger": 0, ...}}, ...]}
/// `gold` is optional but must be present for all verses of a song or none.
inline std::vector<SongSequence> load_songs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open songs file: " + path.string());

    std::vector<SongSequence> songs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string context = path.filename().string() + ":" + std::to_string(line_no);

        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(context + ": malformed JSON (" + e.what() + ")");
        }
        if (!doc.is_object() || !doc.contains("song_id") || !doc["song_id"].is_string() ||
            !doc.contains("verses") || !doc["verses"].is_array())
            throw InputError(context + ": expected {song_id, verses[]}");

        SongSequence song;
        song.song_id = doc["song_id"].get<std::string>();
        if (doc["verses"].empty())
            throw InputError(context + ": song '" + song.song_id + "' has no verses");

        std::size_t gold_count = 0;
        for (const auto& item : doc["verses"]) {
            if (!item.is_object() || !item.contains("verse_id") ||
                !item["verse_id"].is_string() || !item.contains("text") ||
                !item["text"].is_string())
                throw InputError(context + ": verse entries need {verse_id, text}");
            Verse verse;
            verse.verse_id = item["verse_id"].get<std::string>();
            verse.text = item["text"].get<std::string>();
            if (item.contains("gold")) {
                const auto& gold = item["gold"];
                if (!gold.is_object() || gold.size() != kEmotionCount)
                    throw InputError(context + ": gold must hold exactly the six emotions");
                EmotionScores scores;
                for (std::size_t e = 0; e < kEmotionCount; ++e) {
                    const char* name = kEmotionNames[e];
                    if (!gold.contains(name) || !gold[name].is_number())
                        throw InputError(context + ": gold missing numeric '" +
                                         std::string(name) + "'");
                    const double v = gold[name].get<double>();
                    if (!(v >= 0.0 && v <= 10.0))
                        throw InputError(context + ": gold " + std::string(name) + " = " +
                                         std::to_string(v) + " outside [0, 10]");
                    scores[e] = v;
                }
                verse.gold = scores;
                ++gold_count;
            }
            song.verses.push_back(std::move(verse));
        }
        if (gold_count != 0 && gold_count != song.verses.size())
            throw InputError(context + ": song '" + song.song_id +
                             "' mixes verses with and without gold labels");
        songs.push_back(std::move(song));
    }
    return songs;
}

inline std::string serialize_songs(const std::vector<SongSequence>& songs) {
    std::string out;
    for (const auto& song : songs) {
        nlohmann::json verses = nlohmann::json::array();
        for (const auto& verse : song.verses) {
            nlohmann::json v{{"verse_id", verse.verse_id}, {"text", verse.text}};
            if (verse.gold) {
                nlohmann::json gold;
                for (std::size_t e = 0; e < kEmotionCount; ++e)
                    gold[kEmotionNames[e]] = (*verse.gold)[e];
                v["gold"] = std::move(gold);
            }
            verses.push_back(std::move(v));
        }
        const nlohmann::json doc{{"song_id", song.song_id}, {"verses", std::move(verses)}};
        out += doc.dump() + "\n";
    }
    return out;
}

inline std::size_t total_verses(const std::vector<SongSequence>& songs) {
    std::size_t n = 0;
    for (const auto& s : songs) n += s.verses.size();
    return n;
}

}  // namespace emodyn::corpus
