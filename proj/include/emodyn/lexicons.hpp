#pragma once

#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emodyn/error.hpp"

namespace emodyn::lex {

enum class LabelKind { numerical, nominal };

struct LexiconSchema {
    std::string name;
    std::size_t width = 1;
    LabelKind label_kind = LabelKind::numerical;
};

/// The nine lexicons in their fixed declared order. Widths sum to 25.
inline const std::array<LexiconSchema, 9>& standard_schemas() {
    static const std::array<LexiconSchema, 9> schemas = {{
        {"nrc-emo-int", 1, LabelKind::numerical},
        {"sentiwordnet", 2, LabelKind::numerical},
        {"nrc-emo-lex", 1, LabelKind::nominal},
        {"nrc-hash-emo", 1, LabelKind::numerical},
        {"sentiment140", 3, LabelKind::numerical},
        {"emo-aff-neg", 3, LabelKind::numerical},
        {"hash-aff-neg", 3, LabelKind::numerical},
        {"hash-senti", 3, LabelKind::numerical},
        {"depechemood", 8, LabelKind::numerical},
    }};
    return schemas;
}

inline constexpr std::size_t kRawFeatureWidth = 25;

inline const LexiconSchema& schema_by_name(const std::string& name) {
    for (const auto& s : standard_schemas())
        if (s.name == name) return s;
    throw InputError("unknown lexicon schema: " + name);
}

inline std::vector<std::size_t> block_widths() {
    std::vector<std::size_t> widths;
    for (const auto& s : standard_schemas()) widths.push_back(s.width);
    return widths;
}

/// One lexicon: word -> feature vector of the declared width.
struct LexiconTable {
    std::string name;
    std::size_t width = 0;
    LabelKind label_kind = LabelKind::numerical;
    std::map<std::string, std::vector<double>> entries;
    std::size_t duplicate_count = 0;  // rows resolved by last-wins during parsing

    const std::vector<double>* find(const std::string& word) const {
        auto it = entries.find(word);
        return it == entries.end() ? nullptr : &it->second;
    }
};

inline LexiconTable empty_lexicon(const LexiconSchema& schema) {
    return LexiconTable{schema.name, schema.width, schema.label_kind, {}, 0};
}

namespace detail {

inline std::string lowercase_ascii(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

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

inline double parse_number(const std::string& field, const std::string& context) {
    if (field.empty()) throw InputError(context + ": empty numeric field");
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size())
        throw InputError(context + ": non-numeric field '" + field + "'");
    if (!std::isfinite(v)) throw InputError(context + ": non-finite value '" + field + "'");
    return v;
}

}  // namespace detail

/// Parses one canonical lexicon TSV: `word \t f1 [\t f2 ...]`, UTF-8,
/// '#'-prefixed comment lines skipped, duplicate words resolved last-wins.
/// Words are lowercased to match the corpus tokenizer.
inline LexiconTable parse_lexicon(const std::filesystem::path& path,
                                  const LexiconSchema& schema) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open lexicon file: " + path.string());

    LexiconTable table = empty_lexicon(schema);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        const std::string context = path.filename().string() + ":" + std::to_string(line_no);
        const auto fields = detail::split_tabs(line);
        if (fields.size() != schema.width + 1)
            throw InputError(context + ": expected " + std::to_string(schema.width + 1) +
                             " columns for lexicon '" + schema.name + "', got " +
                             std::to_string(fields.size()));
        if (fields[0].empty()) throw InputError(context + ": empty word");

        std::vector<double> values(schema.width);
        for (std::size_t i = 0; i < schema.width; ++i) {
            values[i] = detail::parse_number(fields[i + 1], context);
            if (schema.label_kind == LabelKind::nominal && values[i] != 0.0 && values[i] != 1.0)
                throw InputError(context + ": nominal lexicon '" + schema.name +
                                 "' requires 0/1 labels, got '" + fields[i + 1] + "'");
        }

        const std::string word = detail::lowercase_ascii(fields[0]);
        auto [it, inserted] = table.entries.insert_or_assign(word, std::move(values));
        (void)it;
        if (!inserted) ++table.duplicate_count;
    }
    return table;
}

/// Sorted unique token index; dense, 0-based, stable under re-serialization.
struct Vocabulary {
    std::vector<std::string> words;          // sorted
    std::map<std::string, std::size_t> index;

    std::size_t size() const { return words.size(); }

    std::optional<std::size_t> lookup(const std::string& word) const {
        auto it = index.find(word);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }

    std::string to_tsv() const {
        std::string out = "#emodyn-vocabulary\tv1\n";
        for (const auto& w : words) out += w + "\n";
        return out;
    }

    static Vocabulary from_words(std::vector<std::string> sorted_words) {
        Vocabulary v;
        v.words = std::move(sorted_words);
        for (std::size_t i = 0; i < v.words.size(); ++i) {
            if (i > 0 && !(v.words[i - 1] < v.words[i]))
                throw InputError("vocabulary words must be sorted and unique");
            v.index.emplace(v.words[i], i);
        }
        return v;
    }
};

/// Union of all tokens across both corpora, sorted for determinism.
inline Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& token_streams) {
    std::map<std::string, std::size_t> index;
    for (const auto& stream : token_streams)
        for (const auto& token : stream) index.emplace(token, 0);
    if (index.empty()) throw InputError("cannot build a vocabulary from an empty corpus");

    Vocabulary vocab;
    vocab.words.reserve(index.size());
    for (auto& [word, slot] : index) {
        slot = vocab.words.size();
        vocab.words.push_back(word);
    }
    vocab.index = std::move(index);
    return vocab;
}

/// Concatenation of the per-lexicon vectors in declared order; a miss in a
/// lexicon contributes a zero block of that lexicon's width.
inline std::vector<double> word_features(const std::string& word,
                                         std::span<const LexiconTable> tables) {
    std::size_t total = 0;
    for (const auto& t : tables) total += t.width;
    std::vector<double> out(total, 0.0);
    std::size_t offset = 0;
    for (const auto& t : tables) {
        if (const std::vector<double>* values = t.find(word))
            std::copy(values->begin(), values->end(), out.begin() + offset);
        offset += t.width;
    }
    return out;
}

/// Number of monomials of total degree <= degree over `width` variables,
/// i.e. C(width + degree, degree).
inline std::size_t expansion_size(std::size_t width, std::size_t degree) {
    std::size_t num = 1, den = 1;
    for (std::size_t i = 1; i <= degree; ++i) {
        num *= width + i;
        den *= i;
    }
    return num / den;
}

/// All monomials of total degree <= degree over one feature block, constant
/// term first, then degree by degree; within a degree the variable index
/// tuples are enumerated in non-decreasing lexicographic order (graded-lex).
inline std::vector<double> poly_expand_block(std::span<const double> block,
                                             std::size_t degree) {
    std::vector<double> out;
    out.reserve(expansion_size(block.size(), degree));
    out.push_back(1.0);
    if (block.empty()) return out;

    for (std::size_t deg = 1; deg <= degree; ++deg) {
        std::vector<std::size_t> combo(deg, 0);  // non-decreasing index tuple
        while (true) {
            double value = 1.0;
            for (std::size_t idx : combo) value *= block[idx];
            out.push_back(value);

            // advance the multiset odometer
            std::size_t pos = deg;
            while (pos > 0 && combo[pos - 1] == block.size() - 1) --pos;
            if (pos == 0) break;
            const std::size_t next = combo[pos - 1] + 1;
            for (std::size_t i = pos - 1; i < deg; ++i) combo[i] = next;
        }
    }
    return out;
}

/// Expands each per-lexicon block independently and concatenates in order.
inline std::vector<double> poly_expand(std::span<const double> features,
                                       std::span<const std::size_t> widths,
                                       std::size_t degree) {
    if (degree < 1) throw InputError("polynomial expansion requires degree >= 1");
    std::size_t total = 0;
    for (std::size_t w : widths) total += w;
    if (features.size() != total)
        throw DimensionError("feature vector length " + std::to_string(features.size()) +
                             " does not match declared block widths total " +
                             std::to_string(total));

    std::vector<double> out;
    std::size_t offset = 0;
    for (std::size_t w : widths) {
        const auto expanded = poly_expand_block(features.subspan(offset, w), degree);
        out.insert(out.end(), expanded.begin(), expanded.end());
        offset += w;
    }
    return out;
}

/// Per-word feature rows for a whole vocabulary: 25 columns raw, or the
/// block-wise polynomial expansion when degree >= 1 (267 at degree 3).
struct WordFeatureMatrix {
    Vocabulary vocab;
    std::size_t cols = 0;
    std::size_t poly_degree = 0;  // 0 = raw features
    std::vector<double> data;     // row-major, vocab.size() x cols

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data).subspan(i * cols, cols);
    }

    std::optional<std::span<const double>> row_of(const std::string& word) const {
        const auto idx = vocab.lookup(word);
        if (!idx) return std::nullopt;
        return row(*idx);
    }

    static WordFeatureMatrix build(Vocabulary vocab, std::span<const LexiconTable> tables,
                                   std::size_t poly_degree = 0) {
        WordFeatureMatrix m;
        m.poly_degree = poly_degree;
        const auto widths = [&] {
            std::vector<std::size_t> w;
            for (const auto& t : tables) w.push_back(t.width);
            return w;
        }();

        std::size_t raw_width = 0;
        for (std::size_t w : widths) raw_width += w;
        if (poly_degree == 0) {
            m.cols = raw_width;
        } else {
            m.cols = 0;
            for (std::size_t w : widths) m.cols += expansion_size(w, poly_degree);
        }

        m.data.reserve(vocab.size() * m.cols);
        for (const auto& word : vocab.words) {
            std::vector<double> features = word_features(word, tables);
            if (poly_degree > 0) features = poly_expand(features, widths, poly_degree);
            m.data.insert(m.data.end(), features.begin(), features.end());
        }
        m.vocab = std::move(vocab);
        return m;
    }

    std::string to_tsv() const {
        std::string out = "#emodyn-word-features\tv1\tdegree=" + std::to_string(poly_degree) +
                          "\tcols=" + std::to_string(cols) + "\n";
        char buf[64];
        for (std::size_t i = 0; i < vocab.size(); ++i) {
            out += vocab.words[i];
            for (double v : row(i)) {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out += '\t';
                out += buf;
            }
            out += '\n';
        }
        return out;
    }

    static WordFeatureMatrix from_tsv_stream(std::istream& in, const std::string& origin) {
        std::string line;
        if (!std::getline(in, line))
            throw InputError(origin + ": empty word-feature file");
        const auto header = detail::split_tabs(line);
        if (header.size() != 4 || header[0] != "#emodyn-word-features" || header[1] != "v1" ||
            header[2].rfind("degree=", 0) != 0 || header[3].rfind("cols=", 0) != 0)
            throw InputError(origin + ": not a v1 word-feature file");

        WordFeatureMatrix m;
        m.poly_degree = static_cast<std::size_t>(std::stoul(header[2].substr(7)));
        m.cols = static_cast<std::size_t>(std::stoul(header[3].substr(5)));

        std::vector<std::string> words;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const std::string context = origin + ":" + std::to_string(line_no);
            const auto fields = detail::split_tabs(line);
            if (fields.size() != m.cols + 1)
                throw InputError(context + ": expected " + std::to_string(m.cols + 1) +
                                 " columns, got " + std::to_string(fields.size()));
            words.push_back(fields[0]);
            for (std::size_t i = 1; i < fields.size(); ++i)
                m.data.push_back(detail::parse_number(fields[i], context));
        }
        m.vocab = Vocabulary::from_words(std::move(words));
        return m;
    }

    static WordFeatureMatrix load_tsv(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open word-feature file: " + path.string());
        return from_tsv_stream(in, path.filename().string());
    }
};

/// Loads every standard lexicon from a directory of `<name>.tsv` files.
/// Missing files are permitted and yield empty tables (every lookup misses);
/// their names are reported through `missing` when given.
inline std::vector<LexiconTable> load_lexicon_directory(
    const std::filesystem::path& dir, std::vector<std::string>* missing = nullptr) {
    if (!std::filesystem::is_directory(dir))
        throw InputError("lexicon directory not found: " + dir.string());
    std::vector<LexiconTable> tables;
    for (const auto& schema : standard_schemas()) {
        const auto path = dir / (schema.name + ".tsv");
        if (std::filesystem::exists(path)) {
            tables.push_back(parse_lexicon(path, schema));
        } else {
            if (missing) missing->push_back(schema.name);
            tables.push_back(empty_lexicon(schema));
        }
    }
    return tables;
}

}  // namespace emodyn::lex
