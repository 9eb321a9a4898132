#pragma once

// Tokenization, sentence segmentation, stop words and normalized sentence
// positions. Every analysis works on the output of this header.

#include "sensegrid/corpus.hpp"
#include "sensegrid/error.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace sensegrid {

struct char_span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start; }
    bool contains(const char_span& o) const { return start <= o.start && o.end <= end; }
    bool overlaps(const char_span& o) const { return start < o.end && o.start < end; }
    auto operator<=>(const char_span&) const = default;
};

inline json to_json(const char_span& s) { return json::array({s.start, s.end}); }
inline void to_json(json& j, const char_span& s) { j = to_json(s); }
inline void from_json(const json& j, char_span& s) {
    s.start = j.at(0).get<std::size_t>();
    s.end = j.at(1).get<std::size_t>();
}

struct token {
    std::string surface;
    std::string norm;
    char_span span;
    bool is_word = false;

    bool operator==(const token&) const = default;
};

struct sentence {
    std::string response_id;
    std::size_t index = 0;
    char_span span;
    std::vector<token> tokens;
    double norm_pos = 0.5;

    std::size_t word_count() const {
        return static_cast<std::size_t>(
            std::count_if(tokens.begin(), tokens.end(), [](const token& t) { return t.is_word; }));
    }
    std::vector<std::string> words() const {
        std::vector<std::string> out;
        for (const auto& t : tokens)
            if (t.is_word) out.push_back(t.norm);
        return out;
    }
};

namespace detail {

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_ascii_punct(char c) {
    auto u = static_cast<unsigned char>(c);
    return u < 0x80 && ((u >= 0x21 && u <= 0x2f) || (u >= 0x3a && u <= 0x40) ||
                        (u >= 0x5b && u <= 0x60) || (u >= 0x7b && u <= 0x7e));
}

// Multi-byte punctuation common in model output: curly quotes, dashes,
// ellipsis, guillemets, bullets.
inline constexpr std::array<std::string_view, 11> utf8_punct = {
    "“", "”", "‘", "’", "—", "–",
    "…", "«", "»", "•", "·"};

inline std::size_t punct_prefix(std::string_view s) {
    if (s.empty()) return 0;
    if (is_ascii_punct(s.front())) return 1;
    for (auto p : utf8_punct)
        if (s.starts_with(p)) return p.size();
    return 0;
}

inline std::size_t punct_suffix(std::string_view s) {
    if (s.empty()) return 0;
    if (is_ascii_punct(s.back())) return 1;
    for (auto p : utf8_punct)
        if (s.ends_with(p)) return p.size();
    return 0;
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// Maximal runs of non-whitespace bytes.
inline std::vector<char_span> chunks(std::string_view text) {
    std::vector<char_span> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        if (i == text.size()) break;
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        out.push_back({start, i});
    }
    return out;
}

inline constexpr std::array<std::string_view, 15> abbreviations = {
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "vs.",
    "etc.", "e.g.", "i.e.", "cf.", "approx.", "fig."};

inline bool is_closer(std::string_view s, std::size_t& len) {
    static constexpr std::array<std::string_view, 10> closers = {
        "\"", "'", ")", "]", "*", "_", "’", "”", "»", "}"};
    for (auto c : closers)
        if (s.ends_with(c)) {
            len = c.size();
            return true;
        }
    return false;
}

inline bool is_terminator_suffix(std::string_view s, std::size_t& len) {
    if (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) {
        len = 1;
        return true;
    }
    if (s.ends_with("…")) {
        len = 3;
        return true;
    }
    return false;
}

// Does a chunk close the sentence it belongs to?
inline bool chunk_ends_sentence(std::string_view chunk, bool first_in_sentence) {
    std::size_t len = 0;
    while (!chunk.empty() && is_closer(chunk, len)) chunk.remove_suffix(len);
    std::string_view body = chunk;
    std::size_t run = 0;
    while (!body.empty() && is_terminator_suffix(body, len)) {
        body.remove_suffix(len);
        ++run;
    }
    if (run == 0) return false;
    if (run == 1 && chunk.back() == '.') {
        std::string_view word = chunk;
        while (!word.empty()) {
            auto p = punct_prefix(word);
            if (p == 0 || word.size() == 1) break;
            word.remove_prefix(p);
        }
        auto lower = ascii_lower(word);
        if (std::find(abbreviations.begin(), abbreviations.end(), lower) != abbreviations.end())
            return false;
        // "1." opening a numbered list item.
        if (first_in_sentence && !body.empty() && body.size() <= 3 &&
            std::all_of(body.begin(), body.end(), [](char c) { return c >= '0' && c <= '9'; }))
            return false;
    }
    return true;
}

} // namespace detail

// Whitespace-delimited tokens with leading/trailing punctuation split off into
// non-word tokens. Offsets are shifted by `base`.
inline std::vector<token> tokenize(std::string_view text, std::size_t base = 0) {
    std::vector<token> out;
    auto emit = [&](std::size_t s, std::size_t e, bool word) {
        token t;
        t.surface = std::string(text.substr(s, e - s));
        t.norm = word ? detail::ascii_lower(t.surface) : t.surface;
        t.span = {base + s, base + e};
        t.is_word = word;
        out.push_back(std::move(t));
    };
    for (auto c : detail::chunks(text)) {
        std::size_t s = c.start, e = c.end;
        while (s < e) {
            auto p = detail::punct_prefix(text.substr(s, e - s));
            if (p == 0) break;
            s += p;
        }
        if (s == e) {
            emit(c.start, c.end, false);
            continue;
        }
        while (e > s) {
            auto p = detail::punct_suffix(text.substr(s, e - s));
            if (p == 0) break;
            e -= p;
        }
        if (s > c.start) emit(c.start, s, false);
        emit(s, e, true);
        if (e < c.end) emit(e, c.end, false);
    }
    return out;
}

// Sentence spans: terminal . ! ? (optionally followed by closing quotes or
// brackets) before whitespace, or a line break. Known abbreviations, decimal
// numbers and leading list enumerators ("1.") do not end a sentence.
inline std::vector<char_span> split_sentences(std::string_view text) {
    std::vector<char_span> out;
    auto cs = detail::chunks(text);
    bool open = false;
    char_span cur;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const auto& c = cs[i];
        if (open && i > 0) {
            auto gap = text.substr(cs[i - 1].end, c.start - cs[i - 1].end);
            if (gap.find('\n') != std::string_view::npos) {
                out.push_back(cur);
                open = false;
            }
        }
        bool first = !open;
        if (!open) {
            cur = {c.start, c.end};
            open = true;
        } else {
            cur.end = c.end;
        }
        if (detail::chunk_ends_sentence(text.substr(c.start, c.length()), first)) {
            out.push_back(cur);
            open = false;
        }
    }
    if (open) out.push_back(cur);
    return out;
}

// index / (count - 1), with single-sentence responses sitting at 0.5.
inline double normalized_position(std::size_t index, std::size_t count) {
    if (count == 0 || index >= count)
        throw precondition_error("normalized_position: index " + std::to_string(index) +
                                 " out of range for count " + std::to_string(count));
    if (count == 1) return 0.5;
    return static_cast<double>(index) / static_cast<double>(count - 1);
}

inline std::vector<sentence> segment(std::string_view text, std::string_view response_id) {
    auto spans = split_sentences(text);
    std::vector<sentence> out;
    out.reserve(spans.size());
    for (std::size_t i = 0; i < spans.size(); ++i) {
        sentence s;
        s.response_id = std::string(response_id);
        s.index = i;
        s.span = spans[i];
        s.tokens = tokenize(text.substr(spans[i].start, spans[i].length()), spans[i].start);
        s.norm_pos = normalized_position(i, spans.size());
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<sentence> segment(const response_record& r) { return segment(r.text, r.id); }

// Sentences of every record, in corpus order.
inline std::vector<std::vector<sentence>> segment(const corpus& c) {
    std::vector<std::vector<sentence>> out;
    out.reserve(c.size());
    for (const auto& r : c.records()) out.push_back(segment(r));
    return out;
}

inline constexpr std::string_view stop_list_version = "sensegrid-stop-1";

// Sorted, duplicate-free list of case-folded function words.
class stop_list {
public:
    stop_list() = default;

    explicit stop_list(std::vector<std::string> words) : words_(std::move(words)) {
        std::sort(words_.begin(), words_.end());
        words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
    }

    static const stop_list& builtin() {
        static const stop_list list(std::vector<std::string>(builtin_words.begin(), builtin_words.end()));
        return list;
    }

    // One word per line; surrounding whitespace and blank lines ignored.
    static stop_list from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw error("cannot open stop list '" + path + "'");
        std::vector<std::string> words;
        std::string line;
        while (std::getline(in, line)) {
            auto cs = detail::chunks(line);
            if (cs.empty()) continue;
            words.push_back(detail::ascii_lower(std::string_view(line).substr(cs[0].start, cs.back().end - cs[0].start)));
        }
        return stop_list(std::move(words));
    }

    bool contains(std::string_view norm) const {
        return std::binary_search(words_.begin(), words_.end(), norm,
                                  [](std::string_view a, std::string_view b) { return a < b; });
    }

    const std::vector<std::string>& words() const { return words_; }
    bool operator==(const stop_list&) const = default;

    // Shipped as data/stopwords.txt; the two must stay identical.
    static constexpr std::array<std::string_view, 175> builtin_words = {
    "a",
    "about",
    "above",
    "after",
    "again",
    "against",
    "all",
    "also",
    "am",
    "an",
    "and",
    "any",
    "are",
    "aren't",
    "as",
    "at",
    "be",
    "because",
    "been",
    "before",
    "being",
    "below",
    "between",
    "both",
    "but",
    "by",
    "can",
    "can't",
    "cannot",
    "could",
    "couldn't",
    "did",
    "didn't",
    "do",
    "does",
    "doesn't",
    "doing",
    "don't",
    "down",
    "during",
    "each",
    "either",
    "else",
    "ever",
    "few",
    "for",
    "from",
    "further",
    "had",
    "hadn't",
    "has",
    "hasn't",
    "have",
    "haven't",
    "having",
    "he",
    "he's",
    "her",
    "here",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "however",
    "i",
    "i'm",
    "i've",
    "if",
    "in",
    "into",
    "is",
    "isn't",
    "it",
    "it's",
    "its",
    "itself",
    "just",
    "let's",
    "may",
    "me",
    "might",
    "more",
    "most",
    "must",
    "my",
    "myself",
    "neither",
    "no",
    "nor",
    "not",
    "now",
    "of",
    "off",
    "on",
    "once",
    "only",
    "or",
    "other",
    "ought",
    "our",
    "ours",
    "ourselves",
    "out",
    "over",
    "own",
    "same",
    "shall",
    "she",
    "she's",
    "should",
    "shouldn't",
    "so",
    "some",
    "such",
    "than",
    "that",
    "that's",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "there's",
    "these",
    "they",
    "they're",
    "this",
    "those",
    "though",
    "through",
    "thus",
    "to",
    "too",
    "under",
    "until",
    "up",
    "upon",
    "us",
    "very",
    "was",
    "wasn't",
    "we",
    "we're",
    "were",
    "weren't",
    "what",
    "what's",
    "when",
    "where",
    "whether",
    "which",
    "while",
    "who",
    "whom",
    "whose",
    "why",
    "will",
    "with",
    "within",
    "without",
    "won't",
    "would",
    "wouldn't",
    "yet",
    "you",
    "you're",
    "you've",
    "your",
    "yours",
    "yourself",
    "yourselves"

    };

private:
    std::vector<std::string> words_;
};

inline bool is_stop_word(std::string_view norm) { return stop_list::builtin().contains(norm); }

} // namespace sensegrid
