#pragma once

// Unique Words: per-response top TF-IDF words, stop words removed.
// score(w, d) = tf(w, d) * ln(N / df(w)), raw counts, no smoothing.

#include "sensegrid/corpus.hpp"
#include "sensegrid/textproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace sensegrid {

inline constexpr std::size_t unique_words_per_response = 5;

struct scored_word {
    std::string word;
    double score = 0.0;
    std::vector<char_span> spans;

    bool operator==(const scored_word&) const = default;
};

struct unique_words_result {
    // Keyed by response id; ordered by score, then word.
    std::map<std::string, std::vector<scored_word>> per_response;

    bool operator==(const unique_words_result&) const = default;
};

inline json to_json(const unique_words_result& r) {
    json out = json::object();
    for (const auto& [id, words] : r.per_response) {
        json arr = json::array();
        for (const auto& w : words) {
            json spans = json::array();
            for (const auto& s : w.spans) spans.push_back(to_json(s));
            arr.push_back({{"word", w.word}, {"score", w.score}, {"spans", std::move(spans)}});
        }
        out[id] = std::move(arr);
    }
    return out;
}

// Scores equal up to floating noise count as ties.
inline bool same_score(double a, double b) {
    return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

using tfidf_table = std::map<std::string, std::map<std::string, double>>;

namespace detail {

struct term_counts {
    std::vector<std::map<std::string, std::size_t>> tf;
    std::map<std::string, std::size_t> df;
};

inline term_counts count_terms(const std::vector<std::vector<sentence>>& sentences,
                               const stop_list& stops) {
    term_counts tc;
    tc.tf.resize(sentences.size());
    for (std::size_t d = 0; d < sentences.size(); ++d) {
        for (const auto& s : sentences[d])
            for (const auto& t : s.tokens)
                if (t.is_word && !stops.contains(t.norm)) ++tc.tf[d][t.norm];
        for (const auto& [w, _] : tc.tf[d]) ++tc.df[w];
    }
    return tc;
}

inline double tfidf(std::size_t tf, std::size_t df, std::size_t n) {
    return static_cast<double>(tf) * std::log(static_cast<double>(n) / static_cast<double>(df));
}

} // namespace detail

// (response_id -> word -> score) for every non-stop word of every response.
inline tfidf_table compute_tfidf(const corpus& c, const std::vector<std::vector<sentence>>& sentences,
                                 const stop_list& stops = stop_list::builtin()) {
    auto tc = detail::count_terms(sentences, stops);
    tfidf_table table;
    for (std::size_t d = 0; d < c.size(); ++d) {
        auto& row = table[c.records()[d].id];
        for (const auto& [w, tf] : tc.tf[d]) row[w] = detail::tfidf(tf, tc.df.at(w), c.size());
    }
    return table;
}

inline tfidf_table compute_tfidf(const corpus& c, const stop_list& stops = stop_list::builtin()) {
    return compute_tfidf(c, segment(c), stops);
}

inline unique_words_result unique_words(const corpus& c,
                                        const std::vector<std::vector<sentence>>& sentences,
                                        const stop_list& stops = stop_list::builtin()) {
    auto tc = detail::count_terms(sentences, stops);
    unique_words_result result;
    for (std::size_t d = 0; d < c.size(); ++d) {
        std::vector<scored_word> ranked;
        for (const auto& [w, tf] : tc.tf[d]) {
            double s = detail::tfidf(tf, tc.df.at(w), c.size());
            if (s > 0.0 && !same_score(s, 0.0)) ranked.push_back({w, s, {}});
        }
        std::sort(ranked.begin(), ranked.end(), [](const scored_word& a, const scored_word& b) {
            if (!same_score(a.score, b.score)) return a.score > b.score;
            return a.word < b.word;
        });
        if (ranked.size() > unique_words_per_response) ranked.resize(unique_words_per_response);
        for (auto& w : ranked)
            for (const auto& s : sentences[d])
                for (const auto& t : s.tokens)
                    if (t.is_word && t.norm == w.word) w.spans.push_back(t.span);
        result.per_response[c.records()[d].id] = std::move(ranked);
    }
    return result;
}

inline unique_words_result unique_words(const corpus& c, const stop_list& stops = stop_list::builtin()) {
    return unique_words(c, segment(c), stops);
}

} // namespace sensegrid
