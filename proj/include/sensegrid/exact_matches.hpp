#pragma once

// Exact Matches: word-level common substrings shared across responses.
//
// Pipeline:
//   1. maximal common word runs for every pair of responses
//   2. split runs at sentence boundaries of either response
//   3. drop pieces shorter than min_words
//   4. re-match every surviving piece against the whole collection, drop
//      pieces contained in a longer piece, score and rank
//   5. keep the top min(max_sets, n / 2)
//
// Punctuation tokens are ignored for matching; occurrence spans run from the
// first matched word to the last one in the original text.

#include "sensegrid/corpus.hpp"
#include "sensegrid/error.hpp"
#include "sensegrid/textproc.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sensegrid {

struct exact_match_params {
    double length_weight = 0.75;
    double count_weight = 1.0;
    std::size_t min_words = 3;
    std::size_t max_sets = 12;

    bool operator==(const exact_match_params&) const = default;
};

inline json to_json(const exact_match_params& p) {
    return json{{"length_weight", p.length_weight},
                {"count_weight", p.count_weight},
                {"min_words", p.min_words},
                {"max_sets", p.max_sets}};
}

struct occurrence {
    std::string response_id;
    char_span span;

    bool operator==(const occurrence&) const = default;
};

struct match_set {
    std::vector<std::string> tokens;
    std::string key;
    std::vector<occurrence> occurrences;
    std::size_t word_len = 0;
    std::size_t resp_count = 0;
    double score = 0.0;

    bool operator==(const match_set&) const = default;
};

inline json to_json(const match_set& m) {
    json occ = json::array();
    for (const auto& o : m.occurrences)
        occ.push_back({{"response_id", o.response_id}, {"start", o.span.start}, {"end", o.span.end}});
    return json{{"key", m.key},
                {"score", m.score},
                {"word_len", m.word_len},
                {"resp_count", m.resp_count},
                {"occurrences", std::move(occ)}};
}

inline json to_json(const std::vector<match_set>& sets) {
    json arr = json::array();
    for (const auto& m : sets) arr.push_back(to_json(m));
    return arr;
}

inline double match_score(std::size_t word_len, std::size_t resp_count,
                          const exact_match_params& p = {}) {
    return p.length_weight * static_cast<double>(word_len) +
           p.count_weight * static_cast<double>(resp_count);
}

// Number of match sets retained for a collection of n responses.
inline std::size_t match_cap(std::size_t n, const exact_match_params& p = {}) {
    return std::min(p.max_sets, n / 2);
}

namespace detail {

using word_id = std::uint32_t;

struct id_seq_hash {
    std::size_t operator()(const std::vector<word_id>& v) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (auto x : v) {
            h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

class vocabulary {
public:
    word_id intern(const std::string& w) {
        auto [it, fresh] = ids_.try_emplace(w, static_cast<word_id>(words_.size()));
        if (fresh) words_.push_back(w);
        return it->second;
    }
    const std::string& word(word_id id) const { return words_[id]; }

private:
    std::unordered_map<std::string, word_id> ids_;
    std::vector<std::string> words_;
};

// Word tokens of one response, flattened across sentences.
struct word_seq {
    std::vector<word_id> ids;
    std::vector<std::size_t> sentence;
    std::vector<char_span> spans;
};

inline word_seq flatten(const std::vector<sentence>& sentences, vocabulary& vocab) {
    word_seq w;
    for (const auto& s : sentences)
        for (const auto& t : s.tokens) {
            if (!t.is_word) continue;
            w.ids.push_back(vocab.intern(t.norm));
            w.sentence.push_back(s.index);
            w.spans.push_back(t.span);
        }
    return w;
}

struct run {
    std::size_t a_pos = 0;
    std::size_t b_pos = 0;
    std::size_t len = 0;
};

// Every common run that cannot be extended left or right, of length >= min_len.
// Ordered longest first, then by position in a, then in b.
inline std::vector<run> maximal_runs(const std::vector<word_id>& a, const std::vector<word_id>& b,
                                     std::size_t min_len) {
    std::vector<run> out;
    const std::size_t na = a.size(), nb = b.size();
    if (na == 0 || nb == 0) return out;
    std::vector<std::uint32_t> prev(nb + 1, 0), cur(nb + 1, 0);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            cur[j + 1] = a[i] == b[j] ? prev[j] + 1 : 0;
            const std::size_t len = cur[j + 1];
            if (len >= min_len && (i + 1 == na || j + 1 == nb || a[i + 1] != b[j + 1]))
                out.push_back({i + 1 - len, j + 1 - len, len});
        }
        std::swap(prev, cur);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const run& x, const run& y) { return x.len > y.len; });
    return out;
}

// Pieces of a run lying inside one sentence of both responses.
inline std::vector<run> split_at_sentence_boundaries(const run& r, const word_seq& a,
                                                     const word_seq& b) {
    std::vector<run> out;
    std::size_t start = 0;
    for (std::size_t k = 1; k <= r.len; ++k) {
        bool boundary = k == r.len || a.sentence[r.a_pos + k] != a.sentence[r.a_pos + k - 1] ||
                        b.sentence[r.b_pos + k] != b.sentence[r.b_pos + k - 1];
        if (boundary) {
            out.push_back({r.a_pos + start, r.b_pos + start, k - start});
            start = k;
        }
    }
    return out;
}

using candidate_set = std::unordered_set<std::vector<word_id>, id_seq_hash>;

inline void collect_pair(const word_seq& a, const word_seq& b, std::size_t min_words,
                         candidate_set& out) {
    for (const auto& r : maximal_runs(a.ids, b.ids, min_words))
        for (const auto& piece : split_at_sentence_boundaries(r, a, b))
            if (piece.len >= min_words)
                out.emplace(a.ids.begin() + static_cast<std::ptrdiff_t>(piece.a_pos),
                            a.ids.begin() + static_cast<std::ptrdiff_t>(piece.a_pos + piece.len));
}

inline std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

} // namespace detail

// Maximal common word sequences of two responses, longest first.
inline std::vector<std::vector<std::string>> pairwise_common_substrings(
    const std::vector<sentence>& a, const std::vector<sentence>& b, std::size_t min_words = 3) {
    detail::vocabulary vocab;
    auto wa = detail::flatten(a, vocab);
    auto wb = detail::flatten(b, vocab);
    std::vector<std::vector<std::string>> out;
    for (const auto& r : detail::maximal_runs(wa.ids, wb.ids, min_words)) {
        std::vector<std::string> words;
        for (std::size_t k = 0; k < r.len; ++k) words.push_back(vocab.word(wa.ids[r.a_pos + k]));
        if (std::find(out.begin(), out.end(), words) == out.end()) out.push_back(std::move(words));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return x.size() != y.size() ? x.size() > y.size() : x < y;
    });
    return out;
}

inline std::vector<match_set> find_exact_matches(const corpus& c,
                                                 const std::vector<std::vector<sentence>>& sentences,
                                                 const exact_match_params& params = {}) {
    if (c.size() < 2) throw precondition_error("need at least two responses");
    if (params.min_words == 0) throw precondition_error("min_words must be at least 1");

    detail::vocabulary vocab;
    std::vector<detail::word_seq> seqs;
    seqs.reserve(c.size());
    for (const auto& s : sentences) seqs.push_back(detail::flatten(s, vocab));
    const std::size_t n = seqs.size();

    // Steps 1-3, pairs spread over worker threads.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, pairs.size() / 8));
    std::vector<detail::candidate_set> partial(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t p = w; p < pairs.size(); p += workers)
                    detail::collect_pair(seqs[pairs[p].first], seqs[pairs[p].second],
                                         params.min_words, partial[w]);
            });
    }
    detail::candidate_set merged;
    for (auto& part : partial) merged.merge(part);
    std::vector<std::vector<detail::word_id>> candidates(merged.begin(), merged.end());
    std::sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
        return x.size() != y.size() ? x.size() > y.size() : x < y;
    });

    // Step 4a: drop candidates contained in a strictly longer candidate.
    std::unordered_map<detail::word_id, std::vector<std::pair<std::size_t, std::size_t>>> starts;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci)
        for (std::size_t off = 0; off < candidates[ci].size(); ++off)
            starts[candidates[ci][off]].emplace_back(ci, off);
    std::vector<std::size_t> kept;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const auto& cand = candidates[ci];
        bool contained = false;
        for (const auto& [di, off] : starts[cand.front()]) {
            const auto& longer = candidates[di];
            if (longer.size() <= cand.size() || off + cand.size() > longer.size()) continue;
            if (std::equal(cand.begin(), cand.end(), longer.begin() + static_cast<std::ptrdiff_t>(off))) {
                contained = true;
                break;
            }
        }
        if (!contained) kept.push_back(ci);
    }

    // Step 4b: occurrences in every response, sentence-bounded, non-overlapping.
    std::unordered_map<detail::word_id, std::vector<std::pair<std::size_t, std::size_t>>> postings;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t pos = 0; pos < seqs[r].ids.size(); ++pos)
            postings[seqs[r].ids[pos]].emplace_back(r, pos);

    std::vector<match_set> result;
    result.reserve(kept.size());
    for (auto ci : kept) {
        const auto& cand = candidates[ci];
        match_set m;
        for (auto id : cand) m.tokens.push_back(vocab.word(id));
        m.key = detail::join_words(m.tokens);
        m.word_len = cand.size();
        std::size_t last_resp = n, last_end = 0;
        for (const auto& [r, pos] : postings[cand.front()]) {
            const auto& s = seqs[r];
            if (pos + cand.size() > s.ids.size()) continue;
            if (s.sentence[pos] != s.sentence[pos + cand.size() - 1]) continue;
            if (!std::equal(cand.begin(), cand.end(), s.ids.begin() + static_cast<std::ptrdiff_t>(pos))) continue;
            if (r == last_resp && pos < last_end) continue;
            if (r != last_resp) ++m.resp_count;
            last_resp = r;
            last_end = pos + cand.size();
            m.occurrences.push_back({c.records()[r].id, {s.spans[pos].start, s.spans[pos + cand.size() - 1].end}});
        }
        m.score = match_score(m.word_len, m.resp_count, params);
        result.push_back(std::move(m));
    }

    // Step 5.
    std::sort(result.begin(), result.end(), [](const match_set& x, const match_set& y) {
        return x.score != y.score ? x.score > y.score : x.key < y.key;
    });
    result.resize(std::min(result.size(), match_cap(n, params)));
    return result;
}

inline std::vector<match_set> find_exact_matches(const corpus& c, const exact_match_params& params = {}) {
    if (c.size() < 2) throw precondition_error("need at least two responses");
    return find_exact_matches(c, segment(c), params);
}

} // namespace sensegrid
