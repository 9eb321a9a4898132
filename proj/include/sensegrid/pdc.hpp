#pragma once

// Positional Diction Clustering.
//
// Sentences from different responses are grouped when they share wording and
// sit at a similar relative position in their responses. Single-link
// agglomeration over cross-response sentence pairs, visited in decreasing
// content similarity; a pair merges its two groups when
//
//     text_weight * content + position_weight * position > threshold
//
// and the merged group keeps at least min_distinct_ratio of its sentences
// from distinct responses.

#include "sensegrid/corpus.hpp"
#include "sensegrid/textproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace sensegrid {

struct pdc_params {
    double text_weight = 1.5;
    double position_weight = 1.0;
    double threshold = 1.2;
    double min_distinct_ratio = 0.7;

    bool operator==(const pdc_params&) const = default;
};

inline json to_json(const pdc_params& p) {
    return json{{"text_weight", p.text_weight},
                {"position_weight", p.position_weight},
                {"threshold", p.threshold},
                {"min_distinct_ratio", p.min_distinct_ratio}};
}

// Position of a sentence inside pdc_result::sentences.
struct sentence_ref {
    std::size_t response = 0;
    std::size_t index = 0;

    auto operator<=>(const sentence_ref&) const = default;
};

struct sentence_group {
    std::size_t id = 0;
    std::vector<sentence_ref> members;
    double median_pos = 0.0;
    double mean_pos = 0.0;
    double distinct_ratio = 1.0;
    bool is_singleton = true;
    // Interleaved line order (indices into members) and per-line gray flags.
    std::vector<std::size_t> order;
    std::vector<std::vector<bool>> gray;

    bool operator==(const sentence_group&) const = default;
};

struct pdc_result {
    std::vector<std::vector<sentence>> sentences;
    std::vector<sentence_group> groups;

    const sentence& at(const sentence_ref& r) const { return sentences[r.response][r.index]; }
};

// One accepted merge, reported to an optional observer.
struct merge_event {
    sentence_ref first;
    sentence_ref second;
    double content = 0.0;
    double position = 0.0;
    double gate = 0.0;
    std::size_t merged_size = 0;
    std::size_t merged_distinct = 0;
};

using merge_observer = std::function<void(const merge_event&)>;

namespace detail {

// Sorted (word, count) bag of a sentence's word tokens.
using word_bag = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

// |X in Y| + |Y in X| over two bags, and |X| + |Y|.
inline std::pair<std::size_t, std::size_t> overlap_counts(const word_bag& x, const word_bag& y) {
    std::size_t shared = 0, total = 0;
    for (const auto& e : x) total += e.second;
    for (const auto& e : y) total += e.second;
    auto i = x.begin();
    auto j = y.begin();
    while (i != x.end() && j != y.end()) {
        if (i->first < j->first) {
            ++i;
        } else if (j->first < i->first) {
            ++j;
        } else {
            shared += i->second + j->second;
            ++i;
            ++j;
        }
    }
    return {shared, total};
}

inline double ratio(std::pair<std::size_t, std::size_t> counts) {
    if (counts.second == 0) return 0.0;
    return static_cast<double>(counts.first) / static_cast<double>(counts.second);
}

inline bool sentence_less(const sentence& a, const sentence& b) {
    return std::tie(a.response_id, a.index) < std::tie(b.response_id, b.index);
}

inline std::size_t positional_overlap(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        if (a[i] == b[i]) ++n;
    return n;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

} // namespace detail

// (|X in Y| + |Y in X|) / (|X| + |Y|), where |X in Y| counts the word tokens
// of X whose form occurs anywhere in Y.
inline double content_similarity(const sentence& x, const sentence& y) {
    auto xw = x.words();
    auto yw = y.words();
    if (xw.empty() || yw.empty()) return 0.0;
    std::map<std::string, std::uint32_t> index;
    auto bag = [&](const std::vector<std::string>& words) {
        std::map<std::uint32_t, std::uint32_t> counts;
        for (const auto& w : words) {
            auto id = index.try_emplace(w, static_cast<std::uint32_t>(index.size())).first->second;
            ++counts[id];
        }
        return detail::word_bag(counts.begin(), counts.end());
    };
    auto bx = bag(xw);
    auto by = bag(yw);
    return detail::ratio(detail::overlap_counts(bx, by));
}

inline double position_similarity(const sentence& x, const sentence& y) {
    return 1.0 - std::fabs(x.norm_pos - y.norm_pos);
}

// Greedy chain: longest sentence first, then repeatedly the sentence sharing
// the most same-position words with the previous line. Ties go to the lowest
// (response_id, index).
inline std::vector<std::size_t> order_within_group_indices(const std::vector<const sentence*>& group) {
    const std::size_t n = group.size();
    std::vector<std::size_t> order;
    if (n == 0) return order;
    std::vector<std::vector<std::string>> words;
    words.reserve(n);
    for (const auto* s : group) words.push_back(s->words());
    std::vector<bool> placed(n, false);

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (words[i].size() > words[best].size() ||
            (words[i].size() == words[best].size() && detail::sentence_less(*group[i], *group[best])))
            best = i;
    }
    order.push_back(best);
    placed[best] = true;
    while (order.size() < n) {
        const auto& last = words[order.back()];
        std::size_t pick = n, pick_overlap = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (placed[i]) continue;
            auto ov = detail::positional_overlap(last, words[i]);
            if (pick == n || ov > pick_overlap ||
                (ov == pick_overlap && detail::sentence_less(*group[i], *group[pick]))) {
                pick = i;
                pick_overlap = ov;
            }
        }
        order.push_back(pick);
        placed[pick] = true;
    }
    return order;
}

inline std::vector<sentence> order_within_group(const std::vector<sentence>& group) {
    std::vector<const sentence*> ptrs;
    for (const auto& s : group) ptrs.push_back(&s);
    std::vector<sentence> out;
    for (auto i : order_within_group_indices(ptrs)) out.push_back(group[i]);
    return out;
}

// flags[k][i]: word i of line k equals word i of line k-1.
inline std::vector<std::vector<bool>> grayout_flags(const std::vector<const sentence*>& ordered) {
    std::vector<std::vector<bool>> flags;
    std::vector<std::string> prev;
    for (std::size_t k = 0; k < ordered.size(); ++k) {
        auto words = ordered[k]->words();
        std::vector<bool> line(words.size(), false);
        if (k > 0)
            for (std::size_t i = 0; i < words.size() && i < prev.size(); ++i) line[i] = words[i] == prev[i];
        flags.push_back(std::move(line));
        prev = std::move(words);
    }
    return flags;
}

inline std::vector<std::vector<bool>> grayout_flags(const std::vector<sentence>& ordered) {
    std::vector<const sentence*> ptrs;
    for (const auto& s : ordered) ptrs.push_back(&s);
    return grayout_flags(ptrs);
}

inline pdc_result cluster(std::vector<std::vector<sentence>> sentences, const pdc_params& params = {},
                          const merge_observer& observe = {}) {
    pdc_result result;
    result.sentences = std::move(sentences);
    const auto& sents = result.sentences;

    // Flat list in (response_id, index) order; that order is the tie-break everywhere.
    std::vector<sentence_ref> flat;
    for (std::size_t r = 0; r < sents.size(); ++r)
        for (std::size_t i = 0; i < sents[r].size(); ++i) flat.push_back({r, i});
    std::sort(flat.begin(), flat.end(), [&](const sentence_ref& a, const sentence_ref& b) {
        return detail::sentence_less(sents[a.response][a.index], sents[b.response][b.index]);
    });
    const std::size_t n = flat.size();
    if (n == 0) return result;

    std::unordered_map<std::string, std::uint32_t> vocab;
    std::vector<detail::word_bag> bags(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::map<std::uint32_t, std::uint32_t> counts;
        for (const auto& t : result.at(flat[k]).tokens)
            if (t.is_word)
                ++counts[vocab.try_emplace(t.norm, static_cast<std::uint32_t>(vocab.size())).first->second];
        bags[k].assign(counts.begin(), counts.end());
    }

    struct candidate {
        double content;
        double position;
        double gate;
        std::uint32_t a;
        std::uint32_t b;
    };
    std::vector<candidate> pairs;
    for (std::size_t a = 0; a < n; ++a) {
        const auto& sa = result.at(flat[a]);
        for (std::size_t b = a + 1; b < n; ++b) {
            if (flat[a].response == flat[b].response) continue;
            const auto& sb = result.at(flat[b]);
            double content = bags[a].empty() || bags[b].empty()
                                 ? 0.0
                                 : detail::ratio(detail::overlap_counts(bags[a], bags[b]));
            double position = position_similarity(sa, sb);
            double gate = params.text_weight * content + params.position_weight * position;
            // Pairs failing the gate can never merge; dropping them keeps the visiting order intact.
            if (gate > params.threshold + 1e-12)
                pairs.push_back({content, position, gate, static_cast<std::uint32_t>(a),
                                 static_cast<std::uint32_t>(b)});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const candidate& x, const candidate& y) {
        if (x.content != y.content) return x.content > y.content;
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });

    // Union-find; each root keeps its size and per-response counts.
    std::vector<std::size_t> parent(n), size(n, 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<std::map<std::size_t, std::size_t>> responses(n);
    for (std::size_t k = 0; k < n; ++k) responses[k][flat[k].response] = 1;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    for (const auto& p : pairs) {
        auto ra = find(p.a), rb = find(p.b);
        if (ra == rb) continue;
        const std::size_t merged = size[ra] + size[rb];
        std::size_t distinct = responses[ra].size();
        for (const auto& [resp, _] : responses[rb])
            if (!responses[ra].count(resp)) ++distinct;
        if (static_cast<double>(distinct) <
            params.min_distinct_ratio * static_cast<double>(merged) - 1e-9)
            continue;
        if (responses[ra].size() < responses[rb].size()) std::swap(ra, rb);
        for (const auto& [resp, cnt] : responses[rb]) responses[ra][resp] += cnt;
        responses[rb].clear();
        parent[rb] = ra;
        size[ra] = merged;
        if (observe)
            observe({flat[p.a], flat[p.b], p.content, p.position, p.gate, merged, distinct});
    }

    // Collect groups; members come out in flat order.
    std::map<std::size_t, std::size_t> slot;
    std::vector<sentence_group> groups;
    for (std::size_t k = 0; k < n; ++k) {
        auto root = find(k);
        auto [it, fresh] = slot.try_emplace(root, groups.size());
        if (fresh) groups.emplace_back();
        groups[it->second].members.push_back(flat[k]);
    }

    std::vector<std::size_t> doc_words(sents.size(), 0);
    for (std::size_t r = 0; r < sents.size(); ++r)
        for (const auto& s : sents[r]) doc_words[r] += s.word_count();

    for (auto& g : groups) {
        std::vector<double> pos;
        std::map<std::size_t, bool> distinct;
        for (const auto& m : g.members) {
            pos.push_back(result.at(m).norm_pos);
            distinct[m.response] = true;
        }
        g.median_pos = detail::median(pos);
        g.mean_pos = std::accumulate(pos.begin(), pos.end(), 0.0) / static_cast<double>(pos.size());
        g.distinct_ratio = static_cast<double>(distinct.size()) / static_cast<double>(g.members.size());
        g.is_singleton = g.members.size() == 1;

        std::vector<const sentence*> ptrs;
        for (const auto& m : g.members) ptrs.push_back(&result.at(m));
        g.order = order_within_group_indices(ptrs);
        std::vector<const sentence*> ordered;
        for (auto i : g.order) ordered.push_back(ptrs[i]);
        g.gray = grayout_flags(ordered);
    }

    // Median position ascending; ties put groups drawn from longer responses first.
    std::vector<std::size_t> idx(groups.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::size_t> longest(groups.size(), 0);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (const auto& m : groups[g].members) longest[g] = std::max(longest[g], doc_words[m.response]);
    // Groups were created in flat order of their first member, so the group index is that tie-break.
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        if (groups[x].median_pos != groups[y].median_pos) return groups[x].median_pos < groups[y].median_pos;
        if (longest[x] != longest[y]) return longest[x] > longest[y];
        return x < y;
    });
    result.groups.reserve(groups.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        result.groups.push_back(std::move(groups[idx[k]]));
        result.groups.back().id = k;
    }
    return result;
}

inline pdc_result cluster(const corpus& c, const pdc_params& params = {},
                          const merge_observer& observe = {}) {
    return cluster(segment(c), params, observe);
}

inline json to_json(const pdc_result& r) {
    json groups = json::array();
    for (const auto& g : r.groups) {
        json members = json::array();
        for (const auto& m : g.members) {
            const auto& s = r.at(m);
            members.push_back({{"response_id", s.response_id},
                               {"sentence_index", s.index},
                               {"char_span", to_json(s.span)}});
        }
        groups.push_back({{"id", g.id},
                          {"median_pos", g.median_pos},
                          {"mean_pos", g.mean_pos},
                          {"distinct_ratio", g.distinct_ratio},
                          {"is_singleton", g.is_singleton},
                          {"members", std::move(members)},
                          {"order", g.order},
                          {"gray", g.gray}});
    }
    return json{{"groups", std::move(groups)}};
}

} // namespace sensegrid
