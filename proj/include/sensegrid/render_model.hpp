#pragma once

// Presentation-agnostic view models: grid with highlight layers, interleaved
// PDC document, and the grouped linear baseline. Views only carry indices
// into a 12-color palette; the palette itself travels alongside.

#include "sensegrid/analysis.hpp"
#include "sensegrid/corpus.hpp"
#include "sensegrid/error.hpp"
#include "sensegrid/pdc.hpp"

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace sensegrid {

inline constexpr std::size_t palette_size = 12;

struct palette {
    std::vector<std::string> colors;

    static palette builtin() {
        return {{"#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0",
                 "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff"}};
    }

    // One color per line, exactly twelve.
    static palette from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw error("cannot open palette '" + path + "'");
        palette p;
        std::string line;
        while (std::getline(in, line)) {
            auto cs = detail::chunks(line);
            if (!cs.empty()) p.colors.emplace_back(line.substr(cs[0].start, cs[0].length()));
        }
        if (p.colors.size() != palette_size)
            throw error("palette '" + path + "' must list exactly 12 colors, found " +
                        std::to_string(p.colors.size()));
        return p;
    }

    bool operator==(const palette&) const = default;
};

// Rank i gets color i; items past the palette get nothing.
template <class Item>
std::map<Item, std::size_t> assign_colors(const std::vector<Item>& ranked) {
    std::map<Item, std::size_t> out;
    for (std::size_t i = 0; i < ranked.size() && i < palette_size; ++i) out.emplace(ranked[i], i);
    return out;
}

struct grid_spec {
    std::string row_dim;
    std::string col_dim;
    std::map<std::string, std::string> fixed;
    feature kind = feature::none;
};

struct highlight {
    std::string response_id;
    char_span span;
    std::size_t color = 0;

    bool operator==(const highlight&) const = default;
};

struct legend_entry {
    std::size_t color = 0;
    std::string label;

    bool operator==(const legend_entry&) const = default;
};

struct grid_view {
    feature kind = feature::none;
    std::string row_dim;
    std::string col_dim;
    std::map<std::string, std::string> fixed;
    std::vector<std::string> row_values;
    std::vector<std::string> col_values;
    // Empty string marks an empty cell.
    std::vector<std::vector<std::string>> cells;
    std::map<std::string, std::string> texts;
    std::vector<highlight> highlights;
    std::vector<legend_entry> legend;
    std::vector<std::string> palette;

    bool operator==(const grid_view&) const = default;
};

struct interleaved_word {
    std::string text;
    char_span span;
    bool gray = false;

    bool operator==(const interleaved_word&) const = default;
};

struct interleaved_line {
    std::string response_id;
    std::size_t sentence_index = 0;
    // Index into the badge legend; -1 when the response lacks the badge dimension.
    int badge = -1;
    char_span span;
    std::string text;
    std::vector<interleaved_word> words;

    bool operator==(const interleaved_line&) const = default;
};

struct interleaved_block {
    std::size_t group_id = 0;
    double median_pos = 0.0;
    double mean_pos = 0.0;
    std::vector<interleaved_line> lines;

    bool operator==(const interleaved_block&) const = default;
};

struct interleaved_view {
    std::string badge_dim;
    std::vector<legend_entry> badges;
    std::vector<interleaved_block> blocks;
    std::vector<std::string> palette;

    bool operator==(const interleaved_view&) const = default;
};

struct linear_group {
    std::string label;
    std::vector<std::string> response_ids;
    bool collapsed = false;

    bool operator==(const linear_group&) const = default;
};

struct linear_view {
    std::string group_dim;
    std::vector<linear_group> groups;

    bool operator==(const linear_view&) const = default;
};

namespace detail {

inline void require_dimension(const corpus& c, const std::string& name) {
    if (!c.find_dimension(name)) throw precondition_error("unknown dimension '" + name + "'");
}

inline std::string describe(const std::map<std::string, std::string>& kv) {
    std::string out;
    for (const auto& [k, v] : kv) {
        if (!out.empty()) out += ", ";
        out += k + "=" + v;
    }
    return out;
}

// Accept spans in priority order; a span overlapping an accepted one is dropped.
inline std::vector<highlight> resolve_layers(const std::vector<highlight>& by_priority) {
    std::map<std::string, std::vector<char_span>> taken;
    std::vector<highlight> out;
    for (const auto& h : by_priority) {
        auto& spans = taken[h.response_id];
        bool clash = std::any_of(spans.begin(), spans.end(),
                                 [&](const char_span& s) { return s.overlaps(h.span); });
        if (clash) continue;
        spans.push_back(h.span);
        out.push_back(h);
    }
    std::sort(out.begin(), out.end(), [](const highlight& a, const highlight& b) {
        return std::tie(a.response_id, a.span) < std::tie(b.response_id, b.span);
    });
    return out;
}

// PDC groups with more than one member, largest first.
inline std::vector<std::size_t> ranked_multi_groups(const pdc_result& p) {
    std::vector<std::size_t> out;
    for (std::size_t g = 0; g < p.groups.size(); ++g)
        if (p.groups[g].members.size() > 1) out.push_back(g);
    std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
        return p.groups[a].members.size() > p.groups[b].members.size();
    });
    return out;
}

} // namespace detail

inline void validate(const corpus& c, const grid_spec& spec) {
    detail::require_dimension(c, spec.row_dim);
    detail::require_dimension(c, spec.col_dim);
    if (spec.row_dim == spec.col_dim)
        throw precondition_error("rows and columns must use different dimensions");
    for (const auto& [name, value] : spec.fixed) {
        if (name == spec.row_dim || name == spec.col_dim)
            throw precondition_error("dimension '" + name + "' is already used for rows or columns");
        const auto* d = c.find_dimension(name);
        if (!d) throw precondition_error("unknown dimension '" + name + "'");
        if (!d->contains(value))
            throw precondition_error("unknown value '" + value + "' for dimension '" + name + "'");
    }
    for (const auto& d : c.dimensions()) {
        if (d.values.size() < 2 || d.name == spec.row_dim || d.name == spec.col_dim ||
            spec.fixed.count(d.name))
            continue;
        throw precondition_error("dimension '" + d.name + "' has " + std::to_string(d.values.size()) +
                                 " values; fix it to one value (e.g. " + d.name + "=" + d.values.front() +
                                 ")");
    }
}

inline grid_view build_grid(const corpus& c, const grid_spec& spec, const analysis_result& analysis,
                            const palette& colors = palette::builtin()) {
    validate(c, spec);
    if (spec.kind != feature::none && analysis.kind != spec.kind)
        throw precondition_error("analysis for '" + std::string(to_string(analysis.kind)) +
                                 "' does not match grid feature '" + std::string(to_string(spec.kind)) + "'");

    grid_view v;
    v.kind = spec.kind;
    v.row_dim = spec.row_dim;
    v.col_dim = spec.col_dim;
    v.fixed = spec.fixed;
    v.row_values = c.find_dimension(spec.row_dim)->values;
    v.col_values = c.find_dimension(spec.col_dim)->values;
    v.palette = colors.colors;
    v.cells.assign(v.row_values.size(), std::vector<std::string>(v.col_values.size()));

    std::map<std::string, bool> visible;
    for (std::size_t r = 0; r < v.row_values.size(); ++r) {
        for (std::size_t col = 0; col < v.col_values.size(); ++col) {
            std::vector<const response_record*> hits;
            for (const auto& rec : c.records()) {
                if (dimension_value(rec, spec.row_dim) != v.row_values[r]) continue;
                if (dimension_value(rec, spec.col_dim) != v.col_values[col]) continue;
                bool ok = std::all_of(spec.fixed.begin(), spec.fixed.end(), [&](const auto& f) {
                    return dimension_value(rec, f.first) == f.second;
                });
                if (ok) hits.push_back(&rec);
            }
            if (hits.size() > 1) {
                std::map<std::string, std::string> where = {{spec.row_dim, v.row_values[r]},
                                                            {spec.col_dim, v.col_values[col]}};
                throw precondition_error("ambiguous cell (" + detail::describe(where) + "): " +
                                         std::to_string(hits.size()) +
                                         " responses match; fix another dimension to select one");
            }
            if (hits.empty()) continue;
            v.cells[r][col] = hits.front()->id;
            v.texts[hits.front()->id] = hits.front()->text;
            visible[hits.front()->id] = true;
        }
    }

    std::vector<highlight> layers;
    if (spec.kind == feature::exact_matches) {
        const auto& sets = *analysis.exact();
        std::vector<std::size_t> ranks(sets.size());
        for (std::size_t i = 0; i < ranks.size(); ++i) ranks[i] = i;
        for (const auto& [rank, color] : assign_colors(ranks)) {
            v.legend.push_back({color, sets[rank].key});
            for (const auto& o : sets[rank].occurrences)
                if (visible.count(o.response_id)) layers.push_back({o.response_id, o.span, color});
        }
    } else if (spec.kind == feature::unique_words) {
        v.legend.push_back({0, "unique words"});
        for (const auto& [id, words] : analysis.unique()->per_response) {
            if (!visible.count(id)) continue;
            for (const auto& w : words)
                for (const auto& s : w.spans) layers.push_back({id, s, 0});
        }
    } else if (spec.kind == feature::pdc) {
        const auto& p = *analysis.pdc();
        auto ranked = detail::ranked_multi_groups(p);
        auto colors_by_group = assign_colors(ranked);
        for (std::size_t rank = 0; rank < ranked.size() && rank < palette_size; ++rank) {
            const auto& group = p.groups[ranked[rank]];
            const auto color = colors_by_group.at(ranked[rank]);
            v.legend.push_back({color, "group " + std::to_string(group.id) + " (" +
                                           std::to_string(group.members.size()) + " sentences)"});
            for (const auto& m : group.members) {
                const auto& s = p.at(m);
                if (visible.count(s.response_id)) layers.push_back({s.response_id, s.span, color});
            }
        }
    }
    v.highlights = detail::resolve_layers(layers);
    return v;
}

inline interleaved_view build_interleaved(const corpus& c, const pdc_result& p, const std::string& badge_dim,
                                          const palette& colors = palette::builtin()) {
    interleaved_view v;
    v.badge_dim = badge_dim;
    v.palette = colors.colors;
    if (c.empty()) return v;
    const auto* d = c.find_dimension(badge_dim);
    if (!d) throw precondition_error("unknown dimension '" + badge_dim + "'");
    if (d->values.size() > palette_size)
        throw precondition_error("badge dimension '" + badge_dim + "' has " + std::to_string(d->values.size()) +
                                 " values; at most 12 are supported");
    for (std::size_t i = 0; i < d->values.size(); ++i) v.badges.push_back({i, badge_dim + "=" + d->values[i]});

    for (const auto& g : p.groups) {
        interleaved_block block;
        block.group_id = g.id;
        block.median_pos = g.median_pos;
        block.mean_pos = g.mean_pos;
        for (std::size_t k = 0; k < g.order.size(); ++k) {
            const auto& s = p.at(g.members[g.order[k]]);
            const auto* rec = c.find(s.response_id);
            interleaved_line line;
            line.response_id = s.response_id;
            line.sentence_index = s.index;
            line.span = s.span;
            if (rec) {
                line.text = rec->text.substr(s.span.start, s.span.length());
                if (auto val = dimension_value(*rec, badge_dim)) {
                    auto it = std::find(d->values.begin(), d->values.end(), *val);
                    line.badge = static_cast<int>(it - d->values.begin());
                }
            }
            std::size_t w = 0;
            for (const auto& t : s.tokens) {
                if (!t.is_word) continue;
                line.words.push_back({t.surface, t.span, g.gray[k][w]});
                ++w;
            }
            block.lines.push_back(std::move(line));
        }
        v.blocks.push_back(std::move(block));
    }
    return v;
}

inline linear_view build_linear(const corpus& c, const std::string& group_dim) {
    linear_view v;
    v.group_dim = group_dim;
    if (c.empty()) return v;
    const auto* d = c.find_dimension(group_dim);
    if (!d) throw precondition_error("unknown dimension '" + group_dim + "'");
    for (const auto& value : d->values) {
        linear_group g;
        g.label = group_dim + "=" + value;
        for (const auto& r : c.records())
            if (dimension_value(r, group_dim) == value) g.response_ids.push_back(r.id);
        v.groups.push_back(std::move(g));
    }
    linear_group unset{group_dim + "=(unset)", {}, false};
    for (const auto& r : c.records())
        if (!dimension_value(r, group_dim)) unset.response_ids.push_back(r.id);
    if (!unset.response_ids.empty()) v.groups.push_back(std::move(unset));
    return v;
}

// JSON round trip for every view model.

inline void to_json(json& j, const highlight& h) {
    j = json{{"response_id", h.response_id}, {"start", h.span.start}, {"end", h.span.end}, {"color", h.color}};
}
inline void from_json(const json& j, highlight& h) {
    j.at("response_id").get_to(h.response_id);
    j.at("start").get_to(h.span.start);
    j.at("end").get_to(h.span.end);
    j.at("color").get_to(h.color);
}

inline void to_json(json& j, const legend_entry& e) { j = json{{"color", e.color}, {"label", e.label}}; }
inline void from_json(const json& j, legend_entry& e) {
    j.at("color").get_to(e.color);
    j.at("label").get_to(e.label);
}

inline void to_json(json& j, const grid_view& v) {
    json cells = json::array();
    for (const auto& row : v.cells) {
        json r = json::array();
        for (const auto& cell : row) r.push_back(cell.empty() ? json(nullptr) : json(cell));
        cells.push_back(std::move(r));
    }
    j = json{{"kind", "grid"},
             {"feature", to_string(v.kind)},
             {"row_dim", v.row_dim},
             {"col_dim", v.col_dim},
             {"fixed", v.fixed},
             {"row_values", v.row_values},
             {"col_values", v.col_values},
             {"cells", std::move(cells)},
             {"texts", v.texts},
             {"highlights", v.highlights},
             {"legend", v.legend},
             {"palette", v.palette}};
}
inline void from_json(const json& j, grid_view& v) {
    auto f = parse_feature(j.at("feature").get<std::string>());
    if (!f) throw error("unknown feature in grid view");
    v.kind = *f;
    j.at("row_dim").get_to(v.row_dim);
    j.at("col_dim").get_to(v.col_dim);
    j.at("fixed").get_to(v.fixed);
    j.at("row_values").get_to(v.row_values);
    j.at("col_values").get_to(v.col_values);
    v.cells.clear();
    for (const auto& row : j.at("cells")) {
        std::vector<std::string> r;
        for (const auto& cell : row) r.push_back(cell.is_null() ? std::string() : cell.get<std::string>());
        v.cells.push_back(std::move(r));
    }
    j.at("texts").get_to(v.texts);
    j.at("highlights").get_to(v.highlights);
    j.at("legend").get_to(v.legend);
    j.at("palette").get_to(v.palette);
}

inline void to_json(json& j, const interleaved_word& w) {
    j = json{{"text", w.text}, {"start", w.span.start}, {"end", w.span.end}, {"gray", w.gray}};
}
inline void from_json(const json& j, interleaved_word& w) {
    j.at("text").get_to(w.text);
    j.at("start").get_to(w.span.start);
    j.at("end").get_to(w.span.end);
    j.at("gray").get_to(w.gray);
}

inline void to_json(json& j, const interleaved_line& l) {
    j = json{{"response_id", l.response_id},
             {"sentence_index", l.sentence_index},
             {"badge", l.badge},
             {"char_span", l.span},
             {"text", l.text},
             {"words", l.words}};
}
inline void from_json(const json& j, interleaved_line& l) {
    j.at("response_id").get_to(l.response_id);
    j.at("sentence_index").get_to(l.sentence_index);
    j.at("badge").get_to(l.badge);
    j.at("char_span").get_to(l.span);
    j.at("text").get_to(l.text);
    j.at("words").get_to(l.words);
}

inline void to_json(json& j, const interleaved_block& b) {
    j = json{{"group_id", b.group_id}, {"median_pos", b.median_pos}, {"mean_pos", b.mean_pos}, {"lines", b.lines}};
}
inline void from_json(const json& j, interleaved_block& b) {
    j.at("group_id").get_to(b.group_id);
    j.at("median_pos").get_to(b.median_pos);
    j.at("mean_pos").get_to(b.mean_pos);
    j.at("lines").get_to(b.lines);
}

inline void to_json(json& j, const interleaved_view& v) {
    j = json{{"kind", "interleaved"},
             {"badge_dim", v.badge_dim},
             {"badges", v.badges},
             {"blocks", v.blocks},
             {"palette", v.palette}};
}
inline void from_json(const json& j, interleaved_view& v) {
    j.at("badge_dim").get_to(v.badge_dim);
    j.at("badges").get_to(v.badges);
    j.at("blocks").get_to(v.blocks);
    j.at("palette").get_to(v.palette);
}

inline void to_json(json& j, const linear_group& g) {
    j = json{{"label", g.label}, {"response_ids", g.response_ids}, {"collapsed", g.collapsed}};
}
inline void from_json(const json& j, linear_group& g) {
    j.at("label").get_to(g.label);
    j.at("response_ids").get_to(g.response_ids);
    j.at("collapsed").get_to(g.collapsed);
}

inline void to_json(json& j, const linear_view& v) {
    j = json{{"kind", "linear"}, {"group_dim", v.group_dim}, {"groups", v.groups}};
}
inline void from_json(const json& j, linear_view& v) {
    j.at("group_dim").get_to(v.group_dim);
    j.at("groups").get_to(v.groups);
}

} // namespace sensegrid
