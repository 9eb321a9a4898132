#pragma once

// Static report directory: the corpus, every analysis, every view model, and
// an index.html that renders them without a server.
//
//   corpus.json  manifest.json  index.html
//   analysis/{none,exact_matches,unique_words,pdc}.json
//   views/grid_{none,exact_matches,unique_words,pdc}.json
//   views/interleaved.json  views/linear.json

#include "sensegrid/analysis.hpp"
#include "sensegrid/corpus.hpp"
#include "sensegrid/render_model.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace sensegrid {

inline constexpr std::string_view report_format_version = "1";

struct report_options {
    std::string row_dim;
    std::string col_dim;
    std::map<std::string, std::string> fixed;
    // Empty picks the column dimension for badges and the row dimension for linear groups.
    std::string badge_dim;
    std::string group_dim;
    analysis_config config;
    sensegrid::palette colors = palette::builtin();
};

namespace detail {

inline std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

inline std::string highlighted_html(const std::string& id, const std::string& text,
                                    const std::vector<highlight>& highlights,
                                    const std::vector<std::string>& colors) {
    std::string out;
    std::size_t at = 0;
    for (const auto& h : highlights) {
        if (h.response_id != id) continue;
        out += html_escape(std::string_view(text).substr(at, h.span.start - at));
        out += "<mark class=\"c" + std::to_string(h.color) + "\" style=\"background:" + colors.at(h.color) + "\">";
        out += html_escape(std::string_view(text).substr(h.span.start, h.span.length()));
        out += "</mark>";
        at = h.span.end;
    }
    out += html_escape(std::string_view(text).substr(at));
    return out;
}

inline std::string grid_html(const grid_view& v) {
    std::ostringstream os;
    os << "<section class=\"grid\" id=\"grid-" << to_string(v.kind) << "\">\n<h2>Grid: " << to_string(v.kind)
       << "</h2>\n";
    if (!v.legend.empty()) {
        os << "<ul class=\"legend\">";
        for (const auto& e : v.legend)
            os << "<li><span class=\"swatch\" style=\"background:" << v.palette.at(e.color) << "\"></span>"
               << html_escape(e.label) << "</li>";
        os << "</ul>\n";
    }
    os << "<table>\n<tr><th>" << html_escape(v.row_dim) << " \\ " << html_escape(v.col_dim) << "</th>";
    for (const auto& c : v.col_values) os << "<th>" << html_escape(c) << "</th>";
    os << "</tr>\n";
    for (std::size_t r = 0; r < v.row_values.size(); ++r) {
        os << "<tr><th>" << html_escape(v.row_values[r]) << "</th>";
        for (const auto& id : v.cells[r]) {
            os << "<td>";
            if (!id.empty()) os << highlighted_html(id, v.texts.at(id), v.highlights, v.palette);
            os << "</td>";
        }
        os << "</tr>\n";
    }
    os << "</table>\n</section>\n";
    return os.str();
}

inline std::string interleaved_html(const interleaved_view& v) {
    std::ostringstream os;
    os << "<section class=\"interleaved\">\n<h2>Interleaved: " << html_escape(v.badge_dim) << "</h2>\n";
    os << "<ul class=\"legend\">";
    for (const auto& b : v.badges)
        os << "<li><span class=\"swatch\" style=\"background:" << v.palette.at(b.color) << "\"></span>"
           << html_escape(b.label) << "</li>";
    os << "</ul>\n";
    for (const auto& block : v.blocks) {
        os << "<div class=\"block\" data-group=\"" << block.group_id << "\">\n";
        for (const auto& line : block.lines) {
            os << "<div class=\"line\" data-response=\"" << html_escape(line.response_id) << "\">";
            os << "<span class=\"swatch\" style=\"background:"
               << (line.badge >= 0 ? v.palette.at(static_cast<std::size_t>(line.badge)) : std::string("#ccc"))
               << "\"></span>";
            std::size_t at = line.span.start;
            for (const auto& w : line.words) {
                os << html_escape(std::string_view(line.text).substr(at - line.span.start, w.span.start - at));
                if (w.gray) os << "<span class=\"gray\">" << html_escape(w.text) << "</span>";
                else os << html_escape(w.text);
                at = w.span.end;
            }
            os << html_escape(std::string_view(line.text).substr(at - line.span.start)) << "</div>\n";
        }
        os << "</div>\n";
    }
    os << "</section>\n";
    return os.str();
}

inline std::string linear_html(const linear_view& v, const corpus& c) {
    std::ostringstream os;
    os << "<section class=\"linear\">\n<h2>Responses by " << html_escape(v.group_dim) << "</h2>\n";
    for (const auto& g : v.groups) {
        os << "<details" << (g.collapsed ? "" : " open") << "><summary>" << html_escape(g.label) << "</summary>\n";
        for (const auto& id : g.response_ids)
            os << "<p class=\"response\" data-response=\"" << html_escape(id) << "\">"
               << html_escape(c.find(id)->text) << "</p>\n";
        os << "</details>\n";
    }
    os << "</section>\n";
    return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot write '" + path.string() + "'");
    out << content;
}

inline std::string pretty(const json& j) { return j.dump(2) + "\n"; }

} // namespace detail

inline void write_report(const corpus& c, const report_options& opts, const std::filesystem::path& out_dir) {
    if (c.empty()) throw precondition_error("no records");
    grid_spec spec{opts.row_dim, opts.col_dim, opts.fixed, feature::none};
    validate(c, spec);
    const std::string badge = opts.badge_dim.empty() ? opts.col_dim : opts.badge_dim;
    const std::string group = opts.group_dim.empty() ? opts.row_dim : opts.group_dim;

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("corpus.json", detail::pretty(to_json(c)));

    std::string html_body;
    analysis_result pdc_analysis;
    for (auto f : all_features) {
        auto result = run_analysis(c, f, opts.config);
        files.emplace_back("analysis/" + std::string(to_string(f)) + ".json", detail::pretty(analysis_json(result)));
        spec.kind = f;
        auto grid = build_grid(c, spec, result, opts.colors);
        files.emplace_back("views/grid_" + std::string(to_string(f)) + ".json", detail::pretty(json(grid)));
        html_body += detail::grid_html(grid);
        if (f == feature::pdc) pdc_analysis = std::move(result);
    }
    auto inter = build_interleaved(c, *pdc_analysis.pdc(), badge, opts.colors);
    files.emplace_back("views/interleaved.json", detail::pretty(json(inter)));
    html_body += detail::interleaved_html(inter);
    auto lin = build_linear(c, group);
    files.emplace_back("views/linear.json", detail::pretty(json(lin)));
    html_body += detail::linear_html(lin, c);

    json manifest{{"format_version", report_format_version},
                  {"record_count", c.size()},
                  {"dimensions", dimensions_json(c)},
                  {"grid", {{"rows", opts.row_dim}, {"cols", opts.col_dim}, {"fixed", opts.fixed}}},
                  {"badge_dim", badge},
                  {"group_dim", group},
                  {"palette", opts.colors.colors},
                  {"files", json::array()}};
    for (const auto& [name, _] : files) manifest["files"].push_back(name);
    manifest["files"].push_back("index.html");
    files.emplace_back("manifest.json", detail::pretty(manifest));

    std::string html =
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Response report</title>\n"
        "<style>body{font-family:sans-serif;margin:1em}table{border-collapse:collapse}"
        "td,th{border:1px solid #ccc;padding:.4em;vertical-align:top;max-width:28em}"
        ".swatch{display:inline-block;width:.8em;height:.8em;margin-right:.4em}"
        ".legend{list-style:none;padding:0}.legend li{display:inline-block;margin-right:1em}"
        ".block{margin-bottom:1em}.gray{opacity:.35}</style>\n</head><body>\n" +
        html_body + "</body></html>\n";
    files.emplace_back("index.html", html);

    for (const auto& [name, content] : files) detail::write_file(out_dir / name, content);
}

} // namespace sensegrid
