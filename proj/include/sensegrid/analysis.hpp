#pragma once

// Feature selection and the analysis envelope shared by the CLI, the report
// writer and the HTTP service.

#include "sensegrid/corpus.hpp"
#include "sensegrid/digest.hpp"
#include "sensegrid/exact_matches.hpp"
#include "sensegrid/pdc.hpp"
#include "sensegrid/textproc.hpp"
#include "sensegrid/unique_words.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sensegrid {

enum class feature { none, exact_matches, unique_words, pdc };

inline constexpr std::array<feature, 4> all_features = {feature::none, feature::exact_matches,
                                                        feature::unique_words, feature::pdc};

inline std::string_view to_string(feature f) {
    switch (f) {
    case feature::none: return "none";
    case feature::exact_matches: return "exact_matches";
    case feature::unique_words: return "unique_words";
    case feature::pdc: return "pdc";
    }
    return "none";
}

inline std::optional<feature> parse_feature(std::string_view s) {
    for (auto f : all_features)
        if (to_string(f) == s) return f;
    return std::nullopt;
}

struct analysis_config {
    exact_match_params exact;
    pdc_params pdc;
    // Null means the built-in list.
    std::shared_ptr<const stop_list> stops;

    const stop_list& stop_words() const { return stops ? *stops : stop_list::builtin(); }

    std::string stop_list_label() const {
        if (!stops || *stops == stop_list::builtin()) return std::string(stop_list_version);
        std::string joined;
        for (const auto& w : stops->words()) joined += w + '\n';
        return "custom:" + sha256_hex(joined).substr(0, 16);
    }

    // Parameters that influence the given feature, echoed in every result.
    json params(feature f) const {
        switch (f) {
        case feature::exact_matches: return to_json(exact);
        case feature::unique_words:
            return json{{"top_k", unique_words_per_response}, {"stop_list", stop_list_label()}};
        case feature::pdc: return to_json(pdc);
        case feature::none: break;
        }
        return json::object();
    }
};

struct analysis_result {
    feature kind = feature::none;
    json params = json::object();
    std::variant<std::monostate, std::vector<match_set>, unique_words_result, pdc_result> value;

    const std::vector<match_set>* exact() const { return std::get_if<std::vector<match_set>>(&value); }
    const unique_words_result* unique() const { return std::get_if<unique_words_result>(&value); }
    const pdc_result* pdc() const { return std::get_if<pdc_result>(&value); }
};

inline analysis_result run_analysis(const corpus& c, feature f, const analysis_config& config = {}) {
    analysis_result r;
    r.kind = f;
    r.params = config.params(f);
    switch (f) {
    case feature::none: break;
    case feature::exact_matches: r.value = find_exact_matches(c, config.exact); break;
    case feature::unique_words: r.value = unique_words(c, config.stop_words()); break;
    case feature::pdc: r.value = cluster(c, config.pdc); break;
    }
    return r;
}

inline json result_json(const analysis_result& r) {
    if (auto* e = r.exact()) return to_json(*e);
    if (auto* u = r.unique()) return to_json(*u);
    if (auto* p = r.pdc()) return to_json(*p);
    return nullptr;
}

// {"feature", "params", "result"}; the result follows the feature's own schema.
inline json analysis_json(const analysis_result& r) {
    return json{{"feature", to_string(r.kind)}, {"params", r.params}, {"result", result_json(r)}};
}

} // namespace sensegrid
