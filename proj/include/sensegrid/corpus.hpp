#pragma once

// Response corpora: the immutable record model, its dimension registry,
// and line-delimited JSON ingestion / export.

#include "sensegrid/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace sensegrid {

using json = nlohmann::json;

inline constexpr std::string_view default_label = "default";

struct response_record {
    std::string id;
    std::string text;
    std::string model{default_label};
    std::string prompt_template{default_label};
    std::map<std::string, std::string> vars;
    std::size_t gen_index = 0;
    // Kept as the textual token so "1.0" and "1" stay distinct values.
    std::optional<std::string> temperature;
    std::map<std::string, std::string> extra;

    bool operator==(const response_record&) const = default;
};

struct dimension {
    std::string name;
    std::vector<std::string> values;

    bool contains(std::string_view v) const {
        return std::find(values.begin(), values.end(), v) != values.end();
    }
    bool operator==(const dimension&) const = default;
};

namespace detail {

inline bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    });
}

// Scalar JSON values become their textual form; strings stay verbatim.
inline std::optional<std::string> scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    return std::nullopt;
}

inline const std::vector<std::string_view>& reserved_keys() {
    static const std::vector<std::string_view> keys = {
        "id", "text", "model", "prompt_template", "vars", "gen_index", "temperature"};
    return keys;
}

} // namespace detail

// Value of a named dimension for one record, if the record has one.
inline std::optional<std::string> dimension_value(const response_record& r, std::string_view name) {
    if (name == "model") return r.model;
    if (name == "prompt_template") return r.prompt_template;
    if (name == "gen_index") return std::to_string(r.gen_index);
    if (name == "temperature") return r.temperature;
    if (auto it = r.vars.find(std::string(name)); it != r.vars.end()) return it->second;
    return std::nullopt;
}

class corpus {
public:
    corpus() = default;

    explicit corpus(std::vector<response_record> records) : records_(std::move(records)) {
        std::unordered_set<std::string> seen;
        for (const auto& r : records_) {
            if (!seen.insert(r.id).second)
                throw ingest_error("duplicate response id '" + r.id + "'");
            if (detail::is_blank(r.text))
                throw ingest_error("empty text for response '" + r.id + "'");
        }
        build_dimensions();
    }

    const std::vector<response_record>& records() const { return records_; }
    const std::vector<dimension>& dimensions() const { return dimensions_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    const dimension* find_dimension(std::string_view name) const {
        for (const auto& d : dimensions_)
            if (d.name == name) return &d;
        return nullptr;
    }

    const response_record* find(std::string_view id) const {
        for (const auto& r : records_)
            if (r.id == id) return &r;
        return nullptr;
    }

    bool operator==(const corpus& other) const { return records_ == other.records_; }

private:
    void build_dimensions() {
        auto observe = [](dimension& d, const std::string& v) {
            if (!d.contains(v)) d.values.push_back(v);
        };
        dimension model{"model", {}}, tmpl{"prompt_template", {}}, gen{"gen_index", {}},
            temp{"temperature", {}};
        std::map<std::string, dimension> vars;
        for (const auto& r : records_) {
            observe(model, r.model);
            observe(tmpl, r.prompt_template);
            observe(gen, std::to_string(r.gen_index));
            if (r.temperature) observe(temp, *r.temperature);
            for (const auto& [k, v] : r.vars) {
                auto& d = vars[k];
                d.name = k;
                observe(d, v);
            }
        }
        if (records_.empty()) return;
        dimensions_ = {std::move(model), std::move(tmpl), std::move(gen)};
        if (!temp.values.empty()) dimensions_.push_back(std::move(temp));
        for (auto& [_, d] : vars) dimensions_.push_back(std::move(d));
    }

    std::vector<response_record> records_;
    std::vector<dimension> dimensions_;
};

inline const std::vector<dimension>& dimensions(const corpus& c) { return c.dimensions(); }

inline response_record record_from_json(const json& obj) {
    if (!obj.is_object()) throw ingest_error("expected a JSON object");
    auto required = [&](const char* key) {
        auto it = obj.find(key);
        if (it == obj.end() || !it->is_string())
            throw ingest_error(std::string("missing string field '") + key + "'");
        return it->get<std::string>();
    };
    auto optional_label = [&](const char* key) -> std::string {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return std::string(default_label);
        auto s = detail::scalar_text(*it);
        if (!s) throw ingest_error(std::string("field '") + key + "' must be a string");
        return *s;
    };

    response_record r;
    r.id = required("id");
    if (r.id.empty()) throw ingest_error("field 'id' must be non-empty");
    r.text = required("text");
    r.model = optional_label("model");
    r.prompt_template = optional_label("prompt_template");

    if (auto it = obj.find("vars"); it != obj.end() && !it->is_null()) {
        if (!it->is_object()) throw ingest_error("field 'vars' must be an object");
        for (const auto& [k, v] : it->items()) {
            auto s = detail::scalar_text(v);
            if (!s) throw ingest_error("variable '" + k + "' must be a scalar");
            r.vars.emplace(k, *s);
        }
    }
    if (auto it = obj.find("temperature"); it != obj.end() && !it->is_null()) {
        auto s = detail::scalar_text(*it);
        if (!s) throw ingest_error("field 'temperature' must be a number or string");
        r.temperature = *s;
    }
    for (const auto& [k, v] : obj.items()) {
        const auto& reserved = detail::reserved_keys();
        if (std::find(reserved.begin(), reserved.end(), k) != reserved.end()) continue;
        r.extra.emplace(k, v.is_string() ? v.get<std::string>() : v.dump());
    }
    return r;
}

// One JSON object per line. Blank lines are skipped but still counted.
inline corpus ingest_jsonl(std::istream& in) {
    std::vector<response_record> records;
    std::vector<std::optional<std::size_t>> explicit_gen;
    std::unordered_set<std::string> ids;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::is_blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error&) {
            throw ingest_error("line " + std::to_string(line_no) + ": malformed JSON");
        }
        response_record r;
        try {
            r = record_from_json(obj);
        } catch (const ingest_error& e) {
            throw ingest_error("line " + std::to_string(line_no) + ": " + e.what());
        }
        std::optional<std::size_t> gen;
        if (auto it = obj.find("gen_index"); it != obj.end() && !it->is_null()) {
            if (!it->is_number_integer() || it->get<long long>() < 0)
                throw ingest_error("line " + std::to_string(line_no) +
                                   ": gen_index must be a non-negative integer");
            gen = it->get<std::size_t>();
        }
        if (!ids.insert(r.id).second)
            throw ingest_error("line " + std::to_string(line_no) + ": duplicate response id '" +
                               r.id + "'");
        if (detail::is_blank(r.text))
            throw ingest_error("line " + std::to_string(line_no) + ": empty text for response '" +
                               r.id + "'");
        records.push_back(std::move(r));
        explicit_gen.push_back(gen);
    }

    // Missing gen_index: count of earlier records with the same (model, template, vars).
    using group_key = std::tuple<std::string, std::string, std::map<std::string, std::string>>;
    std::map<group_key, std::size_t> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& r = records[i];
        auto& count = seen[group_key{r.model, r.prompt_template, r.vars}];
        r.gen_index = explicit_gen[i].value_or(count);
        ++count;
    }
    return corpus(std::move(records));
}

inline corpus ingest_jsonl(std::string_view text) {
    std::istringstream in{std::string(text)};
    return ingest_jsonl(in);
}

// Flat record object; extra keys sit at top level so re-ingestion is a fixed point.
inline json to_json(const response_record& r) {
    json j = json::object();
    for (const auto& [k, v] : r.extra) j[k] = v;
    j["id"] = r.id;
    j["text"] = r.text;
    j["model"] = r.model;
    j["prompt_template"] = r.prompt_template;
    j["vars"] = r.vars;
    j["gen_index"] = r.gen_index;
    if (r.temperature) j["temperature"] = *r.temperature;
    return j;
}

// Canonical export: array of record objects in corpus order, keys sorted.
inline json to_json(const corpus& c) {
    json arr = json::array();
    for (const auto& r : c.records()) arr.push_back(to_json(r));
    return arr;
}

inline void write_jsonl(const corpus& c, std::ostream& out) {
    for (const auto& r : c.records()) out << to_json(r).dump() << '\n';
}

inline json to_json(const dimension& d) { return json{{"name", d.name}, {"values", d.values}}; }

inline json dimensions_json(const corpus& c) {
    json arr = json::array();
    for (const auto& d : c.dimensions()) arr.push_back(to_json(d));
    return arr;
}

// Sub-corpus of records matching every (dimension, value) pair.
inline corpus slice(const corpus& c, const std::map<std::string, std::string>& filter) {
    for (const auto& [name, value] : filter) {
        const auto* d = c.find_dimension(name);
        if (!d) throw precondition_error("unknown dimension '" + name + "'");
        if (!d->contains(value))
            throw precondition_error("unknown value '" + value + "' for dimension '" + name + "'");
    }
    std::vector<response_record> kept;
    for (const auto& r : c.records()) {
        bool match = std::all_of(filter.begin(), filter.end(), [&](const auto& f) {
            return dimension_value(r, f.first) == f.second;
        });
        if (match) kept.push_back(r);
    }
    return corpus(std::move(kept));
}

} // namespace sensegrid
