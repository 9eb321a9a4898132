#pragma once

// HTTP + JSON service over in-memory corpora.
//
//   POST /corpora                      JSONL body -> {corpus_id, record_count, dimensions}
//   GET  /corpora/{id}                 corpus export
//   GET  /corpora/{id}/analysis        ?feature=exact_matches|unique_words|pdc
//   GET  /corpora/{id}/view            ?kind=grid&rows=&cols=&feature=&fix=DIM=VAL...
//                                      ?kind=interleaved&badge=DIM
//                                      ?kind=linear&group=DIM
//
// Corpus ids are content digests of the canonical export, so ingestion is
// idempotent. Analyses are computed once per (corpus, feature, params) and
// concurrent identical requests share one computation.

#include "sensegrid/analysis.hpp"
#include "sensegrid/corpus.hpp"
#include "sensegrid/digest.hpp"
#include "sensegrid/error.hpp"
#include "sensegrid/render_model.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <utility>

namespace sensegrid {

inline constexpr int default_port = 7341;
inline constexpr std::size_t default_max_body = 16u * 1024u * 1024u;

struct service_config {
    std::size_t max_body = default_max_body;
    analysis_config analysis;
    sensegrid::palette colors = palette::builtin();
    bool cache_enabled = true;
    // Static files mounted at "/" when set.
    std::string ui_dir;
};

inline std::string corpus_digest(const corpus& c) { return sha256_hex(to_json(c).dump()).substr(0, 16); }

struct analysis_key {
    std::string corpus_id;
    feature kind = feature::none;
    std::string params_digest;

    auto operator<=>(const analysis_key&) const = default;
};

struct cached_analysis {
    std::shared_ptr<const analysis_result> result;
    json envelope;
    double computed_ms = 0.0;
};

class analysis_store {
public:
    explicit analysis_store(service_config config = {}) : config_(std::move(config)) {}

    struct ingest_outcome {
        std::string id;
        std::shared_ptr<const corpus> data;
        bool created = false;
    };

    ingest_outcome ingest(std::string_view jsonl) {
        auto parsed = std::make_shared<const corpus>(ingest_jsonl(jsonl));
        auto id = corpus_digest(*parsed);
        std::unique_lock lock(mutex_);
        auto [it, created] = corpora_.try_emplace(id, parsed);
        return {id, it->second, created};
    }

    std::shared_ptr<const corpus> find(const std::string& id) const {
        std::shared_lock lock(mutex_);
        auto it = corpora_.find(id);
        return it == corpora_.end() ? nullptr : it->second;
    }

    std::vector<std::string> ids() const {
        std::shared_lock lock(mutex_);
        std::vector<std::string> out;
        for (const auto& [id, _] : corpora_) out.push_back(id);
        return out;
    }

    // Result plus whether it came from the cache. Throws precondition_error
    // for unknown corpora and forwards analysis errors.
    std::pair<std::shared_ptr<const cached_analysis>, bool> analysis(const std::string& corpus_id, feature f) {
        auto c = find(corpus_id);
        if (!c) throw precondition_error("unknown corpus '" + corpus_id + "'");
        if (!config_.cache_enabled) return {compute(*c, f), false};

        analysis_key key{corpus_id, f, sha256_hex(config_.analysis.params(f).dump())};
        std::shared_future<std::shared_ptr<const cached_analysis>> pending;
        std::promise<std::shared_ptr<const cached_analysis>> promise;
        bool owner = false;
        {
            std::unique_lock lock(cache_mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) {
                pending = it->second;
            } else {
                pending = promise.get_future().share();
                cache_.emplace(key, pending);
                owner = true;
            }
        }
        if (owner) {
            try {
                promise.set_value(compute(*c, f));
            } catch (...) {
                promise.set_exception(std::current_exception());
            }
        }
        return {pending.get(), !owner};
    }

    // Number of analyses actually computed, cache hits excluded.
    std::size_t computations() const { return computations_.load(); }

    const service_config& config() const { return config_; }

    void save_snapshot(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        std::shared_lock lock(mutex_);
        for (const auto& [id, c] : corpora_) {
            std::ofstream out(dir / (id + ".jsonl"), std::ios::binary);
            write_jsonl(*c, out);
        }
    }

    std::size_t load_snapshot(const std::filesystem::path& dir) {
        if (!std::filesystem::is_directory(dir)) return 0;
        std::size_t loaded = 0;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.path().extension() != ".jsonl") continue;
            std::ifstream in(entry.path(), std::ios::binary);
            std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            ingest(body);
            ++loaded;
        }
        return loaded;
    }

private:
    std::shared_ptr<const cached_analysis> compute(const corpus& c, feature f) {
        ++computations_;
        auto start = std::chrono::steady_clock::now();
        auto result = std::make_shared<const analysis_result>(run_analysis(c, f, config_.analysis));
        auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
        auto out = std::make_shared<cached_analysis>();
        out->result = result;
        out->envelope = analysis_json(*result);
        out->computed_ms = elapsed.count();
        return out;
    }

    service_config config_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<const corpus>> corpora_;
    std::mutex cache_mutex_;
    std::map<analysis_key, std::shared_future<std::shared_ptr<const cached_analysis>>> cache_;
    std::atomic<std::size_t> computations_{0};
};

class server {
public:
    explicit server(service_config config = {}) : store_(std::move(config)) { routes(); }

    analysis_store& store() { return store_; }
    httplib::Server& http() { return http_; }

    bool bind(const std::string& host, int port) { return http_.bind_to_port(host, port); }
    int bind_any(const std::string& host) { return http_.bind_to_any_port(host); }
    bool listen_after_bind() { return http_.listen_after_bind(); }
    void stop() { http_.stop(); }
    void wait_until_ready() { http_.wait_until_ready(); }

private:
    static void send_json(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }
    static void send_error(httplib::Response& res, int status, const std::string& message) {
        send_json(res, status, json{{"error", message}});
    }

    std::shared_ptr<const corpus> corpus_or_404(const std::string& id, httplib::Response& res) {
        auto c = store_.find(id);
        if (!c) send_error(res, 404, "unknown corpus '" + id + "'");
        return c;
    }

    void routes() {
        // The library default adds SO_REUSEPORT, which lets a second server share a busy port.
        http_.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
        });
        const auto& cfg = store_.config();
        http_.set_payload_max_length(cfg.max_body);
        if (!cfg.ui_dir.empty()) http_.set_mount_point("/", cfg.ui_dir);

        http_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, json{{"status", "ok"}});
        });

        http_.Post("/corpora", [this](const httplib::Request& req, httplib::Response& res) {
            if (req.body.size() > store_.config().max_body) {
                send_error(res, 413, "body exceeds " + std::to_string(store_.config().max_body) + " bytes");
                return;
            }
            try {
                auto out = store_.ingest(req.body);
                send_json(res, out.created ? 201 : 200,
                          json{{"corpus_id", out.id},
                               {"record_count", out.data->size()},
                               {"dimensions", dimensions_json(*out.data)}});
            } catch (const error& e) {
                send_error(res, 400, e.what());
            }
        });

        http_.Get(R"(/corpora/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto c = corpus_or_404(req.matches[1], res);
            if (!c) return;
            send_json(res, 200,
                      json{{"corpus_id", req.matches[1].str()},
                           {"record_count", c->size()},
                           {"dimensions", dimensions_json(*c)},
                           {"records", to_json(*c)}});
        });

        http_.Get(R"(/corpora/([^/]+)/analysis)", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (!corpus_or_404(id, res)) return;
            auto f = parse_feature(req.get_param_value("feature"));
            if (!f || *f == feature::none) {
                send_error(res, 400, "feature must be one of exact_matches, unique_words, pdc");
                return;
            }
            try {
                auto [cached, hit] = store_.analysis(id, *f);
                json body = cached->envelope;
                body["corpus_id"] = id;
                body["computed_ms"] = cached->computed_ms;
                res.set_header("X-Cache", hit ? "hit" : "miss");
                send_json(res, 200, body);
            } catch (const error& e) {
                send_error(res, 422, e.what());
            }
        });

        http_.Get(R"(/corpora/([^/]+)/view)", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            auto c = corpus_or_404(id, res);
            if (!c) return;
            const auto kind = req.get_param_value("kind");
            const auto& colors = store_.config().colors;
            try {
                if (kind == "grid") {
                    grid_spec spec;
                    spec.row_dim = req.get_param_value("rows");
                    spec.col_dim = req.get_param_value("cols");
                    auto f = parse_feature(req.has_param("feature") ? req.get_param_value("feature") : "none");
                    if (!f) {
                        send_error(res, 400, "unknown feature '" + req.get_param_value("feature") + "'");
                        return;
                    }
                    spec.kind = *f;
                    for (std::size_t i = 0; i < req.get_param_value_count("fix"); ++i) {
                        auto fix = req.get_param_value("fix", i);
                        auto eq = fix.find('=');
                        if (eq == std::string::npos) {
                            send_error(res, 400, "fix must look like DIM=VALUE, got '" + fix + "'");
                            return;
                        }
                        spec.fixed[fix.substr(0, eq)] = fix.substr(eq + 1);
                    }
                    validate(*c, spec);
                    analysis_result none;
                    const analysis_result* analysis = &none;
                    std::shared_ptr<const cached_analysis> cached;
                    if (spec.kind != feature::none) {
                        cached = store_.analysis(id, spec.kind).first;
                        analysis = cached->result.get();
                    }
                    send_json(res, 200, json(build_grid(*c, spec, *analysis, colors)));
                } else if (kind == "interleaved") {
                    auto cached = store_.analysis(id, feature::pdc).first;
                    send_json(res, 200, json(build_interleaved(*c, *cached->result->pdc(),
                                                               req.get_param_value("badge"), colors)));
                } else if (kind == "linear") {
                    send_json(res, 200, json(build_linear(*c, req.get_param_value("group"))));
                } else {
                    send_error(res, 400, "kind must be one of grid, interleaved, linear");
                }
            } catch (const error& e) {
                send_error(res, 422, e.what());
            }
        });
    }

    analysis_store store_;
    httplib::Server http_;
};

} // namespace sensegrid
