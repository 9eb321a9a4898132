// sensegrid command line: analyze, report, serve.
//
// Exit codes: 0 success, 1 input/analysis error, 2 usage error.

#include "sensegrid/sensegrid.hpp"
#include "sensegrid/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

struct constants {
    double pdc_text_weight = 1.5;
    double pdc_position_weight = 1.0;
    double pdc_threshold = 1.2;
    double pdc_distinct = 0.7;
    double em_length_weight = 0.75;
    double em_count_weight = 1.0;
    std::size_t em_min_words = 3;
    std::size_t em_max_sets = 12;
    std::string stop_list_path;
    std::string palette_path;
};

void add_constants(CLI::App& cmd, constants& k) {
    cmd.add_option("--pdc-text-weight", k.pdc_text_weight, "PDC weight on content similarity")
        ->capture_default_str()->envname("SENSEGRID_PDC_TEXT_WEIGHT");
    cmd.add_option("--pdc-position-weight", k.pdc_position_weight, "PDC weight on position similarity")
        ->capture_default_str()->envname("SENSEGRID_PDC_POSITION_WEIGHT");
    cmd.add_option("--pdc-threshold", k.pdc_threshold, "PDC merge threshold (strict)")
        ->capture_default_str()->envname("SENSEGRID_PDC_THRESHOLD");
    cmd.add_option("--pdc-distinct", k.pdc_distinct, "PDC minimum share of distinct responses per group")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0))->envname("SENSEGRID_PDC_DISTINCT");
    cmd.add_option("--em-length-weight", k.em_length_weight, "exact-match weight on substring length")
        ->capture_default_str();
    cmd.add_option("--em-count-weight", k.em_count_weight, "exact-match weight on response count")
        ->capture_default_str();
    cmd.add_option("--em-min-words", k.em_min_words, "shortest exact match kept, in words")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--em-max-sets", k.em_max_sets, "upper bound on exact-match sets")->capture_default_str();
    cmd.add_option("--stop-list", k.stop_list_path, "stop-word file, one word per line")
        ->check(CLI::ExistingFile)->envname("SENSEGRID_STOP_LIST");
    cmd.add_option("--palette", k.palette_path, "palette file, twelve colors one per line")
        ->check(CLI::ExistingFile)->envname("SENSEGRID_PALETTE");
}

sensegrid::analysis_config make_config(const constants& k) {
    sensegrid::analysis_config cfg;
    cfg.pdc = {k.pdc_text_weight, k.pdc_position_weight, k.pdc_threshold, k.pdc_distinct};
    cfg.exact = {k.em_length_weight, k.em_count_weight, k.em_min_words, k.em_max_sets};
    if (!k.stop_list_path.empty())
        cfg.stops = std::make_shared<const sensegrid::stop_list>(sensegrid::stop_list::from_file(k.stop_list_path));
    return cfg;
}

sensegrid::palette make_palette(const constants& k) {
    return k.palette_path.empty() ? sensegrid::palette::builtin() : sensegrid::palette::from_file(k.palette_path);
}

sensegrid::corpus read_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sensegrid::error("cannot open '" + path + "'");
    return sensegrid::ingest_jsonl(in);
}

sensegrid::server* running_server = nullptr;

extern "C" void on_signal(int) {
    if (running_server) running_server->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inspect many LLM responses at once: exact matches, unique words, positional diction clustering"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    constants k;

    std::string input, out, feature_name;
    auto* analyze = app.add_subcommand("analyze", "run one analysis and print its JSON");
    analyze->add_option("--input", input, "JSONL corpus")->required()->check(CLI::ExistingFile);
    analyze->add_option("--feature", feature_name, "analysis to run")
        ->required()
        ->check(CLI::IsMember({"exact_matches", "unique_words", "pdc"}));
    analyze->add_option("--out", out, "output file (default stdout)");
    add_constants(*analyze, k);

    std::string rows, cols, badge, group, report_input, report_out;
    std::vector<std::string> fixes;
    auto* report = app.add_subcommand("report", "write a static report directory");
    report->add_option("--input", report_input, "JSONL corpus")->required()->check(CLI::ExistingFile);
    report->add_option("--rows", rows, "row dimension")->required();
    report->add_option("--cols", cols, "column dimension")->required();
    report->add_option("--fix", fixes, "DIM=VALUE for a remaining dimension")->take_all();
    report->add_option("--badge", badge, "dimension coloring interleaved badges (default: --cols)");
    report->add_option("--group", group, "dimension grouping the linear view (default: --rows)");
    report->add_option("--out", report_out, "output directory")->required();
    add_constants(*report, k);

    int port = sensegrid::default_port;
    std::string host = "127.0.0.1", ui_dir, snapshot_dir;
    std::size_t max_body = sensegrid::default_max_body;
    bool open = false, no_cache = false;
    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    serve->add_option("--port", port, "listen port")->capture_default_str()->envname("SENSEGRID_PORT");
    serve->add_option("--host", host, "listen address")->capture_default_str()->envname("SENSEGRID_HOST");
    serve->add_option("--max-body", max_body, "largest accepted upload in bytes")
        ->capture_default_str()->envname("SENSEGRID_MAX_BODY");
    serve->add_option("--ui-dir", ui_dir, "static UI directory served at /")->check(CLI::ExistingDirectory);
    serve->add_option("--snapshot", snapshot_dir, "load corpora from and save them to this directory");
    serve->add_flag("--open", open, "print the UI URL once listening");
    serve->add_flag("--no-cache", no_cache, "recompute analyses on every request");
    add_constants(*serve, k);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*analyze) {
            auto c = read_corpus(input);
            auto f = *sensegrid::parse_feature(feature_name);
            auto text = sensegrid::analysis_json(sensegrid::run_analysis(c, f, make_config(k))).dump(2) + "\n";
            if (out.empty()) {
                std::cout << text;
            } else {
                std::ofstream file(out, std::ios::binary);
                if (!file) throw sensegrid::error("cannot write '" + out + "'");
                file << text;
            }
            return 0;
        }

        if (*report) {
            sensegrid::report_options opts;
            opts.row_dim = rows;
            opts.col_dim = cols;
            for (const auto& fix : fixes) {
                auto eq = fix.find('=');
                if (eq == std::string::npos || eq == 0) {
                    std::cerr << "--fix expects DIM=VALUE, got '" << fix << "'\n";
                    return 2;
                }
                opts.fixed[fix.substr(0, eq)] = fix.substr(eq + 1);
            }
            opts.badge_dim = badge;
            opts.group_dim = group;
            opts.config = make_config(k);
            opts.colors = make_palette(k);
            auto c = read_corpus(report_input);
            sensegrid::write_report(c, opts, report_out);
            return 0;
        }

        if (*serve) {
            sensegrid::service_config cfg;
            cfg.analysis = make_config(k);
            cfg.colors = make_palette(k);
            cfg.max_body = max_body;
            cfg.cache_enabled = !no_cache;
            cfg.ui_dir = ui_dir;
            sensegrid::server srv(cfg);
            if (!snapshot_dir.empty()) srv.store().load_snapshot(snapshot_dir);
            if (!srv.bind(host, port)) {
                std::cerr << "cannot listen on " << host << ":" << port << " (port busy?)\n";
                return 1;
            }
            running_server = &srv;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on " << host << ":" << port << "\n";
            if (open) std::cout << "http://" << host << ":" << port << "/" << std::endl;
            srv.listen_after_bind();
            running_server = nullptr;
            if (!snapshot_dir.empty()) srv.store().save_snapshot(snapshot_dir);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
