// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any fail.
//
// Randomized criteria draw every trial from its own seed; the seeds and a
// one-line outcome per trial go to acceptance_seeds.log in the working
// directory so a failure can be replayed.

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace sensegrid;

namespace {

std::ofstream seed_log("acceptance_seeds.log");

struct outcome {
    bool ok = true;
    std::string detail;
};

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v, int prec = 2) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << v;
    return os.str();
}

// ---------------------------------------------------------------------------

outcome exact_match_cap() {
    auto t0 = clock_type::now();
    std::size_t trials = 0, violations = 0;
    for (std::size_t n : {2, 4, 6, 24, 30}) {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            std::mt19937_64 rng(seed * 131 + n);
            oracle::gen_options opt;
            opt.responses = n;
            opt.max_words = 40;
            opt.copy_chance = 0.6;
            auto c = oracle::random_corpus(rng, opt);
            auto sets = find_exact_matches(c);
            const std::size_t cap = std::min<std::size_t>(12, n / 2);
            bool ok = sets.size() <= cap;
            seed_log << "em_cap n=" << n << " seed=" << seed * 131 + n << " sets=" << sets.size() << " cap=" << cap
                     << (ok ? "" : " VIOLATION") << "\n";
            violations += !ok;
            ++trials;
        }
    }
    double secs = seconds_since(t0);
    return {violations == 0 && secs < 10.0, std::to_string(trials) + " trials, " + std::to_string(violations) +
                                                 " violations, " + fmt(secs) + " s (limit 10 s)"};
}

outcome verbatim_presence() {
    std::size_t checked = 0, violations = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        std::mt19937_64 rng(10'000 + seed);
        oracle::gen_options opt;
        opt.responses = 2 + seed % 11;
        opt.max_words = 60;
        auto c = oracle::random_corpus(rng, opt);
        std::size_t bad = 0;
        for (const auto& m : find_exact_matches(c)) {
            for (const auto& o : m.occurrences) {
                ++checked;
                const auto& text = c.find(o.response_id)->text;
                std::vector<std::string> words;
                std::size_t sentences_touched = 0;
                for (const auto& s : oracle::split(text)) {
                    std::size_t before = words.size();
                    for (const auto& w : s)
                        if (w.span.start >= o.span.start && w.span.end <= o.span.end) words.push_back(w.norm);
                    sentences_touched += words.size() > before;
                }
                const bool one_sentence = sentences_touched == 1;
                // Re-read the raw slice: lowercase, strip edge punctuation per chunk.
                std::istringstream slice(text.substr(o.span.start, o.span.length()));
                std::vector<std::string> reread;
                std::string chunk;
                while (slice >> chunk) {
                    while (!chunk.empty() && std::string_view(",.!?").find(chunk.back()) != std::string_view::npos)
                        chunk.pop_back();
                    for (auto& ch : chunk) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
                    if (!chunk.empty()) reread.push_back(chunk);
                }
                bool ok = oracle::join(reread) == m.key && reread.size() >= 3 && one_sentence && words == reread;
                bad += !ok;
            }
        }
        seed_log << "verbatim seed=" << 10'000 + seed << (bad ? " VIOLATIONS=" + std::to_string(bad) : "") << "\n";
        violations += bad;
    }
    return {violations == 0 && checked > 0,
            "1000 corpora, " + std::to_string(checked) + " occurrences, " + std::to_string(violations) + " violations"};
}

outcome exact_match_oracle() {
    std::size_t mismatches = 0, nonempty = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        std::mt19937_64 rng(20'000 + seed);
        oracle::gen_options opt;
        opt.responses = 2 + seed % 4;
        opt.min_words = 1;
        opt.max_words = 30;
        auto c = oracle::random_corpus(rng, opt);
        auto mine = oracle::from_pipeline(find_exact_matches(c));
        auto ref = oracle::exact_matches(c);
        bool ok = mine == ref;
        nonempty += !ref.empty();
        seed_log << "em_oracle seed=" << 20'000 + seed << " sets=" << ref.size() << (ok ? "" : " MISMATCH") << "\n";
        mismatches += !ok;
    }
    return {mismatches == 0, "500 cases (" + std::to_string(nonempty) + " with matches), " +
                                 std::to_string(mismatches) + " mismatches"};
}

outcome tfidf_oracle() {
    auto stops = oracle::load_stop_words(SENSEGRID_DATA_DIR "/stopwords.txt");
    std::size_t mismatches = 0, over_five = 0, words = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        std::mt19937_64 rng(30'000 + seed);
        oracle::gen_options opt;
        opt.responses = 1 + seed % 10;
        opt.min_words = 1;
        opt.max_words = 200;
        opt.vocab = seed % 3 ? oracle::wide_vocab() : oracle::small_vocab();
        auto c = oracle::random_corpus(rng, opt);
        auto mine = unique_words(c);
        auto ref = oracle::unique_words(c, stops);
        bool ok = true;
        for (const auto& r : c.records()) {
            const auto& a = mine.per_response.at(r.id);
            const auto& b = ref.at(r.id);
            over_five += a.size() > 5;
            if (a.size() != b.size()) {
                ok = false;
                continue;
            }
            for (std::size_t i = 0; i < a.size(); ++i) {
                ++words;
                worst = std::max(worst, std::fabs(a[i].score - b[i].score));
                if (a[i].word != b[i].word || std::fabs(a[i].score - b[i].score) > 1e-9 || a[i].spans != b[i].spans)
                    ok = false;
            }
        }
        seed_log << "tfidf seed=" << 30'000 + seed << (ok ? "" : " MISMATCH") << "\n";
        mismatches += !ok;
    }
    std::ostringstream worst_s;
    worst_s << worst;
    return {mismatches == 0 && over_five == 0,
            "500 corpora, " + std::to_string(words) + " selected words, max |score diff| " + worst_s.str() + ", " +
                std::to_string(mismatches) + " mismatches, " + std::to_string(over_five) + " lists over 5"};
}

outcome pdc_gate() {
    std::size_t merges = 0, violations = 0, multi = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        std::mt19937_64 rng(40'000 + seed);
        oracle::gen_options opt;
        opt.responses = 2 + seed % 9;
        opt.max_words = 40;
        opt.copy_chance = 0.5;
        auto c = oracle::random_corpus(rng, opt);
        std::size_t bad = 0;
        std::vector<merge_event> events;
        auto r = cluster(c, {}, [&](const merge_event& e) { events.push_back(e); });
        merges += events.size();
        // Both similarities are recomputed here rather than trusted from the event.
        for (const auto& e : events) {
            const auto& x = r.at(e.first);
            const auto& y = r.at(e.second);
            double cs = oracle::content(x.words(), y.words());
            double ps = 1.0 - std::fabs(x.norm_pos - y.norm_pos);
            bool gate_ok = 1.5 * cs + 1.0 * ps > 1.2;
            bool distinct_ok = static_cast<double>(e.merged_distinct) >= 0.7 * static_cast<double>(e.merged_size) - 1e-9;
            bad += !(gate_ok && distinct_ok && x.response_id != y.response_id);
        }
        for (const auto& g : r.groups) {
            if (g.members.size() < 2) continue;
            ++multi;
            std::set<std::size_t> resp;
            for (const auto& m : g.members) resp.insert(m.response);
            double ratio = static_cast<double>(resp.size()) / static_cast<double>(g.members.size());
            bad += ratio < 0.7 - 1e-9 || std::fabs(ratio - g.distinct_ratio) > 1e-12;
        }
        seed_log << "pdc_gate seed=" << 40'000 + seed << " merges=" << events.size()
                 << (bad ? " VIOLATIONS=" + std::to_string(bad) : "") << "\n";
        violations += bad;
    }
    return {violations == 0 && merges > 0, "1000 corpora, " + std::to_string(merges) + " merges, " +
                                               std::to_string(multi) + " multi-member groups, " +
                                               std::to_string(violations) + " violations"};
}

outcome pdc_partition_determinism() {
    std::size_t failures = 0, sentences = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        std::mt19937_64 rng(50'000 + seed);
        oracle::gen_options opt;
        opt.responses = 1 + seed % 10;
        opt.max_words = 50;
        auto c = oracle::random_corpus(rng, opt);
        auto r1 = cluster(c);
        auto r2 = cluster(c);
        std::map<std::pair<std::string, std::size_t>, int> seen;
        for (const auto& g : r1.groups)
            for (const auto& m : g.members) ++seen[{r1.at(m).response_id, r1.at(m).index}];
        bool ok = true;
        std::size_t expected = 0;
        for (const auto& rec : c.records()) {
            auto ss = segment(rec);
            expected += ss.size();
            for (const auto& s : ss) ok = ok && seen[{rec.id, s.index}] == 1;
        }
        ok = ok && seen.size() == expected;
        ok = ok && to_json(r1).dump() == to_json(r2).dump();
        sentences += expected;
        seed_log << "pdc_partition seed=" << 50'000 + seed << (ok ? "" : " FAILURE") << "\n";
        failures += !ok;
    }
    return {failures == 0, "1000 trials, " + std::to_string(sentences) + " sentences, " +
                               std::to_string(failures) + " failures"};
}

sentence words_sentence(std::string_view text) {
    sentence s;
    s.tokens = tokenize(text);
    return s;
}

outcome content_spot_values() {
    double abc = content_similarity(words_sentence("a b c"), words_sentence("a b d"));
    double same = content_similarity(words_sentence("the lamp is bright"), words_sentence("the lamp is bright"));
    double disjoint = content_similarity(words_sentence("one two"), words_sentence("three four"));
    bool ok = std::fabs(abc - 2.0 / 3.0) <= 1e-9 && std::fabs(abc - 0.6667) <= 1e-4 && same == 1.0 && disjoint == 0.0;
    return {ok, "[a,b,c]/[a,b,d]=" + fmt(abc, 10) + ", identical=" + fmt(same, 1) + ", disjoint=" + fmt(disjoint, 1)};
}

std::string lower(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

std::vector<fs::path> fixture_files() {
    std::vector<fs::path> out;
    for (const auto* dir : {SENSEGRID_FIXTURES, SENSEGRID_SAMPLES})
        if (fs::is_directory(dir))
            for (const auto& e : fs::directory_iterator(dir))
                if (e.path().extension() == ".jsonl") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

outcome grayout() {
    std::size_t lines = 0, flags = 0, wrong = 0, files = 0;
    for (const auto& path : fixture_files()) {
        std::ifstream in(path);
        auto c = ingest_jsonl(in);
        if (c.empty()) continue;
        ++files;
        auto p = cluster(c);
        auto v = build_interleaved(c, p, "model");
        for (const auto& b : v.blocks) {
            for (std::size_t k = 0; k < b.lines.size(); ++k) {
                ++lines;
                const auto& line = b.lines[k];
                // Word norms re-derived from the source text of this line.
                std::vector<std::string> cur, prev;
                for (const auto& s : oracle::split(line.text))
                    for (const auto& w : s) cur.push_back(w.norm);
                if (k > 0)
                    for (const auto& s : oracle::split(b.lines[k - 1].text))
                        for (const auto& w : s) prev.push_back(w.norm);
                if (cur.size() != line.words.size()) {
                    ++wrong;
                    continue;
                }
                for (std::size_t i = 0; i < cur.size(); ++i) {
                    ++flags;
                    bool expect = k > 0 && i < prev.size() && cur[i] == prev[i];
                    wrong += line.words[i].gray != expect;
                    wrong += lower(line.words[i].text) != cur[i];
                }
            }
        }
    }
    return {wrong == 0 && files > 0, std::to_string(files) + " fixtures, " + std::to_string(lines) + " lines, " +
                                         std::to_string(flags) + " flags, " + std::to_string(wrong) + " wrong"};
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& diff) {
    std::set<std::string> fa, fb;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) fa.insert(fs::relative(e.path(), a).string());
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) fb.insert(fs::relative(e.path(), b).string());
    if (fa != fb) {
        diff = "file lists differ";
        return false;
    }
    for (const auto& f : fa) {
        std::ifstream x(a / f, std::ios::binary), y(b / f, std::ios::binary);
        std::string sx((std::istreambuf_iterator<char>(x)), {}), sy((std::istreambuf_iterator<char>(y)), {});
        if (sx != sy) {
            diff = f + " differs";
            return false;
        }
    }
    diff = std::to_string(fa.size()) + " files identical";
    return true;
}

outcome golden_report() {
    auto out = fs::temp_directory_path() / ("sensegrid_golden_" + std::to_string(::getpid()));
    fs::remove_all(out);
    std::string cmd = std::string(SENSEGRID_CLI) + " report --input " + SENSEGRID_FIXTURES +
                      "/creatures18.jsonl --rows creature --cols gen_index --fix model=model-a --out " +
                      out.string() + " 2>&1";
    auto t0 = clock_type::now();
    int status = std::system(cmd.c_str());
    double secs = seconds_since(t0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "report command failed"};
    std::string diff;
    bool same = same_tree(out, SENSEGRID_GOLDEN, diff);
    fs::remove_all(out);
    return {same && secs < 5.0, diff + ", " + fmt(secs, 3) + " s (limit 5 s)"};
}

outcome mesoscale() {
    // 100 responses of 500 words: a shared answer skeleton with per-response
    // rewording, closer to real generations than independent word salad.
    std::mt19937_64 rng(60'000);
    const auto& vocab = oracle::wide_vocab();
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::string> skeleton(500);
    for (auto& w : skeleton) w = vocab[pick(rng)];
    std::vector<std::string> texts;
    for (int r = 0; r < 100; ++r) {
        std::string t;
        for (std::size_t i = 0; i < 500; ++i) {
            t += unit(rng) < 0.7 ? skeleton[i] : vocab[pick(rng)];
            t += (i % 14 == 13 || i == 499) ? ". " : " ";
        }
        texts.push_back(t);
    }
    auto c = oracle::make_corpus(texts);
    auto t0 = clock_type::now();
    auto em = run_analysis(c, feature::exact_matches);
    double t_em = seconds_since(t0);
    auto t1 = clock_type::now();
    auto uw = run_analysis(c, feature::unique_words);
    double t_uw = seconds_since(t1);
    auto t2 = clock_type::now();
    auto pdc = run_analysis(c, feature::pdc);
    double t_pdc = seconds_since(t2);
    double total = seconds_since(t0);
    return {total < 30.0 && !em.exact()->empty(),
            "100 x 500 words: exact " + fmt(t_em) + " s, unique " + fmt(t_uw) + " s, pdc " + fmt(t_pdc) + " s (" +
                std::to_string(pdc.pdc()->groups.size()) + " groups), total " + fmt(total) + " s (limit 30 s)"};
}

} // namespace

int main() {
    struct criterion {
        const char* name;
        std::function<outcome()> run;
    };
    const std::vector<criterion> criteria = {
        {"exact-match cap", exact_match_cap},
        {"verbatim presence", verbatim_presence},
        {"exact-match oracle equivalence", exact_match_oracle},
        {"tf-idf oracle equivalence", tfidf_oracle},
        {"pdc gate faithfulness", pdc_gate},
        {"pdc partition and determinism", pdc_partition_determinism},
        {"content similarity spot values", content_spot_values},
        {"interleaved gray-out correctness", grayout},
        {"end-to-end golden report", golden_report},
        {"mesoscale performance", mesoscale},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.ok ? "PASS" : "FAIL") << "  " << c.name << "  (" << o.detail << ")" << std::endl;
        failed += !o.ok;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
