#include "glush/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "glush/matcher.hpp"

namespace glush {

namespace {

using nlohmann::json;

std::string read_stream(std::istream& s) {
    std::ostringstream buf;
    buf << s.rdbuf();
    return buf.str();
}

// CLI subjects come from files or pipes; one trailing newline is not part
// of the text being matched.
std::string strip_trailing_newline(std::string s) {
    if (!s.empty() && s.back() == '\n') s.pop_back();
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::optional<std::string> read_input(const std::string& path, std::istream& in,
                                      std::ostream& err) {
    if (path.empty() || path == "-") return strip_trailing_newline(read_stream(in));
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        err << "glush: cannot open " << path << "\n";
        return std::nullopt;
    }
    return strip_trailing_newline(read_stream(f));
}

json report_json(const std::string& pattern, const MatchReport& r) {
    json counters = {{"pred", r.counters.pred},
                     {"firstlabel", r.counters.firstlabel},
                     {"rmq", r.counters.rmq},
                     {"pointer_steps", r.counters.pointer_steps}};
    return json{{"pattern", pattern}, {"m", r.m},
                {"n", r.n},           {"accepted", r.accepted},
                {"delta", r.density}, {"step_sizes", r.step_sizes},
                {"counters", counters}, {"micros", r.micros}};
}

void report_tsv(std::ostream& out, const std::string& pattern, const MatchReport& r) {
    out << pattern << '\t' << r.m << '\t' << r.n << '\t' << (r.accepted ? 1 : 0) << '\t'
        << r.density << '\t';
    for (size_t i = 0; i < r.step_sizes.size(); ++i) {
        if (i) out << ',';
        out << r.step_sizes[i];
    }
    out << '\t' << r.counters.pred << '\t' << r.counters.firstlabel << '\t' << r.counters.rmq
        << '\t' << r.counters.pointer_steps << '\t' << r.micros << '\n';
}

void report_text(std::ostream& out, const MatchReport& r, bool counters) {
    out << "accepted\t" << (r.accepted ? "yes" : "no") << "\n";
    out << "m\t" << r.m << "\nn\t" << r.n << "\ndelta\t" << r.density << "\n";
    out << "step_sizes\t";
    for (size_t i = 0; i < r.step_sizes.size(); ++i) {
        if (i) out << ',';
        out << r.step_sizes[i];
    }
    out << "\nmicros\t" << r.micros << "\n";
    if (counters)
        out << "pred\t" << r.counters.pred << "\nfirstlabel\t" << r.counters.firstlabel
            << "\nrmq\t" << r.counters.rmq << "\npointer_steps\t" << r.counters.pointer_steps
            << "\n";
}

bool guard_limits(const CompiledPattern& cp, size_t n, int64_t max_m, int64_t max_n,
                  std::ostream& err) {
    if (max_m >= 0 && cp.num_positions() > max_m) {
        err << "glush: pattern has " << cp.num_positions() << " positions, over --max-m " << max_m
            << "\n";
        return false;
    }
    if (max_n >= 0 && static_cast<int64_t>(n) > max_n) {
        err << "glush: input has " << n << " characters, over --max-n " << max_n << "\n";
        return false;
    }
    return true;
}

std::vector<std::string> read_lines(const std::string& path, std::ostream& err, bool& ok) {
    std::vector<std::string> lines;
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        err << "glush: cannot open " << path << "\n";
        ok = false;
        return lines;
    }
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    ok = true;
    return lines;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
             std::ostream& err) {
    CLI::App app{"position-automaton regex matcher with density accounting"};
    app.require_subcommand(1);
    int64_t max_m = 100000, max_n = 100000000;
    app.add_option("--max-m", max_m, "refuse patterns with more positions");
    app.add_option("--max-n", max_n, "refuse longer inputs");

    std::string pattern, input_path, pattern_file, corpus_file;
    bool as_json = false, as_tsv = false, with_counters = false;

    auto* cmd_match = app.add_subcommand("match", "match text against a pattern");
    cmd_match->add_option("pattern", pattern)->required();
    cmd_match->add_option("input", input_path, "file or - for stdin");

    auto* cmd_density = app.add_subcommand("density", "report per-step state set sizes");
    cmd_density->add_option("pattern", pattern)->required();
    cmd_density->add_option("input", input_path);
    cmd_density->add_flag("--json", as_json);
    cmd_density->add_flag("--tsv", as_tsv);
    cmd_density->add_flag("--counters", with_counters);

    auto* cmd_bench = app.add_subcommand("bench", "run every pattern against every corpus line");
    cmd_bench->add_option("pattern-file", pattern_file)->required();
    cmd_bench->add_option("corpus-file", corpus_file)->required();
    cmd_bench->add_flag("--json", as_json);

    auto* cmd_oracle = app.add_subcommand("oracle-check", "compare engine against the oracle");
    cmd_oracle->add_option("pattern", pattern)->required();
    cmd_oracle->add_option("input", input_path);

    std::vector<std::string> argv(args);
    try {
        std::vector<const char*> cargv;
        cargv.push_back("glush");
        for (const auto& a : argv) cargv.push_back(a.c_str());
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "glush: " << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd_match->parsed() || cmd_density->parsed() || cmd_oracle->parsed()) {
            auto cp = CompiledPattern::compile(pattern);
            auto text = read_input(input_path, in, err);
            if (!text) return 2;
            auto chars = decode_text(*text);
            if (!guard_limits(*cp, chars.size(), max_m, max_n, err)) return 2;

            if (cmd_oracle->parsed()) {
                auto full_tables = analyze(cp->tree()); // the oracle needs follow sets
                auto oracle = build_oracle(cp->tree(), full_tables);
                auto oracle_run = oracle_match(oracle, chars);
                auto report = cp->run(chars);
                bool agree = oracle_run.accepted == report.accepted;
                // engine state sets are recomputed here step by step
                std::vector<int32_t> current;
                QueryCounters ctx;
                for (size_t i = 0; i < chars.size() && agree; ++i) {
                    if (i == 0) {
                        const auto* f = cp->first_by_char(chars[0]);
                        current = f ? *f : std::vector<int32_t>{};
                    } else {
                        current = cp->engine().state_set_transition(current, chars[i], ctx);
                    }
                    std::vector<int32_t> as_states;
                    for (int32_t r : current) as_states.push_back(r + 1);
                    if (as_states != oracle_run.state_sets[i + 1]) {
                        err << "glush: state sets diverge at step " << i + 1 << "\n";
                        agree = false;
                    }
                }
                out << (agree ? "agree" : "disagree") << "\n";
                return agree ? 0 : 1;
            }

            auto report = cp->run(chars);
            if (cmd_match->parsed()) return report.accepted ? 0 : 1;
            if (as_json)
                out << report_json(pattern, report).dump() << "\n";
            else if (as_tsv)
                report_tsv(out, pattern, report);
            else
                report_text(out, report, with_counters);
            return 0;
        }

        // bench
        bool ok = false;
        auto patterns = read_lines(pattern_file, err, ok);
        if (!ok) return 2;
        auto corpus = read_lines(corpus_file, err, ok);
        if (!ok) return 2;
        json all = json::array();
        for (const auto& p : patterns) {
            auto cp = CompiledPattern::compile(p);
            for (const auto& line : corpus) {
                auto chars = decode_text(line);
                if (!guard_limits(*cp, chars.size(), max_m, max_n, err)) return 2;
                auto report = cp->run(chars);
                if (as_json)
                    all.push_back(report_json(p, report));
                else
                    report_tsv(out, p, report);
            }
        }
        if (as_json) out << all.dump() << "\n";
        return 0;
    } catch (const SyntaxError& e) {
        err << "glush: syntax error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace glush
