#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "entangle/ket_parser.hpp"
#include "entangle/measures.hpp"
#include "entangle/verify.hpp"

namespace entangle::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

enum ExitCode {
    kOk = 0,
    kUsage = 1,
    kParse = 2,
    kInvalidState = 3,
    kNumerical = 4,
    kViolation = 5,
};

struct Options {
    std::string file = "-";   // analysis input; '-' reads stdin
    std::string vfile;        // verify input; empty selects --qubits mode
    std::string file_b;
    std::string format = "auto";
    bool json = false;
    bool detail = false;
    double rank_eps = 1e-9;
    double norm_eps = 1e-8;
    bool no_normalize = false;
    std::string subset;
    int trials = 50;
    std::uint64_t seed = 1;
    int qubits = 0;
    bool random = false;
    int rounds = 1;
    int threads = 1;
};

std::string read_all(const std::string& path, std::istream& in) {
    if (path == "-") {
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw StateError("cannot open input file '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

// Table inputs start with a 'dims:' header (and may carry '#' comments);
// ket expressions start with a ket, scalar or parenthesis. A leading
// 'dims:' still means ket format when a ';' terminator is present, since
// table rows can never contain one.
std::optional<std::string> detect_format(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos) continue;
        if (line[i] == '#') return "table";
        if (line.compare(i, 5, "dims:") == 0) {
            std::string stripped;
            std::istringstream whole(text);
            std::string l2;
            while (std::getline(whole, l2)) {
                if (auto h = l2.find('#'); h != std::string::npos) l2.erase(h);
                stripped += l2;
                stripped += '\n';
            }
            return stripped.find(';') != std::string::npos ? "ket" : "table";
        }
        static const std::string ket_leads = "|(+-.0123456789is";
        if (ket_leads.find(line[i]) != std::string::npos) return "ket";
        return std::nullopt;
    }
    return std::nullopt;
}

struct LoadedState {
    PureState state;
    bool normalized_input = false;
};

LoadedState load_state(const std::string& path, const Options& opt, const Limits& limits,
                       std::istream& in, std::ostream& err) {
    const std::string text = read_all(path, in);
    std::string format = opt.format;
    if (format == "auto") {
        const auto detected = detect_format(text);
        if (!detected)
            throw CLI::ValidationError("cannot auto-detect the input format; pass --format ket|table");
        format = *detected;
    }
    ParsedState parsed = format == "ket" ? parse_ket_expression(text, limits)
                                         : parse_amplitude_table(text, limits);
    const bool rescaled = std::abs(parsed.input_norm - 1.0) > opt.norm_eps;
    if (rescaled && opt.no_normalize) {
        err << "error: input norm " << parsed.input_norm << " deviates from 1 by more than "
            << opt.norm_eps << " and --no-normalize is set\n";
        throw ZeroStateError("input rejected by --no-normalize");
    }
    return LoadedState{std::move(parsed.state), rescaled};
}

// --- rendering -----------------------------------------------------------

ordered_json json_dims(const PureState& state) {
    return ordered_json(state.shape().dims());
}

ordered_json json_blocks(const EntanglementCombination& ec) {
    ordered_json arr = ordered_json::array();
    for (const PartySubset& blk : ec.blocks) {
        ordered_json parties = ordered_json::array();
        for (int p : blk.parties()) parties.push_back(p + 1);
        arr.push_back(parties);
    }
    return arr;
}

std::string subset_key(std::uint64_t mask, int n) {
    std::string key;
    for (int k = 0; k < n; ++k) {
        if ((mask >> k) & 1) {
            if (!key.empty()) key += ',';
            key += std::to_string(k + 1);
        }
    }
    return key;
}

std::string human_subset(const PartySubset& s) {
    std::string out;
    for (int p : s.parties()) {
        if (!out.empty()) out += ',';
        out += 'A' + std::to_string(p + 1);
    }
    return out;
}

void print_dims(std::ostream& out, const PureState& state) {
    out << "dims:";
    for (int d : state.shape().dims()) out << ' ' << d;
    out << '\n';
}

ordered_json json_number_or_inf(double v) {
    if (std::isinf(v)) return ordered_json("inf");
    return ordered_json(v);
}

void render_ce(const CEReport& report, const PureState& state, bool json, std::ostream& out) {
    if (json) {
        ordered_json j;
        j["dims"] = json_dims(state);
        j["ce"] = report.ce;
        j["ec"] = json_blocks(report.ec);
        ordered_json blocks = ordered_json::array();
        for (const auto& [blk, value] : report.block_cefs) {
            ordered_json b;
            ordered_json parties = ordered_json::array();
            for (int p : blk.parties()) parties.push_back(p + 1);
            b["parties"] = parties;
            b["cef"] = value;
            blocks.push_back(b);
        }
        j["blocks"] = blocks;
        if (report.subset_entropies) {
            ordered_json se = ordered_json::object();
            for (const auto& [mask, s] : *report.subset_entropies)
                se[subset_key(mask, report.ec.num_parties)] = s;
            j["subset_entropies"] = se;
        }
        j["tolerances"] = {{"rank_eps", report.tolerances.rank_eps},
                           {"norm_eps", report.tolerances.norm_eps}};
        j["normalized_input"] = report.normalized_input;
        out << j.dump() << '\n';
        return;
    }
    print_dims(out, state);
    out << "ec: " << to_string(report.ec) << '\n';
    out << "ce: " << report.ce << '\n';
    for (const auto& [blk, value] : report.block_cefs)
        out << "block (" << human_subset(blk) << "): cef = " << value << '\n';
    if (report.subset_entropies) {
        for (const auto& [mask, s] : *report.subset_entropies)
            out << "S(" << subset_key(mask, report.ec.num_parties) << ") = " << s << '\n';
    }
    out << "tolerances: rank_eps=" << report.tolerances.rank_eps
        << " norm_eps=" << report.tolerances.norm_eps << '\n';
    out << "normalized_input: " << (report.normalized_input ? "true" : "false") << '\n';
}

ordered_json json_check(const PropertyCheckResult& r) {
    ordered_json j;
    j["property"] = r.property;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["max_violation"] = json_number_or_inf(r.max_violation);
    j["tolerance"] = kPropertyTolerance;
    j["pass"] = r.pass;
    return j;
}

void render_check(const PropertyCheckResult& r, std::ostream& out) {
    out << "property: " << r.property << '\n'
        << "trials: " << r.trials << '\n'
        << "seed: " << r.seed << '\n'
        << "max_violation: " << r.max_violation << '\n'
        << "tolerance: " << kPropertyTolerance << '\n'
        << "result: " << (r.pass ? "PASS" : "FAIL") << '\n';
}

// --- command handlers -----------------------------------------------------

PartySubset parse_subset_arg(const std::string& text, int n) {
    if (text.empty()) throw CLI::ValidationError("--subset is required for `entropy`");
    std::vector<int> parties;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        int label = 0;
        try {
            label = std::stoi(item, &used);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--subset expects comma-separated party labels");
        }
        if (used != item.size() || label < 1 || label > n)
            throw CLI::ValidationError("--subset labels must be in 1.." + std::to_string(n));
        parties.push_back(label - 1);
    }
    if (parties.empty()) throw CLI::ValidationError("--subset lists no parties");
    return PartySubset::from_parties(parties, n);
}

int run_analyze(const std::string& command, const Options& opt, const Limits& limits,
                std::istream& in, std::ostream& out, std::ostream& err) {
    const Tolerances tol{opt.rank_eps, opt.norm_eps};
    tol.validate();
    const LoadedState loaded = load_state(opt.file, opt, limits, in, err);
    const PureState& state = loaded.state;

    if (command == "ce") {
        CEReport report = ce(state, tol, opt.detail, limits, opt.threads);
        report.normalized_input = loaded.normalized_input;
        render_ce(report, state, opt.json, out);
        return kOk;
    }
    if (command == "ec") {
        const EntanglementCombination ec = entanglement_combination(state, tol, limits);
        if (opt.json) {
            ordered_json j;
            j["dims"] = json_dims(state);
            j["ec"] = json_blocks(ec);
            out << j.dump() << '\n';
        } else {
            print_dims(out, state);
            out << "ec: " << to_string(ec) << '\n';
        }
        return kOk;
    }
    if (command == "cef") {
        const double value = cef(state, limits, opt.threads);
        const EntanglementCombination ec = entanglement_combination(state, tol, limits);
        if (!ec.is_fully_entangled())
            err << "warning: state is not fully entangled (" << ec.block_count()
                << " blocks); the CEF sum is still reported\n";
        if (opt.json) {
            ordered_json j;
            j["dims"] = json_dims(state);
            j["cef"] = value;
            out << j.dump() << '\n';
        } else {
            print_dims(out, state);
            out << "cef: " << value << '\n';
        }
        return kOk;
    }
    if (command == "entropy") {
        const PartySubset subset = parse_subset_arg(opt.subset, state.num_parties());
        const double value = subset_entropy(state, subset);
        if (opt.json) {
            ordered_json j;
            j["dims"] = json_dims(state);
            ordered_json labels = ordered_json::array();
            for (int p : subset.parties()) labels.push_back(p + 1);
            j["subset"] = labels;
            j["entropy"] = value;
            out << j.dump() << '\n';
        } else {
            print_dims(out, state);
            out << "subset: " << human_subset(subset) << '\n';
            out << "entropy: " << value << '\n';
        }
        return kOk;
    }
    throw CLI::ValidationError("unknown command");
}

SystemShape qubit_shape(int qubits, const Limits& limits) {
    if (qubits < 1) throw CLI::ValidationError("--qubits must be >= 1");
    return SystemShape(std::vector<int>(static_cast<std::size_t>(qubits), 2), limits);
}

int run_verify(const std::string& which, const Options& opt, const Limits& limits, std::istream& in,
               std::ostream& out, std::ostream& err) {
    const Tolerances tol{opt.rank_eps, opt.norm_eps};
    tol.validate();
    if (opt.trials < 1) throw CLI::ValidationError("--trials must be >= 1");

    const bool random_mode = opt.vfile.empty() && opt.qubits > 0;
    if (!random_mode && opt.vfile.empty())
        throw CLI::ValidationError("pass an input state (FILE or '-') or --qubits N for random states");

    std::vector<PropertyCheckResult> results;
    if (which == "lu") {
        if (random_mode) {
            results.push_back(lu_invariance_suite(qubit_shape(opt.qubits, limits), opt.trials, opt.seed, tol));
        } else {
            const LoadedState loaded = load_state(opt.vfile, opt, limits, in, err);
            results.push_back(lu_invariance_check(loaded.state, opt.trials, opt.seed, tol));
        }
    } else if (which == "additivity") {
        if (random_mode) {
            results.push_back(additivity_suite(qubit_shape(opt.qubits, limits), opt.trials, opt.seed, tol));
        } else {
            if (opt.file_b.empty())
                throw CLI::ValidationError("additivity needs two input files (or --qubits N)");
            const LoadedState a = load_state(opt.vfile, opt, limits, in, err);
            const LoadedState b = load_state(opt.file_b, opt, limits, in, err);
            PropertyCheckResult r = additivity_check(a.state, b.state, tol);
            r.seed = opt.seed;
            results.push_back(std::move(r));
        }
    } else if (which == "locc") {
        if (opt.rounds < 1) throw CLI::ValidationError("--rounds must be >= 1");
        LoccCheckResult r = random_mode
                                ? locc_suite(qubit_shape(opt.qubits, limits), opt.rounds, opt.trials, opt.seed, tol)
                                : locc_monotonicity_check(load_state(opt.vfile, opt, limits, in, err).state,
                                                          opt.rounds, opt.trials, opt.seed, tol);
        results.push_back(std::move(r.lemma_subset_entropy));
        results.push_back(std::move(r.ce_monotonicity));
    } else {
        throw CLI::ValidationError("unknown verify subcommand");
    }

    if (opt.json) {
        if (results.size() == 1) {
            out << json_check(results[0]).dump() << '\n';
        } else {
            ordered_json arr = ordered_json::array();
            for (const auto& r : results) arr.push_back(json_check(r));
            out << arr.dump() << '\n';
        }
    } else {
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (i) out << '\n';
            render_check(results[i], out);
        }
    }

    for (const auto& r : results)
        if (!r.pass) return kViolation;
    return kOk;
}

Limits limits_from_env(std::ostream& err, bool& ok) {
    Limits limits;
    ok = true;
    if (const char* cap = std::getenv("ENTANGLE_MAX_DIM")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(cap, &end, 10);
        if (end == cap || *end != '\0' || v < 2) {
            err << "error: ENTANGLE_MAX_DIM must be an integer >= 2\n";
            ok = false;
        } else {
            limits.max_total_dim = static_cast<std::size_t>(v);
        }
    }
    return limits;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
    out << std::setprecision(12);
    err << std::setprecision(12);

    Options opt;
    CLI::App app{"entangle: combinatorial entropy and entanglement structure of multipartite pure states"};
    app.require_subcommand(1);

    auto add_state_options = [&](CLI::App* cmd, bool with_file) {
        if (with_file) cmd->add_option("file", opt.file, "input file, or '-' for stdin");
        cmd->add_option("--format", opt.format, "input format")
            ->check(CLI::IsMember({"auto", "ket", "table"}));
        cmd->add_flag("--json", opt.json, "emit a JSON report");
        cmd->add_option("--tol", opt.rank_eps, "relative eigenvalue cutoff for rank decisions");
        cmd->add_option("--norm-eps", opt.norm_eps, "allowed deviation of the input norm from 1");
        cmd->add_flag("--no-normalize", opt.no_normalize,
                      "reject inputs whose norm deviates by more than --norm-eps");
        cmd->add_option("--threads", opt.threads, "threads for subset-entropy evaluation")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* cmd_ce = app.add_subcommand("ce", "full combinatorial-entropy report");
    add_state_options(cmd_ce, true);
    cmd_ce->add_flag("--detail", opt.detail, "include every subset entropy used by the sum");

    CLI::App* cmd_ec = app.add_subcommand("ec", "entanglement combination (partition) only");
    add_state_options(cmd_ec, true);

    CLI::App* cmd_cef = app.add_subcommand("cef", "half-sum of all nontrivial subset entropies");
    add_state_options(cmd_cef, true);

    CLI::App* cmd_entropy = app.add_subcommand("entropy", "entropy of one party subset");
    add_state_options(cmd_entropy, true);
    cmd_entropy->add_option("--subset", opt.subset, "comma-separated 1-based party labels")->required();

    CLI::App* cmd_verify = app.add_subcommand("verify", "randomized property checks");
    cmd_verify->require_subcommand(1);
    auto add_verify_options = [&](CLI::App* cmd, bool two_files) {
        cmd->add_option("file", opt.vfile, "input state file, or '-' for stdin");
        if (two_files) cmd->add_option("file_b", opt.file_b, "second input state file");
        cmd->add_option("--format", opt.format, "input format")
            ->check(CLI::IsMember({"auto", "ket", "table"}));
        cmd->add_flag("--json", opt.json, "emit a JSON report");
        cmd->add_option("--tol", opt.rank_eps, "relative eigenvalue cutoff for rank decisions");
        cmd->add_option("--norm-eps", opt.norm_eps, "allowed deviation of the input norm from 1");
        cmd->add_flag("--no-normalize", opt.no_normalize,
                      "reject inputs whose norm deviates by more than --norm-eps");
        cmd->add_option("--trials", opt.trials, "number of randomized trials");
        cmd->add_option("--seed", opt.seed, "base seed for all randomness");
        cmd->add_option("--qubits", opt.qubits, "use random n-qubit states instead of a file");
        cmd->add_flag("--random", opt.random, "draw random states (requires --qubits)");
        cmd->add_option("--threads", opt.threads, "threads for subset-entropy evaluation")
            ->check(CLI::PositiveNumber);
    };
    CLI::App* cmd_lu = cmd_verify->add_subcommand("lu", "local-unitary invariance of CE and entropies");
    add_verify_options(cmd_lu, false);
    CLI::App* cmd_add = cmd_verify->add_subcommand("additivity", "CE additivity under tensor products");
    add_verify_options(cmd_add, true);
    CLI::App* cmd_locc = cmd_verify->add_subcommand("locc",
                                                    "entropy/CE monotonicity under local projective measurements");
    add_verify_options(cmd_locc, false);
    cmd_locc->add_option("--rounds", opt.rounds, "measurements per trial");

    std::vector<const char*> argv;
    argv.push_back("entangle");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());

        bool env_ok = true;
        const Limits limits = limits_from_env(err, env_ok);
        if (!env_ok) return kUsage;

        if (opt.random && opt.qubits < 1) {
            err << "error: --random requires --qubits N\n";
            return kUsage;
        }

        for (const auto* cmd : {cmd_ce, cmd_ec, cmd_cef, cmd_entropy}) {
            if (app.got_subcommand(cmd))
                return run_analyze(cmd->get_name(), opt, limits, in, out, err);
        }
        if (app.got_subcommand(cmd_verify)) {
            for (const auto* cmd : {cmd_lu, cmd_add, cmd_locc}) {
                if (cmd_verify->got_subcommand(cmd))
                    return run_verify(cmd->get_name(), opt, limits, in, out, err);
            }
        }
        err << "error: no subcommand selected\n";
        return kUsage;
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        err << "error: line " << e.line() << ", column " << e.column() << ": " << e.what() << '\n';
        return kParse;
    } catch (const NumericsError& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const StateError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidState;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace entangle::cli
