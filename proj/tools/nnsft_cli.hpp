#pragma once

// Command-line driver. Exit codes: 0 success, 1 a check failed or a
// violation was found, 2 bad input or usage.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nnsft/nnsft.hpp"

namespace nnsft::cli {

inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kInputError = 2;

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << body;
}

inline FillRule make_rule(const std::string& name, std::uint64_t seed) {
    if (name == "smallest") return FillRule::smallest();
    if (name == "random") return FillRule::seeded(seed);
    throw InputError("unknown rule '" + name + "' (expected smallest|random)");
}

inline std::string symbols_list(const std::vector<Symbol>& s) {
    std::string out = "[";
    for (std::size_t k = 0; k < s.size(); ++k) out += (k ? ", " : "") + std::to_string(s[k]);
    return out + "]";
}

struct Options {
    std::string spec;
    std::string window;
    std::string out;
    std::string csv;
    std::string perturbation;
    std::string rule = "smallest";
    std::string kind = "window";
    std::string epsilon = "1/64";
    std::string cap = "1/384";
    std::optional<int> size;
    double corrupt = 0.15;
    double sample_corrupt = 0.0;
    std::size_t support = 8;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    int strip_width = 8;
    double tol = 1e-10;
    unsigned jobs = 1;
    bool out_of_hypothesis = false;
};

inline int cmd_check(const Options& o, std::ostream& out) {
    NnSft sft = load_spec(o.spec);
    auto ssf = check_ssf(sft);
    out << "ssf: " << (ssf.fillable ? "true" : "false") << '\n';
    if (ssf.witness) {
        const auto& w = *ssf.witness;
        out << "witness: north=" << w.north << " south=" << w.south << " east=" << w.east << " west=" << w.west
            << '\n';
    }
    out << "safe_symbols: " << symbols_list(find_safe_symbols(sft)) << '\n';
    out << "local_implies_global: "
        << (assert_local_implies_global(sft) == GlobalAdmissibility::certified ? "certified" : "unknown") << '\n';
    int code = ssf.fillable ? kOk : kCheckFailed;
    if (!o.window.empty()) {
        Window w = parse_window(read_file(o.window));
        auto v = violations(w, sft);
        auto bad = bad_sites(w, sft);
        out << "violations: " << v.size() << '\n';
        for (const auto& e : v) out << "violation " << to_string(e.site) << ' ' << to_string(e.direction) << '\n';
        out << "bad_sites: " << bad.sites.size() << '\n';
        if (!v.empty()) code = kCheckFailed;
    }
    return code;
}

inline int cmd_repair(const Options& o, std::ostream& out) {
    NnSft sft = load_spec(o.spec);
    if (o.window.empty()) throw InputError("repair needs --window");
    Window w = parse_window(read_file(o.window));
    validate_symbols(w, sft);
    const int n = o.size ? *o.size : w.domain().centered_radius() - 1;
    if (n < 0) throw InputError("window must contain the box of radius 1 around the origin");
    SsfShift ssf(sft);
    FillRule rule = make_rule(o.rule, o.seed);
    RepairResult r = repair(w, ssf, n, rule);
    std::size_t changed = 0;
    for (Site s : w.domain().sites()) changed += (w[s] != r.repaired[s]) ? 1 : 0;
    std::ostringstream report;
    report << "# repair: N=" << n << " bad_total=" << r.total_bad() << " changed_sites=" << changed
           << " bad_after=" << count_bad(r.repaired, sft, Rect::box(n)) << '\n';
    if (o.out.empty()) {
        out << report.str() << render_window(r.repaired);
    } else {
        write_file(o.out, render_window(r.repaired));
        out << report.str();
    }
    return kOk;
}

inline int cmd_sample(const Options& o, std::ostream& out) {
    NnSft sft = load_spec(o.spec);
    std::string body;
    if (o.kind == "window") {
        const int radius = o.size.value_or(8);
        SsfShift ssf(sft);
        Window w = sample_admissible(ssf, radius, mix_seed(o.seed, 1));
        if (o.sample_corrupt > 0.0) w = corrupt(w, sft.alphabet_size(), o.sample_corrupt, mix_seed(o.seed, 2));
        body = render_window(w);
    } else if (o.kind == "perturbation") {
        const double cap = text::parse_real_or_ratio(o.cap);
        body = render_perturbation(sample_perturbation(cap, o.support, sft.alphabet_size(), o.seed));
    } else {
        throw InputError("unknown --kind '" + o.kind + "' (expected window|perturbation)");
    }
    if (o.out.empty())
        out << body;
    else
        write_file(o.out, body);
    return kOk;
}

inline int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
    TrialConfig cfg;
    cfg.sft = load_spec(o.spec);
    cfg.size = o.size.value_or(24);
    cfg.epsilon = text::parse_real_or_ratio(o.epsilon);
    cfg.cap = text::parse_real_or_ratio(o.cap);
    cfg.corrupt_rate = o.corrupt;
    cfg.support = o.support;
    cfg.seed = o.seed;
    cfg.trials = o.trials;
    cfg.random_rule = (make_rule(o.rule, 0).is_random());
    cfg.allow_out_of_hypothesis = o.out_of_hypothesis;
    cfg.jobs = o.jobs;
    if (!o.perturbation.empty())
        cfg.perturbation = parse_perturbation(read_file(o.perturbation), cfg.sft.alphabet_size());
    auto reports = run_experiment(cfg);
    std::string csv = render_csv(reports);
    out << csv;
    if (!o.csv.empty()) write_file(o.csv, csv);
    auto summary = summarize(reports);
    if (!summary.all_pass()) {
        for (const auto& r : reports)
            if (!r.all_pass()) err << "trial " << r.trial << " failed (seed " << r.seed << ")\n";
        return kCheckFailed;
    }
    return kOk;
}

inline int cmd_entropy(const Options& o, std::ostream& out) {
    NnSft sft = load_spec(o.spec);
    StripEntropy e = strip_entropy(sft, o.strip_width, o.tol);
    out << "# natural logarithm\n";
    if (e.empty()) out << "# empty subshift\n";
    if (!e.converged)
        out << "# not converged: lambda in [" << format_real(e.lower) << ", " << format_real(e.upper) << "]\n";
    out << "entropy_per_site " << format_real(e.per_site) << " strip_width " << e.width << " states " << e.states
        << '\n';
    return kOk;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    detail::Options o;
    CLI::App app{"Nearest-neighbour Z^2 SFTs: SSF checks, configuration repair, penalty-function stability "
                 "experiments, strip entropy",
                 "nnsft"};
    app.require_subcommand(1);

    auto add_spec = [&](CLI::App* sub) {
        sub->add_option("--spec", o.spec, "SFT: hardsquare | checkerboard:<k> | full:<q> | path to spec file")
            ->required();
    };

    auto* check = app.add_subcommand("check", "SSF, safe symbols and (optionally) violations of a window");
    add_spec(check);
    check->add_option("--window", o.window, "window file to scan for violations");

    auto* repair_cmd = app.add_subcommand("repair", "repair a window shell by shell");
    add_spec(repair_cmd);
    repair_cmd->add_option("--window", o.window, "window file")->required();
    repair_cmd->add_option("--size", o.size, "repair radius N (default: largest N with Lambda_{N+1} in the window)");
    repair_cmd->add_option("--rule", o.rule, "fill rule: smallest | random")->capture_default_str();
    repair_cmd->add_option("--seed", o.seed, "seed for the random fill rule")->capture_default_str();
    repair_cmd->add_option("--out", o.out, "write the repaired window here instead of stdout");

    auto* sample = app.add_subcommand("sample", "sample an admissible window or a perturbation");
    add_spec(sample);
    sample->add_option("--kind", o.kind, "window | perturbation")->capture_default_str();
    sample->add_option("--size", o.size, "window radius (default 8)");
    sample->add_option("--seed", o.seed, "seed")->capture_default_str();
    sample->add_option("--corrupt", o.sample_corrupt, "corruption rate applied to the sampled window")
        ->capture_default_str();
    sample->add_option("--cap", o.cap, "perturbation coefficient cap (decimal or p/q)")->capture_default_str();
    sample->add_option("--support", o.support, "number of perturbed Lambda_1 patterns")->capture_default_str();
    sample->add_option("--out", o.out, "output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "run stability-inequality trials; CSV on stdout");
    add_spec(verify);
    verify->add_option("--size", o.size, "box radius N (default 24)");
    verify->add_option("--epsilon", o.epsilon, "epsilon (decimal or p/q)")->capture_default_str();
    verify->add_option("--cap", o.cap, "perturbation coefficient cap (decimal or p/q)")->capture_default_str();
    verify->add_option("--corrupt", o.corrupt, "corruption rate")->capture_default_str();
    verify->add_option("--support", o.support, "number of perturbed Lambda_1 patterns")->capture_default_str();
    verify->add_option("--trials", o.trials, "number of trials")->capture_default_str();
    verify->add_option("--seed", o.seed, "master seed")->capture_default_str();
    verify->add_option("--rule", o.rule, "fill rule: smallest | random")->capture_default_str();
    verify->add_option("--csv", o.csv, "also write the CSV here");
    verify->add_option("--perturbation", o.perturbation, "perturbation file to use instead of sampling");
    verify->add_option("--jobs", o.jobs, "worker threads; output is identical for any value")->capture_default_str();
    verify->add_flag("--allow-out-of-hypothesis", o.out_of_hypothesis, "permit 5*cap > epsilon");

    auto* entropy = app.add_subcommand("entropy", "strip transfer-matrix entropy (natural log)");
    add_spec(entropy);
    entropy->add_option("--strip-width", o.strip_width, "strip width m")->capture_default_str();
    entropy->add_option("--tol", o.tol, "power-iteration relative tolerance")->capture_default_str();

    std::vector<const char*> argv{"nnsft"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        if (code == 0) return kOk;
        err << app.help();
        return kInputError;
    }

    try {
        if (check->parsed()) return detail::cmd_check(o, out);
        if (repair_cmd->parsed()) return detail::cmd_repair(o, out);
        if (sample->parsed()) return detail::cmd_sample(o, out);
        if (verify->parsed()) return detail::cmd_verify(o, out, err);
        if (entropy->parsed()) return detail::cmd_entropy(o, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace nnsft::cli
