#pragma once

// Experiment harness: sample an admissible window, corrupt it, repair it, and
// check the quantitative inequalities of the stability argument on the
// result. All Birkhoff sums run over Lambda_N; windows have radius N + 2.
//
// Throughout, eps is the certified norm gap of the sampled perturbation, not
// the nominal 1/64; every bound below only gets stronger with a smaller eps.
//
//   heavy window:        avg_T g <= -1/2 + eps          when bad fraction >= 1/2
//   admissible window:   avg_T g >= -eps                when T has no bad site
//   per shell:           S g(x^(i)) - S g(x^(i-1)) >= (1 - 32 eps)|S^i| - 112 eps
//   total:               S g(x) - S g(x~) <= 112 eps (N+1) + 2(8N+8) + (-1 + 32 eps) sum |S^i|
//
// The tail constant uses #(Lambda_{N+1} \ Lambda_N) = 8N + 8. The smaller
// 2(8N+1) undercounts that ring; it is kept for reference, never checked.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nnsft/admissibility.hpp"
#include "nnsft/error.hpp"
#include "nnsft/lattice.hpp"
#include "nnsft/potentials.hpp"
#include "nnsft/repair.hpp"
#include "nnsft/sft.hpp"

namespace nnsft {

/// splitmix64 finaliser; used to derive independent per-trial streams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// A locally admissible window of the given radius. Sites are filled bottom
/// row first, left to right, each with a uniformly random symbol compatible
/// with its already-filled west and south neighbours.
inline Window sample_admissible(const SsfShift& ssf, int radius, std::uint64_t seed) {
    Window w(Rect::box(radius));
    std::mt19937_64 rng(seed);
    const auto& table = ssf.table();
    const auto q = ssf.sft().alphabet_size();
    for (int y = -radius; y <= radius; ++y)
        for (int x = -radius; x <= radius; ++x) {
            SymbolSet options(q, true);
            if (x > -radius) options &= table.right_of(w[{x - 1, y}]);
            if (y > -radius) options &= table.above(w[{x, y - 1}]);
            if (options.empty()) throw ContractViolation("SSF contract violated while sampling");
            std::uniform_int_distribution<std::size_t> pick(0, options.count() - 1);
            w[{x, y}] = options.nth(pick(rng));
        }
    if (!violations(w, ssf.sft()).empty()) throw ContractViolation("sampled window is not admissible");
    return w;
}

/// Each site independently resampled uniformly from the alphabet with probability `rate`.
inline Window corrupt(const Window& w, std::size_t alphabet_size, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw InputError("corruption rate must lie in [0, 1]");
    Window out = w;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<Symbol> symbol(0, static_cast<Symbol>(alphabet_size - 1));
    for (Site s : w.domain().sites()) {
        // Both draws always happen so the stream does not depend on the rate.
        const double u = coin(rng);
        const Symbol v = symbol(rng);
        if (u < rate) out[s] = v;
    }
    return out;
}

// -- checks -------------------------------------------------------------------

enum class AverageBranch { admissible, heavy, light };

inline const char* to_string(AverageBranch b) {
    switch (b) {
        case AverageBranch::admissible: return "admissible";
        case AverageBranch::heavy: return "heavy";
        case AverageBranch::light: return "light";
    }
    return "?";
}

struct AverageCheck {
    AverageBranch branch = AverageBranch::light;
    double bad_fraction = 0.0;
    double average = 0.0;
    double gap = 0.0;

    /// The inequality of the branch; "light" windows (0 < bad fraction < 1/2) are not covered.
    bool pass() const {
        switch (branch) {
            case AverageBranch::admissible: return average >= -gap;
            // Pointwise |g - f| <= eps also gives the sharper -bad_fraction + eps.
            case AverageBranch::heavy: return average <= -0.5 + gap && average <= -bad_fraction + gap;
            case AverageBranch::light: return true;
        }
        return false;
    }
    double margin() const {
        switch (branch) {
            case AverageBranch::admissible: return average + gap;
            case AverageBranch::heavy: return (-bad_fraction + gap) - average;
            case AverageBranch::light: return std::numeric_limits<double>::infinity();
        }
        return 0.0;
    }
};

inline AverageCheck check_average_bounds(const PerturbedPotential& g, const Window& w, const Rect& region) {
    AverageCheck c;
    const double area = static_cast<double>(region.area());
    const auto parts = birkhoff_parts(g, w, region);
    c.bad_fraction = static_cast<double>(-parts.penalty) / area;
    c.average = parts.total() / area;
    c.gap = g.certified_norm_gap;
    c.branch = parts.penalty == 0 ? AverageBranch::admissible
             : c.bad_fraction >= 0.5 ? AverageBranch::heavy
                                     : AverageBranch::light;
    return c;
}

struct ShellGap {
    int shell = 0;
    std::size_t bad = 0;       // |S^i|
    double observed = 0.0;     // S g(x^(i)) - S g(x^(i-1))
    double required = 0.0;     // (1 - 32 eps)|S^i| - 112 eps
    std::size_t prefixed = 0;  // sites of S^i already good in x^(i-1)
    double eps = 0.0;

    bool pass() const { return observed >= required; }
    double margin() const { return observed - required; }

    /// The same bound over the sites of S^i that are still bad when shell i
    /// starts. Diagnostic only: an inner fill can repair a bottom or left
    /// site of S^i early, and then the literal bound above can fail.
    double residual_required() const { return (1.0 - 32.0 * eps) * static_cast<double>(bad - prefixed) - 112.0 * eps; }
    double residual_margin() const { return observed - residual_required(); }
};

inline double required_shell_improvement(std::size_t bad, double eps) {
    return (1.0 - 32.0 * eps) * static_cast<double>(bad) - 112.0 * eps;
}

/// Reference route: full Birkhoff sums of consecutive windows x^(i-1), x^(i).
inline std::vector<ShellGap> check_shell_gaps(const PerturbedPotential& g, const Window& original,
                                              const std::vector<ShellDecomposition>& shells,
                                              const std::vector<Window>& intermediates, int n) {
    if (shells.size() != intermediates.size() || shells.size() != static_cast<std::size_t>(n) + 1)
        throw InputError("shell and intermediate sequences must both have N + 1 entries");
    const Rect region = Rect::box(n);
    std::vector<ShellGap> out;
    auto prev = birkhoff_parts(g, original, region);
    for (std::size_t i = 0; i < shells.size(); ++i) {
        auto next = birkhoff_parts(g, intermediates[i], region);
        const Window& before = i == 0 ? original : intermediates[i - 1];
        ShellGap s{static_cast<int>(i), shells[i].total_bad, 0.0,
                   required_shell_improvement(shells[i].total_bad, g.certified_norm_gap), 0, g.certified_norm_gap};
        for (Site u : shells[i].sites()) s.prefixed += is_bad_unchecked(before, g.f.sft, u) ? 0 : 1;
        s.observed = static_cast<double>(next.penalty - prev.penalty) + (next.perturbation - prev.perturbation);
        out.push_back(s);
        prev = next;
    }
    return out;
}

/// Same quantities from the repair patches: only sites whose Lambda_1
/// neighbourhood meets a written site can change value, so only those are summed.
inline std::vector<ShellGap> shell_gaps_incremental(const PerturbedPotential& g, const Window& original,
                                                    const RepairResult& repaired, int n) {
    if (repaired.shells.size() != static_cast<std::size_t>(n) + 1 || repaired.patches.size() != repaired.shells.size())
        throw InputError("repair result does not cover shells 0..N");
    const Rect region = Rect::box(n);
    const NnSft& sft = g.f.sft;
    Window current = original;
    std::vector<char> marked(region.area(), 0);
    auto slot = [&](Site u) {
        return static_cast<std::size_t>(u.y + n) * static_cast<std::size_t>(2 * n + 1) + static_cast<std::size_t>(u.x + n);
    };
    std::vector<ShellGap> out;
    std::vector<Site> affected;
    for (std::size_t i = 0; i < repaired.patches.size(); ++i) {
        const SparsePatch& patch = repaired.patches[i];
        affected.clear();
        for (const auto& [s, v] : patch.entries())
            for (Site d : kPatchOffsets) {
                Site u = s + d;
                if (region.contains(u) && !marked[slot(u)]) {
                    marked[slot(u)] = 1;
                    affected.push_back(u);
                }
            }
        std::sort(affected.begin(), affected.end());
        std::size_t prefixed = 0;
        for (Site u : repaired.shells[i].sites()) prefixed += is_bad_unchecked(current, sft, u) ? 0 : 1;
        long long f_before = 0, f_after = 0;
        double h_before = 0.0, h_after = 0.0;
        for (Site u : affected) {
            f_before -= is_bad_unchecked(current, sft, u) ? 1 : 0;
            h_before += g.h(pattern_at(current, u));
        }
        patch.apply_to(current);
        for (Site u : affected) {
            f_after -= is_bad_unchecked(current, sft, u) ? 1 : 0;
            h_after += g.h(pattern_at(current, u));
            marked[slot(u)] = 0;
        }
        const auto bad = repaired.shells[i].total_bad;
        out.push_back({static_cast<int>(i), bad, static_cast<double>(f_after - f_before) + (h_after - h_before),
                       required_shell_improvement(bad, g.certified_norm_gap), prefixed, g.certified_norm_gap});
    }
    return out;
}

inline double tail_constant(int n) { return 2.0 * (8.0 * n + 8.0); }
inline double tail_constant_undercounted(int n) { return 2.0 * (8.0 * n + 1.0); }

struct TotalCheck {
    int n = 0;
    std::size_t bad_total = 0;
    double eps = 0.0;
    double total_gap = 0.0;    // S g(x) - S g(x~)
    double total_bound = 0.0;  // 112 eps (N+1) + 2(8N+8) + (-1 + 32 eps) sum |S^i|

    double area() const { return static_cast<double>(2 * n + 1) * static_cast<double>(2 * n + 1); }
    double bad_fraction() const { return static_cast<double>(bad_total) / area(); }
    /// Normalised improvement avg g(x~) - avg g(x).
    double improvement() const { return -total_gap / area(); }
    /// The least normalised improvement the bound guarantees.
    double required_improvement() const { return -total_bound / area(); }
    /// The bound says nothing when it allows zero or negative improvement.
    bool vacuous() const { return required_improvement() <= 0.0; }
    bool pass() const { return total_gap <= total_bound; }
};

inline TotalCheck check_total(const PerturbedPotential& g, const Window& original, const Window& repaired,
                              const std::vector<ShellDecomposition>& shells, int n) {
    TotalCheck t;
    t.n = n;
    t.eps = g.certified_norm_gap;
    for (const auto& s : shells) t.bad_total += s.total_bad;
    const Rect region = Rect::box(n);
    auto before = birkhoff_parts(g, original, region);
    auto after = birkhoff_parts(g, repaired, region);
    t.total_gap = static_cast<double>(before.penalty - after.penalty) + (before.perturbation - after.perturbation);
    t.total_bound = 112.0 * t.eps * (n + 1) + tail_constant(n) + (-1.0 + 32.0 * t.eps) * static_cast<double>(t.bad_total);
    return t;
}

// -- experiment ---------------------------------------------------------------

struct TrialConfig {
    NnSft sft = hard_square();
    int size = 24;                       // N
    double epsilon = 1.0 / 64.0;
    double cap = 1.0 / 384.0;
    double corrupt_rate = 0.15;
    std::size_t support = 8;
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    bool random_rule = false;
    bool allow_out_of_hypothesis = false;
    std::optional<RangeOnePerturbation> perturbation;  // fixed h instead of sampling
    unsigned jobs = 1;

    void validate() const {
        if (size < 0) throw InputError("size must be nonnegative");
        if (!(corrupt_rate >= 0.0 && corrupt_rate <= 1.0)) throw InputError("corruption rate must lie in [0, 1]");
        if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
        if (!(cap > 0.0)) throw InputError("cap must be positive");
        if (!allow_out_of_hypothesis && 5.0 * cap > epsilon)
            throw InputError("5 * cap exceeds epsilon; pass the out-of-hypothesis override to run anyway");
        if (jobs < 1) throw InputError("jobs must be at least 1");
    }
};

struct TrialReport {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    int n = 0;
    std::size_t q = 0;
    std::size_t bad_total = 0;
    double bad_fraction = 0.0;
    double certified_gap = 0.0;
    std::vector<ShellGap> per_shell;
    TotalCheck total;
    AverageCheck averages_original;
    AverageCheck averages_repaired;
    long long penalty_improvement = 0;  // S f(x~) - S f(x)
    std::size_t bad_after = 0;          // bad sites of x~ in Lambda_N

    double min_shell_margin() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& s : per_shell) m = std::min(m, s.margin());
        return m;
    }
    double min_residual_margin() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& s : per_shell) m = std::min(m, s.residual_margin());
        return m;
    }
    std::size_t shells_prefixed() const {
        std::size_t k = 0;
        for (const auto& s : per_shell) k += s.prefixed;
        return k;
    }
    bool shells_pass() const {
        return std::all_of(per_shell.begin(), per_shell.end(), [](const ShellGap& s) { return s.pass(); });
    }
    bool averages_pass() const {
        return averages_original.pass() && averages_repaired.pass() && averages_repaired.branch == AverageBranch::admissible;
    }
    bool repair_pass() const {
        return bad_after == 0 && penalty_improvement == static_cast<long long>(bad_total);
    }
    bool all_pass() const { return shells_pass() && averages_pass() && total.pass() && repair_pass(); }

    std::string average_status() const {
        return std::string(to_string(averages_original.branch)) + ":" + (averages_pass() ? "pass" : "fail");
    }
};

inline TrialReport run_trial(const TrialConfig& cfg, const SsfShift& ssf, std::size_t index) {
    const NnSft& sft = ssf.sft();
    const int n = cfg.size;
    TrialReport r;
    r.trial = index;
    r.seed = mix_seed(cfg.seed, index);
    r.n = n;
    r.q = sft.alphabet_size();

    Window base = sample_admissible(ssf, n + 2, mix_seed(r.seed, 1));
    Window x = corrupt(base, r.q, cfg.corrupt_rate, mix_seed(r.seed, 2));
    RangeOnePerturbation h = cfg.perturbation ? *cfg.perturbation
                                              : sample_perturbation(cfg.cap, cfg.support, r.q, mix_seed(r.seed, 3));
    PerturbedPotential g = make_perturbed(sft, std::move(h));
    if (!cfg.allow_out_of_hypothesis && !(g.certified_norm_gap < cfg.epsilon))
        throw InputError("certified norm gap is not below epsilon");
    r.certified_gap = g.certified_norm_gap;

    FillRule rule = cfg.random_rule ? FillRule::seeded(mix_seed(r.seed, 4)) : FillRule::smallest();
    RepairResult rr = repair(x, ssf, n, rule);
    const Rect region = Rect::box(n);

    r.bad_total = rr.total_bad();
    r.bad_fraction = static_cast<double>(r.bad_total) / static_cast<double>(region.area());
    r.per_shell = shell_gaps_incremental(g, x, rr, n);
    r.total = check_total(g, x, rr.repaired, rr.shells, n);
    r.averages_original = check_average_bounds(g, x, region);
    r.averages_repaired = check_average_bounds(g, rr.repaired, region);
    r.bad_after = count_bad(rr.repaired, sft, region);
    r.penalty_improvement = static_cast<long long>(count_bad(x, sft, region)) - static_cast<long long>(r.bad_after);
    return r;
}

struct ExperimentSummary {
    std::size_t trials = 0;
    std::size_t passed = 0;
    std::size_t vacuous_total = 0;
    double min_shell_margin = std::numeric_limits<double>::infinity();
    double min_total_slack = std::numeric_limits<double>::infinity();
    double min_residual_margin = std::numeric_limits<double>::infinity();
    std::size_t shell_failures = 0;  // trials failing only the literal per-shell bound
    std::vector<std::uint64_t> failed_seeds;

    bool all_pass() const { return passed == trials; }
};

inline ExperimentSummary summarize(const std::vector<TrialReport>& reports) {
    ExperimentSummary s;
    s.trials = reports.size();
    for (const auto& r : reports) {
        if (r.all_pass())
            ++s.passed;
        else
            s.failed_seeds.push_back(r.seed);
        if (r.total.vacuous()) ++s.vacuous_total;
        s.min_shell_margin = std::min(s.min_shell_margin, r.min_shell_margin());
        s.min_total_slack = std::min(s.min_total_slack, r.total.total_bound - r.total.total_gap);
        s.min_residual_margin = std::min(s.min_residual_margin, r.min_residual_margin());
        if (!r.shells_pass() && r.averages_pass() && r.total.pass() && r.repair_pass()) ++s.shell_failures;
    }
    return s;
}

/// Trials are independent and seeded by (master seed, index), so the reports
/// do not depend on `jobs`.
inline std::vector<TrialReport> run_experiment(const TrialConfig& cfg) {
    cfg.validate();
    const SsfShift ssf(cfg.sft);
    std::vector<TrialReport> reports(cfg.trials);
    const unsigned jobs = std::max(1U, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(std::max<std::size_t>(cfg.trials, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < cfg.trials; ++i) reports[i] = run_trial(cfg, ssf, i);
        return reports;
    }
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < jobs; ++t)
        workers.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < cfg.trials; i += jobs) reports[i] = run_trial(cfg, ssf, i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return reports;
}

// -- CSV --------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "trial,seed,N,q,bad_total,bad_fraction,certified_gap,min_shell_margin,prefixed,min_residual_margin,total_gap,"
    "total_bound,average_status,all_pass";

inline std::string format_real(double v) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << std::setprecision(12) << v;
    return out.str();
}

inline std::string render_csv_row(const TrialReport& r) {
    std::ostringstream out;
    out << r.trial << ',' << r.seed << ',' << r.n << ',' << r.q << ',' << r.bad_total << ','
        << format_real(r.bad_fraction) << ',' << format_real(r.certified_gap) << ','
        << format_real(r.min_shell_margin()) << ',' << r.shells_prefixed() << ','
        << format_real(r.min_residual_margin()) << ',' << format_real(r.total.total_gap) << ','
        << format_real(r.total.total_bound) << ',' << r.average_status() << ',' << (r.all_pass() ? "true" : "false");
    return out.str();
}

inline std::string render_summary(const ExperimentSummary& s) {
    std::ostringstream out;
    out << "# summary: trials=" << s.trials << " passed=" << s.passed << " failed=" << (s.trials - s.passed)
        << " vacuous_total=" << s.vacuous_total << " min_shell_margin=" << format_real(s.min_shell_margin)
        << " min_total_slack=" << format_real(s.min_total_slack)
        << " min_residual_margin=" << format_real(s.min_residual_margin) << " shell_only_failures=" << s.shell_failures;
    if (!s.failed_seeds.empty()) {
        out << " failed_seeds=";
        for (std::size_t k = 0; k < s.failed_seeds.size(); ++k) out << (k ? ";" : "") << s.failed_seeds[k];
    }
    return out.str();
}

inline std::string render_csv(const std::vector<TrialReport>& reports) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : reports) out += render_csv_row(r) + "\n";
    out += render_summary(summarize(reports)) + "\n";
    return out;
}

}  // namespace nnsft
