#pragma once

// Shell-by-shell repair of a configuration into a locally admissible one.
//
// For shell radius i the bad sites S^i on Lambda_i \ Lambda_{i-1} are split
// into four sides. Top and bottom own the corners; right and left cover
// rows -i+1 .. i-1 only. Each side is cut into maximal runs of consecutive
// bad sites, and every run is refilled by sweeping it one site at a time,
// choosing at each step a symbol compatible with the four neighbours as they
// currently stand. SSF guarantees the choice exists.
//
// S^i is always taken from the window handed to `repair`, never recomputed
// from the partially repaired window. A fill only ever writes symbols that
// agree with all four current neighbours, so it cannot create a forbidden
// pair; consequently a site that is good originally stays good, and after
// shell i every pair with both endpoints in Lambda_i is admissible.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nnsft/admissibility.hpp"
#include "nnsft/error.hpp"
#include "nnsft/lattice.hpp"

namespace nnsft {

enum class Side { top, bottom, right, left };

inline const char* to_string(Side s) {
    switch (s) {
        case Side::top: return "top";
        case Side::bottom: return "bottom";
        case Side::right: return "right";
        case Side::left: return "left";
    }
    return "?";
}

/// A maximal run of bad sites on one side of shell i:
/// top [alpha, beta] x {i}, bottom [alpha, beta] x {-i},
/// right {i} x [alpha, beta], left {-i} x [alpha, beta].
struct Run {
    Side side = Side::top;
    int shell = 0;
    int alpha = 0;
    int beta = 0;

    bool horizontal() const { return side == Side::top || side == Side::bottom; }
    int length() const { return beta - alpha + 1; }

    Site site(int t) const {
        switch (side) {
            case Side::top: return {t, shell};
            case Side::bottom: return {t, -shell};
            case Side::right: return {shell, t};
            case Side::left: return {-shell, t};
        }
        return {};
    }
    Site first() const { return site(alpha); }
    Site last() const { return site(beta); }

    /// Sites in sweep order, alpha to beta.
    std::vector<Site> sites() const {
        std::vector<Site> out;
        for (int t = alpha; t <= beta; ++t) out.push_back(site(t));
        return out;
    }

    friend bool operator==(const Run&, const Run&) = default;
};

struct ShellDecomposition {
    int shell = 0;
    std::vector<Run> top, bottom, right, left;
    std::size_t total_bad = 0;

    /// Runs in processing order: top, bottom (left to right), right, left (bottom to top).
    std::vector<Run> runs() const {
        std::vector<Run> out;
        for (const auto* side : {&top, &bottom, &right, &left}) out.insert(out.end(), side->begin(), side->end());
        return out;
    }

    std::vector<Site> sites() const {
        std::vector<Site> out;
        for (const Run& r : runs())
            for (Site s : r.sites()) out.push_back(s);
        return out;
    }
};

namespace detail {

inline void require_box(const Window& w, int radius) {
    if (!w.domain().contains(Rect::box(radius)))
        throw InputError("insufficient margin: window must contain the box of radius " + std::to_string(radius));
}

inline void require_symbol(const Window& w, const NnSft& sft, Site s) {
    if (w[s] >= sft.alphabet_size())
        throw InputError("symbol " + std::to_string(w[s]) + " at " + to_string(s) + " is outside the alphabet");
}

inline void collect_runs(const std::vector<int>& sorted, Side side, int shell, std::vector<Run>& out) {
    for (std::size_t k = 0; k < sorted.size();) {
        std::size_t j = k;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[j] + 1) ++j;
        out.push_back({side, shell, sorted[k], sorted[j]});
        k = j + 1;
    }
}

}  // namespace detail

/// S^i of `w`, split into sides and maximal runs. Needs Lambda_{i+1} inside the window.
inline ShellDecomposition decompose_shell(const Window& w, const NnSft& sft, int i) {
    if (i < 0) throw InputError("shell radius must be nonnegative");
    detail::require_box(w, i + 1);
    auto bad = [&](Site u) {
        for (Site s : {u, u + kEast, u + kNorth}) detail::require_symbol(w, sft, s);
        return is_bad_unchecked(w, sft, u);
    };

    ShellDecomposition d;
    d.shell = i;
    if (i == 0) {
        if (bad(kOrigin)) {
            d.top.push_back({Side::top, 0, 0, 0});
            d.total_bad = 1;
        }
        return d;
    }
    std::vector<int> top, bottom, right, left;
    for (int x = -i; x <= i; ++x) {
        if (bad({x, i})) top.push_back(x);
        if (bad({x, -i})) bottom.push_back(x);
    }
    for (int y = -i + 1; y <= i - 1; ++y) {
        if (bad({i, y})) right.push_back(y);
        if (bad({-i, y})) left.push_back(y);
    }
    d.total_bad = top.size() + bottom.size() + right.size() + left.size();
    detail::collect_runs(top, Side::top, i, d.top);
    detail::collect_runs(bottom, Side::bottom, i, d.bottom);
    detail::collect_runs(right, Side::right, i, d.right);
    detail::collect_runs(left, Side::left, i, d.left);
    return d;
}

/// How a fill picks among the compatible symbols at a site.
class FillRule {
public:
    static FillRule smallest() { return FillRule(std::nullopt); }
    static FillRule seeded(std::uint64_t seed) { return FillRule(std::mt19937_64(seed)); }

    bool is_random() const { return rng_.has_value(); }

    Symbol choose(const SymbolSet& candidates) {
        if (!rng_) return *candidates.first();
        std::uniform_int_distribution<std::size_t> pick(0, candidates.count() - 1);
        return candidates.nth(pick(*rng_));
    }

private:
    explicit FillRule(std::optional<std::mt19937_64> rng) : rng_(std::move(rng)) {}

    std::optional<std::mt19937_64> rng_;
};

/// New symbols for exactly the run's sites such that, after patching, no
/// forbidden pair touches the run.
inline SparsePatch fill_segment(const Window& w, const SsfShift& ssf, const Run& run, FillRule& rule) {
    if (run.alpha > run.beta) throw InputError("run with alpha > beta");
    const Site along = run.horizontal() ? kEast : kNorth;
    const Site across = run.horizontal() ? kNorth : kEast;
    for (Site s : {run.first() - along, run.last() + along, run.first() - across, run.first() + across,
                   run.last() - across, run.last() + across})
        if (!w.contains(s)) throw InputError("insufficient margin: run boundary " + to_string(s) + " outside window");

    const NnSft& sft = ssf.sft();
    const int len = run.length();
    std::vector<Symbol> filled(static_cast<std::size_t>(len));
    // Current value at s while sweeping: run sites before position j are already replaced.
    auto current = [&](Site s, int j) -> Symbol {
        const int t = run.horizontal() ? s.x : s.y;
        if (run.site(t) == s && t >= run.alpha && t < run.alpha + j)
            return filled[static_cast<std::size_t>(t - run.alpha)];
        Symbol v = w[s];
        if (v >= sft.alphabet_size()) throw InputError("symbol outside alphabet at " + to_string(s));
        return v;
    };
    for (int j = 0; j < len; ++j) {
        Site u = run.site(run.alpha + j);
        Neighborhood nb{current(u + kNorth, j), current(u - kNorth, j), current(u + kEast, j), current(u - kEast, j)};
        SymbolSet options = ssf.table().centers(nb);
        if (options.empty()) throw ContractViolation("SSF contract violated at " + to_string(u));
        filled[static_cast<std::size_t>(j)] = rule.choose(options);
    }
    SparsePatch patch;
    for (int j = 0; j < len; ++j) patch.assign(run.site(run.alpha + j), filled[static_cast<std::size_t>(j)]);
    return patch;
}

/// Refills every run of `shell` in processing order, each fill seeing the
/// window as left by the previous ones. Returns everything written.
inline SparsePatch apply_shell(Window& w, const SsfShift& ssf, const ShellDecomposition& shell, FillRule& rule) {
    SparsePatch written;
    for (const Run& run : shell.runs()) {
        SparsePatch p = fill_segment(w, ssf, run, rule);
        p.apply_to(w);
        for (const auto& [s, v] : p.entries()) written.assign(s, v);  // runs are disjoint
    }
    return written;
}

/// One repair step: S^i taken from `w` itself.
inline Window repair_shell(const Window& w, const SsfShift& ssf, int i, FillRule& rule) {
    Window out = w;
    apply_shell(out, ssf, decompose_shell(w, ssf.sft(), i), rule);
    return out;
}

struct RepairResult {
    Window repaired;
    std::vector<ShellDecomposition> shells;  // S^0 .. S^N of the input window
    std::vector<SparsePatch> patches;        // symbols written at each shell

    std::size_t total_bad() const {
        std::size_t n = 0;
        for (const auto& s : shells) n += s.total_bad;
        return n;
    }
};

/// x^(0), ..., x^(N): shells 0..N repaired in order, S^i from the input.
/// The window must contain Lambda_{N+1}; afterwards Lambda_N holds no forbidden pair.
inline RepairResult repair(const Window& w, const SsfShift& ssf, int n, FillRule& rule) {
    if (n < 0) throw InputError("repair radius must be nonnegative");
    detail::require_box(w, n + 1);
    RepairResult result{w, {}, {}};
    result.shells.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) result.shells.push_back(decompose_shell(w, ssf.sft(), i));
    for (const auto& shell : result.shells) result.patches.push_back(apply_shell(result.repaired, ssf, shell, rule));
    return result;
}

/// Replays the repair: element i is x^(i).
inline std::vector<Window> materialize_intermediates(const Window& original, const RepairResult& result) {
    std::vector<Window> out;
    Window current = original;
    for (const auto& p : result.patches) {
        p.apply_to(current);
        out.push_back(current);
    }
    return out;
}

}  // namespace nnsft
