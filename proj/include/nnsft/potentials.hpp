#pragma once

// Potentials on the shift space: the penalty function f of an SFT, range-one
// perturbations h, their Lipschitz norms, and Birkhoff sums over finite regions.
//
// Lipschitz norm convention: ||h||_Lip = ||h||_inf + Lip(h), with Lip taken
// against d(x, y) = 2^-i, i the smallest sup-norm of a disagreement site.
//
// Range-one functions depend on x restricted to Lambda_1 only. For such h:
//   * if x and y agree on Lambda_1, h(x) = h(y);
//   * otherwise they differ at sup-norm 0 or 1, so d(x, y) >= 1/2, while
//     |h(x) - h(y)| <= 2 cap.
// Hence Lip(h) <= 4 cap and ||h||_Lip <= 5 cap. The supremum defining Lip(h)
// is attained by configurations that agree off Lambda_1, so it can be computed
// exactly from pattern pairs alone.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nnsft/admissibility.hpp"
#include "nnsft/error.hpp"
#include "nnsft/lattice.hpp"
#include "nnsft/sft.hpp"
#include "nnsft/text.hpp"

namespace nnsft {

/// Symbols on Lambda_1 around a site, raster order (top row first).
using Pattern = std::array<Symbol, 9>;

inline constexpr std::array<Site, 9> kPatchOffsets{{{-1, 1}, {0, 1}, {1, 1},
                                                    {-1, 0}, {0, 0}, {1, 0},
                                                    {-1, -1}, {0, -1}, {1, -1}}};
inline constexpr std::size_t kCenter = 4;

inline Pattern pattern_at(const Window& w, Site u) {
    Pattern p{};
    for (std::size_t k = 0; k < 9; ++k) p[k] = w[u + kPatchOffsets[k]];
    return p;
}

/// q^e, saturating at 2^62.
inline std::uint64_t saturating_pow(std::uint64_t q, int e) {
    constexpr std::uint64_t kCap = std::uint64_t{1} << 62;
    std::uint64_t r = 1;
    for (int k = 0; k < e; ++k) r = (q != 0 && r > kCap / q) ? kCap : r * q;
    return r;
}

/// f(x) = -1 if the origin's right or upper pair is forbidden, else 0.
struct PenaltyPotential {
    NnSft sft;

    int operator()(const Window& w, Site u) const { return penalty_at(w, u, sft); }
};

/// h(x) = coefficient of the observed Lambda_1 pattern (0 when absent).
class RangeOnePerturbation {
public:
    RangeOnePerturbation(std::size_t alphabet_size, double cap, std::map<Pattern, double> coeffs = {})
        : q_(alphabet_size), cap_(cap), coeffs_(std::move(coeffs)) {
        if (!(cap_ >= 0.0) || !std::isfinite(cap_)) throw InputError("perturbation cap must be a finite nonnegative number");
        for (const auto& [p, c] : coeffs_) {
            for (Symbol s : p)
                if (s >= q_) throw InputError("perturbation pattern uses symbol " + std::to_string(s) + " >= alphabet size");
            if (!(std::abs(c) <= cap_)) throw InputError("perturbation coefficient exceeds its cap");
        }
    }

    std::size_t alphabet_size() const { return q_; }
    double cap() const { return cap_; }
    const std::map<Pattern, double>& coefficients() const { return coeffs_; }

    double operator()(const Pattern& p) const {
        if (coeffs_.empty()) return 0.0;
        auto it = coeffs_.find(p);
        return it == coeffs_.end() ? 0.0 : it->second;
    }

    friend bool operator==(const RangeOnePerturbation&, const RangeOnePerturbation&) = default;

private:
    std::size_t q_;
    double cap_;
    std::map<Pattern, double> coeffs_;
};

struct LipschitzNorm {
    double sup_norm = 0.0;
    double seminorm = 0.0;

    double total() const { return sup_norm + seminorm; }
};

inline constexpr std::size_t kExactSeminormLimit = 10'000;

/// Lip(h), exact. Pairs of stored patterns are compared directly; the
/// zero-coefficient complement enters through the best-placed absent pattern.
inline double lipschitz_seminorm_exact(const RangeOnePerturbation& h) {
    const auto& coeffs = h.coefficients();
    if (coeffs.size() > kExactSeminormLimit)
        throw InputError("too many patterns (" + std::to_string(coeffs.size()) +
                         ") for the exact seminorm; use the analytic bound 4*cap instead");
    if (coeffs.empty()) return 0.0;

    const std::uint64_t q = h.alphabet_size();
    const std::uint64_t same_center_total = saturating_pow(q, 8);
    const std::uint64_t total = saturating_pow(q, 9);
    std::vector<std::uint64_t> per_center(q, 0);
    for (const auto& [p, c] : coeffs) ++per_center[p[kCenter]];

    std::vector<std::pair<const Pattern*, double>> flat;
    flat.reserve(coeffs.size());
    for (const auto& [p, c] : coeffs) flat.emplace_back(&p, c);

    double best = 0.0;
    for (std::size_t a = 0; a < flat.size(); ++a) {
        const Pattern& p = *flat[a].first;
        const double c = flat[a].second;
        // Against absent patterns (coefficient 0).
        const std::uint64_t stored_same = per_center[p[kCenter]];
        const std::uint64_t stored_other = coeffs.size() - stored_same;
        if (same_center_total > stored_same)
            best = std::max(best, 2.0 * std::abs(c));
        else if (total - same_center_total > stored_other)
            best = std::max(best, std::abs(c));
        // Against other stored patterns.
        for (std::size_t b = a + 1; b < flat.size(); ++b) {
            const Pattern& r = *flat[b].first;
            const double factor = (p[kCenter] != r[kCenter]) ? 1.0 : 2.0;
            best = std::max(best, factor * std::abs(c - flat[b].second));
        }
    }
    return best;
}

enum class NormMethod { automatic, exact, bound };

inline LipschitzNorm lipschitz_norm(const RangeOnePerturbation& h, NormMethod method = NormMethod::automatic) {
    if (method == NormMethod::bound ||
        (method == NormMethod::automatic && h.coefficients().size() > kExactSeminormLimit))
        return {h.cap(), 4.0 * h.cap()};
    double sup = 0.0;
    for (const auto& [p, c] : h.coefficients()) sup = std::max(sup, std::abs(c));
    return {sup, lipschitz_seminorm_exact(h)};
}

/// An upper bound on ||f - g||_Lip where g = f + h.
inline double certify_norm_gap(const RangeOnePerturbation& h, NormMethod method = NormMethod::automatic) {
    return lipschitz_norm(h, method).total();
}

/// g = f + h together with a certified bound on ||f - g||_Lip.
struct PerturbedPotential {
    PenaltyPotential f;
    RangeOnePerturbation h;
    double certified_norm_gap = 0.0;
};

inline PerturbedPotential make_perturbed(const NnSft& sft, RangeOnePerturbation h,
                                         NormMethod method = NormMethod::automatic) {
    if (h.alphabet_size() != sft.alphabet_size())
        throw InputError("perturbation alphabet does not match the SFT");
    double gap = certify_norm_gap(h, method);
    return {PenaltyPotential{sft}, std::move(h), gap};
}

inline PerturbedPotential unperturbed(const NnSft& sft) {
    return make_perturbed(sft, RangeOnePerturbation(sft.alphabet_size(), 0.0));
}

namespace detail {

inline void require_patch(const Window& w, const NnSft& sft, Site u) {
    if (!w.contains(u + Site{-1, -1}) || !w.contains(u + Site{1, 1})) throw InputError("insufficient margin");
    for (Site d : kPatchOffsets)
        if (w[u + d] >= sft.alphabet_size()) throw InputError("symbol outside alphabet at " + to_string(u + d));
}

}  // namespace detail

inline double eval_potential(const PerturbedPotential& g, const Window& w, Site u) {
    detail::require_patch(w, g.f.sft, u);
    return (is_bad_unchecked(w, g.f.sft, u) ? -1.0 : 0.0) + g.h(pattern_at(w, u));
}

/// A Birkhoff sum kept in two parts so the penalty contribution stays exact.
struct BirkhoffParts {
    long long penalty = 0;     // S_T f, i.e. minus the number of bad sites
    double perturbation = 0.0; // S_T h

    double total() const { return static_cast<double>(penalty) + perturbation; }
};

inline BirkhoffParts birkhoff_parts(const PerturbedPotential& g, const Window& w, const Rect& region) {
    const Rect inflated(region.x0() - 1, region.y0() - 1, region.width() + 2, region.height() + 2);
    if (!w.domain().contains(inflated)) throw InputError("insufficient margin");
    const NnSft& sft = g.f.sft;
    if (w.max_symbol() >= sft.alphabet_size()) validate_symbols(w, sft);
    const bool perturbed = !g.h.coefficients().empty();
    BirkhoffParts out;
    for (int y = region.y1(); y >= region.y0(); --y)
        for (int x = region.x0(); x <= region.x1(); ++x) {
            Site u{x, y};
            if (is_bad_unchecked(w, sft, u)) --out.penalty;
            if (perturbed) out.perturbation += g.h(pattern_at(w, u));
        }
    return out;
}

/// S_T g = sum over u in T of g(sigma^u x).
inline double birkhoff_sum(const PerturbedPotential& g, const Window& w, const Rect& region) {
    return birkhoff_parts(g, w, region).total();
}

/// `support_size` distinct patterns drawn uniformly, coefficients uniform in [-cap, cap].
inline RangeOnePerturbation sample_perturbation(double cap, std::size_t support_size, std::size_t alphabet_size,
                                                std::uint64_t seed) {
    if (!(cap > 0.0)) throw InputError("perturbation cap must be positive");
    if (alphabet_size < 1) throw InputError("alphabet size must be at least 1");
    if (support_size > saturating_pow(alphabet_size, 9))
        throw InputError("support size exceeds the number of Lambda_1 patterns");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Symbol> symbol(0, static_cast<Symbol>(alphabet_size - 1));
    std::uniform_real_distribution<double> coeff(-cap, cap);
    std::map<Pattern, double> coeffs;
    while (coeffs.size() < support_size) {
        Pattern p{};
        for (auto& s : p) s = symbol(rng);
        if (coeffs.count(p)) continue;
        coeffs.emplace(p, coeff(rng));
    }
    return RangeOnePerturbation(alphabet_size, cap, std::move(coeffs));
}

struct LevelSetReport {
    bool pass = true;
    std::size_t checked = 0;
    std::size_t skipped = 0;  // pairs that agree on the whole window
    double worst_ratio = 0.0; // max |g(x) - g(y)| / d(x, y)
};

/// On the level set {f = level}, |g(x) - g(y)| <= gap * d(x, y), evaluated at the origin.
inline LevelSetReport check_level_set_lipschitz(const PerturbedPotential& g, const std::vector<std::pair<Window, Window>>& pairs,
                                   int level) {
    if (level != 0 && level != -1) throw InputError("level must be 0 or -1");
    LevelSetReport report;
    for (const auto& [x, y] : pairs) {
        if (g.f(x, kOrigin) != level || g.f(y, kOrigin) != level)
            throw InputError("level-set check: window is not in the requested level set of f");
        Distance d = metric_exact(x, y);
        if (!d.exact) {
            ++report.skipped;
            continue;
        }
        ++report.checked;
        const double diff = std::abs(eval_potential(g, x, kOrigin) - eval_potential(g, y, kOrigin));
        report.worst_ratio = std::max(report.worst_ratio, diff / d.value());
        if (diff > g.certified_norm_gap * d.value()) report.pass = false;
    }
    return report;
}

// -- perturbation file ------------------------------------------------------
//
//   cap <float>
//   pattern <9 symbols, Lambda_1 top row first> <coefficient>

inline std::string render_perturbation(const RangeOnePerturbation& h) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << std::setprecision(17);
    out << "cap " << h.cap() << '\n';
    for (const auto& [p, c] : h.coefficients()) {
        out << "pattern";
        for (Symbol s : p) out << ' ' << s;
        out << ' ' << c << '\n';
    }
    return out.str();
}

inline RangeOnePerturbation parse_perturbation(std::string_view body, std::size_t alphabet_size) {
    std::optional<double> cap;
    std::map<Pattern, double> coeffs;
    std::size_t line_no = 0;
    for (auto raw : text::lines(body)) {
        ++line_no;
        auto toks = text::split_ws(text::strip_comment(raw));
        if (toks.empty()) continue;
        if (toks[0] == "cap") {
            if (toks.size() != 2) throw InputError(text::line_error(line_no, "expected 'cap <float>'"));
            if (cap) throw InputError(text::line_error(line_no, "duplicate 'cap'"));
            cap = text::to_double(toks[1]);
            if (!cap) throw InputError(text::line_error(line_no, "bad cap value"));
        } else if (toks[0] == "pattern") {
            if (toks.size() != 11) throw InputError(text::line_error(line_no, "expected 'pattern <9 symbols> <coefficient>'"));
            Pattern p{};
            for (std::size_t k = 0; k < 9; ++k) {
                auto s = text::to_int<Symbol>(toks[k + 1]);
                if (!s || *s >= alphabet_size) throw InputError(text::line_error(line_no, "bad pattern symbol"));
                p[k] = *s;
            }
            auto c = text::to_double(toks[10]);
            if (!c) throw InputError(text::line_error(line_no, "bad coefficient"));
            if (!coeffs.emplace(p, *c).second) throw InputError(text::line_error(line_no, "duplicate pattern"));
        } else {
            throw InputError(text::line_error(line_no, "unknown keyword '" + std::string(toks[0]) + "'"));
        }
    }
    if (!cap) throw InputError("perturbation is missing 'cap <float>'");
    return RangeOnePerturbation(alphabet_size, *cap, std::move(coeffs));
}

}  // namespace nnsft
