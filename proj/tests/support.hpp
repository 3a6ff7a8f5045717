#pragma once

// Random generators and brute-force oracles shared by the tests. The oracles
// deliberately avoid the library's tables and fast paths.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "nnsft/nnsft.hpp"

namespace nnsft::support {

inline NnSft random_sft(std::mt19937_64& rng, std::size_t q_max, double density) {
    std::uniform_int_distribution<std::size_t> qd(1, q_max);
    std::bernoulli_distribution coin(density);
    const std::size_t q = qd(rng);
    std::vector<SymbolPair> h, v;
    for (Symbol a = 0; a < q; ++a)
        for (Symbol b = 0; b < q; ++b) {
            if (coin(rng)) h.push_back({a, b});
            if (coin(rng)) v.push_back({a, b});
        }
    return NnSft(q, h, v);
}

/// Rejection-samples SFTs until one is SSF and forbids something.
inline NnSft random_ssf_sft(std::mt19937_64& rng, std::size_t q_max) {
    for (;;) {
        NnSft s = random_sft(rng, q_max, 0.15);
        if (s.alphabet_size() < 2) continue;
        if (s.hforbid().empty() && s.vforbid().empty()) continue;
        if (check_ssf(s).fillable) return s;
    }
}

inline Window random_window(std::mt19937_64& rng, const Rect& domain, std::size_t q) {
    Window w(domain);
    std::uniform_int_distribution<Symbol> sym(0, static_cast<Symbol>(q - 1));
    for (Site s : domain.sites()) w[s] = sym(rng);
    return w;
}

inline bool oracle_pair_ok(const NnSft& sft, Symbol a, Symbol b, bool horizontal) {
    const auto& list = horizontal ? sft.hforbid() : sft.vforbid();
    return std::find(list.begin(), list.end(), SymbolPair{a, b}) == list.end();
}

/// Bad sites of `w` inside `region` by direct pair lookup.
inline std::vector<Site> oracle_bad(const Window& w, const NnSft& sft, const Rect& region) {
    std::vector<Site> out;
    for (Site u : region.sites()) {
        Site e = u + Site{1, 0}, n = u + Site{0, 1};
        if (!oracle_pair_ok(sft, w.at(u), w.at(e), true) || !oracle_pair_ok(sft, w.at(u), w.at(n), false))
            out.push_back(u);
    }
    return out;
}

/// Bad sites of `w` in Lambda_n as a set.
inline std::set<Site> original_bad(const Window& w, const NnSft& sft, int n) {
    auto v = oracle_bad(w, sft, Rect::box(n));
    return {v.begin(), v.end()};
}

/// True when no forbidden pair has both endpoints in `region`.
inline bool oracle_clean_inside(const Window& w, const NnSft& sft, const Rect& region) {
    for (Site u : region.sites()) {
        Site e = u + Site{1, 0}, n = u + Site{0, 1};
        if (region.contains(e) && !oracle_pair_ok(sft, w.at(u), w.at(e), true)) return false;
        if (region.contains(n) && !oracle_pair_ok(sft, w.at(u), w.at(n), false)) return false;
    }
    return true;
}

/// True when none of the four pairs at `u` is forbidden.
inline bool oracle_site_compatible(const Window& w, const NnSft& sft, Site u) {
    const Symbol c = w.at(u);
    return oracle_pair_ok(sft, c, w.at(u + Site{1, 0}), true) && oracle_pair_ok(sft, w.at(u - Site{1, 0}), c, true) &&
           oracle_pair_ok(sft, c, w.at(u + Site{0, 1}), false) && oracle_pair_ok(sft, w.at(u - Site{0, 1}), c, false);
}

/// SSF by enumerating boundaries in reverse lexicographic order.
inline bool oracle_ssf(const NnSft& sft) {
    const auto q = static_cast<long>(sft.alphabet_size());
    for (long w = q - 1; w >= 0; --w)
        for (long e = q - 1; e >= 0; --e)
            for (long s = q - 1; s >= 0; --s)
                for (long n = q - 1; n >= 0; --n) {
                    bool any = false;
                    for (long c = 0; c < q && !any; ++c) {
                        auto C = static_cast<Symbol>(c);
                        any = oracle_pair_ok(sft, C, static_cast<Symbol>(e), true) &&
                              oracle_pair_ok(sft, static_cast<Symbol>(w), C, true) &&
                              oracle_pair_ok(sft, C, static_cast<Symbol>(n), false) &&
                              oracle_pair_ok(sft, static_cast<Symbol>(s), C, false);
                    }
                    if (!any) return false;
                }
    return true;
}

/// Window with every site of `region` corrupted at `rate`, starting from an admissible sample.
inline Window corrupted_sample(const SsfShift& ssf, int radius, double rate, std::uint64_t seed) {
    Window base = sample_admissible(ssf, radius, mix_seed(seed, 1));
    return corrupt(base, ssf.sft().alphabet_size(), rate, mix_seed(seed, 2));
}

inline Pattern pattern_from_index(std::size_t idx) {
    Pattern p{};
    for (std::size_t k = 0; k < 9; ++k) p[k] = static_cast<Symbol>((idx >> k) & 1U);
    return p;
}

/// sup over all q = 2 pattern pairs of |h(p) - h(r)| / d, visited in shuffled order.
/// Distinct patterns at equal centres are at distance 1/2, otherwise 1.
inline double oracle_seminorm(const RangeOnePerturbation& h, std::mt19937_64& rng) {
    std::vector<std::size_t> order(512);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    double best = 0.0;
    for (std::size_t a : order)
        for (std::size_t b : order) {
            if (a == b) continue;
            Pattern p = pattern_from_index(a), r = pattern_from_index(b);
            const double d = p[kCenter] != r[kCenter] ? 1.0 : 0.5;
            best = std::max(best, std::abs(h(p) - h(r)) / d);
        }
    return best;
}

}  // namespace nnsft::support
