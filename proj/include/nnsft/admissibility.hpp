#pragma once

// Local admissibility, bad sites, the penalty function, and the decidable
// single-site-fillability (SSF) and safe-symbol checks.

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnsft/error.hpp"
#include "nnsft/lattice.hpp"
#include "nnsft/sft.hpp"

namespace nnsft {

enum class Direction { horizontal, vertical };

inline const char* to_string(Direction d) { return d == Direction::horizontal ? "horizontal" : "vertical"; }

/// A forbidden adjacent pair, attributed to its lower/left endpoint.
struct Violation {
    Site site;
    Direction direction;

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline void validate_symbols(const Window& w, const NnSft& sft) {
    const Rect& d = w.domain();
    for (int y = d.y1(); y >= d.y0(); --y)
        for (int x = d.x0(); x <= d.x1(); ++x)
            if (w[{x, y}] >= sft.alphabet_size())
                throw InputError("symbol " + std::to_string(w[{x, y}]) + " at " + to_string(Site{x, y}) +
                                 " is outside the alphabet of size " + std::to_string(sft.alphabet_size()));
}

/// Every forbidden pair with both endpoints inside the window, raster order,
/// horizontal before vertical at the same site.
inline std::vector<Violation> violations(const Window& w, const NnSft& sft) {
    validate_symbols(w, sft);
    std::vector<Violation> out;
    const Rect& d = w.domain();
    for (int y = d.y1(); y >= d.y0(); --y)
        for (int x = d.x0(); x <= d.x1(); ++x) {
            Site u{x, y};
            if (x < d.x1() && sft.h_forbidden(w[u], w[u + kEast])) out.push_back({u, Direction::horizontal});
            if (y < d.y1() && sft.v_forbidden(w[u], w[u + kNorth])) out.push_back({u, Direction::vertical});
        }
    return out;
}

/// Badness of u; u, u+e1 and u+e2 must be inside the window.
inline bool is_bad_unchecked(const Window& w, const NnSft& sft, Site u) {
    Symbol a = w[u];
    return sft.h_forbidden(a, w[u + kEast]) || sft.v_forbidden(a, w[u + kNorth]);
}

/// Sites u whose right or upper pair is forbidden. Only sites whose two
/// dependencies are stored are evaluated; that sub-rectangle is `evaluable`
/// (empty when the window is a single row or column).
struct BadSites {
    std::optional<Rect> evaluable;
    std::vector<Site> sites;  // raster order
};

inline std::optional<Rect> evaluable_rect(const Rect& d) {
    if (d.width() < 2 || d.height() < 2) return std::nullopt;
    return Rect(d.x0(), d.y0(), d.width() - 1, d.height() - 1);
}

inline BadSites bad_sites(const Window& w, const NnSft& sft) {
    validate_symbols(w, sft);
    BadSites out{evaluable_rect(w.domain()), {}};
    if (!out.evaluable) return out;
    for (Site u : out.evaluable->sites())
        if (is_bad_unchecked(w, sft, u)) out.sites.push_back(u);
    return out;
}

/// Number of bad sites of w inside `region`; region must be evaluable.
inline std::size_t count_bad(const Window& w, const NnSft& sft, const Rect& region) {
    auto ev = evaluable_rect(w.domain());
    if (!ev || !ev->contains(region)) throw InputError("insufficient margin");
    std::size_t n = 0;
    for (int y = region.y0(); y <= region.y1(); ++y)
        for (int x = region.x0(); x <= region.x1(); ++x) n += is_bad_unchecked(w, sft, {x, y}) ? 1 : 0;
    return n;
}

/// The penalty function at u: -1 if u is bad, 0 otherwise.
inline int penalty_at(const Window& w, Site u, const NnSft& sft) {
    if (!w.contains(u) || !w.contains(u + kEast) || !w.contains(u + kNorth))
        throw InputError("insufficient margin");
    for (Site s : {u, u + kEast, u + kNorth})
        if (w[s] >= sft.alphabet_size()) throw InputError("symbol outside alphabet at " + to_string(s));
    return is_bad_unchecked(w, sft, u) ? -1 : 0;
}

// -- SSF ----------------------------------------------------------------------

/// Fixed-size-at-runtime bitset over the alphabet.
class SymbolSet {
public:
    SymbolSet() = default;
    explicit SymbolSet(std::size_t q, bool full = false) : q_(q), words_((q + 63) / 64, 0) {
        if (full)
            for (std::size_t a = 0; a < q; ++a) insert(static_cast<Symbol>(a));
    }

    void insert(Symbol a) { words_[a / 64] |= std::uint64_t{1} << (a % 64); }
    void erase(Symbol a) { words_[a / 64] &= ~(std::uint64_t{1} << (a % 64)); }
    bool contains(Symbol a) const { return (words_[a / 64] >> (a % 64)) & 1U; }

    bool empty() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }
    std::optional<Symbol> first() const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i]) return static_cast<Symbol>(i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i])));
        return std::nullopt;
    }
    /// The k-th member in increasing order.
    Symbol nth(std::size_t k) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            auto w = words_[i];
            auto c = static_cast<std::size_t>(std::popcount(w));
            if (k < c) {
                for (; k > 0; --k) w &= w - 1;
                return static_cast<Symbol>(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
            }
            k -= c;
        }
        throw ContractViolation("SymbolSet::nth out of range");
    }

    bool intersects(const SymbolSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    SymbolSet& operator&=(const SymbolSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    friend SymbolSet operator&(SymbolSet a, const SymbolSet& b) { return a &= b; }

private:
    std::size_t q_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Symbols around a single site u: north = u+e2, south = u-e2, east = u+e1, west = u-e1.
struct Neighborhood {
    Symbol north = 0, south = 0, east = 0, west = 0;

    friend bool operator==(const Neighborhood&, const Neighborhood&) = default;
};

/// Per-neighbour compatibility tables: for each neighbour symbol b, the set
/// of centre symbols a that form no forbidden pair with b in that position.
class CompatibilityTable {
public:
    explicit CompatibilityTable(const NnSft& sft) : q_(sft.alphabet_size()) {
        for (auto* t : {&from_north_, &from_south_, &from_east_, &from_west_}) t->assign(q_, SymbolSet(q_, true));
        for (auto [a, b] : sft.hforbid()) {
            from_east_[b].erase(a);  // a at u, b east of it
            from_west_[a].erase(b);  // a west of u, b at u
        }
        for (auto [a, b] : sft.vforbid()) {
            from_north_[b].erase(a);
            from_south_[a].erase(b);
        }
    }

    std::size_t alphabet_size() const { return q_; }

    SymbolSet centers(const Neighborhood& n) const {
        SymbolSet s = from_north_[n.north];
        s &= from_south_[n.south];
        s &= from_east_[n.east];
        s &= from_west_[n.west];
        return s;
    }

    const SymbolSet& below(Symbol north) const { return from_north_[north]; }
    const SymbolSet& above(Symbol south) const { return from_south_[south]; }
    const SymbolSet& left_of(Symbol east) const { return from_east_[east]; }
    const SymbolSet& right_of(Symbol west) const { return from_west_[west]; }

private:
    std::size_t q_;
    std::vector<SymbolSet> from_north_, from_south_, from_east_, from_west_;
};

struct SsfResult {
    bool fillable = false;
    std::optional<Neighborhood> witness;  // a boundary no centre symbol can complete
};

/// Exhaustive SSF check over all q^4 boundary assignments (admissible or not),
/// enumerated lexicographically in (north, south, east, west).
inline SsfResult check_ssf(const NnSft& sft) {
    CompatibilityTable table(sft);
    const auto q = static_cast<Symbol>(sft.alphabet_size());
    // Partial intersections are hoisted out of the inner loops; an empty
    // partial set means the lexicographically first completion is blocking.
    for (Symbol n = 0; n < q; ++n)
        for (Symbol s = 0; s < q; ++s) {
            SymbolSet ns = table.below(n) & table.above(s);
            if (ns.empty()) return {false, Neighborhood{n, s, 0, 0}};
            for (Symbol e = 0; e < q; ++e) {
                SymbolSet nse = ns & table.left_of(e);
                if (nse.empty()) return {false, Neighborhood{n, s, e, 0}};
                for (Symbol w = 0; w < q; ++w)
                    if (!nse.intersects(table.right_of(w))) return {false, Neighborhood{n, s, e, w}};
            }
        }
    return {true, std::nullopt};
}

/// Symbols compatible with every boundary, i.e. appearing in no forbidden pair.
inline std::vector<Symbol> find_safe_symbols(const NnSft& sft) {
    std::vector<bool> safe(sft.alphabet_size(), true);
    for (const auto* pairs : {&sft.hforbid(), &sft.vforbid()})
        for (auto [a, b] : *pairs) safe[a] = safe[b] = false;
    std::vector<Symbol> out;
    for (std::size_t a = 0; a < safe.size(); ++a)
        if (safe[a]) out.push_back(static_cast<Symbol>(a));
    return out;
}

enum class GlobalAdmissibility { certified, unknown };

/// Under SSF every locally admissible pattern extends to a point of X; for
/// other shifts no claim is made.
inline GlobalAdmissibility assert_local_implies_global(const NnSft& sft) {
    return check_ssf(sft).fillable ? GlobalAdmissibility::certified : GlobalAdmissibility::unknown;
}

/// An SFT that has passed the SSF check. Everything that fills sites by SSF
/// takes this type, so the precondition is checked once.
class SsfShift {
public:
    explicit SsfShift(NnSft sft) : sft_(std::move(sft)), table_(sft_) {
        if (auto r = check_ssf(sft_); !r.fillable) {
            const auto& w = *r.witness;
            throw InputError("SFT is not single-site fillable (blocking boundary n=" + std::to_string(w.north) +
                             " s=" + std::to_string(w.south) + " e=" + std::to_string(w.east) +
                             " w=" + std::to_string(w.west) + ")");
        }
    }

    static std::optional<SsfShift> certify(const NnSft& sft) {
        if (!check_ssf(sft).fillable) return std::nullopt;
        return SsfShift(sft, Checked{});
    }

    const NnSft& sft() const { return sft_; }
    const CompatibilityTable& table() const { return table_; }

private:
    struct Checked {};
    SsfShift(NnSft sft, Checked) : sft_(std::move(sft)), table_(sft_) {}

    NnSft sft_;
    CompatibilityTable table_;
};

}  // namespace nnsft
