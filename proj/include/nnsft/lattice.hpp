#pragma once

// Lattice geometry on Z^2, finite rectangular configurations ("windows"),
// sparse patches, and the 2^-i shift-space metric.
//
// Ordering convention used everywhere in the library: row-major, top row
// first (largest y first), left to right inside a row. `Site::operator<`
// implements it, so ordered containers of sites iterate in that order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nnsft/error.hpp"
#include "nnsft/text.hpp"

namespace nnsft {

using Symbol = std::uint32_t;

struct Site {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(Site, Site) = default;
    /// Raster order: top row first, then left to right.
    friend constexpr bool operator<(Site a, Site b) { return a.y != b.y ? a.y > b.y : a.x < b.x; }

    constexpr Site operator+(Site o) const { return {x + o.x, y + o.y}; }
    constexpr Site operator-(Site o) const { return {x - o.x, y - o.y}; }
};

inline constexpr Site kOrigin{0, 0};
inline constexpr Site kEast{1, 0};
inline constexpr Site kNorth{0, 1};

constexpr int inf_norm(Site s) { return std::max(std::abs(s.x), std::abs(s.y)); }
constexpr int l1_norm(Site s) { return std::abs(s.x) + std::abs(s.y); }
/// 1-norm adjacency: the four nearest neighbours.
constexpr bool adjacent(Site a, Site b) { return l1_norm(a - b) == 1; }

inline std::string to_string(Site s) {
    return "(" + std::to_string(s.x) + "," + std::to_string(s.y) + ")";
}

/// Axis-aligned rectangle of lattice sites; [x0, x0+width) x [y0, y0+height).
class Rect {
public:
    Rect(int x0, int y0, int width, int height) : x0_(x0), y0_(y0), width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw InputError("rectangle must have positive width and height");
    }

    /// Lambda_n = [-n, n] x [-n, n].
    static Rect box(int n) {
        if (n < 0) throw InputError("box radius must be nonnegative");
        return Rect(-n, -n, 2 * n + 1, 2 * n + 1);
    }

    int x0() const { return x0_; }
    int y0() const { return y0_; }
    int width() const { return width_; }
    int height() const { return height_; }
    int x1() const { return x0_ + width_ - 1; }
    int y1() const { return y0_ + height_ - 1; }
    std::size_t area() const { return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_); }

    bool contains(Site s) const { return s.x >= x0_ && s.x <= x1() && s.y >= y0_ && s.y <= y1(); }
    bool contains(const Rect& r) const {
        return r.x0_ >= x0_ && r.x1() <= x1() && r.y0_ >= y0_ && r.y1() <= y1();
    }

    Rect translated(Site v) const { return Rect(x0_ + v.x, y0_ + v.y, width_, height_); }

    /// Largest n with Lambda_n inside this rectangle, or -1 if the origin is outside.
    int centered_radius() const { return std::max(-1, std::min({-x0_, x1(), -y0_, y1()})); }

    std::vector<Site> sites() const {
        std::vector<Site> out;
        out.reserve(area());
        for (int y = y1(); y >= y0_; --y)
            for (int x = x0_; x <= x1(); ++x) out.push_back({x, y});
        return out;
    }

    friend bool operator==(const Rect&, const Rect&) = default;

private:
    int x0_, y0_, width_, height_;
};

/// A finite configuration on a rectangular domain, one symbol per site.
class Window {
public:
    explicit Window(Rect domain, Symbol fill = 0) : domain_(domain), cells_(domain.area(), fill) {}

    Window(Rect domain, std::vector<Symbol> raster)  // raster order, top row first
        : domain_(domain), cells_(domain.area()) {
        if (raster.size() != domain.area())
            throw InputError("window expects " + std::to_string(domain.area()) + " symbols, got " +
                             std::to_string(raster.size()));
        std::size_t k = 0;
        for (int y = domain.y1(); y >= domain.y0(); --y)
            for (int x = domain.x0(); x <= domain.x1(); ++x) cells_[index({x, y})] = raster[k++];
    }

    const Rect& domain() const { return domain_; }
    bool contains(Site s) const { return domain_.contains(s); }

    Symbol at(Site s) const {
        if (!contains(s)) throw InputError("site " + to_string(s) + " outside window");
        return cells_[index(s)];
    }
    void set(Site s, Symbol v) {
        if (!contains(s)) throw InputError("site " + to_string(s) + " outside window");
        cells_[index(s)] = v;
    }

    // Unchecked access for hot loops; caller guarantees containment.
    Symbol operator[](Site s) const { return cells_[index(s)]; }
    Symbol& operator[](Site s) { return cells_[index(s)]; }

    Symbol max_symbol() const { return cells_.empty() ? 0 : *std::max_element(cells_.begin(), cells_.end()); }

    /// sigma^v: the result at site s carries this window's symbol at s + v,
    /// so the domain moves by -v.
    Window shifted(Site v) const {
        Window out(domain_.translated(Site{} - v));
        out.cells_ = cells_;
        return out;
    }

    friend bool operator==(const Window&, const Window&) = default;

private:
    std::size_t index(Site s) const {
        return static_cast<std::size_t>(s.y - domain_.y0()) * static_cast<std::size_t>(domain_.width()) +
               static_cast<std::size_t>(s.x - domain_.x0());
    }

    Rect domain_;
    std::vector<Symbol> cells_;
};

/// A configuration on an arbitrary finite shape.
class SparsePatch {
public:
    SparsePatch() = default;
    explicit SparsePatch(std::map<Site, Symbol> entries) : entries_(std::move(entries)) {}

    const std::map<Site, Symbol>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool contains(Site s) const { return entries_.count(s) != 0; }

    void assign(Site s, Symbol v) { entries_[s] = v; }

    /// Concatenation ww'; the shapes must be disjoint.
    SparsePatch concat(const SparsePatch& other) const {
        SparsePatch out = *this;
        for (const auto& [s, v] : other.entries_) {
            if (!out.entries_.emplace(s, v).second)
                throw InputError("concatenation of overlapping shapes at " + to_string(s));
        }
        return out;
    }

    void apply_to(Window& w) const {
        for (const auto& [s, v] : entries_) w.set(s, v);
    }

    friend bool operator==(const SparsePatch&, const SparsePatch&) = default;

private:
    std::map<Site, Symbol> entries_;
};

/// Sites outside `shape` that are adjacent to at least one member, in raster order.
inline std::vector<Site> boundary(std::span<const Site> shape) {
    if (shape.empty()) throw InputError("empty shape");
    std::set<Site> members(shape.begin(), shape.end());
    std::set<Site> out;
    for (Site s : members) {
        for (Site d : {Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}}) {
            Site n = s + d;
            if (!members.count(n)) out.insert(n);
        }
    }
    return {out.begin(), out.end()};
}

/// All (2n+1)^2 sites of Lambda_n in raster order.
inline std::vector<Site> box_sites(int n) { return Rect::box(n).sites(); }

/// Lambda_i \ Lambda_{i-1} in raster order; shell 0 is the origin.
inline std::vector<Site> shell_sites(int i) {
    if (i < 0) throw InputError("shell radius must be nonnegative");
    std::vector<Site> out;
    if (i == 0) return {kOrigin};
    out.reserve(static_cast<std::size_t>(8 * i));
    for (int y = i; y >= -i; --y) {
        if (y == i || y == -i) {
            for (int x = -i; x <= i; ++x) out.push_back({x, y});
        } else {
            out.push_back({-i, y});
            out.push_back({i, y});
        }
    }
    return out;
}

/// Outcome of comparing two windows under d(x, y) = 2^-i.
///
/// When the windows disagree somewhere, `radius` is the smallest sup-norm of
/// a disagreement site and `value()` is 2^-radius. When they agree on the
/// whole stored domain, `exact` is false and `radius` is only a lower bound
/// (one more than the largest box contained in the domain), so `value()` is a
/// certified upper bound on the distance of any two extensions.
struct Distance {
    bool exact = false;
    int radius = 0;

    double value() const { return std::ldexp(1.0, -radius); }
};

inline Distance metric_exact(const Window& w, const Window& v) {
    if (!(w.domain() == v.domain())) throw InputError("metric: windows have different domains");
    int best = -1;
    for (int y = w.domain().y0(); y <= w.domain().y1(); ++y)
        for (int x = w.domain().x0(); x <= w.domain().x1(); ++x) {
            Site s{x, y};
            if (w[s] != v[s]) {
                int r = inf_norm(s);
                if (best < 0 || r < best) best = r;
            }
        }
    if (best >= 0) return {true, best};
    return {false, w.domain().centered_radius() + 1};
}

// -- text format ------------------------------------------------------------
//
//   window <x0> <y0> <width> <height>
//   <height lines of width symbols, top row first>

inline std::string render_window(const Window& w) {
    std::ostringstream out;
    const Rect& d = w.domain();
    out << "window " << d.x0() << ' ' << d.y0() << ' ' << d.width() << ' ' << d.height() << '\n';
    for (int y = d.y1(); y >= d.y0(); --y) {
        for (int x = d.x0(); x <= d.x1(); ++x) {
            if (x != d.x0()) out << ' ';
            out << w[{x, y}];
        }
        out << '\n';
    }
    return out.str();
}

inline Window parse_window(std::string_view body) {
    auto all = text::lines(body);
    std::size_t k = 0;
    auto next_nonblank = [&]() -> std::pair<std::size_t, std::vector<std::string_view>> {
        while (k < all.size()) {
            auto toks = text::split_ws(text::strip_comment(all[k]));
            ++k;
            if (!toks.empty()) return {k, toks};
        }
        return {k, {}};
    };
    auto [header_line, header] = next_nonblank();
    if (header.size() != 5 || header[0] != "window")
        throw InputError(text::line_error(header_line, "expected 'window <x0> <y0> <width> <height>'"));
    int dims[4];
    for (int j = 0; j < 4; ++j) {
        auto v = text::to_int<int>(header[static_cast<std::size_t>(j) + 1]);
        if (!v) throw InputError(text::line_error(header_line, "bad integer in window header"));
        dims[j] = *v;
    }
    if (dims[2] < 1 || dims[3] < 1) throw InputError(text::line_error(header_line, "window size must be positive"));
    Rect domain(dims[0], dims[1], dims[2], dims[3]);
    std::vector<Symbol> raster;
    raster.reserve(domain.area());
    for (int row = 0; row < domain.height(); ++row) {
        auto [line_no, toks] = next_nonblank();
        if (toks.empty()) throw InputError(text::line_error(line_no, "window has too few rows"));
        if (toks.size() != static_cast<std::size_t>(domain.width()))
            throw InputError(text::line_error(line_no, "expected " + std::to_string(domain.width()) + " symbols"));
        for (auto t : toks) {
            auto v = text::to_int<Symbol>(t);
            if (!v) throw InputError(text::line_error(line_no, "bad symbol '" + std::string(t) + "'"));
            raster.push_back(*v);
        }
    }
    if (auto [line_no, toks] = next_nonblank(); !toks.empty())
        throw InputError(text::line_error(line_no, "trailing data after window"));
    return Window(domain, std::move(raster));
}

}  // namespace nnsft
