#pragma once

// Nearest-neighbour subshifts of finite type given by forbidden adjacent pairs.

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nnsft/error.hpp"
#include "nnsft/lattice.hpp"
#include "nnsft/text.hpp"

namespace nnsft {

using SymbolPair = std::pair<Symbol, Symbol>;

/// X_F for an alphabet {0..q-1}.
///
/// A horizontal pair (a, b) forbids a at u with b at u + e1; a vertical pair
/// (a, b) forbids a at u with b at u + e2.
class NnSft {
public:
    NnSft(std::size_t alphabet_size, std::vector<SymbolPair> hforbid, std::vector<SymbolPair> vforbid)
        : q_(alphabet_size), hforbid_(std::move(hforbid)), vforbid_(std::move(vforbid)) {
        if (q_ < 1) throw InputError("alphabet size must be at least 1");
        normalize(hforbid_, "hforbid");
        normalize(vforbid_, "vforbid");
        htable_.assign(q_ * q_, 0);
        vtable_.assign(q_ * q_, 0);
        for (auto [a, b] : hforbid_) htable_[a * q_ + b] = 1;
        for (auto [a, b] : vforbid_) vtable_[a * q_ + b] = 1;
    }

    std::size_t alphabet_size() const { return q_; }
    const std::vector<SymbolPair>& hforbid() const { return hforbid_; }
    const std::vector<SymbolPair>& vforbid() const { return vforbid_; }

    /// a at u, b at u + e1.
    bool h_forbidden(Symbol a, Symbol b) const { return htable_[a * q_ + b] != 0; }
    /// a at u, b at u + e2.
    bool v_forbidden(Symbol a, Symbol b) const { return vtable_[a * q_ + b] != 0; }

    friend bool operator==(const NnSft& a, const NnSft& b) {
        return a.q_ == b.q_ && a.hforbid_ == b.hforbid_ && a.vforbid_ == b.vforbid_;
    }

private:
    void normalize(std::vector<SymbolPair>& pairs, const char* what) const {
        for (auto [a, b] : pairs)
            if (a >= q_ || b >= q_)
                throw InputError(std::string(what) + " pair (" + std::to_string(a) + "," + std::to_string(b) +
                                 ") uses a symbol >= alphabet size " + std::to_string(q_));
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    }

    std::size_t q_;
    std::vector<SymbolPair> hforbid_, vforbid_;
    std::vector<unsigned char> htable_, vtable_;
};

/// No two adjacent 1s.
inline NnSft hard_square() { return NnSft(2, {{1, 1}}, {{1, 1}}); }

/// k symbols, adjacent sites differ.
inline NnSft checkerboard(std::size_t k) {
    if (k < 2) throw InputError("checkerboard needs k >= 2");
    std::vector<SymbolPair> same;
    for (Symbol a = 0; a < k; ++a) same.emplace_back(a, a);
    return NnSft(k, same, same);
}

inline NnSft full_shift(std::size_t q) { return NnSft(q, {}, {}); }

// -- spec text format -------------------------------------------------------
//
//   alphabet <q>
//   hforbid <a> <b>
//   vforbid <a> <b>
//
// '#' starts a comment.

inline NnSft parse_spec(std::string_view body) {
    std::size_t q = 0;
    bool have_alphabet = false;
    std::vector<std::pair<std::size_t, std::pair<bool, SymbolPair>>> pending;  // line, (horizontal?, pair)
    std::size_t line_no = 0;
    for (auto raw : text::lines(body)) {
        ++line_no;
        auto toks = text::split_ws(text::strip_comment(raw));
        if (toks.empty()) continue;
        if (toks[0] == "alphabet") {
            if (toks.size() != 2) throw InputError(text::line_error(line_no, "expected 'alphabet <q>'"));
            if (have_alphabet) throw InputError(text::line_error(line_no, "duplicate 'alphabet'"));
            auto v = text::to_int<std::size_t>(toks[1]);
            if (!v || *v < 1) throw InputError(text::line_error(line_no, "alphabet size must be a positive integer"));
            q = *v;
            have_alphabet = true;
        } else if (toks[0] == "hforbid" || toks[0] == "vforbid") {
            if (toks.size() != 3)
                throw InputError(text::line_error(line_no, "expected '" + std::string(toks[0]) + " <a> <b>'"));
            auto a = text::to_int<Symbol>(toks[1]);
            auto b = text::to_int<Symbol>(toks[2]);
            if (!a || !b) throw InputError(text::line_error(line_no, "bad symbol"));
            pending.push_back({line_no, {toks[0] == "hforbid", {*a, *b}}});
        } else {
            throw InputError(text::line_error(line_no, "unknown keyword '" + std::string(toks[0]) + "'"));
        }
    }
    if (!have_alphabet) throw InputError("spec is missing 'alphabet <q>'");
    std::vector<SymbolPair> h, v;
    for (const auto& [ln, entry] : pending) {
        auto [a, b] = entry.second;
        if (a >= q || b >= q)
            throw InputError(text::line_error(ln, "symbol >= alphabet size " + std::to_string(q)));
        (entry.first ? h : v).push_back(entry.second);
    }
    return NnSft(q, std::move(h), std::move(v));
}

inline std::string render_spec(const NnSft& sft) {
    std::ostringstream out;
    out << "alphabet " << sft.alphabet_size() << '\n';
    for (auto [a, b] : sft.hforbid()) out << "hforbid " << a << ' ' << b << '\n';
    for (auto [a, b] : sft.vforbid()) out << "vforbid " << a << ' ' << b << '\n';
    return out.str();
}

/// Built-in names (`hardsquare`, `checkerboard:<k>`, `full:<q>`) or a path to a spec file.
inline NnSft load_spec(std::string_view name_or_path) {
    if (name_or_path == "hardsquare") return hard_square();
    auto with_arg = [&](std::string_view prefix) -> std::optional<std::size_t> {
        if (name_or_path.substr(0, prefix.size()) != prefix) return std::nullopt;
        auto v = text::to_int<std::size_t>(name_or_path.substr(prefix.size()));
        if (!v) throw InputError("bad built-in spec '" + std::string(name_or_path) + "'");
        return v;
    };
    if (auto k = with_arg("checkerboard:")) return checkerboard(*k);
    if (auto q = with_arg("full:")) {
        if (*q < 1) throw InputError("full shift needs q >= 1");
        return full_shift(*q);
    }
    std::ifstream in{std::string(name_or_path)};
    if (!in) throw InputError("cannot open spec '" + std::string(name_or_path) + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

}  // namespace nnsft
