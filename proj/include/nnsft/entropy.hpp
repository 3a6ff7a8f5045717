#pragma once

// Strip transfer-matrix entropy estimates for nearest-neighbour SFTs.
//
// A state is a column of height m with no vertically forbidden pair; column s
// may be followed by column t when no row (s_r, t_r) is horizontally
// forbidden. The per-site entropy of the width-m strip is log(lambda)/m,
// natural log, lambda the Perron root of the column transition matrix.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nnsft/error.hpp"
#include "nnsft/sft.hpp"

namespace nnsft {

inline constexpr std::uint64_t kStripStateLimit = 2'000'000;

/// Column transfer operator, stored implicitly: the transition relation
/// factorises over rows, so A v is applied one row coordinate at a time.
class StripTransfer {
public:
    StripTransfer(const NnSft& sft, int width) : sft_(sft), m_(width), q_(sft.alphabet_size()) {
        if (width < 1) throw InputError("strip width must be at least 1");
        std::uint64_t total = 1;
        for (int r = 0; r < width; ++r) {
            total *= q_;
            if (total > kStripStateLimit)
                throw InputError("strip too large: q^m exceeds " + std::to_string(kStripStateLimit));
        }
        total_ = static_cast<std::size_t>(total);
        admissible_.assign(total_, 0);
        for (std::size_t idx = 0; idx < total_; ++idx) {
            bool ok = true;
            for (int r = 0; r + 1 < m_ && ok; ++r) ok = !sft_.v_forbidden(digit(idx, r), digit(idx, r + 1));
            if (ok) {
                admissible_[idx] = 1;
                states_.push_back(idx);
            }
        }
    }

    int width() const { return m_; }
    std::size_t state_count() const { return states_.size(); }
    /// Encoded column (digit r = symbol in row r, base q, row 0 least significant).
    const std::vector<std::size_t>& states() const { return states_; }

    Symbol digit(std::size_t idx, int r) const {
        for (int k = 0; k < r; ++k) idx /= q_;
        return static_cast<Symbol>(idx % q_);
    }

    bool transition(std::size_t from, std::size_t to) const {
        for (int r = 0; r < m_; ++r)
            if (sft_.h_forbidden(digit(from, r), digit(to, r))) return false;
        return true;
    }

    /// (A v)_s = sum_t A[s][t] v_t over the full q^m index space; entries at
    /// non-admissible columns are ignored on input and zero on output.
    std::vector<double> apply(const std::vector<double>& v) const {
        std::vector<double> cur(total_), next(total_);
        for (std::size_t i = 0; i < total_; ++i) cur[i] = admissible_[i] ? v[i] : 0.0;
        std::size_t stride = 1;
        for (int r = 0; r < m_; ++r) {
            for (std::size_t base = 0; base < total_; ++base) {
                if ((base / stride) % q_ != 0) continue;  // visit each fibre once, from its digit-0 slot
                for (std::size_t a = 0; a < q_; ++a) {
                    double acc = 0.0;
                    for (std::size_t b = 0; b < q_; ++b)
                        if (!sft_.h_forbidden(static_cast<Symbol>(a), static_cast<Symbol>(b))) acc += cur[base + b * stride];
                    next[base + a * stride] = acc;
                }
            }
            std::swap(cur, next);
            stride *= q_;
        }
        for (std::size_t i = 0; i < total_; ++i)
            if (!admissible_[i]) cur[i] = 0.0;
        return cur;
    }

    std::size_t index_space() const { return total_; }
    bool admissible(std::size_t idx) const { return admissible_[idx] != 0; }

private:
    NnSft sft_;
    int m_;
    std::size_t q_;
    std::size_t total_ = 0;
    std::vector<unsigned char> admissible_;
    std::vector<std::size_t> states_;
};

struct StripEntropy {
    int width = 0;
    std::size_t states = 0;
    double lambda = 0.0;
    double lower = 0.0;  // certified bracket on lambda
    double upper = 0.0;
    double per_site = 0.0;  // -inf for an empty strip
    bool converged = false;
    std::size_t iterations = 0;

    bool empty() const { return states == 0; }
};

/// True when A^k 1 vanishes for some k <= states, i.e. the column graph has no
/// cycle and lambda = 0 exactly. Only the support of A^k 1 is tracked.
inline bool nilpotent(const StripTransfer& transfer, std::size_t max_steps) {
    std::vector<double> w(transfer.index_space(), 0.0);
    for (auto s : transfer.states()) w[s] = 1.0;
    const std::size_t steps = std::min(max_steps, transfer.state_count() + 1);
    for (std::size_t k = 0; k < steps; ++k) {
        w = transfer.apply(w);
        double peak = 0.0;
        for (auto s : transfer.states()) peak = std::max(peak, w[s]);
        if (peak == 0.0) return true;
        for (auto s : transfer.states()) w[s] = w[s] > 0.0 ? 1.0 : 0.0;
    }
    return false;
}

/// Perron root by power iteration on A + I (aperiodic, same Perron vector),
/// stopped by the Collatz-Wielandt bracket min_s (Bv)_s/v_s <= rho(B) <= max_s (Bv)_s/v_s.
/// The bracket is valid at every step. For reducible A it can close very
/// slowly; `converged` is then false and [lower, upper] is still certified.
inline StripEntropy strip_entropy(const NnSft& sft, int width, double tol = 1e-10,
                                  std::size_t max_iterations = 1'000'000) {
    StripTransfer transfer(sft, width);
    StripEntropy out;
    out.width = width;
    out.states = transfer.state_count();
    if (out.empty()) {
        out.per_site = -std::numeric_limits<double>::infinity();
        out.converged = true;
        return out;
    }
    std::vector<double> v(transfer.index_space(), 0.0);
    for (auto s : transfer.states()) v[s] = 1.0;
    double lo = 0.0, hi = 0.0;
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        std::vector<double> av = transfer.apply(v);
        lo = std::numeric_limits<double>::infinity();
        hi = 0.0;
        double norm = 0.0;
        for (auto s : transfer.states()) {
            const double bv = av[s] + v[s];
            if (v[s] > 0.0) {  // components outside the Perron class may underflow
                const double ratio = bv / v[s];
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            av[s] = bv;
            norm = std::max(norm, bv);
        }
        for (auto s : transfer.states()) v[s] = av[s] / norm;
        out.iterations = it;
        if (hi - lo <= tol * hi) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged && nilpotent(transfer, max_iterations)) {
        out.lambda = out.lower = out.upper = 0.0;
        out.converged = true;
        out.per_site = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.lower = std::max(0.0, lo - 1.0);
    out.upper = hi - 1.0;
    out.lambda = 0.5 * (lo + hi) - 1.0;
    out.per_site = out.lambda > 0.0 ? std::log(out.lambda) / width : -std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace nnsft
