#pragma once

// Arithmetic over Z_d, Shamir share generation and the per-share Lagrange
// terms whose sum is the polynomial's value at zero.
//
// The modulus is not required to be prime. Every division goes through
// mod_inverse, which throws NotInvertible when gcd(a, d) != 1.

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "qss/errors.hpp"

namespace qss {

using Residue = std::uint32_t;

inline constexpr std::uint32_t kMaxModulus = 1u << 16;

inline void check_modulus(std::uint64_t d) {
    if (d < 2 || d > kMaxModulus) {
        throw InvalidArgument("modulus d=" + std::to_string(d) + " outside [2, " + std::to_string(kMaxModulus) + "]");
    }
}

/// Canonical representative of v in [0, d).
inline Residue reduce(std::int64_t v, std::uint32_t d) {
    auto m = v % static_cast<std::int64_t>(d);
    if (m < 0) {
        m += d;
    }
    return static_cast<Residue>(m);
}

inline Residue mul_mod(Residue a, Residue b, std::uint32_t d) {
    return static_cast<Residue>((static_cast<std::uint64_t>(a) * b) % d);
}

inline Residue add_mod(Residue a, Residue b, std::uint32_t d) {
    return static_cast<Residue>((static_cast<std::uint64_t>(a) + b) % d);
}

inline Residue sub_mod(Residue a, Residue b, std::uint32_t d) {
    return reduce(static_cast<std::int64_t>(a) - static_cast<std::int64_t>(b), d);
}

/// Inverse of a modulo d by the extended Euclidean algorithm.
inline Residue mod_inverse(Residue a, std::uint32_t d) {
    check_modulus(d);
    if (a == 0 || a >= d) {
        throw InvalidArgument("mod_inverse: argument " + std::to_string(a) + " outside (0, " + std::to_string(d) + ")");
    }
    std::int64_t old_r = a, r = d;
    std::int64_t old_s = 1, s = 0;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        old_r -= q * r;
        std::swap(old_r, r);
        old_s -= q * s;
        std::swap(old_s, s);
    }
    if (old_r != 1) {
        throw NotInvertible(a, d, "gcd = " + std::to_string(old_r));
    }
    return reduce(old_s, d);
}

/// f(x) = a_0 + a_1 x + ... + a_{t-1} x^{t-1} over Z_d. coeffs[0] is the secret.
class SharePolynomial {
  public:
    SharePolynomial(std::uint32_t d, std::vector<Residue> coeffs) : d_(d), coeffs_(std::move(coeffs)) {
        check_modulus(d_);
        if (coeffs_.empty()) {
            throw InvalidArgument("polynomial needs at least one coefficient (threshold t >= 1)");
        }
        for (auto c : coeffs_) {
            if (c >= d_) {
                throw InvalidArgument("coefficient " + std::to_string(c) + " not reduced mod " + std::to_string(d_));
            }
        }
    }

    std::uint32_t modulus() const noexcept {
        return d_;
    }
    std::size_t threshold() const noexcept {
        return coeffs_.size();
    }
    Residue secret() const noexcept {
        return coeffs_.front();
    }
    std::span<const Residue> coeffs() const noexcept {
        return coeffs_;
    }

    bool operator==(const SharePolynomial &) const = default;

  private:
    std::uint32_t d_;
    std::vector<Residue> coeffs_;
};

struct Share {
    Residue x;
    Residue y;

    bool operator==(const Share &) const = default;
};

/// Lagrange summand s_r of participant r (1-based).
struct ShareTerm {
    std::size_t r;
    Residue s;

    bool operator==(const ShareTerm &) const = default;
};

/// Horner evaluation of p at x.
inline Residue eval_poly(const SharePolynomial &p, Residue x) {
    const auto d = p.modulus();
    if (x >= d) {
        throw InvalidArgument("eval_poly: x=" + std::to_string(x) + " not reduced mod " + std::to_string(d));
    }
    const auto c = p.coeffs();
    Residue acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = add_mod(mul_mod(acc, x, d), *it, d);
    }
    return acc;
}

inline void check_abscissae(std::span<const Residue> xs, std::uint32_t d) {
    std::unordered_set<Residue> seen;
    for (auto x : xs) {
        if (x == 0) {
            throw ZeroAbscissa("abscissa 0 is not allowed");
        }
        if (x >= d) {
            throw InvalidArgument("abscissa " + std::to_string(x) + " not in [1, " + std::to_string(d) + ")");
        }
        if (!seen.insert(x).second) {
            throw DuplicateAbscissa("abscissa " + std::to_string(x) + " appears more than once");
        }
    }
}

inline std::vector<Share> gen_shares(const SharePolynomial &p, std::span<const Residue> xs) {
    check_abscissae(xs, p.modulus());
    std::vector<Share> out;
    out.reserve(xs.size());
    for (auto x : xs) {
        out.push_back({x, eval_poly(p, x)});
    }
    return out;
}

/// s_r = y_r * prod_{j != r} x_j / (x_j - x_r) mod d, for 1 <= r <= shares.size().
///
/// Each denominator is inverted separately so a NotInvertible error names the
/// offending pair of abscissae.
inline ShareTerm lagrange_term(std::span<const Share> shares, std::size_t r, std::uint32_t d) {
    check_modulus(d);
    if (r < 1 || r > shares.size()) {
        throw IndexOutOfRange("lagrange_term: r=" + std::to_string(r) + " outside [1, " +
                              std::to_string(shares.size()) + "]");
    }
    std::vector<Residue> xs;
    xs.reserve(shares.size());
    for (const auto &sh : shares) {
        if (sh.y >= d) {
            throw InvalidArgument("share value " + std::to_string(sh.y) + " not reduced mod " + std::to_string(d));
        }
        xs.push_back(sh.x);
    }
    check_abscissae(xs, d);

    const auto &own = shares[r - 1];
    Residue s = own.y;
    for (std::size_t j = 0; j < shares.size(); ++j) {
        if (j == r - 1) {
            continue;
        }
        const Residue denom = sub_mod(shares[j].x, own.x, d);
        Residue inv;
        try {
            inv = mod_inverse(denom, d);
        } catch (const NotInvertible &) {
            throw NotInvertible(denom, d,
                                "denominator x_" + std::to_string(j + 1) + " - x_" + std::to_string(r) + " = " +
                                    std::to_string(shares[j].x) + " - " + std::to_string(own.x));
        }
        s = mul_mod(s, mul_mod(shares[j].x, inv, d), d);
    }
    return {r, s};
}

inline std::vector<ShareTerm> lagrange_terms(std::span<const Share> shares, std::uint32_t d) {
    std::vector<ShareTerm> out;
    out.reserve(shares.size());
    for (std::size_t r = 1; r <= shares.size(); ++r) {
        out.push_back(lagrange_term(shares, r, d));
    }
    return out;
}

/// Classical ground truth: sum of all Lagrange terms, i.e. f(0).
inline Residue reconstruct_classical(std::span<const Share> shares, std::uint32_t d) {
    if (shares.empty()) {
        throw InvalidArgument("reconstruct_classical: no shares");
    }
    Residue sum = 0;
    for (const auto &term : lagrange_terms(shares, d)) {
        sum = add_mod(sum, term.s, d);
    }
    return sum;
}

}  // namespace qss
