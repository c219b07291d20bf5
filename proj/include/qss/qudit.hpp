#pragma once

// Dense state-vector simulation of t qudits of dimension d.
//
// Basis index convention: the tuple (k_1, ..., k_t) lives at
//   I = k_1 d^{t-1} + k_2 d^{t-2} + ... + k_t,
// so qudit 1 is the most significant digit. Qudits are numbered from 1.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qss/errors.hpp"
#include "qss/random.hpp"

namespace qss {

using Amplitude = std::complex<double>;

inline constexpr double kStateTol = 1e-10;
inline constexpr double kPruneTol = 1e-12;

/// Upper bound on d^t. Overridable per call.
inline constexpr std::size_t kDefaultMaxAmplitudes = std::size_t{1} << 22;

/// Number of amplitudes d^t, or SizeCapExceeded when it exceeds cap.
inline std::size_t state_size(std::uint32_t d, std::size_t t, std::size_t cap = kDefaultMaxAmplitudes) {
    if (d < 2) {
        throw InvalidArgument("qudit dimension d must be >= 2");
    }
    if (t < 1) {
        throw InvalidArgument("qudit count t must be >= 1");
    }
    std::size_t n = 1;
    for (std::size_t i = 0; i < t; ++i) {
        if (n > cap / d) {
            throw SizeCapExceeded("d^t = " + std::to_string(d) + "^" + std::to_string(t) + " exceeds cap of " +
                                  std::to_string(cap) + " amplitudes");
        }
        n *= d;
    }
    return n;
}

/// omega^power with omega = e^{2 pi i / d}. The exponent is reduced mod d first
/// so that exact roots such as i and -1 come out with clean components.
inline Amplitude root_of_unity(std::uint32_t d, std::int64_t power) {
    auto p = power % static_cast<std::int64_t>(d);
    if (p < 0) {
        p += d;
    }
    if (p == 0) {
        return {1.0, 0.0};
    }
    if (4 * p == static_cast<std::int64_t>(d)) {
        return {0.0, 1.0};
    }
    if (2 * p == static_cast<std::int64_t>(d)) {
        return {-1.0, 0.0};
    }
    if (4 * p == 3 * static_cast<std::int64_t>(d)) {
        return {0.0, -1.0};
    }
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(d);
    return {std::cos(angle), std::sin(angle)};
}

/// a * b without the C99 Annex G inf/nan recovery that std::complex's
/// operator* performs; inputs here are always finite.
inline Amplitude mul(Amplitude a, Amplitude b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// A d x d unitary acting on a single qudit. Row-major.
class LocalUnitary {
  public:
    /// Throws unless m is a d x d unitary within 1e-10 entrywise.
    LocalUnitary(std::uint32_t d, std::vector<Amplitude> m) : LocalUnitary(d, std::move(m), Validate::yes) {
    }

    std::uint32_t dim() const noexcept {
        return d_;
    }
    const Amplitude &operator()(std::size_t row, std::size_t col) const {
        return m_[row * d_ + col];
    }
    std::span<const Amplitude> entries() const noexcept {
        return m_;
    }
    bool is_diagonal() const noexcept {
        return diagonal_;
    }

    LocalUnitary adjoint() const {
        std::vector<Amplitude> out(m_.size());
        for (std::size_t i = 0; i < d_; ++i) {
            for (std::size_t j = 0; j < d_; ++j) {
                out[j * d_ + i] = std::conj(m_[i * d_ + j]);
            }
        }
        return LocalUnitary(d_, std::move(out));
    }

    LocalUnitary operator*(const LocalUnitary &rhs) const {
        if (rhs.d_ != d_) {
            throw DimensionMismatch("LocalUnitary product: dimension mismatch");
        }
        std::vector<Amplitude> out(m_.size());
        for (std::size_t i = 0; i < d_; ++i) {
            for (std::size_t k = 0; k < d_; ++k) {
                const auto a = m_[i * d_ + k];
                for (std::size_t j = 0; j < d_; ++j) {
                    out[i * d_ + j] += a * rhs.m_[k * d_ + j];
                }
            }
        }
        return LocalUnitary(d_, std::move(out));
    }

    /// max_{ij} |(M M^dagger - I)_{ij}|
    double unitarity_error() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < d_; ++i) {
            for (std::size_t j = 0; j < d_; ++j) {
                Amplitude acc{};
                for (std::size_t k = 0; k < d_; ++k) {
                    acc += m_[i * d_ + k] * std::conj(m_[j * d_ + k]);
                }
                if (i == j) {
                    acc -= 1.0;
                }
                worst = std::max(worst, std::abs(acc));
            }
        }
        return worst;
    }

  private:
    enum class Validate { no, yes };

    LocalUnitary(std::uint32_t d, std::vector<Amplitude> m, Validate validate) : d_(d), m_(std::move(m)) {
        if (d_ < 2) {
            throw InvalidArgument("LocalUnitary: d must be >= 2");
        }
        if (m_.size() != static_cast<std::size_t>(d_) * d_) {
            throw DimensionMismatch("LocalUnitary: expected " + std::to_string(d_ * d_) + " entries, got " +
                                    std::to_string(m_.size()));
        }
        if (validate == Validate::yes && unitarity_error() > kStateTol) {
            throw InvalidArgument("LocalUnitary: matrix is not unitary");
        }
        diagonal_ = true;
        for (std::size_t i = 0; i < d_ && diagonal_; ++i) {
            for (std::size_t j = 0; j < d_; ++j) {
                if (i != j && m_[i * d_ + j] != Amplitude{}) {
                    diagonal_ = false;
                    break;
                }
            }
        }
    }

    // Closed-form gates are unitary by construction; their unit tests check it.
    friend LocalUnitary phase_gate(std::uint32_t d, std::uint32_t s);
    friend LocalUnitary qft_inv(std::uint32_t d);

    std::uint32_t d_;
    std::vector<Amplitude> m_;
    bool diagonal_ = false;
};

/// diag(omega^{s k}), the encoding gate U_{0,s}.
inline LocalUnitary phase_gate(std::uint32_t d, std::uint32_t s) {
    if (s >= d) {
        throw InvalidArgument("phase_gate: s=" + std::to_string(s) + " not reduced mod " + std::to_string(d));
    }
    std::vector<Amplitude> m(static_cast<std::size_t>(d) * d);
    for (std::uint32_t k = 0; k < d; ++k) {
        m[static_cast<std::size_t>(k) * d + k] = root_of_unity(d, static_cast<std::int64_t>(s) * k);
    }
    return LocalUnitary(d, std::move(m), LocalUnitary::Validate::no);
}

/// Inverse Fourier transform: entry (j, k) = omega^{-jk} / sqrt(d).
/// Maps (1/sqrt d) sum_k omega^{S k}|k> to |S>.
inline LocalUnitary qft_inv(std::uint32_t d) {
    if (d < 2) {
        throw InvalidArgument("qft_inv: d must be >= 2");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<Amplitude> m(static_cast<std::size_t>(d) * d);
    for (std::uint32_t j = 0; j < d; ++j) {
        for (std::uint32_t k = 0; k < d; ++k) {
            m[static_cast<std::size_t>(j) * d + k] = scale * root_of_unity(d, -static_cast<std::int64_t>(j) * k);
        }
    }
    return LocalUnitary(d, std::move(m), LocalUnitary::Validate::no);
}

inline LocalUnitary qft(std::uint32_t d) {
    return qft_inv(d).adjoint();
}

struct MarginalDistribution {
    std::vector<double> probs;

    double operator[](std::size_t v) const {
        return probs.at(v);
    }
};

/// Outcome tuples (m_1..m_k) with probability above kPruneTol.
struct JointDistribution {
    std::map<std::vector<std::uint32_t>, double> entries;

    double total() const {
        double s = 0.0;
        for (const auto &[_, p] : entries) {
            s += p;
        }
        return s;
    }
};

/// Normalized pure state of t qudits. Immutable: every operation returns a new register.
class QuditRegister {
  public:
    QuditRegister(std::uint32_t d, std::size_t t, std::vector<Amplitude> amps,
                  std::size_t cap = kDefaultMaxAmplitudes)
        : d_(d), t_(t), amps_(std::move(amps)) {
        const auto n = state_size(d_, t_, cap);
        if (amps_.size() != n) {
            throw DimensionMismatch("QuditRegister: expected " + std::to_string(n) + " amplitudes, got " +
                                    std::to_string(amps_.size()));
        }
        if (std::abs(norm_squared() - 1.0) > kStateTol) {
            throw InvalidArgument("QuditRegister: state is not normalized");
        }
    }

    /// Basis state |k_1 ... k_t>.
    static QuditRegister basis(std::uint32_t d, std::span<const std::uint32_t> digits,
                               std::size_t cap = kDefaultMaxAmplitudes) {
        const auto n = state_size(d, digits.size(), cap);
        std::size_t idx = 0;
        for (auto k : digits) {
            if (k >= d) {
                throw InvalidArgument("basis digit out of range");
            }
            idx = idx * d + k;
        }
        std::vector<Amplitude> amps(n);
        amps[idx] = 1.0;
        return QuditRegister(d, digits.size(), std::move(amps), cap);
    }

    std::uint32_t dim() const noexcept {
        return d_;
    }
    std::size_t qudits() const noexcept {
        return t_;
    }
    std::size_t size() const noexcept {
        return amps_.size();
    }
    std::span<const Amplitude> amplitudes() const noexcept {
        return amps_;
    }
    const Amplitude &operator[](std::size_t index) const {
        return amps_.at(index);
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    /// Index of the basis tuple (k_1..k_t).
    std::size_t index_of(std::span<const std::uint32_t> digits) const {
        if (digits.size() != t_) {
            throw DimensionMismatch("index_of: expected " + std::to_string(t_) + " digits");
        }
        std::size_t idx = 0;
        for (auto k : digits) {
            if (k >= d_) {
                throw InvalidArgument("index_of: digit out of range");
            }
            idx = idx * d_ + k;
        }
        return idx;
    }

    std::vector<std::uint32_t> digits_of(std::size_t index) const {
        std::vector<std::uint32_t> out(t_);
        for (std::size_t i = t_; i-- > 0;) {
            out[i] = static_cast<std::uint32_t>(index % d_);
            index /= d_;
        }
        return out;
    }

    /// Place value of qudit q, i.e. d^{t-q}.
    std::size_t stride(std::size_t q) const {
        check_qudit(q);
        std::size_t s = 1;
        for (std::size_t i = q; i < t_; ++i) {
            s *= d_;
        }
        return s;
    }

    std::uint32_t digit(std::size_t index, std::size_t q) const {
        return static_cast<std::uint32_t>((index / stride(q)) % d_);
    }

    void check_qudit(std::size_t q) const {
        if (q < 1 || q > t_) {
            throw IndexOutOfRange("qudit index " + std::to_string(q) + " outside [1, " + std::to_string(t_) + "]");
        }
    }

    /// max_i |a_i - b_i|; registers must share d and t.
    double max_abs_diff(const QuditRegister &other) const {
        if (other.d_ != d_ || other.t_ != t_) {
            throw DimensionMismatch("max_abs_diff: register shapes differ");
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            worst = std::max(worst, std::abs(amps_[i] - other.amps_[i]));
        }
        return worst;
    }

  private:
    std::uint32_t d_;
    std::size_t t_;
    std::vector<Amplitude> amps_;
};

/// (1/sqrt d) sum_k |k k ... k>
inline QuditRegister make_ghz(std::uint32_t d, std::size_t t, std::size_t cap = kDefaultMaxAmplitudes) {
    const auto n = state_size(d, t, cap);
    // Index of |k...k> is k * (1 + d + ... + d^{t-1}).
    std::size_t repunit = 0;
    for (std::size_t i = 0; i < t; ++i) {
        repunit = repunit * d + 1;
    }
    std::vector<Amplitude> amps(n);
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::uint32_t k = 0; k < d; ++k) {
        amps[k * repunit] = a;
    }
    return QuditRegister(d, t, std::move(amps), n);
}

/// u acting on qudit q, identity on the rest.
inline QuditRegister apply_local(const QuditRegister &reg, std::size_t q, const LocalUnitary &u) {
    if (u.dim() != reg.dim()) {
        throw DimensionMismatch("apply_local: unitary has d=" + std::to_string(u.dim()) + ", register has d=" +
                                std::to_string(reg.dim()));
    }
    const auto d = reg.dim();
    const auto stride = reg.stride(q);
    const auto block = stride * d;
    const auto in = reg.amplitudes();
    std::vector<Amplitude> out(in.size());
    if (u.is_diagonal()) {
        for (std::size_t base = 0; base < in.size(); base += block) {
            for (std::uint32_t k = 0; k < d; ++k) {
                const auto phase = u(k, k);
                const std::size_t off = base + k * stride;
                for (std::size_t low = 0; low < stride; ++low) {
                    out[off + low] = mul(phase, in[off + low]);
                }
            }
        }
    } else {
        for (std::size_t base = 0; base < in.size(); base += block) {
            for (std::size_t low = 0; low < stride; ++low) {
                const std::size_t off = base + low;
                for (std::uint32_t j = 0; j < d; ++j) {
                    Amplitude acc{};
                    for (std::uint32_t k = 0; k < d; ++k) {
                        acc += mul(u(j, k), in[off + k * stride]);
                    }
                    out[off + j * stride] = acc;
                }
            }
        }
    }
    const auto n = out.size();
    return QuditRegister(d, reg.qudits(), std::move(out), n);
}

inline MarginalDistribution marginal(const QuditRegister &reg, std::size_t q) {
    const auto stride = reg.stride(q);
    const auto d = reg.dim();
    MarginalDistribution m{std::vector<double>(d, 0.0)};
    const auto amps = reg.amplitudes();
    for (std::size_t base = 0; base < amps.size(); base += stride * d) {
        for (std::uint32_t k = 0; k < d; ++k) {
            const std::size_t off = base + k * stride;
            for (std::size_t low = 0; low < stride; ++low) {
                m.probs[k] += std::norm(amps[off + low]);
            }
        }
    }
    return m;
}

/// Renormalized projection of qudit q onto |v>.
inline QuditRegister project(const QuditRegister &reg, std::size_t q, std::uint32_t v) {
    const auto stride = reg.stride(q);
    const auto d = reg.dim();
    if (v >= d) {
        throw InvalidArgument("project: outcome out of range");
    }
    const auto amps = reg.amplitudes();
    std::vector<Amplitude> out(amps.size());
    double p = 0.0;
    for (std::size_t base = 0; base < amps.size(); base += stride * d) {
        const std::size_t off = base + v * stride;
        for (std::size_t low = 0; low < stride; ++low) {
            out[off + low] = amps[off + low];
            p += std::norm(amps[off + low]);
        }
    }
    if (p < kPruneTol) {
        throw ZeroNormProjection("projection of qudit " + std::to_string(q) + " onto |" + std::to_string(v) +
                                 "> has probability " + std::to_string(p));
    }
    const double scale = 1.0 / std::sqrt(p);
    for (auto &a : out) {
        a *= scale;
    }
    const auto n = out.size();
    return QuditRegister(d, reg.qudits(), std::move(out), n);
}

struct MeasurementResult {
    std::uint32_t outcome;
    QuditRegister post;
};

/// Computational-basis measurement of qudit q, one uniform draw from rng.
/// Draws an outcome from a marginal with one uniform from `rng`. Rounding can
/// leave the cumulative sum slightly below 1; the last supported outcome
/// absorbs the remainder.
inline std::uint32_t sample_outcome(const MarginalDistribution &m, SeededStream &rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    std::uint32_t pick = 0;
    for (std::uint32_t v = 0; v < m.probs.size(); ++v) {
        if (m.probs[v] < kPruneTol) {
            continue;
        }
        pick = v;
        cum += m.probs[v];
        if (u < cum) {
            break;
        }
    }
    return pick;
}

inline MeasurementResult measure(const QuditRegister &reg, std::size_t q, SeededStream &rng) {
    const auto pick = sample_outcome(marginal(reg, q), rng);
    return {pick, project(reg, q, pick)};
}

/// Joint Born-rule distribution over the listed qudits (all of them when empty).
inline JointDistribution joint_distribution(const QuditRegister &reg, std::span<const std::size_t> qudits = {},
                                            std::size_t cap = kDefaultMaxAmplitudes) {
    if (reg.size() > cap) {
        throw SizeCapExceeded("joint_distribution: register of " + std::to_string(reg.size()) +
                              " amplitudes exceeds cap");
    }
    std::vector<std::size_t> sel(qudits.begin(), qudits.end());
    if (sel.empty()) {
        for (std::size_t q = 1; q <= reg.qudits(); ++q) {
            sel.push_back(q);
        }
    }
    std::vector<std::size_t> strides;
    for (auto q : sel) {
        strides.push_back(reg.stride(q));
    }
    std::map<std::vector<std::uint32_t>, double> acc;
    const auto amps = reg.amplitudes();
    std::vector<std::uint32_t> key(sel.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        if (p == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < sel.size(); ++j) {
            key[j] = static_cast<std::uint32_t>((i / strides[j]) % reg.dim());
        }
        acc[key] += p;
    }
    JointDistribution out;
    for (auto &[k, p] : acc) {
        if (p > kPruneTol) {
            out.entries.emplace(k, p);
        }
    }
    return out;
}

}  // namespace qss
