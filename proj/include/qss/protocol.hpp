#pragma once

// Agent-level execution of the threshold reconstruction protocol.
//
// Bob_1 prepares a t-qudit GHZ state and hands qudit r to Bob_r over an
// ideal authenticated channel (logged only). Each Bob_r applies the phase
// gate U_{0,s_r} for its Lagrange term. Then:
//
//   song-original            Bob_1 alone applies QFT^-1 to qudit 1 and measures.
//   product-counterfactual   the same final step on a single unentangled qudit.
//   repaired                 every Bob_r applies QFT^-1 to qudit r, measures and
//                            announces m_r; the secret is sum m_r mod d.
//
// The repaired variant is a diagnostic, not part of the original protocol.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qss/modmath.hpp"
#include "qss/qudit.hpp"
#include "qss/random.hpp"

namespace qss {

inline constexpr std::uint64_t kDefaultSeed = 20171013;

/// Shamir polynomial plus the n abscissae handed out. The first t shares take part.
struct PolynomialSecret {
    SharePolynomial poly;
    std::vector<Residue> xs;

    bool operator==(const PolynomialSecret &) const = default;
};

/// Lagrange terms s_1..s_t given directly, bypassing share generation.
struct DirectTerms {
    std::vector<Residue> s;

    bool operator==(const DirectTerms &) const = default;
};

using SecretSpec = std::variant<PolynomialSecret, DirectTerms>;

struct ProtocolParams {
    std::uint32_t d;
    std::size_t t;
    std::size_t n;
    SecretSpec secret;
    std::uint64_t seed = kDefaultSeed;
    std::size_t max_amplitudes = kDefaultMaxAmplitudes;

    static ProtocolParams from_polynomial(SharePolynomial poly, std::vector<Residue> xs,
                                          std::uint64_t seed = kDefaultSeed) {
        const auto d = poly.modulus();
        const auto t = poly.threshold();
        const auto n = xs.size();
        return ProtocolParams{d, t, n, PolynomialSecret{std::move(poly), std::move(xs)}, seed};
    }

    static ProtocolParams from_terms(std::uint32_t d, std::vector<Residue> s, std::uint64_t seed = kDefaultSeed) {
        const auto t = s.size();
        return ProtocolParams{d, t, t, DirectTerms{std::move(s)}, seed};
    }
};

/// The per-agent phases and the value they should reconstruct.
struct ResolvedTerms {
    std::vector<Residue> s;
    Residue expected_secret;
};

/// Validates params and computes s_1..s_t. Throws NotInvertible from the share math.
inline ResolvedTerms resolve_terms(const ProtocolParams &p) {
    check_modulus(p.d);
    if (p.t < 1) {
        throw InvalidArgument("threshold t must be >= 1");
    }
    if (p.n < p.t) {
        throw InvalidArgument("n=" + std::to_string(p.n) + " is smaller than t=" + std::to_string(p.t));
    }
    if (const auto *direct = std::get_if<DirectTerms>(&p.secret)) {
        if (direct->s.size() != p.t) {
            throw InvalidArgument("s-vector has " + std::to_string(direct->s.size()) + " entries, expected t=" +
                                  std::to_string(p.t));
        }
        Residue sum = 0;
        for (auto s : direct->s) {
            if (s >= p.d) {
                throw InvalidArgument("s-vector entry " + std::to_string(s) + " not reduced mod " +
                                      std::to_string(p.d));
            }
            sum = add_mod(sum, s, p.d);
        }
        return {direct->s, sum};
    }
    const auto &poly = std::get<PolynomialSecret>(p.secret);
    if (poly.poly.modulus() != p.d || poly.poly.threshold() != p.t) {
        throw InvalidArgument("polynomial does not match (d, t)");
    }
    if (poly.xs.size() != p.n) {
        throw InvalidArgument("expected n=" + std::to_string(p.n) + " abscissae, got " +
                              std::to_string(poly.xs.size()));
    }
    const auto shares = gen_shares(poly.poly, poly.xs);
    const std::span<const Share> participating(shares.data(), p.t);
    ResolvedTerms out{{}, poly.poly.secret()};
    for (const auto &term : lagrange_terms(participating, p.d)) {
        out.s.push_back(term.s);
    }
    return out;
}

enum class Variant { SongOriginal, ProductCounterfactual, Repaired };

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::SongOriginal:
            return "song-original";
        case Variant::ProductCounterfactual:
            return "product-counterfactual";
        case Variant::Repaired:
            return "repaired";
    }
    return "unknown";
}

inline Variant parse_variant(const std::string &name) {
    if (name == "song-original") {
        return Variant::SongOriginal;
    }
    if (name == "product-counterfactual") {
        return Variant::ProductCounterfactual;
    }
    if (name == "repaired") {
        return Variant::Repaired;
    }
    throw InvalidArgument("unknown variant '" + name + "'");
}

inline const std::string kPhaseGateLabel = "U0";
inline const std::string kFourierBasisLabel = "qft_inv+computational";

struct QuditSent {
    std::size_t from;
    std::size_t to;
    std::size_t qudit;
    bool operator==(const QuditSent &) const = default;
};

struct GateApplied {
    std::size_t agent;
    std::string gate;
    Residue s;
    bool operator==(const GateApplied &) const = default;
};

struct Measured {
    std::size_t agent;
    std::string basis;
    Residue outcome;
    bool operator==(const Measured &) const = default;
};

struct Announced {
    std::size_t agent;
    Residue value;
    bool operator==(const Announced &) const = default;
};

using Event = std::variant<QuditSent, GateApplied, Measured, Announced>;

struct Transcript {
    Variant variant;
    std::uint32_t d;
    std::size_t t;
    std::uint64_t seed;
    std::vector<Event> events;
    Residue final_outcome = 0;
    Residue expected_secret = 0;

    bool success() const {
        return final_outcome == expected_secret;
    }

    template <class E>
    std::size_t count() const {
        std::size_t c = 0;
        for (const auto &e : events) {
            c += std::holds_alternative<E>(e) ? 1 : 0;
        }
        return c;
    }

    bool operator==(const Transcript &) const = default;

    std::string to_text() const {
        std::ostringstream os;
        os << "variant " << to_string(variant) << '\n'
           << "d " << d << '\n'
           << "t " << t << '\n'
           << "seed " << seed << '\n';
        for (const auto &e : events) {
            std::visit(
                [&](const auto &ev) {
                    using E = std::decay_t<decltype(ev)>;
                    if constexpr (std::is_same_v<E, QuditSent>) {
                        os << "send from=" << ev.from << " to=" << ev.to << " qudit=" << ev.qudit;
                    } else if constexpr (std::is_same_v<E, GateApplied>) {
                        os << "gate agent=" << ev.agent << " gate=" << ev.gate << " s=" << ev.s;
                    } else if constexpr (std::is_same_v<E, Measured>) {
                        os << "measure agent=" << ev.agent << " basis=" << ev.basis << " outcome=" << ev.outcome;
                    } else {
                        os << "announce agent=" << ev.agent << " value=" << ev.value;
                    }
                },
                e);
            os << '\n';
        }
        os << "final_outcome " << final_outcome << '\n' << "expected_secret " << expected_secret << '\n';
        return os.str();
    }

    nlohmann::json to_json() const {
        using nlohmann::json;
        json evs = json::array();
        for (const auto &e : events) {
            std::visit(
                [&](const auto &ev) {
                    using E = std::decay_t<decltype(ev)>;
                    if constexpr (std::is_same_v<E, QuditSent>) {
                        evs.push_back({{"type", "send"}, {"from", ev.from}, {"to", ev.to}, {"qudit", ev.qudit}});
                    } else if constexpr (std::is_same_v<E, GateApplied>) {
                        evs.push_back({{"type", "gate"}, {"agent", ev.agent}, {"gate", ev.gate}, {"s", ev.s}});
                    } else if constexpr (std::is_same_v<E, Measured>) {
                        evs.push_back(
                            {{"type", "measure"}, {"agent", ev.agent}, {"basis", ev.basis}, {"outcome", ev.outcome}});
                    } else {
                        evs.push_back({{"type", "announce"}, {"agent", ev.agent}, {"value", ev.value}});
                    }
                },
                e);
        }
        return {{"variant", to_string(variant)},
                {"d", d},
                {"t", t},
                {"seed", seed},
                {"events", std::move(evs)},
                {"final_outcome", final_outcome},
                {"expected_secret", expected_secret},
                {"success", success()}};
    }

    static Transcript from_json(const nlohmann::json &j) {
        Transcript tr{parse_variant(j.at("variant").get<std::string>()), j.at("d").get<std::uint32_t>(),
                      j.at("t").get<std::size_t>(), j.at("seed").get<std::uint64_t>(), {}};
        for (const auto &e : j.at("events")) {
            const auto type = e.at("type").get<std::string>();
            if (type == "send") {
                tr.events.emplace_back(QuditSent{e.at("from"), e.at("to"), e.at("qudit")});
            } else if (type == "gate") {
                tr.events.emplace_back(GateApplied{e.at("agent"), e.at("gate"), e.at("s")});
            } else if (type == "measure") {
                tr.events.emplace_back(Measured{e.at("agent"), e.at("basis"), e.at("outcome")});
            } else if (type == "announce") {
                tr.events.emplace_back(Announced{e.at("agent"), e.at("value")});
            } else {
                throw InvalidArgument("unknown transcript event type '" + type + "'");
            }
        }
        tr.final_outcome = j.at("final_outcome");
        tr.expected_secret = j.at("expected_secret");
        return tr;
    }
};

namespace detail {

struct Encoded {
    QuditRegister state;
    ResolvedTerms terms;
};

// Steps 1 and 2: GHZ preparation, distribution, and each agent's phase gate.
inline Encoded prepare_and_encode(const ProtocolParams &p, std::vector<Event> *log) {
    auto terms = resolve_terms(p);
    auto reg = make_ghz(p.d, p.t, p.max_amplitudes);
    if (log) {
        for (std::size_t r = 2; r <= p.t; ++r) {
            log->emplace_back(QuditSent{1, r, r});
        }
    }
    for (std::size_t r = 1; r <= p.t; ++r) {
        reg = apply_local(reg, r, phase_gate(p.d, terms.s[r - 1]));
        if (log) {
            log->emplace_back(GateApplied{r, kPhaseGateLabel, terms.s[r - 1]});
        }
    }
    return {std::move(reg), std::move(terms)};
}

}  // namespace detail

/// |phi'> after every agent's phase gate, before any measurement.
inline QuditRegister post_encoding_state(const ProtocolParams &p) {
    return detail::prepare_and_encode(p, nullptr).state;
}

/// State just before Bob_1's lone measurement: QFT^-1 on qudit 1 of |phi'>.
inline QuditRegister bob1_fourier_state(const ProtocolParams &p) {
    return apply_local(post_encoding_state(p), 1, qft_inv(p.d));
}

/// State just before the repaired variant's measurements: QFT^-1 on every qudit.
inline QuditRegister all_fourier_state(const ProtocolParams &p) {
    auto reg = post_encoding_state(p);
    const auto f = qft_inv(p.d);
    for (std::size_t r = 1; r <= p.t; ++r) {
        reg = apply_local(reg, r, f);
    }
    return reg;
}

/// (1/sqrt d) sum_k omega^{S k}|k> on a single qudit, after QFT^-1.
inline QuditRegister counterfactual_state(Residue secret, std::uint32_t d) {
    check_modulus(d);
    if (secret >= d) {
        throw InvalidArgument("counterfactual: S=" + std::to_string(secret) + " not reduced mod " + std::to_string(d));
    }
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<Amplitude> amps(d);
    for (std::uint32_t k = 0; k < d; ++k) {
        amps[k] = a * root_of_unity(d, static_cast<std::int64_t>(secret) * k);
    }
    return apply_local(QuditRegister(d, 1, std::move(amps)), 1, qft_inv(d));
}

/// One protocol run split at its first measurement. Everything before that
/// point depends only on the parameters, so it is computed once here and
/// sample(seed) finishes the run. sample(seed) is the same transcript as the
/// matching run_* function with that seed.
class PreparedRun {
  public:
    PreparedRun(Variant v, const ProtocolParams &p) : variant_(v), d_(p.d), t_(p.t), f_(qft_inv(p.d)) {
        switch (v) {
            case Variant::SongOriginal:
            case Variant::Repaired: {
                auto enc = detail::prepare_and_encode(p, &prefix_);
                expected_ = enc.terms.expected_secret;
                first_ = apply_local(enc.state, 1, f_);
                break;
            }
            case Variant::ProductCounterfactual: {
                expected_ = resolve_terms(p).expected_secret;
                t_ = 1;
                prefix_.emplace_back(GateApplied{1, kPhaseGateLabel, expected_});
                first_ = counterfactual_state(expected_, d_);
                break;
            }
            default:
                throw InvalidArgument("unknown variant");
        }
        first_marginal_ = marginal(*first_, 1);
    }

    Variant variant() const {
        return variant_;
    }
    Residue expected_secret() const {
        return expected_;
    }

    /// Final outcome of the run seeded with `seed`, without building a transcript.
    Residue outcome(std::uint64_t seed) const {
        return finish(seed, nullptr);
    }

    Transcript sample(std::uint64_t seed) const {
        Transcript tr{variant_, d_, t_, seed, prefix_};
        tr.final_outcome = finish(seed, &tr.events);
        tr.expected_secret = expected_;
        return tr;
    }

  private:
    Residue finish(std::uint64_t seed, std::vector<Event> *log) const {
        SeededStream rng(seed);
        const auto first = sample_outcome(first_marginal_, rng);
        if (log) {
            log->emplace_back(Measured{1, kFourierBasisLabel, first});
        }
        if (variant_ != Variant::Repaired) {
            return first;
        }
        std::vector<Residue> results{first};
        auto reg = project(*first_, 1, first);
        for (std::size_t r = 2; r <= t_; ++r) {
            auto m = measure(apply_local(reg, r, f_), r, rng);
            if (log) {
                log->emplace_back(Measured{r, kFourierBasisLabel, m.outcome});
            }
            results.push_back(m.outcome);
            reg = std::move(m.post);
        }
        Residue sum = 0;
        for (std::size_t r = 1; r <= t_; ++r) {
            if (log) {
                log->emplace_back(Announced{r, results[r - 1]});
            }
            sum = add_mod(sum, results[r - 1], d_);
        }
        return sum;
    }

    Variant variant_;
    std::uint32_t d_;
    std::size_t t_;
    LocalUnitary f_;
    std::vector<Event> prefix_;
    Residue expected_ = 0;
    std::optional<QuditRegister> first_;
    MarginalDistribution first_marginal_;
};

inline Transcript run_song_original(const ProtocolParams &p) {
    return PreparedRun(Variant::SongOriginal, p).sample(p.seed);
}

inline Transcript run_repaired_all_measure(const ProtocolParams &p) {
    return PreparedRun(Variant::Repaired, p).sample(p.seed);
}

inline Transcript run_product_counterfactual_transcript(Residue secret, std::uint32_t d,
                                                        std::uint64_t seed = kDefaultSeed) {
    return PreparedRun(Variant::ProductCounterfactual, ProtocolParams::from_terms(d, {secret}, seed)).sample(seed);
}

inline Residue run_product_counterfactual(Residue secret, std::uint32_t d) {
    return run_product_counterfactual_transcript(secret, d).final_outcome;
}

inline Transcript run_variant(Variant v, const ProtocolParams &p) {
    switch (v) {
        case Variant::SongOriginal:
            return run_song_original(p);
        case Variant::Repaired:
            return run_repaired_all_measure(p);
        case Variant::ProductCounterfactual:
            return run_product_counterfactual_transcript(resolve_terms(p).expected_secret, p.d, p.seed);
    }
    throw InvalidArgument("unknown variant");
}

}  // namespace qss
