#pragma once

// Reproduction of the d=4, t=3, a_0=3 worked example and exact/sampled
// success probabilities for Bob_1's lone measurement.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qss/protocol.hpp"
#include "qss/qudit.hpp"

namespace qss {

inline constexpr double kExampleTol = 1e-12;

struct AmplitudeRow {
    std::vector<std::uint32_t> digits;
    double re;
    double im;

    bool operator==(const AmplitudeRow &) const = default;
};

struct AmplitudeTable {
    std::uint32_t d;
    std::size_t t;
    std::vector<AmplitudeRow> rows;
    double norm;  // sum of squared moduli over listed rows

    bool operator==(const AmplitudeTable &) const = default;
};

/// Rows ordered by basis index; entries with modulus below 1e-12 are dropped.
inline AmplitudeTable amplitude_table(const QuditRegister &reg, std::size_t cap = kDefaultMaxAmplitudes) {
    if (reg.size() > cap) {
        throw SizeCapExceeded("amplitude_table: register exceeds cap");
    }
    AmplitudeTable tab{reg.dim(), reg.qudits(), {}, 0.0};
    const auto amps = reg.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (std::abs(amps[i]) < kPruneTol) {
            continue;
        }
        tab.rows.push_back({reg.digits_of(i), amps[i].real(), amps[i].imag()});
        tab.norm += std::norm(amps[i]);
    }
    return tab;
}

/// "a+bi" with explicit signs at 12 significant digits. Display only.
inline std::string format_complex(double re, double im) {
    auto clean = [](double v) { return std::abs(v) < 5e-13 ? 0.0 : v; };
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.12g%+.12gi", clean(re), clean(im));
    return buf;
}

inline std::string basis_label(const std::vector<std::uint32_t> &digits, std::uint32_t d) {
    std::string s = "|";
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (d > 10 && i > 0) {
            s += ',';
        }
        s += std::to_string(digits[i]);
    }
    return s + ">";
}

inline std::string render(const AmplitudeTable &tab) {
    std::ostringstream os;
    for (const auto &row : tab.rows) {
        os << "  " << basis_label(row.digits, tab.d) << "  " << format_complex(row.re, row.im) << '\n';
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", tab.norm);
    os << "  norm^2 = " << buf << '\n';
    return os.str();
}

inline nlohmann::json to_json(const AmplitudeTable &tab) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &r : tab.rows) {
        rows.push_back({{"basis", r.digits}, {"re", r.re}, {"im", r.im}});
    }
    return {{"d", tab.d}, {"t", tab.t}, {"rows", std::move(rows)}, {"norm", tab.norm}};
}

inline AmplitudeTable amplitude_table_from_json(const nlohmann::json &j) {
    AmplitudeTable tab{j.at("d").get<std::uint32_t>(), j.at("t").get<std::size_t>(), {}, j.at("norm").get<double>()};
    for (const auto &r : j.at("rows")) {
        tab.rows.push_back({r.at("basis").get<std::vector<std::uint32_t>>(), r.at("re").get<double>(),
                            r.at("im").get<double>()});
    }
    return tab;
}

/// Pr[Bob_1's lone measurement returns a_0], from the exact marginal.
inline double success_probability_exact(const ProtocolParams &p) {
    const auto expected = resolve_terms(p).expected_secret;
    return marginal(bob1_fourier_state(p), 1)[expected];
}

/// Pr[sum of announced m_r == a_0 mod d] in the repaired variant, from the full joint distribution.
inline double repaired_success_probability_exact(const ProtocolParams &p) {
    const auto expected = resolve_terms(p).expected_secret;
    const auto joint = joint_distribution(all_fourier_state(p), {}, p.max_amplitudes);
    double hit = 0.0;
    for (const auto &[outcome, prob] : joint.entries) {
        Residue sum = 0;
        for (auto m : outcome) {
            sum = add_mod(sum, m, p.d);
        }
        if (sum == expected) {
            hit += prob;
        }
    }
    return hit;
}

struct MonteCarloEstimate {
    std::size_t trials;
    std::uint64_t seed;
    double estimate;
    double std_error;

    bool operator==(const MonteCarloEstimate &) const = default;
};

/// Fraction of protocol runs whose outcome equals a_0. Trial i uses
/// derive_seed(seed, i), so the estimate depends only on (params, trials, seed).
inline MonteCarloEstimate success_probability_mc(const ProtocolParams &p, std::size_t trials, std::uint64_t seed,
                                                 Variant variant = Variant::SongOriginal) {
    if (trials < 1) {
        throw InvalidArgument("success_probability_mc: trials must be >= 1");
    }
    const PreparedRun run(variant, p);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        hits += run.outcome(derive_seed(seed, i)) == run.expected_secret() ? 1 : 0;
    }
    const double est = static_cast<double>(hits) / static_cast<double>(trials);
    return {trials, seed, est, std::sqrt(est * (1.0 - est) / static_cast<double>(trials))};
}

struct CheckResult {
    std::string name;
    double max_abs_error;
    bool passed;

    bool operator==(const CheckResult &) const = default;
};

struct ExampleReport {
    std::uint32_t d;
    std::size_t t;
    Residue secret;
    std::vector<Residue> s;
    AmplitudeTable encoded_table;
    AmplitudeTable after_qft_table;
    std::vector<double> marginal;
    double exact_p;
    MonteCarloEstimate mc;
    std::vector<CheckResult> checks;
    std::string verdict;

    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.passed; });
    }

    bool operator==(const ExampleReport &) const = default;

    nlohmann::json to_json() const {
        nlohmann::json cks = nlohmann::json::array();
        for (const auto &c : checks) {
            cks.push_back({{"name", c.name}, {"max_abs_error", c.max_abs_error}, {"passed", c.passed}});
        }
        return {{"params", {{"d", d}, {"t", t}, {"secret", secret}, {"s", s}}},
                {"encoded_table", qss::to_json(encoded_table)},
                {"after_qft_table", qss::to_json(after_qft_table)},
                {"marginal", marginal},
                {"exact_p", exact_p},
                {"mc", {{"trials", mc.trials}, {"seed", mc.seed}, {"estimate", mc.estimate}, {"stderr", mc.std_error}}},
                {"checks", std::move(cks)},
                {"verdict", verdict}};
    }

    static ExampleReport from_json(const nlohmann::json &j) {
        const auto &params = j.at("params");
        const auto &mc = j.at("mc");
        ExampleReport r{params.at("d").get<std::uint32_t>(),
                        params.at("t").get<std::size_t>(),
                        params.at("secret").get<Residue>(),
                        params.at("s").get<std::vector<Residue>>(),
                        amplitude_table_from_json(j.at("encoded_table")),
                        amplitude_table_from_json(j.at("after_qft_table")),
                        j.at("marginal").get<std::vector<double>>(),
                        j.at("exact_p").get<double>(),
                        {mc.at("trials").get<std::size_t>(), mc.at("seed").get<std::uint64_t>(),
                         mc.at("estimate").get<double>(), mc.at("stderr").get<double>()},
                        {},
                        j.at("verdict").get<std::string>()};
        for (const auto &c : j.at("checks")) {
            r.checks.push_back(
                {c.at("name").get<std::string>(), c.at("max_abs_error").get<double>(), c.at("passed").get<bool>()});
        }
        return r;
    }

    std::string to_text() const {
        std::ostringstream os;
        char buf[128];
        os << "worked example: d=" << d << " t=" << t << " a_0=" << secret << " s=(";
        for (std::size_t i = 0; i < s.size(); ++i) {
            os << (i ? "," : "") << s[i];
        }
        os << ")\n\n";
        os << "state after all encodings:\n" << render(encoded_table) << '\n';
        os << "state after QFT^-1 on qudit 1:\n" << render(after_qft_table) << '\n';
        os << "Bob_1 marginal:";
        for (std::size_t v = 0; v < marginal.size(); ++v) {
            std::snprintf(buf, sizeof buf, " P(%zu)=%.12g", v, marginal[v]);
            os << buf;
        }
        os << '\n';
        std::snprintf(buf, sizeof buf, "exact Pr[outcome == a_0] = %.12g\n", exact_p);
        os << buf;
        std::snprintf(buf, sizeof buf, "monte carlo: trials=%zu seed=%llu estimate=%.6f stderr=%.6f\n", mc.trials,
                      static_cast<unsigned long long>(mc.seed), mc.estimate, mc.std_error);
        os << buf << '\n' << "checks:\n";
        for (const auto &c : checks) {
            std::snprintf(buf, sizeof buf, "  [%s] %s (max error %.3g)\n", c.passed ? "pass" : "FAIL", c.name.c_str(),
                          c.max_abs_error);
            os << buf;
        }
        os << '\n' << "verdict: " << verdict << '\n';
        return os.str();
    }
};

namespace example_d4 {

using namespace std::complex_literals;

inline constexpr std::uint32_t kDim = 4;
inline constexpr std::size_t kAgents = 3;
inline constexpr Residue kSecret = 3;

// Published closed forms, written out literally rather than computed.
// Phase of branch |kkk> after encoding, times 1/2: omega^{3k} for k = 0..3.
inline const std::array<Amplitude, 4> kEncodedPhases = {1.0, -1.0i, -1.0, 1.0i};

// QFT^-1(omega^{3k}|k>) coefficients on |0>..|3>, times 1/2. Row k.
inline const std::array<std::array<Amplitude, 4>, 4> kFourierRows = {{
    {1.0, 1.0, 1.0, 1.0},
    {-1.0i, -1.0, 1.0i, 1.0},
    {-1.0, 1.0, -1.0, 1.0},
    {1.0i, -1.0, -1.0i, 1.0},
}};

/// max error of qft_inv(4) against the four published expansions.
inline double fourier_expansion_error() {
    const auto f = qft_inv(kDim);
    double worst = 0.0;
    for (std::uint32_t k = 0; k < kDim; ++k) {
        const auto phase = root_of_unity(kDim, static_cast<std::int64_t>(kSecret) * k);
        for (std::uint32_t j = 0; j < kDim; ++j) {
            worst = std::max(worst, std::abs(f(j, k) * phase - 0.5 * kFourierRows[k][j]));
        }
    }
    return worst;
}

/// max error of the encoded 3-qudit state against (1/2) sum_k omega^{3k}|kkk>.
inline double encoded_state_error(const QuditRegister &reg) {
    double worst = 0.0;
    for (std::size_t i = 0; i < reg.size(); ++i) {
        const auto dg = reg.digits_of(i);
        Amplitude want{};
        if (dg[0] == dg[1] && dg[1] == dg[2]) {
            want = 0.5 * kEncodedPhases[dg[0]];
        }
        worst = std::max(worst, std::abs(reg[i] - want));
    }
    return worst;
}

/// max error of the rotated state against (1/4) sum_k (row k on qudit 1)|kk>_{23}.
inline double rotated_state_error(const QuditRegister &reg) {
    double worst = 0.0;
    for (std::size_t i = 0; i < reg.size(); ++i) {
        const auto dg = reg.digits_of(i);
        Amplitude want{};
        if (dg[1] == dg[2]) {
            want = 0.25 * kFourierRows[dg[1]][dg[0]];
        }
        worst = std::max(worst, std::abs(reg[i] - want));
    }
    return worst;
}

inline const std::string kConfirmedVerdict = "comment confirmed: outcome uniform, secret not recoverable";

}  // namespace example_d4

/// Rebuilds the d=4, t=3, a_0=3 example from scratch and checks every
/// intermediate state against the published closed forms.
inline ExampleReport reproduce_example_d4(std::vector<Residue> split = {3, 0, 0}, std::size_t trials = 10000,
                                          std::uint64_t seed = kDefaultSeed) {
    using namespace example_d4;
    const auto params = ProtocolParams::from_terms(kDim, split, seed);
    const auto terms = resolve_terms(params);
    if (terms.s.size() != kAgents || terms.expected_secret != kSecret) {
        throw InvalidArgument("example split must have 3 entries summing to 3 mod 4");
    }

    ExampleReport rep{kDim, kAgents, kSecret, split, {}, {}, {}, 0.0, {}, {}, {}};

    const double fourier_err = fourier_expansion_error();
    rep.checks.push_back({"inverse Fourier expansions of omega^{3k}|k>", fourier_err, fourier_err <= kExampleTol});

    const auto encoded = post_encoding_state(params);
    const double enc_err = encoded_state_error(encoded);
    rep.checks.push_back({"encoded state, 4 amplitudes", enc_err, enc_err <= kExampleTol});

    const auto rotated = apply_local(encoded, 1, qft_inv(kDim));
    const double rot_err = rotated_state_error(rotated);
    rep.checks.push_back({"state after QFT^-1 on qudit 1, 16 amplitudes", rot_err, rot_err <= kExampleTol});

    rep.encoded_table = amplitude_table(encoded);
    rep.after_qft_table = amplitude_table(rotated);
    rep.checks.push_back({"nonzero amplitude counts 4 and 16",
                          0.0,
                          rep.encoded_table.rows.size() == 4 && rep.after_qft_table.rows.size() == 16});

    rep.marginal = marginal(rotated, 1).probs;
    double uniform_err = 0.0;
    for (auto p : rep.marginal) {
        uniform_err = std::max(uniform_err, std::abs(p - 0.25));
    }
    rep.checks.push_back({"Bob_1 marginal uniform", uniform_err, uniform_err <= kExampleTol});

    rep.exact_p = rep.marginal[kSecret];
    rep.mc = success_probability_mc(params, trials, seed);

    const bool confirmed = uniform_err <= kExampleTol && rep.exact_p < 1.0 - kExampleTol;
    rep.verdict = confirmed ? kConfirmedVerdict : "not confirmed: Bob_1 outcome is not uniform";
    return rep;
}

struct SweepCell {
    std::uint32_t d;
    std::size_t t;
    std::size_t vectors;
    double expected;
    double min_p;
    double max_p;

    bool passed(double tol = kStateTol) const {
        return std::abs(min_p - expected) <= tol && std::abs(max_p - expected) <= tol;
    }
};

struct SweepTable {
    Variant variant;
    std::vector<SweepCell> cells;

    bool all_passed(double tol = kStateTol) const {
        return std::all_of(cells.begin(), cells.end(), [&](const SweepCell &c) { return c.passed(tol); });
    }

    nlohmann::json to_json() const {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &c : cells) {
            rows.push_back({{"d", c.d},
                            {"t", c.t},
                            {"s_vectors", c.vectors},
                            {"expected", c.expected},
                            {"min_p", c.min_p},
                            {"max_p", c.max_p},
                            {"passed", c.passed()}});
        }
        return {{"variant", to_string(variant)}, {"cells", std::move(rows)}, {"all_passed", all_passed()}};
    }

    std::string to_text() const {
        std::ostringstream os;
        char buf[160];
        os << "exact success probability sweep, variant " << to_string(variant) << '\n';
        std::snprintf(buf, sizeof buf, "%4s %4s %10s %16s %16s %16s %6s\n", "d", "t", "s-vectors", "expected", "min",
                      "max", "ok");
        os << buf;
        for (const auto &c : cells) {
            std::snprintf(buf, sizeof buf, "%4u %4zu %10zu %16.12f %16.12f %16.12f %6s\n", c.d, c.t, c.vectors,
                          c.expected, c.min_p, c.max_p, c.passed() ? "yes" : "NO");
            os << buf;
        }
        return os.str();
    }
};

/// Every s-vector in Z_d^t when there are at most max_vectors of them,
/// otherwise max_vectors pseudo-random ones drawn from `seed`.
inline std::vector<std::vector<Residue>> s_vectors(std::uint32_t d, std::size_t t, std::size_t max_vectors,
                                                   std::uint64_t seed = kDefaultSeed) {
    std::vector<std::vector<Residue>> out;
    std::size_t total = 1;
    bool exhaustive = true;
    for (std::size_t i = 0; i < t; ++i) {
        if (total > max_vectors / d) {
            exhaustive = false;
            break;
        }
        total *= d;
    }
    if (exhaustive) {
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::vector<Residue> s(t);
            auto rest = idx;
            for (std::size_t i = t; i-- > 0;) {
                s[i] = static_cast<Residue>(rest % d);
                rest /= d;
            }
            out.push_back(std::move(s));
        }
        return out;
    }
    SeededStream rng(seed);
    for (std::size_t n = 0; n < max_vectors; ++n) {
        std::vector<Residue> s(t);
        for (auto &v : s) {
            v = static_cast<Residue>(rng.uniform() * d);
        }
        out.push_back(std::move(s));
    }
    return out;
}

/// Exact success probability over a (d, t) grid. The song-original entries are
/// expected to equal 1/d (1 when t = 1); repaired entries are expected to be 1.
inline SweepTable sweep_exact(const std::vector<std::uint32_t> &ds, const std::vector<std::size_t> &ts,
                              Variant variant, std::size_t max_vectors = 512,
                              std::size_t cap = kDefaultMaxAmplitudes) {
    if (variant == Variant::ProductCounterfactual) {
        throw InvalidArgument("sweep supports song-original and repaired variants");
    }
    SweepTable table{variant, {}};
    for (auto d : ds) {
        for (auto t : ts) {
            state_size(d, t, cap);
            SweepCell cell{d, t, 0, 0.0, 1.0, 0.0};
            cell.expected = (variant == Variant::Repaired || t == 1) ? 1.0 : 1.0 / d;
            for (auto &s : s_vectors(d, t, max_vectors, derive_seed(d, t))) {
                auto p = ProtocolParams::from_terms(d, std::move(s));
                p.max_amplitudes = cap;
                const double prob = variant == Variant::Repaired ? repaired_success_probability_exact(p)
                                                                 : success_probability_exact(p);
                cell.min_p = std::min(cell.min_p, prob);
                cell.max_p = std::max(cell.max_p, prob);
                ++cell.vectors;
            }
            table.cells.push_back(cell);
        }
    }
    return table;
}

}  // namespace qss
