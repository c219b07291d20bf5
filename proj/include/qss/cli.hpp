#pragma once

// Command-line front end. Exit codes:
//   0  success (including a protocol run whose outcome misses the secret)
//   2  usage or configuration error
//   3  modular-arithmetic infeasibility (a Lagrange denominator is not invertible)
//   4  the worked-example reproduction failed one of its checks

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qss/analysis.hpp"
#include "qss/modmath.hpp"
#include "qss/protocol.hpp"

namespace qss::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNotInvertible = 3, kReproductionFailed = 4 };

/// Environment variable overriding the d^t amplitude cap.
inline constexpr const char *kSizeCapEnv = "QSS_MAX_AMPLITUDES";

struct CliConfig {
    std::string command;
    std::uint32_t d = 0;
    std::size_t t = 0;
    std::size_t n = 0;
    std::vector<Residue> coeffs;
    std::vector<Residue> s_vector;
    std::vector<Residue> xs;
    std::optional<Residue> secret;
    std::string variant = "song-original";
    std::size_t trials = 10000;
    std::uint64_t seed = kDefaultSeed;
    bool entropy_seed = false;
    std::string format = "text";
    std::string output;
    std::vector<std::uint32_t> d_values;
    std::vector<std::size_t> t_values;
    std::size_t max_vectors = 512;
    std::size_t max_amplitudes = kDefaultMaxAmplitudes;
};

class UsageError : public Error {
  public:
    using Error::Error;
};

inline std::size_t size_cap_from_env() {
    const char *v = std::getenv(kSizeCapEnv);
    if (!v || !*v) {
        return kDefaultMaxAmplitudes;
    }
    try {
        std::size_t pos = 0;
        const auto cap = std::stoull(v, &pos);
        if (pos != std::string(v).size() || cap == 0) {
            throw UsageError("");
        }
        return cap;
    } catch (const std::exception &) {
        throw UsageError(std::string(kSizeCapEnv) + " must be a positive integer, got '" + v + "'");
    }
}

/// Builds protocol parameters from either --secret-coeffs/--xs or --s-vector.
inline ProtocolParams params_from(const CliConfig &c) {
    if (c.d == 0) {
        throw UsageError("--d is required");
    }
    if (!c.coeffs.empty() && !c.s_vector.empty()) {
        throw UsageError("--secret-coeffs and --s-vector are mutually exclusive");
    }
    ProtocolParams p = [&] {
        if (!c.coeffs.empty()) {
            if (c.xs.empty()) {
                throw UsageError("--secret-coeffs requires --xs");
            }
            for (auto a : c.coeffs) {
                if (a >= c.d) {
                    throw UsageError("coefficient " + std::to_string(a) + " not reduced mod " + std::to_string(c.d));
                }
            }
            if (c.t != 0 && c.t != c.coeffs.size()) {
                throw UsageError("--t must equal the number of coefficients");
            }
            if (c.xs.size() < c.coeffs.size()) {
                throw UsageError("need at least t abscissae");
            }
            return ProtocolParams::from_polynomial(SharePolynomial(c.d, c.coeffs), c.xs, c.seed);
        }
        if (!c.s_vector.empty()) {
            if (c.t != 0 && c.t != c.s_vector.size()) {
                throw UsageError("--t must equal the length of --s-vector");
            }
            auto p = ProtocolParams::from_terms(c.d, c.s_vector, c.seed);
            if (c.n != 0) {
                p.n = c.n;
            }
            return p;
        }
        throw UsageError("one of --secret-coeffs or --s-vector is required");
    }();
    p.max_amplitudes = c.max_amplitudes;
    return p;
}

inline void emit(const CliConfig &c, std::ostream &out, const std::string &text, const nlohmann::json &doc) {
    const std::string body = c.format == "json" ? doc.dump(2) + "\n" : text;
    if (c.output.empty()) {
        out << body;
        return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f) {
        throw UsageError("cannot open output file '" + c.output + "'");
    }
    f << body;
}

inline int cmd_shares(const CliConfig &c, std::ostream &out) {
    if (c.coeffs.empty() || c.xs.empty()) {
        throw UsageError("shares requires --secret-coeffs and --xs");
    }
    if (c.d == 0) {
        throw UsageError("--d is required");
    }
    for (auto a : c.coeffs) {
        if (a >= c.d) {
            throw UsageError("coefficient " + std::to_string(a) + " not reduced mod " + std::to_string(c.d));
        }
    }
    const SharePolynomial poly(c.d, c.coeffs);
    const auto t = poly.threshold();
    if (c.t != 0 && c.t != t) {
        throw UsageError("--t must equal the number of coefficients");
    }
    if (c.xs.size() < t) {
        throw UsageError("need at least t=" + std::to_string(t) + " abscissae");
    }
    const auto shares = gen_shares(poly, c.xs);
    const auto terms = lagrange_terms(std::span<const Share>(shares.data(), t), c.d);
    Residue sum = 0;
    for (const auto &term : terms) {
        sum = add_mod(sum, term.s, c.d);
    }

    std::ostringstream text;
    text << "d " << c.d << "  t " << t << "  n " << shares.size() << '\n';
    for (std::size_t i = 0; i < shares.size(); ++i) {
        text << "share " << i + 1 << ": (" << shares[i].x << ", " << shares[i].y << ")\n";
    }
    for (const auto &term : terms) {
        text << "s_" << term.r << " = " << term.s << '\n';
    }
    text << "sum s_r mod d = " << sum << '\n';

    nlohmann::json doc;
    doc["d"] = c.d;
    doc["t"] = t;
    doc["n"] = shares.size();
    doc["shares"] = nlohmann::json::array();
    for (const auto &sh : shares) {
        doc["shares"].push_back({{"x", sh.x}, {"y", sh.y}});
    }
    doc["terms"] = nlohmann::json::array();
    for (const auto &term : terms) {
        doc["terms"].push_back({{"r", term.r}, {"s", term.s}});
    }
    doc["sum"] = sum;
    emit(c, out, text.str(), doc);
    return kOk;
}

inline int cmd_simulate(const CliConfig &c, std::ostream &out) {
    const auto variant = parse_variant(c.variant);
    Transcript tr = [&] {
        if (variant == Variant::ProductCounterfactual && c.secret) {
            if (c.d == 0) {
                throw UsageError("--d is required");
            }
            if (*c.secret >= c.d) {
                throw UsageError("--secret must be in [0, d)");
            }
            return run_product_counterfactual_transcript(*c.secret, c.d, c.seed);
        }
        if (c.secret) {
            throw UsageError("--secret applies only to the product-counterfactual variant");
        }
        return run_variant(variant, params_from(c));
    }();
    const std::string verdict = std::string("outcome == secret: ") + (tr.success() ? "yes" : "no");
    auto doc = tr.to_json();
    doc["verdict"] = verdict;
    emit(c, out, tr.to_text() + verdict + "\n", doc);
    return kOk;
}

inline int cmd_example(const CliConfig &c, std::ostream &out) {
    const auto report = reproduce_example_d4({3, 0, 0}, c.trials, c.seed);
    emit(c, out, report.to_text(), report.to_json());
    return report.all_passed() ? kOk : kReproductionFailed;
}

inline int cmd_sweep(const CliConfig &c, std::ostream &out) {
    const auto variant = parse_variant(c.variant);
    if (variant == Variant::ProductCounterfactual) {
        throw UsageError("sweep supports --variant song-original or repaired");
    }
    auto ds = c.d_values.empty() ? std::vector<std::uint32_t>{2, 3, 4, 5} : c.d_values;
    auto ts = c.t_values.empty() ? std::vector<std::size_t>{1, 2, 3} : c.t_values;
    for (auto d : ds) {
        if (d < 2 || d > 8) {
            throw UsageError("sweep d values must lie in [2, 8]");
        }
    }
    for (auto t : ts) {
        if (t < 1 || t > 4) {
            throw UsageError("sweep t values must lie in [1, 4]");
        }
    }
    SweepTable table;
    try {
        table = sweep_exact(ds, ts, variant, c.max_vectors, c.max_amplitudes);
    } catch (const SizeCapExceeded &e) {
        throw UsageError(e.what());
    }
    emit(c, out, table.to_text(), table.to_json());
    // Every cell must match its expectation; a mismatch means the simulator is wrong.
    return table.all_passed() ? kOk : kReproductionFailed;
}

/// Parses argv and dispatches. Never calls exit().
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    CliConfig c;
    CLI::App app{"qss: qudit threshold secret-sharing reconstruction simulator"};
    app.require_subcommand(1, 1);

    auto add_output = [&](CLI::App *sub) {
        sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--output", c.output, "Write output to this file instead of stdout");
    };
    auto add_seed = [&](CLI::App *sub) {
        sub->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
        sub->add_flag("--entropy-seed", c.entropy_seed, "Seed from std::random_device instead");
    };

    auto *shares = app.add_subcommand("shares", "Generate Shamir shares and their Lagrange terms");
    shares->add_option("--d", c.d, "Modulus")->required();
    shares->add_option("--t", c.t, "Threshold (defaults to the number of coefficients)");
    shares->add_option("--secret-coeffs", c.coeffs, "a_0,...,a_{t-1}")->delimiter(',')->required();
    shares->add_option("--xs", c.xs, "Abscissae x_1,...,x_n")->delimiter(',')->required();
    add_output(shares);

    auto *simulate = app.add_subcommand("simulate", "Run one protocol variant and print its transcript");
    simulate->add_option("--variant", c.variant, "song-original | product-counterfactual | repaired")
        ->check(CLI::IsMember({"song-original", "product-counterfactual", "repaired"}));
    simulate->add_option("--d", c.d, "Qudit dimension / modulus");
    simulate->add_option("--t", c.t, "Number of participating agents");
    simulate->add_option("--n", c.n, "Total number of agents");
    auto *coeffs = simulate->add_option("--secret-coeffs", c.coeffs, "a_0,...,a_{t-1}")->delimiter(',');
    auto *svec = simulate->add_option("--s-vector", c.s_vector, "s_1,...,s_t given directly")->delimiter(',');
    coeffs->excludes(svec);
    simulate->add_option("--xs", c.xs, "Abscissae x_1,...,x_n")->delimiter(',');
    simulate->add_option("--secret", c.secret, "S for the product-counterfactual variant");
    add_seed(simulate);
    add_output(simulate);

    auto *example = app.add_subcommand("example", "Reproduce the d=4, t=3, a_0=3 worked example");
    example->add_option("--trials", c.trials, "Monte-Carlo trials")->capture_default_str();
    add_seed(example);
    add_output(example);

    auto *sweep = app.add_subcommand("sweep", "Exact success probability over a (d, t) grid");
    sweep->add_option("--d-values", c.d_values, "d values, 2..8")->delimiter(',');
    sweep->add_option("--t-values", c.t_values, "t values, 1..4")->delimiter(',');
    sweep->add_option("--variant", c.variant, "song-original | repaired")
        ->check(CLI::IsMember({"song-original", "repaired"}));
    sweep->add_option("--max-vectors", c.max_vectors, "s-vectors per cell (exhaustive below this)")
        ->capture_default_str();
    add_output(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        c.max_amplitudes = size_cap_from_env();
        if (c.entropy_seed) {
            std::random_device rd;
            c.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        }
        if (c.trials < 1) {
            throw UsageError("--trials must be >= 1");
        }
        if (shares->parsed()) {
            c.command = "shares";
            return cmd_shares(c, out);
        }
        if (simulate->parsed()) {
            c.command = "simulate";
            return cmd_simulate(c, out);
        }
        if (example->parsed()) {
            c.command = "example";
            return cmd_example(c, out);
        }
        c.command = "sweep";
        return cmd_sweep(c, out);
    } catch (const NotInvertible &e) {
        err << "error: " << e.what() << '\n';
        return kNotInvertible;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace qss::cli
