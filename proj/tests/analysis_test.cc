#include "qss/analysis.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace qss;

TEST(AmplitudeTable, ghz_pair) {
    const auto tab = amplitude_table(make_ghz(2, 2));
    ASSERT_EQ(tab.rows.size(), 2u);
    EXPECT_EQ(tab.rows[0].digits, (std::vector<std::uint32_t>{0, 0}));
    EXPECT_EQ(tab.rows[1].digits, (std::vector<std::uint32_t>{1, 1}));
    EXPECT_NEAR(tab.rows[0].re, 0.70710678118654752, 1e-15);
    EXPECT_NEAR(tab.rows[1].re, 0.70710678118654752, 1e-15);
    EXPECT_NEAR(tab.norm, 1.0, 1e-9);
    EXPECT_NE(render(tab).find("|00>  +0.707106781187+0i"), std::string::npos) << render(tab);
}

TEST(AmplitudeTable, encoded_example_state) {
    const auto tab = amplitude_table(post_encoding_state(ProtocolParams::from_terms(4, {3, 0, 0})));
    ASSERT_EQ(tab.rows.size(), 4u);
    const double want[4][2] = {{0.5, 0.0}, {0.0, -0.5}, {-0.5, 0.0}, {0.0, 0.5}};
    for (std::uint32_t k = 0; k < 4; ++k) {
        EXPECT_EQ(tab.rows[k].digits, (std::vector<std::uint32_t>{k, k, k}));
        EXPECT_NEAR(tab.rows[k].re, want[k][0], 1e-12);
        EXPECT_NEAR(tab.rows[k].im, want[k][1], 1e-12);
    }
}

TEST(AmplitudeTable, prunes_collapsed_branches) {
    SeededStream rng(4);
    const auto collapsed = measure(make_ghz(3, 2), 1, rng).post;
    const auto tab = amplitude_table(collapsed);
    ASSERT_EQ(tab.rows.size(), 1u);
    EXPECT_EQ(tab.rows[0].digits[0], tab.rows[0].digits[1]);
    EXPECT_NEAR(tab.norm, 1.0, 1e-9);
    EXPECT_THROW(amplitude_table(make_ghz(3, 2), 8), SizeCapExceeded);
}

TEST(FormatComplex, explicit_signs) {
    EXPECT_EQ(format_complex(0.25, -0.25), "+0.25-0.25i");
    EXPECT_EQ(format_complex(-0.5, 1e-17), "-0.5+0i");
    EXPECT_EQ(format_complex(-1e-17, 0.5), "+0+0.5i");
}

TEST(SuccessProbabilityExact, examples) {
    EXPECT_NEAR(success_probability_exact(ProtocolParams::from_terms(4, {3, 0, 0})), 0.25, 1e-12);
    for (Residue a = 0; a < 2; ++a) {
        for (Residue b = 0; b < 2; ++b) {
            EXPECT_NEAR(success_probability_exact(ProtocolParams::from_terms(2, {a, b})), 0.5, 1e-12);
        }
    }
    for (std::uint32_t d = 2; d <= 8; ++d) {
        EXPECT_NEAR(success_probability_exact(ProtocolParams::from_terms(d, {d - 1})), 1.0, 1e-12);
    }
    EXPECT_NEAR(success_probability_exact(ProtocolParams::from_polynomial(SharePolynomial(7, {5, 3, 2}), {1, 2, 3})),
                1.0 / 7, 1e-12);
}

TEST(SuccessProbabilityExact, repaired_is_certain) {
    for (std::uint32_t d = 2; d <= 6; ++d) {
        for (std::size_t t = 1; t <= 3; ++t) {
            std::vector<Residue> s(t, d - 1);
            EXPECT_NEAR(repaired_success_probability_exact(ProtocolParams::from_terms(d, s)), 1.0, 1e-9);
        }
    }
}

TEST(SuccessProbabilityMc, worked_example) {
    const auto p = ProtocolParams::from_terms(4, {3, 0, 0});
    const auto mc = success_probability_mc(p, 10000, kDefaultSeed);
    EXPECT_NEAR(mc.estimate, 0.25, 0.013);
    EXPECT_LT(std::abs(mc.estimate - 0.25), 4 * mc.std_error);
    EXPECT_EQ(success_probability_mc(p, 10000, kDefaultSeed), mc);
    EXPECT_THROW(success_probability_mc(p, 0, 1), InvalidArgument);
}

TEST(SuccessProbabilityMc, certain_cases) {
    const auto single = success_probability_mc(ProtocolParams::from_terms(5, {2}), 300, 9);
    EXPECT_EQ(single.estimate, 1.0);
    EXPECT_EQ(single.std_error, 0.0);
    const auto repaired = success_probability_mc(ProtocolParams::from_terms(4, {3, 0, 0}), 2000, 9, Variant::Repaired);
    EXPECT_EQ(repaired.estimate, 1.0);
}

TEST(SuccessProbabilityMc, converges_within_four_sigma) {
    for (std::uint32_t d : {2u, 3u, 5u}) {
        for (std::size_t t : {2u, 3u}) {
            const auto p = ProtocolParams::from_terms(d, std::vector<Residue>(t, 1));
            const auto exact = success_probability_exact(p);
            const auto mc = success_probability_mc(p, 10000, 1234 + d * 10 + t);
            EXPECT_LT(std::abs(mc.estimate - exact), 4 * mc.std_error) << d << "," << t;
        }
    }
}

TEST(ReproduceExample, checks_pass) {
    const auto rep = reproduce_example_d4();
    for (const auto &c : rep.checks) {
        EXPECT_TRUE(c.passed) << c.name << " error " << c.max_abs_error;
    }
    EXPECT_TRUE(rep.all_passed());
    EXPECT_EQ(rep.encoded_table.rows.size(), 4u);
    EXPECT_EQ(rep.after_qft_table.rows.size(), 16u);
    for (auto p : rep.marginal) {
        EXPECT_NEAR(p, 0.25, 1e-12);
    }
    EXPECT_NEAR(rep.exact_p, 0.25, 1e-12);
    EXPECT_EQ(rep.exact_p, rep.marginal[3]);
    EXPECT_EQ(rep.verdict, example_d4::kConfirmedVerdict);
    EXPECT_NEAR(rep.mc.estimate, 0.25, 4 * 0.00433);
}

TEST(ReproduceExample, branch_11_row) {
    const auto rep = reproduce_example_d4();
    const double want[4][2] = {{0, -0.25}, {-0.25, 0}, {0, 0.25}, {0.25, 0}};
    int found = 0;
    for (const auto &row : rep.after_qft_table.rows) {
        if (row.digits[1] == 1 && row.digits[2] == 1) {
            const auto j = row.digits[0];
            EXPECT_NEAR(row.re, want[j][0], 1e-12);
            EXPECT_NEAR(row.im, want[j][1], 1e-12);
            ++found;
        }
    }
    EXPECT_EQ(found, 4);
}

TEST(ReproduceExample, split_invariant) {
    const auto base = reproduce_example_d4({3, 0, 0}, 10);
    for (Residue a = 0; a < 4; ++a) {
        for (Residue b = 0; b < 4; ++b) {
            const Residue c = (3 + 8 - a - b) % 4;
            const auto rep = reproduce_example_d4({a, b, c}, 10);
            EXPECT_TRUE(rep.all_passed());
            ASSERT_EQ(rep.after_qft_table.rows.size(), base.after_qft_table.rows.size());
            for (std::size_t i = 0; i < rep.after_qft_table.rows.size(); ++i) {
                EXPECT_NEAR(rep.after_qft_table.rows[i].re, base.after_qft_table.rows[i].re, 1e-12);
                EXPECT_NEAR(rep.after_qft_table.rows[i].im, base.after_qft_table.rows[i].im, 1e-12);
            }
        }
    }
    EXPECT_THROW(reproduce_example_d4({1, 0, 0}), InvalidArgument);
}

TEST(ReproduceExample, deterministic_and_round_trips) {
    const auto a = reproduce_example_d4({3, 0, 0}, 2000, 8);
    const auto b = reproduce_example_d4({3, 0, 0}, 2000, 8);
    EXPECT_EQ(a.to_text(), b.to_text());
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump());

    const auto doc = a.to_json();
    for (const char *key : {"params", "encoded_table", "after_qft_table", "marginal", "exact_p", "mc", "verdict"}) {
        EXPECT_TRUE(doc.contains(key)) << key;
    }
    EXPECT_EQ(ExampleReport::from_json(nlohmann::json::parse(doc.dump())), a);
}

TEST(ReproduceExample, checks_detect_a_wrong_state) {
    // Feeding the encoded state where the rotated one is expected must fail.
    const auto enc = post_encoding_state(ProtocolParams::from_terms(4, {3, 0, 0}));
    EXPECT_GT(example_d4::rotated_state_error(enc), 0.1);
    EXPECT_LE(example_d4::encoded_state_error(enc), 1e-12);
    EXPECT_LE(example_d4::fourier_expansion_error(), 1e-12);
}

TEST(Sweep, small_grid) {
    const auto song = sweep_exact({2, 3, 4, 5}, {1, 2, 3}, Variant::SongOriginal);
    EXPECT_TRUE(song.all_passed());
    for (const auto &c : song.cells) {
        EXPECT_DOUBLE_EQ(c.expected, c.t == 1 ? 1.0 : 1.0 / c.d);
    }
    const auto rep = sweep_exact({2, 3}, {2, 3}, Variant::Repaired);
    EXPECT_TRUE(rep.all_passed());
    EXPECT_THROW(sweep_exact({2}, {2}, Variant::ProductCounterfactual), InvalidArgument);
}

TEST(Sweep, s_vectors_enumeration) {
    EXPECT_EQ(s_vectors(3, 2, 100).size(), 9u);
    EXPECT_EQ(s_vectors(8, 4, 100).size(), 100u);
    for (const auto &s : s_vectors(8, 4, 100)) {
        for (auto v : s) {
            EXPECT_LT(v, 8u);
        }
    }
}

TEST(SuccessProbabilityMc, matches_independent_runs) {
    auto p = ProtocolParams::from_terms(4, {3, 0, 0});
    for (auto v : {Variant::SongOriginal, Variant::Repaired}) {
        const std::size_t trials = 300;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < trials; ++i) {
            p.seed = derive_seed(77, i);
            hits += run_variant(v, p).success() ? 1 : 0;
        }
        EXPECT_EQ(success_probability_mc(p, trials, 77, v).estimate, double(hits) / trials);
    }
}
