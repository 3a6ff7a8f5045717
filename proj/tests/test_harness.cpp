#include <gtest/gtest.h>

#include "support.hpp"

using namespace nnsft;

TEST(Harness, SampleAdmissible) {
    for (const NnSft& s : {hard_square(), checkerboard(5), full_shift(2)}) {
        SsfShift ssf(s);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Window w = sample_admissible(ssf, 6, seed);
            EXPECT_TRUE(violations(w, s).empty());
            EXPECT_EQ(w, sample_admissible(ssf, 6, seed));
        }
    }
}

TEST(Harness, Corrupt) {
    SsfShift ssf(hard_square());
    Window w = sample_admissible(ssf, 10, 1);
    EXPECT_EQ(corrupt(w, 2, 0.0, 5), w);
    EXPECT_EQ(corrupt(w, 2, 0.4, 5), corrupt(w, 2, 0.4, 5));
    EXPECT_THROW(corrupt(w, 2, 1.5, 5), InputError);
    Window all = corrupt(w, 2, 1.0, 9);
    EXPECT_EQ(count_bad(all, ssf.sft(), Rect::box(9)), support::oracle_bad(all, ssf.sft(), Rect::box(9)).size());
}

TEST(Harness, AverageBoundExamples) {
    NnSft hs = hard_square();
    SsfShift ssf(hs);
    PerturbedPotential g = make_perturbed(hs, sample_perturbation(1.0 / 384.0, 8, 2, 7));
    auto adm = check_average_bounds(g, sample_admissible(ssf, 10, 3), Rect::box(9));
    EXPECT_EQ(adm.branch, AverageBranch::admissible);
    EXPECT_TRUE(adm.pass());
    EXPECT_GE(adm.average, -1.0 / 64.0);

    auto heavy = check_average_bounds(unperturbed(hs), Window(Rect::box(10), 1), Rect::box(9));
    EXPECT_EQ(heavy.branch, AverageBranch::heavy);
    EXPECT_DOUBLE_EQ(heavy.average, -1.0);
    EXPECT_DOUBLE_EQ(heavy.bad_fraction, 1.0);
    EXPECT_TRUE(heavy.pass());

    AverageCheck fake{AverageBranch::heavy, 0.55, -0.54, 0.005};
    EXPECT_FALSE(fake.pass());
    fake.average = -0.546;
    EXPECT_TRUE(fake.pass());
}

TEST(Harness, RequiredShellImprovement) {
    EXPECT_DOUBLE_EQ(required_shell_improvement(0, 1.0 / 64.0), -1.75);
    EXPECT_DOUBLE_EQ(required_shell_improvement(4, 1.0 / 64.0), 0.25);
}

TEST(Harness, TailConstants) {
    EXPECT_DOUBLE_EQ(tail_constant(16), 272.0);
    EXPECT_DOUBLE_EQ(tail_constant(128), 2064.0);
    EXPECT_DOUBLE_EQ(tail_constant_undercounted(128), 2050.0);
    for (int n = 1; n < 40; ++n) {
        const auto ring = Rect::box(n + 1).area() - Rect::box(n).area();
        EXPECT_EQ(static_cast<double>(ring), tail_constant(n) / 2.0);
    }
}

TEST(Harness, TotalBoundNormalisedForm) {
    const double eps = 1.0 / 64.0;
    for (auto [n, bf] : {std::pair{16, 0.2}, std::pair{128, 0.2}}) {
        TotalCheck t;
        t.n = n;
        t.eps = eps;
        t.bad_total = static_cast<std::size_t>(bf * t.area());
        t.total_bound = 112.0 * eps * (n + 1) + tail_constant(n) + (-1.0 + 32.0 * eps) * static_cast<double>(t.bad_total);
        const double stated = t.bad_fraction() / 2.0 - (1.75 * (n + 1) + tail_constant(n)) / t.area();
        EXPECT_NEAR(t.required_improvement(), stated, 1e-12);
        EXPECT_EQ(t.vacuous(), n == 16);
    }
}

TEST(Harness, IncrementalShellGapsMatchFullSums) {
    std::mt19937_64 rng(83);
    for (int t = 0; t < 40; ++t) {
        NnSft s = t % 3 == 0 ? hard_square() : support::random_ssf_sft(rng, 5);
        SsfShift ssf(s);
        const int n = 3 + t % 9;
        Window x = support::corrupted_sample(ssf, n + 2, 0.1 + 0.2 * (t % 4), rng());
        PerturbedPotential g = make_perturbed(s, sample_perturbation(1.0 / 384.0, 40, s.alphabet_size(), rng()));
        FillRule rule = t % 2 ? FillRule::seeded(rng()) : FillRule::smallest();
        auto rr = repair(x, ssf, n, rule);
        auto fast = shell_gaps_incremental(g, x, rr, n);
        auto full = check_shell_gaps(g, x, rr.shells, materialize_intermediates(x, rr), n);
        ASSERT_EQ(fast.size(), full.size());
        for (std::size_t i = 0; i < fast.size(); ++i) {
            EXPECT_NEAR(fast[i].observed, full[i].observed, 1e-9);
            EXPECT_EQ(fast[i].bad, full[i].bad);
            EXPECT_EQ(fast[i].prefixed, full[i].prefixed);
            EXPECT_DOUBLE_EQ(fast[i].required, full[i].required);
        }
    }
}

TEST(Harness, ZeroPerturbationGapIsBadCountDifference) {
    SsfShift ssf(checkerboard(6));
    PerturbedPotential g = unperturbed(ssf.sft());
    const int n = 10;
    Window x = support::corrupted_sample(ssf, n + 2, 0.3, 3);
    FillRule rule = FillRule::smallest();
    auto rr = repair(x, ssf, n, rule);
    auto steps = materialize_intermediates(x, rr);
    auto gaps = shell_gaps_incremental(g, x, rr, n);
    for (int i = 0; i <= n; ++i) {
        const Window& before = i == 0 ? x : steps[static_cast<std::size_t>(i) - 1];
        const auto drop = static_cast<double>(count_bad(before, ssf.sft(), Rect::box(n))) -
                          static_cast<double>(count_bad(steps[static_cast<std::size_t>(i)], ssf.sft(), Rect::box(n)));
        EXPECT_DOUBLE_EQ(gaps[static_cast<std::size_t>(i)].observed, drop);
        EXPECT_GE(drop, 0.0);
        EXPECT_GE(gaps[static_cast<std::size_t>(i)].residual_margin(), 0.0);
    }
    auto total = check_total(g, x, rr.repaired, rr.shells, n);
    EXPECT_DOUBLE_EQ(-total.total_gap, static_cast<double>(rr.total_bad()));
    EXPECT_TRUE(total.pass());
}

TEST(Harness, ConfigValidation) {
    TrialConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.cap = 1.0 / 100.0;
    EXPECT_THROW(cfg.validate(), InputError);
    cfg.allow_out_of_hypothesis = true;
    EXPECT_NO_THROW(cfg.validate());
    cfg.corrupt_rate = -0.1;
    EXPECT_THROW(cfg.validate(), InputError);
}

TEST(Harness, AdmissibleRunsOnlyUseAdmissibleBranch) {
    TrialConfig cfg;
    cfg.size = 8;
    cfg.trials = 10;
    cfg.corrupt_rate = 0.0;
    for (const auto& r : run_experiment(cfg)) {
        EXPECT_EQ(r.bad_total, 0U);
        EXPECT_EQ(r.averages_original.branch, AverageBranch::admissible);
        EXPECT_TRUE(r.all_pass());
    }
}

TEST(Harness, ReportsAreConsistent) {
    TrialConfig cfg;
    cfg.size = 12;
    cfg.trials = 20;
    cfg.seed = 5;
    for (const auto& r : run_experiment(cfg)) {
        EXPECT_TRUE(r.repair_pass());
        EXPECT_TRUE(r.averages_pass());
        EXPECT_TRUE(r.total.pass());
        EXPECT_EQ(r.per_shell.size(), 13U);
        std::size_t sum = 0;
        for (const auto& s : r.per_shell) sum += s.bad;
        EXPECT_EQ(sum, r.bad_total);
        EXPECT_LT(r.certified_gap, 1.0 / 64.0);
        EXPECT_GE(r.min_residual_margin(), 0.0);
    }
}

TEST(Harness, ExperimentIndependentOfJobs) {
    TrialConfig cfg;
    cfg.sft = checkerboard(5);
    cfg.size = 10;
    cfg.trials = 17;
    cfg.seed = 99;
    cfg.random_rule = true;
    const std::string one = render_csv(run_experiment(cfg));
    cfg.jobs = 4;
    EXPECT_EQ(render_csv(run_experiment(cfg)), one);
}

TEST(Harness, CsvShape) {
    TrialConfig cfg;
    cfg.size = 6;
    cfg.trials = 3;
    auto reports = run_experiment(cfg);
    std::string csv = render_csv(reports);
    auto rows = text::lines(csv);
    ASSERT_GE(rows.size(), 5U);
    EXPECT_EQ(rows[0], kCsvHeader);
    auto count_commas = [](std::string_view s) { return std::count(s.begin(), s.end(), ','); };
    for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(count_commas(rows[k]), count_commas(rows[0]));
    EXPECT_EQ(rows[4].substr(0, 11), "# summary: ");
}
