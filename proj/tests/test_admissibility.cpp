#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace nnsft;

TEST(Sft, BuiltIns) {
    NnSft hs = hard_square();
    EXPECT_EQ(hs.alphabet_size(), 2U);
    EXPECT_TRUE(hs.h_forbidden(1, 1));
    EXPECT_FALSE(hs.h_forbidden(0, 1));
    NnSft cb = checkerboard(5);
    EXPECT_EQ(cb.hforbid().size(), 5U);
    EXPECT_EQ(cb.vforbid().size(), 5U);
    for (Symbol a = 0; a < 5; ++a) EXPECT_TRUE(cb.v_forbidden(a, a));
    EXPECT_TRUE(full_shift(3).hforbid().empty());
}

TEST(Sft, RejectsBadPairs) {
    EXPECT_THROW(NnSft(2, {{0, 2}}, {}), InputError);
    EXPECT_THROW(NnSft(0, {}, {}), InputError);
    NnSft dedup(2, {{1, 1}, {1, 1}}, {});
    EXPECT_EQ(dedup.hforbid().size(), 1U);
}

TEST(Sft, ParseSpec) {
    EXPECT_EQ(parse_spec("alphabet 2\nhforbid 1 1\nvforbid 1 1\n"), hard_square());
    EXPECT_EQ(load_spec("checkerboard:5"), checkerboard(5));
    EXPECT_EQ(load_spec("full:4"), full_shift(4));
    NnSft one = parse_spec("alphabet 1\n");
    EXPECT_EQ(one.alphabet_size(), 1U);
    EXPECT_TRUE(check_ssf(one).fillable);
}

TEST(Sft, ParseErrorsCarryLineNumbers) {
    auto message = [](const char* text) {
        try {
            parse_spec(text);
        } catch (const InputError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("alphabet 2\nfoo 1 1\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("alphabet 2\n\nhforbid 1 2\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("hforbid 0 0\n").find("alphabet"), std::string::npos);
    EXPECT_NE(message("alphabet 2\nalphabet 3\n").find("line 2"), std::string::npos);
    EXPECT_THROW(load_spec("checkerboard:x"), InputError);
    EXPECT_THROW(load_spec("/nonexistent/spec.txt"), InputError);
}

TEST(Sft, SpecRoundTrip) {
    std::mt19937_64 rng(17);
    for (const NnSft& s : {hard_square(), checkerboard(2), checkerboard(7), full_shift(1), full_shift(3)})
        EXPECT_EQ(parse_spec(render_spec(s)), s);
    for (int t = 0; t < 100; ++t) {
        NnSft s = support::random_sft(rng, 6, 0.3);
        EXPECT_EQ(parse_spec(render_spec(s)), s);
    }
}

TEST(Admissibility, ViolationExamples) {
    NnSft hs = hard_square();
    EXPECT_TRUE(violations(Window(Rect::box(2), 0), hs).empty());

    Window w(Rect::box(2), 0);
    w[{0, 0}] = 1;
    w[{1, 0}] = 1;
    auto v = violations(w, hs);
    ASSERT_EQ(v.size(), 1U);
    EXPECT_EQ(v[0], (Violation{{0, 0}, Direction::horizontal}));

    auto v3 = violations(Window(Rect(0, 0, 2, 2), 0), checkerboard(3));
    EXPECT_EQ(v3.size(), 4U);
    EXPECT_EQ(std::count_if(v3.begin(), v3.end(), [](auto& x) { return x.direction == Direction::vertical; }), 2);
}

TEST(Admissibility, RejectsSymbolsOutsideAlphabet) {
    Window w(Rect::box(1), 0);
    w[{1, 1}] = 2;
    EXPECT_THROW(violations(w, hard_square()), InputError);
    EXPECT_THROW(bad_sites(w, hard_square()), InputError);
}

TEST(Admissibility, BadSiteExamples) {
    NnSft hs = hard_square();
    Window w(Rect::box(2), 0);
    w[{0, 0}] = 1;
    w[{0, 1}] = 1;
    auto b = bad_sites(w, hs);
    ASSERT_TRUE(b.evaluable);
    EXPECT_EQ(b.sites, std::vector<Site>{kOrigin});

    auto all = bad_sites(Window(Rect::box(2), 1), hs);
    EXPECT_EQ(all.sites.size(), 16U);
    EXPECT_EQ(*all.evaluable, Rect(-2, -2, 4, 4));

    EXPECT_FALSE(bad_sites(Window(Rect(0, 0, 5, 1), 1), hs).evaluable);
}

TEST(Admissibility, PenaltyExamples) {
    NnSft hs = hard_square();
    Window w(Rect::box(1), 0);
    EXPECT_EQ(penalty_at(w, kOrigin, hs), 0);
    w[kOrigin] = 1;
    EXPECT_EQ(penalty_at(w, kOrigin, hs), 0);
    w[{1, 0}] = 1;
    EXPECT_EQ(penalty_at(w, kOrigin, hs), -1);
    EXPECT_THROW(penalty_at(w, {1, 1}, hs), InputError);
}

TEST(Admissibility, ViolationsAgreeWithBadSites) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 200; ++t) {
        NnSft s = support::random_sft(rng, 4, 0.25);
        Rect dom(-2, -3, 2 + t % 6, 2 + t % 5);
        Window w = support::random_window(rng, dom, s.alphabet_size());
        auto b = bad_sites(w, s);
        std::set<Site> from_violations;
        for (const auto& v : violations(w, s))
            if (b.evaluable->contains(v.site)) from_violations.insert(v.site);
        EXPECT_EQ(std::set<Site>(b.sites.begin(), b.sites.end()), from_violations);
        EXPECT_EQ(b.sites, support::oracle_bad(w, s, *b.evaluable));

        bool zero_penalty = true;
        for (Site u : b.evaluable->sites()) zero_penalty &= penalty_at(w, u, s) == 0;
        bool clean = true;
        for (const auto& v : violations(w, s)) clean &= !b.evaluable->contains(v.site);
        EXPECT_EQ(zero_penalty, clean);
    }
}

TEST(Admissibility, SsfExamples) {
    EXPECT_TRUE(check_ssf(hard_square()).fillable);
    EXPECT_TRUE(check_ssf(checkerboard(5)).fillable);
    for (int k = 2; k <= 4; ++k) EXPECT_FALSE(check_ssf(checkerboard(static_cast<std::size_t>(k))).fillable);
    auto r = check_ssf(checkerboard(4));
    ASSERT_TRUE(r.witness);
    EXPECT_EQ(r.witness->north, 0U);
    EXPECT_EQ(r.witness->south, 1U);
    EXPECT_EQ(r.witness->east, 2U);
    EXPECT_EQ(r.witness->west, 3U);
}

TEST(Admissibility, SsfWitnessBlocksEveryCentre) {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 200; ++t) {
        NnSft s = support::random_sft(rng, 4, 0.3);
        auto r = check_ssf(s);
        if (r.fillable) continue;
        const auto& w = *r.witness;
        for (Symbol c = 0; c < s.alphabet_size(); ++c)
            EXPECT_TRUE(s.h_forbidden(c, w.east) || s.h_forbidden(w.west, c) || s.v_forbidden(c, w.north) ||
                        s.v_forbidden(w.south, c));
    }
}

TEST(Admissibility, SsfMatchesReverseOrderOracle) {
    std::mt19937_64 rng(31);
    int fillable = 0;
    for (int t = 0; t < 400; ++t) {
        NnSft s = support::random_sft(rng, 5, t % 2 ? 0.1 : 0.3);
        bool got = check_ssf(s).fillable;
        EXPECT_EQ(got, support::oracle_ssf(s)) << render_spec(s);
        fillable += got;
    }
    EXPECT_GT(fillable, 20);
    EXPECT_LT(fillable, 380);
}

TEST(Admissibility, SafeSymbols) {
    EXPECT_EQ(find_safe_symbols(hard_square()), std::vector<Symbol>{0});
    for (std::size_t k = 2; k <= 9; ++k) EXPECT_TRUE(find_safe_symbols(checkerboard(k)).empty());
    EXPECT_EQ(find_safe_symbols(full_shift(3)), (std::vector<Symbol>{0, 1, 2}));
}

TEST(Admissibility, SafeSymbolImpliesSsf) {
    std::mt19937_64 rng(37);
    int with_safe = 0;
    for (int t = 0; t < 200; ++t) {
        NnSft s = support::random_sft(rng, 4, 0.2);
        if (find_safe_symbols(s).empty()) continue;
        ++with_safe;
        EXPECT_TRUE(check_ssf(s).fillable) << render_spec(s);
    }
    EXPECT_GT(with_safe, 10);
}

TEST(Admissibility, LocalImpliesGlobal) {
    EXPECT_EQ(assert_local_implies_global(hard_square()), GlobalAdmissibility::certified);
    EXPECT_EQ(assert_local_implies_global(checkerboard(4)), GlobalAdmissibility::unknown);
    EXPECT_EQ(assert_local_implies_global(checkerboard(5)), GlobalAdmissibility::certified);
}

TEST(Admissibility, SsfShiftEnforcesPrecondition) {
    EXPECT_THROW(SsfShift{checkerboard(4)}, InputError);
    EXPECT_FALSE(SsfShift::certify(checkerboard(3)).has_value());
    auto ok = SsfShift::certify(checkerboard(6));
    ASSERT_TRUE(ok.has_value());
    EXPECT_EQ(ok->sft(), checkerboard(6));
}

TEST(Admissibility, CompatibilityTableMatchesPairs) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 50; ++t) {
        NnSft s = support::random_sft(rng, 5, 0.3);
        CompatibilityTable table(s);
        const auto q = static_cast<Symbol>(s.alphabet_size());
        for (Symbol a = 0; a < q; ++a)
            for (Symbol c = 0; c < q; ++c) {
                EXPECT_EQ(table.below(a).contains(c), !s.v_forbidden(c, a));
                EXPECT_EQ(table.above(a).contains(c), !s.v_forbidden(a, c));
                EXPECT_EQ(table.left_of(a).contains(c), !s.h_forbidden(c, a));
                EXPECT_EQ(table.right_of(a).contains(c), !s.h_forbidden(a, c));
            }
    }
}

TEST(Admissibility, SymbolSetOperations) {
    SymbolSet s(130);
    EXPECT_TRUE(s.empty());
    s.insert(3);
    s.insert(129);
    s.insert(64);
    EXPECT_EQ(s.count(), 3U);
    EXPECT_EQ(*s.first(), 3U);
    EXPECT_EQ(s.nth(1), 64U);
    EXPECT_EQ(s.nth(2), 129U);
    SymbolSet full(130, true);
    EXPECT_EQ(full.count(), 130U);
    EXPECT_EQ((full & s).count(), 3U);
    s.erase(3);
    EXPECT_FALSE(s.contains(3));
    EXPECT_TRUE(s.intersects(full));
}
