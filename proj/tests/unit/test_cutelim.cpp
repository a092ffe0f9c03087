#include "doctest.h"
#include "oracles.hpp"
#include "pllk/checkers.hpp"
#include "pllk/cutelim.hpp"
#include "random_deriv.hpp"

using namespace pllk;
using pllk::testing::corpus;

TEST_CASE("multiplicative and unit steps") {
    // ax cut against a derivation returns the derivation
    Deriv d = deriv_of(parse_spec("(cut [X (~ X)] X (ax X) (ax X))"));
    auto rs = redexes(d);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].kind == "ax");
    CHECK(equivalent(apply_step(d, rs[0]), make_ax(parse_formula("X"))));

    Deriv ob = deriv_of(parse_spec("(cut [X (~ X)] 1 (one) (bot [X (~ X) bot] 2 (ax X)))"));
    auto r = redex_at(ob, "");
    REQUIRE(r);
    CHECK(r->kind == "one-bot");
    CHECK(equivalent(apply_step(ob, *r), make_ax(parse_formula("X"))));
}

TEST_CASE("stale redexes are rejected") {
    Deriv d = deriv_of(parse_spec("(cut [X (~ X)] X (ax X) (ax X))"));
    CHECK_THROWS_AS(apply_step(d, Redex{"", "tens-par"}), StaleRedex);
    CHECK(!redex_at(d, "1"));
}

TEST_CASE("normalization of the exponential PLL redexes") {
    for (const char* f : {"pll_fpfp.pll", "pll_fpfp_ctx.pll", "pll_fpqb.pll", "pll_fpqb_ctx.pll", "pll_fpqw.pll"}) {
        CAPTURE(f);
        Deriv d = deriv_of(corpus(f));
        Deriv nf = normalize_finite(d);
        CHECK(cut_free(nf));
        CHECK(nf->concl == d->concl);
        CHECK(!validate(nf, System::PLL));
    }
    // 0 read once is 0's body
    Deriv nf = normalize_finite(deriv_of(corpus("pll_fpqb.pll")));
    CHECK(print_deriv(nf).find("(ax (~ X))") != std::string::npos);
}

TEST_CASE("the fuel limit raises with the best approximation") {
    Deriv d = deriv_of(corpus("pll_fpfp_ctx.pll"));
    CHECK_THROWS_AS(normalize_finite(d, 0), FuelExhausted);
    try {
        reduce_stream(corpus("dlightning.pll"), 2, 4);
        FAIL("expected exhaustion");
    } catch (const FuelExhausted& e) {
        REQUIRE(e.best);
        CHECK(e.best->kind == Kind::Hyp);
    }
}

TEST_CASE("trace: height-by-height steps decrease the measure") {
    Trace t = run_trace(corpus("cut_der.pll"), 10);
    REQUIRE(t.steps.size() >= 2);
    CHECK(t.steps[0].r.kind == "cp-qb");
    CHECK(t.steps[0].r.at.empty());
    Measure prev = measure(t.start);
    for (const auto& st : t.steps) {
        CHECK(!validate(st.after, System::oPLLinf));
        if (step_class(st.r.kind) != StepClass::Exponential || st.r.kind.rfind("cp-", 0) == 0)
            CHECK(measure_decreases(st.r.kind, prev, st.m));
        prev = st.m;
    }
    CHECK(trace_line(1, t.steps[0]).rfind("step 1: cp-qb @ e", 0) == 0);
}

TEST_CASE("stream reduction: productivity and approximation chain") {
    Spec s = corpus("cut_abs.pll");
    Deriv prev;
    for (std::size_t h : {1, 2, 4}) {
        StreamResult r = reduce_stream(s, h);
        CHECK(cut_free(r.d));
        CHECK((!has_hyp(r.d) || hypfree_bar_height(r.d) > h));
        if (prev) CHECK(approx_leq(prev, r.d));
        prev = r.d;
    }
}

TEST_CASE("cf prunes the cuts nearest the root") {
    Deriv d = deriv_of(parse_spec("(tens [(~ X) (tens X 1)] 1 (ax X) (cut [1] 1 (one) (ax 1)))"));
    Deriv c = cf(d);
    CHECK(cut_free(c));
    CHECK(subderivation_at(c, "2")->kind == Kind::Hyp);
}

TEST_CASE("confluence oracle agrees with the deterministic strategy") {
    testing::RandomDerivs gen(7, {testing::Family::PLL, 10, 2, false, 0.5});
    for (int i = 0; i < 100; ++i) {
        Deriv d = gen.next();
        auto all = testing::all_orders(d);
        REQUIRE(all.modulo_weakening.size() == 1);
        CHECK(all.modulo_weakening[0] == testing::loose_key(normalize_finite(d)));
    }
}

TEST_CASE("two step orders that differ only by an exchange") {
    Deriv d = deriv_of(parse_spec(R"((tens [(~ X) X (~ X) (tens bot X)] 3
  (cut [(~ X) bot X] X (bot [X (~ X) bot] (ax X)) (ax (~ X)))
  (cut [(~ X) X] X (ax X) (ex [X (~ X)] 0 (ax (~ X))))))"));
    auto all = testing::all_orders(d);
    CHECK(all.normal_forms.size() == 2);
    CHECK(all.modulo_exchange.size() == 1);
    Deriv e = testing::erase_exchanges(deriv_of(parse_spec("(ex [X (~ X)] 0 (ax (~ X)))")));
    CHECK(e->kind == Kind::Ax);
    CHECK(e->concl == Sequent{parse_formula("X"), parse_formula("(~ X)")});
}

TEST_CASE("adjacent weakenings in either order sort to the same chain") {
    Deriv a = deriv_of(parse_spec(R"((qw [(~ X) X (? X) (? (? (~ X)))] 2
  (qw [(~ X) X (? (? (~ X)))] 2 (ax (~ X)))))"));
    Deriv b = deriv_of(parse_spec(R"((qw [(~ X) X (? X) (? (? (~ X)))] 3
  (qw [(~ X) X (? X)] 2 (ax (~ X)))))"));
    CHECK(print_deriv(a) != print_deriv(b));
    CHECK(testing::loose_key(a) == testing::loose_key(b));
    CHECK(!validate(testing::sort_weakenings(a), System::PLL));
}

TEST_CASE("limit reconstruction of a single-box cut") {
    Spec lim = limit_spec(corpus("cut_copy.pll"));
    CHECK(!validate(lim, System::PLLinf));
    CHECK(check_regularity(lim).regular.verdict == Verdict::Holds);
    for (std::size_t k = 1; k < 5; ++k) CHECK(approx_leq(reduce_stream(corpus("cut_copy.pll"), k).d, lim));
}
