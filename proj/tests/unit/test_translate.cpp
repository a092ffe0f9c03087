#include "doctest.h"
#include "oracles.hpp"
#include "pllk/checkers.hpp"
#include "pllk/translate.hpp"

using namespace pllk;
using pllk::testing::corpus;

TEST_CASE("PLL to PLLinf and back") {
    for (const char* f : {"zero.pll", "one.pll", "abs.pll", "der.pll", "pll_fpfp.pll", "pll_fpqb_ctx.pll"}) {
        CAPTURE(f);
        Deriv d = deriv_of(corpus(f));
        Spec s = pll_to_pllinf(d);
        CHECK(s.conclusion() == d->concl);
        CHECK(!validate(s, System::PLLinf));
        CHECK(check_weak_progressing(s).verdict == Verdict::Holds);
        CHECK(check_regularity(s).regular.verdict == Verdict::Holds);
        CHECK(equivalent(finitize(s), d));
    }
}

TEST_CASE("finitize rejects coderivations that are not weakly progressing") {
    CHECK_THROWS_AS(finitize(corpus("dlightning.pll")), NotWeaklyProgressing);
    Deriv d = finitize(corpus("stream01.pll"));
    CHECK(!validate(d, System::PLL));
    CHECK(d->concl == corpus("stream01.pll").conclusion());
}

TEST_CASE("PLL to MELL replaces fp and qb") {
    Deriv d = deriv_of(corpus("pll_fpqb.pll"));
    Deriv m = pll_to_mell(d);
    CHECK(m->concl == d->concl);
    CHECK(!validate(m, System::MELL));
    std::string t = print_deriv(m);
    CHECK(t.find("(fp ") == std::string::npos);
    CHECK(t.find("(qb ") == std::string::npos);
}

TEST_CASE("the square for fp-qb ends at the translated reduct") {
    Deriv d = deriv_of(corpus("pll_fpqb.pll"));
    auto r = redex_at(d, "");
    REQUIRE(r);
    CHECK(r->kind == "fp-qb");
    MellTrace t = simulate_square(d, *r);
    REQUIRE(!t.steps.empty());
    CHECK(equivalent(t.steps.back().second, pll_to_mell(apply_step(d, *r))));
    MellMeasure prev = mell_measure(t.start);
    for (const auto& st : t.steps) {
        MellMeasure m = mell_measure(st.second);
        CHECK(m < prev);
        prev = m;
    }
}
