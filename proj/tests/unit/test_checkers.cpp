#include "doctest.h"
#include "oracles.hpp"
#include "pllk/checkers.hpp"

using namespace pllk;
using pllk::testing::corpus;

namespace {
bool holds(const CriterionReport& r) { return r.verdict == Verdict::Holds; }
bool fails(const CriterionReport& r) { return r.verdict == Verdict::Fails; }
}  // namespace

TEST_CASE("criterion verdicts on named coderivations") {
    Spec dl = corpus("dlightning.pll"), dq = corpus("dquestion.pll"), prog = corpus("prog.pll");
    CHECK(fails(check_weak_progressing(dl)));
    CHECK(fails(check_finitely_expandable(dl)));
    CHECK(holds(check_regularity(dl).weakly_regular));
    CHECK(fails(check_weak_progressing(dq)));
    CHECK(fails(check_finitely_expandable(dq)));
    CHECK(holds(check_weak_progressing(prog)));
    CHECK(fails(check_progressing(prog)));

    Spec s = corpus("stream01.pll");
    CHECK(holds(check_progressing(s)));
    CHECK(holds(check_finitely_expandable(s)));
    CHECK(holds(check_regularity(s).regular));
    auto prime = check_regularity(corpus("stream_prime.pll"));
    CHECK(fails(prime.regular));
    CHECK(holds(prime.weakly_regular));
    CHECK(fails(check_regularity(corpus("nonfinite.pll")).weakly_regular));
    CHECK(check_regularity(corpus("stream_collatz.pll")).regular.verdict == Verdict::Unknown);
}

TEST_CASE("failure witnesses replay") {
    Spec dl = corpus("dlightning.pll");
    auto wp = check_weak_progressing(dl);
    REQUIRE(fails(wp));
    CHECK(!wp.cycle.empty());
    CHECK(replay_witness(dl, wp, Criterion::WeakProgressing));
    Spec prog = corpus("prog.pll");
    auto p = check_progressing(prog);
    REQUIRE(fails(p));
    CHECK(replay_witness(prog, p, Criterion::Progressing));
    auto fe = check_finitely_expandable(prog);
    REQUIRE(fails(fe));
    CHECK(replay_witness(prog, fe, Criterion::FinitelyExpandable));
}

TEST_CASE("finite derivations satisfy every criterion") {
    for (const char* f : {"zero.pll", "one.pll", "pll_fpfp.pll", "abs.pll"}) {
        CAPTURE(f);
        Spec s = corpus(f);
        CHECK(holds(check_weak_progressing(s)));
        CHECK(holds(check_progressing(s)));
        CHECK(holds(check_finitely_expandable(s)));
        CHECK(holds(check_regularity(s).regular));
    }
}

TEST_CASE("bounded forms agree with the full checks on unfoldings") {
    Spec s = corpus("stream01.pll");
    for (std::size_t k = 2; k < 8; ++k) {
        Deriv d = unfold(s, k);
        CHECK(bounded_weak_progressing(d, 8));  // calls are up to 6 high
        CHECK(bounded_progressing(d, 8));
        CHECK(bounded_finitely_expandable(d, 2));
    }
    Deriv dl = unfold(corpus("dlightning.pll"), 10);
    CHECK(!bounded_weak_progressing(dl, 4));
}
