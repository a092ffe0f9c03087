#include "doctest.h"
#include "oracles.hpp"
#include "pllk/sexpr.hpp"
#include "pllk/spec.hpp"

using namespace pllk;
using pllk::testing::corpus;
using pllk::testing::corpus_files;

TEST_CASE("formula print/parse roundtrip and involutive duality") {
    for (const char* t : {"X", "(~ X)", "1", "bot", "(tens X (~ X))", "(! (par (? (tens X (~ X))) (par (~ X) X)))",
                          "(? (! (tens 1 bot)))"}) {
        Formula f = parse_formula(t);
        CHECK(print_formula(f) == t);
        CHECK(dual(dual(f)) == f);
        CHECK(dual(f) != f);
    }
    CHECK(dual(parse_formula("(! X)")) == parse_formula("(? (~ X))"));
    CHECK(dual(parse_formula("(tens X 1)")) == parse_formula("(par (~ X) bot)"));
}

TEST_CASE("syntax errors carry a byte offset") {
    try {
        parse_spec("(ax X");
        FAIL("no error");
    } catch (const SyntaxError& e) {
        CHECK(e.offset == 5);
    }
    CHECK_THROWS_AS(parse_formula("(tens X)"), std::exception);
    CHECK_THROWS_AS(parse_spec("(frob [X])"), std::exception);
}

TEST_CASE("every corpus file prints to a fixpoint after one pass") {
    for (const auto& f : corpus_files()) {
        CAPTURE(f);
        std::string once = print_spec(corpus(f));
        CHECK(print_spec(parse_spec(once)) == once);
    }
}

TEST_CASE("every corpus file validates in one of the systems") {
    for (const auto& f : corpus_files()) {
        CAPTURE(f);
        Spec s = corpus(f);
        bool ok = false;
        for (System sys : {System::PLL, System::PLLinf, System::oPLLinf, System::MELLinf}) ok = ok || !validate(s, sys);
        CHECK(ok);
    }
}

TEST_CASE("finite derivations: validity by system") {
    Deriv zero = deriv_of(corpus("zero.pll"));
    CHECK(!validate(zero, System::PLL));
    CHECK(!validate(zero, System::MELL));
    Deriv fpfp = deriv_of(corpus("pll_fpfp.pll"));
    CHECK(!validate(fpfp, System::PLL));
    CHECK(validate(fpfp, System::MELL));  // fp is not a MELL rule
    Deriv h = make_hyp({parse_formula("X")});
    CHECK(validate(h, System::PLL));
    CHECK(!validate(h, System::oPLL));
}

TEST_CASE("a broken occurrence is rejected") {
    // tens whose conclusion lies about its principal formula
    const char* bad = "(tens [(tens X (~ X)) (~ X) (~ X)] 0 (ax X) (ax X))";
    bool rejected = false;
    try {
        rejected = validate(deriv_of(parse_spec(bad)), System::PLL).has_value();
    } catch (const std::exception&) {
        rejected = true;
    }
    CHECK(rejected);
}

TEST_CASE("unfold truncates to hyp and is an approximation") {
    Spec s = corpus("stream01.pll");
    Deriv d0 = unfold(s, 0);
    CHECK(d0->kind == Kind::Hyp);
    for (std::size_t k = 1; k < 6; ++k) {
        Deriv a = unfold(s, k), b = unfold(s, k + 1);
        CHECK(levels(a) == k + 1);
        CHECK(approx_leq(a, b));
        CHECK(approx_leq(a, s));
        CHECK(!validate(a, System::oPLLinf));
    }
}

TEST_CASE("selectors") {
    Selector p = Selector::periodic({1}, {0, 1});
    CHECK(p.at({}, 0) == 1);
    CHECK(p.at({}, 1) == 0);
    CHECK(p.at({}, 4) == 1);
    CHECK(p.shifted(1) == Selector::periodic({}, {0, 1}));
    CHECK(p.periodicity() == Periodicity::Yes);
    for (const auto* o : all_oracles()) CHECK(!o->name.empty());
}
