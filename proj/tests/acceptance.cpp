// Acceptance run: one PASS/FAIL line per criterion, with wall time against
// its budget. Exit status is non-zero when any line fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pllk/checkers.hpp"
#include "pllk/cutelim.hpp"
#include "pllk/relsem.hpp"
#include "pllk/translate.hpp"
#include "random_deriv.hpp"

using namespace pllk;
using pllk::testing::corpus;
using pllk::testing::corpus_files;

namespace {

// Pinned sizes and budgets.
constexpr std::size_t kMeasureDerivs = 10000;  // split evenly over the two families
constexpr std::size_t kMeasureNodes = 12;
constexpr std::size_t kConfluenceDerivs = 4000;
constexpr std::size_t kConfluenceNodes = 10;
constexpr std::size_t kInvarianceDetermined = 1000;  // derivations with a definite answer
constexpr std::size_t kInvarianceBudget = 200'000;   // elements per evaluation
constexpr std::size_t kSemLevel = 12, kSemCheckLevel = 20, kSemDepth = 30, kSemWidth = 4;
constexpr std::size_t kNonemptyLevel = 8, kNonemptyDepth = 8;
constexpr std::size_t kWindow = 16, kExpandLimit = 8;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Failures {
    std::size_t count = 0;
    std::string first;
    void add(const std::string& what) {
        if (count++ == 0) first = what;
    }
    bool none() const { return count == 0; }
    std::string text() const { return std::to_string(count) + " failures, first: " + first; }
};

bool has_cut(const Spec& s) {
    for (const auto& n : s.nodes)
        if (n.tag == SpecNode::Tag::Rule && n.rule.kind == Kind::Cut) return true;
    return false;
}
bool pll_family(const Spec& s) { return !validate(s, System::oPLLinf) || !validate(s, System::oPLL); }
bool holds(const CriterionReport& r) { return r.verdict == Verdict::Holds; }

Web web_for(const Deriv& d, std::size_t k) { return Web::uniform(variables(d), k); }

// ---------------------------------------------------------------------------

Outcome criterion_matrix() {
    struct Row {
        const char* file;
        const char* crit;
        Verdict want;
    };
    const Row rows[] = {
        {"dlightning.pll", "wp", Verdict::Fails},   {"dlightning.pll", "fe", Verdict::Fails},
        {"dlightning.pll", "wreg", Verdict::Holds}, {"dquestion.pll", "wp", Verdict::Fails},
        {"dquestion.pll", "fe", Verdict::Fails},    {"prog.pll", "wp", Verdict::Holds},
        {"prog.pll", "p", Verdict::Fails},          {"stream01.pll", "p", Verdict::Holds},
        {"stream01.pll", "fe", Verdict::Holds},     {"stream01.pll", "reg", Verdict::Holds},
        {"stream_prime.pll", "reg", Verdict::Fails}, {"stream_prime.pll", "wreg", Verdict::Holds},
        {"nonfinite.pll", "wreg", Verdict::Fails},
    };
    Failures f;
    std::size_t replayed = 0;
    for (const auto& row : rows) {
        Spec s = corpus(row.file);
        std::string c = row.crit;
        CriterionReport r;
        if (c == "wp") r = check_weak_progressing(s);
        if (c == "p") r = check_progressing(s);
        if (c == "fe") r = check_finitely_expandable(s);
        if (c == "reg") r = check_regularity(s).regular;
        if (c == "wreg") r = check_regularity(s).weakly_regular;
        if (r.verdict != row.want) f.add(std::string(row.file) + " " + c + ": " + verdict_text(r));
        // failing branch criteria come with a lasso that must replay
        if (r.verdict == Verdict::Fails && (c == "wp" || c == "p" || c == "fe")) {
            Criterion k = c == "wp" ? Criterion::WeakProgressing : c == "p" ? Criterion::Progressing : Criterion::FinitelyExpandable;
            if (!replay_witness(s, r, k)) f.add(std::string(row.file) + " " + c + ": witness does not replay");
            ++replayed;
        }
    }
    if (!f.none()) return {false, f.text()};
    return {true, std::to_string(std::size(rows)) + " verdicts match, " + std::to_string(replayed) + " failure witnesses replay"};
}

// Every step along the normalization of d, plus every redex of d itself.
template <class F>
void each_step(const Deriv& d, F&& fn) {
    for (const auto& r : redexes(d)) fn(d, r, apply_step(d, r));
    Deriv cur = d;
    for (std::size_t i = 0; i < 200; ++i) {
        auto st = hbh_step(cur);
        if (!st) break;
        fn(cur, st->r, st->d);
        cur = st->d;
    }
}

Outcome criterion_measure() {
    Failures f;
    std::map<std::string, std::size_t> kinds;
    std::size_t steps = 0, exempt = 0;
    for (auto fam : {testing::Family::PLL, testing::Family::PLLinf}) {
        testing::RandomDerivs gen(fam == testing::Family::PLL ? 11 : 12, {fam, kMeasureNodes, 2, false});
        for (std::size_t i = 0; i < kMeasureDerivs / 2; ++i) {
            Deriv d = gen.next();
            if (size(d) > kMeasureNodes) f.add("generator exceeded the node bound");
            each_step(d, [&](const Deriv& before, const Redex& r, const Deriv& after) {
                ++steps;
                ++kinds[r.kind];
                if (r.kind == "fp-qb") {
                    ++exempt;
                    return;
                }
                Measure a = measure(before), b = measure(after);
                if (!measure_decreases(r.kind, a, b))
                    f.add(r.kind + " @ " + print_address(r.at) + ": " + print_measure(a) + " -> " + print_measure(b) + " in " + print_deriv(before));
            });
        }
    }
    if (!f.none()) return {false, f.text()};
    return {true, std::to_string(kMeasureDerivs) + " derivations, " + std::to_string(steps) + " steps over " + std::to_string(kinds.size()) +
                      " step kinds, 0 violations (" + std::to_string(exempt) + " fp-qb steps exempt)"};
}

Outcome criterion_confluence() {
    Failures f;
    std::size_t states = 0, multi_redex = 0, syntactic = 0, exchange = 0;
    for (auto fam : {testing::Family::PLL, testing::Family::PLLinf}) {
        testing::RandomDerivs gen(fam == testing::Family::PLL ? 21 : 22, {fam, kConfluenceNodes, 2, false, 0.5});
        for (std::size_t i = 0; i < kConfluenceDerivs / 2; ++i) {
            Deriv d = gen.next();
            auto all = testing::all_orders(d);
            states += all.visited;
            if (all.branching > 0) ++multi_redex;
            // normal forms are compared as sequents without order: exchanges
            // erased, adjacent weakenings sorted
            if (all.modulo_weakening.size() != 1)
                f.add(std::to_string(all.modulo_weakening.size()) + " normal forms for " + print_deriv(d));
            else if (all.modulo_weakening[0] != testing::loose_key(normalize_finite(d)))
                f.add("strategy disagrees with the exhaustive search on " + print_deriv(d));
            syntactic += all.normal_forms.size() > 1;
            exchange += all.modulo_exchange.size() > 1;
        }
    }
    if (!f.none()) return {false, f.text()};
    return {true, std::to_string(kConfluenceDerivs) + " derivations (" + std::to_string(multi_redex) +
                      " reach a choice between redexes), one normal form each over " + std::to_string(states) +
                      " explored states; " + std::to_string(syntactic) + " have several syntactic normal forms, " +
                      std::to_string(exchange) + " still after erasing ex, none after also sorting adjacent qw"};
}

std::vector<std::string> productive_specs() {
    std::vector<std::string> out;
    for (const auto& f : corpus_files()) {
        Spec s = corpus(f);
        if (has_cut(s) && pll_family(s) && holds(check_weak_progressing(s))) out.push_back(f);
    }
    return out;
}

Outcome criterion_productivity() {
    Failures f;
    std::size_t runs = 0;
    for (const auto& file : productive_specs()) {
        Spec s = corpus(file);
        Deriv prev;
        for (std::size_t h : {1, 2, 4, 8}) {
            try {
                StreamResult r = reduce_stream(s, h);
                ++runs;
                if (has_hyp(r.d) && hypfree_bar_height(r.d) <= h) f.add(file + " h=" + std::to_string(h) + ": prefix too short");
                if (!cut_free(r.d)) f.add(file + " h=" + std::to_string(h) + ": output has cuts");
                if (prev && !approx_leq(prev, r.d)) f.add(file + " h=" + std::to_string(h) + ": not above the previous output");
                prev = r.d;
            } catch (const FuelExhausted& e) {
                f.add(file + " h=" + std::to_string(h) + ": " + e.what());
            }
        }
    }
    bool exhausted = false;
    try {
        reduce_stream(corpus("dlightning.pll"), 2);
    } catch (const FuelExhausted& e) {
        exhausted = e.best && e.best->kind == Kind::Hyp;
    }
    if (!exhausted) f.add("dlightning: expected fuel exhaustion with best = hyp");
    if (!f.none()) return {false, f.text()};
    return {true, std::to_string(productive_specs().size()) + " specs x h in {1,2,4,8}: " + std::to_string(runs) +
                      " productive runs forming chains; dlightning exhausts with best = hyp"};
}

Outcome criterion_preservation() {
    Failures f;
    std::size_t trace_steps = 0, rechecks = 0, limits = 0, skipped = 0;
    for (const auto& file : corpus_files()) {
        Spec s = corpus(file);
        if (!has_cut(s) || !pll_family(s)) continue;
        Trace t = is_finite_tree(s) ? run_trace(deriv_of(s), 60) : run_trace(s, 60);
        for (const auto& st : t.steps) {
            ++trace_steps;
            if (auto v = validate(st.after, System::oPLLinf); v && validate(st.after, System::oPLL))
                f.add(file + " after " + st.r.kind + ": " + v->clause + " at " + print_address(v->at));
        }
    }
    for (const auto& file : productive_specs()) {
        Spec s = corpus(file);
        bool p = holds(check_progressing(s));
        for (std::size_t h : {2, 4, 8}) {
            Deriv d = reduce_stream(s, h).d;
            ++rechecks;
            if (!bounded_weak_progressing(d, kWindow)) f.add(file + ": bounded wp fails at h=" + std::to_string(h));
            if (p && !bounded_progressing(d, kWindow)) f.add(file + ": bounded p fails at h=" + std::to_string(h));
            if (!bounded_finitely_expandable(d, kExpandLimit)) f.add(file + ": bounded fe fails at h=" + std::to_string(h));
        }
        if (is_finite_tree(s)) continue;
        try {
            Spec lim = limit_spec(s);
            ++limits;
            RegularityReport in = check_regularity(s), out = check_regularity(lim);
            if (validate(lim, System::PLLinf)) f.add(file + ": limit is not a PLLinf proof");
            if (holds(in.regular) && !holds(out.regular)) f.add(file + ": limit lost regularity");
            if (holds(in.weakly_regular) && !holds(out.weakly_regular)) f.add(file + ": limit lost weak regularity");
            if (!holds(check_weak_progressing(lim))) f.add(file + ": limit is not weakly progressing");
        } catch (const NotReconstructible&) {
            ++skipped;
        }
    }
    if (limits == 0) f.add("no limit was reconstructed");
    if (!f.none()) return {false, f.text()};
    return {true, std::to_string(trace_steps) + " trace steps re-validate; " + std::to_string(rechecks) + " bounded re-checks clean; " +
                      std::to_string(limits) + " limits keep their class (" + std::to_string(skipped) + " not single-box)"};
}

Value atom(const std::string& a) { return Value::atom(a); }
Value pair(Value a, Value b) { return Value::pair(std::move(a), std::move(b)); }

Outcome criterion_named_semantics() {
    Failures f;
    Web w2 = Web::parse("X=2");
    // the sets as stated for the numerals
    std::vector<Value> zero_hats, one_hats;
    for (const auto& x : w2.atoms("X")) {
        zero_hats.push_back(pair(Value::mset({}), pair(atom(x), atom(x))));
        for (const auto& y : w2.atoms("X")) one_hats.push_back(pair(Value::mset({pair(atom(x), atom(y))}), pair(atom(x), atom(y))));
    }
    RelSet want0, want1;
    for (const auto& v : zero_hats) want0.insert({v});
    for (const auto& v : one_hats) want1.insert({v});
    Interp z = interp(deriv_of(corpus("zero.pll")), w2), o = interp(deriv_of(corpus("one.pll")), w2);
    if (!z.stable || z.set != want0) f.add("[[0]] differs");
    if (!o.stable || o.set != want1) f.add("[[1]] differs");

    for (const char* file : {"dlightning.pll", "dquestion.pll"})
        for (std::size_t k = 0; k <= 8; ++k) {
            Deriv d = unfold(corpus(file), k);
            if (!interp(d, web_for(d, 1)).set.empty()) f.add(std::string(file) + ": nonempty at k=" + std::to_string(k));
        }

    // the stream: [] and every multiset of a prefix, each member drawn from
    // the call's set; at level n the multisets of at most n-5 members are
    // complete
    Spec s = corpus("stream01.pll");
    std::size_t compared = 0;
    for (std::size_t n : {8, 10, 12}) {
        const std::size_t cap = n - 5;
        std::set<std::vector<Value>> prefixes{{}};
        RelSet want{{Value::mset({})}};
        for (std::size_t len = 1; len <= cap; ++len) {
            const auto& hats = (len - 1) % 2 == 0 ? zero_hats : one_hats;
            std::set<std::vector<Value>> next;
            for (const auto& p : prefixes)
                for (const auto& h : hats) {
                    auto q = p;
                    q.push_back(h);
                    std::sort(q.begin(), q.end());
                    next.insert(q);
                }
            prefixes = std::move(next);
            for (const auto& p : prefixes) want.insert({Value::mset(p)});
        }
        RelSet got = interp_spec(s, n, w2, n);
        compared += want.size();
        if (got != want) f.add("stream at level " + std::to_string(n) + ": " + std::to_string(got.size()) + " elements, expected " + std::to_string(want.size()));
    }
    if (!f.none()) return {false, f.text()};
    return {true, "[[0]] (2 elements), [[1]] (4) exact; dlightning and dquestion empty for k <= 8; stream sets equal the closed form (" +
                      std::to_string(compared) + " elements over levels 8, 10, 12)"};
}

Outcome criterion_invariance() {
    Failures f;
    std::size_t equal = 0, undetermined = 0, instances = 0;
    std::map<std::string, std::size_t> kinds;
    for (auto fam : {testing::Family::PLL, testing::Family::PLLinf}) {
        testing::RandomDerivs gen(fam == testing::Family::PLL ? 31 : 32, {fam, kMeasureNodes, 2, true});
        std::size_t det = 0;  // derivations with at least one determined step
        for (std::size_t i = 0; det < kInvarianceDetermined / 2; ++i) {
            bool any = false;
            Deriv d = gen.next();
            Web w = web_for(d, 1 + i % 2);
            w.budget = kInvarianceBudget;
            ++instances;
            each_step(d, [&](const Deriv& before, const Redex& r, const Deriv&) {
                Invariance inv;
                try {
                    inv = check_step_invariance(before, r, w);
                } catch (const SemanticsBudget&) {
                    inv.result = Invariance::Result::Undetermined;
                }
                if (inv.result == Invariance::Result::Undetermined) {
                    ++undetermined;
                    return;
                }
                any = true;
                ++kinds[r.kind];
                if (inv.result == Invariance::Result::Differ)
                    f.add(r.kind + " changes the interpretation of " + print_deriv(before) + " (witness " + print_tuple(*inv.witness) + ")");
                else
                    ++equal;
            });
            det += any;
        }
    }

    // corpus: the input's and the reduced output's sets, compared by
    // membership on the other side at a higher level
    std::vector<std::string> input_only;
    std::size_t corpus_elems = 0;
    for (const auto& file : productive_specs()) {
        Spec s = corpus(file);
        Deriv in = unfold(s, kSemDepth);
        Deriv out = reduce_stream(s, 8).d;
        Web w = web_for(in, 1);
        auto narrow = [](const Tuple& t) {
            for (const auto& v : t)
                if (v.widest() > kSemWidth) return false;
            return true;
        };
        bool extra_in = false;
        for (const auto& t : interp_trunc(in, kSemLevel, w))
            if (narrow(t) && ++corpus_elems && !member(out, kSemCheckLevel, w, t)) extra_in = true;
        for (const auto& t : interp_trunc(out, kSemLevel, w))
            if (narrow(t) && ++corpus_elems && !member(in, kSemCheckLevel, w, t)) f.add(file + ": reduct has " + print_tuple(t));
        if (extra_in) input_only.push_back(file);
    }
    // every input-only case must come from an absorption step on a stream
    // whose calls differ: find the step and its witness
    for (const auto& file : input_only) {
        Trace t = run_trace(corpus(file), 20);
        Deriv before = t.start;
        bool found = false;
        for (const auto& st : t.steps) {
            if (st.r.kind == "cp-qb") {
                Invariance inv = check_step_invariance(before, st.r, web_for(before, 1));
                found = found || (inv.result == Invariance::Result::Differ && inv.witness_before);
            }
            before = st.after;
        }
        if (!found) f.add(file + ": input-only elements without a cp-qb step that explains them");
    }
    if (instances == 0 || !f.none()) return {false, f.text()};
    std::string dev;
    for (const auto& x : input_only) dev += (dev.empty() ? "" : ", ") + x;
    return {true, std::to_string(equal) + " determined steps equal over " + std::to_string(kinds.size()) + " kinds (" +
                      std::to_string(kInvarianceDetermined) + " of " + std::to_string(instances) + " derivations determined, |D_X| in {1,2}; " +
                      std::to_string(undetermined) + " undetermined steps skipped); corpus: " +
                      std::to_string(corpus_elems) + " elements, reduct inside input everywhere; deviation: input strictly larger on " + dev +
                      " (cp-qb on a non-uniform stream forgets which call is popped: equality fails, inclusion holds)"};
}

Outcome criterion_nonempty() {
    Failures f;
    std::size_t n = 0;
    for (const auto& file : corpus_files()) {
        Spec s = corpus(file);
        if (has_cut(s) || !pll_family(s) || !holds(check_weak_progressing(s))) continue;
        Deriv d = unfold(s, kNonemptyDepth);
        ++n;
        if (interp_trunc(d, kNonemptyLevel, web_for(d, 1)).empty()) f.add(file);
    }
    if (!f.none()) return {false, f.text()};
    return {true, std::to_string(n) + " cut-free weakly progressing specs, all nonempty at (8, 8)"};
}

Outcome criterion_digging() {
    Failures f;
    Spec D = corpus("stream01.pll"), zero = corpus("zero.pll"), one = corpus("one.pll");
    Formula N = D.conclusion()[0];
    // inner streams: eventually periodic over {0, 1}, prefix + loop <= 3, distinct
    std::vector<Spec> streams;
    std::set<std::vector<std::size_t>> seen;
    auto words = [](std::size_t len, std::size_t base, auto&& fn) {
        std::vector<std::size_t> w(len, 0);
        for (;;) {
            fn(w);
            std::size_t i = 0;
            while (i < len && ++w[i] == base) w[i++] = 0;
            if (i == len) return;
        }
    };
    for (std::size_t len = 1; len <= 3; ++len)
        words(len, 2, [&](const std::vector<std::size_t>& w) {
            for (std::size_t p = 0; p < len; ++p) {
                Selector sel = Selector::periodic({w.begin(), w.begin() + p}, {w.begin() + p, w.end()});
                std::vector<std::size_t> sig;
                for (std::size_t i = 0; i < 12; ++i) sig.push_back(sel.at({}, i));
                if (seen.insert(sig).second) streams.push_back(make_nwb({N}, {zero, one}, sel));
            }
        });
    // outer: eventually periodic over those, prefix + loop <= 3
    DiggingBase base(D, Web::uniform({"X"}, 1));
    std::size_t candidates = 0;
    std::map<std::string, std::size_t> which;
    for (std::size_t len = 1; len <= 3; ++len)
        words(len, streams.size(), [&](const std::vector<std::size_t>& w) {
            std::vector<Spec> calls;
            for (auto i : w) calls.push_back(streams[i]);
            std::vector<std::size_t> idx(len);
            for (std::size_t i = 0; i < len; ++i) idx[i] = i;
            for (std::size_t p = 0; p < len; ++p) {
                Spec cand = make_nwb({Formula::of_course(N)}, calls, Selector::periodic({idx.begin(), idx.begin() + p}, {idx.begin() + p, idx.end()}));
                DiggingReport r = base.report(cand);
                ++candidates;
                ++which[r.which];
                if (!r.differ || !r.excluded_00 || !r.excluded_11 || !r.mixed_present) f.add("no separation for " + print_spec(cand));
            }
        });
    // the shipped pair, also with two atoms
    DiggingReport r2 = digging_counterexample(D, corpus("digging_candidate.pll"), Web::uniform({"X"}, 2));
    if (!r2.differ) f.add("digging_candidate.pll with |D_X| = 2");
    if (!f.none()) return {false, f.text()};
    std::string cases;
    for (const auto& [k, v] : which) cases += (cases.empty() ? "" : ", ") + k + ": " + std::to_string(v);
    return {true, std::to_string(candidates) + " candidates over " + std::to_string(streams.size()) + " inner streams, all separated with |D_X| = 1 (" +
                      cases + ")"};
}

Outcome criterion_simulation() {
    Failures f;
    std::size_t squares = 0, mell_steps = 0;
    for (const auto& file : corpus_files()) {
        Spec s = corpus(file);
        if (!is_finite_tree(s) || (validate(s, System::PLL) && validate(s, System::oPLL))) continue;
        Deriv cur = deriv_of(s);
        for (std::size_t i = 0; i < 100; ++i) {
            for (const auto& r : redexes(cur)) {
                if (r.kind.rfind("fp-", 0) != 0) continue;
                ++squares;
                try {
                    MellTrace t = simulate_square(cur, r);
                    Deriv target = pll_to_mell(apply_step(cur, r));
                    if (t.steps.empty() || !equivalent(t.steps.back().second, target)) f.add(file + " " + r.kind + ": does not end at the translated reduct");
                    MellMeasure prev = mell_measure(t.start);
                    for (const auto& st : t.steps) {
                        ++mell_steps;
                        MellMeasure m = mell_measure(st.second);
                        if (!(m < prev)) f.add(file + " " + r.kind + ": (m, d) does not decrease at " + st.first.kind);
                        prev = m;
                    }
                } catch (const SimulationFailed& e) {
                    f.add(file + " " + r.kind + ": " + e.what());
                }
            }
            auto st = hbh_step(cur);
            if (!st) break;
            cur = st->d;
        }
    }
    if (squares == 0) f.add("no fp redex in the corpus");
    if (!f.none()) return {false, f.text()};
    return {true, std::to_string(squares) + " fp redexes simulated in " + std::to_string(mell_steps) + " MELL steps, (m, d) strictly decreasing"};
}

Outcome criterion_translations() {
    Failures f;
    std::size_t roundtrips = 0, finitized = 0;
    for (const auto& file : corpus_files()) {
        Spec s = corpus(file);
        if (is_finite_tree(s)) {
            Deriv d = deriv_of(s);
            bool open = has_hyp(d);
            if (validate(d, open ? System::oPLL : System::PLL)) continue;
            Spec inf = pll_to_pllinf(d);
            if (inf.conclusion() != d->concl) f.add(file + ": pll_to_pllinf changes the conclusion");
            if (validate(inf, open ? System::oPLLinf : System::PLLinf)) f.add(file + ": pll_to_pllinf output invalid");
            if (!holds(check_weak_progressing(inf)) || !holds(check_regularity(inf).regular)) f.add(file + ": pll_to_pllinf output not wp and regular");
            if (!equivalent(finitize(inf), d)) f.add(file + ": finitize(pll_to_pllinf) is not the identity");
            Deriv m = pll_to_mell(d);
            if (m->concl != d->concl) f.add(file + ": pll_to_mell changes the conclusion");
            if (validate(m, open ? System::oMELL : System::MELL)) f.add(file + ": pll_to_mell output invalid");
            ++roundtrips;
        } else if (pll_family(s) && holds(check_weak_progressing(s))) {
            Deriv d = finitize(s);
            if (d->concl != s.conclusion()) f.add(file + ": finitize changes the conclusion");
            if (validate(d, System::oPLL)) f.add(file + ": finitize output invalid");
            Spec back = pll_to_pllinf(d);
            if (validate(back, System::oPLLinf) || !holds(check_weak_progressing(back))) f.add(file + ": pll_to_pllinf(finitize) invalid");
            ++finitized;
        }
    }
    if (!f.none()) return {false, f.text()};
    return {true, std::to_string(roundtrips) + " PLL derivations round-trip (PLLinf and MELL images valid); " + std::to_string(finitized) +
                      " weakly progressing coderivations finitize"};
}

}  // namespace

int main(int argc, char** argv) {
    // optional arguments select criteria by number
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    struct Row {
        int id;
        const char* name;
        double budget;
        Outcome (*run)();
    };
    const Row rows[] = {
        {1, "criterion matrix", 1, criterion_matrix},
        {2, "measure decrease", 30, criterion_measure},
        {3, "confluence", 60, criterion_confluence},
        {4, "productivity", 10, criterion_productivity},
        {5, "preservation", 60, criterion_preservation},
        {6, "named semantics", 5, criterion_named_semantics},
        {7, "step invariance", 120, criterion_invariance},
        {8, "nonemptiness", 30, criterion_nonempty},
        {9, "digging impossibility", 60, criterion_digging},
        {10, "MELL simulation", 10, criterion_simulation},
        {11, "translation roundtrips", 30, criterion_translations},
    };
    int failed = 0;
    for (const auto& row : rows) {
        if (!only.empty() && !only.count(row.id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = row.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > row.budget) {
            o.pass = false;
            o.detail += " [over budget]";
        }
        failed += !o.pass;
        char head[128];
        std::snprintf(head, sizeof head, "%s %2d %-22s (%6.2f s / %3.0f s): ", o.pass ? "PASS" : "FAIL", row.id, row.name, secs, row.budget);
        std::cout << head << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
