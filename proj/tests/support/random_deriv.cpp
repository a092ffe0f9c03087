#include "random_deriv.hpp"

#include <algorithm>
#include <stdexcept>

namespace pllk::testing {

namespace {

struct Reject {};

Deriv mk(Kind k, Sequent concl, int principal, std::vector<Deriv> prem, const Formula* cut = nullptr) {
    Rule r;
    r.kind = k;
    r.concl = std::move(concl);
    r.principal = principal;
    std::vector<const Sequent*> ps;
    for (const auto& p : prem) ps.push_back(&p->concl);
    if (!infer_maps(r, ps, cut)) throw Reject{};
    return make_node(std::move(r), std::move(prem));
}

Sequent without(const Sequent& s, std::vector<int> drop) {
    Sequent out;
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        if (std::find(drop.begin(), drop.end(), i) == drop.end()) out.push_back(s[i]);
    return out;
}

int find(const Sequent& s, const Formula& f) {
    for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i)
        if (s[i] == f) return i;
    return -1;
}

Deriv unary(Kind k, const Deriv& d, Formula principal) {
    Sequent c = d->concl;
    c.push_back(std::move(principal));
    return mk(k, c, static_cast<int>(c.size()) - 1, {d});
}

Deriv tens(const Deriv& l, int a, const Deriv& r, int b) {
    Sequent c = without(l->concl, {a});
    Sequent rc = without(r->concl, {b});
    c.insert(c.end(), rc.begin(), rc.end());
    c.push_back(Formula::tensor(l->concl[a], r->concl[b]));
    return mk(Kind::Tens, c, static_cast<int>(c.size()) - 1, {l, r});
}

Deriv par(const Deriv& d, int a, int b) {
    Sequent c = without(d->concl, {a, b});
    c.push_back(Formula::par(d->concl[a], d->concl[b]));
    return mk(Kind::Par, c, static_cast<int>(c.size()) - 1, {d});
}

Deriv cut(const Deriv& l, int a, const Deriv& r, int b) {
    Sequent c = without(l->concl, {a});
    Sequent rc = without(r->concl, {b});
    c.insert(c.end(), rc.begin(), rc.end());
    Formula f = l->concl[a];
    return mk(Kind::Cut, c, -1, {l, r}, &f);
}

Sequent promoted(const Sequent& s, int a) {
    Sequent c;
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        c.push_back(i == a ? Formula::of_course(s[i]) : Formula::why_not(s[i]));
    return c;
}

}  // namespace

RandomDerivs::RandomDerivs(std::uint64_t seed, GenOptions opt) : rng_(seed), opt_(opt) {}

bool RandomDerivs::coin(double p) { return std::bernoulli_distribution(p)(rng_); }

Formula RandomDerivs::formula(int depth) {
    int pick = std::uniform_int_distribution<int>(0, depth <= 0 ? 3 : 9)(rng_);
    switch (pick) {
        case 0:
        case 1: return Formula::var("X");
        case 2: return Formula::dual_var("X");
        case 3: return coin(0.5) ? Formula::one() : Formula::bot();
        case 4:
        case 5: return Formula::tensor(formula(depth - 1), formula(depth - 1));
        case 6: return Formula::par(formula(depth - 1), formula(depth - 1));
        case 7:
        case 8: return Formula::of_course(formula(depth - 1));
        default: return Formula::why_not(formula(depth - 1));
    }
}

Deriv RandomDerivs::any(int budget) {
    if (budget <= 1 || coin(0.4)) {
        Formula f = formula(1);
        if (opt_.plain_axioms && !f.modality_free()) return make_hyp({f, dual(f)});
        return make_ax(f);
    }
    return with(formula(opt_.formula_depth), budget);
}

Deriv RandomDerivs::with(const Formula& f, int budget) {
    if (budget > 2 && coin(0.2)) {
        // f passive under a unary rule
        Deriv d = with(f, budget - 1);
        return coin(0.5) ? unary(Kind::Qw, d, Formula::why_not(formula(0))) : unary(Kind::Bot, d, Formula::bot());
    }
    if (budget > 3 && coin(0.1)) {
        // f passive in a tensor
        Deriv l = with(f, budget / 2);
        int a = find(l->concl, f);
        for (int i = 0; i < static_cast<int>(l->concl.size()); ++i)
            if (i != a) {
                Deriv r = any(budget / 2);
                return tens(l, i, r, 0);
            }
    }
    return intro(f, budget);
}

Deriv RandomDerivs::intro(const Formula& f, int budget) {
    auto leaf = [&](const Formula& g) -> Deriv {
        if (coin(0.15)) return make_hyp({g});
        if (opt_.plain_axioms && !g.modality_free()) return make_hyp({g, dual(g)});
        return make_ax(g);
    };
    if (budget <= 1) {
        if (f.is(Op::One)) return make_one();
        return leaf(f);
    }
    switch (f.op()) {
        case Op::Var:
        case Op::DualVar: return leaf(f);
        case Op::One: return make_one();
        case Op::Bot: return unary(Kind::Bot, any(budget - 1), Formula::bot());
        case Op::Tensor: {
            Deriv l = with(f.left(), budget / 2), r = with(f.right(), budget / 2);
            return tens(l, find(l->concl, f.left()), r, find(r->concl, f.right()));
        }
        case Op::Par: {
            Deriv d;
            if (f.right() == dual(f.left()) && (!opt_.plain_axioms || f.left().modality_free()))
                d = make_ax(f.left());
            else if (coin(0.5))
                d = make_hyp({f.left(), f.right()});
            else {
                // A from a real derivation, B left open
                Deriv a = with(f.left(), budget - 2);
                Sequent c = a->concl;
                c.push_back(f.right());
                d = make_hyp(c);
            }
            int a = find(d->concl, f.left());
            int b = -1;
            for (int i = static_cast<int>(d->concl.size()) - 1; i >= 0; --i)
                if (i != a && d->concl[i] == f.right()) {
                    b = i;
                    break;
                }
            if (a < 0 || b < 0) throw Reject{};
            return par(d, a, b);
        }
        case Op::WhyNot: {
            if (coin(0.3)) return unary(Kind::Qw, any(budget - 1), f);
            if (coin(0.35)) {
                // ?A as context of a promotion
                Deriv l = with(f.left(), budget - 2);
                int a = find(l->concl, f.left());
                for (int i = 0; i < static_cast<int>(l->concl.size()); ++i)
                    if (i != a) return promote(l, i, budget);
            }
            // absorb A into ?A
            Deriv a = with(f.left(), budget - 2);
            Deriv w = unary(Kind::Qw, a, f);
            Sequent c = without(w->concl, {find(w->concl, f.left())});
            return mk(Kind::Qb, c, find(c, f), {w});
        }
        case Op::OfCourse: {
            // the premise must carry only the promoted formula and formulas
            // that become ?-context
            Deriv l = with(f.left(), budget - 2);
            return promote(l, find(l->concl, f.left()), budget);
        }
    }
    throw Reject{};
}

Deriv RandomDerivs::promote(const Deriv& l, int a, int budget) {
    Sequent c = promoted(l->concl, a);
    if (opt_.family == Family::PLL) return mk(Kind::Fp, c, a, {l});
    Deriv rest;
    int pick = std::uniform_int_distribution<int>(0, 3)(rng_);
    if (pick == 0)
        rest = make_hyp(c);
    else if (pick == 1)
        rest = mk(Kind::Cp, c, a, {l, make_hyp(c)});  // the same call twice
    else if (pick == 2)
        rest = mk(Kind::Cp, c, a, {make_hyp(l->concl), make_hyp(c)});
    else
        rest = mk(Kind::Cp, c, a, {another(l, a, budget), make_hyp(c)});
    return mk(Kind::Cp, c, a, {l, rest});
}

Deriv RandomDerivs::another(const Deriv& l, int a, int budget) {
    // a second call with the same conclusion, when one is cheap to find
    for (int t = 0; t < 6; ++t) {
        try {
            Deriv d = with(l->concl[a], std::max(budget - 2, 2));
            if (d->concl == l->concl) return d;
        } catch (const Reject&) {
        }
    }
    return l;
}

Deriv RandomDerivs::around(Deriv d, int budget) {
    while (budget > 0 && coin(0.3)) {
        int pick = std::uniform_int_distribution<int>(0, 2)(rng_);
        if (pick == 0) {
            d = unary(Kind::Qw, d, Formula::why_not(formula(0)));
        } else if (pick == 1 && d->concl.size() >= 2) {
            int i = std::uniform_int_distribution<int>(0, static_cast<int>(d->concl.size()) - 2)(rng_);
            Sequent c = d->concl;
            std::swap(c[i], c[i + 1]);
            d = mk(Kind::Ex, c, i, {d});
        } else {
            d = unary(Kind::Bot, d, Formula::bot());
        }
        --budget;
    }
    return d;
}

Deriv RandomDerivs::one_cut(int budget) {
    Formula f = formula(opt_.formula_depth);
    Deriv l = around(with(f, budget), 1);
    Deriv r = around(with(dual(f), budget), 1);
    int a = find(l->concl, f), b = find(r->concl, dual(f));
    if (a < 0 || b < 0) throw Reject{};
    return cut(l, a, r, b);
}

Deriv RandomDerivs::next() {
    const System sys = opt_.family == Family::PLL ? System::oPLL : System::oPLLinf;
    for (;;) {
        try {
            int budget = static_cast<int>(opt_.max_nodes) / 2;
            Deriv d;
            if (coin(opt_.parallel)) {
                Deriv x = one_cut(budget / 2), y = one_cut(budget / 2);
                if (x->concl.empty() || y->concl.empty()) throw Reject{};
                d = tens(x, std::uniform_int_distribution<int>(0, static_cast<int>(x->concl.size()) - 1)(rng_), y,
                         std::uniform_int_distribution<int>(0, static_cast<int>(y->concl.size()) - 1)(rng_));
            } else {
                d = one_cut(budget);
            }
            if (coin(0.2) && d->concl.size() > 0) {
                // a second cut below, against an axiom or a fresh introduction
                int i = std::uniform_int_distribution<int>(0, static_cast<int>(d->concl.size()) - 1)(rng_);
                const Formula g = d->concl[i];
                Deriv e = coin(0.5) && (!opt_.plain_axioms || g.modality_free()) ? make_ax(dual(g)) : with(dual(g), 3);
                d = cut(d, i, e, find(e->concl, dual(g)));
            }
            d = around(d, 2);
            if (size(d) > opt_.max_nodes || cut_free(d)) throw Reject{};
            if (validate(d, sys)) throw Reject{};
            return d;
        } catch (const Reject&) {
            ++rejected_;
        }
    }
}

}  // namespace pllk::testing
