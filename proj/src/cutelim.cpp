#include "pllk/cutelim.hpp"

#include "build.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>

namespace pllk {

namespace {

// ---------------------------------------------------------------------------
// closed boxes for the limit reconstruction

// A box kept closed: a leaf of kind nup with payload = entry index. The leaf's
// link[0][k] is the leaf position of entry position k, so permute_root keeps
// it in step with the leaf's own conclusion order.
struct BoxEntry {
    Sequent concl;
    std::vector<Deriv> calls;
    std::vector<std::vector<int>> links;  // call position -> entry position
    Selector sel;
};

struct BoxCtx {
    std::vector<BoxEntry> entries;
};

bool is_box(const Node& n) { return n.kind == Kind::Nup && n.payload >= 0 && n.prem.empty(); }

Deriv box_leaf(int e, Sequent concl, std::vector<int> perm) {
    Rule r;
    r.kind = Kind::Nup;
    r.payload = e;
    r.concl = std::move(concl);
    for (std::size_t c = 0; c < r.concl.size(); ++c)
        if (r.concl[c].is_ofcourse()) r.principal = static_cast<int>(c);
    r.link = {std::move(perm)};
    return make_node(std::move(r), {});
}

using namespace build;

struct StepBuilder : Builder {
    BoxCtx* ctx = nullptr;

    // the two premises of a promotion: D (stripped tags) and E (the stream tail)
    std::pair<T, T> open(const Deriv& x, const std::vector<int>& tx) {
        if (x->kind == Kind::Cp) {
            Sub d = premise(*x, 0, tx);
            Sub e = premise(*x, 1, tx);
            return {d.t, e.t};
        }
        if (x->kind == Kind::Fp) return {premise(*x, 0, tx).t, T{x, tx}};
        if (!ctx) throw std::logic_error("closed box outside the limit engine");
        const BoxEntry& be = ctx->entries.at(static_cast<std::size_t>(x->payload));
        if (be.sel.context_sensitive()) throw NotReconstructible("box selector depends on enclosing boxes");
        std::size_t i = be.sel.at({}, 0);
        const auto& perm = x->link[0];
        T d;
        d.d = be.calls.at(i);
        for (int k : be.links[i]) d.tag.push_back(strip_tag(tx[perm[k]]));
        BoxEntry next = be;
        next.sel = be.sel.shifted(1);
        ctx->entries.push_back(std::move(next));
        int e = static_cast<int>(ctx->entries.size()) - 1;
        return {d, T{box_leaf(e, x->concl, perm), tx}};
    }

    // box against box: one box whose j-th call is the cut of the j-th calls
    T merge(const Deriv& x, const std::vector<int>& tx, int cx, const Deriv& y, const std::vector<int>& ty, int cy) {
        const BoxEntry ex = ctx->entries.at(static_cast<std::size_t>(x->payload));
        const BoxEntry ey = ctx->entries.at(static_cast<std::size_t>(y->payload));
        for (const Selector* s : {&ex.sel, &ey.sel})
            if (s->type != Selector::Type::Periodic) throw NotReconstructible("merging boxes driven by oracles");
        Sequent concl;
        std::vector<int> tags;
        auto add = [&](const Deriv& z, const std::vector<int>& tz, int skip) {
            for (std::size_t q = 0; q < tz.size(); ++q) {
                if (tz[q] == skip) continue;
                concl.push_back(z->concl[q]);
                tags.push_back(tz[q]);
            }
        };
        add(x, tx, cx);
        add(y, ty, cy);
        auto seq = [](const Selector& s, std::size_t n) { return s.at({}, n); };
        std::size_t pre = std::max(ex.sel.prefix.size(), ey.sel.prefix.size());
        std::size_t lx = ex.sel.loop.size(), ly = ey.sel.loop.size();
        std::size_t loop = lx / std::gcd(lx, ly) * ly;
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
        BoxEntry out;
        out.concl = concl;
        std::vector<std::size_t> prefix, cyc;
        for (std::size_t n = 0; n < pre + loop; ++n) {
            auto key = std::make_pair(seq(ex.sel, n), seq(ey.sel, n));
            auto it = index.find(key);
            if (it == index.end()) {
                it = index.emplace(key, out.calls.size()).first;
                T dx{ex.calls.at(key.first), {}};
                for (int k : ex.links[key.first]) dx.tag.push_back(strip_tag(tx[x->link[0][k]]));
                T dy{ey.calls.at(key.second), {}};
                for (int k : ey.links[key.second]) dy.tag.push_back(strip_tag(ty[y->link[0][k]]));
                T c = cut(dx, strip_tag(cx), dy, strip_tag(cy));
                std::vector<int> link;
                for (int tg : c.tag)
                    link.push_back(static_cast<int>(std::find(tags.begin(), tags.end(), unstrip_tag(tg)) - tags.begin()));
                out.calls.push_back(c.d);
                out.links.push_back(std::move(link));
            }
            (n < pre ? prefix : cyc).push_back(it->second);
        }
        out.sel = Selector::periodic(prefix, cyc);
        ctx->entries.push_back(std::move(out));
        std::vector<int> id(concl.size());
        std::iota(id.begin(), id.end(), 0);
        int e = static_cast<int>(ctx->entries.size()) - 1;
        return {box_leaf(e, concl, id), tags};
    }
};

// ---------------------------------------------------------------------------
// classification

bool promo(const Node& n) { return n.kind == Kind::Cp || n.kind == Kind::Fp || is_box(n); }

bool commutable(Kind k) {
    switch (k) {
        case Kind::Tens:
        case Kind::Par:
        case Kind::Bot:
        case Kind::Qw:
        case Kind::Qb:
        case Kind::Qd:
        case Kind::Qc:
        case Kind::Qqd: return true;
        default: return false;
    }
}

struct Plan {
    std::string kind;
    int side = 0;  // premise holding the rule the step is named after first
};

std::optional<Plan> classify(const Node& c) {
    if (c.kind != Kind::Cut) return std::nullopt;
    const Node& p0 = *c.prem[0];
    const Node& p1 = *c.prem[1];
    for (const Node* p : {&p0, &p1})
        if (p->kind == Kind::Hyp || p->kind == Kind::Cut) return std::nullopt;
    if (p0.kind == Kind::Ax) return Plan{"ax", 0};
    if (p1.kind == Kind::Ax) return Plan{"ax", 1};
    const int a = c.act[0][0], b = c.act[1][0];
    const bool pr[2] = {p0.principal == a && p0.kind != Kind::Ex, p1.principal == b && p1.kind != Kind::Ex};
    const Node* ps[2] = {&p0, &p1};
    if (pr[0] && pr[1]) {
        for (int x = 0; x < 2; ++x) {
            if (ps[x]->kind == Kind::Par && ps[1 - x]->kind == Kind::Tens) return Plan{"tens-par", x};
            if (ps[x]->kind == Kind::One && ps[1 - x]->kind == Kind::Bot) return Plan{"one-bot", x};
        }
    }
    for (int x = 0; x < 2; ++x) {
        const Node& X = *ps[x];
        const Node& Y = *ps[1 - x];
        if (!promo(X) || !pr[x]) continue;
        const bool xf = X.kind == Kind::Fp;
        const std::string name = xf ? "fp" : "cp";
        if (promo(Y) && !pr[1 - x] && (Y.kind == Kind::Fp) == xf) return Plan{name + "-" + name, x};
        if (Y.kind == Kind::Qw && pr[1 - x]) return Plan{name + "-qw", x};
        if (Y.kind == Kind::Qb && pr[1 - x]) return Plan{name + "-qb", x};
    }
    if (p0.kind == Kind::Ex) return Plan{"ex", 0};
    if (p1.kind == Kind::Ex) return Plan{"ex", 1};
    for (int x = 0; x < 2; ++x) {
        if (commutable(ps[x]->kind) && !pr[x]) {
            std::string side = x == 0 ? "comm-left-" : "comm-right-";
            return Plan{side + (arity(ps[x]->kind) == 2 ? "2ary" : "1ary"), x};
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// steps

Deriv fire(const Deriv& c, const Plan& plan, StepBuilder& B) {
    std::vector<int> tt[2];
    for (int p = 0; p < 2; ++p) {
        tt[p].resize(c->link[p].size());
        for (std::size_t q = 0; q < tt[p].size(); ++q) tt[p][q] = c->link[p][q] >= 0 ? c->link[p][q] : (p == 0 ? kCL : kCR);
    }
    const int x = plan.side, y = 1 - plan.side;
    const Deriv X = c->prem[x], Y = c->prem[y];
    const std::vector<int>& tx = tt[x];
    const std::vector<int>& ty = tt[y];
    const int cx = x == 0 ? kCL : kCR;
    const int cy = y == 0 ? kCL : kCR;
    const std::string& k = plan.kind;

    if (k == "ax") {
        // X = ax; Y's cut occurrence takes over the other axiom occurrence
        int other = 1 - find_tag(T{X, tx}, cx);
        T out{Y, ty};
        out.tag[find_tag(out, cy)] = tx[other];
        return finalize(out);
    }
    if (k == "one-bot") {
        // X = one, Y = bot
        return finalize(B.premise(*Y, 0, ty).t);
    }
    if (k == "tens-par") {
        // X = par, Y = tens
        Sub pp = B.premise(*X, 0, tx);
        Sub q0 = B.premise(*Y, 0, ty);
        Sub q1 = B.premise(*Y, 1, ty);
        if (x == 0) {
            T inner = B.cut(pp.t, pp.act[0], q0.t, q0.act[0]);
            return finalize(B.cut(inner, pp.act[1], q1.t, q1.act[0]));
        }
        T inner = B.cut(q1.t, q1.act[0], pp.t, pp.act[1]);
        return finalize(B.cut(q0.t, q0.act[0], inner, pp.act[0]));
    }
    if (k == "ex") {
        Sub s = B.premise(*X, 0, tx);
        return finalize(x == 0 ? B.cut(s.t, cx, T{Y, ty}, cy) : B.cut(T{Y, ty}, cy, s.t, cx));
    }
    if (k.rfind("comm-", 0) == 0) {
        const Node& r = *X;
        std::vector<T> prems;
        std::vector<std::vector<int>> acts;
        for (int p = 0; p < static_cast<int>(r.prem.size()); ++p) {
            Sub s = B.premise(r, p, tx);
            acts.push_back(s.act);
            if (std::find(s.t.tag.begin(), s.t.tag.end(), cx) != s.t.tag.end())
                s.t = x == 0 ? B.cut(s.t, cx, T{Y, ty}, cy) : B.cut(T{Y, ty}, cy, s.t, cx);
            prems.push_back(s.t);
        }
        return finalize(B.rule(r.kind, r.concl[r.principal], tx[r.principal], prems, acts));
    }
    // exponential steps; X is the promotion whose !A is cut
    std::vector<int> gamma;  // tags of ?Γ in X, ascending
    for (int t : tx)
        if (t != cx) gamma.push_back(t);
    std::sort(gamma.begin(), gamma.end());
    auto formula_of = [&](int t) { return X->concl[find_tag(T{X, tx}, t)]; };

    if (k == "cp-qw" || k == "fp-qw") {
        T cur = B.premise(*Y, 0, ty).t;
        for (int t : gamma) cur = B.rule(Kind::Qw, formula_of(t), t, {cur}, {{}});
        return finalize(cur);
    }
    if (k == "cp-qb" || k == "fp-qb") {
        auto [D, E] = B.open(X, tx);
        Sub q = B.premise(*Y, 0, ty);  // the kept ?A⊥ copy carries cy
        T inner = B.cut(E, cx, q.t, cy);
        T cur = B.cut(D, strip_tag(cx), inner, q.act[0]);
        for (int t : gamma) cur = B.rule(Kind::Qb, formula_of(t), t, {cur}, {{strip_tag(t)}});
        return finalize(cur);
    }
    if (k == "cp-cp" && is_box(*X) && is_box(*Y)) return finalize(B.merge(X, tx, cx, Y, ty, cy));
    if (k == "cp-cp") {
        auto [D1, D2] = B.open(X, tx);
        auto [E1, E2] = B.open(Y, ty);
        int ptag = ty[static_cast<std::size_t>(Y->principal)];
        T left = B.cut(D1, strip_tag(cx), E1, strip_tag(cy));
        T right = B.cut(D2, cx, E2, cy);
        return finalize(B.cp(left, right, ptag));
    }
    if (k == "fp-fp") {
        Sub d = B.premise(*X, 0, tx);
        Sub e = B.premise(*Y, 0, ty);
        int ptag = ty[static_cast<std::size_t>(Y->principal)];
        return finalize(B.fp(B.cut(d.t, strip_tag(cx), e.t, strip_tag(cy)), ptag));
    }
    throw std::logic_error("unknown cut step " + k);
}

std::optional<Redex> first_redex(const Deriv& d) {
    std::deque<std::pair<Deriv, Address>> q{{d, ""}};
    while (!q.empty()) {
        auto [n, a] = q.front();
        q.pop_front();
        if (auto p = classify(*n)) return Redex{a, p->kind};
        for (std::size_t k = 0; k < n->prem.size(); ++k) q.emplace_back(n->prem[k], a + static_cast<char>('1' + k));
    }
    return std::nullopt;
}

Deriv apply_with(const Deriv& d, const Redex& r, BoxCtx* ctx) {
    Deriv sub;
    try {
        sub = subderivation_at(d, r.at);
    } catch (const std::out_of_range&) {
        throw StaleRedex("no node at " + print_address(r.at));
    }
    auto plan = classify(*sub);
    if (!plan || plan->kind != r.kind) throw StaleRedex("no " + r.kind + " redex at " + print_address(r.at));
    StepBuilder b;
    b.ctx = ctx;
    return canonicalize(replace_at(d, r.at, fire(sub, *plan, b)));
}

}  // namespace

StepClass step_class(const std::string& kind) {
    if (kind == "ax" || kind == "tens-par" || kind == "one-bot") return StepClass::Multiplicative;
    if (kind == "ex") return StepClass::Exchange;
    if (kind.rfind("comm-", 0) == 0) return StepClass::Commutative;
    return StepClass::Exponential;
}

std::optional<Redex> redex_at(const Deriv& d, const Address& at) {
    Deriv sub;
    try {
        sub = subderivation_at(d, at);
    } catch (const std::out_of_range&) {
        return std::nullopt;
    }
    if (auto p = classify(*sub)) return Redex{at, p->kind};
    return std::nullopt;
}

std::vector<Redex> redexes(const Deriv& d) {
    std::vector<Redex> out;
    for_each_node(d, [&](const Deriv& n, const Address& a) {
        if (auto p = classify(*n)) out.push_back({a, p->kind});
    });
    std::stable_sort(out.begin(), out.end(), [](const Redex& x, const Redex& y) {
        if (x.at.size() != y.at.size()) return x.at.size() < y.at.size();
        return x.at < y.at;
    });
    return out;
}

Deriv apply_step(const Deriv& d, const Redex& r) { return apply_with(d, r, nullptr); }

bool measure_decreases(const std::string& kind, const Measure& before, const Measure& after) {
    switch (step_class(kind)) {
        case StepClass::Exponential: return after.ncp < before.ncp;
        case StepClass::Multiplicative:
        case StepClass::Exchange: return after.ncp == before.ncp && after.size < before.size;
        case StepClass::Commutative:
            return after.ncp == before.ncp && after.size == before.size && after.hcut < before.hcut;
    }
    return false;
}

std::optional<Reduced> hbh_step(const Deriv& d) {
    auto r = first_redex(d);
    if (!r) return std::nullopt;
    return Reduced{apply_step(d, *r), *r};
}

std::size_t default_fuel(const Deriv& d) {
    std::size_t s = size(d);
    return 10 * s * s;
}

Deriv normalize_finite(const Deriv& d, std::optional<std::size_t> fuel) {
    std::size_t left = fuel ? *fuel : default_fuel(d);
    Deriv cur = d;
    while (auto r = first_redex(cur)) {
        if (left == 0) throw FuelExhausted("normalization ran out of fuel", cf(cur));
        --left;
        cur = apply_step(cur, *r);
    }
    return cur;
}

Deriv cf(const Deriv& d) {
    if (d->kind == Kind::Cut) return make_hyp(d->concl);
    std::shared_ptr<Node> n;
    for (std::size_t p = 0; p < d->prem.size(); ++p) {
        Deriv c = cf(d->prem[p]);
        if (c == d->prem[p]) continue;
        if (!n) n = std::make_shared<Node>(*d);
        n->prem[p] = c;
    }
    return n ? Deriv(n) : d;
}

StreamResult reduce_stream(const Spec& s, std::size_t h, std::size_t rounds) {
    Deriv best = make_hyp(s.conclusion());
    std::size_t k = std::max<std::size_t>(h, 1);
    for (std::size_t r = 0; r < rounds; ++r, k *= 2) {
        Deriv out = cf(normalize_finite(unfold(s, k)));
        best = out;
        if (!has_hyp(out) || hypfree_bar_height(out) > h) return {out, k};
    }
    throw FuelExhausted("no hyp-free prefix above height " + std::to_string(h) + " after " + std::to_string(rounds) + " rounds",
                        best);
}

Trace run_trace(const Deriv& d, std::size_t n) {
    Trace t;
    t.start = d;
    Deriv cur = d;
    for (std::size_t i = 0; i < n; ++i) {
        auto st = hbh_step(cur);
        if (!st) break;
        cur = st->d;
        t.steps.push_back({st->r, cur, measure(cur)});
    }
    return t;
}

Trace run_trace(const Spec& s, std::size_t n) {
    auto same = [](const Trace& a, const Trace& b, std::size_t n) {
        std::size_t m = std::min(a.steps.size(), b.steps.size());
        if (m < std::min(n, std::max(a.steps.size(), b.steps.size()))) return false;
        for (std::size_t i = 0; i < m && i < n; ++i)
            if (!(a.steps[i].r == b.steps[i].r)) return false;
        return true;
    };
    std::size_t k = std::max<std::size_t>(4, n);
    Trace cur = run_trace(unfold(s, k), n);
    for (int round = 0; round < 8; ++round) {
        Trace next = run_trace(unfold(s, 2 * k), n);
        if (same(cur, next, n)) return next;
        cur = std::move(next);
        k *= 2;
    }
    return cur;
}

std::string trace_line(std::size_t i, const TraceStep& st) {
    return "step " + std::to_string(i) + ": " + st.r.kind + " @ " + print_address(st.r.at) + "; measure=" + print_measure(st.m);
}

// ---------------------------------------------------------------------------
// limit reconstruction

namespace {

struct Limit {
    BoxCtx ctx;
    std::size_t fuel;

    Deriv lower(const Spec& s, int id) {
        const SpecNode& n = s.at(id);
        switch (n.tag) {
            case SpecNode::Tag::Rule: {
                std::vector<Deriv> prem;
                for (int k : n.kids) prem.push_back(lower(s, k));
                return make_node(n.rule, std::move(prem));
            }
            case SpecNode::Tag::Nwb: {
                BoxEntry e;
                e.concl = n.concl;
                e.sel = n.sel;
                e.links = n.call_link;
                for (int k : n.kids) e.calls.push_back(lower(s, k));
                ctx.entries.push_back(std::move(e));
                std::vector<int> id(n.concl.size());
                std::iota(id.begin(), id.end(), 0);
                return box_leaf(static_cast<int>(ctx.entries.size()) - 1, n.concl, id);
            }
            default: throw NotReconstructible("cycle outside a box at " + describe_node(s, id));
        }
    }

    Deriv normalize(Deriv d) {
        while (auto r = first_redex(d)) {
            if (fuel == 0) throw NotReconstructible("limit did not settle within the fuel");
            --fuel;
            d = apply_with(d, *r, &ctx);
        }
        return d;
    }

    int emit(Spec& out, const Deriv& d) {
        if (is_box(*d)) {
            const BoxEntry e = ctx.entries.at(static_cast<std::size_t>(d->payload));
            const auto& perm = d->link[0];
            SpecNode nb;
            nb.tag = SpecNode::Tag::Nwb;
            nb.concl = d->concl;
            nb.sel = e.sel;
            int id = add_node(out, std::move(nb));
            for (std::size_t i = 0; i < e.calls.size(); ++i) {
                int k = emit(out, normalize(e.calls[i]));
                std::vector<int> cl;
                for (int v : e.links[i]) cl.push_back(perm[v]);
                out.nodes[id].kids.push_back(k);
                out.nodes[id].call_link.push_back(std::move(cl));
            }
            return id;
        }
        SpecNode n;
        n.rule = static_cast<const Rule&>(*d);
        n.concl = d->concl;
        int id = add_node(out, std::move(n));
        for (const auto& p : d->prem) {
            int k = emit(out, p);
            out.nodes[id].kids.push_back(k);
        }
        return id;
    }
};

}  // namespace

Spec limit_spec(const Spec& s, std::size_t fuel) {
    bool has_cut = std::any_of(s.nodes.begin(), s.nodes.end(), [](const SpecNode& n) {
        return n.tag == SpecNode::Tag::Rule && n.rule.kind == Kind::Cut;
    });
    if (!has_cut) return s;
    Limit L{{}, fuel};
    Deriv d = L.normalize(L.lower(s, s.root));
    Spec out;
    out.root = L.emit(out, d);
    return out;
}

}  // namespace pllk
