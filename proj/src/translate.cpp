#include "pllk/translate.hpp"

#include "build.hpp"
#include "pllk/checkers.hpp"

#include <deque>
#include <map>
#include <unordered_map>

namespace pllk {

using namespace build;

// ---------------------------------------------------------------------------
// into PLLinf

namespace {

int emit_pll(Spec& s, const Deriv& d) {
    SpecNode n;
    if (d->kind == Kind::Fp) {
        n.tag = SpecNode::Tag::Nwb;
        n.concl = d->concl;
        n.sel = Selector::periodic({}, {0});
        n.call_link = {d->link[0]};
    } else {
        n.rule = static_cast<const Rule&>(*d);
        n.concl = d->concl;
    }
    int id = add_node(s, std::move(n));
    for (const auto& p : d->prem) {
        int k = emit_pll(s, p);
        s.nodes[id].kids.push_back(k);
    }
    return id;
}

}  // namespace

Spec pll_to_pllinf(const Deriv& d) {
    Spec s;
    s.root = emit_pll(s, d);
    return s;
}

Spec nupll_to_pllinf(const Spec& s) {
    Spec out = s;
    for (auto& n : out.nodes)
        if (n.tag == SpecNode::Tag::Nup) n.tag = SpecNode::Tag::Nwb;
    return out;
}

// ---------------------------------------------------------------------------
// finitization

namespace {

struct Finitizer {
    const Spec& s;
    std::size_t guard;

    Deriv go(int id, const Sequent& prefix, std::vector<std::size_t>& outer, std::size_t depth) {
        if (depth > guard) throw NotWeaklyProgressing("a cycle avoids the right premises of cp");
        const SpecNode& n = s.at(id);
        switch (n.tag) {
            case SpecNode::Tag::Ref: return go(n.target, prefix, outer, depth + 1);
            case SpecNode::Tag::Ext: {
                Sequent p2 = prefix;
                p2.insert(p2.end(), n.ext_prefix.begin(), n.ext_prefix.end());
                return go(n.target, p2, outer, depth + 1);
            }
            case SpecNode::Tag::Nup: throw std::invalid_argument("nup: translate to PLLinf first");
            case SpecNode::Tag::Nwb: {
                if (!prefix.empty()) throw std::invalid_argument("passive context cannot enter a box");
                std::size_t which = n.sel.at(outer, 0);
                outer.push_back(0);
                Deriv call = go(n.kids.at(which), {}, outer, depth + 1);
                outer.pop_back();
                Rule r;
                r.kind = Kind::Fp;
                r.concl = n.concl;
                for (std::size_t c = 0; c < n.concl.size(); ++c)
                    if (n.concl[c].is_ofcourse()) r.principal = static_cast<int>(c);
                r.link = {n.call_link[which]};
                r.act = {{}};
                return make_node(std::move(r), {call});
            }
            case SpecNode::Tag::Rule: break;
        }
        Rule r = n.rule;
        if (r.kind == Kind::Cp) {
            if (!prefix.empty()) throw std::invalid_argument("passive context cannot enter a box");
            r.kind = Kind::Fp;
            r.link.resize(1);
            r.act.resize(1);
            return make_node(std::move(r), {go(n.kids[0], {}, outer, depth + 1)});
        }
        const int k = static_cast<int>(prefix.size());
        if (k > 0) {
            r.concl = prefix;
            r.concl.insert(r.concl.end(), n.rule.concl.begin(), n.rule.concl.end());
            if (r.principal >= 0) r.principal += k;
            for (std::size_t p = 0; p < r.link.size(); ++p) {
                for (int& v : r.link[p])
                    if (v >= 0) v += k;
                if (p == 0) {
                    for (int& a : r.act[0]) a += k;
                    std::vector<int> l(static_cast<std::size_t>(k));
                    std::iota(l.begin(), l.end(), 0);
                    l.insert(l.end(), r.link[0].begin(), r.link[0].end());
                    r.link[0] = std::move(l);
                }
            }
        }
        std::vector<Deriv> prem;
        for (std::size_t p = 0; p < n.kids.size(); ++p)
            prem.push_back(go(n.kids[p], p == 0 ? prefix : Sequent{}, outer, depth + 1));
        return make_node(std::move(r), std::move(prem));
    }
};

}  // namespace

Deriv finitize(const Spec& s) {
    auto wp = check_weak_progressing(s);
    if (wp.verdict == Verdict::Fails)
        throw NotWeaklyProgressing("not weakly progressing: branch " + print_address(wp.prefix) + " then (" +
                                   print_address(wp.cycle) + ") forever");
    Finitizer f{s, s.nodes.size() + 1};
    std::vector<std::size_t> outer;
    return f.go(s.root, {}, outer, 0);
}

// ---------------------------------------------------------------------------
// into MELL

namespace {

std::vector<int> identity_tags(std::size_t n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

Deriv to_mell(const Deriv& d) {
    std::vector<Deriv> prem;
    for (const auto& p : d->prem) prem.push_back(to_mell(p));
    Deriv n = make_node(static_cast<const Rule&>(*d), std::move(prem));
    if (d->kind != Kind::Qb && d->kind != Kind::Fp) return n;
    Builder B;
    const auto ids = identity_tags(d->concl.size());
    const int P = d->principal;
    const Formula& pf = d->concl[P];
    if (d->kind == Kind::Qb) {
        Sub s = B.premise(*n, 0, ids);
        int g = B.fresh++;
        T a = B.rule(Kind::Qd, pf, g, {s.t}, {s.act});
        std::replace(a.tag.begin(), a.tag.end(), g, P);
        return finalize(B.rule(Kind::Qc, pf, P, {a}, {{}}));
    }
    T cur = B.premise(*n, 0, ids).t;
    for (int t : ids)
        if (t != P) cur = B.rule(Kind::Qd, d->concl[t], t, {cur}, {{strip_tag(t)}});
    return finalize(B.rule(Kind::Bp, pf, P, {cur}, {{strip_tag(P)}}));
}

// -- MELL steps --

constexpr int kCL = 1 << 20;
constexpr int kCR = kCL + 1;
constexpr int kDup = 1 << 23;

bool mell_commutable(Kind k) {
    switch (k) {
        case Kind::Tens:
        case Kind::Par:
        case Kind::Bot:
        case Kind::Qw:
        case Kind::Qc:
        case Kind::Qd: return true;
        default: return false;
    }
}

std::vector<std::string> local_kinds(const Node& n) {
    std::vector<std::string> out;
    if (n.kind == Kind::Qc) {
        const Node& p = *n.prem[0];
        if (p.kind == Kind::Qd && n.link[0][p.principal] != n.principal) {
            // the qd formula must not be a contracted copy
            out.push_back("qd-qc");
        }
        return out;
    }
    if (n.kind != Kind::Cut) return out;
    const Node* ps[2] = {n.prem[0].get(), n.prem[1].get()};
    for (const Node* p : ps)
        if (p->kind == Kind::Hyp) return out;
    if (ps[0]->kind == Kind::Ax) out.push_back("ax-left");
    if (ps[1]->kind == Kind::Ax) out.push_back("ax-right");
    const int act[2] = {n.act[0][0], n.act[1][0]};
    bool pr[2];
    for (int x = 0; x < 2; ++x) pr[x] = ps[x]->principal == act[x] && ps[x]->kind != Kind::Ex && ps[x]->kind != Kind::Cut;
    if (pr[0] && pr[1]) {
        for (int x = 0; x < 2; ++x) {
            if (ps[x]->kind == Kind::Par && ps[1 - x]->kind == Kind::Tens) out.push_back("tens-par");
            if (ps[x]->kind == Kind::One && ps[1 - x]->kind == Kind::Bot) out.push_back("one-bot");
        }
    }
    for (int x = 0; x < 2; ++x) {
        if (ps[x]->kind != Kind::Bp || !pr[x]) continue;
        const Node& Y = *ps[1 - x];
        if (Y.kind == Kind::Bp && !pr[1 - x]) out.push_back("bp-bp");
        if (pr[1 - x] && Y.kind == Kind::Qd) out.push_back("bp-qd");
        if (pr[1 - x] && Y.kind == Kind::Qw) out.push_back("bp-qw");
        if (pr[1 - x] && Y.kind == Kind::Qc) out.push_back("bp-qc");
    }
    if (ps[0]->kind == Kind::Ex) out.push_back("ex-left");
    if (ps[1]->kind == Kind::Ex) out.push_back("ex-right");
    for (int x = 0; x < 2; ++x) {
        if (!mell_commutable(ps[x]->kind) || pr[x]) continue;
        std::string side = x == 0 ? "left" : "right";
        out.push_back((ps[x]->kind == Kind::Qd ? "qd-cut-" : "comm-") + side);
    }
    return out;
}

Deriv fire_mell(const Deriv& c, const std::string& k) {
    Builder B;
    if (k == "qd-qc") {
        const auto ids = identity_tags(c->concl.size());
        Sub p = B.premise(*c, 0, ids);
        const Node& qd = *p.t.d;
        int tq = p.t.tag[qd.principal];
        Sub y = B.premise(qd, 0, p.t.tag);
        T q = B.rule(Kind::Qc, c->concl[c->principal], c->principal, {y.t}, {{}});
        return finalize(B.rule(Kind::Qd, qd.concl[qd.principal], tq, {q}, {y.act}));
    }
    std::vector<int> tt[2];
    for (int p = 0; p < 2; ++p) {
        tt[p].resize(c->link[p].size());
        for (std::size_t q = 0; q < tt[p].size(); ++q) tt[p][q] = c->link[p][q] >= 0 ? c->link[p][q] : (p == 0 ? kCL : kCR);
    }
    auto cut_in_order = [&](int x, const T& a, int ta, const T& b, int tb) {
        return x == 0 ? B.cut(a, ta, b, tb) : B.cut(b, tb, a, ta);
    };
    int x = 0;
    if (k == "ax-right" || k == "ex-right" || k == "comm-right" || k == "qd-cut-right") x = 1;
    if (k == "tens-par") x = c->prem[0]->kind == Kind::Par ? 0 : 1;
    if (k == "one-bot") x = c->prem[0]->kind == Kind::One ? 0 : 1;
    if (k.rfind("bp-", 0) == 0) x = c->prem[0]->kind == Kind::Bp && c->prem[0]->principal == c->act[0][0] ? 0 : 1;
    const int y = 1 - x;
    const Deriv X = c->prem[x], Y = c->prem[y];
    const std::vector<int>& tx = tt[x];
    const std::vector<int>& ty = tt[y];
    const int cx = x == 0 ? kCL : kCR;
    const int cy = y == 0 ? kCL : kCR;

    if (k == "ax-left" || k == "ax-right") {
        int other = 1 - find_tag(T{X, tx}, cx);
        T out{Y, ty};
        out.tag[find_tag(out, cy)] = tx[other];
        return finalize(out);
    }
    if (k == "one-bot") return finalize(B.premise(*Y, 0, ty).t);
    if (k == "tens-par") {
        Sub pp = B.premise(*X, 0, tx);
        Sub q0 = B.premise(*Y, 0, ty);
        Sub q1 = B.premise(*Y, 1, ty);
        T inner = B.cut(pp.t, pp.act[0], q0.t, q0.act[0]);
        return finalize(B.cut(inner, pp.act[1], q1.t, q1.act[0]));
    }
    if (k == "ex-left" || k == "ex-right") {
        Sub s = B.premise(*X, 0, tx);
        return finalize(cut_in_order(x, s.t, cx, T{Y, ty}, cy));
    }
    if (k.rfind("comm-", 0) == 0 || k.rfind("qd-cut-", 0) == 0) {
        const Node& r = *X;
        std::vector<T> prems;
        std::vector<std::vector<int>> acts;
        for (int p = 0; p < static_cast<int>(r.prem.size()); ++p) {
            Sub s = B.premise(r, p, tx);
            acts.push_back(s.act);
            if (std::find(s.t.tag.begin(), s.t.tag.end(), cx) != s.t.tag.end()) s.t = cut_in_order(x, s.t, cx, T{Y, ty}, cy);
            prems.push_back(s.t);
        }
        return finalize(B.rule(r.kind, r.concl[r.principal], tx[r.principal], prems, acts));
    }
    // bp steps; X = bp whose !A is cut
    std::vector<int> gamma;
    for (int t : tx)
        if (t != cx) gamma.push_back(t);
    std::sort(gamma.begin(), gamma.end());
    auto formula_of = [&](int t) { return X->concl[find_tag(T{X, tx}, t)]; };
    if (k == "bp-bp") {
        Sub e = B.premise(*Y, 0, ty);
        T inner = cut_in_order(x, T{X, tx}, cx, e.t, cy);
        return finalize(B.rule(Kind::Bp, Y->concl[Y->principal], ty[Y->principal], {inner}, {e.act}));
    }
    if (k == "bp-qd") {
        Sub d = B.premise(*X, 0, tx);
        Sub e = B.premise(*Y, 0, ty);
        return finalize(cut_in_order(x, d.t, d.act[0], e.t, e.act[0]));
    }
    if (k == "bp-qw") {
        T cur = B.premise(*Y, 0, ty).t;
        for (int t : gamma) cur = B.rule(Kind::Qw, formula_of(t), t, {cur}, {{}});
        return finalize(cur);
    }
    if (k == "bp-qc") {
        T e = B.premise(*Y, 0, ty).t;
        // the two contracted copies both carry cy; the first one in premise
        // order (the copy qb kept, under the translation) goes to the inner cut
        int c1 = B.fresh++, c2 = B.fresh++;
        bool first = true;
        for (int& t : e.tag)
            if (t == cy) {
                t = first ? c1 : c2;
                first = false;
            }
        T x1{X, tx};
        for (int& t : x1.tag)
            if (t != cx) t += kDup;
        T inner = cut_in_order(x, x1, cx, e, c1);
        T cur = cut_in_order(x, T{X, tx}, cx, inner, c2);
        for (int t : gamma) {
            std::replace(cur.tag.begin(), cur.tag.end(), t + kDup, t);
            cur = B.rule(Kind::Qc, formula_of(t), t, {cur}, {{}});
        }
        return finalize(cur);
    }
    throw std::logic_error("unknown MELL step " + k);
}

std::string key_of(const Deriv& d) { return print_deriv(d); }

}  // namespace

Deriv pll_to_mell(const Deriv& d) { return canonicalize(to_mell(d)); }

std::vector<MellRedex> mell_redexes(const Deriv& d) {
    std::vector<MellRedex> out;
    for_each_node(d, [&](const Deriv& n, const Address& a) {
        for (auto& k : local_kinds(*n)) out.push_back({a, k});
    });
    return out;
}

Deriv mell_step(const Deriv& d, const MellRedex& r) {
    Deriv sub;
    try {
        sub = subderivation_at(d, r.at);
    } catch (const std::out_of_range&) {
        throw StaleRedex("no node at " + print_address(r.at));
    }
    auto ks = local_kinds(*sub);
    if (std::find(ks.begin(), ks.end(), r.kind) == ks.end()) throw StaleRedex("no " + r.kind + " redex at " + print_address(r.at));
    return canonicalize(replace_at(d, r.at, fire_mell(sub, r.kind)));
}

MellMeasure mell_measure(const Deriv& d, std::size_t budget) {
    std::unordered_map<std::string, std::size_t> memo;
    std::function<std::size_t(const Deriv&)> longest = [&](const Deriv& x) -> std::size_t {
        std::string key = key_of(x);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        if (memo.size() >= budget) throw std::runtime_error("MELL measure: more than " + std::to_string(budget) + " derivations");
        std::size_t best = 0;
        for (const auto& r : mell_redexes(x)) best = std::max(best, 1 + longest(mell_step(x, r)));
        memo[key] = best;
        return best;
    };
    MellMeasure m;
    m.m = longest(d);
    for_each_node(d, [&](const Deriv& n, const Address& a) {
        if (n->kind == Kind::Qd) m.d += a.size();
    });
    return m;
}

MellTrace simulate_square(const Deriv& d, const Redex& r, std::size_t max_steps) {
    MellTrace t;
    t.start = pll_to_mell(d);
    t.target = pll_to_mell(apply_step(d, r));
    struct Seen {
        std::string parent;
        MellRedex via;
        Deriv d;
        std::size_t depth;
    };
    std::map<std::string, Seen> seen;
    std::deque<std::string> q;
    const std::string k0 = key_of(t.start);
    seen[k0] = {"", {}, t.start, 0};
    q.push_back(k0);
    while (!q.empty()) {
        std::string k = q.front();
        q.pop_front();
        const Seen cur = seen[k];
        if (equivalent(cur.d, t.target)) {
            std::vector<std::pair<MellRedex, Deriv>> rev;
            for (std::string at = k; at != k0; at = seen[at].parent) rev.emplace_back(seen[at].via, seen[at].d);
            t.steps.assign(rev.rbegin(), rev.rend());
            return t;
        }
        if (cur.depth >= max_steps || seen.size() > 200000) continue;
        for (const auto& rx : mell_redexes(cur.d)) {
            Deriv nx = mell_step(cur.d, rx);
            std::string kn = key_of(nx);
            if (seen.count(kn)) continue;
            seen[kn] = {k, rx, nx, cur.depth + 1};
            q.push_back(kn);
        }
    }
    throw SimulationFailed("no MELL reduction of at most " + std::to_string(max_steps) + " steps reaches the translated " + r.kind +
                           " step (explored " + std::to_string(seen.size()) + " derivations)");
}

}  // namespace pllk
