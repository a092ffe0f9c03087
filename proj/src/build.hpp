#pragma once

// Occurrence-tagged builders shared by the cut steps and the MELL steps.
// Every conclusion occurrence carries an integer tag; the builders keep the
// tags attached while rules are stacked, and finalize() puts the root back in
// the order of tags 0..n-1.

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pllk/proof.hpp"

namespace pllk::build {

constexpr int kCL = 1 << 20;
constexpr int kCR = kCL + 1;
constexpr int kStrip = 1 << 22;
constexpr int kFresh = 1 << 24;

inline int strip_tag(int t) { return t + kStrip; }
inline int unstrip_tag(int t) { return t - kStrip; }

struct T {
    Deriv d;
    std::vector<int> tag;
};

inline int find_tag(const T& t, int tag) {
    auto it = std::find(t.tag.begin(), t.tag.end(), tag);
    if (it == t.tag.end()) throw std::logic_error("tagged build: missing occurrence tag");
    return static_cast<int>(it - t.tag.begin());
}

struct Sub {
    T t;
    std::vector<int> act;  // tags of the active positions, in act order
};

struct Builder {
    int fresh = kFresh;

    Sub premise(const Node& n, int p, const std::vector<int>& nt) {
        Sub s;
        s.t.d = n.prem[p];
        const auto& l = n.link[p];
        s.t.tag.resize(l.size());
        const bool corr = is_correspondence(n.kind, p);
        for (std::size_t q = 0; q < l.size(); ++q)
            if (l[q] >= 0) s.t.tag[q] = corr ? strip_tag(nt[l[q]]) : nt[l[q]];
        for (int q : n.act[p]) {
            s.t.tag[q] = fresh++;
            s.act.push_back(s.t.tag[q]);
        }
        return s;
    }

    T cut(const T& L, int tl, const T& R, int tr) {
        int a = find_tag(L, tl), b = find_tag(R, tr);
        if (!(L.d->concl[a] == dual(R.d->concl[b]))) throw std::logic_error("cut step: cut formulas are not dual");
        Rule r;
        r.kind = Kind::Cut;
        r.link = {std::vector<int>(L.tag.size()), std::vector<int>(R.tag.size())};
        r.act = {{a}, {b}};
        T out;
        auto take = [&](const T& s, int p, int skip) {
            for (std::size_t q = 0; q < s.tag.size(); ++q) {
                if (static_cast<int>(q) == skip) {
                    r.link[p][q] = -1;
                    continue;
                }
                r.link[p][q] = static_cast<int>(r.concl.size());
                r.concl.push_back(s.d->concl[q]);
                out.tag.push_back(s.tag[q]);
            }
        };
        take(L, 0, a);
        take(R, 1, b);
        out.d = make_node(std::move(r), {L.d, R.d});
        return out;
    }

    // principal formula pf tagged ptag; premise occurrences tagged ptag are
    // linked to it (the kept copy of qb, both copies of qc)
    T rule(Kind k, const Formula& pf, int ptag, const std::vector<T>& prems, const std::vector<std::vector<int>>& acts) {
        Rule r;
        r.kind = k;
        r.link.resize(prems.size());
        r.act.resize(prems.size());
        T out;
        int pp = -1;
        auto place = [&] {
            pp = static_cast<int>(r.concl.size());
            r.concl.push_back(pf);
            out.tag.push_back(ptag);
        };
        for (std::size_t p = 0; p < prems.size(); ++p) {
            const T& s = prems[p];
            r.link[p].assign(s.tag.size(), -1);
            for (std::size_t q = 0; q < s.tag.size(); ++q) {
                int tg = s.tag[q];
                if (std::find(acts[p].begin(), acts[p].end(), tg) != acts[p].end()) continue;
                if (tg == ptag) {
                    if (pp < 0) place();
                    r.link[p][q] = pp;
                    continue;
                }
                r.link[p][q] = static_cast<int>(r.concl.size());
                r.concl.push_back(s.d->concl[q]);
                out.tag.push_back(tg);
            }
            for (int tg : acts[p]) r.act[p].push_back(find_tag(s, tg));
        }
        if (pp < 0) place();
        r.principal = pp;
        std::vector<Deriv> ds;
        for (const T& s : prems) ds.push_back(s.d);
        out.d = make_node(std::move(r), std::move(ds));
        return out;
    }

    T cp(const T& L, const T& R, int ptag) {
        Rule r;
        r.kind = Kind::Cp;
        r.concl = R.d->concl;
        r.principal = find_tag(R, ptag);
        std::vector<int> id(R.tag.size());
        std::iota(id.begin(), id.end(), 0);
        std::vector<int> l0(L.tag.size());
        for (std::size_t q = 0; q < L.tag.size(); ++q) l0[q] = find_tag(R, unstrip_tag(L.tag[q]));
        r.link = {l0, id};
        r.act = {{}, {}};
        return {make_node(std::move(r), {L.d, R.d}), R.tag};
    }

    T fp(const T& L, int ptag) {
        Rule r;
        r.kind = Kind::Fp;
        T out;
        std::vector<int> id(L.tag.size());
        std::iota(id.begin(), id.end(), 0);
        for (std::size_t q = 0; q < L.tag.size(); ++q) {
            int t = unstrip_tag(L.tag[q]);
            const Formula& f = L.d->concl[q];
            if (t == ptag) r.principal = static_cast<int>(q);
            r.concl.push_back(t == ptag ? Formula::of_course(f) : Formula::why_not(f));
            out.tag.push_back(t);
        }
        r.link = {id};
        r.act = {{}};
        out.d = make_node(std::move(r), {L.d});
        return out;
    }
};

inline Deriv finalize(const T& t) {
    std::vector<int> newpos(t.tag.size());
    std::vector<char> seen(t.tag.size(), 0);
    for (std::size_t q = 0; q < t.tag.size(); ++q) {
        int v = t.tag[q];
        if (v < 0 || v >= static_cast<int>(t.tag.size()) || seen[v]) throw std::logic_error("tagged build lost track of the conclusion");
        seen[v] = 1;
        newpos[q] = v;
    }
    return permute_root(t.d, newpos);
}

}  // namespace pllk::build
