#include "pllk/proof.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace pllk {

namespace {

struct KindInfo {
    Kind k;
    const char* name;
    int arity;
};

constexpr KindInfo kKinds[] = {
    {Kind::Ax, "ax", 0},   {Kind::Cut, "cut", 2}, {Kind::Tens, "tens", 2}, {Kind::Par, "par", 1},
    {Kind::One, "one", 0}, {Kind::Bot, "bot", 1}, {Kind::Fp, "fp", 1},     {Kind::Cp, "cp", 2},
    {Kind::Nup, "nup", -1}, {Kind::Qw, "qw", 1},  {Kind::Qb, "qb", 1},     {Kind::Qd, "qd", 1},
    {Kind::Qc, "qc", 1},   {Kind::Bp, "bp", 1},   {Kind::Qqd, "qqd", 1},   {Kind::Ex, "ex", 1},
    {Kind::Hyp, "hyp", 0},
};

}  // namespace

const char* kind_name(Kind k) {
    for (const auto& i : kKinds)
        if (i.k == k) return i.name;
    return "?";
}

std::optional<Kind> kind_from_name(std::string_view s) {
    for (const auto& i : kKinds)
        if (s == i.name) return i.k;
    return std::nullopt;
}

int arity(Kind k) {
    for (const auto& i : kKinds)
        if (i.k == k) return i.arity;
    return 0;
}

const char* system_name(System s) {
    switch (s) {
        case System::PLL: return "PLL";
        case System::oPLL: return "oPLL";
        case System::nuPLL: return "nuPLL";
        case System::PLLinf: return "PLLinf";
        case System::oPLLinf: return "oPLLinf";
        case System::MELL: return "MELL";
        case System::oMELL: return "oMELL";
        case System::MELLinf: return "MELLinf";
    }
    return "?";
}

std::optional<System> system_from_name(std::string_view s) {
    for (System x : {System::PLL, System::oPLL, System::nuPLL, System::PLLinf, System::oPLLinf, System::MELL,
                     System::oMELL, System::MELLinf})
        if (s == system_name(x)) return x;
    if (s == "PLL∞") return System::PLLinf;
    if (s == "oPLL∞") return System::oPLLinf;
    if (s == "MELL∞") return System::MELLinf;
    return std::nullopt;
}

bool system_allows(System s, Kind k) {
    switch (k) {
        case Kind::Ax:
        case Kind::Cut:
        case Kind::Tens:
        case Kind::Par:
        case Kind::One:
        case Kind::Bot:
        case Kind::Qw:
        case Kind::Ex: return true;
        case Kind::Qb: return s != System::MELL && s != System::oMELL;
        case Kind::Fp: return s == System::PLL || s == System::oPLL;
        case Kind::Nup: return s == System::nuPLL;
        case Kind::Cp: return s == System::PLLinf || s == System::oPLLinf || s == System::MELLinf;
        case Kind::Qd:
        case Kind::Qc:
        case Kind::Bp: return s == System::MELL || s == System::oMELL;
        case Kind::Qqd: return s == System::MELLinf;
        case Kind::Hyp: return s == System::oPLL || s == System::oPLLinf || s == System::oMELL || s == System::MELLinf;
    }
    return false;
}

std::string print_address(const Address& a) { return a.empty() ? "e" : a; }

Address parse_address(std::string_view s) {
    if (s == "e" || s == "ε" || s.empty()) return {};
    for (char c : s)
        if (c != '1' && c != '2') throw std::invalid_argument("bad address '" + std::string(s) + "'");
    return Address(s);
}

bool is_correspondence(Kind k, int p) { return p == 0 && (k == Kind::Fp || k == Kind::Cp); }

Deriv make_node(Rule r, std::vector<Deriv> prem) {
    auto n = std::make_shared<Node>();
    static_cast<Rule&>(*n) = std::move(r);
    n->prem = std::move(prem);
    return n;
}

Deriv make_hyp(Sequent s) {
    Rule r;
    r.kind = Kind::Hyp;
    r.concl = std::move(s);
    return make_node(std::move(r), {});
}

Deriv make_ax(const Formula& f) {
    Rule r;
    r.kind = Kind::Ax;
    r.concl = {f, dual(f)};
    return make_node(std::move(r), {});
}

Deriv make_one() {
    Rule r;
    r.kind = Kind::One;
    r.concl = {Formula::one()};
    r.principal = 0;
    return make_node(std::move(r), {});
}

// ---------------------------------------------------------------------------
// schema checks

namespace {

std::optional<Formula> strip(const Rule& r, int c) {
    const Formula& f = r.concl[c];
    if (c == r.principal) {
        if (!f.is_ofcourse()) return std::nullopt;
        return f.left();
    }
    if (!f.is_whynot()) return std::nullopt;
    return f.left();
}

}  // namespace

std::optional<std::string> check_rule(const Rule& r, const std::vector<const Sequent*>& prem) {
    using R = std::optional<std::string>;
    const int n = static_cast<int>(r.concl.size());
    const int np = static_cast<int>(prem.size());
    const char* kn = kind_name(r.kind);
    auto fail = [&](const std::string& s) { return R(std::string(kn) + ": " + s); };

    if (r.kind == Kind::Nup) return fail("nup cannot occur in a finitely branching tree");
    if (arity(r.kind) != np) return fail("expects " + std::to_string(arity(r.kind)) + " premise(s)");
    if (static_cast<int>(r.link.size()) != np || static_cast<int>(r.act.size()) != np)
        return fail("occurrence map does not match the premises");

    bool needs_principal = !(r.kind == Kind::Ax || r.kind == Kind::Cut || r.kind == Kind::Hyp);
    if (needs_principal && (r.principal < 0 || r.principal >= n)) return fail("principal position out of range");

    std::vector<int> hits(n, 0);
    for (int p = 0; p < np; ++p) {
        const Sequent& ps = *prem[p];
        if (r.link[p].size() != ps.size()) return fail("occurrence map of premise " + std::to_string(p + 1) + " has wrong length");
        std::vector<char> is_act(ps.size(), 0);
        for (int q : r.act[p]) {
            if (q < 0 || q >= static_cast<int>(ps.size()) || is_act[q]) return fail("bad active position");
            is_act[q] = 1;
        }
        for (std::size_t q = 0; q < ps.size(); ++q) {
            int c = r.link[p][q];
            if (c == -1) {
                if (!is_act[q]) return fail("unlinked premise occurrence that is not active");
                continue;
            }
            if (is_act[q]) return fail("active occurrence is also linked");
            if (c < 0 || c >= n) return fail("link out of range");
            if (is_correspondence(r.kind, p)) {
                auto s = strip(r, c);
                if (!s) return fail(c == r.principal ? "principal formula must be !A" : "context must be ?-formulas (?Γ side condition)");
                if (!(ps[q] == *s)) return fail("premise formula does not match the stripped conclusion");
            } else if (!(ps[q] == r.concl[c])) {
                return fail("linked occurrences carry different formulas");
            }
            ++hits[c];
        }
    }

    auto cover = [&](int except, int times_at_except) -> R {
        for (int c = 0; c < n; ++c) {
            int want = c == except ? times_at_except : 1;
            if (hits[c] != want) return fail("context of the conclusion is not matched by the premises");
        }
        return std::nullopt;
    };
    auto act_is = [&](int p, std::size_t k) { return r.act[p].size() == k; };
    const Formula* pf = needs_principal ? &r.concl[r.principal] : nullptr;

    switch (r.kind) {
        case Kind::Hyp: return std::nullopt;
        case Kind::Ax:
            if (n != 2 || !(r.concl[1] == dual(r.concl[0]))) return fail("conclusion must be F, dual(F)");
            return std::nullopt;
        case Kind::One:
            if (n != 1 || !pf->is(Op::One)) return fail("conclusion must be 1");
            return std::nullopt;
        case Kind::Cut: {
            if (!act_is(0, 1) || !act_is(1, 1)) return fail("each premise has exactly one cut formula");
            if (!((*prem[0])[r.act[0][0]] == dual((*prem[1])[r.act[1][0]]))) return fail("cut formulas are not dual");
            return cover(-1, 1);
        }
        case Kind::Tens: {
            if (!pf->is(Op::Tensor)) return fail("principal must be a tensor");
            if (!act_is(0, 1) || !act_is(1, 1)) return fail("one active formula per premise");
            if (!((*prem[0])[r.act[0][0]] == pf->left()) || !((*prem[1])[r.act[1][0]] == pf->right()))
                return fail("active formulas do not match A, B");
            return cover(r.principal, 0);
        }
        case Kind::Par: {
            if (!pf->is(Op::Par)) return fail("principal must be a par");
            if (!act_is(0, 2)) return fail("two active formulas");
            if (!((*prem[0])[r.act[0][0]] == pf->left()) || !((*prem[0])[r.act[0][1]] == pf->right()))
                return fail("active formulas do not match A, B");
            return cover(r.principal, 0);
        }
        case Kind::Bot:
            if (!pf->is(Op::Bot)) return fail("principal must be bot");
            if (!act_is(0, 0)) return fail("no active formula");
            return cover(r.principal, 0);
        case Kind::Qw:
            if (!pf->is_whynot()) return fail("principal must be ?A");
            if (!act_is(0, 0)) return fail("no active formula");
            return cover(r.principal, 0);
        case Kind::Qb:
            if (!pf->is_whynot()) return fail("principal must be ?A");
            if (!act_is(0, 1) || !((*prem[0])[r.act[0][0]] == pf->left())) return fail("premise must contain A");
            return cover(r.principal, 1);
        case Kind::Qd:
            if (!pf->is_whynot()) return fail("principal must be ?A");
            if (!act_is(0, 1) || !((*prem[0])[r.act[0][0]] == pf->left())) return fail("premise must contain A");
            return cover(r.principal, 0);
        case Kind::Qqd:
            if (!pf->is_whynot()) return fail("principal must be ?A");
            if (!act_is(0, 1) || !((*prem[0])[r.act[0][0]] == Formula::why_not(*pf))) return fail("premise must contain ??A");
            return cover(r.principal, 0);
        case Kind::Qc:
            if (!pf->is_whynot()) return fail("principal must be ?A");
            if (!act_is(0, 0)) return fail("no active formula");
            return cover(r.principal, 2);
        case Kind::Ex: {
            if (r.principal + 1 >= n) return fail("exchange position out of range");
            for (int q = 0; q < n; ++q) {
                int want = q == r.principal ? q + 1 : (q == r.principal + 1 ? q - 1 : q);
                if (r.link[0][q] != want) return fail("exchange must transpose positions i, i+1");
            }
            return std::nullopt;
        }
        case Kind::Bp: {
            for (int c = 0; c < n; ++c)
                if (c != r.principal && !r.concl[c].is_whynot()) return fail("context must be ?-formulas (?Γ side condition)");
            if (!pf->is_ofcourse()) return fail("principal must be !A");
            if (!act_is(0, 1) || !((*prem[0])[r.act[0][0]] == pf->left())) return fail("premise must contain A");
            return cover(r.principal, 0);
        }
        case Kind::Fp:
        case Kind::Cp: {
            if (!pf->is_ofcourse()) return fail("principal must be !A");
            if (!act_is(0, 0)) return fail("no active formula");
            if (r.kind == Kind::Cp && !act_is(1, 0)) return fail("right premise has no active formula");
            // the left premise corresponds to every conclusion occurrence; the
            // right premise of cp repeats the conclusion, so cp hits each twice
            const int want = r.kind == Kind::Cp ? 2 : 1;
            for (int c = 0; c < n; ++c)
                if (hits[c] != want)
                    return fail(r.kind == Kind::Cp ? "right premise must repeat the conclusion"
                                                   : "premise does not match the stripped conclusion");
            return std::nullopt;
        }
        case Kind::Nup: break;
    }
    return fail("unsupported");
}

// ---------------------------------------------------------------------------
// map inference

bool infer_maps(Rule& r, const std::vector<const Sequent*>& prem, const Formula* cut_formula) {
    const int n = static_cast<int>(r.concl.size());
    const int np = static_cast<int>(prem.size());
    r.link.assign(np, {});
    r.act.assign(np, {});
    for (int p = 0; p < np; ++p) r.link[p].assign(prem[p]->size(), -2);
    auto free_at = [&](int p, int q) { return q >= 0 && q < static_cast<int>(prem[p]->size()) && r.link[p][q] == -2; };
    auto take = [&](int p, int q) {
        r.link[p][q] = -1;
        r.act[p].push_back(q);
    };
    auto first = [&](int p, const Formula& f) {
        for (int q = 0; q < static_cast<int>(prem[p]->size()); ++q)
            if (free_at(p, q) && (*prem[p])[q] == f) return q;
        return -1;
    };
    auto last = [&](int p, const Formula& f) {
        for (int q = static_cast<int>(prem[p]->size()) - 1; q >= 0; --q)
            if (free_at(p, q) && (*prem[p])[q] == f) return q;
        return -1;
    };
    auto prefer = [&](int p, const Formula& f, int q0) {
        if (free_at(p, q0) && (*prem[p])[q0] == f) return q0;
        return first(p, f);
    };
    const int i = r.principal;
    const Formula* pf = (i >= 0 && i < n) ? &r.concl[i] : nullptr;
    std::vector<char> skip(n, 0);  // conclusion positions not filled by the context matching

    switch (r.kind) {
        case Kind::Ax:
        case Kind::One:
        case Kind::Hyp: return np == 0;
        case Kind::Nup: return false;
        case Kind::Cut: {
            if (np != 2 || !cut_formula) return false;
            int a = last(0, *cut_formula);
            int b = first(1, dual(*cut_formula));
            if (a < 0 || b < 0) return false;
            take(0, a);
            take(1, b);
            break;
        }
        case Kind::Tens: {
            if (np != 2 || !pf || !pf->is(Op::Tensor)) return false;
            int a = last(0, pf->left());
            int b = first(1, pf->right());
            if (a < 0 || b < 0) return false;
            take(0, a);
            take(1, b);
            skip[i] = 1;
            break;
        }
        case Kind::Par: {
            if (np != 1 || !pf || !pf->is(Op::Par)) return false;
            int a = -1, b = -1;
            if (free_at(0, i) && free_at(0, i + 1) && (*prem[0])[i] == pf->left() && (*prem[0])[i + 1] == pf->right()) {
                a = i;
                b = i + 1;
            } else {
                a = first(0, pf->left());
                if (a < 0) return false;
                r.link[0][a] = -3;  // reserve
                b = first(0, pf->right());
                r.link[0][a] = -2;
            }
            if (a < 0 || b < 0) return false;
            take(0, a);
            take(0, b);
            skip[i] = 1;
            break;
        }
        case Kind::Bot:
        case Kind::Qw:
            if (np != 1 || !pf) return false;
            skip[i] = 1;
            break;
        case Kind::Qb: {
            if (np != 1 || !pf || !pf->is_whynot()) return false;
            int a = -1, c = -1;
            if (free_at(0, i) && free_at(0, i + 1) && (*prem[0])[i] == pf->left() && (*prem[0])[i + 1] == *pf) {
                a = i;
                c = i + 1;
            } else {
                a = first(0, pf->left());
                if (a < 0) return false;
                r.link[0][a] = -3;
                c = first(0, *pf);
                r.link[0][a] = -2;
            }
            if (a < 0 || c < 0) return false;
            take(0, a);
            r.link[0][c] = i;
            skip[i] = 1;
            break;
        }
        case Kind::Qd:
        case Kind::Bp: {
            if (np != 1 || !pf) return false;
            if (r.kind == Kind::Qd && !pf->is_whynot()) return false;
            if (r.kind == Kind::Bp && !pf->is_ofcourse()) return false;
            int a = prefer(0, pf->left(), i);
            if (a < 0) return false;
            take(0, a);
            skip[i] = 1;
            break;
        }
        case Kind::Qqd: {
            if (np != 1 || !pf) return false;
            int a = prefer(0, Formula::why_not(*pf), i);
            if (a < 0) return false;
            take(0, a);
            skip[i] = 1;
            break;
        }
        case Kind::Qc: {
            if (np != 1 || !pf) return false;
            int a = -1, b = -1;
            if (free_at(0, i) && free_at(0, i + 1) && (*prem[0])[i] == *pf && (*prem[0])[i + 1] == *pf) {
                a = i;
                b = i + 1;
            } else {
                a = first(0, *pf);
                if (a < 0) return false;
                r.link[0][a] = -3;
                b = first(0, *pf);
                r.link[0][a] = -2;
            }
            if (a < 0 || b < 0) return false;
            r.link[0][a] = i;
            r.link[0][b] = i;
            skip[i] = 1;
            break;
        }
        case Kind::Ex: {
            if (np != 1 || i < 0 || i + 1 >= n || static_cast<int>(prem[0]->size()) != n) return false;
            for (int q = 0; q < n; ++q) r.link[0][q] = q == i ? i + 1 : (q == i + 1 ? i : q);
            return true;
        }
        case Kind::Fp:
        case Kind::Cp: {
            if (np != arity(r.kind) || !pf || !pf->is_ofcourse()) return false;
            for (int c = 0; c < n; ++c) {
                Formula want;
                if (c == i) {
                    want = pf->left();
                } else {
                    if (!r.concl[c].is_whynot()) return false;
                    want = r.concl[c].left();
                }
                int q = prefer(0, want, c);
                if (q < 0) return false;
                r.link[0][q] = c;
            }
            if (r.kind == Kind::Cp) {
                for (int c = 0; c < n; ++c) {
                    int q = prefer(1, r.concl[c], c);
                    if (q < 0) return false;
                    r.link[1][q] = c;
                }
            }
            for (int p = 0; p < np; ++p)
                for (int v : r.link[p])
                    if (v == -2) return false;
            return true;
        }
    }

    // greedy stable matching of the remaining contexts
    for (int c = 0; c < n; ++c) {
        if (skip[c]) continue;
        bool done = false;
        for (int p = 0; p < np && !done; ++p) {
            int q = first(p, r.concl[c]);
            if (q >= 0) {
                r.link[p][q] = c;
                done = true;
            }
        }
        if (!done) return false;
    }
    for (int p = 0; p < np; ++p)
        for (int v : r.link[p])
            if (v == -2) return false;
    return true;
}

// ---------------------------------------------------------------------------
// traversal

namespace {

std::optional<Violation> validate_rec(const Deriv& d, System sys, Address& at) {
    if (!system_allows(sys, d->kind))
        return Violation{at, std::string("rule ") + kind_name(d->kind) + " is not in system " + system_name(sys)};
    std::vector<const Sequent*> ps;
    for (const auto& p : d->prem) ps.push_back(&p->concl);
    if (auto e = check_rule(*d, ps)) return Violation{at, *e};
    for (std::size_t p = 0; p < d->prem.size(); ++p) {
        at.push_back(static_cast<char>('1' + p));
        auto v = validate_rec(d->prem[p], sys, at);
        at.pop_back();
        if (v) return v;
    }
    return std::nullopt;
}

void each_rec(const Deriv& d, Address& at, const std::function<void(const Deriv&, const Address&)>& fn) {
    fn(d, at);
    for (std::size_t p = 0; p < d->prem.size(); ++p) {
        at.push_back(static_cast<char>('1' + p));
        each_rec(d->prem[p], at, fn);
        at.pop_back();
    }
}

}  // namespace

std::optional<Violation> validate(const Deriv& d, System sys) {
    Address at;
    return validate_rec(d, sys, at);
}

void for_each_node(const Deriv& d, const std::function<void(const Deriv&, const Address&)>& fn) {
    Address at;
    each_rec(d, at, fn);
}

std::size_t size(const Deriv& d) {
    std::size_t s = 1;
    for (const auto& p : d->prem) s += size(p);
    return s;
}

std::size_t levels(const Deriv& d) {
    std::size_t h = 0;
    for (const auto& p : d->prem) h = std::max(h, levels(p));
    return h + 1;
}

namespace {
std::size_t min_hyp_height(const Deriv& d, std::size_t h) {
    if (d->kind == Kind::Hyp) return h;
    std::size_t best = static_cast<std::size_t>(-1);
    for (const auto& p : d->prem) best = std::min(best, min_hyp_height(p, h + 1));
    return best;
}
}  // namespace

std::size_t hypfree_bar_height(const Deriv& d) {
    std::size_t m = min_hyp_height(d, 0);
    if (m == static_cast<std::size_t>(-1)) return levels(d) + 1;
    return m;
}

bool has_hyp(const Deriv& d) {
    if (d->kind == Kind::Hyp) return true;
    for (const auto& p : d->prem)
        if (has_hyp(p)) return true;
    return false;
}

bool cut_free(const Deriv& d) {
    if (d->kind == Kind::Cut) return false;
    for (const auto& p : d->prem)
        if (!cut_free(p)) return false;
    return true;
}

Deriv subderivation_at(const Deriv& d, const Address& a) {
    Deriv cur = d;
    for (char c : a) {
        std::size_t p = static_cast<std::size_t>(c - '1');
        if (p >= cur->prem.size()) throw std::out_of_range("address " + print_address(a) + " is not in the tree");
        cur = cur->prem[p];
    }
    return cur;
}

Deriv replace_at(const Deriv& d, const Address& a, const Deriv& r) {
    if (a.empty()) return r;
    std::size_t p = static_cast<std::size_t>(a[0] - '1');
    if (p >= d->prem.size()) throw std::out_of_range("address not in the tree");
    auto n = std::make_shared<Node>(*d);
    n->prem[p] = replace_at(d->prem[p], a.substr(1), r);
    return n;
}

Deriv prune(const Deriv& d, const std::vector<Address>& v) {
    Deriv out = d;
    for (const Address& a : v) {
        Deriv sub = subderivation_at(out, a);
        out = replace_at(out, a, make_hyp(sub->concl));
    }
    return out;
}

// ---------------------------------------------------------------------------
// occurrence permutations

Deriv permute_root(const Deriv& d, const std::vector<int>& newpos) {
    bool ident = true;
    for (std::size_t k = 0; k < newpos.size(); ++k)
        if (newpos[k] != static_cast<int>(k)) ident = false;
    if (ident) return d;
    if (d->kind == Kind::Ex) {
        // an exchange cannot be reordered in place; fold it into the permutation
        std::vector<int> inner(d->link[0].size());
        for (std::size_t q = 0; q < inner.size(); ++q) inner[q] = newpos[d->link[0][q]];
        return permute_root(d->prem[0], inner);
    }
    auto n = std::make_shared<Node>(*d);
    for (std::size_t c = 0; c < newpos.size(); ++c) n->concl[newpos[c]] = d->concl[c];
    if (d->principal >= 0) n->principal = newpos[d->principal];
    for (auto& l : n->link)
        for (int& v : l)
            if (v >= 0) v = newpos[v];
    return n;
}

namespace {

std::vector<int> canonical_newpos(const Node& n, int p) {
    const auto& l = n.link[p];
    const int sz = static_cast<int>(l.size());
    const long big = 1L << 40;
    std::vector<std::tuple<long, long, int>> keys;
    keys.reserve(sz);
    for (int q = 0; q < sz; ++q) {
        if (l[q] >= 0) {
            keys.emplace_back(4L * l[q] + 1, q, q);
            continue;
        }
        long k = std::find(n.act[p].begin(), n.act[p].end(), q) - n.act[p].begin();
        switch (n.kind) {
            case Kind::Cut:
            case Kind::Tens: keys.emplace_back(p == 0 ? big : -1, k, q); break;
            default: keys.emplace_back(4L * std::max(n.principal, 0), k, q); break;
        }
    }
    std::sort(keys.begin(), keys.end());
    std::vector<int> newpos(sz);
    for (int k = 0; k < sz; ++k) newpos[std::get<2>(keys[k])] = k;
    return newpos;
}

}  // namespace

Deriv canonicalize(const Deriv& d) {
    if (d->prem.empty()) return d;
    std::shared_ptr<Node> n;
    for (std::size_t p = 0; p < d->prem.size(); ++p) {
        const Deriv& child = d->prem[p];
        std::vector<int> np;
        bool ident = true;
        if (child->kind != Kind::Ex && !(d->kind == Kind::Ex)) {
            np = canonical_newpos(*d, static_cast<int>(p));
            for (std::size_t k = 0; k < np.size(); ++k)
                if (np[k] != static_cast<int>(k)) ident = false;
        }
        Deriv c2 = ident ? child : permute_root(child, np);
        c2 = canonicalize(c2);
        if (ident && c2 == child) continue;
        if (!n) n = std::make_shared<Node>(*d);
        n->prem[p] = c2;
        if (!ident) {
            std::vector<int> nl(np.size());
            for (std::size_t q = 0; q < np.size(); ++q) nl[np[q]] = d->link[p][q];
            n->link[p] = std::move(nl);
            for (int& a : n->act[p]) a = np[a];
        }
    }
    return n ? Deriv(n) : d;
}

namespace {

bool eqv(const Node& a, const Node& b, const std::vector<int>& perm, bool hyp_wild) {
    if (a.concl.size() != b.concl.size()) return false;
    for (std::size_t c = 0; c < a.concl.size(); ++c)
        if (!(b.concl[perm[c]] == a.concl[c])) return false;
    if (hyp_wild && a.kind == Kind::Hyp) return true;
    if (a.kind != b.kind || a.prem.size() != b.prem.size() || a.payload != b.payload) return false;
    if ((a.principal < 0) != (b.principal < 0)) return false;
    if (a.principal >= 0 && b.principal != perm[a.principal]) return false;
    if (a.kind == Kind::Ex && (a.principal + 1 >= static_cast<int>(perm.size()) || perm[a.principal + 1] != b.principal + 1))
        return false;
    for (std::size_t p = 0; p < a.prem.size(); ++p) {
        const auto& la = a.link[p];
        const auto& lb = b.link[p];
        if (la.size() != lb.size() || a.act[p].size() != b.act[p].size()) return false;
        const int sz = static_cast<int>(la.size());
        std::vector<int> sigma(sz, -1);
        // group b positions by target
        std::vector<std::vector<int>> by_target(a.concl.size());
        for (int q = 0; q < sz; ++q)
            if (lb[q] >= 0) by_target[lb[q]].push_back(q);
        std::vector<std::vector<int>> a_by_target(a.concl.size());
        for (int q = 0; q < sz; ++q)
            if (la[q] >= 0) a_by_target[la[q]].push_back(q);
        for (std::size_t k = 0; k < a.act[p].size(); ++k) sigma[a.act[p][k]] = b.act[p][k];
        std::vector<std::size_t> tied;
        for (std::size_t c = 0; c < a.concl.size(); ++c) {
            const auto& qa = a_by_target[c];
            const auto& qb = by_target[perm[c]];
            if (qa.size() != qb.size()) return false;
            if (qa.size() == 1) sigma[qa[0]] = qb[0];
            if (qa.size() > 1) tied.push_back(c);
        }
        // at most a handful of tied groups (contraction); try all orders
        std::size_t combos = 1;
        for (std::size_t c : tied) {
            std::size_t f = 1;
            for (std::size_t k = 2; k <= a_by_target[c].size(); ++k) f *= k;
            combos *= f;
            if (combos > 64) return false;
        }
        bool ok = false;
        std::vector<std::vector<int>> orders;
        for (std::size_t c : tied) {
            std::vector<int> o(by_target[perm[c]]);
            std::sort(o.begin(), o.end());
            orders.push_back(o);
        }
        for (std::size_t combo = 0; combo < combos && !ok; ++combo) {
            std::size_t rest = combo;
            std::vector<int> s = sigma;
            for (std::size_t t = 0; t < tied.size(); ++t) {
                std::vector<int> o = orders[t];
                std::size_t f = 1;
                for (std::size_t k = 2; k <= o.size(); ++k) f *= k;
                std::size_t pick = rest % f;
                rest /= f;
                for (std::size_t k = 0; k < pick; ++k) std::next_permutation(o.begin(), o.end());
                const auto& qa = a_by_target[tied[t]];
                for (std::size_t k = 0; k < qa.size(); ++k) s[qa[k]] = o[k];
            }
            if (std::find(s.begin(), s.end(), -1) != s.end()) return false;
            ok = eqv(*a.prem[p], *b.prem[p], s, hyp_wild);
        }
        if (!ok) return false;
    }
    return true;
}

}  // namespace

bool equivalent(const Deriv& a, const Deriv& b) {
    std::vector<int> id(a->concl.size());
    std::iota(id.begin(), id.end(), 0);
    if (a->concl.size() != b->concl.size()) return false;
    return eqv(*a, *b, id, false);
}

bool approx_leq(const Deriv& a, const Deriv& b) {
    std::vector<int> id(a->concl.size());
    std::iota(id.begin(), id.end(), 0);
    if (a->concl.size() != b->concl.size()) return false;
    return eqv(*a, *b, id, true);
}

bool structurally_equal(const Deriv& a, const Deriv& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->principal != b->principal || a->concl != b->concl || a->link != b->link ||
        a->act != b->act || a->payload != b->payload || a->prem.size() != b->prem.size())
        return false;
    for (std::size_t p = 0; p < a->prem.size(); ++p)
        if (!structurally_equal(a->prem[p], b->prem[p])) return false;
    return true;
}

namespace {
std::size_t measure_rec(const Deriv& d, Measure& m) {
    std::size_t s = 1;
    for (const auto& p : d->prem) s += measure_rec(p, m);
    if (d->kind == Kind::Cp || d->kind == Kind::Fp) ++m.ncp;
    if (d->kind == Kind::Cut) m.hcut += s;
    return s;
}
}  // namespace

Measure measure(const Deriv& d) {
    Measure m;
    m.size = measure_rec(d, m);
    return m;
}

std::string print_measure(const Measure& m) {
    return "(" + std::to_string(m.ncp) + "," + std::to_string(m.size) + "," + std::to_string(m.hcut) + ")";
}

}  // namespace pllk
