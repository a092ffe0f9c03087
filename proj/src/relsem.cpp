#include "pllk/relsem.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace pllk {

// ---------------------------------------------------------------------------
// webs

Web Web::uniform(const std::set<std::string>& vars, std::size_t k) {
    Web w;
    for (const auto& v : vars) {
        auto& atoms = w.base[v];
        for (std::size_t i = 0; i < k; ++i) atoms.push_back(std::string(1, static_cast<char>('a' + i % 26)) + (i >= 26 ? std::to_string(i / 26) : ""));
    }
    return w;
}

Web Web::parse(std::string_view text) {
    Web w;
    std::string s(text);
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("base set must read VAR=COUNT: " + item);
        std::size_t k = 0;
        try {
            k = std::stoul(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad count in " + item);
        }
        Web one = uniform({item.substr(0, eq)}, k);
        w.base.insert(one.base.begin(), one.base.end());
    }
    return w;
}

const std::vector<std::string>& Web::atoms(const std::string& var) const {
    auto it = base.find(var);
    if (it == base.end()) throw std::invalid_argument("no base set for variable " + var);
    return it->second;
}

namespace {

void collect_vars(const Formula& f, std::set<std::string>& out) {
    switch (f.op()) {
        case Op::Var:
        case Op::DualVar: out.insert(f.name()); break;
        case Op::One:
        case Op::Bot: break;
        case Op::OfCourse:
        case Op::WhyNot: collect_vars(f.left(), out); break;
        case Op::Tensor:
        case Op::Par:
            collect_vars(f.left(), out);
            collect_vars(f.right(), out);
            break;
    }
}

}  // namespace

std::set<std::string> variables(const Sequent& s) {
    std::set<std::string> out;
    for (const auto& f : s) collect_vars(f, out);
    return out;
}

std::set<std::string> variables(const Deriv& d) {
    std::set<std::string> out;
    for_each_node(d, [&](const Deriv& n, const Address&) {
        for (const auto& f : n->concl) collect_vars(f, out);
    });
    return out;
}

// ---------------------------------------------------------------------------
// values

struct Value::Rep {
    Tag tag;
    std::string name;
    std::vector<Value> items;
    std::size_t widest = 0;
};

Value Value::atom(std::string name) { return make(Tag::Atom, std::move(name), {}); }

Value Value::star() {
    static const Value s = make(Tag::Star, "", {});
    return s;
}

Value Value::pair(Value a, Value b) { return make(Tag::Pair, "", {std::move(a), std::move(b)}); }

Value Value::mset(std::vector<Value> items) {
    std::sort(items.begin(), items.end());
    return make(Tag::MSet, "", std::move(items));
}

Value::Tag Value::tag() const { return r_->tag; }
const std::string& Value::name() const { return r_->name; }
const std::vector<Value>& Value::items() const { return r_->items; }
std::size_t Value::widest() const { return r_->widest; }

int compare(const Value& a, const Value& b) {
    if (a.r_ == b.r_) return 0;
    if (a.r_->tag != b.r_->tag) return a.r_->tag < b.r_->tag ? -1 : 1;
    if (a.r_->tag == Value::Tag::Atom) return a.r_->name.compare(b.r_->name) < 0 ? -1 : (a.r_->name == b.r_->name ? 0 : 1);
    const auto& x = a.r_->items;
    const auto& y = b.r_->items;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
        if (int c = compare(x[i], y[i])) return c;
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    return 0;
}

Value Value::make(Tag tag, std::string name, std::vector<Value> items) {
    auto r = std::make_shared<Rep>();
    r->tag = tag;
    r->name = std::move(name);
    r->items = std::move(items);
    if (tag == Tag::MSet) r->widest = r->items.size();
    for (const auto& v : r->items) r->widest = std::max(r->widest, v.widest());
    Value v;
    v.r_ = std::move(r);
    return v;
}

Value mset_plus(const Value& a, const Value& b) {
    std::vector<Value> all = a.items();
    all.insert(all.end(), b.items().begin(), b.items().end());
    return Value::mset(std::move(all));
}

std::string print_value(const Value& v) {
    switch (v.tag()) {
        case Value::Tag::Atom: return v.name();
        case Value::Tag::Star: return "*";
        case Value::Tag::Pair: return "(" + print_value(v.items()[0]) + ", " + print_value(v.items()[1]) + ")";
        case Value::Tag::MSet: {
            std::string s = "[";
            for (std::size_t i = 0; i < v.items().size(); ++i) s += (i ? ", " : "") + print_value(v.items()[i]);
            return s + "]";
        }
    }
    return "?";
}

std::string print_tuple(const Tuple& t) {
    if (t.size() == 1) return print_value(t[0]);
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + print_value(t[i]);
    return s + ")";
}

namespace {

constexpr std::size_t kBudget = 4'000'000;

// all multisets of at most `cap` members drawn from `elems`
std::vector<Value> multisets(const std::vector<Value>& elems, std::size_t cap) {
    std::vector<Value> out;
    std::vector<Value> cur;
    std::function<void(std::size_t)> go = [&](std::size_t from) {
        out.push_back(Value::mset(cur));
        if (out.size() > kBudget) throw SemanticsBudget("web enumeration exceeds the element budget");
        if (cur.size() == cap) return;
        for (std::size_t i = from; i < elems.size(); ++i) {
            cur.push_back(elems[i]);
            go(i);
            cur.pop_back();
        }
    };
    go(0);
    return out;
}

// every way to remove one member: (member, rest)
std::vector<std::pair<Value, Value>> splits(const Value& m) {
    std::vector<std::pair<Value, Value>> out;
    const auto& it = m.items();
    for (std::size_t i = 0; i < it.size(); ++i) {
        if (i > 0 && it[i] == it[i - 1]) continue;
        std::vector<Value> rest = it;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        out.emplace_back(it[i], Value::mset(std::move(rest)));
    }
    return out;
}

// every sub-multiset
std::vector<Value> submultisets(const Value& m) {
    std::set<Value> out;
    const auto& it = m.items();
    std::vector<Value> cur;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (i == it.size()) {
            out.insert(Value::mset(cur));
            return;
        }
        go(i + 1);
        cur.push_back(it[i]);
        go(i + 1);
        cur.pop_back();
    };
    if (it.size() > 16) throw SemanticsBudget("multiset too large to split");
    go(0);
    return {out.begin(), out.end()};
}

// multisets [m1, ..., mk] of nonempty multisets with m1 + ... + mk = m,
// padded with up to `empties` empty ones
std::vector<Value> partitions(const Value& m, std::size_t empties) {
    std::set<Value> out;
    const auto& it = m.items();
    if (it.size() > 8) throw SemanticsBudget("multiset too large to partition");
    std::vector<std::vector<Value>> blocks;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (i == it.size()) {
            std::vector<Value> parts;
            for (const auto& b : blocks) parts.push_back(Value::mset(b));
            for (std::size_t e = 0; e <= empties; ++e) {
                out.insert(Value::mset(parts));
                parts.push_back(Value::mset({}));
            }
            return;
        }
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            blocks[j].push_back(it[i]);
            go(i + 1);
            blocks[j].pop_back();
        }
        blocks.push_back({it[i]});
        go(i + 1);
        blocks.pop_back();
    };
    go(0);
    return {out.begin(), out.end()};
}

}  // namespace

std::vector<Value> web_elements(const Formula& f, const Web& w, std::size_t cap) {
    switch (f.op()) {
        case Op::Var:
        case Op::DualVar: {
            std::vector<Value> out;
            for (const auto& a : w.atoms(f.name())) out.push_back(Value::atom(a));
            return out;
        }
        case Op::One:
        case Op::Bot: return {Value::star()};
        case Op::Tensor:
        case Op::Par: {
            auto l = web_elements(f.left(), w, cap);
            auto r = web_elements(f.right(), w, cap);
            if (l.size() * r.size() > kBudget) throw SemanticsBudget("web enumeration exceeds the element budget");
            std::vector<Value> out;
            for (const auto& a : l)
                for (const auto& b : r) out.push_back(Value::pair(a, b));
            return out;
        }
        case Op::OfCourse:
        case Op::WhyNot: return multisets(web_elements(f.left(), w, cap), cap);
    }
    return {};
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

using VSet = std::set<Value>;
using VSetP = std::shared_ptr<const VSet>;
// per conclusion position: the values still wanted, or null for any
using Cons = std::vector<VSetP>;

bool admits(const Tuple& t, const Cons& c) {
    for (std::size_t i = 0; i < t.size(); ++i)
        if (c[i] && !c[i]->count(t[i])) return false;
    return true;
}

bool modal(const Formula& f) { return !f.modality_free(); }

// positions of premise p linked to the principal (qb's ?A, qc's two ?A)
std::vector<int> principal_links(const Node& r, int p) {
    std::vector<int> out;
    for (int q = 0; q < static_cast<int>(r.link[p].size()); ++q)
        if (r.link[p][q] == r.principal && r.principal >= 0) out.push_back(q);
    return out;
}

VSetP from(std::set<Value> s) { return std::make_shared<const VSet>(std::move(s)); }

VSetP project(const VSetP& s, const std::function<void(const Value&, VSet&)>& f) {
    if (!s) return nullptr;
    VSet out;
    for (const auto& v : *s) f(v, out);
    return from(std::move(out));
}

class Evaluator {
public:
    explicit Evaluator(const Web& w) : w_(w) {}

    RelSet run(const Deriv& d, std::size_t n, const Cons& c) {
        if (n == 0) return {};
        bool unconstrained = std::all_of(c.begin(), c.end(), [](const VSetP& s) { return !s; });
        if (unconstrained) {
            auto key = std::make_pair(d.get(), n);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
            RelSet r = compute(d, n, c);
            memo_.emplace(key, r);
            return r;
        }
        return compute(d, n, c);
    }

    // whether evaluating under `mask` (constrained positions) meets an axiom
    // on a modal formula with both ends free
    bool needs_free(const Deriv& d, const std::vector<bool>& mask) {
        const Node& r = *d;
        auto pmask = [&](int p) {
            std::vector<bool> m(r.prem[p]->concl.size(), false);
            for (std::size_t q = 0; q < m.size(); ++q) {
                int c = r.link[p][q];
                if (c >= 0) m[q] = mask[static_cast<std::size_t>(c)];
            }
            return m;
        };
        auto principal_set = [&] { return r.principal >= 0 && mask[static_cast<std::size_t>(r.principal)]; };
        switch (r.kind) {
            case Kind::Ax: return modal(r.concl[0]) && !mask[0] && !mask[1];
            case Kind::Cut: {
                auto ml = pmask(0), mr = pmask(1);
                int a = r.act[0][0], b = r.act[1][0];
                auto ml2 = ml, mr2 = mr;
                ml2[a] = true;
                mr2[b] = true;
                return !((!needs_free(r.prem[0], ml) && !needs_free(r.prem[1], mr2)) ||
                         (!needs_free(r.prem[1], mr) && !needs_free(r.prem[0], ml2)));
            }
            default: break;
        }
        bool any = false;
        for (int p = 0; p < static_cast<int>(r.prem.size()); ++p) {
            auto m = pmask(p);
            for (int q : r.act[p]) m[q] = principal_set();
            any = any || needs_free(r.prem[p], m);
        }
        return any;
    }

private:
    void grow(std::size_t k) {
        produced_ += k;
        if (produced_ > w_.budget) throw SemanticsBudget("interpretation exceeds the element budget");
    }

    // constraints on premise p's context positions (links that are parent edges)
    Cons context(const Node& r, int p, const Cons& c) const {
        Cons out(r.prem[p]->concl.size());
        for (std::size_t q = 0; q < out.size(); ++q) {
            int to = r.link[p][q];
            if (to >= 0 && to != r.principal) out[q] = c[static_cast<std::size_t>(to)];
        }
        return out;
    }

    RelSet compute(const Deriv& d, std::size_t n, const Cons& c) {
        const Node& r = *d;
        const std::size_t m = n - 1;
        const VSetP pc = r.principal >= 0 && r.principal < static_cast<int>(c.size()) ? c[static_cast<std::size_t>(r.principal)] : nullptr;
        RelSet out;
        auto emit = [&](Tuple t) {
            if (admits(t, c)) out.insert(std::move(t));
        };
        auto unary = [&](const Cons& pcons, const std::function<void(const Tuple&, Tuple&)>& principal) {
            RelSet prem = run(r.prem[0], m, pcons);
            grow(prem.size());
            for (const auto& pt : prem) {
                Tuple t(r.concl.size());
                for (std::size_t q = 0; q < pt.size(); ++q) {
                    int to = r.link[0][q];
                    if (to >= 0 && to != r.principal) t[static_cast<std::size_t>(to)] = pt[q];
                }
                principal(pt, t);
                emit(std::move(t));
            }
        };

        switch (r.kind) {
            case Kind::Hyp: return {};
            case Kind::Nup:
            case Kind::Bp: throw std::invalid_argument(std::string("no relational clause for ") + kind_name(r.kind));
            case Kind::Ax: {
                VSetP s = c[0] ? c[0] : c[1];
                std::vector<Value> vals;
                if (s) {
                    for (const auto& v : *s)
                        if ((!c[1] || c[1]->count(v)) && (!modal(r.concl[0]) || v.widest() < n)) vals.push_back(v);
                } else {
                    vals = web_elements(r.concl[0], w_, m);
                }
                grow(vals.size());
                for (const auto& v : vals) emit({v, v});
                return out;
            }
            case Kind::One: emit({Value::star()}); return out;
            case Kind::Bot:
                unary(context(r, 0, c), [&](const Tuple&, Tuple& t) { t[r.principal] = Value::star(); });
                return out;
            case Kind::Qw:
                unary(context(r, 0, c), [&](const Tuple&, Tuple& t) { t[r.principal] = Value::mset({}); });
                return out;
            case Kind::Par: {
                Cons pcons = context(r, 0, c);
                pcons[r.act[0][0]] = project(pc, [](const Value& v, VSet& o) { o.insert(v.items()[0]); });
                pcons[r.act[0][1]] = project(pc, [](const Value& v, VSet& o) { o.insert(v.items()[1]); });
                unary(pcons, [&](const Tuple& pt, Tuple& t) { t[r.principal] = Value::pair(pt[r.act[0][0]], pt[r.act[0][1]]); });
                return out;
            }
            case Kind::Qd: {
                Cons pcons = context(r, 0, c);
                pcons[r.act[0][0]] = project(pc, [](const Value& v, VSet& o) {
                    if (v.items().size() == 1) o.insert(v.items()[0]);
                });
                unary(pcons, [&](const Tuple& pt, Tuple& t) { t[r.principal] = Value::mset({pt[r.act[0][0]]}); });
                return out;
            }
            case Kind::Qb: {
                Cons pcons = context(r, 0, c);
                int a = r.act[0][0];
                int rest = principal_links(r, 0).at(0);
                pcons[a] = project(pc, [](const Value& v, VSet& o) {
                    for (auto& [x, _] : splits(v)) o.insert(x);
                });
                pcons[rest] = project(pc, [](const Value& v, VSet& o) {
                    for (auto& [_, mu] : splits(v)) o.insert(mu);
                });
                unary(pcons, [&](const Tuple& pt, Tuple& t) { t[r.principal] = mset_plus(Value::mset({pt[a]}), pt[rest]); });
                return out;
            }
            case Kind::Qc: {
                Cons pcons = context(r, 0, c);
                auto two = principal_links(r, 0);
                VSetP sub = project(pc, [](const Value& v, VSet& o) {
                    for (auto& s : submultisets(v)) o.insert(s);
                });
                pcons[two.at(0)] = sub;
                pcons[two.at(1)] = sub;
                unary(pcons, [&](const Tuple& pt, Tuple& t) { t[r.principal] = mset_plus(pt[two[0]], pt[two[1]]); });
                return out;
            }
            case Kind::Qqd: {
                Cons pcons = context(r, 0, c);
                // a level-m premise builds at most m members per multiset
                pcons[r.act[0][0]] = project(pc, [&](const Value& v, VSet& o) {
                    for (auto& p : partitions(v, m)) o.insert(p);
                });
                unary(pcons, [&](const Tuple& pt, Tuple& t) {
                    Value sum = Value::mset({});
                    for (const auto& mu : pt[r.act[0][0]].items()) sum = mset_plus(sum, mu);
                    t[r.principal] = sum;
                });
                return out;
            }
            case Kind::Ex: {
                Cons pcons(c.size());
                for (std::size_t q = 0; q < pcons.size(); ++q) pcons[q] = c[static_cast<std::size_t>(r.link[0][q])];
                RelSet prem = run(r.prem[0], m, pcons);
                for (const auto& pt : prem) {
                    Tuple t(pt.size());
                    for (std::size_t q = 0; q < pt.size(); ++q) t[static_cast<std::size_t>(r.link[0][q])] = pt[q];
                    emit(std::move(t));
                }
                return out;
            }
            case Kind::Tens: {
                Cons lc = context(r, 0, c), rc = context(r, 1, c);
                lc[r.act[0][0]] = project(pc, [](const Value& v, VSet& o) { o.insert(v.items()[0]); });
                rc[r.act[1][0]] = project(pc, [](const Value& v, VSet& o) { o.insert(v.items()[1]); });
                RelSet L = run(r.prem[0], m, lc);
                if (L.empty()) return out;
                RelSet R = run(r.prem[1], m, rc);
                grow(L.size() * R.size());
                for (const auto& lt : L)
                    for (const auto& rt : R) {
                        Tuple t(r.concl.size());
                        for (std::size_t q = 0; q < lt.size(); ++q)
                            if (r.link[0][q] >= 0) t[static_cast<std::size_t>(r.link[0][q])] = lt[q];
                        for (std::size_t q = 0; q < rt.size(); ++q)
                            if (r.link[1][q] >= 0) t[static_cast<std::size_t>(r.link[1][q])] = rt[q];
                        t[r.principal] = Value::pair(lt[r.act[0][0]], rt[r.act[1][0]]);
                        emit(std::move(t));
                    }
                return out;
            }
            case Kind::Cut: {
                Cons lc = context(r, 0, c), rc = context(r, 1, c);
                const int a = r.act[0][0], b = r.act[1][0];
                auto mask = [](const Cons& cs) {
                    std::vector<bool> v;
                    for (const auto& s : cs) v.push_back(s != nullptr);
                    return v;
                };
                // evaluate first the side that is finite without help from the other
                auto ml = mask(lc), mr = mask(rc), ml2 = ml, mr2 = mr;
                ml2[a] = true;
                mr2[b] = true;
                bool left_ok = !needs_free(r.prem[0], ml) && !needs_free(r.prem[1], mr2);
                bool right_ok = !needs_free(r.prem[1], mr) && !needs_free(r.prem[0], ml2);
                bool left_first = left_ok || !right_ok;
                RelSet L, R;
                auto zs = [](const RelSet& s, int at) {
                    VSet z;
                    for (const auto& t : s) z.insert(t[at]);
                    return from(std::move(z));
                };
                if (left_first) {
                    L = run(r.prem[0], m, lc);
                    if (L.empty()) return out;
                    rc[b] = zs(L, a);
                    R = run(r.prem[1], m, rc);
                } else {
                    R = run(r.prem[1], m, rc);
                    if (R.empty()) return out;
                    lc[a] = zs(R, b);
                    L = run(r.prem[0], m, lc);
                }
                std::map<Value, std::vector<const Tuple*>> byz;
                for (const auto& rt : R) byz[rt[b]].push_back(&rt);
                for (const auto& lt : L) {
                    auto it = byz.find(lt[a]);
                    if (it == byz.end()) continue;
                    grow(it->second.size());
                    for (const Tuple* rt : it->second) {
                        Tuple t(r.concl.size());
                        for (std::size_t q = 0; q < lt.size(); ++q)
                            if (r.link[0][q] >= 0) t[static_cast<std::size_t>(r.link[0][q])] = lt[q];
                        for (std::size_t q = 0; q < rt->size(); ++q)
                            if (r.link[1][q] >= 0) t[static_cast<std::size_t>(r.link[1][q])] = (*rt)[q];
                        emit(std::move(t));
                    }
                }
                return out;
            }
            case Kind::Cp:
            case Kind::Fp: {
                const std::size_t k = r.concl.size();
                emit(Tuple(k, Value::mset({})));
                // left premise: one member of each conclusion multiset
                Cons lc(r.prem[0]->concl.size());
                for (std::size_t q = 0; q < lc.size(); ++q)
                    lc[q] = project(c[static_cast<std::size_t>(r.link[0][q])], [](const Value& v, VSet& o) {
                        for (auto& [x, _] : splits(v)) o.insert(x);
                    });
                // the rest of the stream: the remainders
                Cons tail(k);
                for (std::size_t i = 0; i < k; ++i)
                    tail[i] = project(c[i], [](const Value& v, VSet& o) {
                        for (auto& [_, mu] : splits(v)) o.insert(mu);
                    });
                RelSet L = run(r.prem[0], m, lc);
                if (L.empty()) return out;
                RelSet R;
                std::vector<int> rlink(k);
                if (r.kind == Kind::Cp) {
                    Cons rc(k);
                    for (std::size_t q = 0; q < k; ++q) {
                        rc[q] = tail[static_cast<std::size_t>(r.link[1][q])];
                        rlink[q] = r.link[1][q];
                    }
                    R = run(r.prem[1], m, rc);
                } else {
                    for (std::size_t q = 0; q < k; ++q) rlink[q] = static_cast<int>(q);
                    R = run(d, m, tail);
                }
                grow(L.size() * R.size());
                for (const auto& lt : L)
                    for (const auto& rt : R) {
                        std::vector<Value> t(k);
                        for (std::size_t q = 0; q < rt.size(); ++q) t[static_cast<std::size_t>(rlink[q])] = rt[q];
                        for (std::size_t q = 0; q < lt.size(); ++q) {
                            auto i = static_cast<std::size_t>(r.link[0][q]);
                            t[i] = mset_plus(Value::mset({lt[q]}), t[i]);
                        }
                        emit(std::move(t));
                    }
                return out;
            }
        }
        return out;
    }

    const Web& w_;
    std::map<std::pair<const Node*, std::size_t>, RelSet> memo_;
    std::size_t produced_ = 0;
};

bool has_infinite_parts(const Deriv& d) {
    bool any = false;
    for_each_node(d, [&](const Deriv& n, const Address&) {
        if (n->kind == Kind::Fp || (n->kind == Kind::Ax && modal(n->concl[0]))) any = true;
    });
    return any;
}

}  // namespace

RelSet interp_trunc(const Deriv& d, std::size_t n, const Web& w) {
    Evaluator ev(w);
    return ev.run(d, n, Cons(d->concl.size()));
}

namespace {

bool inhabits(const Value& v, const Formula& f, const Web& w) {
    switch (f.op()) {
        case Op::Var:
        case Op::DualVar: {
            if (v.tag() != Value::Tag::Atom) return false;
            const auto& as = w.atoms(f.name());
            return std::find(as.begin(), as.end(), v.name()) != as.end();
        }
        case Op::One:
        case Op::Bot: return v.tag() == Value::Tag::Star;
        case Op::Tensor:
        case Op::Par:
            return v.tag() == Value::Tag::Pair && inhabits(v.items()[0], f.left(), w) && inhabits(v.items()[1], f.right(), w);
        case Op::OfCourse:
        case Op::WhyNot:
            if (v.tag() != Value::Tag::MSet) return false;
            for (const auto& x : v.items())
                if (!inhabits(x, f.left(), w)) return false;
            return true;
    }
    return false;
}

}  // namespace

bool member(const Deriv& d, std::size_t n, const Web& w, const Tuple& t) {
    if (t.size() != d->concl.size()) return false;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (!inhabits(t[i], d->concl[i], w)) return false;
    Cons c;
    for (const auto& v : t) c.push_back(from({v}));
    Evaluator ev(w);
    return ev.run(d, n, c).count(t) > 0;
}

Interp interp(const Deriv& d, const Web& w, std::size_t extra) {
    const std::size_t n0 = std::max<std::size_t>(levels(d), 1);
    const bool finite = !has_infinite_parts(d);
    Interp res;
    RelSet prev = interp_trunc(d, n0, w);
    for (std::size_t n = n0 + 1; n <= n0 + 1 + (finite ? 0 : extra); ++n) {
        RelSet cur = interp_trunc(d, n, w);
        if (cur == prev) {
            res.set = std::move(cur);
            res.level = n - 1;
            res.stable = true;
            return res;
        }
        if (finite) throw std::logic_error("level sets of a finite derivation did not stabilise");
        prev = std::move(cur);
    }
    res.set = std::move(prev);
    res.level = n0 + 1 + extra;
    return res;
}

RelSet interp_spec(const Spec& s, std::size_t n, const Web& w, std::size_t k) { return interp_trunc(unfold(s, k), n, w); }

Invariance check_step_invariance(const Deriv& d, const Redex& r, const Web& w) {
    Deriv after = apply_step(d, r);
    Interp a = interp(d, w), b = interp(after, w);
    Invariance res;
    if (!a.stable || !b.stable) {
        res.result = Invariance::Result::Undetermined;
        return res;
    }
    if (a.set == b.set) return res;
    res.result = Invariance::Result::Differ;
    for (const auto& t : a.set)
        if (!b.set.count(t)) {
            res.witness = t;
            res.witness_before = true;
            return res;
        }
    for (const auto& t : b.set)
        if (!a.set.count(t)) {
            res.witness = t;
            return res;
        }
    return res;
}

// ---------------------------------------------------------------------------
// digging

namespace {

Rule rule_with_maps(Kind k, Sequent concl, int principal, const std::vector<const Sequent*>& prem, const Formula* cut = nullptr) {
    Rule r;
    r.kind = k;
    r.concl = std::move(concl);
    r.principal = principal;
    if (!infer_maps(r, prem, cut)) throw std::logic_error("cannot lay out the digging cut");
    return r;
}

const SpecNode& root_box(const Spec& s, const char* what) {
    const SpecNode& n = s.at(s.root);
    if (n.tag != SpecNode::Tag::Nwb || n.concl.size() != 1) throw std::invalid_argument(std::string(what) + " must be a closed nwb");
    return n;
}

Deriv call_deriv(const Spec& s, int id) {
    Spec sub = s;
    sub.root = id;
    return unfold(sub, 1000);
}

}  // namespace

Spec digging_spec(const Spec& stream) {
    const SpecNode& box = root_box(stream, "the stream");
    const Formula bangN = box.concl[0];
    const Formula qqNd = Formula::why_not(Formula::why_not(dual(bangN.left())));
    Deriv ax = make_ax(qqNd);
    Sequent qconcl{Formula::why_not(dual(bangN.left())), dual(qqNd)};
    Deriv dig = make_node(rule_with_maps(Kind::Qqd, qconcl, 0, {&ax->concl}), {ax});

    Spec s;
    SpecNode cut;
    cut.tag = SpecNode::Tag::Rule;
    cut.concl = {dual(qqNd)};
    cut.rule = rule_with_maps(Kind::Cut, cut.concl, -1, {&box.concl, &dig->concl}, &bangN);
    s.root = add_node(s, std::move(cut));
    int l = graft(s, stream);
    int r = graft(s, spec_of(dig));
    s.nodes[static_cast<std::size_t>(s.root)].kids = {l, r};
    return s;
}

DiggingBase::DiggingBase(const Spec& stream, const Web& w, const DiggingCaps& caps) : stream_(stream), w_(w), caps_(caps) {
    const SpecNode& box = root_box(stream, "the stream");
    if (box.sel.at({}, 0) == box.sel.at({}, 1)) throw std::invalid_argument("the stream must start with two different calls");

    // 0 and 1 are the first two calls of the stream
    zero_ = call_deriv(stream, box.kids.at(box.sel.at({}, 0)));
    one_ = call_deriv(stream, box.kids.at(box.sel.at({}, 1)));
    for (int k : box.kids) {
        Deriv c = call_deriv(stream, k);
        if (has_hyp(c) || has_infinite_parts(c)) throw std::invalid_argument("stream calls must be finite and closed");
        hmax_ = std::max(hmax_, levels(c));
    }
    Interp z = interp(zero_, w), o = interp(one_, w);
    if (z.set.empty() || o.set.empty()) throw std::invalid_argument("stream calls have empty interpretations");
    base_.zero_hat = z.set.begin()->at(0);
    base_.one_hat = o.set.begin()->at(0);
    if (base_.zero_hat == base_.one_hat) throw std::logic_error("0 and 1 are not separated");
    auto single = [](const Value& v) { return Value::mset({v}); };

    dig_k_ = unfold(digging_spec(stream), caps.depth);
    stream_k_ = unfold(stream, caps.depth);
    const auto& e00 = excluded(Value::mset({single(base_.zero_hat), single(base_.zero_hat)}));
    base_.excluded_00 = e00.excluded;
    cert_ += e00.note;
    const auto& e11 = excluded(Value::mset({single(base_.one_hat), single(base_.one_hat)}));
    base_.excluded_11 = e11.excluded;
    cert_ += e11.note;
    base_.mixed_present = member(dig_k_, caps.level, w, {Value::mset({single(base_.zero_hat), single(base_.one_hat)})});
}

// t is in the digging cut iff the sum of its members is in the stream: the
// ??d over ax relates exactly (sum of t, t). A stream element with s members
// only involves the first s calls, so its level-(s + hmax) set is complete
// for such elements.
const DiggingBase::Exclusion& DiggingBase::excluded(const Value& t) {
    if (auto it = cache_.find(t); it != cache_.end()) return it->second;
    Value sum = Value::mset({});
    for (const auto& mu : t.items()) sum = mset_plus(sum, mu);
    const std::size_t need = sum.items().size() + hmax_;
    if (need > caps_.level || caps_.depth < need)
        throw CapsTooSmall("stream elements of size " + std::to_string(sum.items().size()) + " need level " + std::to_string(need));
    bool in_stream = member(stream_k_, need, w_, {sum});
    bool in_dig = member(dig_k_, caps_.level, w_, {t});
    if (in_dig && !in_stream) throw std::logic_error("digging cut contains an element whose sum is not in the stream");
    std::ostringstream note;
    note << print_value(t) << ": sum " << print_value(sum) << (in_stream ? " occurs" : " does not occur") << " in the stream at level "
         << need << " (complete for " << sum.items().size() << " members); ";
    return cache_[t] = Exclusion{!in_stream, note.str()};
}

DiggingReport DiggingBase::report(const Spec& candidate) {
    const SpecNode& outer = root_box(candidate, "the candidate");
    DiggingReport rep = base_;
    const Value hat[2] = {rep.zero_hat, rep.one_hat};
    auto single = [](const Value& v) { return Value::mset({v}); };

    // first calls of the candidate's first three streams
    for (std::size_t i = 0; i < 3; ++i) {
        std::size_t ci = outer.sel.at({}, i);
        Spec di = candidate;
        di.root = outer.kids.at(ci);
        const SpecNode& inner = root_box(di, "each candidate call");
        Deriv head = call_deriv(di, inner.kids.at(inner.sel.at({i}, 0)));
        if (equivalent(head, zero_))
            rep.heads[i] = 0;
        else if (equivalent(head, one_))
            rep.heads[i] = 1;
        else
            throw std::invalid_argument("candidate streams must be built from the stream's calls");
    }
    // two of three heads agree; the cp clause needs the streams in between
    // to contribute (the empty multiset)
    int a = 0, b = 1;
    if (rep.heads[0] == rep.heads[1]) {
        rep.which = "k0=k1";
    } else if (rep.heads[1] == rep.heads[2]) {
        rep.which = "k1=k2";
        a = 1;
        b = 2;
    } else {
        rep.which = "k2=k0";
        a = 0;
        b = 2;
    }
    std::vector<Value> members;
    for (int i = 0; i <= b; ++i) members.push_back(i == a || i == b ? single(hat[rep.heads[i]]) : Value::mset({}));
    rep.witness = Value::mset(members);
    if (rep.witness.widest() > caps_.mset) throw CapsTooSmall("witness exceeds the multiset cap");

    const Deriv cand_k = unfold(candidate, caps_.depth);
    for (std::size_t n = 1; n <= caps_.level; ++n)
        if (member(cand_k, n, w_, {rep.witness})) {
            rep.level = n;
            break;
        }
    if (rep.level == 0) throw CapsTooSmall("witness not reached in the candidate by level " + std::to_string(caps_.level));
    rep.unpadded_present = member(cand_k, caps_.level, w_, {Value::mset({single(hat[rep.heads[a]]), single(hat[rep.heads[b]])})});
    const auto& e = excluded(rep.witness);
    rep.certificate = cert_ + e.note + "witness " + print_value(rep.witness) + " is in the candidate at level " + std::to_string(rep.level);
    rep.differ = e.excluded;
    return rep;
}

DiggingReport digging_counterexample(const Spec& stream, const Spec& candidate, const Web& w, const DiggingCaps& caps) {
    return DiggingBase(stream, w, caps).report(candidate);
}

}  // namespace pllk
