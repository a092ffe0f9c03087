#include "pllk/spec.hpp"

#include "pllk/checkers.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pllk {

// ---------------------------------------------------------------------------
// oracles

namespace {

bool is_prime(std::size_t n) {
    if (n < 2) return false;
    for (std::size_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::size_t collatz_steps(std::size_t n) {
    std::size_t steps = 0;
    while (n > 1 && steps < 100000) {
        n = (n % 2) ? 3 * n + 1 : n / 2;
        ++steps;
    }
    return steps;
}

const std::vector<OracleInfo>& registry() {
    static const std::vector<OracleInfo> r = {
        {"prime-indicator", [](const std::vector<std::size_t>&, std::size_t n) -> std::size_t { return is_prime(n) ? 1 : 0; },
         Periodicity::No, false, 2, "call 1 at prime indices, call 0 elsewhere"},
        {"thue-morse",
         [](const std::vector<std::size_t>&, std::size_t n) -> std::size_t {
             return static_cast<std::size_t>(__builtin_popcountll(n) & 1);
         },
         Periodicity::No, false, 2, "parity of the binary digit sum"},
        {"collatz-parity",
         [](const std::vector<std::size_t>&, std::size_t n) -> std::size_t { return collatz_steps(n + 1) % 2; },
         Periodicity::Unknown, false, 2, "parity of the Collatz stopping time of n+1"},
        {"staircase",
         [](const std::vector<std::size_t>& outer, std::size_t n) -> std::size_t {
             std::size_t i = outer.empty() ? 0 : outer.back();
             return n < i ? 1 : 0;
         },
         Periodicity::Yes, true, 2, "call 1 for the first i indices, then call 0; i is the enclosing nwb index"},
        {"constant-0", [](const std::vector<std::size_t>&, std::size_t) -> std::size_t { return 0; }, Periodicity::Yes,
         false, 1, "always call 0"},
    };
    return r;
}

}  // namespace

const OracleInfo* find_oracle(std::string_view name) {
    for (const auto& o : registry())
        if (o.name == name) return &o;
    return nullptr;
}

std::vector<const OracleInfo*> all_oracles() {
    std::vector<const OracleInfo*> v;
    for (const auto& o : registry()) v.push_back(&o);
    return v;
}

Selector Selector::periodic(std::vector<std::size_t> prefix, std::vector<std::size_t> loop) {
    if (loop.empty()) throw std::invalid_argument("selector loop must be nonempty");
    Selector s;
    s.type = Type::Periodic;
    s.prefix = std::move(prefix);
    s.loop = std::move(loop);
    return s;
}

Selector Selector::from_oracle(std::string name, std::size_t offset) {
    if (!find_oracle(name)) throw std::invalid_argument("unknown oracle '" + name + "'");
    Selector s;
    s.type = Type::Oracle;
    s.oracle = std::move(name);
    s.offset = offset;
    s.loop.clear();
    return s;
}

std::size_t Selector::at(const std::vector<std::size_t>& outer, std::size_t n) const {
    if (type == Type::Oracle) return find_oracle(oracle)->fn(outer, n + offset);
    if (n < prefix.size()) return prefix[n];
    return loop[(n - prefix.size()) % loop.size()];
}

Selector Selector::shifted(std::size_t k) const {
    Selector s = *this;
    if (type == Type::Oracle) {
        s.offset += k;
        return s;
    }
    if (k <= prefix.size()) {
        s.prefix.erase(s.prefix.begin(), s.prefix.begin() + static_cast<std::ptrdiff_t>(k));
        return s;
    }
    std::size_t r = (k - prefix.size()) % loop.size();
    s.prefix.clear();
    std::rotate(s.loop.begin(), s.loop.begin() + static_cast<std::ptrdiff_t>(r), s.loop.end());
    return s;
}

Periodicity Selector::periodicity() const {
    if (type == Type::Periodic) return Periodicity::Yes;
    return find_oracle(oracle)->periodic;
}

bool Selector::context_sensitive() const { return type == Type::Oracle && find_oracle(oracle)->context_sensitive; }

std::size_t Selector::max_index() const {
    if (type == Type::Oracle) return find_oracle(oracle)->min_calls - 1;
    std::size_t m = 0;
    for (auto i : prefix) m = std::max(m, i);
    for (auto i : loop) m = std::max(m, i);
    return m;
}

bool Selector::operator==(const Selector& o) const {
    if (type != o.type) return false;
    if (type == Type::Oracle) return oracle == o.oracle && offset == o.offset;
    return prefix == o.prefix && loop == o.loop;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

[[noreturn]] void err(const Sexp& e, const std::string& msg) { throw SyntaxError(msg, e.offset); }

std::size_t parse_index(const Sexp& e) {
    if (!e.is_atom() || e.atom.empty() || !std::all_of(e.atom.begin(), e.atom.end(), ::isdigit))
        err(e, "expected a natural number");
    return static_cast<std::size_t>(std::stoul(e.atom));
}

int principal_of_promotion(const Sequent& s) {
    int found = -1;
    for (std::size_t c = 0; c < s.size(); ++c)
        if (s[c].is_ofcourse()) {
            if (found >= 0) return -2;
            found = static_cast<int>(c);
        }
    return found;
}

std::vector<int> infer_call_link(const Sequent& concl, int principal, const Sequent& call) {
    Rule r;
    r.kind = Kind::Fp;
    r.concl = concl;
    r.principal = principal;
    std::vector<const Sequent*> ps{&call};
    if (!infer_maps(r, ps, nullptr)) return {};
    return r.link[0];
}

struct MapOverride {
    std::vector<std::vector<int>> link;
    std::vector<std::vector<int>> act;
};

struct Parser {
    Spec s;
    std::vector<std::pair<std::string, int>> scope;
    std::vector<std::pair<int, MapOverride>> overrides;
    std::vector<std::pair<int, Formula>> cut_formulas;
    std::vector<std::pair<int, std::size_t>> offsets;

    int reserve(SpecNode n, const Sexp& e) {
        s.nodes.push_back(std::move(n));
        offsets.emplace_back(static_cast<int>(s.nodes.size()) - 1, e.offset);
        return static_cast<int>(s.nodes.size()) - 1;
    }

    int lookup(const Sexp& e) {
        if (!e.is_atom()) err(e, "expected a name");
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == e.atom) return it->second;
        err(e, "reference to '" + e.atom + "' which is not an enclosing def");
    }

    Selector selector(const Sexp& e) {
        if (!e.is_list() || e.head() != "sel") err(e, "expected (sel ...)");
        if (e.items.size() >= 2 && e.items[1].is_atom("oracle")) {
            if (e.items.size() < 3 || e.items.size() > 4 || !e.items[2].is_atom()) err(e, "expected (sel oracle NAME [OFFSET])");
            if (!find_oracle(e.items[2].atom)) err(e.items[2], "unknown oracle '" + e.items[2].atom + "'");
            std::size_t off = e.items.size() == 4 ? parse_index(e.items[3]) : 0;
            return Selector::from_oracle(e.items[2].atom, off);
        }
        std::vector<std::size_t> prefix, loop;
        bool have_loop = false;
        for (std::size_t k = 1; k < e.items.size(); ++k) {
            const Sexp& part = e.items[k];
            if (!part.is_list()) err(part, "expected (prefix ...) or (loop ...)");
            auto& dst = part.head() == "prefix" ? prefix : loop;
            if (part.head() == "loop") have_loop = true;
            else if (part.head() != "prefix") err(part, "expected (prefix ...) or (loop ...)");
            for (std::size_t j = 1; j < part.items.size(); ++j) dst.push_back(parse_index(part.items[j]));
        }
        if (!have_loop || loop.empty()) err(e, "selector loop must be nonempty");
        return Selector::periodic(prefix, loop);
    }

    MapOverride map_element(const Sexp& e, std::size_t np) {
        MapOverride m;
        if (e.items.size() != np + 1) err(e, "map needs one list per premise");
        for (std::size_t p = 0; p < np; ++p) {
            const Sexp& l = e.items[p + 1];
            if (!l.is_list()) err(l, "expected a list of occurrence targets");
            std::vector<int> link;
            std::vector<std::pair<int, int>> acts;
            for (std::size_t q = 0; q < l.items.size(); ++q) {
                const Sexp& x = l.items[q];
                if (!x.is_atom() || x.atom.empty()) err(x, "bad map entry");
                if (x.atom[0] == 'a') {
                    Sexp y = x;
                    y.atom = x.atom.substr(1);
                    acts.emplace_back(static_cast<int>(parse_index(y)), static_cast<int>(q));
                    link.push_back(-1);
                } else {
                    link.push_back(static_cast<int>(parse_index(x)));
                }
            }
            std::sort(acts.begin(), acts.end());
            std::vector<int> act;
            for (std::size_t k = 0; k < acts.size(); ++k) {
                if (acts[k].first != static_cast<int>(k)) err(l, "active entries must be numbered a0, a1, ...");
                act.push_back(acts[k].second);
            }
            m.link.push_back(std::move(link));
            m.act.push_back(std::move(act));
        }
        return m;
    }

    int node(const Sexp& e) {
        if (!e.is_list() || e.items.empty()) err(e, "expected a proof node");
        const std::string& h = e.head();
        auto need = [&](bool ok, const char* what) {
            if (!ok) err(e, std::string("malformed ") + h + ": " + what);
        };
        if (h == "def") {
            need(e.items.size() == 3 && e.items[1].is_atom(), "expected (def NAME NODE)");
            int id = static_cast<int>(s.nodes.size());
            scope.emplace_back(e.items[1].atom, id);
            int got = node(e.items[2]);
            scope.pop_back();
            if (got != id || s.nodes[id].tag == SpecNode::Tag::Ref || s.nodes[id].tag == SpecNode::Tag::Ext)
                err(e, "def must wrap a rule or box");
            if (!s.nodes[id].name.empty()) err(e, "node defined twice");
            s.nodes[id].name = e.items[1].atom;
            return id;
        }
        if (h == "ref") {
            need(e.items.size() == 2, "expected (ref NAME)");
            SpecNode n;
            n.tag = SpecNode::Tag::Ref;
            n.target = lookup(e.items[1]);
            n.concl = s.nodes[n.target].concl;
            return reserve(std::move(n), e);
        }
        if (h == "ext") {
            need(e.items.size() == 3, "expected (ext NAME S)");
            SpecNode n;
            n.tag = SpecNode::Tag::Ext;
            n.target = lookup(e.items[1]);
            n.concl = sequent_from_sexp(e.items[2]);
            const Sequent& t = s.nodes[n.target].concl;
            if (n.concl.size() < t.size() || !std::equal(t.begin(), t.end(), n.concl.end() - static_cast<std::ptrdiff_t>(t.size())))
                err(e, "ext sequent must end with the target's sequent");
            n.ext_prefix.assign(n.concl.begin(), n.concl.end() - static_cast<std::ptrdiff_t>(t.size()));
            return reserve(std::move(n), e);
        }
        if (h == "nwb" || h == "nup") {
            need(e.items.size() == 4, "expected (nwb S (calls ...) (sel ...))");
            SpecNode n;
            n.tag = h == "nwb" ? SpecNode::Tag::Nwb : SpecNode::Tag::Nup;
            n.concl = sequent_from_sexp(e.items[1]);
            int id = reserve(std::move(n), e);
            const Sexp& calls = e.items[2];
            if (!calls.is_list() || calls.head() != "calls" || calls.items.size() < 2) err(calls, "expected (calls d ...)");
            std::vector<int> kids;
            for (std::size_t k = 1; k < calls.items.size(); ++k) kids.push_back(node(calls.items[k]));
            s.nodes[id].kids = std::move(kids);
            s.nodes[id].sel = selector(e.items[3]);
            return id;
        }
        auto kind = kind_from_name(h);
        if (!kind || *kind == Kind::Nup) err(e, "unknown rule '" + h + "'");
        SpecNode n;
        n.tag = SpecNode::Tag::Rule;
        n.rule.kind = *kind;
        std::size_t k = 1;
        const std::size_t ar = static_cast<std::size_t>(arity(*kind));
        std::optional<Formula> cutf;
        switch (*kind) {
            case Kind::Ax:
                need(e.items.size() == 2, "expected (ax F)");
                n.rule.concl = {formula_from_sexp(e.items[1]), dual(formula_from_sexp(e.items[1]))};
                n.concl = n.rule.concl;
                return reserve(std::move(n), e);
            case Kind::One:
                need(e.items.size() == 1, "expected (one)");
                n.rule.concl = {Formula::one()};
                n.rule.principal = 0;
                n.concl = n.rule.concl;
                return reserve(std::move(n), e);
            case Kind::Hyp:
                need(e.items.size() == 2, "expected (hyp S)");
                n.rule.concl = sequent_from_sexp(e.items[1]);
                n.concl = n.rule.concl;
                return reserve(std::move(n), e);
            default: break;
        }
        need(e.items.size() > 1, "missing conclusion");
        n.rule.concl = sequent_from_sexp(e.items[k++]);
        n.concl = n.rule.concl;
        if (*kind == Kind::Cut) {
            need(e.items.size() > k, "missing cut formula");
            cutf = formula_from_sexp(e.items[k++]);
        } else if (*kind == Kind::Cp || *kind == Kind::Fp || *kind == Kind::Bp) {
            int p = principal_of_promotion(n.rule.concl);
            if (p < 0) err(e, std::string(h) + ": conclusion must contain exactly one !-formula");
            n.rule.principal = p;
        } else if (*kind == Kind::Bot) {
            if (e.items.size() > k && e.items[k].is_atom()) {
                n.rule.principal = static_cast<int>(parse_index(e.items[k++]));
            } else {
                auto it = std::find(n.rule.concl.begin(), n.rule.concl.end(), Formula::bot());
                if (it == n.rule.concl.end()) err(e, "bot: conclusion has no bot");
                n.rule.principal = static_cast<int>(it - n.rule.concl.begin());
            }
        } else {
            need(e.items.size() > k, "missing principal position");
            n.rule.principal = static_cast<int>(parse_index(e.items[k++]));
        }
        int id = reserve(std::move(n), e);
        std::vector<int> kids;
        for (std::size_t j = 0; j < ar; ++j) {
            need(e.items.size() > k, "missing premise");
            kids.push_back(node(e.items[k++]));
        }
        s.nodes[id].kids = std::move(kids);
        if (e.items.size() > k) {
            const Sexp& m = e.items[k++];
            if (!m.is_list() || m.head() != "map") err(m, "unexpected element");
            overrides.emplace_back(id, map_element(m, ar));
            s.nodes[id].explicit_map = true;
        }
        need(e.items.size() == k, "too many elements");
        if (cutf) cut_formulas.emplace_back(id, *cutf);
        return id;
    }

    std::size_t offset_of(int id) const {
        for (const auto& [i, off] : offsets)
            if (i == id) return off;
        return 0;
    }

    void finish() {
        for (std::size_t id = 0; id < s.nodes.size(); ++id) {
            SpecNode& n = s.nodes[id];
            if (n.tag == SpecNode::Tag::Nwb || n.tag == SpecNode::Tag::Nup) {
                int pr = principal_of_promotion(n.concl);
                if (pr < 0) throw SyntaxError("box conclusion must contain exactly one !-formula", offset_of(static_cast<int>(id)));
                for (int c : n.kids) {
                    auto l = infer_call_link(n.concl, pr, s.nodes[c].concl);
                    if (l.empty())
                        throw SyntaxError("call conclusion does not match the box conclusion", offset_of(c));
                    n.call_link.push_back(std::move(l));
                }
                continue;
            }
            if (n.tag != SpecNode::Tag::Rule || n.kids.empty()) {
                if (n.tag == SpecNode::Tag::Rule) {
                    n.rule.link.clear();
                    n.rule.act.clear();
                }
                continue;
            }
            std::vector<const Sequent*> ps;
            for (int c : n.kids) ps.push_back(&s.nodes[c].concl);
            auto ov = std::find_if(overrides.begin(), overrides.end(), [&](const auto& x) { return x.first == static_cast<int>(id); });
            if (ov != overrides.end()) {
                n.rule.link = ov->second.link;
                n.rule.act = ov->second.act;
            } else {
                const Formula* cf = nullptr;
                for (const auto& [i, f] : cut_formulas)
                    if (i == static_cast<int>(id)) cf = &f;
                if (!infer_maps(n.rule, ps, cf))
                    throw SyntaxError(std::string(kind_name(n.rule.kind)) + ": premises do not fit the conclusion " +
                                          print_sequent(n.concl),
                                      offset_of(static_cast<int>(id)));
            }
            if (auto e = check_rule(n.rule, ps))
                throw SyntaxError(*e, offset_of(static_cast<int>(id)));
        }
    }
};

}  // namespace

Spec parse_spec(std::string_view text) {
    auto forms = read_all(text);
    if (forms.size() != 1) throw SyntaxError("expected exactly one proof term", forms.empty() ? text.size() : forms[1].offset);
    Parser p;
    p.s.root = p.node(forms[0]);
    p.finish();
    return p.s;
}

Spec read_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

// ---------------------------------------------------------------------------
// printing

namespace {

struct Printer {
    const Spec& s;
    std::string out;

    void indent(int d) { out.append(static_cast<std::size_t>(2 * d), ' '); }

    void node(int id, int d) {
        const SpecNode& n = s.at(id);
        if (!n.name.empty()) {
            out += "(def " + n.name + "\n";
            indent(d + 1);
            body(id, d + 1);
            out += ")";
            return;
        }
        body(id, d);
    }

    void kids(const std::vector<int>& ks, int d) {
        for (int c : ks) {
            out += "\n";
            indent(d);
            node(c, d);
        }
    }

    std::string map_text(const Rule& r) {
        std::string m = "(map";
        for (std::size_t p = 0; p < r.link.size(); ++p) {
            m += " (";
            for (std::size_t q = 0; q < r.link[p].size(); ++q) {
                if (q) m += ' ';
                int v = r.link[p][q];
                if (v >= 0) {
                    m += std::to_string(v);
                } else {
                    auto k = std::find(r.act[p].begin(), r.act[p].end(), static_cast<int>(q)) - r.act[p].begin();
                    m += "a" + std::to_string(k);
                }
            }
            m += ")";
        }
        return m + ")";
    }

    void body(int id, int d) {
        const SpecNode& n = s.at(id);
        switch (n.tag) {
            case SpecNode::Tag::Ref: out += "(ref " + s.at(n.target).name + ")"; return;
            case SpecNode::Tag::Ext: out += "(ext " + s.at(n.target).name + " " + print_sequent(n.concl) + ")"; return;
            case SpecNode::Tag::Nwb:
            case SpecNode::Tag::Nup: {
                out += n.tag == SpecNode::Tag::Nwb ? "(nwb " : "(nup ";
                out += print_sequent(n.concl);
                out += "\n";
                indent(d + 1);
                out += "(calls";
                kids(n.kids, d + 2);
                out += ")\n";
                indent(d + 1);
                if (n.sel.type == Selector::Type::Oracle) {
                    out += "(sel oracle " + n.sel.oracle;
                    if (n.sel.offset) out += " " + std::to_string(n.sel.offset);
                    out += "))";
                } else {
                    out += "(sel";
                    if (!n.sel.prefix.empty()) {
                        out += " (prefix";
                        for (auto i : n.sel.prefix) out += " " + std::to_string(i);
                        out += ")";
                    }
                    out += " (loop";
                    for (auto i : n.sel.loop) out += " " + std::to_string(i);
                    out += ")))";
                }
                return;
            }
            case SpecNode::Tag::Rule: break;
        }
        const Rule& r = n.rule;
        switch (r.kind) {
            case Kind::Ax: out += "(ax " + print_formula(r.concl[0]) + ")"; return;
            case Kind::One: out += "(one)"; return;
            case Kind::Hyp: out += "(hyp " + print_sequent(r.concl) + ")"; return;
            default: break;
        }
        out += "(";
        out += kind_name(r.kind);
        out += " " + print_sequent(r.concl);
        std::vector<const Sequent*> ps;
        for (int c : n.kids) ps.push_back(&s.at(c).concl);
        Rule inferred = r;
        const Formula* cutf = nullptr;
        Formula cf;
        if (r.kind == Kind::Cut) {
            cf = s.at(n.kids[0]).concl[r.act[0][0]];
            cutf = &cf;
            out += " " + print_formula(cf);
        } else if (r.kind == Kind::Bot) {
            auto it = std::find(r.concl.begin(), r.concl.end(), Formula::bot());
            if (it - r.concl.begin() != r.principal) out += " " + std::to_string(r.principal);
        } else if (r.kind != Kind::Cp && r.kind != Kind::Fp && r.kind != Kind::Bp) {
            out += " " + std::to_string(r.principal);
        }
        bool same = infer_maps(inferred, ps, cutf) && inferred.link == r.link && inferred.act == r.act;
        kids(n.kids, d + 1);
        if (!same) {
            out += "\n";
            indent(d + 1);
            out += map_text(r);
        }
        out += ")";
    }
};

}  // namespace

std::string print_spec(const Spec& s) {
    Printer p{s, {}};
    p.node(s.root, 0);
    return p.out + "\n";
}

int add_node(Spec& s, SpecNode n) {
    s.nodes.push_back(std::move(n));
    return static_cast<int>(s.nodes.size()) - 1;
}

namespace {

int spec_of_rec(Spec& s, const Deriv& d) {
    SpecNode n;
    n.tag = SpecNode::Tag::Rule;
    n.rule = static_cast<const Rule&>(*d);
    n.concl = d->concl;
    int id = add_node(s, std::move(n));
    std::vector<int> kids;
    for (const auto& p : d->prem) kids.push_back(spec_of_rec(s, p));
    s.nodes[id].kids = std::move(kids);
    return id;
}

Deriv deriv_rec(const Spec& s, int id) {
    const SpecNode& n = s.at(id);
    if (n.tag != SpecNode::Tag::Rule) throw std::invalid_argument("spec is not a finite tree");
    std::vector<Deriv> prem;
    for (int c : n.kids) prem.push_back(deriv_rec(s, c));
    return make_node(n.rule, std::move(prem));
}

}  // namespace

Spec spec_of(const Deriv& d) {
    Spec s;
    s.root = spec_of_rec(s, d);
    return s;
}

bool is_finite_tree(const Spec& s) {
    return std::all_of(s.nodes.begin(), s.nodes.end(), [](const SpecNode& n) { return n.tag == SpecNode::Tag::Rule; });
}

Deriv deriv_of(const Spec& s) { return deriv_rec(s, s.root); }

std::string print_deriv(const Deriv& d) { return print_spec(spec_of(d)); }

Deriv parse_deriv(std::string_view text) { return deriv_of(parse_spec(text)); }

int graft(Spec& into, const Spec& from) {
    int base = static_cast<int>(into.nodes.size());
    for (SpecNode n : from.nodes) {
        for (int& k : n.kids) k += base;
        if (n.target >= 0) n.target += base;
        into.nodes.push_back(std::move(n));
    }
    return from.root + base;
}

Spec make_nwb(const Sequent& concl, std::vector<Spec> calls, Selector sel, bool nup) {
    Spec s;
    SpecNode n;
    n.tag = nup ? SpecNode::Tag::Nup : SpecNode::Tag::Nwb;
    n.concl = concl;
    n.sel = std::move(sel);
    s.root = add_node(s, std::move(n));
    int pr = principal_of_promotion(concl);
    if (pr < 0) throw std::invalid_argument("box conclusion must contain exactly one !-formula");
    for (const Spec& c : calls) {
        int id = graft(s, c);
        auto l = infer_call_link(concl, pr, s.at(id).concl);
        if (l.empty()) throw std::invalid_argument("call conclusion does not match the box conclusion");
        s.nodes[s.root].kids.push_back(id);
        s.nodes[s.root].call_link.push_back(std::move(l));
    }
    return s;
}

// ---------------------------------------------------------------------------
// validation

std::string describe_node(const Spec& s, int id) {
    const SpecNode& n = s.at(id);
    std::string what;
    switch (n.tag) {
        case SpecNode::Tag::Rule: what = kind_name(n.rule.kind); break;
        case SpecNode::Tag::Ref: what = "ref " + s.at(n.target).name; break;
        case SpecNode::Tag::Ext: what = "ext " + s.at(n.target).name; break;
        case SpecNode::Tag::Nwb: what = "nwb"; break;
        case SpecNode::Tag::Nup: what = "nup"; break;
    }
    return what + " " + print_sequent(n.concl);
}

std::optional<SpecViolation> validate(const Spec& s, System sys) {
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const SpecNode& n = s.nodes[i];
        const int id = static_cast<int>(i);
        auto bad = [&](const std::string& c) { return SpecViolation{id, c}; };
        switch (n.tag) {
            case SpecNode::Tag::Rule: {
                if (!system_allows(sys, n.rule.kind))
                    return bad(std::string("rule ") + kind_name(n.rule.kind) + " is not in system " + system_name(sys));
                std::vector<const Sequent*> ps;
                for (int c : n.kids) ps.push_back(&s.at(c).concl);
                if (auto e = check_rule(n.rule, ps)) return bad(*e);
                break;
            }
            case SpecNode::Tag::Ref:
            case SpecNode::Tag::Ext: {
                if (sys == System::PLL || sys == System::oPLL || sys == System::MELL || sys == System::oMELL || sys == System::nuPLL)
                    return bad("back-edges are not allowed in a finite system");
                if (n.tag == SpecNode::Tag::Ref && !(n.concl == s.at(n.target).concl))
                    return bad("back-edge target has a different sequent");
                if (n.tag == SpecNode::Tag::Ext && !n.ext_prefix.empty()) {
                    // the passive prefix flows into first premises only; it may not
                    // reach a leaf or a promotion
                    std::vector<int> todo{n.target};
                    std::vector<char> seen(s.nodes.size(), 0);
                    while (!todo.empty()) {
                        int t = todo.back();
                        todo.pop_back();
                        if (seen[t]) continue;
                        seen[t] = 1;
                        const SpecNode& m = s.at(t);
                        if (m.tag == SpecNode::Tag::Ref || m.tag == SpecNode::Tag::Ext) {
                            todo.push_back(m.target);
                            continue;
                        }
                        if (m.tag != SpecNode::Tag::Rule) return bad("passive context cannot enter a box");
                        Kind k = m.rule.kind;
                        if (k == Kind::Hyp) continue;
                        if (m.kids.empty() || k == Kind::Cp || k == Kind::Fp || k == Kind::Bp || k == Kind::Ex)
                            return bad(std::string("passive context cannot pass through ") + kind_name(k));
                        todo.push_back(m.kids[0]);
                    }
                }
                break;
            }
            case SpecNode::Tag::Nwb:
            case SpecNode::Tag::Nup: {
                if (n.tag == SpecNode::Tag::Nwb && !system_allows(sys, Kind::Cp)) return bad(std::string("nwb needs cp, not in system ") + system_name(sys));
                if (n.tag == SpecNode::Tag::Nup && !system_allows(sys, Kind::Nup)) return bad(std::string("nup is not in system ") + system_name(sys));
                int pr = principal_of_promotion(n.concl);
                if (pr < 0) return bad("box conclusion must be ?Γ, !A");
                for (std::size_t c = 0; c < n.concl.size(); ++c)
                    if (static_cast<int>(c) != pr && !n.concl[c].is_whynot()) return bad("box context must be ?-formulas (?Γ side condition)");
                if (n.kids.empty()) return bad("box needs at least one call");
                if (n.call_link.size() != n.kids.size()) return bad("call correspondence missing");
                for (std::size_t k = 0; k < n.kids.size(); ++k) {
                    Rule r;
                    r.kind = Kind::Fp;
                    r.concl = n.concl;
                    r.principal = pr;
                    r.link = {n.call_link[k]};
                    r.act = {{}};
                    std::vector<const Sequent*> ps{&s.at(n.kids[k]).concl};
                    if (auto e = check_rule(r, ps)) return bad("call " + std::to_string(k) + ": " + *e);
                }
                if (n.sel.max_index() >= n.kids.size()) return bad("selector refers to a missing call");
                break;
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// unfolding

namespace {

struct Unfolder {
    const Spec& s;
    std::size_t h;

    Deriv go(int id, std::size_t height, const Sequent& prefix, std::vector<std::size_t>& outer) {
        const SpecNode& n = s.at(id);
        if (n.tag == SpecNode::Tag::Ref) return go(n.target, height, prefix, outer);
        if (n.tag == SpecNode::Tag::Ext) {
            Sequent p2 = prefix;
            p2.insert(p2.end(), n.ext_prefix.begin(), n.ext_prefix.end());
            return go(n.target, height, p2, outer);
        }
        Sequent concl = prefix;
        concl.insert(concl.end(), n.concl.begin(), n.concl.end());
        if (n.tag == SpecNode::Tag::Nup) throw std::invalid_argument("nup cannot be unfolded; translate it to PLLinf first");
        if (n.tag == SpecNode::Tag::Nwb) {
            if (!prefix.empty()) throw std::invalid_argument("passive context cannot enter a box");
            return box(id, 0, height, outer);
        }
        if (height >= h) {
            bool leaf = n.kids.empty() && n.rule.kind != Kind::Hyp && prefix.empty();
            if (!leaf) return make_hyp(concl);
        }
        Rule r = n.rule;
        const int k = static_cast<int>(prefix.size());
        if (k > 0) {
            if (n.kids.empty() && r.kind != Kind::Hyp) throw std::invalid_argument("passive context reached a leaf");
            r.concl = concl;
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
        for (std::size_t p = 0; p < n.kids.size(); ++p) {
            static const Sequent none;
            prem.push_back(go(n.kids[p], height + 1, p == 0 ? prefix : none, outer));
        }
        return make_node(std::move(r), std::move(prem));
    }

    Deriv box(int id, std::size_t j, std::size_t height, std::vector<std::size_t>& outer) {
        const SpecNode& n = s.at(id);
        if (height >= h) return make_hyp(n.concl);
        std::size_t which = n.sel.at(outer, j);
        if (which >= n.kids.size()) throw std::out_of_range("selector picked a missing call");
        outer.push_back(j);
        Deriv left = go(n.kids[which], height + 1, {}, outer);
        outer.pop_back();
        Deriv right = box(id, j + 1, height + 1, outer);
        Rule r;
        r.kind = Kind::Cp;
        r.concl = n.concl;
        r.principal = principal_of_promotion(n.concl);
        std::vector<int> id_link(n.concl.size());
        std::iota(id_link.begin(), id_link.end(), 0);
        r.link = {n.call_link[which], id_link};
        r.act = {{}, {}};
        return make_node(std::move(r), {left, right});
    }
};

}  // namespace

Deriv unfold(const Spec& s, std::size_t h) {
    Unfolder u{s, h};
    std::vector<std::size_t> outer;
    return u.go(s.root, 0, {}, outer);
}

bool approx_leq(const Deriv& d, const Spec& s) {
    if (!(d->concl == s.conclusion())) return false;
    return approx_leq(d, unfold(s, levels(d)));
}

// ---------------------------------------------------------------------------
// depth

namespace {

// true when `id` is a cp rule node whose right premises lead back to it
// through cp rules and refs only (a box written as an explicit graph)
bool is_cp_cycle_root(const Spec& s, int id) {
    const SpecNode& n = s.at(id);
    if (n.tag != SpecNode::Tag::Rule || n.rule.kind != Kind::Cp) return false;
    int cur = n.kids[1];
    for (std::size_t steps = 0; steps <= s.nodes.size(); ++steps) {
        const SpecNode& m = s.at(cur);
        if (m.tag == SpecNode::Tag::Ref) {
            if (m.target == id) return true;
            cur = m.target;
            continue;
        }
        if (m.tag != SpecNode::Tag::Rule || m.rule.kind != Kind::Cp) return false;
        cur = m.kids[1];
    }
    return false;
}

}  // namespace

std::optional<std::size_t> depth(const Spec& s) {
    // infinite when a back-edge closes a cycle through a left premise of cp
    std::vector<int> parent(s.nodes.size(), -1);
    std::vector<char> left_edge(s.nodes.size(), 0);  // edge parent->node enters a call
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const SpecNode& n = s.nodes[i];
        for (std::size_t k = 0; k < n.kids.size(); ++k) {
            parent[n.kids[k]] = static_cast<int>(i);
            bool call = n.tag == SpecNode::Tag::Nwb || n.tag == SpecNode::Tag::Nup ||
                        (n.tag == SpecNode::Tag::Rule && n.rule.kind == Kind::Cp && k == 0);
            left_edge[n.kids[k]] = call;
        }
    }
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const SpecNode& n = s.nodes[i];
        if (n.tag != SpecNode::Tag::Ref && n.tag != SpecNode::Tag::Ext) continue;
        for (int cur = static_cast<int>(i); cur != n.target && cur >= 0; cur = parent[cur])
            if (left_edge[cur]) return std::nullopt;
    }
    std::function<std::size_t(int)> go = [&](int id) -> std::size_t {
        const SpecNode& n = s.at(id);
        std::size_t m = 0;
        switch (n.tag) {
            case SpecNode::Tag::Ref:
            case SpecNode::Tag::Ext: return 0;
            case SpecNode::Tag::Nwb:
            case SpecNode::Tag::Nup:
                for (int c : n.kids) m = std::max(m, go(c));
                return m + 1;
            case SpecNode::Tag::Rule:
                for (int c : n.kids) m = std::max(m, go(c));
                if (is_cp_cycle_root(s, id)) {
                    // count the explicit box once: its calls are the left premises on the cycle
                    return m + 1;
                }
                return m;
        }
        return m;
    };
    return go(s.root);
}

}  // namespace pllk

// ---------------------------------------------------------------------------
// decomposition

namespace pllk {

namespace {

// copies the subtree rooted at id; back-edges must stay inside it
Spec extract(const Spec& s, int id) {
    Spec out;
    std::map<int, int> remap;
    std::function<int(int)> copy = [&](int i) -> int {
        SpecNode n = s.at(i);
        int nid = add_node(out, SpecNode{});
        remap[i] = nid;
        std::vector<int> kids;
        for (int c : n.kids) kids.push_back(copy(c));
        n.kids = std::move(kids);
        if (n.target >= 0) {
            auto it = remap.find(n.target);
            if (it == remap.end()) throw NotDecomposable("a back-edge leaves the box at " + describe_node(s, i));
            n.target = it->second;
        }
        out.nodes[nid] = std::move(n);
        return nid;
    };
    out.root = copy(id);
    return out;
}

}  // namespace

Decomposition decompose(const Spec& s) {
    auto fe = check_finitely_expandable(s);
    if (fe.verdict != Verdict::Holds) throw NotDecomposable("not finitely expandable: " + verdict_text(fe));
    auto p = check_progressing(s);
    if (p.verdict != Verdict::Holds) throw NotDecomposable("not progressing: " + verdict_text(p));
    Decomposition out;
    std::function<Deriv(int, const Address&)> build = [&](int id, const Address& at) -> Deriv {
        const SpecNode& n = s.at(id);
        if (n.tag == SpecNode::Tag::Nwb || n.tag == SpecNode::Tag::Nup || is_cp_cycle_root(s, id)) {
            out.boxes.push_back({at, extract(s, id)});
            return make_hyp(n.concl);
        }
        if (n.tag != SpecNode::Tag::Rule) throw NotDecomposable("cycle outside any box at " + print_address(at));
        std::vector<Deriv> prem;
        for (std::size_t k = 0; k < n.kids.size(); ++k)
            prem.push_back(build(n.kids[k], at + static_cast<char>('1' + k)));
        return make_node(n.rule, std::move(prem));
    };
    out.base = build(s.root, "");
    return out;
}

Spec regraft(const Decomposition& d) {
    Spec s = spec_of(d.base);
    for (const Box& b : d.boxes) {
        int parent = -1, at = s.root;
        std::size_t digit = 0;
        for (char ch : b.at) {
            parent = at;
            digit = static_cast<std::size_t>(ch - '1');
            at = s.nodes[at].kids.at(digit);
        }
        int root = graft(s, b.nwb);
        if (parent < 0) s.root = root;
        else s.nodes[parent].kids[digit] = root;
    }
    return s;
}

}  // namespace pllk
