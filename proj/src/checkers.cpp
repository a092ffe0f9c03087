#include "pllk/checkers.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace pllk {

std::string verdict_text(const CriterionReport& r) {
    switch (r.verdict) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        case Verdict::Unknown: return "unknown(" + std::to_string(r.bound) + ")";
    }
    return "unknown";
}

namespace {

// A thread relation between the conclusion positions of two graph nodes,
// restricted to !-formulas.
struct Arc {
    int from, to;
    bool prog;
    auto operator<=>(const Arc&) const = default;
};
using Rel = std::vector<Arc>;

void normalize(Rel& r) {
    std::sort(r.begin(), r.end());
    Rel out;
    for (const Arc& a : r) {
        if (!out.empty() && out.back().from == a.from && out.back().to == a.to) {
            out.back().prog = out.back().prog || a.prog;
            continue;
        }
        out.push_back(a);
    }
    r = std::move(out);
}

Rel compose(const Rel& a, const Rel& b) {
    Rel out;
    for (const Arc& x : a)
        for (const Arc& y : b)
            if (x.to == y.from) out.push_back({x.from, y.to, x.prog || y.prog});
    normalize(out);
    return out;
}

// true when iterating r forever can follow a thread through infinitely many progress arcs
bool has_progress_cycle(const Rel& r, std::size_t npos) {
    // reach[i][j]: 0 none, 1 path, 2 path with progress
    std::vector<std::vector<int>> reach(npos, std::vector<int>(npos, 0));
    for (const Arc& a : r) reach[a.from][a.to] = std::max(reach[a.from][a.to], a.prog ? 2 : 1);
    for (std::size_t k = 0; k < npos; ++k)
        for (std::size_t i = 0; i < npos; ++i) {
            if (!reach[i][k]) continue;
            for (std::size_t j = 0; j < npos; ++j) {
                if (!reach[k][j]) continue;
                int v = (reach[i][k] == 2 || reach[k][j] == 2) ? 2 : 1;
                reach[i][j] = std::max(reach[i][j], v);
            }
        }
    for (std::size_t i = 0; i < npos; ++i)
        if (reach[i][i] == 2) return true;
    return false;
}

enum class EdgeType { Plain, Left, Right };

struct Edge {
    int to;
    Address word;
    EdgeType type;
    Rel rel;
};

// Branch graph of a spec. Every spec node is a graph node; an nwb contributes a
// second node (its tail, the cp chain from index 1 on).
struct Graph {
    const Spec& s;
    int n = 0;
    std::vector<std::vector<Edge>> out;
    std::vector<std::size_t> npos;

    explicit Graph(const Spec& sp) : s(sp) {
        const int N = static_cast<int>(s.nodes.size());
        n = 2 * N;
        out.resize(static_cast<std::size_t>(n));
        npos.resize(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < N; ++i) {
            const SpecNode& nd = s.at(i);
            npos[i] = nd.concl.size();
            npos[i + N] = nd.concl.size();
            switch (nd.tag) {
                case SpecNode::Tag::Rule: rule_edges(i); break;
                case SpecNode::Tag::Ref: {
                    Rel r;
                    for (std::size_t q = 0; q < nd.concl.size(); ++q)
                        if (nd.concl[q].is_ofcourse()) r.push_back({int(q), int(q), false});
                    out[i].push_back({nd.target, "", EdgeType::Plain, r});
                    break;
                }
                case SpecNode::Tag::Ext: {
                    Rel r;
                    const int k = static_cast<int>(nd.ext_prefix.size());
                    for (std::size_t q = static_cast<std::size_t>(k); q < nd.concl.size(); ++q)
                        if (nd.concl[q].is_ofcourse()) r.push_back({int(q), int(q) - k, false});
                    out[i].push_back({nd.target, "", EdgeType::Plain, r});
                    break;
                }
                case SpecNode::Tag::Nwb:
                case SpecNode::Tag::Nup: box_edges(i, N); break;
            }
        }
    }

    void rule_edges(int i) {
        const SpecNode& nd = s.at(i);
        const Rule& r = nd.rule;
        for (std::size_t p = 0; p < nd.kids.size(); ++p) {
            EdgeType t = EdgeType::Plain;
            if (r.kind == Kind::Cp) t = p == 0 ? EdgeType::Left : EdgeType::Right;
            Rel rel;
            if (!is_correspondence(r.kind, static_cast<int>(p))) {
                const Sequent& pc = s.at(nd.kids[p]).concl;
                for (std::size_t q = 0; q < r.link[p].size(); ++q) {
                    int c = r.link[p][q];
                    if (c < 0 || !pc[q].is_ofcourse()) continue;
                    bool prog = r.kind == Kind::Cp && p == 1 && c == r.principal;
                    rel.push_back({c, static_cast<int>(q), prog});
                }
            }
            out[i].push_back({nd.kids[p], std::to_string(p + 1), t, rel});
        }
    }

    void box_edges(int i, int N) {
        const SpecNode& nd = s.at(i);
        int pr = -1;
        for (std::size_t c = 0; c < nd.concl.size(); ++c)
            if (nd.concl[c].is_ofcourse()) pr = static_cast<int>(c);
        Rel chain{{pr, pr, true}};
        const std::vector<std::size_t> outer;
        out[i].push_back({nd.kids[nd.sel.at(outer, 0)], "1", EdgeType::Left, {}});
        out[i].push_back({i + N, "2", EdgeType::Right, chain});
        out[i + N].push_back({i + N, "2", EdgeType::Right, chain});
        // calls used from index 1 on, each reached at its first index
        for (std::size_t k = 0; k < nd.kids.size(); ++k) {
            std::size_t first = 0;
            for (std::size_t j = 1; j < 256 && !first; ++j)
                if (nd.sel.at(outer, j) == k) first = j;
            bool oracle = nd.sel.type == Selector::Type::Oracle;
            if (!first && !oracle) continue;
            if (!first) first = 1;
            out[i + N].push_back({nd.kids[k], std::string(first - 1, '2') + "1", EdgeType::Left, {}});
        }
    }

    bool is_cut_or_qb(int v) const {
        if (v >= static_cast<int>(s.nodes.size())) return false;
        const SpecNode& nd = s.at(v);
        return nd.tag == SpecNode::Tag::Rule && (nd.rule.kind == Kind::Cut || nd.rule.kind == Kind::Qb);
    }

    // Tarjan over edges accepted by `keep`
    std::vector<int> scc(const std::function<bool(const Edge&)>& keep) const {
        std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
        std::vector<char> on(n, 0);
        std::vector<int> stack;
        int counter = 0, ncomp = 0;
        std::function<void(int)> visit = [&](int v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on[v] = 1;
            for (const Edge& e : out[v]) {
                if (!keep(e)) continue;
                if (index[e.to] < 0) {
                    visit(e.to);
                    low[v] = std::min(low[v], low[e.to]);
                } else if (on[e.to]) {
                    low[v] = std::min(low[v], index[e.to]);
                }
            }
            if (low[v] == index[v]) {
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on[w] = 0;
                    comp[w] = ncomp;
                    if (w == v) break;
                }
                ++ncomp;
            }
        };
        for (int v = 0; v < n; ++v)
            if (index[v] < 0) visit(v);
        return comp;
    }

    // shortest word from the root to every node
    std::vector<std::optional<Address>> prefixes() const {
        std::vector<std::optional<Address>> w(n);
        std::deque<int> q{s.root};
        w[s.root] = "";
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (const Edge& e : out[v])
                if (!w[e.to]) {
                    w[e.to] = *w[v] + e.word;
                    q.push_back(e.to);
                }
        }
        return w;
    }

    // a cycle through v using only accepted edges inside v's component
    std::optional<std::vector<const Edge*>> cycle_through(int v, const std::vector<int>& comp,
                                                          const std::function<bool(const Edge&)>& keep) const {
        std::vector<const Edge*> via(n, nullptr);
        std::vector<int> from(n, -1);
        std::vector<char> seen(n, 0);
        std::deque<int> q;
        for (const Edge& e : out[v]) {
            if (!keep(e) || comp[e.to] != comp[v]) continue;
            if (e.to == v) return std::vector<const Edge*>{&e};
            if (!seen[e.to]) {
                seen[e.to] = 1;
                via[e.to] = &e;
                from[e.to] = v;
                q.push_back(e.to);
            }
        }
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (const Edge& e : out[u]) {
                if (!keep(e) || comp[e.to] != comp[v]) continue;
                if (e.to == v) {
                    std::vector<const Edge*> path{&e};
                    for (int x = u; x != v; x = from[x]) path.push_back(via[x]);
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                if (!seen[e.to]) {
                    seen[e.to] = 1;
                    via[e.to] = &e;
                    from[e.to] = u;
                    q.push_back(e.to);
                }
            }
        }
        return std::nullopt;
    }
};

Address word_of(const std::vector<const Edge*>& path) {
    Address w;
    for (const Edge* e : path) w += e->word;
    return w;
}

CriterionReport failing(const Graph& g, int start, const std::vector<const Edge*>& cyc, std::string detail) {
    CriterionReport r;
    r.verdict = Verdict::Fails;
    auto pre = g.prefixes();
    r.prefix = pre[start] ? *pre[start] : "";
    r.cycle = word_of(cyc);
    r.detail = std::move(detail);
    return r;
}

bool in_cycle(const Graph& g, const std::vector<int>& comp, int v, const std::function<bool(const Edge&)>& keep) {
    for (const Edge& e : g.out[v])
        if (keep(e) && comp[e.to] == comp[v]) return true;
    return false;
}

}  // namespace

CriterionReport check_weak_progressing(const Spec& s) {
    Graph g(s);
    auto keep = [](const Edge& e) { return e.type != EdgeType::Right; };
    auto comp = g.scc(keep);
    auto pre = g.prefixes();
    for (int v = 0; v < g.n; ++v) {
        if (!pre[v] || !in_cycle(g, comp, v, keep)) continue;
        auto cyc = g.cycle_through(v, comp, keep);
        if (cyc) return failing(g, v, *cyc, "infinite branch with no right premise of cp from some point on");
    }
    return {};
}

CriterionReport check_finitely_expandable(const Spec& s) {
    Graph g(s);
    auto keep = [](const Edge&) { return true; };
    auto comp = g.scc(keep);
    auto pre = g.prefixes();
    for (int v = 0; v < g.n; ++v) {
        if (!pre[v] || !g.is_cut_or_qb(v) || !in_cycle(g, comp, v, keep)) continue;
        auto cyc = g.cycle_through(v, comp, keep);
        if (cyc) {
            const char* what = kind_name(s.at(v).rule.kind);
            return failing(g, v, *cyc, std::string("branch with infinitely many ") + what);
        }
    }
    return {};
}

CriterionReport check_progressing(const Spec& s, std::size_t bound) {
    if (check_finitely_expandable(s).verdict == Verdict::Holds) return check_weak_progressing(s);

    Graph g(s);
    auto all = [](const Edge&) { return true; };
    auto comp = g.scc(all);
    auto pre = g.prefixes();

    // elementary cycles, each checked for a thread that returns with progress
    const std::size_t max_cycles = 20000;
    std::size_t found = 0;
    bool truncated = false;
    std::optional<CriterionReport> bad;
    for (int start = 0; start < g.n && !bad && !truncated; ++start) {
        if (!pre[start]) continue;
        std::vector<const Edge*> path;
        std::vector<char> on(g.n, 0);
        on[start] = 1;
        std::function<void(int)> dfs = [&](int v) {
            if (bad || truncated) return;
            for (const Edge& e : g.out[v]) {
                if (comp[e.to] != comp[start] || e.to < start) continue;
                if (e.to == start) {
                    path.push_back(&e);
                    if (++found > max_cycles) {
                        truncated = true;
                        path.pop_back();
                        return;
                    }
                    Rel r;
                    for (std::size_t q = 0; q < g.npos[start]; ++q) r.push_back({int(q), int(q), false});
                    for (const Edge* x : path) r = compose(r, x->rel);
                    if (!has_progress_cycle(r, g.npos[start]))
                        bad = failing(g, start, path, "cycle " + word_of(path) + " carries no progressing !-thread");
                    path.pop_back();
                    if (bad) return;
                    continue;
                }
                if (on[e.to]) continue;
                on[e.to] = 1;
                path.push_back(&e);
                dfs(e.to);
                path.pop_back();
                on[e.to] = 0;
                if (bad || truncated) return;
            }
        };
        dfs(start);
    }
    if (bad) return *bad;

    // size-change closure: every idempotent loop must carry a progressing arc
    struct Entry {
        int from, to;
        Rel rel;
        Address word;
    };
    std::map<std::tuple<int, int, Rel>, std::size_t> seen;
    std::vector<Entry> closure;
    auto rel_key = [](const Rel& r) { return r; };
    for (int v = 0; v < g.n; ++v) {
        if (!pre[v]) continue;
        for (const Edge& e : g.out[v]) {
            if (comp[e.to] != comp[v]) continue;
            auto key = std::make_tuple(v, e.to, rel_key(e.rel));
            if (seen.count(key)) continue;
            seen[key] = closure.size();
            closure.push_back({v, e.to, e.rel, e.word});
        }
    }
    const std::size_t budget = 50000;
    for (std::size_t i = 0; i < closure.size(); ++i) {
        if (closure.size() > budget) {
            CriterionReport r;
            r.verdict = Verdict::Unknown;
            r.bound = bound;
            r.detail = "thread analysis exceeded its budget";
            return r;
        }
        for (std::size_t j = 0; j <= i; ++j) {
            for (int pass = 0; pass < 2; ++pass) {
                const Entry& a = pass ? closure[j] : closure[i];
                const Entry& b = pass ? closure[i] : closure[j];
                if (a.to != b.from) continue;
                Rel r = compose(a.rel, b.rel);
                auto key = std::make_tuple(a.from, b.to, r);
                if (seen.count(key)) continue;
                Address w = a.word + b.word;
                seen[key] = closure.size();
                closure.push_back({a.from, b.to, std::move(r), std::move(w)});
            }
        }
    }
    for (const Entry& e : closure) {
        if (e.from != e.to) continue;
        if (!(compose(e.rel, e.rel) == e.rel)) continue;
        bool ok = std::any_of(e.rel.begin(), e.rel.end(), [](const Arc& a) { return a.from == a.to && a.prog; });
        if (!ok) {
            CriterionReport r;
            r.verdict = Verdict::Fails;
            r.prefix = *pre[e.from];
            r.cycle = e.word;
            r.detail = "loop " + e.word + " carries no progressing !-thread";
            return r;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------

RegularityReport check_regularity(const Spec& s) {
    RegularityReport out;
    // walk the tree, remembering whether we are inside a call of some box
    std::optional<int> nested_sensitive;
    std::optional<int> ext_node;
    std::optional<int> nonperiodic, unknown;
    std::function<void(int, bool)> walk = [&](int id, bool in_call) {
        const SpecNode& n = s.at(id);
        switch (n.tag) {
            case SpecNode::Tag::Ref: return;
            case SpecNode::Tag::Ext:
                if (!n.ext_prefix.empty() && !ext_node) ext_node = id;
                return;
            case SpecNode::Tag::Nwb:
            case SpecNode::Tag::Nup: {
                if (n.sel.context_sensitive()) {
                    if (in_call && !nested_sensitive) nested_sensitive = id;
                } else if (n.sel.periodicity() == Periodicity::No && !nonperiodic) {
                    nonperiodic = id;
                } else if (n.sel.periodicity() == Periodicity::Unknown && !unknown) {
                    unknown = id;
                }
                for (int c : n.kids) walk(c, true);
                return;
            }
            case SpecNode::Tag::Rule:
                for (std::size_t p = 0; p < n.kids.size(); ++p)
                    walk(n.kids[p], in_call || (n.rule.kind == Kind::Cp && p == 0));
                return;
        }
    };
    walk(s.root, false);
    if (nested_sensitive) {
        out.weakly_regular.verdict = Verdict::Fails;
        out.weakly_regular.detail = "selector of " + describe_node(s, *nested_sensitive) +
                                    " depends on the enclosing index: infinitely many distinct calls";
    }
    if (ext_node) {
        out.regular.verdict = Verdict::Fails;
        out.regular.detail = "back-edge " + describe_node(s, *ext_node) + " grows the sequent";
    } else if (nested_sensitive) {
        out.regular = out.weakly_regular;
    } else if (nonperiodic) {
        out.regular.verdict = Verdict::Fails;
        out.regular.detail = "selector of " + describe_node(s, *nonperiodic) + " is not eventually periodic";
    } else if (unknown) {
        out.regular.verdict = Verdict::Unknown;
        out.regular.bound = 64;
        out.regular.detail = "periodicity of the selector of " + describe_node(s, *unknown) + " is not known";
    }
    return out;
}

// ---------------------------------------------------------------------------
// threads on finite trees

namespace {

// premise and position of the parent of conclusion occurrence c, if any
std::optional<std::pair<int, int>> parent_of(const Node& n, int c) {
    for (std::size_t p = 0; p < n.link.size(); ++p) {
        if (is_correspondence(n.kind, static_cast<int>(p))) continue;
        for (std::size_t q = 0; q < n.link[p].size(); ++q)
            if (n.link[p][q] == c) return std::make_pair(static_cast<int>(p), static_cast<int>(q));
    }
    return std::nullopt;
}

}  // namespace

Thread threads_from(const Deriv& d, const Address& start, int pos, std::size_t bound) {
    Deriv cur = subderivation_at(d, start);
    if (pos < 0 || static_cast<std::size_t>(pos) >= cur->concl.size()) throw std::out_of_range("position out of range");
    const Formula& f = cur->concl[pos];
    if (!f.is_ofcourse() && !f.is_whynot()) throw std::invalid_argument("thread must start at a ! or ? formula");
    Thread t;
    t.bang = f.is_ofcourse();
    Address at = start;
    int c = pos;
    t.steps.push_back({at, c});
    while (t.steps.size() <= bound) {
        if (cur->kind == Kind::Cp && c == cur->principal) t.progress.push_back(t.steps.size() - 1);
        auto par = parent_of(*cur, c);
        if (!par) break;
        const Deriv& next = cur->prem[par->first];
        const Formula& g = next->concl[par->second];
        if (t.bang ? !g.is_ofcourse() : !g.is_whynot()) break;
        cur = next;
        at += static_cast<char>('1' + par->first);
        c = par->second;
        t.steps.push_back({at, c});
    }
    if (t.steps.size() > bound + 1) t.steps.resize(bound + 1);
    return t;
}

Thread threads_from(const Spec& s, const Address& start, int pos, std::size_t bound) {
    return threads_from(unfold(s, start.size() + bound + 1), start, pos, bound);
}

namespace {

struct PathStep {
    const Node* node;
    int digit;  // 0-based premise taken
};

// Follows a !-thread along a fixed branch. Returns the number of steps it
// survives and whether it passed a progress point.
std::pair<std::size_t, bool> follow(const std::vector<PathStep>& path, std::size_t from, int pos) {
    bool prog = false;
    int c = pos;
    std::size_t k = from;
    for (; k < path.size(); ++k) {
        const Node& n = *path[k].node;
        if (n.kind == Kind::Cp && path[k].digit == 1 && c == n.principal) prog = true;
        int p = path[k].digit;
        if (is_correspondence(n.kind, p)) break;
        int next = -1;
        for (std::size_t q = 0; q < n.link[p].size(); ++q)
            if (n.link[p][q] == c) next = static_cast<int>(q);
        if (next < 0 || !n.prem[p]->concl[next].is_ofcourse()) break;
        c = next;
    }
    return {k - from, prog};
}

bool any_progressing_thread(const std::vector<PathStep>& path, std::size_t from) {
    const Node& n = *path[from].node;
    for (std::size_t q = 0; q < n.concl.size(); ++q) {
        if (!n.concl[q].is_ofcourse()) continue;
        auto [len, prog] = follow(path, from, static_cast<int>(q));
        if (len == path.size() - from && prog) return true;
    }
    return false;
}

}  // namespace

bool replay_witness(const Spec& s, const CriterionReport& r, Criterion c) {
    if (r.verdict != Verdict::Fails || r.cycle.empty()) return false;
    const Address w = r.prefix + r.cycle + r.cycle + r.cycle;
    Deriv d = unfold(s, w.size() + 1);
    std::vector<PathStep> path;
    const Node* cur = d.get();
    for (char ch : w) {
        int p = ch - '1';
        if (cur->kind == Kind::Hyp || p < 0 || static_cast<std::size_t>(p) >= cur->prem.size()) return false;
        path.push_back({cur, p});
        cur = cur->prem[p].get();
    }
    const std::size_t start = r.prefix.size(), len = r.cycle.size();
    switch (c) {
        case Criterion::WeakProgressing:
            for (std::size_t k = start; k < path.size(); ++k)
                if (path[k].node->kind == Kind::Cp && path[k].digit == 1) return false;
            return true;
        case Criterion::FinitelyExpandable:
            for (int rep = 0; rep < 3; ++rep) {
                bool hit = false;
                for (std::size_t k = start + rep * len; k < start + (rep + 1) * len; ++k)
                    hit = hit || path[k].node->kind == Kind::Cut || path[k].node->kind == Kind::Qb;
                if (!hit) return false;
            }
            return true;
        case Criterion::Progressing: {
            // no !-thread from the start of the first repetition survives all three with progress
            std::vector<PathStep> tail(path.begin() + static_cast<std::ptrdiff_t>(start), path.end());
            return !any_progressing_thread(tail, 0);
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// bounded forms

bool bounded_weak_progressing(const Deriv& d, std::size_t window) {
    // only hyp leaves stand for cut-off infinite branches
    std::function<bool(const Node&, std::size_t)> go = [&](const Node& n, std::size_t run) {
        if (n.kind == Kind::Hyp) return run <= window;
        for (std::size_t p = 0; p < n.prem.size(); ++p) {
            bool right = n.kind == Kind::Cp && p == 1;
            if (!go(*n.prem[p], right ? 0 : run + 1)) return false;
        }
        return true;
    };
    return go(*d, 0);
}

bool bounded_finitely_expandable(const Deriv& d, std::size_t limit) {
    std::function<bool(const Node&, std::size_t)> go = [&](const Node& n, std::size_t count) {
        if (n.kind == Kind::Cut || n.kind == Kind::Qb) ++count;
        if (count > limit) return false;
        for (const auto& p : n.prem)
            if (!go(*p, count)) return false;
        return true;
    };
    return go(*d, 0);
}

bool bounded_progressing(const Deriv& d, std::size_t window) {
    std::vector<PathStep> path;
    std::function<bool(const Node&)> go = [&](const Node& n) {
        if (n.kind == Kind::Hyp) {
            if (path.size() < window || window == 0) return true;
            const std::size_t from = path.size() - window;
            for (std::size_t k = from; k < path.size(); ++k)
                if (path[k].node->kind == Kind::Cp && path[k].digit == 0) return true;
            return any_progressing_thread(path, from);
        }
        for (std::size_t p = 0; p < n.prem.size(); ++p) {
            path.push_back({&n, static_cast<int>(p)});
            bool ok = go(*n.prem[p]);
            path.pop_back();
            if (!ok) return false;
        }
        return true;
    };
    return go(*d);
}

}  // namespace pllk
