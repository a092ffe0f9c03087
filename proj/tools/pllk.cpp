// pllk: command-line front end for the proof kernel.
// Exit codes: 0 ok, 1 a criterion fails, 2 parse or validation error, 3 out of fuel.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pllk/checkers.hpp"
#include "pllk/cutelim.hpp"
#include "pllk/relsem.hpp"
#include "pllk/translate.hpp"

using namespace pllk;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kFails = 1, kInput = 2, kFuel = 3 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool any_node(const Spec& s, const std::function<bool(const SpecNode&)>& p) {
    for (const auto& n : s.nodes)
        if (p(n)) return true;
    return false;
}

System detect_system(const Spec& s) {
    auto has_kind = [&](Kind k) {
        return any_node(s, [k](const SpecNode& n) { return n.tag == SpecNode::Tag::Rule && n.rule.kind == k; });
    };
    const bool open = has_kind(Kind::Hyp);
    if (any_node(s, [](const SpecNode& n) { return n.tag == SpecNode::Tag::Nup; })) return System::nuPLL;
    if (has_kind(Kind::Qqd)) return System::MELLinf;
    if (has_kind(Kind::Qd) || has_kind(Kind::Qc) || has_kind(Kind::Bp)) return open ? System::oMELL : System::MELL;
    bool infinite = has_kind(Kind::Cp) || any_node(s, [](const SpecNode& n) { return n.tag != SpecNode::Tag::Rule; });
    if (infinite) return open ? System::oPLLinf : System::PLLinf;
    return open ? System::oPLL : System::PLL;
}

Spec load(const std::string& path) {
    try {
        return read_spec_file(path);
    } catch (const SyntaxError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

System pick_system(const Spec& s, const std::string& name) {
    if (name.empty() || name == "auto") return detect_system(s);
    auto sys = system_from_name(name);
    if (!sys) throw InputError("unknown system " + name);
    return *sys;
}

Spec load_valid(const std::string& path, const std::string& system) {
    Spec s = load(path);
    System sys = pick_system(s, system);
    if (auto v = validate(s, sys)) throw InputError(path + ": not a valid " + system_name(sys) + " proof: " + describe_node(s, v->node) + ": " + v->clause);
    return s;
}

std::optional<std::size_t> env_fuel() {
    const char* v = std::getenv("PLLK_FUEL");
    if (!v || !*v) return std::nullopt;
    try {
        return std::stoul(v);
    } catch (const std::exception&) {
        throw InputError("PLLK_FUEL must be a number");
    }
}

json sequent_json(const Sequent& s) {
    json a = json::array();
    for (const auto& f : s) a.push_back(print_formula(f));
    return a;
}

void out_text(const std::string& s) {
    std::cout << s;
    if (!s.empty() && s.back() != '\n') std::cout << '\n';
}

// ---------------------------------------------------------------------------

struct CheckOpts {
    std::string file, system = "auto", criteria = "validity";
};

int cmd_check(const CheckOpts& o, bool emit_json) {
    Spec s = load(o.file);
    System sys = pick_system(s, o.system);
    std::vector<std::string> names;
    std::stringstream in(o.criteria);
    for (std::string c; std::getline(in, c, ',');)
        if (!c.empty()) names.push_back(c);

    json report = json::object();
    report["system"] = system_name(sys);
    std::string text;
    bool all = true;
    for (const auto& c : names) {
        std::string verdict;
        bool holds = false;
        if (c == "validity") {
            auto v = validate(s, sys);
            holds = !v;
            verdict = holds ? "ok" : "fails at " + describe_node(s, v->node) + ": " + v->clause;
        } else if (c == "wp" || c == "p" || c == "fe") {
            CriterionReport r = c == "wp" ? check_weak_progressing(s) : c == "p" ? check_progressing(s) : check_finitely_expandable(s);
            holds = r.verdict == Verdict::Holds;
            verdict = verdict_text(r);
            if (r.verdict == Verdict::Fails && (!r.prefix.empty() || !r.cycle.empty()))
                verdict += " (branch " + print_address(r.prefix) + " then (" + print_address(r.cycle) + ")*)";
        } else if (c == "reg" || c == "wreg") {
            RegularityReport r = check_regularity(s);
            const CriterionReport& x = c == "reg" ? r.regular : r.weakly_regular;
            holds = x.verdict == Verdict::Holds;
            verdict = verdict_text(x);
        } else {
            throw InputError("unknown criterion " + c + " (validity, wp, p, fe, reg, wreg)");
        }
        all = all && holds;
        report["criteria"][c] = {{"holds", holds}, {"verdict", verdict}};
        text += c + ": " + verdict + "\n";
    }
    if (emit_json)
        std::cout << report.dump(2) << '\n';
    else
        out_text(text);
    return all ? kOk : kFails;
}

struct ReduceOpts {
    std::string file, system = "auto", emit = "normal";
    std::optional<std::size_t> height, fuel, trace;
};

int cmd_reduce(const ReduceOpts& o, bool emit_json) {
    Spec s = load_valid(o.file, o.system);
    std::optional<std::size_t> fuel = o.fuel ? o.fuel : env_fuel();
    json j = json::object();
    std::string text;

    if (o.trace) {
        Trace t = is_finite_tree(s) ? run_trace(deriv_of(s), *o.trace) : run_trace(s, *o.trace);
        json steps = json::array();
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            text += trace_line(i + 1, t.steps[i]) + "\n";
            const Measure& m = t.steps[i].m;
            steps.push_back({{"kind", t.steps[i].r.kind}, {"at", print_address(t.steps[i].r.at)}, {"measure", {m.ncp, m.size, m.hcut}}});
        }
        j["trace"] = steps;
        if (emit_json)
            std::cout << j.dump(2) << '\n';
        else
            out_text(text);
        return kOk;
    }
    try {
        if (o.emit == "limit") {
            Spec lim = limit_spec(s, fuel.value_or(100000));
            text += print_spec(lim);
            j["limit"] = print_spec(lim);
        } else if (o.emit != "normal") {
            throw InputError("--emit takes normal or limit");
        } else if (is_finite_tree(s) && !o.height) {
            Deriv nf = normalize_finite(deriv_of(s), fuel);
            text += print_deriv(nf);
            j["normal_form"] = print_deriv(nf);
        } else {
            std::size_t h = o.height.value_or(4);
            StreamResult r = reduce_stream(s, h, fuel.value_or(8));
            text += "; unfolded to depth " + std::to_string(r.k) + ", hyp-free up to height " +
                    (has_hyp(r.d) ? std::to_string(hypfree_bar_height(r.d)) : std::string("any height (no hyp left)")) + "\n";
            text += print_deriv(r.d);
            j["depth"] = r.k;
            j["approximation"] = print_deriv(r.d);
            j["hypfree_height"] = has_hyp(r.d) ? json(hypfree_bar_height(r.d)) : json("unbounded");
        }
    } catch (const FuelExhausted& e) {
        std::string best = e.best ? print_deriv(e.best) : "";
        if (emit_json) {
            j["error"] = e.what();
            j["best"] = best;
            std::cout << j.dump(2) << '\n';
        } else {
            std::cerr << "fuel exhausted: " << e.what() << '\n';
            out_text(text + "; best approximation\n" + best);
        }
        return kFuel;
    } catch (const NotReconstructible& e) {
        throw InputError(std::string("limit not reconstructible: ") + e.what());
    }
    if (emit_json)
        std::cout << j.dump(2) << '\n';
    else
        out_text(text);
    return kOk;
}

int cmd_unfold(const std::string& file, std::size_t depth, bool emit_json) {
    Spec s = load_valid(file, "auto");
    Deriv d = unfold(s, depth);
    if (emit_json)
        std::cout << json{{"depth", depth}, {"derivation", print_deriv(d)}, {"size", size(d)}}.dump(2) << '\n';
    else
        out_text(print_deriv(d));
    return kOk;
}

struct SemOpts {
    std::string file, base;
    std::size_t trunc = 8;
    std::optional<std::size_t> unfold;
};

int cmd_sem(const SemOpts& o, bool emit_json) {
    Spec s = load_valid(o.file, "auto");
    Deriv d;
    if (is_finite_tree(s) && !o.unfold)
        d = deriv_of(s);
    else
        d = unfold(s, o.unfold.value_or(o.trunc));
    Web w = o.base.empty() ? Web::uniform(variables(d), 1) : Web::parse(o.base);
    for (const auto& v : variables(d))
        if (!w.base.count(v)) w.base[v] = Web::uniform({v}, 1).base[v];
    RelSet r;
    try {
        r = interp_trunc(d, o.trunc, w);
    } catch (const SemanticsBudget& e) {
        throw InputError(std::string("interpretation too large: ") + e.what());
    }
    if (emit_json) {
        json els = json::array();
        for (const auto& t : r) {
            json row = json::array();
            for (const auto& v : t) row.push_back(print_value(v));
            els.push_back(row);
        }
        std::cout << json{{"conclusion", sequent_json(s.conclusion())}, {"level", o.trunc}, {"size", r.size()}, {"elements", els}}.dump(2)
                  << '\n';
    } else {
        std::cout << "; " << r.size() << " elements at level " << o.trunc << '\n';
        for (const auto& t : r) std::cout << print_tuple(t) << '\n';
    }
    return kOk;
}

int cmd_translate(const std::string& file, const std::string& to, bool emit_json) {
    Spec s = load_valid(file, "auto");
    std::string out;
    if (to == "pllinf") {
        if (any_node(s, [](const SpecNode& n) { return n.tag == SpecNode::Tag::Nup; }))
            out = print_spec(nupll_to_pllinf(s));
        else if (is_finite_tree(s))
            out = print_spec(pll_to_pllinf(deriv_of(s)));
        else
            throw InputError("--to pllinf takes a PLL derivation or a nuPLL proof");
    } else if (to == "mell") {
        if (!is_finite_tree(s)) throw InputError("--to mell takes a finite PLL derivation");
        out = print_deriv(pll_to_mell(deriv_of(s)));
    } else if (to == "pll") {
        try {
            out = print_deriv(finitize(s));
        } catch (const NotWeaklyProgressing& e) {
            throw InputError(std::string("not weakly progressing: ") + e.what());
        }
    } else {
        throw InputError("--to takes pllinf, mell or pll");
    }
    if (emit_json)
        std::cout << json{{"to", to}, {"result", out}}.dump(2) << '\n';
    else
        out_text(out);
    return kOk;
}

int cmd_simulate(const std::string& file, const std::optional<std::string>& at, bool emit_json) {
    Spec s = load_valid(file, "auto");
    if (!is_finite_tree(s)) throw InputError("simulate takes a finite PLL derivation");
    Deriv d = deriv_of(s);
    std::optional<Redex> r;
    if (at) {
        r = redex_at(d, parse_address(*at));
        if (!r) throw InputError("no redex at " + *at);
    } else {
        for (const auto& x : redexes(d))
            if (x.kind.rfind("fp-", 0) == 0) {
                r = x;
                break;
            }
        if (!r) throw InputError("no fp redex in " + file);
    }
    MellTrace t;
    try {
        t = simulate_square(d, *r);
    } catch (const SimulationFailed& e) {
        if (emit_json)
            std::cout << json{{"redex", r->kind}, {"at", print_address(r->at)}, {"error", e.what()}}.dump(2) << '\n';
        else
            std::cout << "simulation failed: " << e.what() << '\n';
        return kFails;
    }
    json steps = json::array();
    std::string text = "redex " + r->kind + " @ " + print_address(r->at) + "\n";
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        MellMeasure m = mell_measure(t.steps[i].second);
        text += "mell step " + std::to_string(i + 1) + ": " + t.steps[i].first.kind + " @ " + print_address(t.steps[i].first.at) +
                "; (m,d)=(" + std::to_string(m.m) + "," + std::to_string(m.d) + ")\n";
        steps.push_back({{"kind", t.steps[i].first.kind}, {"at", print_address(t.steps[i].first.at)}, {"m", m.m}, {"d", m.d}});
    }
    text += "reached the translation of the PLL reduct\n";
    if (emit_json)
        std::cout << json{{"redex", r->kind}, {"at", print_address(r->at)}, {"steps", steps}, {"target", print_deriv(t.target)}}.dump(2)
                  << '\n';
    else
        out_text(text);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pllk: proof kernel for parsimonious linear logic"};
    app.require_subcommand(1);
    bool emit_json = false;
    app.add_flag("--emit-json", emit_json, "machine-readable output");

    CheckOpts co;
    auto* check = app.add_subcommand("check", "validate and run criteria checkers");
    check->add_option("file", co.file)->required();
    check->add_option("--system", co.system, "PLL, oPLL, nuPLL, PLLinf, oPLLinf, MELL, oMELL, MELLinf or auto");
    check->add_option("--criteria", co.criteria, "comma list of validity, wp, p, fe, reg, wreg");
    check->add_flag("--emit-json", emit_json);

    ReduceOpts ro;
    auto* reduce = app.add_subcommand("reduce", "cut-elimination");
    reduce->add_option("file", ro.file)->required();
    reduce->add_option("--system", ro.system);
    reduce->add_option("--height", ro.height, "stream mode: wanted hyp-free height");
    reduce->add_option("--fuel", ro.fuel, "step budget (finite) or doubling rounds (streams); PLLK_FUEL sets the default");
    reduce->add_option("--trace", ro.trace, "print the first N height-by-height steps");
    reduce->add_option("--emit", ro.emit, "normal (default) or limit");
    reduce->add_flag("--emit-json", emit_json);

    std::string ufile;
    std::size_t depth = 3;
    auto* unf = app.add_subcommand("unfold", "finite approximation at a height");
    unf->add_option("file", ufile)->required();
    unf->add_option("--depth", depth);
    unf->add_flag("--emit-json", emit_json);

    SemOpts so;
    auto* sem = app.add_subcommand("sem", "relational interpretation");
    sem->add_option("file", so.file)->required();
    sem->add_option("--base", so.base, "base set sizes, e.g. X=2,Y=1 (default 1 each)");
    sem->add_option("--trunc", so.trunc, "level n");
    sem->add_option("--unfold", so.unfold, "approximation depth k for coderivations (default n)");
    sem->add_flag("--emit-json", emit_json);

    std::string tfile, to;
    auto* tr = app.add_subcommand("translate", "translations between systems");
    tr->add_option("file", tfile)->required();
    tr->add_option("--to", to, "pllinf, mell or pll")->required();
    tr->add_flag("--emit-json", emit_json);

    std::string sfile;
    std::optional<std::string> at;
    auto* sim = app.add_subcommand("simulate", "MELL simulation of a PLL exponential step");
    sim->add_option("file", sfile)->required();
    sim->add_option("--redex", at, "address of the cut (default: first fp redex)");
    sim->add_flag("--emit-json", emit_json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kInput;
    }

    try {
        if (*check) return cmd_check(co, emit_json);
        if (*reduce) return cmd_reduce(ro, emit_json);
        if (*unf) return cmd_unfold(ufile, depth, emit_json);
        if (*sem) return cmd_sem(so, emit_json);
        if (*tr) return cmd_translate(tfile, to, emit_json);
        if (*sim) return cmd_simulate(sfile, at, emit_json);
    } catch (const InputError& e) {
        std::cerr << "pllk: " << e.what() << '\n';
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "pllk: " << e.what() << '\n';
        return kInput;
    }
    return kOk;
}
