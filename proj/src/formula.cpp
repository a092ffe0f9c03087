#include "pllk/formula.hpp"

#include <functional>

namespace pllk {

Formula Formula::make(Op op, std::string name, const Formula* a, const Formula* b) {
    auto r = std::make_shared<Rep>();
    r->op = op;
    std::size_t h = std::hash<int>()(static_cast<int>(op)) * 0x9e3779b97f4a7c15ULL;
    if (!name.empty()) h ^= std::hash<std::string>()(name) + 0x632be59bd9b4e019ULL;
    r->name = std::move(name);
    if (a) {
        r->kids[0] = *a;
        r->size += a->size();
        r->modality_free = a->modality_free();
        h = (h ^ a->hash()) * 0x100000001b3ULL + 17;
    }
    if (b) {
        r->kids[1] = *b;
        r->size += b->size();
        r->modality_free = r->modality_free && b->modality_free();
        h = (h ^ (b->hash() << 1)) * 0x100000001b3ULL + 31;
    }
    if (op == Op::OfCourse || op == Op::WhyNot) r->modality_free = false;
    r->hash = h;
    Formula f;
    f.n_ = std::move(r);
    return f;
}

Formula Formula::var(std::string name) { return make(Op::Var, std::move(name), nullptr, nullptr); }
Formula Formula::dual_var(std::string name) { return make(Op::DualVar, std::move(name), nullptr, nullptr); }
Formula Formula::tensor(const Formula& a, const Formula& b) { return make(Op::Tensor, {}, &a, &b); }
Formula Formula::par(const Formula& a, const Formula& b) { return make(Op::Par, {}, &a, &b); }
Formula Formula::of_course(const Formula& a) { return make(Op::OfCourse, {}, &a, nullptr); }
Formula Formula::why_not(const Formula& a) { return make(Op::WhyNot, {}, &a, nullptr); }
Formula Formula::one() {
    static const Formula f = make(Op::One, {}, nullptr, nullptr);
    return f;
}
Formula Formula::bot() {
    static const Formula f = make(Op::Bot, {}, nullptr, nullptr);
    return f;
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_) return false;
    if (a.n_->hash != b.n_->hash || a.n_->op != b.n_->op || a.n_->size != b.n_->size) return false;
    switch (a.op()) {
        case Op::Var:
        case Op::DualVar: return a.name() == b.name();
        case Op::One:
        case Op::Bot: return true;
        case Op::OfCourse:
        case Op::WhyNot: return a.left() == b.left();
        default: return a.left() == b.left() && a.right() == b.right();
    }
}

int compare(const Formula& a, const Formula& b) {
    if (a.n_ == b.n_) return 0;
    if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
    switch (a.op()) {
        case Op::Var:
        case Op::DualVar: return a.name() < b.name() ? -1 : (a.name() == b.name() ? 0 : 1);
        case Op::One:
        case Op::Bot: return 0;
        case Op::OfCourse:
        case Op::WhyNot: return compare(a.left(), b.left());
        default: {
            int c = compare(a.left(), b.left());
            return c ? c : compare(a.right(), b.right());
        }
    }
}

Formula dual(const Formula& f) {
    switch (f.op()) {
        case Op::Var: return Formula::dual_var(f.name());
        case Op::DualVar: return Formula::var(f.name());
        case Op::Tensor: return Formula::par(dual(f.left()), dual(f.right()));
        case Op::Par: return Formula::tensor(dual(f.left()), dual(f.right()));
        case Op::OfCourse: return Formula::why_not(dual(f.left()));
        case Op::WhyNot: return Formula::of_course(dual(f.left()));
        case Op::One: return Formula::bot();
        case Op::Bot: return Formula::one();
    }
    return f;
}

std::string print_formula(const Formula& f) {
    switch (f.op()) {
        case Op::Var: return f.name();
        case Op::DualVar: return "(~ " + f.name() + ")";
        case Op::Tensor: return "(tens " + print_formula(f.left()) + " " + print_formula(f.right()) + ")";
        case Op::Par: return "(par " + print_formula(f.left()) + " " + print_formula(f.right()) + ")";
        case Op::OfCourse: return "(! " + print_formula(f.left()) + ")";
        case Op::WhyNot: return "(? " + print_formula(f.left()) + ")";
        case Op::One: return "1";
        case Op::Bot: return "bot";
    }
    return "?";
}

namespace {

bool is_ident(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c == '(' || c == ')' || c == '[' || c == ']' || c == '~') return false;
    return true;
}

}  // namespace

Formula formula_from_sexp(const Sexp& e) {
    if (e.is_atom()) {
        if (e.atom == "1") return Formula::one();
        if (e.atom == "bot") return Formula::bot();
        if (!is_ident(e.atom) || e.atom == "tens" || e.atom == "par" || e.atom == "!" || e.atom == "?")
            throw SyntaxError("bad atom '" + e.atom + "'", e.offset);
        return Formula::var(e.atom);
    }
    if (!e.is_list() || e.items.empty()) throw SyntaxError("expected formula", e.offset);
    const std::string& h = e.head();
    auto arity = [&](std::size_t n) {
        if (e.items.size() != n + 1)
            throw SyntaxError("'" + h + "' expects " + std::to_string(n) + " operand(s)", e.offset);
    };
    if (h == "~") {
        arity(1);
        const Sexp& x = e.items[1];
        if (!x.is_atom() || !is_ident(x.atom) || x.atom == "1" || x.atom == "bot")
            throw SyntaxError("negation applies to atoms only", x.offset);
        return Formula::dual_var(x.atom);
    }
    if (h == "tens" || h == "par") {
        arity(2);
        Formula a = formula_from_sexp(e.items[1]);
        Formula b = formula_from_sexp(e.items[2]);
        return h == "tens" ? Formula::tensor(a, b) : Formula::par(a, b);
    }
    if (h == "!" || h == "?") {
        arity(1);
        Formula a = formula_from_sexp(e.items[1]);
        return h == "!" ? Formula::of_course(a) : Formula::why_not(a);
    }
    throw SyntaxError("unknown connective '" + h + "'", e.offset);
}

Formula parse_formula(std::string_view text) { return formula_from_sexp(read_sexp(text)); }

std::string print_sequent(const Sequent& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ' ';
        out += print_formula(s[i]);
    }
    return out + "]";
}

Sequent sequent_from_sexp(const Sexp& e) {
    if (!e.is_bracket()) throw SyntaxError("expected sequent [F ...]", e.offset);
    Sequent s;
    for (const Sexp& x : e.items) s.push_back(formula_from_sexp(x));
    return s;
}

}  // namespace pllk
