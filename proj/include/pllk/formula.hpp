#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pllk/sexpr.hpp"

namespace pllk {

enum class Op { Var, DualVar, Tensor, Par, OfCourse, WhyNot, One, Bot };

// Immutable MELL formula in negation-normal form. Copies share structure.
class Formula {
public:
    Formula() = default;

    static Formula var(std::string name);
    static Formula dual_var(std::string name);
    static Formula tensor(const Formula& a, const Formula& b);
    static Formula par(const Formula& a, const Formula& b);
    static Formula of_course(const Formula& a);
    static Formula why_not(const Formula& a);
    static Formula one();
    static Formula bot();

    Op op() const;
    const std::string& name() const;
    // operand of a modality, or left operand of a binary connective
    const Formula& left() const;
    const Formula& right() const;
    // number of symbols (atoms, units and connectives)
    std::size_t size() const;
    std::size_t hash() const;
    bool null() const { return !n_; }

    bool is(Op o) const;
    bool is_whynot() const { return is(Op::WhyNot); }
    bool is_ofcourse() const { return is(Op::OfCourse); }
    bool is_atomic() const { return is(Op::Var) || is(Op::DualVar); }
    // true when no ! or ? occurs inside
    bool modality_free() const;

    friend bool operator==(const Formula& a, const Formula& b);
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
    // structural total order (used for canonical sorting only)
    friend int compare(const Formula& a, const Formula& b);
    friend bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

private:
    struct Rep;
    static Formula make(Op op, std::string name, const Formula* a, const Formula* b);
    std::shared_ptr<const Rep> n_;
};

struct Formula::Rep {
    Op op;
    std::string name;
    Formula kids[2];
    std::size_t size = 1;
    std::size_t hash = 0;
    bool modality_free = true;
};

inline Op Formula::op() const { return n_->op; }
inline const std::string& Formula::name() const { return n_->name; }
inline const Formula& Formula::left() const { return n_->kids[0]; }
inline const Formula& Formula::right() const { return n_->kids[1]; }
inline std::size_t Formula::size() const { return n_->size; }
inline std::size_t Formula::hash() const { return n_->hash; }
inline bool Formula::is(Op o) const { return n_ && n_->op == o; }
inline bool Formula::modality_free() const { return n_->modality_free; }

using Sequent = std::vector<Formula>;

Formula dual(const Formula& f);

std::string print_formula(const Formula& f);
Formula parse_formula(std::string_view text);
Formula formula_from_sexp(const Sexp& e);

std::string print_sequent(const Sequent& s);
Sequent sequent_from_sexp(const Sexp& e);

struct FormulaHash {
    std::size_t operator()(const Formula& f) const { return f.hash(); }
};

}  // namespace pllk
