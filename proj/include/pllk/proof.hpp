#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pllk/formula.hpp"

namespace pllk {

enum class Kind { Ax, Cut, Tens, Par, One, Bot, Fp, Cp, Nup, Qw, Qb, Qd, Qc, Bp, Qqd, Ex, Hyp };

const char* kind_name(Kind k);
std::optional<Kind> kind_from_name(std::string_view s);
// number of premises; -1 for nup (selector-driven)
int arity(Kind k);

enum class System { PLL, oPLL, nuPLL, PLLinf, oPLLinf, MELL, oMELL, MELLinf };

const char* system_name(System s);
std::optional<System> system_from_name(std::string_view s);
bool system_allows(System s, Kind k);

// Address: word over {1,2}; the root is the empty word.
using Address = std::string;
std::string print_address(const Address& a);
Address parse_address(std::string_view s);

// One rule application. Occurrences are tracked explicitly: link[p][q] is the
// conclusion position that premise p's position q corresponds to, or -1 when
// that occurrence is active (consumed by the rule). act[p] lists the active
// positions of premise p in the order the schema names them (A then B for par,
// A for the absorbed formula of qb, the cut formula for cut, ...).
//
// For fp and the left premise of cp every premise position is linked, but the
// link is the stripping correspondence (?G to G, !A to A), not a parent edge.
struct Rule {
    Kind kind = Kind::Hyp;
    Sequent concl;
    int principal = -1;
    std::vector<std::vector<int>> link;
    std::vector<std::vector<int>> act;
    int payload = -1;  // opaque leaf id (nup leaves standing for whole boxes)
};

struct Node;
using Deriv = std::shared_ptr<const Node>;

struct Node : Rule {
    std::vector<Deriv> prem;
};

// true when premise p's links are the promotion correspondence rather than
// parent edges (fp and the left premise of cp)
bool is_correspondence(Kind k, int p);

Deriv make_node(Rule r, std::vector<Deriv> prem);
Deriv make_hyp(Sequent s);
Deriv make_ax(const Formula& f);  // conclusion [f, dual f]
Deriv make_one();

// Local schema check of a rule instance against its premise conclusions.
std::optional<std::string> check_rule(const Rule& r, const std::vector<const Sequent*>& prem);

// Fills r.link / r.act from the conclusion, principal and premise
// conclusions, using the same preferences as the text format (see README).
// For cut, `cut_formula` names the formula as it occurs in the left premise.
bool infer_maps(Rule& r, const std::vector<const Sequent*>& prem, const Formula* cut_formula);

struct Violation {
    Address at;
    std::string clause;
};

std::optional<Violation> validate(const Deriv& d, System sys);

std::size_t size(const Deriv& d);
// number of levels of the tree (a single node has 1)
std::size_t levels(const Deriv& d);
std::size_t hypfree_bar_height(const Deriv& d);
bool has_hyp(const Deriv& d);
bool cut_free(const Deriv& d);

Deriv subderivation_at(const Deriv& d, const Address& a);
// replaces the subtree at `a` by `r`, which must have the same conclusion
Deriv replace_at(const Deriv& d, const Address& a, const Deriv& r);
Deriv prune(const Deriv& d, const std::vector<Address>& v);

// Visits nodes in pre-order with lexicographically increasing addresses.
void for_each_node(const Deriv& d, const std::function<void(const Deriv&, const Address&)>& fn);

// newpos[old] = new index of each root conclusion occurrence.
Deriv permute_root(const Deriv& d, const std::vector<int>& newpos);
// Reorders every internal sequent to the conventional layout (contexts in
// conclusion order, active formulas where the text format expects them).
Deriv canonicalize(const Deriv& d);
// Equality of derivations read as trees of occurrences: internal sequent
// orders are irrelevant, the root order is not.
bool equivalent(const Deriv& a, const Deriv& b);
// a is obtained from b by replacing some subtrees with hyp (modulo internal order)
bool approx_leq(const Deriv& a, const Deriv& b);
bool structurally_equal(const Deriv& a, const Deriv& b);

struct Measure {
    std::size_t ncp = 0;
    std::size_t size = 0;
    std::size_t hcut = 0;
    auto operator<=>(const Measure&) const = default;
};
Measure measure(const Deriv& d);
std::string print_measure(const Measure& m);

}  // namespace pllk
