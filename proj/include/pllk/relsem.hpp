#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pllk/cutelim.hpp"
#include "pllk/spec.hpp"

namespace pllk {

// Base sets of the relational model, one per propositional variable.
struct Web {
    std::map<std::string, std::vector<std::string>> base;
    // elements an evaluation may produce before it gives up with SemanticsBudget
    std::size_t budget = 4'000'000;

    // every variable gets atoms a, b, c, ... (k of them)
    static Web uniform(const std::set<std::string>& vars, std::size_t k);
    // "X=2,Y=1"
    static Web parse(std::string_view text);
    const std::vector<std::string>& atoms(const std::string& var) const;
};

std::set<std::string> variables(const Sequent& s);
std::set<std::string> variables(const Deriv& d);

// Element of the web: an atom, *, a pair, or a finite multiset (kept sorted).
class Value {
public:
    enum class Tag { Atom, Star, Pair, MSet };

    static Value atom(std::string name);
    static Value star();
    static Value pair(Value a, Value b);
    static Value mset(std::vector<Value> items);

    Tag tag() const;
    const std::string& name() const;
    // the two components of a pair, the members of a multiset
    const std::vector<Value>& items() const;
    // largest multiset cardinality occurring anywhere inside
    std::size_t widest() const;

    // atoms by name, then * < pairs < multisets, recursively lexicographic
    friend int compare(const Value& a, const Value& b);
    friend bool operator<(const Value& a, const Value& b) { return compare(a, b) < 0; }
    friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }

private:
    struct Rep;
    static Value make(Tag tag, std::string name, std::vector<Value> items);
    std::shared_ptr<const Rep> r_;
};

Value mset_plus(const Value& a, const Value& b);
std::string print_value(const Value& v);

// One component per conclusion formula.
using Tuple = std::vector<Value>;
using RelSet = std::set<Tuple>;
std::string print_tuple(const Tuple& t);

struct SemanticsBudget : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Elements of the formula's set whose multisets have at most `cap` members.
std::vector<Value> web_elements(const Formula& f, const Web& w, std::size_t cap);

// The level-n set of a finite (open) derivation. hyp is empty at every level.
// An axiom on a formula with modalities relates, at level n, the elements
// whose multisets have fewer than n members (its eta-expansion's level-n
// set); this leaves the union over n unchanged.
RelSet interp_trunc(const Deriv& d, std::size_t n, const Web& w);
// Whether t is in the level-n set (evaluated against t, so it stays cheap
// where the full set would not).
bool member(const Deriv& d, std::size_t n, const Web& w, const Tuple& t);

struct Interp {
    RelSet set;
    std::size_t level = 0;  // first level of the stable run
    bool stable = false;
};
// Union of the level sets. Without fp and without axioms on modal formulas
// the chain is constant from levels(d) on (checked); otherwise it is followed
// for up to `extra` more levels until two consecutive levels agree.
Interp interp(const Deriv& d, const Web& w, std::size_t extra = 6);

RelSet interp_spec(const Spec& s, std::size_t n, const Web& w, std::size_t k);

struct Invariance {
    enum class Result { Equal, Differ, Undetermined };
    Result result = Result::Equal;
    std::optional<Tuple> witness;  // in one side only
    bool witness_before = false;   // the witness belongs to the redex side
};
Invariance check_step_invariance(const Deriv& d, const Redex& r, const Web& w);

// The digging experiment --------------------------------------------------

struct CapsTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DiggingCaps {
    std::size_t level = 12;
    std::size_t depth = 12;
    std::size_t mset = 4;
};

// cut(D, ??d(ax)) on !!N, for a stream D on !N.
Spec digging_spec(const Spec& stream);

struct DiggingReport {
    Value zero_hat, one_hat;
    bool excluded_00 = false;  // [[0],[0]] not in the digging cut
    bool excluded_11 = false;
    bool mixed_present = false;  // [[0],[1]] is in it
    std::array<int, 3> heads{};  // first call (0 or 1) of the candidate's first three streams
    std::string which;           // "k0=k1", "k1=k2" or "k2=k0"
    Value witness;               // in the candidate, not in the digging cut
    bool unpadded_present = false;  // the two-member form [[ka],[kb]] is in the candidate
    std::size_t level = 0;       // level the witness appears at in the candidate
    std::string certificate;
    bool differ = false;
};
// The candidate-independent half: the stream, its digging cut and the
// exclusion checks, cached across candidates.
class DiggingBase {
public:
    // `stream` must be an nwb whose selector starts 0, 1 over finite calls.
    DiggingBase(const Spec& stream, const Web& w, const DiggingCaps& caps = {});
    // `candidate` an nwb of streams built from the stream's calls. Throws CapsTooSmall.
    DiggingReport report(const Spec& candidate);

private:
    struct Exclusion {
        bool excluded;
        std::string note;
    };
    const Exclusion& excluded(const Value& t);

    Spec stream_;
    Web w_;
    DiggingCaps caps_;
    Deriv zero_, one_, dig_k_, stream_k_;
    std::size_t hmax_ = 0;
    DiggingReport base_;
    std::string cert_;
    std::map<Value, Exclusion> cache_;
};

DiggingReport digging_counterexample(const Spec& stream, const Spec& candidate, const Web& w,
                                     const DiggingCaps& caps = {});

}  // namespace pllk
