#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pllk/proof.hpp"

namespace pllk {

enum class Periodicity { Yes, No, Unknown };

// Built-in selector functions. `outer` holds the indices of the enclosing
// nwbs (innermost last); context-sensitive oracles read it.
struct OracleInfo {
    std::string name;
    std::function<std::size_t(const std::vector<std::size_t>& outer, std::size_t n)> fn;
    Periodicity periodic;
    bool context_sensitive;
    std::size_t min_calls;
    std::string doc;
};

const OracleInfo* find_oracle(std::string_view name);
std::vector<const OracleInfo*> all_oracles();

struct Selector {
    enum class Type { Periodic, Oracle };
    Type type = Type::Periodic;
    std::vector<std::size_t> prefix;
    std::vector<std::size_t> loop{0};
    std::string oracle;
    std::size_t offset = 0;  // oracle read from this index on

    static Selector periodic(std::vector<std::size_t> prefix, std::vector<std::size_t> loop);
    static Selector from_oracle(std::string name, std::size_t offset = 0);

    std::size_t at(const std::vector<std::size_t>& outer, std::size_t n) const;
    Selector shifted(std::size_t k) const;
    Periodicity periodicity() const;
    bool context_sensitive() const;
    std::size_t max_index() const;  // largest call index a periodic selector uses
    bool operator==(const Selector& o) const;
};

// Finite description of a coderivation: a rooted graph whose nodes are rule
// applications, back-edges to ancestors (ref), back-edges that add passive
// context in front (ext), nwbs (an infinite chain of cp driven by a selector)
// and, in nuPLL only, nup nodes.
struct SpecNode {
    enum class Tag { Rule, Ref, Ext, Nwb, Nup };
    Tag tag = Tag::Rule;
    Rule rule;                 // Tag::Rule
    Sequent concl;             // conclusion as seen by the parent
    std::vector<int> kids;     // premises (Rule) or calls (Nwb, Nup)
    std::string name;          // def name when this node is a back-edge target
    int target = -1;           // Ref, Ext
    Sequent ext_prefix;        // Ext: passive formulas prepended to the target's sequent
    Selector sel;              // Nwb, Nup
    std::vector<std::vector<int>> call_link;  // Nwb, Nup: call position -> conclusion position
    bool explicit_map = false;  // the text carried a (map ...) element
};

struct Spec {
    std::vector<SpecNode> nodes;
    int root = -1;
    const SpecNode& at(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
    const Sequent& conclusion() const { return at(root).concl; }
};

// Text format -------------------------------------------------------------

Spec parse_spec(std::string_view text);
Spec read_spec_file(const std::string& path);
std::string print_spec(const Spec& s);

Spec spec_of(const Deriv& d);
// The finite tree a spec denotes; throws when it has back-edges or boxes.
Deriv deriv_of(const Spec& s);
bool is_finite_tree(const Spec& s);
std::string print_deriv(const Deriv& d);
Deriv parse_deriv(std::string_view text);

// Structure ---------------------------------------------------------------

struct SpecViolation {
    int node = -1;
    std::string clause;
};
std::optional<SpecViolation> validate(const Spec& s, System sys);
std::string describe_node(const Spec& s, int id);

// Truncation at height h: nodes at height < h are kept, a non-leaf node at
// height h becomes hyp; axioms and units at height h are kept (they carry no
// subtree to cut away).
Deriv unfold(const Spec& s, std::size_t h);

struct NotDecomposable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Box {
    Address at;
    Spec nwb;  // the maximal nwb rooted at `at`
};
struct Decomposition {
    Deriv base;
    std::vector<Box> boxes;
};
// Throws NotDecomposable when the spec is not progressing and finitely expandable.
Decomposition decompose(const Spec& s);
Spec regraft(const Decomposition& d);

// nullopt stands for infinite depth
std::optional<std::size_t> depth(const Spec& s);

bool approx_leq(const Deriv& d, const Spec& s);

// Builders used by translations and tests.
int add_node(Spec& s, SpecNode n);
Spec make_nwb(const Sequent& concl, std::vector<Spec> calls, Selector sel, bool nup = false);
// Copies `from` into `into`, returning the id of the copied root.
int graft(Spec& into, const Spec& from);

}  // namespace pllk
