#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pllk/cutelim.hpp"
#include "pllk/spec.hpp"

namespace pllk {

// fp becomes an nwb with the single call (loop 0).
Spec pll_to_pllinf(const Deriv& d);
// nup becomes nwb with the same calls and selector.
Spec nupll_to_pllinf(const Spec& s);

struct NotWeaklyProgressing : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Collapses every cp to fp over its left premise (the first call of an nwb).
Deriv finitize(const Spec& s);

// qb becomes qc over qd; fp becomes bp over one qd per context formula
// (lowest position innermost).
Deriv pll_to_mell(const Deriv& d);

// MELL reduction: the usual steps plus the two extra commutations that push
// qd below a cut (qd-cut-left, qd-cut-right) and below a qc (qd-qc).
// Other kinds: ax-left, ax-right, tens-par, one-bot, bp-bp, bp-qd, bp-qw,
// bp-qc, comm-left, comm-right, ex-left, ex-right. Unlike the PLL steps,
// several of them may apply at one cut.
struct MellRedex {
    Address at;
    std::string kind;
    bool operator==(const MellRedex&) const = default;
};
std::vector<MellRedex> mell_redexes(const Deriv& d);
Deriv mell_step(const Deriv& d, const MellRedex& r);

// m: the longest mell_step sequence from d (explored exhaustively, at most
// `budget` distinct derivations); d: the sum of the depths of qd nodes.
struct MellMeasure {
    std::size_t m = 0;
    std::size_t d = 0;
    auto operator<=>(const MellMeasure&) const = default;
};
MellMeasure mell_measure(const Deriv& d, std::size_t budget = 200000);

struct SimulationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MellTrace {
    Deriv start;
    Deriv target;
    std::vector<std::pair<MellRedex, Deriv>> steps;
};
// Shortest mell_step path (at most max_steps) from pll_to_mell(d) to
// pll_to_mell(apply_step(d, r)).
MellTrace simulate_square(const Deriv& d, const Redex& r, std::size_t max_steps = 50);

}  // namespace pllk
