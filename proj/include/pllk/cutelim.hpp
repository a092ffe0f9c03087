#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pllk/spec.hpp"

namespace pllk {

// A cut node that some step applies to. `kind` names the step:
// ax, tens-par, one-bot, cp-cp, cp-qw, cp-qb, fp-fp, fp-qw, fp-qb,
// comm-left-1ary, comm-left-2ary, comm-right-1ary, comm-right-2ary, ex.
struct Redex {
    Address at;
    std::string kind;
    bool operator==(const Redex&) const = default;
};

enum class StepClass { Multiplicative, Exponential, Commutative, Exchange };
StepClass step_class(const std::string& kind);

struct StaleRedex : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The step that fires at the cut at `at`, if any. At one cut the choice is
// fixed: a hyp or cut premise blocks it; otherwise ax (left first), then a
// principal pair, then folding an exchange, then commuting (left first).
std::optional<Redex> redex_at(const Deriv& d, const Address& at);
// All redexes, by height then address.
std::vector<Redex> redexes(const Deriv& d);
// Rewrites the redex; the result is canonicalized (see canonicalize).
Deriv apply_step(const Deriv& d, const Redex& r);

// Whether `after` is below `before` in the way the step class promises:
// exponential steps lower ncp, multiplicative ones keep ncp and lower size,
// commutative ones keep both and lower hcut.
bool measure_decreases(const std::string& kind, const Measure& before, const Measure& after);

struct Reduced {
    Deriv d;
    Redex r;
};
std::optional<Reduced> hbh_step(const Deriv& d);

struct FuelExhausted : std::runtime_error {
    Deriv best;
    explicit FuelExhausted(const std::string& what, Deriv b = nullptr) : std::runtime_error(what), best(std::move(b)) {}
};

std::size_t default_fuel(const Deriv& d);
// Iterates hbh_step to a normal form; throws FuelExhausted.
Deriv normalize_finite(const Deriv& d, std::optional<std::size_t> fuel = std::nullopt);

// Greatest cut-free approximation: every cut nearest the root is pruned to hyp.
Deriv cf(const Deriv& d);

// cf(normalize_finite(unfold(s, k))) for k = h, 2h, 4h, ... (rounds tries),
// accepting the first whose hyp-free bar height exceeds h (a hyp-free result
// counts as unbounded). Throws FuelExhausted with the last result otherwise.
struct StreamResult {
    Deriv d;
    std::size_t k = 0;  // unfolding depth used
};
StreamResult reduce_stream(const Spec& s, std::size_t h, std::size_t rounds = 8);

struct TraceStep {
    Redex r;
    Deriv after;
    Measure m;
};
struct Trace {
    Deriv start;
    std::vector<TraceStep> steps;
};
// First n hbh steps of a finite derivation.
Trace run_trace(const Deriv& d, std::size_t n);
// First n hbh steps of a coderivation; the unfolding depth grows until the
// steps no longer depend on it.
Trace run_trace(const Spec& s, std::size_t n);
std::string trace_line(std::size_t i, const TraceStep& st);

struct NotReconstructible : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// The limit of hbh reduction written back as a spec, for inputs whose boxes
// meet cuts only finitely often at top level (boxes are kept closed and popped
// or merged lazily).
Spec limit_spec(const Spec& s, std::size_t fuel = 100000);

}  // namespace pllk
