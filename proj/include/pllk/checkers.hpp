#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pllk/spec.hpp"

namespace pllk {

enum class Verdict { Holds, Fails, Unknown };

struct CriterionReport {
    Verdict verdict = Verdict::Holds;
    std::size_t bound = 0;  // meaningful for Unknown
    // failing branch: `prefix` from the root, then `cycle` repeated forever
    Address prefix;
    Address cycle;
    std::string detail;
};

// "holds", "fails" or "unknown(k)"
std::string verdict_text(const CriterionReport& r);

CriterionReport check_weak_progressing(const Spec& s);
CriterionReport check_progressing(const Spec& s, std::size_t bound = 64);
CriterionReport check_finitely_expandable(const Spec& s);

struct RegularityReport {
    CriterionReport regular;
    CriterionReport weakly_regular;
};
RegularityReport check_regularity(const Spec& s);

enum class Criterion { WeakProgressing, Progressing, FinitelyExpandable };

// Unfolds the witness branch three times around its cycle and confirms the
// violation on the resulting tree.
bool replay_witness(const Spec& s, const CriterionReport& r, Criterion c);

struct ThreadStep {
    Address at;
    int pos = -1;
};
struct Thread {
    std::vector<ThreadStep> steps;
    bool bang = true;                   // !-thread (else ?-thread)
    std::vector<std::size_t> progress;  // indices into steps
};

// Maximal upward thread from occurrence `pos` of the node at `start`,
// truncated after `bound` steps.
Thread threads_from(const Deriv& d, const Address& start, int pos, std::size_t bound);
Thread threads_from(const Spec& s, const Address& start, int pos, std::size_t bound);

// Bounded forms of the criteria on a finite approximation.
// wp: every hyp leaf is reached by a run of at most `window` edges since the
// last right premise of cp.
bool bounded_weak_progressing(const Deriv& d, std::size_t window);
// fe: no branch carries more than `limit` cut and qb nodes.
bool bounded_finitely_expandable(const Deriv& d, std::size_t limit);
// p: every branch that ends in hyp and whose last `window` edges stay out of
// cp calls carries a !-thread alive along those edges with a progress point.
bool bounded_progressing(const Deriv& d, std::size_t window);

}  // namespace pllk
