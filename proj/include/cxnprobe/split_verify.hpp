#pragma once

#include <string>
#include <vector>

#include "cxnprobe/split.hpp"
#include "cxnprobe/types.hpp"

namespace cxnprobe {

struct ConstraintViolation {
    std::string code;
    std::string detail;
};

struct ConstraintReport {
    std::vector<ConstraintViolation> violations;
    bool ok() const { return violations.empty(); }
};

// Brute-force oracle for the splitting constraints: enumerates every
// (train, test) instance pair and every quota cell directly from the corpus.
// Deliberately implemented without the solver's helpers so the two sides can
// cross-check each other.
ConstraintReport verify_split(const std::vector<ConstructionInstance>& corpus,
                              const SplitAssignment& assignment,
                              const SplitConfiguration& config);

}  // namespace cxnprobe
