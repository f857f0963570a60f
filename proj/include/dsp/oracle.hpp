#pragma once

#include "dsp/core.hpp"

#include <cstdint>

namespace dsp {

struct OracleLimits {
    int maxItems = 8;
    int maxDeadline = 12;
    std::uint64_t nodeCap = 50'000'000;
    bool symmetryPruning = true;
};

// The oracle declines rather than guess.
struct OracleRefusal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OracleResult {
    Scalar opt;
    Packing packing;  // integer starts attaining opt
    std::uint64_t nodes = 0;
};

// Branch and bound over integer starts. Integer starts suffice: see floor_starts.
OracleResult exact_opt(const InstancePtr& inst, const OracleLimits& limits = {});

// Plain enumeration of every integer start vector, scored on unit cells.
// Independent of exact_opt; meant for very small instances only.
Scalar grid_opt(const Instance& inst);

// Rounds every start down to an integer; never raises the peak of a
// feasible packing of an integer instance.
Packing floor_starts(const Packing& p);

struct RatioReport {
    bool feasible = false;
    std::vector<std::string> violations;
    Scalar opt;
    Scalar achieved;
    Scalar ratio;   // achieved / opt (1 when opt is 0)
    Scalar bound;   // 3/2 + eps
    std::string optSource;  // "oracle", or "lower-bound" when the packing already meets it
    bool pass = false;
};

RatioReport verify_ratio(const Packing& p, const Scalar& eps, const OracleLimits& limits = {});

}  // namespace dsp
