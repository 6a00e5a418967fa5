#pragma once
//
// Brute-force references for tests and validation: exhaustive enumeration of
// every nested chain, width comparisons on a pooled lambda grid, and a dense
// lambda-grid calibration. None of this is performance-tuned; it exists to
// cross-check the greedy constructions and the breakpoint calibration on
// small K.

#include <vector>

#include "ordinal_crc/calibration.hpp"
#include "ordinal_crc/sets.hpp"
#include "ordinal_crc/types.hpp"

namespace ordinal_crc::oracles {

/// Every monotone path from [yhat, yhat] to the full range, one endpoint
/// extension per step. There are binomial(K-1, yhat) of them.
struct NestedChainFamily {
  std::vector<std::vector<PredictionSet>> chains;
};

/// Enumerates all nested chains; guarded to K <= 12.
NestedChainFamily enumerate_chains(int num_classes, ClassIndex yhat);

/// Width of the first chain element satisfying the lambda constraint of the
/// loss family (covered mass >= 1 - lambda, or residual risk <= lambda),
/// falling back to the last element. Statistics are recomputed directly from
/// each interval so greedy and enumerated chains are scored identically.
int chain_width_at(const std::vector<PredictionSet>& chain, const ScoreVector& scores, const LossSpec& loss,
                   double lambda);

/// True when no enumerated chain weakly improves the greedy chain's width at
/// every lambda of the pooled transition grid while strictly improving
/// somewhere. This is the testable reading of the greedy optimality claims.
bool verify_non_domination(const ScoreVector& scores, const LossSpec& loss);

/// Largest grid multiple of grid_step (plus the endpoint 1) satisfying the
/// calibration condition, evaluated by direct set construction per row.
double calibrate_grid(const std::vector<LabeledScore>& rows, double alpha, const LossSpec& loss, double grid_step);

}  // namespace ordinal_crc::oracles
