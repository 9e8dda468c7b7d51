#pragma once

#include "dcov/sample.hpp"

#include <vector>

namespace dcov {

struct JackknifeReport {
    std::vector<double> replicates_dcov_sq;  // V^2_(i)
    std::vector<double> replicates_dcor_sq;  // R^2_(i)
    double se_dcor = 0.0;  // jackknife se of sqrt(R^2_(i))
    long n = 0;
};

// Leave-one-out replicates from precomputed distance matrices: row/column i
// is deleted from both raw matrices and the (n-1)-submatrices re-centered.
// No distances are recomputed. Requires n >= 3.
JackknifeReport jackknife(const DistanceMatrix& dmx,
                          const DistanceMatrix& dmy, int threads = 1);

// Element i = sqrt(R^2_(i)) / se_dcor. Throws when se_dcor == 0.
std::vector<double> studentize(const JackknifeReport& report);

}  // namespace dcov
