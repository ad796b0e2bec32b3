#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace efp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Result of a sampled structural check (convexity inequality, comparison
// axioms, cyclic representation, equivalence sweeps, ...). `witness` holds
// the argument tuple realizing max_violation, when one exists.
struct CheckReport {
    bool pass = false;
    double max_violation = 0.0;
    std::int64_t sample_count = 0;
    std::vector<Vec> witness;
    std::string detail;
};

}  // namespace efp
