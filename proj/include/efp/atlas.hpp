// Membership atlas: classical-class verdicts, the averaged-class closure
// probes, and the Hilbert-space equivalence sweep.
#pragma once

#include "efp/certify.hpp"

namespace efp {

enum class Verdict { pass, fail, skipped };

struct MembershipEntry {
    Verdict verdict = Verdict::skipped;
    double constant = std::numeric_limits<double>::quiet_NaN();  // best feasible k or b
    double min_margin = std::numeric_limits<double>::quiet_NaN();
    std::vector<Vec> witness;  // worst pair (failures: the separating pair)
    std::string reason;        // for skipped
};

struct MembershipReport {
    MembershipEntry ne, qne, spc, dc, ene;
    std::int64_t sample_count = 0;
    std::uint64_t seed = 0;
};

// Verdicts for NE / QNE / SPC / DC / ENE on sampled pairs. QNE and DC are
// skipped unless `fix` is supplied. SPC/DC search k on a 128-point uniform
// grid in (0,1); ENE searches the default b grid.
MembershipReport classify(const MappingSpec& T, const SpaceSpec& space,
                          const SamplingPlan& plan, const FixSet* fix = nullptr);

// Pointwise agreement of the SPC(k) and ENE(b = k/(1-k)) verdicts on sampled
// pairs; pairs whose relative margin is within rel_tol on either side count
// as agreeing. Euclidean norms only (the identity is inner-product algebra);
// anything else throws std::invalid_argument.
CheckReport p5_equivalence_check(const MappingSpec& T, const SpaceSpec& space,
                                 double k, const SamplingPlan& plan,
                                 double rel_tol = 1e-9);

// First lambda (1 is tried before the grid) whose averaged map T_lambda
// passes the class check; nullopt when none does. base_only restricts the
// enriched classes to their classical b = 0 / k = 0 base.
std::optional<double> saturation_probe(ClassId cls, const MappingSpec& T,
                                       const SpaceSpec& space,
                                       const std::vector<double>& lambda_grid,
                                       const SamplingPlan& plan,
                                       bool base_only = false,
                                       const FixSet* fix = nullptr);

// (T_lambda)_mu == T_{lambda mu} on sampled (x, lambda, mu), tolerance 1e-12.
CheckReport averaging_algebra_check(const MappingSpec& T, const DomainRegion& region,
                                    const SamplingPlan& plan, double tol = 1e-12);

std::vector<double> default_lambda_grid();  // descending from 1

}  // namespace efp
