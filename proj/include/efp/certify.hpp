// Contraction-class certification: pointwise inequality margins, sampled
// sup estimation, and the constant search for the averaged-Banach class.
#pragma once

#include <optional>
#include <span>

#include "efp/comparison.hpp"
#include "efp/mappings.hpp"

namespace efp {

enum class ClassId {
    ENRICHED_BANACH,
    ENRICHED_KANNAN,
    ENRICHED_CRR,           // Ciric-Reich-Rus type
    ENRICHED_CHATTERJEA,
    ENRICHED_ALMOST,
    ENRICHED_PHI,
    ENRICHED_PSI,
    CYCLIC_ENRICHED_PHI,
    ENRICHED_NONEXPANSIVE,
    ENRICHED_PRESIC,
    CONVEX_METRIC_ENRICHED,
    QUASI_BANACH_ENRICHED,
    NE,   // nonexpansive
    QNE,  // quasi-nonexpansive (needs a fixed-point set)
    SPC,  // strictly pseudocontractive
    DC,   // demicontractive (needs a fixed-point set)
};

const char* class_name(ClassId id);
std::optional<ClassId> class_from_name(const std::string& name);

// Per-class constants. Only the fields the class uses are read; schema
// feasibility is validated before any sampling.
struct ConstantSet {
    std::optional<double> b;       // averaging shift (b-schema classes)
    std::optional<double> k;       // shift for k-schema classes, or the SPC/DC constant
    std::optional<double> theta;   // Banach / almost coefficient
    std::optional<double> a;       // Kannan / CRR coefficient
    std::optional<double> b2;      // CRR / Chatterjea displacement coefficient
    std::optional<double> L;       // almost-contraction slack coefficient
    std::optional<double> lambda;  // convex-metric class: fixed averaging weight
    std::optional<double> c;       // convex-metric contraction factor
    std::vector<double> b_list, theta_list;  // Presic
    std::optional<ComparisonFn> phi;
    std::optional<PsiFn> psi;
};

// Throws std::invalid_argument when the constants violate the class schema
// (wrong fields, out-of-range, or infeasible combination).
void validate_constants(ClassId cls, const ConstantSet& k);

// Margin of the defining inequality at one argument tuple: RHS - LHS in the
// space's norm (metric for the convex-metric class). Positive = satisfied.
// `args` is (x, y) for two-point classes, a (k+1)-tuple for the Presic class.
double check_pointwise(ClassId cls, const MappingSpec& T, const ConstantSet& consts,
                       std::span<const Vec> args, const SpaceSpec& space);

double check_pointwise_presic(const PresicMappingSpec& T, const ConstantSet& consts,
                              std::span<const Vec> args, const NormSpec& norm);

struct Certificate {
    ClassId cls = ClassId::NE;
    ConstantSet consts;
    bool pass = false;
    double min_margin = 0.0;
    std::vector<Vec> argmin_args;       // tuple realizing min_margin
    double sup_ratio = 0.0;             // max LHS/RHS over non-degenerate tuples
    std::vector<Vec> ratio_argmax_args; // witness pair for failures
    double feasibility_margin = 0.0;    // 1 - sup_ratio
    std::int64_t sample_count = 0;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    std::string route = "sampled";      // "sampled" or "analytic"
    // iteration policy derived from the constants; NaN when the class has none
    double lambda_policy = std::numeric_limits<double>::quiet_NaN();
    double contraction_factor = std::numeric_limits<double>::quiet_NaN();
};

// Fixed-point sets for the QNE/DC checks; never guessed.
using FixSet = std::vector<Vec>;

// Samples argument tuples from space.region and reports "not falsified at N
// samples". Degenerate pairs (||x-y|| < 1e-14) are excluded from ratio
// statistics but still margin-checked. Throws std::domain_error if a sampled
// image escapes the mapping's domain.
Certificate certify(ClassId cls, const MappingSpec& T, const ConstantSet& consts,
                    const SpaceSpec& space, const SamplingPlan& plan,
                    const FixSet* fix = nullptr);

Certificate certify_presic(const PresicMappingSpec& T, const ConstantSet& consts,
                           const SpaceSpec& space, const SamplingPlan& plan);

// Default grid for the averaged-Banach constant search:
// {0} + 64 log-spaced in [1e-3, 1e3] + {1, 1.5, 2, 3, 4}, sorted.
std::vector<double> default_b_grid();

// For each b estimates theta(b) = sup ||b(x-y) + Tx - Ty|| / ||x-y|| and
// returns the certificate minimizing theta(b)/(b+1) among feasible b
// (theta < b+1). Globally affine mappings get the exact operator-norm value
// (route = "analytic"); everything else uses the sampled sup. A failure
// certificate (pass = false) carries the best attempt plus a witness pair.
Certificate optimize_banach_certificate(const MappingSpec& T, const SpaceSpec& space,
                                        const std::vector<double>& b_grid,
                                        const SamplingPlan& plan);

// T(A_i) subset A_{i+1 mod m} on sampled points of each labeled part.
CheckReport check_cyclic_representation(const MappingSpec& T, const DomainRegion& cycle,
                                        const SamplingPlan& plan);

// Iteration weight policy: 1/(b+1) for b-schema classes, 1/(k+1) for
// k-schema classes, the stored lambda for the convex-metric class. Classes
// without an iteration policy (NE/QNE/SPC/DC) throw std::invalid_argument.
double derive_lambda(const Certificate& cert);

// Presic default weights from a passing certificate.
PresicWeights derive_presic_weights(const Certificate& cert, int arity);

}  // namespace efp
