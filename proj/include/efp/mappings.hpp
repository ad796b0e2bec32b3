// Mapping catalog and the averaging transform T_lambda = (1-lambda) I + lambda T.
#pragma once

#include <optional>
#include <span>
#include <utility>

#include "efp/spaces.hpp"

namespace efp {

// Value-semantic mapping description. `averaged` wraps parts[0] with weight
// lambda; `composed` applies parts left to right. Construction verifies the
// self-map property by sampling unless the domain is unbounded.
struct MappingSpec {
    enum class Kind {
        affine,             // x -> A x + c
        reflection_1d,      // x -> 1 - x on [0, 1]
        reciprocal_1d,      // x -> 1 / x on [1/2, 2]
        negate_scale_1d,    // x -> -x / 2
        piecewise_affine_1d,
        composed,
        averaged,
    };
    Kind kind = Kind::affine;
    Mat A;
    Vec c;
    // piecewise: piece i is [breaks[i], breaks[i+1]) with the final piece
    // closed; value slopes[i] * x + intercepts[i]
    std::vector<double> breaks, slopes, intercepts;
    std::vector<MappingSpec> parts;
    double lambda = 1.0;  // averaged
    DomainRegion domain;
    std::vector<Vec> known_fixed_points;  // catalog metadata, may be empty

    int dim() const;
};

// Evaluation; x must lie in the domain (boundary tolerance 1e-12), otherwise
// std::domain_error.
Vec map_eval(const MappingSpec& T, const Vec& x);

// (1-lambda) x + lambda T(x); lambda in [0, 1] else std::invalid_argument.
Vec averaged_eval(const MappingSpec& T, double lambda, const Vec& x);

// Catalog constructors. Each verifies the self-map property on `check_plan`
// samples (hard error on violation).
MappingSpec make_affine(Mat A, Vec c, DomainRegion domain,
                        const SamplingPlan* check_plan = nullptr);
MappingSpec make_reflection_1d();
MappingSpec make_reciprocal_1d();
MappingSpec make_negate_scale_1d();
MappingSpec make_piecewise_affine_1d(std::vector<double> breaks,
                                     std::vector<double> slopes,
                                     std::vector<double> intercepts,
                                     std::vector<Vec> fixed_points = {},
                                     const SamplingPlan* check_plan = nullptr);
MappingSpec make_composed(std::vector<MappingSpec> parts,
                          const SamplingPlan* check_plan = nullptr);
MappingSpec make_averaged(MappingSpec base, double lambda);

// Two-piece map with fixed points {1/2, 1}: 1-x on [0,2/3), 2-x on [2/3,4/3].
MappingSpec make_two_branch_reflection();

// Piecewise self-map of [0,1] whose interior chord slope exceeds 1 while
// every chord against the fixed point 0 stays below it (separates the
// quasi-nonexpansive class from the strictly pseudocontractive one).
MappingSpec make_zigzag_1d();

MappingSpec make_translation_1d();  // x -> x + 1 on all of R; no fixed point

// Global affine collapse (A, c) when the mapping is affine everywhere;
// nullopt for genuinely nonlinear kinds. Used by the analytic certify route.
std::optional<std::pair<Mat, Vec>> collapse_affine(const MappingSpec& T);

// Throws std::domain_error with a witness if T does not map its domain into
// itself on sampled points. No-op for unbounded domains.
void verify_self_map(const MappingSpec& T, const SamplingPlan& plan);

// k-argument mapping T(x_0, ..., x_{k-1}) = sum_i coeffs[i] x_i + offset.
struct PresicMappingSpec {
    int arity = 2;
    std::vector<double> coeffs;
    Vec offset;
    DomainRegion domain;

    int dim() const;
};

Vec presic_eval(const PresicMappingSpec& T, std::span<const Vec> args);

// Averaging weights (lambda_0, ..., lambda_k): nonnegative, sum exactly 1
// (renormalized at construction), lambda_k > 0.
struct PresicWeights {
    std::vector<double> w;

    static PresicWeights make(std::vector<double> raw);
    // Default policy: lambda_k = 1/(B+1) with B = sum b_i, rest uniform.
    static PresicWeights default_policy(const std::vector<double>& b, int arity);
    double step_weight() const { return w.back(); }
};

// sum_{i<k} lambda_i x_i + lambda_k T(x_0..x_{k-1})
Vec presic_averaged_eval(const PresicMappingSpec& T, const PresicWeights& w,
                         std::span<const Vec> args);

// || T(x, ..., x) - x || in the given norm; 0 exactly at a fixed point.
double diagonal_residual(const PresicMappingSpec& T, const NormSpec& n, const Vec& x);

}  // namespace efp
