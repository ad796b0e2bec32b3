// Averaged fixed-point iterations with the theoretical error bounds the
// certificates entitle the trace to.
#pragma once

#include "efp/certify.hpp"

namespace efp {

struct SolveConfig {
    std::int64_t max_iterations = 100000;
    double tolerance = 1e-12;            // on the step residual
    enum class StopRule { residual, bound_target, max_iter } stop = StopRule::residual;
    double bound_target = 0.0;           // stop when the a-posteriori bound <= this
    std::optional<double> lambda_override;
};

// Iterate list plus per-step diagnostics. residual[n] = dist(x_n, x_{n-1})
// (NaN at row 0). Bound columns are NaN when the certificate carries no rate.
struct Trace {
    std::vector<Vec> iterates;
    std::vector<double> residual;
    std::vector<double> bound_apriori;
    std::vector<double> bound_aposteriori;
    std::vector<double> aux_bound;       // cyclic displacement bound, else empty
    std::vector<double> dist_to_final;   // filled after the run

    std::size_t rows() const { return iterates.size(); }
};

struct SolveReport {
    enum class Status { converged, max_iterations, diverged_domain, diverged_residual };
    Status status = Status::max_iterations;
    bool converged = false;
    Vec final_point;
    double final_residual = std::numeric_limits<double>::quiet_NaN();
    std::int64_t iterations = 0;   // appended post-initial rows
    double lambda = 1.0;
    Trace trace;
    std::string bounds_kind = "none";  // "theorem", "heuristic", "none"
    // rows where dist(x_n, final) > bound + 10 * tolerance; -1 = not audited
    std::int64_t bound_violations = -1;
    std::string note;
};

// x_{n+1} = (1-lambda) x_n + lambda T(x_n). Residuals in `norm`. Stops on
// residual <= tol; an exactly-zero residual ends the run without appending a
// duplicate row, so a constant averaged map converges in one recorded step.
// Divergence: domain escape, or residual growth over 100 consecutive steps.
SolveReport krasnoselskij_solve(const MappingSpec& T, double lambda, const Vec& x0,
                                const SolveConfig& cfg,
                                const NormSpec& norm = NormSpec::euclidean());

// Picks lambda from the certificate policy (cfg.lambda_override wins),
// attaches both bound forms when the certificate carries a factor c < 1, and
// audits them against the final iterate. Refuses failed certificates.
// Quasi-norm certificates get modulus-scaled bounds flagged "heuristic".
SolveReport solve_with_certificate(const Certificate& cert, const MappingSpec& T,
                                   const Vec& x0, const SolveConfig& cfg,
                                   const SpaceSpec& space);

// c^n / (1-c) * first_step   (a priori, from the first step length)
double bound_apriori(double c, std::int64_t n, double first_step);
// c / (1-c) * last_step      (a posteriori, from the latest step length)
double bound_aposteriori(double c, double last_step);

// x_{n+1} = W(x_n, T x_n; lambda); residuals in `metric`. With a
// CONVEX_METRIC_ENRICHED certificate both bound forms attach, measured in
// the metric. Callers are responsible for w_check on (W, metric).
SolveReport convex_metric_solve(const MappingSpec& T, const ConvexStructure& W,
                                const MetricSpec& metric, double lambda, const Vec& x0,
                                const SolveConfig& cfg,
                                const Certificate* cert = nullptr);

// Norm-driven averaged iteration, convergence measured in space.metric.
// Verifies metric <= norm on samples first (refuses on violation); bounds
// mix the metric on the left with norm step lengths on the right.
SolveReport maia_solve(const Certificate& cert, const MappingSpec& T, const Vec& x0,
                       const SolveConfig& cfg, const SpaceSpec& space,
                       const SamplingPlan& plan);

// Averaged iteration with lambda = 1/(b+1) on a cyclic union; bounds are
// s(phi^n(r_1)) a priori and the displacement form s(lambda ||x_n - T x_n||)
// a posteriori, both through the certified series sum. Refuses if the
// representation check or the series certificate fails.
SolveReport cyclic_solve(const MappingSpec& T, const DomainRegion& cycle,
                         const ComparisonFn& phi, const CComparisonCert& ccert,
                         const CheckReport& ccert_proof, double b, const Vec& x0,
                         const SolveConfig& cfg, const SpaceSpec& space,
                         const SamplingPlan& plan);

enum class PresicMethod { diagonal, k_step };

// diagonal: y_n = (1-a) y_{n-1} + a T(y_{n-1}, ..., y_{n-1}) with a = lambda_k.
// k_step:   x_n = sum_i lambda_i x_{n-k+i} + lambda_k T(window).
// `init` supplies 1 (diagonal) or k (k_step) starting points.
SolveReport presic_solve(const PresicMappingSpec& T, const Certificate& cert,
                         const PresicWeights& w, std::span<const Vec> init,
                         const SolveConfig& cfg, const NormSpec& norm,
                         PresicMethod method);

}  // namespace efp
