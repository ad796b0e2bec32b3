// Ambient spaces: norms and quasi-norms, metrics subordinate to them,
// Takahashi convex structures, and the regions samples are drawn from.
#pragma once

#include <optional>

#include "efp/common.hpp"
#include "efp/sampling.hpp"

namespace efp {

// A norm (or quasi-norm) on R^d. quasi_p with 0 < p < 1 satisfies the
// triangle inequality only up to the modulus C = 2^(1/p - 1).
struct NormSpec {
    enum class Kind { euclidean, p_norm, quasi_p_norm, weighted_sup };
    Kind kind = Kind::euclidean;
    double p = 2.0;       // p_norm: p >= 1; quasi_p_norm: 0 < p < 1
    Vec weights;          // weighted_sup; empty = all ones

    static NormSpec euclidean();
    static NormSpec p_norm(double p);
    static NormSpec quasi_p(double p);
    static NormSpec weighted_sup(Vec w);
};

double norm_eval(const NormSpec& n, const Vec& v);

// Triangle-inequality relaxation constant of the norm.
struct ModulusReport {
    double analytic = 1.0;    // exact value for the catalog kind
    double empirical = 0.0;   // sup ||x+y|| / (||x|| + ||y||) over sampled pairs
};

struct DomainRegion;  // fwd

ModulusReport quasinorm_modulus(const NormSpec& n, const DomainRegion& region,
                                const SamplingPlan& plan);

// Metric on the same space, required to sit below the norm for the mixed
// (Maia-style) bounds: scaled keeps factor <= 1, truncated caps at `cap`.
struct MetricSpec {
    enum class Kind { norm_induced, scaled, truncated };
    Kind kind = Kind::norm_induced;
    NormSpec base;
    double factor = 1.0;  // scaled, in (0, 1]
    double cap = 1.0;     // truncated, > 0

    static MetricSpec norm_induced(NormSpec n);
    static MetricSpec scaled(NormSpec n, double factor);
    static MetricSpec truncated(NormSpec n, double cap);
};

double metric_eval(const MetricSpec& m, const Vec& x, const Vec& y);

// Convex structure W(x, y; lambda), lambda weighting the first argument.
// left_endpoint ignores lambda and returns x; it deliberately violates the
// convexity inequality and exists to exercise w_check diagnostics.
struct ConvexStructure {
    enum class Kind { linear, left_endpoint };
    Kind kind = Kind::linear;
};

Vec w_eval(const ConvexStructure& w, const Vec& x, const Vec& y, double lambda);

// Region samples are drawn from. `all` is the whole space: valid as a
// mapping domain (self-map holds trivially) but cannot be sampled.
struct DomainRegion {
    enum class Kind { box, ball, finite_set, labeled_union, all };
    Kind kind = Kind::box;
    Vec lo, hi;                        // box
    Vec center;                        // ball
    double radius = 0.0;               // ball
    std::vector<Vec> points;           // finite_set
    std::vector<DomainRegion> parts;   // labeled_union, labels 1..m in order

    static DomainRegion box(Vec lo, Vec hi);
    static DomainRegion box1d(double lo, double hi);
    static DomainRegion ball(Vec center, double radius);
    static DomainRegion finite_set(std::vector<Vec> pts);
    static DomainRegion labeled_union(std::vector<DomainRegion> parts);
    static DomainRegion all(int dim);

    int dim() const;
    bool contains(const Vec& x, double tol = 1e-12) const;
    bool bounded() const;

    // Throws std::invalid_argument for an unbounded region.
    Vec sample(Rng& rng, SampleDist dist = SampleDist::uniform) const;
};

// Sampled verification of the convexity inequality
//   d(u, W(x,y;lambda)) <= lambda d(u,x) + (1-lambda) d(u,y)
// over (u, x, y, lambda) tuples; lambda = 0 and 1 are always included.
CheckReport w_check(const ConvexStructure& w, const MetricSpec& metric,
                    const DomainRegion& region, const SamplingPlan& plan);

// Sampled check that metric <= norm-induced distance (needed for mixed bounds).
CheckReport subordination_check(const MetricSpec& metric, const NormSpec& norm,
                                const DomainRegion& region, const SamplingPlan& plan);

// Bundle used by the certification / solve / atlas entry points.
struct SpaceSpec {
    int dimension = 1;
    NormSpec norm;
    MetricSpec metric;        // defaults to norm_induced(norm)
    ConvexStructure convex;
    DomainRegion region;

    static SpaceSpec euclidean_box(double lo, double hi);  // 1-d convenience
};

}  // namespace efp
