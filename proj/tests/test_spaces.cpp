#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "efp/spaces.hpp"

using namespace efp;

namespace {
Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}
}  // namespace

TEST_CASE("norm evaluation across catalog kinds") {
    const Vec x = v2(3.0, -4.0);
    CHECK(norm_eval(NormSpec::euclidean(), x) == doctest::Approx(5.0));
    CHECK(norm_eval(NormSpec::p_norm(1.0), x) == doctest::Approx(7.0));
    CHECK(norm_eval(NormSpec::p_norm(3.0), x) == doctest::Approx(std::pow(91.0, 1.0 / 3.0)));
    // l_{1/2}: (sum |x_i|^{1/2})^2
    const double q = norm_eval(NormSpec::quasi_p(0.5), x);
    CHECK(q == doctest::Approx(std::pow(std::sqrt(3.0) + 2.0, 2.0)));
    CHECK(norm_eval(NormSpec::weighted_sup(v2(2.0, 1.0)), x) == doctest::Approx(6.0));
    CHECK(norm_eval(NormSpec::euclidean(), Vec::Zero(2)) == 0.0);
}

TEST_CASE("quasi-norm modulus: analytic value and sampled sup") {
    SamplingPlan plan;
    plan.count = 50000;
    plan.seed = 3;
    const DomainRegion box = DomainRegion::box(Vec::Zero(2), Vec::Constant(2, 3.0));
    const ModulusReport rep = quasinorm_modulus(NormSpec::quasi_p(0.5), box, plan);
    CHECK(rep.analytic == 2.0);
    CHECK(rep.empirical <= 2.0 + 1e-9);
    CHECK(rep.empirical >= 1.0);  // the triangle inequality genuinely fails
    const ModulusReport eucl = quasinorm_modulus(NormSpec::euclidean(), box, plan);
    CHECK(eucl.analytic == 1.0);
    CHECK(eucl.empirical <= 1.0 + 1e-12);
}

TEST_CASE("metrics: induced, scaled, truncated") {
    const NormSpec n = NormSpec::euclidean();
    const Vec a = v2(1.0, 1.0), b = v2(4.0, 5.0);
    CHECK(metric_eval(MetricSpec::norm_induced(n), a, b) == doctest::Approx(5.0));
    CHECK(metric_eval(MetricSpec::scaled(n, 0.5), a, b) == doctest::Approx(2.5));
    CHECK(metric_eval(MetricSpec::truncated(n, 1.0), a, b) == doctest::Approx(1.0));
    CHECK(metric_eval(MetricSpec::truncated(n, 10.0), a, b) == doctest::Approx(5.0));
    CHECK_THROWS_AS(MetricSpec::scaled(n, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(MetricSpec::truncated(n, 0.0), std::invalid_argument);
}

TEST_CASE("convex structure evaluation: lambda weights the first argument") {
    const ConvexStructure lin{};
    const Vec x = v2(1.0, 0.0), y = v2(0.0, 1.0);
    CHECK((w_eval(lin, x, y, 1.0) - x).norm() == 0.0);
    CHECK((w_eval(lin, x, y, 0.0) - y).norm() == 0.0);
    CHECK((w_eval(lin, x, y, 0.25) - v2(0.25, 0.75)).norm() == doctest::Approx(0.0));
    const ConvexStructure left{ConvexStructure::Kind::left_endpoint};
    CHECK((w_eval(left, x, y, 0.25) - x).norm() == 0.0);
}

TEST_CASE("convexity inequality check passes for the linear structure") {
    SamplingPlan plan;
    plan.count = 20000;
    plan.seed = 5;
    const MetricSpec d = MetricSpec::norm_induced(NormSpec::euclidean());
    CHECK(w_check(ConvexStructure{}, d, DomainRegion::box1d(0.0, 3.0), plan).pass);
    const CheckReport bad = w_check(ConvexStructure{ConvexStructure::Kind::left_endpoint}, d,
                                    DomainRegion::box1d(0.0, 3.0), plan);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max_violation > 0.1);
    CHECK(bad.witness.size() == 4);  // (u, x, y, lambda)
}

TEST_CASE("truncated metric is not convex once diameters exceed the cap") {
    SamplingPlan plan;
    plan.count = 100000;
    plan.seed = 5;
    const MetricSpec trunc = MetricSpec::truncated(NormSpec::euclidean(), 1.0);
    const CheckReport wide = w_check(ConvexStructure{}, trunc, DomainRegion::box1d(0.0, 3.0), plan);
    CHECK_FALSE(wide.pass);
    CHECK(wide.max_violation > 0.5);
    // cap inactive on a unit box: the inequality holds again
    CHECK(w_check(ConvexStructure{}, trunc, DomainRegion::box1d(0.0, 1.0), plan).pass);
}

TEST_CASE("metric-below-norm subordination check") {
    SamplingPlan plan;
    plan.count = 20000;
    plan.seed = 7;
    const NormSpec n = NormSpec::euclidean();
    const DomainRegion box = DomainRegion::box1d(0.0, 3.0);
    CHECK(subordination_check(MetricSpec::scaled(n, 0.5), n, box, plan).pass);
    CHECK(subordination_check(MetricSpec::truncated(n, 1.0), n, box, plan).pass);
    CHECK(subordination_check(MetricSpec::norm_induced(n), n, box, plan).pass);
    // a metric above the norm must be rejected
    const CheckReport above =
        subordination_check(MetricSpec::norm_induced(NormSpec::weighted_sup(v2(3.0, 3.0))),
                            NormSpec::euclidean(), DomainRegion::box(Vec::Zero(2), Vec::Constant(2, 1.0)),
                            plan);
    CHECK_FALSE(above.pass);
}

TEST_CASE("regions: membership, dimension, boundedness") {
    const DomainRegion box = DomainRegion::box(v2(0.0, 0.0), v2(1.0, 2.0));
    CHECK(box.dim() == 2);
    CHECK(box.bounded());
    CHECK(box.contains(v2(0.5, 1.5)));
    CHECK_FALSE(box.contains(v2(1.5, 1.0)));
    CHECK(box.contains(v2(1.0 + 1e-13, 1.0)));  // boundary tolerance

    const DomainRegion ball = DomainRegion::ball(v2(0.0, 0.0), 1.0);
    CHECK(ball.contains(v2(0.6, 0.6)));
    CHECK_FALSE(ball.contains(v2(0.9, 0.9)));

    const DomainRegion pts = DomainRegion::finite_set({v2(1.0, 0.0), v2(0.0, 1.0)});
    CHECK(pts.contains(v2(0.0, 1.0)));
    CHECK_FALSE(pts.contains(v2(0.5, 0.5)));

    const DomainRegion uni =
        DomainRegion::labeled_union({DomainRegion::box1d(0.0, 1.0), DomainRegion::box1d(2.0, 3.0)});
    CHECK(uni.contains(Vec::Constant(1, 0.5)));
    CHECK(uni.contains(Vec::Constant(1, 2.5)));
    CHECK_FALSE(uni.contains(Vec::Constant(1, 1.5)));

    const DomainRegion whole = DomainRegion::all(3);
    CHECK(whole.dim() == 3);
    CHECK_FALSE(whole.bounded());
    CHECK(whole.contains(Vec::Constant(3, 1e9)));
}

TEST_CASE("sampling stays inside the region and is seed-deterministic") {
    Rng r1(42), r2(42);
    const DomainRegion box = DomainRegion::box(v2(-1.0, 0.0), v2(1.0, 2.0));
    for (int i = 0; i < 200; ++i) {
        const Vec a = box.sample(r1);
        CHECK(box.contains(a));
        CHECK((a - box.sample(r2)).norm() == 0.0);
    }
    Rng r3(7);
    const DomainRegion ball = DomainRegion::ball(v2(1.0, 1.0), 0.5);
    for (int i = 0; i < 200; ++i) CHECK(ball.contains(ball.sample(r3)));
    const DomainRegion pts = DomainRegion::finite_set({v2(1.0, 0.0), v2(0.0, 1.0)});
    for (int i = 0; i < 20; ++i) CHECK(pts.contains(pts.sample(r3)));
    CHECK_THROWS_AS(DomainRegion::all(2).sample(r3), std::invalid_argument);
}
