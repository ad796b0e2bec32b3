#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "efp/solver.hpp"

using namespace efp;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

SamplingPlan plan(std::int64_t n = 50000, std::uint64_t seed = 1) {
    SamplingPlan p;
    p.count = n;
    p.seed = seed;
    return p;
}

MappingSpec contraction_5d(std::uint64_t seed) {
    Rng rng(seed);
    Mat M(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) M(i, j) = rng.next_in(-1.0, 1.0);
    Mat Q = Eigen::HouseholderQR<Mat>(M).householderQ();
    Vec c(5);
    for (int i = 0; i < 5; ++i) c(i) = rng.next_in(-1.0, 1.0);
    return make_affine(0.8 * Q, c, DomainRegion::all(5));
}

SpaceSpec space_5d() {
    SpaceSpec sp;
    sp.dimension = 5;
    sp.region = DomainRegion::box(Vec::Constant(5, -5.0), Vec::Constant(5, 5.0));
    sp.norm = NormSpec::euclidean();
    sp.metric = MetricSpec::norm_induced(sp.norm);
    return sp;
}

}  // namespace

TEST_CASE("geometric bound formulas") {
    CHECK(bound_apriori(0.5, 3, 2.0) == doctest::Approx(0.5));       // c^3/(1-c) * r1
    CHECK(bound_aposteriori(0.5, 2.0) == doctest::Approx(2.0));      // c/(1-c) * r
    CHECK(bound_apriori(0.0, 5, 1.0) == 0.0);
    CHECK_THROWS_AS(bound_apriori(1.0, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_apriori(-0.1, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_apriori(0.5, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_aposteriori(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("constant averaged map converges in one recorded step") {
    SolveConfig cfg;
    const SolveReport rep = krasnoselskij_solve(make_reflection_1d(), 0.5, v1(0.0), cfg);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.final_point(0) == 0.5);  // fp-exact
    CHECK(rep.final_residual == 0.0);
    CHECK(rep.trace.rows() == 2);      // x0 plus the single move, no duplicate row
    CHECK(std::isnan(rep.trace.residual[0]));
    CHECK(rep.trace.dist_to_final[1] == 0.0);
}

TEST_CASE("input validation") {
    SolveConfig cfg;
    CHECK_THROWS_AS(krasnoselskij_solve(make_reflection_1d(), 0.0, v1(0.0), cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(krasnoselskij_solve(make_reflection_1d(), 1.5, v1(0.0), cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(krasnoselskij_solve(make_reflection_1d(), 0.5, v1(2.0), cfg),
                    std::domain_error);
    SolveConfig bad;
    bad.tolerance = 0.0;
    CHECK_THROWS_AS(krasnoselskij_solve(make_reflection_1d(), 0.5, v1(0.0), bad),
                    std::invalid_argument);
}

TEST_CASE("reciprocal iteration at lambda = 2/5") {
    SolveConfig cfg;
    const SolveReport rep = krasnoselskij_solve(make_reciprocal_1d(), 0.4, v1(0.5), cfg);
    CHECK(rep.converged);
    CHECK(rep.iterations == 18);  // frozen: deterministic at default tolerance
    CHECK(rep.iterations <= 100);
    CHECK(std::abs(rep.final_point(0) - 1.0) <= 1e-10);
    // trace rows follow the iterate count
    CHECK(rep.trace.rows() == static_cast<std::size_t>(rep.iterations) + 1);
}

TEST_CASE("iteration cap and divergence outcomes") {
    // translation moves forever: cap reached, not converged
    SolveConfig cap;
    cap.max_iterations = 50;
    const SolveReport t = krasnoselskij_solve(make_translation_1d(), 1.0, v1(0.0), cap);
    CHECK_FALSE(t.converged);
    CHECK(t.status == SolveReport::Status::max_iterations);
    CHECK(t.iterations == 50);
    CHECK_FALSE(t.note.empty());

    // doubling map escapes a bounded domain; skip the construction-time
    // self-map check so the escape surfaces during iteration
    SamplingPlan no_check;
    no_check.count = 0;
    const MappingSpec dbl = make_affine(2.0 * Mat::Identity(1, 1), Vec::Zero(1),
                                        DomainRegion::box1d(-4.0, 4.0), &no_check);
    SolveConfig cfg;
    const SolveReport d = krasnoselskij_solve(dbl, 1.0, v1(1.0), cfg);
    CHECK(d.status == SolveReport::Status::diverged_domain);
    CHECK_FALSE(d.converged);
    CHECK(d.note.find("left the domain") != std::string::npos);

    // doubling on an unbounded domain: residual grows until the growth guard
    const MappingSpec dbl_all =
        make_affine(2.0 * Mat::Identity(1, 1), Vec::Zero(1), DomainRegion::all(1));
    SolveConfig wide;
    wide.max_iterations = 1000;
    const SolveReport g = krasnoselskij_solve(dbl_all, 1.0, v1(1.0), wide);
    CHECK(g.status == SolveReport::Status::diverged_residual);
}

TEST_CASE("certificate-driven solve attaches audited bounds") {
    const SpaceSpec sp = space_5d();
    const MappingSpec T = contraction_5d(99);
    ConstantSet k;
    k.b = 0.0;
    k.theta = 0.8 + 1e-12;
    const Certificate cert = certify(ClassId::ENRICHED_BANACH, T, k, sp, plan());
    REQUIRE(cert.pass);

    SolveConfig cfg;
    const SolveReport rep = solve_with_certificate(cert, T, Vec::Constant(5, 4.0), cfg, sp);
    CHECK(rep.converged);
    CHECK(rep.lambda == doctest::Approx(1.0));  // b = 0 gives the plain iteration
    CHECK(rep.bounds_kind == "theorem");
    CHECK(rep.bound_violations == 0);
    REQUIRE(rep.trace.bound_apriori.size() == rep.trace.rows());
    // both bound columns are finite on every post-initial row
    for (std::size_t n = 1; n < rep.trace.rows(); ++n) {
        CHECK(std::isfinite(rep.trace.bound_apriori[n]));
        CHECK(std::isfinite(rep.trace.bound_aposteriori[n]));
    }

    Certificate failed = cert;
    failed.pass = false;
    CHECK_THROWS_AS(solve_with_certificate(failed, T, Vec::Zero(5), cfg, sp),
                    std::invalid_argument);
}

TEST_CASE("bound-target stop rule") {
    const SpaceSpec sp = space_5d();
    const MappingSpec T = contraction_5d(99);
    ConstantSet k;
    k.b = 0.0;
    k.theta = 0.8 + 1e-12;
    const Certificate cert = certify(ClassId::ENRICHED_BANACH, T, k, sp, plan(20000));
    SolveConfig cfg;
    cfg.stop = SolveConfig::StopRule::bound_target;
    cfg.bound_target = 1e-6;
    const SolveReport rep = solve_with_certificate(cert, T, Vec::Constant(5, 4.0), cfg, sp);
    CHECK(rep.converged);
    // stopped once the a posteriori bound cleared the target
    const double c = cert.contraction_factor;
    CHECK(c / (1.0 - c) * rep.final_residual <= 1e-6);
    CHECK(rep.trace.dist_to_final[1] > 1e-6);  // did not stop immediately
}

TEST_CASE("quasi-norm certificates flag their bounds heuristic") {
    SpaceSpec sp;
    sp.dimension = 2;
    sp.norm = NormSpec::quasi_p(0.5);
    sp.metric = MetricSpec::norm_induced(sp.norm);
    sp.region = DomainRegion::box(Vec::Zero(2), Vec::Constant(2, 3.0));
    const MappingSpec T =
        make_affine(Mat::Identity(2, 2) / 3.0, Vec::Ones(2), DomainRegion::all(2));
    ConstantSet k;
    k.b = 0.0;
    k.theta = 1.0 / 3.0;
    const Certificate cert = certify(ClassId::QUASI_BANACH_ENRICHED, T, k, sp, plan());
    REQUIRE(cert.pass);
    SolveConfig cfg;
    const SolveReport rep = solve_with_certificate(cert, T, Vec::Zero(2), cfg, sp);
    CHECK(rep.converged);
    CHECK(rep.bounds_kind == "heuristic");
    CHECK(rep.bound_violations == 0);
    CHECK((rep.final_point - Vec::Constant(2, 1.5)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("convex-structure iteration") {
    // W(x, Tx; lambda) weights the current iterate by lambda
    SolveConfig cfg;
    const MappingSpec T = make_negate_scale_1d();
    const SolveReport rep = convex_metric_solve(T, ConvexStructure{},
                                                MetricSpec::norm_induced(NormSpec::euclidean()),
                                                0.5, v1(1.0), cfg, nullptr);
    CHECK(rep.converged);
    CHECK(std::abs(rep.final_point(0)) <= 1e-10);
    CHECK(rep.bounds_kind == "none");

    SpaceSpec sp = SpaceSpec::euclidean_box(-1.0, 1.0);
    ConstantSet k;
    k.lambda = 0.5;
    k.c = 0.3;
    const Certificate cert = certify(ClassId::CONVEX_METRIC_ENRICHED, T, k, sp, plan(20000));
    REQUIRE(cert.pass);
    const SolveReport with = convex_metric_solve(T, sp.convex, sp.metric, 0.5, v1(1.0), cfg, &cert);
    CHECK(with.converged);
    CHECK(with.bounds_kind == "theorem");
    CHECK(with.bound_violations == 0);

    CHECK_THROWS_AS(convex_metric_solve(T, sp.convex, sp.metric, 1.0, v1(1.0), cfg, nullptr),
                    std::invalid_argument);
}

TEST_CASE("norm-driven iteration measured in a subordinate metric") {
    const SpaceSpec base = SpaceSpec::euclidean_box(0.5, 2.0);
    const Certificate cert =
        optimize_banach_certificate(make_reciprocal_1d(), base, default_b_grid(), plan());
    REQUIRE(cert.pass);

    SpaceSpec sp = base;
    sp.metric = MetricSpec::scaled(sp.norm, 0.5);
    SolveConfig cfg;
    const SolveReport rep = maia_solve(cert, make_reciprocal_1d(), v1(0.5), cfg, sp, plan(20000));
    CHECK(rep.converged);
    CHECK(std::abs(rep.final_point(0) - 1.0) <= 1e-9);
    CHECK(rep.bounds_kind == "theorem");
    CHECK(rep.bound_violations == 0);

    // refuses when the metric sits above the norm
    SpaceSpec bad = base;
    bad.metric = MetricSpec::norm_induced(NormSpec::weighted_sup(Vec::Constant(1, 3.0)));
    CHECK_THROWS_AS(maia_solve(cert, make_reciprocal_1d(), v1(0.5), cfg, bad, plan(20000)),
                    std::invalid_argument);

    // refuses a certificate from the wrong schema
    ConstantSet ene;
    ene.b = 1.5;
    const Certificate wrong =
        certify(ClassId::ENRICHED_NONEXPANSIVE, make_reciprocal_1d(), ene, base, plan(20000));
    CHECK_THROWS_AS(maia_solve(wrong, make_reciprocal_1d(), v1(0.5), cfg, sp, plan(20000)),
                    std::invalid_argument);
}

TEST_CASE("cyclic iteration with certified series bounds") {
    const MappingSpec T = make_negate_scale_1d();
    const DomainRegion cycle = DomainRegion::labeled_union(
        {DomainRegion::box1d(0.0, 1.0), DomainRegion::box1d(-1.0, 0.0)});
    const ComparisonFn phi = ComparisonFn::linear(0.5);
    const auto ccert = default_c_certificate(phi);
    REQUIRE(ccert.has_value());
    const CheckReport proof = check_c_comparison(phi, *ccert);
    SpaceSpec sp = SpaceSpec::euclidean_box(-1.0, 1.0);
    SolveConfig cfg;
    const SolveReport rep =
        cyclic_solve(T, cycle, phi, *ccert, proof, 0.0, v1(1.0), cfg, sp, plan(20000));
    CHECK(rep.converged);
    CHECK(std::abs(rep.final_point(0)) <= 1e-10);
    CHECK(rep.bounds_kind == "theorem");
    CHECK(rep.bound_violations == 0);

    // representation failure is refused up front
    const MappingSpec ident =
        make_affine(Mat::Identity(1, 1), Vec::Zero(1), DomainRegion::box1d(-1.0, 1.0));
    CHECK_THROWS_AS(cyclic_solve(ident, cycle, phi, *ccert, proof, 0.0, v1(1.0), cfg, sp,
                                 plan(5000)),
                    std::invalid_argument);

    // a failed series proof is refused
    CComparisonCert half;
    half.delta = 0.5;
    const CheckReport bad = check_c_comparison(ComparisonFn::rational(), half);
    CHECK_THROWS_AS(cyclic_solve(T, cycle, ComparisonFn::rational(), half, bad, 0.0, v1(1.0),
                                 cfg, sp, plan(5000)),
                    std::invalid_argument);
}

TEST_CASE("presic one-step and k-step methods") {
    PresicMappingSpec T;
    T.arity = 2;
    T.coeffs = {0.25, 0.25};
    T.offset = Vec::Zero(1);
    T.domain = DomainRegion::box1d(-2.0, 2.0);
    ConstantSet k;
    k.theta_list = {0.25, 0.25};
    k.b_list = {0.0, 0.0};
    const SpaceSpec sp = SpaceSpec::euclidean_box(-2.0, 2.0);
    const Certificate cert = certify_presic(T, k, sp, plan(30000));
    REQUIRE(cert.pass);
    const PresicWeights w = PresicWeights::make({0.25, 0.25, 0.5});

    SolveConfig cfg;
    const Vec y0 = v1(1.0);
    const SolveReport diag =
        presic_solve(T, cert, w, std::span<const Vec>(&y0, 1), cfg, sp.norm,
                     PresicMethod::diagonal);
    CHECK(diag.converged);
    CHECK(std::abs(diag.final_point(0)) <= 1e-10);
    CHECK(diag.lambda == doctest::Approx(0.5));

    const std::vector<Vec> init = {v1(1.0), v1(0.5)};
    const SolveReport kstep = presic_solve(T, cert, w, init, cfg, sp.norm, PresicMethod::k_step);
    CHECK(kstep.converged);
    CHECK(std::abs(kstep.final_point(0)) <= 1e-10);
    CHECK(std::abs(kstep.final_point(0) - diag.final_point(0)) <= 1e-9);

    // starting at the fixed point: immediate exact convergence
    const std::vector<Vec> at_fix = {v1(0.0), v1(0.0)};
    const SolveReport still = presic_solve(T, cert, w, at_fix, cfg, sp.norm, PresicMethod::k_step);
    CHECK(still.converged);
    CHECK(still.final_residual == 0.0);

    // init size must match the method
    CHECK_THROWS_AS(presic_solve(T, cert, w, init, cfg, sp.norm, PresicMethod::diagonal),
                    std::invalid_argument);
    Certificate failed = cert;
    failed.pass = false;
    CHECK_THROWS_AS(
        presic_solve(T, failed, w, std::span<const Vec>(&y0, 1), cfg, sp.norm,
                     PresicMethod::diagonal),
        std::invalid_argument);
}
