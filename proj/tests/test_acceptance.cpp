// End-to-end acceptance battery. Each case prints exactly one PASS/FAIL line
// so the run reads as a checklist.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "efp/atlas.hpp"
#include "efp/bench.hpp"
#include "efp/solver.hpp"

using namespace efp;
namespace fs = std::filesystem;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

SamplingPlan plan(std::int64_t n, std::uint64_t seed) {
    SamplingPlan p;
    p.count = n;
    p.seed = seed;
    return p;
}

bool announce(int id, const char* label, bool ok) {
    std::printf("[acceptance] criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", label);
    std::fflush(stdout);
    return ok;
}

MappingSpec rotation_scale(double angle, double rho) {
    Mat A(2, 2);
    A << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return make_affine(rho * A, Vec::Zero(2), DomainRegion::all(2));
}

MappingSpec random_contraction(int d, double factor, std::uint64_t seed, bool with_offset) {
    Rng rng(seed);
    Mat M(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = rng.next_in(-1.0, 1.0);
    Mat Q = Eigen::HouseholderQR<Mat>(M).householderQ();
    Vec c = Vec::Zero(d);
    if (with_offset)
        for (int i = 0; i < d; ++i) c(i) = rng.next_in(-1.0, 1.0);
    return make_affine(factor * Q, c, DomainRegion::all(d));
}

MappingSpec random_affine(int d, std::uint64_t seed) {
    Rng rng(seed);
    Mat A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = rng.next_in(-1.2, 1.2);
    Vec c(d);
    for (int i = 0; i < d; ++i) c(i) = rng.next_in(-0.5, 0.5);
    return make_affine(A, c, DomainRegion::all(d));
}

SpaceSpec dim_space(int d, double lo, double hi) {
    SpaceSpec sp;
    sp.dimension = d;
    sp.region = DomainRegion::box(Vec::Constant(d, lo), Vec::Constant(d, hi));
    return sp;
}

double worst_slack(const Trace& tr) {
    double w = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < tr.rows(); ++n) {
        auto acc = [&](const std::vector<double>& col) {
            if (n < col.size() && std::isfinite(col[n]))
                w = std::max(w, tr.dist_to_final[n] - col[n]);
        };
        acc(tr.bound_apriori);
        acc(tr.bound_aposteriori);
    }
    return w;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("1: reflection, optimal enrichment, one-step solve") {
    const MappingSpec T = make_reflection_1d();
    const SpaceSpec unit = SpaceSpec::euclidean_box(0.0, 1.0);
    const SamplingPlan p = plan(100000, 101);

    const Certificate best = optimize_banach_certificate(T, unit, default_b_grid(), p);
    bool ok = best.pass && best.consts.b.has_value() && *best.consts.b == 1.0 &&
              best.consts.theta.has_value() && *best.consts.theta <= 1e-10;

    ok = ok && certify(ClassId::NE, T, ConstantSet{}, unit, p).pass;

    const Certificate b0 = optimize_banach_certificate(T, unit, {0.0}, p);
    ok = ok && !b0.pass && b0.ratio_argmax_args.size() == 2;

    Rng starts(7);
    SolveConfig cfg;
    for (int i = 0; i < 10 && ok; ++i) {
        const SolveReport rep =
            solve_with_certificate(best, T, v1(starts.next_unit()), cfg, unit);
        ok = rep.converged && rep.iterations == 1 &&
             std::abs(rep.final_point(0) - 0.5) <= 1e-12;
    }
    CHECK(announce(1, "reflection map: averaged form is a strict contraction", ok));
}

TEST_CASE("2: reciprocal, averaged nonexpansiveness and convergence") {
    const MappingSpec T = make_reciprocal_1d();
    const SpaceSpec sp = SpaceSpec::euclidean_box(0.5, 2.0);
    const SamplingPlan p = plan(100000, 102);

    ConstantSet kk;
    kk.b = 1.5;
    const Certificate ene = certify(ClassId::ENRICHED_NONEXPANSIVE, T, kk, sp, p);
    bool ok = ene.pass && ene.min_margin >= 0.0 && ene.sample_count == 100000;

    const Certificate ne = certify(ClassId::NE, T, ConstantSet{}, sp, p);
    ok = ok && !ne.pass && ne.ratio_argmax_args.size() == 2 &&
         std::abs(ne.ratio_argmax_args[0](0) - 0.5) <= 0.05 &&
         std::abs(ne.ratio_argmax_args[1](0) - 0.5) <= 0.05;

    SolveConfig cfg;
    const SolveReport rep = krasnoselskij_solve(T, 0.4, v1(0.5), cfg, sp.norm);
    ok = ok && rep.converged && rep.iterations <= 100 &&
         std::abs(rep.final_point(0) - 1.0) <= 1e-10;
    CHECK(announce(2, "reciprocal map: enrichment rescues nonexpansiveness", ok));
}

TEST_CASE("3: discontinuous two-branch map as an almost contraction") {
    const MappingSpec T = make_two_branch_reflection();
    const SpaceSpec sp = SpaceSpec::euclidean_box(0.0, 4.0 / 3.0);
    const SamplingPlan p = plan(100000, 103);

    ConstantSet kk;
    kk.b = 1.0;
    kk.theta = 1.9;
    kk.L = 3.0;
    bool ok = certify(ClassId::ENRICHED_ALMOST, T, kk, sp, p).pass;

    const FixSet fix = {v1(0.5), v1(1.0)};
    const MembershipReport mem = classify(T, sp, p, &fix);
    ok = ok && mem.ne.verdict == Verdict::fail && mem.qne.verdict == Verdict::fail;

    SolveConfig cfg;
    const SolveReport low = krasnoselskij_solve(T, 0.5, v1(0.3), cfg, sp.norm);
    const SolveReport high = krasnoselskij_solve(T, 0.5, v1(1.2), cfg, sp.norm);
    ok = ok && low.converged && low.iterations == 1 && low.final_point(0) == 0.5 &&
         high.converged && high.iterations == 1 && high.final_point(0) == 1.0;
    CHECK(announce(3, "two-branch map: almost-contractive despite the jump", ok));
}

TEST_CASE("4: error bounds audited along every trace") {
    SolveConfig cfg;
    const double allow = 10.0 * cfg.tolerance;
    bool ok = true;
    auto audited = [&](const Certificate& cert, const MappingSpec& T, const Vec& x0,
                       const SpaceSpec& sp) {
        const SolveReport rep = solve_with_certificate(cert, T, x0, cfg, sp);
        ok = ok && rep.converged && rep.bound_violations == 0 &&
             worst_slack(rep.trace) <= allow;
    };

    const MappingSpec reflect = make_reflection_1d();
    const SpaceSpec unit = SpaceSpec::euclidean_box(0.0, 1.0);
    audited(optimize_banach_certificate(reflect, unit, default_b_grid(), plan(100000, 104)),
            reflect, v1(0.1), unit);

    const MappingSpec recip = make_reciprocal_1d();
    const SpaceSpec rsp = SpaceSpec::euclidean_box(0.5, 2.0);
    audited(optimize_banach_certificate(recip, rsp, default_b_grid(), plan(100000, 104)),
            recip, v1(0.5), rsp);

    const MappingSpec twob = make_two_branch_reflection();
    const SpaceSpec tsp = SpaceSpec::euclidean_box(0.0, 4.0 / 3.0);
    ConstantSet almost;
    almost.b = 1.0;
    almost.theta = 1.9;
    almost.L = 3.0;
    audited(certify(ClassId::ENRICHED_ALMOST, twob, almost, tsp, plan(100000, 104)), twob,
            v1(0.3), tsp);

    const MappingSpec T5 = random_contraction(5, 0.8, 104, true);
    const SpaceSpec sp5 = dim_space(5, -5.0, 5.0);
    ConstantSet banach;
    banach.b = 0.0;
    banach.theta = 0.8 + 1e-12;
    audited(certify(ClassId::ENRICHED_BANACH, T5, banach, sp5, plan(100000, 104)), T5,
            Vec::Constant(5, 4.0), sp5);

    CHECK(announce(4, "a priori and a posteriori bounds hold on all four traces", ok));
}

TEST_CASE("5: squared-form and averaged-form checks agree in the plane") {
    const SpaceSpec sp = dim_space(3, -2.0, 2.0);
    bool ok = true;
    for (std::uint64_t s = 1; s <= 20 && ok; ++s) {
        const MappingSpec T = random_affine(3, 1000 + s);
        for (double k : {0.1, 0.5, 0.9}) {
            const CheckReport rep = p5_equivalence_check(T, sp, k, plan(100000, s));
            ok = ok && rep.pass && rep.max_violation == 0.0;
        }
    }
    CHECK(announce(5, "zero verdict disagreements across 60 sweeps", ok));
}

TEST_CASE("6: averaging composes multiplicatively on the whole catalog") {
    bool ok = true;
    auto check = [&](const MappingSpec& T, const DomainRegion& region) {
        const CheckReport rep = averaging_algebra_check(T, region, plan(10000, 106));
        ok = ok && rep.pass;
    };
    check(make_reflection_1d(), DomainRegion::box1d(0.0, 1.0));
    check(make_reciprocal_1d(), DomainRegion::box1d(0.5, 2.0));
    check(make_negate_scale_1d(), DomainRegion::box1d(-1.0, 1.0));
    check(make_two_branch_reflection(), DomainRegion::box1d(0.0, 4.0 / 3.0));
    check(make_zigzag_1d(), DomainRegion::box1d(0.0, 1.0));
    check(make_translation_1d(), DomainRegion::box1d(0.0, 1.0));
    check(rotation_scale(std::numbers::pi / 3.0, 1.2),
          DomainRegion::box(Vec::Constant(2, -3.0), Vec::Constant(2, 3.0)));
    check(random_contraction(5, 0.8, 106, false),
          DomainRegion::box(Vec::Constant(5, -5.0), Vec::Constant(5, 5.0)));
    CHECK(announce(6, "composed averagings match the product weight", ok));
}

TEST_CASE("7: cyclic iteration respects the summed-gauge bound") {
    const MappingSpec T = make_negate_scale_1d();
    const DomainRegion cycle = DomainRegion::labeled_union(
        {DomainRegion::box1d(0.0, 1.0), DomainRegion::box1d(-1.0, 0.0)});
    const ComparisonFn phi = ComparisonFn::linear(0.5);
    const auto ccert = default_c_certificate(phi);
    const CheckReport proof = check_c_comparison(phi, *ccert);
    const SamplingPlan p = plan(50000, 107);

    bool ok = check_cyclic_representation(T, cycle, p).pass;

    SolveConfig cfg;
    const SolveReport rep =
        cyclic_solve(T, cycle, phi, *ccert, proof, 0.0, v1(1.0), cfg,
                     SpaceSpec::euclidean_box(-1.0, 1.0), p);
    ok = ok && rep.converged && std::abs(rep.final_point(0)) <= 1e-10 &&
         rep.bound_violations == 0;

    // recompute the a priori column independently: |x_n| <= s(phi^n(r_1))
    if (ok) {
        const double r1 = rep.trace.residual[1];
        for (std::size_t n = 1; n < rep.trace.rows() && ok; ++n) {
            const double bound =
                series_sum(phi, *ccert, proof, phi_iterate(phi, r1, static_cast<std::int64_t>(n)));
            ok = rep.trace.iterates[n].norm() <= bound + 1e-12;
        }
    }
    CHECK(announce(7, "two-interval cycle converges inside the series bound", ok));
}

TEST_CASE("8: presic schemes agree and land on the diagonal") {
    PresicMappingSpec T;
    T.arity = 2;
    T.coeffs = {0.25, 0.25};
    T.offset = Vec::Zero(1);
    T.domain = DomainRegion::box1d(-2.0, 2.0);
    const SpaceSpec sp = SpaceSpec::euclidean_box(-2.0, 2.0);
    ConstantSet kk;
    kk.theta_list = {0.25, 0.25};
    kk.b_list = {0.0, 0.0};
    const Certificate cert = certify_presic(T, kk, sp, plan(100000, 108));
    bool ok = cert.pass;

    const PresicWeights w = PresicWeights::make({0.25, 0.25, 0.5});
    SolveConfig cfg;
    const Vec y0 = v1(1.0);
    const SolveReport diag = presic_solve(T, cert, w, std::span<const Vec>(&y0, 1), cfg,
                                          sp.norm, PresicMethod::diagonal);
    const std::vector<Vec> init = {v1(1.0), v1(0.5)};
    const SolveReport kstep = presic_solve(T, cert, w, init, cfg, sp.norm, PresicMethod::k_step);
    ok = ok && diag.converged && kstep.converged && std::abs(diag.final_point(0)) <= 1e-10 &&
         std::abs(kstep.final_point(0)) <= 1e-10 &&
         std::abs(diag.final_point(0) - kstep.final_point(0)) <= 1e-9 &&
         diagonal_residual(T, sp.norm, diag.final_point) <= 1e-10;
    CHECK(announce(8, "one-step and two-step runs reach the same point", ok));
}

TEST_CASE("9: quasi-norm space with modulus-aware certification") {
    SpaceSpec sp;
    sp.dimension = 2;
    sp.norm = NormSpec::quasi_p(0.5);
    sp.metric = MetricSpec::norm_induced(sp.norm);
    sp.region = DomainRegion::box(Vec::Zero(2), Vec::Constant(2, 3.0));

    const ModulusReport mod = quasinorm_modulus(sp.norm, sp.region, plan(100000, 109));
    bool ok = mod.analytic == 2.0 && mod.empirical <= 2.0 + 1e-9 && mod.empirical >= 1.0;

    const MappingSpec T =
        make_affine(Mat::Identity(2, 2) / 3.0, Vec::Ones(2), DomainRegion::all(2));
    ConstantSet kk;
    kk.b = 0.0;
    kk.theta = 1.0 / 3.0;
    const Certificate cert = certify(ClassId::QUASI_BANACH_ENRICHED, T, kk, sp, plan(100000, 109));
    ok = ok && cert.pass;

    SolveConfig cfg;
    const SolveReport rep = solve_with_certificate(cert, T, Vec::Zero(2), cfg, sp);
    ok = ok && rep.converged &&
         (rep.final_point - Vec::Constant(2, 1.5)).cwiseAbs().maxCoeff() <= 1e-10;
    CHECK(announce(9, "half-power norm: certificate and solve both land", ok));
}

TEST_CASE("10: comparison-gauge calculus") {
    bool ok = check_comparison(ComparisonFn::rational()).pass &&
              check_comparison(ComparisonFn::linear(0.5)).pass &&
              check_comparison(ComparisonFn::split()).pass &&
              !check_comparison(ComparisonFn::identity()).pass;

    const ComparisonFn lin = ComparisonFn::linear(0.5);
    const auto ccert = default_c_certificate(lin);
    const CheckReport proof = check_c_comparison(lin, *ccert);
    ok = ok && std::abs(series_sum(lin, *ccert, proof, 1.0) - 1.0) <= 1e-12;
    ok = ok &&
         std::abs(phi_iterate(ComparisonFn::rational(), 1.0, 1000) - 1.0 / 1001.0) <= 1e-15;
    CHECK(announce(10, "gauge axioms, series sum and iterate closed forms", ok));
}

TEST_CASE("11: the inclusion diagram has no sampled counterexample") {
    struct Entry {
        MappingSpec map;
        SpaceSpec space;
        FixSet fix;
    };
    std::vector<Entry> cat;
    cat.push_back({make_reflection_1d(), SpaceSpec::euclidean_box(0.0, 1.0), {v1(0.5)}});
    cat.push_back({make_reciprocal_1d(), SpaceSpec::euclidean_box(0.5, 2.0), {v1(1.0)}});
    cat.push_back({make_negate_scale_1d(), SpaceSpec::euclidean_box(-1.0, 1.0), {v1(0.0)}});
    cat.push_back({make_two_branch_reflection(), SpaceSpec::euclidean_box(0.0, 4.0 / 3.0),
                   {v1(0.5), v1(1.0)}});
    cat.push_back({make_zigzag_1d(), SpaceSpec::euclidean_box(0.0, 1.0), {v1(0.0)}});
    cat.push_back({rotation_scale(std::numbers::pi / 3.0, 1.2), dim_space(2, -3.0, 3.0),
                   {Vec::Zero(2)}});
    cat.push_back({random_contraction(5, 0.8, 111, false), dim_space(5, -5.0, 5.0),
                   {Vec::Zero(5)}});

    int counterexamples = 0;
    bool spc_minus_ne = false, dc_minus_qne = false;
    auto implies = [&](const MembershipEntry& a, const MembershipEntry& b) {
        if (a.verdict == Verdict::pass && b.verdict == Verdict::fail) ++counterexamples;
    };
    for (const auto& e : cat) {
        const MembershipReport r = classify(e.map, e.space, plan(100000, 111), &e.fix);
        implies(r.ne, r.spc);
        implies(r.spc, r.dc);
        implies(r.ne, r.qne);
        implies(r.qne, r.dc);
        spc_minus_ne = spc_minus_ne ||
                       (r.spc.verdict == Verdict::pass && r.ne.verdict == Verdict::fail);
        dc_minus_qne = dc_minus_qne ||
                       (r.dc.verdict == Verdict::pass && r.qne.verdict == Verdict::fail);
    }
    const bool ok = counterexamples == 0 && spc_minus_ne && dc_minus_qne;
    CHECK(announce(11, "class chain holds; both strict gaps are witnessed", ok));
}

TEST_CASE("12: example battery reruns byte-identically") {
    const fs::path a = fs::temp_directory_path() / "efp-acc-bench-a";
    const fs::path b = fs::temp_directory_path() / "efp-acc-bench-b";
    fs::remove_all(a);
    fs::remove_all(b);
    const BenchResult ra = run_bench("paper-examples", 424242, a);
    const BenchResult rb = run_bench("paper-examples", 424242, b);

    bool ok = ra.all_pass() && rb.all_pass();
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        const fs::path twin = b / entry.path().filename();
        ok = ok && fs::exists(twin) &&
             strip_generated_header(slurp(entry.path())) ==
                 strip_generated_header(slurp(twin));
        ++compared;
    }
    ok = ok && compared > 0;
    CHECK(announce(12, "same seed, same reports, timestamps aside", ok));
}
