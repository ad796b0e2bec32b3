#include "efp/bench.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

namespace efp {

namespace {

namespace fs = std::filesystem;

SamplingPlan plan_of(std::uint64_t seed, std::int64_t count = 100000) {
    SamplingPlan p;
    p.count = count;
    p.seed = seed;
    return p;
}

SpaceSpec box_space(double lo, double hi) { return SpaceSpec::euclidean_box(lo, hi); }

MappingSpec rotation_scale_2d(double angle, double rho) {
    Mat A(2, 2);
    A << rho * std::cos(angle), -rho * std::sin(angle),
         rho * std::sin(angle),  rho * std::cos(angle);
    return make_affine(A, Vec::Zero(2), DomainRegion::all(2));
}

// orthogonal factor of a seeded random matrix, scaled to the target spectral
// norm; the contraction factor is exact up to rounding
MappingSpec random_contraction(int d, double factor, std::uint64_t seed, bool with_offset) {
    Rng rng(seed);
    Mat M(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = rng.next_in(-1.0, 1.0);
    Eigen::HouseholderQR<Mat> qr(M);
    Mat Q = qr.householderQ();
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
    sp.norm = NormSpec::euclidean();
    sp.metric = MetricSpec::norm_induced(sp.norm);
    sp.convex = ConvexStructure{};
    sp.region = DomainRegion::box(Vec::Constant(d, lo), Vec::Constant(d, hi));
    return sp;
}

void emit(const fs::path& out_dir, const std::string& name, const std::string& body) {
    if (out_dir.empty()) return;
    write_report_file((out_dir / name).string(), body);
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
        acc(tr.aux_bound);
    }
    return w;
}

BenchCase guarded(const std::string& name, const std::function<BenchCase()>& body) {
    try {
        BenchCase c = body();
        c.name = name;
        return c;
    } catch (const std::exception& e) {
        BenchCase c;
        c.name = name;
        c.pass = false;
        c.note = std::string("threw: ") + e.what();
        return c;
    }
}

// ---- paper-examples -------------------------------------------------------

std::vector<BenchCase> suite_paper(std::uint64_t seed, const fs::path& out) {
    std::vector<BenchCase> cases;
    const SamplingPlan plan = plan_of(seed);

    const MappingSpec reflect = make_reflection_1d();
    const SpaceSpec unit = box_space(0.0, 1.0);

    cases.push_back(guarded("reflection-best-constant", [&] {
        const Certificate cert = optimize_banach_certificate(reflect, unit, default_b_grid(), plan);
        emit(out, "reflection_certificate.txt", certificate_to_text(cert));
        BenchCase c;
        c.pass = cert.pass && cert.consts.b && *cert.consts.b == 1.0 &&
                 cert.consts.theta && *cert.consts.theta <= 1e-10;
        c.note = "b=" + std::to_string(cert.consts.b.value_or(-1.0));
        return c;
    }));

    cases.push_back(guarded("reflection-solve", [&] {
        const Certificate cert = optimize_banach_certificate(reflect, unit, default_b_grid(), plan);
        SolveConfig scfg;
        const SolveReport rep = solve_with_certificate(cert, reflect, Vec::Zero(1), scfg, unit);
        emit(out, "reflection_solve.txt", solve_report_to_text(rep));
        emit(out, "reflection_trace.csv", trace_to_csv(rep.trace));
        BenchCase c;
        c.iterations = rep.iterations;
        c.worst_bound_slack = worst_slack(rep.trace);
        c.pass = rep.converged && rep.iterations == 1 &&
                 std::abs(rep.final_point(0) - 0.5) <= 1e-12 && rep.bound_violations == 0;
        return c;
    }));

    cases.push_back(guarded("reflection-plain-contraction-fails", [&] {
        const Certificate cert = optimize_banach_certificate(reflect, unit, {0.0}, plan);
        emit(out, "banach_b0_certificate.txt", certificate_to_text(cert));
        BenchCase c;
        c.pass = !cert.pass && cert.ratio_argmax_args.size() == 2;
        c.note = "sup ratio " + std::to_string(cert.sup_ratio);
        return c;
    }));

    const MappingSpec recip = make_reciprocal_1d();
    const SpaceSpec recip_space = box_space(0.5, 2.0);

    cases.push_back(guarded("reciprocal-averaged-nonexpansive", [&] {
        ConstantSet kk;
        kk.b = 1.5;
        const Certificate cert =
            certify(ClassId::ENRICHED_NONEXPANSIVE, recip, kk, recip_space, plan);
        emit(out, "reciprocal_ene_certificate.txt", certificate_to_text(cert));
        BenchCase c;
        c.pass = cert.pass && cert.min_margin >= 0.0;
        c.note = "min margin " + std::to_string(cert.min_margin);
        return c;
    }));

    cases.push_back(guarded("reciprocal-not-nonexpansive", [&] {
        const Certificate cert = certify(ClassId::NE, recip, ConstantSet{}, recip_space, plan);
        emit(out, "reciprocal_ne_certificate.txt", certificate_to_text(cert));
        BenchCase c;
        c.pass = !cert.pass && cert.ratio_argmax_args.size() == 2 &&
                 std::abs(cert.ratio_argmax_args[0](0) - 0.5) <= 0.05 &&
                 std::abs(cert.ratio_argmax_args[1](0) - 0.5) <= 0.05;
        return c;
    }));

    cases.push_back(guarded("reciprocal-solve", [&] {
        SolveConfig scfg;
        const SolveReport rep =
            krasnoselskij_solve(recip, 0.4, Vec::Constant(1, 0.5), scfg, recip_space.norm);
        emit(out, "reciprocal_solve.txt", solve_report_to_text(rep));
        emit(out, "reciprocal_trace.csv", trace_to_csv(rep.trace));
        BenchCase c;
        c.iterations = rep.iterations;
        c.pass = rep.converged && rep.iterations <= 100 &&
                 std::abs(rep.final_point(0) - 1.0) <= 1e-10;
        return c;
    }));

    const MappingSpec twob = make_two_branch_reflection();
    const SpaceSpec twob_space = box_space(0.0, 4.0 / 3.0);
    const FixSet twob_fix = {Vec::Constant(1, 0.5), Vec::Constant(1, 1.0)};

    cases.push_back(guarded("two-branch-almost-contraction", [&] {
        ConstantSet kk;
        kk.b = 1.0;
        kk.theta = 1.9;
        kk.L = 3.0;
        const Certificate cert = certify(ClassId::ENRICHED_ALMOST, twob, kk, twob_space, plan);
        emit(out, "almost_certificate.txt", certificate_to_text(cert));
        BenchCase c;
        c.pass = cert.pass;
        c.note = "min margin " + std::to_string(cert.min_margin);
        return c;
    }));

    cases.push_back(guarded("two-branch-membership", [&] {
        const MembershipReport rep = classify(twob, twob_space, plan, &twob_fix);
        emit(out, "almost_membership.txt", membership_to_text(rep));
        BenchCase c;
        c.pass = rep.ne.verdict == Verdict::fail && rep.qne.verdict == Verdict::fail;
        return c;
    }));

    cases.push_back(guarded("two-branch-solve", [&] {
        SolveConfig scfg;
        const SolveReport a =
            krasnoselskij_solve(twob, 0.5, Vec::Constant(1, 0.3), scfg, twob_space.norm);
        const SolveReport b =
            krasnoselskij_solve(twob, 0.5, Vec::Constant(1, 1.2), scfg, twob_space.norm);
        emit(out, "almost_solve_low.txt", solve_report_to_text(a));
        emit(out, "almost_solve_high.txt", solve_report_to_text(b));
        BenchCase c;
        c.iterations = std::max(a.iterations, b.iterations);
        c.pass = a.converged && a.iterations == 1 && a.final_point(0) == 0.5 &&
                 b.converged && b.iterations == 1 && b.final_point(0) == 1.0;
        return c;
    }));

    cases.push_back(guarded("cyclic-two-interval", [&] {
        const MappingSpec T = make_negate_scale_1d();
        const DomainRegion cycle = DomainRegion::labeled_union(
            {DomainRegion::box1d(0.0, 1.0), DomainRegion::box1d(-1.0, 0.0)});
        SpaceSpec sp = box_space(-1.0, 1.0);
        const ComparisonFn phi = ComparisonFn::linear(0.5);
        const auto ccert = default_c_certificate(phi);
        const CheckReport proof = check_c_comparison(phi, *ccert);
        ConstantSet kk;
        kk.b = 0.0;
        kk.phi = phi;
        SpaceSpec union_sp = sp;
        union_sp.region = cycle;
        const Certificate cert = certify(ClassId::CYCLIC_ENRICHED_PHI, T, kk, union_sp, plan);
        emit(out, "cyclic_certificate.txt", certificate_to_text(cert));
        SolveConfig scfg;
        const SolveReport rep =
            cyclic_solve(T, cycle, phi, *ccert, proof, 0.0, Vec::Ones(1), scfg, sp, plan);
        emit(out, "cyclic_solve.txt", solve_report_to_text(rep));
        emit(out, "cyclic_trace.csv", trace_to_csv(rep.trace));
        BenchCase c;
        c.iterations = rep.iterations;
        c.worst_bound_slack = worst_slack(rep.trace);
        c.pass = cert.pass && rep.converged && std::abs(rep.final_point(0)) <= 1e-10 &&
                 rep.bound_violations == 0;
        return c;
    }));

    cases.push_back(guarded("presic-two-step", [&] {
        PresicMappingSpec T;
        T.arity = 2;
        T.coeffs = {0.25, 0.25};
        T.domain = DomainRegion::box1d(-2.0, 2.0);
        T.offset = Vec::Zero(1);
        SpaceSpec sp = box_space(-2.0, 2.0);
        ConstantSet kk;
        kk.theta_list = {0.25, 0.25};
        kk.b_list = {0.0, 0.0};
        const Certificate cert = certify_presic(T, kk, sp, plan);
        emit(out, "presic_certificate.txt", certificate_to_text(cert));
        const PresicWeights w = PresicWeights::make({0.25, 0.25, 0.5});
        SolveConfig scfg;
        const Vec y0 = Vec::Ones(1);
        const SolveReport diag =
            presic_solve(T, cert, w, std::span<const Vec>(&y0, 1), scfg, sp.norm,
                         PresicMethod::diagonal);
        const std::vector<Vec> init = {Vec::Ones(1), Vec::Constant(1, 0.5)};
        const SolveReport kstep =
            presic_solve(T, cert, w, init, scfg, sp.norm, PresicMethod::k_step);
        emit(out, "presic_diagonal_solve.txt", solve_report_to_text(diag));
        emit(out, "presic_kstep_solve.txt", solve_report_to_text(kstep));
        BenchCase c;
        c.iterations = std::max(diag.iterations, kstep.iterations);
        const double gap =
            std::abs(diag.final_point(0) - kstep.final_point(0));
        c.pass = cert.pass && diag.converged && kstep.converged &&
                 std::abs(diag.final_point(0)) <= 1e-10 &&
                 std::abs(kstep.final_point(0)) <= 1e-10 && gap <= 1e-9 &&
                 diagonal_residual(T, sp.norm, diag.final_point) <= 1e-10;
        return c;
    }));

    cases.push_back(guarded("quasi-norm-contraction", [&] {
        SpaceSpec sp;
        sp.dimension = 2;
        sp.norm = NormSpec::quasi_p(0.5);
        sp.metric = MetricSpec::norm_induced(sp.norm);
        sp.convex = ConvexStructure{};
        sp.region = DomainRegion::box(Vec::Zero(2), Vec::Constant(2, 3.0));
        const ModulusReport mod = quasinorm_modulus(sp.norm, sp.region, plan);
        Mat A = Mat::Identity(2, 2) / 3.0;
        const MappingSpec T = make_affine(A, Vec::Ones(2), DomainRegion::all(2));
        ConstantSet kk;
        kk.b = 0.0;
        kk.theta = 1.0 / 3.0;
        const Certificate cert = certify(ClassId::QUASI_BANACH_ENRICHED, T, kk, sp, plan);
        emit(out, "quasibanach_certificate.txt", certificate_to_text(cert));
        SolveConfig scfg;
        const SolveReport rep = solve_with_certificate(cert, T, Vec::Zero(2), scfg, sp);
        emit(out, "quasibanach_solve.txt", solve_report_to_text(rep));
        BenchCase c;
        c.iterations = rep.iterations;
        c.pass = mod.empirical <= mod.analytic + 1e-9 && mod.analytic == 2.0 && cert.pass &&
                 rep.converged &&
                 (rep.final_point - Vec::Constant(2, 1.5)).cwiseAbs().maxCoeff() <= 1e-10;
        return c;
    }));

    cases.push_back(guarded("comparison-gauges", [&] {
        const bool cat_pass = check_comparison(ComparisonFn::rational()).pass &&
                              check_comparison(ComparisonFn::linear(0.5)).pass &&
                              check_comparison(ComparisonFn::split()).pass;
        const bool id_fails = !check_comparison(ComparisonFn::identity()).pass;
        const ComparisonFn lin = ComparisonFn::linear(0.5);
        const auto ccert = default_c_certificate(lin);
        const CheckReport proof = check_c_comparison(lin, *ccert);
        const double s1 = series_sum(lin, *ccert, proof, 1.0);
        const double it = phi_iterate(ComparisonFn::rational(), 1.0, 1000);
        BenchCase c;
        c.pass = cat_pass && id_fails && std::abs(s1 - 1.0) <= 1e-12 &&
                 std::abs(it - 1.0 / 1001.0) <= 1e-15;
        return c;
    }));

    return cases;
}

// ---- bounds ---------------------------------------------------------------

std::vector<BenchCase> suite_bounds(std::uint64_t seed, const fs::path& out) {
    std::vector<BenchCase> cases;
    const SamplingPlan plan = plan_of(seed);
    SolveConfig scfg;

    auto audited = [&](const std::string& name, const Certificate& cert, const MappingSpec& T,
                       const Vec& x0, const SpaceSpec& sp) {
        return guarded(name, [&] {
            const SolveReport rep = solve_with_certificate(cert, T, x0, scfg, sp);
            emit(out, name + "_trace.csv", trace_to_csv(rep.trace));
            BenchCase c;
            c.iterations = rep.iterations;
            c.worst_bound_slack = worst_slack(rep.trace);
            c.pass = rep.converged && rep.bounds_kind == "theorem" && rep.bound_violations == 0;
            return c;
        });
    };

    const MappingSpec reflect = make_reflection_1d();
    const SpaceSpec unit = box_space(0.0, 1.0);
    cases.push_back(audited(
        "bounds-reflection",
        optimize_banach_certificate(reflect, unit, default_b_grid(), plan), reflect,
        Vec::Constant(1, 0.1), unit));

    const MappingSpec recip = make_reciprocal_1d();
    const SpaceSpec recip_space = box_space(0.5, 2.0);
    cases.push_back(audited(
        "bounds-reciprocal",
        optimize_banach_certificate(recip, recip_space, default_b_grid(), plan), recip,
        Vec::Constant(1, 0.5), recip_space));

    const MappingSpec twob = make_two_branch_reflection();
    const SpaceSpec twob_space = box_space(0.0, 4.0 / 3.0);
    cases.push_back(guarded("bounds-two-branch", [&] {
        ConstantSet kk;
        kk.b = 1.0;
        kk.theta = 1.9;
        kk.L = 3.0;
        const Certificate cert = certify(ClassId::ENRICHED_ALMOST, twob, kk, twob_space, plan);
        const SolveReport rep =
            solve_with_certificate(cert, twob, Vec::Constant(1, 0.3), scfg, twob_space);
        emit(out, "bounds-two-branch_trace.csv", trace_to_csv(rep.trace));
        BenchCase c;
        c.iterations = rep.iterations;
        c.worst_bound_slack = worst_slack(rep.trace);
        c.pass = rep.converged && rep.bound_violations == 0;
        return c;
    }));

    cases.push_back(guarded("bounds-affine-contraction-5d", [&] {
        const MappingSpec T = random_contraction(5, 0.8, seed ^ 0x9e3779b97f4a7c15ull, true);
        const SpaceSpec sp = dim_space(5, -5.0, 5.0);
        ConstantSet kk;
        kk.b = 0.0;
        kk.theta = 0.8 + 1e-12;
        const Certificate cert = certify(ClassId::ENRICHED_BANACH, T, kk, sp, plan);
        const SolveReport rep = solve_with_certificate(cert, T, Vec::Constant(5, 4.0), scfg, sp);
        emit(out, "bounds-affine5_trace.csv", trace_to_csv(rep.trace));
        BenchCase c;
        c.iterations = rep.iterations;
        c.worst_bound_slack = worst_slack(rep.trace);
        c.pass = cert.pass && rep.converged && rep.bound_violations == 0;
        return c;
    }));

    return cases;
}

// ---- atlas ----------------------------------------------------------------

struct CatalogEntry {
    std::string name;
    MappingSpec map;
    SpaceSpec space;
    FixSet fix;
};

std::vector<CatalogEntry> atlas_catalog(std::uint64_t seed) {
    std::vector<CatalogEntry> cat;
    cat.push_back({"reflection", make_reflection_1d(), box_space(0.0, 1.0),
                   {Vec::Constant(1, 0.5)}});
    cat.push_back({"reciprocal", make_reciprocal_1d(), box_space(0.5, 2.0),
                   {Vec::Ones(1)}});
    cat.push_back({"negate-scale", make_negate_scale_1d(), box_space(-1.0, 1.0),
                   {Vec::Zero(1)}});
    cat.push_back({"two-branch", make_two_branch_reflection(), box_space(0.0, 4.0 / 3.0),
                   {Vec::Constant(1, 0.5), Vec::Constant(1, 1.0)}});
    cat.push_back({"zigzag", make_zigzag_1d(), box_space(0.0, 1.0), {Vec::Zero(1)}});
    cat.push_back({"rotation-scale", rotation_scale_2d(3.14159265358979 / 3.0, 1.2),
                   dim_space(2, -3.0, 3.0), {Vec::Zero(2)}});
    cat.push_back({"contraction-5d", random_contraction(5, 0.8, seed ^ 0xc2b2ae3d27d4eb4full, false),
                   dim_space(5, -5.0, 5.0), {Vec::Zero(5)}});
    return cat;
}

std::vector<BenchCase> suite_atlas(std::uint64_t seed, const fs::path& out) {
    std::vector<BenchCase> cases;
    const SamplingPlan plan = plan_of(seed);
    const auto cat = atlas_catalog(seed);

    std::vector<MembershipReport> reports;
    for (const auto& e : cat) reports.push_back(classify(e.map, e.space, plan, &e.fix));

    cases.push_back(guarded("inclusion-diagram", [&] {
        std::string bad;
        auto implies = [&](const std::string& who, const MembershipEntry& a,
                           const MembershipEntry& b, const char* what) {
            if (a.verdict == Verdict::pass && b.verdict == Verdict::fail)
                bad += who + ":" + what + " ";
        };
        for (std::size_t i = 0; i < cat.size(); ++i) {
            const auto& r = reports[i];
            implies(cat[i].name, r.ne, r.spc, "NE->SPC");
            implies(cat[i].name, r.ne, r.qne, "NE->QNE");
            implies(cat[i].name, r.spc, r.dc, "SPC->DC");
            implies(cat[i].name, r.qne, r.dc, "QNE->DC");
        }
        BenchCase c;
        c.pass = bad.empty();
        c.note = bad.empty() ? "no counterexamples" : bad;
        return c;
    }));

    cases.push_back(guarded("strict-separations", [&] {
        bool spc_not_ne = false, dc_not_qne = false;
        for (const auto& r : reports) {
            if (r.spc.verdict == Verdict::pass && r.ne.verdict == Verdict::fail)
                spc_not_ne = true;
            if (r.dc.verdict == Verdict::pass && r.qne.verdict == Verdict::fail)
                dc_not_qne = true;
        }
        BenchCase c;
        c.pass = spc_not_ne && dc_not_qne;
        return c;
    }));

    cases.push_back(guarded("hilbert-equivalence", [&] {
        bool all = true;
        for (int m = 0; m < 3; ++m) {
            const MappingSpec T = random_affine(3, seed + 11 * static_cast<std::uint64_t>(m) + 1);
            const SpaceSpec sp = dim_space(3, -2.0, 2.0);
            for (double k : {0.1, 0.5, 0.9})
                all = all && p5_equivalence_check(T, sp, k, plan).pass;
        }
        BenchCase c;
        c.pass = all;
        return c;
    }));

    cases.push_back(guarded("averaging-composition", [&] {
        bool all = true;
        double worst = 0.0;
        for (const auto& e : cat) {
            const CheckReport rep = averaging_algebra_check(e.map, e.space.region,
                                                            plan_of(seed, 10000));
            all = all && rep.pass;
            worst = std::max(worst, rep.max_violation);
        }
        BenchCase c;
        c.pass = all;
        c.worst_bound_slack = worst;
        return c;
    }));

    if (!out.empty()) {
        for (std::size_t i = 0; i < cat.size(); ++i)
            emit(out, "membership_" + cat[i].name + ".txt", membership_to_text(reports[i]));
    }
    return cases;
}

}  // namespace

bool BenchResult::all_pass() const {
    for (const auto& c : cases)
        if (!c.pass) return false;
    return true;
}

std::string BenchResult::summary_text() const {
    std::string out = "suite: " + suite + "\n";
    for (const auto& c : cases) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-36s %-4s iters=%-7lld slack=%-12.3g %s\n",
                      c.name.c_str(), c.pass ? "ok" : "FAIL",
                      static_cast<long long>(c.iterations),
                      c.worst_bound_slack, c.note.c_str());
        out += line;
    }
    out += all_pass() ? "result: all cases passed\n" : "result: FAILURES present\n";
    return out;
}

std::vector<std::string> bench_suites() { return {"paper-examples", "bounds", "atlas"}; }

BenchResult run_bench(const std::string& suite, std::uint64_t seed,
                      const std::filesystem::path& out_dir) {
    if (!out_dir.empty()) fs::create_directories(out_dir);
    BenchResult res;
    res.suite = suite;
    if (suite == "paper-examples") res.cases = suite_paper(seed, out_dir);
    else if (suite == "bounds") res.cases = suite_bounds(seed, out_dir);
    else if (suite == "atlas") res.cases = suite_atlas(seed, out_dir);
    else throw std::invalid_argument("bench: unknown suite '" + suite + "'");
    if (!out_dir.empty())
        write_report_file((out_dir / (suite + "_summary.txt")).string(), res.summary_text());
    return res;
}

}  // namespace efp
