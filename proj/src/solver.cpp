#include "efp/solver.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace efp {

namespace {

constexpr double kDomainTol = 1e-9;
constexpr int kGrowthLimit = 100;  // consecutive residual increases before giving up

using StepFn = std::function<Vec(const Vec&)>;
using DistFn = std::function<double(const Vec&, const Vec&)>;

// Shared averaged-iteration loop. An exactly-zero residual means the next
// iterate coincides with the current one, so the run ends without recording a
// duplicate row; iteration counts therefore name the last row that moved.
SolveReport run_iteration(const DomainRegion& domain, const StepFn& step, const DistFn& dist,
                          const Vec& x0, const SolveConfig& cfg, double lambda,
                          const std::function<double(double)>* apos_of_step = nullptr) {
    if (cfg.tolerance <= 0.0) throw std::invalid_argument("solve: tolerance must be > 0");
    if (cfg.max_iterations < 1) throw std::invalid_argument("solve: needs max_iterations >= 1");
    if (!domain.contains(x0, kDomainTol))
        throw std::domain_error("solve: starting point lies outside the domain");

    SolveReport rep;
    rep.lambda = lambda;
    Trace& tr = rep.trace;
    tr.iterates.push_back(x0);
    tr.residual.push_back(std::numeric_limits<double>::quiet_NaN());

    Vec x = x0;
    double prev = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (std::int64_t n = 1; n <= cfg.max_iterations; ++n) {
        const Vec xn = step(x);
        const double r = dist(xn, x);
        if (r == 0.0) {
            rep.status = SolveReport::Status::converged;
            rep.converged = true;
            rep.final_residual = 0.0;
            break;
        }
        if (!domain.contains(xn, kDomainTol)) {
            tr.iterates.push_back(xn);
            tr.residual.push_back(r);
            rep.iterations = n;
            rep.status = SolveReport::Status::diverged_domain;
            rep.final_residual = r;
            rep.note = "iterate left the domain at step " + std::to_string(n);
            break;
        }
        tr.iterates.push_back(xn);
        tr.residual.push_back(r);
        rep.iterations = n;
        rep.final_residual = r;
        x = xn;

        bool stop = false;
        switch (cfg.stop) {
            case SolveConfig::StopRule::residual:
                stop = r <= cfg.tolerance;
                break;
            case SolveConfig::StopRule::bound_target:
                stop = apos_of_step && (*apos_of_step)(r) <= cfg.bound_target;
                break;
            case SolveConfig::StopRule::max_iter:
                break;
        }
        if (stop) {
            rep.status = SolveReport::Status::converged;
            rep.converged = true;
            break;
        }
        if (r > prev) {
            if (++growth >= kGrowthLimit) {
                rep.status = SolveReport::Status::diverged_residual;
                rep.note = "residual grew over " + std::to_string(kGrowthLimit) +
                           " consecutive steps";
                break;
            }
        } else {
            growth = 0;
        }
        prev = r;
    }
    rep.final_point = x;
    if (rep.status == SolveReport::Status::max_iterations)
        rep.note = "iteration cap reached before the stop rule";

    tr.dist_to_final.resize(tr.rows());
    for (std::size_t i = 0; i < tr.rows(); ++i)
        tr.dist_to_final[i] = dist(tr.iterates[i], rep.final_point);
    return rep;
}

// steps[n] feeds the right-hand sides: a priori uses steps[1], a posteriori
// uses steps[n]
void attach_geometric_bounds(Trace& tr, double c, const std::vector<double>& steps) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    tr.bound_apriori.assign(tr.rows(), nan);
    tr.bound_aposteriori.assign(tr.rows(), nan);
    if (tr.rows() < 2) return;
    const double r1 = steps[1];
    for (std::size_t n = 1; n < tr.rows(); ++n) {
        tr.bound_apriori[n] = bound_apriori(c, static_cast<std::int64_t>(n), r1);
        tr.bound_aposteriori[n] = bound_aposteriori(c, steps[n]);
    }
}

// a row violates when the measured distance to the final iterate exceeds any
// attached bound by more than the slack
std::int64_t audit_bounds(const Trace& tr, double slack) {
    std::int64_t bad = 0;
    for (std::size_t n = 1; n < tr.rows(); ++n) {
        const double d = tr.dist_to_final[n];
        bool row_bad = false;
        auto over = [&](const std::vector<double>& col) {
            return n < col.size() && std::isfinite(col[n]) && d > col[n] + slack;
        };
        if (over(tr.bound_apriori) || over(tr.bound_aposteriori) || over(tr.aux_bound))
            row_bad = true;
        if (row_bad) ++bad;
    }
    return bad;
}

StepFn averaged_step(const MappingSpec& T, double lambda) {
    return [&T, lambda](const Vec& x) -> Vec { return (1.0 - lambda) * x + lambda * map_eval(T, x); };
}

DistFn norm_dist(const NormSpec& norm) {
    return [&norm](const Vec& a, const Vec& b) { return norm_eval(norm, a - b); };
}

}  // namespace

double bound_apriori(double c, std::int64_t n, double first_step) {
    if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("bound: factor must lie in [0, 1)");
    if (n < 1) throw std::invalid_argument("bound: needs n >= 1");
    return std::pow(c, static_cast<double>(n)) / (1.0 - c) * first_step;
}

double bound_aposteriori(double c, double last_step) {
    if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("bound: factor must lie in [0, 1)");
    return c / (1.0 - c) * last_step;
}

SolveReport krasnoselskij_solve(const MappingSpec& T, double lambda, const Vec& x0,
                                const SolveConfig& cfg, const NormSpec& norm) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("solve: lambda must lie in (0, 1]");
    return run_iteration(T.domain, averaged_step(T, lambda), norm_dist(norm), x0, cfg, lambda);
}

SolveReport solve_with_certificate(const Certificate& cert, const MappingSpec& T,
                                   const Vec& x0, const SolveConfig& cfg,
                                   const SpaceSpec& space) {
    if (!cert.pass) throw std::invalid_argument("solve: certificate did not pass");
    const double lambda = cfg.lambda_override.value_or(derive_lambda(cert));
    const double c = cert.contraction_factor;
    std::function<double(double)> apos = [c](double r) { return bound_aposteriori(c, r); };
    const bool has_rate = std::isfinite(c) && c < 1.0;
    const bool quasi = cert.cls == ClassId::QUASI_BANACH_ENRICHED;

    SolveReport rep = run_iteration(T.domain, averaged_step(T, lambda),
                                    norm_dist(space.norm), x0, cfg, lambda,
                                    (has_rate && !quasi) ? &apos : nullptr);
    if (quasi && has_rate) {
        // no error estimate is available in the quasi-norm setting; scale the
        // geometric bounds by the triangle modulus and flag them heuristic
        const double C = space.norm.kind == NormSpec::Kind::quasi_p_norm
                             ? std::pow(2.0, 1.0 / space.norm.p - 1.0)
                             : 1.0;
        attach_geometric_bounds(rep.trace, c, rep.trace.residual);
        for (auto& v : rep.trace.bound_apriori) v *= C;
        for (auto& v : rep.trace.bound_aposteriori) v *= C;
        rep.bounds_kind = "heuristic";
        rep.note = "quasi-norm bounds are the geometric estimate scaled by the modulus";
        if (rep.converged) rep.bound_violations = audit_bounds(rep.trace, 10.0 * cfg.tolerance);
    } else if (has_rate) {
        attach_geometric_bounds(rep.trace, c, rep.trace.residual);
        rep.bounds_kind = "theorem";
        if (rep.converged) rep.bound_violations = audit_bounds(rep.trace, 10.0 * cfg.tolerance);
    } else {
        rep.bounds_kind = "none";
        rep.note = "certificate class carries no geometric factor";
    }
    return rep;
}

SolveReport convex_metric_solve(const MappingSpec& T, const ConvexStructure& W,
                                const MetricSpec& metric, double lambda, const Vec& x0,
                                const SolveConfig& cfg, const Certificate* cert) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw std::invalid_argument("solve: convex-structure lambda must lie in [0, 1)");
    if (cert) {
        if (!cert->pass) throw std::invalid_argument("solve: certificate did not pass");
        if (cert->cls != ClassId::CONVEX_METRIC_ENRICHED)
            throw std::invalid_argument("solve: certificate class does not match the scheme");
    }
    const StepFn step = [&T, &W, lambda](const Vec& x) {
        return w_eval(W, x, map_eval(T, x), lambda);
    };
    const DistFn dist = [&metric](const Vec& a, const Vec& b) {
        return metric_eval(metric, a, b);
    };
    SolveReport rep = run_iteration(T.domain, step, dist, x0, cfg, lambda);
    if (cert) {
        const double c = *cert->consts.c;
        attach_geometric_bounds(rep.trace, c, rep.trace.residual);
        rep.bounds_kind = "theorem";
        if (rep.converged) rep.bound_violations = audit_bounds(rep.trace, 10.0 * cfg.tolerance);
    }
    return rep;
}

SolveReport maia_solve(const Certificate& cert, const MappingSpec& T, const Vec& x0,
                       const SolveConfig& cfg, const SpaceSpec& space,
                       const SamplingPlan& plan) {
    if (!cert.pass) throw std::invalid_argument("solve: certificate did not pass");
    if (cert.cls != ClassId::ENRICHED_BANACH)
        throw std::invalid_argument("solve: the mixed-bound scheme needs a norm contraction certificate");
    const CheckReport sub = subordination_check(space.metric, space.norm, space.region, plan);
    if (!sub.pass)
        throw std::invalid_argument("solve: metric is not subordinate to the norm (violation " +
                                    std::to_string(sub.max_violation) + ")");
    const double lambda = cfg.lambda_override.value_or(derive_lambda(cert));
    const DistFn dist = [&space](const Vec& a, const Vec& b) {
        return metric_eval(space.metric, a, b);
    };
    SolveReport rep = run_iteration(T.domain, averaged_step(T, lambda), dist, x0, cfg, lambda);

    // bounds pair the metric on the left with norm step lengths on the right
    std::vector<double> norm_steps(rep.trace.rows(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t n = 1; n < rep.trace.rows(); ++n)
        norm_steps[n] = norm_eval(space.norm, rep.trace.iterates[n] - rep.trace.iterates[n - 1]);
    attach_geometric_bounds(rep.trace, cert.contraction_factor, norm_steps);
    rep.bounds_kind = "theorem";
    if (rep.converged) rep.bound_violations = audit_bounds(rep.trace, 10.0 * cfg.tolerance);
    return rep;
}

SolveReport cyclic_solve(const MappingSpec& T, const DomainRegion& cycle,
                         const ComparisonFn& phi, const CComparisonCert& ccert,
                         const CheckReport& ccert_proof, double b, const Vec& x0,
                         const SolveConfig& cfg, const SpaceSpec& space,
                         const SamplingPlan& plan) {
    if (!(b >= 0.0)) throw std::invalid_argument("solve: b must be >= 0");
    if (!ccert_proof.pass)
        throw std::invalid_argument("solve: series certificate did not pass");
    const CheckReport repr = check_cyclic_representation(T, cycle, plan);
    if (!repr.pass)
        throw std::invalid_argument("solve: cyclic representation check failed (" + repr.detail + ")");

    const double lambda = cfg.lambda_override.value_or(1.0 / (b + 1.0));
    SolveReport rep = run_iteration(T.domain, averaged_step(T, lambda),
                                    norm_dist(space.norm), x0, cfg, lambda);

    Trace& tr = rep.trace;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto s = [&](double t) { return series_sum(phi, ccert, ccert_proof, t); };
    tr.bound_apriori.assign(tr.rows(), nan);
    tr.bound_aposteriori.assign(tr.rows(), nan);
    if (tr.rows() > 1) {
        const double r1 = tr.residual[1];
        for (std::size_t n = 1; n < tr.rows(); ++n) {
            tr.bound_apriori[n] = s(phi_iterate(phi, r1, static_cast<std::int64_t>(n)));
            // displacement form: the bound from the current iterate's residual
            const double disp =
                lambda * norm_eval(space.norm, tr.iterates[n] - map_eval(T, tr.iterates[n]));
            tr.bound_aposteriori[n] = s(disp);
        }
    }
    rep.bounds_kind = "theorem";
    if (rep.converged) rep.bound_violations = audit_bounds(tr, 10.0 * cfg.tolerance);
    return rep;
}

SolveReport presic_solve(const PresicMappingSpec& T, const Certificate& cert,
                         const PresicWeights& w, std::span<const Vec> init,
                         const SolveConfig& cfg, const NormSpec& norm,
                         PresicMethod method) {
    if (!cert.pass || cert.cls != ClassId::ENRICHED_PRESIC)
        throw std::invalid_argument("solve: needs a passing Presic certificate");
    const int k = T.arity;
    if (static_cast<int>(w.w.size()) != k + 1)
        throw std::invalid_argument("solve: weight count must be arity + 1");

    if (method == PresicMethod::diagonal) {
        if (init.size() != 1) throw std::invalid_argument("solve: diagonal method takes one start");
        const double a = w.w.back();
        if (!(a > 0.0 && a <= 1.0))
            throw std::invalid_argument("solve: diagonal weight must lie in (0, 1]");
        const StepFn step = [&T, a, k](const Vec& y) -> Vec {
            const std::vector<Vec> diag(static_cast<std::size_t>(k), y);
            return (1.0 - a) * y + a * presic_eval(T, diag);
        };
        return run_iteration(T.domain, step, norm_dist(norm), init[0], cfg, a);
    }

    if (static_cast<int>(init.size()) != k)
        throw std::invalid_argument("solve: k-step method takes arity starting points");
    for (const Vec& v : init)
        if (!T.domain.contains(v, kDomainTol))
            throw std::domain_error("solve: starting point lies outside the domain");

    SolveReport rep;
    rep.lambda = w.w.back();
    Trace& tr = rep.trace;
    std::vector<Vec> window(init.begin(), init.end());
    tr.iterates = window;
    tr.residual.assign(tr.rows(), std::numeric_limits<double>::quiet_NaN());

    double prev = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (std::int64_t n = 1; n <= cfg.max_iterations; ++n) {
        const Vec xn = presic_averaged_eval(T, w, window);
        const double r = norm_eval(norm, xn - window.back());
        double spread0 = 0.0;
        for (std::size_t j = 0; j + 1 < window.size(); ++j)
            spread0 = std::max(spread0, norm_eval(norm, window[j] - window[j + 1]));
        if (r == 0.0 && spread0 == 0.0) {
            rep.status = SolveReport::Status::converged;
            rep.converged = true;
            rep.final_residual = 0.0;
            break;
        }
        if (!T.domain.contains(xn, kDomainTol)) {
            tr.iterates.push_back(xn);
            tr.residual.push_back(r);
            rep.iterations = n;
            rep.status = SolveReport::Status::diverged_domain;
            rep.final_residual = r;
            rep.note = "iterate left the domain at step " + std::to_string(n);
            break;
        }
        tr.iterates.push_back(xn);
        tr.residual.push_back(r);
        rep.iterations = n;
        rep.final_residual = r;
        window.erase(window.begin());
        window.push_back(xn);
        // the window must settle, not just the one-step difference
        double spread = 0.0;
        for (int j = 0; j + 1 < k; ++j)
            spread = std::max(spread, norm_eval(norm, window[static_cast<std::size_t>(j)] -
                                                          window[static_cast<std::size_t>(j) + 1]));
        if (cfg.stop == SolveConfig::StopRule::residual && r <= cfg.tolerance &&
            spread <= cfg.tolerance) {
            rep.status = SolveReport::Status::converged;
            rep.converged = true;
            break;
        }
        if (r > prev) {
            if (++growth >= kGrowthLimit) {
                rep.status = SolveReport::Status::diverged_residual;
                rep.note = "residual grew over " + std::to_string(kGrowthLimit) +
                           " consecutive steps";
                break;
            }
        } else {
            growth = 0;
        }
        prev = r;
    }
    rep.final_point = tr.iterates.back();
    if (rep.status == SolveReport::Status::max_iterations)
        rep.note = "iteration cap reached before the stop rule";
    tr.dist_to_final.resize(tr.rows());
    for (std::size_t i = 0; i < tr.rows(); ++i)
        tr.dist_to_final[i] = norm_eval(norm, tr.iterates[i] - rep.final_point);
    return rep;
}

}  // namespace efp
