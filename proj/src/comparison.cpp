#include "efp/comparison.hpp"

#include <cmath>
#include <stdexcept>

namespace efp {

ComparisonFn ComparisonFn::rational() { return {Kind::rational, 0.0}; }

ComparisonFn ComparisonFn::linear(double c) {
    if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("linear phi: c must lie in [0, 1)");
    return {Kind::linear, c};
}

ComparisonFn ComparisonFn::split() { return {Kind::split, 0.0}; }
ComparisonFn ComparisonFn::identity() { return {Kind::identity, 0.0}; }

double phi_eval(const ComparisonFn& phi, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("phi_eval: t must be >= 0");
    switch (phi.kind) {
        case ComparisonFn::Kind::rational: return t / (1.0 + t);
        case ComparisonFn::Kind::linear: return phi.c * t;
        case ComparisonFn::Kind::split: return t <= 1.0 ? t / 2.0 : t - 1.0 / 3.0;
        case ComparisonFn::Kind::identity: return t;
    }
    throw std::logic_error("phi_eval: bad kind");
}

double phi_iterate(const ComparisonFn& phi, double t, std::int64_t n) {
    if (n < 0) throw std::invalid_argument("phi_iterate: n must be >= 0");
    switch (phi.kind) {
        case ComparisonFn::Kind::rational:
            // t / (1 + n t); exact, avoids n rounding steps
            return t / (1.0 + static_cast<double>(n) * t);
        case ComparisonFn::Kind::linear:
            return std::pow(phi.c, static_cast<double>(n)) * t;
        default: {
            double v = t;
            for (std::int64_t i = 0; i < n; ++i) v = phi_eval(phi, v);
            return v;
        }
    }
}

double psi_eval(const PsiFn& psi, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("psi_eval: t must be >= 0");
    switch (psi.kind) {
        case PsiFn::Kind::exp_decay: return std::exp(-t);
    }
    throw std::logic_error("psi_eval: bad kind");
}

namespace {

std::vector<double> t_grid(double t_max, std::int64_t n) {
    // half log-spaced toward 0, half uniform; always includes t_max
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n));
    const std::int64_t half = n / 2;
    for (std::int64_t i = 0; i < half; ++i) {
        const double e = -9.0 + 9.0 * static_cast<double>(i) / static_cast<double>(half - 1);
        g.push_back(t_max * std::pow(10.0, e));
    }
    for (std::int64_t i = 1; i <= n - half; ++i)
        g.push_back(t_max * static_cast<double>(i) / static_cast<double>(n - half));
    return g;
}

}  // namespace

CheckReport check_comparison(const ComparisonFn& phi, const ComparisonCheckConfig& cfg) {
    CheckReport rep;
    const auto grid = t_grid(cfg.t_max, cfg.grid_size);
    rep.sample_count = static_cast<std::int64_t>(grid.size());

    // (i) nondecreasing, on a strided set of ordered pairs
    double mono_viol = 0.0;
    double mono_t = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); j += 7) {
            const double lo = std::min(grid[i], grid[j]);
            const double hi = std::max(grid[i], grid[j]);
            const double v = phi_eval(phi, lo) - phi_eval(phi, hi);
            if (v > mono_viol) { mono_viol = v; mono_t = hi; }
        }

    // (iii) phi(t) strictly below t for every t > 0
    double dec_worst = -std::numeric_limits<double>::infinity();
    double dec_t = 0.0;
    for (double t : grid) {
        const double v = phi_eval(phi, t) - t;
        if (v > dec_worst) { dec_worst = v; dec_t = t; }
    }

    // (ii) iterates vanish
    double it_max = 0.0;
    for (double t : grid) it_max = std::max(it_max, phi_iterate(phi, t, cfg.iterate_cap));

    const bool mono_ok = mono_viol <= 1e-15;
    const bool dec_ok = dec_worst < 0.0;
    const bool it_ok = it_max <= cfg.iterate_threshold;
    rep.pass = mono_ok && dec_ok && it_ok;
    rep.max_violation =
        std::max({mono_viol, dec_ok ? 0.0 : dec_worst, it_ok ? 0.0 : it_max});
    if (!rep.pass) {
        Vec w(1);
        w << (!mono_ok ? mono_t : dec_t);
        rep.witness = {w};
        rep.detail = !mono_ok  ? "monotonicity fails"
                     : !dec_ok ? "phi(t) < t fails"
                               : "iterates do not vanish";
    }
    return rep;
}

double CComparisonCert::v_at(std::int64_t k) const {
    switch (v_kind) {
        case VKind::zero: return 0.0;
        case VKind::geometric: return v_scale * std::pow(v_ratio, static_cast<double>(k));
    }
    return 0.0;
}

double CComparisonCert::v_tail_from(std::int64_t k) const {
    switch (v_kind) {
        case VKind::zero: return 0.0;
        case VKind::geometric:
            return v_scale * std::pow(v_ratio, static_cast<double>(k)) / (1.0 - v_ratio);
    }
    return 0.0;
}

CheckReport check_c_comparison(const ComparisonFn& phi, const CComparisonCert& cert,
                               double t_max, std::int64_t k_span, std::int64_t grid_size) {
    if (!(cert.delta >= 0.0 && cert.delta < 1.0))
        throw std::invalid_argument("c-comparison: delta must lie in [0, 1)");
    if (cert.v_kind == CComparisonCert::VKind::geometric &&
        !(cert.v_ratio > 0.0 && cert.v_ratio < 1.0))
        throw std::invalid_argument("c-comparison: v ratio must lie in (0, 1)");
    CheckReport rep;
    const auto grid = t_grid(t_max, grid_size);
    double worst = -std::numeric_limits<double>::infinity();
    double wt = 0.0;
    std::int64_t wk = 0;
    for (double t : grid) {
        double cur = phi_iterate(phi, t, cert.k0);
        for (std::int64_t k = cert.k0; k < cert.k0 + k_span; ++k) {
            const double next = phi_eval(phi, cur);
            const double v = next - (cert.delta * cur + cert.v_at(k));
            if (v > worst) { worst = v; wt = t; wk = k; }
            cur = next;
            if (cur == 0.0) break;
        }
    }
    rep.sample_count = static_cast<std::int64_t>(grid.size()) * k_span;
    rep.max_violation = worst;
    rep.pass = worst <= 1e-12;
    if (!rep.pass) {
        Vec w(2);
        w << wt, static_cast<double>(wk);
        rep.witness = {w};
        rep.detail = "geometric decay fails";
    }
    return rep;
}

double series_sum(const ComparisonFn& phi, const CComparisonCert& cert,
                  const CheckReport& proof, double t, double tol) {
    if (!proof.pass)
        throw std::invalid_argument("series_sum: comparison certificate did not pass");
    if (!(t >= 0.0)) throw std::invalid_argument("series_sum: t must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("series_sum: tol must be > 0");
    if (t == 0.0) return 0.0;

    double sum = 0.0;
    double term = t;  // phi^0
    const std::int64_t cap = 10000000;
    for (std::int64_t k = 1; k <= cap; ++k) {
        term = phi_eval(phi, term);
        sum += term;
        if (k >= cert.k0) {
            // certified tail: sum_{j>k} phi^j <= delta/(1-delta) phi^k + tail(v)/(1-delta)
            const double tail =
                (cert.delta * term + cert.v_tail_from(k)) / (1.0 - cert.delta);
            if (tail <= tol) return sum;
        }
        if (term == 0.0) return sum;
    }
    throw std::runtime_error("series_sum: truncation cap reached before certified tail bound");
}

std::optional<CComparisonCert> default_c_certificate(const ComparisonFn& phi) {
    if (phi.kind == ComparisonFn::Kind::linear) {
        CComparisonCert c;
        c.delta = phi.c;
        return c;
    }
    // rational: phi^{k+1}/phi^k -> 1, no geometric certificate on any
    // right-neighborhood of 0; split: pre-period above 1 is not uniformly
    // geometric over unbounded t
    return std::nullopt;
}

}  // namespace efp
