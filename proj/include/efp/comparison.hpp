// Comparison functions: the gauges phi that replace a linear contraction
// factor, their iterate checks, and the certified series sums the cyclic
// bounds are built from.
#pragma once

#include <optional>

#include "efp/common.hpp"
#include "efp/sampling.hpp"

namespace efp {

struct ComparisonFn {
    enum class Kind {
        rational,  // t / (1 + t); n-th iterate t / (1 + n t)
        linear,    // c t with 0 <= c < 1
        split,     // t/2 on [0,1], t - 1/3 on (1, inf)
        identity,  // t; NOT a comparison function, kept for negative checks
    };
    Kind kind = Kind::linear;
    double c = 0.5;  // linear only

    static ComparisonFn rational();
    static ComparisonFn linear(double c);
    static ComparisonFn split();
    static ComparisonFn identity();
};

double phi_eval(const ComparisonFn& phi, double t);

// n-fold iterate; closed forms for rational/linear, loop otherwise.
double phi_iterate(const ComparisonFn& phi, double t, std::int64_t n);

// Multiplicative gauge psi: R+ -> [0, 1) used by the psi-contractive class;
// psi(t_n) -> 1 forces t_n -> 0 for the catalog kind.
struct PsiFn {
    enum class Kind { exp_decay };  // e^{-t}; the value at t = 0 is never used
    Kind kind = Kind::exp_decay;
};

double psi_eval(const PsiFn& psi, double t);

// Sampled verification of the comparison axioms on a t-grid over (0, t_max]:
// (i) monotone, (ii) phi^N(t) below iterate_threshold, (iii) phi(t) < t.
struct ComparisonCheckConfig {
    double t_max = 100.0;
    std::int64_t iterate_cap = 10000;       // N for axiom (ii)
    double iterate_threshold = 1e-3;
    std::int64_t grid_size = 512;
};

CheckReport check_comparison(const ComparisonFn& phi, const ComparisonCheckConfig& cfg = {});

// Geometric-decay certificate: phi^{k+1}(t) <= delta phi^k(t) + v_k for
// k >= k0, with v either identically zero or v_k = scale * ratio^k.
struct CComparisonCert {
    double delta = 0.5;       // in [0, 1)
    std::int64_t k0 = 0;
    enum class VKind { zero, geometric } v_kind = VKind::zero;
    double v_scale = 0.0;
    double v_ratio = 0.5;     // in [0, 1)

    double v_at(std::int64_t k) const;
    double v_tail_from(std::int64_t k) const;  // sum_{j >= k} v_j
};

// Samples (t, k) with t in (0, t_max], k in [k0, k0 + k_span] and reports the
// worst violation of the certified inequality.
CheckReport check_c_comparison(const ComparisonFn& phi, const CComparisonCert& cert,
                               double t_max = 100.0, std::int64_t k_span = 128,
                               std::int64_t grid_size = 512);

// s(t) = sum_{k>=1} phi^k(t), truncated once the certified geometric tail
// bound drops below tol. Requires `proof` = a passing check_c_comparison
// report for (phi, cert); refuses otherwise (std::invalid_argument).
double series_sum(const ComparisonFn& phi, const CComparisonCert& cert,
                  const CheckReport& proof, double t, double tol = 1e-13);

// Analytic certificate for catalog kinds that have one (linear: delta = c).
// nullopt for rational/split/identity: no geometric-decay certificate exists.
std::optional<CComparisonCert> default_c_certificate(const ComparisonFn& phi);

}  // namespace efp
