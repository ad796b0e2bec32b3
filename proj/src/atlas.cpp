#include "efp/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace efp {

namespace {

constexpr double kDegeneratePair = 1e-14;
constexpr int kKGridSize = 128;   // uniform grid in (0,1) for the square-form classes
constexpr int kScanPoints = 4096; // per-axis adjacent-pair scan resolution

std::vector<double> k_grid() {
    std::vector<double> g(kKGridSize);
    for (int j = 0; j < kKGridSize; ++j)
        g[static_cast<std::size_t>(j)] = static_cast<double>(j + 1) / (kKGridSize + 1);
    return g;
}

// Adjacent pairs along each axis through the box midpoint. These catch jump
// discontinuities that independent uniform pairs almost never straddle at
// fine separations; resolution bounds the detectable jump size.
std::vector<std::pair<Vec, Vec>> axis_scan_pairs(const DomainRegion& region) {
    std::vector<std::pair<Vec, Vec>> out;
    if (region.kind != DomainRegion::Kind::box) return out;
    const int d = region.dim();
    Vec mid = 0.5 * (region.lo + region.hi);
    for (int a = 0; a < d; ++a) {
        const double lo = region.lo(a), hi = region.hi(a);
        const double s = (hi - lo) / kScanPoints;
        if (!(s > 0.0)) continue;
        for (int i = 0; i + 1 < kScanPoints; ++i) {
            Vec x = mid, y = mid;
            x(a) = lo + i * s;
            y(a) = lo + (i + 1) * s;
            out.emplace_back(std::move(x), std::move(y));
        }
    }
    return out;
}

struct SweepAcc {
    std::vector<double> min_margin;   // per grid constant
    std::vector<std::vector<Vec>> argmin;

    explicit SweepAcc(std::size_t n = 0)
        : min_margin(n, std::numeric_limits<double>::infinity()), argmin(n) {}
};

SweepAcc merge_sweep(SweepAcc a, const SweepAcc& b) {
    for (std::size_t i = 0; i < a.min_margin.size(); ++i) {
        if (b.min_margin[i] < a.min_margin[i]) {
            a.min_margin[i] = b.min_margin[i];
            a.argmin[i] = b.argmin[i];
        }
    }
    return a;
}

// margin(k) = base + k * slope; accumulated for every grid k at once
void sweep_update(SweepAcc& a, const std::vector<double>& grid, double base, double slope,
                  const Vec& x, const Vec& y) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double m = base + grid[j] * slope;
        if (m < a.min_margin[j]) {
            a.min_margin[j] = m;
            a.argmin[j] = {x, y};
        }
    }
}

MembershipEntry entry_from_certificate(const Certificate& cert) {
    MembershipEntry e;
    e.verdict = cert.pass ? Verdict::pass : Verdict::fail;
    e.min_margin = cert.min_margin;
    if (cert.pass) {
        e.witness = cert.argmin_args;
    } else {
        e.witness = (cert.sup_ratio > 1.0 && !cert.ratio_argmax_args.empty())
                        ? cert.ratio_argmax_args
                        : cert.argmin_args;
    }
    return e;
}

// squared-inequality margins shared by the k-grid sweeps
double spc_base(const MappingSpec& T, const NormSpec& n, const Vec& x, const Vec& y,
                double& slope) {
    const Vec Tx = map_eval(T, x), Ty = map_eval(T, y);
    const double d = norm_eval(n, x - y);
    const double q = norm_eval(n, x - y - (Tx - Ty));
    const double l = norm_eval(n, Tx - Ty);
    slope = q * q;
    return d * d - l * l;
}

double dc_base(const MappingSpec& T, const NormSpec& n, const Vec& x, const Vec& p,
               double& slope) {
    const Vec Tx = map_eval(T, x);
    const double d = norm_eval(n, x - p);
    const double q = norm_eval(n, x - Tx);
    const double l = norm_eval(n, Tx - p);
    slope = q * q;
    return d * d - l * l;
}

MembershipEntry sweep_square_class(bool dc, const MappingSpec& T, const SpaceSpec& space,
                                   const SamplingPlan& plan, const FixSet* fix) {
    const std::vector<double> grid = k_grid();
    SweepAcc acc = chunked_reduce<SweepAcc>(
        plan, SweepAcc(grid.size()),
        [&](std::int64_t, Rng& rng, std::int64_t cnt) {
            SweepAcc a(grid.size());
            for (std::int64_t i = 0; i < cnt; ++i) {
                const Vec x = space.region.sample(rng, plan.dist);
                double slope = 0.0;
                if (dc) {
                    for (const Vec& p : *fix) {
                        const double base = dc_base(T, space.norm, x, p, slope);
                        sweep_update(a, grid, base, slope, x, p);
                    }
                } else {
                    const Vec y = space.region.sample(rng, plan.dist);
                    const double base = spc_base(T, space.norm, x, y, slope);
                    sweep_update(a, grid, base, slope, x, y);
                }
            }
            return a;
        },
        merge_sweep);

    MembershipEntry e;
    e.min_margin = acc.min_margin.back();  // weakest constant
    std::size_t best = grid.size();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (acc.min_margin[j] >= -plan.tolerance) { best = j; break; }  // smallest feasible k
    }
    if (best < grid.size()) {
        e.verdict = Verdict::pass;
        e.constant = grid[best];
        e.min_margin = acc.min_margin[best];
        e.witness = acc.argmin[best];
    } else {
        e.verdict = Verdict::fail;
        e.witness = acc.argmin.back();
    }
    return e;
}

struct EneAcc {
    std::vector<double> sup;  // per b: sup LHS / ||x - y||
    std::vector<std::vector<Vec>> argmax;

    explicit EneAcc(std::size_t n = 0) : sup(n, 0.0), argmax(n) {}
};

void ene_update(EneAcc& a, const std::vector<double>& b_grid, const MappingSpec& T,
                const NormSpec& norm, const Vec& x, const Vec& y) {
    const Vec u = x - y;
    const double nu = norm_eval(norm, u);
    if (nu < kDegeneratePair) return;
    const Vec dT = map_eval(T, x) - map_eval(T, y);
    for (std::size_t j = 0; j < b_grid.size(); ++j) {
        const double r = norm_eval(norm, b_grid[j] * u + dT) / nu;
        if (r > a.sup[j]) {
            a.sup[j] = r;
            a.argmax[j] = {x, y};
        }
    }
}

MembershipEntry sweep_ene(const MappingSpec& T, const SpaceSpec& space,
                          const SamplingPlan& plan) {
    const std::vector<double> b_grid = default_b_grid();
    EneAcc acc = chunked_reduce<EneAcc>(
        plan, EneAcc(b_grid.size()),
        [&](std::int64_t, Rng& rng, std::int64_t cnt) {
            EneAcc a(b_grid.size());
            for (std::int64_t i = 0; i < cnt; ++i) {
                const Vec x = space.region.sample(rng, plan.dist);
                const Vec y = space.region.sample(rng, plan.dist);
                ene_update(a, b_grid, T, space.norm, x, y);
            }
            return a;
        },
        [](EneAcc a, const EneAcc& b) {
            for (std::size_t i = 0; i < a.sup.size(); ++i) {
                if (b.sup[i] > a.sup[i]) {
                    a.sup[i] = b.sup[i];
                    a.argmax[i] = b.argmax[i];
                }
            }
            return a;
        });
    for (const auto& [x, y] : axis_scan_pairs(space.region))
        ene_update(acc, b_grid, T, space.norm, x, y);

    // nonstrict class: equality at b+1 is allowed
    std::size_t best = 0;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b_grid.size(); ++j) {
        const double r = acc.sup[j] / (b_grid[j] + 1.0);
        if (r < best_ratio) { best_ratio = r; best = j; }
    }
    MembershipEntry e;
    e.constant = b_grid[best];
    const Vec* wx = acc.argmax[best].empty() ? nullptr : &acc.argmax[best][0];
    if (wx) {
        const Vec u = acc.argmax[best][0] - acc.argmax[best][1];
        e.min_margin = (b_grid[best] + 1.0) * norm_eval(space.norm, u) -
                       acc.sup[best] * norm_eval(space.norm, u);
    }
    e.witness = acc.argmax[best];
    if (best_ratio <= 1.0 + 1e-9) {
        e.verdict = Verdict::pass;
    } else {
        e.verdict = Verdict::fail;
        e.constant = std::numeric_limits<double>::quiet_NaN();
    }
    return e;
}

}  // namespace

MembershipReport classify(const MappingSpec& T, const SpaceSpec& space,
                          const SamplingPlan& plan, const FixSet* fix) {
    MembershipReport rep;
    rep.sample_count = plan.count;
    rep.seed = plan.seed;

    rep.ne = entry_from_certificate(certify(ClassId::NE, T, ConstantSet{}, space, plan));

    if (fix && !fix->empty()) {
        rep.qne = entry_from_certificate(certify(ClassId::QNE, T, ConstantSet{}, space, plan, fix));
        rep.dc = sweep_square_class(true, T, space, plan, fix);
        if (rep.dc.verdict == Verdict::fail) rep.dc.constant = std::numeric_limits<double>::quiet_NaN();
    } else {
        rep.qne.verdict = Verdict::skipped;
        rep.qne.reason = "needs a fixed-point set";
        rep.dc.verdict = Verdict::skipped;
        rep.dc.reason = "needs a fixed-point set";
    }

    rep.spc = sweep_square_class(false, T, space, plan, nullptr);
    if (rep.spc.verdict == Verdict::fail) rep.spc.constant = std::numeric_limits<double>::quiet_NaN();

    rep.ene = sweep_ene(T, space, plan);
    return rep;
}

CheckReport p5_equivalence_check(const MappingSpec& T, const SpaceSpec& space, double k,
                                 const SamplingPlan& plan, double rel_tol) {
    if (space.norm.kind != NormSpec::Kind::euclidean)
        throw std::invalid_argument(
            "p5 equivalence: the squared-form identity needs the Euclidean norm");
    if (!(k > 0.0 && k < 1.0)) throw std::invalid_argument("p5 equivalence: k must lie in (0, 1)");
    const double b = k / (1.0 - k);

    struct Acc {
        std::int64_t disagreements = 0;
        std::int64_t pairs = 0;
        std::vector<Vec> witness;
    };
    Acc res = chunked_reduce<Acc>(
        plan, Acc{},
        [&](std::int64_t, Rng& rng, std::int64_t cnt) {
            Acc a;
            for (std::int64_t i = 0; i < cnt; ++i) {
                const Vec x = space.region.sample(rng, plan.dist);
                const Vec y = space.region.sample(rng, plan.dist);
                const Vec Tx = map_eval(T, x), Ty = map_eval(T, y);
                const Vec u = x - y;
                const double d = u.norm();
                const double q = (u - (Tx - Ty)).norm();
                const double l = (Tx - Ty).norm();
                const double m_spc = d * d + k * q * q - l * l;
                const double s_spc = d * d + k * q * q + l * l;
                const double lhs_ene = (b * u + Tx - Ty).norm();
                const double m_ene = (b + 1.0) * d - lhs_ene;
                const double s_ene = (b + 1.0) * d + lhs_ene;
                const bool v_spc = m_spc >= 0.0;
                const bool v_ene = m_ene >= 0.0;
                ++a.pairs;
                const bool borderline = std::abs(m_spc) <= rel_tol * s_spc ||
                                        std::abs(m_ene) <= rel_tol * s_ene;
                if (v_spc != v_ene && !borderline) {
                    if (a.disagreements == 0) a.witness = {x, y};
                    ++a.disagreements;
                }
            }
            return a;
        },
        [](Acc a, const Acc& b2) {
            if (a.disagreements == 0 && b2.disagreements > 0) a.witness = b2.witness;
            a.disagreements += b2.disagreements;
            a.pairs += b2.pairs;
            return a;
        });

    CheckReport rep;
    rep.sample_count = res.pairs;
    rep.max_violation = static_cast<double>(res.disagreements);
    rep.pass = res.disagreements == 0;
    rep.witness = res.witness;
    rep.detail = "agreement " + std::to_string(res.pairs - res.disagreements) + "/" +
                 std::to_string(res.pairs) + " at k=" + std::to_string(k);
    return rep;
}

namespace {

bool probe_passes(ClassId cls, const MappingSpec& Tl, const SpaceSpec& space,
                  const SamplingPlan& plan, bool base_only, const FixSet* fix) {
    switch (cls) {
        case ClassId::NE:
            // per the saturation notion the interesting base class is the strict
            // contraction: theta < 1 at b = 0
            return optimize_banach_certificate(Tl, space, {0.0}, plan).pass;
        case ClassId::ENRICHED_BANACH:
        case ClassId::QUASI_BANACH_ENRICHED: {
            const std::vector<double> grid =
                base_only ? std::vector<double>{0.0} : default_b_grid();
            return optimize_banach_certificate(Tl, space, grid, plan).pass;
        }
        case ClassId::ENRICHED_NONEXPANSIVE:
            return sweep_ene(Tl, space, plan).verdict == Verdict::pass;
        case ClassId::QNE: {
            if (!fix || fix->empty())
                throw std::invalid_argument("saturation probe: class needs a fixed-point set");
            return certify(ClassId::QNE, Tl, ConstantSet{}, space, plan, fix).pass;
        }
        case ClassId::SPC:
            return sweep_square_class(false, Tl, space, plan, nullptr).verdict == Verdict::pass;
        case ClassId::DC: {
            if (!fix || fix->empty())
                throw std::invalid_argument("saturation probe: class needs a fixed-point set");
            return sweep_square_class(true, Tl, space, plan, fix).verdict == Verdict::pass;
        }
        default:
            throw std::invalid_argument(
                "saturation probe: class check needs explicit constants");
    }
}

}  // namespace

std::optional<double> saturation_probe(ClassId cls, const MappingSpec& T,
                                       const SpaceSpec& space,
                                       const std::vector<double>& lambda_grid,
                                       const SamplingPlan& plan, bool base_only,
                                       const FixSet* fix) {
    std::vector<double> grid;
    grid.push_back(1.0);  // the base class is tried before any proper averaging
    for (double l : lambda_grid)
        if (l != 1.0) grid.push_back(l);
    for (double l : grid) {
        if (!(l > 0.0 && l <= 1.0))
            throw std::invalid_argument("saturation probe: lambda values must lie in (0, 1]");
        const MappingSpec Tl = make_averaged(T, l);
        if (probe_passes(cls, Tl, space, plan, base_only, fix)) return l;
    }
    return std::nullopt;
}

CheckReport averaging_algebra_check(const MappingSpec& T, const DomainRegion& region,
                                    const SamplingPlan& plan, double tol) {
    struct Acc {
        double worst = 0.0;
        Vec x;
        double lambda = 0.0, mu = 0.0;
    };
    Acc res = chunked_reduce<Acc>(
        plan, Acc{},
        [&](std::int64_t, Rng& rng, std::int64_t cnt) {
            Acc a;
            for (std::int64_t i = 0; i < cnt; ++i) {
                const Vec x = region.sample(rng, plan.dist);
                const double l = rng.next_unit();
                const double m = rng.next_unit();
                const Vec Tx = map_eval(T, x);
                const Vec inner = (1.0 - l) * x + l * Tx;
                const Vec two_step = (1.0 - m) * x + m * inner;
                const Vec direct = (1.0 - l * m) * x + l * m * Tx;
                const double v = (two_step - direct).norm();
                if (v > a.worst) a = Acc{v, x, l, m};
            }
            return a;
        },
        [](const Acc& a, const Acc& b) { return b.worst > a.worst ? b : a; });

    CheckReport rep;
    rep.sample_count = plan.count;
    rep.max_violation = res.worst;
    rep.pass = res.worst <= tol;
    if (!rep.pass) {
        Vec lm(2);
        lm << res.lambda, res.mu;
        rep.witness = {res.x, lm};
        rep.detail = "composition of averagings drifted from the product form";
    }
    return rep;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int i = 20; i >= 1; --i) g.push_back(static_cast<double>(i) / 20.0);
    return g;
}

}  // namespace efp
