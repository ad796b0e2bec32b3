#include "efp/spaces.hpp"

#include <cmath>
#include <stdexcept>

namespace efp {

namespace {

void require_finite(const Vec& v, const char* what) {
    if (!v.allFinite())
        throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
}

}  // namespace

NormSpec NormSpec::euclidean() { return NormSpec{}; }

NormSpec NormSpec::p_norm(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("p_norm: p must be >= 1");
    NormSpec n;
    n.kind = Kind::p_norm;
    n.p = p;
    return n;
}

NormSpec NormSpec::quasi_p(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("quasi_p: p must lie in (0, 1)");
    NormSpec n;
    n.kind = Kind::quasi_p_norm;
    n.p = p;
    return n;
}

NormSpec NormSpec::weighted_sup(Vec w) {
    if (w.size() > 0 && !(w.minCoeff() > 0.0))
        throw std::invalid_argument("weighted_sup: weights must be positive");
    NormSpec n;
    n.kind = Kind::weighted_sup;
    n.weights = std::move(w);
    return n;
}

double norm_eval(const NormSpec& n, const Vec& v) {
    require_finite(v, "norm_eval");
    switch (n.kind) {
        case NormSpec::Kind::euclidean:
            return v.norm();
        case NormSpec::Kind::p_norm:
        case NormSpec::Kind::quasi_p_norm: {
            if (n.p == 1.0) return v.cwiseAbs().sum();
            double s = 0.0;
            for (Eigen::Index i = 0; i < v.size(); ++i)
                s += std::pow(std::abs(v[i]), n.p);
            return std::pow(s, 1.0 / n.p);
        }
        case NormSpec::Kind::weighted_sup: {
            if (n.weights.size() == 0) return v.cwiseAbs().maxCoeff();
            if (n.weights.size() != v.size())
                throw std::invalid_argument("weighted_sup: weight/vector size mismatch");
            return (n.weights.cwiseProduct(v.cwiseAbs())).maxCoeff();
        }
    }
    throw std::logic_error("norm_eval: bad kind");
}

ModulusReport quasinorm_modulus(const NormSpec& n, const DomainRegion& region,
                                const SamplingPlan& plan) {
    if (plan.count < 1000)
        throw std::invalid_argument("quasinorm_modulus: need at least 1000 pairs");
    ModulusReport rep;
    rep.analytic = (n.kind == NormSpec::Kind::quasi_p_norm)
                       ? std::pow(2.0, 1.0 / n.p - 1.0)
                       : 1.0;
    rep.empirical = chunked_reduce<double>(
        plan, 0.0,
        [&](std::int64_t, Rng& rng, std::int64_t cnt) {
            double sup = 0.0;
            for (std::int64_t i = 0; i < cnt; ++i) {
                Vec x = region.sample(rng, plan.dist);
                Vec y = region.sample(rng, plan.dist);
                double den = norm_eval(n, x) + norm_eval(n, y);
                if (den < 1e-14) continue;
                sup = std::max(sup, norm_eval(n, x + y) / den);
            }
            return sup;
        },
        [](double a, double b) { return std::max(a, b); });
    return rep;
}

MetricSpec MetricSpec::norm_induced(NormSpec n) {
    MetricSpec m;
    m.base = std::move(n);
    return m;
}

MetricSpec MetricSpec::scaled(NormSpec n, double factor) {
    if (!(factor > 0.0 && factor <= 1.0))
        throw std::invalid_argument("scaled metric: factor must lie in (0, 1]");
    MetricSpec m;
    m.kind = Kind::scaled;
    m.base = std::move(n);
    m.factor = factor;
    return m;
}

MetricSpec MetricSpec::truncated(NormSpec n, double cap) {
    if (!(cap > 0.0)) throw std::invalid_argument("truncated metric: cap must be > 0");
    MetricSpec m;
    m.kind = Kind::truncated;
    m.base = std::move(n);
    m.cap = cap;
    return m;
}

double metric_eval(const MetricSpec& m, const Vec& x, const Vec& y) {
    const double d = norm_eval(m.base, x - y);
    switch (m.kind) {
        case MetricSpec::Kind::norm_induced: return d;
        case MetricSpec::Kind::scaled: return m.factor * d;
        case MetricSpec::Kind::truncated: return std::min(d, m.cap);
    }
    throw std::logic_error("metric_eval: bad kind");
}

Vec w_eval(const ConvexStructure& w, const Vec& x, const Vec& y, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("w_eval: lambda must lie in [0, 1]");
    if (x.size() != y.size()) throw std::invalid_argument("w_eval: dimension mismatch");
    switch (w.kind) {
        case ConvexStructure::Kind::linear: return lambda * x + (1.0 - lambda) * y;
        case ConvexStructure::Kind::left_endpoint: return x;
    }
    throw std::logic_error("w_eval: bad kind");
}

DomainRegion DomainRegion::box(Vec lo, Vec hi) {
    if (lo.size() == 0 || lo.size() != hi.size())
        throw std::invalid_argument("box: empty or mismatched bounds");
    if (((hi - lo).array() < 0.0).any())
        throw std::invalid_argument("box: needs lo <= hi");
    DomainRegion r;
    r.kind = Kind::box;
    r.lo = std::move(lo);
    r.hi = std::move(hi);
    return r;
}

DomainRegion DomainRegion::box1d(double lo, double hi) {
    Vec l(1), h(1);
    l << lo;
    h << hi;
    return box(l, h);
}

DomainRegion DomainRegion::ball(Vec center, double radius) {
    if (center.size() == 0 || !(radius > 0.0))
        throw std::invalid_argument("ball: needs a center and radius > 0");
    DomainRegion r;
    r.kind = Kind::ball;
    r.center = std::move(center);
    r.radius = radius;
    return r;
}

DomainRegion DomainRegion::finite_set(std::vector<Vec> pts) {
    if (pts.empty()) throw std::invalid_argument("finite_set: empty");
    for (const auto& p : pts)
        if (p.size() != pts.front().size())
            throw std::invalid_argument("finite_set: mixed dimensions");
    DomainRegion r;
    r.kind = Kind::finite_set;
    r.points = std::move(pts);
    return r;
}

DomainRegion DomainRegion::labeled_union(std::vector<DomainRegion> parts) {
    if (parts.empty()) throw std::invalid_argument("labeled_union: empty");
    for (const auto& p : parts)
        if (p.dim() != parts.front().dim())
            throw std::invalid_argument("labeled_union: mixed dimensions");
    DomainRegion r;
    r.kind = Kind::labeled_union;
    r.parts = std::move(parts);
    return r;
}

DomainRegion DomainRegion::all(int dim) {
    if (dim < 1) throw std::invalid_argument("all: dim must be >= 1");
    DomainRegion r;
    r.kind = Kind::all;
    r.lo = Vec::Zero(dim);  // records dimension only
    return r;
}

int DomainRegion::dim() const {
    switch (kind) {
        case Kind::box: return static_cast<int>(lo.size());
        case Kind::ball: return static_cast<int>(center.size());
        case Kind::finite_set: return static_cast<int>(points.front().size());
        case Kind::labeled_union: return parts.front().dim();
        case Kind::all: return static_cast<int>(lo.size());
    }
    throw std::logic_error("dim: bad kind");
}

bool DomainRegion::bounded() const {
    if (kind == Kind::all) return false;
    if (kind == Kind::labeled_union)
        for (const auto& p : parts)
            if (!p.bounded()) return false;
    return true;
}

bool DomainRegion::contains(const Vec& x, double tol) const {
    if (x.size() != dim()) return false;
    switch (kind) {
        case Kind::box:
            return ((x - lo).array() >= -tol).all() && ((hi - x).array() >= -tol).all();
        case Kind::ball:
            return (x - center).norm() <= radius + tol;
        case Kind::finite_set: {
            for (const auto& p : points)
                if ((x - p).norm() <= tol) return true;
            return false;
        }
        case Kind::labeled_union: {
            for (const auto& p : parts)
                if (p.contains(x, tol)) return true;
            return false;
        }
        case Kind::all:
            return true;
    }
    throw std::logic_error("contains: bad kind");
}

Vec DomainRegion::sample(Rng& rng, SampleDist dist) const {
    switch (kind) {
        case Kind::box: {
            Vec x(lo.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.next_in(lo[i], hi[i]);
            if (dist == SampleDist::boundary_biased) {
                // snap roughly a quarter of the coordinates to a face
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    const double u = rng.next_unit();
                    if (u < 0.125) x[i] = lo[i];
                    else if (u < 0.25) x[i] = hi[i];
                }
            } else if (dist == SampleDist::grid) {
                const double res = 64.0;
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    const double t = std::floor((x[i] - lo[i]) / (hi[i] - lo[i] + 1e-300) * res) / res;
                    x[i] = lo[i] + t * (hi[i] - lo[i]);
                }
            }
            return x;
        }
        case Kind::ball: {
            // rejection from the bounding box; draw count varies, stream stays deterministic
            for (;;) {
                Vec x(center.size());
                for (Eigen::Index i = 0; i < x.size(); ++i)
                    x[i] = center[i] + (2.0 * rng.next_unit() - 1.0) * radius;
                if ((x - center).norm() <= radius) return x;
            }
        }
        case Kind::finite_set:
            return points[rng.next_index(points.size())];
        case Kind::labeled_union:
            return parts[rng.next_index(parts.size())].sample(rng, dist);
        case Kind::all:
            throw std::invalid_argument("sample: region is unbounded");
    }
    throw std::logic_error("sample: bad kind");
}

CheckReport w_check(const ConvexStructure& w, const MetricSpec& metric,
                    const DomainRegion& region, const SamplingPlan& plan) {
    struct Acc {
        double worst = -std::numeric_limits<double>::infinity();
        Vec u, x, y;
        double lambda = 0.0;
    };
    Acc res = chunked_reduce<Acc>(
        plan, Acc{},
        [&](std::int64_t, Rng& rng, std::int64_t cnt) {
            Acc acc;
            for (std::int64_t i = 0; i < cnt; ++i) {
                Vec u = region.sample(rng, plan.dist);
                Vec x = region.sample(rng, plan.dist);
                Vec y = region.sample(rng, plan.dist);
                // endpoints first, then interior draws
                double lam = (i == 0) ? 0.0 : (i == 1) ? 1.0 : rng.next_unit();
                const Vec wxy = w_eval(w, x, y, lam);
                const double viol = metric_eval(metric, u, wxy) -
                                    (lam * metric_eval(metric, u, x) +
                                     (1.0 - lam) * metric_eval(metric, u, y));
                if (viol > acc.worst) acc = Acc{viol, u, x, y, lam};
            }
            return acc;
        },
        [](const Acc& a, const Acc& b) { return a.worst >= b.worst ? a : b; });

    CheckReport rep;
    rep.sample_count = plan.count;
    rep.max_violation = res.worst;
    rep.pass = res.worst <= plan.tolerance;
    if (!rep.pass && res.u.size() > 0) {
        rep.witness = {res.u, res.x, res.y};
        Vec lam(1);
        lam << res.lambda;
        rep.witness.push_back(lam);
    }
    return rep;
}

CheckReport subordination_check(const MetricSpec& metric, const NormSpec& norm,
                                const DomainRegion& region, const SamplingPlan& plan) {
    struct Acc {
        double worst = -std::numeric_limits<double>::infinity();
        Vec x, y;
    };
    Acc res = chunked_reduce<Acc>(
        plan, Acc{},
        [&](std::int64_t, Rng& rng, std::int64_t cnt) {
            Acc acc;
            for (std::int64_t i = 0; i < cnt; ++i) {
                Vec x = region.sample(rng, plan.dist);
                Vec y = region.sample(rng, plan.dist);
                const double viol = metric_eval(metric, x, y) - norm_eval(norm, x - y);
                if (viol > acc.worst) acc = Acc{viol, x, y};
            }
            return acc;
        },
        [](const Acc& a, const Acc& b) { return a.worst >= b.worst ? a : b; });
    CheckReport rep;
    rep.sample_count = plan.count;
    rep.max_violation = res.worst;
    rep.pass = res.worst <= plan.tolerance;
    if (!rep.pass && res.x.size() > 0) rep.witness = {res.x, res.y};
    return rep;
}

SpaceSpec SpaceSpec::euclidean_box(double lo, double hi) {
    SpaceSpec s;
    s.dimension = 1;
    s.norm = NormSpec::euclidean();
    s.metric = MetricSpec::norm_induced(s.norm);
    s.region = DomainRegion::box1d(lo, hi);
    return s;
}

}  // namespace efp
