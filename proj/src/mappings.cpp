#include "efp/mappings.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace efp {

namespace {

constexpr double kBoundaryTol = 1e-12;

SamplingPlan default_check_plan() {
    SamplingPlan p;
    p.count = 2000;
    p.seed = 0x5e1fc2ed5e1fc2edull;  // fixed: construction checks are reproducible
    return p;
}

double piecewise_eval(const MappingSpec& T, double x) {
    const auto& b = T.breaks;
    if (x < b.front() - kBoundaryTol || x > b.back() + kBoundaryTol)
        throw std::domain_error("map_eval: point outside piecewise support");
    const double xc = std::min(std::max(x, b.front()), b.back());
    std::size_t i = 0;
    while (i + 2 < b.size() && xc >= b[i + 1]) ++i;  // final piece closed
    return T.slopes[i] * xc + T.intercepts[i];
}

}  // namespace

int MappingSpec::dim() const { return domain.dim(); }

Vec map_eval(const MappingSpec& T, const Vec& x) {
    if (x.size() != T.dim()) throw std::invalid_argument("map_eval: dimension mismatch");
    if (!x.allFinite()) throw std::invalid_argument("map_eval: non-finite coordinate");
    if (!T.domain.contains(x, kBoundaryTol))
        throw std::domain_error("map_eval: point outside mapping domain");
    switch (T.kind) {
        case MappingSpec::Kind::affine:
            return T.A * x + T.c;
        case MappingSpec::Kind::reflection_1d: {
            Vec y(1);
            y << 1.0 - x[0];
            return y;
        }
        case MappingSpec::Kind::reciprocal_1d: {
            Vec y(1);
            y << 1.0 / x[0];
            return y;
        }
        case MappingSpec::Kind::negate_scale_1d: {
            Vec y(1);
            y << -x[0] / 2.0;
            return y;
        }
        case MappingSpec::Kind::piecewise_affine_1d: {
            Vec y(1);
            y << piecewise_eval(T, x[0]);
            return y;
        }
        case MappingSpec::Kind::composed: {
            Vec y = x;
            for (const auto& part : T.parts) y = map_eval(part, y);
            return y;
        }
        case MappingSpec::Kind::averaged:
            return averaged_eval(T.parts[0], T.lambda, x);
    }
    throw std::logic_error("map_eval: bad kind");
}

Vec averaged_eval(const MappingSpec& T, double lambda, const Vec& x) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("averaged_eval: lambda must lie in [0, 1]");
    return (1.0 - lambda) * x + lambda * map_eval(T, x);
}

void verify_self_map(const MappingSpec& T, const SamplingPlan& plan) {
    if (!T.domain.bounded()) return;
    Rng rng(plan.seed);
    for (std::int64_t i = 0; i < plan.count; ++i) {
        Vec x = T.domain.sample(rng, plan.dist);
        Vec y = map_eval(T, x);
        if (!T.domain.contains(y, 1e-9)) {
            std::ostringstream os;
            os << "mapping is not a self-map: image of (" << x.transpose()
               << ") lands at (" << y.transpose() << ")";
            throw std::domain_error(os.str());
        }
    }
}

MappingSpec make_affine(Mat A, Vec c, DomainRegion domain, const SamplingPlan* check_plan) {
    if (A.rows() != A.cols() || A.rows() != c.size() || A.rows() != domain.dim())
        throw std::invalid_argument("make_affine: inconsistent dimensions");
    MappingSpec T;
    T.kind = MappingSpec::Kind::affine;
    T.A = std::move(A);
    T.c = std::move(c);
    T.domain = std::move(domain);
    const SamplingPlan plan = check_plan ? *check_plan : default_check_plan();
    verify_self_map(T, plan);
    return T;
}

MappingSpec make_reflection_1d() {
    MappingSpec T;
    T.kind = MappingSpec::Kind::reflection_1d;
    T.domain = DomainRegion::box1d(0.0, 1.0);
    Vec p(1);
    p << 0.5;
    T.known_fixed_points = {p};
    return T;
}

MappingSpec make_reciprocal_1d() {
    MappingSpec T;
    T.kind = MappingSpec::Kind::reciprocal_1d;
    T.domain = DomainRegion::box1d(0.5, 2.0);
    Vec p(1);
    p << 1.0;
    T.known_fixed_points = {p};
    return T;
}

MappingSpec make_negate_scale_1d() {
    MappingSpec T;
    T.kind = MappingSpec::Kind::negate_scale_1d;
    T.domain = DomainRegion::box1d(-1.0, 1.0);
    T.known_fixed_points = {Vec::Zero(1)};
    return T;
}

MappingSpec make_piecewise_affine_1d(std::vector<double> breaks, std::vector<double> slopes,
                                     std::vector<double> intercepts,
                                     std::vector<Vec> fixed_points,
                                     const SamplingPlan* check_plan) {
    if (breaks.size() < 2 || slopes.size() != breaks.size() - 1 ||
        intercepts.size() != slopes.size())
        throw std::invalid_argument("piecewise: needs k+1 breaks for k pieces");
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (!(breaks[i] < breaks[i + 1]))
            throw std::invalid_argument("piecewise: breaks must increase");
    MappingSpec T;
    T.kind = MappingSpec::Kind::piecewise_affine_1d;
    T.domain = DomainRegion::box1d(breaks.front(), breaks.back());
    T.breaks = std::move(breaks);
    T.slopes = std::move(slopes);
    T.intercepts = std::move(intercepts);
    T.known_fixed_points = std::move(fixed_points);
    const SamplingPlan plan = check_plan ? *check_plan : default_check_plan();
    verify_self_map(T, plan);
    return T;
}

MappingSpec make_composed(std::vector<MappingSpec> parts, const SamplingPlan* check_plan) {
    if (parts.empty()) throw std::invalid_argument("composed: empty");
    MappingSpec T;
    T.kind = MappingSpec::Kind::composed;
    T.domain = parts.front().domain;
    T.parts = std::move(parts);
    const SamplingPlan plan = check_plan ? *check_plan : default_check_plan();
    verify_self_map(T, plan);
    return T;
}

MappingSpec make_averaged(MappingSpec base, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("make_averaged: lambda must lie in [0, 1]");
    MappingSpec T;
    T.kind = MappingSpec::Kind::averaged;
    T.domain = base.domain;
    T.known_fixed_points = base.known_fixed_points;  // averaging preserves fixed points
    T.lambda = lambda;
    T.parts.push_back(std::move(base));
    return T;
}

MappingSpec make_two_branch_reflection() {
    Vec p1(1), p2(1);
    p1 << 0.5;
    p2 << 1.0;
    return make_piecewise_affine_1d({0.0, 2.0 / 3.0, 4.0 / 3.0}, {-1.0, -1.0}, {1.0, 2.0},
                                    {p1, p2});
}

MappingSpec make_zigzag_1d() {
    // slopes 0.2 then 1.5, continuous at 0.5, T(x) <= x with equality only at 0
    return make_piecewise_affine_1d({0.0, 0.5, 1.0}, {0.2, 1.5}, {0.0, -0.65},
                                    {Vec::Zero(1)});
}

MappingSpec make_translation_1d() {
    MappingSpec T;
    T.kind = MappingSpec::Kind::affine;
    T.A = Mat::Identity(1, 1);
    T.c = Vec::Ones(1);
    T.domain = DomainRegion::all(1);
    return T;
}

std::optional<std::pair<Mat, Vec>> collapse_affine(const MappingSpec& T) {
    switch (T.kind) {
        case MappingSpec::Kind::affine:
            return std::make_pair(T.A, T.c);
        case MappingSpec::Kind::reflection_1d:
            return std::make_pair(-Mat::Identity(1, 1), Vec::Ones(1));
        case MappingSpec::Kind::negate_scale_1d:
            return std::make_pair(Mat::Identity(1, 1) * -0.5, Vec::Zero(1));
        case MappingSpec::Kind::reciprocal_1d:
        case MappingSpec::Kind::piecewise_affine_1d:
            return std::nullopt;
        case MappingSpec::Kind::averaged: {
            auto base = collapse_affine(T.parts[0]);
            if (!base) return std::nullopt;
            const int d = T.dim();
            Mat A = (1.0 - T.lambda) * Mat::Identity(d, d) + T.lambda * base->first;
            Vec c = T.lambda * base->second;
            return std::make_pair(std::move(A), std::move(c));
        }
        case MappingSpec::Kind::composed: {
            const int d = T.dim();
            Mat A = Mat::Identity(d, d);
            Vec c = Vec::Zero(d);
            for (const auto& part : T.parts) {
                auto pc = collapse_affine(part);
                if (!pc) return std::nullopt;
                A = pc->first * A;
                c = pc->first * c + pc->second;
            }
            return std::make_pair(std::move(A), std::move(c));
        }
    }
    return std::nullopt;
}

int PresicMappingSpec::dim() const { return domain.dim(); }

Vec presic_eval(const PresicMappingSpec& T, std::span<const Vec> args) {
    if (static_cast<int>(args.size()) != T.arity)
        throw std::invalid_argument("presic_eval: wrong argument count");
    if (static_cast<int>(T.coeffs.size()) != T.arity)
        throw std::invalid_argument("presic_eval: coefficient count mismatch");
    Vec y = T.offset.size() ? T.offset : Vec::Zero(T.dim());
    for (int i = 0; i < T.arity; ++i) {
        if (!T.domain.contains(args[i], kBoundaryTol))
            throw std::domain_error("presic_eval: argument outside domain");
        y += T.coeffs[i] * args[i];
    }
    return y;
}

PresicWeights PresicWeights::make(std::vector<double> raw) {
    if (raw.size() < 2) throw std::invalid_argument("presic weights: need k+1 entries");
    double sum = 0.0;
    for (double v : raw) {
        if (!(v >= 0.0)) throw std::invalid_argument("presic weights: negative entry");
        sum += v;
    }
    if (!(sum > 0.0) || !(raw.back() > 0.0))
        throw std::invalid_argument("presic weights: last weight must be positive");
    for (double& v : raw) v /= sum;
    // force an exact unit sum after rounding
    double s = 0.0;
    for (std::size_t i = 1; i < raw.size(); ++i) s += raw[i];
    raw[0] = 1.0 - s;
    if (raw[0] < 0.0) raw[0] = 0.0;
    return PresicWeights{std::move(raw)};
}

PresicWeights PresicWeights::default_policy(const std::vector<double>& b, int arity) {
    double B = 0.0;
    for (double v : b) B += v;
    const double lk = 1.0 / (B + 1.0);
    std::vector<double> w(static_cast<std::size_t>(arity) + 1,
                          arity > 0 ? (1.0 - lk) / arity : 0.0);
    w.back() = lk;
    return make(std::move(w));
}

Vec presic_averaged_eval(const PresicMappingSpec& T, const PresicWeights& w,
                         std::span<const Vec> args) {
    if (w.w.size() != static_cast<std::size_t>(T.arity) + 1)
        throw std::invalid_argument("presic_averaged_eval: weight count mismatch");
    Vec y = w.w.back() * presic_eval(T, args);
    for (int i = 0; i < T.arity; ++i) y += w.w[static_cast<std::size_t>(i)] * args[i];
    return y;
}

double diagonal_residual(const PresicMappingSpec& T, const NormSpec& n, const Vec& x) {
    std::vector<Vec> diag(static_cast<std::size_t>(T.arity), x);
    return norm_eval(n, presic_eval(T, diag) - x);
}

}  // namespace efp
