#include "efp/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace efp {

namespace {

using json = nlohmann::json;

// nlohmann does not track key positions, so diagnostics anchor to the first
// textual occurrence of the offending key
struct Source {
    std::string name;
    std::string text;

    int line_of(const std::string& key) const {
        const std::string needle = "\"" + key + "\"";
        const auto pos = text.find(needle);
        if (pos == std::string::npos) return 0;
        return 1 + static_cast<int>(std::count(text.begin(), text.begin() +
                                                                 static_cast<std::ptrdiff_t>(pos),
                                               '\n'));
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError(name + ":" + std::to_string(line_of(key)) + ": " + msg);
    }
};

void check_keys(const Source& src, const json& obj, const std::string& block,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, val] : obj.items()) {
        (void)val;
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok) src.fail(key, "unknown key '" + key + "' in block '" + block + "'");
    }
}

double get_num(const Source& src, const json& obj, const char* key) {
    if (!obj.contains(key)) src.fail(key, std::string("missing key '") + key + "'");
    if (!obj.at(key).is_number()) src.fail(key, std::string("'") + key + "' must be a number");
    return obj.at(key).get<double>();
}

std::string get_str(const Source& src, const json& obj, const char* key) {
    if (!obj.contains(key)) src.fail(key, std::string("missing key '") + key + "'");
    if (!obj.at(key).is_string()) src.fail(key, std::string("'") + key + "' must be a string");
    return obj.at(key).get<std::string>();
}

Vec get_vec(const Source& src, const json& obj, const char* key) {
    if (!obj.contains(key)) src.fail(key, std::string("missing key '") + key + "'");
    const json& a = obj.at(key);
    if (!a.is_array()) src.fail(key, std::string("'") + key + "' must be an array");
    Vec v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) src.fail(key, std::string("'") + key + "' must hold numbers");
        v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    }
    return v;
}

std::vector<double> get_list(const Source& src, const json& obj, const char* key) {
    const Vec v = get_vec(src, obj, key);
    return std::vector<double>(v.data(), v.data() + v.size());
}

DomainRegion parse_region(const Source& src, const json& j);

DomainRegion parse_region(const Source& src, const json& j) {
    if (!j.is_object()) src.fail("region", "region must be an object");
    const std::string kind = get_str(src, j, "kind");
    if (kind == "box") {
        check_keys(src, j, "region", {"kind", "lo", "hi"});
        return DomainRegion::box(get_vec(src, j, "lo"), get_vec(src, j, "hi"));
    }
    if (kind == "ball") {
        check_keys(src, j, "region", {"kind", "center", "radius"});
        return DomainRegion::ball(get_vec(src, j, "center"), get_num(src, j, "radius"));
    }
    if (kind == "finite_set") {
        check_keys(src, j, "region", {"kind", "points"});
        std::vector<Vec> pts;
        for (const auto& p : j.at("points")) {
            Vec v(static_cast<Eigen::Index>(p.size()));
            for (std::size_t i = 0; i < p.size(); ++i)
                v(static_cast<Eigen::Index>(i)) = p[i].get<double>();
            pts.push_back(std::move(v));
        }
        return DomainRegion::finite_set(std::move(pts));
    }
    if (kind == "labeled_union") {
        check_keys(src, j, "region", {"kind", "parts"});
        std::vector<DomainRegion> parts;
        for (const auto& p : j.at("parts")) parts.push_back(parse_region(src, p));
        return DomainRegion::labeled_union(std::move(parts));
    }
    if (kind == "all") {
        check_keys(src, j, "region", {"kind", "dimension"});
        return DomainRegion::all(static_cast<int>(get_num(src, j, "dimension")));
    }
    src.fail("kind", "unknown region kind '" + kind + "'");
}

NormSpec parse_norm(const Source& src, const json& j) {
    const std::string kind = get_str(src, j, "kind");
    if (kind == "euclidean") {
        check_keys(src, j, "norm", {"kind"});
        return NormSpec::euclidean();
    }
    if (kind == "p_norm") {
        check_keys(src, j, "norm", {"kind", "p"});
        return NormSpec::p_norm(get_num(src, j, "p"));
    }
    if (kind == "quasi_p_norm") {
        check_keys(src, j, "norm", {"kind", "p"});
        return NormSpec::quasi_p(get_num(src, j, "p"));
    }
    if (kind == "weighted_sup") {
        check_keys(src, j, "norm", {"kind", "weights"});
        return NormSpec::weighted_sup(get_vec(src, j, "weights"));
    }
    src.fail("kind", "unknown norm kind '" + kind + "'");
}

MetricSpec parse_metric(const Source& src, const json& j, const NormSpec& base) {
    const std::string kind = get_str(src, j, "kind");
    if (kind == "norm_induced") {
        check_keys(src, j, "metric", {"kind"});
        return MetricSpec::norm_induced(base);
    }
    if (kind == "scaled") {
        check_keys(src, j, "metric", {"kind", "factor"});
        return MetricSpec::scaled(base, get_num(src, j, "factor"));
    }
    if (kind == "truncated") {
        check_keys(src, j, "metric", {"kind", "cap"});
        return MetricSpec::truncated(base, get_num(src, j, "cap"));
    }
    src.fail("kind", "unknown metric kind '" + kind + "'");
}

ConvexStructure parse_convex(const Source& src, const json& j) {
    const std::string kind = get_str(src, j, "kind");
    check_keys(src, j, "convex", {"kind"});
    if (kind == "linear") return ConvexStructure{};
    if (kind == "left_endpoint") return ConvexStructure{ConvexStructure::Kind::left_endpoint};
    src.fail("kind", "unknown convex structure kind '" + kind + "'");
}

SpaceSpec parse_space(const Source& src, const json& j) {
    check_keys(src, j, "space", {"dimension", "norm", "metric", "convex", "region"});
    SpaceSpec sp;
    sp.dimension = static_cast<int>(get_num(src, j, "dimension"));
    sp.norm = j.contains("norm") ? parse_norm(src, j.at("norm")) : NormSpec::euclidean();
    sp.metric = j.contains("metric") ? parse_metric(src, j.at("metric"), sp.norm)
                                     : MetricSpec::norm_induced(sp.norm);
    sp.convex = j.contains("convex") ? parse_convex(src, j.at("convex"))
                                     : ConvexStructure{};
    if (!j.contains("region")) src.fail("space", "missing key 'region'");
    sp.region = parse_region(src, j.at("region"));
    if (sp.region.dim() != sp.dimension)
        src.fail("dimension", "region dimension does not match 'dimension'");
    return sp;
}

MappingSpec parse_mapping(const Source& src, const json& j) {
    const std::string kind = get_str(src, j, "kind");
    std::optional<DomainRegion> domain;
    if (j.contains("domain")) domain = parse_region(src, j.at("domain"));

    MappingSpec m;
    if (kind == "affine") {
        check_keys(src, j, "mapping", {"kind", "A", "c", "domain"});
        if (!domain) src.fail("mapping", "affine mapping needs a 'domain'");
        const json& rows = j.at("A");
        const auto r = static_cast<Eigen::Index>(rows.size());
        Mat A(r, r);
        for (Eigen::Index i = 0; i < r; ++i) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            if (static_cast<Eigen::Index>(row.size()) != r)
                src.fail("A", "'A' must be a square matrix");
            for (Eigen::Index k = 0; k < r; ++k)
                A(i, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
        m = make_affine(A, get_vec(src, j, "c"), *domain);
    } else if (kind == "reflection") {
        check_keys(src, j, "mapping", {"kind"});
        m = make_reflection_1d();
    } else if (kind == "reciprocal") {
        check_keys(src, j, "mapping", {"kind"});
        m = make_reciprocal_1d();
    } else if (kind == "negate_scale") {
        check_keys(src, j, "mapping", {"kind"});
        m = make_negate_scale_1d();
    } else if (kind == "two_branch_reflection") {
        check_keys(src, j, "mapping", {"kind"});
        m = make_two_branch_reflection();
    } else if (kind == "zigzag") {
        check_keys(src, j, "mapping", {"kind"});
        m = make_zigzag_1d();
    } else if (kind == "translation") {
        check_keys(src, j, "mapping", {"kind"});
        m = make_translation_1d();
    } else if (kind == "piecewise") {
        check_keys(src, j, "mapping", {"kind", "breaks", "slopes", "intercepts", "domain"});
        m = make_piecewise_affine_1d(get_list(src, j, "breaks"), get_list(src, j, "slopes"),
                                     get_list(src, j, "intercepts"));
    } else if (kind == "averaged") {
        check_keys(src, j, "mapping", {"kind", "lambda", "base"});
        if (!j.contains("base")) src.fail("mapping", "averaged mapping needs a 'base'");
        m = make_averaged(parse_mapping(src, j.at("base")), get_num(src, j, "lambda"));
    } else {
        src.fail("kind", "unknown mapping kind '" + kind + "'");
    }
    if (domain && kind != "affine") m.domain = *domain;
    return m;
}

PresicMappingSpec parse_presic(const Source& src, const json& j) {
    check_keys(src, j, "presic", {"arity", "coeffs", "offset", "domain"});
    PresicMappingSpec p;
    p.arity = static_cast<int>(get_num(src, j, "arity"));
    p.coeffs = get_list(src, j, "coeffs");
    if (!j.contains("domain")) src.fail("presic", "missing key 'domain'");
    p.domain = parse_region(src, j.at("domain"));
    p.offset = j.contains("offset") ? get_vec(src, j, "offset") : Vec::Zero(p.domain.dim());
    return p;
}

SamplingPlan parse_plan(const Source& src, const json& j) {
    check_keys(src, j, "plan", {"samples", "seed", "dist", "tolerance"});
    SamplingPlan plan;
    if (j.contains("samples")) plan.count = static_cast<std::int64_t>(get_num(src, j, "samples"));
    if (j.contains("seed")) plan.seed = static_cast<std::uint64_t>(get_num(src, j, "seed"));
    if (j.contains("tolerance")) plan.tolerance = get_num(src, j, "tolerance");
    if (j.contains("dist")) {
        const std::string d = get_str(src, j, "dist");
        if (d == "uniform") plan.dist = SampleDist::uniform;
        else if (d == "grid") plan.dist = SampleDist::grid;
        else if (d == "boundary_biased") plan.dist = SampleDist::boundary_biased;
        else src.fail("dist", "unknown sampling distribution '" + d + "'");
    }
    if (plan.count < 1) src.fail("samples", "'samples' must be >= 1");
    if (!(plan.tolerance > 0.0)) src.fail("tolerance", "'tolerance' must be > 0");
    return plan;
}

ComparisonFn parse_phi(const Source& src, const json& j) {
    check_keys(src, j, "phi", {"kind", "c"});
    const std::string kind = get_str(src, j, "kind");
    if (kind == "rational") return ComparisonFn::rational();
    if (kind == "linear") return ComparisonFn::linear(get_num(src, j, "c"));
    if (kind == "split") return ComparisonFn::split();
    if (kind == "identity") return ComparisonFn::identity();
    src.fail("kind", "unknown gauge kind '" + kind + "'");
}

ConstantSet parse_constants(const Source& src, const json& j) {
    check_keys(src, j, "constants",
               {"b", "k", "theta", "a", "b2", "L", "lambda", "c", "theta_list", "b_list",
                "phi", "psi"});
    ConstantSet kk;
    if (j.contains("b")) kk.b = get_num(src, j, "b");
    if (j.contains("k")) kk.k = get_num(src, j, "k");
    if (j.contains("theta")) kk.theta = get_num(src, j, "theta");
    if (j.contains("a")) kk.a = get_num(src, j, "a");
    if (j.contains("b2")) kk.b2 = get_num(src, j, "b2");
    if (j.contains("L")) kk.L = get_num(src, j, "L");
    if (j.contains("lambda")) kk.lambda = get_num(src, j, "lambda");
    if (j.contains("c")) kk.c = get_num(src, j, "c");
    if (j.contains("theta_list")) kk.theta_list = get_list(src, j, "theta_list");
    if (j.contains("b_list")) kk.b_list = get_list(src, j, "b_list");
    if (j.contains("phi")) kk.phi = parse_phi(src, j.at("phi"));
    if (j.contains("psi")) {
        check_keys(src, j.at("psi"), "psi", {"kind"});
        kk.psi = PsiFn{};
    }
    return kk;
}

CertifyTask parse_certify(const Source& src, const json& j) {
    check_keys(src, j, "certify", {"kind", "class", "constants", "optimize", "b_grid"});
    CertifyTask t;
    if (j.contains("optimize")) {
        if (!j.at("optimize").is_boolean()) src.fail("optimize", "'optimize' must be a boolean");
        t.optimize = j.at("optimize").get<bool>();
    }
    if (j.contains("class")) {
        const std::string name = get_str(src, j, "class");
        auto cls = class_from_name(name);
        if (!cls) src.fail("class", "unknown class '" + name + "'");
        t.cls = *cls;
    } else if (!t.optimize) {
        src.fail("certify", "missing key 'class'");
    }
    if (j.contains("constants")) t.consts = parse_constants(src, j.at("constants"));
    if (j.contains("b_grid")) t.b_grid = get_list(src, j, "b_grid");
    return t;
}

SolveTask parse_solve(const Source& src, const json& j) {
    check_keys(src, j, "solve",
               {"kind", "method", "x0", "init", "lambda", "max_iterations", "tolerance",
                "stop", "bound_target", "certificate", "phi", "b", "presic_method",
                "weights"});
    SolveTask t;
    const std::string method = j.contains("method") ? get_str(src, j, "method") : "krasnoselskij";
    if (method == "krasnoselskij") t.method = SolveTask::Method::krasnoselskij;
    else if (method == "convex_metric") t.method = SolveTask::Method::convex_metric;
    else if (method == "maia") t.method = SolveTask::Method::maia;
    else if (method == "cyclic") t.method = SolveTask::Method::cyclic;
    else if (method == "presic") t.method = SolveTask::Method::presic;
    else src.fail("method", "unknown solve method '" + method + "'");

    if (j.contains("x0")) t.x0 = get_vec(src, j, "x0");
    if (j.contains("init"))
        for (const auto& p : j.at("init")) {
            Vec v(static_cast<Eigen::Index>(p.size()));
            for (std::size_t i = 0; i < p.size(); ++i)
                v(static_cast<Eigen::Index>(i)) = p[i].get<double>();
            t.init.push_back(std::move(v));
        }
    if (j.contains("lambda")) t.lambda = get_num(src, j, "lambda");
    if (j.contains("max_iterations"))
        t.cfg.max_iterations = static_cast<std::int64_t>(get_num(src, j, "max_iterations"));
    if (j.contains("tolerance")) t.cfg.tolerance = get_num(src, j, "tolerance");
    if (j.contains("stop")) {
        const std::string s = get_str(src, j, "stop");
        if (s == "residual") t.cfg.stop = SolveConfig::StopRule::residual;
        else if (s == "bound_target") t.cfg.stop = SolveConfig::StopRule::bound_target;
        else if (s == "max_iter") t.cfg.stop = SolveConfig::StopRule::max_iter;
        else src.fail("stop", "unknown stop rule '" + s + "'");
    }
    if (j.contains("bound_target")) t.cfg.bound_target = get_num(src, j, "bound_target");
    if (j.contains("certificate")) t.certificate = parse_certify(src, j.at("certificate"));
    if (j.contains("phi")) t.phi = parse_phi(src, j.at("phi"));
    if (j.contains("b")) t.b = get_num(src, j, "b");
    if (j.contains("presic_method")) {
        const std::string pm = get_str(src, j, "presic_method");
        if (pm == "diagonal") t.presic_method = PresicMethod::diagonal;
        else if (pm == "k_step") t.presic_method = PresicMethod::k_step;
        else src.fail("presic_method", "unknown method '" + pm + "'");
    }
    if (j.contains("weights")) t.presic_weights = get_list(src, j, "weights");
    t.cfg.lambda_override = t.lambda;
    return t;
}

}  // namespace

ProblemConfig parse_config(const std::string& text, const std::string& name) {
    Source src{name, text};
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        // nlohmann reports "... at line L, column C ..." for parse errors
        throw ConfigError(name + ":0: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(name + ":1: top level must be an object");
    check_keys(src, j, "top level", {"space", "mapping", "presic", "fix", "plan", "task"});

    ProblemConfig cfg;
    if (!j.contains("space")) src.fail("space", "missing block 'space'");
    cfg.space = parse_space(src, j.at("space"));
    if (j.contains("mapping")) cfg.mapping = parse_mapping(src, j.at("mapping"));
    if (j.contains("presic")) cfg.presic = parse_presic(src, j.at("presic"));
    if (!cfg.mapping && !cfg.presic)
        src.fail("space", "config needs a 'mapping' or 'presic' block");
    if (j.contains("fix"))
        for (const auto& p : j.at("fix")) {
            Vec v(static_cast<Eigen::Index>(p.size()));
            for (std::size_t i = 0; i < p.size(); ++i)
                v(static_cast<Eigen::Index>(i)) = p[i].get<double>();
            cfg.fix.push_back(std::move(v));
        }
    if (j.contains("plan")) cfg.plan = parse_plan(src, j.at("plan"));

    if (!j.contains("task")) src.fail("space", "missing block 'task'");
    const json& task = j.at("task");
    const std::string kind = get_str(src, task, "kind");
    if (kind == "certify") {
        cfg.task = ProblemConfig::TaskKind::certify;
        cfg.certify_task = parse_certify(src, task);
    } else if (kind == "solve") {
        cfg.task = ProblemConfig::TaskKind::solve;
        cfg.solve_task = parse_solve(src, task);
    } else if (kind == "atlas") {
        check_keys(src, task, "task", {"kind"});
        cfg.task = ProblemConfig::TaskKind::atlas;
    } else {
        src.fail("kind", "unknown task kind '" + kind + "'");
    }
    return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError(path.string() + ":0: cannot read file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path.string());
}

}  // namespace efp
