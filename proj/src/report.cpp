#include "efp/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace efp {

namespace {

using json = nlohmann::json;

json num_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

double num_from(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vec vec_from_json(const json& a) {
    Vec v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

json points_to_json(const std::vector<Vec>& pts) {
    json a = json::array();
    for (const Vec& p : pts) a.push_back(vec_to_json(p));
    return a;
}

std::vector<Vec> points_from_json(const json& a) {
    std::vector<Vec> out;
    for (const auto& p : a) out.push_back(vec_from_json(p));
    return out;
}

const char* phi_kind_name(ComparisonFn::Kind k) {
    switch (k) {
        case ComparisonFn::Kind::rational: return "rational";
        case ComparisonFn::Kind::linear: return "linear";
        case ComparisonFn::Kind::split: return "split";
        case ComparisonFn::Kind::identity: return "identity";
    }
    return "?";
}

ComparisonFn phi_from_name(const std::string& name, double c) {
    if (name == "rational") return ComparisonFn::rational();
    if (name == "linear") return ComparisonFn::linear(c);
    if (name == "split") return ComparisonFn::split();
    if (name == "identity") return ComparisonFn::identity();
    throw std::runtime_error("certificate: unknown gauge kind '" + name + "'");
}

json constants_to_json(const ConstantSet& kk) {
    json j = json::object();
    auto put = [&](const char* name, const std::optional<double>& v) {
        if (v) j[name] = *v;
    };
    put("b", kk.b);
    put("k", kk.k);
    put("theta", kk.theta);
    put("a", kk.a);
    put("b2", kk.b2);
    put("L", kk.L);
    put("lambda", kk.lambda);
    put("c", kk.c);
    if (!kk.theta_list.empty()) j["theta_list"] = kk.theta_list;
    if (!kk.b_list.empty()) j["b_list"] = kk.b_list;
    if (kk.phi) j["phi"] = {{"kind", phi_kind_name(kk.phi->kind)}, {"c", kk.phi->c}};
    if (kk.psi) j["psi"] = {{"kind", "exp_decay"}};
    return j;
}

ConstantSet constants_from_json(const json& j) {
    ConstantSet kk;
    for (const auto& [key, val] : j.items()) {
        if (key == "b") kk.b = val.get<double>();
        else if (key == "k") kk.k = val.get<double>();
        else if (key == "theta") kk.theta = val.get<double>();
        else if (key == "a") kk.a = val.get<double>();
        else if (key == "b2") kk.b2 = val.get<double>();
        else if (key == "L") kk.L = val.get<double>();
        else if (key == "lambda") kk.lambda = val.get<double>();
        else if (key == "c") kk.c = val.get<double>();
        else if (key == "theta_list") kk.theta_list = val.get<std::vector<double>>();
        else if (key == "b_list") kk.b_list = val.get<std::vector<double>>();
        else if (key == "phi")
            kk.phi = phi_from_name(val.at("kind").get<std::string>(),
                                   val.value("c", 0.5));
        else if (key == "psi") kk.psi = PsiFn{};
        else throw std::runtime_error("certificate: unknown constant '" + key + "'");
    }
    return kk;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::skipped: return "skipped";
    }
    return "?";
}

json entry_to_json(const MembershipEntry& e) {
    json j = json::object();
    j["verdict"] = verdict_name(e.verdict);
    j["constant"] = num_or_null(e.constant);
    j["min_margin"] = num_or_null(e.min_margin);
    j["witness"] = points_to_json(e.witness);
    if (!e.reason.empty()) j["reason"] = e.reason;
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string certificate_to_text(const Certificate& cert) {
    json j;
    j["type"] = "certificate";
    j["class"] = class_name(cert.cls);
    j["pass"] = cert.pass;
    j["constants"] = constants_to_json(cert.consts);
    j["min_margin"] = num_or_null(cert.min_margin);
    j["argmin"] = points_to_json(cert.argmin_args);
    j["sup_ratio"] = num_or_null(cert.sup_ratio);
    j["ratio_argmax"] = points_to_json(cert.ratio_argmax_args);
    j["feasibility_margin"] = num_or_null(cert.feasibility_margin);
    j["samples"] = cert.sample_count;
    j["seed"] = cert.seed;
    j["tolerance"] = cert.tolerance;
    j["route"] = cert.route;
    j["lambda_policy"] = num_or_null(cert.lambda_policy);
    j["contraction_factor"] = num_or_null(cert.contraction_factor);
    return dump(j);
}

Certificate certificate_from_text(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("certificate: malformed text (") + e.what() + ")");
    }
    Certificate cert;
    for (const auto& [key, val] : j.items()) {
        if (key == "type") {
            if (val.get<std::string>() != "certificate")
                throw std::runtime_error("certificate: wrong document type");
        } else if (key == "class") {
            auto cls = class_from_name(val.get<std::string>());
            if (!cls) throw std::runtime_error("certificate: unknown class name");
            cert.cls = *cls;
        } else if (key == "pass") cert.pass = val.get<bool>();
        else if (key == "constants") cert.consts = constants_from_json(val);
        else if (key == "min_margin") cert.min_margin = num_from(val);
        else if (key == "argmin") cert.argmin_args = points_from_json(val);
        else if (key == "sup_ratio") cert.sup_ratio = num_from(val);
        else if (key == "ratio_argmax") cert.ratio_argmax_args = points_from_json(val);
        else if (key == "feasibility_margin") cert.feasibility_margin = num_from(val);
        else if (key == "samples") cert.sample_count = val.get<std::int64_t>();
        else if (key == "seed") cert.seed = val.get<std::uint64_t>();
        else if (key == "tolerance") cert.tolerance = val.get<double>();
        else if (key == "route") cert.route = val.get<std::string>();
        else if (key == "lambda_policy") cert.lambda_policy = num_from(val);
        else if (key == "contraction_factor") cert.contraction_factor = num_from(val);
        else throw std::runtime_error("certificate: unknown key '" + key + "'");
    }
    return cert;
}

std::string membership_to_text(const MembershipReport& rep) {
    json j;
    j["type"] = "membership";
    j["ne"] = entry_to_json(rep.ne);
    j["qne"] = entry_to_json(rep.qne);
    j["spc"] = entry_to_json(rep.spc);
    j["dc"] = entry_to_json(rep.dc);
    j["ene"] = entry_to_json(rep.ene);
    j["samples"] = rep.sample_count;
    j["seed"] = rep.seed;
    return dump(j);
}

std::string solve_report_to_text(const SolveReport& rep) {
    const char* status = "?";
    switch (rep.status) {
        case SolveReport::Status::converged: status = "converged"; break;
        case SolveReport::Status::max_iterations: status = "max_iterations"; break;
        case SolveReport::Status::diverged_domain: status = "diverged_domain"; break;
        case SolveReport::Status::diverged_residual: status = "diverged_residual"; break;
    }
    json j;
    j["type"] = "solve";
    j["status"] = status;
    j["converged"] = rep.converged;
    j["final_point"] = vec_to_json(rep.final_point);
    j["final_residual"] = num_or_null(rep.final_residual);
    j["iterations"] = rep.iterations;
    j["lambda"] = rep.lambda;
    j["bounds_kind"] = rep.bounds_kind;
    j["bound_violations"] = rep.bound_violations;
    j["trace_rows"] = rep.trace.rows();
    if (!rep.note.empty()) j["note"] = rep.note;
    return dump(j);
}

std::string check_report_to_text(const CheckReport& rep, const std::string& kind) {
    json j;
    j["type"] = kind;
    j["pass"] = rep.pass;
    j["max_violation"] = num_or_null(rep.max_violation);
    j["samples"] = rep.sample_count;
    j["witness"] = points_to_json(rep.witness);
    if (!rep.detail.empty()) j["detail"] = rep.detail;
    return dump(j);
}

namespace {

void append_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

std::string trace_to_csv(const Trace& trace) {
    const int d = trace.iterates.empty() ? 0 : static_cast<int>(trace.iterates[0].size());
    std::string out = "n";
    for (int i = 0; i < d; ++i) out += ",coord_" + std::to_string(i);
    out += ",residual,bound_apriori,bound_aposteriori\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t n = 0; n < trace.rows(); ++n) {
        out += std::to_string(n);
        for (int i = 0; i < d; ++i) {
            out += ',';
            append_num(out, trace.iterates[n](i));
        }
        out += ',';
        append_num(out, trace.residual[n]);
        out += ',';
        append_num(out, n < trace.bound_apriori.size() ? trace.bound_apriori[n] : nan);
        out += ',';
        append_num(out, n < trace.bound_aposteriori.size() ? trace.bound_aposteriori[n] : nan);
        out += '\n';
    }
    return out;
}

void write_report_file(const std::string& path, const std::string& body) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "# generated: " << stamp << "\n" << body;
}

std::string strip_generated_header(const std::string& content) {
    std::istringstream in(content);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.rfind("# generated", 0) == 0) continue;
        out += line;
        out += '\n';
    }
    return out;
}

CheckReport verify_certificate(const Certificate& cert, const MappingSpec& T,
                               const SpaceSpec& space) {
    CheckReport rep;
    rep.pass = true;
    rep.max_violation = 0.0;
    if (cert.cls == ClassId::ENRICHED_PRESIC)
        throw std::invalid_argument("verify: multi-argument certificates need the k-ary mapping");

    bool feasible_consts = true;
    try {
        validate_constants(cert.cls, cert.consts);
    } catch (const std::invalid_argument&) {
        feasible_consts = false;  // failed search certificates store the infeasible estimate
    }

    if (feasible_consts) {
        if (!cert.argmin_args.empty()) {
            const double m =
                check_pointwise(cert.cls, T, cert.consts, cert.argmin_args, space);
            const double err = std::abs(m - cert.min_margin);
            const double tol = 1e-9 * (1.0 + std::abs(cert.min_margin));
            rep.sample_count += 1;
            if (err > tol) {
                rep.pass = false;
                rep.max_violation = std::max(rep.max_violation, err);
                rep.detail = "stored margin did not reproduce at the recorded pair";
                rep.witness = cert.argmin_args;
            }
        }
        const bool should_pass = cert.min_margin >= -cert.tolerance;
        if (cert.pass != should_pass) {
            rep.pass = false;
            rep.detail = "pass flag inconsistent with the stored margin and tolerance";
        }
    } else {
        // infeasible stored constants can only belong to a failed feasibility
        // search; the recorded pair must exhibit the saturated ratio
        if (cert.pass) {
            rep.pass = false;
            rep.detail = "passing certificate with infeasible constants";
            return rep;
        }
        if (!cert.consts.b || cert.ratio_argmax_args.size() != 2) {
            rep.pass = false;
            rep.detail = "failed search certificate lacks a checkable witness";
            return rep;
        }
        const double b = *cert.consts.b;
        const Vec& x = cert.ratio_argmax_args[0];
        const Vec& y = cert.ratio_argmax_args[1];
        const Vec u = x - y;
        const double nu = norm_eval(space.norm, u);
        rep.sample_count += 1;
        if (nu <= 0.0) {
            rep.pass = false;
            rep.detail = "degenerate witness pair";
            rep.witness = cert.ratio_argmax_args;
            return rep;
        }
        const double ratio =
            norm_eval(space.norm, b * u + map_eval(T, x) - map_eval(T, y)) / (nu * (b + 1.0));
        if (ratio < 1.0 - 1e-6) {
            rep.pass = false;
            rep.max_violation = 1.0 - ratio;
            rep.detail = "witness pair does not exhibit the saturated ratio";
            rep.witness = cert.ratio_argmax_args;
        }
    }
    if (rep.pass && rep.detail.empty())
        rep.detail = "stored witnesses reproduce";
    return rep;
}

}  // namespace efp
