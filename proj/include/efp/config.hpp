// Problem configuration: one JSON document describing space, mapping and
// task. Unknown keys are rejected; diagnostics carry line numbers.
#pragma once

#include <filesystem>

#include "efp/atlas.hpp"
#include "efp/solver.hpp"

namespace efp {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CertifyTask {
    ClassId cls = ClassId::NE;
    ConstantSet consts;
    bool optimize = false;             // run the b-grid search instead
    std::vector<double> b_grid;        // optional override
};

struct SolveTask {
    enum class Method { krasnoselskij, convex_metric, maia, cyclic, presic };
    Method method = Method::krasnoselskij;
    Vec x0;
    std::vector<Vec> init;             // presic k_step seeds
    std::optional<double> lambda;
    SolveConfig cfg;
    std::optional<CertifyTask> certificate;  // certify first, then solve
    // cyclic extras
    std::optional<ComparisonFn> phi;
    std::optional<double> b;
    PresicMethod presic_method = PresicMethod::diagonal;
    std::vector<double> presic_weights;
};

struct ProblemConfig {
    SpaceSpec space;
    std::optional<MappingSpec> mapping;
    std::optional<PresicMappingSpec> presic;
    FixSet fix;
    SamplingPlan plan;

    enum class TaskKind { certify, solve, atlas } task = TaskKind::certify;
    CertifyTask certify_task;
    SolveTask solve_task;
};

// Throws ConfigError with "<path>:<line>: message" diagnostics.
ProblemConfig load_config(const std::filesystem::path& path);
ProblemConfig parse_config(const std::string& text, const std::string& name = "<config>");

}  // namespace efp
