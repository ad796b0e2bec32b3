// Command-line front end: certify / solve / atlas / bench / verify.
// Exit codes: 0 pass or converged, 2 certificate failure or divergence
// (report still emitted), 1 config or usage error.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "efp/bench.hpp"
#include "efp/config.hpp"

namespace fs = std::filesystem;
using namespace efp;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> samples;
    std::optional<double> lambda;
    std::string suite;
};

ProblemConfig load_with_overrides(const Options& opt) {
    ProblemConfig cfg = load_config(opt.config_path);
    if (opt.seed) cfg.plan.seed = *opt.seed;
    if (opt.samples) cfg.plan.count = *opt.samples;
    if (opt.lambda) {
        cfg.solve_task.lambda = *opt.lambda;
        cfg.solve_task.cfg.lambda_override = *opt.lambda;
    }
    return cfg;
}

void emit(const Options& opt, const std::string& name, const std::string& body) {
    fs::create_directories(opt.out_dir);
    const fs::path p = fs::path(opt.out_dir) / name;
    write_report_file(p.string(), body);
    std::printf("wrote %s\n", p.string().c_str());
}

Certificate run_certify_task(const ProblemConfig& cfg, const CertifyTask& task) {
    if (cfg.presic) {
        return certify_presic(*cfg.presic, task.consts, cfg.space, cfg.plan);
    }
    if (!cfg.mapping) throw ConfigError("config: certify needs a mapping block");
    if (task.optimize) {
        const auto& grid = task.b_grid.empty() ? default_b_grid() : task.b_grid;
        return optimize_banach_certificate(*cfg.mapping, cfg.space, grid, cfg.plan);
    }
    const FixSet* fix = cfg.fix.empty() ? nullptr : &cfg.fix;
    return certify(task.cls, *cfg.mapping, task.consts, cfg.space, cfg.plan, fix);
}

int cmd_certify(const Options& opt) {
    const ProblemConfig cfg = load_with_overrides(opt);
    const Certificate cert = run_certify_task(cfg, cfg.certify_task);
    emit(opt, "certificate.txt", certificate_to_text(cert));
    std::printf("certify %s: %s (min margin %.6g at %lld samples)\n",
                class_name(cert.cls), cert.pass ? "pass" : "FAIL", cert.min_margin,
                static_cast<long long>(cert.sample_count));
    return cert.pass ? 0 : 2;
}

int cmd_solve(const Options& opt) {
    const ProblemConfig cfg = load_with_overrides(opt);
    const SolveTask& task = cfg.solve_task;
    SolveReport rep;

    switch (task.method) {
        case SolveTask::Method::krasnoselskij: {
            if (!cfg.mapping) throw ConfigError("config: solve needs a mapping block");
            if (task.certificate) {
                const Certificate cert = run_certify_task(cfg, *task.certificate);
                if (!cert.pass) {
                    emit(opt, "certificate.txt", certificate_to_text(cert));
                    std::printf("solve: certificate failed, no iteration run\n");
                    return 2;
                }
                emit(opt, "certificate.txt", certificate_to_text(cert));
                rep = solve_with_certificate(cert, *cfg.mapping, task.x0, task.cfg, cfg.space);
            } else {
                if (!task.lambda) throw ConfigError("config: solve needs lambda or a certificate");
                rep = krasnoselskij_solve(*cfg.mapping, *task.lambda, task.x0, task.cfg,
                                          cfg.space.norm);
            }
            break;
        }
        case SolveTask::Method::convex_metric: {
            if (!cfg.mapping) throw ConfigError("config: solve needs a mapping block");
            if (!task.lambda) throw ConfigError("config: convex-metric solve needs lambda");
            std::optional<Certificate> cert;
            if (task.certificate) {
                cert = run_certify_task(cfg, *task.certificate);
                emit(opt, "certificate.txt", certificate_to_text(*cert));
                if (!cert->pass) {
                    std::printf("solve: certificate failed, no iteration run\n");
                    return 2;
                }
            }
            rep = convex_metric_solve(*cfg.mapping, cfg.space.convex, cfg.space.metric,
                                      *task.lambda, task.x0, task.cfg,
                                      cert ? &*cert : nullptr);
            break;
        }
        case SolveTask::Method::maia: {
            if (!cfg.mapping) throw ConfigError("config: solve needs a mapping block");
            if (!task.certificate) throw ConfigError("config: this scheme needs a certificate block");
            const Certificate cert = run_certify_task(cfg, *task.certificate);
            emit(opt, "certificate.txt", certificate_to_text(cert));
            if (!cert.pass) {
                std::printf("solve: certificate failed, no iteration run\n");
                return 2;
            }
            rep = maia_solve(cert, *cfg.mapping, task.x0, task.cfg, cfg.space, cfg.plan);
            break;
        }
        case SolveTask::Method::cyclic: {
            if (!cfg.mapping) throw ConfigError("config: solve needs a mapping block");
            if (!task.phi || !task.b) throw ConfigError("config: cyclic solve needs phi and b");
            const auto ccert = default_c_certificate(*task.phi);
            if (!ccert) throw ConfigError("config: no series certificate for this phi");
            const CheckReport proof = check_c_comparison(*task.phi, *ccert);
            rep = cyclic_solve(*cfg.mapping, cfg.space.region, *task.phi, *ccert, proof,
                               *task.b, task.x0, task.cfg, cfg.space, cfg.plan);
            break;
        }
        case SolveTask::Method::presic: {
            if (!cfg.presic) throw ConfigError("config: this scheme needs a presic block");
            if (!task.certificate) throw ConfigError("config: this scheme needs a certificate block");
            const Certificate cert = run_certify_task(cfg, *task.certificate);
            emit(opt, "certificate.txt", certificate_to_text(cert));
            if (!cert.pass) {
                std::printf("solve: certificate failed, no iteration run\n");
                return 2;
            }
            const PresicWeights w = task.presic_weights.empty()
                                        ? derive_presic_weights(cert, cfg.presic->arity)
                                        : PresicWeights::make(task.presic_weights);
            std::vector<Vec> init = task.init;
            if (init.empty()) init.push_back(task.x0);
            rep = presic_solve(*cfg.presic, cert, w, init, task.cfg, cfg.space.norm,
                               task.presic_method);
            break;
        }
    }

    emit(opt, "solve.txt", solve_report_to_text(rep));
    emit(opt, "trace.csv", trace_to_csv(rep.trace));
    std::printf("solve: %s after %lld iterations (lambda %.6g, residual %.3g)\n",
                rep.converged ? "converged" : "did not converge",
                static_cast<long long>(rep.iterations), rep.lambda, rep.final_residual);
    return rep.converged ? 0 : 2;
}

int cmd_atlas(const Options& opt) {
    const ProblemConfig cfg = load_with_overrides(opt);
    if (!cfg.mapping) throw ConfigError("config: atlas needs a mapping block");
    const FixSet* fix = cfg.fix.empty() ? nullptr : &cfg.fix;
    const MembershipReport rep = classify(*cfg.mapping, cfg.space, cfg.plan, fix);
    emit(opt, "membership.txt", membership_to_text(rep));
    auto show = [](const char* name, const MembershipEntry& e) {
        const char* v = e.verdict == Verdict::pass ? "pass"
                        : e.verdict == Verdict::fail ? "fail" : "skipped";
        std::printf("  %-4s %s\n", name, v);
    };
    std::printf("membership at %lld samples:\n", static_cast<long long>(rep.sample_count));
    show("ne", rep.ne);
    show("qne", rep.qne);
    show("spc", rep.spc);
    show("dc", rep.dc);
    show("ene", rep.ene);
    return 0;
}

int cmd_bench(const Options& opt) {
    const auto suites = bench_suites();
    if (std::find(suites.begin(), suites.end(), opt.suite) == suites.end()) {
        std::fprintf(stderr, "bench: unknown suite '%s'\n", opt.suite.c_str());
        return 1;
    }
    const std::uint64_t seed = opt.seed.value_or(20240914ull);
    const BenchResult res = run_bench(opt.suite, seed, opt.out_dir);
    std::fputs(res.summary_text().c_str(), stdout);
    return res.all_pass() ? 0 : 2;
}

int cmd_verify(const Options& opt) {
    const ProblemConfig cfg = load_with_overrides(opt);
    if (!cfg.mapping) throw ConfigError("config: verify needs a mapping block");
    const fs::path p = fs::path(opt.out_dir) / "certificate.txt";
    std::ifstream in(p);
    if (!in) throw ConfigError("verify: cannot read " + p.string());
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const Certificate cert = certificate_from_text(strip_generated_header(body));
    const CheckReport rep = verify_certificate(cert, *cfg.mapping, cfg.space);
    std::printf("verify %s: %s (%s)\n", class_name(cert.cls), rep.pass ? "pass" : "FAIL",
                rep.detail.c_str());
    return rep.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fixed-point certification and averaged-iteration toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", opt.config_path, "problem config file");
        if (needs_config) c->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "sampling seed override");
        sub->add_option("--samples", opt.samples, "sample count override");
    };

    auto* certify_cmd = app.add_subcommand("certify", "sample a contraction-class certificate");
    add_common(certify_cmd, true);
    auto* solve_cmd = app.add_subcommand("solve", "run an averaged iteration");
    add_common(solve_cmd, true);
    solve_cmd->add_option("--lambda", opt.lambda, "iteration weight override");
    auto* atlas_cmd = app.add_subcommand("atlas", "class membership survey");
    add_common(atlas_cmd, true);
    auto* bench_cmd = app.add_subcommand("bench", "built-in example batteries");
    bench_cmd->add_option("--suite", opt.suite, "suite id")->required();
    bench_cmd->add_option("--out", opt.out_dir, "output directory");
    bench_cmd->add_option("--seed", opt.seed, "seed override");
    auto* verify_cmd = app.add_subcommand("verify", "re-check a stored certificate, no re-sampling");
    add_common(verify_cmd, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(certify_cmd)) return cmd_certify(opt);
        if (app.got_subcommand(solve_cmd)) return cmd_solve(opt);
        if (app.got_subcommand(atlas_cmd)) return cmd_atlas(opt);
        if (app.got_subcommand(bench_cmd)) return cmd_bench(opt);
        if (app.got_subcommand(verify_cmd)) return cmd_verify(opt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
