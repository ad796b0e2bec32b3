// Built-in example batteries runnable from the CLI; every case is seeded and
// its emitted reports are byte-stable.
#pragma once

#include <filesystem>

#include "efp/report.hpp"

namespace efp {

struct BenchCase {
    std::string name;
    bool pass = false;
    std::int64_t iterations = -1;
    double worst_bound_slack = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

struct BenchResult {
    std::string suite;
    std::vector<BenchCase> cases;
    bool all_pass() const;
    std::string summary_text() const;  // deterministic body
};

// suites: "paper-examples", "bounds", "atlas"
std::vector<std::string> bench_suites();

// Runs the suite; when out_dir is non-empty, writes per-case reports and a
// summary file into it.
BenchResult run_bench(const std::string& suite, std::uint64_t seed,
                      const std::filesystem::path& out_dir = {});

}  // namespace efp
