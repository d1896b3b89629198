#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pathatlas/io.hpp"

namespace pathatlas {

enum class Status { pass, fail, indeterminate };

std::string to_string(Status s);

/// One line of a report.
struct Check {
    std::string name;
    /// Stable identifier of the property under test, e.g. "regulated.concat.isometry".
    std::string anchor;
    Status status = Status::pass;
    double measured = 0.0;
    double bound = 0.0;
    double runtime_ms = 0.0;
    /// Free-form detail, emitted only when non-empty.
    std::string note;
};

/// Report line as JSON; runtime is left out when `with_runtime` is false.
Json encode(const Check& c, bool with_runtime = true);

/// Report lines joined by newlines, each line terminated.
std::string render_report(const std::vector<Check>& checks, bool with_runtime = true);

struct SuiteOptions {
    std::uint64_t seed = 1;
    /// Number of cases; 0 selects the suite default.
    std::size_t count = 0;
    /// Overrides the suite tolerance where one applies.
    std::optional<double> tol;
    /// Worker threads; 0 reads PATHATLAS_WORKERS and falls back to the hardware concurrency.
    std::size_t workers = 0;
};

/// Result of a single case before bookkeeping fields are filled in.
struct CaseResult {
    Status status = Status::pass;
    double measured = 0.0;
    double bound = 0.0;
    std::string note;
};

struct Suite {
    std::string name;
    std::string anchor;
    std::size_t default_count = 1;
    /// Runs case `index` with a generator seeded from (seed, index) only.
    std::function<CaseResult(std::size_t index, std::mt19937_64& rng, const SuiteOptions& options)> run_case;
};

/// Registered suites in a fixed order.
const std::vector<Suite>& suites();
const Suite* find_suite(const std::string& name);

/// Effective worker count for `requested`, capped by PATHATLAS_WORKERS when set.
std::size_t worker_count(std::size_t requested);

/// Runs every case of a suite, possibly in parallel; checks come back ordered by case index.
/// A case that throws is reported as a failure carrying the exception message.
std::vector<Check> run_suite(const Suite& suite, const SuiteOptions& options);

/// Seed of case `index` in a run seeded with `seed`.
std::uint64_t case_seed(std::uint64_t seed, std::size_t index);

}  // namespace pathatlas
