#pragma once

#include <vector>

#include "graspguard/sim_harness.hpp"

namespace graspguard {

struct RunJob {
  Scenario scenario;
  FilterVariant variant = FilterVariant::cbf;
};

struct RunResult {
  FilterVariant variant = FilterVariant::cbf;
  Trace trace;
  FilterMetrics metrics;
};

/// One job after another; the reference the parallel path is tested against.
std::vector<RunResult> run_jobs_serial(const std::vector<RunJob>& jobs);

/// Jobs spread over OpenMP threads, results in job order. max_threads <= 0
/// uses thread_cap(). The first exception raised by any job is rethrown.
std::vector<RunResult> run_jobs_parallel(const std::vector<RunJob>& jobs, int max_threads = 0);

/// One job per filter listed in the scenario (or in `filters` when non-empty).
std::vector<RunJob> jobs_for(const Scenario& scenario, const std::vector<FilterVariant>& filters = {});

/// GRASPGUARD_THREADS if set to a positive integer, else the OpenMP default.
int thread_cap();

}  // namespace graspguard
