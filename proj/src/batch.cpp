#include "graspguard/batch.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>

namespace graspguard {

namespace {

RunResult run_one(const RunJob& job) {
  RunResult r;
  r.variant = job.variant;
  r.trace = run_scenario(job.scenario, job.variant);
  r.metrics = metrics(r.trace, job.variant);
  return r;
}

}  // namespace

std::vector<RunResult> run_jobs_serial(const std::vector<RunJob>& jobs) {
  std::vector<RunResult> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) out.push_back(run_one(job));
  return out;
}

std::vector<RunResult> run_jobs_parallel(const std::vector<RunJob>& jobs, int max_threads) {
  const int threads = max_threads > 0 ? max_threads : thread_cap();
  std::vector<RunResult> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  const auto n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_one(jobs[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<RunJob> jobs_for(const Scenario& scenario, const std::vector<FilterVariant>& filters) {
  std::vector<RunJob> jobs;
  for (FilterVariant v : filters.empty() ? scenario.filters : filters) jobs.push_back({scenario, v});
  return jobs;
}

int thread_cap() {
  if (const char* env = std::getenv("GRASPGUARD_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace graspguard
