#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "riskparity/evolution.hpp"
#include "riskparity/local_search.hpp"
#include "riskparity/types.hpp"

namespace riskparity {

// Repeated independent optimizer runs plus per-generation summary bands.
struct StudyResult {
  int runs = 0;
  int generations = 0;
  Eigen::MatrixXd best_trajectories;  // runs x generations
  Eigen::MatrixXd mean_trajectories;  // runs x generations
  Eigen::VectorXd q05_best, mean_best, q95_best;
  Eigen::VectorXd q05_mean, mean_mean, q95_mean;
};

struct WelchResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;  // two-sided
  int n_a = 0;
  int n_b = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
};

// Paired comparison of local search started from an evolved champion versus
// from a random feasible portfolio, over `runs` independent repetitions.
struct CompareResult {
  WelchResult welch;                  // on local search step counts
  std::vector<int> ga_steps;          // total steps across phases, per run
  std::vector<int> random_steps;
  std::vector<double> ga_fitness;     // final fitness, per run
  std::vector<double> random_fitness;
  int agree_runs = 0;  // runs whose two final portfolios match within 1e-3
};

// Linear-interpolation quantile of an ascending sample: index (m - 1) * q.
double quantile(const std::vector<double>& sorted_sample, double q);

// Welch's unequal-variance t-test, two-sided p-value via the regularized
// incomplete beta function. Requires at least two observations per group and
// a positive variance in at least one group.
WelchResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b);

// Runs the genetic algorithm `runs` times with per-run seeds derived from
// base_seed and records both trajectory summaries per run. Runs execute on
// up to `threads` workers (0 = hardware default); each run writes only its
// own preallocated row, so results are identical for any thread count. A
// failing run aborts the study with its run index and seed in the message.
StudyResult run_study(const CovarianceMatrix& cov, const GaConfig& ga_cfg,
                      int runs, std::uint64_t base_seed, int threads = 0);

// For each repetition: evolve a champion and refine it with local search,
// and refine a fresh random feasible portfolio with the same local search
// budget; then Welch-test the two step-count samples. Seeds derive from
// base_seed (two per repetition), parallelism as in run_study.
CompareResult compare_methods(const CovarianceMatrix& cov,
                              const GaConfig& ga_cfg, const LsConfig& ls_cfg,
                              int runs, std::uint64_t base_seed,
                              int threads = 0);

// CSV with one row per generation:
// generation,q05_best,mean_best,q95_best,q05_mean,mean_mean,q95_mean
void write_study_csv(const std::string& path, const StudyResult& result,
                     const std::string& manifest_comment = "");

}  // namespace riskparity
