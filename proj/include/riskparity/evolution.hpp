#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "riskparity/risk.hpp"
#include "riskparity/rng.hpp"
#include "riskparity/types.hpp"

namespace riskparity {

// Genetic algorithm parameters. The defaults are the reference configuration
// used throughout the test suite.
struct GaConfig {
  int population_size = 200;  // generation 0 only; later generations hold
                              // n_elite + n_random + n_mutants + n_crossover
  int max_iterations = 300;
  int n_elite = 10;
  int n_random = 50;
  int n_mutants = 100;
  int n_crossover = 100;
  double mutation_fraction_cap = 0.15;  // max fraction of genes mutated
  Bounds bounds;
  FitnessKind fitness_kind = FitnessKind::marginal;
  std::uint64_t seed = 1;

  void validate() const;
};

// One candidate portfolio. Weights are always repaired (fully invested and
// inside the bounds); candidates whose repair failed keep their raw weights
// and carry fitness = +infinity so that selection never picks them.
struct Member {
  Eigen::VectorXd weights;
  double fitness = 0.0;
};

struct Population {
  std::vector<Member> members;
  int generation = 0;
};

struct GenerationStats {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;  // over members with finite fitness
};

struct GaResult {
  Eigen::VectorXd best;
  double best_fitness = 0.0;
  std::vector<GenerationStats> trajectory;  // generations 1..max_iterations
};

// Uniform draw per gene inside the box. Not repaired.
Eigen::VectorXd random_chromosome(const Bounds& bounds, Rng& rng);

// Repairs raw weights and evaluates fitness (+infinity sentinel on failure).
Member make_member(const Eigen::VectorXd& raw, const CovarianceMatrix& cov,
                   const Bounds& bounds, FitnessKind kind);

// Draws a feasible portfolio by rejection: random chromosome, then repair.
// Throws infeasible_error when max_attempts draws all fail to repair.
Eigen::VectorXd random_feasible_portfolio(const Bounds& bounds, Rng& rng,
                                          int max_attempts = 1000);

// Number of genes a mutation touches: ceil(u * length), at least one.
int mutation_count(double u, int length);

// Mutation before repair: draws the mutated fraction u uniformly from
// (0, fraction_cap], picks mutation_count(u, n) distinct positions, and
// redraws each selected gene uniformly inside its bounds.
Eigen::VectorXd mutate_genes(const Eigen::VectorXd& parent,
                             const Bounds& bounds, double fraction_cap,
                             Rng& rng);

// Convex blend alpha * p1 + (1 - alpha) * p2.
Eigen::VectorXd blend(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
                      double alpha);

// Intermediate crossover before repair: blend with alpha drawn uniformly
// from [0, 1).
Eigen::VectorXd crossover_genes(const Eigen::VectorXd& p1,
                                const Eigen::VectorXd& p2, Rng& rng);

// Indices of the n_elite lowest-fitness members; ties resolve to the earlier
// index, so selection is deterministic.
std::vector<int> elitist_indices(const Population& pop, int n_elite);
std::vector<Member> elitist_select(const Population& pop, int n_elite);

Population init_population(const CovarianceMatrix& cov, const GaConfig& cfg,
                           Rng& rng);

// One generation step. Draws in a fixed order so runs are reproducible:
// fresh randoms first, then per mutant (parent index, fraction u, positions,
// new gene values), then per crossover (parent index, parent index, alpha).
// Parents are drawn uniformly with replacement from the previous generation,
// including members carrying the +infinity sentinel.
Population evolve_generation(const Population& pop, const CovarianceMatrix& cov,
                             const GaConfig& cfg, Rng& rng);

// Full run: initial population plus max_iterations evolution steps. Returns
// the best member ever seen (which trajectory stats also never lose, since
// elites carry over unchanged). Throws infeasible_error when no candidate
// ever repaired successfully.
GaResult run_ga(const CovarianceMatrix& cov, const GaConfig& cfg);

}  // namespace riskparity
