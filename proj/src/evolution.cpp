#include "riskparity/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace riskparity {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void GaConfig::validate() const {
  bounds.validate();
  if (population_size < 1) {
    throw std::invalid_argument("population_size must be at least 1");
  }
  if (max_iterations < 0) {
    throw std::invalid_argument("max_iterations must be non-negative");
  }
  if (n_elite < 1 || n_elite > population_size) {
    throw std::invalid_argument("n_elite must lie in [1, population_size]");
  }
  if (n_random < 0 || n_mutants < 0 || n_crossover < 0) {
    throw std::invalid_argument("operator counts must be non-negative");
  }
  if (!(mutation_fraction_cap > 0.0) || mutation_fraction_cap > 1.0) {
    throw std::invalid_argument("mutation_fraction_cap must lie in (0, 1]");
  }
}

Eigen::VectorXd random_chromosome(const Bounds& bounds, Rng& rng) {
  const int n = bounds.size();
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = uniform_range(rng, bounds.lower[i], bounds.upper[i]);
  }
  return w;
}

Member make_member(const Eigen::VectorXd& raw, const CovarianceMatrix& cov,
                   const Bounds& bounds, FitnessKind kind) {
  if (auto repaired = repair_normalize(raw, bounds)) {
    return Member{*repaired, fitness_or_infinity(*repaired, cov, kind)};
  }
  return Member{raw, kInf};
}

Eigen::VectorXd random_feasible_portfolio(const Bounds& bounds, Rng& rng,
                                          int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    if (auto repaired = repair_normalize(random_chromosome(bounds, rng), bounds)) {
      return *repaired;
    }
  }
  throw infeasible_error("no random draw could be repaired into the feasible set");
}

int mutation_count(double u, int length) {
  return static_cast<int>(std::ceil(u * length));
}

Eigen::VectorXd mutate_genes(const Eigen::VectorXd& parent,
                             const Bounds& bounds, double fraction_cap,
                             Rng& rng) {
  const int n = static_cast<int>(parent.size());
  // 1 - uniform_unit is in (0, 1], so u lands in (0, fraction_cap] and at
  // least one gene always mutates.
  const double u = fraction_cap * (1.0 - uniform_unit(rng));
  const int k = mutation_count(u, n);

  // Partial Fisher-Yates: the first k slots end up holding k distinct indices.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int t = 0; t < k; ++t) {
    const auto j = t + static_cast<int>(uniform_below(rng, n - t));
    std::swap(idx[t], idx[j]);
  }

  Eigen::VectorXd child = parent;
  for (int t = 0; t < k; ++t) {
    const int i = idx[t];
    child[i] = uniform_range(rng, bounds.lower[i], bounds.upper[i]);
  }
  return child;
}

Eigen::VectorXd blend(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
                      double alpha) {
  return alpha * p1 + (1.0 - alpha) * p2;
}

Eigen::VectorXd crossover_genes(const Eigen::VectorXd& p1,
                                const Eigen::VectorXd& p2, Rng& rng) {
  return blend(p1, p2, uniform_unit(rng));
}

std::vector<int> elitist_indices(const Population& pop, int n_elite) {
  const int n = static_cast<int>(pop.members.size());
  if (n_elite < 0 || n_elite > n) {
    throw std::invalid_argument("n_elite exceeds population size");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // stable_sort on fitness alone leaves equal-fitness members in index order.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pop.members[a].fitness < pop.members[b].fitness;
  });
  order.resize(n_elite);
  return order;
}

std::vector<Member> elitist_select(const Population& pop, int n_elite) {
  std::vector<Member> elites;
  elites.reserve(n_elite);
  for (int i : elitist_indices(pop, n_elite)) elites.push_back(pop.members[i]);
  return elites;
}

Population init_population(const CovarianceMatrix& cov, const GaConfig& cfg,
                           Rng& rng) {
  cfg.validate();
  if (cfg.bounds.size() != cov.size()) {
    throw std::invalid_argument("bounds length does not match covariance size");
  }
  Population pop;
  pop.generation = 0;
  pop.members.reserve(cfg.population_size);
  for (int i = 0; i < cfg.population_size; ++i) {
    pop.members.push_back(
        make_member(random_chromosome(cfg.bounds, rng), cov, cfg.bounds,
                    cfg.fitness_kind));
  }
  return pop;
}

Population evolve_generation(const Population& pop, const CovarianceMatrix& cov,
                             const GaConfig& cfg, Rng& rng) {
  const auto& parents = pop.members;
  const std::size_t n_parents = parents.size();

  Population next;
  next.generation = pop.generation + 1;
  next.members.reserve(cfg.n_elite + cfg.n_random + cfg.n_mutants +
                       cfg.n_crossover);

  // Elites carry over untouched, fitness included.
  for (auto& e : elitist_select(pop, cfg.n_elite)) {
    next.members.push_back(std::move(e));
  }
  for (int i = 0; i < cfg.n_random; ++i) {
    next.members.push_back(
        make_member(random_chromosome(cfg.bounds, rng), cov, cfg.bounds,
                    cfg.fitness_kind));
  }
  for (int i = 0; i < cfg.n_mutants; ++i) {
    const auto& parent = parents[uniform_below(rng, n_parents)];
    next.members.push_back(
        make_member(mutate_genes(parent.weights, cfg.bounds,
                                 cfg.mutation_fraction_cap, rng),
                    cov, cfg.bounds, cfg.fitness_kind));
  }
  for (int i = 0; i < cfg.n_crossover; ++i) {
    const auto& p1 = parents[uniform_below(rng, n_parents)];
    const auto& p2 = parents[uniform_below(rng, n_parents)];
    next.members.push_back(
        make_member(crossover_genes(p1.weights, p2.weights, rng), cov,
                    cfg.bounds, cfg.fitness_kind));
  }
  return next;
}

namespace {

GenerationStats stats_of(const Population& pop) {
  GenerationStats s;
  s.generation = pop.generation;
  s.best_fitness = kInf;
  double sum = 0.0;
  int finite = 0;
  for (const auto& m : pop.members) {
    s.best_fitness = std::min(s.best_fitness, m.fitness);
    if (std::isfinite(m.fitness)) {
      sum += m.fitness;
      ++finite;
    }
  }
  s.mean_fitness = finite > 0 ? sum / finite : kInf;
  return s;
}

}  // namespace

GaResult run_ga(const CovarianceMatrix& cov, const GaConfig& cfg) {
  Rng rng(cfg.seed);
  Population pop = init_population(cov, cfg, rng);

  GaResult result;
  result.best_fitness = kInf;
  auto track_best = [&](const Population& p) {
    for (const auto& m : p.members) {
      if (m.fitness < result.best_fitness) {
        result.best_fitness = m.fitness;
        result.best = m.weights;
      }
    }
  };
  track_best(pop);

  result.trajectory.reserve(cfg.max_iterations);
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    pop = evolve_generation(pop, cov, cfg, rng);
    track_best(pop);
    result.trajectory.push_back(stats_of(pop));
  }

  if (!std::isfinite(result.best_fitness)) {
    throw infeasible_error("evolution produced no feasible portfolio");
  }
  return result;
}

}  // namespace riskparity
