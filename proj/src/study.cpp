#include "riskparity/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "riskparity/data_io.hpp"
#include "riskparity/rng.hpp"

namespace riskparity {

namespace {

int resolve_threads(int requested, int jobs) {
  int t = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  return std::min(t, jobs);
}

// Runs fn(job) for job = 0..jobs-1 on a pool of workers. Each job writes only
// into its own output slot, so the schedule cannot change results. The first
// failing job (by index) is reported.
template <typename Fn>
void parallel_for(int jobs, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int job = next.fetch_add(1); job < jobs; job = next.fetch_add(1)) {
      try {
        fn(job);
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };
  const int n_threads = resolve_threads(threads, jobs);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (int job = 0; job < jobs; ++job) {
    if (errors[job]) std::rethrow_exception(errors[job]);
  }
}

// Regularized incomplete beta via Lentz's continued fraction.
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 3e-16) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double sample_mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
  double sum = 0.0;
  for (double x : v) sum += (x - mean) * (x - mean);
  return sum / static_cast<double>(v.size() - 1);
}

}  // namespace

double quantile(const std::vector<double>& sorted_sample, double q) {
  if (sorted_sample.empty()) {
    throw std::invalid_argument("quantile of an empty sample");
  }
  if (q < 0.0 || q > 1.0) {
    throw std::invalid_argument("quantile level must lie in [0, 1]");
  }
  const std::size_t m = sorted_sample.size();
  const double pos = (static_cast<double>(m) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= m) return sorted_sample.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted_sample[lo] + frac * (sorted_sample[lo + 1] - sorted_sample[lo]);
}

WelchResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw std::invalid_argument("Welch test needs at least two observations per group");
  }
  WelchResult r;
  r.n_a = static_cast<int>(a.size());
  r.n_b = static_cast<int>(b.size());
  r.mean_a = sample_mean(a);
  r.mean_b = sample_mean(b);
  const double va = sample_variance(a, r.mean_a);
  const double vb = sample_variance(b, r.mean_b);
  if (va == 0.0 && vb == 0.0) {
    throw std::invalid_argument("Welch test is undefined when both groups have zero variance");
  }
  const double sa = va / r.n_a;
  const double sb = vb / r.n_b;
  r.t_statistic = (r.mean_a - r.mean_b) / std::sqrt(sa + sb);
  r.degrees_of_freedom = (sa + sb) * (sa + sb) /
                         (sa * sa / (r.n_a - 1) + sb * sb / (r.n_b - 1));
  const double t2 = r.t_statistic * r.t_statistic;
  r.p_value = reg_inc_beta(r.degrees_of_freedom / 2.0, 0.5,
                           r.degrees_of_freedom / (r.degrees_of_freedom + t2));
  return r;
}

StudyResult run_study(const CovarianceMatrix& cov, const GaConfig& ga_cfg,
                      int runs, std::uint64_t base_seed, int threads) {
  if (runs < 2) {
    throw std::invalid_argument("a study needs at least two runs");
  }
  ga_cfg.validate();
  if (ga_cfg.bounds.size() != cov.size()) {
    throw std::invalid_argument("bounds length does not match covariance size");
  }

  StudyResult result;
  result.runs = runs;
  result.generations = ga_cfg.max_iterations;
  result.best_trajectories.resize(runs, result.generations);
  result.mean_trajectories.resize(runs, result.generations);

  parallel_for(runs, threads, [&](int run) {
    GaConfig cfg = ga_cfg;
    cfg.seed = derive_seed(base_seed, static_cast<std::uint64_t>(run));
    GaResult ga;
    try {
      ga = run_ga(cov, cfg);
    } catch (const std::exception& e) {
      throw infeasible_error("study run " + std::to_string(run) + " (seed " +
                             std::to_string(cfg.seed) + ") failed: " + e.what());
    }
    for (int g = 0; g < result.generations; ++g) {
      result.best_trajectories(run, g) = ga.trajectory[g].best_fitness;
      result.mean_trajectories(run, g) = ga.trajectory[g].mean_fitness;
    }
  });

  auto summarize = [&](const Eigen::MatrixXd& rows, Eigen::VectorXd& q05,
                       Eigen::VectorXd& mean, Eigen::VectorXd& q95) {
    q05.resize(result.generations);
    mean.resize(result.generations);
    q95.resize(result.generations);
    std::vector<double> column(runs);
    for (int g = 0; g < result.generations; ++g) {
      for (int r = 0; r < runs; ++r) column[r] = rows(r, g);
      std::sort(column.begin(), column.end());
      q05[g] = quantile(column, 0.05);
      q95[g] = quantile(column, 0.95);
      mean[g] = sample_mean(column);
    }
  };
  summarize(result.best_trajectories, result.q05_best, result.mean_best,
            result.q95_best);
  summarize(result.mean_trajectories, result.q05_mean, result.mean_mean,
            result.q95_mean);
  return result;
}

CompareResult compare_methods(const CovarianceMatrix& cov,
                              const GaConfig& ga_cfg, const LsConfig& ls_cfg,
                              int runs, std::uint64_t base_seed, int threads) {
  if (runs < 2) {
    throw std::invalid_argument("a comparison needs at least two runs");
  }
  ga_cfg.validate();
  ls_cfg.validate();
  if (ga_cfg.bounds.size() != cov.size() || ls_cfg.bounds.size() != cov.size()) {
    throw std::invalid_argument("bounds length does not match covariance size");
  }

  CompareResult result;
  result.ga_steps.resize(runs);
  result.random_steps.resize(runs);
  result.ga_fitness.resize(runs);
  result.random_fitness.resize(runs);
  std::vector<int> agree(runs, 0);

  parallel_for(runs, threads, [&](int run) {
    // Two seeds per repetition: one for evolution, one for the random start.
    GaConfig cfg = ga_cfg;
    cfg.seed = derive_seed(base_seed, 2 * static_cast<std::uint64_t>(run));
    const GaResult ga = run_ga(cov, cfg);
    const LsResult refined = run_local_search(ga.best, cov, ls_cfg);

    Rng rng(derive_seed(base_seed, 2 * static_cast<std::uint64_t>(run) + 1));
    const Eigen::VectorXd start = random_feasible_portfolio(ls_cfg.bounds, rng);
    const LsResult random = run_local_search(start, cov, ls_cfg);

    auto total_steps = [](const LsResult& r) {
      int sum = 0;
      for (int s : r.steps_per_phase) sum += s;
      return sum;
    };
    result.ga_steps[run] = total_steps(refined);
    result.random_steps[run] = total_steps(random);
    result.ga_fitness[run] = refined.fitness;
    result.random_fitness[run] = random.fitness;
    agree[run] =
        (refined.portfolio - random.portfolio).cwiseAbs().maxCoeff() <= 1e-3;
  });

  result.agree_runs = 0;
  for (int a : agree) result.agree_runs += a;
  const std::vector<double> ga_counts(result.ga_steps.begin(),
                                      result.ga_steps.end());
  const std::vector<double> random_counts(result.random_steps.begin(),
                                          result.random_steps.end());
  result.welch = welch_t_test(ga_counts, random_counts);
  return result;
}

void write_study_csv(const std::string& path, const StudyResult& result,
                     const std::string& manifest_comment) {
  std::string out;
  if (!manifest_comment.empty()) {
    out += "# manifest: " + manifest_comment + "\n";
  }
  out += "generation,q05_best,mean_best,q95_best,q05_mean,mean_mean,q95_mean\n";
  for (int g = 0; g < result.generations; ++g) {
    out += std::to_string(g + 1);
    for (const Eigen::VectorXd* col :
         {&result.q05_best, &result.mean_best, &result.q95_best,
          &result.q05_mean, &result.mean_mean, &result.q95_mean}) {
      out += "," + format_double((*col)[g]);
    }
    out += "\n";
  }
  write_text_file(path, out);
}

}  // namespace riskparity
