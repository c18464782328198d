#pragma once

#include <Eigen/Dense>

#include <json.hpp>

#include <string>

#include "riskparity/risk.hpp"
#include "riskparity/types.hpp"

namespace riskparity {

// Price history in file order: one row per date, one column per ticker.
struct PriceTable {
  std::vector<std::string> dates;
  AssetUniverse universe;
  Eigen::MatrixXd prices;   // rows align with dates
  int dropped_rows = 0;     // rows removed for missing or non-positive prices
};

enum class ReturnKind { simple, log };

ReturnKind return_kind_from_string(const std::string& text);
const char* to_string(ReturnKind kind);

struct ReturnsMatrix {
  Eigen::MatrixXd returns;  // one row per period, one column per asset
};

struct LabeledCovariance {
  AssetUniverse universe;
  CovarianceMatrix cov;
};

// Loads a CSV with header `date,TICKER,...`. Lines starting with '#' are
// skipped. Rows with an empty, unparsable, or non-positive price cell are
// dropped and counted; structural problems (wrong column count, duplicate
// tickers or dates, dates out of order, fewer than 3 usable rows) raise
// io_error naming the cause.
PriceTable load_prices_csv(const std::string& path);

// Period returns from consecutive retained rows: simple P_t/P_{t-1} - 1 or
// log ln(P_t/P_{t-1}).
ReturnsMatrix compute_returns(const PriceTable& table,
                              ReturnKind kind = ReturnKind::simple);

// Sample covariance with divisor rows - 1. The upper triangle is computed
// and mirrored, so the result is symmetric to the last bit. Zero-variance
// assets are rejected (io_error naming the ticker) because downstream
// solvers need a strictly positive diagonal.
CovarianceMatrix sample_covariance(const ReturnsMatrix& returns,
                                   const AssetUniverse& universe);

// 17 significant digits, enough for doubles to round-trip through text.
std::string format_double(double v);

// Writes a covariance CSV: optional manifest comment line(s), a header
// `,T1,T2,...`, then one labeled row per asset with format_double entries.
void save_covariance_csv(const std::string& path,
                         const AssetUniverse& universe,
                         const CovarianceMatrix& cov,
                         const std::string& manifest_comment = "");

// Reads the format written by save_covariance_csv. '#' lines are skipped.
// Row labels must match the header; asymmetry up to 1e-9 (absolute) is
// repaired by averaging with the transpose, anything larger is rejected.
LabeledCovariance load_covariance_csv(const std::string& path);

// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters. Used to pin
// input files inside run manifests.
std::string digest_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

// Portfolio report with the run configuration embedded, ready for
// serialization:
//   {tickers, weights, sigma, rc_marginal, rc_total, rc_normalized,
//    fitness_marginal, fitness_total, config}
nlohmann::json portfolio_report(const AssetUniverse& universe,
                                const Eigen::VectorXd& weights,
                                const CovarianceMatrix& cov,
                                const nlohmann::json& config);

}  // namespace riskparity
