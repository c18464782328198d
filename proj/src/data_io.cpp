#include "riskparity/data_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

namespace riskparity {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Strict double parse: the whole field must be consumed.
bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + text.size() && std::isfinite(out);
}

// Reads all lines, dropping '#' comments, blank lines and trailing '\r'.
std::vector<std::string> read_csv_lines(const std::string& path,
                                        const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw io_error(std::string("cannot open ") + what + " file '" + path + "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

ReturnKind return_kind_from_string(const std::string& text) {
  if (text == "simple") return ReturnKind::simple;
  if (text == "log") return ReturnKind::log;
  throw std::invalid_argument("unknown return kind '" + text +
                              "' (expected 'simple' or 'log')");
}

const char* to_string(ReturnKind kind) {
  return kind == ReturnKind::simple ? "simple" : "log";
}

PriceTable load_prices_csv(const std::string& path) {
  const auto lines = read_csv_lines(path, "prices");
  if (lines.empty()) {
    throw io_error("prices file '" + path + "' has no header row");
  }
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "date") {
    throw io_error("prices file '" + path +
                   "' must start with a 'date,TICKER,...' header");
  }

  PriceTable table;
  table.universe.tickers.assign(header.begin() + 1, header.end());
  try {
    table.universe.validate();
  } catch (const std::invalid_argument& e) {
    throw io_error("prices file '" + path + "': " + e.what());
  }
  const int n = table.universe.size();

  std::vector<std::string> dates;
  std::vector<Eigen::VectorXd> rows;
  std::string prev_date;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_csv_line(lines[li]);
    if (static_cast<int>(fields.size()) != n + 1) {
      throw io_error("prices file '" + path + "': row '" + lines[li] +
                     "' has " + std::to_string(fields.size()) +
                     " fields, expected " + std::to_string(n + 1));
    }
    const std::string& date = fields[0];
    if (!prev_date.empty()) {
      if (date == prev_date) {
        throw io_error("prices file '" + path + "': duplicate date '" + date + "'");
      }
      if (date < prev_date) {
        throw io_error("prices file '" + path + "': dates out of order at '" +
                       date + "'");
      }
    }
    prev_date = date;

    Eigen::VectorXd row(n);
    bool usable = true;
    for (int j = 0; j < n && usable; ++j) {
      double v = 0.0;
      usable = parse_double(fields[j + 1], v) && v > 0.0;
      row[j] = v;
    }
    if (!usable) {
      ++table.dropped_rows;  // missing or non-positive price
      continue;
    }
    dates.push_back(date);
    rows.push_back(std::move(row));
  }

  if (rows.size() < 3) {
    throw io_error("prices file '" + path + "' has fewer than 3 usable rows (" +
                   std::to_string(rows.size()) + " after dropping " +
                   std::to_string(table.dropped_rows) + ")");
  }
  table.dates = std::move(dates);
  table.prices.resize(static_cast<int>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    table.prices.row(static_cast<int>(r)) = rows[r];
  }
  return table;
}

ReturnsMatrix compute_returns(const PriceTable& table, ReturnKind kind) {
  const int rows = static_cast<int>(table.prices.rows());
  const int n = static_cast<int>(table.prices.cols());
  if (rows < 2) {
    throw std::invalid_argument("need at least two price rows to form returns");
  }
  ReturnsMatrix result;
  result.returns.resize(rows - 1, n);
  for (int t = 1; t < rows; ++t) {
    for (int j = 0; j < n; ++j) {
      const double ratio = table.prices(t, j) / table.prices(t - 1, j);
      result.returns(t - 1, j) =
          kind == ReturnKind::simple ? ratio - 1.0 : std::log(ratio);
    }
  }
  return result;
}

CovarianceMatrix sample_covariance(const ReturnsMatrix& returns,
                                   const AssetUniverse& universe) {
  const int rows = static_cast<int>(returns.returns.rows());
  const int n = static_cast<int>(returns.returns.cols());
  if (n != universe.size()) {
    throw std::invalid_argument("returns width does not match the asset universe");
  }
  if (rows < 2) {
    throw std::invalid_argument("need at least two return rows for a sample covariance");
  }
  const Eigen::MatrixXd& r = returns.returns;
  const Eigen::RowVectorXd means = r.colwise().mean();

  Eigen::MatrixXd cov(n, n);
  // Fill the upper triangle and mirror it, so C(i,j) == C(j,i) exactly.
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double sum = 0.0;
      for (int t = 0; t < rows; ++t) {
        sum += (r(t, i) - means[i]) * (r(t, j) - means[j]);
      }
      cov(i, j) = sum / (rows - 1);
      cov(j, i) = cov(i, j);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (cov(i, i) <= 0.0) {
      throw io_error("zero-variance asset '" + universe.tickers[i] +
                     "': covariance would be singular");
    }
  }
  try {
    return CovarianceMatrix(std::move(cov));
  } catch (const std::invalid_argument& e) {
    throw io_error(std::string("sample covariance is not usable: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_covariance_csv(const std::string& path,
                         const AssetUniverse& universe,
                         const CovarianceMatrix& cov,
                         const std::string& manifest_comment) {
  if (universe.size() != cov.size()) {
    throw std::invalid_argument("universe and covariance sizes disagree");
  }
  std::string out;
  if (!manifest_comment.empty()) {
    out += "# manifest: " + manifest_comment + "\n";
  }
  for (const auto& t : universe.tickers) out += "," + t;
  out += "\n";
  for (int i = 0; i < cov.size(); ++i) {
    out += universe.tickers[i];
    for (int j = 0; j < cov.size(); ++j) out += "," + format_double(cov(i, j));
    out += "\n";
  }
  write_text_file(path, out);
}

LabeledCovariance load_covariance_csv(const std::string& path) {
  const auto lines = read_csv_lines(path, "covariance");
  if (lines.empty()) {
    throw io_error("covariance file '" + path + "' has no header row");
  }
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2) {
    throw io_error("covariance file '" + path + "' header names no tickers");
  }
  AssetUniverse universe;
  universe.tickers.assign(header.begin() + 1, header.end());
  try {
    universe.validate();
  } catch (const std::invalid_argument& e) {
    throw io_error("covariance file '" + path + "': " + e.what());
  }
  const int n = universe.size();
  if (static_cast<int>(lines.size()) != n + 1) {
    throw io_error("covariance file '" + path + "' has " +
                   std::to_string(lines.size() - 1) + " data rows, expected " +
                   std::to_string(n));
  }

  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    const auto fields = split_csv_line(lines[i + 1]);
    if (static_cast<int>(fields.size()) != n + 1) {
      throw io_error("covariance file '" + path + "': row " +
                     std::to_string(i + 1) + " has " +
                     std::to_string(fields.size()) + " fields, expected " +
                     std::to_string(n + 1));
    }
    if (fields[0] != universe.tickers[i]) {
      throw io_error("covariance file '" + path + "': row label '" + fields[0] +
                     "' does not match column ticker '" + universe.tickers[i] +
                     "'");
    }
    for (int j = 0; j < n; ++j) {
      if (!parse_double(fields[j + 1], m(i, j))) {
        throw io_error("covariance file '" + path + "': cannot parse entry '" +
                       fields[j + 1] + "' in row '" + universe.tickers[i] + "'");
      }
    }
  }

  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9) {
    throw io_error("covariance file '" + path + "' is asymmetric by " +
                   format_double(asym) + " (limit 1e-9)");
  }
  m = ((m + m.transpose()) / 2.0).eval();
  try {
    return LabeledCovariance{std::move(universe),
                             CovarianceMatrix(std::move(m))};
  } catch (const std::invalid_argument& e) {
    throw io_error("covariance file '" + path + "': " + e.what());
  }
}

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("cannot open file '" + path + "' for digesting");
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a 64-bit
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw io_error("cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw io_error("failed writing to '" + path + "'");
  }
}

nlohmann::json portfolio_report(const AssetUniverse& universe,
                                const Eigen::VectorXd& weights,
                                const CovarianceMatrix& cov,
                                const nlohmann::json& config) {
  if (weights.size() != cov.size() || universe.size() != cov.size()) {
    throw std::invalid_argument("universe, weights and covariance sizes disagree");
  }
  const RiskReport r = risk_report(weights, cov);
  auto to_vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  return nlohmann::json{{"tickers", universe.tickers},
                        {"weights", to_vec(weights)},
                        {"sigma", r.sigma},
                        {"rc_marginal", to_vec(r.marginal)},
                        {"rc_total", to_vec(r.total)},
                        {"rc_normalized", to_vec(r.normalized)},
                        {"fitness_marginal", r.fitness_marginal},
                        {"fitness_total", r.fitness_total},
                        {"config", config}};
}

}  // namespace riskparity
