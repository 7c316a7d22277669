#include "dualgp/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dualgp/errors.hpp"
#include "dualgp/rng.hpp"

namespace dualgp {

OutputDomain domain_from_string(const std::string& tag) {
  if (tag == "real") return OutputDomain::Real;
  if (tag == "binary") return OutputDomain::Binary;
  throw ConfigError("unknown output domain '" + tag +
                    "' (expected \"real\" or \"binary\")");
}

std::string to_string(OutputDomain domain) {
  return domain == OutputDomain::Real ? "real" : "binary";
}

void Dataset::validate() const {
  if (X.rows() != y.size())
    throw std::invalid_argument("dataset has " + std::to_string(X.rows()) +
                                " rows of X but " + std::to_string(y.size()) +
                                " observations");
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("dataset contains non-finite values");
  if (domain == OutputDomain::Binary) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] != 0.0 && y[i] != 1.0)
        throw std::invalid_argument(
            "binary dataset labels must be exactly 0 or 1 (found " +
            std::to_string(y[i]) + " at index " + std::to_string(i) + ")");
  }
}

Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
                     OutputDomain domain) {
  Dataset d{std::move(X), std::move(y), domain};
  d.validate();
  return d;
}

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.domain != b.domain)
    throw std::invalid_argument("cannot concatenate datasets with different domains");
  if (a.n() == 0) return b;
  if (b.n() == 0) return a;
  if (a.dim() != b.dim())
    throw std::invalid_argument("cannot concatenate datasets with different dimensions");
  Dataset out;
  out.domain = a.domain;
  out.X.resize(a.n() + b.n(), a.dim());
  out.X << a.X, b.X;
  out.y.resize(a.n() + b.n());
  out.y << a.y, b.y;
  return out;
}

void StreamBatches::validate() const {
  if (batches.empty()) return;
  for (const auto& b : batches) b.validate();
  for (size_t i = 1; i < batches.size(); ++i) {
    if (batches[i].domain != batches.front().domain ||
        batches[i].dim() != batches.front().dim())
      throw std::invalid_argument(
          "stream batches must share output domain and input dimension");
  }
}

Dataset StreamBatches::concat() const {
  validate();
  if (batches.empty()) return {};
  Dataset out = batches.front();
  for (size_t i = 1; i < batches.size(); ++i) out = dualgp::concat(out, batches[i]);
  return out;
}

StreamBatches generate_banana(int n_per_batch, int n_batches,
                              std::uint64_t seed) {
  if (n_per_batch < 10)
    throw std::invalid_argument("generate_banana: n_per_batch must be >= 10");
  if (n_batches < 1)
    throw std::invalid_argument("generate_banana: n_batches must be >= 1");

  const int n = n_per_batch * n_batches;
  auto rng = make_rng(sub_seed(seed, 0xba7a7a));

  // Exactly balanced class counts, shuffled so the round-robin deal below
  // spreads both classes across every batch.
  std::vector<int> cls(n);
  for (int i = 0; i < n; ++i) cls[i] = i < (n + 1) / 2 ? 0 : 1;
  std::shuffle(cls.begin(), cls.end(), rng);

  // Class 0 rides the upper half-circle shifted down, class 1 the lower
  // half-circle shifted up; the arcs interlock through the origin.
  constexpr double kPi = 3.14159265358979323846;
  constexpr double kRadius = 2.0;
  constexpr double kOffset = 1.0;
  constexpr double kNoiseSd = 0.2;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double theta =
        cls[i] == 0 ? kPi * unif(rng) : kPi * (1.0 + unif(rng));
    const double cy = cls[i] == 0 ? -kOffset : kOffset;
    X(i, 0) = kRadius * std::cos(theta) + kNoiseSd * gauss(rng);
    X(i, 1) = cy + kRadius * std::sin(theta) + kNoiseSd * gauss(rng);
    y[i] = cls[i];
  }

  for (int j = 0; j < 2; ++j) {
    const double mean = X.col(j).mean();
    const double sd = std::sqrt((X.col(j).array() - mean).square().mean());
    X.col(j) = (X.col(j).array() - mean) / sd;
  }

  StreamBatches out;
  out.batches.resize(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    const int nb = n / n_batches + (b < n % n_batches ? 1 : 0);
    out.batches[b].X.resize(nb, 2);
    out.batches[b].y.resize(nb);
    out.batches[b].domain = OutputDomain::Binary;
  }
  std::vector<int> fill(n_batches, 0);
  for (int i = 0; i < n; ++i) {
    const int b = i % n_batches;
    out.batches[b].X.row(fill[b]) = X.row(i);
    out.batches[b].y[fill[b]] = y[i];
    ++fill[b];
  }
  out.validate();
  return out;
}

void save_csv(const Dataset& data, const std::string& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  for (int j = 0; j < data.dim(); ++j) out << "x" << (j + 1) << ",";
  out << "y\n";
  char buf[64];
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.X(i, j));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", data.y[i]);
    out << buf << "\n";
  }
  if (!out) throw std::invalid_argument("write to '" + path + "' failed");
}

namespace {

double parse_cell(const std::string& cell, const std::string& path,
                  int line_no) {
  try {
    size_t used = 0;
    const double v = std::stod(cell, &used);
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                ": cannot parse '" + cell + "' as a number");
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument(path + ":1: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "y")
    throw std::invalid_argument(path + ":1: expected header x1,...,xd,y");
  const int dim = static_cast<int>(header.size()) - 1;

  std::vector<double> xs;
  std::vector<double> ys;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != dim + 1)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected " + std::to_string(dim + 1) +
                                  " cells, got " + std::to_string(cells.size()));
    for (int j = 0; j < dim; ++j) xs.push_back(parse_cell(cells[j], path, line_no));
    ys.push_back(parse_cell(cells[dim], path, line_no));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(ys.size());
  Dataset data;
  data.X.resize(n, dim);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) data.X(i, j) = xs[i * dim + j];
    data.y[i] = ys[i];
  }
  const bool all_binary =
      n > 0 && (data.y.array() == 0.0 || data.y.array() == 1.0).all();
  data.domain = all_binary ? OutputDomain::Binary : OutputDomain::Real;
  data.validate();
  return data;
}

StreamBatches partition_stream(const Dataset& data, int batch_size) {
  if (batch_size < 1)
    throw std::invalid_argument("partition_stream: batch_size must be >= 1");
  data.validate();
  StreamBatches out;
  for (Eigen::Index start = 0; start < data.n(); start += batch_size) {
    const Eigen::Index nb = std::min<Eigen::Index>(batch_size, data.n() - start);
    Dataset b;
    b.X = data.X.middleRows(start, nb);
    b.y = data.y.segment(start, nb);
    b.domain = data.domain;
    out.batches.push_back(std::move(b));
  }
  return out;
}

}  // namespace dualgp
