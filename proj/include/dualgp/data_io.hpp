#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace dualgp {

enum class OutputDomain { Real, Binary };

OutputDomain domain_from_string(const std::string& tag);
std::string to_string(OutputDomain domain);

struct Dataset {
  Eigen::MatrixXd X;  // n x d, rows are points
  Eigen::VectorXd y;  // n
  OutputDomain domain = OutputDomain::Real;

  Eigen::Index n() const { return X.rows(); }
  int dim() const { return static_cast<int>(X.cols()); }

  // Shapes agree, everything finite, binary labels exactly 0 or 1.
  void validate() const;
};

Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y, OutputDomain domain);
Dataset concat(const Dataset& a, const Dataset& b);

struct StreamBatches {
  std::vector<Dataset> batches;

  // All batches share domain and dimension.
  void validate() const;
  Dataset concat() const;
};

// Two interleaved crescent-shaped classes in 2-d, standardized to zero mean
// and unit variance per coordinate over the whole draw, then dealt
// round-robin into n_batches batches so every batch mixes both classes.
// Class counts are exactly half/half (up to one point when the total is odd).
StreamBatches generate_banana(int n_per_batch, int n_batches,
                              std::uint64_t seed);

// CSV with header x1,...,xd,y; values written with 17 significant digits so
// doubles round-trip exactly. load infers the binary domain when every y is
// 0 or 1; parse errors name the offending 1-based line.
void save_csv(const Dataset& data, const std::string& path);
Dataset load_csv(const std::string& path);

// Order-preserving contiguous split; the last batch may be short.
StreamBatches partition_stream(const Dataset& data, int batch_size);

}  // namespace dualgp
