#pragma once

#include <Eigen/Core>
#include <string>

#include <nlohmann/json.hpp>

#include "dualgp/dual_svgp.hpp"

namespace dualgp {

// Matrices are encoded as {shape, dtype, order, encoding, data} with data =
// base64 of the raw little-endian float64 bytes in row-major order, so a
// round-trip is bit-identical. Scalars ride as plain JSON numbers (the
// writer emits shortest-round-trip decimals, which are also exact).
nlohmann::json matrix_to_json(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

// Versioned model document: {version, kernel, likelihood, jitter, Z, lambda,
// Lambda}. The cached K_zz factor is rebuilt on load, not stored.
nlohmann::json state_to_json(const DualState& state);
DualState state_from_json(const nlohmann::json& j);

void save_state(const DualState& state, const std::string& path);
DualState load_state(const std::string& path);

// Prediction grid over a 2-d box: values[i, j] belongs to (xs[j], ys[i]);
// emitted row-major with an explicit shape field.
nlohmann::json grid_to_json(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                            const Eigen::MatrixXd& values);

std::string base64_encode(const unsigned char* bytes, size_t len);
std::string base64_decode(const std::string& text);

}  // namespace dualgp
