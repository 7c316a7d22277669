#include "dualgp/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "dualgp/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace dualgp {

namespace {
constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr int kFormatVersion = 1;
}  // namespace

std::string base64_encode(const unsigned char* bytes, size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (size_t i = 0; i < len; i += 3) {
    unsigned int chunk = bytes[i] << 16;
    if (i + 1 < len) chunk |= bytes[i + 1] << 8;
    if (i + 2 < len) chunk |= bytes[i + 2];
    out.push_back(kB64Alphabet[(chunk >> 18) & 63]);
    out.push_back(kB64Alphabet[(chunk >> 12) & 63]);
    out.push_back(i + 1 < len ? kB64Alphabet[(chunk >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? kB64Alphabet[chunk & 63] : '=');
  }
  return out;
}

std::string base64_decode(const std::string& text) {
  if (text.size() % 4 != 0)
    throw ConfigError("base64 payload length must be a multiple of 4");
  int rev[256];
  std::fill(std::begin(rev), std::end(rev), -1);
  for (int i = 0; i < 64; ++i) rev[static_cast<unsigned char>(kB64Alphabet[i])] = i;

  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (size_t i = 0; i < text.size(); i += 4) {
    unsigned int chunk = 0;
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) throw ConfigError("bad base64 padding");
        chunk <<= 6;
        ++pad;
        continue;
      }
      const int v = rev[static_cast<unsigned char>(c)];
      if (v < 0 || pad > 0) throw ConfigError("invalid base64 character");
      chunk = (chunk << 6) | static_cast<unsigned int>(v);
    }
    out.push_back(static_cast<char>((chunk >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<char>((chunk >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<char>(chunk & 0xff));
  }
  return out;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
  std::vector<double> rowmajor(static_cast<size_t>(M.size()));
  size_t k = 0;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) rowmajor[k++] = M(i, j);
  return {
      {"shape", {M.rows(), M.cols()}},
      {"dtype", "float64"},
      {"order", "row-major"},
      {"encoding", "base64-le"},
      {"data", base64_encode(
                   reinterpret_cast<const unsigned char*>(rowmajor.data()),
                   rowmajor.size() * sizeof(double))},
  };
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  try {
    if (j.at("dtype") != "float64" || j.at("order") != "row-major" ||
        j.at("encoding") != "base64-le")
      throw ConfigError("unsupported matrix encoding");
    const auto shape = j.at("shape");
    const Eigen::Index rows = shape.at(0).get<Eigen::Index>();
    const Eigen::Index cols = shape.at(1).get<Eigen::Index>();
    if (rows < 0 || cols < 0) throw ConfigError("negative matrix shape");
    const std::string bytes = base64_decode(j.at("data").get<std::string>());
    if (bytes.size() != static_cast<size_t>(rows * cols) * sizeof(double))
      throw ConfigError("matrix payload size does not match its shape");
    Eigen::MatrixXd M(rows, cols);
    size_t off = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j2 = 0; j2 < cols; ++j2) {
        std::memcpy(&M(i, j2), bytes.data() + off, sizeof(double));
        off += sizeof(double);
      }
    return M;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed matrix document: ") + e.what());
  }
}

nlohmann::json state_to_json(const DualState& state) {
  nlohmann::json kernel{
      {"kind", to_string(state.kind)},
      {"variance", state.params.variance},
      {"lengthscales", matrix_to_json(state.params.lengthscales)},
  };
  nlohmann::json likelihood{{"kind", to_string(state.lik.kind)}};
  if (state.lik.kind == LikelihoodKind::Gaussian)
    likelihood["noise_variance"] = state.lik.noise_variance;

  return {
      {"version", kFormatVersion},
      {"kernel", kernel},
      {"likelihood", likelihood},
      {"jitter", state.jitter_rel},
      {"Z", matrix_to_json(state.inducing.Z)},
      {"lambda", matrix_to_json(state.lambda)},
      {"Lambda", matrix_to_json(state.Lambda)},
  };
}

DualState state_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion)
      throw ConfigError("unsupported model document version " +
                        std::to_string(version));

    const auto& jk = j.at("kernel");
    const KernelKind kind = kernel_kind_from_string(jk.at("kind").get<std::string>());
    KernelParams params;
    params.variance = jk.at("variance").get<double>();
    params.lengthscales = matrix_from_json(jk.at("lengthscales"));

    const auto& jl = j.at("likelihood");
    const LikelihoodKind lk =
        likelihood_kind_from_string(jl.at("kind").get<std::string>());
    const Likelihood lik = lk == LikelihoodKind::Gaussian
                               ? Likelihood::gaussian(jl.at("noise_variance").get<double>())
                               : Likelihood::bernoulli_probit();

    DualState s = make_state(kind, params, lik,
                             InducingSet(matrix_from_json(j.at("Z"))),
                             j.at("jitter").get<double>());
    const Eigen::MatrixXd lambda = matrix_from_json(j.at("lambda"));
    if (lambda.cols() != 1 || lambda.rows() != s.m())
      throw ConfigError("lambda shape does not match the inducing set");
    s.lambda = lambda.col(0);
    s.Lambda = matrix_from_json(j.at("Lambda"));
    if (s.Lambda.rows() != s.m() || s.Lambda.cols() != s.m())
      throw ConfigError("Lambda shape does not match the inducing set");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model document: ") + e.what());
  }
}

void save_state(const DualState& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << state_to_json(state).dump(2) << "\n";
  if (!out) throw std::invalid_argument("write to '" + path + "' failed");
}

DualState load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return state_from_json(j);
}

nlohmann::json grid_to_json(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                            const Eigen::MatrixXd& values) {
  if (values.rows() != ys.size() || values.cols() != xs.size())
    throw std::invalid_argument("grid values must be shaped [len(ys), len(xs)]");
  std::vector<double> rowmajor;
  rowmajor.reserve(static_cast<size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      rowmajor.push_back(values(i, j));
  return {
      {"xs", std::vector<double>(xs.data(), xs.data() + xs.size())},
      {"ys", std::vector<double>(ys.data(), ys.data() + ys.size())},
      {"shape", {values.rows(), values.cols()}},
      {"order", "row-major"},
      {"probs", rowmajor},
  };
}

}  // namespace dualgp
