#include <algorithm>
#include <fstream>
#include <limits>
#include <string>

#include "binary_io.hpp"
#include "posh/common.hpp"
#include "posh/model_io.hpp"

namespace posh {
namespace {

constexpr char kMagic[5] = {'P', 'O', 'S', 'H', '1'};

void write_rows(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) detail::put_f64(out, m(i, j));
  }
}

std::uint32_t narrow(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw ArgumentError(std::string("write_model: ") + what + " exceeds u32");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_model(std::ostream& out, const HashModel& model) {
  const std::size_t d = model.input_dim();
  const std::size_t cols = model.prep.output_dim();
  if (static_cast<std::size_t>(model.W.cols()) != cols) {
    throw ArgumentError("write_model: W has " + std::to_string(model.W.cols()) +
                        " columns, preprocessing yields " + std::to_string(cols));
  }
  out.write(kMagic, sizeof(kMagic));
  detail::put_u8(out, static_cast<std::uint8_t>(model.scheme));
  detail::put_le(out, narrow(d, "d"));
  detail::put_le(out, narrow(model.code_length(), "D"));
  detail::put_le(out, narrow(model.alpha, "alpha"));
  for (Eigen::Index j = 0; j < model.prep.center.size(); ++j) {
    detail::put_f64(out, model.prep.center(j));
  }
  detail::put_u8(out, model.prep.pca ? 1 : 0);
  if (model.prep.pca) {
    const PcaTransform& pca = *model.prep.pca;
    detail::put_le(out, narrow(pca.k(), "k"));
    for (Eigen::Index j = 0; j < pca.mean.size(); ++j) detail::put_f64(out, pca.mean(j));
    write_rows(out, pca.components);
  }
  write_rows(out, model.W);
}

HashModel read_model(std::istream& in) {
  detail::Reader reader(in, "POSH1 model");
  char magic[sizeof(kMagic)];
  reader.bytes(magic, sizeof(magic));
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
    throw ParseError("POSH1 model: bad magic bytes", 0);
  }
  HashModel model;
  const std::uint8_t tag = reader.u8();
  if (tag > static_cast<std::uint8_t>(Scheme::kItq)) {
    reader.fail("unknown scheme tag " + std::to_string(tag));
  }
  model.scheme = static_cast<Scheme>(tag);
  const auto d = reader.le<std::uint32_t>();
  const auto code_length = reader.le<std::uint32_t>();
  model.alpha = reader.le<std::uint32_t>();
  if (is_sparse(model.scheme) && (model.alpha < 1 || model.alpha > code_length)) {
    reader.fail("alpha " + std::to_string(model.alpha) + " outside [1, D]");
  }
  model.prep.center.resize(d);
  for (std::uint32_t j = 0; j < d; ++j) model.prep.center(j) = reader.f64();

  std::uint32_t cols = d;
  const std::uint8_t has_pca = reader.u8();
  if (has_pca > 1) reader.fail("invalid PCA flag");
  if (has_pca == 1) {
    PcaTransform pca;
    const auto k = reader.le<std::uint32_t>();
    if (k < 1 || k > d) reader.fail("PCA component count out of range");
    pca.mean.resize(d);
    for (std::uint32_t j = 0; j < d; ++j) pca.mean(j) = reader.f64();
    pca.components.resize(k, d);
    for (std::uint32_t i = 0; i < k; ++i) {
      for (std::uint32_t j = 0; j < d; ++j) pca.components(i, j) = reader.f64();
    }
    model.prep.pca = std::move(pca);
    cols = k;
  }
  model.W.resize(code_length, cols);
  for (std::uint32_t i = 0; i < code_length; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) model.W(i, j) = reader.f64();
  }
  if (!reader.at_end()) reader.fail("trailing bytes after model");
  return model;
}

void save_model(const std::filesystem::path& path, const HashModel& model) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  try {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    write_model(out, model);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw;
  }
  std::filesystem::rename(tmp, path);
}

HashModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace posh
