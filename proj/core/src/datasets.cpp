#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "binary_io.hpp"
#include "posh/common.hpp"
#include "posh/datasets.hpp"
#include "posh/rng.hpp"

namespace posh {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Shared vecs reader; `read` consumes one value.
template <typename T, typename Read>
std::vector<T> read_vecs(std::istream& in, const std::string& context, std::size_t& dim,
                         std::size_t& rows, Read read) {
  detail::Reader reader(in, context);
  std::vector<T> values;
  dim = 0;
  rows = 0;
  while (!reader.at_end()) {
    const std::uint64_t record = reader.offset();
    const auto raw = static_cast<std::int32_t>(reader.le<std::uint32_t>());
    if (raw <= 0) reader.fail("non-positive dimension " + std::to_string(raw));
    const auto d = static_cast<std::size_t>(raw);
    if (rows == 0) {
      dim = d;
    } else if (d != dim) {
      throw ParseError(context + ": record at byte " + std::to_string(record) + " has dim " +
                           std::to_string(d) + ", expected " + std::to_string(dim),
                       record);
    }
    for (std::size_t j = 0; j < d; ++j) values.push_back(read(reader));
    ++rows;
  }
  return values;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <typename T>
T parse_cell(std::string_view cell, const std::string& where, std::uint64_t line) {
  T value{};
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || end != cell.data() + cell.size()) {
    throw ParseError(where + ": line " + std::to_string(line) + ": cannot parse '" +
                         std::string(cell) + "' as a number",
                     line);
  }
  return value;
}

}  // namespace

Dataset load_fvecs(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::size_t dim = 0;
  std::size_t rows = 0;
  const std::vector<float> values = read_vecs<float>(
      in, "fvecs " + path.string(), dim, rows, [](detail::Reader& r) { return r.f32(); });
  Dataset data;
  data.name = path.stem().string();
  data.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < values.size(); ++i) data.features.data()[i] = values[i];
  return data;
}

void write_fvecs(const std::filesystem::path& path, const Matrix& x) {
  std::ofstream out = open_output(path);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    detail::put_le(out, static_cast<std::uint32_t>(x.cols()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) detail::put_f32(out, static_cast<float>(x(i, j)));
  }
  finish(out, path);
}

std::vector<std::vector<std::int32_t>> load_ivecs(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::size_t dim = 0;
  std::size_t rows = 0;
  const std::vector<std::int32_t> values =
      read_vecs<std::int32_t>(in, "ivecs " + path.string(), dim, rows, [](detail::Reader& r) {
        return static_cast<std::int32_t>(r.le<std::uint32_t>());
      });
  std::vector<std::vector<std::int32_t>> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    out[i].assign(values.begin() + static_cast<std::ptrdiff_t>(i * dim),
                  values.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
  }
  return out;
}

void write_ivecs(const std::filesystem::path& path,
                 const std::vector<std::vector<std::int32_t>>& rows) {
  std::ofstream out = open_output(path);
  for (const auto& row : rows) {
    detail::put_le(out, static_cast<std::uint32_t>(row.size()));
    for (std::int32_t v : row) detail::put_le(out, static_cast<std::uint32_t>(v));
  }
  finish(out, path);
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column) {
  std::ifstream in = open_input(path);
  const std::string where = "csv " + path.string();
  Dataset data;
  data.name = path.stem().string();

  std::string line;
  std::uint64_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_text;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header_text = line;
      header = split_cells(header_text);
      break;
    }
  }
  if (header.empty()) {
    if (label_column) throw ParseError(where + ": empty file has no column " + *label_column, 0);
    return data;
  }

  std::optional<std::size_t> label_at;
  if (label_column) {
    const auto it = std::find(header.begin(), header.end(), std::string_view(*label_column));
    if (it == header.end()) {
      throw ParseError(where + ": line " + std::to_string(line_no) + ": no column named '" +
                           *label_column + "'",
                       line_no);
    }
    label_at = static_cast<std::size_t>(it - header.begin());
  }
  const std::size_t width = header.size() - (label_at ? 1 : 0);

  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string_view> cells = split_cells(line);
    if (cells.size() != header.size()) {
      throw ParseError(where + ": line " + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (label_at && c == *label_at) {
        data.labels.push_back(parse_cell<std::int64_t>(cells[c], where, line_no));
      } else {
        values.push_back(parse_cell<double>(cells[c], where, line_no));
      }
    }
  }
  const auto rows = static_cast<Eigen::Index>(width == 0 ? 0 : values.size() / width);
  data.features.resize(rows, static_cast<Eigen::Index>(width));
  std::copy(values.begin(), values.end(), data.features.data());
  return data;
}

Dataset load_raw_f32(const std::filesystem::path& path, std::size_t d) {
  if (d < 1) throw ArgumentError("load_raw_f32: d must be at least 1");
  const std::uint64_t bytes = std::filesystem::file_size(path);
  const std::uint64_t record = 4 * static_cast<std::uint64_t>(d);
  const std::uint64_t n = bytes / record;
  if (bytes % record != 0) {
    throw ParseError("raw f32 " + path.string() + ": truncated record at byte " +
                         std::to_string(n * record) + " (" + std::to_string(bytes) +
                         " bytes is not a multiple of " + std::to_string(record) + ")",
                     n * record);
  }
  std::ifstream in = open_input(path);
  detail::Reader reader(in, "raw f32 " + path.string());
  Dataset data;
  data.name = path.stem().string();
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < data.features.size(); ++i) data.features.data()[i] = reader.f32();
  return data;
}

void write_raw_f32(const std::filesystem::path& path, const Matrix& x) {
  std::ofstream out = open_output(path);
  for (Eigen::Index i = 0; i < x.size(); ++i) detail::put_f32(out, static_cast<float>(x.data()[i]));
  finish(out, path);
}

Dataset subset(const Dataset& data, std::span<const std::uint64_t> ids) {
  Dataset out;
  out.name = data.name;
  out.synthetic = data.synthetic;
  out.features.resize(static_cast<Eigen::Index>(ids.size()), data.features.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= data.size()) {
      throw ArgumentError("subset: id " + std::to_string(ids[i]) + " out of range");
    }
    out.features.row(static_cast<Eigen::Index>(i)) =
        data.features.row(static_cast<Eigen::Index>(ids[i]));
    if (data.has_labels()) out.labels.push_back(data.labels[ids[i]]);
  }
  return out;
}

std::vector<std::uint64_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                      std::uint64_t seed) {
  if (count > n) {
    throw ArgumentError("sample_without_replacement: cannot draw " + std::to_string(count) +
                        " of " + std::to_string(n));
  }
  std::vector<std::uint64_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::uint64_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(pool[i], pool[i + rng.below(n - i)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

Split make_split(std::size_t n, std::size_t train_size, std::uint64_t seed,
                 std::size_t query_size) {
  if (query_size > n) {
    throw ArgumentError("make_split: " + std::to_string(query_size) + " queries requested from " +
                        std::to_string(n) + " points");
  }
  if (train_size > n - query_size) {
    throw ArgumentError("make_split: train_size " + std::to_string(train_size) +
                        " exceeds the " + std::to_string(n - query_size) + " targets");
  }
  Split split;
  split.query = sample_without_replacement(n, query_size, seed);
  split.target.reserve(n - query_size);
  std::size_t next = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (next < split.query.size() && split.query[next] == i) {
      ++next;
    } else {
      split.target.push_back(i);
    }
  }
  // Offset the stream so query and train draws are not correlated.
  const std::vector<std::uint64_t> picks =
      sample_without_replacement(split.target.size(), train_size, seed ^ 0x5851f42d4c957f2dULL);
  split.train.reserve(train_size);
  for (std::uint64_t p : picks) split.train.push_back(split.target[p]);
  return split;
}

Dataset synth_gaussian_mixture(std::size_t classes, std::size_t per_class, std::size_t d,
                               double separation, double noise, std::uint64_t seed) {
  if (classes < 1) throw ArgumentError("synth_gaussian_mixture: need at least one class");
  if (d < 1) throw ArgumentError("synth_gaussian_mixture: d must be at least 1");
  Rng rng(seed);
  Matrix centers(static_cast<Eigen::Index>(classes), static_cast<Eigen::Index>(d));
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    double norm = 0;
    while (norm == 0) {
      for (Eigen::Index j = 0; j < centers.cols(); ++j) centers(c, j) = rng.normal();
      norm = centers.row(c).norm();
    }
    centers.row(c) *= separation / norm;
  }
  Dataset data;
  data.name = "gaussian-mixture";
  data.synthetic = true;
  data.features.resize(static_cast<Eigen::Index>(classes * per_class),
                       static_cast<Eigen::Index>(d));
  data.labels.reserve(classes * per_class);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      const auto row = static_cast<Eigen::Index>(c * per_class + i);
      for (Eigen::Index j = 0; j < centers.cols(); ++j) {
        data.features(row, j) = centers(static_cast<Eigen::Index>(c), j) + noise * rng.normal();
      }
      data.labels.push_back(static_cast<std::int64_t>(c));
    }
  }
  return data;
}

}  // namespace posh
