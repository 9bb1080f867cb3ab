#include <cmath>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "posh/common.hpp"
#include "posh/hash_model.hpp"
#include "posh/parallel.hpp"
#include "posh/rng.hpp"

namespace posh {
namespace {

// Four interleaved accumulators, always combined in the same order.
double fixed_dot(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += a[i] * b[i];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) acc[0] += a[i] * b[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kFruitFly: return "fruitfly";
    case Scheme::kPosh: return "posh";
    case Scheme::kSpherical: return "spherical";
    case Scheme::kBioHash: return "biohash";
    case Scheme::kBosl: return "bosl";
    case Scheme::kLsh: return "lsh";
    case Scheme::kItq: return "itq";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (auto s : {Scheme::kFruitFly, Scheme::kPosh, Scheme::kSpherical, Scheme::kBioHash,
                 Scheme::kBosl, Scheme::kLsh, Scheme::kItq}) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

bool is_sparse(Scheme scheme) { return scheme != Scheme::kLsh && scheme != Scheme::kItq; }

Preprocessing fit_preprocessing(const Matrix& train, Scheme scheme, std::size_t code_length,
                                std::size_t alpha) {
  Preprocessing prep;
  prep.center = fit_center(train);
  const auto d = static_cast<std::size_t>(train.cols());
  std::size_t components = 0;
  if (scheme == Scheme::kItq) {
    components = code_length;
  } else if (d > code_length) {
    components = is_sparse(scheme) ? alpha : code_length;
  }
  if (components > 0) prep.pca = pca_fit(apply_center(train, prep.center), components);
  return prep;
}

Matrix apply_preprocessing(const Preprocessing& prep, const Matrix& x) {
  Matrix centered = apply_center(x, prep.center);
  if (!prep.pca) return centered;
  return pca_apply(*prep.pca, centered);
}

HashModel make_model(Scheme scheme, Matrix w, std::size_t alpha) {
  HashModel model;
  model.scheme = scheme;
  model.prep.center = Vector::Zero(w.cols());
  model.W = std::move(w);
  model.alpha = alpha;
  return model;
}

std::vector<double> preprocess(const Preprocessing& prep, std::span<const double> x) {
  const std::size_t d = x.size();
  if (d != prep.input_dim()) {
    throw ArgumentError("hash: input has " + std::to_string(d) + " dimensions, model expects " +
                        std::to_string(prep.input_dim()));
  }
  std::vector<double> z(d);
  for (std::size_t j = 0; j < d; ++j) z[j] = x[j] - prep.center(static_cast<Eigen::Index>(j));
  if (!prep.pca) return z;
  const PcaTransform& pca = *prep.pca;
  for (std::size_t j = 0; j < d; ++j) z[j] -= pca.mean(static_cast<Eigen::Index>(j));
  std::vector<double> reduced(pca.k());
  for (std::size_t c = 0; c < pca.k(); ++c) {
    reduced[c] = fixed_dot(pca.components.row(static_cast<Eigen::Index>(c)).data(), z.data(), d);
  }
  return reduced;
}

std::vector<double> project(const HashModel& model, std::span<const double> x) {
  const std::vector<double> z = preprocess(model.prep, x);
  const std::size_t rows = model.code_length();
  std::vector<double> y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = fixed_dot(model.W.row(static_cast<Eigen::Index>(r)).data(), z.data(), z.size());
  }
  return y;
}

SparseCode hash_sparse(const HashModel& model, std::span<const double> x) {
  if (!is_sparse(model.scheme)) throw ArgumentError("hash_sparse: model has a dense scheme");
  return wta(project(model, x), model.alpha);
}

DenseCode hash_dense(const HashModel& model, std::span<const double> x) {
  if (is_sparse(model.scheme)) throw ArgumentError("hash_dense: model has a sparse scheme");
  return sign_code(project(model, x));
}

Code hash(const HashModel& model, std::span<const double> x) {
  if (is_sparse(model.scheme)) return hash_sparse(model, x);
  return hash_dense(model, x);
}

std::vector<SparseCode> hash_sparse_batch(const HashModel& model, const Matrix& x,
                                          std::size_t threads) {
  std::vector<SparseCode> out(static_cast<std::size_t>(x.rows()));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const auto row = x.row(static_cast<Eigen::Index>(i));
    out[i] = hash_sparse(model, std::span<const double>(row.data(), row.size()));
  });
  return out;
}

std::vector<DenseCode> hash_dense_batch(const HashModel& model, const Matrix& x,
                                        std::size_t threads) {
  std::vector<DenseCode> out(static_cast<std::size_t>(x.rows()));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const auto row = x.row(static_cast<Eigen::Index>(i));
    out[i] = hash_dense(model, std::span<const double>(row.data(), row.size()));
  });
  return out;
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
  }
  return m;
}

HashModel fruitfly_init(std::size_t d, std::size_t code_length, double p, std::uint64_t seed,
                        std::size_t alpha) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("fruitfly_init: p must lie in (0, 1)");
  if (alpha < 1 || alpha > code_length) {
    throw ArgumentError("fruitfly_init: alpha must lie in [1, D]");
  }
  Rng rng(seed);
  Matrix w(code_length, d);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.bernoulli(p) ? 1.0 : 0.0;
  }
  return make_model(Scheme::kFruitFly, std::move(w), alpha);
}

HashModel gaussian_orthogonal_init(std::size_t d, std::size_t code_length, std::uint64_t seed,
                                   std::size_t alpha) {
  if (code_length < d) {
    throw ArgumentError("gaussian_orthogonal_init: D=" + std::to_string(code_length) +
                        " < d=" + std::to_string(d) + " cannot have orthonormal columns");
  }
  if (alpha < 1 || alpha > code_length) {
    throw ArgumentError("gaussian_orthogonal_init: alpha must lie in [1, D]");
  }
  return make_model(Scheme::kPosh, orthogonalize(gaussian_matrix(code_length, d, seed)), alpha);
}

HashModel lsh_init(std::size_t d, std::size_t bits, std::uint64_t seed) {
  if (bits < 1) throw ArgumentError("lsh_init: need at least one bit");
  return make_model(Scheme::kLsh, gaussian_matrix(bits, d, seed), 0);
}

GramStatistics gram_statistics(const Matrix& w) {
  if (w.cols() < 2) throw ArgumentError("gram_statistics: need at least two columns");
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (w(i, j) != 0.0 && w(i, j) != 1.0) throw ArgumentError("gram_statistics: W is not binary");
    }
  }
  const Matrix gram = w.transpose() * w;
  const Eigen::Index d = gram.rows();

  const auto mean_var = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double e : v) ss += (e - mean) * (e - mean);
    const double var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
    return std::pair{mean, var};
  };

  std::vector<double> diag;
  std::vector<double> off;
  diag.reserve(static_cast<std::size_t>(d));
  off.reserve(static_cast<std::size_t>(d * (d - 1) / 2));
  for (Eigen::Index i = 0; i < d; ++i) {
    diag.push_back(gram(i, i));
    for (Eigen::Index j = i + 1; j < d; ++j) off.push_back(gram(i, j));
  }
  GramStatistics stats;
  std::tie(stats.diag_mean, stats.diag_var) = mean_var(diag);
  std::tie(stats.offdiag_mean, stats.offdiag_var) = mean_var(off);
  return stats;
}

GramCheck gram_check(std::size_t code_length, std::size_t d, double p, std::size_t samples,
                     std::uint64_t seed) {
  if (samples < 2) throw ArgumentError("gram_check: need at least two samples");
  GramCheck out;
  out.samples = samples;
  std::vector<GramStatistics> stats(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    stats[s] = gram_statistics(fruitfly_init(d, code_length, p, seed + s, 1).W);
  }
  const auto mean_se = [&](double GramStatistics::*field) {
    double sum = 0;
    for (const auto& st : stats) sum += st.*field;
    const double mean = sum / static_cast<double>(samples);
    double ss = 0;
    for (const auto& st : stats) ss += (st.*field - mean) * (st.*field - mean);
    const double se = std::sqrt(ss / static_cast<double>(samples - 1) / static_cast<double>(samples));
    return std::pair{mean, se};
  };
  std::tie(out.diag_mean, out.diag_mean_se) = mean_se(&GramStatistics::diag_mean);
  std::tie(out.offdiag_mean, out.offdiag_mean_se) = mean_se(&GramStatistics::offdiag_mean);
  out.diag_var = mean_se(&GramStatistics::diag_var).first;
  out.offdiag_var = mean_se(&GramStatistics::offdiag_var).first;
  const double D = static_cast<double>(code_length);
  out.expected_diag_mean = D * p;
  out.expected_diag_var = D * p * (1 - p);
  out.expected_offdiag_mean = D * p * p;
  out.expected_offdiag_var = D * p * p * (1 - p * p);
  return out;
}

}  // namespace posh
