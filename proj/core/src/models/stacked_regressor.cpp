#include "driveclone/models/stacked_regressor.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <map>

#include "driveclone/errors.hpp"

namespace driveclone::models {
namespace {

using Matrix = Eigen::MatrixXd;

Matrix design_matrix(std::span<const pipeline::WindowSample> windows, std::size_t history) {
  const auto f = static_cast<Eigen::Index>(history * kFeatureCount);
  Matrix x(static_cast<Eigen::Index>(windows.size()), f + 1);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    if (w.features.size() != static_cast<std::size_t>(f)) {
      throw ShapeError("stacked_lr expects [" + std::to_string(history) + "x12] features, got " +
                       w.features.shape_string());
    }
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index c = 0; c < f; ++c) x(r, c) = w.features[static_cast<std::size_t>(c)];
    x(r, f) = 1.0;
  }
  return x;
}

Matrix target_matrix(std::span<const pipeline::WindowSample> windows, std::size_t horizon) {
  const auto o = static_cast<Eigen::Index>(horizon * 2);
  Matrix y(static_cast<Eigen::Index>(windows.size()), o);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].target.size() != static_cast<std::size_t>(o)) {
      throw ShapeError("stacked_lr expects [" + std::to_string(horizon) + "x2] targets, got " +
                       windows[i].target.shape_string());
    }
    for (Eigen::Index c = 0; c < o; ++c) {
      y(static_cast<Eigen::Index>(i), c) = windows[i].target[static_cast<std::size_t>(c)];
    }
  }
  return y;
}

Matrix ridge_solve(const Matrix& x, const Matrix& y, double lambda) {
  const Eigen::Index p = x.cols();
  Matrix a = x.transpose() * x;
  for (Eigen::Index i = 0; i + 1 < p; ++i) a(i, i) += lambda;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success) throw SolverError("ridge eigen-decomposition failed");
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double hi = ev.maxCoeff();
  const double lo = ev.minCoeff();
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxConditionNumber)) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "ridge design is degenerate (lambda=%g, condition number %.3e > %.0e)", lambda,
                  cond, kMaxConditionNumber);
    throw SolverError(msg);
  }
  const Matrix& v = eig.eigenvectors();
  return v * ev.cwiseInverse().asDiagonal() * (v.transpose() * (x.transpose() * y));
}

nn::Tensor to_tensor(const Matrix& m) {
  nn::Tensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      t(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
    }
  }
  return t;
}

Matrix to_matrix(const nn::Tensor& t) {
  Matrix m(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t(r, c);
    }
  }
  return m;
}

}  // namespace

StackedRegressor::StackedRegressor(ArchitectureSpec spec, Combiner combiner)
    : spec_(std::move(spec)), mode_(combiner) {
  spec_.validate();
  if (spec_.variant != Architecture::stacked_lr) {
    throw ConfigError("StackedRegressor built with variant " +
                      std::string(to_string(spec_.variant)));
  }
  if (mode_ == Combiner::identity && spec_.ridge_lambdas.size() != 1) {
    throw ConfigError("identity combiner needs exactly one base learner");
  }
  const std::size_t m = spec_.ridge_lambdas.size();
  bases_.assign(m, nn::Tensor({input_width(), output_width()}));
  combiner_ = nn::Tensor({m, output_width()});
  if (mode_ == Combiner::identity) combiner_.fill(1.0);
}

void StackedRegressor::fit(std::span<const pipeline::WindowSample> windows) {
  if (windows.empty()) throw ValidationError("stacked_lr: no training windows");
  const Matrix x = design_matrix(windows, spec_.history_len);
  const Matrix y = target_matrix(windows, spec_.horizon_len);
  const auto& lambdas = spec_.ridge_lambdas;
  const std::size_t m = lambdas.size();
  const Eigen::Index n = x.rows();
  const Eigen::Index o = y.cols();

  for (std::size_t j = 0; j < m; ++j) bases_[j] = to_tensor(ridge_solve(x, y, lambdas[j]));
  if (mode_ == Combiner::identity) return;

  std::map<std::string, std::size_t> segment_order;
  std::vector<std::size_t> fold_of(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto [it, inserted] = segment_order.emplace(windows[i].segment_id, segment_order.size());
    fold_of[i] = it->second;
  }
  const std::size_t folds = std::min(spec_.stacking_folds, segment_order.size());
  if (folds < 2) {
    throw ValidationError("stacked_lr: held-out folds need at least 2 segments, got " +
                          std::to_string(segment_order.size()));
  }
  for (auto& f : fold_of) f %= folds;

  // oof[j] holds base j's held-out predictions, [n x o].
  std::vector<Matrix> oof(m, Matrix::Zero(n, o));
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<Eigen::Index> in_rows;
    std::vector<Eigen::Index> out_rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
      (fold_of[i] == k ? out_rows : in_rows).push_back(static_cast<Eigen::Index>(i));
    }
    const Matrix x_in = x(in_rows, Eigen::all);
    const Matrix y_in = y(in_rows, Eigen::all);
    const Matrix x_out = x(out_rows, Eigen::all);
    for (std::size_t j = 0; j < m; ++j) {
      const Matrix pred = x_out * ridge_solve(x_in, y_in, lambdas[j]);
      for (std::size_t r = 0; r < out_rows.size(); ++r) {
        oof[j].row(out_rows[r]) = pred.row(static_cast<Eigen::Index>(r));
      }
    }
  }

  for (Eigen::Index c = 0; c < o; ++c) {
    Matrix z(n, static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) z.col(static_cast<Eigen::Index>(j)) = oof[j].col(c);
    // Eigen's default rank threshold is a few ulps, which leaves duplicated
    // bases full rank after rounding; treat near-collinear columns as one.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(n, static_cast<Eigen::Index>(m));
    cod.setThreshold(1e-10);
    cod.compute(z);
    const Eigen::VectorXd w = cod.solve(y.col(c));
    for (std::size_t j = 0; j < m; ++j) {
      combiner_(j, static_cast<std::size_t>(c)) = w(static_cast<Eigen::Index>(j));
    }
  }
}

nn::Tensor StackedRegressor::predict(std::span<const pipeline::WindowSample> windows) const {
  const std::size_t o = output_width();
  nn::Tensor out({windows.size(), spec_.horizon_len, 2});
  if (windows.empty()) return out;
  const Matrix x = design_matrix(windows, spec_.history_len);
  Matrix total = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(o));
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    const Matrix pred = x * to_matrix(bases_[j]);
    for (std::size_t c = 0; c < o; ++c) {
      total.col(static_cast<Eigen::Index>(c)) +=
          combiner_(j, c) * pred.col(static_cast<Eigen::Index>(c));
    }
  }
  for (std::size_t i = 0; i < windows.size(); ++i) {
    for (std::size_t c = 0; c < o; ++c) {
      out[i * o + c] = total(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

nn::ParamList StackedRegressor::parameters() {
  nn::ParamList out;
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    out.push_back({"base" + std::to_string(j) + ".weight", &bases_[j]});
  }
  out.push_back({"combiner.weight", &combiner_});
  return out;
}

StackedRegressor build_stacked_regressor(std::size_t base_count, ArchitectureSpec spec) {
  if (base_count < 2) throw ConfigError("stacked regressor needs at least 2 base learners");
  spec.variant = Architecture::stacked_lr;
  spec.embedding_dim = 0;
  if (spec.ridge_lambdas.size() != base_count) {
    spec.ridge_lambdas.clear();
    for (std::size_t j = 0; j < base_count; ++j) {
      const double e = -2.0 + 4.0 * static_cast<double>(j) / static_cast<double>(base_count - 1);
      spec.ridge_lambdas.push_back(std::pow(10.0, e));
    }
  }
  return StackedRegressor(std::move(spec));
}

}  // namespace driveclone::models
