#include "acrnn/ridge.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <string>

#include "acrnn/errors.hpp"

namespace acrnn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> view(const Matrix& m) {
  return Eigen::Map<const RowMatrix>(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                     static_cast<Eigen::Index>(m.cols()));
}

// Reciprocal condition estimates below this are treated as singular.
constexpr double kSingularRcond = 1e-13;

}  // namespace

Matrix RidgeModel::predict(const Matrix& x) const {
  if (x.cols() != weights.rows()) {
    throw DimensionError("RidgeModel::predict: " + std::to_string(x.cols()) + " features, model expects " +
                         std::to_string(weights.rows()));
  }
  RowMatrix out = view(x) * view(weights);
  Matrix result(x.rows(), weights.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < weights.cols(); ++c)
      result(r, c) = out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) + intercept[c];
  return result;
}

RidgeModel ridge_fit(const Matrix& x, const Matrix& y, double lambda) {
  if (x.rows() == 0) throw ContractError("ridge_fit: need at least one sample");
  if (x.rows() != y.rows()) {
    throw DimensionError("ridge_fit: X has " + std::to_string(x.rows()) + " rows, y has " + std::to_string(y.rows()));
  }
  if (!(lambda >= 0.0)) throw ContractError("ridge_fit: lambda must be >= 0");

  const Eigen::RowVectorXd x_mean = view(x).colwise().mean();
  const Eigen::RowVectorXd y_mean = view(y).colwise().mean();
  const Eigen::MatrixXd xc = view(x).rowwise() - x_mean;
  const Eigen::MatrixXd yc = view(y).rowwise() - y_mean;

  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = xc.transpose() * yc;

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || llt.rcond() < kSingularRcond) {
    throw NumericError("ridge_fit: normal equations are singular; use lambda > 0");
  }
  const Eigen::MatrixXd w = llt.solve(rhs);
  const Eigen::RowVectorXd b = y_mean - x_mean * w;

  RidgeModel model;
  model.weights = Matrix(x.cols(), y.cols());
  for (std::size_t r = 0; r < x.cols(); ++r)
    for (std::size_t c = 0; c < y.cols(); ++c)
      model.weights(r, c) = w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  model.intercept.assign(b.data(), b.data() + b.size());
  return model;
}

RidgeForecaster RidgeForecaster::fit(std::span<const ForecastWindow> windows, double lambda) {
  if (windows.empty()) throw ContractError("RidgeForecaster::fit: no windows");
  const std::size_t p = windows[0].input.size();
  const std::size_t m = windows[0].target.size();
  Matrix x(windows.size(), p);
  Matrix y(windows.size(), m);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto in = windows[i].input.data();
    const auto out = windows[i].target.data();
    std::copy(in.begin(), in.end(), x.row(i).begin());
    std::copy(out.begin(), out.end(), y.row(i).begin());
  }
  RidgeForecaster f;
  f.model_ = ridge_fit(x, y, lambda);
  f.horizon_ = windows[0].target.rows();
  f.variables_ = windows[0].target.cols();
  return f;
}

Matrix RidgeForecaster::forecast(const Matrix& window) const {
  const Matrix flat(1, window.size(), std::vector<double>(window.data().begin(), window.data().end()));
  const Matrix pred = model_.predict(flat);
  return Matrix(horizon_, variables_, std::vector<double>(pred.data().begin(), pred.data().end()));
}

Matrix persistence_forecast(const Matrix& window, std::size_t horizon) {
  if (window.rows() == 0) throw ContractError("persistence_forecast: empty window");
  Matrix out(horizon, window.cols());
  for (std::size_t t = 0; t < horizon; ++t)
    for (std::size_t j = 0; j < window.cols(); ++j) out(t, j) = window(window.rows() - 1, j);
  return out;
}

}  // namespace acrnn
