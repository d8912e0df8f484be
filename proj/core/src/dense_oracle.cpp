#include "mechband/dense_oracle.hpp"

#include <cmath>
#include <string>

#include "mechband/errors.hpp"

namespace mechband {

namespace {

double factorial(std::size_t k) {
  double out = 1.0;
  for (std::size_t i = 2; i <= k; ++i) out *= static_cast<double>(i);
  return out;
}

std::size_t column(const Dimensions& d, std::size_t t, std::size_t v, std::size_t r) {
  return (t * d.variables + v) * d.orders() + r;
}

}  // namespace

Eigen::MatrixXd DenseSystem::normal_matrix() const {
  return matrix.transpose() * weights.asDiagonal() * matrix;
}

Eigen::VectorXd DenseSystem::normal_rhs() const {
  return matrix.transpose() * weights.cwiseProduct(rhs);
}

DenseSystem assemble_dense(const OdeSpec& spec) {
  const Dimensions d = validate_spec(spec);
  if (d.unknowns() > kDenseOracleMaxUnknowns) {
    throw Error(ErrorCode::kOracleTooLarge,
                "n = " + std::to_string(d.unknowns()) + " exceeds the dense cap of " +
                    std::to_string(kDenseOracleMaxUnknowns));
  }
  const std::size_t m = d.constraints();
  const std::size_t n = d.unknowns();
  const double wg = spec.weights.governing;
  const double wi = spec.weights.initial;
  const double ws = spec.weights.smoothness;

  DenseSystem sys;
  sys.dims = d;
  sys.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  sys.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  sys.rows.reserve(m);

  Eigen::Index row = 0;
  auto next_row = [&](RowTag tag, double weight, double rhs) {
    sys.rows.push_back(tag);
    sys.weights(row) = weight * weight;
    sys.rhs(row) = rhs;
    return row++;
  };

  // sum_{v,r} c[t,q,v,r] y[t,v,r] = d[t,q]
  for (std::size_t t = 0; t < d.time_points; ++t) {
    for (std::size_t q = 0; q < d.equations; ++q) {
      const Eigen::Index i = next_row({RowKind::kGoverning, t, q, 0}, wg, spec.constant(t, q));
      for (std::size_t v = 0; v < d.variables; ++v)
        for (std::size_t r = 0; r <= d.order; ++r)
          sys.matrix(i, static_cast<Eigen::Index>(column(d, t, v, r))) =
              spec.coefficient(t, q, v, r);
    }
  }

  // y[t,v,r] = u[t,v,r]
  for (std::size_t t = 0; t < d.init_time_points; ++t) {
    for (std::size_t v = 0; v < d.variables; ++v) {
      for (std::size_t r = 0; r <= d.init_order; ++r) {
        const Eigen::Index i =
            next_row({RowKind::kInitial, t, v, r}, wi, spec.initial_value(t, v, r));
        sys.matrix(i, static_cast<Eigen::Index>(column(d, t, v, r))) = 1.0;
      }
    }
  }

  // y[t+1,v,r] - sum_{r'>=r} s^(r'-r)/(r'-r)! y[t,v,r'] = 0, row weight s^r
  for (std::size_t t = 0; t < d.intervals(); ++t) {
    const double s = spec.steps[t];
    for (std::size_t v = 0; v < d.variables; ++v) {
      for (std::size_t r = 0; r <= d.order; ++r) {
        const double weight = ws * std::pow(s, static_cast<double>(r));
        const Eigen::Index i = next_row({RowKind::kSmoothForward, t, v, r}, weight, 0.0);
        sys.matrix(i, static_cast<Eigen::Index>(column(d, t + 1, v, r))) += 1.0;
        for (std::size_t rp = r; rp <= d.order; ++rp) {
          sys.matrix(i, static_cast<Eigen::Index>(column(d, t, v, rp))) -=
              std::pow(s, static_cast<double>(rp - r)) / factorial(rp - r);
        }
      }
    }
  }

  // y[t,v,r] - sum_{r'>=r} (-s)^(r'-r)/(r'-r)! y[t+1,v,r'] = 0, row weight s^r
  for (std::size_t t = 0; t < d.intervals(); ++t) {
    const double s = spec.steps[t];
    for (std::size_t v = 0; v < d.variables; ++v) {
      for (std::size_t r = 0; r <= d.order; ++r) {
        const double weight = ws * std::pow(s, static_cast<double>(r));
        const Eigen::Index i = next_row({RowKind::kSmoothBackward, t, v, r}, weight, 0.0);
        sys.matrix(i, static_cast<Eigen::Index>(column(d, t, v, r))) += 1.0;
        for (std::size_t rp = r; rp <= d.order; ++rp) {
          sys.matrix(i, static_cast<Eigen::Index>(column(d, t + 1, v, rp))) -=
              std::pow(-s, static_cast<double>(rp - r)) / factorial(rp - r);
        }
      }
    }
  }
  return sys;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_normal(const DenseSystem& system) {
  Eigen::LLT<Eigen::MatrixXd> llt(system.normal_matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularNormalMatrix, "A^T W A is not positive definite");
  }
  return llt;
}

Solution to_solution(const Dimensions& dims, const Eigen::VectorXd& y) {
  return Solution{dims, std::vector<double>(y.data(), y.data() + y.size())};
}

}  // namespace

Solution solve_dense(const DenseSystem& system) {
  const Eigen::LLT<Eigen::MatrixXd> llt = factor_normal(system);
  return to_solution(system.dims, llt.solve(system.normal_rhs()));
}

DenseGradientResult solve_dense_with_gradient(const DenseSystem& system,
                                              std::span<const double> dl_dy) {
  if (dl_dy.size() != system.dims.unknowns()) {
    throw Error(ErrorCode::kShapeMismatch, "dl_dy does not match the system");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt = factor_normal(system);
  const Eigen::VectorXd y = llt.solve(system.normal_rhs());
  const Eigen::Map<const Eigen::VectorXd> g(dl_dy.data(), static_cast<Eigen::Index>(dl_dy.size()));
  DenseGradientResult out{to_solution(system.dims, y), llt.solve(g), {}};
  out.d_matrix = -out.d_rhs * y.transpose();
  return out;
}

std::size_t dense_retained_bytes(const Dimensions& dims) {
  const std::size_t m = dims.constraints();
  const std::size_t n = dims.unknowns();
  return (m * n + 3 * n * n + 2 * m + 4 * n) * sizeof(double);
}

}  // namespace mechband
