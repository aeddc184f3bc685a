#include "stheat/infsup.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace stheat {

namespace {

Eigen::MatrixXd block_diagonal(const std::vector<Eigen::MatrixXd>& blocks) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& g, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error(std::string("infsup: Gram matrix ") + what +
                            " is not positive definite");
  }
  return llt.matrixL();
}

// L_left^{-1} b L_right^{-T}
Eigen::VectorXd whitened_singular_values(const Eigen::MatrixXd& b, const Eigen::MatrixXd& g_left,
                                         const Eigen::MatrixXd& g_right) {
  const Eigen::MatrixXd l_left = cholesky_factor(g_left, "of the row space");
  const Eigen::MatrixXd l_right = cholesky_factor(g_right, "of the column space");
  Eigen::MatrixXd m = l_left.triangularView<Eigen::Lower>().solve(b);
  m = l_right.triangularView<Eigen::Lower>().solve(m.transpose()).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues();
}

DiscreteConstants extremes(const std::vector<Eigen::VectorXd>& svs) {
  DiscreteConstants c;
  c.c_B = std::numeric_limits<double>::infinity();
  for (const auto& s : svs) {
    const double top = s.maxCoeff();
    double low = s.minCoeff();
    if (low <= 1e-14 * top) low = 0.0;
    c.c_B = std::min(c.c_B, low);
    c.C_B = std::max(c.C_B, top);
  }
  if (svs.empty()) c.c_B = 0.0;
  return c;
}

// Maximises fn over the angle on [0, 2 pi) by a uniform scan followed by
// successive zooms around the best sample.
double scan_circle(const std::function<double(double)>& fn, std::size_t samples, bool maximise) {
  const double sign = maximise ? 1.0 : -1.0;
  double best_angle = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  double spacing = 2.0 * std::numbers::pi / static_cast<double>(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = spacing * static_cast<double>(i);
    const double v = sign * fn(a);
    if (v > best) {
      best = v;
      best_angle = a;
    }
  }
  for (int round = 0; round < 4; ++round) {
    const double centre = best_angle;
    const double lo = centre - spacing;
    constexpr int kZoom = 64;
    const double step = 2.0 * spacing / kZoom;
    for (int i = 0; i <= kZoom; ++i) {
      const double a = lo + step * i;
      const double v = sign * fn(a);
      if (v > best) {
        best = v;
        best_angle = a;
      }
    }
    spacing = step;
  }
  return sign * best;
}

}  // namespace

DiscreteForm DiscreteForm::from_matrices(Eigen::MatrixXd b, Eigen::MatrixXd gx,
                                         Eigen::MatrixXd gy) {
  if (gx.rows() != gx.cols() || gy.rows() != gy.cols() || gy.rows() != b.rows() ||
      gx.rows() != b.cols()) {
    throw std::invalid_argument("DiscreteForm: matrix dimensions do not match");
  }
  DiscreteForm f;
  f.N = static_cast<std::size_t>(std::max<Eigen::Index>(b.rows(), 1) - 1);
  f.test_refinement = 0;
  f.B.push_back(std::move(b));
  f.GX.push_back(std::move(gx));
  f.GY.push_back(std::move(gy));
  return f;
}

Eigen::MatrixXd DiscreteForm::dense_B() const { return block_diagonal(B); }
Eigen::MatrixXd DiscreteForm::dense_GX() const { return block_diagonal(GX); }
Eigen::MatrixXd DiscreteForm::dense_GY() const { return block_diagonal(GY); }

DiscreteForm assemble_form(double kappa, const TimeGrid& grid, const EigenBasis& basis,
                           double beta, std::size_t test_refinement) {
  if (!(kappa > 0.0)) throw std::invalid_argument("assemble_form: kappa must be positive");
  if (beta < 0.0) throw std::invalid_argument("assemble_form: beta must be nonnegative");
  if (test_refinement == 0) throw std::invalid_argument("assemble_form: test_refinement >= 1");
  const std::size_t N = grid.N();
  const std::size_t r = test_refinement;
  const auto rows = static_cast<Eigen::Index>(N + 1);
  const auto cols = static_cast<Eigen::Index>(r * N + 1);
  const double h = grid.h();
  const double hf = h / static_cast<double>(r);

  // Mass and stiffness matrices of the test hats on [0, T].
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(cols, cols);
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(cols, cols);
  for (Eigen::Index n = 0; n < cols - 1; ++n) {
    mass(n, n) += 2.0 * hf / 6.0;
    mass(n + 1, n + 1) += 2.0 * hf / 6.0;
    mass(n, n + 1) += hf / 6.0;
    mass(n + 1, n) += hf / 6.0;
    stiff(n, n) += 1.0 / hf;
    stiff(n + 1, n + 1) += 1.0 / hf;
    stiff(n, n + 1) -= 1.0 / hf;
    stiff(n + 1, n) -= 1.0 / hf;
  }
  Eigen::MatrixXd ends = Eigen::MatrixXd::Zero(cols, cols);
  ends(0, 0) = 1.0;
  ends(cols - 1, cols - 1) += 1.0;

  DiscreteForm f;
  f.beta = beta;
  f.kappa = kappa;
  f.N = N;
  f.test_refinement = r;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double lambda = basis.lambda(j);
    const double klh = kappa * lambda * hf;
    // Trial u_n is constant on the r fine cells of I_n; each fine cell
    // [s_k, s_{k+1}] adds u_n (x_k - x_{k+1}) + u_n kappa lambda hf (x_k + x_{k+1}) / 2.
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index n = 0; n < rows - 1; ++n) {
      for (std::size_t c = 0; c < r; ++c) {
        const Eigen::Index k = n * static_cast<Eigen::Index>(r) + static_cast<Eigen::Index>(c);
        b(n, k) += 1.0 + 0.5 * klh;
        b(n, k + 1) += -1.0 + 0.5 * klh;
      }
    }
    b(rows - 1, cols - 1) = 1.0;

    Eigen::MatrixXd gy = Eigen::MatrixXd::Zero(rows, rows);
    for (Eigen::Index n = 0; n < rows - 1; ++n) gy(n, n) = std::pow(lambda, 1.0 + beta) * h;
    gy(rows - 1, rows - 1) = std::pow(lambda, beta);

    Eigen::MatrixXd gx = std::pow(lambda, 1.0 - beta) * mass +
                         std::pow(lambda, -1.0 - beta) * stiff + std::pow(lambda, -beta) * ends;
    f.B.push_back(std::move(b));
    f.GX.push_back(std::move(gx));
    f.GY.push_back(std::move(gy));
  }
  return f;
}

DiscreteConstants discrete_constants(const DiscreteForm& form) {
  std::vector<Eigen::VectorXd> svs;
  svs.reserve(form.blocks());
  for (std::size_t k = 0; k < form.blocks(); ++k) {
    svs.push_back(whitened_singular_values(form.B[k], form.GY[k], form.GX[k]));
  }
  return extremes(svs);
}

double enriched_infsup(double kappa, const TimeGrid& grid, const EigenBasis& basis, double beta,
                       std::size_t test_refinement) {
  if (!(kappa > 0.0)) throw std::invalid_argument("enriched_infsup: kappa must be positive");
  if (beta < 0.0) throw std::invalid_argument("enriched_infsup: beta must be nonnegative");
  if (test_refinement == 0) throw std::invalid_argument("enriched_infsup: test_refinement >= 1");
  const auto N = static_cast<Eigen::Index>(grid.N());
  const auto r = static_cast<Eigen::Index>(test_refinement);
  const Eigen::Index cols = r * N + 1;
  const double h = grid.h();
  const double hf = h / static_cast<double>(r);
  double c_min = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double lambda = basis.lambda(j);
    const double wm = std::pow(lambda, 1.0 - beta);
    const double wk = std::pow(lambda, -1.0 - beta);
    const double we = std::pow(lambda, -beta);
    // Tridiagonal G_X: diag d, off-diagonal e.
    Eigen::VectorXd d = Eigen::VectorXd::Constant(cols, 2.0 * (wm * 2.0 * hf / 6.0 + wk / hf));
    d(0) = wm * 2.0 * hf / 6.0 + wk / hf + we;
    d(cols - 1) = d(0);
    const double e = wm * hf / 6.0 - wk / hf;

    const double klh = kappa * lambda * hf;
    const double lo = -1.0 + 0.5 * klh;  // coefficient on the right node of a fine cell
    const double hi = 1.0 + 0.5 * klh;   // on the left node
    // Columns of B^T: row n (< N) of B touches fine nodes nr .. (n+1)r.
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor z = RowMajor::Zero(cols, N + 1);
    for (Eigen::Index n = 0; n < N; ++n) {
      for (Eigen::Index c = 0; c < r; ++c) {
        z(n * r + c, n) += hi;
        z(n * r + c + 1, n) += lo;
      }
    }
    z(cols - 1, N) = 1.0;

    // Thomas algorithm for G_X z = B^T, all right-hand sides at once. The
    // columns decay geometrically away from their support in stiff modes;
    // flushing the tail avoids subnormal arithmetic.
    const auto flush = [](double v) { return std::abs(v) < 1e-280 ? 0.0 : v; };
    Eigen::VectorXd cp(cols);
    cp(0) = e / d(0);
    z.row(0) /= d(0);
    for (Eigen::Index i = 1; i < cols; ++i) {
      const double m = d(i) - e * cp(i - 1);
      cp(i) = e / m;
      z.row(i) = ((z.row(i) - e * z.row(i - 1)) / m).unaryExpr(flush);
    }
    for (Eigen::Index i = cols - 2; i >= 0; --i) {
      z.row(i) = (z.row(i) - cp(i) * z.row(i + 1)).unaryExpr(flush);
    }

    // s = B z using the r + 1 nonzeros of each row of B.
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (Eigen::Index n = 0; n < N; ++n) {
      for (Eigen::Index c = 0; c < r; ++c) {
        s.row(n) += hi * z.row(n * r + c) + lo * z.row(n * r + c + 1);
      }
    }
    s.row(N) = z.row(cols - 1);
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::VectorXd gy = Eigen::VectorXd::Constant(N + 1, std::pow(lambda, 1.0 + beta) * h);
    gy(N) = std::pow(lambda, beta);
    const Eigen::VectorXd scale = gy.cwiseSqrt().cwiseInverse();
    s = scale.asDiagonal() * s * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    c_min = std::min(c_min, std::sqrt(std::max(0.0, eig.eigenvalues()(0))));
  }
  return basis.size() ? c_min : 0.0;
}

std::size_t default_test_refinement(double kappa, const TimeGrid& grid, const EigenBasis& basis) {
  const double stiff = kappa * basis.lambda(basis.size() - 1) * grid.h();
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(stiff)));
}

double swap_check(const DiscreteForm& form) {
  std::vector<Eigen::VectorXd> direct;
  std::vector<Eigen::VectorXd> swapped;
  for (std::size_t k = 0; k < form.blocks(); ++k) {
    if (form.B[k].rows() != form.B[k].cols()) {
      throw std::invalid_argument(
          "swap_check: B must be square; use equal trial and test dimensions per block");
    }
    direct.push_back(whitened_singular_values(form.B[k], form.GY[k], form.GX[k]));
    swapped.push_back(whitened_singular_values(form.B[k].transpose(), form.GX[k], form.GY[k]));
  }
  return std::abs(extremes(direct).c_B - extremes(swapped).c_B);
}

Bnb2Report bnb2_check(const DiscreteForm& form, double a_min) {
  // For each y the sup over x of B*(y, x) / ||x|| is the X-dual norm of row
  // y^T B, so the inf over y is the smallest singular value of the whitened
  // transposed problem.
  std::vector<Eigen::VectorXd> svs;
  for (std::size_t k = 0; k < form.blocks(); ++k) {
    const Eigen::MatrixXd l_y = cholesky_factor(form.GY[k], "of the trial space");
    const Eigen::MatrixXd l_x = cholesky_factor(form.GX[k], "of the test space");
    Eigen::MatrixXd m = l_x.triangularView<Eigen::Lower>().solve(form.B[k].transpose());
    m = l_y.triangularView<Eigen::Lower>().solve(m.transpose()).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const Eigen::VectorXd& s = svd.singularValues();
    // inf over y lives in the row dimension of B; only min(rows, cols)
    // singular values exist, a taller B has a zero direction.
    if (form.B[k].rows() > form.B[k].cols()) {
      svs.push_back(Eigen::VectorXd::Zero(1));
    } else {
      svs.push_back(s);
    }
  }
  Bnb2Report r;
  r.value = extremes(svs).c_B;
  r.threshold = std::min(1.0, a_min);
  return r;
}

double bnb2_brute_force_2x2(const DiscreteForm& form, std::size_t samples) {
  if (form.blocks() != 1 || form.B[0].rows() != 2 || form.B[0].cols() != 2) {
    throw std::invalid_argument("bnb2_brute_force_2x2: needs a single 2 x 2 block");
  }
  if (samples < 8) throw std::invalid_argument("bnb2_brute_force_2x2: too few samples");
  const Eigen::Matrix2d b = form.B[0];
  const Eigen::Matrix2d gx = form.GX[0];
  const Eigen::Matrix2d gy = form.GY[0];
  auto sup_x = [&](const Eigen::Vector2d& y) {
    const double ny = std::sqrt(y.dot(gy * y));
    return scan_circle(
        [&](double a) {
          const Eigen::Vector2d x(std::cos(a), std::sin(a));
          return y.dot(b * x) / (ny * std::sqrt(x.dot(gx * x)));
        },
        samples, true);
  };
  return scan_circle([&](double a) { return sup_x(Eigen::Vector2d(std::cos(a), std::sin(a))); },
                     samples, false);
}

double node_embedding_ratio(const DiscreteForm& form, std::size_t block, const Eigen::VectorXd& x,
                            const EigenBasis& basis) {
  if (block >= form.blocks() || x.size() != form.GX[block].rows()) {
    throw std::invalid_argument("node_embedding_ratio: block or vector size");
  }
  const double weight = std::pow(basis.lambda(block), -form.beta);
  const double xnorm2 = x.dot(form.GX[block] * x);
  return weight * x.cwiseAbs2().maxCoeff() / xnorm2;
}

double infsup_lower_bound(double a_min, double a_max) {
  return 0.5 * std::min({a_min, 1.0 / a_max, a_min / a_max});
}

double boundedness_upper_bound(double a_max) {
  return std::sqrt(2.0 * std::max(1.0, a_max * a_max));
}

}  // namespace stheat
