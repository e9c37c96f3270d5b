#include "hystrl/lyapunov.hpp"

#include "hystrl/error.hpp"
#include "hystrl/plant.hpp"

namespace hystrl {

bool is_spd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.isApprox(m.transpose(), 1e-12)) return false;
  return Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success;
}

double lyapunov_residual(const Eigen::MatrixXd& a, const LyapunovPair& pair) {
  return (a.transpose() * pair.P + pair.P * a + pair.Q).cwiseAbs().maxCoeff();
}

namespace {

// Index of P(i, j), i <= j, in the packed upper triangle.
Eigen::Index packed(Eigen::Index i, Eigen::Index j, Eigen::Index n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

Eigen::MatrixXd unpack(const Eigen::VectorXd& v, Eigen::Index n) {
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = v[packed(i, j, n)];
  return p;
}

}  // namespace

LyapunovPair lyapunov_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n) throw Error(Errc::dimension_mismatch, "A and Q must be n x n");
  if (!is_hurwitz(a)) throw Error(Errc::not_hurwitz, "Lyapunov equation needs a Hurwitz A");
  if (!is_spd(q)) throw Error(Errc::invalid_argument, "Q must be symmetric positive definite");

  const Eigen::Index unknowns = n * (n + 1) / 2;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(unknowns, unknowns);
  Eigen::VectorXd rhs(unknowns);
  // Row (r, c), r <= c: sum_l A(l, r) P(l, c) + P(r, l) A(l, c) = -Q(r, c).
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = r; c < n; ++c) {
      const Eigen::Index row = packed(r, c, n);
      rhs[row] = -q(r, c);
      for (Eigen::Index l = 0; l < n; ++l) {
        k(row, packed(l, c, n)) += a(l, r);
        k(row, packed(r, l, n)) += a(l, c);
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  if (!lu.isInvertible()) throw Error(Errc::singular_system, "Lyapunov system is singular");
  Eigen::VectorXd v = lu.solve(rhs);
  v += lu.solve(rhs - k * v);

  LyapunovPair pair{q, unpack(v, n)};
  pair.P = 0.5 * (pair.P + pair.P.transpose());
  if (Eigen::LLT<Eigen::MatrixXd>(pair.P).info() != Eigen::Success) {
    throw Error(Errc::singular_system, "Lyapunov solution is not positive definite");
  }
  return pair;
}

}  // namespace hystrl
