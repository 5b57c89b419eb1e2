#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "mor/error.hpp"

namespace mor {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<double>;
using CSpMat = Eigen::SparseMatrix<cplx>;

/// Largest order for which dense eigen-, Lyapunov- and Hamiltonian-based
/// routines are attempted.
inline constexpr int kDefaultDenseCap = 5000;

enum class Storage { dense, sparse };

/// Continuous-time SISO descriptor system E x' = A x + b u, y = c^T x + d u,
/// with E nonsingular.
class LtiSystem {
 public:
  /// The empty (order 0) system with zero gain.
  LtiSystem() = default;

  static LtiSystem dense(Mat E, Mat A, Vec b, Vec c, double d = 0.0);
  static LtiSystem sparse(SpMat E, SpMat A, Vec b, Vec c, double d = 0.0);
  /// E = identity, dense storage.
  static LtiSystem standard(Mat A, Vec b, Vec c, double d = 0.0);
  /// Order-0 system H(s) = d.
  static LtiSystem static_gain(double d);

  int order() const noexcept { return static_cast<int>(b_.size()); }
  Storage storage() const noexcept { return storage_; }
  double d() const noexcept { return d_; }
  const Vec& b() const noexcept { return b_; }
  const Vec& c() const noexcept { return c_; }

  /// Dense copies; DimensionTooLarge when order() exceeds `cap`.
  Mat E_dense(int cap = kDefaultDenseCap) const;
  Mat A_dense(int cap = kDefaultDenseCap) const;
  SpMat E_sparse() const;
  SpMat A_sparse() const;

  /// Direct access to the stored matrices of the matching storage kind.
  const Mat& dense_E() const;
  const Mat& dense_A() const;
  const SpMat& sparse_E() const;
  const SpMat& sparse_A() const;

  LtiSystem with_d(double d) const;

 private:
  void validate() const;

  Storage storage_ = Storage::dense;
  Mat E_, A_;
  SpMat Es_, As_;
  Vec b_, c_;
  double d_ = 0.0;
};

/// H(s) together with H'(s) at one point.
struct TransferSample {
  cplx point;
  cplx value;
  cplx derivative;
};

/// One factorization of (sE - A) reused for solves with it and its transpose.
class ShiftedSolver {
 public:
  ShiftedSolver(const LtiSystem& sys, cplx s);
  ~ShiftedSolver();
  ShiftedSolver(ShiftedSolver&&) noexcept;
  ShiftedSolver& operator=(ShiftedSolver&&) noexcept;

  cplx shift() const noexcept { return s_; }
  /// (sE - A)^{-1} rhs
  CVec solve(const CVec& rhs) const;
  /// (sE - A)^{-T} rhs (plain transpose, no conjugation)
  CVec solve_transposed(const CVec& rhs) const;

 private:
  struct SparseImpl;
  cplx s_;
  std::optional<Eigen::PartialPivLU<CMat>> dense_;
  std::unique_ptr<SparseImpl> sparse_;
};

cplx eval(const LtiSystem& sys, cplx s);
TransferSample eval_deriv(const LtiSystem& sys, cplx s);
/// Pointwise evaluation over many shifts; output order follows input order.
std::vector<cplx> eval_many(const LtiSystem& sys, std::span<const cplx> points);

std::vector<cplx> poles(const LtiSystem& sys, int cap = kDefaultDenseCap);
bool is_stable(const LtiSystem& sys, double margin = 0.0, int cap = kDefaultDenseCap);

/// E = E^T > 0, A = A^T and b = c, all to `tol` relative.
bool is_state_space_symmetric(const LtiSystem& sys, double tol = 1e-12);

/// Realization of a(s) - b(s) as a block-diagonal system of order
/// a.order() + b.order(). Sparse storage if either operand is sparse.
LtiSystem block_difference(const LtiSystem& a, const LtiSystem& b);

/// Complex-valued dense descriptor realization. Reduced models, Loewner
/// surrogates and residual systems are all carried in this form.
struct DenseModel {
  CMat E, A;
  CVec b, c;
  cplx d{0.0, 0.0};

  int order() const noexcept { return static_cast<int>(b.size()); }
};

cplx eval(const DenseModel& m, cplx s);
TransferSample eval_deriv(const DenseModel& m, cplx s);
std::vector<cplx> poles(const DenseModel& m);
/// True if every imaginary part is at most `tol` times the largest entry.
bool is_real(const DenseModel& m, double tol = 0.0);
DenseModel to_dense_model(const LtiSystem& sys, int cap = kDefaultDenseCap);
/// Drops imaginary parts; NotConjugateClosed if they exceed 1e-10 relative.
LtiSystem to_system(const DenseModel& m);
DenseModel block_difference(const DenseModel& a, const DenseModel& b);

/// Evaluates c^T (sE - A)^{-1} b + d in O(n^2) per point after an O(n^3)
/// reduction of E^{-1}A to Hessenberg form.
class FastEvaluator {
 public:
  explicit FastEvaluator(const DenseModel& m);
  cplx operator()(cplx s) const;
  int order() const noexcept { return static_cast<int>(bt_.size()); }

 private:
  CMat H_;
  CVec bt_, ct_;
  cplx d_;
};

enum class Spacing { linear, logarithmic };

/// Strictly increasing, finite, nonempty list of real frequencies (rad/s).
class FrequencyGrid {
 public:
  FrequencyGrid(std::vector<double> points, Spacing spacing);
  static FrequencyGrid logspace(double lo, double hi, int count);
  static FrequencyGrid linspace(double lo, double hi, int count);

  const std::vector<double>& points() const noexcept { return points_; }
  Spacing spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<double> points_;
  Spacing spacing_;
};

}  // namespace mor
