#include "mor/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mor/parallel.hpp"

namespace mor {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string dims(const char* what, Eigen::Index r, Eigen::Index c) {
  std::ostringstream os;
  os << what << " is " << r << "x" << c;
  return os.str();
}

bool all_finite(const CVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
  return true;
}

}  // namespace

LtiSystem LtiSystem::dense(Mat E, Mat A, Vec b, Vec c, double d) {
  LtiSystem s;
  s.storage_ = Storage::dense;
  s.E_ = std::move(E);
  s.A_ = std::move(A);
  s.b_ = std::move(b);
  s.c_ = std::move(c);
  s.d_ = d;
  s.validate();
  return s;
}

LtiSystem LtiSystem::sparse(SpMat E, SpMat A, Vec b, Vec c, double d) {
  LtiSystem s;
  s.storage_ = Storage::sparse;
  s.Es_ = std::move(E);
  s.As_ = std::move(A);
  s.Es_.makeCompressed();
  s.As_.makeCompressed();
  s.b_ = std::move(b);
  s.c_ = std::move(c);
  s.d_ = d;
  s.validate();
  return s;
}

LtiSystem LtiSystem::standard(Mat A, Vec b, Vec c, double d) {
  const auto n = A.rows();
  return dense(Mat::Identity(n, n), std::move(A), std::move(b), std::move(c), d);
}

LtiSystem LtiSystem::static_gain(double d) {
  LtiSystem s;
  s.E_.resize(0, 0);
  s.A_.resize(0, 0);
  s.b_.resize(0);
  s.c_.resize(0);
  s.d_ = d;
  return s;
}

void LtiSystem::validate() const {
  const auto n = b_.size();
  const bool sp = storage_ == Storage::sparse;
  const auto Er = sp ? Es_.rows() : E_.rows(), Ec = sp ? Es_.cols() : E_.cols();
  const auto Ar = sp ? As_.rows() : A_.rows(), Ac = sp ? As_.cols() : A_.cols();
  if (Ar != Ac) fail(ErrorKind::DimensionMismatch, dims("A", Ar, Ac) + ", expected square");
  if (Er != Ec || Er != Ar) fail(ErrorKind::DimensionMismatch, dims("E", Er, Ec) + " but " + dims("A", Ar, Ac));
  if (n != Ar) fail(ErrorKind::DimensionMismatch, "b has length " + std::to_string(n) + " but A has order " + std::to_string(Ar));
  if (c_.size() != n) fail(ErrorKind::DimensionMismatch, "c has length " + std::to_string(c_.size()) + " but b has length " + std::to_string(n));
  if (n == 0) return;

  if (sp) {
    Eigen::SparseLU<SpMat> lu;
    lu.compute(Es_);
    if (lu.info() != Eigen::Success) fail(ErrorKind::SingularE, "sparse LU of E failed");
  } else {
    Eigen::PartialPivLU<Mat> lu(E_);
    if (!(lu.rcond() > 10 * kEps)) fail(ErrorKind::SingularE, "E is numerically singular");
  }
}

Mat LtiSystem::E_dense(int cap) const {
  if (order() > cap) fail(ErrorKind::DimensionTooLarge, "order " + std::to_string(order()) + " exceeds dense cap " + std::to_string(cap));
  return storage_ == Storage::dense ? E_ : Mat(Es_);
}

Mat LtiSystem::A_dense(int cap) const {
  if (order() > cap) fail(ErrorKind::DimensionTooLarge, "order " + std::to_string(order()) + " exceeds dense cap " + std::to_string(cap));
  return storage_ == Storage::dense ? A_ : Mat(As_);
}

SpMat LtiSystem::E_sparse() const { return storage_ == Storage::sparse ? Es_ : SpMat(E_.sparseView()); }
SpMat LtiSystem::A_sparse() const { return storage_ == Storage::sparse ? As_ : SpMat(A_.sparseView()); }

const Mat& LtiSystem::dense_E() const {
  if (storage_ != Storage::dense) fail(ErrorKind::InvalidInput, "system has sparse storage");
  return E_;
}
const Mat& LtiSystem::dense_A() const {
  if (storage_ != Storage::dense) fail(ErrorKind::InvalidInput, "system has sparse storage");
  return A_;
}
const SpMat& LtiSystem::sparse_E() const {
  if (storage_ != Storage::sparse) fail(ErrorKind::InvalidInput, "system has dense storage");
  return Es_;
}
const SpMat& LtiSystem::sparse_A() const {
  if (storage_ != Storage::sparse) fail(ErrorKind::InvalidInput, "system has dense storage");
  return As_;
}

LtiSystem LtiSystem::with_d(double d) const {
  LtiSystem s = *this;
  s.d_ = d;
  return s;
}

// ---------------------------------------------------------------------------

struct ShiftedSolver::SparseImpl {
  Eigen::SparseLU<CSpMat, Eigen::COLAMDOrdering<int>> lu;
};

ShiftedSolver::ShiftedSolver(const LtiSystem& sys, cplx s) : s_(s) {
  const int n = sys.order();
  if (n == 0) return;
  if (sys.storage() == Storage::dense) {
    CMat M = s * sys.dense_E().cast<cplx>() - sys.dense_A().cast<cplx>();
    const double scale = M.cwiseAbs().maxCoeff();
    dense_.emplace(M);
    if (!(scale > 0.0) || !(dense_->rcond() > kEps))
      fail(ErrorKind::SingularShift, "sE - A is numerically singular at s = " + std::to_string(s.real()) + "+" + std::to_string(s.imag()) + "j");
  } else {
    CSpMat M = s * sys.sparse_E().cast<cplx>() - sys.sparse_A().cast<cplx>();
    M.makeCompressed();
    sparse_ = std::make_unique<SparseImpl>();
    sparse_->lu.analyzePattern(M);
    sparse_->lu.factorize(M);
    if (sparse_->lu.info() != Eigen::Success)
      fail(ErrorKind::SingularShift, "sparse LU of sE - A failed at s = " + std::to_string(s.real()) + "+" + std::to_string(s.imag()) + "j");
  }
}

ShiftedSolver::~ShiftedSolver() = default;
ShiftedSolver::ShiftedSolver(ShiftedSolver&&) noexcept = default;
ShiftedSolver& ShiftedSolver::operator=(ShiftedSolver&&) noexcept = default;

CVec ShiftedSolver::solve(const CVec& rhs) const {
  if (rhs.size() == 0) return rhs;
  CVec x = dense_ ? CVec(dense_->solve(rhs)) : CVec(sparse_->lu.solve(rhs));
  if (!all_finite(x)) fail(ErrorKind::SingularShift, "non-finite solution of shifted system");
  return x;
}

CVec ShiftedSolver::solve_transposed(const CVec& rhs) const {
  if (rhs.size() == 0) return rhs;
  CVec x = dense_ ? CVec(dense_->transpose().solve(rhs)) : CVec(sparse_->lu.transpose().solve(rhs));
  if (!all_finite(x)) fail(ErrorKind::SingularShift, "non-finite solution of transposed shifted system");
  return x;
}

cplx eval(const LtiSystem& sys, cplx s) {
  if (sys.order() == 0) return sys.d();
  ShiftedSolver solver(sys, s);
  const CVec x = solver.solve(sys.b().cast<cplx>());
  return sys.c().cast<cplx>().dot(x) + sys.d();  // dot() conjugates its first argument; c is real
}

TransferSample eval_deriv(const LtiSystem& sys, cplx s) {
  if (sys.order() == 0) return {s, sys.d(), 0.0};
  ShiftedSolver solver(sys, s);
  const CVec x = solver.solve(sys.b().cast<cplx>());
  const CVec y = solver.solve_transposed(sys.c().cast<cplx>());
  const cplx value = (sys.c().cast<cplx>().transpose() * x)(0) + sys.d();
  CVec Ex = sys.storage() == Storage::dense ? CVec(sys.dense_E().cast<cplx>() * x)
                                            : CVec(sys.sparse_E().cast<cplx>() * x);
  const cplx deriv = -(y.transpose() * Ex)(0);
  return {s, value, deriv};
}

std::vector<cplx> eval_many(const LtiSystem& sys, std::span<const cplx> points) {
  return parallel_map(points.size(), [&](std::size_t i) { return eval(sys, points[i]); });
}

namespace {

std::vector<cplx> sorted_poles(std::vector<cplx> p) {
  std::sort(p.begin(), p.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return p;
}

// Eigenvalues of E^{-1} A for real data; conjugate pairs come out exact.
std::vector<cplx> real_pencil_eigs(const Mat& E, const Mat& A) {
  const auto n = A.rows();
  if (n == 0) return {};
  Mat S;
  if (E.isIdentity(0.0)) {
    S = A;
  } else {
    Eigen::PartialPivLU<Mat> lu(E);
    S = lu.solve(A);
  }
  Eigen::EigenSolver<Mat> es(S, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::SingularPencil, "eigenvalue iteration did not converge");
  std::vector<cplx> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  return sorted_poles(std::move(out));
}

}  // namespace

std::vector<cplx> poles(const LtiSystem& sys, int cap) {
  if (sys.order() > cap)
    fail(ErrorKind::DimensionTooLarge, "order " + std::to_string(sys.order()) + " exceeds dense eigenvalue cap " + std::to_string(cap));
  return real_pencil_eigs(sys.E_dense(cap), sys.A_dense(cap));
}

bool is_stable(const LtiSystem& sys, double margin, int cap) {
  for (const cplx& p : poles(sys, cap))
    if (!(p.real() < -margin)) return false;
  return true;
}

bool is_state_space_symmetric(const LtiSystem& sys, double tol) {
  const int n = sys.order();
  if (n == 0) return false;
  const double bscale = std::max(sys.b().norm(), sys.c().norm());
  if ((sys.b() - sys.c()).norm() > tol * bscale) return false;
  const SpMat E = sys.E_sparse(), A = sys.A_sparse();
  const SpMat Et = E.transpose(), At = A.transpose();
  const double escale = E.norm(), ascale = A.norm();
  if (SpMat(E - Et).norm() > tol * escale) return false;
  if (SpMat(A - At).norm() > tol * std::max(ascale, 1e-300)) return false;
  // E > 0: a Cholesky factorization must succeed.
  Eigen::SimplicialLLT<SpMat> llt(E);
  return llt.info() == Eigen::Success;
}

LtiSystem block_difference(const LtiSystem& a, const LtiSystem& b) {
  const int na = a.order(), nb = b.order(), n = na + nb;
  if (n == 0) return LtiSystem::static_gain(a.d() - b.d());
  Vec bb(n), cc(n);
  bb << a.b(), b.b();
  cc << a.c(), -b.c();
  const double d = a.d() - b.d();
  if (a.storage() == Storage::sparse || b.storage() == Storage::sparse) {
    std::vector<Eigen::Triplet<double>> te, ta;
    auto push = [](std::vector<Eigen::Triplet<double>>& t, const SpMat& m, int off) {
      for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it) t.emplace_back(static_cast<int>(it.row()) + off, static_cast<int>(it.col()) + off, it.value());
    };
    if (na) {
      push(te, a.E_sparse(), 0);
      push(ta, a.A_sparse(), 0);
    }
    if (nb) {
      push(te, b.E_sparse(), na);
      push(ta, b.A_sparse(), na);
    }
    SpMat E(n, n), A(n, n);
    E.setFromTriplets(te.begin(), te.end());
    A.setFromTriplets(ta.begin(), ta.end());
    return LtiSystem::sparse(std::move(E), std::move(A), std::move(bb), std::move(cc), d);
  }
  Mat E = Mat::Zero(n, n), A = Mat::Zero(n, n);
  if (na) {
    E.topLeftCorner(na, na) = a.dense_E();
    A.topLeftCorner(na, na) = a.dense_A();
  }
  if (nb) {
    E.bottomRightCorner(nb, nb) = b.dense_E();
    A.bottomRightCorner(nb, nb) = b.dense_A();
  }
  return LtiSystem::dense(std::move(E), std::move(A), std::move(bb), std::move(cc), d);
}

// ---------------------------------------------------------------------------

FrequencyGrid::FrequencyGrid(std::vector<double> points, Spacing spacing)
    : points_(std::move(points)), spacing_(spacing) {
  if (points_.empty()) fail(ErrorKind::InvalidInput, "frequency grid is empty");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) fail(ErrorKind::InvalidInput, "frequency grid has a non-finite point");
    if (i > 0 && !(points_[i] > points_[i - 1])) fail(ErrorKind::InvalidInput, "frequency grid is not strictly increasing");
  }
}

FrequencyGrid FrequencyGrid::logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 1) fail(ErrorKind::InvalidInput, "invalid log-spaced grid bounds");
  std::vector<double> p(static_cast<std::size_t>(count));
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i)
    p[static_cast<std::size_t>(i)] = count == 1 ? lo : std::pow(10.0, a + (b - a) * i / (count - 1));
  return FrequencyGrid(std::move(p), Spacing::logarithmic);
}

FrequencyGrid FrequencyGrid::linspace(double lo, double hi, int count) {
  if (!(hi > lo) || count < 1) fail(ErrorKind::InvalidInput, "invalid linear grid bounds");
  std::vector<double> p(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) p[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return FrequencyGrid(std::move(p), Spacing::linear);
}

}  // namespace mor
