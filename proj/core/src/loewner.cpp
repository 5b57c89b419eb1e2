#include "mor/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/SVD>

#include "mor/parallel.hpp"

namespace mor {

namespace {

bool too_close(cplx a, cplx b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

template <typename M>
Vec singular_values_impl(const M& A) {
  if (A.size() == 0) return Vec();
  Eigen::BDCSVD<M> svd(A);
  return svd.singularValues();
}
Vec singular_values_of(const CMat& A) { return singular_values_impl(A); }
Vec singular_values_of(const Mat& A) { return singular_values_impl(A); }

// Index of conj(s_i) in the data, or -1. Real points pair with themselves.
int conjugate_partner(const std::vector<TransferSample>& samples, int i) {
  const TransferSample& a = samples[static_cast<std::size_t>(i)];
  const double vtol = 1e-10 * (std::abs(a.value) + std::abs(a.derivative) + 1e-300);
  for (int j = 0; j < static_cast<int>(samples.size()); ++j) {
    const TransferSample& b = samples[static_cast<std::size_t>(j)];
    if (std::abs(b.point - std::conj(a.point)) > 1e-12 * std::abs(a.point)) continue;
    if (std::abs(b.value - std::conj(a.value)) > vtol || std::abs(b.derivative - std::conj(a.derivative)) > vtol) return -1;
    return j;
  }
  return -1;
}

// Real congruence of a conjugate-symmetric pencil. Each pair (i, j) maps to
// columns (e_i + e_j)/sqrt2 and i(e_i - e_j)/sqrt2; real points map to e_i.
struct RealTransform {
  std::vector<std::pair<int, int>> cols;  // (i, j); j == i for a real point, j < 0 for the imaginary combination

  CMat right(const CMat& A) const {
    CMat out(A.rows(), static_cast<Eigen::Index>(cols.size()));
    const double h = std::sqrt(0.5);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto [i, j] = cols[k];
      if (j == i) out.col(k) = A.col(i);
      else if (j >= 0) out.col(k) = h * (A.col(i) + A.col(j));
      else out.col(k) = cplx(0.0, h) * (A.col(i) - A.col(-j - 1));
    }
    return out;
  }
  Mat congruence(const CMat& A) const {
    const CMat AX = right(A);
    return right(AX.transpose()).transpose().real();
  }
  Vec left(const CVec& z) const {
    const CMat zx = right(CMat(z.transpose()));
    return zx.transpose().real();
  }
};

std::optional<RealTransform> real_transform(const std::vector<TransferSample>& samples) {
  RealTransform t;
  const int l = static_cast<int>(samples.size());
  std::vector<bool> used(static_cast<std::size_t>(l), false);
  for (int i = 0; i < l; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    const int j = conjugate_partner(samples, i);
    if (j < 0) return std::nullopt;
    used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = true;
    if (j == i) {
      t.cols.emplace_back(i, i);
    } else {
      t.cols.emplace_back(i, j);
      t.cols.emplace_back(i, -j - 1);
    }
  }
  return t;
}

int numerical_rank(const Vec& sv, double tol) {
  if (sv.size() == 0 || !(sv(0) > 0.0)) return 0;
  int k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++k;
  return k;
}

}  // namespace

std::vector<TransferSample> merge_near_duplicates(const std::vector<TransferSample>& samples, double rel_gap) {
  std::vector<TransferSample> out;
  for (const auto& s : samples) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](const TransferSample& t) { return too_close(t.point, s.point, rel_gap); });
    if (!dup) out.push_back(s);
  }
  return out;
}

namespace {

CMat complex_pencil(const LoewnerPencil& p, int i) { return p.points[static_cast<std::size_t>(i)] * p.L - p.M; }
Mat real_pencil(const LoewnerPencil& p, int i) { return std::abs(p.points[static_cast<std::size_t>(i)]) * p.Lr - p.Mr; }

Vec pivot_singular_values(const LoewnerPencil& p, int i, double* frobenius) {
  if (p.is_real()) {
    const Mat A = real_pencil(p, i);
    if (frobenius) *frobenius = A.norm();
    return singular_values_of(A);
  }
  const CMat A = complex_pencil(p, i);
  if (frobenius) *frobenius = A.norm();
  return singular_values_of(A);
}

// Pivot search that also hands back the winner's singular values.
int pick_pivot(const LoewnerPencil& p, double tol, Vec* winner_sv) {
  const int l = p.size();
  std::vector<int> order(static_cast<std::size_t>(l));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(p.points[a]) < std::abs(p.points[b]); });
  const int probes[3] = {order.front(), order[static_cast<std::size_t>(l / 2)], order.back()};
  int best = probes[0], best_rank = -1;
  double best_norm = -1.0;
  for (int t = 0; t < 3; ++t) {
    const int i = probes[t];
    if ((t > 0 && i == probes[t - 1]) || (t == 2 && i == probes[0])) continue;
    double nrm = 0.0;
    Vec sv = pivot_singular_values(p, i, &nrm);
    const int rank = numerical_rank(sv, tol);
    if (rank > best_rank || (rank == best_rank && nrm > best_norm)) {
      best_rank = rank;
      best_norm = nrm;
      best = i;
      if (winner_sv) *winner_sv = std::move(sv);
    }
  }
  return best;
}

}  // namespace

int choose_pivot(const LoewnerPencil& p, double tol) { return pick_pivot(p, tol, nullptr); }

LoewnerPencil build_pencil(const std::vector<TransferSample>& samples, double pivot_tol) {
  const int l = static_cast<int>(samples.size());
  if (l < 1) fail(ErrorKind::InvalidInput, "Loewner pencil needs at least one sample");
  for (int i = 0; i < l; ++i)
    for (int j = i + 1; j < l; ++j)
      if (too_close(samples[i].point, samples[j].point, 1e-12)) fail(ErrorKind::DuplicatePoints, "sample points coincide");

  LoewnerPencil p;
  p.L.resize(l, l);
  p.M.resize(l, l);
  p.Z.resize(l);
  for (int i = 0; i < l; ++i) {
    const auto& si = samples[static_cast<std::size_t>(i)];
    p.points.push_back(si.point);
    p.Z(i) = si.value;
    for (int j = 0; j < l; ++j) {
      if (i == j) {
        p.L(i, i) = si.derivative;
        p.M(i, i) = si.value + si.point * si.derivative;
      } else {
        const auto& sj = samples[static_cast<std::size_t>(j)];
        const cplx gap = si.point - sj.point;
        p.L(i, j) = (si.value - sj.value) / gap;
        p.M(i, j) = (si.point * si.value - sj.point * sj.value) / gap;
      }
    }
  }
  if (const auto t = real_transform(samples)) {
    p.Lr = t->congruence(p.L);
    p.Mr = t->congruence(p.M);
    p.Zr = t->left(p.Z);
  }
  p.pivot_index = pick_pivot(p, pivot_tol, &p.singular_values);
  return p;
}

RankReport check_rank_condition(const LoewnerPencil& p, double tol, bool all_points) {
  const int l = p.size();
  RankReport rep;
  if (all_points) {
    rep.probed.resize(static_cast<std::size_t>(l));
    std::iota(rep.probed.begin(), rep.probed.end(), 0);
  } else {
    std::vector<int> order(static_cast<std::size_t>(l));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(p.points[a]) < std::abs(p.points[b]); });
    rep.probed = {order.front(), order[static_cast<std::size_t>(l / 2)], order.back()};
    std::sort(rep.probed.begin(), rep.probed.end());
    rep.probed.erase(std::unique(rep.probed.begin(), rep.probed.end()), rep.probed.end());
  }
  rep.pencil_ranks = parallel_map(rep.probed.size(), [&](std::size_t k) {
    const cplx s = p.points[static_cast<std::size_t>(rep.probed[k])];
    return numerical_rank(singular_values_of(CMat(s * p.L - p.M)), tol);
  });
  CMat row(l, 2 * l), col(2 * l, l);
  row << p.L, p.M;
  col << p.L, p.M;
  rep.rank_row_block = numerical_rank(singular_values_of(row), tol);
  rep.rank_column_block = numerical_rank(singular_values_of(col), tol);
  const int pivot = p.pivot_index >= 0 ? p.pivot_index : choose_pivot(p);
  rep.numerical_rank = numerical_rank(pivot_singular_values(p, pivot, nullptr), tol);
  rep.satisfied = rep.rank_row_block == rep.rank_column_block &&
                  std::all_of(rep.pencil_ranks.begin(), rep.pencil_ranks.end(), [&](int r) { return r == rep.rank_row_block; });
  return rep;
}

namespace {

template <typename MatS, typename VecS>
Surrogate truncate(const MatS& pencil, const MatS& L, const MatS& M, const VecS& Z, int pivot, const SurrogateOrder& order) {
  const int l = static_cast<int>(pencil.rows());
  Eigen::BDCSVD<MatS> svd(pencil, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();

  int k = 0;
  if (order.fixed) {
    k = *order.fixed;
    if (k < 0 || k > l) fail(ErrorKind::InvalidInput, "surrogate order must lie in [0, l]");
  } else if (sv.size() && sv(0) > 0.0) {
    // first relative drop below tol
    while (k < sv.size() && sv(k) >= order.tol * sv(0)) ++k;
  }
  if (order.cap) k = std::min(k, *order.cap);
  k = std::min(k, l);

  Surrogate s;
  s.order = k;
  s.singular_values = sv;
  s.truncation_tail = sv.tail(sv.size() - k);
  s.pivot_index = pivot;
  if (k == 0) {
    s.Ek.resize(0, 0);
    s.Ak.resize(0, 0);
    s.bk.resize(0);
    s.ck.resize(0);
    return s;
  }
  const MatS Yk = svd.matrixU().leftCols(k);
  const MatS Xk = svd.matrixV().leftCols(k);
  s.Ek = (-Yk.adjoint() * L * Xk).template cast<cplx>();
  s.Ak = (-Yk.adjoint() * M * Xk).template cast<cplx>();
  s.bk = (Yk.adjoint() * Z).template cast<cplx>();
  s.ck = (Xk.transpose() * Z).template cast<cplx>();
  Eigen::PartialPivLU<CMat> lu(s.Ek);
  if (!(lu.rcond() > static_cast<double>(k) * std::numeric_limits<double>::epsilon()) || !s.Ek.allFinite())
    fail(ErrorKind::SingularEk, "E_k is numerically singular (order too large or poor pivot)");
  return s;
}

}  // namespace

Surrogate extract_surrogate(const LoewnerPencil& p, const SurrogateOrder& order) {
  const int pivot = p.pivot_index >= 0 ? p.pivot_index : choose_pivot(p);
  if (p.is_real()) return truncate(real_pencil(p, pivot), p.Lr, p.Mr, p.Zr, pivot, order);
  return truncate(complex_pencil(p, pivot), p.L, p.M, p.Z, pivot, order);
}

cplx eval(const Surrogate& s, cplx z) {
  if (s.order == 0) return 0.0;
  return eval(s.realization(), z);
}

SurrogateErrorReport surrogate_error_report(const Surrogate& surr, const LtiSystem& sys, const ReducedModel& core,
                                            const FrequencyGrid& grid) {
  const auto& w = grid.points();
  struct Point {
    double dev, ref;
  };
  const auto vals = parallel_map(w.size(), [&](std::size_t i) {
    const cplx s(0.0, w[i]);
    const cplx f = eval(sys, s) - eval(core, s);
    return Point{std::abs(eval(surr, s) - f), std::abs(f)};
  });
  SurrogateErrorReport rep;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i].dev > rep.max_deviation) {
      rep.max_deviation = vals[i].dev;
      rep.at_frequency = w[i];
    }
    rep.max_reference = std::max(rep.max_reference, vals[i].ref);
  }
  return rep;
}

}  // namespace mor
