#include "sinv/algebraic.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "sinv/error.hpp"

namespace sinv {

LinearSystem::LinearSystem(Eigen::MatrixXd A, Eigen::MatrixXd D, Eigen::MatrixXd C)
    : A_(std::move(A)), D_(std::move(D)), C_(std::move(C)) {
  const Eigen::Index n = A_.rows();
  if (n < 1 || A_.cols() != n) throw Error(ErrorCode::InvalidSystem, "A must be square with N >= 1");
  if (D_.rows() != n || D_.cols() < 1) throw Error(ErrorCode::InvalidSystem, "D must be N x M with M >= 1");
  if (C_.cols() != n || C_.rows() < 1) throw Error(ErrorCode::InvalidSystem, "C must be P x N with P >= 1");
  if (!A_.allFinite() || !D_.allFinite() || !C_.allFinite()) {
    throw Error(ErrorCode::InvalidSystem, "system matrices must be finite");
  }
}

namespace {

void check_size(const LinearSystem& sys, const AlgebraicOptions& opts) {
  if (sys.n_states() > opts.max_states) {
    throw Error(ErrorCode::SystemTooLarge,
                std::to_string(sys.n_states()) + " states exceed the algebraic limit of " +
                    std::to_string(opts.max_states) + "; use the structural test instead");
  }
}

// C A^k D for k = 0..l.
std::vector<Eigen::MatrixXd> markov_blocks(const LinearSystem& sys, int l) {
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(static_cast<std::size_t>(l) + 1);
  Eigen::MatrixXd akd = sys.D();
  for (int k = 0; k <= l; ++k) {
    blocks.push_back(sys.C() * akd);
    if (k < l) akd = sys.A() * akd;
  }
  return blocks;
}

Eigen::MatrixXd assemble_toeplitz(const std::vector<Eigen::MatrixXd>& blocks, int l,
                                  Eigen::Index p, Eigen::Index m) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero((l + 1) * p, (l + 1) * m);
  for (int i = 0; i <= l; ++i) {
    for (int j = i; j <= l; ++j) q.block(i * p, j * m, p, m) = blocks[j - i];
  }
  return q;
}

std::size_t rank_from_singular_values(const Eigen::VectorXd& sv, Eigen::Index rows, Eigen::Index cols) {
  if (sv.size() == 0) return 0;
  const double tol = static_cast<double>(std::max(rows, cols)) *
                     std::numeric_limits<double>::epsilon() * sv(0);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++r;
  }
  return r;
}

// Orthonormal basis of the null space of g.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& g) {
  const Eigen::Index cols = g.cols();
  if (g.rows() == 0 || g.isZero(0.0)) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullV);
  const auto r = static_cast<Eigen::Index>(rank_from_singular_values(svd.singularValues(), g.rows(), cols));
  return svd.matrixV().rightCols(cols - r);
}

// Exact rank over GF(p), p = 2^61 - 1.
namespace modular {

constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % kPrime);
}
std::uint64_t add(std::uint64_t a, std::uint64_t b) { return (a + b) % kPrime; }
std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return (a + kPrime - b) % kPrime; }
std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

using Mat = std::vector<std::vector<std::uint64_t>>;

Mat random_on_pattern(const Eigen::MatrixXd& m, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> draw(1, 1'000'000);
  Mat out(static_cast<std::size_t>(m.rows()), std::vector<std::uint64_t>(static_cast<std::size_t>(m.cols()), 0));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) out[i][j] = draw(rng);
    }
  }
  return out;
}

Mat multiply(const Mat& a, const Mat& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Mat c(n, std::vector<std::uint64_t>(m, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < k; ++t) {
      if (a[i][t] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] = add(c[i][j], mul(a[i][t], b[t][j]));
    }
  }
  return c;
}

std::size_t rank(Mat m) {
  std::size_t r = 0;
  const std::size_t rows = m.size(), cols = rows == 0 ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[r]);
    const std::uint64_t inv = pow(m[r][c], kPrime - 2);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      const std::uint64_t f = mul(m[i][c], inv);
      for (std::size_t j = c; j < cols; ++j) m[i][j] = sub(m[i][j], mul(f, m[r][j]));
    }
    ++r;
  }
  return r;
}

RankReport criterion(const LinearSystem& sys, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Mat a = random_on_pattern(sys.A(), rng);
  const Mat d = random_on_pattern(sys.D(), rng);
  const Mat c = random_on_pattern(sys.C(), rng);
  const auto n = static_cast<int>(sys.n_states());
  const auto p = static_cast<std::size_t>(sys.n_outputs());
  const auto mm = static_cast<std::size_t>(sys.n_inputs());

  std::vector<Mat> blocks;
  Mat akd = d;
  for (int k = 0; k < n; ++k) {
    blocks.push_back(multiply(c, akd));
    if (k + 1 < n) akd = multiply(a, akd);
  }
  auto toeplitz = [&](int l) {
    const auto size = static_cast<std::size_t>(l + 1);
    Mat q(size * p, std::vector<std::uint64_t>(size * mm, 0));
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = i; j < size; ++j) {
        for (std::size_t r = 0; r < p; ++r) {
          for (std::size_t s = 0; s < mm; ++s) q[i * p + r][j * mm + s] = blocks[j - i][r][s];
        }
      }
    }
    return q;
  };
  RankReport rep;
  rep.rank_top = rank(toeplitz(n - 1));
  rep.rank_prev = n >= 2 ? rank(toeplitz(n - 2)) : 0;
  rep.invertible = rep.rank_top - rep.rank_prev == mm;
  return rep;
}

}  // namespace modular

}  // namespace

Eigen::MatrixXd block_matrix_R(const LinearSystem& sys, int l) {
  if (l < 0) throw Error(ErrorCode::InvalidArgument, "R_l needs l >= 0");
  const auto blocks = markov_blocks(sys, l);
  const Eigen::Index m = sys.n_inputs();
  Eigen::MatrixXd r(sys.n_outputs(), (l + 1) * m);
  for (int k = 0; k <= l; ++k) r.middleCols(k * m, m) = blocks[k];
  return r;
}

Eigen::MatrixXd toeplitz_Q(const LinearSystem& sys, int l) {
  if (l < 0) throw Error(ErrorCode::InvalidArgument, "Q_l needs l >= 0");
  return assemble_toeplitz(markov_blocks(sys, l), l, sys.n_outputs(), sys.n_inputs());
}

std::size_t numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return rank_from_singular_values(svd.singularValues(), m.rows(), m.cols());
}

namespace {

// Rank Q_l is unchanged by A -> A / c (block (i, j) picks up c^(i-j), a row
// and column scaling) and by scaling the columns of D or the rows of C. The
// blocks of a block Toeplitz inverse grow like (|C A^(k+1) D| / (c s))^j, s
// the smallest nonzero singular value of the first nonvanishing Markov block
// C A^k D. Choosing c = |A| |C| |D| / s keeps that growth bounded, so a
// well-posed rank decision is not swallowed by the fixed relative tolerance.
LinearSystem conditioned(const LinearSystem& sys) {
  Eigen::MatrixXd a = sys.A(), d = sys.D(), c = sys.C();
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    if (const double s = d.col(j).norm(); s > 0.0) d.col(j) /= s;
  }
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    if (const double s = c.row(i).norm(); s > 0.0) c.row(i) /= s;
  }
  const double na = a.operatorNorm();
  if (na == 0.0) return LinearSystem(std::move(a), std::move(d), std::move(c));
  a /= na;

  const double cd_norm = c.operatorNorm() * d.operatorNorm();
  const double floor = static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() * cd_norm;
  double kappa = 1.0;
  Eigen::MatrixXd akd = d;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    const Eigen::MatrixXd block = c * akd;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
    const auto& sv = svd.singularValues();
    if (sv.size() > 0 && sv(0) > floor) {
      const auto r = rank_from_singular_values(sv, block.rows(), block.cols());
      kappa = std::max(1.0, cd_norm / sv(static_cast<Eigen::Index>(r) - 1));
      break;
    }
    akd = a * akd;
  }
  a /= kappa;
  return LinearSystem(std::move(a), std::move(d), std::move(c));
}

}  // namespace

RankReport rank_criterion_report(const LinearSystem& sys, const AlgebraicOptions& opts) {
  check_size(sys, opts);
  if (opts.mode == RankMode::exact_modular) return modular::criterion(sys, opts.seed);

  const auto n = static_cast<int>(sys.n_states());
  const auto blocks = markov_blocks(conditioned(sys), n - 1);
  RankReport rep;
  rep.rank_top = numerical_rank(assemble_toeplitz(blocks, n - 1, sys.n_outputs(), sys.n_inputs()));
  rep.rank_prev =
      n >= 2 ? numerical_rank(assemble_toeplitz(blocks, n - 2, sys.n_outputs(), sys.n_inputs())) : 0;
  rep.invertible = rep.rank_top >= rep.rank_prev &&
                   rep.rank_top - rep.rank_prev == static_cast<std::size_t>(sys.n_inputs());
  return rep;
}

bool rank_criterion(const LinearSystem& sys, const AlgebraicOptions& opts) {
  return rank_criterion_report(sys, opts).invertible;
}

namespace {

std::size_t projection_rank(const Eigen::MatrixXd& basis, Eigen::Index m, double tol) {
  if (basis.cols() == 0) return 0;
  const Eigen::MatrixXd xi0 = basis.bottomRows(m);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(xi0);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tol) ++r;
  }
  return r;
}

// Runs the level recursion up to `last_level`, stopping early on collapse
// when `stop_on_collapse` is set.
RecursiveReport run_recursion(const LinearSystem& sys, const AlgebraicOptions& opts, bool stop_on_collapse) {
  check_size(sys, opts);
  const auto n = static_cast<int>(sys.n_states());
  const Eigen::Index m = sys.n_inputs();
  const auto blocks = markov_blocks(sys, n - 1);

  RecursiveReport rep;
  KernelState state;
  state.basis.resize(0, 0);
  for (int l = 0; l < n; ++l) {
    // New unknowns: xi_l (M entries) and coordinates c of the previous basis.
    // Constraint R_l [xi_l; B c] = CD xi_l + [CAD ... CA^l D] B c = 0.
    const Eigen::Index d = state.basis.cols();
    Eigen::MatrixXd g(sys.n_outputs(), m + d);
    g.leftCols(m) = blocks[0];
    if (d > 0) {
      Eigen::MatrixXd tail(sys.n_outputs(), l * m);
      for (int k = 1; k <= l; ++k) tail.middleCols((k - 1) * m, m) = blocks[k];
      g.rightCols(d) = tail * state.basis;
    }
    const Eigen::MatrixXd kernel = null_space(g);

    Eigen::MatrixXd lift = Eigen::MatrixXd::Zero((l + 1) * m, m + d);
    lift.topLeftCorner(m, m).setIdentity();
    if (d > 0) lift.bottomRightCorner(l * m, d) = state.basis;

    state.level = l;
    state.basis = lift * kernel;
    state.xi0_rank = projection_rank(state.basis, m, opts.projection_tolerance);
    rep.xi0_ranks.push_back(state.xi0_rank);
    if (state.xi0_rank == 0) {
      if (rep.collapse_level < 0) rep.collapse_level = l;
      rep.invertible = true;
      if (stop_on_collapse) break;
    }
  }
  rep.final_state = std::move(state);
  return rep;
}

}  // namespace

RecursiveReport recursive_criterion_report(const LinearSystem& sys, const AlgebraicOptions& opts) {
  return run_recursion(sys, opts, true);
}

bool recursive_criterion(const LinearSystem& sys, const AlgebraicOptions& opts) {
  return recursive_criterion_report(sys, opts).invertible;
}

Eigen::VectorXd kernel_witness(const LinearSystem& sys, const AlgebraicOptions& opts) {
  RecursiveReport rep = run_recursion(sys, opts, true);
  if (rep.invertible) {
    throw Error(ErrorCode::NoWitness, "system is invertible; no sequence with xi_0 != 0 exists");
  }
  const Eigen::MatrixXd& basis = rep.final_state.basis;
  const Eigen::Index m = sys.n_inputs();
  // Direction in V_{N-1} whose xi_0 part is largest.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.bottomRows(m), Eigen::ComputeFullV);
  Eigen::VectorXd witness = basis * svd.matrixV().col(0);
  return witness / witness.tail(m).norm();
}

bool kernel_shift_check(const LinearSystem& sys, const AlgebraicOptions& opts) {
  const Eigen::VectorXd witness = kernel_witness(sys, opts);
  const auto n = static_cast<int>(sys.n_states());
  const Eigen::Index m = sys.n_inputs();
  // witness = [xi_{N-1}; ...; xi_0]
  auto xi = [&](int k) { return witness.segment((n - 1 - k) * m, m); };

  const auto blocks = markov_blocks(sys, n - 1);
  double scale = 0.0;
  for (const auto& b : blocks) scale = std::max(scale, b.norm());
  const double tol = 1e-8 * std::max(scale, 1.0) * witness.norm();

  for (int l = 0; l < n; ++l) {
    Eigen::VectorXd original = Eigen::VectorXd::Zero(sys.n_outputs());
    Eigen::VectorXd shifted = Eigen::VectorXd::Zero(sys.n_outputs());
    for (int k = 0; k <= l; ++k) {
      // R_l Xi_l = sum_k C A^k D xi_{l-k}; the shifted sequence has
      // chi_0 = 0 and chi_j = xi_{j-1}.
      original += blocks[k] * xi(l - k);
      if (l - k >= 1) shifted += blocks[k] * xi(l - k - 1);
    }
    if (original.norm() > tol || shifted.norm() > tol) return false;
  }
  return true;
}

}  // namespace sinv
