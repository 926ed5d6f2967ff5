#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace sinv {

/// x' = A x + D w, y = C x. A known input B u does not affect invertibility
/// (it only shifts the output by a term independent of w), so it is omitted.
class LinearSystem {
 public:
  /// Throws Error(InvalidSystem) on inconsistent dimensions or N, M, P < 1.
  LinearSystem(Eigen::MatrixXd A, Eigen::MatrixXd D, Eigen::MatrixXd C);

  const Eigen::MatrixXd& A() const noexcept { return A_; }
  const Eigen::MatrixXd& D() const noexcept { return D_; }
  const Eigen::MatrixXd& C() const noexcept { return C_; }
  Eigen::Index n_states() const noexcept { return A_.rows(); }
  Eigen::Index n_inputs() const noexcept { return D_.cols(); }
  Eigen::Index n_outputs() const noexcept { return C_.rows(); }

 private:
  Eigen::MatrixXd A_, D_, C_;
};

enum class RankMode {
  numeric,        // singular values against tol = max(rows, cols) * eps * sigma_max
  exact_modular,  // random integers on the nonzero pattern, rank over GF(2^61 - 1)
};

struct AlgebraicOptions {
  /// Systems with more states are refused (Error(SystemTooLarge)); the
  /// block Toeplitz matrices grow like N^2 * M * P.
  Eigen::Index max_states = 500;
  RankMode mode = RankMode::numeric;
  std::uint64_t seed = 0x5eed;  // exact_modular only
  /// A xi_0 projection with largest singular value below this is treated as zero.
  double projection_tolerance = 1e-8;
};

/// R_l = [CD, CAD, ..., CA^l D], P x (l + 1) M.
Eigen::MatrixXd block_matrix_R(const LinearSystem& sys, int l);

/// Upper block-triangular Toeplitz matrix with first block row R_l and
/// block (i, j) = C A^(j - i) D for j >= i.
Eigen::MatrixXd toeplitz_Q(const LinearSystem& sys, int l);

/// Numerical rank with tol = max(rows, cols) * eps * sigma_max.
std::size_t numerical_rank(const Eigen::MatrixXd& m);

struct RankReport {
  std::size_t rank_top = 0;   // rank Q_{N-1}
  std::size_t rank_prev = 0;  // rank Q_{N-2}, 0 when N = 1
  bool invertible = false;
};

/// Invertible iff rank Q_{N-1} - rank Q_{N-2} = M. In numeric mode the ranks
/// are taken after a rank-preserving rescaling of A, D and C (see the source).
RankReport rank_criterion_report(const LinearSystem& sys, const AlgebraicOptions& opts = {});
bool rank_criterion(const LinearSystem& sys, const AlgebraicOptions& opts = {});

/// Orthonormal basis of V_l: stacked vectors [xi_l; ...; xi_0] with
/// R_k [xi_k; ...; xi_0] = 0 for every k <= l.
struct KernelState {
  int level = -1;
  Eigen::MatrixXd basis;       // (l + 1) M x dim V_l
  std::size_t xi0_rank = 0;    // dimension of the projection of V_l onto xi_0
};

struct RecursiveReport {
  bool invertible = false;
  int collapse_level = -1;               // first l with zero xi_0 projection
  std::vector<std::size_t> xi0_ranks;    // per level, non-increasing
  KernelState final_state;
};

/// Invertible iff the set of admissible sequences with xi_0 != 0 becomes
/// empty at some level l <= N - 1, i.e. the xi_0 projection of V_l is {0}.
RecursiveReport recursive_criterion_report(const LinearSystem& sys,
                                           const AlgebraicOptions& opts = {});
bool recursive_criterion(const LinearSystem& sys, const AlgebraicOptions& opts = {});

/// Stacked [xi_{N-1}; ...; xi_0] in V_{N-1} with unit-norm xi_0.
/// Throws Error(NoWitness) for invertible systems.
Eigen::VectorXd kernel_witness(const LinearSystem& sys, const AlgebraicOptions& opts = {});

/// Right-shifts a kernel witness (chi_0 = 0, chi_k = xi_{k-1}) and verifies
/// R_l X_l = 0 for every l <= N - 1. A non-invertible system always passes,
/// which is what makes its input kernel infinite-dimensional.
/// Throws Error(NoWitness) for invertible systems.
bool kernel_shift_check(const LinearSystem& sys, const AlgebraicOptions& opts = {});

}  // namespace sinv
