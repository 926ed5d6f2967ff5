#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sinv/generators.hpp"
#include "sinv/graph.hpp"

namespace sinv {

/// dx/dt = f(x) + D w(t), y = x_Z. D selects the input nodes.
struct OdeModel {
  std::string name;
  std::size_t n_states = 0;
  std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& dx)> rhs;
  /// Analytic Jacobian of rhs. When empty a central finite difference is used.
  std::function<void(const Eigen::VectorXd& x, Eigen::MatrixXd& jac)> jacobian;
  std::vector<NodeId> inputs;
  std::vector<NodeId> sensors;
  Eigen::VectorXd x0;

  std::size_t n_inputs() const noexcept { return inputs.size(); }
  std::size_t n_outputs() const noexcept { return sensors.size(); }
  void validate() const;  // Error(InvalidSystem)
  void eval_jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const;
};

/// Four-stage cascade
///   x1' = -0.2 x1 + w,  x2' = x1 / (1 + x4) - x2,  x3' = x2 - x3 + w,  x4' = x3 - x4
/// with 0-based node ids.
OdeModel protein_cascade_model(std::vector<NodeId> inputs, std::vector<NodeId> sensors, Eigen::VectorXd x0);
/// Influence graph of the cascade (edge i -> j iff df_j/dx_i != 0).
DirectedGraph protein_cascade_graph();

OdeModel linear_ode_model(Eigen::MatrixXd a, std::vector<NodeId> inputs, std::vector<NodeId> sensors,
                          Eigen::VectorXd x0);

/// Piecewise-linear input signal. values(k, i) is input i at times[k];
/// outside [times.front(), times.back()] the end values are held.
struct InputGrid {
  std::vector<double> times;
  Eigen::MatrixXd values;  // K x M

  static InputGrid uniform(double t_end, std::size_t n_points, std::size_t n_inputs);
  template <class F>
  static InputGrid sample(double t_end, std::size_t n_points, std::size_t n_inputs, F&& w) {
    InputGrid g = uniform(t_end, n_points, n_inputs);
    for (std::size_t k = 0; k < n_points; ++k) {
      for (std::size_t i = 0; i < n_inputs; ++i) g.values(k, i) = w(i, g.times[k]);
    }
    return g;
  }

  std::size_t n_points() const noexcept { return times.size(); }
  std::size_t n_inputs() const noexcept { return static_cast<std::size_t>(values.cols()); }
  double at(std::size_t input, double t) const;
  void validate() const;  // Error(InvalidArgument)
};

struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;   // n_times x N
  Eigen::MatrixXd outputs;  // n_times x P
};

/// Fixed-step RK4 from x0 at t = 0. Each interval between consecutive sample
/// times is split into ceil(length / dt) equal steps. Throws Error(NonFinite)
/// if the state leaves the finite range.
Trajectory simulate(const OdeModel& model, const InputGrid& w, const std::vector<double>& sample_times, double dt);
/// Samples every `dt` on [0, t_end].
Trajectory simulate(const OdeModel& model, const InputGrid& w, double t_end, double dt);

std::vector<double> linspace(double a, double b, std::size_t n);

/// Adds i.i.d. N(0, sigma^2) noise to every entry. sigma = 0 returns a copy.
Eigen::MatrixXd add_noise(const Eigen::MatrixXd& outputs, double sigma, Rng& rng);

enum class Regularizer { value_norm, derivative_norm };
std::string to_string(Regularizer r);
Regularizer parse_regularizer(const std::string& name);  // Error(InvalidArgument)

struct ReconstructOptions {
  double alpha = 0.0;
  Regularizer regularizer = Regularizer::derivative_norm;
  std::size_t grid_points = 101;
  double dt = 0.01;
  std::size_t max_iterations = 200;
  double tolerance = 1e-6;          // relative J improvement that ends the descent
  const InputGrid* initial = nullptr;  // starting point; zero input when null
};

struct ReconstructionResult {
  InputGrid estimate;
  Eigen::MatrixXd fitted;  // n_times x P
  double misfit = 0.0;     // d = (1/n) sum_i sum_k (y - yhat)^2
  double regularizer = 0.0;
  double alpha = 0.0;
  double objective = 0.0;  // d + alpha R
  std::vector<double> objective_trace;  // J after every accepted step, starting with the initial guess
  std::size_t iterations = 0;
  std::size_t simulations = 0;
  bool converged = false;
};

/// Regularized output fit by Levenberg-Marquardt on the grid values of w.
/// The Jacobian is the exact derivative of the RK4 scheme (tangent linear
/// propagation). Throws Error(NonFinite) if the initial guess cannot be
/// simulated and Error(Diverged) if no trial step can be simulated at all.
ReconstructionResult reconstruct_inputs(const OdeModel& model, const Eigen::MatrixXd& y_data,
                                        const std::vector<double>& times, const ReconstructOptions& options);

/// Value of R for a grid: (1/T) sum_i int w_i^2 or (1/T) sum_i int w_i'^2.
double regularizer_value(const InputGrid& w, Regularizer r);

struct AlphaChoice {
  double alpha = 0.0;
  double misfit = 0.0;
  double target = 0.0;  // P sigma^2
  std::size_t evaluations = 0;
  ReconstructionResult result;
};

/// Discrepancy principle: bisection on log alpha in [1e-10, 1e10] until
/// |d(alpha) - P sigma^2| <= 10% of the target. Throws Error(InvalidArgument)
/// for sigma <= 0 and Error(NoBracket) when d does not straddle the target.
AlphaChoice choose_alpha(const OdeModel& model, const Eigen::MatrixXd& y_data, const std::vector<double>& times,
                         double noise_level, const ReconstructOptions& options);

/// Relative RMS error of `estimate` against `truth`, over every grid point
/// and input of `estimate`.
double relative_input_rmse(const InputGrid& estimate, const InputGrid& truth);
/// RMS over the grid of a single input component.
double input_rms(const InputGrid& w, std::size_t input);
/// sqrt(d): the RMS output residual per sensor.
double output_rms_residual(const Eigen::MatrixXd& y_data, const Eigen::MatrixXd& fitted);

/// Largest finite-difference Jacobian 2-norm of the rhs along a trajectory.
double max_jacobian_norm(const OdeModel& model, const Trajectory& traj);

// Time series CSV: header "t,<name>,...", one row per sample time.
struct TimeSeries {
  std::vector<std::string> columns;  // excluding t
  std::vector<double> times;
  Eigen::MatrixXd values;
};

TimeSeries read_time_series(std::istream& in);  // Error(ParseError)
TimeSeries read_time_series(const std::filesystem::path& path);
void write_time_series(const TimeSeries& ts, std::ostream& out);

}  // namespace sinv
