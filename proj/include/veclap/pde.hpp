#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "veclap/block_operator.hpp"

namespace veclap {

/// Method-of-lines problem du/dt = nu L u + f(t) - (u . nabla) u, posed
/// on the degrees of freedom of an assembled operator. The forcing and
/// covariant callbacks may be empty (treated as zero / absent). Callers
/// are expected to pass an operator that has been through stabilize()
/// so the diffusion part has no spurious growing mode.
struct EvolutionProblem {
    BlockOperator op;
    double nu = 0.0;
    std::function<Eigen::VectorXd(double)> forcing;
    Eigen::VectorXd initial;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> covariant;
};

/// RK2 is the explicit midpoint rule. BDF2 treats diffusion implicitly
/// with a two-step backward difference and extrapolates the explicit
/// part; CNAB pairs Crank-Nicolson diffusion with an Adams-Bashforth
/// explicit part. Both multistep schemes bootstrap their first step
/// with RK2.
enum class StepperKind { RK2, BDF2, CNAB };

struct TimeStepper {
    StepperKind kind = StepperKind::RK2;
    double dt = 0.0;
};

const char* stepper_name(StepperKind kind);
StepperKind stepper_from_name(const std::string& name);

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
};

/// Integrate to t_end (the step count is round(t_end/dt); t_end must be
/// an integer multiple of dt to 1e-9 relative). snapshot_every > 0 keeps
/// every that-many-th step; the initial and final states are always
/// recorded. Any non-finite entry aborts with the offending step index.
Trajectory integrate(const EvolutionProblem& problem,
                     const TimeStepper& stepper, double t_end,
                     int snapshot_every = 0);

/// Solve (a I - L) u = f with the verified sparse solver.
Eigen::VectorXd solve_screened_poisson(const BlockOperator& op, double a,
                                       const Eigen::VectorXd& f);

} // namespace veclap
