#include "veclap/pde.hpp"

#include <cmath>
#include <memory>
#include <string>

#include <Eigen/Sparse>

#include "veclap/common.hpp"
#include "veclap/linear_solve.hpp"

namespace veclap {

namespace {

Eigen::VectorXd zero_like(const Eigen::VectorXd& u) {
    return Eigen::VectorXd::Zero(u.size());
}

void check_finite(const Eigen::VectorXd& u, long step) {
    if (!u.allFinite())
        throw NumericalError("solution blew up at step " +
                             std::to_string(step));
}

} // namespace

const char* stepper_name(StepperKind kind) {
    switch (kind) {
        case StepperKind::RK2: return "rk2";
        case StepperKind::BDF2: return "bdf2";
        case StepperKind::CNAB: return "cnab";
    }
    return "?";
}

StepperKind stepper_from_name(const std::string& name) {
    if (name == "rk2") return StepperKind::RK2;
    if (name == "bdf2") return StepperKind::BDF2;
    if (name == "cnab") return StepperKind::CNAB;
    throw ValidationError("unknown time stepper: " + name);
}

Trajectory integrate(const EvolutionProblem& problem,
                     const TimeStepper& stepper, double t_end,
                     int snapshot_every) {
    const BlockOperator& op = problem.op;
    op.validate();
    if (problem.nu < 0.0)
        throw ValidationError("viscosity must be nonnegative");
    if (problem.initial.size() != op.dim())
        throw ValidationError("initial state length does not match the "
                              "operator");
    if (!(stepper.dt > 0.0))
        throw ValidationError("time step must be positive");
    if (t_end < 0.0)
        throw ValidationError("end time must be nonnegative");
    const double steps_real = t_end / stepper.dt;
    const long steps = std::lround(steps_real);
    if (std::abs(steps_real - static_cast<double>(steps)) >
        1e-9 * std::max(1.0, steps_real))
        throw ValidationError("end time is not a whole number of steps");

    const double dt = stepper.dt;
    const double nu = problem.nu;
    const Eigen::SparseMatrix<double> L = op.to_sparse();

    // Non-diffusive part of the right-hand side.
    const auto explicit_part = [&problem](double t, const Eigen::VectorXd& u) {
        Eigen::VectorXd g = problem.forcing ? problem.forcing(t)
                                            : zero_like(u);
        if (problem.covariant)
            g -= problem.covariant(u);
        return g;
    };
    const auto full_rhs = [&](double t, const Eigen::VectorXd& u) {
        Eigen::VectorXd g = explicit_part(t, u);
        if (nu != 0.0)
            g += nu * (L * u);
        return g;
    };
    const auto rk2_step = [&](double t, const Eigen::VectorXd& u) {
        const Eigen::VectorXd k1 = full_rhs(t, u);
        const Eigen::VectorXd k2 =
            full_rhs(t + 0.5 * dt, u + (0.5 * dt) * k1);
        return (u + dt * k2).eval();
    };

    // Implicit matrices are factored once and reused every step.
    std::unique_ptr<VerifiedLinearSolver> implicit_solver;
    Eigen::SparseMatrix<double> identity(op.dim(), op.dim());
    identity.setIdentity();
    if (stepper.kind == StepperKind::BDF2) {
        const Eigen::SparseMatrix<double> M = 1.5 * identity - (dt * nu) * L;
        implicit_solver = std::make_unique<VerifiedLinearSolver>(M);
    } else if (stepper.kind == StepperKind::CNAB) {
        const Eigen::SparseMatrix<double> M =
            identity - (0.5 * dt * nu) * L;
        implicit_solver = std::make_unique<VerifiedLinearSolver>(M);
    }

    Trajectory out;
    const auto record = [&out](double t, const Eigen::VectorXd& u) {
        out.times.push_back(t);
        out.states.push_back(u);
    };

    Eigen::VectorXd u = problem.initial;
    check_finite(u, 0);
    record(0.0, u);
    if (steps == 0)
        return out;

    Eigen::VectorXd u_prev;      // state one step back (multistep)
    Eigen::VectorXd g_prev;      // explicit part one step back
    for (long s = 1; s <= steps; ++s) {
        const double t = static_cast<double>(s - 1) * dt;
        Eigen::VectorXd next;
        switch (stepper.kind) {
            case StepperKind::RK2:
                next = rk2_step(t, u);
                break;
            case StepperKind::BDF2: {
                if (s == 1) {
                    g_prev = explicit_part(t, u);
                    u_prev = u;
                    next = rk2_step(t, u);
                    break;
                }
                const Eigen::VectorXd g = explicit_part(t, u);
                const Eigen::VectorXd rhs =
                    2.0 * u - 0.5 * u_prev + dt * (2.0 * g - g_prev);
                next = implicit_solver->solve(rhs);
                u_prev = u;
                g_prev = g;
                break;
            }
            case StepperKind::CNAB: {
                if (s == 1) {
                    g_prev = explicit_part(t, u);
                    next = rk2_step(t, u);
                    break;
                }
                const Eigen::VectorXd g = explicit_part(t, u);
                Eigen::VectorXd rhs =
                    u + dt * (1.5 * g - 0.5 * g_prev);
                if (nu != 0.0)
                    rhs += (0.5 * dt * nu) * (L * u);
                next = implicit_solver->solve(rhs);
                g_prev = g;
                break;
            }
        }
        u = std::move(next);
        check_finite(u, s);
        const bool keep = (snapshot_every > 0 && s % snapshot_every == 0);
        if (keep && s != steps)
            record(static_cast<double>(s) * dt, u);
    }
    record(t_end, u);
    return out;
}

Eigen::VectorXd solve_screened_poisson(const BlockOperator& op, double a,
                                       const Eigen::VectorXd& f) {
    return solve_shifted(a, op, f);
}

} // namespace veclap
