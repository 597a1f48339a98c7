#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "test_helpers.hpp"
#include "veclap/common.hpp"
#include "veclap/pde.hpp"

using namespace veclap;

namespace {

// Block-diagonal operator with the given per-point diagonal entries.
BlockOperator diagonal_operator(const std::vector<double>& entries, int d) {
    BlockOperator op;
    op.N = static_cast<int>(entries.size());
    op.d = d;
    op.K = 1;
    op.cols.resize(op.N);
    op.blocks.resize(op.N);
    for (int i = 0; i < op.N; ++i) {
        op.cols[i] = {i};
        op.blocks[i] = {entries[i] *
                        Eigen::MatrixXd::Identity(d, d)};
    }
    return op;
}

const std::vector<StepperKind> kAllSteppers = {
    StepperKind::RK2, StepperKind::BDF2, StepperKind::CNAB};

} // namespace

TEST_CASE("zero forcing and zero start stay identically zero") {
    const BlockOperator op = diagonal_operator({-1.0, -2.0, -3.0}, 2);
    for (const StepperKind kind : kAllSteppers) {
        EvolutionProblem p;
        p.op = op;
        p.nu = 0.7;
        p.initial = Eigen::VectorXd::Zero(op.dim());
        const Trajectory tr = integrate(p, {kind, 0.01}, 0.2);
        CHECK(tr.states.back().lpNorm<Eigen::Infinity>() == 0.0);
        CHECK(tr.times.front() == 0.0);
        CHECK(tr.times.back() == doctest::Approx(0.2));
    }
}

TEST_CASE("constant forcing without diffusion integrates exactly") {
    const BlockOperator op = diagonal_operator({-1.0, -2.0}, 2);
    auto eng = testutil::rng(3);
    const Eigen::VectorXd f = testutil::random_vector(eng, op.dim());
    const Eigen::VectorXd u0 = testutil::random_vector(eng, op.dim());
    for (const StepperKind kind : kAllSteppers) {
        EvolutionProblem p;
        p.op = op;
        p.nu = 0.0;
        p.forcing = [&f](double) { return f; };
        p.initial = u0;
        const Trajectory tr = integrate(p, {kind, 0.05}, 1.0);
        const Eigen::VectorXd expect = u0 + 1.0 * f;
        CHECK((tr.states.back() - expect).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("all steppers converge at second order on linear decay") {
    const BlockOperator op = diagonal_operator({-2.0, -2.0}, 1);
    EvolutionProblem p;
    p.op = op;
    p.nu = 1.0;
    p.initial = Eigen::VectorXd::Ones(op.dim());
    const double t_end = 1.0;
    const double truth = std::exp(-2.0 * t_end);
    for (const StepperKind kind : kAllSteppers) {
        CAPTURE(std::string(stepper_name(kind)));
        double err_coarse = 0.0, err_fine = 0.0;
        {
            const Trajectory tr = integrate(p, {kind, 0.02}, t_end);
            err_coarse =
                std::abs(tr.states.back()(0) - truth);
        }
        {
            const Trajectory tr = integrate(p, {kind, 0.01}, t_end);
            err_fine = std::abs(tr.states.back()(0) - truth);
        }
        const double ratio = err_coarse / err_fine;
        CHECK(ratio > 3.2);
        CHECK(ratio < 4.8);
    }
}

TEST_CASE("quadratic self-interaction matches the logistic-type solution") {
    // du/dt = -u^2 with u(0) = 1 has u(t) = 1/(1+t); the covariant hook
    // enters the right-hand side with a minus sign.
    const BlockOperator op = diagonal_operator({0.0}, 1);
    EvolutionProblem p;
    p.op = op;
    p.nu = 0.0;
    p.initial = Eigen::VectorXd::Ones(1);
    p.covariant = [](const Eigen::VectorXd& u) {
        return u.cwiseProduct(u).eval();
    };
    for (const StepperKind kind : kAllSteppers) {
        CAPTURE(std::string(stepper_name(kind)));
        const Trajectory tr = integrate(p, {kind, 0.001}, 1.0);
        CHECK(std::abs(tr.states.back()(0) - 0.5) < 1e-5);
    }
}

TEST_CASE("implicit steppers hold a stiff problem that explodes under RK2") {
    const BlockOperator op = diagonal_operator({-100.0, -100.0}, 2);
    EvolutionProblem p;
    p.op = op;
    p.nu = 1.0;
    p.initial = Eigen::VectorXd::Ones(op.dim());

    CHECK_THROWS_AS(integrate(p, {StepperKind::RK2, 0.1}, 100.0),
                    NumericalError);
    try {
        integrate(p, {StepperKind::RK2, 0.1}, 100.0);
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }

    for (const StepperKind kind : {StepperKind::BDF2, StepperKind::CNAB}) {
        CAPTURE(std::string(stepper_name(kind)));
        const Trajectory tr = integrate(p, {kind, 0.01}, 100.0);
        CHECK(tr.states.back().allFinite());
        CHECK(tr.states.back().lpNorm<Eigen::Infinity>() < 1.0);
    }
}

TEST_CASE("a steady state of the implicit scheme is a Poisson solve") {
    // With constant forcing, the fixed point of the diffusion run solves
    // -nu L u = f; feeding that solution in, one implicit step moves it
    // only at rounding level.
    const BlockOperator op = diagonal_operator({-1.5, -2.5, -4.0}, 2);
    const double nu = 0.8;
    auto eng = testutil::rng(9);
    const Eigen::VectorXd f = testutil::random_vector(eng, op.dim());

    BlockOperator scaled = op;
    for (auto& row : scaled.blocks)
        for (auto& b : row)
            b *= nu;
    const Eigen::VectorXd steady = solve_screened_poisson(scaled, 0.0, f);

    EvolutionProblem p;
    p.op = op;
    p.nu = nu;
    p.forcing = [&f](double) { return f; };
    p.initial = steady;
    const Trajectory tr = integrate(p, {StepperKind::BDF2, 0.01}, 0.5);
    CHECK((tr.states.back() - steady).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("screened Poisson wrapper matches the closed form") {
    const BlockOperator op = diagonal_operator({-2.0, -2.0}, 2);
    const Eigen::VectorXd f = Eigen::VectorXd::Constant(op.dim(), 3.0);
    const Eigen::VectorXd u = solve_screened_poisson(op, 1.0, f);
    CHECK((u - Eigen::VectorXd::Ones(op.dim())).lpNorm<Eigen::Infinity>() <
          1e-12);
}

TEST_CASE("snapshots are recorded at the requested cadence") {
    const BlockOperator op = diagonal_operator({-1.0}, 1);
    EvolutionProblem p;
    p.op = op;
    p.nu = 1.0;
    p.initial = Eigen::VectorXd::Ones(1);
    const Trajectory tr = integrate(p, {StepperKind::RK2, 0.1}, 1.0, 2);
    REQUIRE(tr.times.size() == 6);
    CHECK(tr.times[1] == doctest::Approx(0.2));
    CHECK(tr.times[4] == doctest::Approx(0.8));
    CHECK(tr.times.back() == doctest::Approx(1.0));

    const Trajectory t0 = integrate(p, {StepperKind::RK2, 0.1}, 0.0);
    CHECK(t0.times.size() == 1);
}

TEST_CASE("trajectories are deterministic") {
    const BlockOperator op = diagonal_operator({-1.0, -2.0}, 2);
    EvolutionProblem p;
    p.op = op;
    p.nu = 0.3;
    auto eng = testutil::rng(5);
    p.initial = testutil::random_vector(eng, op.dim());
    p.forcing = [](double t) {
        return Eigen::VectorXd::Constant(4, std::sin(t)).eval();
    };
    const Trajectory a = integrate(p, {StepperKind::CNAB, 0.01}, 1.0);
    const Trajectory b = integrate(p, {StepperKind::CNAB, 0.01}, 1.0);
    CHECK((a.states.back() - b.states.back()).lpNorm<Eigen::Infinity>() ==
          0.0);
}

TEST_CASE("integration validates its inputs") {
    const BlockOperator op = diagonal_operator({-1.0}, 1);
    EvolutionProblem p;
    p.op = op;
    p.initial = Eigen::VectorXd::Ones(1);
    CHECK_THROWS_AS(integrate(p, {StepperKind::RK2, 0.0}, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(integrate(p, {StepperKind::RK2, 0.3}, 1.0),
                    ValidationError);
    p.nu = -1.0;
    CHECK_THROWS_AS(integrate(p, {StepperKind::RK2, 0.1}, 1.0),
                    ValidationError);
    p.nu = 0.0;
    p.initial = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(integrate(p, {StepperKind::RK2, 0.1}, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(stepper_from_name("euler"), ValidationError);
    CHECK(stepper_from_name("cnab") == StepperKind::CNAB);
}
