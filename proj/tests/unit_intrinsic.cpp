#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "test_helpers.hpp"
#include "veclap/common.hpp"
#include "veclap/geometry.hpp"
#include "veclap/intrinsic.hpp"
#include "veclap/knn.hpp"
#include "veclap/tangent_estimation.hpp"

using namespace veclap;

namespace {

// Planar cloud in the z = 0 plane of R^3 with identical axis frames.
// On flat data every fit reproduces polynomials exactly, so assembled
// operators hit polynomial fields to rounding error at every point,
// boundary included.
struct FlatSetup {
    PointCloud cloud;
    FrameField frames;
};

FlatSetup flat_cloud(int N, unsigned long long seed) {
    auto eng = testutil::rng(seed);
    FlatSetup s;
    s.cloud.points = Eigen::MatrixXd::Zero(N, 3);
    for (int i = 0; i < N; ++i) {
        s.cloud.points(i, 0) = testutil::uniform(eng, -1.0, 1.0);
        s.cloud.points(i, 1) = testutil::uniform(eng, -1.0, 1.0);
    }
    s.cloud.d = 2;
    s.cloud.n = 3;
    Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(3, 2);
    axes(0, 0) = 1.0;
    axes(1, 1) = 1.0;
    s.frames.T.assign(N, axes);
    s.frames.unreliable.assign(N, 0);
    return s;
}

// Degrees of freedom for a field given by per-point frame components.
Eigen::VectorXd dof_from_components(
    const std::vector<Eigen::Vector2d>& comps) {
    Eigen::VectorXd u(2 * static_cast<int>(comps.size()));
    for (size_t i = 0; i < comps.size(); ++i)
        u.segment(2 * static_cast<int>(i), 2) = comps[i];
    return u;
}

} // namespace

TEST_CASE("flat plane: the three Laplacians reduce to their flat forms") {
    const FlatSetup s = flat_cloud(400, 2024);
    const int N = s.cloud.N();

    // u^1 = x^2, u^2 = 0. Flat values: component Laplacian gives 2, the
    // divergence-gradient variant doubles it to 4, and the last variant
    // matches the component Laplacian.
    std::vector<Eigen::Vector2d> comps(N);
    for (int i = 0; i < N; ++i) {
        const double x = s.cloud.points(i, 0);
        comps[i] = Eigen::Vector2d(x * x, 0.0);
    }
    const Eigen::VectorXd u = dof_from_components(comps);

    const BlockOperator bochner =
        assemble_intrinsic(s.cloud, s.frames, LaplacianKind::Bochner, 12, 2, 2);
    const BlockOperator ell = assemble_intrinsic(
        s.cloud, s.frames, LaplacianKind::LLaplacian, 12, 2, 2);
    const BlockOperator hodge =
        assemble_intrinsic(s.cloud, s.frames, LaplacianKind::Hodge, 12, 2, 2);

    const Eigen::VectorXd bu = bochner.apply(u);
    const Eigen::VectorXd lu = ell.apply(u);
    const Eigen::VectorXd hu = hodge.apply(u);
    for (int i = 0; i < N; ++i) {
        CHECK(std::abs(bu(2 * i) - 2.0) < 1e-8);
        CHECK(std::abs(bu(2 * i + 1)) < 1e-8);
        CHECK(std::abs(lu(2 * i) - 4.0) < 1e-8);
        CHECK(std::abs(lu(2 * i + 1)) < 1e-8);
        CHECK(std::abs(hu(2 * i) - 2.0) < 1e-8);
        CHECK(std::abs(hu(2 * i + 1)) < 1e-8);
    }
}

TEST_CASE("flat plane: mixed derivative row lands in the right component") {
    const FlatSetup s = flat_cloud(300, 7);
    const int N = s.cloud.N();

    // u^1 = x y, u^2 = 0: component Laplacian vanishes, while the
    // divergence-gradient variant contributes d_2 d_1 u^1 = 1 to the
    // second output component only.
    std::vector<Eigen::Vector2d> comps(N);
    for (int i = 0; i < N; ++i)
        comps[i] =
            Eigen::Vector2d(s.cloud.points(i, 0) * s.cloud.points(i, 1), 0.0);
    const Eigen::VectorXd u = dof_from_components(comps);

    const Eigen::VectorXd lu =
        assemble_intrinsic(s.cloud, s.frames, LaplacianKind::LLaplacian, 12, 2,
                           2)
            .apply(u);
    const Eigen::VectorXd bu =
        assemble_intrinsic(s.cloud, s.frames, LaplacianKind::Bochner, 12, 2, 2)
            .apply(u);
    for (int i = 0; i < N; ++i) {
        CHECK(std::abs(lu(2 * i)) < 1e-8);
        CHECK(std::abs(lu(2 * i + 1) - 1.0) < 1e-8);
        CHECK(std::abs(bu(2 * i)) < 1e-8);
        CHECK(std::abs(bu(2 * i + 1)) < 1e-8);
    }
}

TEST_CASE("component transform is the identity at the base point") {
    auto eng = testutil::rng(99);
    // Curved stencil: a paraboloid graph over a random orthonormal frame.
    const Eigen::MatrixXd Q = testutil::random_orthogonal(eng, 3);
    const Eigen::MatrixXd frame = Q.leftCols(2);
    const Eigen::VectorXd normal = Q.col(2);
    const int K = 25;
    Eigen::MatrixXd stencil(K, 3);
    stencil.row(0) = Eigen::RowVector3d::Zero();
    for (int k = 1; k < K; ++k) {
        const double a = testutil::uniform(eng, -0.3, 0.3);
        const double b = testutil::uniform(eng, -0.3, 0.3);
        const double h = 0.7 * a * a - 0.4 * a * b + 0.9 * b * b;
        stencil.row(k) =
            (frame.col(0) * a + frame.col(1) * b + normal * h).transpose();
    }
    const MongePatch patch = fit_monge_patch(stencil, frame, 3);
    const Eigen::MatrixXd M = stencil_component_transform(
        patch, Eigen::Vector2d::Zero(), frame, 0);
    CHECK((M - Eigen::Matrix2d::Identity()).lpNorm<Eigen::Infinity>() < 1e-14);

    // Away from the base the transform compensates the graph's tilt.
    const Eigen::MatrixXd M1 = stencil_component_transform(
        patch, patch.theta.row(5).transpose(), frame, 5);
    CHECK((M1 - Eigen::Matrix2d::Identity()).lpNorm<Eigen::Infinity>() > 1e-4);
}

TEST_CASE("per-point frame rotations conjugate the assembled operator") {
    const ManifoldSpec spec = ManifoldSpec::torus3d(2.0, 1.0);
    const PointCloud cloud = sample_manifold(spec, 350, 5);
    const NeighborIndex index(cloud.points);
    const FrameField frames = estimate_frames(cloud, index, 30, 3);

    auto eng = testutil::rng(321);
    FrameField rotated = frames;
    std::vector<Eigen::Matrix2d> R(cloud.N());
    for (int i = 0; i < cloud.N(); ++i) {
        const double a = testutil::uniform(eng, 0.0, 2.0 * M_PI);
        R[i] << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        rotated.T[i] = frames.T[i] * R[i];
    }

    for (const LaplacianKind kind :
         {LaplacianKind::Bochner, LaplacianKind::LLaplacian,
          LaplacianKind::Hodge}) {
        const Eigen::MatrixXd A =
            assemble_intrinsic(cloud, frames, kind, 30, 3, 3).dense();
        const Eigen::MatrixXd B =
            assemble_intrinsic(cloud, rotated, kind, 30, 3, 3).dense();
        // Expect B = blockdiag(R)^t A blockdiag(R).
        Eigen::MatrixXd big = Eigen::MatrixXd::Zero(A.rows(), A.cols());
        for (int i = 0; i < cloud.N(); ++i)
            big.block<2, 2>(2 * i, 2 * i) = R[i];
        const Eigen::MatrixXd expected = big.transpose() * A * big;
        CHECK((B - expected).lpNorm<Eigen::Infinity>() <
              1e-10 * A.lpNorm<Eigen::Infinity>());
    }
}

TEST_CASE("sphere rotation fields are near-eigenfields of the assembled "
          "Laplacian") {
    const ManifoldSpec spec = ManifoldSpec::unit_sphere();
    const PointCloud cloud = sample_manifold(spec, 1600, 1);
    const FrameField frames = analytic_frames(cloud);
    const BlockOperator op =
        assemble_intrinsic(cloud, frames, LaplacianKind::Bochner, 50, 5, 5);

    const Eigen::Vector3d axes[3] = {Eigen::Vector3d::UnitX(),
                                     Eigen::Vector3d::UnitY(),
                                     Eigen::Vector3d::UnitZ()};
    for (const auto& a : axes) {
        Eigen::VectorXd u(2 * cloud.N());
        for (int i = 0; i < cloud.N(); ++i) {
            const Eigen::Vector3d x = cloud.points.row(i).transpose();
            const Eigen::Vector3d v = a.cross(x);
            u.segment(2 * i, 2) = frames.T[i].transpose() * v;
        }
        const Eigen::VectorXd residual = op.apply(u) + u; // eigenvalue -1
        CHECK(residual.lpNorm<Eigen::Infinity>() <
              2.5e-2 * u.lpNorm<Eigen::Infinity>());
    }
}

TEST_CASE("flat plane: advection reproduces (u . grad) u for linear fields") {
    const FlatSetup s = flat_cloud(350, 77);
    const int N = s.cloud.N();
    auto eng = testutil::rng(12);
    const Eigen::Matrix2d A =
        testutil::random_matrix(eng, 2, 2, -1.0, 1.0);
    const Eigen::Vector2d b = testutil::random_vector(eng, 2);

    std::vector<Eigen::Vector2d> comps(N);
    for (int i = 0; i < N; ++i) {
        const Eigen::Vector2d xy(s.cloud.points(i, 0), s.cloud.points(i, 1));
        comps[i] = A * xy + b;
    }
    const Eigen::VectorXd u = dof_from_components(comps);

    const IntrinsicCovariant adv(s.cloud, s.frames, 10, 1, 2);
    const Eigen::VectorXd out = adv.apply(u);
    for (int i = 0; i < N; ++i) {
        const Eigen::Vector2d expected = A * comps[i];
        CHECK((out.segment(2 * i, 2) - expected).norm() < 1e-10);
    }
}

TEST_CASE("sphere advection matches the projected ambient derivative") {
    const ManifoldSpec spec = ManifoldSpec::unit_sphere();
    const PointCloud cloud = sample_manifold(spec, 900, 3);
    const FrameField frames = analytic_frames(cloud);

    // v = e_z cross x stays tangent on every sphere, so its covariant
    // derivative is the tangential projection of the ambient derivative
    // (v . grad) v = (-x, -y, 0).
    Eigen::VectorXd u(2 * cloud.N());
    for (int i = 0; i < cloud.N(); ++i) {
        const Eigen::Vector3d x = cloud.points.row(i).transpose();
        const Eigen::Vector3d v(-x.y(), x.x(), 0.0);
        u.segment(2 * i, 2) = frames.T[i].transpose() * v;
    }
    const IntrinsicCovariant adv(cloud, frames, 40, 3, 3);
    const Eigen::VectorXd out = adv.apply(u);
    double worst = 0.0;
    for (int i = 0; i < cloud.N(); ++i) {
        const Eigen::Vector3d x = cloud.points.row(i).transpose();
        const Eigen::Vector3d dv(-x.x(), -x.y(), 0.0);
        const Eigen::Vector2d expected = frames.T[i].transpose() * dv;
        worst = std::max(worst,
                         (out.segment(2 * i, 2) - expected).norm());
    }
    CHECK(worst < 3e-2);
}

TEST_CASE("assembly is deterministic") {
    const ManifoldSpec spec = ManifoldSpec::red_blood_cell();
    const PointCloud cloud = sample_manifold(spec, 300, 9);
    const NeighborIndex index(cloud.points);
    const FrameField frames = estimate_frames(cloud, index, 30, 3);
    const Eigen::MatrixXd A =
        assemble_intrinsic(cloud, frames, LaplacianKind::Hodge, 30, 3, 3)
            .dense();
    const Eigen::MatrixXd B =
        assemble_intrinsic(cloud, frames, LaplacianKind::Hodge, 30, 3, 3)
            .dense();
    CHECK((A - B).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("assembly validates its inputs") {
    const FlatSetup s = flat_cloud(50, 4);
    FrameField bad = s.frames;
    bad.T.pop_back();
    CHECK_THROWS_AS(assemble_intrinsic(s.cloud, bad, LaplacianKind::Bochner,
                                       10, 2, 2),
                    ValidationError);
    CHECK_THROWS_AS(assemble_intrinsic(s.cloud, s.frames,
                                       LaplacianKind::Bochner, 10, 1, 2),
                    ValidationError);
    CHECK_THROWS_AS(assemble_intrinsic(s.cloud, s.frames,
                                       LaplacianKind::Bochner, 10, 2, 1),
                    ValidationError);
    CHECK_THROWS_AS(assemble_intrinsic(s.cloud, s.frames,
                                       LaplacianKind::Bochner, 51, 2, 2),
                    ValidationError);
    CHECK_THROWS_AS(IntrinsicCovariant(s.cloud, s.frames, 10, 0, 2),
                    ValidationError);
}
