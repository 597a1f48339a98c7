#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "test_helpers.hpp"
#include "veclap/common.hpp"
#include "veclap/extrinsic.hpp"
#include "veclap/geometry.hpp"
#include "veclap/knn.hpp"
#include "veclap/tangent_estimation.hpp"

using namespace veclap;

namespace {

// Planar cloud in the z = 0 plane of R^3 with identical axis frames.
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

Eigen::VectorXd dof_from_components(
    const std::vector<Eigen::Vector2d>& comps) {
    Eigen::VectorXd u(2 * static_cast<int>(comps.size()));
    for (size_t i = 0; i < comps.size(); ++i)
        u.segment(2 * static_cast<int>(i), 2) = comps[i];
    return u;
}

// Random stencil with arbitrary orthonormal frames: points in a ball
// around the origin, frame 0 attached to the first point. Exercises the
// weight algebra in full generality; no geometric meaning intended.
struct RandomStencil {
    Eigen::MatrixXd points; // K x n
    FrameField frames;
    std::vector<int> stencil;
};

RandomStencil random_stencil(std::mt19937_64& eng, int K, int d, int n) {
    RandomStencil s;
    s.points = Eigen::MatrixXd(K, n);
    s.points.row(0).setZero();
    for (int k = 1; k < K; ++k)
        for (int c = 0; c < n; ++c)
            s.points(k, c) = testutil::uniform(eng, -0.4, 0.4);
    for (int k = 0; k < K; ++k) {
        const Eigen::MatrixXd Q = testutil::random_orthogonal(eng, n);
        s.frames.T.push_back(Q.leftCols(d));
    }
    s.frames.unreliable.assign(K, 0);
    s.stencil.resize(K);
    for (int k = 0; k < K; ++k)
        s.stencil[k] = k;
    return s;
}

StencilDifferentials differentials_of(const RandomStencil& s, int l) {
    const int d = s.frames.d();
    const Eigen::MatrixXd theta = local_coordinates(
        s.points, s.frames.T[0], s.points.row(0).transpose());
    const LocalFit fit = build_local_fit(theta, MultiIndexSet::full(d, l),
                                         WeightScheme::BaseEmphasis);
    return build_stencil_differentials(fit, s.frames.T[0], s.frames,
                                       s.stencil);
}

// Dense single-stencil reference: assemble the full composed operator on
// ambient-component unknowns, conjugate by the frame scatter matrix, and
// read off the base block row. Layout is component-major: entry c*K + j
// is component c at stencil point j.
Eigen::MatrixXd dense_reference(const StencilDifferentials& diffs,
                                const FrameField& frames,
                                const std::vector<int>& stencil,
                                LaplacianKind kind) {
    const int n = static_cast<int>(diffs.G.size());
    const int K = static_cast<int>(diffs.G[0].rows());
    const int d = frames.d();

    Eigen::MatrixXd Tkron = Eigen::MatrixXd::Zero(n * K, d * K);
    std::vector<Eigen::MatrixXd> P(K);
    for (int i = 0; i < K; ++i) {
        const Eigen::MatrixXd& Ti = frames.T[stencil[i]];
        P[i] = Ti * Ti.transpose();
        for (int s = 0; s < n; ++s)
            for (int c = 0; c < d; ++c)
                Tkron(s * K + i, c * K + i) = Ti(s, c);
    }
    const Eigen::MatrixXd proj = Tkron * Tkron.transpose();

    std::vector<Eigen::MatrixXd> H(n);
    for (int l = 0; l < n; ++l) {
        H[l] = Eigen::MatrixXd::Zero(n * K, n * K);
        for (int s = 0; s < n; ++s)
            H[l].block(s * K, s * K, K, K) = diffs.G[l];
    }

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n * K, n * K);
    for (int l = 0; l < n; ++l) {
        if (kind == LaplacianKind::Bochner) {
            acc += H[l] * proj * H[l];
            continue;
        }
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n * K, n * K);
        for (int a = 0; a < n; ++a)
            for (int s = 0; s < K; ++s)
                for (int b = 0; b < n; ++b)
                    for (int t = 0; t < K; ++t)
                        S(a * K + s, b * K + t) =
                            diffs.G[a](s, t) * P[s](l, b);
        if (kind == LaplacianKind::LLaplacian)
            acc += H[l] * proj * (H[l] + S);
        else
            acc += H[l] * proj * (H[l] - S);
    }
    if (kind == LaplacianKind::Hodge) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n * K, n * K);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                J.block(a * K, b * K, K, K) = diffs.G[a] * diffs.G[b];
        acc += J;
    }
    return Tkron.transpose() * acc * Tkron; // dK x dK
}

} // namespace

TEST_CASE("stencil differentials annihilate constants") {
    auto eng = testutil::rng(42);
    const RandomStencil s = random_stencil(eng, 22, 2, 3);
    const StencilDifferentials diffs = differentials_of(s, 3);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(22);
    for (const auto& G : diffs.G)
        CHECK((G * ones).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((diffs.D_base * ones).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("flat stencil differentials recover exact partial derivatives") {
    const FlatSetup s = flat_cloud(40, 11);
    const int K = 25;
    const NeighborIndex index(s.cloud.points);
    const std::vector<int> stencil = index.neighbors_of(0, K);
    Eigen::MatrixXd pts(K, 3);
    for (int k = 0; k < K; ++k)
        pts.row(k) = s.cloud.points.row(stencil[k]);
    const Eigen::MatrixXd theta = local_coordinates(
        pts, s.frames.T[0], s.cloud.points.row(0).transpose());
    const LocalFit fit = build_local_fit(theta, MultiIndexSet::full(2, 3),
                                         WeightScheme::BaseEmphasis);
    const StencilDifferentials diffs =
        build_stencil_differentials(fit, s.frames.T[0], s.frames, stencil);

    // f = a + t1 + t1^2 t2 sampled exactly; the fit reproduces it, so the
    // in-plane differentials match d1 f and d2 f at every stencil point
    // and the normal direction vanishes identically.
    Eigen::VectorXd f(K);
    for (int k = 0; k < K; ++k)
        f(k) = 0.7 + theta(k, 0) +
               theta(k, 0) * theta(k, 0) * theta(k, 1);
    const Eigen::VectorXd g1 = diffs.G[0] * f;
    const Eigen::VectorXd g2 = diffs.G[1] * f;
    const Eigen::VectorXd g3 = diffs.G[2] * f;
    for (int k = 0; k < K; ++k) {
        const double t1 = theta(k, 0);
        const double t2 = theta(k, 1);
        CHECK(std::abs(g1(k) - (1.0 + 2.0 * t1 * t2)) < 1e-10);
        CHECK(std::abs(g2(k) - t1 * t1) < 1e-10);
        CHECK(std::abs(g3(k)) < 1e-12);
    }
    const Eigen::VectorXd base = diffs.D_base * f;
    CHECK(std::abs(base(0) - 1.0) < 1e-10);
    CHECK(std::abs(base(1)) < 1e-10);
    CHECK(std::abs(base(2)) < 1e-12);
}

TEST_CASE("reduced weights match the dense single-stencil reference") {
    auto eng = testutil::rng(314);
    struct Dims {
        int d, n, l;
    };
    const Dims cases[] = {{2, 3, 3}, {3, 5, 2}};
    for (const auto& dims : cases) {
        CAPTURE(dims.d);
        CAPTURE(dims.n);
        const RandomStencil s = random_stencil(eng, 18, dims.d, dims.n);
        const StencilDifferentials diffs = differentials_of(s, dims.l);
        for (const LaplacianKind kind :
             {LaplacianKind::Bochner, LaplacianKind::LLaplacian,
              LaplacianKind::Hodge}) {
            const Eigen::MatrixXd W =
                extrinsic_local_weights(diffs, s.frames, s.stencil, kind);
            const Eigen::MatrixXd ref =
                dense_reference(diffs, s.frames, s.stencil, kind);
            double worst = 0.0;
            for (int c = 0; c < dims.d; ++c)
                for (int j = 0; j < 18; ++j)
                    for (int cp = 0; cp < dims.d; ++cp)
                        worst = std::max(
                            worst, std::abs(W(c, j * dims.d + cp) -
                                            ref(c * 18, cp * 18 + j)));
            CHECK(worst < 1e-10 * ref.lpNorm<Eigen::Infinity>());
        }
    }
}

TEST_CASE("flat plane: the three Laplacians reduce to their flat forms") {
    const FlatSetup s = flat_cloud(400, 2024);
    const int N = s.cloud.N();

    std::vector<Eigen::Vector2d> comps(N);
    for (int i = 0; i < N; ++i) {
        const double x = s.cloud.points(i, 0);
        comps[i] = Eigen::Vector2d(x * x, 0.0);
    }
    const Eigen::VectorXd u = dof_from_components(comps);

    const Eigen::VectorXd bu =
        assemble_extrinsic(s.cloud, s.frames, LaplacianKind::Bochner, 12, 2)
            .apply(u);
    const Eigen::VectorXd lu =
        assemble_extrinsic(s.cloud, s.frames, LaplacianKind::LLaplacian, 12,
                           2)
            .apply(u);
    const Eigen::VectorXd hu =
        assemble_extrinsic(s.cloud, s.frames, LaplacianKind::Hodge, 12, 2)
            .apply(u);
    for (int i = 0; i < N; ++i) {
        CHECK(std::abs(bu(2 * i) - 2.0) < 1e-8);
        CHECK(std::abs(bu(2 * i + 1)) < 1e-8);
        CHECK(std::abs(lu(2 * i) - 4.0) < 1e-8);
        CHECK(std::abs(lu(2 * i + 1)) < 1e-8);
        CHECK(std::abs(hu(2 * i) - 2.0) < 1e-8);
        CHECK(std::abs(hu(2 * i + 1)) < 1e-8);
    }
}

TEST_CASE("flat plane: mixed derivative block lands in the right component") {
    const FlatSetup s = flat_cloud(300, 7);
    const int N = s.cloud.N();

    std::vector<Eigen::Vector2d> comps(N);
    for (int i = 0; i < N; ++i)
        comps[i] =
            Eigen::Vector2d(s.cloud.points(i, 0) * s.cloud.points(i, 1), 0.0);
    const Eigen::VectorXd u = dof_from_components(comps);

    const Eigen::VectorXd lu =
        assemble_extrinsic(s.cloud, s.frames, LaplacianKind::LLaplacian, 12,
                           2)
            .apply(u);
    const Eigen::VectorXd bu =
        assemble_extrinsic(s.cloud, s.frames, LaplacianKind::Bochner, 12, 2)
            .apply(u);
    for (int i = 0; i < N; ++i) {
        CHECK(std::abs(lu(2 * i)) < 1e-8);
        CHECK(std::abs(lu(2 * i + 1) - 1.0) < 1e-8);
        CHECK(std::abs(bu(2 * i)) < 1e-8);
        CHECK(std::abs(bu(2 * i + 1)) < 1e-8);
    }
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
            assemble_extrinsic(cloud, frames, kind, 30, 3).dense();
        const Eigen::MatrixXd B =
            assemble_extrinsic(cloud, rotated, kind, 30, 3).dense();
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
        assemble_extrinsic(cloud, frames, LaplacianKind::Bochner, 50, 5);

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
    const Eigen::Matrix2d A = testutil::random_matrix(eng, 2, 2, -1.0, 1.0);
    const Eigen::Vector2d b = testutil::random_vector(eng, 2);

    std::vector<Eigen::Vector2d> comps(N);
    for (int i = 0; i < N; ++i) {
        const Eigen::Vector2d xy(s.cloud.points(i, 0), s.cloud.points(i, 1));
        comps[i] = A * xy + b;
    }
    const Eigen::VectorXd u = dof_from_components(comps);

    const ExtrinsicCovariant adv(s.cloud, s.frames, 10, 1);
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

    Eigen::VectorXd u(2 * cloud.N());
    for (int i = 0; i < cloud.N(); ++i) {
        const Eigen::Vector3d x = cloud.points.row(i).transpose();
        const Eigen::Vector3d v(-x.y(), x.x(), 0.0);
        u.segment(2 * i, 2) = frames.T[i].transpose() * v;
    }
    const ExtrinsicCovariant adv(cloud, frames, 40, 3);
    const Eigen::VectorXd out = adv.apply(u);
    double worst = 0.0;
    for (int i = 0; i < cloud.N(); ++i) {
        const Eigen::Vector3d x = cloud.points.row(i).transpose();
        const Eigen::Vector3d dv(-x.x(), -x.y(), 0.0);
        const Eigen::Vector2d expected = frames.T[i].transpose() * dv;
        worst = std::max(worst, (out.segment(2 * i, 2) - expected).norm());
    }
    CHECK(worst < 3e-2);
}

TEST_CASE("assembly is deterministic") {
    const ManifoldSpec spec = ManifoldSpec::red_blood_cell();
    const PointCloud cloud = sample_manifold(spec, 300, 9);
    const NeighborIndex index(cloud.points);
    const FrameField frames = estimate_frames(cloud, index, 30, 3);
    const Eigen::MatrixXd A =
        assemble_extrinsic(cloud, frames, LaplacianKind::Hodge, 30, 3)
            .dense();
    const Eigen::MatrixXd B =
        assemble_extrinsic(cloud, frames, LaplacianKind::Hodge, 30, 3)
            .dense();
    CHECK((A - B).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("assembly validates its inputs") {
    const FlatSetup s = flat_cloud(50, 4);
    FrameField bad = s.frames;
    bad.T.pop_back();
    CHECK_THROWS_AS(assemble_extrinsic(s.cloud, bad, LaplacianKind::Bochner,
                                       10, 2),
                    ValidationError);
    CHECK_THROWS_AS(assemble_extrinsic(s.cloud, s.frames,
                                       LaplacianKind::Bochner, 10, 1),
                    ValidationError);
    CHECK_THROWS_AS(assemble_extrinsic(s.cloud, s.frames,
                                       LaplacianKind::Bochner, 51, 2),
                    ValidationError);
    CHECK_THROWS_AS(ExtrinsicCovariant(s.cloud, s.frames, 10, 0),
                    ValidationError);
}
