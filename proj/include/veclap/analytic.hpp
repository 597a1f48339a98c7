#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "veclap/frame.hpp"
#include "veclap/geometry.hpp"

namespace veclap {

/// Diagonal chart metric diag(g1, g2) whose factors depend only on the
/// first coordinate. Covers the sphere and both curved tori; eval fills
/// value, first and second derivative of the factor at theta1.
struct WarpedMetric {
    std::function<void(double, double&, double&, double&)> g1;
    std::function<void(double, double&, double&, double&)> g2;
};

/// Chart metric of a parametrized test surface. Throws ValidationError
/// for surfaces outside the warped diagonal family.
WarpedMetric warped_metric(const ManifoldSpec& spec);

/// Christoffel symbols of a warped diagonal metric and their derivatives
/// in the first coordinate: gamma[k](i, j) = Gamma^k_{ij} and
/// dgamma[k](i, j) = d_1 Gamma^k_{ij}. Second-coordinate derivatives
/// vanish because the factors depend on theta1 alone.
struct ChristoffelData {
    std::array<Eigen::Matrix2d, 2> gamma;
    std::array<Eigen::Matrix2d, 2> dgamma;
    double inv_g1 = 0.0;
    double inv_g2 = 0.0;
};

ChristoffelData christoffels(const WarpedMetric& metric, double theta1);

/// Vector field on a 2d chart in the coordinate basis, with the partial
/// derivatives the closed-form operators need: jac(k, j) = d_j u^k and
/// hess[k](i, j) = d_i d_j u^k.
struct CoordinateField2D {
    std::function<Eigen::Vector2d(const Eigen::Vector2d&)> value;
    std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> jac;
    std::function<std::array<Eigen::Matrix2d, 2>(const Eigen::Vector2d&)>
        hess;
};

/// Same contract in three chart coordinates, for the flat torus.
struct CoordinateField3D {
    std::function<Eigen::Vector3d(const Eigen::Vector3d&)> value;
    std::function<Eigen::Matrix3d(const Eigen::Vector3d&)> jac;
    std::function<std::array<Eigen::Matrix3d, 3>(const Eigen::Vector3d&)>
        hess;
};

/// Connection Laplacian of the field at a chart point, in the coordinate
/// basis: the metric trace of the second covariant derivative.
Eigen::Vector2d bochner_laplacian(const WarpedMetric& metric,
                                  const CoordinateField2D& field,
                                  const Eigen::Vector2d& th);

/// Self-advection (u . nabla) u at a chart point, coordinate basis.
Eigen::Vector2d covariant_advection(const WarpedMetric& metric,
                                    const CoordinateField2D& field,
                                    const Eigen::Vector2d& th);

/// Plain component-wise Laplacian for charts whose metric is the
/// identity (the flat torus).
Eigen::Vector3d euclidean_laplacian(const CoordinateField3D& field,
                                    const Eigen::Vector3d& th);

/// Self-advection in an identity-metric chart.
Eigen::Vector3d euclidean_advection(const CoordinateField3D& field,
                                    const Eigen::Vector3d& th);

/// u = (sin t1 sin t2, sin t1 cos t2): the manufactured solution used on
/// the curved tori, and the spatial profile of the time-dependent runs.
CoordinateField2D torus_trig_field();

/// w = 0.05 (sin 2t1 sin 3t2, sin t1 cos t2): the forcing profile of the
/// qualitative advection-diffusion run.
CoordinateField2D burgers_profile();

/// u = (sin p1 sin p2, sin p2 cos p3, sin p3 cos p1) on the flat torus.
CoordinateField3D flat_torus_trig_field();

CoordinateField2D scale_field(const CoordinateField2D& f, double s);

/// Ambient values of a coordinate-basis field on a sampled cloud: row i
/// is J(param_i) * value(param_i). Requires parameter coordinates.
Eigen::MatrixXd ambient_field_on_cloud(
    const ManifoldSpec& spec, const PointCloud& cloud,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& value);

/// Per-point frame components of ambient rows: u[i*d + c] = T_i(:,c) . row i.
Eigen::VectorXd frame_components(const FrameField& frames,
                                 const Eigen::MatrixXd& ambient);

/// Ambient rows of a frame-component vector: row i = T_i * u_i.
Eigen::MatrixXd ambient_of_components(const FrameField& frames,
                                      const Eigen::VectorXd& u);

} // namespace veclap
