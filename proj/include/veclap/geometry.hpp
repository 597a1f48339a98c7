#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace veclap {

enum class ManifoldKind {
    UnitSphere2D,
    Torus3D,
    Torus9D,
    FlatTorus12D,
    RedBloodCell,
    BumpySphere,
};

/// A parametrized test surface: embedding map, coordinate Jacobian, true
/// tangent frames, and an implicit residual used to check that sampled
/// points really lie on the surface.
class ManifoldSpec {
public:
    static ManifoldSpec unit_sphere();
    static ManifoldSpec torus3d(double R = 2.0, double r = 1.0);
    static ManifoldSpec torus9d(double R = 2.0);
    static ManifoldSpec flat_torus12d();
    static ManifoldSpec red_blood_cell();
    static ManifoldSpec bumpy_sphere();

    /// Lookup by the names used in configs and on the command line:
    /// sphere, torus3d, torus9d, flat_torus12d, rbc, bumpy_sphere.
    static ManifoldSpec from_name(const std::string& name);
    std::string name() const;

    ManifoldKind kind() const { return kind_; }
    int intrinsic_dim() const;
    int ambient_dim() const;
    double R() const { return R_; }
    double r() const { return r_; }

    /// Half-open parameter box [lo_i, hi_i) of the chart.
    void param_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const;

    Eigen::VectorXd embed(const Eigen::VectorXd& param) const;
    /// Coordinate tangents d(embed)/d(param), n x d.
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& param) const;
    /// Orthonormalized coordinate tangents; throws ValidationError where
    /// the chart is singular (sphere-type poles).
    Eigen::MatrixXd analytic_frame(const Eigen::VectorXd& param) const;

    /// How far x is from satisfying the surface's defining equations.
    /// Surfaces without a closed-form implicit description (RBC, bumpy
    /// sphere) compare against re-embedding the supplied parameters.
    double implicit_residual(const Eigen::VectorXd& x,
                             const Eigen::VectorXd* param = nullptr) const;

private:
    ManifoldSpec(ManifoldKind kind, double R, double r);

    ManifoldKind kind_;
    double R_ = 0.0;
    double r_ = 0.0;
};

struct PointCloud {
    Eigen::MatrixXd points; // N x n
    int d = 0;
    int n = 0;
    std::optional<Eigen::MatrixXd> param_coords; // N x d, set when sampled
    std::optional<ManifoldSpec> origin;

    int N() const { return static_cast<int>(points.rows()); }
};

/// Draw N points uniformly from the parameter box and map them onto the
/// surface. Identical (spec, N, seed) gives an identical cloud. Note the
/// distribution is uniform in parameters, not in surface area.
PointCloud sample_manifold(const ManifoldSpec& spec, int N, std::uint64_t seed);

/// Coarse fill-distance proxy: densely probe the surface and take the
/// largest probe-to-cloud nearest-neighbor distance. Diagnostic only.
double fill_distance_estimate(const PointCloud& cloud);

/// CSV round-trip. Header `x1,...,xn` plus `p1,...,pd` when parameter
/// coordinates are present; full double precision.
void save_cloud_csv(const std::string& path, const PointCloud& cloud);
PointCloud load_cloud_csv(const std::string& path);

} // namespace veclap
