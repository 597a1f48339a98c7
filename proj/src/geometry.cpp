#include "veclap/geometry.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "veclap/common.hpp"
#include "veclap/frame.hpp"
#include "veclap/knn.hpp"

namespace veclap {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Red blood cell shape constants.
constexpr double kRbcR = 3.91 / 3.39;
constexpr double kRbcC0 = 0.81 / 3.39;
constexpr double kRbcC2 = 7.83 / 3.39;
constexpr double kRbcC4 = -4.39 / 3.39;

// Bumpy sphere radial perturbation r = 1 + a sin^7(3 theta) sin(4 phi).
constexpr double kBumpAmp = 0.2;

// Scale of the last coordinate of the 9-dimensional torus embedding:
// sqrt(1 + 1/4 + 1/9 + 1/16).
const double kTorus9Z = std::sqrt(205.0 / 144.0);

double rbc_height(double theta) {
    const double c = std::cos(theta);
    return 0.5 * std::sin(theta) * (kRbcC0 + kRbcC2 * c * c + kRbcC4 * c * c * c * c);
}

double rbc_height_dtheta(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double w = kRbcC0 + kRbcC2 * c * c + kRbcC4 * c * c * c * c;
    const double dw = -2.0 * kRbcC2 * c * s - 4.0 * kRbcC4 * c * c * c * s;
    return 0.5 * c * w + 0.5 * s * dw;
}

double bump_radius(double theta, double phi) {
    const double s3 = std::sin(3.0 * theta);
    return 1.0 + kBumpAmp * std::pow(s3, 7) * std::sin(4.0 * phi);
}

double bump_radius_dtheta(double theta, double phi) {
    const double s3 = std::sin(3.0 * theta);
    return kBumpAmp * 21.0 * std::pow(s3, 6) * std::cos(3.0 * theta) * std::sin(4.0 * phi);
}

double bump_radius_dphi(double theta, double phi) {
    const double s3 = std::sin(3.0 * theta);
    return kBumpAmp * 4.0 * std::pow(s3, 7) * std::cos(4.0 * phi);
}

} // namespace

ManifoldSpec::ManifoldSpec(ManifoldKind kind, double R, double r)
    : kind_(kind), R_(R), r_(r) {}

ManifoldSpec ManifoldSpec::unit_sphere() { return ManifoldSpec(ManifoldKind::UnitSphere2D, 0, 0); }

ManifoldSpec ManifoldSpec::torus3d(double R, double r) {
    if (!(std::isfinite(R) && std::isfinite(r) && r > 0.0 && R > r))
        throw ValidationError("torus3d requires 0 < r < R");
    return ManifoldSpec(ManifoldKind::Torus3D, R, r);
}

ManifoldSpec ManifoldSpec::torus9d(double R) {
    if (!(std::isfinite(R) && R > 1.0))
        throw ValidationError("torus9d requires R > 1 so the tube radius stays positive");
    return ManifoldSpec(ManifoldKind::Torus9D, R, 0);
}

ManifoldSpec ManifoldSpec::flat_torus12d() { return ManifoldSpec(ManifoldKind::FlatTorus12D, 0, 0); }
ManifoldSpec ManifoldSpec::red_blood_cell() { return ManifoldSpec(ManifoldKind::RedBloodCell, 0, 0); }
ManifoldSpec ManifoldSpec::bumpy_sphere() { return ManifoldSpec(ManifoldKind::BumpySphere, 0, 0); }

ManifoldSpec ManifoldSpec::from_name(const std::string& name) {
    if (name == "sphere") return unit_sphere();
    if (name == "torus3d") return torus3d();
    if (name == "torus9d") return torus9d();
    if (name == "flat_torus12d") return flat_torus12d();
    if (name == "rbc") return red_blood_cell();
    if (name == "bumpy_sphere") return bumpy_sphere();
    throw ValidationError("unknown manifold: " + name +
                          " (expected sphere, torus3d, torus9d, flat_torus12d, rbc, bumpy_sphere)");
}

std::string ManifoldSpec::name() const {
    switch (kind_) {
        case ManifoldKind::UnitSphere2D: return "sphere";
        case ManifoldKind::Torus3D: return "torus3d";
        case ManifoldKind::Torus9D: return "torus9d";
        case ManifoldKind::FlatTorus12D: return "flat_torus12d";
        case ManifoldKind::RedBloodCell: return "rbc";
        case ManifoldKind::BumpySphere: return "bumpy_sphere";
    }
    throw ValidationError("unreachable manifold kind");
}

int ManifoldSpec::intrinsic_dim() const {
    return kind_ == ManifoldKind::FlatTorus12D ? 3 : 2;
}

int ManifoldSpec::ambient_dim() const {
    switch (kind_) {
        case ManifoldKind::UnitSphere2D:
        case ManifoldKind::Torus3D:
        case ManifoldKind::RedBloodCell:
        case ManifoldKind::BumpySphere: return 3;
        case ManifoldKind::Torus9D: return 9;
        case ManifoldKind::FlatTorus12D: return 12;
    }
    throw ValidationError("unreachable manifold kind");
}

void ManifoldSpec::param_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
    const int d = intrinsic_dim();
    lo.resize(d);
    hi.resize(d);
    switch (kind_) {
        case ManifoldKind::UnitSphere2D:
        case ManifoldKind::BumpySphere:
            lo << 0.0, 0.0;
            hi << kPi, 2.0 * kPi;
            break;
        case ManifoldKind::Torus3D:
        case ManifoldKind::Torus9D:
            lo << 0.0, 0.0;
            hi << 2.0 * kPi, 2.0 * kPi;
            break;
        case ManifoldKind::FlatTorus12D:
            lo.setZero();
            hi.setConstant(2.0 * kPi);
            break;
        case ManifoldKind::RedBloodCell:
            lo << -kPi / 2.0, -kPi;
            hi << kPi / 2.0, kPi;
            break;
    }
}

Eigen::VectorXd ManifoldSpec::embed(const Eigen::VectorXd& param) const {
    if (param.size() != intrinsic_dim())
        throw ValidationError("embed: parameter dimension mismatch");
    Eigen::VectorXd x(ambient_dim());
    switch (kind_) {
        case ManifoldKind::UnitSphere2D: {
            const double th = param(0), ph = param(1);
            x << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
            break;
        }
        case ManifoldKind::Torus3D: {
            const double th = param(0), ph = param(1);
            const double w = R_ + r_ * std::cos(th);
            x << w * std::cos(ph), w * std::sin(ph), r_ * std::sin(th);
            break;
        }
        case ManifoldKind::Torus9D: {
            const double th = param(0), ph = param(1);
            const double w = R_ + std::cos(th);
            for (int i = 1; i <= 4; ++i) {
                x(2 * i - 2) = w * std::cos(i * ph) / i;
                x(2 * i - 1) = w * std::sin(i * ph) / i;
            }
            x(8) = kTorus9Z * std::sin(th);
            break;
        }
        case ManifoldKind::FlatTorus12D: {
            const double s = 1.0 / std::sqrt(5.0);
            for (int b = 0; b < 3; ++b) {
                const double ph = param(b);
                x(4 * b + 0) = s * std::cos(ph);
                x(4 * b + 1) = s * std::sin(ph);
                x(4 * b + 2) = s * std::cos(2.0 * ph);
                x(4 * b + 3) = s * std::sin(2.0 * ph);
            }
            break;
        }
        case ManifoldKind::RedBloodCell: {
            const double th = param(0), ph = param(1);
            x << kRbcR * std::cos(th) * std::cos(ph), kRbcR * std::cos(th) * std::sin(ph),
                rbc_height(th);
            break;
        }
        case ManifoldKind::BumpySphere: {
            const double th = param(0), ph = param(1);
            const double r = bump_radius(th, ph);
            x << r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph),
                r * std::cos(th);
            break;
        }
    }
    return x;
}

Eigen::MatrixXd ManifoldSpec::jacobian(const Eigen::VectorXd& param) const {
    if (param.size() != intrinsic_dim())
        throw ValidationError("jacobian: parameter dimension mismatch");
    Eigen::MatrixXd J(ambient_dim(), intrinsic_dim());
    switch (kind_) {
        case ManifoldKind::UnitSphere2D: {
            const double th = param(0), ph = param(1);
            J.col(0) << std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th);
            J.col(1) << -std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph), 0.0;
            break;
        }
        case ManifoldKind::Torus3D: {
            const double th = param(0), ph = param(1);
            const double w = R_ + r_ * std::cos(th);
            J.col(0) << -r_ * std::sin(th) * std::cos(ph), -r_ * std::sin(th) * std::sin(ph),
                r_ * std::cos(th);
            J.col(1) << -w * std::sin(ph), w * std::cos(ph), 0.0;
            break;
        }
        case ManifoldKind::Torus9D: {
            const double th = param(0), ph = param(1);
            const double w = R_ + std::cos(th);
            for (int i = 1; i <= 4; ++i) {
                J(2 * i - 2, 0) = -std::sin(th) * std::cos(i * ph) / i;
                J(2 * i - 1, 0) = -std::sin(th) * std::sin(i * ph) / i;
                J(2 * i - 2, 1) = -w * std::sin(i * ph);
                J(2 * i - 1, 1) = w * std::cos(i * ph);
            }
            J(8, 0) = kTorus9Z * std::cos(th);
            J(8, 1) = 0.0;
            break;
        }
        case ManifoldKind::FlatTorus12D: {
            const double s = 1.0 / std::sqrt(5.0);
            J.setZero();
            for (int b = 0; b < 3; ++b) {
                const double ph = param(b);
                J(4 * b + 0, b) = -s * std::sin(ph);
                J(4 * b + 1, b) = s * std::cos(ph);
                J(4 * b + 2, b) = -2.0 * s * std::sin(2.0 * ph);
                J(4 * b + 3, b) = 2.0 * s * std::cos(2.0 * ph);
            }
            break;
        }
        case ManifoldKind::RedBloodCell: {
            const double th = param(0), ph = param(1);
            J.col(0) << -kRbcR * std::sin(th) * std::cos(ph), -kRbcR * std::sin(th) * std::sin(ph),
                rbc_height_dtheta(th);
            J.col(1) << -kRbcR * std::cos(th) * std::sin(ph), kRbcR * std::cos(th) * std::cos(ph),
                0.0;
            break;
        }
        case ManifoldKind::BumpySphere: {
            const double th = param(0), ph = param(1);
            const double r = bump_radius(th, ph);
            const double rt = bump_radius_dtheta(th, ph);
            const double rp = bump_radius_dphi(th, ph);
            const Eigen::Vector3d u(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                                    std::cos(th));
            const Eigen::Vector3d ut(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph),
                                     -std::sin(th));
            const Eigen::Vector3d up(-std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph),
                                     0.0);
            J.col(0) = rt * u + r * ut;
            J.col(1) = rp * u + r * up;
            break;
        }
    }
    return J;
}

Eigen::MatrixXd ManifoldSpec::analytic_frame(const Eigen::VectorXd& param) const {
    Eigen::MatrixXd J = jacobian(param);
    for (Eigen::Index c = 0; c < J.cols(); ++c)
        if (J.col(c).norm() < 1e-12)
            throw ValidationError("analytic_frame: chart is singular at this parameter");
    return orthonormalize(J);
}

double ManifoldSpec::implicit_residual(const Eigen::VectorXd& x,
                                       const Eigen::VectorXd* param) const {
    if (x.size() != ambient_dim())
        throw ValidationError("implicit_residual: ambient dimension mismatch");
    switch (kind_) {
        case ManifoldKind::UnitSphere2D:
            return std::abs(x.norm() - 1.0);
        case ManifoldKind::Torus3D: {
            const double rho = std::hypot(x(0), x(1));
            return std::abs((rho - R_) * (rho - R_) + x(2) * x(2) - r_ * r_);
        }
        case ManifoldKind::Torus9D: {
            // All four pair radii must agree with R + cos(theta); the
            // last coordinate fixes sin(theta).
            const double rho1 = std::hypot(x(0), x(1));
            double res = 0.0;
            for (int i = 2; i <= 4; ++i)
                res = std::max(res, std::abs(i * std::hypot(x(2 * i - 2), x(2 * i - 1)) - rho1));
            const double c = rho1 - R_;
            const double s = x(8) / kTorus9Z;
            return std::max(res, std::abs(c * c + s * s - 1.0));
        }
        case ManifoldKind::FlatTorus12D: {
            const double s5 = std::sqrt(5.0);
            double res = 0.0;
            for (int b = 0; b < 3; ++b) {
                const double a = s5 * x(4 * b + 0), bb = s5 * x(4 * b + 1);
                const double c = s5 * x(4 * b + 2), dd = s5 * x(4 * b + 3);
                res = std::max(res, std::abs(a * a + bb * bb - 1.0));
                res = std::max(res, std::abs(c - (a * a - bb * bb)));
                res = std::max(res, std::abs(dd - 2.0 * a * bb));
            }
            return res;
        }
        case ManifoldKind::RedBloodCell:
        case ManifoldKind::BumpySphere: {
            if (param == nullptr)
                throw ValidationError(
                    "implicit_residual: this surface needs parameter coordinates");
            return (x - embed(*param)).lpNorm<Eigen::Infinity>();
        }
    }
    throw ValidationError("unreachable manifold kind");
}

PointCloud sample_manifold(const ManifoldSpec& spec, int N, std::uint64_t seed) {
    if (N < 1) throw ValidationError("sample_manifold: N must be at least 1");
    const int d = spec.intrinsic_dim();
    Eigen::VectorXd lo, hi;
    spec.param_box(lo, hi);

    std::mt19937_64 rng(seed);
    PointCloud cloud;
    cloud.d = d;
    cloud.n = spec.ambient_dim();
    cloud.points.resize(N, cloud.n);
    Eigen::MatrixXd params(N, d);
    for (int i = 0; i < N; ++i) {
        Eigen::VectorXd p(d);
        for (int c = 0; c < d; ++c)
            p(c) = std::uniform_real_distribution<double>(lo(c), hi(c))(rng);
        params.row(i) = p.transpose();
        cloud.points.row(i) = spec.embed(p).transpose();
    }
    cloud.param_coords = std::move(params);
    cloud.origin = spec;
    return cloud;
}

double fill_distance_estimate(const PointCloud& cloud) {
    if (cloud.N() < 2) throw ValidationError("fill_distance_estimate: need at least 2 points");
    if (!cloud.origin)
        throw ValidationError("fill_distance_estimate: cloud has no originating surface");
    const ManifoldSpec& spec = *cloud.origin;

    NeighborIndex index(cloud.points);
    const int probes = std::max(4 * cloud.N(), 4000);
    // A fixed probe seed keeps the estimate a pure function of the cloud.
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    Eigen::VectorXd lo, hi;
    spec.param_box(lo, hi);
    const int d = spec.intrinsic_dim();

    double h = 0.0;
    Eigen::VectorXd p(d);
    for (int i = 0; i < probes; ++i) {
        for (int c = 0; c < d; ++c)
            p(c) = std::uniform_real_distribution<double>(lo(c), hi(c))(rng);
        const Eigen::VectorXd x = spec.embed(p);
        const int nearest = index.query(x, 1)[0];
        h = std::max(h, (cloud.points.row(nearest).transpose() - x).norm());
    }
    return h;
}

void save_cloud_csv(const std::string& path, const PointCloud& cloud) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << "x1";
    for (int c = 2; c <= cloud.n; ++c) out << ",x" << c;
    if (cloud.param_coords)
        for (int c = 1; c <= cloud.d; ++c) out << ",p" << c;
    out << "\n";
    for (int i = 0; i < cloud.N(); ++i) {
        out << format_full(cloud.points(i, 0));
        for (int c = 1; c < cloud.n; ++c) out << "," << format_full(cloud.points(i, c));
        if (cloud.param_coords)
            for (int c = 0; c < cloud.d; ++c) out << "," << format_full((*cloud.param_coords)(i, c));
        out << "\n";
    }
    if (!out) throw ValidationError("write failed: " + path);
}

PointCloud load_cloud_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty cloud file: " + path);

    int n = 0, d = 0;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (!cell.empty() && cell[0] == 'x')
                ++n;
            else if (!cell.empty() && cell[0] == 'p')
                ++d;
            else
                throw ValidationError("unexpected cloud column '" + cell + "' in " + path);
        }
    }
    if (n < 2) throw ValidationError("cloud file needs at least two ambient columns: " + path);

    std::vector<double> flat;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int got = 0;
        while (std::getline(ss, cell, ',')) {
            flat.push_back(std::stod(cell));
            ++got;
        }
        if (got != n + d) throw ValidationError("cloud row width mismatch in " + path);
        ++rows;
    }
    if (rows < 1) throw ValidationError("cloud file holds no points: " + path);

    PointCloud cloud;
    cloud.n = n;
    cloud.d = d;
    cloud.points.resize(rows, n);
    Eigen::MatrixXd params(rows, d);
    for (int i = 0; i < rows; ++i) {
        for (int c = 0; c < n; ++c) cloud.points(i, c) = flat[i * (n + d) + c];
        for (int c = 0; c < d; ++c) params(i, c) = flat[i * (n + d) + n + c];
    }
    if (d > 0) cloud.param_coords = std::move(params);
    if (!cloud.points.allFinite())
        throw ValidationError("cloud file holds non-finite coordinates: " + path);
    return cloud;
}

} // namespace veclap
