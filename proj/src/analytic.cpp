#include "veclap/analytic.hpp"

#include <cmath>

#include "veclap/common.hpp"

namespace veclap {

WarpedMetric warped_metric(const ManifoldSpec& spec) {
    WarpedMetric m;
    switch (spec.kind()) {
        case ManifoldKind::UnitSphere2D:
            m.g1 = [](double, double& v, double& d, double& dd) {
                v = 1.0;
                d = 0.0;
                dd = 0.0;
            };
            m.g2 = [](double x, double& v, double& d, double& dd) {
                const double s = std::sin(x);
                v = s * s;
                d = std::sin(2.0 * x);
                dd = 2.0 * std::cos(2.0 * x);
            };
            return m;
        case ManifoldKind::Torus3D: {
            const double R = spec.R();
            const double r = spec.r();
            m.g1 = [r](double, double& v, double& d, double& dd) {
                v = r * r;
                d = 0.0;
                dd = 0.0;
            };
            m.g2 = [R, r](double x, double& v, double& d, double& dd) {
                const double w = R + r * std::cos(x);
                v = w * w;
                d = -2.0 * w * r * std::sin(x);
                dd = 2.0 * r * r * std::sin(x) * std::sin(x) -
                     2.0 * w * r * std::cos(x);
            };
            return m;
        }
        case ManifoldKind::Torus9D: {
            const double R = spec.R();
            m.g1 = [](double, double& v, double& d, double& dd) {
                v = 205.0 / 144.0;
                d = 0.0;
                dd = 0.0;
            };
            m.g2 = [R](double x, double& v, double& d, double& dd) {
                const double w = R + std::cos(x);
                v = 4.0 * w * w;
                d = -8.0 * w * std::sin(x);
                dd = 8.0 * std::sin(x) * std::sin(x) -
                     8.0 * w * std::cos(x);
            };
            return m;
        }
        default:
            throw ValidationError("no closed-form diagonal metric for " +
                                  spec.name());
    }
}

ChristoffelData christoffels(const WarpedMetric& metric, double theta1) {
    double g1, g1d, g1dd, g2, g2d, g2dd;
    metric.g1(theta1, g1, g1d, g1dd);
    metric.g2(theta1, g2, g2d, g2dd);
    if (!(g1 > 0.0) || !(g2 > 0.0))
        throw NumericalError("degenerate metric factor in the chart");

    ChristoffelData out;
    out.gamma[0].setZero();
    out.gamma[1].setZero();
    out.dgamma[0].setZero();
    out.dgamma[1].setZero();

    out.gamma[0](0, 0) = g1d / (2.0 * g1);
    out.gamma[0](1, 1) = -g2d / (2.0 * g1);
    out.gamma[1](0, 1) = g2d / (2.0 * g2);
    out.gamma[1](1, 0) = out.gamma[1](0, 1);

    out.dgamma[0](0, 0) =
        g1dd / (2.0 * g1) - g1d * g1d / (2.0 * g1 * g1);
    out.dgamma[0](1, 1) =
        -(g2dd / (2.0 * g1) - g2d * g1d / (2.0 * g1 * g1));
    out.dgamma[1](0, 1) =
        g2dd / (2.0 * g2) - g2d * g2d / (2.0 * g2 * g2);
    out.dgamma[1](1, 0) = out.dgamma[1](0, 1);

    out.inv_g1 = 1.0 / g1;
    out.inv_g2 = 1.0 / g2;
    return out;
}

Eigen::Vector2d bochner_laplacian(const WarpedMetric& metric,
                                  const CoordinateField2D& field,
                                  const Eigen::Vector2d& th) {
    const ChristoffelData cd = christoffels(metric, th(0));
    const Eigen::Vector2d u = field.value(th);
    const Eigen::Matrix2d J = field.jac(th);
    const std::array<Eigen::Matrix2d, 2> H = field.hess(th);

    // First covariant derivative A(k, j) = nabla_j u^k.
    Eigen::Matrix2d A;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            A(k, j) = J(k, j) + cd.gamma[k].row(j).dot(u);

    const double ginv[2] = {cd.inv_g1, cd.inv_g2};
    Eigen::Vector2d out = Eigen::Vector2d::Zero();
    for (int k = 0; k < 2; ++k) {
        for (int i = 0; i < 2; ++i) {
            double dA = H[k](i, i) + cd.gamma[k].row(i).dot(J.col(i));
            if (i == 0)
                dA += cd.dgamma[k].row(i).dot(u);
            double term = dA;
            for (int m = 0; m < 2; ++m) {
                term += cd.gamma[k](i, m) * A(m, i);
                term -= cd.gamma[m](i, i) * A(k, m);
            }
            out(k) += ginv[i] * term;
        }
    }
    return out;
}

Eigen::Vector2d covariant_advection(const WarpedMetric& metric,
                                    const CoordinateField2D& field,
                                    const Eigen::Vector2d& th) {
    const ChristoffelData cd = christoffels(metric, th(0));
    const Eigen::Vector2d u = field.value(th);
    const Eigen::Matrix2d J = field.jac(th);
    Eigen::Vector2d out;
    for (int k = 0; k < 2; ++k)
        out(k) = J.row(k).dot(u) + u.dot(cd.gamma[k] * u);
    return out;
}

Eigen::Vector3d euclidean_laplacian(const CoordinateField3D& field,
                                    const Eigen::Vector3d& th) {
    const std::array<Eigen::Matrix3d, 3> H = field.hess(th);
    Eigen::Vector3d out;
    for (int k = 0; k < 3; ++k)
        out(k) = H[k].trace();
    return out;
}

Eigen::Vector3d euclidean_advection(const CoordinateField3D& field,
                                    const Eigen::Vector3d& th) {
    return field.jac(th) * field.value(th);
}

CoordinateField2D torus_trig_field() {
    CoordinateField2D f;
    f.value = [](const Eigen::Vector2d& th) {
        return Eigen::Vector2d(std::sin(th(0)) * std::sin(th(1)),
                               std::sin(th(0)) * std::cos(th(1)));
    };
    f.jac = [](const Eigen::Vector2d& th) {
        const double s1 = std::sin(th(0)), c1 = std::cos(th(0));
        const double s2 = std::sin(th(1)), c2 = std::cos(th(1));
        Eigen::Matrix2d J;
        J << c1 * s2, s1 * c2, c1 * c2, -s1 * s2;
        return J;
    };
    f.hess = [](const Eigen::Vector2d& th) {
        const double s1 = std::sin(th(0)), c1 = std::cos(th(0));
        const double s2 = std::sin(th(1)), c2 = std::cos(th(1));
        std::array<Eigen::Matrix2d, 2> H;
        H[0] << -s1 * s2, c1 * c2, c1 * c2, -s1 * s2;
        H[1] << -s1 * c2, -c1 * s2, -c1 * s2, -s1 * c2;
        return H;
    };
    return f;
}

CoordinateField2D burgers_profile() {
    CoordinateField2D f;
    f.value = [](const Eigen::Vector2d& th) {
        return Eigen::Vector2d(
            0.05 * std::sin(2.0 * th(0)) * std::sin(3.0 * th(1)),
            0.05 * std::sin(th(0)) * std::cos(th(1)));
    };
    f.jac = [](const Eigen::Vector2d& th) {
        const double s1 = std::sin(th(0)), c1 = std::cos(th(0));
        const double s2 = std::sin(th(1)), c2 = std::cos(th(1));
        const double S1 = std::sin(2.0 * th(0)), C1 = std::cos(2.0 * th(0));
        const double S2 = std::sin(3.0 * th(1)), C2 = std::cos(3.0 * th(1));
        Eigen::Matrix2d J;
        J << 0.1 * C1 * S2, 0.15 * S1 * C2, 0.05 * c1 * c2,
            -0.05 * s1 * s2;
        return J;
    };
    f.hess = [](const Eigen::Vector2d& th) {
        const double s1 = std::sin(th(0)), c1 = std::cos(th(0));
        const double s2 = std::sin(th(1)), c2 = std::cos(th(1));
        const double S1 = std::sin(2.0 * th(0)), C1 = std::cos(2.0 * th(0));
        const double S2 = std::sin(3.0 * th(1)), C2 = std::cos(3.0 * th(1));
        std::array<Eigen::Matrix2d, 2> H;
        H[0] << -0.2 * S1 * S2, 0.3 * C1 * C2, 0.3 * C1 * C2,
            -0.45 * S1 * S2;
        H[1] << -0.05 * s1 * c2, -0.05 * c1 * s2, -0.05 * c1 * s2,
            -0.05 * s1 * c2;
        return H;
    };
    return f;
}

CoordinateField3D flat_torus_trig_field() {
    CoordinateField3D f;
    f.value = [](const Eigen::Vector3d& p) {
        return Eigen::Vector3d(std::sin(p(0)) * std::sin(p(1)),
                               std::sin(p(1)) * std::cos(p(2)),
                               std::sin(p(2)) * std::cos(p(0)));
    };
    f.jac = [](const Eigen::Vector3d& p) {
        const double s1 = std::sin(p(0)), c1 = std::cos(p(0));
        const double s2 = std::sin(p(1)), c2 = std::cos(p(1));
        const double s3 = std::sin(p(2)), c3 = std::cos(p(2));
        Eigen::Matrix3d J;
        J << c1 * s2, s1 * c2, 0.0, 0.0, c2 * c3, -s2 * s3, -s3 * s1, 0.0,
            c3 * c1;
        return J;
    };
    f.hess = [](const Eigen::Vector3d& p) {
        const double s1 = std::sin(p(0)), c1 = std::cos(p(0));
        const double s2 = std::sin(p(1)), c2 = std::cos(p(1));
        const double s3 = std::sin(p(2)), c3 = std::cos(p(2));
        std::array<Eigen::Matrix3d, 3> H;
        H[0] << -s1 * s2, c1 * c2, 0.0, c1 * c2, -s1 * s2, 0.0, 0.0, 0.0,
            0.0;
        H[1] << 0.0, 0.0, 0.0, 0.0, -s2 * c3, -c2 * s3, 0.0, -c2 * s3,
            -s2 * c3;
        H[2] << -s3 * c1, 0.0, -c3 * s1, 0.0, 0.0, 0.0, -c3 * s1, 0.0,
            -s3 * c1;
        return H;
    };
    return f;
}

CoordinateField2D scale_field(const CoordinateField2D& f, double s) {
    CoordinateField2D g;
    g.value = [f, s](const Eigen::Vector2d& th) {
        return (s * f.value(th)).eval();
    };
    g.jac = [f, s](const Eigen::Vector2d& th) {
        return (s * f.jac(th)).eval();
    };
    g.hess = [f, s](const Eigen::Vector2d& th) {
        std::array<Eigen::Matrix2d, 2> H = f.hess(th);
        H[0] *= s;
        H[1] *= s;
        return H;
    };
    return g;
}

Eigen::MatrixXd ambient_field_on_cloud(
    const ManifoldSpec& spec, const PointCloud& cloud,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& value) {
    if (!cloud.param_coords)
        throw ValidationError("cloud carries no parameter coordinates");
    const Eigen::MatrixXd& params = *cloud.param_coords;
    if (params.cols() != spec.intrinsic_dim())
        throw ValidationError("parameter coordinates do not match the "
                              "surface");
    Eigen::MatrixXd out(cloud.N(), spec.ambient_dim());
    for (int i = 0; i < cloud.N(); ++i) {
        const Eigen::VectorXd p = params.row(i).transpose();
        out.row(i) = (spec.jacobian(p) * value(p)).transpose();
    }
    return out;
}

Eigen::VectorXd frame_components(const FrameField& frames,
                                 const Eigen::MatrixXd& ambient) {
    if (static_cast<int>(ambient.rows()) != frames.N() ||
        static_cast<int>(ambient.cols()) != frames.n())
        throw ValidationError("ambient field shape does not match frames");
    const int d = frames.d();
    Eigen::VectorXd u(frames.N() * d);
    for (int i = 0; i < frames.N(); ++i)
        u.segment(i * d, d) =
            frames.T[i].transpose() * ambient.row(i).transpose();
    return u;
}

Eigen::MatrixXd ambient_of_components(const FrameField& frames,
                                      const Eigen::VectorXd& u) {
    const int d = frames.d();
    if (u.size() != frames.N() * d)
        throw ValidationError("component vector length does not match "
                              "frames");
    Eigen::MatrixXd out(frames.N(), frames.n());
    for (int i = 0; i < frames.N(); ++i)
        out.row(i) = (frames.T[i] * u.segment(i * d, d)).transpose();
    return out;
}

} // namespace veclap
