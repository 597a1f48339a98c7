#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "veclap/analytic.hpp"
#include "veclap/block_operator.hpp"
#include "veclap/common.hpp"
#include "veclap/config.hpp"
#include "veclap/eigensolve.hpp"
#include "veclap/extrinsic.hpp"
#include "veclap/geometry.hpp"
#include "veclap/intrinsic.hpp"
#include "veclap/knn.hpp"
#include "veclap/pde.hpp"
#include "veclap/study.hpp"
#include "veclap/tangent_estimation.hpp"

namespace {

using namespace veclap;

struct GeometryArgs {
    std::string manifold;
    int n = 800;
    long seed = 1;
};

struct FrameArgs {
    int K = 50;
    int l = 4;
    bool analytic = false;
};

struct OperatorArgs {
    std::string method = "extrinsic";
    std::string kind = "bochner";
};

void add_geometry(CLI::App* cmd, GeometryArgs& g) {
    cmd->add_option("--manifold", g.manifold,
                    "surface name: sphere, torus3d, torus9d, flat_torus12d, "
                    "rbc, bumpy_sphere")
        ->required();
    cmd->add_option("--n", g.n, "number of sample points")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", g.seed, "sampling seed");
}

void add_frames(CLI::App* cmd, FrameArgs& f) {
    cmd->add_option("--k", f.K, "stencil size");
    cmd->add_option("--l", f.l, "fit degree");
    cmd->add_flag("--analytic", f.analytic,
                  "use exact tangent frames instead of estimated ones");
}

void add_operator(CLI::App* cmd, OperatorArgs& o) {
    cmd->add_option("--method", o.method,
                    "discretization route: intrinsic or extrinsic");
    cmd->add_option("--kind", o.kind,
                    "Laplacian flavor: bochner, lb, or hodge");
}

PointCloud sampled(const GeometryArgs& g) {
    return sample_manifold(ManifoldSpec::from_name(g.manifold), g.n, g.seed);
}

FrameField frames_for(const PointCloud& cloud, const NeighborIndex& index,
                      const FrameArgs& f) {
    if (f.analytic) return analytic_frames(cloud);
    return estimate_frames(cloud, index, f.K, f.l);
}

BlockOperator build_operator(const PointCloud& cloud,
                             const FrameField& frames, const OperatorArgs& o,
                             int K, int l_field, int l_patch) {
    const LaplacianKind kind = laplacian_kind_from_name(o.kind);
    if (o.method == "intrinsic")
        return assemble_intrinsic(cloud, frames, kind, K, l_field, l_patch);
    if (o.method == "extrinsic")
        return assemble_extrinsic(cloud, frames, kind, K, l_field);
    throw ValidationError("unknown method '" + o.method +
                          "' (expected intrinsic or extrinsic)");
}

int cmd_sample(const GeometryArgs& g, const std::string& out) {
    const PointCloud cloud = sampled(g);
    save_cloud_csv(out, cloud);
    std::printf("wrote %d points on %s to %s (fill distance ~ %.4g)\n",
                cloud.N(), g.manifold.c_str(), out.c_str(),
                fill_distance_estimate(cloud));
    return 0;
}

int cmd_frames(const GeometryArgs& g, const FrameArgs& f,
               const std::string& out) {
    const PointCloud cloud = sampled(g);
    const NeighborIndex index(cloud.points);
    const FrameField frames = frames_for(cloud, index, f);
    save_frames_csv(out, frames);
    std::printf("wrote %d %s frames (%dx%d each) to %s\n", frames.N(),
                f.analytic ? "exact" : "estimated", frames.n(), frames.d(),
                out.c_str());
    return 0;
}

int cmd_assemble(const GeometryArgs& g, const FrameArgs& f,
                 const OperatorArgs& o, bool do_stabilize,
                 const std::string& out) {
    const PointCloud cloud = sampled(g);
    const NeighborIndex index(cloud.points);
    const FrameField frames = frames_for(cloud, index, f);
    BlockOperator op = build_operator(cloud, frames, o, f.K, f.l, f.l);
    double shift = 0.0;
    if (do_stabilize) shift = stabilize(op);
    save_operator_coo(out, op, o.kind);
    std::printf("wrote %s %s operator (dim %d, K=%d) to %s", o.method.c_str(),
                o.kind.c_str(), op.dim(), f.K, out.c_str());
    if (do_stabilize) std::printf(", spectral shift %.3e", shift);
    std::printf("\n");
    return 0;
}

int cmd_eig(const GeometryArgs& g, const FrameArgs& f, const OperatorArgs& o,
            bool do_stabilize, int count, double sigma,
            const std::string& out) {
    const PointCloud cloud = sampled(g);
    const NeighborIndex index(cloud.points);
    const FrameField frames = frames_for(cloud, index, f);
    BlockOperator op = build_operator(cloud, frames, o, f.K, f.l, f.l);
    if (do_stabilize) stabilize(op);
    Spectrum spectrum;
    if (count > 0) {
        ArnoldiOptions opts;
        opts.sigma = sigma;
        spectrum = extremal_real_eigenvalues(op, count, opts);
    } else {
        spectrum = dense_eigenvalues(op);
    }
    save_eig_csv(out, spectrum);
    const std::size_t show = std::min<std::size_t>(8, spectrum.values.size());
    std::printf("%zu eigenvalues (%s) written to %s; largest real parts:\n",
                spectrum.values.size(), spectrum.method.c_str(), out.c_str());
    for (std::size_t k = 0; k < show; ++k)
        std::printf("  %2zu: % .10e %+.3e i\n", k + 1,
                    spectrum.values[k].real(), spectrum.values[k].imag());
    return 0;
}

int cmd_poisson(const GeometryArgs& g, const FrameArgs& f,
                const OperatorArgs& o, double a) {
    const ManifoldSpec spec = ManifoldSpec::from_name(g.manifold);
    const StudyOutcome out = run_poisson_study(
        spec, o.method, laplacian_kind_from_name(o.kind), f.K, f.l, {g.n},
        {g.seed}, a, f.analytic ? "analytic" : "estimated");
    for (const std::string& failure : out.failures)
        std::fprintf(stderr, "veclap: %s\n", failure.c_str());
    if (out.rows.empty()) return 3;
    for (const ReportRow& row : out.rows)
        std::printf("%s = %.6e  (%.2fs)\n", row.metric.c_str(), row.value,
                    row.seconds);
    return 0;
}

int cmd_evolve(const GeometryArgs& g, const FrameArgs& f,
               const OperatorArgs& o, const std::string& equation, double nu,
               double dt, double t_end, double initial_scale,
               const std::string& stepper, int snapshot_every, int l_patch,
               const std::string& out_dir) {
    if (equation != "diffusion" && equation != "burgers")
        throw ValidationError("unknown equation '" + equation +
                              "' (expected diffusion or burgers)");
    const ManifoldSpec spec = ManifoldSpec::from_name(g.manifold);
    const PointCloud cloud = sampled(g);
    const NeighborIndex index(cloud.points);
    const int patch_degree =
        l_patch > 0 ? l_patch : (equation == "burgers" ? 6 : f.l);
    FrameField frames;
    if (f.analytic)
        frames = analytic_frames(cloud);
    else
        frames = estimate_frames(cloud, index, f.K, patch_degree);
    BlockOperator op =
        build_operator(cloud, frames, o, f.K, f.l, patch_degree);
    stabilize(op);

    EvolutionProblem problem;
    problem.nu = nu;
    if (equation == "diffusion") {
        const int d = frames.d();
        Eigen::VectorXd forcing(cloud.N() * d);
        for (int i = 0; i < cloud.N(); ++i)
            forcing.segment(i * d, d) =
                frames.T[i].transpose() * cloud.points.row(i).transpose();
        problem.initial = initial_scale * forcing;
        problem.forcing = [forcing](double) { return forcing; };
    } else {
        if (!cloud.param_coords || spec.intrinsic_dim() != 2 ||
            spec.kind() == ManifoldKind::FlatTorus12D)
            throw ValidationError("the built-in advective start needs a "
                                  "two-dimensional parametrized surface");
        const CoordinateField2D profile = burgers_profile();
        Eigen::MatrixXd U(cloud.N(), spec.ambient_dim());
        for (int i = 0; i < cloud.N(); ++i) {
            const Eigen::Vector2d th = cloud.param_coords->row(i).transpose();
            U.row(i) = (spec.jacobian(th) * profile.value(th)).transpose();
        }
        problem.initial = initial_scale * frame_components(frames, U);
        if (o.method == "intrinsic") {
            auto cov = std::make_shared<IntrinsicCovariant>(
                cloud, frames, f.K, f.l, patch_degree);
            problem.covariant = [cov](const Eigen::VectorXd& u) {
                return cov->apply(u);
            };
        } else {
            auto cov =
                std::make_shared<ExtrinsicCovariant>(cloud, frames, f.K, f.l);
            problem.covariant = [cov](const Eigen::VectorXd& u) {
                return cov->apply(u);
            };
        }
    }
    problem.op = std::move(op);

    const Trajectory traj = integrate(
        problem, {stepper_from_name(stepper), dt}, t_end, snapshot_every);

    std::filesystem::create_directories(out_dir);
    std::vector<std::string> files;
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        char name[32];
        std::snprintf(name, sizeof(name), "u_%04zu.csv", s);
        save_snapshot_csv((std::filesystem::path(out_dir) / name).string(),
                          frames, traj.states[s]);
        files.emplace_back(name);
    }
    save_snapshot_manifest(
        (std::filesystem::path(out_dir) / "manifest.json").string(),
        traj.times, files);
    std::printf("%s on %s: %zu snapshots to %s, final max |u| = %.6e\n",
                equation.c_str(), g.manifold.c_str(), traj.states.size(),
                out_dir.c_str(),
                traj.states.back().lpNorm<Eigen::Infinity>());
    return 0;
}

int cmd_study(const ExperimentConfig& experiment) {
    const StudyOutcome out = run_convergence_study(experiment);
    for (const std::string& failure : out.failures)
        std::fprintf(stderr, "veclap: %s\n", failure.c_str());
    if (out.rows.empty()) {
        std::fprintf(stderr, "veclap: every run failed\n");
        return 3;
    }
    if (experiment.out_dir.empty())
        std::printf("%zu result rows\n", out.rows.size());
    else
        std::printf("%zu result rows -> %s/report.csv\n", out.rows.size(),
                    experiment.out_dir.c_str());
    for (const auto& [metric, fit] : out.slopes) {
        if (fit.available)
            std::printf("slope %-12s % .3f +/- %.3f\n", metric.c_str(),
                        fit.slope, fit.stderr_slope);
        else
            std::printf("slope %-12s (needs at least 3 sizes)\n",
                        metric.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"meshfree vector-field calculus on point-cloud surfaces"};
    app.require_subcommand(1);
    std::function<int()> run;

    // sample
    auto* sample = app.add_subcommand("sample", "draw surface points");
    static GeometryArgs sample_g;
    static std::string sample_out = "cloud.csv";
    add_geometry(sample, sample_g);
    sample->add_option("--out", sample_out, "output CSV path");
    sample->callback([&] { run = [&] { return cmd_sample(sample_g, sample_out); }; });

    // frames
    auto* frames = app.add_subcommand("frames", "tangent frames as CSV");
    static GeometryArgs frames_g;
    static FrameArgs frames_f;
    static std::string frames_out = "frames.csv";
    add_geometry(frames, frames_g);
    add_frames(frames, frames_f);
    frames->add_option("--out", frames_out, "output CSV path");
    frames->callback(
        [&] { run = [&] { return cmd_frames(frames_g, frames_f, frames_out); }; });

    // assemble
    auto* assemble =
        app.add_subcommand("assemble", "build a vector Laplacian");
    static GeometryArgs assemble_g;
    static FrameArgs assemble_f;
    static OperatorArgs assemble_o;
    static bool assemble_stab = false;
    static std::string assemble_out = "operator.coo";
    add_geometry(assemble, assemble_g);
    add_frames(assemble, assemble_f);
    add_operator(assemble, assemble_o);
    assemble->add_flag("--stabilize", assemble_stab,
                       "clamp the rightmost real part to zero");
    assemble->add_option("--out", assemble_out, "output path");
    assemble->callback([&] {
        run = [&] {
            return cmd_assemble(assemble_g, assemble_f, assemble_o,
                                assemble_stab, assemble_out);
        };
    });

    // eig
    auto* eig = app.add_subcommand("eig", "operator eigenvalues");
    static GeometryArgs eig_g;
    static FrameArgs eig_f;
    static OperatorArgs eig_o;
    static bool eig_stab = false;
    static int eig_count = 0;
    static double eig_sigma = 0.1;
    static std::string eig_out = "eig.csv";
    add_geometry(eig, eig_g);
    add_frames(eig, eig_f);
    add_operator(eig, eig_o);
    eig->add_flag("--stabilize", eig_stab,
                  "clamp the rightmost real part to zero first");
    eig->add_option("--count", eig_count,
                    "how many rightmost eigenvalues (0 = full dense solve)");
    eig->add_option("--sigma", eig_sigma,
                    "shift for the iterative rightmost-eigenvalue solver");
    eig->add_option("--out", eig_out, "output CSV path");
    eig->callback([&] {
        run = [&] {
            return cmd_eig(eig_g, eig_f, eig_o, eig_stab, eig_count,
                           eig_sigma, eig_out);
        };
    });

    // poisson
    auto* poisson = app.add_subcommand(
        "poisson", "manufactured screened-Poisson errors");
    static GeometryArgs poisson_g;
    static FrameArgs poisson_f;
    static OperatorArgs poisson_o;
    static double poisson_a = 1.0;
    add_geometry(poisson, poisson_g);
    add_frames(poisson, poisson_f);
    add_operator(poisson, poisson_o);
    poisson->add_option("--a", poisson_a, "screening coefficient");
    poisson->callback([&] {
        run = [&] { return cmd_poisson(poisson_g, poisson_f, poisson_o, poisson_a); };
    });

    // evolve
    auto* evolve =
        app.add_subcommand("evolve", "integrate a vector flow, write snapshots");
    static GeometryArgs evolve_g;
    static FrameArgs evolve_f;
    static OperatorArgs evolve_o;
    static std::string evolve_eq = "diffusion";
    static double evolve_nu = 0.1;
    static double evolve_dt = 1e-3;
    static double evolve_t_end = 0.05;
    static double evolve_scale = 0.2;
    static std::string evolve_stepper = "rk2";
    static int evolve_every = 0;
    static int evolve_l_patch = 0;
    static std::string evolve_out = "evolve_out";
    add_geometry(evolve, evolve_g);
    add_frames(evolve, evolve_f);
    add_operator(evolve, evolve_o);
    evolve->add_option("--equation", evolve_eq, "diffusion or burgers");
    evolve->add_option("--nu", evolve_nu, "viscosity");
    evolve->add_option("--dt", evolve_dt, "time step");
    evolve->add_option("--t-end", evolve_t_end, "final time");
    evolve->add_option("--initial-scale", evolve_scale,
                       "multiplier on the built-in initial state");
    evolve->add_option("--stepper", evolve_stepper, "rk2, bdf2, or cnab");
    evolve->add_option("--snapshot-every", evolve_every,
                       "keep every that-many-th step (0 = ends only)");
    evolve->add_option("--l-manifold", evolve_l_patch,
                       "manifold fit degree (0 = 6 for burgers, --l otherwise)");
    evolve->add_option("--out", evolve_out, "snapshot directory");
    evolve->callback([&] {
        run = [&] {
            return cmd_evolve(evolve_g, evolve_f, evolve_o, evolve_eq,
                              evolve_nu, evolve_dt, evolve_t_end, evolve_scale,
                              evolve_stepper, evolve_every, evolve_l_patch,
                              evolve_out);
        };
    });

    // study
    auto* study = app.add_subcommand(
        "study", "convergence study from a config file and/or flags");
    static std::string study_config;
    static ExperimentConfig experiment;
    study->add_option("config", study_config,
                      "key = value config file (flags override it)")
        ->check(CLI::ExistingFile);
    auto* so_study = study->add_option("--study", experiment.study,
                                       "projection, poisson, forward, "
                                       "burgers, diffusion, or steady");
    auto* so_manifold =
        study->add_option("--manifold", experiment.manifold, "surface name");
    auto* so_method =
        study->add_option("--method", experiment.method, "intrinsic or extrinsic");
    auto* so_kind = study->add_option("--kind", experiment.kind,
                                      "bochner, lb, or hodge");
    auto* so_frames = study->add_option("--frames", experiment.frames_source,
                                        "estimated or analytic");
    auto* so_N = study->add_option("--N", experiment.Ns,
                                   "point counts, strictly increasing");
    auto* so_seeds = study->add_option("--seeds", experiment.seeds, "seeds");
    auto* so_K = study->add_option("--k", experiment.K, "stencil size");
    auto* so_l = study->add_option("--l", experiment.l_field, "field fit degree");
    auto* so_lm = study->add_option("--l-manifold", experiment.l_manifold,
                                    "manifold fit degree (0 = follow --l)");
    auto* so_a = study->add_option("--a", experiment.a, "screening coefficient");
    auto* so_nu = study->add_option("--nu", experiment.nu, "viscosity");
    auto* so_dt = study->add_option("--dt", experiment.dt, "time step");
    auto* so_t = study->add_option("--t-end", experiment.t_end, "final time");
    auto* so_scale = study->add_option("--initial-scale",
                                       experiment.initial_scale,
                                       "diffusion initial-state multiplier");
    auto* so_stepper =
        study->add_option("--stepper", experiment.stepper, "rk2, bdf2, or cnab");
    auto* so_out = study->add_option("--out", experiment.out_dir,
                                     "directory for report.csv");
    auto* so_par = study->add_flag("--parallel", experiment.parallel,
                                   "run grid points on a thread pool");
    study->callback([&] {
        run = [&] {
            if (!study_config.empty()) {
                ExperimentConfig from_file =
                    ExperimentConfig::from_config(Config::from_file(study_config));
                // Flags the user actually passed win over the file.
                if (!so_study->count()) experiment.study = from_file.study;
                if (!so_manifold->count())
                    experiment.manifold = from_file.manifold;
                if (!so_method->count()) experiment.method = from_file.method;
                if (!so_kind->count()) experiment.kind = from_file.kind;
                if (!so_frames->count())
                    experiment.frames_source = from_file.frames_source;
                if (!so_N->count()) experiment.Ns = from_file.Ns;
                if (!so_seeds->count()) experiment.seeds = from_file.seeds;
                if (!so_K->count()) experiment.K = from_file.K;
                if (!so_l->count()) experiment.l_field = from_file.l_field;
                if (!so_lm->count())
                    experiment.l_manifold = from_file.l_manifold;
                if (!so_a->count()) experiment.a = from_file.a;
                if (!so_nu->count()) experiment.nu = from_file.nu;
                if (!so_dt->count()) experiment.dt = from_file.dt;
                if (!so_t->count()) experiment.t_end = from_file.t_end;
                if (!so_scale->count())
                    experiment.initial_scale = from_file.initial_scale;
                if (!so_stepper->count())
                    experiment.stepper = from_file.stepper;
                if (!so_out->count()) experiment.out_dir = from_file.out_dir;
                if (!so_par->count()) experiment.parallel = from_file.parallel;
            }
            return cmd_study(experiment);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return run();
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "veclap: error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "veclap: numerical failure: %s\n", e.what());
        return 3;
    }
}
