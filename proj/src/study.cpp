#include "veclap/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "veclap/analytic.hpp"
#include "veclap/common.hpp"
#include "veclap/extrinsic.hpp"
#include "veclap/intrinsic.hpp"
#include "veclap/knn.hpp"
#include "veclap/linear_solve.hpp"
#include "veclap/multi_index.hpp"
#include "veclap/pde.hpp"
#include "veclap/tangent_estimation.hpp"

namespace veclap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

FrameField make_frames(const PointCloud& cloud, const NeighborIndex& index,
                       const std::string& source, int K, int l) {
    if (source == "analytic") return analytic_frames(cloud);
    if (source == "estimated") return estimate_frames(cloud, index, K, l);
    throw ValidationError("unknown frame source '" + source +
                          "' (expected estimated or analytic)");
}

BlockOperator assemble_operator(const PointCloud& cloud,
                                const FrameField& frames,
                                const std::string& method, LaplacianKind kind,
                                int K, int l_field, int l_patch) {
    if (method == "intrinsic")
        return assemble_intrinsic(cloud, frames, kind, K, l_field, l_patch);
    if (method == "extrinsic")
        return assemble_extrinsic(cloud, frames, kind, K, l_field);
    throw ValidationError("unknown method '" + method +
                          "' (expected intrinsic or extrinsic)");
}

/// Ambient truth rows for the built-in manufactured field on manifolds
/// with a closed-form metric: the field itself, its connection
/// Laplacian, and its self-advection.
struct Manufactured {
    Eigen::MatrixXd U;   // N x n
    Eigen::MatrixXd Lap; // N x n
    Eigen::MatrixXd Adv; // N x n
};

Manufactured manufactured_truth(const ManifoldSpec& spec,
                                const PointCloud& cloud) {
    if (!cloud.param_coords)
        throw ValidationError(
            "manufactured truth needs parameter coordinates on the cloud");
    const int N = cloud.N();
    const int n = spec.ambient_dim();
    Manufactured out;
    out.U.resize(N, n);
    out.Lap.resize(N, n);
    out.Adv.resize(N, n);
    if (spec.kind() == ManifoldKind::FlatTorus12D) {
        const CoordinateField3D field = flat_torus_trig_field();
        for (int i = 0; i < N; ++i) {
            const Eigen::Vector3d p = cloud.param_coords->row(i).transpose();
            const Eigen::MatrixXd J = spec.jacobian(p);
            out.U.row(i) = (J * field.value(p)).transpose();
            out.Lap.row(i) = (J * euclidean_laplacian(field, p)).transpose();
            out.Adv.row(i) = (J * euclidean_advection(field, p)).transpose();
        }
        return out;
    }
    const WarpedMetric metric = warped_metric(spec);
    const CoordinateField2D field = torus_trig_field();
    for (int i = 0; i < N; ++i) {
        const Eigen::Vector2d th = cloud.param_coords->row(i).transpose();
        const Eigen::MatrixXd J = spec.jacobian(th);
        out.U.row(i) = (J * field.value(th)).transpose();
        out.Lap.row(i) = (J * bochner_laplacian(metric, field, th)).transpose();
        out.Adv.row(i) = (J * covariant_advection(metric, field, th)).transpose();
    }
    return out;
}

void require_bochner_truth(LaplacianKind kind) {
    if (kind != LaplacianKind::Bochner)
        throw ValidationError("manufactured truth is available for the "
                              "connection Laplacian only; kind '" +
                              laplacian_kind_name(kind) + "' has no "
                              "closed-form reference here");
}

void require_manufactured_support(const ManifoldSpec& spec) {
    if (spec.kind() != ManifoldKind::FlatTorus12D)
        warped_metric(spec); // throws when no closed-form metric exists
}

std::string run_label(const std::string& study, const ManifoldSpec& spec,
                      const std::string& method, int l, int K, int N,
                      long seed) {
    std::ostringstream out;
    out << study << " manifold=" << spec.name() << " method=" << method
        << " l=" << l << " K=" << K << " N=" << N << " seed=" << seed;
    return out.str();
}

/// Run one job per (N, seed), sequentially or on a small thread pool,
/// preserving deterministic row order. A throwing job contributes a
/// failure note instead of rows and never aborts the sweep.
StudyOutcome run_grid(
    const std::vector<int>& Ns, const std::vector<long>& seeds, bool parallel,
    const std::function<std::string(int, long)>& label,
    const std::function<std::vector<ReportRow>(int, long)>& job) {
    struct Slot {
        std::vector<ReportRow> rows;
        std::string failure;
    };
    std::vector<std::pair<int, long>> jobs;
    for (int N : Ns)
        for (long seed : seeds) jobs.emplace_back(N, seed);
    std::vector<Slot> slots(jobs.size());

    const auto work = [&](std::size_t j) {
        try {
            slots[j].rows = job(jobs[j].first, jobs[j].second);
        } catch (const std::exception& e) {
            slots[j].failure =
                label(jobs[j].first, jobs[j].second) + ": " + e.what();
        }
    };

    const unsigned workers =
        parallel ? std::max(1u, std::min<unsigned>(
                                    std::thread::hardware_concurrency(),
                                    static_cast<unsigned>(jobs.size())))
                 : 1u;
    if (workers <= 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) work(j);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (std::size_t j = next.fetch_add(1); j < jobs.size();
                     j = next.fetch_add(1))
                    work(j);
            });
        for (std::thread& t : pool) t.join();
    }

    StudyOutcome outcome;
    for (const Slot& slot : slots) {
        if (!slot.failure.empty()) outcome.failures.push_back(slot.failure);
        outcome.rows.insert(outcome.rows.end(), slot.rows.begin(),
                            slot.rows.end());
    }
    outcome.slopes = fit_slopes(outcome.rows);
    return outcome;
}

} // namespace

double max_ambient_gap(const FrameField& frames, const Eigen::VectorXd& dof,
                       const Eigen::MatrixXd& ambient_truth) {
    const Eigen::MatrixXd pushed = ambient_of_components(frames, dof);
    if (pushed.rows() != ambient_truth.rows() ||
        pushed.cols() != ambient_truth.cols())
        throw ValidationError("ambient truth has shape " +
                              std::to_string(ambient_truth.rows()) + "x" +
                              std::to_string(ambient_truth.cols()) +
                              ", expected " + std::to_string(pushed.rows()) +
                              "x" + std::to_string(pushed.cols()));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < pushed.rows(); ++i)
        worst = std::max(worst, (pushed.row(i) - ambient_truth.row(i)).norm());
    return worst;
}

double forward_error(const BlockOperator& op, const FrameField& frames,
                     const Eigen::MatrixXd& truth_field,
                     const Eigen::MatrixXd& truth_image) {
    const Eigen::VectorXd pulled = frame_components(frames, truth_field);
    return max_ambient_gap(frames, op.apply(pulled), truth_image);
}

double inverse_error(const Eigen::VectorXd& u_hat, const FrameField& frames,
                     const Eigen::MatrixXd& truth_field) {
    return max_ambient_gap(frames, u_hat, truth_field);
}

double solution_error(const Eigen::VectorXd& u_at_t, const FrameField& frames,
                      const Eigen::MatrixXd& truth_field_at_t) {
    return max_ambient_gap(frames, u_at_t, truth_field_at_t);
}

SlopeFit fit_loglog_slope(const std::vector<double>& sizes,
                          const std::vector<double>& errors) {
    SlopeFit fit;
    if (sizes.size() != errors.size())
        throw ValidationError("slope fit needs matching size/error lists");
    const int n = static_cast<int>(sizes.size());
    if (n < 3) return fit;
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        if (!(sizes[i] > 0.0) || !(errors[i] > 0.0)) return fit;
        sx += std::log(sizes[i]);
        sy += std::log(errors[i]);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double dx = std::log(sizes[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(errors[i]) - my);
    }
    if (sxx <= 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0;
    for (int i = 0; i < n; ++i) {
        const double r = std::log(errors[i]) -
                         (fit.intercept + fit.slope * std::log(sizes[i]));
        rss += r * r;
    }
    fit.stderr_slope = std::sqrt(std::max(0.0, rss / (n - 2)) / sxx);
    fit.available = true;
    return fit;
}

std::map<std::string, SlopeFit> fit_slopes(const std::vector<ReportRow>& rows) {
    // metric -> N -> log-error samples over seeds
    std::map<std::string, std::map<int, std::vector<double>>> grouped;
    for (const ReportRow& row : rows) {
        if (row.metric.size() > 8 &&
            row.metric.compare(row.metric.size() - 8, 8, "_seconds") == 0)
            continue;
        if (row.value > 0.0)
            grouped[row.metric][row.N].push_back(std::log(row.value));
    }
    std::map<std::string, SlopeFit> slopes;
    for (const auto& [metric, by_n] : grouped) {
        std::vector<double> sizes, means;
        for (const auto& [N, logs] : by_n) {
            double acc = 0;
            for (double v : logs) acc += v;
            sizes.push_back(static_cast<double>(N));
            means.push_back(std::exp(acc / static_cast<double>(logs.size())));
        }
        slopes[metric] = fit_loglog_slope(sizes, means);
    }
    return slopes;
}

void save_report_csv(const std::string& path,
                     const std::vector<ReportRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write report to '" + path + "'");
    out << "manifold,method,kind,l,K,N,seed,metric,value,seconds\n";
    for (const ReportRow& row : rows)
        out << row.manifold << ',' << row.method << ',' << row.kind << ','
            << row.l << ',' << row.K << ',' << row.N << ',' << row.seed << ','
            << row.metric << ',' << format_double(row.value) << ','
            << format_double(row.seconds) << '\n';
    if (!out) throw ValidationError("failed writing report to '" + path + "'");
}

std::vector<ReportRow> load_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open report '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("report '" + path + "' is empty");
    if (line != "manifold,method,kind,l,K,N,seed,metric,value,seconds")
        throw ValidationError("report '" + path + "' has unexpected columns");
    std::vector<ReportRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream stream(line);
        while (std::getline(stream, field, ',')) fields.push_back(field);
        if (fields.size() != 10)
            throw ValidationError("report '" + path + "' line " +
                                  std::to_string(line_no) +
                                  ": expected 10 fields");
        ReportRow row;
        row.manifold = fields[0];
        row.method = fields[1];
        row.kind = fields[2];
        try {
            row.l = std::stoi(fields[3]);
            row.K = std::stoi(fields[4]);
            row.N = std::stoi(fields[5]);
            row.seed = std::stol(fields[6]);
            row.metric = fields[7];
            row.value = std::stod(fields[8]);
            row.seconds = std::stod(fields[9]);
        } catch (const std::exception&) {
            throw ValidationError("report '" + path + "' line " +
                                  std::to_string(line_no) + ": bad number");
        }
        rows.push_back(row);
    }
    return rows;
}

void save_eig_csv(const std::string& path, const Spectrum& spectrum) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << "k,re,im\n";
    for (std::size_t k = 0; k < spectrum.values.size(); ++k)
        out << (k + 1) << ',' << format_double(spectrum.values[k].real())
            << ',' << format_double(spectrum.values[k].imag()) << '\n';
}

void save_snapshot_csv(const std::string& path, const FrameField& frames,
                       const Eigen::VectorXd& dof) {
    const Eigen::MatrixXd ambient = ambient_of_components(frames, dof);
    const int d = frames.d();
    const int n = frames.n();
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << "point_index";
    for (int c = 0; c < d; ++c) out << ",u_" << (c + 1);
    for (int c = 0; c < n; ++c) out << ",ambient_u_" << (c + 1);
    out << '\n';
    for (int i = 0; i < frames.N(); ++i) {
        out << i;
        for (int c = 0; c < d; ++c)
            out << ',' << format_double(dof[i * d + c]);
        for (int c = 0; c < n; ++c) out << ',' << format_double(ambient(i, c));
        out << '\n';
    }
}

void save_snapshot_manifest(const std::string& path,
                            const std::vector<double>& times,
                            const std::vector<std::string>& files) {
    if (times.size() != files.size())
        throw ValidationError("snapshot manifest needs one file per time");
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << "{\n  \"times\": [";
    for (std::size_t i = 0; i < times.size(); ++i)
        out << (i ? ", " : "") << format_double(times[i]);
    out << "],\n  \"files\": [";
    for (std::size_t i = 0; i < files.size(); ++i)
        out << (i ? ", " : "") << '"' << files[i] << '"';
    out << "]\n}\n";
}

ExperimentConfig ExperimentConfig::from_config(const Config& config) {
    config.require_known({"study", "manifold", "method", "kind", "frames",
                          "N", "seeds", "K", "l", "l_manifold", "a", "nu",
                          "dt", "t_end", "initial_scale", "stepper", "out",
                          "parallel"});
    ExperimentConfig out;
    out.study = config.get_string("study");
    out.manifold = config.get_string("manifold");
    out.method = config.get_string_or("method", out.method);
    out.kind = config.get_string_or("kind", out.kind);
    out.frames_source = config.get_string_or("frames", out.frames_source);
    out.Ns = config.get_int_list("N");
    if (config.has("seeds")) out.seeds = config.get_long_list("seeds");
    out.K = config.get_int_or("K", out.K);
    out.l_field = config.get_int_or("l", out.l_field);
    out.l_manifold = config.get_int_or("l_manifold", out.l_manifold);
    out.a = config.get_double_or("a", out.a);
    out.nu = config.get_double_or("nu", out.nu);
    out.dt = config.get_double_or("dt", out.dt);
    out.t_end = config.get_double_or("t_end", out.t_end);
    out.initial_scale = config.get_double_or("initial_scale", out.initial_scale);
    out.stepper = config.get_string_or("stepper", out.stepper);
    out.out_dir = config.get_string_or("out", "");
    out.parallel = config.get_bool_or("parallel", false);
    return out;
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> studies = {
        "projection", "poisson", "forward", "burgers", "diffusion", "steady"};
    if (!studies.count(study)) {
        std::string known;
        for (const std::string& s : studies) {
            if (!known.empty()) known += ", ";
            known += s;
        }
        throw ValidationError("unknown study '" + study + "' (known: " +
                              known + ")");
    }
    const ManifoldSpec spec = ManifoldSpec::from_name(manifold);
    if (method != "intrinsic" && method != "extrinsic")
        throw ValidationError("unknown method '" + method + "'");
    laplacian_kind_from_name(kind);
    if (frames_source != "estimated" && frames_source != "analytic")
        throw ValidationError("unknown frame source '" + frames_source + "'");
    if (Ns.empty()) throw ValidationError("N list is empty");
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        if (Ns[i] <= 0) throw ValidationError("N values must be positive");
        if (i > 0 && Ns[i] <= Ns[i - 1])
            throw ValidationError("N list must be strictly increasing");
    }
    if (seeds.empty()) throw ValidationError("seed list is empty");
    if (l_field < 1) throw ValidationError("l must be at least 1");
    if (l_manifold < 0)
        throw ValidationError("l_manifold must be nonnegative");
    const int m = MultiIndexSet::full(spec.intrinsic_dim(), l_field).size();
    if (K <= m)
        throw ValidationError(
            "K must exceed the polynomial space dimension: K=" +
            std::to_string(K) + ", dimension=" + std::to_string(m) +
            " for degree " + std::to_string(l_field));
    if (study == "burgers" || study == "diffusion" || study == "steady") {
        if (!(nu > 0.0)) throw ValidationError("nu must be positive");
        if (!(dt > 0.0)) throw ValidationError("dt must be positive");
        if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
        stepper_from_name(stepper);
    }
}

StudyOutcome run_projection_study(const ManifoldSpec& spec, int K, int l,
                                  const std::vector<int>& Ns,
                                  const std::vector<long>& seeds,
                                  bool parallel) {
    const auto label = [&](int N, long seed) {
        return run_label("projection", spec, "estimated", l, K, N, seed);
    };
    const auto job = [&, spec](int N, long seed) {
        const auto start = Clock::now();
        const PointCloud cloud = sample_manifold(spec, N, seed);
        const NeighborIndex index(cloud.points);
        const FrameField est = estimate_frames(cloud, index, K, l);
        const FrameField exact = analytic_frames(cloud);
        double worst = 0.0;
        for (int i = 0; i < N; ++i) {
            const Eigen::MatrixXd gap = est.T[i] * est.T[i].transpose() -
                                        exact.T[i] * exact.T[i].transpose();
            worst = std::max(worst, gap.norm());
        }
        ReportRow row{spec.name(), "estimated", "none", l,    K,
                      N,           seed,        "projection", worst,
                      seconds_since(start)};
        return std::vector<ReportRow>{row};
    };
    return run_grid(Ns, seeds, parallel, label, job);
}

StudyOutcome run_poisson_study(const ManifoldSpec& spec,
                               const std::string& method, LaplacianKind kind,
                               int K, int l, const std::vector<int>& Ns,
                               const std::vector<long>& seeds, double a,
                               const std::string& frames_source,
                               bool parallel) {
    require_bochner_truth(kind);
    require_manufactured_support(spec);
    const std::string kind_name = laplacian_kind_name(kind);
    const auto label = [&](int N, long seed) {
        return run_label("poisson", spec, method, l, K, N, seed);
    };
    const auto job = [&, spec, method, kind, K, l, a,
                      frames_source](int N, long seed) {
        auto phase = Clock::now();
        const PointCloud cloud = sample_manifold(spec, N, seed);
        const NeighborIndex index(cloud.points);
        const FrameField frames =
            make_frames(cloud, index, frames_source, K, l);
        BlockOperator op =
            assemble_operator(cloud, frames, method, kind, K, l, l);
        stabilize(op);
        const Manufactured truth = manufactured_truth(spec, cloud);
        const double fe = forward_error(op, frames, truth.U, truth.Lap);
        const double assemble_seconds = seconds_since(phase);

        phase = Clock::now();
        const Eigen::MatrixXd F = a * truth.U - truth.Lap;
        const Eigen::VectorXd u_hat =
            solve_screened_poisson(op, a, frame_components(frames, F));
        const double ie = inverse_error(u_hat, frames, truth.U);
        const double solve_seconds = seconds_since(phase);

        return std::vector<ReportRow>{
            {spec.name(), method, kind_name, l, K, N, seed, "fe", fe,
             assemble_seconds},
            {spec.name(), method, kind_name, l, K, N, seed, "ie", ie,
             solve_seconds}};
    };
    return run_grid(Ns, seeds, parallel, label, job);
}

StudyOutcome run_forward_study(const ManifoldSpec& spec,
                               const std::string& method, LaplacianKind kind,
                               int K, int l, const std::vector<int>& Ns,
                               const std::vector<long>& seeds,
                               const std::string& frames_source,
                               bool parallel) {
    require_bochner_truth(kind);
    require_manufactured_support(spec);
    const std::string kind_name = laplacian_kind_name(kind);
    const auto label = [&](int N, long seed) {
        return run_label("forward", spec, method, l, K, N, seed);
    };
    const auto job = [&, spec, method, kind, K, l,
                      frames_source](int N, long seed) {
        const auto start = Clock::now();
        const PointCloud cloud = sample_manifold(spec, N, seed);
        const NeighborIndex index(cloud.points);
        const FrameField frames =
            make_frames(cloud, index, frames_source, K, l);
        const BlockOperator op =
            assemble_operator(cloud, frames, method, kind, K, l, l);
        const Manufactured truth = manufactured_truth(spec, cloud);
        const double fe = forward_error(op, frames, truth.U, truth.Lap);
        return std::vector<ReportRow>{{spec.name(), method, kind_name, l, K,
                                       N, seed, "fe", fe,
                                       seconds_since(start)}};
    };
    return run_grid(Ns, seeds, parallel, label, job);
}

namespace {

/// Manufactured decaying solution amp * cos(t) * (trig field): shared by
/// the Burgers study and the stepper-agreement check in the test suite.
constexpr double kBurgersAmplitude = 0.05;
constexpr int kTimeDependentPatchDegree = 6;

} // namespace

namespace {

void validate_burgers_setup(const ManifoldSpec& spec, int K) {
    if (spec.kind() == ManifoldKind::FlatTorus12D ||
        spec.intrinsic_dim() != 2)
        throw ValidationError("the manufactured Burgers' run needs a "
                              "closed-form two-dimensional metric");
    const int m_patch =
        MultiIndexSet::full(spec.intrinsic_dim(), kTimeDependentPatchDegree)
            .size();
    if (K <= m_patch)
        throw ValidationError("K=" + std::to_string(K) +
                              " cannot support the degree-" +
                              std::to_string(kTimeDependentPatchDegree) +
                              " manifold fits (dimension " +
                              std::to_string(m_patch) + ")");
}

struct BurgersCell {
    FrameField frames;
    Eigen::VectorXd final_state;
    Eigen::MatrixXd truth_at_end; // ambient rows
};

BurgersCell burgers_cell(const ManifoldSpec& spec, const std::string& method,
                         int K, int l, int N, long seed, double nu, double dt,
                         double t_end, StepperKind stepper_kind) {
    const PointCloud cloud = sample_manifold(spec, N, seed);
    const NeighborIndex index(cloud.points);
    BurgersCell cell;
    cell.frames = estimate_frames(cloud, index, K, kTimeDependentPatchDegree);
    const FrameField& frames = cell.frames;
    BlockOperator op =
        assemble_operator(cloud, frames, method, LaplacianKind::Bochner, K, l,
                          kTimeDependentPatchDegree);
    stabilize(op);
    const Manufactured truth = manufactured_truth(spec, cloud);

    EvolutionProblem problem;
    problem.op = std::move(op);
    problem.nu = nu;
    problem.initial = frame_components(frames, kBurgersAmplitude * truth.U);
    if (method == "intrinsic") {
        auto cov = std::make_shared<IntrinsicCovariant>(
            cloud, frames, K, l, kTimeDependentPatchDegree);
        problem.covariant = [cov](const Eigen::VectorXd& u) {
            return cov->apply(u);
        };
    } else {
        auto cov = std::make_shared<ExtrinsicCovariant>(cloud, frames, K, l);
        problem.covariant = [cov](const Eigen::VectorXd& u) {
            return cov->apply(u);
        };
    }
    problem.forcing = [&frames, &truth, nu](double t) {
        const double amp = kBurgersAmplitude;
        const double c = std::cos(t);
        const Eigen::MatrixXd F = (-amp * std::sin(t)) * truth.U +
                                  (amp * amp * c * c) * truth.Adv -
                                  (nu * amp * c) * truth.Lap;
        return frame_components(frames, F);
    };
    const Trajectory traj = integrate(problem, {stepper_kind, dt}, t_end);
    cell.final_state = traj.states.back();
    cell.truth_at_end = (kBurgersAmplitude * std::cos(t_end)) * truth.U;
    return cell;
}

} // namespace

StudyOutcome run_burgers_study(const ManifoldSpec& spec,
                               const std::string& method, int K, int l,
                               const std::vector<int>& Ns,
                               const std::vector<long>& seeds, double nu,
                               double dt, double t_end,
                               const std::string& stepper, bool parallel) {
    validate_burgers_setup(spec, K);
    const StepperKind stepper_kind = stepper_from_name(stepper);
    const auto label = [&](int N, long seed) {
        return run_label("burgers", spec, method, l, K, N, seed);
    };
    const auto job = [&, spec, method, K, l, nu, dt, t_end,
                      stepper_kind](int N, long seed) {
        const auto start = Clock::now();
        const BurgersCell cell = burgers_cell(spec, method, K, l, N, seed,
                                              nu, dt, t_end, stepper_kind);
        const double se = solution_error(cell.final_state, cell.frames,
                                         cell.truth_at_end);
        return std::vector<ReportRow>{{spec.name(), method, "bochner", l, K,
                                       N, seed, "se", se,
                                       seconds_since(start)}};
    };
    return run_grid(Ns, seeds, parallel, label, job);
}

Eigen::VectorXd burgers_final_state(const ManifoldSpec& spec,
                                    const std::string& method, int K, int l,
                                    int N, long seed, double nu, double dt,
                                    double t_end, const std::string& stepper) {
    validate_burgers_setup(spec, K);
    return burgers_cell(spec, method, K, l, N, seed, nu, dt, t_end,
                        stepper_from_name(stepper))
        .final_state;
}

namespace {

/// Tangential position forcing f_i = T_i^T x_i used by the linear
/// diffusion examples.
Eigen::VectorXd tangential_position(const PointCloud& cloud,
                                    const FrameField& frames) {
    const int d = frames.d();
    Eigen::VectorXd out(cloud.N() * d);
    for (int i = 0; i < cloud.N(); ++i)
        out.segment(i * d, d) =
            frames.T[i].transpose() * cloud.points.row(i).transpose();
    return out;
}

struct DiffusionRun {
    Eigen::MatrixXd ambient_at_end; // N x n
    double seconds = 0.0;
};

DiffusionRun evolve_position_diffusion(const PointCloud& cloud,
                                       const FrameField& frames,
                                       const std::string& method, int K,
                                       int l, double nu, double dt,
                                       double t_end, double initial_scale,
                                       StepperKind stepper_kind) {
    const auto start = Clock::now();
    BlockOperator op = assemble_operator(cloud, frames, method,
                                         LaplacianKind::Bochner, K, l, l);
    stabilize(op);
    const Eigen::VectorXd f = tangential_position(cloud, frames);
    EvolutionProblem problem;
    problem.op = std::move(op);
    problem.nu = nu;
    problem.initial = initial_scale * f;
    problem.forcing = [f](double) { return f; };
    const Trajectory traj = integrate(problem, {stepper_kind, dt}, t_end);
    DiffusionRun run;
    run.ambient_at_end = ambient_of_components(frames, traj.states.back());
    run.seconds = seconds_since(start);
    return run;
}

} // namespace

StudyOutcome run_diffusion_study(const ManifoldSpec& spec,
                                 const std::string& method, int K, int l,
                                 const std::vector<int>& Ns,
                                 const std::vector<long>& seeds, double nu,
                                 double dt, double t_end,
                                 double initial_scale,
                                 const std::string& stepper) {
    const StepperKind stepper_kind = stepper_from_name(stepper);
    const int n_ref_fit = 5;
    const int max_n = *std::max_element(Ns.begin(), Ns.end());
    StudyOutcome outcome;
    for (long seed : seeds) {
        // Reference: same schemes on four times the points, degree-5
        // fits, analytic frames. Sampling is prefix-stable, so every
        // target cloud is the leading block of the reference cloud.
        Eigen::MatrixXd reference;
        try {
            const PointCloud ref_cloud =
                sample_manifold(spec, 4 * max_n, seed);
            const FrameField ref_frames = analytic_frames(ref_cloud);
            reference = evolve_position_diffusion(
                            ref_cloud, ref_frames, method, K, n_ref_fit, nu,
                            dt, t_end, initial_scale, stepper_kind)
                            .ambient_at_end;
        } catch (const std::exception& e) {
            outcome.failures.push_back(
                run_label("diffusion-reference", spec, method, n_ref_fit, K,
                          4 * max_n, seed) +
                ": " + e.what());
            continue;
        }
        for (int N : Ns) {
            try {
                const PointCloud cloud = sample_manifold(spec, N, seed);
                const NeighborIndex index(cloud.points);
                const FrameField frames = estimate_frames(cloud, index, K, l);
                const DiffusionRun run = evolve_position_diffusion(
                    cloud, frames, method, K, l, nu, dt, t_end,
                    initial_scale, stepper_kind);
                double se = 0.0;
                for (int i = 0; i < N; ++i)
                    se = std::max(se, (run.ambient_at_end.row(i) -
                                       reference.row(i))
                                          .norm());
                outcome.rows.push_back({spec.name(), method, "bochner", l, K,
                                        N, seed, "se", se, run.seconds});
            } catch (const std::exception& e) {
                outcome.failures.push_back(
                    run_label("diffusion", spec, method, l, K, N, seed) +
                    ": " + e.what());
            }
        }
    }
    outcome.slopes = fit_slopes(outcome.rows);
    return outcome;
}

StudyOutcome run_steady_state_check(const ManifoldSpec& spec,
                                    const std::string& method, int K, int l,
                                    int N, long seed, double nu, double dt,
                                    double t_end) {
    const StepperKind stepper_kind = StepperKind::BDF2;
    StudyOutcome outcome;
    try {
        const auto start = Clock::now();
        const PointCloud cloud = sample_manifold(spec, N, seed);
        const NeighborIndex index(cloud.points);
        const FrameField frames = estimate_frames(cloud, index, K, l);
        BlockOperator op = assemble_operator(cloud, frames, method,
                                             LaplacianKind::Bochner, K, l, l);
        stabilize(op);
        const Eigen::VectorXd f = tangential_position(cloud, frames);
        // Steady state of du/dt = nu L u + f solves nu L u = -f.
        const Eigen::VectorXd u_steady = solve_shifted(0.0, op, f / nu);
        EvolutionProblem problem;
        problem.op = std::move(op);
        problem.nu = nu;
        problem.initial = 0.2 * f;
        problem.forcing = [&f](double) { return f; };
        const Trajectory traj =
            integrate(problem, {stepper_kind, dt}, t_end);
        const double rel =
            (traj.states.back() - u_steady).lpNorm<Eigen::Infinity>() /
            u_steady.lpNorm<Eigen::Infinity>();
        outcome.rows.push_back({spec.name(), method, "bochner", l, K, N,
                                seed, "steady_rel_diff", rel,
                                seconds_since(start)});
    } catch (const std::exception& e) {
        outcome.failures.push_back(
            run_label("steady", spec, method, l, K, N, seed) + ": " +
            e.what());
    }
    return outcome;
}

StudyOutcome run_convergence_study(const ExperimentConfig& config) {
    config.validate();
    const ManifoldSpec spec = ManifoldSpec::from_name(config.manifold);
    const LaplacianKind kind = laplacian_kind_from_name(config.kind);
    const int l_manifold =
        config.l_manifold > 0 ? config.l_manifold : config.l_field;
    if (l_manifold != config.l_field &&
        (config.study == "projection" || config.study == "poisson" ||
         config.study == "forward"))
        throw ValidationError("time-independent studies use matching field "
                              "and manifold degrees; drop l_manifold");

    StudyOutcome outcome;
    if (config.study == "projection") {
        outcome = run_projection_study(spec, config.K, config.l_field,
                                       config.Ns, config.seeds,
                                       config.parallel);
    } else if (config.study == "poisson") {
        outcome = run_poisson_study(spec, config.method, kind, config.K,
                                    config.l_field, config.Ns, config.seeds,
                                    config.a, config.frames_source,
                                    config.parallel);
    } else if (config.study == "forward") {
        outcome = run_forward_study(spec, config.method, kind, config.K,
                                    config.l_field, config.Ns, config.seeds,
                                    config.frames_source, config.parallel);
    } else if (config.study == "burgers") {
        outcome = run_burgers_study(spec, config.method, config.K,
                                    config.l_field, config.Ns, config.seeds,
                                    config.nu, config.dt, config.t_end,
                                    config.stepper, config.parallel);
    } else if (config.study == "diffusion") {
        outcome = run_diffusion_study(spec, config.method, config.K,
                                      config.l_field, config.Ns,
                                      config.seeds, config.nu, config.dt,
                                      config.t_end, config.initial_scale,
                                      config.stepper);
    } else if (config.study == "steady") {
        if (config.Ns.size() != 1)
            throw ValidationError(
                "the steady-state check takes a single N");
        outcome = run_steady_state_check(spec, config.method, config.K,
                                         config.l_field, config.Ns[0],
                                         config.seeds[0], config.nu,
                                         config.dt, config.t_end);
    }

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        save_report_csv(
            (std::filesystem::path(config.out_dir) / "report.csv").string(),
            outcome.rows);
    }
    return outcome;
}

} // namespace veclap
