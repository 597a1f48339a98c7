#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "veclap/block_operator.hpp"
#include "veclap/config.hpp"
#include "veclap/eigensolve.hpp"
#include "veclap/frame.hpp"
#include "veclap/geometry.hpp"
#include "veclap/monge.hpp"

namespace veclap {

/// Worst-point ambient mismatch: max over points of the Euclidean norm
/// of T_i u_i - truth_i, where truth is an N x n matrix of ambient rows.
/// This is the common core of the forward, inverse, and solution error
/// measures below.
double max_ambient_gap(const FrameField& frames, const Eigen::VectorXd& dof,
                       const Eigen::MatrixXd& ambient_truth);

/// Forward error of an assembled operator: pull the true field into the
/// discrete frames, apply the operator, and compare against the true
/// ambient image (e.g. the analytic vector Laplacian of the field).
double forward_error(const BlockOperator& op, const FrameField& frames,
                     const Eigen::MatrixXd& truth_field,
                     const Eigen::MatrixXd& truth_image);

/// Inverse error of a discrete solve: compare the computed coefficients
/// against the true ambient field.
double inverse_error(const Eigen::VectorXd& u_hat, const FrameField& frames,
                     const Eigen::MatrixXd& truth_field);

/// Error of an evolved state against the truth at the matching time.
/// Identical formula to inverse_error; named for reporting clarity.
double solution_error(const Eigen::VectorXd& u_at_t, const FrameField& frames,
                      const Eigen::MatrixXd& truth_field_at_t);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    bool available = false; // requires >= 3 sizes with positive errors
};

/// Least-squares slope of log(error) against log(size). Sizes and errors
/// must be positive and the same length.
SlopeFit fit_loglog_slope(const std::vector<double>& sizes,
                          const std::vector<double>& errors);

struct ReportRow {
    std::string manifold;
    std::string method;
    std::string kind;
    int l = 0;
    int K = 0;
    int N = 0;
    long seed = 0;
    std::string metric;
    double value = 0.0;
    double seconds = 0.0;

    bool operator==(const ReportRow&) const = default;
};

void save_report_csv(const std::string& path,
                     const std::vector<ReportRow>& rows);
std::vector<ReportRow> load_report_csv(const std::string& path);

void save_eig_csv(const std::string& path, const Spectrum& spectrum);

/// One snapshot per file: coefficients alongside their ambient push.
void save_snapshot_csv(const std::string& path, const FrameField& frames,
                       const Eigen::VectorXd& dof);
void save_snapshot_manifest(const std::string& path,
                            const std::vector<double>& times,
                            const std::vector<std::string>& files);

struct ExperimentConfig {
    std::string study;       // projection | poisson | forward | burgers |
                             // diffusion | steady
    std::string manifold;
    std::string method = "extrinsic";   // intrinsic | extrinsic
    std::string kind = "bochner";       // bochner | l | hodge
    std::string frames_source = "estimated"; // estimated | analytic
    std::vector<int> Ns;
    std::vector<long> seeds = {1};
    int K = 50;
    int l_field = 4;
    int l_manifold = 0;      // 0: follow l_field
    double a = 1.0;          // screened Poisson shift
    double nu = 0.1;
    double dt = 1e-3;
    double t_end = 0.05;
    double initial_scale = 0.2; // diffusion start: scale * tangential position
    std::string stepper = "rk2";
    std::string out_dir;     // empty: no files written
    bool parallel = false;

    static ExperimentConfig from_config(const Config& config);
    void validate() const;
};

/// Per-study result: raw rows, one fitted slope per metric (computed on
/// the geometric mean over seeds at each N), and a log of runs that
/// failed and were skipped.
struct StudyOutcome {
    std::vector<ReportRow> rows;
    std::map<std::string, SlopeFit> slopes;
    std::vector<std::string> failures;
};

/// Fit one slope per metric from finished rows (exposed for reuse by
/// callers that assemble rows themselves).
std::map<std::string, SlopeFit> fit_slopes(const std::vector<ReportRow>& rows);

/// Tangent-plane quality: max Frobenius gap between the estimated and
/// analytic projection matrices, one row per (N, seed).
StudyOutcome run_projection_study(const ManifoldSpec& spec, int K, int l,
                                  const std::vector<int>& Ns,
                                  const std::vector<long>& seeds,
                                  bool parallel = false);

/// Screened Poisson with the built-in manufactured field: rows carry the
/// forward error ("fe") and the solve error ("ie").
StudyOutcome run_poisson_study(const ManifoldSpec& spec,
                               const std::string& method, LaplacianKind kind,
                               int K, int l, const std::vector<int>& Ns,
                               const std::vector<long>& seeds, double a,
                               const std::string& frames_source = "estimated",
                               bool parallel = false);

/// Forward error only: apply the assembled operator to the manufactured
/// field and compare with its analytic image.
StudyOutcome run_forward_study(const ManifoldSpec& spec,
                               const std::string& method, LaplacianKind kind,
                               int K, int l, const std::vector<int>& Ns,
                               const std::vector<long>& seeds,
                               const std::string& frames_source = "estimated",
                               bool parallel = false);

/// Manufactured time-dependent Burgers' run on a warped-metric surface;
/// rows carry the state error at t_end ("se").
StudyOutcome run_burgers_study(const ManifoldSpec& spec,
                               const std::string& method, int K, int l,
                               const std::vector<int>& Ns,
                               const std::vector<long>& seeds, double nu,
                               double dt, double t_end,
                               const std::string& stepper = "rk2",
                               bool parallel = false);

/// Final state of one manufactured Burgers' run. Deterministic in
/// (N, seed), so two calls with different steppers or steps produce
/// directly comparable coefficient vectors.
Eigen::VectorXd burgers_final_state(const ManifoldSpec& spec,
                                    const std::string& method, int K, int l,
                                    int N, long seed, double nu, double dt,
                                    double t_end, const std::string& stepper);

/// Linear diffusion driven by the tangential position field, measured
/// against a refined reference run (four times the largest N, degree-5
/// fits, analytic frames) evaluated at the shared points. Rows carry
/// "se" at t_end.
StudyOutcome run_diffusion_study(const ManifoldSpec& spec,
                                 const std::string& method, int K, int l,
                                 const std::vector<int>& Ns,
                                 const std::vector<long>& seeds, double nu,
                                 double dt, double t_end, double initial_scale,
                                 const std::string& stepper = "cnab");

/// Long-horizon diffusion against the matching Poisson solve; the single
/// row carries the relative sup-norm difference at t_end ("steady_rel_diff").
StudyOutcome run_steady_state_check(const ManifoldSpec& spec,
                                    const std::string& method, int K, int l,
                                    int N, long seed, double nu, double dt,
                                    double t_end);

/// Dispatch on config.study, write report.csv under out_dir when set,
/// and return the outcome. Per-run failures are recorded, not fatal.
StudyOutcome run_convergence_study(const ExperimentConfig& config);

} // namespace veclap
