#include "veclap/frame.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "veclap/common.hpp"

namespace veclap {

Eigen::MatrixXd projection(const Eigen::MatrixXd& T) { return T * T.transpose(); }

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& columns) {
    Eigen::MatrixXd q = columns;
    const double scale = columns.col(0).norm();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
        const double nrm = q.col(j).norm();
        if (!(nrm > 1e-10 * (scale > 0.0 ? scale : 1.0)))
            throw ValidationError("orthonormalize: dependent tangent columns");
        q.col(j) /= nrm;
    }
    return q;
}

void save_frames_csv(const std::string& path, const FrameField& frames) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    const int n = frames.n();
    const int d = frames.d();
    out << "point_index";
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= d; ++j) out << ",t" << i << j;
    out << "\n";
    for (int p = 0; p < frames.N(); ++p) {
        out << p;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) out << "," << format_full(frames.T[p](i, j));
        out << "\n";
    }
    if (!out) throw ValidationError("write failed: " + path);
}

FrameField load_frames_csv(const std::string& path, int n, int d) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty frame file: " + path);

    FrameField frames;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) throw ValidationError("malformed frame row: " + path);
        const int expected = static_cast<int>(frames.T.size());
        if (std::stoi(cell) != expected)
            throw ValidationError("frame rows out of order: " + path);
        Eigen::MatrixXd T(n, d);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) {
                if (!std::getline(ss, cell, ','))
                    throw ValidationError("frame row too short: " + path);
                T(i, j) = std::stod(cell);
            }
        }
        frames.T.push_back(std::move(T));
    }
    if (frames.T.empty()) throw ValidationError("frame file holds no frames: " + path);
    frames.unreliable.assign(frames.T.size(), 0);
    return frames;
}

} // namespace veclap
