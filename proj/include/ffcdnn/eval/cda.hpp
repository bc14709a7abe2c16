#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "ffcdnn/error.hpp"

namespace ffcdnn::eval {

struct CDAProjection {
    Eigen::MatrixXd basis;            // axes x D, unit-length rows
    Eigen::MatrixXd scores;           // samples x axes
    std::vector<double> ratios;       // between / within scatter per axis, decreasing
};

/// Canonical discriminant analysis: generalized eigenproblem of the
/// between-class scatter against the within-class scatter. The within-class
/// scatter is regularized by a small multiple of the total scatter, which
/// keeps the ratios exactly invariant under invertible affine maps of the
/// features.
inline CDAProjection cda_project(const Eigen::MatrixXd& x, const std::vector<int>& labels, std::size_t axes = 2,
                                 double ridge = 1e-6) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto d = x.cols();
    if (labels.size() != n) throw InvalidArgument("cda: label count mismatch");
    if (d == 0) throw InvalidArgument("cda: no features");
    std::map<int, std::vector<Eigen::Index>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[labels[i]].push_back(static_cast<Eigen::Index>(i));
    if (groups.size() < 2) throw InvalidArgument("cda: need at least two classes");
    for (const auto& [label, idx] : groups)
        if (idx.size() < 2) throw InvalidArgument("cda: class " + std::to_string(label) + " has fewer than 2 samples");

    const Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(d, d), sw = Eigen::MatrixXd::Zero(d, d);
    for (const auto& [label, idx] : groups) {
        Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(d);
        for (auto i : idx) mu += x.row(i);
        mu /= static_cast<double>(idx.size());
        const Eigen::RowVectorXd dm = mu - mean;
        sb += static_cast<double>(idx.size()) * dm.transpose() * dm;
        for (auto i : idx) {
            const Eigen::RowVectorXd c = x.row(i) - mu;
            sw += c.transpose() * c;
        }
    }
    const Eigen::MatrixXd st = sb + sw;
    Eigen::MatrixXd reg = sw + ridge * st;
    // Constant features make the total scatter singular; a floor far below
    // any data scale keeps the solve defined without moving other ratios.
    const double floor = 1e-12 * (st.trace() / static_cast<double>(d)) + 1e-300;
    reg.diagonal().array() += floor;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(sb, reg);
    if (solver.info() != Eigen::Success) throw DegenerateError("cda: generalized eigenproblem failed");

    const auto k = static_cast<Eigen::Index>(std::min<std::size_t>(axes, static_cast<std::size_t>(d)));
    CDAProjection out;
    out.basis.resize(k, d);
    for (Eigen::Index a = 0; a < k; ++a) {
        // Eigenvalues come ascending.
        const Eigen::Index col = d - 1 - a;
        Eigen::VectorXd v = solver.eigenvectors().col(col);
        v.normalize();
        // Sign convention: largest-magnitude coefficient positive.
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        out.basis.row(a) = v.transpose();
        out.ratios.push_back(std::max(0.0, solver.eigenvalues()(col)));
    }
    out.scores = x * out.basis.transpose();
    return out;
}

} // namespace ffcdnn::eval
