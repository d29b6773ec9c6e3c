#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hardyscope/domain.hpp"
#include "hardyscope/errors.hpp"

namespace hardyscope {

// Lattice x = box.min + (i, j) h restricted to interior nodes.
struct GridDiscretization {
    double h = 0.0;
    Vec2 origin;
    int nx = 0;  // lattice indices run over [0, nx] x [0, ny]
    int ny = 0;
    std::vector<Vec2> nodes;
    std::vector<std::pair<int, int>> lattice;
    std::vector<int> node_index;  // (nx + 1) * (ny + 1) slots; -1 if not a node

    int index_of(int i, int j) const {
        if (i < 0 || j < 0 || i > nx || j > ny) return -1;
        return node_index[static_cast<std::size_t>(j) * (nx + 1) + i];
    }
};

// stiffness u = mu mass u approximates Delta_g u = mu u (Dirichlet).
struct SparsePencil {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::VectorXd mass;  // diagonal lambda(p)^2
    double h = 0.0;
};

struct Discretized {
    GridDiscretization grid;
    SparsePencil pencil;
};

// Nodes for which `exclude` returns true are treated as exterior.
Discretized assemble_pencil(const DomainSpec& dom, double h, const std::function<bool(Vec2)>& exclude = {});

struct EigenResult {
    std::vector<double> values;
    std::vector<double> residual_norms;  // ||K u - mu M u|| / ||u||_M
    Eigen::MatrixXd vectors;             // M-orthonormal columns
    double h = 0.0;
    int iterations = 0;
};

struct EigenSettings {
    // Converged when every residual is below tol * max(1, mu).
    double tol = 1e-8;
    int max_iterations = 1000;
    std::uint64_t seed = 7;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, EigenResult partial) : Error(what), partial_(std::move(partial)) {}
    const EigenResult& partial() const { return partial_; }

private:
    EigenResult partial_;
};

// k smallest generalized eigenvalues by subspace iteration with a sparse LDLT
// factorization of the stiffness and Rayleigh-Ritz projection.
EigenResult lowest_eigenvalues(const SparsePencil& pencil, int k, const EigenSettings& settings = {});

struct TruncationRow {
    double cut = 0.0;  // chart radius removed around each ideal vertex
    int nodes = 0;
    std::vector<double> values;
    std::vector<double> residuals;
    std::vector<double> diffs;  // against the previous level; empty for the first
    bool skipped = false;
    std::string note;
};

struct TruncationTable {
    double h = 0.0;
    int k = 0;
    std::vector<TruncationRow> rows;
    bool monotone = true;
    // Absent when fewer than two successive differences exist.
    std::optional<bool> cauchy;
    std::vector<std::string> notes;
};

struct TruncationSettings {
    EigenSettings eigen{};
    // Differences below floor_rel * lambda count as converged noise in the Cauchy check.
    double floor_rel = 1e-8;
    // Tolerance on nonincreasing values, relative to lambda.
    double monotone_rel = 1e-8;
};

// Removes chart disks of each cut radius around the ideal vertices, on one
// fixed lattice so consecutive levels are nested.
TruncationTable truncation_study(const DomainSpec& polygon, std::span<const double> cut_radii, double h, int k,
                                 const TruncationSettings& settings = {});

}  // namespace hardyscope
