#include "hardyscope/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "hardyscope/parallel.hpp"

namespace hardyscope {

Discretized assemble_pencil(const DomainSpec& dom, double h, const std::function<bool(Vec2)>& exclude) {
    if (!(h > 0.0)) throw PreconditionError("assemble_pencil: h must be positive");
    const Box& box = dom.bounding_box();
    Discretized out;
    GridDiscretization& grid = out.grid;
    grid.h = h;
    grid.origin = {box.xmin, box.ymin};
    grid.nx = static_cast<int>(std::ceil(box.width() / h - 1e-9));
    grid.ny = static_cast<int>(std::ceil(box.height() / h - 1e-9));
    const std::size_t slots = static_cast<std::size_t>(grid.nx + 1) * (grid.ny + 1);
    std::vector<char> inside(slots, 0);
    parallel_for(slots, [&](std::size_t s) {
        const int i = static_cast<int>(s % (grid.nx + 1));
        const int j = static_cast<int>(s / (grid.nx + 1));
        const Vec2 p{grid.origin.x + i * h, grid.origin.y + j * h};
        inside[s] = contains(dom, p) && !(exclude && exclude(p));
    });
    grid.node_index.assign(slots, -1);
    for (std::size_t s = 0; s < slots; ++s) {
        if (!inside[s]) continue;
        const int i = static_cast<int>(s % (grid.nx + 1));
        const int j = static_cast<int>(s / (grid.nx + 1));
        grid.node_index[s] = static_cast<int>(grid.nodes.size());
        grid.nodes.push_back({grid.origin.x + i * h, grid.origin.y + j * h});
        grid.lattice.emplace_back(i, j);
    }
    const int n = static_cast<int>(grid.nodes.size());
    if (n < 25)
        throw PreconditionError("assemble_pencil: grid too coarse, " + std::to_string(n) +
                                " interior nodes (at least 25 needed)");

    SparsePencil& pencil = out.pencil;
    pencil.h = h;
    pencil.mass.resize(n);
    const ManifoldModel& model = dom.model();
    for (int r = 0; r < n; ++r) {
        const double lam = model.lambda(grid.nodes[r]);
        pencil.mass[r] = lam * lam;
    }
    const double inv_h2 = 1.0 / (h * h);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 5);
    for (int r = 0; r < n; ++r) {
        const auto [i, j] = grid.lattice[r];
        triplets.emplace_back(r, r, 4.0 * inv_h2);
        const int nb[4] = {grid.index_of(i - 1, j), grid.index_of(i + 1, j), grid.index_of(i, j - 1),
                           grid.index_of(i, j + 1)};
        for (int c : nb)
            if (c >= 0) triplets.emplace_back(r, c, -inv_h2);
    }
    pencil.stiffness.resize(n, n);
    pencil.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    pencil.stiffness.makeCompressed();
    return out;
}

EigenResult lowest_eigenvalues(const SparsePencil& pencil, int k, const EigenSettings& settings) {
    const Eigen::Index n = pencil.stiffness.rows();
    if (k < 1 || k >= n) throw PreconditionError("lowest_eigenvalues: need 1 <= k < dimension");
    const Eigen::Index p = std::min<Eigen::Index>(n, std::max(2 * k, k + 8));

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(pencil.stiffness);
    if (solver.info() != Eigen::Success) throw Error("lowest_eigenvalues: stiffness factorization failed");

    std::mt19937_64 rng(settings.seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index c = 0; c < p; ++c)
        for (Eigen::Index r = 0; r < n; ++r) x(r, c) = normal(rng);

    const auto& mass = pencil.mass;
    EigenResult result;
    result.h = pencil.h;
    for (int it = 1; it <= settings.max_iterations; ++it) {
        const Eigen::MatrixXd y = solver.solve(mass.asDiagonal() * x);
        const Eigen::MatrixXd ky = pencil.stiffness * y;
        Eigen::MatrixXd kr = y.transpose() * ky;
        Eigen::MatrixXd mr = y.transpose() * mass.asDiagonal() * y;
        kr = 0.5 * (kr + kr.transpose()).eval();
        mr = 0.5 * (mr + mr.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(kr, mr);
        if (ritz.info() != Eigen::Success) throw Error("lowest_eigenvalues: Rayleigh-Ritz step failed");
        x = y * ritz.eigenvectors();
        const Eigen::MatrixXd kx = ky * ritz.eigenvectors();

        result.values.assign(ritz.eigenvalues().data(), ritz.eigenvalues().data() + k);
        result.residual_norms.resize(k);
        bool converged = true;
        for (int i = 0; i < k; ++i) {
            const double mu = result.values[i];
            const double mnorm = std::sqrt(x.col(i).dot(mass.asDiagonal() * x.col(i)));
            const double res = (kx.col(i) - mu * (mass.asDiagonal() * x.col(i))).norm() / mnorm;
            result.residual_norms[i] = res;
            converged = converged && res <= settings.tol * std::max(1.0, std::abs(mu));
        }
        result.iterations = it;
        if (converged) {
            result.vectors = x.leftCols(k);
            return result;
        }
    }
    result.vectors = x.leftCols(k);
    throw ConvergenceError("lowest_eigenvalues: no convergence after " + std::to_string(settings.max_iterations) +
                               " iterations",
                           result);
}

TruncationTable truncation_study(const DomainSpec& polygon, std::span<const double> cut_radii, double h, int k,
                                 const TruncationSettings& settings) {
    if (!polygon.has_ideal_vertices()) throw PreconditionError("truncation_study: polygon has no ideal vertex");
    for (std::size_t i = 1; i < cut_radii.size(); ++i)
        if (!(cut_radii[i] < cut_radii[i - 1])) throw PreconditionError("truncation_study: cut radii must decrease");
    std::vector<Vec2> ideal;
    for (const Vertex& v : polygon.vertices())
        if (v.ideal) ideal.push_back(v.point);

    TruncationTable table;
    table.h = h;
    table.k = k;
    std::optional<std::size_t> previous;
    for (double cut : cut_radii) {
        TruncationRow row;
        row.cut = cut;
        const auto exclude = [&](Vec2 p) {
            return std::any_of(ideal.begin(), ideal.end(), [&](Vec2 v) { return (p - v).norm() <= cut; });
        };
        try {
            const Discretized disc = assemble_pencil(polygon, h, exclude);
            row.nodes = static_cast<int>(disc.grid.nodes.size());
            const EigenResult eig = lowest_eigenvalues(disc.pencil, k, settings.eigen);
            row.values = eig.values;
            row.residuals = eig.residual_norms;
        } catch (const PreconditionError& e) {
            row.skipped = true;
            row.note = e.what();
            table.notes.push_back("cut " + std::to_string(cut) + " skipped: " + e.what());
            table.rows.push_back(row);
            continue;
        }
        if (previous) {
            const TruncationRow& prev = table.rows[*previous];
            for (int i = 0; i < k; ++i) {
                const double d = row.values[i] - prev.values[i];
                row.diffs.push_back(d);
                if (d > settings.monotone_rel * std::abs(prev.values[i])) table.monotone = false;
            }
        }
        table.rows.push_back(row);
        previous = table.rows.size() - 1;
    }

    // Cauchy diagnostic over consecutive differences of the computed levels.
    std::vector<const TruncationRow*> with_diffs;
    for (const auto& row : table.rows)
        if (!row.skipped && !row.diffs.empty()) with_diffs.push_back(&row);
    if (with_diffs.size() >= 2) {
        bool ok = true;
        for (std::size_t r = 1; r < with_diffs.size(); ++r) {
            for (int i = 0; i < k; ++i) {
                const double prev = std::abs(with_diffs[r - 1]->diffs[i]);
                const double cur = std::abs(with_diffs[r]->diffs[i]);
                const double floor = settings.floor_rel * std::abs(with_diffs[r]->values[i]);
                if (cur > std::max(0.5 * prev, floor)) ok = false;
            }
        }
        table.cauchy = ok;
    }
    return table;
}

}  // namespace hardyscope
