#include "qanneal/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/kernels.hpp"

namespace qanneal {
namespace {

void check_qubit_count(int n) {
    if (n < 1 || n > kMaxQubits) {
        throw Error(ErrorCode::Size,
                    "qubit count " + std::to_string(n) + " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
}

void check_index(int qubit) {
    if (qubit < 1) {
        throw Error(ErrorCode::Model, "qubit index " + std::to_string(qubit) + " must be >= 1");
    }
    if (qubit > kMaxQubits) {
        throw Error(ErrorCode::Size, "qubit index " + std::to_string(qubit) + " exceeds the " +
                                         std::to_string(kMaxQubits) + "-qubit limit");
    }
}

void check_coeff(double c) {
    if (!std::isfinite(c)) {
        throw Error(ErrorCode::Model, "coefficient " + format_double(c) + " is not finite");
    }
}

std::string describe(const IsingModel::Key& key) {
    std::string out = "(";
    for (std::size_t k = 0; k < key.size(); ++k) {
        out += (k ? "," : "") + std::to_string(key[k]);
    }
    return out + (key.size() == 1 ? ",)" : ")");
}

}  // namespace

IsingModel::IsingModel(int n_qubits) { set_n_qubits(n_qubits); }

void IsingModel::set_n_qubits(int n_qubits) {
    check_qubit_count(n_qubits);
    for (const auto& [key, coeff] : terms_) {
        if (key.back() > n_qubits) {
            throw Error(ErrorCode::Model, "term " + describe(key) + " does not fit in " + std::to_string(n_qubits) +
                                              " qubits");
        }
    }
    n_qubits_ = n_qubits;
}

void IsingModel::add_field(int qubit, double h) {
    check_index(qubit);
    check_coeff(h);
    Key key{qubit};
    if (!terms_.emplace(key, h).second) {
        throw Error(ErrorCode::Model, "duplicate term " + describe(key));
    }
    n_qubits_ = std::max(n_qubits_, qubit);
}

void IsingModel::add_coupling(int qubit_i, int qubit_j, double j) {
    check_index(qubit_i);
    check_index(qubit_j);
    check_coeff(j);
    if (qubit_i == qubit_j) {
        throw Error(ErrorCode::Model, "coupling (" + std::to_string(qubit_i) + "," + std::to_string(qubit_j) +
                                          ") must join two distinct qubits");
    }
    Key key{std::min(qubit_i, qubit_j), std::max(qubit_i, qubit_j)};
    if (!terms_.emplace(key, j).second) {
        throw Error(ErrorCode::Model, "duplicate term " + describe(key) + " (couplings are unordered)");
    }
    n_qubits_ = std::max(n_qubits_, key[1]);
}

void IsingModel::add_term(std::span<const int> indices, double coeff) {
    if (indices.size() == 1) {
        add_field(indices[0], coeff);
    } else if (indices.size() == 2) {
        add_coupling(indices[0], indices[1], coeff);
    } else {
        throw Error(ErrorCode::Model, "terms must have one or two indices, got " + std::to_string(indices.size()));
    }
}

IsingModel h5_model() {
    IsingModel model;
    model.add_coupling(1, 2, -1.0);
    model.add_coupling(1, 3, -1.0);
    model.add_coupling(1, 4, 1.0);
    model.add_coupling(2, 3, -1.0);
    model.add_coupling(2, 5, 1.0);
    model.add_coupling(3, 4, -1.0);
    model.add_coupling(3, 5, -1.0);
    model.add_coupling(4, 5, -1.0);
    return model;
}

void validate_offsets(const FieldOffsets& offsets, int n_qubits) {
    for (const auto* vec : {&offsets.x, &offsets.z}) {
        if (vec->empty()) continue;
        if (static_cast<int>(vec->size()) != n_qubits) {
            throw Error(ErrorCode::Shape, "field offsets have " + std::to_string(vec->size()) + " entries for " +
                                              std::to_string(n_qubits) + " qubits");
        }
        for (double v : *vec) {
            if (!std::isfinite(v)) throw Error(ErrorCode::Validation, "field offset is not finite");
        }
    }
}

RealVector ising_diagonal(const IsingModel& model) {
    const int n = model.n_qubits();
    check_qubit_count(n);
    RealVector diag = RealVector::Zero(static_cast<Eigen::Index>(state_count(n)));
    std::span<double> out(diag.data(), static_cast<std::size_t>(diag.size()));
    for (const auto& [key, coeff] : model.terms()) {
        if (key.size() == 1) {
            kernels::add_z_term(out, coeff, key[0] - 1);
        } else {
            kernels::add_zz_term(out, coeff, key[0] - 1, key[1] - 1);
        }
    }
    return diag;
}

ComplexMatrix transverse_matrix(int n_qubits) {
    check_qubit_count(n_qubits);
    const auto dim = static_cast<Eigen::Index>(state_count(n_qubits));
    ComplexMatrix hx = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index v = 0; v < dim; ++v) {
        for (int q = 0; q < n_qubits; ++q) {
            hx(v ^ (Eigen::Index{1} << q), v) = 1.0;
        }
    }
    return hx;
}

ComplexMatrix offset_matrix(const FieldOffsets& offsets, int n_qubits) {
    check_qubit_count(n_qubits);
    validate_offsets(offsets, n_qubits);
    const auto dim = static_cast<Eigen::Index>(state_count(n_qubits));
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    if (!offsets.x.empty()) {
        for (Eigen::Index v = 0; v < dim; ++v) {
            for (int q = 0; q < n_qubits; ++q) {
                out(v ^ (Eigen::Index{1} << q), v) += offsets.x[static_cast<std::size_t>(q)];
            }
        }
    }
    if (!offsets.z.empty()) {
        std::vector<double> diag(static_cast<std::size_t>(dim), 0.0);
        for (int q = 0; q < n_qubits; ++q) {
            kernels::add_z_term(diag, offsets.z[static_cast<std::size_t>(q)], q);
        }
        for (Eigen::Index v = 0; v < dim; ++v) {
            out(v, v) += diag[static_cast<std::size_t>(v)];
        }
    }
    return out;
}

ComplexMatrix hamiltonian_at(const IsingModel& model, const AnnealingSchedule& schedule, double s,
                             const FieldOffsets& offsets) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error(ErrorCode::Domain, "s = " + format_double(s) + " outside [0, 1]");
    }
    const int n = model.n_qubits();
    const double a = sign_value(schedule.driver_sign()) * schedule.a(s);
    const double b = schedule.b(s);
    ComplexMatrix h = a * transverse_matrix(n);
    h.diagonal() += (b * ising_diagonal(model)).cast<Complex>();
    if (!offsets.empty()) {
        h += offset_matrix(offsets, n);
    }
    return h;
}

SpectrumResult eigenspectrum(const IsingModel& model, const AnnealingSchedule& schedule,
                             std::span<const double> s_grid, const FieldOffsets& offsets) {
    if (s_grid.empty()) {
        throw Error(ErrorCode::Domain, "spectrum grid is empty");
    }
    SpectrumResult result;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
    for (double s : s_grid) {
        solver.compute(hamiltonian_at(model, schedule, s, offsets), Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw Error(ErrorCode::NumericalFailure, "eigendecomposition failed at s = " + format_double(s));
        }
        const RealVector& values = solver.eigenvalues();
        result.s_grid.push_back(s);
        result.levels.emplace_back(values.data(), values.data() + values.size());
    }
    return result;
}

GapMinimum minimum_gap(const SpectrumResult& spectrum, std::size_t lower, std::size_t upper) {
    if (spectrum.levels.empty() || upper >= spectrum.levels.front().size() || lower >= upper) {
        throw Error(ErrorCode::Range, "gap levels out of range");
    }
    GapMinimum best{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t k = 0; k < spectrum.levels.size(); ++k) {
        const double gap = spectrum.levels[k][upper] - spectrum.levels[k][lower];
        if (gap < best.gap) {
            best = {spectrum.s_grid[k], gap};
        }
    }
    return best;
}

GroundStates brute_force_ground_states(const IsingModel& model) {
    const RealVector energies = ising_diagonal(model);
    const double emin = energies.minCoeff();
    const double tol = 1e-12 * std::max(1.0, std::abs(emin));
    GroundStates out{emin, {}};
    for (Eigen::Index v = 0; v < energies.size(); ++v) {
        if (energies[v] - emin <= tol) {
            out.states.push_back(int_to_spin(static_cast<StateIndex>(v), model.n_qubits()));
        }
    }
    return out;
}

std::vector<double> uniform_grid(std::size_t count) {
    if (count < 2) {
        throw Error(ErrorCode::Range, "grid needs at least two points");
    }
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = static_cast<double>(k) / static_cast<double>(count - 1);
    }
    return grid;
}

}  // namespace qanneal
