#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qanneal/encoding.hpp"
#include "qanneal/schedule.hpp"
#include "qanneal/types.hpp"

namespace qanneal {

/// Target Hamiltonian sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j with 1-based qubit indices.
///
/// Terms are keyed by sorted index tuples; (1,2) and (2,1) name the same coupling, and
/// adding it twice is rejected instead of summed.
class IsingModel {
public:
    using Key = std::vector<int>;

    IsingModel() = default;
    explicit IsingModel(int n_qubits);

    void add_field(int qubit, double h);
    void add_coupling(int qubit_i, int qubit_j, double j);
    /// Dispatches on tuple length (1 or 2).
    void add_term(std::span<const int> indices, double coeff);

    /// Raises the register size above the largest referenced index.
    void set_n_qubits(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    const std::map<Key, double>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    friend bool operator==(const IsingModel&, const IsingModel&) = default;

private:
    std::map<Key, double> terms_;
    int n_qubits_ = 0;
};

/// The eight-coupling, five-spin frustrated model used throughout the examples.
IsingModel h5_model();

/// Time-independent per-qubit offsets: sum_i dx_i X_i + sum_i dz_i Z_i.
struct FieldOffsets {
    std::vector<double> x;
    std::vector<double> z;

    bool empty() const { return x.empty() && z.empty(); }
};

/// Throws unless each non-empty offset vector has n_qubits finite entries.
void validate_offsets(const FieldOffsets& offsets, int n_qubits);

/// Energies of all 2^n basis states; index v holds the energy of int_to_spin(v, n).
RealVector ising_diagonal(const IsingModel& model);

/// sum_i X_i as a dense real-symmetric matrix.
ComplexMatrix transverse_matrix(int n_qubits);

/// sum_i dx_i X_i + diag(sum_i dz_i Z_i). Zero matrix when offsets are empty.
ComplexMatrix offset_matrix(const FieldOffsets& offsets, int n_qubits);

/// sign * A(s) * H_transverse + B(s) * H_ising + offsets, as a dense Hermitian matrix.
ComplexMatrix hamiltonian_at(const IsingModel& model, const AnnealingSchedule& schedule, double s,
                             const FieldOffsets& offsets = {});

struct SpectrumResult {
    std::vector<double> s_grid;
    std::vector<std::vector<double>> levels;  ///< ascending eigenvalues, one list per grid point
};

SpectrumResult eigenspectrum(const IsingModel& model, const AnnealingSchedule& schedule,
                             std::span<const double> s_grid, const FieldOffsets& offsets = {});

struct GapMinimum {
    double s = 0.0;
    double gap = 0.0;
};

/// Minimum over the grid of levels[upper] - levels[lower].
GapMinimum minimum_gap(const SpectrumResult& spectrum, std::size_t lower = 0, std::size_t upper = 1);

struct GroundStates {
    double energy = 0.0;
    std::vector<SpinVector> states;  ///< ordered by state index
};

GroundStates brute_force_ground_states(const IsingModel& model);

/// Evenly spaced grid of `count` points on [0, 1] (count >= 2), endpoints exact.
std::vector<double> uniform_grid(std::size_t count);

}  // namespace qanneal
