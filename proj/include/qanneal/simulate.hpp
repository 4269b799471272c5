#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/hamiltonian.hpp"
#include "qanneal/magnus.hpp"
#include "qanneal/schedule.hpp"
#include "qanneal/types.hpp"

namespace qanneal {

/// How Ω is assembled per step. Auto uses the cached-commutator path for orders <= 4
/// (falling back to Explicit when the cache would be too large) and Recursive above.
enum class MagnusPath { Auto, Structured, Explicit, Recursive };

std::string_view magnus_path_name(MagnusPath path) noexcept;

struct AdaptiveOptions {
    int initial_steps = 2;
    double mean_tol = 1e-6;
    double max_tol = 1e-4;
    int max_doublings = 24;
};

struct SolverConfig {
    int order = 4;
    /// Fixed uniform step count; adaptive step doubling when empty.
    std::optional<long> fixed_steps;
    AdaptiveOptions adaptive;
    MagnusPath path = MagnusPath::Auto;
    /// Record max ‖U†U − I‖ over all steps (costs one extra matrix product per step).
    bool track_unitarity = false;
};

void validate_config(const SolverConfig& config);

struct ConvergenceRecord {
    long n_steps = 0;
    double e_max = 0.0;
    double e_mean = 0.0;
};

struct SimulationResult {
    ComplexMatrix rho;
    std::vector<double> probabilities;
    int n_qubits = 0;
    double tau = 0.0;
    int order = 0;
    long steps_used = 0;       ///< uniform step count of the returned state
    long propagators = 0;      ///< applied propagators, including steps split at breakpoints
    std::string method;
    std::vector<ConvergenceRecord> convergence_trace;
    std::optional<double> unitarity_defect;
    std::optional<double> trace_drift;   ///< reference integrator only, before renormalization
    std::optional<double> purity_drift;  ///< reference integrator only
};

/// Thrown when step doubling exhausts max_doublings; carries the comparisons made so far.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& message, std::vector<ConvergenceRecord> trace)
        : Error(ErrorCode::NonConvergence, message), trace_(std::move(trace)) {}

    const std::vector<ConvergenceRecord>& trace() const { return trace_; }

private:
    std::vector<ConvergenceRecord> trace_;
};

/// ρ₀ for the schedule's sign convention: ⊗|−⟩ for a positive driver, ⊗|+⟩ otherwise.
ComplexMatrix initial_density(int n_qubits, InitialState kind);

/// Step boundaries on [0, 1]: the uniform grid k / n_steps with schedule breakpoints inserted.
std::vector<double> step_boundaries(long n_steps, std::span<const double> breakpoints);

/// 𝒜(u) = −iτ(s1 − s0) (sign a(u) H_x + b(u) H_ising + offsets) on one step, u in [0, 1],
/// with a and b the quadratic interpolants of the schedule over [s0, s1].
MatrixPolynomial build_step_polynomial(const IsingModel& model, const AnnealingSchedule& schedule,
                                       const FieldOffsets& offsets, double tau, double s0, double s1);

SimulationResult simulate_fixed(const IsingModel& model, double tau, const AnnealingSchedule& schedule, int order,
                                long n_steps, const FieldOffsets& offsets = {}, MagnusPath path = MagnusPath::Auto,
                                bool track_unitarity = false);

/// Fixed or adaptive depending on config.fixed_steps.
SimulationResult simulate(const IsingModel& model, double tau, const AnnealingSchedule& schedule,
                          const SolverConfig& config = {}, const FieldOffsets& offsets = {});

struct SweepEntry {
    double tau = 0.0;
    std::optional<SimulationResult> result;
    std::optional<ErrorCode> error_code;
    std::string error;
};

/// Independent simulations per τ, in input order. Failures are recorded per entry.
std::vector<SweepEntry> simulate_sweep(const IsingModel& model, std::span<const double> taus,
                                       const AnnealingSchedule& schedule, const SolverConfig& config = {},
                                       const FieldOffsets& offsets = {}, int jobs = 1);

/// Classical RK4 on dρ/ds = −iτ[H(s), ρ] with the exact schedule functions.
SimulationResult simulate_reference_rk(const IsingModel& model, double tau, const AnnealingSchedule& schedule,
                                       long n_steps, const FieldOffsets& offsets = {});

double error_max(const ComplexMatrix& rho, const ComplexMatrix& rho_hat);
double error_mean(const ComplexMatrix& rho, const ComplexMatrix& rho_hat);

/// logspace(lo, hi, count): count points 10^lo .. 10^hi, log-uniform.
std::vector<double> logspace(double lo, double hi, std::size_t count);

}  // namespace qanneal
