#include "qanneal/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <thread>

#include "qanneal/format.hpp"
#include "qanneal/kernels.hpp"

namespace qanneal {
namespace {

constexpr std::size_t kStructuredCacheLimit = std::size_t{1} << 30;

std::span<Complex> flat(ComplexMatrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const Complex> flat(const ComplexMatrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

void check_inputs(const IsingModel& model, double tau, const FieldOffsets& offsets) {
    const int n = model.n_qubits();
    if (n < 1 || n > kMaxQubits) {
        throw Error(ErrorCode::Size,
                    "qubit count " + std::to_string(n) + " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
    if (!std::isfinite(tau) || tau < 0.0) {
        throw Error(ErrorCode::Domain, "annealing time " + format_double(tau) + " must be finite and >= 0");
    }
    validate_offsets(offsets, n);
}

// Step-independent pieces of H(s) = sign A(s) H_x + B(s) H_ising + offsets.
struct TfimOperators {
    int n_qubits = 0;
    Eigen::Index dim = 0;
    double sign = 1.0;
    RealVector ising;
    std::vector<double> x_offsets;  // empty when absent
    RealVector z_offsets;           // diagonal, size 0 when absent
    bool has_offsets = false;

    TfimOperators(const IsingModel& model, const AnnealingSchedule& schedule, const FieldOffsets& offsets)
        : n_qubits(model.n_qubits()),
          dim(static_cast<Eigen::Index>(state_count(n_qubits))),
          sign(sign_value(schedule.driver_sign())),
          ising(ising_diagonal(model)),
          x_offsets(offsets.x),
          has_offsets(!offsets.empty()) {
        if (!offsets.z.empty()) {
            z_offsets = RealVector::Zero(dim);
            std::span<double> zd(z_offsets.data(), static_cast<std::size_t>(dim));
            for (int q = 0; q < n_qubits; ++q) kernels::add_z_term(zd, offsets.z[static_cast<std::size_t>(q)], q);
        }
    }

    ComplexMatrix driver() const { return sign * transverse_matrix(n_qubits); }

    ComplexMatrix ising_dense() const {
        ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
        m.diagonal() = ising.cast<Complex>();
        return m;
    }

    ComplexMatrix offsets_dense() const {
        FieldOffsets off;
        off.x = x_offsets;
        ComplexMatrix m = offset_matrix(off, n_qubits);
        if (z_offsets.size() != 0) m.diagonal() += z_offsets.cast<Complex>();
        return m;
    }

    std::vector<ComplexMatrix> basis() const {
        std::vector<ComplexMatrix> out{driver(), ising_dense()};
        if (has_offsets) out.push_back(offsets_dense());
        return out;
    }
};

struct StepFit {
    ScalarQuadratic a;
    ScalarQuadratic b;
};

bool is_breakpoint(double s, std::span<const double> breakpoints) {
    return std::find(breakpoints.begin(), breakpoints.end(), s) != breakpoints.end();
}

StepFit fit_step(const AnnealingSchedule& schedule, double s0, double s1) {
    const bool left = is_breakpoint(s1, schedule.breakpoints());
    return {local_quadratic_fit_unit(schedule.a_function(), s0, s1, left),
            local_quadratic_fit_unit(schedule.b_function(), s0, s1, left)};
}

MatrixPolynomial step_polynomial(const std::vector<ComplexMatrix>& basis, const StepFit& fit, Complex lambda) {
    const double a[] = {fit.a.c0, fit.a.c1, fit.a.c2};
    const double b[] = {fit.b.c0, fit.b.c1, fit.b.c2};
    std::vector<ComplexMatrix> coeffs;
    for (int m = 0; m < 3; ++m) {
        ComplexMatrix c = a[m] * basis[0] + b[m] * basis[1];
        if (m == 0 && basis.size() > 2) c += basis[2];
        coeffs.push_back(lambda * c);
    }
    return MatrixPolynomial(std::move(coeffs));
}

MagnusPath resolve_path(MagnusPath requested, int order, int basis_size, Eigen::Index dim) {
    if (requested == MagnusPath::Auto) {
        if (order > 4) return MagnusPath::Recursive;
        return StructuredMagnus4::cache_bytes(basis_size, dim) <= kStructuredCacheLimit ? MagnusPath::Structured
                                                                                        : MagnusPath::Explicit;
    }
    if ((requested == MagnusPath::Structured || requested == MagnusPath::Explicit) && order > 4) {
        throw Error(ErrorCode::Config, std::string(magnus_path_name(requested)) + " Magnus path supports orders 1-4");
    }
    return requested;
}

Error with_step(const Error& e, std::size_t step) {
    return Error(e.code(), "step " + std::to_string(step + 1) + ": " + e.what());
}

}  // namespace

std::string_view magnus_path_name(MagnusPath path) noexcept {
    switch (path) {
        case MagnusPath::Auto: return "auto";
        case MagnusPath::Structured: return "structured";
        case MagnusPath::Explicit: return "explicit";
        case MagnusPath::Recursive: return "recursive";
    }
    return "unknown";
}

void validate_config(const SolverConfig& config) {
    if (config.order < 1 || config.order > 8) {
        throw Error(ErrorCode::Config, "Magnus order must be in [1, 8], got " + std::to_string(config.order));
    }
    if (config.fixed_steps && *config.fixed_steps < 1) {
        throw Error(ErrorCode::Config, "step count must be >= 1");
    }
    const auto& ad = config.adaptive;
    if (ad.initial_steps < 1) throw Error(ErrorCode::Config, "initial step count must be >= 1");
    if (!(ad.mean_tol > 0.0) || !(ad.max_tol > 0.0)) throw Error(ErrorCode::Config, "tolerances must be > 0");
    if (ad.max_doublings < 1) throw Error(ErrorCode::Config, "max_doublings must be >= 1");
}

ComplexMatrix initial_density(int n_qubits, InitialState kind) {
    const auto dim = static_cast<Eigen::Index>(state_count(n_qubits));
    const double amplitude = std::pow(2.0, -0.5 * n_qubits);
    ComplexVector psi(dim);
    for (Eigen::Index v = 0; v < dim; ++v) {
        // |−⟩ = (|0⟩ − |1⟩)/√2 contributes a sign per set bit.
        const bool odd = kind == InitialState::AllMinus && (std::popcount(static_cast<std::uint64_t>(v)) & 1);
        psi[v] = odd ? -amplitude : amplitude;
    }
    return psi * psi.adjoint();
}

std::vector<double> step_boundaries(long n_steps, std::span<const double> breakpoints) {
    if (n_steps < 1) {
        throw Error(ErrorCode::Config, "step count must be >= 1");
    }
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n_steps) + 1 + breakpoints.size());
    for (long k = 0; k <= n_steps; ++k) {
        grid.push_back(static_cast<double>(k) / static_cast<double>(n_steps));
    }
    for (double p : breakpoints) {
        auto it = std::lower_bound(grid.begin(), grid.end(), p);
        // Snap a node sitting within roundoff of the breakpoint; otherwise insert it.
        if (it != grid.end() && std::abs(*it - p) <= 1e-14) {
            *it = p;
        } else if (it != grid.begin() && std::abs(*(it - 1) - p) <= 1e-14) {
            *(it - 1) = p;
        } else {
            grid.insert(it, p);
        }
    }
    return grid;
}

MatrixPolynomial build_step_polynomial(const IsingModel& model, const AnnealingSchedule& schedule,
                                       const FieldOffsets& offsets, double tau, double s0, double s1) {
    check_inputs(model, tau, offsets);
    if (!(s0 >= 0.0 && s0 < s1 && s1 <= 1.0)) {
        throw Error(ErrorCode::Domain, "step [" + format_double(s0) + ", " + format_double(s1) + "] not within [0, 1]");
    }
    const TfimOperators ops(model, schedule, offsets);
    const Complex lambda{0.0, -tau * (s1 - s0)};
    return step_polynomial(ops.basis(), fit_step(schedule, s0, s1), lambda);
}

SimulationResult simulate_fixed(const IsingModel& model, double tau, const AnnealingSchedule& schedule, int order,
                                long n_steps, const FieldOffsets& offsets, MagnusPath path, bool track_unitarity) {
    check_inputs(model, tau, offsets);
    SolverConfig config;
    config.order = order;
    config.fixed_steps = n_steps;
    validate_config(config);

    const TfimOperators ops(model, schedule, offsets);
    const std::vector<ComplexMatrix> basis = ops.basis();
    const MagnusPath chosen = resolve_path(path, order, static_cast<int>(basis.size()), ops.dim);
    std::optional<StructuredMagnus4> structured;
    if (chosen == MagnusPath::Structured) structured.emplace(basis, order);

    const std::vector<double> grid = step_boundaries(n_steps, schedule.breakpoints());
    ComplexMatrix rho = initial_density(ops.n_qubits, schedule.initial_state());
    ComplexMatrix omega(ops.dim, ops.dim);
    ComplexMatrix tmp(ops.dim, ops.dim);
    double unitarity = 0.0;

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double s0 = grid[k];
        const double s1 = grid[k + 1];
        const StepFit fit = fit_step(schedule, s0, s1);
        const Complex lambda{0.0, -tau * (s1 - s0)};
        try {
            switch (chosen) {
                case MagnusPath::Structured: {
                    StructuredMagnus4::StepWeights w{};
                    const double a[] = {fit.a.c0, fit.a.c1, fit.a.c2};
                    const double b[] = {fit.b.c0, fit.b.c1, fit.b.c2};
                    for (std::size_t m = 0; m < 3; ++m) {
                        w[m][0] = a[m];
                        w[m][1] = b[m];
                    }
                    if (basis.size() > 2) w[0][2] = 1.0;
                    structured->omega(lambda, w, omega);
                    break;
                }
                case MagnusPath::Explicit: {
                    const auto terms = omega_explicit4(step_polynomial(basis, fit, lambda), order);
                    omega = sum_terms(terms);
                    break;
                }
                default: {
                    const auto terms = omega_recursive(step_polynomial(basis, fit, lambda), order);
                    omega = sum_terms(terms);
                    break;
                }
            }
            if (!omega.allFinite()) {
                throw Error(ErrorCode::NumericalFailure, "non-finite Magnus exponent");
            }
            const ComplexMatrix u = exponentiate_omega(omega);
            if (track_unitarity) {
                tmp.noalias() = u.adjoint() * u;
                tmp.diagonal().array() -= 1.0;
                unitarity = std::max(unitarity, tmp.cwiseAbs().maxCoeff());
            }
            tmp.noalias() = u * rho;
            rho.noalias() = tmp * u.adjoint();
        } catch (const Error& e) {
            throw with_step(e, k);
        }
    }

    SimulationResult result;
    result.n_qubits = ops.n_qubits;
    result.tau = tau;
    result.order = order;
    result.steps_used = n_steps;
    result.propagators = static_cast<long>(grid.size() - 1);
    result.method = "magnus-" + std::string(magnus_path_name(chosen));
    result.probabilities.resize(static_cast<std::size_t>(ops.dim));
    for (Eigen::Index v = 0; v < ops.dim; ++v) result.probabilities[static_cast<std::size_t>(v)] = rho(v, v).real();
    result.rho = std::move(rho);
    if (track_unitarity) result.unitarity_defect = unitarity;
    return result;
}

SimulationResult simulate(const IsingModel& model, double tau, const AnnealingSchedule& schedule,
                          const SolverConfig& config, const FieldOffsets& offsets) {
    validate_config(config);
    if (config.fixed_steps) {
        return simulate_fixed(model, tau, schedule, config.order, *config.fixed_steps, offsets, config.path,
                              config.track_unitarity);
    }
    const auto& ad = config.adaptive;
    long n = ad.initial_steps;
    SimulationResult previous =
        simulate_fixed(model, tau, schedule, config.order, n, offsets, config.path, config.track_unitarity);
    std::vector<ConvergenceRecord> trace;
    for (int d = 1; d <= ad.max_doublings; ++d) {
        n *= 2;
        SimulationResult current =
            simulate_fixed(model, tau, schedule, config.order, n, offsets, config.path, config.track_unitarity);
        const ConvergenceRecord record{n, error_max(previous.rho, current.rho), error_mean(previous.rho, current.rho)};
        trace.push_back(record);
        if (record.e_max <= ad.max_tol && record.e_mean <= ad.mean_tol) {
            current.convergence_trace = std::move(trace);
            return current;
        }
        previous = std::move(current);
    }
    std::string message = "no convergence after " + std::to_string(ad.max_doublings) + " doublings (last E_max " +
                          format_double(trace.back().e_max) + ", E_mean " + format_double(trace.back().e_mean) + ")";
    throw NonConvergenceError(std::move(message), std::move(trace));
}

std::vector<SweepEntry> simulate_sweep(const IsingModel& model, std::span<const double> taus,
                                       const AnnealingSchedule& schedule, const SolverConfig& config,
                                       const FieldOffsets& offsets, int jobs) {
    if (taus.empty()) {
        throw Error(ErrorCode::Domain, "sweep needs at least one annealing time");
    }
    validate_config(config);
    std::vector<SweepEntry> entries(taus.size());
    auto run_one = [&](std::size_t k) {
        SweepEntry& entry = entries[k];
        entry.tau = taus[k];
        try {
            if (!(taus[k] > 0.0)) {
                throw Error(ErrorCode::Domain, "sweep annealing time " + format_double(taus[k]) + " must be > 0");
            }
            entry.result = simulate(model, taus[k], schedule, config, offsets);
        } catch (const Error& e) {
            entry.error_code = e.code();
            entry.error = e.what();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, taus.size());
    if (workers == 1) {
        for (std::size_t k = 0; k < taus.size(); ++k) run_one(k);
        return entries;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < taus.size(); k = next++) run_one(k);
            });
        }
    }
    return entries;
}

SimulationResult simulate_reference_rk(const IsingModel& model, double tau, const AnnealingSchedule& schedule,
                                       long n_steps, const FieldOffsets& offsets) {
    check_inputs(model, tau, offsets);
    const TfimOperators ops(model, schedule, offsets);
    const Eigen::Index dim = ops.dim;
    const std::vector<double> grid = step_boundaries(n_steps, schedule.breakpoints());
    const Complex minus_i_tau{0.0, -tau};

    std::vector<double> x_coeff(static_cast<std::size_t>(ops.n_qubits));
    RealVector diag(dim);
    auto set_hamiltonian = [&](double s) {
        const double a = ops.sign * schedule.a(s);
        for (int q = 0; q < ops.n_qubits; ++q) {
            x_coeff[static_cast<std::size_t>(q)] = a + (ops.x_offsets.empty() ? 0.0 : ops.x_offsets[static_cast<std::size_t>(q)]);
        }
        diag = schedule.b(s) * ops.ising;
        if (ops.z_offsets.size() != 0) diag += ops.z_offsets;
    };
    // out = −iτ [H, ρ] = −iτ (Hρ − (Hρ)†) for Hermitian ρ and real-symmetric H.
    ComplexMatrix h_rho(dim, dim);
    auto rhs = [&](const ComplexMatrix& rho, ComplexMatrix& out) {
        h_rho.setZero();
        for (int q = 0; q < ops.n_qubits; ++q) {
            kernels::add_bit_flip(flat(h_rho), x_coeff[static_cast<std::size_t>(q)], flat(rho), q);
        }
        const std::span<const double> d(diag.data(), static_cast<std::size_t>(dim));
        for (Eigen::Index w = 0; w < dim; ++w) {
            kernels::add_diag_product({h_rho.col(w).data(), static_cast<std::size_t>(dim)}, d,
                                      {rho.col(w).data(), static_cast<std::size_t>(dim)});
        }
        out = minus_i_tau * (h_rho - h_rho.adjoint());
    };

    ComplexMatrix rho = initial_density(ops.n_qubits, schedule.initial_state());
    ComplexMatrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double s0 = grid[k];
        const double h = grid[k + 1] - s0;
        set_hamiltonian(s0);
        rhs(rho, k1);
        set_hamiltonian(s0 + 0.5 * h);
        stage = rho + (0.5 * h) * k1;
        rhs(stage, k2);
        stage = rho + (0.5 * h) * k2;
        rhs(stage, k3);
        // Evaluate just below a breakpoint so the left branch drives the whole step.
        set_hamiltonian(is_breakpoint(grid[k + 1], schedule.breakpoints()) ? std::nextafter(grid[k + 1], s0)
                                                                          : grid[k + 1]);
        stage = rho + h * k3;
        rhs(stage, k4);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!rho.allFinite()) {
            throw Error(ErrorCode::NumericalFailure, "step " + std::to_string(k + 1) + ": reference integrator diverged");
        }
    }

    SimulationResult result;
    const Complex trace = rho.trace();
    result.trace_drift = std::abs(trace - 1.0);
    result.purity_drift = std::abs(rho.cwiseAbs2().sum() - 1.0);
    rho /= trace;
    result.n_qubits = ops.n_qubits;
    result.tau = tau;
    result.order = 4;
    result.steps_used = n_steps;
    result.propagators = static_cast<long>(grid.size() - 1);
    result.method = "rk4";
    result.probabilities.resize(static_cast<std::size_t>(dim));
    for (Eigen::Index v = 0; v < dim; ++v) result.probabilities[static_cast<std::size_t>(v)] = rho(v, v).real();
    result.rho = std::move(rho);
    return result;
}

double error_max(const ComplexMatrix& rho, const ComplexMatrix& rho_hat) {
    if (rho.rows() != rho_hat.rows() || rho.cols() != rho_hat.cols()) {
        throw Error(ErrorCode::Shape, "density matrices differ in shape");
    }
    return kernels::abs_diff(flat(rho), flat(rho_hat)).max;
}

double error_mean(const ComplexMatrix& rho, const ComplexMatrix& rho_hat) {
    if (rho.rows() != rho_hat.rows() || rho.cols() != rho_hat.cols()) {
        throw Error(ErrorCode::Shape, "density matrices differ in shape");
    }
    if (rho.size() == 0) return 0.0;
    return kernels::abs_diff(flat(rho), flat(rho_hat)).sum / static_cast<double>(rho.size());
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
    if (count == 0) {
        throw Error(ErrorCode::Range, "logspace needs at least one point");
    }
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
        out[k] = std::pow(10.0, lo + (hi - lo) * t);
    }
    return out;
}

}  // namespace qanneal
