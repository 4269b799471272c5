#include "qanneal/magnus.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "qanneal/error.hpp"
#include "qanneal/kernels.hpp"

namespace qanneal {
namespace {

constexpr int kMaxRecursiveOrder = 8;
constexpr int kQ = 3;  // coefficient count of a quadratic

ComplexMatrix comm(const ComplexMatrix& x, const ComplexMatrix& y) {
    ComplexMatrix out = x * y;
    out.noalias() -= y * x;
    return out;
}

std::span<Complex> flat(ComplexMatrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const Complex> flat(const ComplexMatrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

// Weights of the explicit Ω_2..Ω_4 formulas for quadratic 𝒜, regrouped so that every term
// has the shape [C_a, [C_b, C_c]] (Ω_3) or [C_a, [C_b, [C_c, C_d]]] (Ω_4).
struct ExplicitTables {
    double w2[kQ][kQ]{};               // coefficient of [C_p, C_q]
    double t3[kQ][kQ][kQ]{};           // coefficient of [C_a, [C_b, C_c]]
    double t4[kQ][kQ][kQ][kQ]{};       // coefficient of [C_a, [C_b, [C_c, C_d]]]

    ExplicitTables() {
        for (int p = 0; p < kQ; ++p) {
            for (int q = 0; q < kQ; ++q) {
                const int pq[] = {p, q};
                w2[p][q] = 0.5 * simplex_integral(pq);
                for (int r = 0; r < kQ; ++r) {
                    const int pqr[] = {p, q, r};
                    const double i3 = simplex_integral(pqr) / 6.0;
                    // [A1,[A2,A3]] + [A3,[A2,A1]]
                    t3[p][q][r] += i3;
                    t3[r][q][p] += i3;
                    for (int t = 0; t < kQ; ++t) {
                        const int pqrt[] = {p, q, r, t};
                        const double i4 = simplex_integral(pqrt) / 12.0;
                        // [[[A1,A2],A3],A4] = [A4,[A3,[A1,A2]]]
                        t4[t][r][p][q] += i4;
                        // [A1,[[A2,A3],A4]] = -[A1,[A4,[A2,A3]]]
                        t4[p][t][q][r] -= i4;
                        // [A1,[A2,[A3,A4]]]
                        t4[p][q][r][t] += i4;
                        // [A2,[A3,[A4,A1]]]
                        t4[q][r][t][p] += i4;
                    }
                }
            }
        }
    }
};

const ExplicitTables& tables() {
    static const ExplicitTables t;
    return t;
}

}  // namespace

MatrixPolynomial::MatrixPolynomial(std::vector<ComplexMatrix> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) {
        throw Error(ErrorCode::Shape, "matrix polynomial needs at least one coefficient");
    }
    dim_ = coeffs_.front().rows();
    for (const auto& c : coeffs_) {
        if (c.rows() != dim_ || c.cols() != dim_) {
            throw Error(ErrorCode::Shape, "matrix polynomial coefficients must be square and of equal size");
        }
    }
}

MatrixPolynomial MatrixPolynomial::zero(Eigen::Index dim) {
    return MatrixPolynomial({ComplexMatrix::Zero(dim, dim)});
}

ComplexMatrix MatrixPolynomial::evaluate(double u) const {
    ComplexMatrix out = coeffs_.back();
    for (int m = degree() - 1; m >= 0; --m) {
        out *= u;
        out += coeffs_[static_cast<std::size_t>(m)];
    }
    return out;
}

MatrixPolynomial MatrixPolynomial::integral() const {
    std::vector<ComplexMatrix> out;
    out.reserve(coeffs_.size() + 1);
    out.push_back(ComplexMatrix::Zero(dim_, dim_));
    for (std::size_t m = 0; m < coeffs_.size(); ++m) {
        out.push_back(coeffs_[m] / static_cast<double>(m + 1));
    }
    return MatrixPolynomial(std::move(out));
}

MatrixPolynomial& MatrixPolynomial::operator+=(const MatrixPolynomial& other) {
    if (coeffs_.empty()) {
        return *this = other;
    }
    if (other.dim_ != dim_) {
        throw Error(ErrorCode::Shape, "matrix polynomial dimension mismatch");
    }
    if (other.coeffs_.size() > coeffs_.size()) {
        coeffs_.resize(other.coeffs_.size(), ComplexMatrix::Zero(dim_, dim_));
    }
    for (std::size_t m = 0; m < other.coeffs_.size(); ++m) {
        coeffs_[m] += other.coeffs_[m];
    }
    return *this;
}

MatrixPolynomial& MatrixPolynomial::operator*=(Complex factor) {
    for (auto& c : coeffs_) c *= factor;
    return *this;
}

MatrixPolynomial commutator(const MatrixPolynomial& x, const MatrixPolynomial& y) {
    if (x.dim_ != y.dim_) {
        throw Error(ErrorCode::Shape, "matrix polynomial dimension mismatch");
    }
    const int degree = x.degree() + y.degree();
    std::vector<ComplexMatrix> out(static_cast<std::size_t>(degree + 1), ComplexMatrix::Zero(x.dim_, x.dim_));
    for (int p = 0; p <= x.degree(); ++p) {
        for (int q = 0; q <= y.degree(); ++q) {
            auto& dst = out[static_cast<std::size_t>(p + q)];
            dst.noalias() += x.coefficient(p) * y.coefficient(q);
            dst.noalias() -= y.coefficient(q) * x.coefficient(p);
        }
    }
    return MatrixPolynomial(std::move(out));
}

double bernoulli(int j) {
    static constexpr double values[] = {1.0, -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0, 0.0, -1.0 / 30.0};
    if (j < 0 || j > 8) {
        throw Error(ErrorCode::Range, "Bernoulli number index " + std::to_string(j) + " outside [0, 8]");
    }
    return values[j];
}

double simplex_integral(std::span<const int> powers) {
    // Integrate the innermost variable first: each level adds its power plus one.
    double value = 1.0;
    int exponent = 0;
    for (std::size_t k = powers.size(); k-- > 0;) {
        exponent += powers[k] + 1;
        value /= static_cast<double>(exponent);
    }
    return value;
}

ComplexMatrix sum_terms(std::span<const OmegaTerm> terms) {
    if (terms.empty()) {
        throw Error(ErrorCode::Shape, "no Magnus terms to sum");
    }
    ComplexMatrix out = terms.front().matrix;
    for (std::size_t k = 1; k < terms.size(); ++k) out += terms[k].matrix;
    return out;
}

std::vector<OmegaTerm> omega_explicit4(const MatrixPolynomial& p, int upto) {
    if (upto < 1 || upto > 4) {
        throw Error(ErrorCode::Config, "explicit Magnus path supports orders 1-4, got " + std::to_string(upto));
    }
    if (p.degree() > 2) {
        throw Error(ErrorCode::UnsupportedDegree,
                    "explicit Magnus path needs a polynomial of degree <= 2, got " + std::to_string(p.degree()));
    }
    const Eigen::Index dim = p.dim();
    const int nc = p.degree() + 1;
    const auto& tb = tables();
    const auto& c = p.coefficients();

    std::vector<OmegaTerm> terms;
    ComplexMatrix omega1 = ComplexMatrix::Zero(dim, dim);
    for (int m = 0; m < nc; ++m) omega1 += c[static_cast<std::size_t>(m)] / static_cast<double>(m + 1);
    terms.push_back({1, std::move(omega1)});
    if (upto == 1) return terms;

    // K[b][c] = [C_b, C_c]; antisymmetric, so only b < c is formed.
    ComplexMatrix k[kQ][kQ];
    for (int b = 0; b < nc; ++b) {
        for (int d = b + 1; d < nc; ++d) {
            k[b][d] = comm(c[static_cast<std::size_t>(b)], c[static_cast<std::size_t>(d)]);
        }
    }
    auto combine_pairs = [&](auto&& weight) {
        ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
        for (int b = 0; b < nc; ++b) {
            for (int d = b + 1; d < nc; ++d) {
                const double w = weight(b, d) - weight(d, b);
                if (w != 0.0) out += w * k[b][d];
            }
        }
        return out;
    };

    terms.push_back({2, combine_pairs([&](int b, int d) { return tb.w2[b][d]; })});
    if (upto == 2) return terms;

    ComplexMatrix omega3 = ComplexMatrix::Zero(dim, dim);
    for (int a = 0; a < nc; ++a) {
        const ComplexMatrix inner = combine_pairs([&](int b, int d) { return tb.t3[a][b][d]; });
        omega3 += comm(c[static_cast<std::size_t>(a)], inner);
    }
    terms.push_back({3, std::move(omega3)});
    if (upto == 3) return terms;

    ComplexMatrix omega4 = ComplexMatrix::Zero(dim, dim);
    for (int a = 0; a < nc; ++a) {
        ComplexMatrix middle = ComplexMatrix::Zero(dim, dim);
        for (int e = 0; e < nc; ++e) {
            const ComplexMatrix inner = combine_pairs([&](int b, int d) { return tb.t4[a][e][b][d]; });
            middle += comm(c[static_cast<std::size_t>(e)], inner);
        }
        omega4 += comm(c[static_cast<std::size_t>(a)], middle);
    }
    terms.push_back({4, std::move(omega4)});
    return terms;
}

std::vector<OmegaTerm> omega_recursive(const MatrixPolynomial& p, int order) {
    if (order < 1 || order > kMaxRecursiveOrder) {
        throw Error(ErrorCode::Config, "recursive Magnus order must be in [1, " + std::to_string(kMaxRecursiveOrder) +
                                           "], got " + std::to_string(order));
    }
    const auto k_max = static_cast<std::size_t>(order);
    // omega[k] and s[k][j] are polynomials in the upper integration limit u.
    std::vector<MatrixPolynomial> omega(k_max + 1);
    std::vector<std::vector<MatrixPolynomial>> s(k_max + 1, std::vector<MatrixPolynomial>(k_max + 1));
    omega[1] = p.integral();

    double factorial = 1.0;
    std::vector<double> weight(k_max + 1, 0.0);  // B_j / j!
    for (std::size_t j = 1; j <= k_max; ++j) {
        factorial *= static_cast<double>(j);
        weight[j] = bernoulli(static_cast<int>(j)) / factorial;
    }

    for (std::size_t k = 2; k <= k_max; ++k) {
        s[k][1] = commutator(omega[k - 1], p);
        for (std::size_t j = 2; j < k; ++j) {
            MatrixPolynomial acc;
            for (std::size_t l = 1; l <= k - j; ++l) {
                acc += commutator(omega[l], s[k - l][j - 1]);
            }
            s[k][j] = std::move(acc);
        }
        MatrixPolynomial integrand;
        for (std::size_t j = 1; j < k; ++j) {
            if (weight[j] == 0.0) continue;
            MatrixPolynomial term = s[k][j];
            term *= weight[j];
            integrand += term;
        }
        omega[k] = integrand.integral();
    }

    std::vector<OmegaTerm> terms;
    for (std::size_t k = 1; k <= k_max; ++k) {
        terms.push_back({static_cast<int>(k), omega[k].evaluate(1.0)});
    }
    return terms;
}

double anti_hermitian_defect(const ComplexMatrix& omega) {
    const double scale = std::max(1.0, omega.cwiseAbs().maxCoeff());
    return (omega + omega.adjoint()).cwiseAbs().maxCoeff() / scale;
}

ComplexMatrix exponentiate_omega(const ComplexMatrix& omega) {
    if (omega.rows() != omega.cols()) {
        throw Error(ErrorCode::Shape, "Magnus exponent must be square");
    }
    if (!omega.allFinite()) {
        throw Error(ErrorCode::NumericalFailure, "Magnus exponent has non-finite entries");
    }
    const double defect = anti_hermitian_defect(omega);
    if (defect > 1e-10) {
        throw Error(ErrorCode::NumericalConsistency,
                    "Magnus exponent is not anti-Hermitian (relative defect " + std::to_string(defect) + ")");
    }
    // iΩ is Hermitian; symmetrize away roundoff before diagonalizing.
    const Complex i{0.0, 1.0};
    const ComplexMatrix h = (i * 0.5) * (omega - omega.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "eigendecomposition of the Magnus exponent failed");
    }
    const auto& v = solver.eigenvectors();
    const ComplexVector phases = (-i * solver.eigenvalues().cast<Complex>()).array().exp().matrix();
    ComplexMatrix u;
    u.noalias() = (v * phases.asDiagonal()) * v.adjoint();
    return u;
}

std::size_t StructuredMagnus4::cache_bytes(int basis_size, Eigen::Index dim) {
    const std::size_t b = static_cast<std::size_t>(basis_size);
    const std::size_t pairs = b * (b - 1) / 2;
    const std::size_t count = b + pairs + b * pairs + b * b * pairs;
    return count * static_cast<std::size_t>(dim * dim) * sizeof(Complex);
}

StructuredMagnus4::StructuredMagnus4(std::vector<ComplexMatrix> basis, int order)
    : order_(order), basis_(std::move(basis)) {
    if (order < 1 || order > 4) {
        throw Error(ErrorCode::Config, "structured Magnus path supports orders 1-4, got " + std::to_string(order));
    }
    if (basis_.empty() || basis_.size() > static_cast<std::size_t>(kMaxBasis)) {
        throw Error(ErrorCode::Shape, "structured Magnus path needs 1-3 basis operators");
    }
    basis_size_ = static_cast<int>(basis_.size());
    dim_ = basis_.front().rows();
    for (const auto& e : basis_) {
        if (e.rows() != dim_ || e.cols() != dim_) {
            throw Error(ErrorCode::Shape, "basis operators must be square and of equal size");
        }
    }
    pair_count_ = basis_size_ * (basis_size_ - 1) / 2;
    auto keep = [](ComplexMatrix m) { return m.isZero(0.0) ? ComplexMatrix{} : m; };
    if (order_ >= 2) {
        for (int b = 0; b < basis_size_; ++b) {
            for (int c = b + 1; c < basis_size_; ++c) {
                pairs_.push_back(keep(comm(basis_[static_cast<std::size_t>(b)], basis_[static_cast<std::size_t>(c)])));
            }
        }
    }
    if (order_ >= 3) {
        for (int a = 0; a < basis_size_; ++a) {
            for (const auto& pair : pairs_) {
                triples_.push_back(pair.size() == 0 ? ComplexMatrix{}
                                                    : keep(comm(basis_[static_cast<std::size_t>(a)], pair)));
            }
        }
    }
    if (order_ >= 4) {
        for (int a = 0; a < basis_size_; ++a) {
            for (int e = 0; e < basis_size_; ++e) {
                for (int pr = 0; pr < pair_count_; ++pr) {
                    const auto& inner = triples_[static_cast<std::size_t>(e * pair_count_ + pr)];
                    quads_.push_back(inner.size() == 0 ? ComplexMatrix{}
                                                       : keep(comm(basis_[static_cast<std::size_t>(a)], inner)));
                }
            }
        }
    }
}

void StructuredMagnus4::omega(Complex lambda, const StepWeights& weights, ComplexMatrix& out) const {
    const auto& tb = tables();
    const int nb = basis_size_;
    out.setZero(dim_, dim_);
    auto accumulate = [&out](Complex w, const ComplexMatrix& m) {
        if (m.size() != 0 && w != Complex{}) kernels::axpy(flat(out), w, flat(m));
    };

    // Ω_1 = λ sum_b (sum_m w[m][b] / (m+1)) E_b
    for (int b = 0; b < nb; ++b) {
        double w = 0.0;
        for (int m = 0; m < kQ; ++m) w += weights[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)] / (m + 1);
        accumulate(lambda * w, basis_[static_cast<std::size_t>(b)]);
    }
    if (order_ == 1) return;

    // pair_coeff[c][d][pr] = w[c][β] w[d][γ] - w[c][γ] w[d][β] for the pr-th basis pair (β < γ):
    // the coefficient of [E_β, E_γ] in [C_c, C_d] / λ².
    double pair_coeff[kQ][kQ][3]{};
    {
        int pr = 0;
        for (int beta = 0; beta < nb; ++beta) {
            for (int gamma = beta + 1; gamma < nb; ++gamma, ++pr) {
                for (int c = 0; c < kQ; ++c) {
                    for (int d = 0; d < kQ; ++d) {
                        const auto& wc = weights[static_cast<std::size_t>(c)];
                        const auto& wd = weights[static_cast<std::size_t>(d)];
                        pair_coeff[c][d][pr] = wc[static_cast<std::size_t>(beta)] * wd[static_cast<std::size_t>(gamma)] -
                                               wc[static_cast<std::size_t>(gamma)] * wd[static_cast<std::size_t>(beta)];
                    }
                }
            }
        }
    }

    const Complex lambda2 = lambda * lambda;
    for (int pr = 0; pr < pair_count_; ++pr) {
        double w = 0.0;
        for (int c = 0; c < kQ; ++c)
            for (int d = 0; d < kQ; ++d) w += tb.w2[c][d] * pair_coeff[c][d][pr];
        accumulate(lambda2 * w, pairs_[static_cast<std::size_t>(pr)]);
    }
    if (order_ == 2) return;

    // inner3[a][pr] = sum_{b,c} t3[a][b][c] pair_coeff[b][c][pr]
    double inner3[kQ][3]{};
    for (int a = 0; a < kQ; ++a)
        for (int pr = 0; pr < pair_count_; ++pr)
            for (int b = 0; b < kQ; ++b)
                for (int c = 0; c < kQ; ++c) inner3[a][pr] += tb.t3[a][b][c] * pair_coeff[b][c][pr];

    const Complex lambda3 = lambda2 * lambda;
    for (int alpha = 0; alpha < nb; ++alpha) {
        for (int pr = 0; pr < pair_count_; ++pr) {
            double w = 0.0;
            for (int a = 0; a < kQ; ++a) w += weights[static_cast<std::size_t>(a)][static_cast<std::size_t>(alpha)] * inner3[a][pr];
            accumulate(lambda3 * w, triples_[static_cast<std::size_t>(alpha * pair_count_ + pr)]);
        }
    }
    if (order_ == 3) return;

    // inner4[a][e][pr] = sum_{c,d} t4[a][e][c][d] pair_coeff[c][d][pr]
    double inner4[kQ][kQ][3]{};
    for (int a = 0; a < kQ; ++a)
        for (int e = 0; e < kQ; ++e)
            for (int pr = 0; pr < pair_count_; ++pr)
                for (int c = 0; c < kQ; ++c)
                    for (int d = 0; d < kQ; ++d) inner4[a][e][pr] += tb.t4[a][e][c][d] * pair_coeff[c][d][pr];

    const Complex lambda4 = lambda2 * lambda2;
    for (int alpha = 0; alpha < nb; ++alpha) {
        for (int eps = 0; eps < nb; ++eps) {
            for (int pr = 0; pr < pair_count_; ++pr) {
                double w = 0.0;
                for (int a = 0; a < kQ; ++a) {
                    const double wa = weights[static_cast<std::size_t>(a)][static_cast<std::size_t>(alpha)];
                    if (wa == 0.0) continue;
                    for (int e = 0; e < kQ; ++e) {
                        w += wa * weights[static_cast<std::size_t>(e)][static_cast<std::size_t>(eps)] * inner4[a][e][pr];
                    }
                }
                accumulate(lambda4 * w, quads_[static_cast<std::size_t>((alpha * nb + eps) * pair_count_ + pr)]);
            }
        }
    }
}

}  // namespace qanneal
