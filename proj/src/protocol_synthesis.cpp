#include "qtp/protocol_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtp/errors.hpp"

namespace qtp {
namespace {

std::string dims(std::size_t a, std::size_t b) {
  return std::to_string(a) + "x" + std::to_string(b);
}

ComplexMatrix permutation_matrix(const std::vector<std::size_t>& order) {
  // Column m carries e_{order[m]}.
  ComplexMatrix p(order.size(), order.size());
  for (std::size_t m = 0; m < order.size(); ++m) p(order[m] - 1, m) = 1.0;
  return p;
}

// The support listed first, then every other index in ascending order.
std::vector<std::size_t> complete_order(const std::vector<std::size_t>& support, std::size_t n) {
  std::vector<std::size_t> order = support;
  std::vector<bool> used(n + 1, false);
  for (std::size_t s : support) used[s] = true;
  for (std::size_t i = 1; i <= n; ++i) {
    if (!used[i]) order.push_back(i);
  }
  return order;
}

// Orthonormal basis of the column space of a partial isometry, built by
// Gram-Schmidt with largest-residual pivoting (ties go to the lower column).
ComplexMatrix pivoted_column_basis(const ComplexMatrix& m, std::size_t count) {
  std::vector<ComplexVector> residuals;
  for (std::size_t c = 0; c < m.cols(); ++c) residuals.push_back(m.column(c));
  std::vector<ComplexVector> basis;
  std::vector<bool> taken(m.cols(), false);
  while (basis.size() < count) {
    std::size_t best = m.cols();
    double best_norm = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (taken[c]) continue;
      const double norm = residuals[c].norm();
      if (best == m.cols() || norm > best_norm + 1e-9) {
        best = c;
        best_norm = norm;
      }
    }
    if (best == m.cols() || best_norm < 1e-6) {
      throw DegenerateInputError("resource support has rank below " + std::to_string(count));
    }
    taken[best] = true;
    ComplexVector q = residuals[best];
    for (const ComplexVector& prev : basis) {
      const Complex proj = inner(prev, q);
      for (std::size_t r = 0; r < q.dim(); ++r) q[r] -= proj * prev[r];
    }
    const double norm = q.norm();
    for (std::size_t r = 0; r < q.dim(); ++r) q[r] /= norm;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (taken[c]) continue;
      const Complex proj = inner(q, residuals[c]);
      for (std::size_t r = 0; r < q.dim(); ++r) residuals[c][r] -= proj * q[r];
    }
    basis.push_back(std::move(q));
  }
  return ComplexMatrix::from_columns(basis);
}

ComplexMatrix leading_columns(const ComplexMatrix& m, std::size_t count) {
  ComplexMatrix out(m.rows(), count);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = m(r, c);
  return out;
}

void validate_support(const std::vector<std::size_t>& support, std::size_t dim,
                      const char* what) {
  if (support.empty()) throw ValidationError(std::string(what) + " is empty");
  SupportInjection{support}.validate(dim);
}

}  // namespace

// PhaseTensor ----------------------------------------------------------------

PhaseTensor::PhaseTensor(std::size_t n1, std::size_t n2, std::vector<Complex> entries)
    : n1_(n1), n2_(n2), entries_(std::move(entries)) {
  if (n1_ == 0 || n2_ == 0) throw DimensionError("phase tensor with a zero dimension");
  if (entries_.size() != n1_ * n1_ * n2_) {
    throw DimensionError("phase tensor " + std::to_string(n1_) + "x" + std::to_string(n1_) + "x" +
                         std::to_string(n2_) + " given " + std::to_string(entries_.size()) +
                         " entries");
  }
  for (const Complex& z : entries_) {
    if (!(std::abs(std::abs(z) - 1.0) <= kAlgebraTol)) {
      throw ValidationError("phase tensor entry is not unimodular");
    }
  }
  for (std::size_t k = 1; k <= n2_; ++k) {
    const ComplexMatrix m = slice(k);
    ComplexMatrix gram = adjoint(m) * m;
    gram *= 1.0 / static_cast<double>(n1_);
    if (max_abs_diff(gram, ComplexMatrix::identity(n1_)) > kNumericTol) {
      throw ValidationError("phase tensor slice k=" + std::to_string(k) +
                            " does not have orthogonal columns");
    }
  }
}

const Complex& PhaseTensor::operator()(std::size_t i, std::size_t j, std::size_t k) const {
  if (i < 1 || i > n1_ || j < 1 || j > n1_ || k < 1 || k > n2_) {
    throw IndexError("phase tensor index (" + std::to_string(i) + "," + std::to_string(j) + "," +
                     std::to_string(k) + ") out of range");
  }
  return entries_[((i - 1) * n1_ + (j - 1)) * n2_ + (k - 1)];
}

ComplexMatrix PhaseTensor::slice(std::size_t k) const {
  ComplexMatrix m(n1_, n1_);
  for (std::size_t s = 1; s <= n1_; ++s)
    for (std::size_t j = 1; j <= n1_; ++j) m(s - 1, j - 1) = (*this)(s, j, k);
  return m;
}

PhaseTensor fourier_phase_tensor(std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0) throw DimensionError("phase tensor with a zero dimension");
  std::vector<Complex> entries(n1 * n1 * n2);
  for (std::size_t s = 0; s < n1; ++s) {
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t power = (s * j) % n1;
      Complex phase = 1.0;
      if (power != 0) {
        if (2 * power == n1) {
          phase = -1.0;
        } else {
          const double angle =
              2.0 * std::numbers::pi * static_cast<double>(power) / static_cast<double>(n1);
          phase = std::polar(1.0, angle);
        }
      }
      for (std::size_t k = 0; k < n2; ++k) entries[(s * n1 + j) * n2 + k] = phase;
    }
  }
  return PhaseTensor(n1, n2, std::move(entries));
}

// ProtocolUnitary ------------------------------------------------------------

ProtocolUnitary::ProtocolUnitary(std::size_t n1, std::size_t n2, ComplexMatrix matrix,
                                 ProtocolFrame frame)
    : n1_(n1), n2_(n2), matrix_(std::move(matrix)), frame_(std::move(frame)) {
  if (matrix_.rows() != n1_ * n2_ || matrix_.cols() != n1_ * n2_) {
    throw DimensionError("protocol unitary must be " + dims(n1_ * n2_, n1_ * n2_) + ", got " +
                         dims(matrix_.rows(), matrix_.cols()));
  }
  if (frame_.input_order.size() != n1_ || frame_.sender_basis.rows() != n2_ ||
      frame_.sender_basis.cols() != n2_ || frame_.logical_dim == 0 ||
      frame_.logical_dim > n1_ || frame_.logical_dim > n2_) {
    throw DimensionError("protocol frame does not match " + dims(n1_, n2_));
  }
}

ProtocolUnitary ProtocolUnitary::from_matrix(std::size_t n1, std::size_t n2, ComplexMatrix matrix) {
  ProtocolFrame frame;
  frame.logical_dim = std::min(n1, n2);
  for (std::size_t i = 1; i <= n1; ++i) frame.input_order.push_back(i);
  frame.sender_basis = ComplexMatrix::identity(n2);
  return ProtocolUnitary(n1, n2, std::move(matrix), std::move(frame));
}

Complex ProtocolUnitary::b(std::size_t i, std::size_t j, std::size_t s, std::size_t t) const {
  if (i < 1 || i > n1_ || s < 1 || s > n1_ || j < 1 || j > n2_ || t < 1 || t > n2_) {
    throw IndexError("b index out of range");
  }
  return matrix_((s - 1) * n2_ + (t - 1), (i - 1) * n2_ + (j - 1));
}

ComplexMatrix ProtocolUnitary::canonical_matrix() const {
  return matrix_ * tensor(permutation_matrix(frame_.input_order), frame_.sender_basis);
}

// RecoveryFamily -------------------------------------------------------------

RecoveryFamily::RecoveryFamily(std::size_t n1, std::size_t n2, std::size_t n3,
                               std::vector<ComplexMatrix> ops, ComplexMatrix receiver_correction,
                               ComplexMatrix placement)
    : n1_(n1),
      n2_(n2),
      n3_(n3),
      ops_(std::move(ops)),
      receiver_correction_(std::move(receiver_correction)),
      placement_(std::move(placement)) {
  if (ops_.size() != n1_ * n2_) throw DimensionError("recovery family size mismatch");
  for (const ComplexMatrix& op : ops_) {
    if (op.rows() != n3_ || op.cols() != n3_) throw DimensionError("recovery operator size mismatch");
  }
}

const ComplexMatrix& RecoveryFamily::op(std::size_t i, std::size_t k) const {
  if (i < 1 || i > n1_ || k < 1 || k > n2_) {
    throw IndexError("recovery operator (" + std::to_string(i) + "," + std::to_string(k) +
                     ") outside 1.." + std::to_string(n1_) + " x 1.." + std::to_string(n2_));
  }
  return ops_[(i - 1) * n2_ + (k - 1)];
}

const ComplexMatrix& recovery_operator(const RecoveryFamily& family, std::size_t i, std::size_t k) {
  return family.op(i, k);
}

// Feasibility ----------------------------------------------------------------

FeasibilityVerdict feasibility(const ResourceMatrix& resource, std::size_t n1) {
  if (n1 == 0) throw DimensionError("teleported dimension must be positive");
  FeasibilityVerdict verdict;
  verdict.lambdas = schmidt(resource.coefficients()).lambdas;
  verdict.effective_dim = static_cast<std::size_t>(
      std::count_if(verdict.lambdas.begin(), verdict.lambdas.end(),
                    [](double l) { return l > kFeasibilityTol; }));
  if (verdict.effective_dim != n1) return verdict;
  const double target = 1.0 / static_cast<double>(n1);
  verdict.feasible = std::all_of(verdict.lambdas.begin(), verdict.lambdas.begin() + n1,
                                 [&](double l) { return std::abs(l - target) <= kFeasibilityTol; });
  return verdict;
}

// Protocol -------------------------------------------------------------------

StateVector Protocol::target(const StateVector& psi0) const {
  const std::size_t n1 = unitary.n1();
  if (psi0.dim() != n1) {
    throw DimensionError("input has dim " + std::to_string(psi0.dim()) + ", protocol expects " +
                         std::to_string(n1));
  }
  std::vector<bool> inside(n1 + 1, false);
  for (std::size_t s : input_support) inside[s] = true;
  for (std::size_t i = 1; i <= n1; ++i) {
    if (!inside[i] && std::abs(psi0[i - 1]) > kNumericTol) {
      throw ValidationError("input has weight on e_" + std::to_string(i) +
                            ", outside the teleported subspace");
    }
  }
  ComplexVector out(recovery.n3());
  for (std::size_t m = 0; m < input_support.size(); ++m) {
    out[output_support[m] - 1] = psi0[input_support[m] - 1];
  }
  return StateVector::normalized(std::move(out));
}

Protocol synthesize(const ResourceMatrix& resource, std::size_t n1, const PhaseTensor& c,
                    const SynthesisOptions& options) {
  const std::size_t n2 = resource.dim_sender();
  const std::size_t n3 = resource.dim_receiver();
  if (n1 == 0) throw DimensionError("input dimension must be positive");
  if (c.n1() != n1 || c.n2() != n2) {
    throw DimensionError("phase tensor is " + std::to_string(c.n1()) + "x" + std::to_string(c.n1()) +
                         "x" + std::to_string(c.n2()) + ", protocol needs " +
                         std::to_string(n1) + "x" + std::to_string(n1) + "x" +
                         std::to_string(n2));
  }

  std::vector<std::size_t> input_support = options.input_support;
  if (input_support.empty()) input_support = SupportInjection::identity(n1).targets;
  validate_support(input_support, n1, "input support");
  const std::size_t n = input_support.size();

  std::vector<std::size_t> output_support = options.output_support;
  if (output_support.empty()) {
    const bool fits = std::all_of(input_support.begin(), input_support.end(),
                                  [&](std::size_t s) { return s <= n3; });
    if (!fits) {
      throw ValidationError("input support does not fit in the receiver space (dim " +
                            std::to_string(n3) + "); an output support is required");
    }
    output_support = input_support;
  }
  if (output_support.size() != n) {
    throw ValidationError("output support has " + std::to_string(output_support.size()) +
                          " entries, input support has " + std::to_string(n));
  }
  validate_support(output_support, n3, "output support");

  FeasibilityVerdict verdict = feasibility(resource, n);
  if (options.enforce_feasibility && !verdict.feasible) {
    throw FeasibilityError("resource is not maximally entangled on a " + std::to_string(n) +
                               "-dimensional subspace",
                           verdict.lambdas);
  }
  if (n > std::min(n2, n3)) {
    throw DimensionError("resource " + dims(n2, n3) + " cannot carry dimension " +
                         std::to_string(n));
  }

  // Schmidt frame; a degenerate spectrum is pinned to the columns of L R^dagger.
  const SchmidtResult sd = schmidt(resource.coefficients());
  ComplexMatrix left = leading_columns(sd.left_basis, n);
  ComplexMatrix right = leading_columns(sd.right_basis, n);
  if (verdict.feasible) {
    const ComplexMatrix isometry = left * adjoint(right);
    left = pivoted_column_basis(isometry, n);
    right = adjoint(isometry) * left;
  }
  const ComplexMatrix sender_basis = orthonormal_completion(left);
  // Receiver's Schmidt partners are the conjugated right singular vectors.
  const ComplexMatrix receiver_basis = adjoint(orthonormal_completion(conjugate(right)));

  const std::vector<std::size_t> input_order = complete_order(input_support, n1);

  // Closed form in the canonical frame: for j <= n,
  //   U (e_i (x) f_j) = sum_s c(s,i,t)/sqrt(N1) e_s (x) f_t,  j = t + i - 1 (mod n);
  // the sender basis vectors outside the Schmidt support are left untouched.
  const double scale = 1.0 / std::sqrt(static_cast<double>(n1));
  ComplexMatrix canonical(n1 * n2, n1 * n2);
  for (std::size_t i = 1; i <= n1; ++i) {
    for (std::size_t j = 1; j <= n2; ++j) {
      const std::size_t col = (i - 1) * n2 + (j - 1);
      if (j > n) {
        canonical(col, col) = 1.0;
        continue;
      }
      const std::size_t t = index_mod(static_cast<std::int64_t>(j) - static_cast<std::int64_t>(i) + 1, n);
      for (std::size_t s = 1; s <= n1; ++s) {
        canonical((s - 1) * n2 + (t - 1), col) = scale * c(s, i, t);
      }
    }
  }
  const ComplexMatrix frame_change = tensor(permutation_matrix(input_order), sender_basis);
  ComplexMatrix u = canonical * adjoint(frame_change);

  // Receiver side: O_{st} = T C_{st} Pi_n^{-(t-1)} W.
  const ComplexMatrix placement = permutation_matrix(complete_order(output_support, n3));
  std::vector<ComplexMatrix> ops;
  ops.reserve(n1 * n2);
  for (std::size_t s = 1; s <= n1; ++s) {
    for (std::size_t t = 1; t <= n2; ++t) {
      const ComplexMatrix small_shift =
          cyclic_shift_power(n, -(static_cast<std::int64_t>(t) - 1));
      ComplexMatrix shift = ComplexMatrix::identity(n3);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t q = 0; q < n; ++q) shift(r, q) = small_shift(r, q);
      std::vector<Complex> diag(n3, 1.0);
      for (std::size_t m = 1; m <= n; ++m) diag[m - 1] = std::conj(c(s, m, t));
      ops.push_back(placement * ComplexMatrix::diagonal(diag) * shift * receiver_basis);
    }
  }

  ProtocolFrame frame{n, input_order, sender_basis, receiver_basis};
  return Protocol{
      ProtocolUnitary(n1, n2, std::move(u), std::move(frame)),
      RecoveryFamily(n1, n2, n3, std::move(ops), receiver_basis, placement),
      std::move(input_support),
      std::move(output_support),
      std::move(verdict),
  };
}

// Constraint residuals -------------------------------------------------------

namespace {

struct CanonicalView {
  std::size_t n1, n2, n3, n;
  ComplexMatrix u;  // canonical frame
  ComplexMatrix a;  // canonical frame
};

CanonicalView canonical_view(const ProtocolUnitary& u, const ResourceMatrix& resource,
                             const PhaseTensor& c) {
  const std::size_t n1 = u.n1();
  const std::size_t n2 = u.n2();
  const std::size_t n3 = resource.dim_receiver();
  if (resource.dim_sender() != n2) {
    throw DimensionError("resource sender dim " + std::to_string(resource.dim_sender()) +
                         " does not match protocol N2 = " + std::to_string(n2));
  }
  if (c.n1() != n1 || c.n2() != n2) throw DimensionError("phase tensor dims do not match protocol");
  const ProtocolFrame& frame = u.frame();
  ComplexMatrix w = frame.receiver_basis;
  if (w.rows() == 0) w = ComplexMatrix::identity(n3);
  if (w.rows() != n3 || w.cols() != n3) {
    throw DimensionError("protocol receiver frame does not match resource");
  }
  // Local changes of basis A (x) B act on the coefficient matrix as A a B^T.
  ComplexMatrix a = adjoint(frame.sender_basis) * resource.coefficients() * transpose(w);
  return {n1, n2, n3, frame.logical_dim, u.canonical_matrix(), std::move(a)};
}

}  // namespace

double condition_residual(const ProtocolUnitary& u, const ResourceMatrix& resource,
                          const PhaseTensor& c, const StateVector& psi0) {
  const CanonicalView v = canonical_view(u, resource, c);
  if (psi0.dim() != v.n1) {
    throw DimensionError("input dim " + std::to_string(psi0.dim()) + " does not match N1 = " +
                         std::to_string(v.n1));
  }
  ComplexVector alpha(v.n1);
  for (std::size_t m = 0; m < v.n1; ++m) alpha[m] = psi0[u.frame().input_order[m] - 1];

  // lhs[(s,t), k] = sum_{i,j} U[(s,t),(i,j)] alpha_i a_{jk}
  ComplexMatrix alpha_col(v.n1, 1, std::vector<Complex>(alpha.entries().begin(), alpha.entries().end()));
  const ComplexMatrix lhs = v.u * tensor(alpha_col, v.a);

  const double norm = 1.0 / std::sqrt(static_cast<double>(v.n1 * v.n));
  double worst = 0.0;
  for (std::size_t s = 1; s <= v.n1; ++s) {
    for (std::size_t t = 1; t <= v.n2; ++t) {
      for (std::size_t k = 1; k <= v.n3; ++k) {
        Complex rhs = 0.0;
        if (t <= v.n && k <= v.n) {
          const std::size_t r = index_mod(static_cast<std::int64_t>(k) - static_cast<std::int64_t>(t) + 1, v.n);
          rhs = alpha[r - 1] * c(s, r, t) * norm;
        }
        worst = std::max(worst, std::abs(lhs((s - 1) * v.n2 + (t - 1), k - 1) - rhs));
      }
    }
  }
  return worst;
}

double constraint_residual(const ProtocolUnitary& u, const ResourceMatrix& resource,
                           const PhaseTensor& c) {
  const CanonicalView v = canonical_view(u, resource, c);
  const double scale = std::sqrt(static_cast<double>(v.n1 * v.n));
  double worst = 0.0;
  for (std::size_t s = 1; s <= v.n1; ++s) {
    for (std::size_t j = 1; j <= v.n; ++j) {
      for (std::size_t t = 1; t <= v.n; ++t) {
        const std::size_t k = index_mod(static_cast<std::int64_t>(t + j) - 1, v.n);
        Complex sum = 0.0;
        for (std::size_t i = 1; i <= v.n2; ++i) {
          // b(j,i,s,t) in the canonical frame.
          sum += v.a(i - 1, k - 1) * v.u((s - 1) * v.n2 + (t - 1), (j - 1) * v.n2 + (i - 1));
        }
        worst = std::max(worst, std::abs(scale * sum - c(s, j, t)));
      }
    }
  }
  return worst;
}

}  // namespace qtp
