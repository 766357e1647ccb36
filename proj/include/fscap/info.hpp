#pragma once

#include "fscap/certified_real.hpp"
#include "fscap/law.hpp"

#include <span>
#include <vector>

namespace fscap {

// All information quantities are in bits. Precision arguments `m` request an
// enclosure of width at most 2^-m.

/// Shannon entropy of an exact pmf. Throws std::invalid_argument unless the
/// masses are in [0,1] and sum to exactly 1.
CertifiedReal entropy(std::span<const Rat> pmf, unsigned m);

/// h2(delta). Throws std::invalid_argument for delta outside [0,1].
CertifiedReal binary_entropy(const Rat& delta, unsigned m);

/// I(U;V|W) = H(U,W) + H(V,W) - H(W) - H(U,V,W) on marginals of `law`.
/// W may be empty. Throws std::invalid_argument on overlapping groups.
CertifiedReal conditional_mutual_information(const JointLaw& law, const std::vector<Var>& u,
                                             const std::vector<Var>& v, const std::vector<Var>& w,
                                             unsigned m);

/// Per-step terms I(X^t; Y_t | Y^{t-1}), t = 1..n, each to width 2^-m / n.
std::vector<CertifiedReal> directed_information_terms(const JointLaw& law, unsigned m);

/// I(X^n -> Y^n) = sum_t I(X^t; Y_t | Y^{t-1}), width at most 2^-m.
CertifiedReal directed_information(const UnifilarChannel& channel, const CausalPolicy& policy, unsigned n,
                                   unsigned m);
CertifiedReal directed_information(const JointLaw& law, unsigned m);

/// delta log2(|A|-1) + h2(delta). Throws std::invalid_argument unless
/// |A| >= 1 and 0 <= delta <= 1/2.
CertifiedReal fannes_bound(std::uint64_t alphabet_size, const Rat& delta, unsigned m);

/// Joint alphabet sizes of the four entropy terms of I(X^t; Y_t | Y^{t-1}):
/// (X^t, Y^{t-1}), (Y^t), (Y^{t-1}), (X^t, Y^t).
std::array<std::uint64_t, 4> cmi_alphabet_sizes(unsigned t);

/// omega_t(delta): sum of the four Fannes bounds. Throws
/// std::invalid_argument for delta > 1/2 or t outside 1..n.
CertifiedReal cmi_modulus(unsigned t, unsigned n, const Rat& delta, unsigned m);

/// Modulus actually charged per step by the solver: min(omega_t(delta), 1),
/// and 1 once delta > 1/2 (each step's term lies in [0, 1] for binary output).
CertifiedReal step_modulus(unsigned t, unsigned n, const Rat& delta, unsigned m);

}  // namespace fscap
