// Copyright 2026 The errmargin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ERRMARGIN_WEAK_SOLVER_HPP
#define ERRMARGIN_WEAK_SOLVER_HPP

#include <array>
#include <optional>
#include <string_view>

#include "errmargin/instance.hpp"
#include "errmargin/op2.hpp"

namespace errmargin {

/// Tolerance on Frobenius norms of the complementary-slackness products.
inline constexpr double kSlacknessTolerance = 1e-10;
/// Outcomes with probability below this have undefined conditionals.
inline constexpr double kOutcomeProbabilityFloor = 1e-14;

/// Which error constraint a margin refers to: the mean error probability
/// (Weak) or each conditional error probability (Strong).
enum class MarginKind { Weak, Strong };

std::string_view to_string(MarginKind kind);

/// Three-outcome measurement (E1, E2, E3). E1 and E2 name states 1 and 2,
/// E3 is the inconclusive outcome.
struct Povm3 {
    Herm2 e1;
    Herm2 e2;
    Herm2 e3;

    Herm2 sum() const { return e1 + e2 + e3; }
    Povm3 relabeled() const { return {e2, e1, e3}; }
};

struct PovmReport {
    double min_eigenvalue = 0.0;           // smallest eigenvalue over E1..E3
    double completeness_residual = 0.0;    // max entry of |E1+E2+E3 - I|
    double max_rank_defect = 0.0;          // largest smaller-eigenvalue among E1..E3
    bool ok(double tol = kPsdTolerance) const;
};

/// Positivity, completeness and the rank <= 1 structure of optimal elements.
/// `allow_full_rank_e3` accepts a rank-2 inconclusive element (feasible but
/// never optimal).
PovmReport check_povm(const Povm3 &povm, bool allow_full_rank_e3 = false);

/// Dual pair (Y, y) bounding every feasible success probability by
/// tr Y + m y.
///
/// At m = 0 no finite pair is tight; the certificate is then `limiting`: y is
/// +infinity, Y is the limit of the optimal family, and `value` is tr Y.
struct Certificate {
    Herm2 Y;
    double y = 0.0;
    double m = 0.0;
    double value = 0.0;
    bool limiting = false;
};

struct Diagnostics {
    double p_success = 0.0;
    double p_error = 0.0;
    /// joint[a][mu] = eta_a tr(E_mu rho_a)
    std::array<std::array<double, 3>, 2> joint{};
    /// P(E_mu)
    std::array<double, 3> outcome_probs{};
    /// P(rho2 | E1); empty when P(E1) is negligible.
    std::optional<double> cond_err_1;
    /// P(rho1 | E2); empty when P(E2) is negligible.
    std::optional<double> cond_err_2;
    /// P(rho1 | E3), P(rho2 | E3); empty when P(E3) is negligible.
    std::optional<double> inconclusive_given_1;
    std::optional<double> inconclusive_given_2;
};

Diagnostics diagnostics(const StatePair &states, const Povm3 &povm);

struct CertificateReport {
    double min_eig_y = 0.0;   // Y >= 0
    double min_eig_y1 = 0.0;  // Y - (eta1 rho1 - y eta2 rho2) >= 0
    double min_eig_y2 = 0.0;  // Y - (eta2 rho2 - y eta1 rho1) >= 0
    double multiplier = 0.0;  // y >= 0
    double slack_e1 = 0.0;    // |E1 Y1|_F
    double slack_e2 = 0.0;    // |E2 Y2|_F
    double slack_e3 = 0.0;    // |E3 Y|_F
    double slack_margin = 0.0;  // |y (m - p_error)|
    double duality_gap = 0.0;   // |p_success - value|
    double margin_excess = 0.0;  // p_error - m

    double worst_feasibility() const;
    double worst_slackness() const;
    bool ok(double feasibility_tol = kPsdTolerance, double slack_tol = kSlacknessTolerance) const;
};

/// Verifies dual feasibility, complementary slackness and the duality gap of
/// `cert` against `povm`. For limiting certificates feasibility is checked in
/// closure form (compressions onto the orthogonal complements of the states)
/// and slackness as E1 rho2 = E2 rho1 = E3 Y = 0.
CertificateReport check_certificate(const StatePair &states, const Povm3 &povm,
                                    const Certificate &cert);

struct Solution {
    MarginKind kind = MarginKind::Weak;
    Domain domain;
    /// Margin as requested, in the scheme named by `kind`.
    double margin = 0.0;
    /// Mean-error margin the measurement was constructed for.
    double weak_margin = 0.0;
    double p_max = 0.0;
    /// Caller's label order, canonical Bloch frame.
    Povm3 povm;
    Certificate cert;
    Diagnostics diag;
    double trace_e1 = 0.0;
};

/// Optimal success probability under the mean-error margin on raw
/// parameters: priors (either order), S = |<phi1|phi2>|^2 in [0, 1] and
/// T = 1 - S. S = 1 is allowed here (it is needed by the mixed-state bound).
double p_max_weak_parameters(double eta1, double eta2, double s, double t, double m);

/// Throws MarginOutOfRange unless 0 <= m <= 1.
double p_max_weak(const Instance &inst, double m);

/// Measurement and certificate in the internal label order (eta1 <= eta2).
struct Construction {
    Povm3 povm;
    Certificate cert;
};

Construction build_min_error(const Instance &inst);
/// Requires m_c' <= m <= m_c and m > 0.
Construction build_intermediate(const Instance &inst, double m);
/// m = 0 with eta1 >= eta2 S: the unambiguous measurement, limiting certificate.
Construction build_unambiguous(const Instance &inst);
/// Requires eta1 <= eta2 S and 0 <= m <= m_c'.
Construction build_single_state(const Instance &inst, double m);

Solution solve_weak(const Instance &inst, double m);

/// Dual operator of the intermediate construction for a given multiplier
/// y > 1, before y is optimised.
struct IntermediateDual {
    double alpha = 0.0;
    Vec3 beta;
    Vec3 a1;  // eta1 n1 - y eta2 n2
    Vec3 a2;  // eta2 n2 - y eta1 n1
    double y = 0.0;
    Herm2 Y() const { return {alpha, beta}; }
};

IntermediateDual intermediate_dual(const Instance &inst, double y);
/// Multiplier minimising tr Y + m y: 1 + sqrt(1 - 2 sqrt(eta1 eta2 S)) / sqrt(m).
double intermediate_multiplier(const Instance &inst, double m);
/// Unnormalised weights c1, c2, c3 of the linear relation among beta_mu.
std::array<double, 3> intermediate_coefficients(const Instance &inst, double m);

/// Spectral data of eta2 rho2 - y eta1 rho1 used in the single-state domain.
struct SingleStateDual {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    Vec3 f;
    double y = 0.0;
    Herm2 Y() const { return Herm2::projector(f) * lambda_plus; }
};

SingleStateDual single_state_dual(const Instance &inst, double y);
/// Multiplier enforcing p_error = m for 0 < m <= m_c'.
double single_state_multiplier(const Instance &inst, double m);

}  // namespace errmargin

#endif  // ERRMARGIN_WEAK_SOLVER_HPP
