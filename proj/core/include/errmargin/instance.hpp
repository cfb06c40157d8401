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

#ifndef ERRMARGIN_INSTANCE_HPP
#define ERRMARGIN_INSTANCE_HPP

#include <array>
#include <string_view>

#include "errmargin/op2.hpp"

namespace errmargin {

using State2 = std::array<Complex, 2>;

/// States with squared overlap above this are rejected as linearly dependent.
inline constexpr double kMaxOverlapSquared = 1.0 - 1e-10;

/// Two weighted qubit states in Bloch form. Shared currency between the
/// solver, the diagnostics and the brute-force search.
struct StatePair {
    double eta1 = 0.5;
    double eta2 = 0.5;
    Vec3 n1;
    Vec3 n2;

    Herm2 rho1() const { return {0.5, n1 * 0.5}; }
    Herm2 rho2() const { return {0.5, n2 * 0.5}; }
    /// Same problem with the two hypotheses relabelled.
    StatePair relabeled() const { return {eta2, eta1, n2, n1}; }
};

/// A canonicalised two-pure-state discrimination problem.
///
/// Internally the labels are ordered so that eta1 <= eta2 and the Bloch
/// vectors are n1 = (sqrt(T), 0, sqrt(S)), n2 = (-sqrt(T), 0, sqrt(S)).
/// `swapped()` records whether the caller's labels were exchanged to get
/// there; `caller()` undoes the exchange.
class Instance {
   public:
    double eta1() const { return eta1_; }
    double eta2() const { return eta2_; }
    /// |<phi1|phi2>|^2
    double S() const { return s_; }
    /// 1 - S, computed without cancellation.
    double T() const { return t_; }
    /// |<phi1|phi2>|
    double overlap() const { return overlap_; }
    const Vec3 &n1() const { return n1_; }
    const Vec3 &n2() const { return n2_; }
    bool swapped() const { return swapped_; }

    /// Internal ordering (eta1 <= eta2).
    StatePair internal() const { return {eta1_, eta2_, n1_, n2_}; }
    /// Caller's ordering, in the same canonical Bloch frame.
    StatePair caller() const { return swapped_ ? internal().relabeled() : internal(); }
    double caller_eta1() const { return swapped_ ? eta2_ : eta1_; }

    /// Canonical state vectors in caller label order; <psi1|psi2> = sqrt(S).
    const State2 &psi1() const { return psi1_; }
    const State2 &psi2() const { return psi2_; }

    /// Unitary taking the canonical frame to the frame the states were given
    /// in (identity for instances built from an overlap).
    const Mat2c &frame() const { return frame_; }
    Herm2 to_input_frame(const Herm2 &h) const { return conjugate(frame_, h); }

    friend Instance canonicalize(const State2 &psi1, const State2 &psi2, double eta1);
    friend Instance instance_from_overlap(double eta1, double overlap);

   private:
    Instance() = default;
    void init_canonical(double eta1_caller, double s, double t, double overlap);

    double eta1_ = 0.5;
    double eta2_ = 0.5;
    double s_ = 0.0;
    double t_ = 1.0;
    double overlap_ = 0.0;
    Vec3 n1_;
    Vec3 n2_;
    bool swapped_ = false;
    State2 psi1_{};
    State2 psi2_{};
    Mat2c frame_ = Mat2c::identity();
};

/// Normalises the states, fixes phases and rotates them into the canonical
/// frame. Throws NotNormalizable, LinearlyDependent or DegeneratePrior.
Instance canonicalize(const State2 &psi1, const State2 &psi2, double eta1);

/// Instance with prescribed |<phi1|phi2>| in [0, 1).
Instance instance_from_overlap(double eta1, double overlap);

enum class DomainTag { MinimumError, Intermediate, SingleState };

std::string_view to_string(DomainTag tag);

struct Domain {
    DomainTag tag = DomainTag::MinimumError;
    double m_c = 0.0;
    double m_c_prime = 0.0;
};

/// Mean error of the minimum-error measurement, (1 - sqrt(1 - 4 eta1 eta2 S))/2.
/// Valid for any S in [0, 1]; symmetric in the priors.
double critical_margin(double eta1, double eta2, double s);

/// Upper edge of the single-state domain. Expects eta1 <= eta2; returns 0
/// when eta1 >= eta2 S.
double single_state_margin(double eta1, double eta2, double s);

/// Classification on raw parameters (eta1 <= eta2, S in [0, 1]).
Domain classify_parameters(double eta1, double eta2, double s, double m);

/// Throws MarginOutOfRange unless 0 <= m <= 1.
Domain classify(const Instance &inst, double m);

void require_margin(double m);

}  // namespace errmargin

#endif  // ERRMARGIN_INSTANCE_HPP
