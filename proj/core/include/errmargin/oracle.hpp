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

#ifndef ERRMARGIN_ORACLE_HPP
#define ERRMARGIN_ORACLE_HPP

#include "errmargin/instance.hpp"
#include "errmargin/mixed_bounds.hpp"
#include "errmargin/weak_solver.hpp"

namespace errmargin {

// Brute-force maximisation of the success probability over explicitly
// parameterised qubit measurements. Nothing here uses the closed forms; the
// results are feasible points, hence lower bounds on the optimum.
//
// E1 = t1 (I + u1.sigma)/2, E2 = t2 (I + u2.sigma)/2, E3 = I - E1 - E2.
//
// Directions u1, u2 are searched in the plane spanned by the two Bloch
// vectors. Reflecting any E through that plane leaves every tr(E rho_a)
// unchanged and keeps it PSD, so averaging a measurement with its reflection
// gives an in-plane measurement with the same statistics. `full_bloch`
// searches the whole sphere instead, as a check of that reduction.
//
// For fixed directions the objective is nondecreasing in t2 and every
// constraint bounds t2 from above, so t2 is set to its largest feasible
// value. What remains is concave in t1 (the feasible weight set is convex)
// and is maximised by golden-section search.

struct SearchConfig {
    /// Angular samples per direction.
    int coarse_grid = 180;
    /// Pattern-search rounds; the step shrinks after each round.
    int refine_iters = 40;
    double refine_shrink = 0.5;
    /// Number of best grid cells used as refinement seeds.
    int seeds = 4;
    /// Golden-section iterations for the weight t1.
    int weight_iters = 64;
    /// Search full-sphere directions (two angles each) instead of the plane.
    bool full_bloch = false;
    /// Samples per angle in full-sphere mode.
    int full_bloch_grid = 24;
    int threads = 1;

    /// Throws InvalidConfig.
    void validate() const;
};

/// Feasibility tolerance on E3 eigenvalues and on the margin constraint.
inline constexpr double kOracleFeasibilityTolerance = 1e-12;

struct OracleResult {
    double p_best = 0.0;
    /// Best measurement, caller's label order.
    Povm3 povm;
    double weight1 = 0.0;
    double weight2 = 0.0;
};

/// Lower bound for a pair of qubit states given by Bloch vectors (|r| <= 1).
/// Rank-one E1, E2 only.
OracleResult oracle_qubit(const StatePair &states, double m, MarginKind kind,
                          const SearchConfig &cfg = {});

OracleResult oracle_pure_weak(const Instance &inst, double m, const SearchConfig &cfg = {});
OracleResult oracle_pure_strong(const Instance &inst, double m_s, const SearchConfig &cfg = {});

/// Best of the rank-one search and a search over measurements diagonal in a
/// common basis (which allows rank-two E1, E2). Qubits only.
double oracle_mixed_weak(const MixedInstance &minst, double m, const SearchConfig &cfg = {});

/// sum_mu sqrt(tr(rho1 E_mu) tr(rho2 E_mu)).
double classical_fidelity(const StatePair &states, const Povm3 &povm);
double classical_fidelity(const Instance &inst, const Povm3 &povm);

}  // namespace errmargin

#endif  // ERRMARGIN_ORACLE_HPP
