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

#ifndef ERRMARGIN_STRONG_MARGIN_HPP
#define ERRMARGIN_STRONG_MARGIN_HPP

#include "errmargin/instance.hpp"
#include "errmargin/weak_solver.hpp"

namespace errmargin {

// Strong margin: P(rho2|E1) <= m and P(rho1|E2) <= m. The optimal measurement
// for strong margin mS is the weak-margin optimum at
//   mW = mS pS(mS) / (1 - mS),  equivalently  mS = mW / (pW(mW) + mW),
// and the two optimal success probabilities coincide.

/// Upper edge of the strong single-state domain (eta1 <= eta2 expected).
double strong_single_state_margin(double eta1, double eta2, double s);

/// Domain boundaries for the strong scheme. m_c coincides with the weak one.
Domain classify_strong_parameters(double eta1, double eta2, double s, double m);
Domain classify_strong(const Instance &inst, double m_s);

/// Closed form on raw parameters; priors in either order.
double p_max_strong_parameters(double eta1, double eta2, double s, double t, double m);
double p_max_strong(const Instance &inst, double m_s);

/// mS pS(mS) / (1 - mS), capped at 1 (the cap is only reached inside the
/// minimum-error domain). Throws MarginOutOfRange unless 0 <= mS < 1.
double weak_margin_of_strong(const Instance &inst, double m_s);

/// mW / (pW(mW) + mW), in [0, 1).
double strong_margin_of_weak(const Instance &inst, double m_w);

/// Weak solution at the converted margin, relabelled as a strong solution.
Solution solve_strong(const Instance &inst, double m_s);

/// Solves with the requested scheme.
Solution solve(const Instance &inst, double margin, MarginKind kind);

}  // namespace errmargin

#endif  // ERRMARGIN_STRONG_MARGIN_HPP
