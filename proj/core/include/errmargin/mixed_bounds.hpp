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

#ifndef ERRMARGIN_MIXED_BOUNDS_HPP
#define ERRMARGIN_MIXED_BOUNDS_HPP

#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "errmargin/instance.hpp"
#include "errmargin/op2.hpp"

namespace errmargin {

inline constexpr int kMinDensityDim = 2;
inline constexpr int kMaxDensityDim = 8;

/// Validated density matrix of dimension 2..8 (Hermitian within 1e-12,
/// PSD within 1e-10, unit trace within 1e-12).
class DensityMatrix {
   public:
    /// Row-major entries. Throws DimensionUnsupported or NotAState.
    static DensityMatrix from_entries(int dim, std::vector<Complex> row_major);
    /// |psi><psi| for a nonzero vector (normalised here).
    static DensityMatrix pure(std::span<const Complex> psi);
    /// (I + r.sigma)/2 for |r| <= 1.
    static DensityMatrix qubit(const Vec3 &bloch);

    /// {"dim": n, "re": [[...]], "im": [[...]]}, row-major. "im" may be omitted.
    static DensityMatrix from_json(const nlohmann::json &j);
    static DensityMatrix load(const std::filesystem::path &path);
    nlohmann::json to_json() const;

    int dim() const { return dim_; }
    const Complex &operator()(int r, int c) const { return entries_[r * dim_ + c]; }
    const std::vector<Complex> &entries() const { return entries_; }

    /// Bloch vector; DimensionUnsupported unless dim() == 2.
    Vec3 bloch() const;

   private:
    DensityMatrix(int dim, std::vector<Complex> entries)
        : dim_(dim), entries_(std::move(entries)) {}
    int dim_;
    std::vector<Complex> entries_;
};

struct MixedInstance {
    DensityMatrix rho1;
    DensityMatrix rho2;
    double eta1;
    double eta2;
    double fidelity;
    /// F^2 and 1 - F^2, each computed without cancellation for qubits.
    double fidelity_sq;
    double infidelity_sq;
};

/// Throws DimensionMismatch or DegeneratePrior.
MixedInstance make_mixed_instance(DensityMatrix rho1, DensityMatrix rho2, double eta1);

/// tr sqrt(sqrt(rho1) rho2 sqrt(rho1)).
double fidelity(const DensityMatrix &rho1, const DensityMatrix &rho2);

/// Critical margins of the bound: the pure-state ones with S -> F^2.
Domain mixed_domain(const MixedInstance &minst, double m);

/// The pure-state optimum with |<phi1|phi2>| replaced by F. Covers the
/// minimum-error range too (Helstrom value with S -> F^2).
double upper_bound_mixed(const MixedInstance &minst, double m);

/// (1 + tr|eta1 rho1 - eta2 rho2|)/2.
double helstrom_mixed(const MixedInstance &minst);

/// sqrt(1 - 4 eta1 eta2 F^2) - tr|eta1 rho1 - eta2 rho2|; nonnegative.
double trace_fidelity_inequality_gap(const MixedInstance &minst);

}  // namespace errmargin

#endif  // ERRMARGIN_MIXED_BOUNDS_HPP
