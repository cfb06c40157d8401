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

#include "errmargin/mixed_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>
#include <utility>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "errmargin/error.hpp"
#include "errmargin/weak_solver.hpp"

namespace errmargin {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kStatePsdTolerance = 1e-10;

// Qubit F^2 = (1 + r1.r2 + w)/2 with w = sqrt((1 - |r1|^2)(1 - |r2|^2)).
// 1 - F^2 = ((1 - r1.r2)^2 - w^2) / (2 (1 - r1.r2 + w)), and the numerator
// equals |r1 - r2|^2 - |r1 x r2|^2, which vanishes exactly for r1 = r2.
std::pair<double, double> qubit_fidelity_sq(const Vec3 &r1, const Vec3 &r2) {
    double a = r1.norm();
    double b = r2.norm();
    double w = std::sqrt(std::max(0.0, (1.0 - a) * (1.0 + a)) *
                         std::max(0.0, (1.0 - b) * (1.0 + b)));
    double c = r1.dot(r2);
    double s = std::max(0.0, 0.5 * (1.0 + c + w));
    double diff = (r1 - r2).norm();
    double cross = r1.cross(r2).norm();
    double denom = 2.0 * (1.0 - c + w);
    double t = denom > 0.0 ? std::max(0.0, (diff - cross) * (diff + cross) / denom) : 0.0;
    double total = s + t;
    return {s / total, t / total};
}
constexpr double kTraceTolerance = 1e-12;
// Eigenvalues this small are treated as exact zeros before square roots.
constexpr double kSqrtFloor = 1e-14;

using Matrix = Eigen::MatrixXcd;

Matrix to_eigen(const DensityMatrix &rho) {
    Matrix m(rho.dim(), rho.dim());
    for (int r = 0; r < rho.dim(); r++) {
        for (int c = 0; c < rho.dim(); c++) {
            m(r, c) = rho(r, c);
        }
    }
    return m;
}

Matrix psd_sqrt(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index k = 0; k < ev.size(); k++) {
        ev(k) = ev(k) <= kSqrtFloor ? 0.0 : std::sqrt(ev(k));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

[[noreturn]] void not_a_state(const std::string &why) {
    throw Error(ErrorCode::NotAState, why);
}

void require_dim(int dim) {
    if (dim < kMinDensityDim || dim > kMaxDensityDim) {
        std::ostringstream msg;
        msg << "density matrix dimension must be in [" << kMinDensityDim << ", " << kMaxDensityDim
            << "], got " << dim;
        throw Error(ErrorCode::DimensionUnsupported, msg.str());
    }
}

}  // namespace

DensityMatrix DensityMatrix::from_entries(int dim, std::vector<Complex> row_major) {
    require_dim(dim);
    if (row_major.size() != static_cast<size_t>(dim) * dim) {
        std::ostringstream msg;
        msg << "expected " << dim * dim << " entries, got " << row_major.size();
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    for (const auto &z : row_major) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            not_a_state("non-finite entry");
        }
    }
    Matrix m(dim, dim);
    for (int r = 0; r < dim; r++) {
        for (int c = 0; c < dim; c++) {
            m(r, c) = row_major[r * dim + c];
        }
    }
    double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kHermitianTolerance) {
        std::ostringstream msg;
        msg << "not Hermitian (max |rho - rho^dagger| = " << asym << ")";
        not_a_state(msg.str());
    }
    double tr = m.trace().real();
    if (std::abs(tr - 1.0) > kTraceTolerance) {
        std::ostringstream msg;
        msg << "trace is " << tr << ", expected 1";
        not_a_state(msg.str());
    }
    Matrix herm = 0.5 * (m + m.adjoint());
    double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(herm, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .minCoeff();
    if (min_eig < -kStatePsdTolerance) {
        std::ostringstream msg;
        msg << "not positive semidefinite (min eigenvalue " << min_eig << ")";
        not_a_state(msg.str());
    }
    return DensityMatrix(dim, std::move(row_major));
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
    int dim = static_cast<int>(psi.size());
    require_dim(dim);
    double n2 = 0.0;
    for (const auto &z : psi) {
        n2 += std::norm(z);
    }
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw Error(ErrorCode::NotNormalizable, "pure state vector has zero or non-finite norm");
    }
    std::vector<Complex> e(static_cast<size_t>(dim) * dim);
    for (int r = 0; r < dim; r++) {
        for (int c = 0; c < dim; c++) {
            e[r * dim + c] = psi[r] * std::conj(psi[c]) / n2;
        }
    }
    // Force exact Hermiticity on the diagonal.
    for (int r = 0; r < dim; r++) {
        e[r * dim + r] = Complex{e[r * dim + r].real(), 0.0};
    }
    return from_entries(dim, std::move(e));
}

DensityMatrix DensityMatrix::qubit(const Vec3 &r) {
    return from_entries(2, {Complex{0.5 * (1 + r.z)}, Complex{0.5 * r.x, -0.5 * r.y},
                            Complex{0.5 * r.x, 0.5 * r.y}, Complex{0.5 * (1 - r.z)}});
}

DensityMatrix DensityMatrix::from_json(const nlohmann::json &j) {
    try {
        int dim = j.at("dim").get<int>();
        require_dim(dim);
        const auto &re = j.at("re");
        const nlohmann::json im = j.contains("im") ? j.at("im") : nlohmann::json();
        auto check_shape = [dim](const nlohmann::json &rows, const char *name) {
            if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
                throw Error(ErrorCode::DimensionMismatch,
                            std::string("\"") + name + "\" must have dim rows");
            }
            for (const auto &row : rows) {
                if (!row.is_array() || static_cast<int>(row.size()) != dim) {
                    throw Error(ErrorCode::DimensionMismatch,
                                std::string("\"") + name + "\" rows must have dim entries");
                }
            }
        };
        check_shape(re, "re");
        if (!im.is_null()) {
            check_shape(im, "im");
        }
        std::vector<Complex> e(static_cast<size_t>(dim) * dim);
        for (int r = 0; r < dim; r++) {
            for (int c = 0; c < dim; c++) {
                double imag = im.is_null() ? 0.0 : im[r][c].get<double>();
                e[r * dim + c] = Complex{re[r][c].get<double>(), imag};
            }
        }
        return from_entries(dim, std::move(e));
    } catch (const nlohmann::json::exception &ex) {
        throw Error(ErrorCode::ParseError, ex.what());
    }
}

DensityMatrix DensityMatrix::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &ex) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + ex.what());
    }
    return from_json(j);
}

nlohmann::json DensityMatrix::to_json() const {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (int r = 0; r < dim_; r++) {
        nlohmann::json rr = nlohmann::json::array();
        nlohmann::json ri = nlohmann::json::array();
        for (int c = 0; c < dim_; c++) {
            rr.push_back((*this)(r, c).real());
            ri.push_back((*this)(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    return {{"dim", dim_}, {"re", re}, {"im", im}};
}

Vec3 DensityMatrix::bloch() const {
    if (dim_ != 2) {
        throw Error(ErrorCode::DimensionUnsupported, "Bloch vector needs a qubit state");
    }
    Mat2c m{{entries_[0], entries_[1], entries_[2], entries_[3]}};
    return hermitian_part(m).beta * 2.0;
}

MixedInstance make_mixed_instance(DensityMatrix rho1, DensityMatrix rho2, double eta1) {
    if (rho1.dim() != rho2.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "states have different dimensions");
    }
    if (!(eta1 > 0.0 && eta1 < 1.0)) {
        std::ostringstream msg;
        msg << "eta1 must lie strictly between 0 and 1, got " << eta1;
        throw Error(ErrorCode::DegeneratePrior, msg.str());
    }
    double f = 0.0;
    double s = 0.0;
    double t = 0.0;
    if (rho1.dim() == 2) {
        std::tie(s, t) = qubit_fidelity_sq(rho1.bloch(), rho2.bloch());
        f = std::sqrt(s);
    } else {
        f = fidelity(rho1, rho2);
        s = f * f;
        t = (1.0 - f) * (1.0 + f);
    }
    return {std::move(rho1), std::move(rho2), eta1, 1.0 - eta1, f, s, t};
}

double fidelity(const DensityMatrix &rho1, const DensityMatrix &rho2) {
    if (rho1.dim() != rho2.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "states have different dimensions");
    }
    if (rho1.dim() == 2) {
        return std::sqrt(qubit_fidelity_sq(rho1.bloch(), rho2.bloch()).first);
    }
    // Singular values of sqrt(rho1) sqrt(rho2) are the square roots of the
    // eigenvalues of sqrt(rho1) rho2 sqrt(rho1); taking them directly keeps
    // round-off in null directions from being amplified by a square root.
    Matrix a = psd_sqrt(to_eigen(rho1)) * psd_sqrt(to_eigen(rho2));
    Eigen::JacobiSVD<Matrix> svd(a);
    double f = svd.singularValues().sum();
    return std::clamp(f, 0.0, 1.0);
}

Domain mixed_domain(const MixedInstance &minst, double m) {
    require_margin(m);
    return classify_parameters(minst.eta1, minst.eta2, minst.fidelity_sq, m);
}

double upper_bound_mixed(const MixedInstance &minst, double m) {
    require_margin(m);
    return p_max_weak_parameters(minst.eta1, minst.eta2, minst.fidelity_sq, minst.infidelity_sq,
                                 m);
}

double helstrom_mixed(const MixedInstance &minst) {
    Matrix diff = minst.eta1 * to_eigen(minst.rho1) - minst.eta2 * to_eigen(minst.rho2);
    Matrix herm = 0.5 * (diff + diff.adjoint());
    Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Matrix>(herm, Eigen::EigenvaluesOnly).eigenvalues();
    return 0.5 * (1.0 + ev.cwiseAbs().sum());
}

double trace_fidelity_inequality_gap(const MixedInstance &minst) {
    double d = minst.eta1 - minst.eta2;
    // 1 - 4 eta1 eta2 F^2 = (eta1 - eta2)^2 + 4 eta1 eta2 (1 - F^2) for eta1 + eta2 = 1.
    double bound = std::sqrt(d * d + 4.0 * minst.eta1 * minst.eta2 * minst.infidelity_sq);
    return bound - (2.0 * helstrom_mixed(minst) - 1.0);
}

}  // namespace errmargin
