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

#include "errmargin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "errmargin/error.hpp"

namespace errmargin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvGolden = 0.6180339887498949;
constexpr double kBlochTolerance = 1e-12;

struct Problem {
    double eta1;
    double eta2;
    Vec3 r1;
    Vec3 r2;
    double m;
    MarginKind kind;
};

struct Weights {
    double value = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
};

/// tr(rho P(u)) for rho = (I + r.sigma)/2.
double overlap_prob(const Vec3 &r, const Vec3 &u) { return 0.5 * (1.0 + r.dot(u)); }

/// Largest t2 with I - t1 P(u1) - t2 P(u2) >= 0 and t2 <= 1.
/// det = 1 - t1 - t2 + t1 t2 (1 - c), c = tr P(u1) P(u2).
double t2_psd(double t1, double c) {
    double denom = (1.0 - t1) + t1 * c;
    if (denom <= 0.0) {
        return 1.0;
    }
    return std::clamp((1.0 - t1) / denom, 0.0, 1.0);
}

/// Maximises a concave f on [lo, hi]; returns the argmax.
template <typename F>
double golden_max(F f, double lo, double hi, int iters) {
    double a = lo;
    double b = hi;
    double x1 = b - kInvGolden * (b - a);
    double x2 = a + kInvGolden * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int k = 0; k < iters && b - a > 0.0; k++) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvGolden * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvGolden * (b - a);
            f1 = f(x1);
        }
    }
    double best = 0.5 * (a + b);
    double fbest = f(best);
    for (double cand : {lo, hi}) {
        double fc = f(cand);
        if (fc > fbest) {
            fbest = fc;
            best = cand;
        }
    }
    return best;
}

Weights solve_weights(const Problem &p, const Vec3 &u1, const Vec3 &u2, int iters) {
    double a1 = p.eta1 * overlap_prob(p.r1, u1);
    double e1 = p.eta2 * overlap_prob(p.r2, u1);
    double a2 = p.eta2 * overlap_prob(p.r2, u2);
    double e2 = p.eta1 * overlap_prob(p.r1, u2);
    // (1 + u1.u2)/2 without cancellation for nearly opposite directions.
    Vec3 sum = u1 + u2;
    double c = std::clamp(0.25 * sum.dot(sum), 0.0, 1.0);

    if (p.kind == MarginKind::Strong) {
        auto allowed = [&](double good, double bad) {
            double tot = good + bad;
            return tot <= 0.0 || bad <= p.m * tot + kOracleFeasibilityTolerance * tot;
        };
        bool ok1 = allowed(a1, e1);
        bool ok2 = allowed(a2, e2);
        if (ok1 && ok2) {
            auto g = [&](double t1) { return a1 * t1 + a2 * t2_psd(t1, c); };
            double t1 = golden_max(g, 0.0, 1.0, iters);
            double t2 = t2_psd(t1, c);
            return {a1 * t1 + a2 * t2, t1, t2};
        }
        if (ok1) {
            return {a1, 1.0, 0.0};
        }
        if (ok2) {
            return {a2, 0.0, 1.0};
        }
        return {};
    }

    double t1_max = e1 > 0.0 ? std::min(1.0, p.m / e1) : 1.0;
    auto t2_of = [&](double t1) {
        double t2 = t2_psd(t1, c);
        if (e2 > 0.0) {
            t2 = std::min(t2, (p.m - e1 * t1) / e2);
        }
        return std::max(t2, 0.0);
    };
    auto g = [&](double t1) { return a1 * t1 + a2 * t2_of(t1); };
    double t1 = golden_max(g, 0.0, t1_max, iters);
    double t2 = t2_of(t1);
    return {a1 * t1 + a2 * t2, t1, t2};
}

/// Maps search coordinates to the two measurement directions.
class Directions {
   public:
    Directions(const Problem &p, bool full) : full_(full) {
        // Orthonormal basis of a plane containing r1 and r2.
        Vec3 a = p.r1.norm() > kBlochTolerance ? p.r1 : p.r2;
        if (a.norm() <= kBlochTolerance) {
            a = {0.0, 0.0, 1.0};
        }
        ea_ = a / a.norm();
        Vec3 other = p.r1.norm() > kBlochTolerance ? p.r2 : Vec3{};
        Vec3 b = other - ea_ * other.dot(ea_);
        if (b.norm() <= 1e-9) {
            // Pick any direction orthogonal to ea_.
            Vec3 trial = std::abs(ea_.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
            b = trial - ea_ * trial.dot(ea_);
        }
        eb_ = b / b.norm();
    }

    int dims() const { return full_ ? 4 : 2; }

    Vec3 plane(double theta) const { return ea_ * std::cos(theta) + eb_ * std::sin(theta); }

    static Vec3 sphere(double polar, double azimuth) {
        double s = std::sin(polar);
        return {s * std::cos(azimuth), s * std::sin(azimuth), std::cos(polar)};
    }

    std::pair<Vec3, Vec3> operator()(const std::array<double, 4> &x) const {
        if (full_) {
            return {sphere(x[0], x[1]), sphere(x[2], x[3])};
        }
        return {plane(x[0]), plane(x[1])};
    }

   private:
    bool full_;
    Vec3 ea_;
    Vec3 eb_;
};

struct Candidate {
    double value = -std::numeric_limits<double>::infinity();
    std::array<double, 4> x{};
};

void keep_top(std::vector<Candidate> &top, const Candidate &c, size_t k) {
    if (top.size() < k) {
        top.push_back(c);
    } else if (c.value > top.back().value) {
        top.back() = c;
    } else {
        return;
    }
    std::sort(top.begin(), top.end(),
              [](const Candidate &l, const Candidate &r) { return l.value > r.value; });
}

std::vector<Candidate> coarse_search(const Problem &p, const Directions &dirs,
                                     const SearchConfig &cfg) {
    const bool full = cfg.full_bloch;
    const int n = full ? cfg.full_bloch_grid : cfg.coarse_grid;
    const size_t k = static_cast<size_t>(cfg.seeds);
    auto coord = [&](int axis, int i) {
        if (!full) {
            return kTwoPi * i / n;
        }
        return axis % 2 == 0 ? std::numbers::pi * (i + 0.5) / n : kTwoPi * i / n;
    };

    auto scan_rows = [&](int row_begin, int row_end, std::vector<Candidate> &top) {
        int inner = full ? n * n * n : n;
        for (int i = row_begin; i < row_end; i++) {
            for (int j = 0; j < inner; j++) {
                Candidate c;
                c.x[0] = coord(0, i);
                if (full) {
                    c.x[1] = coord(1, j / (n * n));
                    c.x[2] = coord(2, (j / n) % n);
                    c.x[3] = coord(3, j % n);
                } else {
                    c.x[1] = coord(1, j);
                }
                auto [u1, u2] = dirs(c.x);
                c.value = solve_weights(p, u1, u2, cfg.weight_iters).value;
                keep_top(top, c, k);
            }
        }
    };

    int threads = std::clamp(cfg.threads, 1, n);
    std::vector<std::vector<Candidate>> tops(threads);
    if (threads == 1) {
        scan_rows(0, n, tops[0]);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; t++) {
            int lo = n * t / threads;
            int hi = n * (t + 1) / threads;
            pool.emplace_back([&, lo, hi, t] { scan_rows(lo, hi, tops[t]); });
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    std::vector<Candidate> merged;
    for (const auto &top : tops) {
        for (const auto &c : top) {
            keep_top(merged, c, k);
        }
    }
    return merged;
}

Candidate refine(const Problem &p, const Directions &dirs, const SearchConfig &cfg,
                 Candidate start) {
    const int d = dirs.dims();
    std::array<double, 4> step{};
    const int n = cfg.full_bloch ? cfg.full_bloch_grid : cfg.coarse_grid;
    for (int a = 0; a < d; a++) {
        step[a] = (cfg.full_bloch && a % 2 == 0 ? std::numbers::pi : kTwoPi) / n;
    }
    int moves = 1;
    for (int a = 0; a < d; a++) {
        moves *= 3;
    }
    Candidate best = start;
    for (int round = 0; round < cfg.refine_iters; round++) {
        for (int walk = 0; walk < 64; walk++) {
            Candidate next = best;
            for (int code = 0; code < moves; code++) {
                Candidate c = best;
                int rest = code;
                bool moved = false;
                for (int a = 0; a < d; a++) {
                    int dir = rest % 3 - 1;
                    rest /= 3;
                    c.x[a] += dir * step[a];
                    moved = moved || dir != 0;
                }
                if (!moved) {
                    continue;
                }
                auto [u1, u2] = dirs(c.x);
                c.value = solve_weights(p, u1, u2, cfg.weight_iters).value;
                if (c.value > next.value) {
                    next = c;
                }
            }
            if (!(next.value > best.value)) {
                break;
            }
            best = next;
        }
        for (int a = 0; a < d; a++) {
            step[a] *= cfg.refine_shrink;
        }
    }
    return best;
}

void validate_pair(const StatePair &s) {
    if (!(s.eta1 > 0.0 && s.eta2 > 0.0) || std::abs(s.eta1 + s.eta2 - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "priors must be positive and sum to 1, got " << s.eta1 << ", " << s.eta2;
        throw Error(ErrorCode::DegeneratePrior, msg.str());
    }
    for (const Vec3 *r : {&s.n1, &s.n2}) {
        if (!r->is_finite() || r->norm() > 1.0 + kBlochTolerance) {
            throw Error(ErrorCode::NotAState, "Bloch vector must have norm at most 1");
        }
    }
}

Povm3 make_povm(const Vec3 &u1, const Vec3 &u2, double t1, double t2) {
    Herm2 e1 = Herm2::projector(u1) * t1;
    Herm2 e2 = Herm2::projector(u2) * t2;
    return {e1, e2, Herm2::identity() - e1 - e2};
}

bool feasible(const Problem &p, const StatePair &states, const Povm3 &povm) {
    if (eigs(povm.e3).lower < -kOracleFeasibilityTolerance) {
        return false;
    }
    Diagnostics d = diagnostics(states, povm);
    if (p.kind == MarginKind::Weak) {
        return d.p_error <= p.m + kOracleFeasibilityTolerance;
    }
    auto within = [&](const std::optional<double> &cond) {
        return !cond || *cond <= p.m + kOracleFeasibilityTolerance;
    };
    return within(d.cond_err_1) && within(d.cond_err_2);
}

/// Best weak-margin measurement diagonal in the basis {P(u), P(-u)}; a
/// four-variable linear program solved by enumerating vertices.
struct DiagonalResult {
    double value = -std::numeric_limits<double>::infinity();
    std::array<double, 4> x{};
};

DiagonalResult diagonal_lp(const Problem &p, const Vec3 &u) {
    // x = (E1 on P(u), E1 on P(-u), E2 on P(u), E2 on P(-u)).
    double p1[2] = {overlap_prob(p.r1, u), overlap_prob(p.r1, -u)};
    double p2[2] = {overlap_prob(p.r2, u), overlap_prob(p.r2, -u)};
    Eigen::Vector4d obj(p.eta1 * p1[0], p.eta1 * p1[1], p.eta2 * p2[0], p.eta2 * p2[1]);

    // Rows of A x <= b.
    Eigen::Matrix<double, 7, 4> a = Eigen::Matrix<double, 7, 4>::Zero();
    Eigen::Matrix<double, 7, 1> b = Eigen::Matrix<double, 7, 1>::Zero();
    for (int i = 0; i < 4; i++) {
        a(i, i) = -1.0;
    }
    a(4, 0) = a(4, 2) = 1.0;
    b(4) = 1.0;
    a(5, 1) = a(5, 3) = 1.0;
    b(5) = 1.0;
    a.row(6) << p.eta2 * p2[0], p.eta2 * p2[1], p.eta1 * p1[0], p.eta1 * p1[1];
    b(6) = p.m;

    DiagonalResult best;
    std::array<int, 4> rows{};
    for (rows[0] = 0; rows[0] < 7; rows[0]++) {
        for (rows[1] = rows[0] + 1; rows[1] < 7; rows[1]++) {
            for (rows[2] = rows[1] + 1; rows[2] < 7; rows[2]++) {
                for (rows[3] = rows[2] + 1; rows[3] < 7; rows[3]++) {
                    Eigen::Matrix4d sub;
                    Eigen::Vector4d rhs;
                    for (int k = 0; k < 4; k++) {
                        sub.row(k) = a.row(rows[k]);
                        rhs(k) = b(rows[k]);
                    }
                    Eigen::FullPivLU<Eigen::Matrix4d> lu(sub);
                    if (!lu.isInvertible()) {
                        continue;
                    }
                    Eigen::Vector4d x = lu.solve(rhs);
                    if (((a * x - b).array() > kOracleFeasibilityTolerance).any()) {
                        continue;
                    }
                    double v = obj.dot(x);
                    if (v > best.value) {
                        best.value = v;
                        for (int k = 0; k < 4; k++) {
                            best.x[k] = std::max(x(k), 0.0);
                        }
                    }
                }
            }
        }
    }
    return best;
}

double diagonal_search(const Problem &p, const SearchConfig &cfg) {
    Directions dirs(p, false);
    const int n = 2 * cfg.coarse_grid;
    double best_theta = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; i++) {
        double theta = kTwoPi * i / n;
        double v = diagonal_lp(p, dirs.plane(theta)).value;
        if (v > best) {
            best = v;
            best_theta = theta;
        }
    }
    double step = kTwoPi / n;
    for (int round = 0; round < cfg.refine_iters; round++) {
        for (int walk = 0; walk < 64; walk++) {
            bool improved = false;
            for (double cand : {best_theta - step, best_theta + step}) {
                double v = diagonal_lp(p, dirs.plane(cand)).value;
                if (v > best) {
                    best = v;
                    best_theta = cand;
                    improved = true;
                }
            }
            if (!improved) {
                break;
            }
        }
        step *= cfg.refine_shrink;
    }
    return best;
}

}  // namespace

void SearchConfig::validate() const {
    auto fail = [](const std::string &what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (coarse_grid < 8) {
        fail("coarse_grid must be at least 8");
    }
    if (refine_iters < 0) {
        fail("refine_iters must be nonnegative");
    }
    if (!(refine_shrink > 0.0 && refine_shrink < 1.0)) {
        fail("refine_shrink must lie in (0, 1)");
    }
    if (seeds < 1) {
        fail("seeds must be positive");
    }
    if (weight_iters < 1) {
        fail("weight_iters must be positive");
    }
    if (full_bloch_grid < 4) {
        fail("full_bloch_grid must be at least 4");
    }
    if (threads < 1) {
        fail("threads must be positive");
    }
}

OracleResult oracle_qubit(const StatePair &states, double m, MarginKind kind,
                          const SearchConfig &cfg) {
    cfg.validate();
    validate_pair(states);
    require_margin(m);
    Problem p{states.eta1, states.eta2, states.n1, states.n2, m, kind};
    Directions dirs(p, cfg.full_bloch);

    Candidate best;
    for (const Candidate &seed : coarse_search(p, dirs, cfg)) {
        Candidate c = refine(p, dirs, cfg, seed);
        if (c.value > best.value) {
            best = c;
        }
    }
    auto [u1, u2] = dirs(best.x);
    Weights w = solve_weights(p, u1, u2, cfg.weight_iters);
    OracleResult out;
    out.povm = make_povm(u1, u2, w.t1, w.t2);
    out.weight1 = w.t1;
    out.weight2 = w.t2;
    if (!feasible(p, states, out.povm)) {
        // Round-off pushed the best point outside the feasible set; fall back
        // to the trivial measurement rather than report an infeasible value.
        out.povm = {Herm2::zero(), Herm2::zero(), Herm2::identity()};
        out.weight1 = out.weight2 = 0.0;
    }
    out.p_best = diagnostics(states, out.povm).p_success;
    return out;
}

OracleResult oracle_pure_weak(const Instance &inst, double m, const SearchConfig &cfg) {
    return oracle_qubit(inst.caller(), m, MarginKind::Weak, cfg);
}

OracleResult oracle_pure_strong(const Instance &inst, double m_s, const SearchConfig &cfg) {
    return oracle_qubit(inst.caller(), m_s, MarginKind::Strong, cfg);
}

double oracle_mixed_weak(const MixedInstance &minst, double m, const SearchConfig &cfg) {
    if (minst.rho1.dim() != 2 || minst.rho2.dim() != 2) {
        throw Error(ErrorCode::DimensionUnsupported, "the search covers qubit states only");
    }
    StatePair states{minst.eta1, minst.eta2, minst.rho1.bloch(), minst.rho2.bloch()};
    double rank_one = oracle_qubit(states, m, MarginKind::Weak, cfg).p_best;
    Problem p{states.eta1, states.eta2, states.n1, states.n2, m, MarginKind::Weak};
    return std::max(rank_one, diagonal_search(p, cfg));
}

double classical_fidelity(const StatePair &states, const Povm3 &povm) {
    Herm2 rho1 = states.rho1();
    Herm2 rho2 = states.rho2();
    double sum = 0.0;
    for (const Herm2 *e : {&povm.e1, &povm.e2, &povm.e3}) {
        double q1 = std::max(trace_product(rho1, *e), 0.0);
        double q2 = std::max(trace_product(rho2, *e), 0.0);
        sum += std::sqrt(q1 * q2);
    }
    return sum;
}

double classical_fidelity(const Instance &inst, const Povm3 &povm) {
    return classical_fidelity(inst.caller(), povm);
}

}  // namespace errmargin
