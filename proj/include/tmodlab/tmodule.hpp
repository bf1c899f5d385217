#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "tmodlab/errors.hpp"
#include "tmodlab/laurent.hpp"
#include "tmodlab/matrix.hpp"

// Twisted polynomial rings over the Laurent field, the * anti-isomorphism
// between the tau and sigma sides, t-modules, and the exponential/logarithm
// coefficient solvers.

namespace tmodlab {

enum class Side { Tau, Sigma };

// sum B_i tau^i (or sigma^i) with matrix coefficients; tau c = c^q tau,
// sigma c = c^{1/q} sigma.
class TwistedPoly {
public:
    TwistedPoly() = default;
    TwistedPoly(Side side, std::vector<Mat<LaurentElem>> coeffs)
        : side_(side), c_(std::move(coeffs)) {
        if (c_.empty()) throw ConfigError("TwistedPoly: empty coefficient list");
        for (const auto& m : c_)
            if (m.rows() != c_[0].rows() || m.cols() != c_[0].cols())
                throw DimMismatch("TwistedPoly: ragged coefficient list");
        trim();
    }

    static TwistedPoly identity(Side side, std::size_t d, const FieldCtx& ctx) {
        return TwistedPoly(side, {Mat<LaurentElem>::identity(d, LaurentElem::zero(ctx),
                                                             LaurentElem::one(ctx))});
    }

    Side side() const { return side_; }
    std::size_t rows() const { return c_[0].rows(); }
    std::size_t cols() const { return c_[0].cols(); }
    long long degree() const { return static_cast<long long>(c_.size()) - 1; }
    const std::vector<Mat<LaurentElem>>& coeffs() const { return c_; }
    const Mat<LaurentElem>& coeff(std::size_t i) const { return c_.at(i); }
    const Mat<LaurentElem>& dpart() const { return c_[0]; }

    Mat<LaurentElem> coeff_or_zero(std::size_t i, const FieldCtx& ctx) const {
        if (i < c_.size()) return c_[i];
        return Mat<LaurentElem>(rows(), cols(), LaurentElem::zero(ctx));
    }

    TwistedPoly operator+(const TwistedPoly& o) const {
        require_side(o);
        std::vector<Mat<LaurentElem>> r;
        std::size_t n = std::max(c_.size(), o.c_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= c_.size()) r.push_back(o.c_[i]);
            else if (i >= o.c_.size()) r.push_back(c_[i]);
            else r.push_back(c_[i] + o.c_[i]);
        }
        return TwistedPoly(side_, std::move(r));
    }
    TwistedPoly operator-(const TwistedPoly& o) const {
        require_side(o);
        std::vector<Mat<LaurentElem>> r;
        std::size_t n = std::max(c_.size(), o.c_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= c_.size()) r.push_back(-o.c_[i]);
            else if (i >= o.c_.size()) r.push_back(c_[i]);
            else r.push_back(c_[i] - o.c_[i]);
        }
        return TwistedPoly(side_, std::move(r));
    }

    TwistedPoly operator*(const TwistedPoly& o) const {
        require_side(o);
        if (cols() != o.rows()) throw DimMismatch("TwistedPoly: product shapes");
        long long tw = side_ == Side::Tau ? 1 : -1;
        const FieldCtx& ctx = c_[0].at(0, 0).ctx();
        Mat<LaurentElem> z(rows(), o.cols(), LaurentElem::zero(ctx));
        std::vector<Mat<LaurentElem>> r(c_.size() + o.c_.size() - 1, z);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) {
                auto twisted = o.c_[j].map([&](const LaurentElem& x) {
                    return x.twist(tw * static_cast<long long>(i));
                });
                r[i + j] = r[i + j] + c_[i] * twisted;
            }
        return TwistedPoly(side_, std::move(r));
    }

    // entrywise * map: sum c_i tau^i -> sum (c_i^(-i))^T sigma^i and back
    TwistedPoly star() const {
        long long tw = side_ == Side::Tau ? -1 : 1;
        std::vector<Mat<LaurentElem>> r;
        r.reserve(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i)
            r.push_back(c_[i]
                            .map([&](const LaurentElem& x) {
                                return x.twist(tw * static_cast<long long>(i));
                            })
                            .transpose());
        return TwistedPoly(side_ == Side::Tau ? Side::Sigma : Side::Tau, std::move(r));
    }

    bool operator==(const TwistedPoly& o) const { return side_ == o.side_ && c_ == o.c_; }

private:
    void require_side(const TwistedPoly& o) const {
        if (side_ != o.side_) throw ConfigError("TwistedPoly: mixed tau/sigma sides");
    }
    void trim() {
        while (c_.size() > 1) {
            bool zero = true;
            for (std::size_t i = 0; i < c_.back().rows() && zero; ++i)
                for (std::size_t j = 0; j < c_.back().cols() && zero; ++j)
                    if (!c_.back().at(i, j).is_exactly_zero()) zero = false;
            if (!zero) break;
            c_.pop_back();
        }
    }

    Side side_ = Side::Tau;
    std::vector<Mat<LaurentElem>> c_;
};

enum class Family { Drinfeld, CarlitzTensor, StrictlyPure, AlmostStrictlyPure, Custom };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::Drinfeld: return "drinfeld";
        case Family::CarlitzTensor: return "carlitz_tensor";
        case Family::StrictlyPure: return "strictly_pure";
        case Family::AlmostStrictlyPure: return "almost_strictly_pure";
        case Family::Custom: return "custom";
    }
    return "custom";
}

class TModule {
public:
    TModule(const FieldCtx& ctx, TwistedPoly phi_t, Family family)
        : ctx_(&ctx), phi_t_(std::move(phi_t)), family_(family) {
        if (phi_t_.side() != Side::Tau) throw ConfigError("TModule: phi_t must be tau-side");
        if (phi_t_.rows() != phi_t_.cols()) throw ConfigError("TModule: phi_t must be square");
        d_ = phi_t_.rows();
        // d part must be theta I + N with N^d = 0
        Mat<LaurentElem> N = nilpotent_part();
        Mat<LaurentElem> P = Mat<LaurentElem>::identity(d_, LaurentElem::zero(ctx),
                                                        LaurentElem::one(ctx));
        for (std::size_t k = 0; k < d_; ++k) P = P * N;
        for (std::size_t i = 0; i < d_; ++i)
            for (std::size_t j = 0; j < d_; ++j)
                if (!P.at(i, j).is_zero())
                    throw NotNilpotent("TModule: d phi_t is not theta I + nilpotent");
    }

    const FieldCtx& ctx() const { return *ctx_; }
    std::size_t dim() const { return d_; }
    long long tau_degree() const { return phi_t_.degree(); }
    const TwistedPoly& phi_t() const { return phi_t_; }
    Family family() const { return family_; }

    const Mat<LaurentElem>& dphi_t() const { return phi_t_.dpart(); }

    Mat<LaurentElem> nilpotent_part() const {
        Mat<LaurentElem> N = dphi_t();
        LaurentElem th = LaurentElem::theta_pow(*ctx_, 1);
        for (std::size_t i = 0; i < d_; ++i) N.at(i, i) = N.at(i, i) - th;
        return N;
    }

    // exact inverse of d phi_t through the finite Neumann series in N/theta
    Mat<LaurentElem> dphi_t_inv() const {
        LaurentElem thinv = LaurentElem::theta_pow(*ctx_, -1);
        Mat<LaurentElem> N = nilpotent_part();
        Mat<LaurentElem> acc = Mat<LaurentElem>::identity(d_, LaurentElem::zero(*ctx_),
                                                          LaurentElem::one(*ctx_));
        Mat<LaurentElem> pow = acc;
        for (std::size_t k = 1; k < d_; ++k) {
            pow = (pow * N).map([&](const LaurentElem& x) { return -(x * thinv); });
            acc = acc + pow;
        }
        return acc.map([&](const LaurentElem& x) { return x * thinv; });
    }

    Mat<LaurentElem> apply_dphi(const Mat<LaurentElem>& v) const { return dphi_t() * v; }

    // phi_a for a = sum a_i t^i over F_q, by Horner in the twisted ring
    TwistedPoly phi_a(const std::vector<gfe>& a) const {
        const FieldCtx& ctx = *ctx_;
        auto scal = [&](gfe c) {
            Mat<LaurentElem> m(d_, d_, LaurentElem::zero(ctx));
            for (std::size_t i = 0; i < d_; ++i)
                m.at(i, i) = LaurentElem::one(ctx).scaled(c);
            return TwistedPoly(Side::Tau, {m});
        };
        if (a.empty()) return scal(0);
        TwistedPoly acc = scal(a.back());
        for (std::size_t k = a.size() - 1; k-- > 0;) acc = phi_t_ * acc + scal(a[k]);
        return acc;
    }

    // phi applied to a vector of field points: phi_a(x) = sum A_i x^(i)
    Mat<LaurentElem> act(const TwistedPoly& op, const Mat<LaurentElem>& x) const {
        if (op.side() != Side::Tau) throw ConfigError("act: tau-side operator required");
        Mat<LaurentElem> acc(op.rows(), x.cols(), LaurentElem::zero(*ctx_));
        for (std::size_t i = 0; i < op.coeffs().size(); ++i) {
            auto xt = x.map([&](const LaurentElem& v) {
                return v.twist(static_cast<long long>(i));
            });
            acc = acc + op.coeffs()[i] * xt;
        }
        return acc;
    }

private:
    const FieldCtx* ctx_ = nullptr;
    TwistedPoly phi_t_;
    Family family_;
    std::size_t d_ = 0;
};

// ---- family constructors ----

inline TModule carlitz(const FieldCtx& ctx) {
    Mat<LaurentElem> b0(1, 1, LaurentElem::theta_pow(ctx, 1));
    Mat<LaurentElem> b1(1, 1, LaurentElem::one(ctx));
    return TModule(ctx, TwistedPoly(Side::Tau, {b0, b1}), Family::CarlitzTensor);
}

inline TModule carlitz_tensor(const FieldCtx& ctx, std::size_t n) {
    if (n == 0) throw ConfigError("carlitz_tensor: n must be positive");
    Mat<LaurentElem> b0(n, n, LaurentElem::zero(ctx));
    LaurentElem th = LaurentElem::theta_pow(ctx, 1);
    for (std::size_t i = 0; i < n; ++i) {
        b0.at(i, i) = th;
        if (i + 1 < n) b0.at(i, i + 1) = LaurentElem::one(ctx);
    }
    Mat<LaurentElem> b1(n, n, LaurentElem::zero(ctx));
    b1.at(n - 1, 0) = LaurentElem::one(ctx);
    return TModule(ctx, TwistedPoly(Side::Tau, {b0, b1}), Family::CarlitzTensor);
}

inline TModule drinfeld(const FieldCtx& ctx, const std::vector<LaurentElem>& b) {
    if (b.empty()) throw ConfigError("drinfeld: rank must be positive");
    std::vector<Mat<LaurentElem>> cs{Mat<LaurentElem>(1, 1, LaurentElem::theta_pow(ctx, 1))};
    for (const auto& bi : b) cs.emplace_back(1, 1, bi);
    if (b.back().is_zero()) throw ConfigError("drinfeld: top coefficient must be nonzero");
    return TModule(ctx, TwistedPoly(Side::Tau, std::move(cs)), Family::Drinfeld);
}

// ---- exponential and logarithm coefficients ----

struct ExpSeries {
    std::vector<Mat<LaurentElem>> C; // C[0] = I
    long long imax() const { return static_cast<long long>(C.size()) - 1; }
};
struct LogSeries {
    std::vector<Mat<LaurentElem>> D; // D[0] = I
    long long imax() const { return static_cast<long long>(D.size()) - 1; }
};

// Solves C_i (d phi_t)^(i) - d phi_t C_i = sum_{j=1}^{min(i,l)} B_j C_{i-j}^(j)
// one i at a time. With d phi_t = theta I + N the equation reads
//   C (theta^{q^i} - theta) = R - C N^(i) + N C,
// and the correction operator C -> (N C - C N^(i)) / (theta^{q^i} - theta) is
// nilpotent of order < 2d, so the fixed point is reached in finitely many
// passes with no tolerance involved.
inline ExpSeries exp_solve(const TModule& phi, long long imax) {
    if (imax < 0) throw ConfigError("exp_solve: imax must be nonnegative");
    const FieldCtx& ctx = phi.ctx();
    std::size_t d = phi.dim();
    Mat<LaurentElem> I = Mat<LaurentElem>::identity(d, LaurentElem::zero(ctx),
                                                    LaurentElem::one(ctx));
    Mat<LaurentElem> N = phi.nilpotent_part();
    ExpSeries E;
    E.C.push_back(I);
    LaurentElem th = LaurentElem::theta_pow(ctx, 1);
    for (long long i = 1; i <= imax; ++i) {
        Mat<LaurentElem> R(d, d, LaurentElem::zero(ctx));
        for (long long j = 1; j <= std::min<long long>(i, phi.tau_degree()); ++j) {
            auto Ct = E.C[static_cast<std::size_t>(i - j)].map(
                [&](const LaurentElem& x) { return x.twist(j); });
            R = R + phi.phi_t().coeffs()[static_cast<std::size_t>(j)] * Ct;
        }
        Mat<LaurentElem> Ni = N.map([&](const LaurentElem& x) { return x.twist(i); });
        LaurentElem s = (th.twist(i) - th).inv();
        Mat<LaurentElem> C(d, d, LaurentElem::zero(ctx));
        for (std::size_t pass = 0; pass < 2 * d; ++pass)
            C = (R + N * C - C * Ni).map([&](const LaurentElem& x) { return x * s; });
        // the equation must now hold on all retained cells
        Mat<LaurentElem> resid = C * (Ni + I.scaled(th.twist(i))) -
                                 (N + I.scaled(th)) * C - R;
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                if (!resid.at(a, b).is_zero())
                    throw PrecisionExhausted("exp_solve: coefficient equation unresolved");
        E.C.push_back(std::move(C));
    }
    return E;
}

inline LogSeries log_from_exp(const ExpSeries& E, const FieldCtx& ctx) {
    std::size_t d = E.C[0].rows();
    long long imax = E.imax();
    LogSeries L;
    L.D.push_back(Mat<LaurentElem>::identity(d, LaurentElem::zero(ctx),
                                             LaurentElem::one(ctx)));
    for (long long k = 1; k <= imax; ++k) {
        Mat<LaurentElem> D(d, d, LaurentElem::zero(ctx));
        for (long long j = 1; j <= k; ++j) {
            auto Dt = L.D[static_cast<std::size_t>(k - j)].map(
                [&](const LaurentElem& x) { return x.twist(j); });
            D = D - E.C[static_cast<std::size_t>(j)] * Dt;
        }
        L.D.push_back(std::move(D));
    }
    return L;
}

inline LogSeries log_solve(const TModule& phi, long long imax) {
    return log_from_exp(exp_solve(phi, imax), phi.ctx());
}

// shared tail logic for evaluated twisted series sum_i A_i y^(i)
namespace detail {
inline Mat<LaurentElem> eval_twisted_series(const std::vector<Mat<LaurentElem>>& A,
                                            const Mat<LaurentElem>& y,
                                            const FieldCtx& ctx, bool log_side) {
    if (A.empty() || A[0].cols() != y.rows())
        throw DimMismatch("series evaluation: shape mismatch");
    std::size_t d = A[0].rows();
    Mat<LaurentElem> acc(d, y.cols(), LaurentElem::zero(ctx));
    bool arg_zero = true;
    for (std::size_t r = 0; r < y.rows() && arg_zero; ++r)
        for (std::size_t c = 0; c < y.cols() && arg_zero; ++c)
            if (!y.at(r, c).is_exactly_zero()) arg_zero = false;
    if (arg_zero) return acc; // every omitted term vanishes identically
    std::vector<long long> vals; // per-term valuation lower bounds (num units)
    long long res_floor = ctx.floor_num();
    for (std::size_t i = 0; i < A.size(); ++i) {
        auto yt = y.map([&](const LaurentElem& v) {
            return v.twist(static_cast<long long>(i));
        });
        Mat<LaurentElem> term = A[i] * yt;
        acc = acc + term;
        long long v = LaurentElem::POS_INF;
        for (std::size_t r = 0; r < term.rows(); ++r)
            for (std::size_t c = 0; c < term.cols(); ++c)
                v = std::min(v, term.at(r, c).val_lower_num());
        vals.push_back(v);
    }

    // A term is quiet when its bound pins it at or below working resolution.
    // Floor-only terms whose floor sits above the resolution are not quiet;
    // their magnitude is simply unknown and they must join the trend check.
    long long n = static_cast<long long>(A.size()) - 1;
    long long W = std::max<long long>(2, (n + 4) / 4);
    long long lo = std::max<long long>(0, n - W + 1);
    auto quiet = [&](long long i) { return vals[static_cast<std::size_t>(i)] >= -res_floor; };
    std::vector<long long> tr;
    for (long long i = lo; i <= n; ++i)
        if (!quiet(i)) tr.push_back(i);

    long long tail_v;
    if (tr.empty()) {
        // the series already fell below working precision; certify to the floor
        tail_v = -res_floor;
    } else {
        if (tr.size() == 1)
            for (long long i = lo - 1; i >= 0; --i)
                if (!quiet(i)) {
                    tr.insert(tr.begin(), i);
                    break;
                }
        auto fail = [&]() {
            if (log_side)
                throw OutsideRadius("log_eval: argument outside certified radius");
            throw DivergentTail("series evaluation: terms do not decay");
        };
        if (tr.size() < 2) fail();
        long long delta = LaurentElem::POS_INF;
        for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
            long long di = vals[static_cast<std::size_t>(tr[k])];
            long long dj = vals[static_cast<std::size_t>(tr[k + 1])];
            if (dj <= di) fail();
            long long step = (dj - di) / (tr[k + 1] - tr[k]);
            if (step <= 0) fail();
            delta = std::min(delta, step);
        }
        tail_v = vals[static_cast<std::size_t>(tr.back())] + delta;
        tail_v = std::min(tail_v, -res_floor);
    }
    acc = acc.map([&](const LaurentElem& x) {
        LaurentElem c = x;
        c.clamp_floor(-tail_v + 1);
        return c;
    });

    // The result may not be fuzzier than the scale of the argument itself
    // allows.  A knowledge floor escaping above that line means coefficients
    // below resolution were hit by unbounded twists of the argument, and no
    // value can be certified.
    long long in_bound = res_floor;
    for (std::size_t r = 0; r < y.rows(); ++r)
        for (std::size_t c = 0; c < y.cols(); ++c) {
            const LaurentElem& v = y.at(r, c);
            if (!v.exact()) in_bound = std::max(in_bound, v.floor_num());
            if (!v.is_zero()) in_bound = std::max(in_bound, v.lead_num());
        }
    const long long escape = in_bound + 2 * ctx.M;
    for (std::size_t r = 0; r < acc.rows(); ++r)
        for (std::size_t c = 0; c < acc.cols(); ++c)
            if (!acc.at(r, c).exact() && acc.at(r, c).floor_num() > escape) {
                if (log_side)
                    throw OutsideRadius("log_eval: argument outside certified radius");
                throw DivergentTail("series evaluation: tail is not certifiably small");
            }
    return acc;
}
} // namespace detail

inline Mat<LaurentElem> exp_eval(const ExpSeries& E, const Mat<LaurentElem>& y,
                                 const FieldCtx& ctx) {
    return detail::eval_twisted_series(E.C, y, ctx, false);
}
inline Mat<LaurentElem> log_eval(const LogSeries& L, const Mat<LaurentElem>& y,
                                 const FieldCtx& ctx) {
    return detail::eval_twisted_series(L.D, y, ctx, true);
}

// residual coefficients of Exp . d phi_t - phi_t . Exp through tau-degree imax
inline std::vector<Mat<LaurentElem>> exp_functional_residual(const TModule& phi,
                                                             const ExpSeries& E) {
    const FieldCtx& ctx = phi.ctx();
    std::vector<Mat<LaurentElem>> out;
    for (long long k = 0; k <= E.imax(); ++k) {
        Mat<LaurentElem> lhs = E.C[static_cast<std::size_t>(k)] *
                               phi.dphi_t().map([&](const LaurentElem& x) {
                                   return x.twist(k);
                               });
        Mat<LaurentElem> rhs(phi.dim(), phi.dim(), LaurentElem::zero(ctx));
        for (long long j = 0; j <= std::min<long long>(k, phi.tau_degree()); ++j) {
            auto Ct = E.C[static_cast<std::size_t>(k - j)].map(
                [&](const LaurentElem& x) { return x.twist(j); });
            rhs = rhs + phi.phi_t().coeffs()[static_cast<std::size_t>(j)] * Ct;
        }
        out.push_back(lhs - rhs);
    }
    return out;
}

// ---- Jordan normal form of d phi_t ----

struct JordanData {
    Mat<LaurentElem> Q;
    std::vector<std::size_t> blocks; // descending sizes, sum = d
    std::string ordering = "descending";
};

// Jordan basis of the nilpotent part by kernel chains: for k = d..1, vectors
// completing ker N^{k-1} to ker N^k spawn chains (N^{k-1}v, ..., Nv, v), each
// contributing one block of size k with ones on the superdiagonal.
inline JordanData jordanize(const TModule& phi) {
    const FieldCtx& ctx = phi.ctx();
    std::size_t d = phi.dim();
    Mat<LaurentElem> N = phi.nilpotent_part();

    std::vector<Mat<LaurentElem>> chains; // each entry is a d x k block, chain columns
    std::vector<std::size_t> sizes;

    std::vector<Mat<LaurentElem>> powers{
        Mat<LaurentElem>::identity(d, LaurentElem::zero(ctx), LaurentElem::one(ctx))};
    for (std::size_t k = 1; k <= d; ++k) powers.push_back(powers.back() * N);

    auto kernel_basis = [&](const Mat<LaurentElem>& m) {
        Mat<LaurentElem> r = m;
        std::size_t rank = row_reduce(r);
        // locate pivot columns
        std::vector<bool> piv(d, false);
        std::size_t row = 0;
        std::vector<std::size_t> pivcol(rank, 0);
        for (std::size_t col = 0; col < d && row < rank; ++col) {
            if (!r.at(row, col).is_zero()) {
                piv[col] = true;
                pivcol[row] = col;
                ++row;
            }
        }
        std::vector<Mat<LaurentElem>> basis;
        for (std::size_t col = 0; col < d; ++col) {
            if (piv[col]) continue;
            Mat<LaurentElem> v(d, 1, LaurentElem::zero(ctx));
            v.at(col, 0) = LaurentElem::one(ctx);
            for (std::size_t rr = 0; rr < rank; ++rr)
                v.at(pivcol[rr], 0) = -r.at(rr, col);
            basis.push_back(v);
        }
        return basis;
    };

    // grows a working matrix of independent columns; returns true if v enlarges it
    std::vector<Mat<LaurentElem>> pool;
    auto independent = [&](const std::vector<Mat<LaurentElem>>& vs,
                           const Mat<LaurentElem>& v) {
        Mat<LaurentElem> m(d, vs.size() + 1, LaurentElem::zero(ctx));
        for (std::size_t j = 0; j < vs.size(); ++j)
            for (std::size_t i = 0; i < d; ++i) m.at(i, j) = vs[j].at(i, 0);
        for (std::size_t i = 0; i < d; ++i) m.at(i, vs.size()) = v.at(i, 0);
        return row_reduce(m) == vs.size() + 1;
    };

    for (std::size_t k = d; k >= 1; --k) {
        // candidates: kernel of N^k; reject anything inside ker N^{k-1} + pool
        std::vector<Mat<LaurentElem>> kerk = kernel_basis(powers[k]);
        std::vector<Mat<LaurentElem>> kerk1 = kernel_basis(powers[k - 1]);
        for (const auto& v : kerk) {
            std::vector<Mat<LaurentElem>> context = kerk1;
            for (const auto& p : pool) context.push_back(p);
            if (!independent(context, v)) continue;
            // new chain from v
            std::vector<Mat<LaurentElem>> chain;
            Mat<LaurentElem> w = v;
            chain.push_back(w);
            for (std::size_t s = 1; s < k; ++s) {
                w = N * w;
                chain.push_back(w);
            }
            // pool keeps every chain member to guard independence
            for (const auto& cv : chain) pool.push_back(cv);
            // columns ordered deepest first so N acts as an upper shift
            Mat<LaurentElem> block(d, k, LaurentElem::zero(ctx));
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t i = 0; i < d; ++i)
                    block.at(i, j) = chain[k - 1 - j].at(i, 0);
            chains.push_back(block);
            sizes.push_back(k);
        }
        if (k == 1) break;
    }

    // assemble Q with blocks in descending size order (sizes already descend)
    JordanData J;
    J.blocks = sizes;
    Mat<LaurentElem> Q(d, d, LaurentElem::zero(ctx));
    std::size_t col = 0;
    for (std::size_t b = 0; b < chains.size(); ++b)
        for (std::size_t j = 0; j < sizes[b]; ++j, ++col)
            for (std::size_t i = 0; i < d; ++i) Q.at(i, col) = chains[b].at(i, j);
    J.Q = Q;

    // exactness check: Q J Q^{-1} = d phi_t
    Mat<LaurentElem> Jm(d, d, LaurentElem::zero(ctx));
    LaurentElem th = LaurentElem::theta_pow(ctx, 1);
    col = 0;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
        for (std::size_t j = 0; j < sizes[b]; ++j) {
            Jm.at(col + j, col + j) = th;
            if (j + 1 < sizes[b]) Jm.at(col + j, col + j + 1) = LaurentElem::one(ctx);
        }
        col += sizes[b];
    }
    Mat<LaurentElem> resid = J.Q * Jm - phi.dphi_t() * J.Q;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (!resid.at(i, j).is_zero())
                throw PrecisionExhausted("jordanize: chain basis fails to conjugate exactly");
    return J;
}

} // namespace tmodlab
