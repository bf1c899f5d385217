#pragma once

#include <map>
#include <vector>

#include "tmodlab/errors.hpp"
#include "tmodlab/laurent.hpp"
#include "tmodlab/matrix.hpp"

// Truncated power series in t with Laurent coefficients. A TateSeries is
// either a polynomial (tail exactly zero, arbitrary degree) or a truncated
// series (coefficients beyond t_trunc unknown). Binary operations between two
// truncated series require equal truncation; the truncation order is fixed by
// per-run configuration and never extended silently.

namespace tmodlab {

class TateSeries {
public:
    TateSeries() = default;

    static TateSeries zero_poly(const FieldCtx& ctx) {
        return TateSeries(ctx, {LaurentElem::zero(ctx)}, true);
    }
    static TateSeries one(const FieldCtx& ctx) {
        return TateSeries(ctx, {LaurentElem::one(ctx)}, true);
    }
    static TateSeries scalar(const LaurentElem& c) {
        return TateSeries(c.ctx(), {c}, true);
    }
    static TateSeries t_power(const FieldCtx& ctx, std::size_t i) {
        std::vector<LaurentElem> cs(i + 1, LaurentElem::zero(ctx));
        cs[i] = LaurentElem::one(ctx);
        return TateSeries(ctx, cs, true);
    }
    // t - theta, the workhorse linear factor
    static TateSeries t_minus_theta(const FieldCtx& ctx) {
        return TateSeries(ctx, {-LaurentElem::theta_pow(ctx, 1), LaurentElem::one(ctx)}, true);
    }
    static TateSeries poly(const FieldCtx& ctx, std::vector<LaurentElem> cs) {
        if (cs.empty()) cs.push_back(LaurentElem::zero(ctx));
        return TateSeries(ctx, std::move(cs), true);
    }
    static TateSeries series(const FieldCtx& ctx, std::vector<LaurentElem> cs, long long T) {
        if (T < 0) throw ConfigError("TateSeries: negative truncation");
        cs.resize(static_cast<std::size_t>(T) + 1, LaurentElem::zero(ctx));
        return TateSeries(ctx, std::move(cs), false);
    }

    const FieldCtx& ctx() const { return *ctx_; }
    bool tail_exact() const { return exact_; }
    long long t_trunc() const { return static_cast<long long>(c_.size()) - 1; }
    const std::vector<LaurentElem>& coeffs() const { return c_; }

    LaurentElem coeff(long long i) const {
        if (i >= 0 && i < static_cast<long long>(c_.size()))
            return c_[static_cast<std::size_t>(i)];
        if (exact_) return LaurentElem::zero(*ctx_);
        throw TruncationMismatch("TateSeries: coefficient beyond truncation requested");
    }

    bool is_zero() const {
        for (const auto& x : c_)
            if (!x.is_zero()) return false;
        return true;
    }

    TateSeries operator-() const {
        TateSeries r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    TateSeries operator+(const TateSeries& o) const {
        auto [T, ex] = combine_trunc(o);
        std::vector<LaurentElem> cs;
        cs.reserve(static_cast<std::size_t>(T) + 1);
        for (long long i = 0; i <= T; ++i) cs.push_back(at(i) + o.at(i));
        return TateSeries(*ctx_, std::move(cs), ex);
    }
    TateSeries operator-(const TateSeries& o) const {
        auto [T, ex] = combine_trunc(o);
        std::vector<LaurentElem> cs;
        cs.reserve(static_cast<std::size_t>(T) + 1);
        for (long long i = 0; i <= T; ++i) cs.push_back(at(i) - o.at(i));
        return TateSeries(*ctx_, std::move(cs), ex);
    }
    TateSeries operator*(const TateSeries& o) const {
        long long T;
        bool ex;
        if (exact_ && o.exact_) {
            T = t_trunc() + o.t_trunc();
            ex = true;
        } else {
            auto [tt, e2] = combine_trunc(o);
            T = tt;
            ex = e2;
        }
        std::vector<LaurentElem> cs(static_cast<std::size_t>(T) + 1, LaurentElem::zero(*ctx_));
        for (long long i = 0; i <= t_trunc(); ++i) {
            const auto& a = c_[static_cast<std::size_t>(i)];
            if (a.is_exactly_zero()) continue;
            for (long long j = 0; j <= o.t_trunc() && i + j <= T; ++j) {
                const auto& b = o.c_[static_cast<std::size_t>(j)];
                if (b.is_exactly_zero()) continue;
                auto& cell = cs[static_cast<std::size_t>(i + j)];
                cell = cell + a * b;
            }
        }
        return TateSeries(*ctx_, std::move(cs), ex);
    }

    TateSeries scaled(const LaurentElem& s) const {
        TateSeries r = *this;
        for (auto& x : r.c_) x = x * s;
        return r;
    }
    TateSeries scaled(gfe s) const {
        TateSeries r = *this;
        for (auto& x : r.c_) x = x.scaled(s);
        return r;
    }

    // Frobenius twist, applied to coefficients only; t is fixed.
    TateSeries twist(long long nn) const {
        TateSeries r = *this;
        for (auto& x : r.c_) x = x.twist(nn);
        return r;
    }

    // Hyperderivative in t. A truncated series loses j known coefficients.
    TateSeries hyper_t(long long j) const {
        if (j < 0) throw ConfigError("hyper_t: negative order");
        if (j == 0) return *this;
        if (!exact_ && j > t_trunc())
            throw TruncationMismatch("hyper_t: order exceeds truncation");
        long long T = exact_ ? std::max<long long>(t_trunc() - j, 0) : t_trunc() - j;
        std::vector<LaurentElem> cs(static_cast<std::size_t>(T) + 1, LaurentElem::zero(*ctx_));
        const GFq& F = ctx_->gf;
        for (long long i = j; i <= t_trunc(); ++i) {
            gfe b = padic_binom(F, i, 1, j);
            if (b != 0) cs[static_cast<std::size_t>(i - j)] = c_[static_cast<std::size_t>(i)].scaled(b);
        }
        return TateSeries(*ctx_, std::move(cs), exact_);
    }

    // Hyperderivative in theta, applied to coefficients; t is a constant for it.
    TateSeries hyper_theta(long long j) const {
        TateSeries r = *this;
        for (auto& x : r.c_) x = x.hyper(j);
        return r;
    }

    TateSeries retrunc(long long T) const {
        if (T < 0) throw ConfigError("retrunc: negative truncation");
        if (!exact_ && T > t_trunc())
            throw TruncationMismatch("retrunc: cannot extend a truncated series");
        std::vector<LaurentElem> cs;
        for (long long i = 0; i <= T; ++i) cs.push_back(at(i));
        return TateSeries(*ctx_, std::move(cs), false);
    }

    // Substitutes t = theta. Polynomials evaluate exactly. For truncated
    // series the dropped tail must be certified: term i of the sum has
    // valuation bounded by v(c_i) - i (theta units). Those bounds may
    // oscillate, so the trend is measured on the envelope: the worst bound
    // over the later half of the trailing window must beat the worst over
    // the earlier half. Coefficients that are zero to working precision
    // carry no trend information; if the whole window is below resolution
    // the result is certified to the resolution envelope at the first
    // dropped index.
    LaurentElem eval_at_theta() const {
        const FieldCtx& ctx = *ctx_;
        LaurentElem acc = LaurentElem::zero(ctx);
        LaurentElem tp = LaurentElem::one(ctx);
        LaurentElem th = LaurentElem::theta_pow(ctx, 1);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (i > 0) tp = tp * th;
            if (!c_[i].is_exactly_zero()) acc = acc + c_[i] * tp;
        }
        if (exact_) return acc;

        const long long M = ctx.M;
        const long long T = t_trunc();
        const long long res_floor = ctx.floor_num();

        auto dval = [&](long long i) {
            return c_[static_cast<std::size_t>(i)].val_lower_num() - i * M;
        };
        auto visible = [&](long long i) {
            const auto& x = c_[static_cast<std::size_t>(i)];
            return !x.is_zero() && x.lead_num() > res_floor;
        };

        // A window must span at least one full swing of the bounds or the two
        // envelope samples can land inside a single trough and read the trend
        // backwards. The swing size is not known, so grow the window until
        // the trend certifies or the whole series has been consumed.
        long long tail_v = LaurentElem::POS_INF;
        bool certified = false;
        const long long W0 = std::max<long long>(2, (T + 4) / 4);
        for (long long W = W0;; W *= 2) {
            long long lo = std::max<long long>(0, T - W + 1);
            std::vector<long long> vis;
            for (long long i = lo; i <= T; ++i)
                if (visible(i)) vis.push_back(i);
            if (vis.empty() && W == W0) {
                // the series already fell below working precision; certify to
                // the resolution envelope at the first dropped index rather
                // than hunting backwards for long-spent visible terms
                tail_v = (-res_floor) - (T + 1) * M;
                certified = true;
                break;
            }
            if (vis.size() >= 2) {
                std::size_t h = vis.size() / 2;
                long long m1 = LaurentElem::POS_INF, m2 = LaurentElem::POS_INF;
                for (std::size_t k = 0; k < vis.size() - h; ++k)
                    m1 = std::min(m1, dval(vis[k]));
                for (std::size_t k = vis.size() - h; k < vis.size(); ++k)
                    m2 = std::min(m2, dval(vis[k]));
                if (m2 > m1) {
                    // the improving envelope certifies the dropped terms down
                    // to the later half's worst bound, no further
                    tail_v = m2;
                    certified = true;
                    break;
                }
            }
            if (lo == 0) break;
        }
        if (!certified)
            throw DivergentTail("eval_at_theta: retained coefficients do not decay");
        // dropped coefficients were never measured better than resolution
        tail_v = std::min(tail_v, (-res_floor) - (T + 1) * M);
        acc.clamp_floor(-tail_v + 1);
        return acc;
    }

    bool operator==(const TateSeries& o) const {
        return exact_ == o.exact_ && c_ == o.c_;
    }

private:
    TateSeries(const FieldCtx& ctx, std::vector<LaurentElem> cs, bool exact)
        : ctx_(&ctx), c_(std::move(cs)), exact_(exact) {
        if (c_.empty()) c_.push_back(LaurentElem::zero(ctx));
    }

    LaurentElem at(long long i) const {
        if (i >= 0 && i < static_cast<long long>(c_.size()))
            return c_[static_cast<std::size_t>(i)];
        return LaurentElem::zero(*ctx_);
    }

    std::pair<long long, bool> combine_trunc(const TateSeries& o) const {
        if (!ctx_->compatible(*o.ctx_))
            throw CtxMismatch("TateSeries: mixed field contexts");
        if (exact_ && o.exact_) return {std::max(t_trunc(), o.t_trunc()), true};
        if (exact_) return {o.t_trunc(), false};
        if (o.exact_) return {t_trunc(), false};
        if (t_trunc() != o.t_trunc())
            throw TruncationMismatch("TateSeries: truncation orders differ");
        return {t_trunc(), false};
    }

    const FieldCtx* ctx_ = nullptr;
    std::vector<LaurentElem> c_;
    bool exact_ = true;
};

// do the two series agree wherever both retain information
inline bool tate_agree(const TateSeries& f, const TateSeries& g) {
    long long T = std::min(f.t_trunc(), g.t_trunc());
    if (f.tail_exact() && g.tail_exact()) T = std::max(f.t_trunc(), g.t_trunc());
    for (long long i = 0; i <= T; ++i) {
        LaurentElem a = (i <= f.t_trunc()) ? f.coeff(i) : LaurentElem::zero(f.ctx());
        LaurentElem b = (i <= g.t_trunc()) ? g.coeff(i) : LaurentElem::zero(g.ctx());
        if (!(a - b).is_zero()) return false;
    }
    return true;
}

// Worst retained coefficient exponent data for the two Gauss norms: the plain
// norm tracks max |c_i|, the theta-weighted norm tracks max q^i |c_i|.
// Returned as exponents in internal units; NEG_INF for the zero series.
inline long long gauss_norm_exp(const TateSeries& f) {
    long long m = LaurentElem::NEG_INF;
    for (const auto& c : f.coeffs())
        if (!c.is_zero()) m = std::max(m, c.lead_num());
    return m;
}
inline long long theta_norm_exp(const TateSeries& f) {
    long long m = LaurentElem::NEG_INF;
    long long M = f.ctx().M;
    const auto& cs = f.coeffs();
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (!cs[i].is_zero())
            m = std::max(m, cs[i].lead_num() + static_cast<long long>(i) * M);
    return m;
}

// Finite expansion at t = theta: coefficients b_j of sum b_j (t-theta)^j.
// Negative orders are admitted as storage (the analytic layer produces them
// through an exact rational kernel) but never synthesized numerically here.
struct ThetaLaurent {
    std::map<long long, LaurentElem> coeffs;
    long long order_trunc = 0;

    const LaurentElem* coeff(long long j) const {
        auto it = coeffs.find(j);
        return it == coeffs.end() ? nullptr : &it->second;
    }

    // re-expand the regular part as a polynomial in t
    TateSeries to_series(const FieldCtx& ctx) const {
        TateSeries acc = TateSeries::zero_poly(ctx);
        TateSeries tmt = TateSeries::t_minus_theta(ctx);
        for (const auto& [j, b] : coeffs) {
            if (j < 0) throw ConfigError("ThetaLaurent: principal part is not a power series");
            TateSeries term = TateSeries::scalar(b);
            for (long long k = 0; k < j; ++k) term = term * tmt;
            acc = acc + term;
        }
        return acc;
    }
};

inline ThetaLaurent taylor_at_theta(const TateSeries& f, long long depth) {
    if (depth < 0) throw ConfigError("taylor_at_theta: negative depth");
    ThetaLaurent r;
    r.order_trunc = depth;
    for (long long j = 0; j <= depth; ++j)
        r.coeffs.emplace(j, f.hyper_t(j).eval_at_theta());
    return r;
}

// Twist-action pairing of a twisted-operator coefficient list against a
// matrix: <beta|M> = B_0 M + B_1 M^(1) + ... Biadditive, left slot linear
// over the coefficient field, right slot linear over polynomials in t.
inline Mat<TateSeries> twist_pairing(const std::vector<Mat<LaurentElem>>& beta,
                                     const Mat<TateSeries>& M) {
    if (beta.empty()) throw DimMismatch("twist_pairing: empty operator");
    for (const auto& B : beta)
        if (B.cols() != M.rows() || B.rows() != beta[0].rows())
            throw DimMismatch("twist_pairing: operator/matrix shapes do not conform");
    Mat<TateSeries> acc;
    for (std::size_t n = 0; n < beta.size(); ++n) {
        Mat<TateSeries> Bn(beta[n].rows(), beta[n].cols(), TateSeries());
        for (std::size_t i = 0; i < Bn.rows(); ++i)
            for (std::size_t j = 0; j < Bn.cols(); ++j)
                Bn.at(i, j) = TateSeries::scalar(beta[n].at(i, j));
        Mat<TateSeries> term = Bn * M.map([&](const TateSeries& s) {
            return s.twist(static_cast<long long>(n));
        });
        acc = (n == 0) ? term : acc + term;
    }
    return acc;
}

// d-matrices: upper-triangular Toeplitz matrices of hyperderivatives. The
// first row reads f, d^1 f, ..., d^{n-1} f. Entries of a truncated input are
// cut to the shortest derivative so the matrix is uniform.
inline Mat<TateSeries> d_matrix_t(const TateSeries& f, std::size_t n) {
    if (n == 0) throw ConfigError("d_matrix_t: n must be positive");
    std::vector<TateSeries> ds;
    ds.reserve(n);
    for (std::size_t j = 0; j < n; ++j) ds.push_back(f.hyper_t(static_cast<long long>(j)));
    if (!f.tail_exact()) {
        long long T = ds.back().t_trunc();
        for (auto& d : ds) d = d.retrunc(T);
    }
    Mat<TateSeries> m(n, n, f.tail_exact() ? TateSeries::zero_poly(f.ctx())
                                           : TateSeries::zero_poly(f.ctx()).retrunc(ds.back().t_trunc()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m.at(i, j) = ds[j - i];
    return m;
}

inline Mat<LaurentElem> d_matrix_theta(const LaurentElem& f, std::size_t n) {
    if (n == 0) throw ConfigError("d_matrix_theta: n must be positive");
    std::vector<LaurentElem> ds;
    ds.reserve(n);
    for (std::size_t j = 0; j < n; ++j) ds.push_back(f.hyper(static_cast<long long>(j)));
    Mat<LaurentElem> m(n, n, LaurentElem::zero(f.ctx()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m.at(i, j) = ds[j - i];
    return m;
}

// column vector (d^{n-1} f, ..., d^1 f, f)^T
inline Mat<TateSeries> partial_col_t(const TateSeries& f, std::size_t n) {
    Mat<TateSeries> m(n, 1, TateSeries::zero_poly(f.ctx()));
    for (std::size_t i = 0; i < n; ++i)
        m.at(i, 0) = f.hyper_t(static_cast<long long>(n - 1 - i));
    return m;
}
inline Mat<LaurentElem> partial_col_theta(const LaurentElem& f, std::size_t n) {
    Mat<LaurentElem> m(n, 1, LaurentElem::zero(f.ctx()));
    for (std::size_t i = 0; i < n; ++i)
        m.at(i, 0) = f.hyper(static_cast<long long>(n - 1 - i));
    return m;
}

// Both halves of the two-variable chain rule at t = theta:
//   (a)  dth^j(f)|_{t=th} = sum_i (-1)^i dth^{j-i}( dt^i(f)|_{t=th} )
//   (b)  dth^j( f|_{t=th} ) = sum_i ( dth^{j-i} dt^i f )|_{t=th}
struct ChainRuleReport {
    LaurentElem lhs_a, rhs_a, lhs_b, rhs_b;
    long long val_a, val_b; // residual valuations, theta units
};

inline ChainRuleReport chain_rule_check(const TateSeries& f, long long j) {
    const FieldCtx& ctx = f.ctx();
    const GFq& F = ctx.gf;
    ChainRuleReport rep{LaurentElem::zero(ctx), LaurentElem::zero(ctx),
                        LaurentElem::zero(ctx), LaurentElem::zero(ctx), 0, 0};

    rep.lhs_a = f.hyper_theta(j).eval_at_theta();
    gfe sign = F.one();
    for (long long i = 0; i <= j; ++i) {
        LaurentElem inner = f.hyper_t(i).eval_at_theta();
        rep.rhs_a = rep.rhs_a + inner.hyper(j - i).scaled(sign);
        sign = F.neg(sign);
    }

    rep.lhs_b = f.eval_at_theta().hyper(j);
    for (long long i = 0; i <= j; ++i)
        rep.rhs_b = rep.rhs_b + f.hyper_t(i).hyper_theta(j - i).eval_at_theta();

    rep.val_a = residual_valuation(rep.lhs_a - rep.rhs_a);
    rep.val_b = residual_valuation(rep.lhs_b - rep.rhs_b);
    return rep;
}

} // namespace tmodlab
