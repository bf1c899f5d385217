#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tmodlab/errors.hpp"
#include "tmodlab/gf.hpp"

// Truncated ramified Laurent series at the infinite place of F_q(theta).
//
// The coefficient field is F_q; the exponent lattice is (1/M)Z with
// M = e * q^k, p not dividing e. Internally an element is a finite sum of
// terms c * w^m where w is a fixed M-th root of -theta and m ("num units")
// ranges over Z. Using a root of -theta rather than of theta is what lets
// the Carlitz constants exist at tame ramification for odd p: the branch
// (-theta)^{1/(q-1)} is zeta * w^{q^k} for a configured zeta in F_q^x, and
// no value of zeta would give (q-1)-th roots of -theta over a root of
// +theta when p is odd.
//
// Every element carries a floor: terms with num-exponent below it are
// unknown, not zero. Exact elements (Laurent polynomials) use an infinite
// floor. Operations propagate floors pessimistically and never fabricate
// knowledge below them; inverses of non-monomials truncate at the context
// default floor -prec*M.
//
// Frobenius twisting multiplies exponents by q and fixes coefficients
// (c^q = c on F_q). Negative twists demand exponent divisibility, raising
// InseparableTwist otherwise; k budgets how many are possible starting from
// the tame layer.

namespace tmodlab {

struct FieldCtx {
    GFq gf;
    long long e;      // tame ramification part
    long long k;      // inverse-twist budget
    long long M;      // e * q^k
    gfe zeta;         // branch unit: (-theta)^{1/(q-1)} := zeta * w^{q^k}
    long long prec;   // default floor depth, in theta-exponent units

    FieldCtx(GFq gf_, long long e_, long long k_, gfe zeta_, long long prec_)
        : gf(std::move(gf_)), e(e_), k(k_), zeta(zeta_), prec(prec_) {
        if (e <= 0 || e % gf.p() == 0)
            throw ConfigError("FieldCtx: e must be positive and prime to p");
        if (k < 0) throw ConfigError("FieldCtx: twist depth must be >= 0");
        if (zeta == 0 || zeta >= gf.q()) throw ConfigError("FieldCtx: zeta must lie in F_q^x");
        if (prec <= 0) throw ConfigError("FieldCtx: prec must be positive");
        M = e;
        for (long long i = 0; i < k; ++i) {
            M *= gf.q();
            if (M > (1LL << 40)) throw ConfigError("FieldCtx: exponent lattice too fine");
        }
    }

    long long q() const { return gf.q(); }
    long long floor_num() const { return -prec * M; }

    bool compatible(const FieldCtx& o) const {
        return this == &o || (gf == o.gf && e == o.e && k == o.k && zeta == o.zeta && prec == o.prec);
    }
};

class LaurentElem {
public:
    static constexpr long long NEG_INF = LLONG_MIN / 4;
    static constexpr long long POS_INF = LLONG_MAX / 4;

    using Term = std::pair<long long, gfe>; // (num exponent, coefficient), ascending

    LaurentElem() : ctx_(nullptr), floor_(NEG_INF) {}
    explicit LaurentElem(const FieldCtx& ctx) : ctx_(&ctx), floor_(NEG_INF) {}

    static LaurentElem zero(const FieldCtx& ctx) { return LaurentElem(ctx); }

    static LaurentElem one(const FieldCtx& ctx) {
        LaurentElem r(ctx);
        r.terms_.emplace_back(0, ctx.gf.one());
        return r;
    }

    // c * w^num, the raw lattice monomial
    static LaurentElem monomial(const FieldCtx& ctx, gfe c, long long num) {
        LaurentElem r(ctx);
        if (c != 0) r.terms_.emplace_back(num, c);
        return r;
    }

    // c * theta^a (integer powers embed as (-1)^a w^(aM))
    static LaurentElem theta_pow(const FieldCtx& ctx, long long a, gfe c = 1) {
        gfe coeff = (a % 2 == 0) ? c : ctx.gf.neg(c);
        return monomial(ctx, coeff, a * ctx.M);
    }

    static LaurentElem from_int(const FieldCtx& ctx, long long v) {
        return monomial(ctx, ctx.gf.from_int(v), 0);
    }

    // polynomial in theta, constant coefficient first
    static LaurentElem from_theta_poly(const FieldCtx& ctx, const std::vector<long long>& coeffs) {
        LaurentElem r = zero(ctx);
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            r = r + theta_pow(ctx, static_cast<long long>(i), ctx.gf.from_int(coeffs[i]));
        return r;
    }

    const FieldCtx& ctx() const { return *ctx_; }
    bool has_ctx() const { return ctx_ != nullptr; }
    const std::vector<Term>& terms() const { return terms_; }
    long long floor_num() const { return floor_; }
    bool exact() const { return floor_ == NEG_INF; }

    bool is_zero() const { return terms_.empty(); }
    bool is_exactly_zero() const { return terms_.empty() && floor_ == NEG_INF; }

    long long lead_num() const {
        if (terms_.empty()) throw ZeroDivisor("LaurentElem: no leading term");
        return terms_.back().first;
    }
    gfe lead_coeff() const {
        if (terms_.empty()) throw ZeroDivisor("LaurentElem: no leading term");
        return terms_.back().second;
    }

    // Lower bound on the valuation (v(theta) = -1 scale), in num units.
    // POS_INF means exactly zero.
    long long val_lower_num() const {
        if (!terms_.empty()) return -terms_.back().first;
        if (floor_ == NEG_INF) return POS_INF;
        return -floor_;
    }

    gfe coeff_at(long long num) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), num,
                                   [](const Term& t, long long v) { return t.first < v; });
        if (it != terms_.end() && it->first == num) return it->second;
        return 0;
    }

    LaurentElem operator-() const {
        LaurentElem r = *this;
        for (auto& t : r.terms_) t.second = ctx_->gf.neg(t.second);
        return r;
    }

    friend LaurentElem operator+(const LaurentElem& a, const LaurentElem& b) {
        a.check_ctx(b);
        LaurentElem r(*a.ctx_);
        r.floor_ = std::max(a.floor_, b.floor_);
        const auto& gf = a.ctx_->gf;
        std::size_t i = 0, j = 0;
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].first < b.terms_[j].first)) {
                r.push_term(a.terms_[i].first, a.terms_[i].second);
                ++i;
            } else if (i == a.terms_.size() || b.terms_[j].first < a.terms_[i].first) {
                r.push_term(b.terms_[j].first, b.terms_[j].second);
                ++j;
            } else {
                gfe c = gf.add(a.terms_[i].second, b.terms_[j].second);
                r.push_term(a.terms_[i].first, c);
                ++i; ++j;
            }
        }
        return r;
    }

    friend LaurentElem operator-(const LaurentElem& a, const LaurentElem& b) { return a + (-b); }

    friend LaurentElem operator*(const LaurentElem& a, const LaurentElem& b) {
        a.check_ctx(b);
        LaurentElem r(*a.ctx_);
        if (a.is_exactly_zero() || b.is_exactly_zero()) return r;

        long long fl = NEG_INF;
        if (a.floor_ != NEG_INF) fl = std::max(fl, a.floor_ + b.lead_bound());
        if (b.floor_ != NEG_INF) fl = std::max(fl, b.floor_ + a.lead_bound());
        r.floor_ = fl;
        if (a.terms_.empty() || b.terms_.empty()) return r;

        const auto& gf = a.ctx_->gf;
        long long lo = a.terms_.front().first + b.terms_.front().first;
        long long hi = a.terms_.back().first + b.terms_.back().first;
        if (fl != NEG_INF) lo = std::max(lo, fl);
        if (lo > hi) return r;

        if (hi - lo <= (1LL << 18)) {
            // dense accumulation over the exponent window
            std::vector<gfe> buf(static_cast<std::size_t>(hi - lo + 1), 0);
            for (const auto& ta : a.terms_)
                for (const auto& tb : b.terms_) {
                    long long n = ta.first + tb.first;
                    if (n < lo) continue;
                    auto& slot = buf[static_cast<std::size_t>(n - lo)];
                    slot = gf.add(slot, gf.mul(ta.second, tb.second));
                }
            for (std::size_t idx = 0; idx < buf.size(); ++idx)
                if (buf[idx] != 0) r.terms_.emplace_back(lo + static_cast<long long>(idx), buf[idx]);
        } else {
            std::vector<Term> prods;
            prods.reserve(a.terms_.size() * b.terms_.size());
            for (const auto& ta : a.terms_)
                for (const auto& tb : b.terms_) {
                    long long n = ta.first + tb.first;
                    if (n < lo) continue;
                    prods.emplace_back(n, gf.mul(ta.second, tb.second));
                }
            std::sort(prods.begin(), prods.end(),
                      [](const Term& x, const Term& y) { return x.first < y.first; });
            for (std::size_t idx = 0; idx < prods.size();) {
                long long n = prods[idx].first;
                gfe c = 0;
                while (idx < prods.size() && prods[idx].first == n) {
                    c = gf.add(c, prods[idx].second);
                    ++idx;
                }
                if (c != 0) r.terms_.emplace_back(n, c);
            }
        }
        return r;
    }

    LaurentElem scaled(gfe c) const {
        LaurentElem r(*ctx_);
        if (c == 0) return r; // exact scalar zero annihilates the floor too
        r.floor_ = floor_;
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) r.terms_.emplace_back(t.first, ctx_->gf.mul(t.second, c));
        return r;
    }

    // Multiplicative inverse. Monomials invert exactly; anything else goes
    // through Newton iteration truncated at the context floor.
    LaurentElem inv() const {
        if (terms_.empty())
            throw ZeroDivisor(exact() ? "LaurentElem: inverse of zero"
                                      : "LaurentElem: not invertible at current precision");
        const auto& gf = ctx_->gf;
        long long L = lead_num();
        gfe ci = gf.inv(lead_coeff());
        if (terms_.size() == 1) {
            LaurentElem r = monomial(*ctx_, ci, -L);
            if (floor_ != NEG_INF) r.floor_ = floor_ - 2 * L;
            return r;
        }
        long long fl_out = ctx_->floor_num();
        if (floor_ != NEG_INF) fl_out = std::max(fl_out, floor_ - 2 * L);

        LaurentElem g = monomial(*ctx_, ci, -L);
        LaurentElem two = from_int(*ctx_, 2);
        while (true) {
            LaurentElem err = one(*ctx_) - (*this) * g; // quadratic convergence
            err.clamp_floor(fl_out + L);
            if (err.terms_.empty()) break;
            LaurentElem next = g + g * err;
            next.clamp_floor(fl_out);
            g = std::move(next);
        }
        g.floor_ = std::max(g.floor_, fl_out);
        g.drop_below_floor();
        return g;
    }

    friend LaurentElem operator/(const LaurentElem& a, const LaurentElem& b) { return a * b.inv(); }

    // Frobenius twist f -> f^(nn): exponents scale by q^nn, coefficients fixed.
    LaurentElem twist(long long nn) const {
        LaurentElem r(*ctx_);
        long long q = ctx_->q();
        if (nn >= 0) {
            long long scale = 1;
            for (long long i = 0; i < nn; ++i) scale *= q;
            r.floor_ = (floor_ == NEG_INF) ? NEG_INF : floor_ * scale;
            r.terms_.reserve(terms_.size());
            for (const auto& t : terms_) r.terms_.emplace_back(t.first * scale, t.second);
        } else {
            long long scale = 1;
            for (long long i = 0; i < -nn; ++i) scale *= q;
            for (const auto& t : terms_)
                if (t.first % scale != 0)
                    throw InseparableTwist("twist: exponent " + std::to_string(t.first) +
                                           "/" + std::to_string(ctx_->M) +
                                           " not divisible by q^" + std::to_string(-nn));
            r.floor_ = (floor_ == NEG_INF) ? NEG_INF : ceil_div(floor_, scale);
            r.terms_.reserve(terms_.size());
            for (const auto& t : terms_) r.terms_.emplace_back(t.first / scale, t.second);
        }
        return r;
    }

    // j-th hyperderivative with respect to theta. Defined on the separable
    // layer only: every exponent must lie in (1/e)Z.
    LaurentElem hyper(long long j) const {
        if (j < 0) throw ConfigError("hyper: negative order");
        if (j == 0) return *this;
        long long qk = 1;
        for (long long i = 0; i < ctx_->k; ++i) qk *= ctx_->q();
        LaurentElem r(*ctx_);
        r.floor_ = (floor_ == NEG_INF) ? NEG_INF : floor_ - j * ctx_->M;
        const auto& gf = ctx_->gf;
        gfe sign = (j % 2 == 0) ? gf.one() : gf.neg(gf.one());
        for (const auto& t : terms_) {
            if (t.first % qk != 0)
                throw InseparableElement("hyper: exponent " + std::to_string(t.first) + "/" +
                                         std::to_string(ctx_->M) + " outside the separable layer");
            gfe b = padic_binom(gf, t.first / qk, ctx_->e, j);
            if (b == 0) continue;
            gfe c = gf.mul(t.second, gf.mul(sign, b));
            if (c != 0) r.terms_.emplace_back(t.first - j * ctx_->M, c);
        }
        return r;
    }

    // Restrict knowledge to exponents >= fl (num units).
    void clamp_floor(long long fl) {
        if (fl <= floor_) return;
        floor_ = fl;
        drop_below_floor();
    }

    bool operator==(const LaurentElem& o) const {
        return terms_ == o.terms_ && floor_ == o.floor_;
    }

    // Canonical rendering. Integer theta-exponents print over theta itself,
    // fractional ones over (-theta); both reflect the same internal term.
    std::string str() const {
        if (terms_.empty()) return "0";
        const auto& gf = ctx_->gf;
        std::string out;
        for (std::size_t idx = terms_.size(); idx-- > 0;) {
            long long num = terms_[idx].first;
            gfe c = terms_[idx].second;
            if (!out.empty()) out += " + ";
            long long g = std::gcd(std::abs(num), ctx_->M);
            long long a = num / g, b = ctx_->M / g;
            if (b == 1) {
                gfe cc = (a % 2 == 0) ? c : gf.neg(c);
                if (a == 0) { out += coeff_str(cc); continue; }
                std::string base = "th" + expo_str(a, 1);
                out += (cc == 1) ? base : coeff_str(cc) + "*" + base;
            } else {
                std::string base = "(-th)" + expo_str(a, b);
                out += (c == 1) ? base : coeff_str(c) + "*" + base;
            }
        }
        return out;
    }

private:
    static long long ceil_div(long long a, long long b) {
        long long d = a / b;
        if (a % b != 0 && ((a < 0) != (b < 0))) return d; // already floor for mixed signs
        if (a % b != 0 && a > 0) return d + 1;
        return d;
    }

    std::string coeff_str(gfe c) const {
        const auto& gf = ctx_->gf;
        if (gf.n() == 1) return std::to_string(c);
        auto d = gf.digits(c);
        std::string s;
        for (std::size_t i = d.size(); i-- > 0;) {
            if (d[i] == 0) continue;
            if (!s.empty()) s += "+";
            if (i == 0) s += std::to_string(d[i]);
            else {
                if (d[i] != 1) s += std::to_string(d[i]) + "*";
                s += (i == 1) ? "u" : "u^" + std::to_string(i);
            }
        }
        if (s.empty()) s = "0";
        return "(" + s + ")";
    }

    static std::string expo_str(long long a, long long b) {
        if (a == 1 && b == 1) return "";
        if (b == 1) return "^" + std::to_string(a);
        return "^(" + std::to_string(a) + "/" + std::to_string(b) + ")";
    }

    long long lead_bound() const {
        if (!terms_.empty()) return terms_.back().first;
        return floor_; // zero to precision: anything unknown sits below the floor
    }

    void push_term(long long num, gfe c) {
        if (c == 0) return;
        if (floor_ != NEG_INF && num < floor_) return;
        terms_.emplace_back(num, c);
    }

    void drop_below_floor() {
        if (floor_ == NEG_INF) return;
        auto it = std::lower_bound(terms_.begin(), terms_.end(), floor_,
                                   [](const Term& t, long long v) { return t.first < v; });
        terms_.erase(terms_.begin(), it);
    }

    void check_ctx(const LaurentElem& o) const {
        if (ctx_ == o.ctx_) return;
        if (!ctx_ || !o.ctx_ || !ctx_->compatible(*o.ctx_))
            throw CtxMismatch("LaurentElem: operands from different field contexts");
    }

    const FieldCtx* ctx_;
    std::vector<Term> terms_;
    long long floor_;
};

// Difference is zero up to the certified precision of both sides.
inline bool agree_to_precision(const LaurentElem& a, const LaurentElem& b) {
    return (a - b).is_zero();
}

// Valuation lower bound of a residual in theta-exponent units, rounded down.
inline long long residual_valuation(const LaurentElem& r) {
    long long v = r.val_lower_num();
    if (v == LaurentElem::POS_INF) return LaurentElem::POS_INF;
    long long M = r.ctx().M;
    return (v >= 0) ? v / M : -((-v + M - 1) / M);
}

} // namespace tmodlab
