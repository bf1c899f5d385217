#pragma once

// Shared test fixtures: field contexts at the ramification needed for the
// special constants, and independent partial-product oracles for them. The
// oracles here are deliberately written from the product definitions alone so
// that library output can be compared against them.

#include <algorithm>
#include <map>
#include <tuple>
#include <utility>

#include "tmodlab/laurent.hpp"
#include "tmodlab/tate.hpp"
#include "tmodlab/tmodule.hpp"

namespace th {

using namespace tmodlab;

inline const GFq& field_for(int q) {
    static GFq f2 = GFq::prime_field(2);
    static GFq f3 = GFq::prime_field(3);
    static GFq f4(2, 2, GFq::default_modulus(2, 2));
    static GFq f5 = GFq::prime_field(5);
    static GFq f9(3, 2, GFq::default_modulus(3, 2));
    switch (q) {
        case 2: return f2;
        case 3: return f3;
        case 4: return f4;
        case 5: return f5;
        case 9: return f9;
    }
    throw ConfigError("field_for: unsupported q in tests");
}

// context carrying the (q-1)-st root of -theta that the special constants live in
inline const FieldCtx& carlitz_ctx(int q, long long prec = 60) {
    static std::map<std::pair<int, long long>, FieldCtx> cache;
    auto key = std::make_pair(q, prec);
    auto it = cache.find(key);
    if (it == cache.end()) {
        const GFq& F = field_for(q);
        it = cache.emplace(key, FieldCtx(F, q - 1, 0, F.one(), prec)).first;
    }
    return it->second;
}

// context with enough inverse-twist budget for sigma-side work
inline const FieldCtx& twist_ctx(int q, long long k, long long prec = 40) {
    static std::map<std::tuple<int, long long, long long>, FieldCtx> cache;
    auto key = std::make_tuple(q, k, prec);
    auto it = cache.find(key);
    if (it == cache.end()) {
        const GFq& F = field_for(q);
        it = cache.emplace(key, FieldCtx(F, q - 1, k, F.one(), prec)).first;
    }
    return it->second;
}

// W with W^(q-1) = -theta, the branch all oracle values are expressed in
inline LaurentElem branch_root(const FieldCtx& ctx) {
    long long qk = ctx.M / ctx.e;
    return LaurentElem::monomial(ctx, ctx.zeta, qk);
}

// product form of the Carlitz period: -W^q * prod_{i>=1} (1 - theta^(1-q^i))^(-1)
inline LaurentElem pitilde_partial(const FieldCtx& ctx) {
    long long q = ctx.q();
    LaurentElem W = branch_root(ctx);
    LaurentElem acc = -W.twist(1); // -W^q
    LaurentElem one = LaurentElem::one(ctx);
    for (long long qi = q; qi - 1 <= ctx.prec + 5; qi *= q) {
        LaurentElem f = one - LaurentElem::theta_pow(ctx, 1 - qi);
        acc = acc * f.inv();
    }
    acc.clamp_floor(ctx.floor_num());
    return acc;
}

// product form of the entire function Omega, truncated at t-degree T:
// W^(-q) * prod_{i>=1} (1 - t/theta^(q^i))
inline TateSeries omega_partial(const FieldCtx& ctx, long long T) {
    long long q = ctx.q();
    LaurentElem Wq_inv = branch_root(ctx).twist(1).inv();
    TateSeries acc = TateSeries::scalar(Wq_inv);
    for (long long qi = q; qi <= ctx.prec + T + 1; qi *= q) {
        TateSeries f = TateSeries::poly(
            ctx, {LaurentElem::one(ctx), -LaurentElem::theta_pow(ctx, -qi)});
        acc = acc * f;
    }
    std::vector<LaurentElem> cs;
    for (long long i = 0; i <= T; ++i) {
        LaurentElem c = i <= acc.t_trunc() ? acc.coeff(i) : LaurentElem::zero(ctx);
        c.clamp_floor(ctx.floor_num());
        cs.push_back(c);
    }
    return TateSeries::series(ctx, cs, T);
}

// 1/Omega as a truncated series: W^q * prod_{i>=1} sum_n t^n theta^(-n q^i)
inline TateSeries omega_inv_partial(const FieldCtx& ctx, long long T) {
    long long q = ctx.q();
    TateSeries acc = TateSeries::scalar(branch_root(ctx).twist(1));
    for (long long qi = q; qi <= ctx.prec + T + 1; qi *= q) {
        std::vector<LaurentElem> geo;
        for (long long n = 0; n <= T; ++n)
            geo.push_back(LaurentElem::theta_pow(ctx, -n * qi));
        acc = acc * TateSeries::series(ctx, std::move(geo), T);
    }
    std::vector<LaurentElem> cs;
    for (long long i = 0; i <= T; ++i) {
        LaurentElem c = acc.coeff(i);
        c.clamp_floor(ctx.floor_num());
        cs.push_back(c);
    }
    return TateSeries::series(ctx, cs, T);
}

// two-dimensional module with nilpotent upper part and a tau^2 tail, the
// running non-pure example across the suites
inline TModule asp_module(const FieldCtx& ctx) {
    const LaurentElem z = LaurentElem::zero(ctx);
    const LaurentElem o = LaurentElem::one(ctx);
    const LaurentElem t = LaurentElem::theta_pow(ctx, 1);
    Mat<LaurentElem> b0(2, 2, z), b1(2, 2, z), b2(2, 2, z);
    b0.at(0, 0) = t; b0.at(0, 1) = o; b0.at(1, 1) = t;
    b1.at(0, 0) = o; b1.at(1, 0) = o; b1.at(1, 1) = o;
    b2.at(0, 1) = o;
    return TModule(ctx, TwistedPoly(Side::Tau, {b0, b1, b2}),
                   Family::AlmostStrictlyPure);
}

// rank-two Drinfeld module assembled backwards from the prescribed t-torsion
// kernel span{u^a, u^b}, so both torsion slopes stay inside the coefficient
// lattice and the division towers below them never leave it
inline TModule split_rank2(const FieldCtx& ctx, long long a = 1, long long b = 2) {
    const GFq& F = ctx.gf;
    const long long q = ctx.q();
    LaurentElem x2 = LaurentElem::monomial(ctx, F.one(), b);
    LaurentElem h1 = LaurentElem::monomial(ctx, F.one(), a * (q - 1));
    LaurentElem hx2 = x2.twist(1) - h1 * x2;
    LaurentElem g1 = LaurentElem::one(ctx);
    for (long long i = 1; i < q; ++i) g1 = g1 * hx2;
    LaurentElem th = LaurentElem::theta_pow(ctx, 1);
    LaurentElem dinv = (g1 * h1).inv();
    return drinfeld(ctx, {-th * (h1.twist(1) + g1) * dinv, th * dinv});
}

// smallest certified residual valuation across coefficients, theta units
inline long long series_residual(const TateSeries& s) {
    long long v = LaurentElem::POS_INF;
    for (long long i = 0; i <= s.t_trunc(); ++i)
        v = std::min(v, residual_valuation(s.coeff(i)));
    return v;
}

inline long long series_residual(const Mat<TateSeries>& a, const Mat<TateSeries>& b) {
    Mat<TateSeries> d = a - b;
    long long v = LaurentElem::POS_INF;
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j)
            v = std::min(v, series_residual(d.at(i, j)));
    return v;
}

} // namespace th
