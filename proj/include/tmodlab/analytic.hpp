#pragma once

// Analytic layer: Carlitz period constants, Anderson generating functions,
// additive polynomial roots, and period recovery through division towers.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmodlab/tate.hpp"
#include "tmodlab/tmodule.hpp"

namespace tmodlab {

namespace detail {

template <class X>
X pow_pos(X b, long long n) {
    X acc = b;
    for (long long i = 1; i < n; ++i) acc = acc * b;
    return acc;
}

inline Mat<TateSeries> lift_scalar(const Mat<LaurentElem>& m) {
    Mat<TateSeries> r(m.rows(), m.cols(), TateSeries());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            r.at(i, j) = TateSeries::scalar(m.at(i, j));
    return r;
}

// largest u-exponent present anywhere in the matrix; NEG_INF when every
// entry is zero to its floor
inline long long mat_lead_num(const Mat<LaurentElem>& m) {
    long long best = LaurentElem::NEG_INF;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m.at(i, j).is_zero())
                best = std::max(best, m.at(i, j).lead_num());
    return best;
}

inline bool mat_zero(const Mat<LaurentElem>& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m.at(i, j).is_zero()) return false;
    return true;
}

inline bool mat_exact_zero(const Mat<LaurentElem>& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m.at(i, j).is_exactly_zero()) return false;
    return true;
}

// size bound in u-exponents: a floor-limited coefficient counts at its
// floor, an exactly-zero one not at all
inline long long series_bound_num(const TateSeries& s) {
    long long m = LaurentElem::NEG_INF;
    for (long long i = 0; i <= s.t_trunc(); ++i) {
        long long v = s.coeff(i).val_lower_num();
        if (v != LaurentElem::POS_INF) m = std::max(m, -v);
    }
    return m;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Carlitz constants

struct CarlitzConstants {
    TateSeries omega;    // the entire product vanishing at t = theta^{q^i}
    LaurentElem pitilde; // fundamental period for the chosen root branch
    TateSeries aw_omega; // 1/((t - theta) * omega), generating function of pitilde
    long long product_depth = 0;
};

// Partial products of depth factors, truncated at t-degree T.  Every
// retained coefficient is clamped at the scale of the first omitted factor,
// so floors certify exactly what the partial product knows.
inline CarlitzConstants carlitz_constants(const FieldCtx& ctx, long long depth, long long T) {
    const GFq& F = ctx.gf;
    const long long q = ctx.q();
    if (ctx.e != q - 1)
        throw InsufficientRamification(
            "carlitz_constants: context lacks a (q-1)-st root of -theta");
    if (depth < 1 || T < 0)
        throw ConfigError("carlitz_constants: depth and truncation must be positive");

    const long long M = ctx.M;
    const long long qk = M / ctx.e;
    const LaurentElem one = LaurentElem::one(ctx);
    const LaurentElem W = LaurentElem::monomial(ctx, ctx.zeta, qk);

    // factors beyond the certification cutoff change nothing a retained cell
    // can see, so the loops stop there; the clamp scale is the first factor
    // actually omitted, not the requested depth
    const long long cutoff = ctx.prec + T + 2;

    LaurentElem prod = one;
    long long omit_pi = q;
    for (long long i = 1; i <= depth && omit_pi - 1 <= cutoff; ++i) {
        prod = prod * (one - LaurentElem::theta_pow(ctx, 1 - omit_pi));
        omit_pi *= q;
    }
    LaurentElem pit = -(detail::pow_pos(W, q) * prod.inv());
    pit.clamp_floor(pit.lead_num() - (omit_pi - 1) * M + 1);

    TateSeries Om = TateSeries::scalar(detail::pow_pos(W, q).inv());
    long long omit_om = q;
    for (long long i = 1; i <= depth && omit_om <= cutoff; ++i) {
        Om = Om * TateSeries::poly(ctx, {one, -LaurentElem::theta_pow(ctx, -omit_om)});
        if (Om.t_trunc() > T) Om = Om.retrunc(T);
        omit_om *= q;
    }
    Om = Om.retrunc(T);
    {
        const long long fl = -q * qk - omit_om * M + 1;
        std::vector<LaurentElem> cs;
        for (long long i = 0; i <= T; ++i) {
            LaurentElem c = Om.coeff(i);
            c.clamp_floor(fl);
            cs.push_back(c);
        }
        Om = TateSeries::series(ctx, std::move(cs), T);
    }

    // 1/((t - theta) * omega) expands as W^q times a product of geometric
    // series, one per factor
    std::vector<LaurentElem> gc;
    for (long long j = 0; j <= T; ++j) gc.push_back(-LaurentElem::theta_pow(ctx, -j - 1));
    TateSeries awo = TateSeries::series(ctx, std::move(gc), T);
    for (long long qi = q, i = 1; i <= depth && qi <= cutoff; ++i) {
        std::vector<LaurentElem> geo;
        for (long long j = 0; j <= T; ++j) geo.push_back(LaurentElem::theta_pow(ctx, -j * qi));
        awo = awo * TateSeries::series(ctx, std::move(geo), T);
        qi *= q;
    }
    awo = awo * TateSeries::scalar(detail::pow_pos(W, q));
    {
        const long long fl = qk - omit_om * M + 1;
        std::vector<LaurentElem> cs;
        for (long long i = 0; i <= T; ++i) {
            LaurentElem c = awo.coeff(i);
            c.clamp_floor(fl);
            cs.push_back(c);
        }
        awo = TateSeries::series(ctx, std::move(cs), T);
    }

    return CarlitzConstants{Om, pit, awo, depth};
}

// ---------------------------------------------------------------------------
// Anderson generating functions

struct AGFVector {
    Mat<TateSeries> series; // d x 1
    Mat<LaurentElem> y;     // the point the function interpolates
    long long n_terms = 0;
};

// Coefficient route: the t^n coefficient is the exponential evaluated at
// dphi_t^{-(n+1)} y.
inline AGFVector agf(const TModule& phi, const ExpSeries& E,
                     const Mat<LaurentElem>& y, long long T) {
    const FieldCtx& ctx = phi.ctx();
    if (y.rows() != phi.dim() || y.cols() != 1)
        throw DimMismatch("agf: point has wrong shape");
    if (T < 0) throw ConfigError("agf: negative truncation");

    const std::size_t d = phi.dim();
    if (detail::mat_exact_zero(y)) {
        Mat<TateSeries> s(d, 1, TateSeries::zero_poly(ctx));
        return AGFVector{s, y, T};
    }

    const Mat<LaurentElem> dinv = phi.dphi_t_inv();
    std::vector<std::vector<LaurentElem>> rows(d);
    Mat<LaurentElem> z = y;
    for (long long n = 0; n <= T; ++n) {
        z = dinv * z;
        Mat<LaurentElem> c = exp_eval(E, z, ctx);
        for (std::size_t r = 0; r < d; ++r) rows[r].push_back(c.at(r, 0));
    }
    Mat<TateSeries> s(d, 1, TateSeries::zero_poly(ctx));
    for (std::size_t r = 0; r < d; ++r)
        s.at(r, 0) = TateSeries::series(ctx, std::move(rows[r]), T);
    return AGFVector{s, y, T};
}

// (dphi_t - t I)^{-1} expanded as sum_n t^n dphi_t^{-(n+1)}
inline Mat<TateSeries> resolvent_series(const TModule& phi, long long T) {
    if (T < 0) throw ConfigError("resolvent_series: negative truncation");
    const FieldCtx& ctx = phi.ctx();
    const std::size_t d = phi.dim();
    const Mat<LaurentElem> dinv = phi.dphi_t_inv();

    std::vector<Mat<LaurentElem>> pw;
    pw.reserve(T + 1);
    pw.push_back(dinv);
    for (long long n = 1; n <= T; ++n) pw.push_back(pw.back() * dinv);

    Mat<TateSeries> G(d, d, TateSeries());
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            std::vector<LaurentElem> cs;
            cs.reserve(T + 1);
            for (long long n = 0; n <= T; ++n) cs.push_back(pw[n].at(r, c));
            G.at(r, c) = TateSeries::series(ctx, std::move(cs), T);
        }
    return G;
}

// Summation route: sum_i C_i ((dphi_t - t I)^{-1})^(i) y^(i).  The dropped
// i-tail is certified by the decay of the retained terms and folded into
// the coefficient floors.
inline AGFVector agf_sum_form(const TModule& phi, const ExpSeries& E,
                              const Mat<LaurentElem>& y, long long T) {
    const FieldCtx& ctx = phi.ctx();
    if (y.rows() != phi.dim() || y.cols() != 1)
        throw DimMismatch("agf_sum_form: point has wrong shape");
    if (T < 0) throw ConfigError("agf_sum_form: negative truncation");

    const std::size_t d = phi.dim();
    if (detail::mat_exact_zero(y)) {
        Mat<TateSeries> s(d, 1, TateSeries::zero_poly(ctx));
        return AGFVector{s, y, T};
    }

    const Mat<TateSeries> G = resolvent_series(phi, T);
    const long long imax = E.imax();

    Mat<TateSeries> acc(d, 1, TateSeries::zero_poly(ctx));
    std::vector<long long> leads; // max u-exponent of term i, NEG_INF if silent
    for (long long i = 0; i <= imax; ++i) {
        Mat<TateSeries> Gi = G.map([&](const TateSeries& s) { return s.twist(i); });
        Mat<TateSeries> term = detail::lift_scalar(E.C[static_cast<std::size_t>(i)]) * Gi *
                               detail::lift_scalar(y.map([&](const LaurentElem& x) {
                                   return x.twist(i);
                               }));
        long long lead = LaurentElem::NEG_INF;
        for (std::size_t r = 0; r < d; ++r)
            lead = std::max(lead, detail::series_bound_num(term.at(r, 0)));
        leads.push_back(lead);
        acc = acc + term;
    }

    // tail certificate: terms visible above the floor must decay strictly
    const long long res_floor = ctx.floor_num();
    const long long Wn = std::max<long long>(2, (imax + 4) / 4);
    long long lo = std::max<long long>(0, imax - Wn + 1);
    std::vector<long long> vis;
    for (long long i = lo; i <= imax; ++i)
        if (leads[static_cast<std::size_t>(i)] >= res_floor)
            vis.push_back(i);
    if (vis.size() == 1) {
        for (long long i = lo - 1; i >= 0; --i)
            if (leads[static_cast<std::size_t>(i)] >= res_floor) {
                vis.insert(vis.begin(), i);
                break;
            }
    }
    long long fl = res_floor; // all-quiet tail contributes below the floor
    if (!vis.empty()) {
        long long delta = LaurentElem::POS_INF;
        for (std::size_t k = 0; k + 1 < vis.size(); ++k) {
            long long a = leads[static_cast<std::size_t>(vis[k])];
            long long b = leads[static_cast<std::size_t>(vis[k + 1])];
            long long gap = vis[k + 1] - vis[k];
            if (b >= a) throw DivergentTail("agf_sum_form: twisted terms do not decay");
            delta = std::min(delta, (a - b) / gap);
        }
        if (delta == LaurentElem::POS_INF) delta = ctx.M;
        long long last = leads[static_cast<std::size_t>(vis.back())];
        fl = std::max(res_floor, last - delta + 1);
    }
    Mat<TateSeries> out(d, 1, TateSeries::zero_poly(ctx));
    for (std::size_t r = 0; r < d; ++r) {
        std::vector<LaurentElem> cs;
        for (long long n = 0; n <= T; ++n) {
            LaurentElem c = acc.at(r, 0).coeff(n);
            c.clamp_floor(fl);
            cs.push_back(c);
        }
        out.at(r, 0) = TateSeries::series(ctx, std::move(cs), T);
    }
    return AGFVector{out, y, T};
}

// ---------------------------------------------------------------------------
// Principal part at t = theta

// The polar part comes from the i = 0 summand alone: conjugate to the
// nilpotent normal form, read the pole coefficients off the block
// resolvent, and conjugate back.  Coefficient -1 always carries -y.
inline std::vector<ThetaLaurent> agf_principal_part(const TModule& phi,
                                                    const Mat<LaurentElem>& y) {
    const FieldCtx& ctx = phi.ctx();
    if (y.rows() != phi.dim() || y.cols() != 1)
        throw DimMismatch("agf_principal_part: point has wrong shape");

    const std::size_t d = phi.dim();
    JordanData jd = jordanize(phi);
    Mat<LaurentElem> z = inverse(jd.Q, ctx) * y;

    std::vector<ThetaLaurent> blockwise(d);
    std::size_t off = 0;
    for (std::size_t L : jd.blocks) {
        for (std::size_t r = 0; r < L; ++r) {
            ThetaLaurent pl;
            pl.order_trunc = -1; // polar coefficients only
            for (std::size_t h = 1; h + r <= L; ++h)
                pl.coeffs.emplace(-static_cast<long long>(h), -z.at(off + r + h - 1, 0));
            blockwise[off + r] = std::move(pl);
        }
        off += L;
    }

    std::vector<ThetaLaurent> out(d);
    for (std::size_t a = 0; a < d; ++a) {
        ThetaLaurent s;
        s.order_trunc = -1;
        for (std::size_t b = 0; b < d; ++b)
            for (const auto& [j, c] : blockwise[b].coeffs) {
                LaurentElem v = jd.Q.at(a, b) * c;
                auto it = s.coeffs.find(j);
                if (it == s.coeffs.end())
                    s.coeffs.emplace(j, std::move(v));
                else
                    it->second = it->second + v;
            }
        for (auto it = s.coeffs.begin(); it != s.coeffs.end();) {
            if (it->second.is_exactly_zero())
                it = s.coeffs.erase(it);
            else
                ++it;
        }
        out[a] = std::move(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Roots of additive polynomials

// f(x) = sum_i a[i] x^{q^i} with a[0] invertible.  Returns the nonzero
// roots whose leading u-exponent lies in [lo_num, hi_num] and whose
// expansion stays inside the coefficient lattice.  The root set of each
// slope is a line over the base field, so one representative per usable
// polygon edge is refined and the span is enumerated afterwards.
inline std::vector<LaurentElem> additive_root_basis(const std::vector<LaurentElem>& a,
                                                    long long lo_num, long long hi_num) {
    if (a.size() < 2) throw ConfigError("additive_root_basis: need at least two terms");
    const FieldCtx& ctx = a[0].ctx();
    const GFq& F = ctx.gf;
    const long long q = ctx.q();
    if (a[0].is_zero())
        throw ConfigError("additive_root_basis: linear coefficient must be invertible");

    std::vector<long long> idx, n, qp;
    for (std::size_t i = 0, p = 1; i < a.size(); ++i, p *= q)
        if (!a[i].is_zero()) {
            idx.push_back(static_cast<long long>(i));
            n.push_back(a[i].lead_num());
            qp.push_back(static_cast<long long>(p));
        }

    auto feval = [&](const LaurentElem& x) {
        LaurentElem r = LaurentElem::zero(ctx);
        for (std::size_t s = 0; s < idx.size(); ++s)
            r = r + a[static_cast<std::size_t>(idx[s])] * x.twist(idx[s]);
        return r;
    };

    // candidate slopes from pairs of polygon vertices
    std::map<long long, bool> slopes;
    for (std::size_t s = 0; s < idx.size(); ++s)
        for (std::size_t t = s + 1; t < idx.size(); ++t) {
            long long den = qp[t] - qp[s];
            long long num = n[s] - n[t];
            if (num % den != 0) continue; // slope leaves the exponent lattice
            long long m = num / den;
            if (m < lo_num || m > hi_num) continue;
            long long top = LaurentElem::NEG_INF;
            for (std::size_t k = 0; k < idx.size(); ++k)
                top = std::max(top, n[k] + qp[k] * m);
            if (n[s] + qp[s] * m != top) continue; // pair is not on the envelope
            gfe sigma = F.zero();
            for (std::size_t k = 0; k < idx.size(); ++k)
                if (n[k] + qp[k] * m == top) sigma = F.add(sigma, a[idx[k]].lead_coeff());
            slopes[m] = (sigma == F.zero());
        }

    std::vector<LaurentElem> basis;
    for (const auto& [m, usable] : slopes) {
        if (!usable) continue; // roots on this slope need residue extensions
        LaurentElem x = LaurentElem::monomial(ctx, F.one(), m);
        LaurentElem r = feval(x);
        long long guard = (m - ctx.floor_num()) + 64;
        bool ok = true;
        while (!r.is_zero()) {
            if (--guard < 0) { ok = false; break; }
            const long long rm = r.lead_num();
            // candidate correction scales, smallest first; each must be a
            // lattice exponent and must strictly shrink the residual
            std::vector<std::pair<long long, long long>> cand; // (scale, term index)
            for (std::size_t k = 0; k < idx.size(); ++k) {
                long long diff = rm - n[k];
                long long s = (diff >= 0) ? diff / qp[k]
                                          : -((-diff + qp[k] - 1) / qp[k]);
                if (s * qp[k] == diff) cand.emplace_back(s, static_cast<long long>(k));
            }
            std::sort(cand.begin(), cand.end());
            bool stepped = false;
            for (const auto& [s, k] : cand) {
                if (s >= x.lead_num()) break; // correction would not be a tail
                gfe ck = F.zero();
                for (std::size_t k2 = 0; k2 < idx.size(); ++k2)
                    if (n[k2] + qp[k2] * s == rm) ck = F.add(ck, a[idx[k2]].lead_coeff());
                if (ck == F.zero()) continue;
                gfe c = F.mul(F.neg(r.lead_coeff()), F.inv(ck));
                LaurentElem xn = x + LaurentElem::monomial(ctx, c, s);
                LaurentElem rn = feval(xn);
                if (rn.is_zero() || rn.lead_num() < rm) {
                    x = std::move(xn);
                    r = std::move(rn);
                    stepped = true;
                    break;
                }
            }
            if (!stepped) { ok = false; break; }
        }
        if (ok) basis.push_back(x);
    }
    return basis;
}

inline std::vector<LaurentElem> additive_roots(const std::vector<LaurentElem>& a,
                                               long long lo_num, long long hi_num) {
    const std::vector<LaurentElem> basis = additive_root_basis(a, lo_num, hi_num);
    if (basis.empty())
        throw NoRootInRange("additive_roots: no representable root in range");
    const FieldCtx& ctx = a[0].ctx();
    const GFq& F = ctx.gf;
    const long long q = ctx.q();

    std::vector<LaurentElem> roots;
    std::vector<gfe> digits(basis.size(), F.zero());
    for (;;) {
        std::size_t p = 0;
        while (p < digits.size()) {
            digits[p] = static_cast<gfe>(digits[p] + 1);
            if (digits[p] < static_cast<gfe>(q)) break;
            digits[p] = F.zero();
            ++p;
        }
        if (p == digits.size()) break;
        LaurentElem x = LaurentElem::zero(ctx);
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (digits[i] != F.zero()) x = x + basis[i].scaled(digits[i]);
        roots.push_back(std::move(x));
    }
    return roots;
}

// ---------------------------------------------------------------------------
// Division towers and periods

struct DivisionTower {
    std::vector<Mat<LaurentElem>> xs; // x_0 ... x_N
    Mat<LaurentElem> base;            // phi_t(x_0) = base
};

// Smallest solution z of phi_t(z) = target, by the contraction
// z <- dphi_t^{-1} (target - sum_{i>=1} B_i z^(i)).
inline Mat<LaurentElem> division_step(const TModule& phi, const Mat<LaurentElem>& target) {
    const FieldCtx& ctx = phi.ctx();
    const Mat<LaurentElem> dinv = phi.dphi_t_inv();
    const TwistedPoly& pt = phi.phi_t();

    auto next = [&](const Mat<LaurentElem>& z) {
        Mat<LaurentElem> acc = target;
        for (std::size_t i = 1; i <= pt.degree(); ++i)
            acc = acc - pt.coeff(i) * z.map([&](const LaurentElem& x) {
                return x.twist(static_cast<long long>(i));
            });
        return dinv * acc;
    };

    auto settle = [&](Mat<LaurentElem> zn, long long fl) {
        if (fl != LaurentElem::NEG_INF)
            zn = zn.map([&](const LaurentElem& c) {
                LaurentElem r = c;
                r.clamp_floor(fl);
                return r;
            });
        Mat<LaurentElem> res = phi.act(pt, zn) - target;
        if (!detail::mat_zero(res))
            throw PrecisionExhausted("division_step: fixed point is not a division");
        return zn;
    };

    Mat<LaurentElem> z = dinv * target;
    long long prev = LaurentElem::POS_INF;
    for (int it = 0; it < 256; ++it) {
        Mat<LaurentElem> zn = next(z);
        Mat<LaurentElem> dz = zn - z;
        if (detail::mat_zero(dz)) return settle(std::move(zn), LaurentElem::NEG_INF);
        long long dl = detail::mat_lead_num(dz);
        // once the movement is below working resolution the remaining
        // corrections are strictly smaller still
        if (dl < ctx.floor_num()) return settle(std::move(zn), dl);
        if (prev != LaurentElem::POS_INF && dl >= prev)
            throw TowerDiverges("division_step: iteration is not contracting");
        prev = dl;
        z = std::move(zn);
    }
    throw TowerDiverges("division_step: failed to stabilize");
}

inline DivisionTower division_tower(const TModule& phi, const Mat<LaurentElem>& x,
                                    long long N,
                                    const std::optional<Mat<LaurentElem>>& bootstrap = {}) {
    if (x.rows() != phi.dim() || x.cols() != 1)
        throw DimMismatch("division_tower: point has wrong shape");
    if (N < 1) throw ConfigError("division_tower: need at least one level");

    DivisionTower tw;
    tw.base = x;
    if (bootstrap) {
        Mat<LaurentElem> res = phi.act(phi.phi_t(), *bootstrap) - x;
        if (!detail::mat_zero(res))
            throw NotASolution("division_tower: bootstrap does not divide the base point");
        tw.xs.push_back(*bootstrap);
    } else {
        tw.xs.push_back(division_step(phi, x));
    }
    for (long long nn = 1; nn <= N; ++nn)
        tw.xs.push_back(division_step(phi, tw.xs.back()));
    return tw;
}

// u = lim dphi_t^{n+1} x_n, with the floor of the result clamped at the
// scale of the last observed movement
inline Mat<LaurentElem> tower_limit(const TModule& phi, const DivisionTower& tw) {
    if (tw.xs.size() < 3) throw ConfigError("tower_limit: tower is too short");
    const Mat<LaurentElem> dphi = phi.dphi_t();

    std::vector<Mat<LaurentElem>> us;
    Mat<LaurentElem> P = dphi;
    for (const Mat<LaurentElem>& xn : tw.xs) {
        us.push_back(P * xn);
        P = P * dphi;
    }

    std::vector<long long> dl;
    for (std::size_t i = 0; i + 1 < us.size(); ++i)
        dl.push_back(detail::mat_lead_num(us[i + 1] - us[i]));
    std::size_t checked = std::min<std::size_t>(3, dl.size());
    for (std::size_t i = dl.size() - checked; i + 1 < dl.size(); ++i) {
        if (dl[i] == LaurentElem::NEG_INF) continue;
        if (dl[i + 1] >= dl[i])
            throw TowerDiverges("tower_limit: images do not converge");
    }

    Mat<LaurentElem> u = us.back();
    if (dl.back() != LaurentElem::NEG_INF)
        u = u.map([&](const LaurentElem& c) {
            LaurentElem r = c;
            r.clamp_floor(dl.back() + 1);
            return r;
        });
    return u;
}

// ---------------------------------------------------------------------------
// Period lattices

enum class PeriodMethod { towers, carlitz_closed_form, from_psi };

struct PeriodLattice {
    std::vector<Mat<LaurentElem>> generators;
    std::string provenance;
};

// Stack of divided derivatives of the inverse product series, evaluated at
// t = theta; the bottom entry is the n-th power of the period.
inline Mat<LaurentElem> tensor_period_stack(const FieldCtx& ctx, std::size_t n,
                                            const CarlitzConstants& cc) {
    if (n == 0) throw ConfigError("tensor_period_stack: power must be positive");
    TateSeries om_inv = TateSeries::t_minus_theta(ctx) * cc.aw_omega;
    TateSeries f = detail::pow_pos(om_inv, static_cast<long long>(n));
    if (n % 2 == 1) f = f.scaled(ctx.gf.neg(ctx.gf.one()));
    Mat<TateSeries> col = partial_col_t(f, n);
    Mat<LaurentElem> out(n, 1, LaurentElem::zero(ctx));
    for (std::size_t i = 0; i < n; ++i) out.at(i, 0) = col.at(i, 0).eval_at_theta();
    return out;
}

inline PeriodLattice period_lattice(const TModule& phi, PeriodMethod method,
                                    long long N, long long T) {
    const FieldCtx& ctx = phi.ctx();
    const long long q = ctx.q();

    if (method == PeriodMethod::carlitz_closed_form) {
        if (phi.family() != Family::CarlitzTensor)
            throw UnsupportedFamily("period_lattice: closed form needs a Carlitz power");
        long long depth = 1;
        for (long long b = q; b - 1 <= ctx.prec + 2; b *= q) ++depth;
        CarlitzConstants cc = carlitz_constants(ctx, depth, std::max<long long>(T, static_cast<long long>(phi.dim()) + 2));
        PeriodLattice L;
        L.provenance = "closed_form";
        if (phi.dim() == 1) {
            Mat<LaurentElem> g(1, 1, cc.pitilde);
            L.generators.push_back(std::move(g));
        } else {
            L.generators.push_back(tensor_period_stack(ctx, phi.dim(), cc));
        }
        return L;
    }

    if (method == PeriodMethod::towers) {
        if (phi.dim() != 1)
            throw UnsupportedFamily("period_lattice: towers need a one-dimensional module");
        std::vector<LaurentElem> coeffs;
        for (std::size_t i = 0; i <= phi.tau_degree(); ++i)
            coeffs.push_back(phi.phi_t().coeff(i).at(0, 0));
        const long long span = ctx.prec * ctx.M;
        std::vector<LaurentElem> basis = additive_root_basis(coeffs, -span, span);
        if (basis.empty())
            throw NotUniformizableEvidence("period_lattice: no representable torsion to bootstrap");

        PeriodLattice L;
        L.provenance = "tower";
        Mat<LaurentElem> zero(1, 1, LaurentElem::zero(ctx));
        for (const LaurentElem& b : basis) {
            Mat<LaurentElem> bm(1, 1, b);
            DivisionTower tw = division_tower(phi, zero, N, bm);
            Mat<LaurentElem> lam = tower_limit(phi, tw);
            if (lam.at(0, 0).is_zero())
                throw NotUniformizableEvidence("period_lattice: tower limit vanished");
            L.generators.push_back(std::move(lam));
        }
        // leading-term rank at the truncation: distinct exponent classes mod
        // the lattice period certify independence over the scalar ring
        for (std::size_t i = 0; i < L.generators.size(); ++i)
            for (std::size_t j = i + 1; j < L.generators.size(); ++j) {
                long long a = L.generators[i].at(0, 0).lead_num() % ctx.M;
                long long b = L.generators[j].at(0, 0).lead_num() % ctx.M;
                if ((a - b) % ctx.M == 0)
                    throw NotUniformizableEvidence(
                        "period_lattice: generators collide at leading order");
            }
        return L;
    }

    throw ConfigError("period_lattice: trivialization route needs frame data");
}

} // namespace tmodlab
