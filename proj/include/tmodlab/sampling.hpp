#pragma once

#include <random>

#include "tmodlab/laurent.hpp"
#include "tmodlab/tate.hpp"

// Deterministic random elements for property checks. All draws go through
// std::mt19937_64 with caller-held state so a seed pins the whole run.

namespace tmodlab {

inline gfe sample_gfe(const GFq& F, std::mt19937_64& rng, bool nonzero = false) {
    std::uniform_int_distribution<gfe> d(nonzero ? 1 : 0, F.q() - 1);
    return d(rng);
}

// Random element with exponents in the separable layer (multiples of q^k),
// confined to [lo, hi] theta-exponent units.
inline LaurentElem sample_laurent(const FieldCtx& ctx, std::mt19937_64& rng,
                                  int nterms, long long lo, long long hi,
                                  bool integral = false) {
    long long qk = 1;
    for (long long i = 0; i < ctx.k; ++i) qk *= ctx.q();
    long long step = integral ? ctx.M : qk;
    long long slo = lo * ctx.M / step, shi = hi * ctx.M / step;
    std::uniform_int_distribution<long long> de(slo, shi);
    LaurentElem r = LaurentElem::zero(ctx);
    for (int i = 0; i < nterms; ++i) {
        gfe c = sample_gfe(ctx.gf, rng, true);
        r = r + LaurentElem::monomial(ctx, c, de(rng) * step);
    }
    return r;
}

// Random exact polynomial in t with Laurent coefficients; each coefficient is
// drawn from sample_laurent. Suitable wherever tail certification should stay
// out of the picture.
inline TateSeries sample_tate_poly(const FieldCtx& ctx, std::mt19937_64& rng,
                                   int deg, int nterms, long long lo, long long hi,
                                   bool integral = false) {
    std::vector<LaurentElem> cs;
    cs.reserve(static_cast<std::size_t>(deg) + 1);
    for (int i = 0; i <= deg; ++i)
        cs.push_back(sample_laurent(ctx, rng, nterms, lo, hi, integral));
    return TateSeries::poly(ctx, std::move(cs));
}

} // namespace tmodlab
