#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "tmodlab/sampling.hpp"
#include "tmodlab/tmodule.hpp"

#include "helpers.hpp"

using namespace tmodlab;

namespace {

Mat<LaurentElem> mat2(const FieldCtx& ctx, std::vector<std::vector<LaurentElem>> rows) {
    Mat<LaurentElem> m(rows.size(), rows[0].size(), LaurentElem::zero(ctx));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = rows[i][j];
    return m;
}

bool mat_is_zero(const Mat<LaurentElem>& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m.at(i, j).is_zero()) return false;
    return true;
}

TwistedPoly sample_twisted(const FieldCtx& ctx, std::mt19937_64& rng, std::size_t d,
                           int deg) {
    std::vector<Mat<LaurentElem>> cs;
    for (int k = 0; k <= deg; ++k) {
        Mat<LaurentElem> m(d, d, LaurentElem::zero(ctx));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                m.at(i, j) = sample_laurent(ctx, rng, 2, -2, 2, true);
        cs.push_back(m);
    }
    return TwistedPoly(Side::Tau, std::move(cs));
}

// fixture with invertible top coefficient and a tau^2 defect in between
TModule asp_fixture(const FieldCtx& ctx) {
    LaurentElem th = LaurentElem::theta_pow(ctx, 1);
    LaurentElem o = LaurentElem::one(ctx);
    LaurentElem z = LaurentElem::zero(ctx);
    Mat<LaurentElem> B0 = mat2(ctx, {{th, o}, {z, th}});
    Mat<LaurentElem> B1 = mat2(ctx, {{o, z}, {o, o}});
    Mat<LaurentElem> B2 = mat2(ctx, {{z, o}, {z, z}});
    return TModule(ctx, TwistedPoly(Side::Tau, {B0, B1, B2}), Family::AlmostStrictlyPure);
}

TModule strictly_pure_2x2(const FieldCtx& ctx) {
    LaurentElem th = LaurentElem::theta_pow(ctx, 1);
    LaurentElem o = LaurentElem::one(ctx);
    LaurentElem z = LaurentElem::zero(ctx);
    Mat<LaurentElem> B0 = mat2(ctx, {{th, o}, {z, th}});
    Mat<LaurentElem> B1 = Mat<LaurentElem>::identity(2, z, o);
    return TModule(ctx, TwistedPoly(Side::Tau, {B0, B1}), Family::StrictlyPure);
}

std::vector<gfe> poly_mul_fq(const GFq& F, const std::vector<gfe>& a,
                             const std::vector<gfe>& b) {
    std::vector<gfe> c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = F.add(c[i + j], F.mul(a[i], b[j]));
    return c;
}

} // namespace

TEST_CASE("star is an involutive anti-isomorphism between the twist sides") {
    for (int q : {2, 3, 4}) {
        const FieldCtx& ctx = th::twist_ctx(q, 3);
        std::mt19937_64 rng(7000 + q);
        for (int rep = 0; rep < 5; ++rep) {
            TwistedPoly a = sample_twisted(ctx, rng, 2, 2);
            TwistedPoly b = sample_twisted(ctx, rng, 2, 1);

            TwistedPoly as = a.star();
            REQUIRE(as.side() == Side::Sigma);
            REQUIRE(as.star() == a);
            REQUIRE((a * b).star() == b.star() * a.star());
            REQUIRE(as.dpart() == a.dpart().transpose());
        }
    }
}

TEST_CASE("star refuses twists that leave the exponent lattice") {
    const FieldCtx& ctx = th::carlitz_ctx(3);
    Mat<LaurentElem> z(1, 1, LaurentElem::zero(ctx));
    Mat<LaurentElem> th1(1, 1, LaurentElem::theta_pow(ctx, 1));
    TwistedPoly p(Side::Tau, {z, th1});
    REQUIRE_THROWS_AS(p.star(), InseparableTwist);
}

TEST_CASE("phi_a is a ring homomorphism from F_q[t]") {
    for (int q : {2, 3, 4}) {
        const FieldCtx& ctx = th::carlitz_ctx(q);
        const GFq& F = ctx.gf;
        LaurentElem thq = LaurentElem::theta_pow(ctx, 1);
        std::vector<TModule> mods;
        mods.push_back(carlitz(ctx));
        mods.push_back(carlitz_tensor(ctx, 2));
        mods.push_back(drinfeld(ctx, {thq, LaurentElem::one(ctx)}));
        mods.push_back(asp_fixture(ctx));

        std::mt19937_64 rng(8000 + q);
        for (const TModule& phi : mods) {
            // unit and generator
            REQUIRE(phi.phi_a({F.one()}) ==
                    TwistedPoly::identity(Side::Tau, phi.dim(), ctx));
            REQUIRE(phi.phi_a({0, F.one()}) == phi.phi_t());

            for (int rep = 0; rep < 4; ++rep) {
                std::vector<gfe> a(4), b(4);
                for (auto& c : a) c = sample_gfe(F, rng);
                for (auto& c : b) c = sample_gfe(F, rng);
                a.back() = sample_gfe(F, rng, true);
                b.back() = sample_gfe(F, rng, true);

                std::vector<gfe> ab = poly_mul_fq(F, a, b);
                REQUIRE(phi.phi_a(ab) == phi.phi_a(a) * phi.phi_a(b));

                std::vector<gfe> s(4);
                for (int i = 0; i < 4; ++i) s[i] = F.add(a[i], b[i]);
                REQUIRE(phi.phi_a(s) == phi.phi_a(a) + phi.phi_a(b));
            }
        }
    }
}

TEST_CASE("t^2 action on the almost strictly pure fixture matches hand expansion") {
    for (int q : {2, 3, 4}) {
        const FieldCtx& ctx = th::carlitz_ctx(q);
        const GFq& F = ctx.gf;
        TModule phi = asp_fixture(ctx);

        LaurentElem th = LaurentElem::theta_pow(ctx, 1);
        LaurentElem thq = th.twist(1);
        LaurentElem thqq = th.twist(2);
        LaurentElem o = LaurentElem::one(ctx);
        LaurentElem z = LaurentElem::zero(ctx);
        LaurentElem two = LaurentElem::from_int(ctx, 2);
        LaurentElem th2 = LaurentElem::theta_pow(ctx, 2);

        Mat<LaurentElem> A0 = mat2(ctx, {{th2, two * th}, {z, th2}});
        Mat<LaurentElem> A1 =
            mat2(ctx, {{thq + th + o, two}, {thq + th, thq + th + o}});
        Mat<LaurentElem> A2 = mat2(ctx, {{o, thqq + th}, {two, o}});
        Mat<LaurentElem> A3 = mat2(ctx, {{o, two}, {z, o}});

        TwistedPoly t2 = phi.phi_a({0, 0, F.one()});
        REQUIRE(t2 == TwistedPoly(Side::Tau, {A0, A1, A2, A3}));
    }
}

TEST_CASE("exponential coefficients satisfy the twisted ladder") {
    for (int q : {2, 3, 4}) {
        const FieldCtx& ctx = th::carlitz_ctx(q);
        TModule phi = carlitz(ctx);
        ExpSeries E = exp_solve(phi, 5);

        LaurentElem th = LaurentElem::theta_pow(ctx, 1);
        REQUIRE(E.C[1].at(0, 0) == (th.twist(1) - th).inv());

        for (long long i = 1; i <= 5; ++i) {
            LaurentElem lhs = E.C[static_cast<std::size_t>(i)].at(0, 0) *
                              (th.twist(i) - th);
            LaurentElem rhs = E.C[static_cast<std::size_t>(i - 1)].at(0, 0).twist(1);
            REQUIRE((lhs - rhs).is_zero());
        }
    }
}

TEST_CASE("first exponential coefficient agrees with a dense linear solve") {
    for (int q : {2, 3, 4}) {
        const FieldCtx& ctx = th::carlitz_ctx(q);
        TModule phi = carlitz_tensor(ctx, 2);
        ExpSeries E = exp_solve(phi, 1);

        // flatten C (d phi_t)^(1) - d phi_t C = B_1 into a 4x4 system
        Mat<LaurentElem> d0 = phi.dphi_t();
        Mat<LaurentElem> d1 = d0.map([](const LaurentElem& x) { return x.twist(1); });
        const Mat<LaurentElem>& B1 = phi.phi_t().coeff(1);

        Mat<LaurentElem> aug(4, 5, LaurentElem::zero(ctx));
        auto idx = [](std::size_t a, std::size_t b) { return 2 * a + b; };
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) {
                for (std::size_t e = 0; e < 2; ++e)
                    aug.at(idx(a, b), idx(a, e)) =
                        aug.at(idx(a, b), idx(a, e)) + d1.at(e, b);
                for (std::size_t c = 0; c < 2; ++c)
                    aug.at(idx(a, b), idx(c, b)) =
                        aug.at(idx(a, b), idx(c, b)) - d0.at(a, c);
                aug.at(idx(a, b), 4) = B1.at(a, b);
            }
        REQUIRE(row_reduce(aug) == 4);

        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) {
                LaurentElem diff = aug.at(idx(a, b), 4) - E.C[1].at(a, b);
                REQUIRE(diff.is_zero());
            }
    }
}

TEST_CASE("exponential coefficients satisfy the functional equation") {
    for (int q : {2, 3, 4}) {
        const FieldCtx& ctx = th::carlitz_ctx(q);
        LaurentElem thq = LaurentElem::theta_pow(ctx, 1);
        std::vector<TModule> mods;
        mods.push_back(carlitz(ctx));
        mods.push_back(carlitz_tensor(ctx, 2));
        mods.push_back(carlitz_tensor(ctx, 3));
        mods.push_back(drinfeld(ctx, {thq, LaurentElem::one(ctx)}));
        mods.push_back(asp_fixture(ctx));
        mods.push_back(strictly_pure_2x2(ctx));

        for (const TModule& phi : mods) {
            ExpSeries E = exp_solve(phi, 6);
            for (const auto& resid : exp_functional_residual(phi, E))
                REQUIRE(mat_is_zero(resid));
        }
    }
}

TEST_CASE("logarithm coefficients invert the exponential on both sides") {
    for (int q : {2, 3, 4}) {
        const FieldCtx& ctx = th::carlitz_ctx(q);
        LaurentElem thq = LaurentElem::theta_pow(ctx, 1);
        std::vector<TModule> mods;
        mods.push_back(carlitz(ctx));
        mods.push_back(carlitz_tensor(ctx, 2));
        mods.push_back(drinfeld(ctx, {thq, LaurentElem::one(ctx)}));
        mods.push_back(asp_fixture(ctx));

        for (const TModule& phi : mods) {
            ExpSeries E = exp_solve(phi, 6);
            LogSeries L = log_from_exp(E, ctx);
            std::size_t d = phi.dim();
            for (long long k = 1; k <= 6; ++k) {
                Mat<LaurentElem> expo_log(d, d, LaurentElem::zero(ctx));
                Mat<LaurentElem> log_expo(d, d, LaurentElem::zero(ctx));
                for (long long j = 0; j <= k; ++j) {
                    auto Dt = L.D[static_cast<std::size_t>(k - j)].map(
                        [&](const LaurentElem& x) { return x.twist(j); });
                    expo_log = expo_log + E.C[static_cast<std::size_t>(j)] * Dt;
                    auto Ct = E.C[static_cast<std::size_t>(k - j)].map(
                        [&](const LaurentElem& x) { return x.twist(j); });
                    log_expo = log_expo + L.D[static_cast<std::size_t>(j)] * Ct;
                }
                REQUIRE(mat_is_zero(expo_log));
                REQUIRE(mat_is_zero(log_expo));
            }
        }
    }
}

TEST_CASE("series evaluation certifies decay and round-trips") {
    for (int q : {2, 3, 4}) {
        const FieldCtx& ctx = th::carlitz_ctx(q);
        TModule phi = carlitz_tensor(ctx, 2);
        ExpSeries E = exp_solve(phi, 8);
        LogSeries L = log_from_exp(E, ctx);

        SECTION("zero maps to zero exactly") {
            Mat<LaurentElem> z(2, 1, LaurentElem::zero(ctx));
            Mat<LaurentElem> r = exp_eval(E, z, ctx);
            for (std::size_t i = 0; i < 2; ++i) REQUIRE(r.at(i, 0).is_exactly_zero());
        }

        SECTION("log after exp returns the argument") {
            Mat<LaurentElem> y(2, 1, LaurentElem::zero(ctx));
            y.at(0, 0) = LaurentElem::theta_pow(ctx, -1);
            y.at(1, 0) = LaurentElem::theta_pow(ctx, -2, ctx.gf.from_int(1));
            Mat<LaurentElem> z = exp_eval(E, y, ctx);
            Mat<LaurentElem> back = log_eval(L, z, ctx);
            for (std::size_t i = 0; i < 2; ++i) {
                LaurentElem diff = back.at(i, 0) - y.at(i, 0);
                REQUIRE(diff.is_zero());
                REQUIRE(residual_valuation(diff) >= 30);
            }
        }

        SECTION("functional equation holds numerically") {
            Mat<LaurentElem> y(2, 1, LaurentElem::zero(ctx));
            y.at(0, 0) = LaurentElem::theta_pow(ctx, -1);
            y.at(1, 0) = LaurentElem::theta_pow(ctx, -1);
            Mat<LaurentElem> lhs = exp_eval(E, phi.apply_dphi(y), ctx);
            Mat<LaurentElem> rhs = phi.act(phi.phi_t(), exp_eval(E, y, ctx));
            for (std::size_t i = 0; i < 2; ++i) {
                LaurentElem diff = lhs.at(i, 0) - rhs.at(i, 0);
                REQUIRE(diff.is_zero());
                REQUIRE(residual_valuation(diff) >= 40);
            }
        }
    }
}

TEST_CASE("logarithm evaluation refuses arguments outside its radius") {
    for (int q : {2, 3, 4}) {
        const FieldCtx& ctx = th::carlitz_ctx(q);
        TModule phi = carlitz(ctx);
        LogSeries L = log_solve(phi, 8);
        Mat<LaurentElem> y(1, 1, LaurentElem::theta_pow(ctx, 2));
        REQUIRE_THROWS_AS(log_eval(L, y, ctx), OutsideRadius);
    }
}

TEST_CASE("jordanize recovers the block structure of the d part") {
    SECTION("single full block, already in normal form") {
        const FieldCtx& ctx = th::carlitz_ctx(3);
        TModule phi = carlitz_tensor(ctx, 3);
        JordanData J = jordanize(phi);
        REQUIRE(J.blocks == std::vector<std::size_t>{3});
        Mat<LaurentElem> I =
            Mat<LaurentElem>::identity(3, LaurentElem::zero(ctx), LaurentElem::one(ctx));
        REQUIRE(J.Q == I);
    }

    SECTION("fixture d part is one block of size two") {
        const FieldCtx& ctx = th::carlitz_ctx(2);
        TModule phi = asp_fixture(ctx);
        JordanData J = jordanize(phi);
        REQUIRE(J.blocks == std::vector<std::size_t>{2});
        Mat<LaurentElem> I =
            Mat<LaurentElem>::identity(2, LaurentElem::zero(ctx), LaurentElem::one(ctx));
        REQUIRE(J.Q == I);
    }

    SECTION("random constant conjugates are recognized") {
        for (int q : {2, 3, 4}) {
            const FieldCtx& ctx = th::carlitz_ctx(q);
            std::mt19937_64 rng(9000 + q);
            TModule base = carlitz_tensor(ctx, 3);

            Mat<LaurentElem> S(3, 3, LaurentElem::zero(ctx));
            while (true) {
                for (std::size_t i = 0; i < 3; ++i)
                    for (std::size_t j = 0; j < 3; ++j)
                        S.at(i, j) =
                            LaurentElem::monomial(ctx, sample_gfe(ctx.gf, rng), 0);
                Mat<LaurentElem> probe = S;
                if (row_reduce(probe) == 3) break;
            }
            Mat<LaurentElem> Sinv = inverse(S, ctx);

            std::vector<Mat<LaurentElem>> cs;
            for (const auto& B : base.phi_t().coeffs()) cs.push_back(S * B * Sinv);
            TModule conj(ctx, TwistedPoly(Side::Tau, std::move(cs)), Family::Custom);

            JordanData J = jordanize(conj);
            REQUIRE(J.blocks == std::vector<std::size_t>{3});

            // Q conjugates the normal form back to d phi_t
            Mat<LaurentElem> Jm(3, 3, LaurentElem::zero(ctx));
            LaurentElem th = LaurentElem::theta_pow(ctx, 1);
            for (std::size_t i = 0; i < 3; ++i) {
                Jm.at(i, i) = th;
                if (i + 1 < 3) Jm.at(i, i + 1) = LaurentElem::one(ctx);
            }
            REQUIRE(mat_is_zero(J.Q * Jm - conj.dphi_t() * J.Q));
        }
    }

    SECTION("non-nilpotent deviation is rejected at construction") {
        const FieldCtx& ctx = th::carlitz_ctx(3);
        LaurentElem th = LaurentElem::theta_pow(ctx, 1);
        LaurentElem o = LaurentElem::one(ctx);
        LaurentElem z = LaurentElem::zero(ctx);
        Mat<LaurentElem> B0 = mat2(ctx, {{th, o}, {z, th + o}});
        Mat<LaurentElem> B1 = Mat<LaurentElem>::identity(2, z, o);
        REQUIRE_THROWS_AS(TModule(ctx, TwistedPoly(Side::Tau, {B0, B1}), Family::Custom),
                          NotNilpotent);
    }
}

TEST_CASE("d part inverse is exact and iterates to zero") {
    for (int q : {2, 3}) {
        const FieldCtx& ctx = th::carlitz_ctx(q);
        TModule phi = carlitz_tensor(ctx, 4);
        Mat<LaurentElem> inv = phi.dphi_t_inv();

        Mat<LaurentElem> I =
            Mat<LaurentElem>::identity(4, LaurentElem::zero(ctx), LaurentElem::one(ctx));
        Mat<LaurentElem> prod = phi.dphi_t() * inv - I;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                REQUIRE(prod.at(i, j).is_exactly_zero());

        Mat<LaurentElem> pow = I;
        for (long long n = 1; n <= 20; ++n) {
            pow = pow * inv;
            long long v = LaurentElem::POS_INF;
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j)
                    v = std::min(v, pow.at(i, j).val_lower_num());
            REQUIRE(v >= n * ctx.M);
        }
    }
}

TEST_CASE("module action evaluates operators on points") {
    const FieldCtx& ctx = th::carlitz_ctx(3);
    TModule phi = carlitz(ctx);
    std::mt19937_64 rng(41);
    Mat<LaurentElem> x(1, 1, sample_laurent(ctx, rng, 3, -2, 2, true));

    Mat<LaurentElem> got = phi.act(phi.phi_t(), x);
    LaurentElem want = LaurentElem::theta_pow(ctx, 1) * x.at(0, 0) + x.at(0, 0).twist(1);
    REQUIRE(got.at(0, 0) == want);
}
