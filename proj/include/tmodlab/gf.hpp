#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "tmodlab/errors.hpp"

// Finite field F_q, q = p^n, with table-based arithmetic.
//
// Elements are encoded as integers in 0..q-1: the element sum c_i x^i of
// F_p[x]/(modulus) is stored as sum c_i p^i. The modulus is user supplied
// (monic, degree n, irreducible over F_p) and checked at construction; there
// is no builtin polynomial table, but default_modulus() searches the lexically
// smallest irreducible if the caller has no preference.
//
// Tables keep the hot loops branch-free; q is capped at 1024 so the q*q
// multiplication table stays small.

namespace tmodlab {

using gfe = std::uint32_t;

class GFq {
public:
    GFq(std::uint32_t p, std::uint32_t n, std::vector<std::uint32_t> modulus)
        : p_(p), n_(n), modulus_(std::move(modulus)) {
        if (p_ < 2 || !is_prime(p_)) throw ConfigError("GFq: p must be prime");
        if (n_ < 1) throw ConfigError("GFq: n must be >= 1");
        q_ = 1;
        for (std::uint32_t i = 0; i < n_; ++i) {
            q_ *= p_;
            if (q_ > 1024) throw ConfigError("GFq: q > 1024 not supported by table-based arithmetic");
        }
        if (modulus_.size() != n_ + 1 || modulus_[n_] != 1)
            throw ConfigError("GFq: modulus must be monic of degree n");
        for (auto c : modulus_)
            if (c >= p_) throw ConfigError("GFq: modulus coefficients must be reduced mod p");
        if (n_ > 1 && !poly_irreducible(modulus_, p_))
            throw ConfigError("GFq: modulus is reducible");
        build_tables();
    }

    static GFq prime_field(std::uint32_t p) { return GFq(p, 1, {0, 1}); }

    // Lexically smallest monic irreducible of degree n over F_p.
    static std::vector<std::uint32_t> default_modulus(std::uint32_t p, std::uint32_t n) {
        if (n == 1) return {0, 1};
        std::uint64_t count = 1;
        for (std::uint32_t i = 0; i < n; ++i) count *= p;
        for (std::uint64_t tail = 0; tail < count; ++tail) {
            std::vector<std::uint32_t> m(n + 1, 0);
            std::uint64_t v = tail;
            for (std::uint32_t i = 0; i < n; ++i) { m[i] = static_cast<std::uint32_t>(v % p); v /= p; }
            m[n] = 1;
            if (poly_irreducible(m, p)) return m;
        }
        throw ConfigError("GFq: no irreducible modulus found");
    }

    std::uint32_t p() const { return p_; }
    std::uint32_t n() const { return n_; }
    std::uint32_t q() const { return q_; }
    const std::vector<std::uint32_t>& modulus() const { return modulus_; }

    gfe zero() const { return 0; }
    gfe one() const { return 1; }

    gfe add(gfe a, gfe b) const { return add_[a * q_ + b]; }
    gfe sub(gfe a, gfe b) const { return add_[a * q_ + neg_[b]]; }
    gfe neg(gfe a) const { return neg_[a]; }
    gfe mul(gfe a, gfe b) const { return mul_[a * q_ + b]; }

    gfe inv(gfe a) const {
        if (a == 0) throw ZeroDivisor("GFq: inverse of zero");
        return inv_[a];
    }

    gfe pow(gfe a, long long e) const {
        if (a == 0) {
            if (e < 0) throw ZeroDivisor("GFq: negative power of zero");
            return e == 0 ? one() : 0;
        }
        long long m = static_cast<long long>(q_) - 1;
        long long r = e % m;
        if (r < 0) r += m;
        gfe acc = 1, base = a;
        while (r > 0) {
            if (r & 1) acc = mul(acc, base);
            base = mul(base, base);
            r >>= 1;
        }
        return acc;
    }

    // Frobenius x -> x^p and its inverse (p-th root; bijective on F_q).
    gfe frob(gfe a) const { return pow(a, p_); }
    gfe frob_inv(gfe a) const {
        gfe r = a;
        for (std::uint32_t i = 0; i + 1 < n_; ++i) r = frob(r);
        return r;
    }

    // Integer embedding through the prime subfield.
    gfe from_int(long long v) const {
        long long r = v % static_cast<long long>(p_);
        if (r < 0) r += p_;
        return static_cast<gfe>(r);
    }

    // Digits of the element as a polynomial in the generator, constant first.
    std::vector<std::uint32_t> digits(gfe a) const {
        std::vector<std::uint32_t> d(n_);
        for (std::uint32_t i = 0; i < n_; ++i) { d[i] = a % p_; a /= p_; }
        return d;
    }
    gfe from_digits(const std::vector<std::uint32_t>& d) const {
        if (d.size() > n_) throw ConfigError("GFq: too many digits");
        gfe a = 0;
        for (std::size_t i = d.size(); i-- > 0;) {
            if (d[i] >= p_) throw ConfigError("GFq: digit out of range");
            a = a * p_ + d[i];
        }
        return a;
    }

    bool operator==(const GFq& o) const {
        return p_ == o.p_ && n_ == o.n_ && modulus_ == o.modulus_;
    }

private:
    static bool is_prime(std::uint32_t v) {
        for (std::uint32_t d = 2; d * d <= v; ++d)
            if (v % d == 0) return false;
        return v >= 2;
    }

    // Dense F_p[x] helpers used only at construction time.
    using Poly = std::vector<std::uint32_t>;

    static Poly poly_trim(Poly a) {
        while (!a.empty() && a.back() == 0) a.pop_back();
        return a;
    }

    static Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint32_t p) {
        Poly r(a.size() + b.size() - 1, 0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                r[i + j] = (r[i + j] + a[i] * b[j]) % p;
        return poly_mod(r, m, p);
    }

    static Poly poly_mod(Poly r, const Poly& m, std::uint32_t p) {
        std::size_t dm = m.size() - 1;
        while (r.size() > dm) {
            std::uint32_t lead = r.back();
            if (lead != 0) {
                std::size_t shift = r.size() - 1 - dm;
                for (std::size_t i = 0; i <= dm; ++i) {
                    std::uint32_t s = (lead * m[i]) % p;
                    r[i + shift] = (r[i + shift] + p - s) % p;
                }
            }
            r.pop_back();
        }
        return r;
    }

    static Poly poly_powmod_xq(std::uint64_t e, const Poly& m, std::uint32_t p) {
        // x^e mod m by square and multiply
        Poly acc{1}, base{0, 1};
        while (e > 0) {
            if (e & 1) acc = poly_mulmod(acc, base, m, p);
            base = poly_mulmod(base, base, m, p);
            e >>= 1;
        }
        return acc;
    }

    static Poly poly_gcd(Poly a, Poly b, std::uint32_t p) {
        a = poly_trim(std::move(a));
        b = poly_trim(std::move(b));
        while (!b.empty()) {
            // a mod b with b made monic first
            std::uint32_t lead = b.back();
            if (lead != 1) {
                std::uint32_t li = 1;
                for (std::uint32_t x = 1; x < p; ++x)
                    if ((x * lead) % p == 1) { li = x; break; }
                for (auto& c : b) c = (c * li) % p;
            }
            Poly r = poly_mod(a, b, p);
            a = std::move(b);
            b = poly_trim(std::move(r));
        }
        return a;
    }

    static bool poly_irreducible(const Poly& m, std::uint32_t p) {
        std::uint32_t n = static_cast<std::uint32_t>(m.size()) - 1;
        // x^(p^n) == x mod m, and gcd(x^(p^(n/l)) - x, m) == 1 for prime l | n
        std::uint64_t pn = 1;
        for (std::uint32_t i = 0; i < n; ++i) pn *= p;
        Poly xpn = poly_powmod_xq(pn, m, p);
        Poly x{0, 1};
        if (poly_trim(poly_sub(xpn, x, p)) != Poly{}) return false;
        for (std::uint32_t l = 2; l <= n; ++l) {
            if (n % l != 0) continue;
            bool lp = true;
            for (std::uint32_t d = 2; d * d <= l; ++d)
                if (l % d == 0) { lp = false; break; }
            if (!lp) continue;
            std::uint64_t e = 1;
            for (std::uint32_t i = 0; i < n / l; ++i) e *= p;
            Poly g = poly_gcd(m, poly_sub(poly_powmod_xq(e, m, p), x, p), p);
            if (!(g.size() == 1)) return false;
        }
        return true;
    }

    static Poly poly_sub(Poly a, const Poly& b, std::uint32_t p) {
        if (a.size() < b.size()) a.resize(b.size(), 0);
        for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
        return a;
    }

    void build_tables() {
        add_.resize(static_cast<std::size_t>(q_) * q_);
        mul_.resize(static_cast<std::size_t>(q_) * q_);
        neg_.resize(q_);
        inv_.resize(q_);
        auto add_digits = [&](gfe a, gfe b) {
            gfe r = 0, mult = 1;
            for (std::uint32_t i = 0; i < n_; ++i) {
                r += ((a % p_ + b % p_) % p_) * mult;
                a /= p_; b /= p_; mult *= p_;
            }
            return r;
        };
        auto mul_poly = [&](gfe a, gfe b) {
            Poly pa = digits_poly(a), pb = digits_poly(b);
            if (pa.empty() || pb.empty()) return gfe(0);
            Poly r = poly_mulmod(pa, pb, modulus_, p_);
            gfe v = 0;
            for (std::size_t i = r.size(); i-- > 0;) v = v * p_ + r[i];
            return v;
        };
        for (gfe a = 0; a < q_; ++a)
            for (gfe b = 0; b < q_; ++b) {
                add_[a * q_ + b] = add_digits(a, b);
                mul_[a * q_ + b] = mul_poly(a, b);
            }
        for (gfe a = 0; a < q_; ++a) {
            gfe na = 0, mult = 1, x = a;
            for (std::uint32_t i = 0; i < n_; ++i) {
                na += ((p_ - x % p_) % p_) * mult;
                x /= p_; mult *= p_;
            }
            neg_[a] = na;
        }
        inv_[0] = 0;
        for (gfe a = 1; a < q_; ++a)
            for (gfe b = 1; b < q_; ++b)
                if (mul_[a * q_ + b] == 1) { inv_[a] = b; break; }
    }

    Poly digits_poly(gfe a) const {
        Poly d;
        while (a > 0) { d.push_back(a % p_); a /= p_; }
        return d;
    }

    std::uint32_t p_, n_, q_;
    std::vector<std::uint32_t> modulus_;
    std::vector<gfe> add_, mul_, neg_, inv_;
};

// Binomial coefficient binom(a/b, r) mod p for a rational a/b with p not
// dividing b, through the digit product over the p-adic expansion of a/b.
// The expansion of a rational is eventually periodic; only the first
// (number of base-p digits of r) digits are consumed.
inline gfe padic_binom(const GFq& F, long long a, long long b, long long r) {
    if (r < 0) return F.zero();
    long long p = F.p();
    if (b == 0 || (b % p + p) % p == 0)
        throw BadDenominator("padic_binom: denominator divisible by p");
    if (b < 0) { a = -a; b = -b; }
    long long binv = 0;
    for (long long x = 1; x < p; ++x)
        if ((x * (b % p)) % p == 1) { binv = x; break; }

    // Lucas digit product: binom over each base-p digit pair.
    auto small_binom = [&](long long m, long long k) -> long long {
        if (k < 0 || k > m) return 0;
        long long num = 1, den = 1;
        for (long long i = 0; i < k; ++i) {
            num = (num * ((m - i) % p)) % p;
            den = (den * ((i + 1) % p)) % p;
        }
        long long dinv = 0;
        for (long long x = 1; x < p; ++x)
            if ((x * den) % p == 1) { dinv = x; break; }
        return (num * dinv) % p;
    };

    long long acc = 1;
    long long num = a;
    long long rr = r;
    while (rr > 0) {
        long long rd = rr % p;
        long long nm = ((num % p) + p) % p;
        long long nd = (nm * binv) % p;
        acc = (acc * small_binom(nd, rd)) % p;
        if (acc == 0) return F.zero();
        num = (num - nd * b) / p;
        rr /= p;
    }
    return F.from_int(acc);
}

} // namespace tmodlab
