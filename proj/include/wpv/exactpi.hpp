#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wpv {

// Element of Q[pi^2]: grade m holds the rational coefficient of pi^(2m).
class PiGraded {
public:
    using Terms = std::map<int, mpq_class>;

    PiGraded() = default;
    PiGraded(const mpq_class& q, int grade = 0) { add_term(grade, q); }
    PiGraded(long v) : PiGraded(mpq_class(v)) {}
    PiGraded(int v) : PiGraded(mpq_class(v)) {}

    static PiGraded pi2(int m) { return PiGraded(mpq_class(1), m); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    mpq_class coeff(int grade) const {
        auto it = terms_.find(grade);
        return it == terms_.end() ? mpq_class(0) : it->second;
    }

    // Grade of a homogeneous element; empty for zero or mixed elements.
    std::optional<int> single_grade() const {
        if (terms_.size() != 1) return std::nullopt;
        return terms_.begin()->first;
    }

    void add_term(int grade, const mpq_class& q) {
        if (grade < 0) throw std::invalid_argument("PiGraded: negative grade");
        if (q == 0) return;
        auto [it, fresh] = terms_.emplace(grade, q);
        if (!fresh) {
            it->second += q;
            if (it->second == 0) terms_.erase(it);
        }
    }

    long double to_long_double() const {
        const long double pi2v = std::numbers::pi_v<long double> * std::numbers::pi_v<long double>;
        long double s = 0;
        for (const auto& [m, q] : terms_) s += to_ld(q) * std::pow(pi2v, static_cast<long double>(m));
        return s;
    }
    double to_double() const { return static_cast<double>(to_long_double()); }

    PiGraded& operator+=(const PiGraded& o) {
        for (const auto& [m, q] : o.terms_) add_term(m, q);
        return *this;
    }
    PiGraded& operator-=(const PiGraded& o) {
        for (const auto& [m, q] : o.terms_) add_term(m, -q);
        return *this;
    }
    PiGraded& operator*=(const mpq_class& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, q] : terms_) q *= s;
        return *this;
    }

    friend PiGraded operator+(PiGraded a, const PiGraded& b) { return a += b; }
    friend PiGraded operator-(PiGraded a, const PiGraded& b) { return a -= b; }
    friend PiGraded operator-(PiGraded a) { return a *= mpq_class(-1); }
    friend PiGraded operator*(PiGraded a, const mpq_class& s) { return a *= s; }
    friend PiGraded operator*(const mpq_class& s, PiGraded a) { return a *= s; }
    friend PiGraded operator*(const PiGraded& a, const PiGraded& b) {
        PiGraded r;
        for (const auto& [ma, qa] : a.terms_)
            for (const auto& [mb, qb] : b.terms_) r.add_term(ma + mb, qa * qb);
        return r;
    }
    friend bool operator==(const PiGraded& a, const PiGraded& b) { return a.terms_ == b.terms_; }

    // "m:p/q" terms joined by '+', ascending grade; zero prints as "0".
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [m, q] : terms_) {
            if (!out.empty()) out += '+';
            out += std::to_string(m);
            out += ':';
            out += q.get_num().get_str();
            out += '/';
            out += q.get_den().get_str();
        }
        return out;
    }

    static PiGraded parse(std::string_view s) {
        PiGraded r;
        if (s == "0") return r;
        if (s.empty()) throw std::invalid_argument("PiGraded::parse: empty string");
        std::size_t pos = 0;
        while (pos <= s.size()) {
            std::size_t end = s.find('+', pos);
            if (end == std::string_view::npos) end = s.size();
            std::string_view term = s.substr(pos, end - pos);
            std::size_t colon = term.find(':');
            if (colon == std::string_view::npos || colon == 0)
                throw std::invalid_argument("PiGraded::parse: malformed term '" + std::string(term) + "'");
            int grade = 0;
            for (char c : term.substr(0, colon)) {
                if (c < '0' || c > '9') throw std::invalid_argument("PiGraded::parse: bad grade");
                grade = grade * 10 + (c - '0');
            }
            mpq_class q;
            if (q.set_str(std::string(term.substr(colon + 1)), 10) != 0 || q.get_den() == 0)
                throw std::invalid_argument("PiGraded::parse: bad rational '" + std::string(term) + "'");
            q.canonicalize();
            if (q == 0) throw std::invalid_argument("PiGraded::parse: zero coefficient is not canonical");
            if (r.terms_.count(grade)) throw std::invalid_argument("PiGraded::parse: repeated grade");
            r.terms_.emplace(grade, q);
            pos = end + 1;
        }
        return r;
    }

    static long double to_ld(const mpq_class& q) {
        if (q == 0) return 0;
        long bn = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2));
        long bd = static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
        return ldexpl(ld_mantissa(q.get_num()) / ld_mantissa(q.get_den()), static_cast<int>(bn - bd));
    }

private:
    // Mantissa in [0.5,1) of |z| to long double precision, sign carried.
    static long double ld_mantissa(const mpz_class& z) {
        std::size_t bits = mpz_sizeinbase(z.get_mpz_t(), 2);
        mpz_class top = z;
        const std::size_t keep = 64;
        if (bits > keep) top = z >> static_cast<mp_bitcnt_t>(bits - keep);
        else top = z << static_cast<mp_bitcnt_t>(keep - bits);
        unsigned long hi = mpz_class(abs(top) >> 32).get_ui();
        unsigned long lo = mpz_class(abs(top) & mpz_class(0xffffffffUL)).get_ui();
        long double m = (static_cast<long double>(hi) * 4294967296.0L + static_cast<long double>(lo)) / 18446744073709551616.0L;
        return sgn(z) < 0 ? -m : m;
    }

    Terms terms_;
};

// Even polynomial in x_1..x_n: exponent vector alpha (powers of x_i^2) -> coefficient.
struct BoundaryPolynomial {
    int n = 0;
    std::map<std::vector<int>, PiGraded> coeffs;

    PiGraded constant_term() const {
        auto it = coeffs.find(std::vector<int>(static_cast<std::size_t>(n), 0));
        return it == coeffs.end() ? PiGraded() : it->second;
    }

    int degree() const {
        int d = 0;
        for (const auto& [a, c] : coeffs) {
            int s = 0;
            for (int e : a) s += e;
            d = std::max(d, s);
        }
        return d;
    }
};

namespace detail {
inline void check_dim(const BoundaryPolynomial& p, std::size_t len) {
    if (len != static_cast<std::size_t>(p.n))
        throw std::invalid_argument("poly_eval: expected " + std::to_string(p.n) + " variables, got " +
                                    std::to_string(len));
}
}  // namespace detail

inline PiGraded pg_add(const PiGraded& a, const PiGraded& b) { return a + b; }
inline PiGraded pg_mul(const PiGraded& a, const PiGraded& b) { return a * b; }

// Exact value at a rational point (doubles are converted exactly).
inline PiGraded poly_eval_exact(const BoundaryPolynomial& p, const std::vector<mpq_class>& x) {
    detail::check_dim(p, x.size());
    std::vector<mpq_class> x2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x2[i] = x[i] * x[i];
    PiGraded acc;
    for (const auto& [alpha, c] : p.coeffs) {
        mpq_class mono = 1;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            mpq_class pw;
            mpz_pow_ui(pw.get_num_mpz_t(), x2[i].get_num_mpz_t(), static_cast<unsigned long>(alpha[i]));
            mpz_pow_ui(pw.get_den_mpz_t(), x2[i].get_den_mpz_t(), static_cast<unsigned long>(alpha[i]));
            mono *= pw;
        }
        acc += c * mono;
    }
    return acc;
}

inline double poly_eval(const BoundaryPolynomial& p, const std::vector<double>& x) {
    detail::check_dim(p, x.size());
    std::vector<mpq_class> xq;
    xq.reserve(x.size());
    for (double v : x) {
        if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("poly_eval: coordinates must be finite and >= 0");
        xq.emplace_back(v);
    }
    return poly_eval_exact(p, xq).to_double();
}

namespace detail {
using FloatTerm = std::pair<std::vector<int>, double>;

inline double horner_rec(std::vector<FloatTerm>& terms, std::size_t var, const std::vector<double>& x2) {
    if (terms.empty()) return 0.0;
    if (var == x2.size()) {
        double s = 0;
        for (const auto& t : terms) s += t.second;
        return s;
    }
    int top = 0;
    for (const auto& t : terms) top = std::max(top, t.first[var]);
    std::vector<std::vector<FloatTerm>> by_power(static_cast<std::size_t>(top) + 1);
    for (auto& t : terms) by_power[static_cast<std::size_t>(t.first[var])].push_back(std::move(t));
    double acc = 0;
    for (int e = top; e >= 0; --e) acc = acc * x2[var] + horner_rec(by_power[static_cast<std::size_t>(e)], var + 1, x2);
    return acc;
}
}  // namespace detail

// Plain floating-point Horner evaluation, used as a cross-check of poly_eval.
inline double poly_eval_horner(const BoundaryPolynomial& p, const std::vector<double>& x) {
    detail::check_dim(p, x.size());
    std::vector<detail::FloatTerm> terms;
    for (const auto& [a, c] : p.coeffs) terms.emplace_back(a, c.to_double());
    std::vector<double> x2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x2[i] = x[i] * x[i];
    return detail::horner_rec(terms, 0, x2);
}

}  // namespace wpv
