#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "exactpi.hpp"
#include "sha256.hpp"

namespace wpv {

// ---------------------------------------------------------------------------
// Bernoulli numbers, zeta(2i) and the a_i coefficients

inline mpq_class binomial_q(long n, long k) {
    if (k < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return mpq_class(r);
}

inline mpz_class factorial_z(long n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

// B_0..B_m with B_1 = -1/2.
inline std::vector<mpq_class> bernoulli_numbers(int m) {
    std::vector<mpq_class> b(static_cast<std::size_t>(m) + 1);
    b[0] = 1;
    for (int k = 1; k <= m; ++k) {
        mpq_class s = 0;
        for (int j = 0; j < k; ++j) s += binomial_q(k + 1, j) * b[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(k)] = -s / mpq_class(k + 1);
    }
    return b;
}

// Rational r_i with zeta(2i) = r_i * pi^(2i).
inline mpq_class zeta_even_rational(int i) {
    if (i < 1) throw std::invalid_argument("zeta_even: i must be >= 1");
    std::vector<mpq_class> b = bernoulli_numbers(2 * i);
    mpq_class b2i = b[static_cast<std::size_t>(2 * i)];
    mpz_class two_pow;
    mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, static_cast<unsigned long>(2 * i - 1));
    mpq_class r = abs(b2i) * mpq_class(two_pow) / mpq_class(factorial_z(2 * i));
    r.canonicalize();
    return r;
}

inline PiGraded zeta_even(int i) { return PiGraded(zeta_even_rational(i), i); }

// Table of alpha_i with a_i = alpha_i * pi^(2i).
inline std::vector<mpq_class> a_rationals(int imax) {
    std::vector<mpq_class> out(static_cast<std::size_t>(std::max(imax, 0)) + 1);
    out[0] = mpq_class(1, 2);
    if (imax < 1) return out;
    std::vector<mpq_class> b = bernoulli_numbers(2 * imax);
    for (int i = 1; i <= imax; ++i) {
        mpz_class p2;
        mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(2 * i - 1));
        mpq_class z = abs(b[static_cast<std::size_t>(2 * i)]) * mpq_class(p2) / mpq_class(factorial_z(2 * i));
        mpq_class factor = mpq_class(1) - mpq_class(1) / mpq_class(p2);
        out[static_cast<std::size_t>(i)] = z * factor;
        out[static_cast<std::size_t>(i)].canonicalize();
    }
    return out;
}

inline PiGraded a_coeff(int i) {
    if (i < 0) throw std::invalid_argument("a_coeff: i must be >= 0");
    return PiGraded(a_rationals(i)[static_cast<std::size_t>(i)], i);
}

struct ACoeffReport {
    int imax = 0;
    double partial_sum = 0;  // sum_{i<=imax} i (a_{i+1} - a_i)
    double a_imax = 0;
    double constant_c = 0;   // smallest C with 1/(C 4^i) <= a_{i+1}-a_i <= C/4^i for i <= imax
    double tail_envelope = 0;  // C * sum_{i>imax} i / 4^i
};

// Differences a_{i+1}-a_i via the alternating series, which avoids the cancellation near a_i ~ 1.
inline long double a_difference(int i) {
    // the series converges too slowly for small i, where the subtraction is harmless
    if (i < 4) return a_coeff(i + 1).to_long_double() - a_coeff(i).to_long_double();
    long double s = 0;
    for (int k = 2; k < 200; ++k) {
        long double kk = static_cast<long double>(k);
        long double term = std::pow(kk, -2.0L * i) * (1.0L - 1.0L / (kk * kk));
        s += (k % 2 == 0) ? term : -term;
        if (term < 1e-30L) break;
    }
    return s;
}

inline ACoeffReport a_coeff_checks(int imax) {
    if (imax < 2) throw std::invalid_argument("a_coeff_checks: imax must be >= 2");
    ACoeffReport r;
    r.imax = imax;
    long double partial = 0, c = 0;
    for (int i = 0; i <= imax; ++i) {
        long double d = a_difference(i);
        partial += static_cast<long double>(i) * d;
        long double scaled = d * std::pow(4.0L, static_cast<long double>(i));
        c = std::max({c, scaled, 1.0L / scaled});
    }
    r.partial_sum = static_cast<double>(partial);
    r.a_imax = a_coeff(imax).to_double();
    r.constant_c = static_cast<double>(c);
    long double tail = 0;
    for (int i = imax + 1; i < imax + 200; ++i) tail += static_cast<long double>(i) * std::pow(4.0L, -static_cast<long double>(i));
    r.tail_envelope = static_cast<double>(c * tail);
    return r;
}

// ---------------------------------------------------------------------------
// Indices

inline bool is_stable(int g, int n) { return g >= 0 && n >= 0 && 2 * g - 2 + n > 0; }
inline int dim_of(int g, int n) { return 3 * g - 3 + n; }

struct TauIndex {
    int g = 0;
    int n = 0;
    std::vector<int> d;

    TauIndex() = default;
    TauIndex(int g_, std::vector<int> d_) : g(g_), n(static_cast<int>(d_.size())), d(std::move(d_)) {
        std::sort(d.begin(), d.end(), std::greater<>());
    }

    int total() const {
        int s = 0;
        for (int v : d) s += v;
        return s;
    }
    int d0() const { return dim_of(g, n) - total(); }
    bool stable() const { return is_stable(g, n) && n >= 1; }
    bool vanishes() const {
        if (!stable() || d0() < 0) return true;
        for (int v : d)
            if (v < 0) return true;
        return false;
    }

    friend bool operator<(const TauIndex& a, const TauIndex& b) {
        if (a.g != b.g) return a.g < b.g;
        if (a.n != b.n) return a.n < b.n;
        return a.d < b.d;
    }
    friend bool operator==(const TauIndex& a, const TauIndex& b) { return a.g == b.g && a.n == b.n && a.d == b.d; }
};

// ---------------------------------------------------------------------------
// Scalar conversion for the templated engine

template <class T>
T scalar_from(const mpq_class& q);
template <>
inline mpq_class scalar_from<mpq_class>(const mpq_class& q) { return q; }
template <>
inline double scalar_from<double>(const mpq_class& q) { return static_cast<double>(PiGraded::to_ld(q)); }
template <>
inline long double scalar_from<long double>(const mpq_class& q) { return PiGraded::to_ld(q); }

// ---------------------------------------------------------------------------
// Bottom-up engine for the rescaled brackets q with [tau_d]_{g,n} = q * pi^(2 d0).
//
// The region holds every stable (g,n) with n >= 1, g <= gmax and g+n <= smax, which is closed
// under the references made by the recursion. Each table is organised in rows: a row is keyed by a
// multiset R of n-1 indices and stores [tau_k R] for k = 0..D-|R|. A bracket therefore appears
// in one row per distinct index value; the entry with k = max is computed, the others are copies.

template <class T>
class TauEngine {
public:
    using Key = std::string;  // descending indices, one byte each
    using Row = std::vector<T>;

    struct Table {
        int g = 0, n = 0, D = 0;
        std::unordered_map<Key, Row> rows;
    };

    TauEngine(int gmax, int smax, int dmax = 1 << 20) : gmax_(gmax), smax_(smax), dmax_(dmax) {
        if (gmax < 0 || smax < 1) throw std::invalid_argument("TauEngine: bad region");
        if (dim_of(gmax, std::max(1, smax - gmax)) > 120) throw std::invalid_argument("TauEngine: region too large");
        alpha_q_ = a_rationals(dim_of(gmax, std::max(1, smax - gmax)) + 2);
        for (const auto& q : alpha_q_) alpha_.push_back(scalar_from<T>(q));
        tables_.resize(static_cast<std::size_t>(gmax) + 1);
        for (int g = 0; g <= gmax; ++g) tables_[static_cast<std::size_t>(g)].resize(static_cast<std::size_t>(smax - g) + 1);
    }

    int gmax() const { return gmax_; }
    int smax() const { return smax_; }
    int dmax() const { return dmax_; }

    bool in_region(int g, int n) const {
        return g >= 0 && g <= gmax_ && n >= 1 && g + n <= smax_ && is_stable(g, n) && dim_of(g, n) <= dmax_;
    }

    // Compute all tables in order of increasing dimension; jobs > 1 splits each table's rows.
    void compute(int jobs = 1) {
        if (computed_) return;
        std::vector<std::pair<int, int>> order;
        for (int g = 0; g <= gmax_; ++g)
            for (int n = 1; g + n <= smax_; ++n)
                if (in_region(g, n)) order.emplace_back(g, n);
        std::stable_sort(order.begin(), order.end(), [](auto a, auto b) {
            return dim_of(a.first, a.second) < dim_of(b.first, b.second);
        });
        for (auto [g, n] : order) build_table(g, n, std::max(1, jobs));
        computed_ = true;
    }

    const Table* table(int g, int n) const {
        if (!in_region(g, n)) return nullptr;
        return tables_[static_cast<std::size_t>(g)][static_cast<std::size_t>(n)].get();
    }

    // Value for any index list; zero when the bracket vanishes. Throws outside the region.
    T value(int g, const std::vector<int>& d) const {
        int n = static_cast<int>(d.size());
        if (!is_stable(g, n)) return T(0);
        for (int v : d)
            if (v < 0) return T(0);
        if (!in_region(g, n)) throw std::out_of_range("TauEngine: (g,n) outside the computed region");
        std::vector<int> s(d);
        std::sort(s.begin(), s.end(), std::greater<>());
        int total = 0;
        for (int v : s) total += v;
        if (total > dim_of(g, n)) return T(0);
        const Table* t = table(g, n);
        if (t == nullptr) throw std::logic_error("TauEngine: table not computed");
        Key key;
        for (std::size_t i = 1; i < s.size(); ++i) key.push_back(static_cast<char>(s[i]));
        auto it = t->rows.find(key);
        if (it == t->rows.end()) return T(0);
        return it->second[static_cast<std::size_t>(s[0])];
    }

    // Rescaled V_{g,0} through the dilaton-type relation at (g,1).
    T volume_n0(int g) const {
        if (g < 2) throw std::invalid_argument("volume_n0: need g >= 2");
        T s(0);
        for (int L = 1; L <= 3 * g - 2; ++L) {
            mpq_class c = mpq_class(L) / mpq_class(factorial_z(2 * L + 1));
            if (L % 2 == 0) c = -c;
            s += scalar_from<T>(c) * value(g, {L});
        }
        return s / scalar_from<T>(mpq_class(2 * (2 * g - 2)));
    }

    // Rescaled V_{g,n}; n = 0 handled through volume_n0.
    T volume(int g, int n) const {
        if (n == 0) return volume_n0(g);
        return value(g, std::vector<int>(static_cast<std::size_t>(n), 0));
    }

    const std::vector<T>& alpha() const { return alpha_; }

    // Visit every bracket once, in (g, n, d ascending) order.
    void for_each(const std::function<void(const TauIndex&, const T&)>& fn) const {
        for (int g = 0; g <= gmax_; ++g)
            for (int n = 1; g + n <= smax_; ++n) {
                const Table* t = table(g, n);
                if (t == nullptr) continue;
                std::vector<std::pair<std::vector<int>, const T*>> items;
                for (const auto& [key, row] : t->rows) {
                    int mx = key.empty() ? 0 : static_cast<unsigned char>(key[0]);
                    for (std::size_t k = static_cast<std::size_t>(mx); k < row.size(); ++k) {
                        std::vector<int> d;
                        d.push_back(static_cast<int>(k));
                        for (char c : key) d.push_back(static_cast<unsigned char>(c));
                        items.emplace_back(std::move(d), &row[k]);
                    }
                }
                std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
                for (const auto& [d, v] : items) fn(TauIndex(g, d), *v);
            }
    }

    std::size_t bracket_count() const {
        std::size_t c = 0;
        for_each([&](const TauIndex&, const T&) { ++c; });
        return c;
    }

private:
    static Key key_of(const std::vector<int>& desc) {
        Key k;
        k.reserve(desc.size());
        for (int v : desc) k.push_back(static_cast<char>(v));
        return k;
    }

    static Key insert_sorted(const Key& r, int v) {
        Key out;
        out.reserve(r.size() + 1);
        bool placed = false;
        for (char c : r) {
            if (!placed && static_cast<unsigned char>(c) <= v) {
                out.push_back(static_cast<char>(v));
                placed = true;
            }
            out.push_back(c);
        }
        if (!placed) out.push_back(static_cast<char>(v));
        return out;
    }

    static void enumerate_multisets(int len, int maxsum, int maxpart, Key& cur, std::vector<Key>& out) {
        if (len == 0) {
            out.push_back(cur);
            return;
        }
        for (int v = std::min(maxpart, maxsum); v >= 0; --v) {
            cur.push_back(static_cast<char>(v));
            enumerate_multisets(len - 1, maxsum - v, v, cur, out);
            cur.pop_back();
        }
    }

    const Row* find_row(int g, int n, const Key& key) const {
        const Table* t = table(g, n);
        if (t == nullptr) return nullptr;
        auto it = t->rows.find(key);
        return it == t->rows.end() ? nullptr : &it->second;
    }

    void build_table(int g, int n, int jobs) {
        auto tab = std::make_unique<Table>();
        tab->g = g;
        tab->n = n;
        tab->D = dim_of(g, n);
        const int D = tab->D;
        std::vector<Key> keys;
        Key cur;
        enumerate_multisets(n - 1, D, D, cur, keys);
        for (const Key& k : keys) {
            int r = 0;
            for (char c : k) r += static_cast<unsigned char>(c);
            tab->rows.emplace(k, Row(static_cast<std::size_t>(D - r + 1), T(0)));
        }
        std::vector<std::pair<const Key*, Row*>> work;
        work.reserve(tab->rows.size());
        for (auto& [k, row] : tab->rows) work.emplace_back(&k, &row);
        std::sort(work.begin(), work.end(), [](const auto& a, const auto& b) { return *a.first < *b.first; });

        const bool base = (g == 0 && n == 3) || (g == 1 && n == 1);
        auto owned = [&](std::size_t lo, std::size_t step) {
            for (std::size_t i = lo; i < work.size(); i += step) {
                if (base) fill_base(g, n, *work[i].first, *work[i].second);
                else compute_owned(g, n, D, *work[i].first, *work[i].second);
            }
        };
        run_parallel(owned, work.size(), jobs);

        Table& t = *tab;
        auto copies = [&](std::size_t lo, std::size_t step) {
            for (std::size_t i = lo; i < work.size(); i += step) {
                const Key& key = *work[i].first;
                Row& row = *work[i].second;
                if (key.empty()) continue;
                int mx = static_cast<unsigned char>(key[0]);
                Key rest = key.substr(1);
                for (int k = 0; k < mx && k < static_cast<int>(row.size()); ++k) {
                    Key canon = insert_sorted(rest, k);
                    row[static_cast<std::size_t>(k)] = t.rows.at(canon)[static_cast<std::size_t>(mx)];
                }
            }
        };
        run_parallel(copies, work.size(), jobs);
        tables_[static_cast<std::size_t>(g)][static_cast<std::size_t>(n)] = std::move(tab);
    }

    template <class F>
    static void run_parallel(F&& f, std::size_t count, int jobs) {
        if (jobs <= 1 || count < 64) {
            f(0, 1);
            return;
        }
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back([&, j] { f(static_cast<std::size_t>(j), static_cast<std::size_t>(jobs)); });
        for (auto& th : pool) th.join();
    }

    void fill_base(int g, int n, const Key& key, Row& row) {
        if (g == 0 && n == 3) {
            if (key == Key(2, '\0') && !row.empty()) row[0] = T(1);
            return;
        }
        // (1,1): [tau_0] = pi^2/12, [tau_1] = 1/2
        row[0] = scalar_from<T>(mpq_class(1, 12));
        row[1] = scalar_from<T>(mpq_class(1, 2));
    }

    void compute_owned(int g, int n, int D, const Key& key, Row& row) {
        const int rsum = [&] {
            int s = 0;
            for (char c : key) s += static_cast<unsigned char>(c);
            return s;
        }();
        const int mx = key.empty() ? 0 : static_cast<unsigned char>(key[0]);
        const int kmax = D - rsum;
        if (kmax < mx) return;

        // distinct values of R with multiplicities
        std::vector<std::pair<int, int>> distinct;
        for (char c : key) {
            int v = static_cast<unsigned char>(c);
            if (!distinct.empty() && distinct.back().first == v) ++distinct.back().second;
            else distinct.emplace_back(v, 1);
        }

        const int M = D - rsum - 2;  // largest k1+k2 in the B and C sums
        std::vector<T> W;
        if (M >= 0) {
            W.assign(static_cast<std::size_t>(M) + 1, T(0));
            accumulate_b(g, n, key, M, W);
            accumulate_c(g, key, distinct, M, W);
            const T sixteen(16);
            for (auto& w : W) w *= sixteen;
        }

        // A-term rows: R with one copy of v removed, looked up in (g, n-1)
        struct ARow {
            const Row* row;
            T coef;
            int v;
        };
        std::vector<ARow> arows;
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            auto [v, mult] = distinct[i];
            Key less;
            bool removed = false;
            for (char c : key) {
                if (!removed && static_cast<unsigned char>(c) == v) {
                    removed = true;
                    continue;
                }
                less.push_back(c);
            }
            const Row* ar = find_row(g, n - 1, less);
            if (ar != nullptr) arows.push_back(ARow{ar, T(8L * mult * (2 * v + 1)), v});
        }

        for (int k = mx; k <= kmax; ++k) {
            const int d0 = kmax - k;
            T acc(0);
            for (int L = 0; L <= d0; ++L) {
                const int m = L + k - 2;
                if (m >= 0 && m <= M) acc += alpha_[static_cast<std::size_t>(L)] * W[static_cast<std::size_t>(m)];
            }
            for (const ARow& a : arows) {
                const Row& ar = *a.row;
                const int v = a.v;
                T part(0);
                for (int L = 0; L <= d0; ++L) {
                    const int idx = L + k + v - 1;
                    if (idx >= 0 && idx < static_cast<int>(ar.size())) part += alpha_[static_cast<std::size_t>(L)] * ar[static_cast<std::size_t>(idx)];
                }
                acc += a.coef * part;
            }
            row[static_cast<std::size_t>(k)] = acc;
        }
    }

    void accumulate_b(int g, int n, const Key& key, int M, std::vector<T>& W) const {
        if (g < 1 || !in_region(g - 1, n + 1)) return;
        for (int k1 = 0; k1 <= M; ++k1) {
            const Row* br = find_row(g - 1, n + 1, insert_sorted(key, k1));
            if (br == nullptr) continue;
            const int lim = std::min(M - k1, static_cast<int>(br->size()) - 1);
            for (int k2 = 0; k2 <= lim; ++k2) W[static_cast<std::size_t>(k1 + k2)] += (*br)[static_cast<std::size_t>(k2)];
        }
    }

    void accumulate_c(int g, const Key& key, const std::vector<std::pair<int, int>>& distinct, int M,
                      std::vector<T>& W) const {
        const std::size_t nv = distinct.size();
        std::vector<int> take(nv, 0);
        const int nr = static_cast<int>(key.size());
        while (true) {
            // sub-multiset I given by take[], complement J
            Key I, J;
            long weight = 1;
            int sizeI = 0;
            for (std::size_t i = 0; i < nv; ++i) {
                auto [v, m] = distinct[i];
                for (int c = 0; c < take[i]; ++c) I.push_back(static_cast<char>(v));
                for (int c = take[i]; c < m; ++c) J.push_back(static_cast<char>(v));
                weight *= binomial_q(m, take[i]).get_num().get_si();
                sizeI += take[i];
            }
            const int sizeJ = nr - sizeI;
            for (int g1 = 0; g1 <= g; ++g1) {
                const int g2 = g - g1;
                // each unordered pair {(g1,I),(g2,J)} once, doubled unless it is its own mirror
                const bool mirror = (g1 == g2 && I == J);
                if (!mirror && std::make_pair(g1, I) > std::make_pair(g2, J)) continue;
                if (!in_region(g1, sizeI + 1) || !in_region(g2, sizeJ + 1)) continue;
                const Row* P = find_row(g1, sizeI + 1, I);
                const Row* Q = find_row(g2, sizeJ + 1, J);
                if (P == nullptr || Q == nullptr) continue;
                const T w(mirror ? weight : 2 * weight);
                for (std::size_t k1 = 0; k1 < P->size(); ++k1) {
                    if (static_cast<int>(k1) > M) break;
                    const T pk = w * (*P)[k1];
                    const std::size_t lim = std::min(Q->size(), static_cast<std::size_t>(M) - k1 + 1);
                    for (std::size_t k2 = 0; k2 < lim; ++k2) W[k1 + k2] += pk * (*Q)[k2];
                }
            }
            std::size_t i = 0;
            while (i < nv && take[i] == distinct[i].second) take[i++] = 0;
            if (i == nv) break;
            ++take[i];
        }
    }

    int gmax_, smax_, dmax_;
    bool computed_ = false;
    std::vector<mpq_class> alpha_q_;
    std::vector<T> alpha_;
    std::vector<std::vector<std::unique_ptr<Table>>> tables_;
};

// ---------------------------------------------------------------------------
// Persistent memo store

class CacheError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CacheVerifyResult {
    bool ok = false;
    std::size_t entries = 0;
    std::string stored_digest;
    std::string computed_digest;
    std::string message;
};

// Brackets keyed by index. Values are single-grade, so only the rational q of q*pi^(2 d0) is kept.
class MemoStore {
public:
    MemoStore() = default;
    explicit MemoStore(std::filesystem::path path) : path_(std::move(path)) {}

    MemoStore(const MemoStore&) = delete;
    MemoStore& operator=(const MemoStore&) = delete;

    const std::filesystem::path& path() const { return path_; }
    void set_path(std::filesystem::path p) { path_ = std::move(p); }
    bool dirty() const {
        std::shared_lock lock(mu_);
        return dirty_;
    }
    std::size_t size() const {
        std::shared_lock lock(mu_);
        return entries_.size();
    }

    std::optional<PiGraded> get(const TauIndex& idx) const {
        std::shared_lock lock(mu_);
        auto it = entries_.find(idx);
        if (it == entries_.end()) return std::nullopt;
        return PiGraded(it->second, idx.d0());
    }

    std::optional<mpq_class> get_rescaled(const TauIndex& idx) const {
        std::shared_lock lock(mu_);
        auto it = entries_.find(idx);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    // Returns false when the entry was already present; stored values never change.
    bool insert_if_absent(const TauIndex& idx, const PiGraded& v) {
        auto grade = v.single_grade();
        if (!grade || *grade != idx.d0())
            throw std::invalid_argument("MemoStore: value for (" + std::to_string(idx.g) + "," + std::to_string(idx.n) +
                                        ") is not homogeneous of grade d0");
        return insert_rescaled(idx, v.coeff(*grade));
    }

    bool insert_rescaled(const TauIndex& idx, const mpq_class& q) {
        std::unique_lock lock(mu_);
        auto [it, fresh] = entries_.emplace(idx, q);
        if (fresh) dirty_ = true;
        return fresh;
    }

    template <class F>
    void for_each(F&& fn) const {
        std::shared_lock lock(mu_);
        for (const auto& [idx, q] : entries_) fn(idx, q);
    }

    void save() {
        if (path_.empty()) throw CacheError("MemoStore: no cache path set");
        save_as(path_);
    }

    void save_as(const std::filesystem::path& p) {
        std::shared_lock lock(mu_);
        std::filesystem::path tmp = p;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw CacheError("MemoStore: cannot write " + tmp.string());
            Sha256 h;
            std::string line = "WPTAU v1\n";
            h.update(line);
            out << line;
            for (const auto& [idx, q] : entries_) {
                line = entry_line(idx, q);
                h.update(line);
                out << line;
            }
            out << "#sha256 " << h.hex() << "\n";
            if (!out) throw CacheError("MemoStore: write failed for " + tmp.string());
        }
        std::filesystem::rename(tmp, p);
        lock.unlock();
        std::unique_lock wlock(mu_);
        dirty_ = false;
    }

    // Loads a cache file, replacing the current contents. Throws CacheError on any corruption.
    void load(const std::filesystem::path& p) {
        std::map<TauIndex, mpq_class> fresh;
        read_file(p, &fresh);
        std::unique_lock lock(mu_);
        entries_ = std::move(fresh);
        path_ = p;
        dirty_ = false;
    }

    static CacheVerifyResult verify(const std::filesystem::path& p) {
        CacheVerifyResult r;
        try {
            r = read_file(p, nullptr);
        } catch (const CacheError& e) {
            r.ok = false;
            r.message = e.what();
        }
        return r;
    }

    static std::string entry_line(const TauIndex& idx, const mpq_class& q) {
        std::string line = std::to_string(idx.g) + " " + std::to_string(idx.n) + " ";
        for (std::size_t i = 0; i < idx.d.size(); ++i) {
            if (i) line += ',';
            line += std::to_string(idx.d[i]);
        }
        line += ' ';
        line += PiGraded(q, idx.d0()).str();
        line += '\n';
        return line;
    }

private:
    static CacheVerifyResult read_file(const std::filesystem::path& p, std::map<TauIndex, mpq_class>* sink) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw CacheError("cache file not readable: " + p.string());
        CacheVerifyResult r;
        Sha256 h;
        std::string line;
        if (!std::getline(in, line) || line != "WPTAU v1") throw CacheError("cache header missing or unsupported");
        h.update(line + "\n");
        bool trailer = false;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (trailer) throw CacheError("data after checksum trailer at line " + std::to_string(lineno));
            if (line.rfind("#sha256 ", 0) == 0) {
                trailer = true;
                r.stored_digest = line.substr(8);
                continue;
            }
            h.update(line + "\n");
            std::istringstream ls(line);
            int g = -1, n = -1;
            std::string dstr, vstr, extra;
            if (!(ls >> g >> n >> dstr >> vstr) || (ls >> extra))
                throw CacheError("malformed cache line " + std::to_string(lineno));
            std::vector<int> d;
            std::stringstream ds(dstr);
            std::string tok;
            while (std::getline(ds, tok, ',')) d.push_back(std::stoi(tok));
            TauIndex idx(g, d);
            if (idx.n != n || idx.d != d || !idx.stable() || idx.d0() < 0)
                throw CacheError("invalid index on cache line " + std::to_string(lineno));
            PiGraded v;
            try {
                v = PiGraded::parse(vstr);
            } catch (const std::invalid_argument& e) {
                throw CacheError("bad value on cache line " + std::to_string(lineno) + ": " + e.what());
            }
            auto grade = v.single_grade();
            if (!grade || *grade != idx.d0()) throw CacheError("grade mismatch on cache line " + std::to_string(lineno));
            ++r.entries;
            if (sink) sink->emplace(std::move(idx), v.coeff(*grade));
        }
        if (!trailer) throw CacheError("checksum trailer missing");
        r.computed_digest = h.hex();
        if (r.computed_digest != r.stored_digest)
            throw CacheError("checksum mismatch: stored " + r.stored_digest + ", computed " + r.computed_digest);
        r.ok = true;
        r.message = "ok";
        return r;
    }

    mutable std::shared_mutex mu_;
    std::map<TauIndex, mpq_class> entries_;
    bool dirty_ = false;
    std::filesystem::path path_;
};

// Fill the store with every bracket of the region g <= gmax, g+n <= smax.
inline void populate_store(MemoStore& store, int gmax, int smax, int jobs = 1) {
    TauEngine<mpq_class> engine(gmax, smax);
    engine.compute(jobs);
    engine.for_each([&](const TauIndex& idx, const mpq_class& q) { store.insert_rescaled(idx, q); });
}

inline bool store_covers(const MemoStore& store, int gmax, int smax) {
    for (int g = 0; g <= gmax; ++g)
        for (int n = 1; g + n <= smax; ++n) {
            if (!is_stable(g, n)) continue;
            if (!store.get_rescaled(TauIndex(g, std::vector<int>(static_cast<std::size_t>(n), 0)))) return false;
            if (!store.get_rescaled(TauIndex(g, [&] {
                    std::vector<int> d(static_cast<std::size_t>(n), 0);
                    d[0] = dim_of(g, n);
                    return d;
                }())))
                return false;
        }
    return true;
}

// [tau_d]_{g,n} for any index order. Missing brackets are computed together with their
// whole region and memoized.
inline PiGraded tau(const TauIndex& idx, MemoStore& store, int jobs = 1) {
    if (idx.vanishes()) return PiGraded();
    if (auto v = store.get(idx)) return *v;
    populate_store(store, idx.g, idx.g + idx.n, jobs);
    if (auto v = store.get(idx)) return *v;
    throw std::logic_error("tau: bracket missing after computation");
}

inline mpq_class tau_rescaled(const TauIndex& idx, MemoStore& store, int jobs = 1) {
    if (idx.vanishes()) return 0;
    if (auto v = store.get_rescaled(idx)) return *v;
    return tau(idx, store, jobs).coeff(idx.d0());
}

// V_{g,n}; for n = 0 through the relation at (g,1).
inline PiGraded volume(int g, int n, MemoStore& store, int jobs = 1) {
    if (!is_stable(g, n)) throw std::invalid_argument("volume: unstable (g,n)");
    if (n >= 1) return tau(TauIndex(g, std::vector<int>(static_cast<std::size_t>(n), 0)), store, jobs);
    mpq_class s = 0;
    for (int L = 1; L <= 3 * g - 2; ++L) {
        mpq_class c = mpq_class(L) / mpq_class(factorial_z(2 * L + 1));
        if (L % 2 == 0) c = -c;
        s += c * tau_rescaled(TauIndex(g, {L}), store, jobs);
    }
    s /= mpq_class(2 * (2 * g - 2));
    return PiGraded(s, dim_of(g, 0));
}

}  // namespace wpv
