#pragma once

// Shared helpers for the test binaries: the cached bracket store and independent identities
// that the bottom-up engine never evaluates itself.

#include <wpv/volumes.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#ifndef WPV_TEST_CACHE
#define WPV_TEST_CACHE "tau_cache.txt"
#endif

namespace wpv::testing {

inline constexpr int kCacheGmax = 14;
inline constexpr int kCacheSmax = 19;

// The store covering g <= 14, g+n <= 19. Loaded from the cache file, or built and saved if absent.
inline MemoStore& full_store() {
    static MemoStore store;
    static bool ready = false;
    if (!ready) {
        const std::filesystem::path p = WPV_TEST_CACHE;
        if (std::filesystem::exists(p)) store.load(p);
        else store.set_path(p);
        if (!store_covers(store, kCacheGmax, kCacheSmax)) {
            populate_store(store, kCacheGmax, kCacheSmax, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
            store.save();
        }
        ready = true;
    }
    return store;
}

// A small store computed from scratch, for tests that must not depend on the cache file.
inline MemoStore& small_store() {
    static MemoStore store;
    static bool ready = false;
    if (!ready) {
        populate_store(store, 5, 12, 1);
        ready = true;
    }
    return store;
}

// Rescaled bracket q with [tau_d]_{g,n} = q pi^{2 d0}; zero when it vanishes.
inline mpq_class bracket(const MemoStore& store, int g, std::vector<int> d) {
    TauIndex idx(g, std::move(d));
    if (idx.vanishes()) return 0;
    auto v = store.get_rescaled(idx);
    if (!v) throw std::out_of_range("bracket outside the stored region");
    return *v;
}

inline mpq_class factorial_q(int n) {
    mpz_class f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return mpq_class(f);
}

// Dilaton-type relation between (g,n) and (g,n+1):
//   (2g-2+n) [tau_d]_{g,n} = 1/2 sum_L (-1)^{L-1} L pi^{2L-2}/(2L+1)! [tau_L tau_d]_{g,n+1}.
// In rescaled form the powers of pi cancel. Returns lhs - rhs.
inline mpq_class dilaton_defect(const MemoStore& store, int g, const std::vector<int>& d) {
    const int n = static_cast<int>(d.size());
    int total = 0;
    for (int v : d) total += v;
    mpq_class lhs = mpq_class(2 * g - 2 + n) * bracket(store, g, d);
    mpq_class rhs = 0;
    for (int L = 1; L <= 3 * g - 2 + n - total; ++L) {
        std::vector<int> e(d);
        e.push_back(L);
        mpq_class term = mpq_class(L) * bracket(store, g, e) / factorial_q(2 * L + 1);
        if (L % 2 == 0) term = -term;
        rhs += term;
    }
    rhs /= 2;
    return lhs - rhs;
}

// [tau_0 tau_1 tau_d]_{g,n+2} = [tau_0^4 tau_d]_{g-1,n+4}
//   + 6 sum over g1+g2=g and labelled splittings I,J of d of [tau_0^2 tau_I]_{g1} [tau_0^2 tau_J]_{g2}.
// Returns lhs - rhs.
inline mpq_class genus_split_defect(const MemoStore& store, int g, const std::vector<int>& d) {
    const int n = static_cast<int>(d.size());
    std::vector<int> left(d);
    left.push_back(0);
    left.push_back(1);
    mpq_class lhs = bracket(store, g, left);
    mpq_class rhs = 0;
    if (g >= 1) {
        std::vector<int> e(d);
        e.insert(e.end(), {0, 0, 0, 0});
        rhs += bracket(store, g - 1, e);
    }
    mpq_class split = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> I{0, 0}, J{0, 0};
        for (int i = 0; i < n; ++i) ((mask >> i) & 1u ? I : J).push_back(d[static_cast<std::size_t>(i)]);
        for (int g1 = 0; g1 <= g; ++g1) {
            const int g2 = g - g1;
            if (!is_stable(g1, static_cast<int>(I.size())) || !is_stable(g2, static_cast<int>(J.size()))) continue;
            split += bracket(store, g1, I) * bracket(store, g2, J);
        }
    }
    rhs += 6 * split;
    return lhs - rhs;
}

inline std::vector<TauIndex> stored_indices(const MemoStore& store, int max_dim) {
    std::vector<TauIndex> out;
    store.for_each([&](const TauIndex& i, const mpq_class&) {
        if (dim_of(i.g, i.n) <= max_dim) out.push_back(i);
    });
    return out;
}

struct IdentitySweep {
    std::size_t dilaton_checked = 0, dilaton_failures = 0;
    std::size_t split_checked = 0, split_failures = 0;
};

// Runs both identities on every stored bracket with 3g-3+n <= max_dim.
inline IdentitySweep identity_sweep(const MemoStore& store, int max_dim) {
    IdentitySweep r;
    for (const auto& i : stored_indices(store, max_dim)) {
        if (2 * i.g - 2 + i.n >= 1) {
            ++r.dilaton_checked;
            if (dilaton_defect(store, i.g, i.d) != 0) ++r.dilaton_failures;
        }
        // genus-split identity: the bracket must contain a tau_0 and a tau_1
        auto z = std::find(i.d.begin(), i.d.end(), 0);
        auto o = std::find(i.d.begin(), i.d.end(), 1);
        if (z != i.d.end() && o != i.d.end()) {
            std::vector<int> rest;
            bool dz = false, dodone = false;
            for (int v : i.d) {
                if (v == 0 && !dz) dz = true;
                else if (v == 1 && !dodone) dodone = true;
                else rest.push_back(v);
            }
            ++r.split_checked;
            if (genus_split_defect(store, i.g, rest) != 0) ++r.split_failures;
        }
    }
    return r;
}

}  // namespace wpv::testing
