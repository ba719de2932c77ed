#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace wpv {

struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;

    double trace() const { return a + d; }
    double det() const { return a * d - b * c; }
    Mat2 inverse() const {
        const double D = det();
        return {d / D, -b / D, -c / D, a / D};
    }
    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    friend Mat2 operator-(const Mat2& x) { return {-x.a, -x.b, -x.c, -x.d}; }
};

// Translation length of a hyperbolic element; 0 for parabolic or elliptic ones.
inline double translation_length(const Mat2& m) {
    const double t = std::abs(m.trace()) / 2.0;
    return t > 1.0 ? 2.0 * std::acosh(t) : 0.0;
}

// ---------------------------------------------------------------------------
// Words in a, A = a^-1, b, B = b^-1

inline char inverse_letter(char c) {
    switch (c) {
        case 'a': return 'A';
        case 'A': return 'a';
        case 'b': return 'B';
        case 'B': return 'b';
        default: throw std::invalid_argument(std::string("bad letter '") + c + "'");
    }
}

inline std::string inverse_word(std::string_view w) {
    std::string r(w.rbegin(), w.rend());
    for (char& c : r) c = inverse_letter(c);
    return r;
}

inline std::string free_reduce(std::string_view w) {
    std::string out;
    for (char c : w) {
        inverse_letter(c);  // validates
        if (!out.empty() && out.back() == inverse_letter(c)) out.pop_back();
        else out.push_back(c);
    }
    return out;
}

inline std::string cyclic_reduce(std::string_view w) {
    std::string r = free_reduce(w);
    std::size_t i = 0, j = r.size();
    while (j - i >= 2 && r[i] == inverse_letter(r[j - 1])) {
        ++i;
        --j;
    }
    return r.substr(i, j - i);
}

// Booth's least rotation.
inline std::size_t least_rotation(std::string_view s) {
    const std::size_t n = s.size();
    if (n == 0) return 0;
    std::vector<long> f(2 * n, -1);
    std::size_t k = 0;
    for (std::size_t j = 1; j < 2 * n; ++j) {
        const char sj = s[j % n];
        long i = f[j - k - 1];
        while (i != -1 && sj != s[(k + static_cast<std::size_t>(i) + 1) % n]) {
            if (sj < s[(k + static_cast<std::size_t>(i) + 1) % n]) k = j - static_cast<std::size_t>(i) - 1;
            i = f[static_cast<std::size_t>(i)];
        }
        if (i == -1 && sj != s[(k + static_cast<std::size_t>(i) + 1) % n]) {
            if (sj < s[(k + static_cast<std::size_t>(i) + 1) % n]) k = j;
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    return k % n;
}

inline std::string rotate_to(std::string_view s, std::size_t k) {
    return std::string(s.substr(k)) + std::string(s.substr(0, k));
}

struct CyclicWord {
    std::string letters;  // canonical representative
    bool primitive = true;

    friend bool operator==(const CyclicWord& x, const CyclicWord& y) { return x.letters == y.letters; }
    friend bool operator<(const CyclicWord& x, const CyclicWord& y) { return x.letters < y.letters; }
};

inline bool is_proper_power(std::string_view w) {
    const std::size_t n = w.size();
    for (std::size_t p = 1; p < n; ++p) {
        if (n % p) continue;
        bool ok = true;
        for (std::size_t i = p; i < n && ok; ++i) ok = w[i] == w[i - p];
        if (ok) return true;
    }
    return false;
}

// Conjugacy class of w up to inversion (an unoriented closed curve).
inline CyclicWord canonical(std::string_view w) {
    const std::string r = cyclic_reduce(w);
    if (r.empty()) return {"", false};
    const std::string inv = inverse_word(r);
    std::string x = rotate_to(r, least_rotation(r));
    std::string y = rotate_to(inv, least_rotation(inv));
    CyclicWord cw{std::min(x, y), true};
    cw.primitive = !is_proper_power(cw.letters);
    return cw;
}

inline std::string power_word(std::string_view w, int k) {
    std::string base = k >= 0 ? std::string(w) : inverse_word(w);
    std::string out;
    for (int i = 0; i < std::abs(k); ++i) out += base;
    return out;
}

// ---------------------------------------------------------------------------
// Surface groups

enum class SurfaceKind { Pants, OneHoledTorus };

struct SurfaceGroup {
    SurfaceKind kind = SurfaceKind::Pants;
    double x = 0, y = 0, z = 0;           // pants boundary lengths (words a, b, aB)
    double l = 0, s = 0, twist = 0;       // torus: boundary, half-length of a, twist
    Mat2 A, B;
    std::array<Mat2, 3> seams{};          // pants only: reflections with a = -S0 S1, b = -S2 S1
    std::string certificate;

    Mat2 letter(char c) const {
        switch (c) {
            case 'a': return A;
            case 'A': return A.inverse();
            case 'b': return B;
            case 'B': return B.inverse();
            default: throw std::invalid_argument(std::string("bad letter '") + c + "'");
        }
    }
    Mat2 word_matrix(std::string_view w) const {
        Mat2 m;
        for (char c : w) m = m * letter(c);
        return m;
    }
    double length(std::string_view w) const { return translation_length(word_matrix(w)); }
};

class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Trace-zero reflection matrix of the geodesic with unit spacelike normal n in R^{2,1}.
inline Mat2 reflection_from_normal(const std::array<double, 3>& n) {
    return {n[0], n[1] + n[2], n[1] - n[2], -n[0]};
}

inline std::array<double, 3> normal_from_reflection(const Mat2& m) {
    return {m.a, 0.5 * (m.b + m.c), 0.5 * (m.b - m.c)};
}

// The half-plane beyond a seam meets the boundary circle in an arc; pairwise disjoint arcs are
// a ping-pong certificate for the reflection group, hence for its index-2 subgroup <a, b>.
inline std::string pingpong_certificate(const std::array<Mat2, 3>& seams) {
    std::array<double, 3> center{}, half{};
    for (int i = 0; i < 3; ++i) {
        auto n = normal_from_reflection(seams[static_cast<std::size_t>(i)]);
        const double rho = std::hypot(n[0], n[1]);
        if (!(rho > std::abs(n[2]))) throw ConstructionError("seam is not a geodesic");
        center[static_cast<std::size_t>(i)] = std::atan2(n[1], n[0]);
        half[static_cast<std::size_t>(i)] = std::acos(n[2] / rho);
    }
    double covered = 0;
    for (int i = 0; i < 3; ++i) {
        covered += 2 * half[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < 3; ++j) {
            double gap = std::abs(center[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(j)]);
            gap = std::min(gap, 2 * std::numbers::pi - gap);
            if (gap < half[static_cast<std::size_t>(i)] + half[static_cast<std::size_t>(j)] - 1e-9)
                throw ConstructionError("ping-pong arcs overlap");
        }
    }
    // tangent arcs (cusps) may cover the whole circle; the ping-pong base point then sits inside the ideal region
    return "ping-pong: three disjoint seam arcs covering " + std::to_string(covered) + " rad";
}

}  // namespace detail

// Boundaries a, b, aB with tr a, tr b > 0 and tr aB < 0.
inline SurfaceGroup build_pants(double x, double y, double z) {
    for (double v : {x, y, z})
        if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("build_pants: lengths must be finite and >= 0");
    SurfaceGroup G;
    G.kind = SurfaceKind::Pants;
    G.x = x;
    G.y = y;
    G.z = z;
    if (x == 0 && y == 0 && z == 0) {
        G.seams = {Mat2{-1, 2, 0, 1}, Mat2{1, 0, 0, -1}, Mat2{-1, 0, -2, 1}};
    } else {
        // half-distances between seams: d(0,1) = x/2, d(1,2) = y/2, d(0,2) = z/2
        const std::array<double, 3> half = {x / 2, y / 2, z / 2};
        auto dist = [&](int i, int j) {
            if (i > j) std::swap(i, j);
            if (i == 0 && j == 1) return half[0];
            if (i == 1 && j == 2) return half[1];
            return half[2];
        };
        int i = 0, j = 1;
        if (x == 0) {
            if (y > 0) { i = 1; j = 2; }
            else { i = 0; j = 2; }
        }
        const int k = 3 - i - j;
        const double cij = std::cosh(dist(i, j)), sij = std::sinh(dist(i, j));
        const double cik = std::cosh(dist(i, k)), cjk = std::cosh(dist(j, k));
        const double q = (cij * cik + cjk) / sij;
        const double p = std::sqrt(std::max(0.0, 1.0 - cik * cik + q * q));
        std::array<std::array<double, 3>, 3> n{};
        n[static_cast<std::size_t>(i)] = {1, 0, 0};
        n[static_cast<std::size_t>(j)] = {-cij, 0, sij};
        n[static_cast<std::size_t>(k)] = {-cik, p, q};
        for (int t = 0; t < 3; ++t) G.seams[static_cast<std::size_t>(t)] = detail::reflection_from_normal(n[static_cast<std::size_t>(t)]);
    }
    G.A = -(G.seams[0] * G.seams[1]);
    G.B = -(G.seams[2] * G.seams[1]);
    G.certificate = detail::pingpong_certificate(G.seams);

    const double ta = G.A.trace(), tb = G.B.trace(), tc = (G.A * G.B.inverse()).trace();
    auto close = [](double got, double want) { return std::abs(got - want) <= 1e-10 * std::max(1.0, want); };
    if (!close(ta, 2 * std::cosh(x / 2)) || !close(tb, 2 * std::cosh(y / 2)) || !close(-tc, 2 * std::cosh(z / 2)))
        throw ConstructionError("build_pants: trace equations not met");
    return G;
}

// One-holed torus with boundary length l, simple curve a of length 2s and twist tw along a.
inline SurfaceGroup build_torus(double l, double s, double tw) {
    if (!(l >= 0) || !(s > 0) || !std::isfinite(l) || !std::isfinite(s) || !std::isfinite(tw))
        throw std::invalid_argument("build_torus: need l >= 0, s > 0");
    const double x = 2 * std::cosh(s);
    const double ch = std::cosh(l / 4), sh = std::sinh(s);
    const double K = std::sqrt(ch * ch / (sh * sh) + 1.0);
    const double y = 2 * K * std::cosh(tw / 2), z = 2 * K * std::cosh(tw / 2 + s);
    const double t = 0.5 * (z + std::sqrt(z * z - 4));
    SurfaceGroup G;
    G.kind = SurfaceKind::OneHoledTorus;
    G.l = l;
    G.s = s;
    G.twist = tw;
    G.A = {x, -1, 1, 0};
    G.B = {0, t, -1 / t, y};
    const double comm = (G.A * G.B * G.A.inverse() * G.B.inverse()).trace();
    if (std::abs(comm + 2 * std::cosh(l / 2)) > 1e-9 * std::cosh(l / 2))
        throw ConstructionError("build_torus: commutator trace mismatch");
    if (comm > -2 + 1e-12 && l > 0) throw ConstructionError("build_torus: commutator is not hyperbolic");
    // tr[A,B] <= -2 is the classical criterion for a discrete free group uniformizing a one-holed torus;
    // as a numeric cross-check no short word may be elliptic.
    for (const char* w : {"a", "b", "ab", "aB", "aab", "abb", "aaB", "aBB", "abAB"})
        if (std::abs(G.word_matrix(w).trace()) < 2 - 1e-12) throw ConstructionError("build_torus: elliptic element");
    G.certificate = "commutator trace " + std::to_string(comm) + " <= -2";
    return G;
}

inline double figure_eight_length(double x, double y, double z) {
    return 2 * std::acosh(2 * std::cosh(x / 2) * std::cosh(y / 2) + std::cosh(z / 2));
}

// sinh(m y/2)/sinh(y/2), continuous at y = 0
inline double sinh_quotient(int m, double y) {
    if (std::abs(y) < 1e-8) return m;
    return std::sinh(m * y / 2) / std::sinh(y / 2);
}

inline double one_sided_length(int k, double x, double y, double z) {
    if (k < 1) throw std::invalid_argument("one_sided_length: k must be >= 1");
    return 2 * std::acosh(sinh_quotient(k + 1, y) * std::cosh(x / 2) + sinh_quotient(k, y) * std::cosh(z / 2));
}

// ---------------------------------------------------------------------------
// Enumeration and classification

enum class GeoClass { Boundary, SimpleInterior, FigureEight, OneSidedIterated, OtherFilling, NonFilling };

inline std::string class_name(GeoClass c, int k = 0) {
    switch (c) {
        case GeoClass::Boundary: return "boundary";
        case GeoClass::SimpleInterior: return "simple-interior";
        case GeoClass::FigureEight: return "figure-eight";
        case GeoClass::OneSidedIterated: return "one-sided-iterated(" + std::to_string(k) + ")";
        case GeoClass::OtherFilling: return "other-filling";
        case GeoClass::NonFilling: return "non-filling";
    }
    return "?";
}

struct GeodesicRecord {
    CyclicWord word;
    double length = 0;
    GeoClass cls = GeoClass::OtherFilling;
    int k = 0;  // iteration count for one-sided classes

    bool filling() const {
        return cls == GeoClass::FigureEight || cls == GeoClass::OneSidedIterated || cls == GeoClass::OtherFilling;
    }
};

class EnumerationLimit : public std::runtime_error {
public:
    EnumerationLimit(const std::string& what, std::size_t frontier_depth)
        : std::runtime_error(what), depth(frontier_depth) {}
    std::size_t depth;
};

struct EnumerationOptions {
    std::size_t max_nodes = 200'000'000;
    double torus_margin = 5.0;  // extra displacement allowed for prefixes in the torus search
    int torus_slope_bound = 0;  // 0: ceil(L)
    bool pants_exit_lookahead = true;  // false: plain wall test, slow near cusps
};

namespace detail {

// Boundaries alpha = a, beta = B, gamma = bA satisfy alpha beta gamma = 1. The one-sided class
// around (P, Q) with k turns is P Q^{-k}; k = 1 gives the three figure-eights.
class PantsClassifier {
public:
    explicit PantsClassifier(int kmax) {
        const std::array<std::string, 3> bd = {"a", "B", "bA"};
        for (const auto& w : bd) table_[canonical(w).letters] = {GeoClass::Boundary, 0};
        for (int k = 1; k <= kmax; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    if (i == j) continue;
                    const std::string w = bd[static_cast<std::size_t>(i)] + power_word(bd[static_cast<std::size_t>(j)], -k);
                    const auto cw = canonical(w).letters;
                    if (!table_.count(cw)) table_[cw] = {k == 1 ? GeoClass::FigureEight : GeoClass::OneSidedIterated, k};
                }
    }
    std::pair<GeoClass, int> operator()(const CyclicWord& w) const {
        auto it = table_.find(w.letters);
        if (it != table_.end()) return it->second;
        return {GeoClass::OtherFilling, 0};
    }

private:
    std::map<std::string, std::pair<GeoClass, int>> table_;
};

struct Subst {
    std::string ia = "a", ib = "b";
    std::string apply(std::string_view w) const {
        std::string out;
        for (char c : w) {
            switch (c) {
                case 'a': out += ia; break;
                case 'b': out += ib; break;
                case 'A': out += inverse_word(ia); break;
                case 'B': out += inverse_word(ib); break;
                default: throw std::invalid_argument("bad letter");
            }
        }
        return free_reduce(out);
    }
    // (this after first)(x) = this(first(x))
    Subst after(const Subst& first) const { return {apply(first.ia), apply(first.ib)}; }
};

// Cyclic word disjoint from the curve a: every b-syllable is b or B and they alternate in sign.
inline bool misses_a(std::string_view cyc) {
    std::vector<int> exps;
    int cur = 0;
    bool in_b = false;
    const std::size_t n = cyc.size();
    // start right after an a-letter so syllables are not split by the cyclic seam
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i)
        if (cyc[i] == 'a' || cyc[i] == 'A') { start = (i + 1) % n; break; }
    if (start == n) return false;  // pure power of b
    for (std::size_t t = 0; t < n; ++t) {
        const char c = cyc[(start + t) % n];
        if (c == 'b' || c == 'B') {
            cur += c == 'b' ? 1 : -1;
            in_b = true;
        } else if (in_b) {
            exps.push_back(cur);
            cur = 0;
            in_b = false;
        }
    }
    if (in_b) exps.push_back(cur);
    if (exps.empty()) return true;
    if (exps.size() % 2) return false;
    for (std::size_t i = 0; i < exps.size(); ++i) {
        if (std::abs(exps[i]) != 1) return false;
        if (exps[i] == exps[(i + 1) % exps.size()]) return false;
    }
    return true;
}

// Simple slopes on the one-holed torus as Farey bases (u, v) with inverse automorphisms.
class TorusClassifier {
public:
    explicit TorusClassifier(int bound) {
        boundary_ = canonical("abAB").letters;
        for (bool negative : {false, true}) {
            Subst flip{"a", negative ? "B" : "b"};
            walk("a", negative ? "B" : "b", flip, 1, 1, bound);
        }
    }

    std::pair<GeoClass, int> operator()(const CyclicWord& w) const {
        if (w.letters == boundary_) return {GeoClass::Boundary, 0};
        if (simple_.count(w.letters)) return {GeoClass::SimpleInterior, 0};
        const Subst swap{"b", "a"};
        for (const auto& psi : inverses_) {
            const std::string img = cyclic_reduce(psi.apply(w.letters));
            if (misses_a(img) || misses_a(cyclic_reduce(swap.apply(img)))) return {GeoClass::NonFilling, 0};
        }
        return {GeoClass::OtherFilling, 0};
    }

    std::size_t slope_count() const { return simple_.size(); }

private:
    void walk(const std::string& u, const std::string& v, const Subst& psi, int pu, int pv, int bound) {
        simple_.insert(canonical(u).letters);
        simple_.insert(canonical(v).letters);
        inverses_.push_back(psi);
        // u has exponent sum magnitude pu, v has pv; the mediant uv has pu + pv
        if (pu + pv > 2 * bound) return;
        const Subst t1inv{"a", "Ab"}, t2inv{"aB", "b"};
        walk(u, free_reduce(u + v), t1inv.after(psi), pu, pu + pv, bound);
        walk(free_reduce(u + v), v, t2inv.after(psi), pu + pv, pv, bound);
    }

    std::string boundary_;
    std::set<std::string> simple_;
    std::vector<Subst> inverses_;
};

inline std::string reflection_pair_word(int i, int j) {
    static const char* table[3][3] = {{"", "a", "aB"}, {"A", "", "B"}, {"bA", "b", ""}};
    return table[i][j];
}

inline double half_trace_product(const Mat2& x, const Mat2& y) {
    return 0.5 * (x.a * y.a + x.b * y.c + x.c * y.b + x.d * y.d);
}

// Depth-first search over reflection words. Walls crossed by an axis are nested, and any two of
// them less than one period apart are at distance at most the translation length. With
// exit_lookahead, words start at the beginning of a run of two alternating seams and end with the
// third seam k, so the wall of k itself precedes the first wall and serves as the reference. Each
// child other than k is tested against the wall where its current run would end; later exits of
// the same run lie farther out, which keeps long runs around a cusp from being walked one step at
// a time. Without lookahead, the first three letters are distinct and only the new wall is tested
// against the first one, which is slow near cusps but needs no monotonicity argument.
inline void enumerate_pants(const SurfaceGroup& G, double L, const EnumerationOptions& opt,
                            std::map<std::string, double>& found) {
    const double coshL = std::cosh(L) * (1 + 1e-12) + 1e-12;
    const bool lookahead = opt.pants_exit_lookahead;
    auto seam = [&](int i) -> const Mat2& { return G.seams[static_cast<std::size_t>(i)]; };
    std::size_t nodes = 0;
    std::vector<int> letters;
    std::vector<Mat2> prefix;  // prefix[k] = S_{i1} ... S_{ik}
    std::function<void()> dfs = [&]() {
        if (++nodes > opt.max_nodes)
            throw EnumerationLimit("enumerate_geodesics: node limit exceeded", letters.size());
        const int last = letters.back();
        const Mat2 g = prefix.back();
        const int kref = 3 - letters[0] - letters[1];
        const Mat2& ref = lookahead ? seam(kref) : seam(letters[0]);
        const Mat2 second = seam(letters[0]) * seam(letters[1]) * seam(letters[0]);
        for (int j = 0; j < 3; ++j) {
            if (j == last) continue;
            const Mat2 next = g * seam(j);
            if (lookahead && j != kref) {
                const int e = 3 - j - last;
                const Mat2 exit = next * seam(e) * next.inverse();
                // a run through k may end only after the period closes: at the copy of the first
                // wall when it exits through i0, at the copy of the second when it exits through i1
                const Mat2& base = e == kref ? ref : (e == letters[0] ? seam(letters[0]) : second);
                if (std::abs(half_trace_product(base, exit)) > coshL) continue;
            } else {
                if (!lookahead && letters.size() == 2 && j == letters[0]) continue;
                if (std::abs(half_trace_product(ref, g * seam(j) * g.inverse())) > coshL) continue;
            }
            letters.push_back(j);
            prefix.push_back(next);
            const bool closes = lookahead ? j == kref : j != letters[0];
            if (letters.size() % 2 == 0 && closes) {
                const double len = translation_length(next);
                if (len <= L) {
                    std::string w;
                    for (std::size_t t = 0; t < letters.size(); t += 2) w += reflection_pair_word(letters[t], letters[t + 1]);
                    const CyclicWord cw = canonical(w);
                    if (cw.primitive && !cw.letters.empty()) found.emplace(cw.letters, len);
                }
            }
            dfs();
            letters.pop_back();
            prefix.pop_back();
        }
    };
    for (int i0 = 0; i0 < 3; ++i0)
        for (int i1 = 0; i1 < 3; ++i1) {
            if (i1 == i0) continue;
            if (!lookahead && std::abs(half_trace_product(seam(i0), seam(i0) * seam(i1) * seam(i0))) > coshL) continue;
            letters = {i0, i1};
            prefix = {seam(i0), seam(i0) * seam(i1)};
            dfs();
        }
    const std::array<std::pair<const char*, double>, 3> bd = {{{"a", G.x}, {"b", G.y}, {"aB", G.z}}};
    for (const auto& [w, len] : bd)
        if (len <= L) found.emplace(canonical(w).letters, len);
}

// Intersection point of the axes of two hyperbolic elements (upper half-plane).
inline std::pair<double, double> axes_intersection(const Mat2& m1, const Mat2& m2) {
    auto circle = [](const Mat2& m) {
        // fixed points of z -> (az+b)/(cz+d): c z^2 + (d-a) z - b = 0
        const double disc = std::sqrt((m.d - m.a) * (m.d - m.a) + 4 * m.b * m.c);
        const double r1 = (m.a - m.d + disc) / (2 * m.c), r2 = (m.a - m.d - disc) / (2 * m.c);
        return std::pair<double, double>{0.5 * (r1 + r2), 0.5 * std::abs(r1 - r2)};
    };
    if (m1.c == 0 || m2.c == 0) throw std::runtime_error("axes_intersection: axis through infinity");
    auto [c1, r1] = circle(m1);
    auto [c2, r2] = circle(m2);
    const double x = (r1 * r1 - r2 * r2 - c1 * c1 + c2 * c2) / (2 * (c2 - c1));
    const double y2 = r1 * r1 - (x - c1) * (x - c1);
    if (!(y2 > 0)) throw std::runtime_error("axes_intersection: axes do not cross");
    return {x, std::sqrt(y2)};
}

// Torus search: reduced words are kept while cosh d(o, w o) stays below cosh(L + margin), with o the
// crossing point of the axes of a and b.
inline void enumerate_torus(const SurfaceGroup& G, double L, const EnumerationOptions& opt,
                            std::map<std::string, double>& found) {
    auto [u, v] = axes_intersection(G.A, G.B);
    const double sv = std::sqrt(v);
    const Mat2 h{1 / sv, -u / sv, 0, sv};
    const Mat2 hinv = h.inverse();
    std::map<char, Mat2> gen;
    for (char c : std::string("aAbB")) gen[c] = h * G.letter(c) * hinv;
    const double bound = 2 * std::cosh(L + opt.torus_margin);
    std::size_t nodes = 0;
    std::string w;
    std::function<void(const Mat2&)> dfs = [&](const Mat2& m) {
        if (++nodes > opt.max_nodes) throw EnumerationLimit("enumerate_geodesics: node limit exceeded", w.size());
        for (char c : std::string("aAbB")) {
            if (!w.empty() && c == inverse_letter(w.back())) continue;
            const Mat2 m2 = m * gen[c];
            if (m2.a * m2.a + m2.b * m2.b + m2.c * m2.c + m2.d * m2.d > bound) continue;
            w.push_back(c);
            if (c != inverse_letter(w.front())) {
                const double len = translation_length(m2);
                if (len <= L) {
                    const CyclicWord cw = canonical(w);
                    if (cw.primitive) found.emplace(cw.letters, len);
                }
            }
            dfs(m2);
            w.pop_back();
        }
    };
    dfs(Mat2{});
}

}  // namespace detail

inline std::vector<GeodesicRecord> enumerate_geodesics(const SurfaceGroup& G, double L,
                                                       const EnumerationOptions& opt = {}) {
    if (!(L > 0)) throw std::invalid_argument("enumerate_geodesics: L must be positive");
    std::map<std::string, double> found;
    if (G.kind == SurfaceKind::Pants) detail::enumerate_pants(G, L, opt, found);
    else detail::enumerate_torus(G, L, opt, found);

    std::vector<GeodesicRecord> out;
    out.reserve(found.size());
    std::size_t longest = 1;
    for (const auto& [w, len] : found) longest = std::max(longest, w.size());
    if (G.kind == SurfaceKind::Pants) {
        detail::PantsClassifier cls(static_cast<int>(longest));
        for (const auto& [w, len] : found) {
            auto [c, k] = cls(CyclicWord{w, true});
            out.push_back({CyclicWord{w, true}, G.length(w), c, k});
        }
    } else {
        const int bound = opt.torus_slope_bound > 0 ? opt.torus_slope_bound : static_cast<int>(std::ceil(L));
        detail::TorusClassifier cls(bound);
        for (const auto& [w, len] : found) {
            auto [c, k] = cls(CyclicWord{w, true});
            out.push_back({CyclicWord{w, true}, G.length(w), c, k});
        }
    }
    std::sort(out.begin(), out.end(), [](const GeodesicRecord& p, const GeodesicRecord& q) {
        if (p.length != q.length) return p.length < q.length;
        return p.word.letters < q.word.letters;
    });
    return out;
}

inline std::size_t count_filling(const std::vector<GeodesicRecord>& recs, double L) {
    std::size_t n = 0;
    for (const auto& r : recs)
        if (r.length <= L && r.filling()) ++n;
    return n;
}

inline std::size_t count_filling(const SurfaceGroup& G, double L, const EnumerationOptions& opt = {}) {
    return count_filling(enumerate_geodesics(G, L, opt), L);
}

// Independent check: all cyclically reduced words up to max_letters, kept if length <= L.
inline std::set<std::string> brute_force_classes(const SurfaceGroup& G, double L, int max_letters) {
    std::set<std::string> out;
    std::string w;
    std::function<void()> rec = [&]() {
        if (!w.empty() && w.back() != inverse_letter(w.front())) {
            const CyclicWord cw = canonical(w);
            if (cw.primitive && G.length(w) <= L) out.insert(cw.letters);
        }
        if (static_cast<int>(w.size()) == max_letters) return;
        for (char c : std::string("aAbB")) {
            if (!w.empty() && c == inverse_letter(w.back())) continue;
            w.push_back(c);
            rec();
            w.pop_back();
        }
    };
    rec();
    return out;
}

// ---- collar geometry ----

inline double collar_width(double s) {
    if (!(s > 0)) throw std::invalid_argument("collar_width: s must be positive");
    return std::asinh(1.0 / std::sinh(s));
}

// Length of the arc across the collar of a geodesic of length 2s that winds n times.
inline double collar_arc_length(double s, long n) {
    const double tn = 1.0 / std::sinh(s);  // tan(theta) = sinh w(s)
    const double c2 = 1.0 / (1.0 + tn * tn), s2 = 1.0 - c2;
    const double E = std::exp(2.0 * static_cast<double>(n) * s);
    const double num = s2 * (1 + E) * (1 + E) + c2 * (E - 1) * (E - 1);
    return std::acosh(1.0 + num / (2.0 * E * c2));
}

inline long collar_arc_count(double s, double L) {
    const double tol = 1e-12 * std::max(1.0, L);
    if (collar_arc_length(s, 0) > L + tol) return 0;
    long count = 1;
    for (long n = 1; collar_arc_length(s, n) <= L + tol; ++n) count += 2;
    return count;
}

// Smallest R0 with count <= (L - 2w + R0)/s on the sweep s in [0.02, 3], L - 2w in [0, 40].
inline double collar_r0() {
    static const double r0 = [] {
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 150; ++i) {
            const double s = 0.02 * i;
            const double w = collar_width(s);
            for (int j = 0; j <= 400; ++j) {
                const double L = 2 * w + 0.1 * j;
                best = std::max(best, static_cast<double>(collar_arc_count(s, L)) * s - L + 2 * w);
            }
        }
        return best;
    }();
    return r0;
}

struct CollarCensus {
    long count = 0;
    double bound = 0;
    double r0 = 0;
    double width = 0;
};

inline CollarCensus collar_arc_census(double s, double L) {
    const double w = collar_width(s);
    if (!(L >= 2 * w * (1 - 1e-12))) throw std::invalid_argument("collar_arc_census: need L >= 2 w(s)");
    CollarCensus c;
    c.width = w;
    c.count = collar_arc_count(s, L);
    c.r0 = collar_r0();
    c.bound = (L - 2 * w + c.r0) / s;
    return c;
}

// ---- monotonicity under shrinking boundary ----

struct MonotonicityReport {
    std::size_t compared = 0;
    std::size_t violations = 0;
    double max_increase = 0;  // largest length(to) - length(from), <= 0 when monotone
    std::vector<std::string> violating_words;
    std::vector<double> grid;
    std::vector<std::size_t> filling_from, filling_to;
    bool counts_monotone = true;
};

inline MonotonicityReport monotonicity_experiment(const SurfaceGroup& from, const SurfaceGroup& to, double L,
                                                  double tol = 1e-9, const EnumerationOptions& opt = {}) {
    if (from.kind != to.kind) throw std::invalid_argument("monotonicity_experiment: marking mismatch (different kinds)");
    if (from.kind == SurfaceKind::Pants) {
        if (to.x > from.x + tol || to.y > from.y + tol || to.z > from.z + tol)
            throw std::invalid_argument("monotonicity_experiment: target boundary lengths must not grow");
    } else {
        if (to.l > from.l + tol) throw std::invalid_argument("monotonicity_experiment: target boundary must not grow");
        if (std::abs(to.s - from.s) > tol || std::abs(to.twist - from.twist) > tol)
            throw std::invalid_argument("monotonicity_experiment: marking mismatch (interior coordinates differ)");
    }
    MonotonicityReport rep;
    rep.max_increase = -std::numeric_limits<double>::infinity();
    const auto recs = enumerate_geodesics(from, L, opt);
    for (const auto& r : recs) {
        const double d = to.length(r.word.letters) - r.length;
        ++rep.compared;
        rep.max_increase = std::max(rep.max_increase, d);
        if (d > tol * std::max(1.0, r.length)) {
            ++rep.violations;
            rep.violating_words.push_back(r.word.letters);
        }
    }
    const auto recs_to = enumerate_geodesics(to, L, opt);
    for (int i = 1; i <= 8; ++i) {
        const double t = L * i / 8.0;
        rep.grid.push_back(t);
        rep.filling_from.push_back(count_filling(recs, t));
        rep.filling_to.push_back(count_filling(recs_to, t));
        if (rep.filling_from.back() > rep.filling_to.back()) rep.counts_monotone = false;
    }
    if (rep.compared == 0) rep.max_increase = 0;
    return rep;
}

// ---- growth exponent ----

struct GrowthFit {
    double delta = 0;      // slope of log(t P(t))
    double raw_slope = 0;  // slope of log P(t)
    double residual = 0;   // rms residual of the log(t P) fit
    std::size_t classes = 0;
};

inline GrowthFit growth_exponent(const std::vector<double>& lengths, double L, int samples = 400) {
    std::vector<double> lens(lengths);
    std::sort(lens.begin(), lens.end());
    const auto total = static_cast<std::size_t>(std::upper_bound(lens.begin(), lens.end(), L) - lens.begin());
    if (total < 200) throw std::invalid_argument("growth_exponent: fewer than 200 classes up to L");
    std::vector<double> ts, y1, y2;
    for (int i = 0; i <= samples; ++i) {
        const double t = 0.5 * L * (1.0 + static_cast<double>(i) / samples);
        const auto P = static_cast<double>(std::upper_bound(lens.begin(), lens.end(), t) - lens.begin());
        if (P < 1) continue;
        ts.push_back(t);
        y1.push_back(std::log(P));
        y2.push_back(std::log(P) + std::log(t));
    }
    auto slope = [&](const std::vector<double>& y, double* rms) {
        const double n = static_cast<double>(ts.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            sx += ts[k];
            sy += y[k];
            sxx += ts[k] * ts[k];
            sxy += ts[k] * y[k];
        }
        const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double a = (sy - b * sx) / n;
        if (rms) {
            double ss = 0;
            for (std::size_t k = 0; k < ts.size(); ++k) ss += (y[k] - a - b * ts[k]) * (y[k] - a - b * ts[k]);
            *rms = std::sqrt(ss / n);
        }
        return b;
    };
    GrowthFit f;
    f.classes = total;
    f.raw_slope = slope(y1, nullptr);
    f.delta = slope(y2, &f.residual);
    return f;
}

inline GrowthFit growth_exponent(const SurfaceGroup& G, double L, const EnumerationOptions& opt = {}) {
    std::vector<double> lens;
    for (const auto& r : enumerate_geodesics(G, L, opt)) lens.push_back(r.length);
    return growth_exponent(lens, L);
}

}  // namespace wpv
