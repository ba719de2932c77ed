// wpv: command-line front end for the volume engine, geodesic enumeration, test functions
// and expectation main terms.

#include <CLI11.hpp>
#include <json.hpp>

#include <wpv/expectations.hpp>
#include <wpv/geodesics.hpp>
#include <wpv/intersections.hpp>
#include <wpv/spectral.hpp>
#include <wpv/volumes.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace {

using Cell = std::variant<long long, double, std::string>;

struct Table {
    std::string name;
    std::string reference;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows{};
    int digits = 12;
    bool fixed = false;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

std::string fmt_double(double v, int digits, bool fixed) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fixed ? "%.*f" : "%.*g", digits, v);
    return buf;
}

std::string csv_cell(const Cell& c, const Table& t) {
    if (auto p = std::get_if<long long>(&c)) return std::to_string(*p);
    if (auto p = std::get_if<double>(&c)) return fmt_double(*p, t.digits, t.fixed);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

nlohmann::ordered_json json_cell(const Cell& c, const Table& t) {
    if (auto p = std::get_if<long long>(&c)) return *p;
    if (auto p = std::get_if<double>(&c)) return std::stod(fmt_double(*p, t.digits, t.fixed));
    return std::get<std::string>(c);
}

struct Output {
    std::string format = "csv";

    void emit(const std::vector<Table>& tables) const {
        if (format == "json") {
            nlohmann::ordered_json doc = nlohmann::ordered_json::array();
            for (const auto& t : tables) {
                nlohmann::ordered_json obj;
                obj["name"] = t.name;
                obj["reference"] = t.reference;
                obj["columns"] = t.columns;
                auto rows = nlohmann::ordered_json::array();
                for (const auto& r : t.rows) {
                    nlohmann::ordered_json o;
                    for (std::size_t i = 0; i < r.size(); ++i) o[t.columns[i]] = json_cell(r[i], t);
                    rows.push_back(o);
                }
                obj["rows"] = rows;
                doc.push_back(obj);
            }
            std::cout << (tables.size() == 1 ? doc[0] : doc).dump(2) << "\n";
            return;
        }
        bool first = true;
        for (const auto& t : tables) {
            if (!first) std::cout << "\n";
            first = false;
            if (tables.size() > 1) std::cout << "# " << t.name << "\n";
            for (std::size_t i = 0; i < t.columns.size(); ++i) std::cout << (i ? "," : "") << t.columns[i];
            std::cout << "\n";
            for (const auto& r : t.rows) {
                for (std::size_t i = 0; i < r.size(); ++i) std::cout << (i ? "," : "") << csv_cell(r[i], t);
                std::cout << "\n";
            }
        }
    }
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad number in ") + what + ": '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string("empty list for ") + what);
    return out;
}

// a0:a1:step, inclusive of a1 up to rounding
std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_list(item, "--alpha-grid").front());
    if (parts.size() != 3) throw UsageError("--alpha-grid expects a0:a1:step");
    const double a0 = parts[0], a1 = parts[1], h = parts[2];
    if (!(h > 0) || a1 < a0) throw UsageError("--alpha-grid needs step > 0 and a1 >= a0");
    const long count = static_cast<long>(std::floor((a1 - a0) / h + 1e-9)) + 1;
    if (count > 1000000) throw UsageError("--alpha-grid has too many points");
    std::vector<double> out;
    for (long i = 0; i < count; ++i) out.push_back(a0 + static_cast<double>(i) * h);
    return out;
}

std::filesystem::path default_cache() {
    if (const char* env = std::getenv("WPV_CACHE"); env && *env) return env;
    return "wpv_tau_cache.txt";
}

struct Context {
    std::string cache_path;
    int jobs = 1;
    Output out;
    wpv::MemoStore store;
    bool loaded = false;

    wpv::MemoStore& memo() {
        if (!loaded) {
            loaded = true;
            if (std::filesystem::exists(cache_path)) store.load(cache_path);
            else store.set_path(cache_path);
        }
        return store;
    }
};

// ---------------------------------------------------------------------------
// cache

std::vector<Table> cache_build(Context& ctx, int gmax, int smax) {
    ctx.store.set_path(ctx.cache_path);
    if (std::filesystem::exists(ctx.cache_path)) ctx.store.load(ctx.cache_path);
    ctx.loaded = true;
    if (!wpv::store_covers(ctx.store, gmax, smax)) wpv::populate_store(ctx.store, gmax, smax, ctx.jobs);
    ctx.store.save();
    Table t{"cache", "memoized intersection numbers", {"path", "entries", "gmax", "smax"}};
    t.add({ctx.cache_path, static_cast<long long>(ctx.store.size()), static_cast<long long>(gmax), static_cast<long long>(smax)});
    return {t};
}

std::vector<Table> cache_verify(Context& ctx, int& status) {
    const auto r = wpv::MemoStore::verify(ctx.cache_path);
    Table t{"cache-verify", "checksum of the memoized intersection numbers", {"path", "ok", "entries", "digest", "message"}};
    t.add({ctx.cache_path, std::string(r.ok ? "true" : "false"), static_cast<long long>(r.entries), r.stored_digest, r.message});
    status = r.ok ? 0 : 1;
    return {t};
}

// ---------------------------------------------------------------------------
// volumes

std::vector<Table> volumes_poly(Context& ctx, int g, int n) {
    if (!wpv::is_stable(g, n) || n < 1) throw UsageError("volumes poly needs stable (g,n) with n >= 1");
    const auto p = wpv::volume_polynomial(g, n, ctx.memo());
    Table t{"volume-polynomial", "coefficients of V_{g,n}(x) in the monomials x^{2a}", {"exponents", "coefficient", "value"}};
    for (const auto& [a, c] : p.coeffs) {
        std::string e;
        for (std::size_t i = 0; i < a.size(); ++i) e += (i ? " " : "") + std::to_string(a[i]);
        t.add({e, c.str(), c.to_double()});
    }
    return {t};
}

std::vector<Table> volumes_ratios(Context& ctx, int n, int gmin, int gmax) {
    if (gmin < 2 || gmin >= gmax) throw UsageError("volumes ratios needs 2 <= gmin < gmax");
    auto& st = ctx.memo();
    Table t{"volume-ratios", "V_{g,n+1}/(8 pi^2 g V_{g,n}) and V_{g-1,n+2}/V_{g,n} against 1 + c/g",
            {"g", "r1", "r1_predicted", "r2", "r2_predicted"}};
    for (int g = 2; g <= gmax; ++g) {
        if (!wpv::is_stable(g, n)) continue;
        const auto a = wpv::ratio_r1(g, n, st);
        const auto b = wpv::ratio_r2(g, n, st);
        t.add({static_cast<long long>(g), a.measured, a.predicted, b.measured, b.predicted});
    }
    Table f{"slope-fit", "1/g coefficient extrapolated from g in [gmin, gmax]", {"ratio", "slope", "predicted", "rel_error"}};
    for (auto kind : {wpv::RatioKind::R1, wpv::RatioKind::R2}) {
        const auto s = wpv::fit_slope(kind, n, gmax, st, gmin);
        f.add({std::string(kind == wpv::RatioKind::R1 ? "r1" : "r2"), s.slope, s.predicted, s.rel_error});
    }
    return {t, f};
}

std::vector<Table> volumes_bounds(Context& ctx, int gmax, int nmax, int samples, int& status) {
    auto& st = ctx.memo();
    Table t{"classical-bounds", "b0 <= 4 pi^2 (2g-2+n) V_{g,n}/V_{g,n+1} <= b1 and sampled sinh bounds",
            {"g", "n", "sandwich", "b0", "b1", "sandwich_ok", "sample_violations", "ok"}};
    status = 0;
    for (int g = 0; g <= gmax; ++g)
        for (int n = 0; n <= nmax; ++n) {
            if (!wpv::is_stable(g, n) || n < 1) continue;
            const auto r = wpv::classical_bounds(g, n, st, samples);
            if (!r.ok()) status = 1;
            t.add({static_cast<long long>(g), static_cast<long long>(n), r.sandwich_applies ? r.sandwich_value : 0.0,
                   wpv::bound_b0(), wpv::bound_b1(), std::string(r.sandwich_ok ? "true" : "false"),
                   static_cast<long long>(r.sample_violations), std::string(r.ok() ? "true" : "false")});
        }
    return {t};
}

// ---------------------------------------------------------------------------
// geodesics

wpv::SurfaceGroup make_surface(const std::string& kind, const std::string& lengths, double l, double s, double tw) {
    if (kind == "pants") {
        const auto v = parse_list(lengths, "--lengths");
        if (v.size() != 3) throw UsageError("--lengths expects x,y,z");
        return wpv::build_pants(v[0], v[1], v[2]);
    }
    if (kind == "torus") return wpv::build_torus(l, s, tw);
    throw UsageError("--kind must be pants or torus");
}

std::vector<Table> geodesics_enumerate(const wpv::SurfaceGroup& G, double L) {
    Table t{"geodesics", "primitive unoriented closed geodesics up to length L", {"word", "length", "class"}};
    for (const auto& r : wpv::enumerate_geodesics(G, L)) t.add({r.word.letters, r.length, wpv::class_name(r.cls, r.k)});
    return {t};
}

std::vector<Table> geodesics_census(double s, double L) {
    const auto c = wpv::collar_arc_census(s, L);
    Table t{"collar-census", "arcs across the collar of a geodesic of length 2s, bound (L - 2w + R0)/s",
            {"s", "L", "width", "count", "bound", "r0"}};
    t.add({s, L, c.width, static_cast<long long>(c.count), c.bound, c.r0});
    return {t};
}

std::vector<Table> geodesics_delta(const std::vector<double>& grid, double L) {
    Table t{"growth-exponent", "least-squares slope of log(t P(t)) on [L/2, L] for pants(l,0,0)",
            {"l", "delta", "raw_slope", "residual", "classes"}};
    for (double l : grid) {
        const auto f = wpv::growth_exponent(wpv::build_pants(l, 0, 0), L);
        t.add({l, f.delta, f.raw_slope, f.residual, static_cast<long long>(f.classes)});
    }
    return {t};
}

// ---------------------------------------------------------------------------
// spectral

std::vector<Table> spectral_f1() {
    const auto f = wpv::make_f1();
    const auto r = f.verify();
    Table t{"f1-report", "f_1 = (g*g)/(g*g)(0) with g(x) = exp(-1/(1/4 - x^2))",
            {"support_ok", "even_ok", "fourier_real_ok", "fourier_imag_ok", "monotone_ok", "min_fourier_real",
             "min_fourier_imag", "max_increase", "f1_second_at_zero", "f1_integral"}};
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    t.add({b(r.support_ok), b(r.even_ok), b(r.fourier_real_ok), b(r.fourier_imag_ok), b(r.monotone_ok), r.min_fourier_real,
           r.min_fourier_imag, r.max_increase, f.second_at_zero(), f.integral()});
    return {t};
}

std::vector<Table> spectral_abel(const std::vector<double>& Ts) {
    Table t{"abel", "inverse Abel transform k_T of f_T, round trip and k_T(0) by the spectral side",
            {"T", "roundtrip_sup_error", "k_min", "k0", "k0_spectral", "k0_rel_error"}};
    for (double T : Ts) {
        if (!(T > 0)) throw UsageError("--T must be positive");
        const auto r = wpv::abel_report(T);
        t.add({T, r.roundtrip_sup_error, r.k_min, r.k0, r.k0_spectral, r.k0_rel_error});
    }
    return {t};
}

std::vector<Table> gap_curve(const std::vector<double>& grid) {
    for (double a : grid)
        if (!(a >= 0 && a < 0.5)) throw UsageError("--alpha-grid values must lie in [0, 0.5)");
    Table t{"gap-curve", "1/4 - (1/(6(1-alpha)))^2, 1/4 - ((1+2 alpha)/4)^2 and the Cheeger-type constant",
            {"alpha", "main", "hide", "cheeger"}};
    t.digits = 6;
    t.fixed = true;
    for (double a : grid) {
        const auto p = wpv::gap_curve(a);
        t.add({p.alpha, p.main, p.hide, p.cheeger});
    }
    return {t};
}

// ---------------------------------------------------------------------------
// expect

std::vector<Table> expect_nsep(Context& ctx, int g, int n, double T) {
    const auto r = wpv::nsep_main_term(g, n, T, ctx.memo());
    const auto ns = wpv::ns_main_term(g, n, T);
    Table t{"nsep", "non-separating simple curves against H: E - hat f_T(i/2) versus its main term",
            {"g", "n", "T", "value", "termwise", "fhat_half", "lhs", "main_term", "residual", "envelope", "fitted_constant",
             "ns_main_term", "cancellation"}};
    t.add({static_cast<long long>(g), static_cast<long long>(n), T, r.expectation, r.termwise, r.fhat_half, r.lhs, r.main,
           r.residual, r.envelope, std::abs(r.residual) / r.envelope, ns.total, r.main + ns.total});
    return {t};
}

std::vector<Table> expect_cancellation(long n) {
    const auto r = wpv::cancellation_check(n);
    Table t{"cancellation", "sum of the simple and non-simple main-term integrands in Q[x, n, ln2]",
            {"n", "nsep", "figure_eight", "one_sided", "cusp", "sum", "n_part_sum", "zero", "value_at_x3"}};
    t.add({static_cast<long long>(n), wpv::tri_to_string(r.nsep), wpv::tri_to_string(r.figure_eight),
           wpv::tri_to_string(r.one_sided), wpv::tri_to_string(r.cusp), wpv::tri_to_string(r.sum),
           wpv::tri_to_string(r.n_part_sum), std::string(r.zero && r.n_part_zero ? "true" : "false"), r.value_at_n.get_str()});
    return {t};
}

std::vector<Table> expect_subsurfaces(Context& ctx, int g, int n, double ell, int k) {
    if (k == 1) {
        const auto r = wpv::expected_subsurface_count(g, n, ell, ctx.memo());
        Table t{"subsurfaces", "expected number of short-boundary pants and one-holed tori",
                {"g", "n", "ell", "two_cusp", "one_cusp", "no_cusp", "torus", "value", "main_term", "residual", "envelope",
                 "fitted_constant"}};
        t.add({static_cast<long long>(g), static_cast<long long>(n), ell, r.two_cusp, r.one_cusp, r.no_cusp, r.torus, r.engine,
               r.main, r.residual, r.envelope, std::abs(r.residual) / r.envelope});
        const auto lt = wpv::leading_type_count(g, n, ell, 1, ctx.memo());
        Table u{"leading-type", "k-tuples of two-cusp pants", {"k", "value", "main_term", "ratio", "multinomial"}};
        u.add({1LL, lt.engine, lt.main, lt.ratio, lt.multinomial});
        return {t, u};
    }
    const auto lt = wpv::leading_type_count(g, n, ell, k, ctx.memo());
    Table u{"leading-type", "k-tuples of two-cusp pants", {"g", "n", "ell", "k", "value", "main_term", "ratio", "multinomial"}};
    u.add({static_cast<long long>(g), static_cast<long long>(n), ell, static_cast<long long>(k), lt.engine, lt.main, lt.ratio,
           lt.multinomial});
    return {u};
}

std::vector<Table> expect_identity(int K) {
    const auto r = wpv::one_sided_sum_identity(K);
    Table t{"identity", "partial sums of the one-sided series against ln2 - 1/2", {"K", "partial", "target", "difference"}};
    t.add({static_cast<long long>(K), r.partial, r.target, r.partial - r.target});
    return {t};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weil-Petersson volumes, geodesic counts and trace-formula main terms"};
    app.require_subcommand(1);
    Context ctx;
    ctx.cache_path = default_cache().string();
    app.add_option("--cache", ctx.cache_path, "intersection-number cache (default: $WPV_CACHE or ./wpv_tau_cache.txt)");
    app.add_option("--format", ctx.out.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--jobs", ctx.jobs, "worker threads")->check(CLI::Range(1, 256));

    std::function<std::vector<Table>()> run;
    int status = 0;

    // cache
    auto* cache = app.add_subcommand("cache", "manage the intersection-number cache");
    cache->require_subcommand(1);
    int gmax_c = 14, nmax_c = 5, smax_c = 0;
    auto* cb = cache->add_subcommand("build", "compute and store all brackets with g <= gmax, g+n <= gmax+nmax");
    cb->add_option("--gmax", gmax_c)->check(CLI::Range(0, 30));
    auto* nmax_opt = cb->add_option("--nmax", nmax_c, "region g+n <= gmax+nmax")->check(CLI::Range(1, 30));
    cb->add_option("--smax", smax_c, "region g+n <= smax")->check(CLI::Range(1, 40))->excludes(nmax_opt);
    cb->callback([&] {
        const int smax = smax_c > 0 ? smax_c : gmax_c + nmax_c;
        run = [&, smax] { return cache_build(ctx, gmax_c, smax); };
    });
    auto* cv = cache->add_subcommand("verify", "check the cache checksum");
    cv->callback([&] { run = [&] { return cache_verify(ctx, status); }; });

    // volumes
    auto* vol = app.add_subcommand("volumes", "volume polynomials and their asymptotics");
    vol->require_subcommand(1);
    int vg = 1, vn = 1, vgmin = 8, vgmax = 14, vnmax = 3, vsamples = 20;
    auto* vp = vol->add_subcommand("poly", "coefficients of V_{g,n}(x)");
    vp->add_option("--g", vg)->required()->check(CLI::Range(0, 30));
    vp->add_option("--n", vn)->required()->check(CLI::Range(1, 40));
    vp->callback([&] { run = [&] { return volumes_poly(ctx, vg, vn); }; });
    auto* vr = vol->add_subcommand("ratios", "volume ratios and their fitted 1/g coefficients");
    vr->add_option("--n", vn)->required()->check(CLI::Range(0, 20));
    vr->add_option("--gmin", vgmin)->check(CLI::Range(2, 29));
    vr->add_option("--gmax", vgmax)->check(CLI::Range(3, 30));
    vr->callback([&] { run = [&] { return volumes_ratios(ctx, vn, vgmin, vgmax); }; });
    auto* vb = vol->add_subcommand("check-bounds", "classical volume bounds over a range of (g,n)");
    vb->add_option("--gmax", vgmax)->check(CLI::Range(0, 30));
    vb->add_option("--nmax", vnmax)->check(CLI::Range(1, 30));
    vb->add_option("--samples", vsamples)->check(CLI::Range(0, 100000));
    vb->callback([&] { run = [&] { return volumes_bounds(ctx, vgmax, vnmax, vsamples, status); }; });

    // geodesics
    auto* geo = app.add_subcommand("geodesics", "closed geodesics on pants and one-holed tori");
    geo->require_subcommand(1);
    std::string kind = "pants", lengths = "0,0,0", lgrid = "1,2,4";
    double gL = 6, tl = 1, ts = 0.7, tt = 0, cs = 0.1, cL = 10;
    auto* ge = geo->add_subcommand("enumerate", "all primitive classes up to length L");
    ge->add_option("--kind", kind)->check(CLI::IsMember({"pants", "torus"}));
    ge->add_option("--lengths", lengths, "pants boundary lengths x,y,z");
    ge->add_option("--l", tl, "torus boundary length")->check(CLI::NonNegativeNumber);
    ge->add_option("--s", ts, "torus: half the length of the a-curve")->check(CLI::PositiveNumber);
    ge->add_option("--twist", tt, "torus twist");
    ge->add_option("--L", gL)->required()->check(CLI::PositiveNumber);
    ge->callback([&] {
        auto G = make_surface(kind, lengths, tl, ts, tt);
        run = [&, G] { return geodesics_enumerate(G, gL); };
    });
    auto* gc = geo->add_subcommand("census", "arc count across a collar");
    gc->add_option("--s", cs)->required()->check(CLI::PositiveNumber);
    gc->add_option("--L", cL)->required()->check(CLI::PositiveNumber);
    gc->callback([&] {
        if (cL < 2 * wpv::collar_width(cs)) throw UsageError("--L must be at least 2 w(s)");
        run = [&] { return geodesics_census(cs, cL); };
    });
    auto* gd = geo->add_subcommand("delta", "growth exponents of pants(l,0,0)");
    gd->add_option("--l-grid", lgrid, "comma-separated l values");
    gd->add_option("--L", gL)->check(CLI::PositiveNumber);
    gd->callback([&] {
        const auto grid = parse_list(lgrid, "--l-grid");
        for (double l : grid)
            if (!(l >= 0)) throw UsageError("--l-grid values must be >= 0");
        run = [&, grid] { return geodesics_delta(grid, gL); };
    });

    // spectral
    auto* sp = app.add_subcommand("spectral", "test functions and Abel transforms");
    sp->require_subcommand(1);
    std::string Tlist = "1,5,10";
    auto* sf = sp->add_subcommand("f1-report", "properties of f_1");
    sf->callback([&] { run = [&] { return spectral_f1(); }; });
    auto* sa = sp->add_subcommand("abel", "Abel round trip and k_T(0)");
    sa->add_option("--T", Tlist, "comma-separated horizons");
    sa->callback([&] {
        const auto Ts = parse_list(Tlist, "--T");
        run = [&, Ts] { return spectral_abel(Ts); };
    });
    std::string agrid = "0:0.49:0.01";
    auto* sg = sp->add_subcommand("gap-curve", "spectral gap curves");
    sg->add_option("--alpha-grid", agrid, "a0:a1:step");
    sg->callback([&] {
        const auto grid = parse_grid(agrid);
        run = [&, grid] { return gap_curve(grid); };
    });

    // gap-curve (top level)
    auto* gcurve = app.add_subcommand("gap-curve", "spectral gap curves");
    gcurve->add_option("--alpha-grid", agrid, "a0:a1:step");
    gcurve->callback([&] {
        const auto grid = parse_grid(agrid);
        run = [&, grid] { return gap_curve(grid); };
    });

    // expect
    auto* ex = app.add_subcommand("expect", "expectations over moduli space and their main terms");
    ex->require_subcommand(1);
    int eg = 8, en = 0, ek = 1, eK = 200;
    double eT = 5, eell = 1;
    auto* en1 = ex->add_subcommand("nsep", "non-separating simple curves");
    en1->add_option("--g", eg)->required()->check(CLI::Range(1, 30));
    en1->add_option("--n", en)->check(CLI::Range(0, 30));
    en1->add_option("--T", eT)->check(CLI::PositiveNumber);
    en1->callback([&] {
        if (!wpv::is_stable(eg - 1, en + 2)) throw UsageError("expect nsep needs stable (g-1, n+2)");
        run = [&] { return expect_nsep(ctx, eg, en, eT); };
    });
    long cn = 0;
    auto* ec = ex->add_subcommand("cancellation", "exact cancellation of the main-term integrands");
    ec->add_option("--n", cn)->check(CLI::Range(0L, 1000000L));
    ec->callback([&] { run = [&] { return expect_cancellation(cn); }; });
    auto* es = ex->add_subcommand("subsurfaces", "short-boundary subsurface counts");
    es->add_option("--g", eg)->required()->check(CLI::Range(2, 30));
    es->add_option("--n", en)->check(CLI::Range(0, 30));
    es->add_option("--ell", eell)->check(CLI::PositiveNumber);
    es->add_option("--k", ek)->check(CLI::Range(1, 10));
    es->callback([&] {
        if (en < 2 * ek && ek > 1) throw UsageError("--k needs n >= 2k");
        run = [&] { return expect_subsurfaces(ctx, eg, en, eell, ek); };
    });
    auto* ei = ex->add_subcommand("identity", "one-sided series against ln2 - 1/2");
    ei->add_option("--K", eK)->check(CLI::Range(2, 100000));
    ei->callback([&] { run = [&] { return expect_identity(eK); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        const auto tables = run();
        ctx.out.emit(tables);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return status;
}
