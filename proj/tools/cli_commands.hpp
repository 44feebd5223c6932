#pragma once

// Command layer of the qw3 tool. Kept in a header so the tests can run
// commands in-process with captured streams.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "qw3/coin_json.hpp"
#include "qw3/qw3.hpp"

namespace qw3::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kBadInput = 2, kNotUnitary = 3, kOverflow = 4 };

inline std::string num(double x) { return fmt::format("{:.12g}", x); }

inline int exit_code_for(const Error& e) {
    const std::string& c = e.code();
    if (c == "NotUnitary") return kNotUnitary;
    if (c == "LatticeOverflow") return kOverflow;
    if (c == "InvalidC2Params" || c == "MalformedInput" || c == "DomainError") return kBadInput;
    return kCheckFailed;
}

inline int report(std::ostream& err, const std::string& code, const std::string& msg, int rc) {
    err << "error:" << code << ": " << msg << '\n';
    return rc;
}

// Angle flags shared by the subcommands

inline const std::vector<std::string>& angle_names() {
    static const std::vector<std::string> names{"theta12", "theta13", "theta23", "delta", "gamma1", "gamma2",
                                                "gamma3",  "gamma4",  "gamma5",  "kappa"};
    return names;
}

struct AngleFlags {
    std::map<std::string, double> value;
    std::map<std::string, CLI::Option*> opt;
    bool degrees = false;

    void attach(CLI::App& app) {
        for (const auto& n : angle_names()) {
            value[n] = 0.0;
            opt[n] = app.add_option("--" + n, value[n], n + " (radians unless --degrees)");
        }
        app.add_flag("--degrees", degrees, "read all angles in degrees");
    }
    bool has(const std::string& n) const { return opt.at(n)->count() > 0; }
    double scale() const { return degrees ? kPi / 180.0 : 1.0; }
    double get(const std::string& n) const { return value.at(n) * scale(); }
};

inline void require_only(const AngleFlags& a, std::initializer_list<const char*> allowed, const std::string& family) {
    for (const auto& n : angle_names()) {
        if (!a.has(n)) continue;
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* s) { return n == s; }) == allowed.end())
            throw MalformedInput("--" + n + " does not apply to family " + family);
    }
}

inline C1Params c1_from_flags(const AngleFlags& a) {
    require_only(a, {"gamma2", "gamma4", "gamma5", "theta13", "theta23"}, "c1");
    return {a.get("gamma2"), a.get("gamma4"), a.get("gamma5"), a.get("theta13"), a.get("theta23")};
}

/// --kappa fixes γ1 = γ2 + γ4 − κ, so it cannot be combined with --gamma1.
inline C2Params c2_from_flags(const AngleFlags& a) {
    require_only(a, {"gamma1", "gamma2", "gamma4", "gamma5", "delta", "theta23", "kappa"}, "c2");
    C2Params p{a.get("gamma1"), a.get("gamma2"), a.get("gamma4"), a.get("gamma5"), a.get("delta"), a.get("theta23")};
    if (a.has("kappa")) {
        if (a.has("gamma1")) throw MalformedInput("--kappa and --gamma1 are mutually exclusive");
        p.gamma1 = p.gamma2 + p.gamma4 - a.get("kappa");
    }
    c2_derived(p);
    return p;
}

inline CoinParams general_from_flags(const AngleFlags& a) {
    require_only(a, {"theta12", "theta13", "theta23", "delta", "gamma1", "gamma2", "gamma3", "gamma4", "gamma5"}, "general");
    return {a.get("theta12"), a.get("theta13"), a.get("theta23"), a.get("delta"), a.get("gamma1"),
            a.get("gamma2"),  a.get("gamma3"),  a.get("gamma4"),  a.get("gamma5")};
}

inline CoinSpec spec_from_flags(const std::string& family, const AngleFlags& a) {
    if (family == "c1") {
        const C1Params p = c1_from_flags(a);
        return {build_c1(p), FamilyParams{p}, std::nullopt};
    }
    if (family == "c2") {
        const C2Params p = c2_from_flags(a);
        return {build_c2(p), FamilyParams{p}, std::nullopt};
    }
    if (family == "general") {
        const CoinParams p = general_from_flags(a);
        return {build_unitary(p), std::nullopt, p};
    }
    throw MalformedInput("--family must be c1, c2 or general");
}

inline CoinSpec read_coin_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw MalformedInput(path + ": " + e.what());
    }
    return coin_from_json(j);
}

/// Writes to `path`, or to `out` when the path is empty or "-".
inline void emit(const std::string& path, std::ostream& out, const std::string& text) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw MalformedInput("cannot write " + path);
    f << text;
}

/// Evaluates f(i) for i in [0, n) on worker threads; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& f) {
    std::vector<T> out(n);
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
        }));
    for (auto& j : jobs) j.get();
    return out;
}

// coin

inline json classify_json(const UnitaryCoin& coin) {
    const CoinClass cls = classify_coin(coin);
    json j = {{"class", std::string(to_string(cls.kind))}};
    if (!cls.has_point_spectrum()) return j;
    j["det_phase"] = cls.det_phase;
    j["constant_eigenvalue"] = {cls.constant_eigenvalue->real(), cls.constant_eigenvalue->imag()};
    j["gauge_phase"] = cls.gauge_phase;
    if (cls.kind == CoinKind::Class1) j["also_class2"] = cls.also_class2;
    try {
        const ExtractedDispersion e = extract_dispersion_params(coin);
        j["rho"] = e.rho;
        j["mu"] = e.mu;
        j["gamma"] = e.gamma;
        j["phi"] = e.phi;
    } catch (const InconsistentCoin&) {
        // trivial branches need not have the C_LL = conj(C_RR) structure
    }
    return j;
}

// scan

struct Axis {
    std::string name;
    double start = 0.0, stop = 0.0;
    int count = 0;

    double at(int i) const { return count == 1 ? start : start + (stop - start) * i / (count - 1); }
};

inline Axis parse_axis(const std::string& s, double scale) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw MalformedInput("--sweep expects name=start:stop:count");
    Axis a;
    a.name = s.substr(0, eq);
    std::string rest = s.substr(eq + 1);
    std::replace(rest.begin(), rest.end(), ':', ' ');
    std::istringstream in(rest);
    if (!(in >> a.start >> a.stop >> a.count) || !(in >> std::ws).eof())
        throw MalformedInput("--sweep expects name=start:stop:count, got " + s);
    if (a.count < 2) throw MalformedInput("sweep count must be at least 2");
    a.start *= scale;
    a.stop *= scale;
    return a;
}

inline std::pair<std::string, double> parse_fix(const std::string& s, double scale) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw MalformedInput("--fix expects name=value");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s.substr(eq + 1), &used);
    } catch (const std::exception&) {
        throw MalformedInput("--fix value is not a number: " + s);
    }
    if (used != s.size() - eq - 1) throw MalformedInput("--fix value is not a number: " + s);
    return {s.substr(0, eq), v * scale};
}

struct ScanOptions {
    std::string family = "c1";
    std::string output = "velocity";
    std::vector<std::string> sweeps, fixes;
    bool degrees = false;
    int simulate_steps = 0;
    std::string matrix;
    int samples = 256;
    std::string out;
};

inline std::string scan_spectrum_csv(const UnitaryCoin& coin, int samples) {
    const SpectralScan s = spectral_scan(coin, samples);
    std::string csv = "k,re_lambda0,im_lambda0,omega_plus,omega_minus\n";
    const auto ci = s.constant_track_index();
    for (std::size_t i = 0; i < s.size(); ++i) {
        csv += num(s.k_grid[i]);
        if (ci) {
            const Complex l0 = s.tracks[static_cast<std::size_t>(*ci)][i];
            csv += "," + num(l0.real()) + "," + num(l0.imag());
        } else {
            csv += ",,";
        }
        if (s.gauge_phase) csv += "," + num(s.omega_plus[i]) + "," + num(s.omega_minus[i]);
        else csv += ",,";
        csv += '\n';
    }
    return csv;
}

inline std::string scan_family_csv(const ScanOptions& o) {
    const double scale = o.degrees ? kPi / 180.0 : 1.0;
    const bool c1 = o.family == "c1";
    if (!c1 && o.family != "c2") throw MalformedInput("--family must be c1 or c2 for parameter scans");
    const bool want_v = o.output == "velocity" || o.output == "both";
    const bool want_p = o.output == "trapping" || o.output == "both";
    if (!want_v && !want_p) throw MalformedInput("--output must be velocity, trapping, both or spectrum");

    const std::vector<std::string> names = c1 ? std::vector<std::string>{"theta13", "theta23"}
                                              : std::vector<std::string>{"delta", "theta23", "kappa"};
    std::map<std::string, double> fixed;
    for (const auto& n : names) fixed[n] = 0.0;
    for (const auto& f : o.fixes) {
        auto [n, v] = parse_fix(f, scale);
        if (!fixed.contains(n)) throw MalformedInput("unknown scan parameter " + n);
        fixed[n] = v;
    }
    std::vector<Axis> axes;
    for (const auto& s : o.sweeps) {
        Axis a = parse_axis(s, scale);
        if (!fixed.contains(a.name)) throw MalformedInput("unknown scan parameter " + a.name);
        for (const auto& b : axes)
            if (b.name == a.name) throw MalformedInput("parameter swept twice: " + a.name);
        axes.push_back(a);
    }
    if (axes.empty() || axes.size() > 2) throw MalformedInput("a scan needs one or two --sweep axes");

    std::string header;
    for (const auto& n : names) header += (header.empty() ? "" : ",") + n;
    if (want_v) header += ",v_peak,method";
    if (want_p) header += ",P_infinity,P_quadrature";
    if (want_p && o.simulate_steps > 0) header += ",P_simulated";
    if (!c1) header += ",invalid";
    header += '\n';

    const int n0 = axes[0].count;
    const int n1 = axes.size() > 1 ? axes[1].count : 1;
    const auto rows = parallel_map<std::string>(static_cast<std::size_t>(n0) * static_cast<std::size_t>(n1), [&](std::size_t idx) {
        std::map<std::string, double> p = fixed;
        // first axis varies slowest
        p[axes[0].name] = axes[0].at(static_cast<int>(idx) / n1);
        if (axes.size() > 1) p[axes[1].name] = axes[1].at(static_cast<int>(idx) % n1);

        std::string row;
        for (const auto& n : names) row += (row.empty() ? "" : ",") + num(p[n]);
        const bool valid = c1 || c2_admissible(p["delta"], p["kappa"]);
        const FamilyParams fp = c1 ? FamilyParams{C1Params{0.0, 0.0, 0.0, p["theta13"], p["theta23"]}}
                                   : FamilyParams{C2Params{-p["kappa"], 0.0, 0.0, 0.0, p["delta"], p["theta23"]}};
        if (want_v) {
            if (valid) {
                const DispersionParams d = c1 ? c1_dispersion_params(p["theta13"], p["theta23"])
                                              : c2_dispersion_params(p["delta"], p["kappa"], p["theta23"]);
                const PeakVelocityResult r = peak_velocity(d);
                row += "," + num(r.v_peak) + "," + std::string(to_string(r.method));
            } else {
                row += ",,";
            }
        }
        if (want_p) {
            std::optional<TrappingResult> tr;
            if (valid) {
                try {
                    tr = limiting_amplitudes(fp);
                } catch (const PoleOnContour&) {
                    // stationary norm vanishes: trapping is undefined at this point
                }
            }
            row += tr ? "," + num(tr->P_infinity) + "," + num(tr->P_quadrature) : std::string(",,");
            if (o.simulate_steps > 0) {
                if (valid) row += "," + num(simulate(build_coin(fp), MixedInitial{}, o.simulate_steps).tail_average_trapping);
                else row += ",";
            }
        }
        if (!c1) row += valid ? ",0" : ",1";
        return row + '\n';
    });

    std::string csv = header;
    for (const auto& r : rows) csv += r;
    return csv;
}

// simulate

struct SimulateOptions {
    std::string coin_file, family;
    int steps = 1000;
    std::string initial = "mixed";
    std::optional<int> lattice;
    std::string distribution, series, summary;
};

inline InitialCoinState parse_initial(const std::string& s) {
    if (s == "L") return Vec3C::basis(L);
    if (s == "S") return Vec3C::basis(S);
    if (s == "R") return Vec3C::basis(R);
    if (s == "mixed") return MixedInitial{};
    throw MalformedInput("--initial must be L, S, R or mixed");
}

/// Closed-form P∞ when the family is known, the eigenprojector integral for
/// other localizing coins, 0 otherwise. Trivial branches report nullopt.
inline std::optional<double> reference_trapping(const CoinSpec& spec) {
    if (spec.family) {
        try {
            return limiting_amplitudes(*spec.family).P_infinity;
        } catch (const PoleOnContour&) {
            return std::nullopt;
        }
    }
    const CoinClass cls = classify_coin(spec.coin);
    if (!cls.has_point_spectrum()) return 0.0;
    if (cls.kind == CoinKind::Class1 || cls.kind == CoinKind::Class2) return numeric_trapping(spec.coin);
    return std::nullopt;
}

inline int cmd_simulate(const SimulateOptions& o, const AngleFlags& a, std::ostream& out) {
    CoinSpec spec = !o.coin_file.empty() ? read_coin_file(o.coin_file)
                    : !o.family.empty()  ? spec_from_flags(o.family, a)
                                         : throw MalformedInput("simulate needs --coin or --family");
    const InitialCoinState init = parse_initial(o.initial);
    std::optional<int> half;
    if (o.lattice) {
        if (*o.lattice < 3 || *o.lattice % 2 == 0) throw MalformedInput("--lattice must be an odd number of sites >= 3");
        half = (*o.lattice - 1) / 2;
    }
    const SimulationSummary s = simulate(spec.coin, init, o.steps, half);

    if (!o.distribution.empty()) {
        std::string csv = "x,P_L,P_S,P_R,P_total\n";
        for (std::size_t i = 0; i < s.positions.size(); ++i)
            csv += fmt::format("{},{},{},{},{}\n", s.positions[i], num(s.P_L[i]), num(s.P_S[i]), num(s.P_R[i]),
                               num(s.final_distribution[i]));
        emit(o.distribution, out, csv);
    }
    if (!o.series.empty()) {
        std::string csv = "t,P_origin\n";
        for (std::size_t t = 0; t < s.origin_series.size(); ++t) csv += fmt::format("{},{}\n", t, num(s.origin_series[t]));
        emit(o.series, out, csv);
    }

    json j = {{"steps", o.steps}, {"initial", o.initial}, {"trapping_estimate", s.tail_average_trapping},
              {"front_velocity", s.front_velocity_estimate}};
    const std::optional<double> pinf = std::holds_alternative<MixedInitial>(init) ? reference_trapping(spec) : std::nullopt;
    if (pinf) j["P_infinity"] = *pinf;
    j["decay_exponent"] = nullptr;
    if (s.origin_series.size() >= 256) {
        try {
            j["decay_exponent"] = decay_exponent(s.origin_series, pinf.value_or(0.0));
        } catch (const InsufficientSignal&) {
        }
    }
    emit(o.summary, out, j.dump(2) + '\n');
    return kOk;
}

// verify

struct Check {
    std::string name;
    bool pass;
    double measured, tol;
    std::string note;
    bool skipped = false;
};

struct VerifyOptions {
    std::string matrix, family;
    int random = 0;
    unsigned long long seed = 1;
    int steps = 2000;
};

inline C1Params sample_c1(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (;;) {
        const C1Params p{u(rng), u(rng), u(rng), u(rng), u(rng)};
        const NormFactors nf = norm_factors(p);
        if (nf.a - 2.0 * std::abs(nf.b) > 0.05) return p;
    }
}

inline C2Params sample_c2(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (;;) {
        const C2Params p{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        const double k = p.kappa(), sdk = std::sin(p.delta + k);
        if (std::abs(sdk) < 0.05 || std::abs(std::sin(k)) > std::abs(sdk) - 0.02) continue;
        const NormFactors nf = norm_factors(p);
        if (nf.a - 2.0 * std::abs(nf.b) > 0.05) return p;
    }
}

inline constexpr double kVerifyTrapTol = 0.02;
inline constexpr double kVerifyFrontTol = 0.03;
inline constexpr double kVerifyMinFront = 0.15;

inline std::vector<Check> verify_coin(const CoinSpec& spec, int steps) {
    std::vector<Check> checks;
    auto add = [&](std::string name, double measured, double tol, bool pass, std::string note = "") {
        checks.push_back({std::move(name), pass, measured, tol, std::move(note)});
    };
    const UnitaryCoin& coin = spec.coin;
    const CoinClass cls = classify_coin(coin);

    if (spec.family) {
        const bool first = std::holds_alternative<C1Params>(*spec.family);
        const CoinKind want = first ? CoinKind::Class1 : CoinKind::Class2;
        add("classify", cls.condition_residual, kClassifyTol, cls.kind == want, std::string(to_string(cls.kind)));
    } else {
        add("classify", cls.condition_residual, kClassifyTol, true, std::string(to_string(cls.kind)));
    }

    const SpectralScan scan = spectral_scan(coin, 256);
    const bool localizing = cls.kind == CoinKind::Class1 || cls.kind == CoinKind::Class2;
    if (localizing || !cls.has_point_spectrum()) {
        const std::size_t want = localizing ? 1 : 0;
        add("constant tracks", static_cast<double>(scan.constant_tracks.size()), 0.0, scan.constant_tracks.size() == want);
    }

    if (!localizing) {
        if (!cls.has_point_spectrum()) {
            const SimulationSummary s = simulate(coin, MixedInitial{}, steps);
            add("trapping vanishes", s.tail_average_trapping, 0.01, s.tail_average_trapping < 0.01,
                "NoPointSpectrum: trapping checks skipped, decay check run");
            const double slope = decay_exponent(s.origin_series, 0.0);
            add("decay exponent", slope, 0.4, slope >= -1.4 && slope <= -0.6, "band [-1.4, -0.6]");
        }
        return checks;
    }

    const double derr = verify_dispersion(coin, scan);
    add("dispersion relation", derr, 1e-8, derr < 1e-8);

    const ExtractedDispersion ex = extract_dispersion_params(coin);
    const PeakVelocityResult pv = peak_velocity(ex.params());
    const PeakVelocityResult pn = peak_velocity_numeric(ex.params());
    add("peak velocity closed form vs numeric", std::abs(pv.v_peak - pn.v_peak), 1e-8, std::abs(pv.v_peak - pn.v_peak) < 1e-8,
        std::string(to_string(pv.method)));

    std::optional<double> pinf;
    const double pnum = numeric_trapping(coin);
    if (spec.family) {
        try {
            const TrappingResult tr = limiting_amplitudes(*spec.family);
            pinf = tr.P_infinity;
            add("trapping closed form vs quadrature", std::abs(tr.P_infinity - tr.P_quadrature), kClosedFormTol, true);
            add("trapping closed form vs eigenprojector", std::abs(tr.P_infinity - pnum), kClosedFormTol,
                std::abs(tr.P_infinity - pnum) < kClosedFormTol);
        } catch (const ClosedFormMismatch& e) {
            add("trapping closed form vs quadrature", std::abs(e.closed_form() - e.quadrature()), kClosedFormTol, false, e.what());
        }
    } else {
        pinf = pnum;
    }

    if (steps > 0 && pinf) {
        if (pv.v_peak < kVerifyMinFront) {
            // the mobile part leaves the origin on a time scale ~ 1/v_peak
            checks.push_back({"simulated trapping", true, pv.v_peak, kVerifyMinFront,
                              "v_peak below the minimum: spreading too slow for a finite run", true});
            return checks;
        }
        const SimulationSummary s = simulate(coin, MixedInitial{}, steps);
        const double dt = std::abs(s.tail_average_trapping - *pinf);
        add("simulated trapping", dt, kVerifyTrapTol, dt < kVerifyTrapTol, fmt::format("T={}", steps));
        const double dv = std::abs(s.front_velocity_estimate - pv.v_peak);
        add("simulated front velocity", dv, kVerifyFrontTol, dv < kVerifyFrontTol);
        try {
            const double slope = decay_exponent(s.origin_series, *pinf);
            add("decay exponent (informational)", slope, 0.0, true, "residual envelope slope");
        } catch (const InsufficientSignal&) {
        }
    }
    return checks;
}

inline int cmd_verify(const VerifyOptions& o, const AngleFlags& a, std::ostream& out) {
    std::vector<std::pair<std::string, CoinSpec>> coins;
    if (!o.matrix.empty()) {
        coins.emplace_back(o.matrix, read_coin_file(o.matrix));
    } else if (o.random > 0) {
        if (o.family != "c1" && o.family != "c2") throw MalformedInput("--random needs --family c1 or c2");
        std::mt19937_64 rng(o.seed);
        for (int i = 0; i < o.random; ++i) {
            if (o.family == "c1") {
                const C1Params p = sample_c1(rng);
                coins.emplace_back(fmt::format("c1 draw {}", i), CoinSpec{build_c1(p), FamilyParams{p}, std::nullopt});
            } else {
                const C2Params p = sample_c2(rng);
                coins.emplace_back(fmt::format("c2 draw {}", i), CoinSpec{build_c2(p), FamilyParams{p}, std::nullopt});
            }
        }
    } else if (!o.family.empty()) {
        coins.emplace_back(o.family, spec_from_flags(o.family, a));
    } else {
        throw MalformedInput("verify needs --matrix, --family or --random");
    }

    const auto results = parallel_map<std::vector<Check>>(coins.size(), [&](std::size_t i) { return verify_coin(coins[i].second, o.steps); });
    int total = 0, failed = 0, skipped = 0;
    for (std::size_t i = 0; i < coins.size(); ++i) {
        out << "coin: " << coins[i].first << '\n';
        for (const Check& c : results[i]) {
            ++total;
            failed += !c.pass;
            skipped += c.skipped;
            const char* status = c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL";
            out << fmt::format("  {} {:<40} measured={} tol={}", status, c.name, num(c.measured), num(c.tol));
            if (!c.note.empty()) out << "  (" << c.note << ')';
            out << '\n';
        }
    }
    out << fmt::format("verify: {} checks, {} failed, {} skipped\n", total, failed, skipped);
    return failed ? kCheckFailed : kOk;
}

// entry point

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Three-state quantum walks on a line: coins, spectra, velocities and trapping", "qw3"};
    app.require_subcommand(1);

    // coin
    auto* coin = app.add_subcommand("coin", "build or classify a coin");
    coin->require_subcommand(1);
    auto* build = coin->add_subcommand("build", "print the coin JSON for a parametrized coin");
    std::string build_family;
    AngleFlags build_angles;
    build->add_option("--family", build_family, "c1, c2 or general")->required();
    build_angles.attach(*build);
    auto* classify = coin->add_subcommand("classify", "classify a coin by its point spectrum");
    std::string classify_file;
    classify->add_option("--matrix", classify_file, "coin JSON file")->required();

    // scan
    auto* scan = app.add_subcommand("scan", "emit parameter-scan or spectrum CSV");
    ScanOptions so;
    scan->add_option("--family", so.family, "c1 or c2");
    scan->add_option("--output", so.output, "velocity, trapping, both or spectrum");
    scan->add_option("--sweep", so.sweeps, "name=start:stop:count (at most two)");
    scan->add_option("--fix", so.fixes, "name=value");
    scan->add_flag("--degrees", so.degrees, "angles in degrees");
    scan->add_option("--simulate", so.simulate_steps, "add P_simulated from a T-step mixed-state run");
    scan->add_option("--matrix", so.matrix, "coin JSON file (spectrum output)");
    scan->add_option("--samples", so.samples, "k samples for spectrum output");
    scan->add_option("--out", so.out, "output file (default standard output)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the position-space walk");
    SimulateOptions mo;
    AngleFlags sim_angles;
    sim->add_option("--coin", mo.coin_file, "coin JSON file");
    sim->add_option("--family", mo.family, "c1, c2 or general");
    sim_angles.attach(*sim);
    sim->add_option("--steps", mo.steps, "number of steps T");
    sim->add_option("--initial", mo.initial, "L, S, R or mixed");
    sim->add_option("--lattice", mo.lattice, "lattice size in sites (default 2T+3)");
    sim->add_option("--distribution", mo.distribution, "distribution CSV path");
    sim->add_option("--series", mo.series, "origin-series CSV path");
    sim->add_option("--summary", mo.summary, "summary JSON path (default standard output)");

    // verify
    auto* ver = app.add_subcommand("verify", "run the cross-oracle checks");
    VerifyOptions vo;
    AngleFlags ver_angles;
    ver->add_option("--matrix", vo.matrix, "coin JSON file");
    ver->add_option("--family", vo.family, "c1, c2 or general");
    ver_angles.attach(*ver);
    ver->add_option("--random", vo.random, "number of random family draws");
    ver->add_option("--seed", vo.seed, "seed for --random");
    ver->add_option("--steps", vo.steps, "simulation length for the cross-checks (0 skips them)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        return report(err, "usage", e.what(), kBadInput);
    }

    try {
        if (*build) {
            const CoinSpec s = spec_from_flags(build_family, build_angles);
            out << coin_to_json(s).dump(2) << '\n';
        } else if (*classify) {
            out << classify_json(read_coin_file(classify_file).coin).dump(2) << '\n';
        } else if (*scan) {
            if (so.output == "spectrum") {
                if (so.matrix.empty()) throw MalformedInput("spectrum output needs --matrix");
                emit(so.out, out, scan_spectrum_csv(read_coin_file(so.matrix).coin, so.samples));
            } else {
                emit(so.out, out, scan_family_csv(so));
            }
        } else if (*sim) {
            return cmd_simulate(mo, sim_angles, out);
        } else if (*ver) {
            return cmd_verify(vo, ver_angles, out);
        }
    } catch (const Error& e) {
        return report(err, e.code(), e.what(), exit_code_for(e));
    } catch (const std::exception& e) {
        return report(err, "internal", e.what(), kCheckFailed);
    }
    return kOk;
}

} // namespace qw3::cli
