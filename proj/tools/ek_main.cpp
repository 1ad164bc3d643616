// ek: evaluate Eisenstein-Kronecker-Lerch series and run the verification
// suite from the command line.  JSON on stdout is the canonical output;
// all human-facing text goes to stderr.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage error,
// 3 mathematical domain error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ek/ek.hpp"

namespace {

using ek::cplx;
using ordered_json = nlohmann::ordered_json;

cplx parse_complex(const std::string &text)
{
    std::istringstream is(text);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(is >> re >> comma >> im) || comma != ',') {
        throw CLI::ValidationError("expected complex value as re,im");
    }
    return {re, im};
}

ek::padic::BigRat parse_rational(const std::string &text)
{
    try {
        return ek::padic::BigRat(text);
    } catch (const std::exception &) {
        throw CLI::ValidationError("expected rational value like 4 or -7/12");
    }
}

struct CommonOptions {
    std::string lattice_text = "1,0,0,1";
    double truncation_radius_factor = 0.0; // 0 = default
    double quad_tol = 0.0;
    double target_abs_error = 0.0;
    std::uint64_t seed = ek::default_seed;
    std::string output = "json";
    std::string config_path;

    void apply_config_file()
    {
        if (config_path.empty()) return;
        std::ifstream in(config_path);
        if (!in) {
            throw CLI::ValidationError("config file not readable: " + config_path);
        }
        std::map<std::string, std::string> kv;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            kv[line.substr(0, eq)] = line.substr(eq + 1);
        }
        // flags override the file: only fill values still at their defaults
        if (kv.count("lattice") && lattice_text == "1,0,0,1") lattice_text = kv["lattice"];
        if (kv.count("truncation_radius_factor") && truncation_radius_factor == 0.0)
            truncation_radius_factor = std::stod(kv["truncation_radius_factor"]);
        if (kv.count("quad_tol") && quad_tol == 0.0) quad_tol = std::stod(kv["quad_tol"]);
        if (kv.count("target_abs_error") && target_abs_error == 0.0)
            target_abs_error = std::stod(kv["target_abs_error"]);
        if (kv.count("seed") && seed == ek::default_seed)
            seed = std::stoull(kv["seed"]);
        if (kv.count("output") && output == "json") output = kv["output"];
    }

    ek::PrecisionConfig precision() const
    {
        ek::PrecisionConfig cfg;
        if (truncation_radius_factor > 0.0) cfg.truncation_radius_factor = truncation_radius_factor;
        if (quad_tol > 0.0) cfg.quad_tol = quad_tol;
        if (target_abs_error > 0.0) cfg.target_abs_error = target_abs_error;
        cfg.validate();
        return cfg;
    }

    ek::Lattice lattice() const { return ek::parse_lattice(lattice_text); }
};

void add_common_flags(CLI::App *cmd, CommonOptions &opt)
{
    cmd->add_option("--lattice", opt.lattice_text, "lattice generators re1,im1,re2,im2");
    cmd->add_option("--truncation-radius-factor", opt.truncation_radius_factor,
                    "context lattice-sum radius in units of sqrt(A)");
    cmd->add_option("--quad-tol", opt.quad_tol, "series/continued-fraction tolerance");
    cmd->add_option("--target-abs-error", opt.target_abs_error, "advertised accuracy");
    cmd->add_option("--seed", opt.seed, "seed for sampled checks");
    cmd->add_option("--output", opt.output, "json or table");
    cmd->add_option("--config", opt.config_path, "flat key=value config file");
}

ordered_json ek_result_json(const ek::EKResult &r)
{
    ordered_json j;
    j["value"] = {r.value.real(), r.value.imag()};
    j["is_pole"] = r.is_pole;
    if (r.pole_residue) {
        j["pole_residue"] = {r.pole_residue->real(), r.pole_residue->imag()};
    } else {
        j["pole_residue"] = nullptr;
    }
    j["truncation_radius_used"] = r.truncation_radius_used;
    j["estimated_error"] = r.estimated_error;
    return j;
}

void print_reports(const std::vector<ek::VerificationReport> &reports, const std::string &mode)
{
    if (mode == "table") {
        for (const auto &r : reports) {
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.check_name
                      << "  abs_error=" << r.abs_error << "  tolerance=" << r.tolerance << "\n";
        }
        return;
    }
    ordered_json arr = ordered_json::array();
    for (const auto &r : reports) arr.push_back(r.to_json());
    std::cout << arr.dump(2) << "\n";
}

int run_eval(const std::string &target, const CommonOptions &opt, long a, const cplx &z0,
             const cplx &w0, const cplx &s, const cplx &z, bool near_pole,
             const ek::padic::BigRat &g2, const ek::padic::BigRat &g3, long p, int N, int M,
             const std::string &series_name)
{
    const auto cfg = opt.precision();
    if (target == "kstar") {
        const ek::Lattice L = opt.lattice();
        ek::EKQuery q{a, z0, w0, s, L};
        const auto res =
            ek::kstar(q, cfg, near_pole ? ek::PolePolicy::evaluate : ek::PolePolicy::refuse);
        if (res.is_pole) {
            std::cerr << "pole of K*_0 at s = 1 with w0 in the lattice; residue 1/A = "
                      << res.pole_residue->real()
                      << " (use kstar_regularized_at_1 for the regularized value)\n";
            std::cout << ek_result_json(res).dump(2) << "\n";
            return 3;
        }
        std::cout << ek_result_json(res).dump(2) << "\n";
        return 0;
    }
    if (target == "theta" || target == "sigma" || target == "wp") {
        const ek::Lattice L = opt.lattice();
        const auto ctx = ek::build_context(L, cfg);
        cplx v;
        if (target == "theta") v = ek::theta(z, ctx);
        else if (target == "sigma") v = ek::sigma(z, ctx);
        else v = ek::wp(z, ctx);
        ordered_json j;
        j["value"] = {v.real(), v.imag()};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (target == "padic-series") {
        const auto model = ek::padic::CMCurveModel::create(g2, g3, p);
        ek::padic::PadicSeries out;
        if (series_name == "lambda") {
            out = ek::padic::reduce_series(ek::padic::formal_group_log(model, M), p, N);
        } else if (series_name == "sigma") {
            out = ek::padic::reduce_series(ek::padic::sigma_series(model, M), p, N);
        } else if (series_name == "theta") {
            out = ek::padic::reduce_series(
                ek::padic::theta_hat_series(model, ek::padic::BigRat(0), M), p, N);
        } else if (series_name == "logtheta") {
            out = ek::padic::log_theta_hat(model, ek::padic::BigRat(0), M, p, N).series;
        } else {
            throw CLI::ValidationError("unknown series: " + series_name);
        }
        std::cout << ek::padic::dump_series(model, N, out);
        return 0;
    }
    throw CLI::ValidationError("unknown eval target: " + target);
}

int run_verify(const std::string &check, const CommonOptions &opt, std::optional<cplx> z_opt,
               std::optional<cplx> w_opt, long n, const ek::padic::BigRat &g2,
               const ek::padic::BigRat &g3, long p, int N, int M)
{
    const auto cfg = opt.precision();
    std::vector<ek::VerificationReport> reports;
    const bool all = check == "all";

    std::optional<ek::ThetaContext> ctx;
    const auto context = [&]() -> const ek::ThetaContext & {
        if (!ctx) ctx = ek::build_context(opt.lattice(), cfg);
        return *ctx;
    };

    if (all || check == "first-limit") {
        reports.push_back(ek::verify_first_limit(context()));
    }
    if (all || check == "second-limit") {
        if (z_opt) {
            reports.push_back(ek::verify_second_limit(*z_opt, context()));
        } else {
            for (const cplx &z : ek::sample_points(context().lattice, 10, opt.seed)) {
                reports.push_back(ek::verify_second_limit(z, context()));
            }
        }
    }
    if (all || check == "distribution") {
        if (all) {
            for (long k : {2L, 3L, 5L}) reports.push_back(ek::verify_distribution(k, context()));
        } else {
            reports.push_back(ek::verify_distribution(n, context()));
        }
    }
    if (all || check == "prop-c") {
        reports.push_back(ek::verify_prop_c(context()));
    }
    if (all || check == "kronecker") {
        if (z_opt && w_opt) {
            reports.push_back(ek::verify_kronecker_theorem(*z_opt, *w_opt, context()));
        } else {
            const auto pts = ek::sample_points(context().lattice, 40, opt.seed);
            for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
                reports.push_back(ek::verify_kronecker_theorem(pts[i], pts[i + 1], context()));
            }
        }
    }
    if (all || check == "theta-dist-2") {
        if (z_opt) {
            reports.push_back(ek::verify_theta_distribution_2(*z_opt, context()));
        } else {
            for (const cplx &z : ek::sample_points(context().lattice, 10, opt.seed, 2)) {
                reports.push_back(ek::verify_theta_distribution_2(z, context()));
            }
        }
    }
    if (all || check == "padic-dist") {
        const auto model = ek::padic::CMCurveModel::create(g2, g3, p);
        reports.push_back(ek::padic::verify_padic_distribution(model, N, M));
    }
    if (reports.empty()) {
        throw CLI::ValidationError("unknown check: " + check);
    }

    print_reports(reports, opt.output);
    for (const auto &r : reports) {
        if (!r.pass) return 1;
    }
    return 0;
}

int run_table(const CommonOptions &opt, double smin, double smax, double step)
{
    if (!(step > 0.0) || smax < smin) {
        throw CLI::ValidationError("table: need step > 0 and smax >= smin");
    }
    const auto cfg = opt.precision();
    const ek::Lattice L = opt.lattice();
    const cplx regularized = ek::kstar_regularized_at_1(L, cfg);
    const auto rows = static_cast<long>(std::floor((smax - smin) / step + 0.5)) + 1;
    std::cout << "s,re,im,regularized\n";
    std::cout.precision(17);
    for (long i = 0; i < rows; ++i) {
        const double s = smin + step * static_cast<double>(i);
        if (std::abs(s - 1.0) < 1e-3) {
            std::cout << s << ",pole,pole," << regularized.real() << "\n";
            continue;
        }
        ek::EKQuery q{0, 0.0, 0.0, s, L};
        const auto res = ek::kstar(q, cfg);
        std::cout << s << ',' << res.value.real() << ',' << res.value.imag() << ",\n";
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Eisenstein-Kronecker-Lerch series evaluator and verifier"};
    app.require_subcommand(1);

    CommonOptions opt;

    // eval
    auto *eval = app.add_subcommand("eval", "evaluate one quantity, JSON to stdout");
    std::string eval_target;
    eval->add_option("target", eval_target, "kstar | theta | sigma | wp | padic-series")
        ->required();
    long a = 0;
    std::string z0_text = "0,0", w0_text = "0,0", s_text, z_text = "0.25,0.25";
    bool near_pole = false;
    std::string g2_text = "4", g3_text = "0", series_name = "theta";
    long p = 5;
    int bigN = 8, bigM = 16;
    eval->add_option("--a", a, "integer index a >= 0");
    eval->add_option("--z0", z0_text, "z0 as re,im");
    eval->add_option("--w0", w0_text, "w0 as re,im");
    auto *s_opt = eval->add_option("--s", s_text, "s as re,im");
    eval->add_option("--z", z_text, "evaluation point for theta/sigma/wp");
    eval->add_flag("--near-pole", near_pole, "evaluate even within 1e-3 of the s = 1 pole");
    eval->add_option("--g2", g2_text, "model g2 (rational)");
    eval->add_option("--g3", g3_text, "model g3 (rational)");
    eval->add_option("--p", p, "prime >= 5");
    eval->add_option("--N", bigN, "p-adic precision");
    eval->add_option("--M", bigM, "series truncation order");
    eval->add_option("--series", series_name, "lambda | sigma | theta | logtheta");
    add_common_flags(eval, opt);

    // verify
    auto *verify = app.add_subcommand("verify", "run verification checks, JSON array to stdout");
    std::string check;
    verify
        ->add_option("check", check,
                     "first-limit | second-limit | distribution | prop-c | kronecker | "
                     "theta-dist-2 | padic-dist | all")
        ->required();
    std::string vz_text, vw_text;
    long n = 2;
    verify->add_option("--z", vz_text, "point for second-limit/kronecker/theta-dist-2");
    verify->add_option("--w", vw_text, "second point for kronecker");
    verify->add_option("--n", n, "torsion order for distribution");
    verify->add_option("--g2", g2_text, "model g2 (rational)");
    verify->add_option("--g3", g3_text, "model g3 (rational)");
    verify->add_option("--p", p, "prime >= 5");
    verify->add_option("--N", bigN, "p-adic precision");
    verify->add_option("--M", bigM, "series truncation order");
    add_common_flags(verify, opt);

    // table
    auto *table = app.add_subcommand("table", "CSV of K*_0(0,0,s) over a real grid");
    double smin = 1.1, smax = 3.0, step = 0.1;
    table->add_option("--smin", smin, "grid start");
    table->add_option("--smax", smax, "grid end (inclusive)");
    table->add_option("--step", step, "grid step");
    add_common_flags(table, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e); // prints usage to stderr
        return 2;
    }

    try {
        opt.apply_config_file();
        if (eval->parsed()) {
            if (eval_target == "kstar" && s_opt->count() == 0) {
                std::cerr << "eval kstar: missing required --s\n"
                          << eval->help() << "\n";
                return 2;
            }
            const cplx s = s_text.empty() ? cplx(0.0) : parse_complex(s_text);
            return run_eval(eval_target, opt, a, parse_complex(z0_text), parse_complex(w0_text),
                            s, parse_complex(z_text), near_pole, parse_rational(g2_text),
                            parse_rational(g3_text), p, bigN, bigM, series_name);
        }
        if (verify->parsed()) {
            std::optional<cplx> vz, vw;
            if (!vz_text.empty()) vz = parse_complex(vz_text);
            if (!vw_text.empty()) vw = parse_complex(vw_text);
            return run_verify(check, opt, vz, vw, n, parse_rational(g2_text),
                              parse_rational(g3_text), p, bigN, bigM);
        }
        return run_table(opt, smin, smax, step);
    } catch (const CLI::ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error &e) {
        std::cerr << "math domain error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
