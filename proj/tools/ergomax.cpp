// Command-line front end: exponential sums, multiplier diagnostics, maximal
// norms, sampling checks, and the verification experiment suites.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "ergomax/ergomax.hpp"

namespace {

using namespace ergomax;

double parse_p(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ParameterError("cannot parse p value '" + s + "'");
    return v;
}

void emit(const Table& tab, const std::string& out_path) {
    if (out_path.empty()) {
        tab.write_csv(std::cout);
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ParameterError("cannot open '" + out_path + "' for writing");
    tab.write_csv(out);
}

// exit code 3 when any row of a verification table failed its tolerance
int table_exit_code(const Table& tab) {
    auto col = std::find(tab.columns.begin(), tab.columns.end(), "pass");
    if (col == tab.columns.end()) return 0;
    const std::size_t idx = static_cast<std::size_t>(col - tab.columns.begin());
    for (const auto& row : tab.rows) {
        if (idx < row.size() && row[idx] == "0") return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergomax: maximal ergodic averages along {k^t}, major-arc multipliers, and noncommutative maximal norms"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string out_path;
    std::string format = "csv";
    std::vector<std::string> p_strings;
    std::string theta_str = "0";
    std::string xi_str = "0/1";
    std::string in_path;
    std::uint64_t grid = 0;
    int level_s = 1;
    std::uint64_t trunc = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--t", cfg.t, "power t in {k^t}");
        sub->add_option("--rho", cfg.rho, "frequency-hierarchy exponent in (0,2)");
        sub->add_option("--smax", cfg.s_max, "multiplier truncation level");
        sub->add_option("--N", cfg.N, "scale N");
        sub->add_option("--p", p_strings, "L_p exponent(s); 'inf' allowed")->take_all();
        sub->add_option("--d", cfg.d, "matrix dimension");
        sub->add_option("--trials", cfg.trials, "trial count");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--grid", grid, "grid size override (power of two)");
        sub->add_option("--out", out_path, "output file (default stdout)");
        sub->add_option("--format", format, "csv|structured-text");
        sub->add_option("--cap", cfg.atom_cap, "enumeration cap");
        sub->add_option("--qmax", cfg.q_max, "largest denominator scanned");
        sub->add_option("--kmax", cfg.k_max, "largest dyadic exponent");
        sub->add_option("--J", cfg.J, "transference window length");
        sub->add_option("--tol", cfg.tol, "solver tolerance");
    };

    // ---- freq ----
    auto* freq = app.add_subcommand("freq", "number-theoretic layer");
    auto* freq_gauss = freq->add_subcommand("gauss-sum", "S(a/q) by exact residue summation");
    freq_gauss->add_option("--xi", xi_str, "rational frequency a/q")->required();
    add_common(freq_gauss);
    auto* freq_weyl = freq->add_subcommand("weyl-sum", "K^_N(theta)");
    freq_weyl->add_option("--theta", theta_str, "frequency in [0,1)");
    add_common(freq_weyl);
    auto* freq_set = freq->add_subcommand("set", "level set R_s: moduli and new atoms");
    freq_set->add_option("--s", level_s, "level index");
    add_common(freq_set);

    // ---- kernel ----
    auto* kernel = app.add_subcommand("kernel", "multiplier layer");
    auto* kernel_lhat = kernel->add_subcommand("lhat", "evaluate L^_N(theta)");
    kernel_lhat->add_option("--theta", theta_str, "frequency in [0,1)");
    add_common(kernel_lhat);
    auto* kernel_invert = kernel->add_subcommand("invert", "level-piece kernel by FFT inversion");
    kernel_invert->add_option("--s", level_s, "level (0 = main term)");
    kernel_invert->add_option("--trunc", trunc, "truncation radius");
    add_common(kernel_invert);
    auto* kernel_supdiff = kernel->add_subcommand("supdiff", "sup |K^_N - L^_N| over the grid");
    add_common(kernel_supdiff);

    // ---- maxnorm ----
    auto* maxn = app.add_subcommand("maxnorm", "noncommutative maximal norm");
    auto* maxn_solve = maxn->add_subcommand("solve", "solve for a family file");
    maxn_solve->add_option("--in", in_path, "family file (structured text)")->required();
    add_common(maxn_solve);

    // ---- sampling ----
    auto* sampling = app.add_subcommand("sampling", "sampling/transference layer");
    auto* sampling_check = sampling->add_subcommand("check", "identity battery");
    add_common(sampling_check);

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "verification experiment suites");
    auto* v_gauss = verify->add_subcommand("gauss-decay", "Gauss-sum decay table");
    add_common(v_gauss);
    auto* v_khat = verify->add_subcommand("khat-lhat", "sup-diff decay table");
    add_common(v_khat);
    auto* v_l1 = verify->add_subcommand("l1-levels", "level-kernel l1 table");
    add_common(v_l1);
    auto* v_sampling = verify->add_subcommand("sampling", "sampling identity table");
    add_common(v_sampling);
    auto* v_norm = verify->add_subcommand("norm-equalities", "maximal-norm oracle agreement table");
    add_common(v_norm);

    // ---- ergodic ----
    auto* ergodic = app.add_subcommand("ergodic", "maximal ergodic experiments");
    auto* erg_sweep = ergodic->add_subcommand("sweep", "maximal boundedness sweep");
    erg_sweep->add_option("--model", cfg.model, "automorphism|shift");
    add_common(erg_sweep);
    auto* erg_demo = ergodic->add_subcommand("demo", "transference identity demo");
    add_common(erg_demo);

    // ---- io ----
    auto* io = app.add_subcommand("io", "file format utilities");
    auto* io_convert = io->add_subcommand("convert", "convert a sequence file");
    io_convert->add_option("--in", in_path, "input file")->required();
    add_common(io_convert);

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& s : p_strings) {
            if (s == p_strings.front()) cfg.p_list.clear();
            cfg.p_list.push_back(parse_p(s));
        }
        if (grid) cfg.grid_override = grid;

        if (freq_gauss->parsed()) {
            const ReducedFraction xi = ReducedFraction::from_string(xi_str);
            const Cplx v = gauss_sum(xi, cfg.t);
            std::cout << "xi,t,re,im,abs\n"
                      << xi.str() << ',' << cfg.t << ',' << fmt_double(v.real()) << ','
                      << fmt_double(v.imag()) << ',' << fmt_double(std::abs(v)) << "\n";
            return 0;
        }
        if (freq_weyl->parsed()) {
            const double theta = std::strtod(theta_str.c_str(), nullptr);
            const Cplx v = weyl_sum(cfg.N, cfg.t, theta);
            std::cout << "N,t,theta,re,im,abs\n"
                      << cfg.N << ',' << cfg.t << ',' << fmt_double(theta) << ','
                      << fmt_double(v.real()) << ',' << fmt_double(v.imag()) << ','
                      << fmt_double(std::abs(v)) << "\n";
            return 0;
        }
        if (freq_set->parsed()) {
            const FrequencyLevelSet level = level_set(level_s, cfg.rho, cfg.t);
            Table tab;
            tab.columns = {"s", "m", "Q"};
            for (std::size_t m = 0; m < level.moduli.size(); ++m) {
                tab.rows.push_back({std::to_string(level_s), std::to_string(m + 1), level.moduli[m].str()});
            }
            emit(tab, out_path);
            const FrequencyLevelSet prev = level_s > 0 ? level_set(level_s - 1, cfg.rho, cfg.t) : FrequencyLevelSet{};
            const auto fresh = enumerate_new(level, level_s > 0 ? &prev : nullptr, cfg.atom_cap);
            std::cout << "# new atoms at level " << level_s << ": " << fresh.size() << "\n";
            return 0;
        }
        if (kernel_lhat->parsed()) {
            const MultiplierModel model = build_multiplier(cfg.N, cfg.t, cfg.rho, cfg.s_max, cfg.atom_cap);
            const double theta = std::strtod(theta_str.c_str(), nullptr);
            const Cplx v = lhat_eval(model, theta);
            std::cout << "N,t,smax,theta,re,im,abs\n"
                      << cfg.N << ',' << cfg.t << ',' << cfg.s_max << ',' << fmt_double(theta) << ','
                      << fmt_double(v.real()) << ',' << fmt_double(v.imag()) << ','
                      << fmt_double(std::abs(v)) << "\n";
            return 0;
        }
        if (kernel_invert->parsed()) {
            const MultiplierModel model = build_multiplier(cfg.N, cfg.t, cfg.rho, cfg.s_max, cfg.atom_cap);
            const std::size_t M = cfg.grid_override ? pow2_at_least(cfg.grid_override)
                                                    : default_symbol_grid(model, 32);
            const std::uint64_t R = trunc ? trunc : M / 2 - 1;
            const GridKernel ker = level_piece_kernel(model, level_s, M, R);
            std::cout << "# level " << level_s << " grid " << M << " l1 " << fmt_double(ker.l1())
                      << " tail_bound " << fmt_double(ker.tail_bound) << "\n";
            if (!out_path.empty()) save_opseq_file(out_path, gridkernel_to_opseq(ker), format);
            return 0;
        }
        if (kernel_supdiff->parsed()) {
            const MultiplierModel model = build_multiplier(cfg.N, cfg.t, cfg.rho, cfg.s_max, cfg.atom_cap);
            const std::size_t M = cfg.grid_override ? pow2_at_least(cfg.grid_override)
                                                    : default_symbol_grid(model, 64);
            std::cout << "N,t,smax,grid,sup_diff,grid_spacing\n"
                      << cfg.N << ',' << cfg.t << ',' << cfg.s_max << ',' << M << ','
                      << fmt_double(sup_diff(model, cfg.N, M)) << ','
                      << fmt_double(1.0 / static_cast<double>(M)) << "\n";
            return 0;
        }
        if (maxn_solve->parsed()) {
            std::ifstream in(in_path);
            if (!in) throw ParameterError("cannot open '" + in_path + "'");
            const MaximalFamily fam = load_family(in);
            const double p = cfg.p_list.empty() ? 2.0 : cfg.p_list.front();
            const MaxNormResult r = fam.selfadjoint_certified()
                                        ? maxnorm_selfadjoint(fam, p, cfg.tol)
                                        : maxnorm_general(fam, p, cfg.tol);
            std::cout << "p,value,residual,iterations,mode,status\n"
                      << fmt_double(p) << ',' << fmt_double(r.value) << ',' << fmt_double(r.residual)
                      << ',' << r.iterations << ','
                      << (r.mode == SolveMode::UpperBound ? "upper-bound"
                          : r.mode == SolveMode::Oracle   ? "oracle"
                                                          : "subgradient")
                      << ',' << (r.status == SolveStatus::Converged ? "converged" : "budget-exceeded")
                      << "\n";
            if (!out_path.empty()) save_opseq_file(out_path, r.certificate, format);
            return r.status == SolveStatus::Converged ? 0 : 4;
        }
        if (sampling_check->parsed() || v_sampling->parsed()) {
            const Table tab = run_sampling_identities(cfg);
            emit(tab, out_path);
            return table_exit_code(tab);
        }
        if (v_gauss->parsed()) {
            emit(run_gauss_decay(cfg), out_path);
            return 0;
        }
        if (v_khat->parsed()) {
            emit(run_khat_lhat(cfg), out_path);
            return 0;
        }
        if (v_l1->parsed()) {
            emit(run_l1_levels(cfg), out_path);
            return 0;
        }
        if (v_norm->parsed()) {
            const Table tab = run_norm_equalities(cfg);
            emit(tab, out_path);
            return table_exit_code(tab);
        }
        if (erg_sweep->parsed()) {
            emit(run_maximal_sweep(cfg), out_path);
            return 0;
        }
        if (erg_demo->parsed()) {
            emit(run_transference_demo(cfg), out_path);
            return 0;
        }
        if (io_convert->parsed()) {
            const OpSequence f = load_opseq_file(in_path);
            if (out_path.empty()) throw ParameterError("io convert requires --out");
            save_opseq_file(out_path, f, format);
            return 0;
        }
        throw ParameterError("no subcommand action matched");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
