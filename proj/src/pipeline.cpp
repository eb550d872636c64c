#include "kp/pipeline.hpp"

#include "kp/dkp.hpp"
#include "kp/initial_data.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace kp {

namespace {

namespace fs = std::filesystem;

struct Reporter {
    std::string dir;
    std::vector<std::string> artifacts;
    std::vector<std::string> summary;

    explicit Reporter(const std::string& d) : dir(d) { fs::create_directories(dir); }
    std::string path(const std::string& name) const { return dir + "/" + name; }
    void artifact(const std::string& name) { artifacts.push_back(name); }
    void note(const std::string& line) { summary.push_back(line); }

    void finish(const Config& cfg, const std::string& subcommand) {
        std::ofstream os(path("report.txt"));
        os << "subcommand = " << subcommand << "\n\n[config]\n" << cfg.echo() << "\n[summary]\n";
        for (const auto& s : summary) os << s << '\n';
        os << "\n[artifacts]\n";
        for (const auto& a : artifacts)
            os << a << "  fnv1a64:" << hex64(fnv1a64_file(path(a))) << '\n';
    }
};

GridSpec grid_from(const Config& cfg) {
    return GridSpec(cfg.get_int("Nx", 256), cfg.get_int("Ny", 256), cfg.get_double("Lx", 2.0),
                    cfg.get_double("Ly", 2.0));
}

SpectralField initial_field(const Config& cfg, const GridSpec& g, double* proj) {
    InitialDataSpec ids;
    ids.name = cfg.get("initial_data", "sym");
    ids.expression = cfg.get("expression", "");
    return build_initial_data(ids, g, proj);
}

// Shared resume handling: a snapshot overrides initial data and start time.
SpectralField resume_or_initial(const Config& cfg, const GridSpec& g, double& t_start,
                                Reporter& rep) {
    std::string resume = cfg.get("resume", "");
    if (resume.empty()) {
        double proj = 0.0;
        SpectralField f = initial_field(cfg, g, &proj);
        rep.note("initial_data_projection_magnitude = " + std::to_string(proj));
        t_start = 0.0;
        return f;
    }
    SnapshotHeader h;
    SpectralField f = read_snapshot(resume, h);
    if (!(f.grid() == g))
        throw bad_input("resume: snapshot grid does not match configured grid");
    t_start = h.t;
    rep.note("resumed_from = " + resume);
    return f;
}

int run_evolve_gkp(Config& cfg, Reporter& rep) {
    GkpProblem p;
    p.grid = grid_from(cfg);
    p.n = cfg.get_int("n", 1);
    p.sigma = cfg.get_int("sigma", 1);
    p.epsilon = cfg.get_double("epsilon", 0.1);
    p.t_end = cfg.get_double("t_end", 0.1);
    p.nt = cfg.get_int("Nt", 1000);
    p.filter_threshold = cfg.get_double("filter_threshold", 0.0);
    p.snapshot_times = cfg.get_list("snapshot_times");
    p.u0 = resume_or_initial(cfg, p.grid, p.t_start, rep);

    EvolveResult r = evolve_gkp(p);

    write_snapshot(rep.path("final.dbl"), r.final_field, r.final_time, p.epsilon, p.n, p.sigma);
    rep.artifact("final.dbl");
    for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
        std::string name = "snap_" + std::to_string(i) + ".dbl";
        write_snapshot(rep.path(name), r.snapshots[i].field, r.snapshots[i].t, p.epsilon, p.n, p.sigma);
        rep.artifact(name);
    }
    write_diagnostics_csv(rep.path("diagnostics.csv"), r.diagnostics);
    rep.artifact("diagnostics.csv");

    rep.note("final_time = " + std::to_string(r.final_time));
    if (!r.diagnostics.rows.empty()) {
        rep.note("delta2_final = " + std::to_string(r.diagnostics.rows.back().delta2));
        rep.note("linf_final = " + std::to_string(r.diagnostics.rows.back().linf));
    }
    if (r.stopped_early) {
        rep.note("stopped_early = " + r.stop_reason);
        rep.note("last_resolved_time = " + std::to_string(r.last_resolved_time));
        return 2;
    }
    return 0;
}

DkpProblem dkp_problem_from(Config& cfg, Reporter& rep) {
    DkpProblem p;
    p.grid = GridSpec(cfg.get_int("Nx", 512), cfg.get_int("Ny", 2048), cfg.get_double("Lx", 2.0),
                      cfg.get_double("Ly", 2.0));
    p.n = cfg.get_int("n", 1);
    p.sigma = cfg.get_int("sigma", 1);
    p.t_end = cfg.get_double("t_end", 0.3);
    p.nt = cfg.get_int("Nt", 1000);
    p.krasny_threshold = cfg.get_double("filter_threshold", 1e-10);
    p.snapshot_times = cfg.get_list("snapshot_times");
    p.f0 = resume_or_initial(cfg, p.grid, p.t_start, rep);
    return p;
}

int run_evolve_dkp(Config& cfg, Reporter& rep) {
    DkpProblem p = dkp_problem_from(cfg, rep);
    EvolveResult r = evolve_F(p);

    write_snapshot(rep.path("final.dbl"), r.final_field, r.final_time, 0.0, p.n, p.sigma);
    rep.artifact("final.dbl");
    for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
        std::string name = "snap_" + std::to_string(i) + ".dbl";
        write_snapshot(rep.path(name), r.snapshots[i].field, r.snapshots[i].t, 0.0, p.n, p.sigma);
        rep.artifact(name);
    }
    write_diagnostics_csv(rep.path("diagnostics.csv"), r.diagnostics);
    rep.artifact("diagnostics.csv");

    // per-row characteristic monotonicity at the final time
    std::vector<CharacteristicSlice> rows;
    for (int iy = 0; iy < p.grid.ny; ++iy)
        rows.push_back(characteristic_slice(r.final_field, r.final_time, p.n, iy, false));
    write_monotonicity_csv(rep.path("monotonicity.csv"), rows);
    rep.artifact("monotonicity.csv");

    rep.note("final_time = " + std::to_string(r.final_time));
    rep.note("min_delta_final = " + std::to_string(min_delta(r.final_field, r.final_time, p.n)));
    if (!r.diagnostics.rows.empty())
        rep.note("delta2_final = " + std::to_string(r.diagnostics.rows.back().delta2));
    return 0;
}

int run_find_critical(Config& cfg, Reporter& rep) {
    DkpProblem p = dkp_problem_from(cfg, rep);
    const int want = cfg.get_int("breakup_index", 1);
    BreakupOptions opt;
    opt.levels = cfg.get_int("levels", 2);
    opt.nt_refine = cfg.get_int("nt_refine", 1000);

    DkpFlow flow(p);
    BreakupSearch search(flow, p.t_end, p.nt);
    BreakupHit hit;
    for (int i = 1; i <= want; ++i) {
        hit = search.find_next(opt);
        std::string name = want == i ? "critical.json" : ("critical_" + std::to_string(i) + ".json");
        write_critical_report(rep.path(name), hit.cp, hit.locate, hit.bracket_width, hit.index);
        rep.artifact(name);
    }
    rep.note("t_c = " + std::to_string(hit.cp.t_c));
    rep.note("x_c = " + std::to_string(hit.cp.x_c));
    rep.note("y_c = " + std::to_string(hit.cp.y_c));
    rep.note("u_c = " + std::to_string(hit.cp.u_c));
    rep.note("kappa = " + std::to_string(hit.cp.kappa));
    rep.note("bracket_width = " + std::to_string(hit.bracket_width));
    rep.note("generic = " + std::string(hit.cp.generic ? "yes" : "no (symmetry)"));
    return 0;
}

Pi2Config pi2_config_from(const Config& cfg) {
    Pi2Config pc;
    pc.L = cfg.get_double("pi2_L", -1.0);
    pc.N = cfg.get_int("pi2_N", 4096);
    pc.T_min = cfg.get_double("pi2_Tmin", -10.0);
    pc.T_max = cfg.get_double("pi2_Tmax", 2.0);
    pc.T_step = cfg.get_double("pi2_Tstep", 0.01);
    pc.fine_from = cfg.get_double("pi2_fine_from", 1e9);
    pc.fine_factor = cfg.get_int("pi2_fine_factor", 4);
    pc.newton_tol = cfg.get_double("pi2_newton_tol", 1e-12);
    pc.max_newton_iters = cfg.get_int("pi2_max_newton_iters", 50);
    pc.store_xmax = cfg.get_double("pi2_store_xmax", 60.0);
    return pc;
}

int run_pi2(Config& cfg, Reporter& rep) {
    Pi2Solution sol = continue_in_T(pi2_config_from(cfg));
    write_pi2_csv(rep.path("pi2.csv"), sol);
    rep.artifact("pi2.csv");
    rep.note("slices = " + std::to_string(sol.T.size()));
    rep.note("max_ode_residual = " + std::to_string(sol.max_ode_residual));
    rep.note("max_kdv_residual = " + std::to_string(sol.max_kdv_residual));
    rep.note("max_newton_iters = " + std::to_string(sol.max_newton_iters_seen));
    return 0;
}

int run_compare(Config& cfg, Reporter& rep) {
    SnapshotHeader h;
    SpectralField u = read_snapshot(cfg.require("snapshot"), h);
    CriticalPoint cp = read_critical_report(cfg.require("critical_report"));

    AsymptoticParams ap;
    ap.cp = cp;
    ap.epsilon = cfg.get_double("epsilon", h.epsilon);
    ap.symmetric = cfg.get_int("symmetric", 0) != 0;

    Pi2Solution pi2;
    std::string table = cfg.get("pi2_table", "");
    if (!table.empty()) {
        pi2 = read_pi2_csv(table);
    } else {
        pi2 = continue_in_T(pi2_config_from(cfg));
    }

    CompareWindow w;
    w.half_x = cfg.get_double("window_x", -1.0);
    w.half_y = cfg.get_double("window_y", -1.0);
    w.y_scale = cfg.get_double("window_yscale", 1.0);

    ComparisonReport rp = compare(u, h.t, ap, pi2, w);
    write_comparison(rep.dir, "compare", rp);
    rep.artifact("compare_report.txt");
    rep.artifact("compare_xslice.csv");
    rep.artifact("compare_yslice.csv");
    rep.note("linf_error = " + std::to_string(rp.linf_error));
    rep.note("l2_error = " + std::to_string(rp.l2_error));
    rep.note("window_amplitude = " + std::to_string(rp.window_amplitude));
    return 0;
}

int run_diagnose(Config& cfg, Reporter& rep) {
    SnapshotHeader h;
    SpectralField f = read_snapshot(cfg.require("snapshot"), h);
    DecayReport dr = decay_report(f);
    rep.note("t = " + std::to_string(h.t));
    rep.note("Nx = " + std::to_string(h.nx) + ", Ny = " + std::to_string(h.ny));
    rep.note("l2_norm = " + std::to_string(l2_norm(f)));
    rep.note("linf_coeff = " + std::to_string(dr.linf_coeff));
    rep.note("outer_band = " + std::to_string(dr.max_modulus_outer_band));
    rep.note("zero_mean_constraint = " + std::to_string(check_constraint_zero_mean(f)));
    bool ok = dr.linf_coeff == 0.0 || dr.max_modulus_outer_band <= 1e-7 * dr.linf_coeff ||
              dr.max_modulus_outer_band <= 1e-7;
    rep.note(std::string("resolution_ok = ") + (ok ? "yes" : "no"));
    return 0;
}

} // namespace

int run_pipeline(const std::string& subcommand, Config cfg) {
    try {
        Reporter rep(cfg.get("output_dir", "out"));
        int rc = 0;
        if (subcommand == "evolve-gkp") rc = run_evolve_gkp(cfg, rep);
        else if (subcommand == "evolve-dkp") rc = run_evolve_dkp(cfg, rep);
        else if (subcommand == "find-critical") rc = run_find_critical(cfg, rep);
        else if (subcommand == "pi2") rc = run_pi2(cfg, rep);
        else if (subcommand == "compare") rc = run_compare(cfg, rep);
        else if (subcommand == "diagnose") rc = run_diagnose(cfg, rep);
        else {
            std::cerr << "unknown subcommand: " << subcommand << '\n';
            return 1;
        }
        rep.finish(cfg, subcommand);
        for (const auto& s : rep.summary) std::cout << s << '\n';
        return rc;
    } catch (const numeric_failure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const bad_input& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace kp
