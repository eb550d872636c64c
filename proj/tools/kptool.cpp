// Command line front end: evolve the gKP/dKP equations, locate gradient
// catastrophes, build the PI2 table, and compare numerics against the local
// asymptotic description.

#include "kp/fft.hpp"
#include "kp/pipeline.hpp"

#include <CLI11.hpp>

#include <thread>

int main(int argc, char** argv) {
    CLI::App app{"gKP dispersive shock toolkit"};
    app.require_subcommand(1);

    std::string config_path, output_dir, snapshots, resume, window, snapshot_file, critical_file,
        pi2_table;
    int levels = -1, breakup = -1, threads = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key=value configuration file");
        sub->add_option("--output", output_dir, "output directory");
        sub->add_option("--threads", threads, "FFT threads (default: hardware, capped at 8)");
    };

    auto* evg = app.add_subcommand("evolve-gkp", "evolve the generalized KP equation");
    auto* evd = app.add_subcommand("evolve-dkp", "evolve the transformed dispersionless equation");
    auto* fc = app.add_subcommand("find-critical", "bracket, refine and analyse the first gradient catastrophe");
    auto* pi2 = app.add_subcommand("pi2", "build and export the PI2 table");
    auto* cmp = app.add_subcommand("compare", "compare a gKP snapshot against the asymptotic formula");
    auto* dia = app.add_subcommand("diagnose", "decay / conservation audit of a snapshot");
    for (auto* sub : {evg, evd, fc, pi2, cmp, dia}) add_common(sub);

    for (auto* sub : {evg, evd})
        sub->add_option("--snapshots", snapshots, "comma separated snapshot times");
    for (auto* sub : {evg, evd, fc})
        sub->add_option("--resume", resume, "restart from a snapshot file");
    fc->add_option("--levels", levels, "bracket refinement levels");
    fc->add_option("--breakup", breakup, "which break-up to report (1 = first)");
    cmp->add_option("--snapshot", snapshot_file, "gKP snapshot to compare");
    cmp->add_option("--critical-report", critical_file, "critical point report (JSON)");
    cmp->add_option("--pi2", pi2_table, "PI2 table CSV (built on the fly when omitted)");
    cmp->add_option("--window", window, "WX,WY window half-widths");
    dia->add_option("--snapshot", snapshot_file, "snapshot to audit");

    CLI11_PARSE(app, argc, argv);

    if (threads <= 0)
        threads = static_cast<int>(std::min(8u, std::max(1u, std::thread::hardware_concurrency())));
    kp::fft::set_threads(threads);

    kp::Config cfg;
    try {
        if (!config_path.empty()) cfg = kp::Config::from_file(config_path);
        if (!output_dir.empty()) cfg.set("output_dir", output_dir);
        if (!snapshots.empty()) cfg.set("snapshot_times", snapshots);
        if (!resume.empty()) cfg.set("resume", resume);
        if (levels >= 0) cfg.set("levels", std::to_string(levels));
        if (breakup >= 0) cfg.set("breakup_index", std::to_string(breakup));
        if (!snapshot_file.empty()) cfg.set("snapshot", snapshot_file);
        if (!critical_file.empty()) cfg.set("critical_report", critical_file);
        if (!pi2_table.empty()) cfg.set("pi2_table", pi2_table);
        if (!window.empty()) {
            auto comma = window.find(',');
            if (comma == std::string::npos) throw kp::bad_input("--window expects WX,WY");
            cfg.set("window_x", window.substr(0, comma));
            cfg.set("window_y", window.substr(comma + 1));
        }
    } catch (const kp::bad_input& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    return kp::run_pipeline(app.get_subcommands().front()->get_name(), cfg);
}
