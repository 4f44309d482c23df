#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "minesite/minesite.hpp"

namespace fs = std::filesystem;
using namespace minesite;

namespace {

struct CommonOpts {
    std::string config;
    std::string out;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "configuration file (INI)");
    cmd->add_option("--out", o.out, "output directory (overrides paths.output_dir)");
    cmd->add_option("--threads", o.threads, "worker threads for raster scans, 0 = all cores")->check(CLI::NonNegativeNumber);
}

RunConfig resolve(const CommonOpts& o) {
    if (o.config.empty()) fail(ErrorKind::Validation, "--config <path> is required");
    RunConfig c = load_config(o.config);
    if (!o.out.empty()) c.paths.output_dir = o.out;
    return c;
}

std::vector<std::string> split_codes(const std::string& s) {
    std::vector<std::string> v;
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',') {
            if (!cur.empty()) v.push_back(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage siting of surplus-powered mining facilities"};
    app.require_subcommand(1);

    CommonOpts s1o, s2o, plo, swo, cio;
    auto* s1 = app.add_subcommand("stage1", "select regions (areal level)");
    add_common(s1, s1o);

    auto* s2 = app.add_subcommand("stage2", "screen candidate sites in selected regions (lattice level)");
    add_common(s2, s2o);
    std::string selection_path, region_list;
    auto* sel_opt = s2->add_option("--selection", selection_path, "selection JSON from stage1 (default <out>/stage1/selection.json)");
    s2->add_option("--regions", region_list, "comma-separated region codes")->excludes(sel_opt);

    auto* pl = app.add_subcommand("pipeline", "stage1 then stage2, with a run manifest");
    add_common(pl, plo);

    auto* sw = app.add_subcommand("sweep", "re-run stage1 over the [sweep] parameter range");
    add_common(sw, swo);

    auto* cfg = app.add_subcommand("config", "configuration utilities");
    cfg->require_subcommand(1);
    auto* ci = cfg->add_subcommand("init", "write the default configuration (stdout unless --config is given)");
    add_common(ci, cio);
    bool force = false;
    ci->add_flag("--force", force, "overwrite an existing file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*s1) {
            const RunConfig c = resolve(s1o);
            run_stage1(c, c.paths.output_dir, std::cout);
        } else if (*s2) {
            const RunConfig c = resolve(s2o);
            std::vector<std::string> codes;
            if (!region_list.empty()) {
                codes = split_codes(region_list);
            } else {
                const fs::path p = selection_path.empty() ? fs::path(c.paths.output_dir) / "stage1" / "selection.json"
                                                          : fs::path(selection_path);
                codes = report::read_selection_codes(p);
            }
            run_stage2(c, codes, c.paths.output_dir, std::cout, s2o.threads);
        } else if (*pl) {
            const RunConfig c = resolve(plo);
            const auto m = run_pipeline(c, c.paths.output_dir, std::cout, plo.threads);
            std::cout << "manifest: " << (fs::path(c.paths.output_dir) / "manifest.json").string() << '\n';
            if (!m["warnings"].empty()) std::cout << m["warnings"].size() << " warning(s) recorded\n";
        } else if (*sw) {
            const RunConfig c = resolve(swo);
            run_sweep(c, c.paths.output_dir, std::cout);
        } else if (*ci) {
            RunConfig c;
            if (!cio.out.empty()) c.paths.output_dir = cio.out;
            const std::string text = dump_config(c, true);
            if (cio.config.empty()) {
                std::cout << text;
            } else {
                if (fs::exists(cio.config) && !force)
                    fail(ErrorKind::Io, cio.config + " already exists (use --force to overwrite)");
                std::ofstream out(cio.config, std::ios::binary);
                out << text;
                out.close();
                if (!out) fail(ErrorKind::Io, "cannot write " + cio.config);
                std::cout << "wrote " << cio.config << '\n';
            }
        }
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error (io): " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
