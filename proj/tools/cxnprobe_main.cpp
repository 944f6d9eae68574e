#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/pipeline.hpp"
#include "cxnprobe/version.hpp"

namespace {

// 0 success, 1 data violation, 2 infeasible configuration, 3 resource failure
int run(const std::string& command, const std::string& config_path, bool force) {
    using namespace cxnprobe;
    ExperimentConfig config = load_experiment_config(config_path);
    if (command == "validate") return cmd_validate(config);
    if (command == "split") return cmd_split(config, force);
    if (command == "extract") return cmd_extract(config);
    if (command == "probe") return cmd_probe(config);
    if (command == "report") return cmd_report(config);
    if (command == "run-all") return cmd_run_all(config, force);
    std::cerr << "unknown subcommand '" << command << "'\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layer-wise probing pipeline for the Italian NPN construction family"};
    app.set_version_flag("--version", cxnprobe::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    bool force = false;
    for (const auto& name :
         {"validate", "split", "extract", "probe", "report", "run-all"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("config", config_path, "experiment config (JSON)")
            ->required();
        if (std::string(name) == "split" || std::string(name) == "run-all") {
            sub->add_flag("--force", force, "overwrite existing split files");
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return run(app.get_subcommands().front()->get_name(), config_path, force);
    } catch (const cxnprobe::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const cxnprobe::ResourceError& e) {
        std::cerr << "resource failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
