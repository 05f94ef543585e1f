#include "ppqkd/cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ppqkd/experiment.h"
#include "ppqkd/invariants.h"

namespace ppqkd {

namespace {

struct Overrides {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::optional<unsigned> threads;
    std::optional<size_t> repetitions;
};

json load_json_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("config", "cannot open '" + path + "'");
    }
    try {
        return json::parse(f);
    } catch (const json::parse_error &ex) {
        throw ConfigError("config", std::string("malformed JSON: ") + ex.what());
    }
}

void apply_overrides(ExperimentConfig &config, const Overrides &o) {
    if (o.seed) {
        config.run.seed = *o.seed;
    }
    if (o.out_dir) {
        config.output_dir = *o.out_dir;
    }
    if (o.format) {
        config.format = format_from_name(*o.format);
    }
    if (o.threads) {
        config.threads = *o.threads;
    }
    if (o.repetitions) {
        config.repetitions = *o.repetitions;
    }
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    f << text;
}

// Writes config.json, transcript.json and the result tables.
void execute(const ExperimentConfig &config, std::ostream &out) {
    config.validate();
    RunStatistics stats = run_experiment(config);
    std::vector<std::string> files = emit_results(stats, config, config.output_dir, config.format);
    std::filesystem::path dir(config.output_dir);
    write_text(dir / "config.json", to_json(config).dump(2) + "\n");
    write_text(dir / "transcript.json", first_session_transcript(config).dump(2) + "\n");
    files.push_back((dir / "config.json").string());
    files.push_back((dir / "transcript.json").string());
    out << stats.cells.size() << " cell(s) x " << stats.repetitions << " repetition(s)\n";
    for (const auto &f : files) {
        out << "wrote " << f << "\n";
    }
}

void add_common_flags(CLI::App *cmd, Overrides &o) {
    cmd->add_option("--seed", o.seed, "Override the master seed");
    cmd->add_option("-o,--out", o.out_dir, "Output directory");
    cmd->add_option("--format", o.format, "tabular | structured | both")
        ->check(CLI::IsMember({"tabular", "structured", "both"}));
    cmd->add_option("--threads", o.threads, "Worker threads for sweep cells");
    cmd->add_option("--repetitions", o.repetitions, "Override the repetition count");
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Round-trip qubit key distribution simulator"};
    app.require_subcommand(1);

    Overrides run_opts, sweep_opts, replay_opts;
    std::string transcript_path;
    uint64_t verify_seed = 1;

    CLI::App *run = app.add_subcommand("run", "Execute the base configuration (sweep axes ignored)");
    run->add_option("-c,--config", run_opts.config_path, "Experiment config (JSON)")->required();
    add_common_flags(run, run_opts);

    CLI::App *sweep = app.add_subcommand("sweep", "Execute the full sweep grid");
    sweep->add_option("-c,--config", sweep_opts.config_path, "Experiment config (JSON)")->required();
    add_common_flags(sweep, sweep_opts);

    CLI::App *replay = app.add_subcommand("replay", "Re-run from a stored transcript and check it replays bit-exactly");
    replay->add_option("-t,--transcript", transcript_path, "transcript.json, or the directory holding it")->required();
    replay->add_option("-o,--out", replay_opts.out_dir, "Output directory");
    replay->add_option("--threads", replay_opts.threads, "Worker threads for sweep cells");

    CLI::App *verify = app.add_subcommand("verify", "Run the invariant suite");
    verify->add_option("--seed", verify_seed, "Seed for randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        std::ostringstream o, eo;
        int code = app.exit(e, o, eo);
        out << o.str();
        err << eo.str();
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (*run || *sweep) {
            Overrides &o = *run ? run_opts : sweep_opts;
            ExperimentConfig config = experiment_from_json(load_json_file(o.config_path));
            apply_overrides(config, o);
            if (*run) {
                config = config.without_sweep();
            }
            execute(config, out);
            return kExitOk;
        }
        if (*replay) {
            std::filesystem::path path(transcript_path);
            if (std::filesystem::is_directory(path)) {
                path /= "transcript.json";
            }
            json stored = load_json_file(path.string());
            if (!stored.contains("experiment")) {
                throw ConfigError("transcript", "no embedded experiment config");
            }
            ExperimentConfig config = experiment_from_json(stored.at("experiment"));
            config.output_dir = replay_opts.out_dir.value_or(path.parent_path().string());
            if (replay_opts.threads) {
                config.threads = *replay_opts.threads;
            }
            json regenerated = first_session_transcript(config);
            if (regenerated != stored) {
                err << "replay mismatch: regenerated transcript differs from " << path.string() << "\n";
                return kExitInvariantFailure;
            }
            execute(config, out);
            out << "replay matches stored transcript\n";
            return kExitOk;
        }
        if (*verify) {
            bool ok = true;
            for (const auto &check : run_invariant_suite(verify_seed)) {
                out << (check.passed ? "PASS " : "FAIL ") << check.name;
                if (!check.passed && !check.detail.empty()) {
                    out << " (" << check.detail << ")";
                }
                out << "\n";
                ok = ok && check.passed;
            }
            return ok ? kExitOk : kExitInvariantFailure;
        }
    } catch (const std::invalid_argument &ex) {
        err << "config error: " << ex.what() << "\n";
        return kExitConfigError;
    } catch (const std::runtime_error &ex) {
        err << "error: " << ex.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}

}  // namespace ppqkd
