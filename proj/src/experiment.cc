#include "ppqkd/experiment.h"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace ppqkd {

bool SweepAxes::empty() const {
    return p_bitflip.empty() && p_phaseflip.empty() && p_both.empty() && t.empty() && eve.empty() &&
           tag_length.empty();
}

std::string_view format_name(OutputFormat f) {
    switch (f) {
        case OutputFormat::Tabular:
            return "tabular";
        case OutputFormat::Structured:
            return "structured";
        case OutputFormat::Both:
            return "both";
    }
    throw std::invalid_argument("unknown OutputFormat");
}

OutputFormat format_from_name(std::string_view name) {
    for (OutputFormat f : {OutputFormat::Tabular, OutputFormat::Structured, OutputFormat::Both}) {
        if (format_name(f) == name) {
            return f;
        }
    }
    throw ConfigError("output.format", "expected tabular, structured or both, got '" + std::string(name) + "'");
}

std::vector<CellParams> sweep_cells(const ExperimentConfig &config) {
    auto axis = [](const auto &values, auto base) {
        using T = decltype(base);
        return values.empty() ? std::vector<T>{base} : std::vector<T>(values.begin(), values.end());
    };
    auto bitflip = axis(config.sweep.p_bitflip, config.noise.p_bitflip);
    auto phaseflip = axis(config.sweep.p_phaseflip, config.noise.p_phaseflip);
    auto both = axis(config.sweep.p_both, config.noise.p_both);
    auto ts = axis(config.sweep.t, config.run.t);
    auto eves = axis(config.sweep.eve, config.eve.kind);
    auto tags = axis(config.sweep.tag_length, config.run.tag_length);

    std::vector<CellParams> cells;
    for (double pb : bitflip) {
        for (double pp : phaseflip) {
            for (double pz : both) {
                for (size_t t : ts) {
                    for (EveKind e : eves) {
                        for (size_t tag : tags) {
                            CellParams c;
                            c.noise = {pb, pp, pz};
                            c.t = t;
                            c.eve = e;
                            c.tag_length = tag;
                            cells.push_back(c);
                        }
                    }
                }
            }
        }
    }
    return cells;
}

void ExperimentConfig::validate() const {
    if (repetitions < 1) {
        throw ConfigError("repetitions", "must be at least 1");
    }
    if (leaves < 1 || leaves > 0xFFFF) {
        throw ConfigError("leaves", "must be between 1 and 65535");
    }
    if (threads < 1) {
        throw ConfigError("threads", "must be at least 1");
    }
    for (size_t link : eve_links) {
        if (link >= leaves) {
            throw ConfigError("eve.links", "link index " + std::to_string(link) + " is out of range");
        }
    }
    try {
        eve.validate();
    } catch (const std::invalid_argument &ex) {
        throw ConfigError("eve", ex.what());
    }
    run.validate();
    auto check_p = [](const std::vector<double> &values, const char *field) {
        for (double p : values) {
            if (!(p >= 0 && p <= 1)) {
                throw ConfigError(field, "sweep probabilities must lie in [0, 1]");
            }
        }
    };
    check_p(sweep.p_bitflip, "sweep.p_bitflip");
    check_p(sweep.p_phaseflip, "sweep.p_phaseflip");
    check_p(sweep.p_both, "sweep.p_both");
    for (const CellParams &cell : sweep_cells(*this)) {
        try {
            cell.noise.validate();
        } catch (const std::invalid_argument &ex) {
            throw ConfigError("sweep", ex.what());
        }
        RunConfig rc = run;
        rc.t = cell.t;
        rc.tag_length = cell.tag_length;
        if (rc.tag_pattern.size() != rc.tag_length) {
            rc.tag_pattern.clear();
        }
        try {
            rc.validate();
        } catch (const ConfigError &ex) {
            throw ConfigError("sweep." + ex.field(), ex.what());
        }
    }
}

ExperimentConfig ExperimentConfig::without_sweep() const {
    ExperimentConfig c = *this;
    c.sweep = {};
    return c;
}

namespace {

const std::set<std::string> kTopLevelKeys = {"run", "repetitions", "noise", "eve", "leaves", "sweep", "output", "threads"};

template <typename T>
std::vector<T> list_field(const json &j, const char *key, const std::string &field) {
    if (!j.contains(key)) {
        return {};
    }
    try {
        return j.at(key).get<std::vector<T>>();
    } catch (const json::exception &ex) {
        throw ConfigError(field + key, ex.what());
    }
}

template <typename T>
T scalar_field(const json &j, const char *key, T fallback, const std::string &field) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &ex) {
        throw ConfigError(field + key, ex.what());
    }
}

}  // namespace

ExperimentConfig experiment_from_json(const json &j) {
    if (!j.is_object()) {
        throw ConfigError("config", "top level must be an object");
    }
    for (const auto &[key, value] : j.items()) {
        if (!kTopLevelKeys.count(key)) {
            throw ConfigError(key, "unknown configuration key");
        }
    }
    ExperimentConfig c;
    if (j.contains("run")) {
        c.run = run_config_from_json(j.at("run"));
    }
    c.repetitions = scalar_field<size_t>(j, "repetitions", c.repetitions, "");
    c.leaves = scalar_field<size_t>(j, "leaves", c.leaves, "");
    c.threads = scalar_field<unsigned>(j, "threads", c.threads, "");
    if (j.contains("noise")) {
        const json &n = j.at("noise");
        c.noise = noise_from_json(n, "noise");
        try {
            c.noise_legs = leg_set_from_name(scalar_field<std::string>(n, "legs", "both", "noise."));
        } catch (const ConfigError &) {
            throw;
        } catch (const std::invalid_argument &ex) {
            throw ConfigError("noise.legs", ex.what());
        }
    }
    if (j.contains("eve")) {
        const json &e = j.at("eve");
        c.eve = eve_from_json(e, "eve");
        c.eve_links = list_field<size_t>(e, "links", "eve.");
    }
    if (j.contains("sweep")) {
        const json &s = j.at("sweep");
        c.sweep.p_bitflip = list_field<double>(s, "p_bitflip", "sweep.");
        c.sweep.p_phaseflip = list_field<double>(s, "p_phaseflip", "sweep.");
        c.sweep.p_both = list_field<double>(s, "p_both", "sweep.");
        c.sweep.t = list_field<size_t>(s, "t", "sweep.");
        c.sweep.tag_length = list_field<size_t>(s, "tag_length", "sweep.");
        for (const auto &name : list_field<std::string>(s, "eve", "sweep.")) {
            try {
                c.sweep.eve.push_back(eve_kind_from_name(name));
            } catch (const std::invalid_argument &ex) {
                throw ConfigError("sweep.eve", ex.what());
            }
        }
    }
    if (j.contains("output")) {
        const json &o = j.at("output");
        c.output_dir = scalar_field<std::string>(o, "dir", c.output_dir, "output.");
        c.format = format_from_name(scalar_field<std::string>(o, "format", "both", "output."));
    }
    return c;
}

json to_json(const ExperimentConfig &config) {
    json j;
    j["run"] = to_json(config.run);
    j["repetitions"] = config.repetitions;
    json noise = to_json(config.noise);
    noise["legs"] = leg_set_name(config.noise_legs);
    j["noise"] = noise;
    json eve = to_json(config.eve);
    eve["links"] = config.eve_links;
    j["eve"] = eve;
    j["leaves"] = config.leaves;
    json sweep = json::object();
    if (!config.sweep.p_bitflip.empty()) {
        sweep["p_bitflip"] = config.sweep.p_bitflip;
    }
    if (!config.sweep.p_phaseflip.empty()) {
        sweep["p_phaseflip"] = config.sweep.p_phaseflip;
    }
    if (!config.sweep.p_both.empty()) {
        sweep["p_both"] = config.sweep.p_both;
    }
    if (!config.sweep.t.empty()) {
        sweep["t"] = config.sweep.t;
    }
    if (!config.sweep.eve.empty()) {
        json names = json::array();
        for (EveKind k : config.sweep.eve) {
            names.push_back(eve_kind_name(k));
        }
        sweep["eve"] = names;
    }
    if (!config.sweep.tag_length.empty()) {
        sweep["tag_length"] = config.sweep.tag_length;
    }
    j["sweep"] = sweep;
    j["output"] = {{"format", format_name(config.format)}};
    return j;
}

RunConfig cell_run_config(const ExperimentConfig &config, const CellParams &cell, size_t cell_index, size_t repetition) {
    RunConfig rc = config.run;
    rc.t = cell.t;
    if (rc.tag_length != cell.tag_length) {
        rc.tag_pattern.clear();
    }
    rc.tag_length = cell.tag_length;
    rc.seed = derive_seed(config.run.seed, {kStreamCell, cell_index, repetition});
    return rc;
}

namespace {

std::string leaf_name(size_t i) {
    if (i == 0) {
        return "Alice";
    }
    if (i == 1) {
        return "Celine";
    }
    return "Leaf" + std::to_string(i + 1);
}

}  // namespace

Topology cell_topology(const ExperimentConfig &config, const CellParams &cell) {
    Topology topo;
    std::set<size_t> attacked(config.eve_links.begin(), config.eve_links.end());
    for (size_t i = 0; i < config.leaves; i++) {
        LinkSettings link;
        link.leaf = leaf_name(i);
        if (leg_in(config.noise_legs, Leg::Forward)) {
            link.forward_noise = cell.noise;
        }
        if (leg_in(config.noise_legs, Leg::Backward)) {
            link.backward_noise = cell.noise;
        }
        if (attacked.empty() || attacked.count(i)) {
            link.eve = config.eve;
            link.eve.kind = cell.eve;
        }
        topo.leaves.push_back(std::move(link));
    }
    return topo;
}

double Rate::std_error() const {
    if (samples == 0) {
        return 0.0;
    }
    double r = value();
    return std::sqrt(r * (1 - r) / (double)samples);
}

void accumulate(CellStatistics &cell, const StarSessionResult &session, const RunConfig &config) {
    const BitString &m = session.message.m;
    BitString tag = agreed_tag(config);
    cell.runs++;
    for (const LinkOutcome &link : session.links) {
        cell.link_sessions++;
        const DerivationRecord &d = link.derivation;

        size_t qubit_errors = 0;
        for (const auto &q : link.qubits) {
            uint8_t expected = q.sent_bit ^ (q.bob_op == PauliWord::XZ ? 1 : 0);
            qubit_errors += q.measured_bit != expected;
        }
        cell.qubit_error.add(qubit_errors, link.qubits.size());

        size_t wrong = 0, counted = 0, failed = 0, erased = 0;
        for (size_t k = 0; k < m.size(); k++) {
            bool is_erased = config.variant == Variant::V2 && d.p[k];
            if (is_erased) {
                erased++;
                failed++;
                continue;
            }
            counted++;
            bool bad = d.m_prime.m[k] != m[k];
            wrong += bad;
            failed += bad;
        }
        if (config.variant == Variant::V3) {
            for (size_t k : d.ties) {
                // A tie decodes to 0; count it as failed even when that happens to match.
                failed += d.m_prime.m[k] == m[k];
            }
            cell.tie.add(d.ties.size(), m.size());
        }
        cell.qber.add(wrong, counted);
        cell.block_error.add(failed, m.size());
        if (config.variant == Variant::V2) {
            cell.erasure.add(erased, m.size());
        }

        size_t offset = m.size() - tag.size();
        size_t mismatched = 0;
        for (size_t k = 0; k < tag.size(); k++) {
            mismatched += d.m_prime.m[offset + k] != tag[k];
        }
        cell.tag_mismatch.add(mismatched, tag.size());

        cell.agreement.add(link.keys_agree() ? 1 : 0, 1);
        cell.detection.add(link.accepted() ? 0 : 1, 1);
        cell.no_pivot += d.no_pivot;
    }
}

namespace {

CellStatistics run_cell(const ExperimentConfig &config, const CellParams &params, size_t index) {
    CellStatistics cell;
    cell.index = index;
    cell.params = params;
    Topology topo = cell_topology(config, params);
    for (size_t rep = 0; rep < config.repetitions; rep++) {
        RunConfig rc = cell_run_config(config, params, index, rep);
        accumulate(cell, run_star_session(topo, rc), rc);
    }
    return cell;
}

}  // namespace

RunStatistics run_experiment(const ExperimentConfig &config) {
    config.validate();
    std::vector<CellParams> cells = sweep_cells(config);
    RunStatistics stats;
    stats.repetitions = config.repetitions;
    stats.cells.resize(cells.size());

    unsigned workers = std::min<unsigned>(config.threads, (unsigned)cells.size());
    if (workers <= 1) {
        for (size_t i = 0; i < cells.size(); i++) {
            stats.cells[i] = run_cell(config, cells[i], i);
        }
        return stats;
    }

    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; w++) {
        pool.emplace_back([&, w] {
            try {
                for (size_t i = next++; i < cells.size(); i = next++) {
                    stats.cells[i] = run_cell(config, cells[i], i);
                }
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    for (auto &f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    return stats;
}

json first_session_transcript(const ExperimentConfig &config) {
    config.validate();
    CellParams cell = sweep_cells(config).front();
    RunConfig rc = cell_run_config(config, cell, 0, 0);
    json j = transcript_to_json(run_star_session(cell_topology(config, cell), rc), rc);
    j["experiment"] = to_json(config);
    return j;
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json rate_json(const Rate &r) {
    return {{"rate", r.value()}, {"std_error", r.std_error()}, {"hits", r.hits}, {"samples", r.samples}};
}

}  // namespace

std::string results_csv(const RunStatistics &stats) {
    std::ostringstream out;
    out << "cell,p_bitflip,p_phaseflip,p_both,t,eve,tag_length,runs,link_sessions,"
           "qber,qber_se,qber_bits,qubit_error_rate,qubit_error_se,qubits,"
           "agreement_rate,agreement_se,detection_rate,detection_se,"
           "erasure_rate,block_error_rate,block_error_se,blocks,"
           "tag_mismatch_rate,tag_mismatch_se,tag_bits,tie_rate,no_pivot\n";
    for (const auto &c : stats.cells) {
        const CellParams &p = c.params;
        out << c.index << ',' << fmt_double(p.noise.p_bitflip) << ',' << fmt_double(p.noise.p_phaseflip) << ','
            << fmt_double(p.noise.p_both) << ',' << p.t << ',' << eve_kind_name(p.eve) << ',' << p.tag_length << ','
            << c.runs << ',' << c.link_sessions << ',' << fmt_double(c.qber.value()) << ','
            << fmt_double(c.qber.std_error()) << ',' << c.qber.samples << ',' << fmt_double(c.qubit_error.value())
            << ',' << fmt_double(c.qubit_error.std_error()) << ',' << c.qubit_error.samples << ','
            << fmt_double(c.agreement.value()) << ',' << fmt_double(c.agreement.std_error()) << ','
            << fmt_double(c.detection.value()) << ',' << fmt_double(c.detection.std_error()) << ','
            << fmt_double(c.erasure.value()) << ',' << fmt_double(c.block_error.value()) << ','
            << fmt_double(c.block_error.std_error()) << ',' << c.block_error.samples << ','
            << fmt_double(c.tag_mismatch.value()) << ',' << fmt_double(c.tag_mismatch.std_error()) << ','
            << c.tag_mismatch.samples << ',' << fmt_double(c.tie.value()) << ',' << c.no_pivot << '\n';
    }
    return out.str();
}

json results_summary(const RunStatistics &stats, const ExperimentConfig &config) {
    json cells = json::array();
    for (const auto &c : stats.cells) {
        json cell;
        cell["cell"] = c.index;
        cell["params"] = {{"p_bitflip", c.params.noise.p_bitflip},
                          {"p_phaseflip", c.params.noise.p_phaseflip},
                          {"p_both", c.params.noise.p_both},
                          {"t", c.params.t},
                          {"eve", eve_kind_name(c.params.eve)},
                          {"tag_length", c.params.tag_length}};
        cell["runs"] = c.runs;
        cell["link_sessions"] = c.link_sessions;
        cell["qber"] = rate_json(c.qber);
        cell["qubit_error"] = rate_json(c.qubit_error);
        cell["agreement"] = rate_json(c.agreement);
        cell["detection"] = rate_json(c.detection);
        cell["erasure"] = rate_json(c.erasure);
        cell["block_error"] = rate_json(c.block_error);
        cell["tag_mismatch"] = rate_json(c.tag_mismatch);
        cell["tie"] = rate_json(c.tie);
        cell["no_pivot"] = c.no_pivot;
        cells.push_back(std::move(cell));
    }
    json j;
    j["format"] = "ppqkd-results/1";
    j["source"] = "simulator-derived";
    j["repetitions"] = stats.repetitions;
    j["config"] = to_json(config);
    j["cells"] = cells;
    return j;
}

namespace {

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    f << content;
    f.close();
    if (!f) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

}  // namespace

std::vector<std::string> emit_results(const RunStatistics &stats, const ExperimentConfig &config,
                                      const std::string &dir, OutputFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    }
    std::vector<std::string> written;
    std::filesystem::path base(dir);
    if (format != OutputFormat::Structured) {
        write_file(base / "results.csv", results_csv(stats));
        written.push_back((base / "results.csv").string());
    }
    if (format != OutputFormat::Tabular) {
        write_file(base / "summary.json", results_summary(stats, config).dump(2) + "\n");
        written.push_back((base / "summary.json").string());
    }
    return written;
}

}  // namespace ppqkd
