#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ppqkd/experiment.h"
#include "support.h"

using namespace ppqkd;

namespace {

constexpr double kPi = std::numbers::pi;

std::string field_of(const json &j) {
    try {
        experiment_from_json(j).validate();
    } catch (const ConfigError &e) {
        return e.field();
    }
    return "none";
}

size_t count_lines(const std::string &s) {
    return (size_t)std::count(s.begin(), s.end(), '\n');
}

}  // namespace

TEST(experiment_config, defaults_parse) {
    ExperimentConfig c = experiment_from_json(json::object());
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.repetitions, 1u);
    EXPECT_EQ(sweep_cells(c).size(), 1u);
}

TEST(experiment_config, diagnostics_name_the_field) {
    EXPECT_EQ(field_of({{"bogus", 1}}), "bogus");
    EXPECT_EQ(field_of({{"repetitions", 0}}), "repetitions");
    EXPECT_EQ(field_of({{"repetitions", "many"}}), "repetitions");
    EXPECT_EQ(field_of({{"run", {{"N", 0}}}}), "N");
    EXPECT_EQ(field_of({{"run", {{"variant", "V9"}}}}), "variant");
    EXPECT_EQ(field_of({{"run", {{"basis_pool", json::array()}}}}), "basis_pool");
    EXPECT_EQ(field_of({{"noise", {{"p_bitflip", 1.5}}}}), "noise");
    EXPECT_EQ(field_of({{"noise", {{"legs", "up"}}}}), "noise.legs");
    EXPECT_EQ(field_of({{"eve", {{"kind", "Mallory"}}}}), "eve");
    EXPECT_EQ(field_of({{"eve", {{"basis_policy", 3}}}}), "eve.basis_policy");
    EXPECT_EQ(field_of({{"eve", {{"links", {4}}}}}), "eve.links");
    EXPECT_EQ(field_of({{"sweep", {{"p_bitflip", {0.1, 2.0}}}}}), "sweep.p_bitflip");
    EXPECT_EQ(field_of({{"sweep", {{"p_bitflip", {0.6}}, {"p_both", {0.6}}}}}), "sweep");
    EXPECT_EQ(field_of({{"sweep", {{"t", {0}}}}}), "sweep.t");
    EXPECT_EQ(field_of({{"run", {{"N", 4}}}, {"sweep", {{"tag_length", {2, 8}}}}}), "sweep.tag_length");
    EXPECT_EQ(field_of({{"output", {{"format", "xml"}}}}), "output.format");
    EXPECT_EQ(field_of({{"leaves", 0}}), "leaves");
}

TEST(experiment_config, json_round_trip) {
    json j = {{"run", {{"N", 6}, {"t", 3}, {"variant", "V2"}, {"basis_pool", {0.0, 0.3}}, {"tag_length", 2}, {"seed", 99}}},
              {"repetitions", 7},
              {"noise", {{"p_bitflip", 0.1}, {"p_phaseflip", 0.0}, {"p_both", 0.05}, {"legs", "forward"}}},
              {"eve", {{"kind", "InterceptResend"}, {"basis_policy", {{"fixed", 0.5}}}, {"legs", "backward"}, {"links", {0}}}},
              {"leaves", 2},
              {"sweep", {{"t", {1, 3}}, {"eve", {"Absent", "Substitute"}}}},
              {"output", {{"format", "tabular"}}}};
    ExperimentConfig c = experiment_from_json(j);
    EXPECT_EQ(to_json(experiment_from_json(to_json(c))).dump(), to_json(c).dump());
    EXPECT_EQ(c.run.variant, Variant::V2);
    EXPECT_EQ(c.noise_legs, LegSet::Forward);
    EXPECT_EQ(*c.eve.basis_policy.fixed_theta, 0.5);
    EXPECT_EQ(c.format, OutputFormat::Tabular);
}

TEST(sweep_cells, lexicographic_order) {
    ExperimentConfig c;
    c.run.N = 8;
    c.sweep.p_bitflip = {0.1, 0.2};
    c.sweep.tag_length = {0, 2, 4};
    auto cells = sweep_cells(c);
    ASSERT_EQ(cells.size(), 6u);
    double expect_p[] = {0.1, 0.1, 0.1, 0.2, 0.2, 0.2};
    size_t expect_tag[] = {0, 2, 4, 0, 2, 4};
    for (size_t i = 0; i < 6; i++) {
        EXPECT_EQ(cells[i].noise.p_bitflip, expect_p[i]);
        EXPECT_EQ(cells[i].tag_length, expect_tag[i]);
    }
}

TEST(run_experiment, noiseless_grid_is_perfect) {
    ExperimentConfig c;
    c.run.N = 16;
    c.run.basis_pool = {Basis(0), Basis(0.7), Basis(2.0)};
    c.repetitions = 30;
    c.sweep.t = {1, 2, 3};
    c.sweep.tag_length = {0, 4};
    for (Variant v : {Variant::V1, Variant::V2, Variant::V3}) {
        c.run.variant = v;
        RunStatistics s = run_experiment(c);
        ASSERT_EQ(s.cells.size(), 6u);
        for (const auto &cell : s.cells) {
            EXPECT_EQ(cell.runs, 30u);
            EXPECT_EQ(cell.qber.value(), 0.0);
            EXPECT_GT(cell.qber.samples, 0u);
            EXPECT_EQ(cell.agreement.value(), 1.0);
            EXPECT_EQ(cell.detection.value(), 0.0);
            EXPECT_EQ(cell.qubit_error.value(), 0.0);
        }
    }
}

TEST(run_experiment, rates_are_bounded_and_counted) {
    ExperimentConfig c;
    c.run.N = 10;
    c.run.t = 2;
    c.run.variant = Variant::V2;
    c.run.tag_length = 3;
    c.run.basis_pool = {Basis(0), Basis(kPi / 4)};
    c.repetitions = 50;
    c.leaves = 3;
    c.sweep.p_bitflip = {0.0, 0.2};
    c.sweep.eve = {EveKind::Absent, EveKind::InterceptResend, EveKind::Substitute};
    RunStatistics s = run_experiment(c);
    for (const auto &cell : s.cells) {
        EXPECT_EQ(cell.runs, 50u);
        EXPECT_EQ(cell.link_sessions, 150u);
        EXPECT_EQ(cell.agreement.samples, 150u);
        EXPECT_EQ(cell.block_error.samples, 1500u);
        EXPECT_EQ(cell.tag_mismatch.samples, 450u);
        for (const Rate *r : {&cell.qber, &cell.qubit_error, &cell.agreement, &cell.detection, &cell.erasure,
                              &cell.block_error, &cell.tag_mismatch}) {
            EXPECT_GE(r->value(), 0.0);
            EXPECT_LE(r->value(), 1.0);
            EXPECT_GE(r->std_error(), 0.0);
        }
    }
}

TEST(run_experiment, parallel_matches_sequential) {
    ExperimentConfig c;
    c.run.N = 12;
    c.run.tag_length = 4;
    c.run.basis_pool = {Basis(0), Basis(0.3)};
    c.repetitions = 40;
    c.sweep.p_bitflip = {0.0, 0.05, 0.1};
    c.sweep.eve = {EveKind::Absent, EveKind::InterceptResend};
    c.sweep.t = {1, 3};
    std::string sequential = results_csv(run_experiment(c));
    c.threads = 4;
    std::string parallel = results_csv(run_experiment(c));
    EXPECT_EQ(sequential, parallel);
    EXPECT_EQ(results_summary(run_experiment(c), c).dump(), results_summary(run_experiment(c), c).dump());
}

TEST(run_experiment, both_leg_bit_flip_block_errors_follow_binomial_tail) {
    // Two independent X legs combine to a visible error with rate
    // 2p(1-p) * (cos^2 - sin^2)^2, averaged over the pool.
    ExperimentConfig c;
    c.run.variant = Variant::V2;
    c.run.N = 8;
    c.run.basis_pool = {Basis(0), Basis(kPi / 8)};
    c.repetitions = 5000;
    c.noise_legs = LegSet::Both;
    c.sweep.p_bitflip = {0.05, 0.15};
    c.sweep.t = {3, 4};
    RunStatistics s = run_experiment(c);
    std::vector<double> pool{0, kPi / 8};
    for (const auto &cell : s.cells) {
        double p = cell.params.noise.p_bitflip;
        double q = oracle::round_trip_error_rate({p, 0, 0}, {p, 0, 0}, pool);
        EXPECT_TRUE(oracle::within_sigmas(cell.qubit_error.value(), q, cell.qubit_error.samples));
        double tail = oracle::binomial_tail(cell.params.t, q);
        EXPECT_TRUE(oracle::within_sigmas(cell.block_error.value(), tail, cell.block_error.samples))
            << "p=" << p << " t=" << cell.params.t << " observed " << cell.block_error.value() << " expected " << tail;
    }
}

TEST(run_experiment, v3_copy_errors_follow_binomial_tail) {
    ExperimentConfig c;
    c.run.variant = Variant::V3;
    c.run.N = 8;
    c.run.basis_pool = {Basis(0)};
    c.repetitions = 5000;
    c.noise_legs = LegSet::Forward;
    c.sweep.p_bitflip = {0.1};
    c.sweep.t = {3, 5};
    RunStatistics s = run_experiment(c);
    for (const auto &cell : s.cells) {
        double tail = oracle::binomial_tail(cell.params.t, 0.1);
        EXPECT_TRUE(oracle::within_sigmas(cell.block_error.value(), tail, cell.block_error.samples));
    }
}

TEST(run_experiment, intercept_resend_detection_grows_with_tag_length) {
    ExperimentConfig c;
    c.run.N = 32;
    c.run.basis_pool = {Basis(0), Basis(kPi / 4)};
    c.repetitions = 500;
    c.eve = {EveKind::InterceptResend, BasisPolicy::party_pool(), LegSet::Forward};
    c.sweep.tag_length = {0, 1, 2, 4, 8, 16};
    RunStatistics s = run_experiment(c);
    double prev = -1;
    for (const auto &cell : s.cells) {
        EXPECT_GE(cell.detection.value(), prev);
        prev = cell.detection.value();
        // One tag bit survives with probability 3/4.
        double expected = 1 - std::pow(0.75, (double)cell.params.tag_length);
        EXPECT_TRUE(oracle::within_sigmas(cell.detection.value(), expected, cell.detection.samples, 4));
    }
    EXPECT_EQ(s.cells.front().detection.value(), 0.0);
}

TEST(emit_results, single_cell_and_grid_shapes) {
    auto dir = std::filesystem::temp_directory_path() / "ppqkd_emit_test";
    std::filesystem::remove_all(dir);
    ExperimentConfig c;
    c.run.N = 4;
    c.repetitions = 3;
    auto files = emit_results(run_experiment(c), c, dir.string(), OutputFormat::Both);
    EXPECT_EQ(files.size(), 2u);
    std::string csv = results_csv(run_experiment(c));
    EXPECT_EQ(count_lines(csv), 2u);
    EXPECT_EQ(csv.substr(0, 5), "cell,");

    c.sweep.p_bitflip = {0.0, 0.1};
    c.sweep.t = {1, 2, 3};
    csv = results_csv(run_experiment(c));
    EXPECT_EQ(count_lines(csv), 7u);
    json summary = results_summary(run_experiment(c), c);
    EXPECT_EQ(summary["source"], "simulator-derived");
    EXPECT_EQ(summary["cells"].size(), 6u);
    EXPECT_EQ(summary["cells"][4]["params"]["t"], 2);
    EXPECT_EQ(summary["cells"][4]["params"]["p_bitflip"], 0.1);

    files = emit_results(run_experiment(c), c, dir.string(), OutputFormat::Tabular);
    EXPECT_EQ(files.size(), 1u);
    std::filesystem::remove_all(dir);
}

TEST(emit_results, unwritable_path_fails) {
    auto blocker = std::filesystem::temp_directory_path() / "ppqkd_blocker_file";
    { std::ofstream(blocker) << "x"; }
    ExperimentConfig c;
    EXPECT_THROW(emit_results(run_experiment(c), c, (blocker / "sub").string(), OutputFormat::Both), std::runtime_error);
    std::filesystem::remove(blocker);
}

TEST(first_session_transcript, embeds_experiment) {
    ExperimentConfig c;
    c.run.N = 5;
    c.leaves = 2;
    json t = first_session_transcript(c);
    EXPECT_EQ(t["links"].size(), 2u);
    EXPECT_EQ(t["experiment"]["leaves"], 2);
    EXPECT_EQ(t["links"][1]["leaf"], "Celine");
    EXPECT_EQ(first_session_transcript(c).dump(), t.dump());
}

TEST(run_experiment, substitute_acceptance_falls_with_tag_length) {
    ExperimentConfig c;
    c.run.N = 16;
    c.run.basis_pool = {Basis(0), Basis(0.6), Basis(1.2)};
    c.repetitions = 1000;
    c.eve = {EveKind::Substitute, BasisPolicy::party_pool(), LegSet::Both};
    c.sweep.tag_length = {0, 1, 2, 3, 4, 8, 16};
    RunStatistics s = run_experiment(c);
    double prev_accept = 2;
    for (const auto &cell : s.cells) {
        double accept = 1 - cell.detection.value();
        EXPECT_LE(accept, prev_accept) << "tag_length " << cell.params.tag_length;
        prev_accept = accept;
        // Substitution leaves Alice with an unbiased coin on every qubit.
        EXPECT_TRUE(oracle::within_sigmas(accept, std::pow(0.5, (double)cell.params.tag_length), cell.detection.samples));
    }
    EXPECT_EQ(s.cells.front().detection.value(), 0.0);
}
