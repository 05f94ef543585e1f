#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ppqkd/experiment.h"
#include "ppqkd/invariants.h"

namespace py = pybind11;
using namespace ppqkd;

namespace {

std::array<std::array<cplx, 2>, 2> matrix_rows(const Mat2 &m) {
    return {{{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}};
}

Mat2 matrix_from_rows(const std::array<std::array<cplx, 2>, 2> &rows) {
    Mat2 m;
    for (size_t r = 0; r < 2; r++) {
        for (size_t c = 0; c < 2; c++) {
            m(r, c) = rows[r][c];
        }
    }
    return m;
}

}  // namespace

PYBIND11_MODULE(_ppqkd, m) {
    m.doc() = "Round-trip qubit key distribution simulator (C++ core)";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NoPivotError>(m, "NoPivotError", PyExc_RuntimeError);

    py::class_<Basis>(m, "Basis")
        .def(py::init<double>(), py::arg("theta"))
        .def_property_readonly("theta", &Basis::theta)
        .def_property_readonly("alpha", &Basis::alpha)
        .def_property_readonly("beta", &Basis::beta);

    py::class_<PureState>(m, "PureState")
        .def(py::init([](cplx a0, cplx a1) { return PureState{a0, a1}; }), py::arg("amp0"), py::arg("amp1"))
        .def_readonly("amp0", &PureState::amp0)
        .def_readonly("amp1", &PureState::amp1)
        .def("norm_squared", &PureState::norm_squared)
        .def("__repr__", [](const PureState &s) {
            return "PureState(" + py::repr(py::cast(s.amp0)).cast<std::string>() + ", " +
                   py::repr(py::cast(s.amp1)).cast<std::string>() + ")";
        });

    py::enum_<PauliWord>(m, "PauliWord")
        .value("I", PauliWord::I)
        .value("X", PauliWord::X)
        .value("Z", PauliWord::Z)
        .value("XZ", PauliWord::XZ)
        .value("ZX", PauliWord::ZX);

    py::class_<DensityMatrix>(m, "DensityMatrix")
        .def_property_readonly("entries", [](const DensityMatrix &d) { return matrix_rows(d.entries); })
        .def("trace", &DensityMatrix::trace)
        .def("eigenvalues", &DensityMatrix::eigenvalues);

    py::class_<KrausChannel>(m, "KrausChannel")
        .def(py::init([](const std::vector<std::array<cplx, 4>> &coeffs) {
                 std::vector<PauliExpansion> ops;
                 for (const auto &c : coeffs) {
                     ops.push_back({c});
                 }
                 return KrausChannel(std::move(ops));
             }),
             py::arg("coefficients"),
             "Operators as [c_I, c_X, c_Z, c_XZ] coefficient lists; raises ValueError if incomplete.")
        .def_property_readonly("matrices", [](const KrausChannel &k) {
            std::vector<std::array<std::array<cplx, 2>, 2>> out;
            for (const auto &mat : k.matrices()) {
                out.push_back(matrix_rows(mat));
            }
            return out;
        });

    m.def("encode_bit", &encode_bit, py::arg("bit"), py::arg("basis"));
    m.def("apply_pauli", &apply_pauli, py::arg("state"), py::arg("op"));
    m.def("outcome_probability",
          py::overload_cast<const PureState &, const Basis &, uint8_t>(&outcome_probability),
          py::arg("state"), py::arg("basis"), py::arg("outcome"));
    m.def(
        "measure_in_basis",
        [](const PureState &s, const Basis &b, uint64_t seed) {
            Rng rng(seed);
            return measure_in_basis(s, b, rng);
        },
        py::arg("state"), py::arg("basis"), py::arg("seed"));
    m.def("flip_probability", py::overload_cast<const Basis &, PauliWord, uint8_t>(&flip_probability),
          py::arg("basis"), py::arg("op"), py::arg("bit") = 0);
    m.def("to_density", &to_density, py::arg("state"));
    m.def("density_from_rows", [](const std::array<std::array<cplx, 2>, 2> &rows) {
        return DensityMatrix{matrix_from_rows(rows)};
    });
    m.def("apply_channel", &apply_channel, py::arg("rho"), py::arg("channel"));

    m.def("derive_v1", [](const BitString &c, const BitString &a) { return derive_v1(c, a).m; });
    m.def(
        "derive_v2",
        [](const BitString &c, const BitString &a, size_t t, size_t n) {
            BlockDecode d = derive_v2(c, a, t, n);
            return py::make_tuple(d.m_prime, d.p);
        },
        py::arg("c"), py::arg("a"), py::arg("t"), py::arg("N"));
    m.def(
        "derive_v3",
        [](const BitString &c, const BitString &a, size_t t, size_t n) {
            CopyMajority d = derive_v3(c, a, t, n);
            return py::make_tuple(d.m.m, d.ties);
        },
        py::arg("c"), py::arg("a"), py::arg("t"), py::arg("N"));
    m.def("resolve_erasures", [](const BitString &mp, const BitString &p) { return resolve_erasures(mp, p).C; });
    m.def("bob_resolve", [](const BitString &mm, const BitString &p) { return bob_resolve(mm, p).C; });

    m.def("serialize_frame", [](uint16_t link, int direction, uint64_t seq, const PureState &payload) {
        WireFrame f{link, direction ? Direction::ToLeaf : Direction::ToHub, seq, payload};
        auto bytes = serialize_frame(f);
        return py::bytes(reinterpret_cast<const char *>(bytes.data()), bytes.size());
    });
    m.def("deserialize_frame", [](const py::bytes &data) {
        std::string raw = data;
        WireFrame f = deserialize_frame(std::span<const uint8_t>((const uint8_t *)raw.data(), raw.size()));
        return py::make_tuple(f.link, (int)f.direction, f.sequence, f.payload);
    });

    m.def(
        "_run_session_json",
        [](const std::string &config_text) {
            json j = json::parse(config_text);
            ExperimentConfig cfg = experiment_from_json(j);
            return first_session_transcript(cfg).dump();
        },
        py::arg("config_json"));
    m.def(
        "_run_experiment_json",
        [](const std::string &config_text) {
            ExperimentConfig cfg = experiment_from_json(json::parse(config_text));
            RunStatistics stats;
            {
                py::gil_scoped_release release;
                stats = run_experiment(cfg);
            }
            return results_summary(stats, cfg).dump();
        },
        py::arg("config_json"));
    m.def(
        "_results_csv",
        [](const std::string &config_text) {
            ExperimentConfig cfg = experiment_from_json(json::parse(config_text));
            return results_csv(run_experiment(cfg));
        },
        py::arg("config_json"));
    m.def(
        "verify",
        [](uint64_t seed) {
            std::vector<std::pair<std::string, bool>> out;
            for (const auto &c : run_invariant_suite(seed)) {
                out.emplace_back(c.name, c.passed);
            }
            return out;
        },
        py::arg("seed") = 1);
}
