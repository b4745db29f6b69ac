#include "swapsim/swapsim.hpp"

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace swapsim;

namespace {

using Label = std::array<int, 4>;

Occupation4 occ(const Label& l) { return Occupation4(l[0], l[1], l[2], l[3]); }

py::tuple key(const Occupation4& o) { return py::make_tuple(o[0], o[1], o[2], o[3]); }

py::dict amplitudes(const PureStateAD& s)
{
    py::dict out;
    for (const auto& [o, a] : s.amplitudes)
        out[key(o)] = a;
    return out;
}

Readout to_readout(const std::vector<unsigned>& v, bool threshold)
{
    if (v.size() != 4)
        throw InvalidArgument("readout needs four outcomes");
    return threshold ? threshold_readout(v[0], v[1], v[2], v[3]) : count_readout(v[0], v[1], v[2], v[3]);
}

py::dict scan_dict(const ScanResult& s)
{
    py::dict d;
    std::vector<double> deg(s.delta.size());
    for (std::size_t k = 0; k < deg.size(); ++k)
        deg[k] = s.delta[k] * 180.0 / M_PI;
    d["delta_deg"] = deg;
    d["anticorr"] = s.anticorr;
    d["corr"] = s.corr;
    d["tail_bound"] = s.tail_bound;
    d["cutoffs"] = s.cutoffs;
    return d;
}

py::dict visibility_dict(const VisibilityResult& r)
{
    py::dict d;
    d["visibility"] = r.visibility;
    d["max_value"] = r.max_value;
    d["min_value"] = r.min_value;
    d["delta_max_deg"] = r.delta_max * 180.0 / M_PI;
    d["delta_min_deg"] = r.delta_min * 180.0 / M_PI;
    d["tail_bound"] = r.tail_bound;
    return d;
}

} // namespace

PYBIND11_MODULE(_swapsim, m)
{
    m.doc() = "Entanglement swapping with imperfect sources and detectors";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base);
    py::register_exception<SingularModel>(m, "SingularModel", base);
    py::register_exception<EmptyPostselection>(m, "EmptyPostselection", base);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base);

    py::enum_<ThresholdOutcome>(m, "ThresholdOutcome")
        .value("no_click", ThresholdOutcome::no_click)
        .value("click", ThresholdOutcome::click);

    py::class_<DetectorSpec>(m, "DetectorSpec")
        .def(py::init([](double eta, double p_dc) {
                 DetectorSpec s{eta, p_dc};
                 s.validate();
                 return s;
             }),
             py::arg("eta") = 1.0, py::arg("p_dc") = 0.0)
        .def_readwrite("eta", &DetectorSpec::eta)
        .def_readwrite("p_dc", &DetectorSpec::p_dc)
        .def("__repr__", [](const DetectorSpec& s) {
            std::ostringstream os;
            os << "DetectorSpec(eta=" << s.eta << ", p_dc=" << s.p_dc << ")";
            return os.str();
        });

    m.def("hyp2f1_terminating", &hyp2f1_terminating, py::arg("n"), py::arg("lam"), py::arg("c"), py::arg("z"));
    m.def("g_function", [](unsigned k, unsigned l, const DetectorSpec& s) { return g_function(k, l, s).value; });
    m.def("thermal_r_from_pdc", &thermal_r_from_pdc);
    m.def("prob_count_given_incident", &prob_count_given_incident, py::arg("q"), py::arg("i"), py::arg("spec"));
    m.def("prob_threshold_given_incident", &prob_threshold_given_incident, py::arg("outcome"), py::arg("i"),
          py::arg("spec"));
    m.def("f_count", &f_count, py::arg("q"), py::arg("i"), py::arg("chi"), py::arg("spec"));
    m.def("f_threshold", &f_threshold, py::arg("outcome"), py::arg("i"), py::arg("chi"), py::arg("spec"));

    m.def("prior_prob", [](const Label& l, double chi) { return prior_prob(occ(l), SourceParams{chi}); });
    m.def("phi_state", [](const Label& l) { return amplitudes(phi_state(occ(l))); },
          "Amplitudes of (a_H, a_V, d_V, d_H) left by an ideal Bell readout.");

    py::class_<TruncationControls>(m, "TruncationControls")
        .def(py::init<>())
        .def_readwrite("n_max", &TruncationControls::n_max)
        .def_readwrite("eps", &TruncationControls::eps)
        .def_readwrite("prune", &TruncationControls::prune);

    py::class_<Posterior4>(m, "Posterior4")
        .def_readonly("factors", &Posterior4::factors)
        .def_readonly("factor_tails", &Posterior4::factor_tails)
        .def_readonly("tail_bound", &Posterior4::tail_bound)
        .def_readonly("evidence", &Posterior4::evidence)
        .def("weight", [](const Posterior4& p, const Label& l) { return p.weight(occ(l)); })
        .def("total_weight", &Posterior4::total_weight)
        .def("support_size", &Posterior4::support_size);

    m.def(
        "posterior_joint",
        [](const std::vector<unsigned>& readout, double chi, const std::array<DetectorSpec, 4>& bank, bool threshold,
           const TruncationControls& tc) { return posterior_joint(to_readout(readout, threshold), chi, bank, tc); },
        py::arg("readout"), py::arg("chi"), py::arg("bank"), py::arg("threshold") = true,
        py::arg("truncation") = TruncationControls{});

    py::class_<MixedStateAD>(m, "MixedState")
        .def_readonly("tail_bound", &MixedStateAD::tail_bound)
        .def("total_weight", &MixedStateAD::total_weight)
        .def("__len__", [](const MixedStateAD& s) { return s.components.size(); })
        .def("components", [](const MixedStateAD& s) {
            py::list out;
            for (const auto& c : s.components)
                out.append(py::make_tuple(c.weight, key(c.label), amplitudes(*c.state)));
            return out;
        })
        .def("to_text", [](const MixedStateAD& s) {
            std::ostringstream os;
            write_state(os, s);
            return os.str();
        });

    m.def("mixed_from_label", [](const Label& l) {
        MixedStateAD s;
        s.components.push_back({1.0, phi_state_cached(occ(l)), occ(l)});
        return s;
    });
    m.def("assemble_state", [](const Posterior4& p) { return assemble_state(p); });
    m.def("postselect", [](const MixedStateAD& s) {
        const PostselectResult r = postselect(s);
        return py::make_tuple(r.state, r.success_prob);
    });
    m.def("fidelity_psi_minus", &fidelity_psi_minus);
    m.def("werner_visibility", &werner_visibility);
    m.def("chsh_s", &chsh_s);

    m.def(
        "rotation_amplitude",
        [](const Label& from, const Label& to, double alpha, double delta) {
            return rotation_amplitude(occ(from), occ(to), AngleConfig{alpha, delta});
        },
        py::arg("from_label"), py::arg("to"), py::arg("alpha"), py::arg("delta"));

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("chi", &ExperimentConfig::chi)
        .def_readwrite("bell_bank", &ExperimentConfig::bell_bank)
        .def_readwrite("analysis_bank", &ExperimentConfig::analysis_bank)
        .def_readwrite("alpha", &ExperimentConfig::alpha_real)
        .def_readwrite("bell_threshold", &ExperimentConfig::bell_threshold)
        .def_readwrite("truncation", &ExperimentConfig::truncation)
        .def_readwrite("threads", &ExperimentConfig::threads)
        .def("validate", &ExperimentConfig::validate)
        .def("set", [](ExperimentConfig& c, const std::string& kv) { apply_override(c, kv); })
        .def("describe", &describe_config);

    m.def("parse_config_text", &parse_config_text, py::arg("text"), py::arg("require_chi") = true);
    m.def("parse_config_file", &parse_config_file, py::arg("path"), py::arg("require_chi") = true);

    m.def(
        "four_fold_scan",
        [](const ExperimentConfig& cfg, const std::vector<double>& delta_deg, int threads) {
            std::vector<double> grid(delta_deg.size());
            for (std::size_t k = 0; k < grid.size(); ++k)
                grid[k] = delta_deg[k] * M_PI / 180.0;
            ScanResult s;
            {
                py::gil_scoped_release release;
                s = four_fold_scan(cfg, grid, threads);
            }
            return scan_dict(s);
        },
        py::arg("config"), py::arg("delta_deg"), py::arg("threads") = 0);
    m.def(
        "scan_visibility",
        [](const ExperimentConfig& cfg) {
            VisibilityResult r;
            {
                py::gil_scoped_release release;
                r = scan_visibility(cfg);
            }
            return visibility_dict(r);
        },
        py::arg("config"));
    m.def(
        "visibility_vs_chi",
        [](const ExperimentConfig& cfg, const std::vector<double>& chis, int threads) {
            std::vector<ChiPoint> pts;
            {
                py::gil_scoped_release release;
                pts = visibility_vs_chi(cfg, chis, threads);
            }
            std::vector<double> v;
            for (const auto& p : pts)
                v.push_back(p.result.visibility);
            return v;
        },
        py::arg("config"), py::arg("chi"), py::arg("threads") = 0);
    m.def("visibility", &visibility);

    auto o = m.def_submodule("oracle", "Brute-force references");
    o.def("detector_prob", &oracle::detector_prob, py::arg("q"), py::arg("i"), py::arg("spec"),
          py::arg("n_thermal") = 0);
    o.def("beamsplitter", &oracle::beamsplitter);
    o.def("label_rotation", [](const Label& from, const Label& to, double alpha, double delta) {
        return oracle::label_rotation(occ(from), occ(to), AngleConfig{alpha, delta});
    });
    o.def(
        "swap_posterior",
        [](const std::vector<unsigned>& readout, double chi, const std::array<DetectorSpec, 4>& bank, int n,
           bool threshold) {
            const auto r = oracle::swap_posterior(to_readout(readout, threshold), chi, bank, n);
            py::dict w;
            for (const auto& [k, v] : r.weights)
                w[key(k)] = v;
            return py::make_tuple(w, r.state, r.evidence);
        },
        py::arg("readout"), py::arg("chi"), py::arg("bank"), py::arg("pair_cutoff"), py::arg("threshold") = true);
    o.def("restrict_to_exact_support", &oracle::restrict_to_exact_support);
    o.def("trace_distance", &oracle::trace_distance);
}
