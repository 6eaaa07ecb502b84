// SPDX-License-Identifier: Apache-2.0
//
// itrdma._core: python bindings for the main simulator operations.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "itr/channel.hpp"
#include "itr/experiments.hpp"
#include "itr/link.hpp"
#include "itr/precoder.hpp"
#include "itr/sequence.hpp"

namespace py = pybind11;
using namespace itr;

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Time-reversal / ITRDMA multi-user MISO precoding simulator";

    // signals
    py::class_<signals::ComplexSequence>(m, "ComplexSequence")
        .def(py::init<>())
        .def(py::init([](long start, std::vector<signals::cplx> taps) {
                 return signals::ComplexSequence(start, std::move(taps));
             }),
             py::arg("start"), py::arg("taps"))
        .def_static("delta", &signals::ComplexSequence::delta, py::arg("pos"),
                    py::arg("value") = signals::cplx{1.0, 0.0})
        .def_property_readonly("start", &signals::ComplexSequence::start)
        .def("__len__", &signals::ComplexSequence::length)
        .def("at", &signals::ComplexSequence::at, py::arg("k"))
        .def("taps", [](const signals::ComplexSequence& s) {
            return std::vector<signals::cplx>(s.taps().begin(), s.taps().end());
        });

    m.def("convolve", &signals::convolve);
    m.def("crosscorr", &signals::crosscorr);
    m.def("energy", &signals::energy);
    m.def("accumulate_shifted", &signals::accumulate_shifted, py::arg("acc"),
          py::arg("c"), py::arg("shift"), py::arg("b"));
    m.def("peak", &signals::peak);
    m.def("time_reverse_conj", &signals::time_reverse_conj, py::arg("a"),
          py::arg("pivot"));
    m.def("max_abs_diff", &signals::max_abs_diff);

    // channel
    py::enum_<channel::Pdp>(m, "Pdp")
        .value("Exponential", channel::Pdp::Exponential)
        .value("Flat", channel::Pdp::Flat);

    py::class_<channel::ChannelSpec>(m, "ChannelSpec")
        .def(py::init<>())
        .def_readwrite("n_users", &channel::ChannelSpec::n_users)
        .def_readwrite("n_antennas", &channel::ChannelSpec::n_antennas)
        .def_readwrite("n_taps", &channel::ChannelSpec::n_taps)
        .def_readwrite("decay_taps", &channel::ChannelSpec::decay_taps)
        .def_readwrite("seed", &channel::ChannelSpec::seed)
        .def_readwrite("pdp", &channel::ChannelSpec::pdp);

    py::class_<channel::CirSet>(m, "CirSet")
        .def_property_readonly("n_users", &channel::CirSet::n_users)
        .def_property_readonly("n_antennas", &channel::CirSet::n_antennas)
        .def_property_readonly("n_taps", &channel::CirSet::n_taps)
        .def_property_readonly("tap_interval", &channel::CirSet::tap_interval)
        .def_property_readonly("carrier_wavelength",
                               &channel::CirSet::carrier_wavelength)
        .def("cir", &channel::CirSet::cir, py::arg("user"), py::arg("antenna"))
        .def("user_energy", &channel::CirSet::user_energy);

    m.def("generate_synthetic", &channel::generate_synthetic, py::arg("spec"),
          py::arg("tap_interval") = 1e-8, py::arg("carrier_wavelength") = 0.15);
    m.def("normalize_user", &channel::normalize_user);
    m.def("spatial_correlation", &channel::spatial_correlation, py::arg("d"),
          py::arg("wavelength"));
    m.def("displaced", &channel::displaced, py::arg("cirset"), py::arg("d"),
          py::arg("seed"), py::arg("coherence_multiplier") = 1.0);
    m.def("store_cirset", &channel::store);
    m.def("load_cirset", &channel::load);
    m.def("store_cirset_json", &channel::store_json);
    m.def("load_cirset_json", &channel::load_json);

    // precoder
    py::enum_<precoder::PrecoderKind>(m, "PrecoderKind")
        .value("TR", precoder::PrecoderKind::TR)
        .value("ITRDMA", precoder::PrecoderKind::ITRDMA);

    py::class_<precoder::PrecoderSet>(m, "PrecoderSet")
        .def_readonly("kind", &precoder::PrecoderSet::kind)
        .def_readonly("n_users", &precoder::PrecoderSet::n_users)
        .def_readonly("n_antennas", &precoder::PrecoderSet::n_antennas)
        .def_readonly("s", &precoder::PrecoderSet::s)
        .def_readonly("iterations_used", &precoder::PrecoderSet::iterations_used);

    py::class_<precoder::TraceEntry>(m, "TraceEntry")
        .def_readonly("iteration", &precoder::TraceEntry::iteration)
        .def_readonly("user", &precoder::TraceEntry::user)
        .def_readonly("lag", &precoder::TraceEntry::lag)
        .def_readonly("residual", &precoder::TraceEntry::residual)
        .def_readonly("max_abs_after", &precoder::TraceEntry::max_abs_after);

    py::class_<precoder::ItrdmaResult>(m, "ItrdmaResult")
        .def_readonly("s", &precoder::ItrdmaResult::s)
        .def_readonly("iterations_used", &precoder::ItrdmaResult::iterations_used)
        .def_property_readonly("trace", [](const precoder::ItrdmaResult& r) {
            return r.grid.trace;
        });

    m.def("normalized_correlation_bank", &precoder::normalized_correlation_bank);
    m.def("tr_precoder", &precoder::tr_precoder, py::arg("cirset"),
          py::arg("i0"));
    m.def("itrdma_precoder", &precoder::itrdma_precoder, py::arg("cirset"),
          py::arg("i0"), py::arg("epsilon"), py::arg("n_max"));
    m.def("build_tr", &precoder::build_tr);
    m.def("build_itrdma", &precoder::build_itrdma, py::arg("cirset"),
          py::arg("epsilon"), py::arg("n_max"));

    // link
    py::class_<link::EquivalentChannelSet>(m, "EquivalentChannelSet")
        .def_readonly("n_users", &link::EquivalentChannelSet::n_users)
        .def_readonly("peak_index", &link::EquivalentChannelSet::peak_index)
        .def_readonly("w", &link::EquivalentChannelSet::w);

    m.def("equivalent_channel", &link::equivalent_channel);
    m.def("sinr", &link::sinr, py::arg("eq"), py::arg("user"), py::arg("sigma"));
    m.def("to_db", &link::to_db);
    m.def("from_db", &link::from_db);

    py::enum_<link::Constellation>(m, "Constellation")
        .value("BPSK", link::Constellation::BPSK)
        .value("QPSK", link::Constellation::QPSK);

    m.def("simulate_transmission", &link::simulate_transmission, py::arg("eq"),
          py::arg("symbols"), py::arg("sigma"), py::arg("seed"),
          py::arg("symbol_spacing") = 1);
    m.def("demodulate_ber", &link::demodulate_ber, py::arg("received"),
          py::arg("reference"), py::arg("constellation"), py::arg("peak_index"),
          py::arg("symbol_spacing") = 1);
    m.def("random_symbols", &link::random_symbols);

    // experiments
    py::class_<experiments::Speed>(m, "Speed")
        .def_readonly("mps", &experiments::Speed::mps)
        .def_readonly("kmh", &experiments::Speed::kmh);
    m.def("half_strength_speed", &experiments::half_strength_speed,
          py::arg("d_half_m"), py::arg("tau_s"));
    m.def("estimate_half_strength_distance",
          &experiments::estimate_half_strength_distance, py::arg("d"),
          py::arg("amplitude"));
}
