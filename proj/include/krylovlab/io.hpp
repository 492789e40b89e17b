#pragma once

// JSON documents for models, solution reports, indicator polynomials and
// scalar measures.

#include <krylovlab/errors.hpp>
#include <krylovlab/measure_iso.hpp>
#include <krylovlab/operator_model.hpp>
#include <krylovlab/solvability.hpp>
#include <krylovlab/spectral_projection.hpp>

#include <json.hpp>

#include <string>

namespace krylovlab {

using Json = nlohmann::json;

inline std::string conjugation_kind_name(Conjugation::Kind kind)
{
    return kind == Conjugation::Kind::diagonal ? "diagonal" : "haar_unitary";
}

/// {dim, entries: [{n, re, im, mult}], conjugation: {kind, seed}}.
inline Json model_to_json(const CompactNormalModel& model)
{
    Json entries = Json::array();
    for (const auto& e : model.spectrum().entries())
        entries.push_back({{"n", e.index}, {"re", e.value.real()}, {"im", e.value.imag()},
                           {"mult", e.multiplicity}});
    return {{"dim", model.dim()},
            {"entries", std::move(entries)},
            {"conjugation",
             {{"kind", conjugation_kind_name(model.conjugation().kind)},
              {"seed", model.conjugation().seed}}}};
}

/// Inverse of model_to_json; the spectrum is restored bit-for-bit and the
/// model is rebuilt with the canonical block layout.
inline CompactNormalModel model_from_json(const Json& doc)
{
    try {
        std::vector<SpectrumEntry> entries;
        for (const auto& e : doc.at("entries"))
            entries.push_back(SpectrumEntry{e.at("n").get<SpectralIndex>(),
                                            Complex(e.at("re").get<double>(), e.at("im").get<double>()),
                                            e.at("mult").get<int>()});
        SpectrumSpec spectrum(std::move(entries));
        if (doc.at("dim").get<Index>() != spectrum.dim())
            throw ValidationError("dim does not match the sum of multiplicities");
        const auto& conj = doc.at("conjugation");
        const auto kind = conj.at("kind").get<std::string>();
        Conjugation c;
        if (kind == "haar_unitary")
            c.kind = Conjugation::Kind::haar_unitary;
        else if (kind != "diagonal")
            throw ValidationError("unknown conjugation kind '" + kind + "'");
        c.seed = conj.value("seed", std::uint64_t{0});
        return build_model(spectrum, c);
    } catch (const Json::exception& ex) {
        throw ValidationError(std::string("malformed model document: ") + ex.what());
    }
}

/// Scalar certificates of a solution report (the vector itself is omitted).
inline Json report_to_json(const KrylovSolutionReport& report)
{
    return {{"residual", report.residual},
            {"norm", report.norm},
            {"kernel_component", report.kernel_component},
            {"distance_in_krylov", report.distance_in_krylov},
            {"active_indices", report.active_indices},
            {"status", "solved"},
            {"warnings", report.warnings}};
}

/// {degree, coeffs: [[re, im], ...], sup_error}.
inline Json polynomial_to_json(const IndicatorPolynomial& p)
{
    Json coeffs = Json::array();
    for (const auto& c : p.coefficients)
        coeffs.push_back({c.real(), c.imag()});
    return {{"degree", p.degree()}, {"coeffs", std::move(coeffs)}, {"sup_error", p.sup_error}};
}

/// {atoms: [{re, im, weight}], total_mass}.
inline Json measure_to_json(const ScalarMeasure& mu)
{
    Json atoms = Json::array();
    for (const auto& a : mu.atoms)
        atoms.push_back({{"re", a.point.real()}, {"im", a.point.imag()}, {"weight", a.weight}});
    return {{"atoms", std::move(atoms)}, {"total_mass", mu.total_mass()}};
}

} // namespace krylovlab
