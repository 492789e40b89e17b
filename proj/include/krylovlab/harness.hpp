#pragma once

// JSON-configured certification suites: load, validate, run in parallel,
// emit report.csv / report.json and convergence curves.

#include <krylovlab/errors.hpp>
#include <krylovlab/io.hpp>
#include <krylovlab/krylov.hpp>
#include <krylovlab/measure_iso.hpp>
#include <krylovlab/operator_model.hpp>
#include <krylovlab/solvability.hpp>
#include <krylovlab/spectral_projection.hpp>

#include <json.hpp>

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace krylovlab {

enum class CheckKind {
    solution,
    structure,
    reducibility,
    minimal_norm,
    uniqueness,
    cyclicity,
    projection_quadrature,
    indicator_polynomial,
    measure,
    isometry,
    converse,
};

inline const std::vector<std::pair<CheckKind, std::string>>& check_names()
{
    static const std::vector<std::pair<CheckKind, std::string>> names{
        {CheckKind::solution, "solution"},
        {CheckKind::structure, "structure"},
        {CheckKind::reducibility, "reducibility"},
        {CheckKind::minimal_norm, "minimal_norm"},
        {CheckKind::uniqueness, "uniqueness"},
        {CheckKind::cyclicity, "cyclicity"},
        {CheckKind::projection_quadrature, "projection_quadrature"},
        {CheckKind::indicator_polynomial, "indicator_polynomial"},
        {CheckKind::measure, "measure"},
        {CheckKind::isometry, "isometry"},
        {CheckKind::converse, "converse"},
    };
    return names;
}

inline std::string check_name(CheckKind kind)
{
    for (const auto& [k, n] : check_names())
        if (k == kind)
            return n;
    throw InvalidArgument("unknown check kind");
}

inline std::optional<CheckKind> parse_check_name(const std::string& name)
{
    for (const auto& [k, n] : check_names())
        if (n == name)
            return k;
    return std::nullopt;
}

/// Default pass thresholds for every metric a check records. A metric
/// passes iff measured <= threshold.
inline const std::map<std::string, double>& default_thresholds()
{
    static const std::map<std::string, double> t{
        {"solution.residual", 1e-10},
        {"solution.krylov_distance", 1e-8},
        {"solution.kernel_component", 1e-12},
        {"solution.oracle", 1e-8},
        {"structure", 1e-8},
        {"reducibility", 1e-8},
        {"reducibility.invariance", 1e-8},
        {"minimal_norm", 1e-10},
        {"uniqueness", 1e-8},
        {"cyclicity", 0.0},
        {"projection_quadrature", 1e-10},
        {"indicator_polynomial", 1e-9},
        {"indicator_polynomial.dense_crosscheck", 1e-9},
        {"measure.mass", 1e-12},
        {"measure.moments", 1e-9},
        {"isometry", 1e-9},
        {"isometry.membership", 1e-8},
        {"converse", 1e-10},
        {"converse.reducibility", 1e-8},
    };
    return t;
}

struct OperatorSpec
{
    SpectrumFamily family = PowerDecay{1.0};
    int count = 1;
    int kernel_dim = 0;
    Conjugation::Kind conjugation = Conjugation::Kind::diagonal;
    std::uint64_t seed = 0;
};

struct DatumSpec
{
    enum class Kind { random, range, cyclic_proof_vector, eigenvector, custom };
    Kind kind = Kind::random;
    std::uint64_t seed = 0;
    SpectralIndex n = 1;
    std::vector<Complex> values;
};

struct ExperimentSpec
{
    std::string name;
    OperatorSpec op;
    DatumSpec datum;
    std::vector<CheckKind> checks;
    std::map<std::string, double> tolerances;
    int repetitions = 1;

    double threshold(const std::string& metric) const
    {
        if (auto it = tolerances.find(metric); it != tolerances.end())
            return it->second;
        return default_thresholds().at(metric);
    }
};

enum class Status { pass, fail, warn };

inline std::string status_name(Status s)
{
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::warn: return "warn";
    }
    return "fail";
}

struct ReportRecord
{
    std::string experiment;
    int repetition = 0;
    std::string check;
    double measured = 0.0;
    double threshold = 0.0;
    Status status = Status::fail;
    double wall_time = 0.0;
    std::string message;
};

struct Summary
{
    int pass = 0;
    int fail = 0;
    int warn = 0;
    friend bool operator==(const Summary&, const Summary&) = default;
};

// --- suite loading ---------------------------------------------------------

namespace detail {

inline void reject_unknown_keys(const Json& obj, const std::string& where,
                                std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        throw ValidationError(where + ": expected an object");
    for (const auto& [key, value] : obj.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ValidationError(where + "." + key + ": unknown key");
}

template <typename T>
T field(const Json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key))
        throw ValidationError(where + "." + key + ": required field missing");
    try {
        return obj.at(key).get<T>();
    } catch (const Json::exception&) {
        throw ValidationError(where + "." + key + ": wrong type");
    }
}

template <typename T>
T field_or(const Json& obj, const std::string& key, const std::string& where, T fallback)
{
    if (!obj.contains(key))
        return fallback;
    return field<T>(obj, key, where);
}

inline SpectrumFamily parse_family(const Json& j, const std::string& where)
{
    reject_unknown_keys(j, where, {"kind", "alpha", "rho", "r_min", "r_max"});
    const auto kind = field<std::string>(j, "kind", where);
    if (kind == "power_decay") {
        reject_unknown_keys(j, where, {"kind", "alpha"});
        const double alpha = field_or<double>(j, "alpha", where, 1.0);
        if (!(alpha > 0.0))
            throw ValidationError(where + ".alpha: must be positive");
        return PowerDecay{alpha};
    }
    if (kind == "exp_decay") {
        reject_unknown_keys(j, where, {"kind", "rho"});
        const double rho = field_or<double>(j, "rho", where, 0.5);
        if (!(rho > 0.0 && rho < 1.0))
            throw ValidationError(where + ".rho: must lie in (0, 1)");
        return ExpDecay{rho};
    }
    if (kind == "random_annulus") {
        reject_unknown_keys(j, where, {"kind", "r_min", "r_max"});
        const double lo = field_or<double>(j, "r_min", where, 0.1);
        const double hi = field_or<double>(j, "r_max", where, 1.0);
        if (!(lo > 0.0 && lo < hi))
            throw ValidationError(where + ": need 0 < r_min < r_max");
        return RandomAnnulus{lo, hi};
    }
    throw ValidationError(where + ".kind: unknown family '" + kind + "'");
}

inline OperatorSpec parse_operator(const Json& j, const std::string& where)
{
    reject_unknown_keys(j, where, {"family", "count", "kernel_dim", "conjugation", "seed"});
    OperatorSpec op;
    if (!j.contains("family"))
        throw ValidationError(where + ".family: required field missing");
    op.family = parse_family(j.at("family"), where + ".family");
    op.count = field<int>(j, "count", where);
    if (op.count < 1)
        throw ValidationError(where + ".count: must be at least 1");
    op.kernel_dim = field_or<int>(j, "kernel_dim", where, 0);
    if (op.kernel_dim < 0)
        throw ValidationError(where + ".kernel_dim: must be non-negative");
    const auto conj = field_or<std::string>(j, "conjugation", where, "diagonal");
    if (conj == "diagonal")
        op.conjugation = Conjugation::Kind::diagonal;
    else if (conj == "haar_unitary")
        op.conjugation = Conjugation::Kind::haar_unitary;
    else
        throw ValidationError(where + ".conjugation: expected 'diagonal' or 'haar_unitary'");
    op.seed = field_or<std::uint64_t>(j, "seed", where, 0);
    return op;
}

inline DatumSpec parse_datum(const Json& j, const std::string& where)
{
    reject_unknown_keys(j, where, {"kind", "seed", "n", "values"});
    DatumSpec d;
    const auto kind = field<std::string>(j, "kind", where);
    if (kind == "random" || kind == "range") {
        reject_unknown_keys(j, where, {"kind", "seed"});
        d.kind = kind == "random" ? DatumSpec::Kind::random : DatumSpec::Kind::range;
        d.seed = field_or<std::uint64_t>(j, "seed", where, 0);
    } else if (kind == "cyclic_proof_vector") {
        reject_unknown_keys(j, where, {"kind"});
        d.kind = DatumSpec::Kind::cyclic_proof_vector;
    } else if (kind == "eigenvector") {
        reject_unknown_keys(j, where, {"kind", "n"});
        d.kind = DatumSpec::Kind::eigenvector;
        d.n = field<int>(j, "n", where);
        if (d.n < 0)
            throw ValidationError(where + ".n: must be non-negative");
    } else if (kind == "custom") {
        reject_unknown_keys(j, where, {"kind", "values"});
        d.kind = DatumSpec::Kind::custom;
        if (!j.contains("values") || !j.at("values").is_array())
            throw ValidationError(where + ".values: expected an array of [re, im] pairs");
        for (const auto& v : j.at("values")) {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                throw ValidationError(where + ".values: expected [re, im] pairs");
            d.values.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
    } else {
        throw ValidationError(where + ".kind: unknown datum kind '" + kind + "'");
    }
    return d;
}

inline ExperimentSpec parse_experiment(const Json& j, const std::string& where)
{
    reject_unknown_keys(j, where,
                        {"name", "operator", "datum", "checks", "tolerances", "repetitions"});
    ExperimentSpec spec;
    spec.name = field<std::string>(j, "name", where);
    if (spec.name.empty())
        throw ValidationError(where + ".name: must be non-empty");
    if (!j.contains("operator"))
        throw ValidationError(where + ".operator: required field missing");
    spec.op = parse_operator(j.at("operator"), where + ".operator");
    if (!j.contains("datum"))
        throw ValidationError(where + ".datum: required field missing");
    spec.datum = parse_datum(j.at("datum"), where + ".datum");

    const auto checks = field<std::vector<std::string>>(j, "checks", where);
    if (checks.empty())
        throw ValidationError(where + ".checks: at least one check is required");
    for (const auto& c : checks) {
        const auto kind = parse_check_name(c);
        if (!kind)
            throw ValidationError(where + ".checks: unknown check '" + c + "'");
        if (std::find(spec.checks.begin(), spec.checks.end(), *kind) == spec.checks.end())
            spec.checks.push_back(*kind);
    }
    if (j.contains("tolerances")) {
        const auto& tol = j.at("tolerances");
        if (!tol.is_object())
            throw ValidationError(where + ".tolerances: expected an object");
        for (const auto& [key, value] : tol.items()) {
            if (!default_thresholds().contains(key))
                throw ValidationError(where + ".tolerances." + key + ": unknown metric");
            if (!value.is_number() || !(value.get<double>() >= 0.0))
                throw ValidationError(where + ".tolerances." + key +
                                      ": expected a non-negative number");
            spec.tolerances[key] = value.get<double>();
        }
    }
    spec.repetitions = field_or<int>(j, "repetitions", where, 1);
    if (spec.repetitions < 1)
        throw ValidationError(where + ".repetitions: must be at least 1");
    return spec;
}

inline std::string line_info(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace detail

/// Parses and validates a suite document {"experiments": [...]}.
inline std::vector<ExperimentSpec> parse_suite(const std::string& text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& ex) {
        throw ParseError(detail::line_info(text, ex.byte) + ": " + ex.what());
    }
    detail::reject_unknown_keys(doc, "suite", {"experiments"});
    if (!doc.contains("experiments") || !doc.at("experiments").is_array())
        throw ValidationError("suite.experiments: expected an array");
    std::vector<ExperimentSpec> specs;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.at("experiments").size(); ++i) {
        auto spec = detail::parse_experiment(doc.at("experiments")[i],
                                             "experiments[" + std::to_string(i) + "]");
        if (!seen.insert(spec.name).second)
            throw ValidationError("experiments[" + std::to_string(i) + "].name: duplicate name '" +
                                  spec.name + "'");
        specs.push_back(std::move(spec));
    }
    return specs;
}

inline std::vector<ExperimentSpec> load_suite(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open suite file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_suite(buffer.str());
}

inline std::vector<ExperimentSpec> filter_suite(std::vector<ExperimentSpec> specs,
                                                const std::string& glob)
{
    std::erase_if(specs, [&](const ExperimentSpec& s) {
        return fnmatch(glob.c_str(), s.name.c_str(), 0) != 0;
    });
    return specs;
}

// --- running ---------------------------------------------------------------

/// Seed of the stream (experiment, repetition, purpose); independent of
/// scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, const std::string& experiment, int repetition,
                                 std::string_view purpose)
{
    std::uint64_t h = fnv1a(experiment);
    h = fnv1a(purpose, h);
    return mix64(h ^ mix64(seed ^ mix64(static_cast<std::uint64_t>(repetition) + 1)));
}

inline CompactNormalModel make_model(const OperatorSpec& op, const std::string& experiment,
                                     int repetition)
{
    const auto spectrum = generate_spectrum(op.family, op.count, op.kernel_dim,
                                            derive_seed(op.seed, experiment, repetition, "spectrum"));
    const Conjugation conj =
        op.conjugation == Conjugation::Kind::diagonal
            ? Conjugation::diagonal()
            : Conjugation::haar(derive_seed(op.seed, experiment, repetition, "unitary"));
    return build_model(spectrum, conj);
}

inline Vector make_datum(const DatumSpec& datum, const CompactNormalModel& model,
                         const std::string& experiment, int repetition)
{
    switch (datum.kind) {
    case DatumSpec::Kind::random:
    case DatumSpec::Kind::range: {
        std::mt19937_64 rng(derive_seed(datum.seed, experiment, repetition, "datum"));
        Vector v = random_complex_vector(model.dim(), rng);
        return datum.kind == DatumSpec::Kind::range ? model.apply(v) : v;
    }
    case DatumSpec::Kind::cyclic_proof_vector:
        return cyclic_proof_vector(model);
    case DatumSpec::Kind::eigenvector: {
        const auto& cols = model.eigenprojection(datum.n).columns;
        if (cols.cols() == 0)
            throw IndexError("eigenspace " + std::to_string(datum.n) + " is trivial");
        return cols.col(0);
    }
    case DatumSpec::Kind::custom: {
        if (static_cast<Index>(datum.values.size()) != model.dim())
            throw DimensionError("custom datum has " + std::to_string(datum.values.size()) +
                                 " entries, model dimension is " + std::to_string(model.dim()));
        Vector v(model.dim());
        for (Index i = 0; i < v.size(); ++i)
            v(i) = datum.values[static_cast<std::size_t>(i)];
        return v;
    }
    }
    throw InvalidArgument("unknown datum kind");
}

/// A named measured value produced by a check.
struct Metric
{
    std::string name;
    double value = 0.0;
    std::string message;
    bool warn = false;
};

/// Curve data (header + rows) keyed by curve name.
using Curves = std::map<std::string, std::vector<std::pair<double, double>>>;

namespace detail {

inline double safe_ratio(double num, double den)
{
    return den > 0.0 ? num / den : num;
}

/// Split isolating the largest-modulus eigenvalue.
inline SpectrumSplit leading_split(const CompactNormalModel& model)
{
    const auto present = model.spectrum().present_indices();
    SpectralIndex lead = present.front();
    for (SpectralIndex n : present)
        if (n != 0) {
            lead = n;
            break;
        }
    return make_split(model, {lead});
}

inline std::vector<Metric> run_check(CheckKind kind, const ExperimentSpec& spec,
                                     const CompactNormalModel& model, const Vector& g, int rep,
                                     Curves& curves)
{
    const double anorm = model.norm();
    switch (kind) {
    case CheckKind::solution: {
        const auto report = krylov_solution(model, g);
        const double fn = report.norm;
        std::vector<Metric> m{
            {"solution.residual", safe_ratio(report.residual, anorm * fn), "", false},
            {"solution.krylov_distance", safe_ratio(report.distance_in_krylov, fn), "", false},
            {"solution.kernel_component", safe_ratio(report.kernel_component, fn), "", false},
        };
        if (!report.warnings.empty())
            for (auto& metric : m) {
                metric.warn = true;
                metric.message = report.warnings.front();
            }
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(model.dense());
        const Vector oracle = cod.solve(g);
        m.push_back({"solution.oracle", safe_ratio((oracle - report.solution).norm(), fn), "", false});
        if (fn > 0.0) {
            const auto basis = arnoldi_to_termination(model, g);
            auto& curve = curves["krylov_distance_vs_m"];
            for (Index k = 1; k <= basis.dim(); ++k)
                curve.emplace_back(static_cast<double>(k),
                                   distance_to_krylov(basis, report.solution, k) / fn);
        }
        return m;
    }
    case CheckKind::structure:
        return {{"structure", krylov_subspace_structure_check(model, g).max_angle, "", false}};
    case CheckKind::reducibility: {
        const auto basis = arnoldi_to_termination(model, g);
        const auto leaks = invariance_residuals(model, basis);
        return {{"reducibility", reducibility_residual(model, g), "", false},
                {"reducibility.invariance", std::max(leaks.range_leak, leaks.complement_leak), "",
                 false}};
    }
    case CheckKind::minimal_norm: {
        const auto report = krylov_solution(model, g);
        const auto out = minimal_norm_check(model, report, g, 100,
                                            derive_seed(0, spec.name, rep, "minimal_norm"));
        return {{"minimal_norm", out.passed ? out.deviation : std::max(out.deviation, 1.0),
                 out.passed ? "" : "perturbed solution violated a minimality condition", false}};
    }
    case CheckKind::uniqueness: {
        const auto report = krylov_solution(model, g);
        const auto out = uniqueness_check(model, g, report);
        std::string msg;
        if (!out.passed && out.deviation <= 1e-8)
            msg = "restricted operator is numerically singular";
        return {{"uniqueness", out.passed ? out.deviation : std::max(out.deviation, 1.0), msg,
                 false}};
    }
    case CheckKind::cyclicity: {
        const auto out = cyclicity_check(model);
        return {{"cyclicity", static_cast<double>(out.dim - out.krylov_dim),
                 "krylov dimension " + std::to_string(out.krylov_dim) + " of " +
                     std::to_string(out.dim),
                 false}};
    }
    case CheckKind::projection_quadrature: {
        const auto split = leading_split(model);
        const auto contour = auto_contour(model, split);
        const Vector exact = exact_projection_apply(model, split.sigma1, g);
        const auto result = riesz_projection_auto(model, contour, g);
        const double gn = g.norm();
        auto& curve = curves["quadrature_error_vs_K"];
        for (int k = 2; k <= result.nodes_per_circle; k *= 2) {
            auto c = contour;
            c.nodes_per_circle = k;
            curve.emplace_back(k, safe_ratio(
                                      (riesz_projection_quadrature(model, c, g) - exact).norm(), gn));
        }
        return {{"projection_quadrature", safe_ratio((result.value - exact).norm(), gn),
                 "nodes per circle " + std::to_string(result.nodes_per_circle), false}};
    }
    case CheckKind::indicator_polynomial: {
        const auto split = leading_split(model);
        const auto p = indicator_polynomial(model, split, Lagrange{});
        const auto err = projection_approx_error(model, p);
        return {{"indicator_polynomial", err.spectral, "degree " + std::to_string(p.degree()), false},
                {"indicator_polynomial.dense_crosscheck", std::abs(err.spectral - err.dense), "",
                 false}};
    }
    case CheckKind::measure: {
        const auto mu = scalar_measure(model, g);
        const double g2 = g.squaredNorm();
        const auto moments = gram_moment_check(model, g, 6);
        const double scale = g2 * std::max(1.0, std::pow(anorm, 12.0));
        return {{"measure.mass", safe_ratio(std::abs(mu.total_mass() - g2), g2), "", false},
                {"measure.moments", safe_ratio(moments.deviation, scale), "", false}};
    }
    case CheckKind::isometry: {
        const auto basis = arnoldi_to_termination(model, g);
        std::mt19937_64 rng(derive_seed(0, spec.name, rep, "isometry"));
        std::uniform_int_distribution<int> degree(0, 4);
        double iso = 0.0;
        double member = 0.0;
        for (int t = 0; t < 50; ++t) {
            const auto q = BivariatePolynomial::random(degree(rng), rng);
            const auto out = isometry_check(model, g, basis, q);
            iso = std::max(iso, out.isometry_deviation);
            member = std::max(member, out.membership);
        }
        return {{"isometry", iso, "", false}, {"isometry.membership", member, "", false}};
    }
    case CheckKind::converse: {
        const auto out = converse_criterion_check(model, g);
        return {{"converse", out.relative_deviation, "", false},
                {"converse.reducibility", out.reducibility, "", false}};
    }
    }
    throw InvalidArgument("unknown check");
}

inline std::vector<std::string> metric_names(CheckKind kind)
{
    const std::string base = check_name(kind);
    std::vector<std::string> out;
    for (const auto& [name, t] : default_thresholds())
        if (name == base || name.rfind(base + ".", 0) == 0)
            out.push_back(name);
    return out;
}

inline std::string sanitize(const std::string& s)
{
    std::string out;
    for (char c : s)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
    return out;
}

struct JobResult
{
    std::vector<ReportRecord> records;
    std::map<std::string, Curves> curves; // check name -> curves
};

inline JobResult run_job(const ExperimentSpec& spec, int rep)
{
    JobResult result;
    auto fail_all = [&](CheckKind kind, const std::string& message, double seconds) {
        for (const auto& metric : metric_names(kind))
            result.records.push_back({spec.name, rep, metric,
                                      std::numeric_limits<double>::quiet_NaN(),
                                      spec.threshold(metric), Status::fail, seconds, message});
    };

    std::optional<CompactNormalModel> model;
    Vector g;
    std::string setup_error;
    try {
        model.emplace(make_model(spec.op, spec.name, rep));
        g = make_datum(spec.datum, *model, spec.name, rep);
    } catch (const std::exception& ex) {
        setup_error = ex.what();
    }

    for (CheckKind kind : spec.checks) {
        if (!setup_error.empty()) {
            fail_all(kind, setup_error, 0.0);
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            Curves curves;
            auto metrics = run_check(kind, spec, *model, g, rep, curves);
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            for (auto& m : metrics) {
                const double threshold = spec.threshold(m.name);
                Status status = m.value <= threshold ? Status::pass : Status::fail;
                if (status == Status::pass && m.warn)
                    status = Status::warn;
                result.records.push_back(
                    {spec.name, rep, m.name, m.value, threshold, status, seconds, m.message});
            }
            if (!curves.empty())
                result.curves[check_name(kind)] = std::move(curves);
        } catch (const std::exception& ex) {
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            fail_all(kind, ex.what(), seconds);
        }
    }
    return result;
}

inline std::string format_double(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

struct SuiteResult
{
    Summary summary;
    std::vector<ReportRecord> records; // sorted by (experiment, repetition, check)
};

/// report.json: summary and records without wall times, so two runs of the
/// same suite produce identical bytes.
inline Json report_json(const SuiteResult& result)
{
    Json records = Json::array();
    for (const auto& r : result.records) {
        Json rec{{"experiment", r.experiment},
                 {"repetition", r.repetition},
                 {"check", r.check},
                 {"measured", std::isfinite(r.measured) ? Json(r.measured) : Json(nullptr)},
                 {"threshold", r.threshold},
                 {"status", status_name(r.status)}};
        if (!r.message.empty())
            rec["message"] = r.message;
        records.push_back(std::move(rec));
    }
    return {{"summary",
             {{"pass", result.summary.pass},
              {"fail", result.summary.fail},
              {"warn", result.summary.warn}}},
            {"records", std::move(records)}};
}

/// Runs every (experiment, repetition) pair on up to `parallelism` threads
/// and, when `out_dir` is non-empty, writes report.csv, report.json and
/// curves/*.csv there.
inline SuiteResult run_suite_detailed(const std::vector<ExperimentSpec>& specs, int parallelism,
                                      const std::filesystem::path& out_dir)
{
    if (parallelism < 1)
        throw InvalidArgument("parallelism must be at least 1");
    std::vector<std::pair<std::size_t, int>> jobs;
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (int r = 0; r < specs[i].repetitions; ++r)
            jobs.emplace_back(i, r);

    std::vector<detail::JobResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++)
            results[j] = detail::run_job(specs[jobs[j].first], jobs[j].second);
    };
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(parallelism), jobs.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    SuiteResult out;
    for (const auto& r : results)
        out.records.insert(out.records.end(), r.records.begin(), r.records.end());
    std::stable_sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.experiment, a.repetition, a.check) <
               std::tie(b.experiment, b.repetition, b.check);
    });
    for (const auto& r : out.records) {
        if (r.status == Status::pass)
            ++out.summary.pass;
        else if (r.status == Status::warn)
            ++out.summary.warn;
        else
            ++out.summary.fail;
    }

    if (out_dir.empty())
        return out;
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream csv(out_dir / "report.csv");
        if (!csv)
            throw Error("cannot write " + (out_dir / "report.csv").string());
        csv << "experiment,repetition,check,measured,threshold,status,wall_time_s\n";
        for (const auto& r : out.records)
            csv << detail::csv_escape(r.experiment) << ',' << r.repetition << ',' << r.check << ','
                << detail::format_double(r.measured) << ',' << detail::format_double(r.threshold)
                << ',' << status_name(r.status) << ',' << detail::format_double(r.wall_time)
                << '\n';
    }
    {
        std::ofstream json(out_dir / "report.json");
        if (!json)
            throw Error("cannot write " + (out_dir / "report.json").string());
        json << report_json(out).dump(2) << '\n';
    }
    const auto curve_dir = out_dir / "curves";
    for (std::size_t j = 0; j < jobs.size(); ++j)
        for (const auto& [check, curves] : results[j].curves)
            for (const auto& [name, points] : curves) {
                std::filesystem::create_directories(curve_dir);
                const auto file = curve_dir / (detail::sanitize(specs[jobs[j].first].name) + "__r" +
                                               std::to_string(jobs[j].second) + "__" + name + ".csv");
                std::ofstream csv(file);
                csv << "x,value\n";
                for (const auto& [x, y] : points)
                    csv << detail::format_double(x) << ',' << detail::format_double(y) << '\n';
            }
    return out;
}

inline Summary run_suite(const std::vector<ExperimentSpec>& specs, int parallelism,
                         const std::filesystem::path& out_dir)
{
    return run_suite_detailed(specs, parallelism, out_dir).summary;
}

/// The built-in showcase: one experiment per certified property.
inline const char* demo_suite_json()
{
    return R"({
  "experiments": [
    {
      "name": "krylov-solvability",
      "operator": {"family": {"kind": "power_decay", "alpha": 1.0}, "count": 63,
                   "kernel_dim": 1, "conjugation": "haar_unitary", "seed": 11},
      "datum": {"kind": "range", "seed": 1},
      "checks": ["solution", "minimal_norm", "uniqueness"],
      "repetitions": 3
    },
    {
      "name": "subspace-structure",
      "operator": {"family": {"kind": "random_annulus", "r_min": 0.1, "r_max": 1.0},
                   "count": 61, "kernel_dim": 3, "conjugation": "haar_unitary", "seed": 12},
      "datum": {"kind": "random", "seed": 2},
      "checks": ["structure"],
      "repetitions": 3
    },
    {
      "name": "reducibility",
      "operator": {"family": {"kind": "exp_decay", "rho": 0.5}, "count": 15,
                   "kernel_dim": 1, "conjugation": "haar_unitary", "seed": 13},
      "datum": {"kind": "random", "seed": 3},
      "checks": ["reducibility"],
      "repetitions": 3
    },
    {
      "name": "riesz-projection",
      "operator": {"family": {"kind": "power_decay", "alpha": 1.0}, "count": 8,
                   "kernel_dim": 0, "conjugation": "haar_unitary", "seed": 14},
      "datum": {"kind": "random", "seed": 4},
      "checks": ["projection_quadrature", "indicator_polynomial"],
      "repetitions": 3
    },
    {
      "name": "cyclicity",
      "operator": {"family": {"kind": "random_annulus", "r_min": 0.1, "r_max": 1.0},
                   "count": 63, "kernel_dim": 1, "conjugation": "haar_unitary", "seed": 15},
      "datum": {"kind": "cyclic_proof_vector"},
      "checks": ["cyclicity"],
      "repetitions": 3
    },
    {
      "name": "isomorphism",
      "operator": {"family": {"kind": "random_annulus", "r_min": 0.1, "r_max": 1.0},
                   "count": 30, "kernel_dim": 2, "conjugation": "haar_unitary", "seed": 16},
      "datum": {"kind": "random", "seed": 5},
      "checks": ["measure", "isometry", "converse"],
      "repetitions": 3
    }
  ]
})";
}

} // namespace krylovlab
