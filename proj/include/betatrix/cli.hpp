#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "betatrix/ensembles.hpp"
#include "betatrix/error.hpp"
#include "betatrix/io.hpp"
#include "betatrix/montecarlo.hpp"
#include "betatrix/spectral.hpp"
#include "betatrix/symbolic.hpp"
#include "betatrix/verify.hpp"

namespace betatrix::cli {

enum ExitCode : int { kSuccess = 0, kCheckFailure = 1, kParameterError = 2, kResourceCap = 3 };

inline constexpr const char* kSeedEnv = "BETATRIX_SEED";

namespace detail {

enum class SampleEnsemble { hermite, laguerre, goe, gue };

inline const std::map<std::string, SampleEnsemble> kSampleEnsembles{{"hermite", SampleEnsemble::hermite},
                                                                    {"laguerre", SampleEnsemble::laguerre},
                                                                    {"goe", SampleEnsemble::goe},
                                                                    {"gue", SampleEnsemble::gue}};

inline const std::map<std::string, EnsembleKind> kMomentEnsembles{{"hermite", EnsembleKind::hermite},
                                                                  {"laguerre", EnsembleKind::laguerre}};

/// Shared by `sample` and `density`.
struct EnsembleOptions {
    SampleEnsemble ensemble = SampleEnsemble::hermite;
    double beta = 2.0;
    std::optional<std::size_t> n;
    std::optional<std::size_t> m;
    std::optional<double> a;
    std::size_t count = 1;
    std::uint64_t seed = 0;

    std::size_t size() const {
        if (ensemble == SampleEnsemble::laguerre) {
            if (m)
                return *m;
            if (n)
                return *n;
            throw ParameterError("laguerre needs --m");
        }
        if (!n)
            throw ParameterError("this ensemble needs --n");
        return *n;
    }

    LaguerreParams laguerre() const {
        if (!a)
            throw ParameterError("laguerre needs --a");
        LaguerreParams p{beta, size(), *a};
        p.validate();
        return p;
    }

    HermiteParams hermite() const {
        HermiteParams p{beta, size()};
        p.validate();
        return p;
    }

    void validate() const {
        if (count < 1)
            throw ParameterError("--count must be at least 1");
        switch (ensemble) {
        case SampleEnsemble::hermite: hermite(); break;
        case SampleEnsemble::laguerre: laguerre(); break;
        case SampleEnsemble::goe:
        case SampleEnsemble::gue:
            if (size() < 1)
                throw ParameterError("--n must be at least 1");
            break;
        }
    }

    Json params() const {
        Json j = {{"beta", beta}, {"count", count}};
        for (const auto& [name, kind] : kSampleEnsembles)
            if (kind == ensemble)
                j["ensemble"] = name;
        if (n)
            j["n"] = *n;
        if (m)
            j["m"] = *m;
        if (a)
            j["a"] = *a;
        return j;
    }
};

inline void add_ensemble_options(CLI::App& cmd, EnsembleOptions& o) {
    cmd.add_option("--ensemble", o.ensemble, "hermite | laguerre | goe | gue")
        ->required()
        ->transform(CLI::CheckedTransformer(kSampleEnsembles, CLI::ignore_case));
    cmd.add_option("--beta", o.beta, "Dyson index (hermite, laguerre)")->capture_default_str();
    cmd.add_option("--n", o.n, "Matrix size");
    cmd.add_option("--m", o.m, "Laguerre size");
    cmd.add_option("--a", o.a, "Laguerre parameter, must exceed (beta/2)(m-1)");
    cmd.add_option("--count", o.count, "Number of samples")->capture_default_str();
    cmd.add_option("--seed", o.seed, "Master seed")->envname(kSeedEnv)->capture_default_str();
}

/// Sample `index` of a run: one stream per index, so output does not depend
/// on how the work is split.
inline TridiagonalSym draw_tridiagonal(const EnsembleOptions& o, std::size_t index) {
    RandomStream stream(o.seed, index);
    switch (o.ensemble) {
    case SampleEnsemble::hermite: return sample_hermite(o.hermite(), stream);
    case SampleEnsemble::laguerre: return sample_laguerre(o.laguerre(), stream);
    case SampleEnsemble::goe:
    case SampleEnsemble::gue: {
        const auto kind = o.ensemble == SampleEnsemble::goe ? DenseKind::goe : DenseKind::gue;
        const auto dense = sample_dense_classical(kind, o.size(), stream);
        return std::visit([](const auto& mat) { return householder_tridiagonalize(mat); }, dense);
    }
    }
    throw ParameterError("unknown ensemble");
}

/// Runs body(i) for i in [0, count) on `workers` threads.
template <class Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
    workers = std::clamp<std::size_t>(workers, 1, count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < count; i = next++)
                        body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    next = count;
                }
            });
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

/// Writes to --out when given, otherwise to the command's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}

    std::vector<std::string> outputs() const {
        return path_.empty() ? std::vector<std::string>{} : std::vector<std::string>{path_};
    }

    void write(const std::string& payload) {
        if (path_.empty()) {
            fallback_ << payload;
            return;
        }
        std::ofstream file(path_, std::ios::binary);
        if (!file)
            throw InputError("cannot open output file '" + path_ + "'");
        file << payload;
        if (!file)
            throw InputError("failed writing '" + path_ + "'");
    }

private:
    std::string path_;
    std::ostream& fallback_;
};

inline RunRecord make_record(std::string command, Json params, std::uint64_t seed, const Sink& sink,
                             const Stopwatch& clock) {
    RunRecord r;
    r.command = std::move(command);
    r.params = std::move(params);
    r.seed = seed;
    r.outputs = sink.outputs();
    r.wall_time_seconds = clock.seconds();
    return r;
}

inline Json read_json_file(const std::string& path, std::istream& stdin_stream) {
    try {
        if (path == "-")
            return Json::parse(stdin_stream);
        std::ifstream file(path);
        if (!file)
            throw InputError("cannot open input file '" + path + "'");
        return Json::parse(file);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

// --- sample ------------------------------------------------------------------

struct SampleCommand {
    EnsembleOptions ens;
    bool eigenvalues = false;
    bool tridiagonal = false;
    std::string format = "json";
    std::string out;

    void run(std::ostream& stdout_stream) const {
        const Stopwatch clock;
        ens.validate();
        if (format == "csv" && !eigenvalues)
            throw ParameterError("--format csv writes eigenvalue rows; add --eigenvalues");
        const bool emit_factor = ens.ensemble == SampleEnsemble::laguerre && !tridiagonal && !eigenvalues;

        Json rows = Json::array();
        std::vector<std::vector<double>> spectra;
        for (std::size_t i = 0; i < ens.count; ++i) {
            if (emit_factor) {
                RandomStream stream(ens.seed, i);
                rows.push_back(to_json(sample_laguerre_factor(ens.laguerre(), stream)));
                continue;
            }
            const TridiagonalSym t = draw_tridiagonal(ens, i);
            if (eigenvalues)
                spectra.push_back(betatrix::eigenvalues(t));
            else
                rows.push_back(to_json(t));
        }

        Sink sink(out, stdout_stream);
        RunRecord record = make_record("sample", ens.params(), ens.seed, sink, clock);
        record.params["eigenvalues"] = eigenvalues;
        record.params["tridiagonal"] = tridiagonal;
        record.params["format"] = format;

        std::ostringstream payload;
        if (format == "csv") {
            write_csv_header(payload, record);
            for (const auto& row : spectra)
                write_csv_row(payload, row);
        } else {
            Json doc = {{"run", to_json(record)}};
            if (eigenvalues)
                doc["eigenvalues"] = spectra;
            else
                doc["samples"] = rows;
            payload << doc.dump() << '\n';
        }
        sink.write(payload.str());
    }
};

// --- spectrum ----------------------------------------------------------------

struct SpectrumCommand {
    std::string in = "-";
    std::string method = "bisection";
    std::string out;

    void run(std::istream& stdin_stream, std::ostream& stdout_stream) const {
        const Stopwatch clock;
        const Json input = read_json_file(in, stdin_stream);
        std::vector<Json> records;
        if (input.is_array())
            records.assign(input.begin(), input.end());
        else if (input.is_object() && input.contains("samples") && input.at("samples").is_array())
            records.assign(input.at("samples").begin(), input.at("samples").end());
        else
            records.push_back(input);
        if (records.empty())
            throw InputError("no matrices in input");

        const EigenMethod eig = method == "ql" ? EigenMethod::ql : EigenMethod::bisection;
        Json spectra = Json::array();
        for (const auto& rec : records) {
            const TridiagonalSym t = std::visit(
                [](const auto& mat) -> TridiagonalSym {
                    if constexpr (std::is_same_v<std::decay_t<decltype(mat)>, BidiagonalPos>)
                        return laguerre_from_factor(mat);
                    else
                        return mat;
                },
                matrix_from_json(rec));
            spectra.push_back(to_json(spectrum(t, eig)));
        }

        Sink sink(out, stdout_stream);
        RunRecord record = make_record("spectrum", {{"in", in}, {"method", method}}, 0, sink, clock);
        sink.write(Json{{"run", to_json(record)}, {"spectra", spectra}}.dump() + "\n");
    }
};

// --- verify ------------------------------------------------------------------

struct VerifyCommand {
    std::string suite = "all";
    VerifyOptions options;
    std::optional<double> beta;
    std::optional<std::size_t> n;
    std::string out;

    int run(std::ostream& stdout_stream) {
        const Stopwatch clock;
        const Suite which = parse_suite(suite);
        options.beta = beta;
        options.n = n;
        if (options.workers < 1)
            throw ParameterError("--workers must be at least 1");
        const Report report = run_suite(which, options);

        Json params = {{"suite", suite}, {"quick", options.quick}, {"workers", options.workers}};
        if (beta)
            params["beta"] = *beta;
        if (n)
            params["n"] = *n;
        Sink sink(out, stdout_stream);
        RunRecord record = make_record("verify", params, options.seed, sink, clock);
        Json doc = to_json(report);
        doc["run"] = to_json(record);
        sink.write(doc.dump(2) + "\n");
        return report.all_pass() ? kSuccess : kCheckFailure;
    }
};

// --- moments -----------------------------------------------------------------

struct MomentsCommand {
    EnsembleKind ensemble = EnsembleKind::hermite;
    std::optional<std::size_t> n;
    std::optional<std::size_t> m;
    std::optional<unsigned> det_power;
    std::optional<unsigned> esym;
    bool charpoly = false;
    std::optional<double> beta;
    std::optional<double> a;
    std::size_t cap = kDefaultMonomialCap;
    std::string format = "json";
    std::string out;

    std::size_t size() const {
        if (auto s = ensemble == EnsembleKind::laguerre ? (m ? m : n) : n)
            return *s;
        throw ParameterError(ensemble == EnsembleKind::laguerre ? "laguerre needs --m" : "hermite needs --n");
    }

    void run(std::ostream& stdout_stream) const {
        const Stopwatch clock;
        const int targets = (det_power ? 1 : 0) + (esym ? 1 : 0) + (charpoly ? 1 : 0);
        if (targets != 1)
            throw ParameterError("choose exactly one of --det-power, --esym, --charpoly");
        if (beta && !(*beta > 0.0))
            throw ParameterError("--beta must be positive");
        if (beta && ensemble == EnsembleKind::laguerre && !a)
            throw ParameterError("evaluating a Laguerre moment needs --a as well as --beta");
        const std::size_t sz = size();
        if (beta && ensemble == EnsembleKind::laguerre)
            LaguerreParams{*beta, sz, *a}.validate();

        // s = beta/2 is the polynomial variable; a is only meaningful for Laguerre.
        const double s_value = beta.value_or(0.0) / 2.0;
        const double a_value = a.value_or(0.0);

        Json result;
        std::string text;
        Json params = {{"ensemble", ensemble == EnsembleKind::hermite ? "hermite" : "laguerre"},
                       {"size", sz},
                       {"cap", cap}};
        if (charpoly) {
            params["target"] = "charpoly";
            const ExpectedCharPoly p = expected_charpoly(ensemble, sz, cap);
            result = to_json(p);
            text = p.to_string();
            if (beta) {
                std::vector<double> values;
                for (const auto& c : p.coefficients)
                    values.push_back(c.evaluate(s_value, a_value));
                result["value"] = values;
            }
        } else {
            MomentQuery q{ensemble, sz, {}};
            BetaPoly p;
            if (det_power) {
                params["target"] = "det_power";
                params["k"] = *det_power;
                q.target = DeterminantPower{*det_power};
                p = det_moment(q, cap);
            } else {
                params["target"] = "esym";
                params["i"] = *esym;
                q.target = ElementarySymmetric{*esym};
                p = expected_elementary_symmetric(q, cap);
            }
            result = {{"polynomial", to_json(p)}, {"text", p.to_string()}};
            text = p.to_string();
            if (beta)
                result["value"] = p.evaluate(s_value, a_value);
        }
        if (beta)
            params["beta"] = *beta;
        if (a)
            params["a"] = *a;

        Sink sink(out, stdout_stream);
        if (format == "text") {
            std::string line = text;
            if (beta && result["value"].is_number())
                line = format_double(result["value"].get<double>());
            sink.write(line + "\n");
            return;
        }
        RunRecord record = make_record("moments", params, 0, sink, clock);
        result["run"] = to_json(record);
        sink.write(result.dump() + "\n");
    }
};

// --- density -----------------------------------------------------------------

struct DensityCommand {
    EnsembleOptions ens;
    std::size_t bins = 50;
    std::size_t workers = 1;
    std::optional<double> lo;
    std::optional<double> hi;
    std::string out;

    static constexpr std::size_t kMaxPooled = 50'000'000;

    void run(std::ostream& stdout_stream) const {
        const Stopwatch clock;
        ens.validate();
        if (bins < 1)
            throw ParameterError("--bins must be at least 1");
        if (lo.has_value() != hi.has_value() || (lo && !(*lo < *hi)))
            throw ParameterError("--lo and --hi must be given together with lo < hi");
        if (ens.count * ens.size() > kMaxPooled)
            throw ResourceError("density: pooled eigenvalue count exceeds " + std::to_string(kMaxPooled),
                                ens.count * ens.size());

        std::vector<std::vector<double>> spectra(ens.count);
        parallel_for(ens.count, workers,
                     [&](std::size_t i) { spectra[i] = betatrix::eigenvalues(draw_tridiagonal(ens, i)); });

        double left = std::numeric_limits<double>::infinity();
        double right = -left;
        for (const auto& s : spectra)
            for (double x : s) {
                left = std::min(left, x);
                right = std::max(right, x);
            }
        if (lo) {
            left = *lo;
            right = *hi;
        } else if (!(left < right)) {
            left -= 0.5;
            right += 0.5;
        }
        const double width = (right - left) / static_cast<double>(bins);

        std::vector<std::size_t> counts(bins, 0);
        std::size_t total = 0;
        for (const auto& s : spectra)
            for (double x : s) {
                if (x < left || x > right)
                    continue;
                const auto k = static_cast<std::size_t>((x - left) / width);
                ++counts[std::min(k, bins - 1)];
                ++total;
            }

        Sink sink(out, stdout_stream);
        RunRecord record = make_record("density", ens.params(), ens.seed, sink, clock);
        record.params["bins"] = bins;
        record.params["workers"] = workers;
        if (lo) {
            record.params["lo"] = *lo;
            record.params["hi"] = *hi;
        }

        std::ostringstream payload;
        write_csv_header(payload, record);
        payload << "bin_left,bin_right,count,density\n";
        for (std::size_t k = 0; k < bins; ++k) {
            const double bl = left + width * static_cast<double>(k);
            const double br = k + 1 == bins ? right : left + width * static_cast<double>(k + 1);
            const double density =
                total ? static_cast<double>(counts[k]) / (static_cast<double>(total) * width) : 0.0;
            payload << format_double(bl) << ',' << format_double(br) << ',' << counts[k] << ','
                    << format_double(density) << '\n';
        }
        sink.write(payload.str());
    }
};

} // namespace detail

/// Entry point shared by the executable and the tests. Returns the process
/// exit code; diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr, std::istream& in = std::cin) {
    CLI::App app{"Tridiagonal and bidiagonal beta-ensemble sampler and verifier", "betatrix"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    detail::SampleCommand sample;
    auto* sample_cmd = app.add_subcommand("sample", "Draw random matrices or their eigenvalues");
    detail::add_ensemble_options(*sample_cmd, sample.ens);
    sample_cmd->add_flag("--eigenvalues", sample.eigenvalues, "Emit eigenvalues instead of matrices");
    sample_cmd->add_flag("--tridiagonal", sample.tridiagonal, "For laguerre, emit T = B B^T instead of B");
    sample_cmd->add_option("--format", sample.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sample_cmd->add_option("--out", sample.out, "Output file (default stdout)");

    detail::SpectrumCommand spectrum_job;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Eigenvalues and eigenvector first rows of matrix JSON");
    spectrum_cmd->add_option("--in", spectrum_job.in, "Input file, '-' for stdin")->capture_default_str();
    spectrum_cmd->add_option("--method", spectrum_job.method)->check(CLI::IsMember({"bisection", "ql"}))->capture_default_str();
    spectrum_cmd->add_option("--out", spectrum_job.out, "Output file (default stdout)");

    detail::VerifyCommand verify;
    std::vector<std::string> suite_names;
    for (const auto& [s, name] : kSuiteNames)
        suite_names.emplace_back(name);
    auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite and print a JSON report");
    verify_cmd->add_option("--suite", verify.suite)->check(CLI::IsMember(suite_names))->capture_default_str();
    verify_cmd->add_flag("--quick", verify.options.quick, "Ten times fewer samples, thresholds doubled");
    verify_cmd->add_option("--beta", verify.beta, "Restrict suites that sweep beta");
    verify_cmd->add_option("--n", verify.n, "Restrict suites that sweep size");
    verify_cmd->add_option("--seed", verify.options.seed)->envname(kSeedEnv)->capture_default_str();
    verify_cmd->add_option("--workers", verify.options.workers)->capture_default_str();
    verify_cmd->add_option("--out", verify.out, "Output file (default stdout)");

    detail::MomentsCommand moments;
    auto* moments_cmd = app.add_subcommand("moments", "Exact moments as polynomials in s = beta/2 and a");
    moments_cmd->add_option("--ensemble", moments.ensemble, "hermite | laguerre")
        ->required()
        ->transform(CLI::CheckedTransformer(detail::kMomentEnsembles, CLI::ignore_case));
    moments_cmd->add_option("--n", moments.n, "Matrix size");
    moments_cmd->add_option("--m", moments.m, "Laguerre size");
    moments_cmd->add_option("--det-power", moments.det_power, "E[det^k]");
    moments_cmd->add_option("--esym", moments.esym, "E[e_i(lambda)]");
    moments_cmd->add_flag("--charpoly", moments.charpoly, "E[det(yI - T)]");
    moments_cmd->add_option("--beta", moments.beta, "Evaluate at this beta");
    moments_cmd->add_option("--a", moments.a, "Evaluate at this Laguerre parameter");
    moments_cmd->add_option("--cap", moments.cap, "Monomial budget")->capture_default_str();
    moments_cmd->add_option("--format", moments.format)->check(CLI::IsMember({"json", "text"}))->capture_default_str();
    moments_cmd->add_option("--out", moments.out, "Output file (default stdout)");

    detail::DensityCommand density;
    auto* density_cmd = app.add_subcommand("density", "Histogram of pooled eigenvalues as CSV");
    detail::add_ensemble_options(*density_cmd, density.ens);
    density_cmd->add_option("--bins", density.bins)->capture_default_str();
    density_cmd->add_option("--workers", density.workers)->capture_default_str();
    density_cmd->add_option("--lo", density.lo, "Left end of the histogram range");
    density_cmd->add_option("--hi", density.hi, "Right end of the histogram range");
    density_cmd->add_option("--out", density.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kParameterError;
    }

    try {
        if (*sample_cmd)
            sample.run(out);
        else if (*spectrum_cmd)
            spectrum_job.run(in, out);
        else if (*verify_cmd)
            return verify.run(out);
        else if (*moments_cmd)
            moments.run(out);
        else if (*density_cmd)
            density.run(out);
        return kSuccess;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << '\n';
        return kResourceCap;
    } catch (const QuadratureError& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kParameterError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailure;
    }
}

} // namespace betatrix::cli
