#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "betatrix/cli.hpp"

namespace {

using betatrix::Json;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args, const std::string& input = "") {
    args.insert(args.begin(), "betatrix");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    std::istringstream in(input);
    const int code = betatrix::cli::run(static_cast<int>(argv.size()), argv.data(), out, err, in);
    return {code, out.str(), err.str()};
}

/// Everything except the first line, which holds the run record.
std::string csv_payload(const std::string& text) { return text.substr(text.find('\n') + 1); }

std::vector<std::vector<double>> parse_csv(const std::string& body) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(body);
    for (std::string line; std::getline(lines, line);) {
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<double> row;
        std::istringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');)
            row.push_back(std::strtod(cell.c_str(), nullptr));
        rows.push_back(row);
    }
    return rows;
}

TEST(Cli, SampleHermiteWritesTridiagonalRecords) {
    const auto r = run({"sample", "--ensemble", "hermite", "--beta", "2", "--n", "4", "--count", "2", "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json doc = Json::parse(r.out);
    ASSERT_EQ(doc.at("samples").size(), 2u);
    for (const auto& rec : doc.at("samples")) {
        EXPECT_EQ(rec.at("kind"), "tridiagonal");
        EXPECT_EQ(rec.at("diag").size(), 4u);
        EXPECT_EQ(rec.at("subdiag").size(), 3u);
    }
    EXPECT_EQ(doc.at("run").at("seed"), 7);
    EXPECT_EQ(doc.at("run").at("command"), "sample");
}

TEST(Cli, SampleIsReproducible) {
    const std::vector<std::string> args{"sample", "--ensemble", "gue", "--n", "5", "--count", "3", "--seed", "11"};
    const Json a = Json::parse(run(args).out);
    const Json b = Json::parse(run(args).out);
    EXPECT_EQ(a.at("samples").dump(), b.at("samples").dump());
}

TEST(Cli, SampleLaguerreEigenvaluesCsv) {
    const auto r = run({"sample", "--ensemble", "laguerre", "--beta", "1", "--m", "3", "--a", "1.7", "--eigenvalues",
                        "--format", "csv", "--count", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("# run: ", 0), 0u);
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 5u);
    for (const auto& row : rows) {
        ASSERT_EQ(row.size(), 3u);
        for (double x : row)
            EXPECT_GT(x, 0.0);
    }
}

TEST(Cli, SampleLaguerreDefaultsToBidiagonalFactor) {
    const auto r = run({"sample", "--ensemble", "laguerre", "--beta", "2", "--m", "3", "--a", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out).at("samples").at(0).at("kind"), "bidiagonal");
    const auto t = run({"sample", "--ensemble", "laguerre", "--beta", "2", "--m", "3", "--a", "4", "--tridiagonal"});
    EXPECT_EQ(Json::parse(t.out).at("samples").at(0).at("kind"), "tridiagonal");
}

TEST(Cli, InvalidLaguerreParameterExitsTwo) {
    const auto r = run({"sample", "--ensemble", "laguerre", "--beta", "1", "--m", "3", "--a", "1.0"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("must exceed"), std::string::npos);
}

TEST(Cli, UnknownFlagOrEnsembleExitsTwo) {
    EXPECT_EQ(run({"sample", "--ensemble", "wishart", "--n", "3"}).code, 2);
    EXPECT_EQ(run({"sample", "--ensemble", "hermite", "--n", "3", "--bogus"}).code, 2);
    EXPECT_EQ(run({"verify", "--suite", "nonsense"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, SeedFallsBackToEnvironment) {
    const std::vector<std::string> args{"sample", "--ensemble", "hermite", "--n", "3"};
    ::setenv(betatrix::cli::kSeedEnv, "1234", 1);
    const Json from_env = Json::parse(run(args).out);
    ::unsetenv(betatrix::cli::kSeedEnv);
    auto explicit_args = args;
    explicit_args.insert(explicit_args.end(), {"--seed", "1234"});
    const Json from_flag = Json::parse(run(explicit_args).out);
    EXPECT_EQ(from_env.at("run").at("seed"), 1234);
    EXPECT_EQ(from_env.at("samples").dump(), from_flag.at("samples").dump());
}

TEST(Cli, SpectrumReadsSampleOutput) {
    const auto sampled = run({"sample", "--ensemble", "laguerre", "--beta", "2", "--m", "4", "--a", "5", "--count", "2"});
    const auto r = run({"spectrum"}, sampled.out);
    ASSERT_EQ(r.code, 0) << r.err;
    const Json doc = Json::parse(r.out);
    ASSERT_EQ(doc.at("spectra").size(), 2u);
    const auto& q = doc.at("spectra").at(0).at("q");
    double norm = 0.0;
    for (const auto& v : q)
        norm += v.get<double>() * v.get<double>();
    EXPECT_NEAR(norm, 1.0, 1e-12);
    for (const auto& v : doc.at("spectra").at(0).at("lambda"))
        EXPECT_GT(v.get<double>(), 0.0);
}

TEST(Cli, SpectrumRejectsMalformedJson) {
    EXPECT_EQ(run({"spectrum"}, "{not json").code, 2);
    EXPECT_EQ(run({"spectrum"}, R"({"kind":"tridiagonal","diag":[1,2],"subdiag":[]})").code, 2);
}

TEST(Cli, MomentsHermiteText) {
    EXPECT_EQ(run({"moments", "--ensemble", "hermite", "--n", "2", "--det-power", "1", "--format", "text"}).out, "-s\n");
    EXPECT_EQ(run({"moments", "--ensemble", "hermite", "--n", "2", "--det-power", "2", "--format", "text"}).out,
              "s^2+s+1\n");
    EXPECT_EQ(run({"moments", "--ensemble", "hermite", "--n", "3", "--charpoly", "--format", "text"}).out,
              "y^3-3*s*y\n");
}

TEST(Cli, MomentsJsonIsExact) {
    const auto r = run({"moments", "--ensemble", "hermite", "--n", "2", "--det-power", "2"});
    ASSERT_EQ(r.code, 0);
    const Json doc = Json::parse(r.out);
    EXPECT_EQ(doc.at("text"), "s^2+s+1");
    EXPECT_EQ(betatrix::beta_poly_from_json(doc.at("polynomial")).to_string(), "s^2+s+1");
}

TEST(Cli, MomentsNumericEvaluation) {
    // s^2 + s + 1 at beta = 2 (s = 1)
    const Json doc = Json::parse(run({"moments", "--ensemble", "hermite", "--n", "2", "--det-power", "2", "--beta", "2"}).out);
    EXPECT_DOUBLE_EQ(doc.at("value").get<double>(), 3.0);
    const auto lag = run({"moments", "--ensemble", "laguerre", "--m", "2", "--det-power", "1", "--beta", "1"});
    EXPECT_EQ(lag.code, 2);
}

TEST(Cli, MomentsNeedsExactlyOneTarget) {
    EXPECT_EQ(run({"moments", "--ensemble", "hermite", "--n", "2"}).code, 2);
    EXPECT_EQ(run({"moments", "--ensemble", "hermite", "--n", "2", "--charpoly", "--det-power", "1"}).code, 2);
}

TEST(Cli, MomentsCapExitsThree) {
    const auto r = run({"moments", "--ensemble", "hermite", "--n", "6", "--det-power", "3", "--cap", "100"});
    EXPECT_EQ(r.code, 3);
}

TEST(Cli, DensityHonorsBinsAndNormalizes) {
    const auto r = run({"density", "--ensemble", "hermite", "--beta", "2", "--n", "20", "--count", "50", "--bins", "17",
                        "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(csv_payload(r.out));
    std::string header;
    std::getline(lines, header);
    EXPECT_EQ(header, "bin_left,bin_right,count,density");
    const auto rows = parse_csv(csv_payload(r.out).substr(header.size() + 1));
    ASSERT_EQ(rows.size(), 17u);
    double integral = 0.0, total = 0.0;
    for (const auto& row : rows) {
        integral += (row[1] - row[0]) * row[3];
        total += row[2];
    }
    EXPECT_NEAR(integral, 1.0, 1e-9);
    EXPECT_EQ(total, 20.0 * 50.0);
}

TEST(Cli, DensityIsReproducibleAcrossWorkers) {
    const std::vector<std::string> base{"density", "--ensemble", "laguerre", "--beta", "1.5", "--m", "6",
                                        "--a",     "6",         "--count",    "40",     "--seed", "21"};
    auto one = base, four = base;
    one.insert(one.end(), {"--workers", "1"});
    four.insert(four.end(), {"--workers", "4"});
    EXPECT_EQ(csv_payload(run(base).out), csv_payload(run(one).out));
    EXPECT_EQ(csv_payload(run(one).out), csv_payload(run(four).out));
}

TEST(Cli, OutFileIsRecordedInRunRecord) {
    const auto path = std::filesystem::temp_directory_path() / "betatrix_cli_test_density.csv";
    const auto r = run({"density", "--ensemble", "goe", "--n", "6", "--count", "10", "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream file(path);
    std::string first;
    std::getline(file, first);
    const Json record = Json::parse(first.substr(std::string("# run: ").size()));
    EXPECT_EQ(record.at("outputs").at(0), path.string());
    EXPECT_EQ(record.at("command"), "density");
    std::filesystem::remove(path);
}

TEST(Cli, VerifyVandermondePasses) {
    const auto r = run({"verify", "--suite", "vandermonde", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json doc = Json::parse(r.out);
    EXPECT_TRUE(doc.at("pass").get<bool>());
    EXPECT_EQ(doc.at("run").at("seed"), 3);
    EXPECT_FALSE(doc.at("checks").empty());
}

TEST(Cli, VerifyQdistRestrictsToRequestedPoint) {
    const auto r = run({"verify", "--suite", "qdist", "--beta", "0.5", "--n", "5", "--quick"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json doc = Json::parse(r.out);
    // one KS value per coordinate plus the correlation check
    EXPECT_EQ(doc.at("checks").size(), 6u);
    for (const auto& c : doc.at("checks"))
        EXPECT_NE(c.at("name").get<std::string>().find("beta=0.5/n=5"), std::string::npos);
}

TEST(Cli, VersionAndHelpExitZero) {
    EXPECT_EQ(run({"--version"}).code, 0);
    EXPECT_EQ(run({"--help"}).code, 0);
}

} // namespace
