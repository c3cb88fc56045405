#include <clocale>
#include <cstdlib>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "betatrix/io.hpp"

namespace {

using namespace betatrix;

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-2.5), "-2.5");
    EXPECT_EQ(format_double(1e-300), "1e-300");
    RandomStream s(1, 0);
    for (int i = 0; i < 1000; ++i) {
        const double x = gaussian(s) * std::exp(10.0 * gaussian(s));
        EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
    }
}

TEST(Csv, RowUsesCommasAndPointDecimal) {
    std::ostringstream out;
    const std::vector<double> row{1.5, -0.25, 3.0};
    write_csv_row(out, row);
    EXPECT_EQ(out.str(), "1.5,-0.25,3\n");
}

TEST(MatrixJson, TridiagonalRoundTrip) {
    const TridiagonalSym t({0.1, -2.0, 1e-17}, {0.3, 4.5});
    const Json j = Json::parse(to_json(t).dump());
    EXPECT_EQ(j.at("kind"), "tridiagonal");
    const auto back = std::get<TridiagonalSym>(matrix_from_json(j));
    EXPECT_EQ(back.diag, t.diag);
    EXPECT_EQ(back.subdiag, t.subdiag);
}

TEST(MatrixJson, BidiagonalRoundTrip) {
    const BidiagonalPos b({1.0, 2.0}, {0.5});
    const auto back = std::get<BidiagonalPos>(matrix_from_json(Json::parse(to_json(b).dump())));
    EXPECT_EQ(back.diag, b.diag);
    EXPECT_EQ(back.subdiag, b.subdiag);
}

TEST(MatrixJson, RejectsMalformedInput) {
    EXPECT_THROW(matrix_from_json(Json::parse(R"({"diag":[1],"subdiag":[]})")), InputError);
    EXPECT_THROW(matrix_from_json(Json::parse(R"({"kind":"dense","diag":[1],"subdiag":[]})")), InputError);
    EXPECT_THROW(matrix_from_json(Json::parse(R"({"kind":"tridiagonal","diag":[1,2],"subdiag":[]})")), InputError);
    EXPECT_THROW(matrix_from_json(Json::parse(R"({"kind":"tridiagonal","diag":[1,"x"],"subdiag":[1]})")), InputError);
    EXPECT_THROW(matrix_from_json(Json::parse(R"({"kind":"tridiagonal","diag":[],"subdiag":[]})")), InputError);
    EXPECT_THROW(matrix_from_json(Json::parse("[1,2]")), InputError);
}

TEST(PolynomialJson, RoundTripsExactCoefficients) {
    const BetaPoly p = BetaPoly::monomial(2, 0, Rational(-7, 3)) + BetaPoly::monomial(0, 1, Rational(5)) +
                       BetaPoly::constant(Rational(BigInt("123456789012345678901234567890"), BigInt(11)));
    const Json j = to_json(p);
    EXPECT_EQ(j.at("vars"), Json({"s", "a"}));
    EXPECT_EQ(beta_poly_from_json(Json::parse(j.dump())), p);
}

TEST(PolynomialJson, ZeroHasNoTerms) {
    EXPECT_TRUE(to_json(BetaPoly{}).at("terms").empty());
}

TEST(ReportJson, NamedChecks) {
    Report r;
    r.checks.push_back({"a/b", 0.01, 0.02, true, 100, 9, ""});
    r.checks.push_back({"c", 3.0, 1.0, false, 0, 0, "why"});
    const Json j = to_json(r);
    EXPECT_FALSE(j.at("pass").get<bool>());
    EXPECT_EQ(j.at("failures"), 1);
    const Json& first = j.at("checks").at(0);
    for (const char* field : {"name", "statistic", "threshold", "pass", "sample_count", "seed"})
        EXPECT_TRUE(first.contains(field)) << field;
    EXPECT_EQ(j.at("checks").at(1).at("detail"), "why");
}

TEST(RunRecord, CarriesProvenance) {
    RunRecord r;
    r.command = "sample";
    r.params = {{"n", 3}};
    r.seed = 17;
    r.outputs = {"out.json"};
    const Json j = to_json(r);
    EXPECT_EQ(j.at("version"), std::string(kVersion));
    EXPECT_EQ(j.at("seed"), 17);
    EXPECT_EQ(j.at("outputs").at(0), "out.json");
    std::ostringstream csv;
    write_csv_header(csv, r);
    EXPECT_EQ(csv.str().rfind("# run: {", 0), 0u);
}

} // namespace
