#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace ht::cli {
namespace {

using nlohmann::json;

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
    [[nodiscard]] json body() const { return json::parse(out); }
    [[nodiscard]] json error() const { return json::parse(err); }
};

std::string data(const std::string& name) { return std::string(HT_TEST_DATA_DIR) + "/" + name; }

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::vector<std::string> with_pair(std::vector<std::string> args, const std::string& p = "p3.json",
                                   const std::string& q = "q3.json") {
    args.insert(args.begin() + 1, {"--p", data(p), "--q", data(q)});
    return args;
}

TEST(Cli, DivergenceJson) {
    const auto o = invoke(with_pair({"divergence"}));
    ASSERT_EQ(o.code, kOk) << o.err;
    const auto j = o.body();
    EXPECT_NEAR(j["tv"].get<double>(), 0.5, 1e-15);
    EXPECT_GT(j["hellinger_sq"].get<double>(), 0.0);
    EXPECT_TRUE(o.err.empty());
}

TEST(Cli, DivergenceCsvRows) {
    const auto o = invoke(with_pair({"divergence", "--format", "csv"}));
    ASSERT_EQ(o.code, kOk);
    EXPECT_EQ(o.out.rfind("key,value\n", 0), 0U);
    EXPECT_NE(o.out.find("\ntv,0.5\n"), std::string::npos);
}

TEST(Cli, ExactPointMassBothOrders) {
    const auto fwd =
        invoke(with_pair({"exact-n", "--alpha", "0.25", "--delta", "0.05"}, "point_mass.csv", "bernoulli_0.1.csv"));
    ASSERT_EQ(fwd.code, kOk) << fwd.err;
    EXPECT_EQ(fwd.body()["n_star"].get<int>(), 26);
    EXPECT_FALSE(fwd.body()["exceeds_cap"].get<bool>());
    const auto bwd =
        invoke(with_pair({"exact-n", "--alpha", "0.25", "--delta", "0.05"}, "bernoulli_0.1.csv", "point_mass.csv"));
    EXPECT_EQ(bwd.body()["n_star"].get<int>(), 16);
}

TEST(Cli, ExactCapIsReported) {
    const auto o = invoke(with_pair({"exact-n", "--alpha", "0.25", "--delta", "0.05", "--cap", "10"}, "point_mass.csv",
                                    "bernoulli_0.1.csv"));
    ASSERT_EQ(o.code, kOk);
    EXPECT_TRUE(o.body()["exceeds_cap"].get<bool>());
    EXPECT_TRUE(o.body()["n_star"].is_null());
}

TEST(Cli, ExactPriorFree) {
    const auto o = invoke(with_pair({"exact-n", "--alpha", "0.05", "--beta", "0.1"}));
    ASSERT_EQ(o.code, kOk) << o.err;
    EXPECT_EQ(o.body()["problem"], "prior_free");
    EXPECT_GT(o.body()["n_star"].get<int>(), 0);
}

TEST(Cli, EstimateBoundsOrdered) {
    const auto o = invoke(with_pair({"estimate-n", "--alpha", "0.1", "--delta", "0.0125"}));
    ASSERT_EQ(o.code, kOk) << o.err;
    const auto j = o.body();
    EXPECT_LE(j["lower"].get<double>(), j["point"].get<double>());
    EXPECT_LE(j["point"].get<double>(), j["upper"].get<double>());
    EXPECT_EQ(j["regime"], "linear");
    EXPECT_FALSE(j["warnings"].empty());
}

TEST(Cli, SweepDefaultsToCsv) {
    const auto o = invoke(with_pair({"sweep", "--points", "4", "--exact"}));
    ASSERT_EQ(o.code, kOk) << o.err;
    std::istringstream in(o.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "index,alpha,delta,regime,lower,upper,point,exact");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 4);
    const auto j = invoke(with_pair({"sweep", "--points", "2", "--format", "json"}));
    ASSERT_EQ(j.code, kOk);
    EXPECT_EQ(j.body().size(), 2U);
}

TEST(Cli, ReduceAndBoost) {
    const auto o = invoke({"reduce", "--alpha", "0.01", "--delta", "0.0002", "--tau", "0.2", "--buckets", "9"});
    ASSERT_EQ(o.code, kOk) << o.err;
    const auto j = o.body();
    EXPECT_EQ(j["T"].get<int>(), 1);
    EXPECT_LE(j["boost"]["majority_failure"].get<double>(), j["boost"]["bound"].get<double>());
    const auto bad = invoke({"reduce", "--alpha", "0.01", "--delta", "0.005"});
    EXPECT_EQ(bad.code, kDomain);
    EXPECT_EQ(bad.error()["error"]["kind"], "domain");
    EXPECT_TRUE(bad.out.empty());
}

TEST(Cli, QuantizeLdpAndRobust) {
    const auto qz = invoke(with_pair({"quantize", "--outputs", "2", "--objective", "js", "--param", "0.2"}));
    ASSERT_EQ(qz.code, kOk) << qz.err;
    EXPECT_EQ(qz.body()["cell_of"].size(), 3U);
    const auto ldp = invoke(with_pair({"ldp", "--epsilon", "1"}, "point_mass.csv", "bernoulli_0.1.csv"));
    ASSERT_EQ(ldp.code, kOk) << ldp.err;
    EXPECT_EQ(ldp.body()["channel"]["matrix"].size(), 2U);
    const auto lfd = invoke(with_pair({"robust-lfd", "--epsilon", "0.1", "--alpha", "0.3", "--delta", "0.05"}));
    ASSERT_EQ(lfd.code, kOk) << lfd.err;
    EXPECT_NEAR(lfd.body()["tv_p"].get<double>(), 0.1, 1e-10);
    const auto too_big = invoke(with_pair({"robust-lfd", "--epsilon", "0.3"}));
    EXPECT_EQ(too_big.code, kDomain);
}

TEST(Cli, SimulateIsReproducible) {
    const std::vector<std::string> args =
        with_pair({"simulate", "--alpha", "0.3", "--n", "5", "--trials", "2000", "--seed", "1"});
    const auto a = invoke(args);
    const auto b = invoke(args);
    ASSERT_EQ(a.code, kOk) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto j = a.body();
    EXPECT_EQ(j["trials"].get<int>(), 2000);
    EXPECT_LE(j["ci95"][0].get<double>(), j["err_hat"].get<double>());
    const auto boosted = invoke(with_pair({"simulate", "--alpha", "0.3", "--n", "30", "--trials", "500", "--buckets",
                                           "3"}));
    ASSERT_EQ(boosted.code, kOk) << boosted.err;
}

TEST(Cli, VerifyInequalitySmallGrid) {
    const auto o = invoke({"verify-inequality", "--grid", "20", "--corners", "2", "--alphas", "3"});
    ASSERT_EQ(o.code, kOk) << o.err;
    EXPECT_EQ(o.body()["violations"].get<int>(), 0);
    EXPECT_EQ(o.body()["per_alpha"].size(), 3U);
}

TEST(Cli, WeakDetection) {
    const auto o = invoke(with_pair({"weak-detect", "--alpha", "0.3", "--gamma", "0.01", "--exact"}));
    ASSERT_EQ(o.code, kOk) << o.err;
    EXPECT_TRUE(o.body().contains("exact"));
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(invoke({}).code, kUsage);
    EXPECT_EQ(invoke({"no-such-verb"}).code, kUsage);
    EXPECT_EQ(invoke({"divergence", "--p", data("p3.json")}).code, kUsage);
    EXPECT_EQ(invoke(with_pair({"divergence"}, "missing.json")).code, kUsage);
    EXPECT_EQ(invoke(with_pair({"divergence", "--format", "xml"})).code, kUsage);
    const auto o = invoke({"--help"});
    EXPECT_EQ(o.code, kOk);
    EXPECT_NE(o.out.find("exact-n"), std::string::npos);
}

TEST(Cli, StructuralMismatchIsDomainExit) {
    const auto o = invoke(with_pair({"divergence"}, "p3.json", "point_mass.csv"));
    EXPECT_EQ(o.code, kDomain);
    EXPECT_EQ(o.error()["error"]["kind"], "structural");
}

}  // namespace
}  // namespace ht::cli
