#include <gtest/gtest.h>

#include <sstream>

#include "kernelwave/io.hpp"

using namespace kernelwave;

TEST(Io, NumbersRoundTrip) {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23})
    EXPECT_EQ(io::parse_double(io::fmt(x)), x);
  EXPECT_THROW(io::parse_double("1.5x"), UsageError);
  EXPECT_THROW(io::parse_double(""), UsageError);
  EXPECT_EQ(io::parse_list("1,2.5,-3"), (std::vector<double>{1, 2.5, -3}));
}

TEST(Io, Points) {
  const Point p = io::parse_point("0.3,-0.2,0.1,0.05");
  EXPECT_EQ(p.tau2, 0.05);
  EXPECT_THROW(io::parse_point("1,2,3"), UsageError);
}

TEST(Io, QueriesFromJsonLines) {
  std::istringstream in(R"({"kernel":"sine-ext","u":0.5,"v":0}
# comment
{"kernel":"transition-a","a":2,"tau1":0.1,"tau2":0,"u":0,"v":0,"backend":"saddle"}
)");
  const auto qs = io::read_queries(in, {});
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(qs[0].kernel, KernelId::sine_ext);
  EXPECT_EQ(qs[0].u, 0.5);
  EXPECT_EQ(*qs[1].a_param, 2.0);
  EXPECT_EQ(qs[1].backend, Backend::saddle);
}

TEST(Io, QueriesFromOwnCsv) {
  KernelQuery q;
  q.kernel = KernelId::s1;
  q.u = 0.25;
  q.tau1 = 0.5;
  const KernelValue v = eval_kernel(q);
  std::istringstream in(std::string(io::kernel_csv_header) + "\n" + io::kernel_csv_row(q, v) + "\n");
  const auto qs = io::read_queries(in, {});
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_EQ(qs[0].kernel, KernelId::s1);
  EXPECT_EQ(qs[0].u, 0.25);
  EXPECT_EQ(qs[0].tau1, 0.5);
  EXPECT_FALSE(qs[0].a_param.has_value());
}

TEST(Io, MalformedQueries) {
  std::istringstream bad_json(R"({"kernel":"sine-ext","u":0.5})");
  EXPECT_THROW(io::read_queries(bad_json, {}), UsageError);
  std::istringstream missing_a(R"({"kernel":"transition-a","u":0,"v":0})");
  EXPECT_THROW(io::read_queries(missing_a, {}), UsageError);
  std::istringstream ragged("kernel,tau1,tau2,u,v\ns1,0,0,1\n");
  EXPECT_THROW(io::read_queries(ragged, {}), UsageError);
  std::istringstream bad_kernel("kernel,tau1,tau2,u,v\nbessel,0,0,1,1\n");
  EXPECT_THROW(io::read_queries(bad_kernel, {}), UsageError);
}

TEST(Io, CoefficientDump) {
  const auto ec = build_amplitudes(Transition::airy_to_s1, {}, 2);
  const auto j = io::coefficients_json(ec);
  EXPECT_EQ(j["transition"], "airy-to-s1");
  EXPECT_EQ(j["order"], 2);
  ASSERT_EQ(j["b"].size(), 3u);
  EXPECT_EQ(j["b"][2].size(), 1u);
  EXPECT_NEAR(j["b"][1][0][1].get<double>(), -1.0 / 6.0, 1e-13);
  EXPECT_NEAR(j["c"][0][0][0].get<double>(), 0.5, 1e-13);
}
