#include <gtest/gtest.h>

#include "merge_metrics/selftest.hpp"

using namespace merge_metrics;

TEST(Selftest, AllSuitesPass) {
  const auto report = run_selftest(7, 60);
  ASSERT_EQ(report.suites.size(), 7u);
  for (const auto& s : report.suites) EXPECT_TRUE(s.passed()) << s.name << ": " << s.detail;
  EXPECT_TRUE(report.passed());
}

TEST(Selftest, SeedChangesNothingButInstances) {
  const auto a = run_selftest(3, 10);
  const auto b = run_selftest(3, 10);
  ASSERT_EQ(a.suites.size(), b.suites.size());
  for (std::size_t k = 0; k < a.suites.size(); ++k) EXPECT_EQ(a.suites[k].failures, b.suites[k].failures);
}
