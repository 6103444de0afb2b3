#include "curvedq/output.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace curvedq;

TEST(Output, SeventeenDigitsRoundTrip) {
  const double x = 0.1 + 0.2;
  EXPECT_EQ(format_double(x), "0.30000000000000004");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Output, Fnv1a) {
  // Published FNV-1a 64-bit test vectors.
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Output, JsonTextIsIndentedAndOrdered) {
  Json j;
  j["z"] = 1;
  j["a"] = std::vector<double>{0.5};
  j["bad"] = std::nan("");
  EXPECT_EQ(json_text(j), "{\n  \"z\": 1,\n  \"a\": [\n    0.5\n  ],\n  \"bad\": null\n}\n");
}

TEST(Output, UtcTimestampShape) {
  const std::string t = utc_timestamp();
  ASSERT_EQ(t.size(), 20u);
  EXPECT_EQ(t[4], '-');
  EXPECT_EQ(t[10], 'T');
  EXPECT_EQ(t.back(), 'Z');
}
