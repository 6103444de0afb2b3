#include "curvedq/config.hpp"
#include "curvedq/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace curvedq;

namespace {

std::string error_of(const std::string& text) {
  try {
    interpret_config(ConfigDocument::parse(text, "cfg.toml"));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesSubset) {
  const auto doc = ConfigDocument::parse(R"(
# comment
top = 1
[surface]
name = "torus"   # trailing comment
R = 2.5
r = 1_000e-3
[grid]
n = [32, 48]
[output]
verbose = true
tag = 'raw # not a comment'
)");
  EXPECT_DOUBLE_EQ(doc.number("top", 0), 1.0);
  EXPECT_EQ(doc.string("surface.name", ""), "torus");
  EXPECT_DOUBLE_EQ(doc.number("surface.r", 0), 1.0);
  EXPECT_EQ(doc.numbers("grid.n", {}, 2), (std::vector<double>{32, 48}));
  EXPECT_TRUE(doc.boolean("output.verbose", false));
  EXPECT_EQ(doc.string("output.tag", ""), "raw # not a comment");
  EXPECT_DOUBLE_EQ(doc.number("missing", 4.0), 4.0);
}

TEST(Config, SyntaxErrorsCarryLine) {
  try {
    ConfigDocument::parse("[task]\nkind = spectrum\n", "x.toml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("x.toml:2"), std::string::npos);
  }
  EXPECT_THROW(ConfigDocument::parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(ConfigDocument::parse("[open\n"), ConfigError);
  EXPECT_THROW(ConfigDocument::parse("a = \"x\n"), ConfigError);
  EXPECT_THROW(ConfigDocument::parse("a = [1, b]\n"), ConfigError);
}

TEST(Config, TypedInterpretation) {
  const RunConfig c = interpret_config(ConfigDocument::parse(R"(
[surface]
name = "cylinder"
r = 2.0
L = 6.0
[grid]
n = [16, 24]
bc_q2 = "periodic"
scheme = "peierls"
[field]
B = [0, 1.5, 0]
gauge = "landau-z"
V = "0.1*y^2"
[task]
kind = "evolve"
dt = 0.05
steps = 20
initial = "eigenstate:2"
)"));
  EXPECT_EQ(c.surface, "cylinder");
  EXPECT_EQ(c.n1, 16);
  EXPECT_EQ(c.n2, 24);
  EXPECT_FALSE(c.bc[0].has_value());
  EXPECT_EQ(*c.bc[1], Boundary::periodic);
  EXPECT_EQ(c.scheme, MagneticScheme::peierls);
  EXPECT_DOUBLE_EQ(c.B[1], 1.5);
  EXPECT_EQ(c.task, TaskKind::evolve);
  EXPECT_EQ(c.initial, "eigenstate:2");
  EXPECT_EQ(c.config_hash.size(), 16u);
}

TEST(Config, RequiredKeysAndRanges) {
  EXPECT_NE(error_of("[surface]\nname = \"sphere\"\n").find("task.kind"), std::string::npos);
  EXPECT_NE(error_of("[task]\nkind = \"spectrum\"\n").find("surface.name"), std::string::npos);
  EXPECT_EQ(error_of("[task]\nkind = \"validate\"\n"), "");
  EXPECT_NE(error_of("[task]\nkind = \"spectrum\"\n[surface]\nname = \"sphere\"\nr = -1\n")
                .find("surface.r"),
            std::string::npos);
  EXPECT_NE(error_of("[task]\nkind = \"spectrum\"\n[surface]\nname = \"klein\"\n").find("klein"),
            std::string::npos);
  EXPECT_NE(error_of("[task]\nkind = \"spectrum\"\n[surface]\nname = \"torus\"\nR = 0.5\n")
                .find("R > r"),
            std::string::npos);
  EXPECT_NE(error_of("[task]\nkind = \"spectrum\"\n[surface]\nname = \"sphere\"\n[grid]\nn = [3, 8]\n")
                .find("grid.n"),
            std::string::npos);
  EXPECT_NE(error_of("[task]\nkind = \"spectrum\"\nk = 2.5\n[surface]\nname = \"sphere\"\n").find("task.k"),
            std::string::npos);
  EXPECT_NE(error_of("[task]\nkind = \"spectrum\"\n[surface]\nname = \"sphere\"\n[field]\nV = \"x +\"\n")
                .find("column"),
            std::string::npos);
  EXPECT_NE(error_of("[task]\nkind = \"spectrum\"\n[surface]\nname = \"sphere\"\nradius = 1\n")
                .find("cfg.toml:5"),
            std::string::npos);
}

TEST(Config, HashIgnoresOutputLocation) {
  const std::string base = "[task]\nkind = \"validate\"\n";
  const auto a = interpret_config(ConfigDocument::parse(base + "[output]\ndir = \"a\"\n"));
  const auto b = interpret_config(ConfigDocument::parse(base + "[output]\ndir = \"b\"\nverbose = true\n"));
  const auto c = interpret_config(ConfigDocument::parse(base + "[output]\nseed = 8\n"));
  EXPECT_EQ(a.config_hash, b.config_hash);
  EXPECT_NE(a.config_hash, c.config_hash);
}

TEST(Config, SiUnitsUseTheRadiusAsLengthScale) {
  const RunConfig c = interpret_config(ConfigDocument::parse(R"(
[surface]
name = "sphere"
r = 1e-8
[field]
B = [0, 0, 2.0]
[physics]
units = "si"
[task]
kind = "spectrum"
)"));
  const double hbar = 1.054571817e-34, m = 9.1093837015e-31, e = 1.602176634e-19;
  EXPECT_DOUBLE_EQ(c.r, 1.0);
  EXPECT_NEAR(c.units.energy, hbar * hbar / (m * 1e-16), 1e-12 * c.units.energy);
  EXPECT_NEAR(c.B[2], 2.0 * e * 1e-16 / hbar, 1e-12 * c.B[2]);
  EXPECT_EQ(c.params.mass, 1.0);
}
