#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sys/wait.h>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <susyq/cli.hpp>

#include "support.hpp"

using namespace susyq;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("susyq_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

const char* small_spectrum =
    "schema: susyq/1\n"
    "scenario: spectrum\n"
    "grid: {x_min: -16, x_max: 16, n: 256}\n"
    "spectrum: {levels: 4, paired: 3, eta_min: -1, eta_max: 1, eta_step: 0.5, richardson: false}\n";

const char* small_gauge =
    "schema: susyq/1\n"
    "scenario: gauge2d\n"
    "gauge2d: {L: 8, n: 64, levels: 3, samples: 2, eta_min: -1, eta_max: 1, eta_step: 0.5}\n";

std::vector<std::string> issues_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigErrors& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<std::string>& issues, const std::string& needle) {
  for (const auto& i : issues)
    if (i.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Config, MinimalDocumentUsesDefaults) {
  auto c = parse_config("schema: susyq/1\n");
  EXPECT_EQ(c, RunConfig{});
  EXPECT_EQ(c.grid1d().size(), 1024u);
  EXPECT_DOUBLE_EQ(c.dt(), two_pi / 1024);
}

TEST(Config, SchemaIsCheckedFirst) {
  EXPECT_TRUE(mentions(issues_of("scenario: spectrum\n"), "schema: missing"));
  EXPECT_TRUE(mentions(issues_of("schema: susyq/2\n"), "version mismatch"));
  EXPECT_TRUE(mentions(issues_of(""), "document: empty"));
  EXPECT_TRUE(mentions(issues_of("- a\n- b\n"), "mapping"));
  EXPECT_TRUE(mentions(issues_of("schema: [unclosed\n"), "syntax"));
}

TEST(Config, TypeErrorsCarryTheirPath) {
  auto issues = issues_of("schema: susyq/1\nprotocol: {eta: abc}\n");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0], "protocol.eta: expected a finite number, got 'abc'");
  EXPECT_TRUE(mentions(issues_of("schema: susyq/1\ngrid: {n: -4}\n"), "grid.n: expected a non-negative integer"));
  EXPECT_TRUE(mentions(issues_of("schema: susyq/1\npartner: {box: maybe}\n"), "partner.box: expected a boolean"));
  EXPECT_TRUE(mentions(issues_of("schema: susyq/1\ngrid: {x_min: .nan}\n"), "grid.x_min"));
}

TEST(Config, AllIssuesAreCollected) {
  auto issues = issues_of(
      "schema: susyq/1\n"
      "colour: red\n"
      "grid: {n: big, spacing: 2}\n"
      "sweep: {eta_min: x}\n"
      "superpotential: {kind: tabulated}\n");
  EXPECT_EQ(issues.size(), 5u);
  EXPECT_TRUE(mentions(issues, "colour: unknown key"));
  EXPECT_TRUE(mentions(issues, "grid.spacing: unknown key"));
  EXPECT_TRUE(mentions(issues, "grid.n"));
  EXPECT_TRUE(mentions(issues, "sweep.eta_min"));
  EXPECT_TRUE(mentions(issues, "superpotential.kind"));
}

TEST(Config, RangeValidation) {
  EXPECT_TRUE(mentions(issues_of("schema: susyq/1\ngrid: {n: 1000}\n"), "grid.n"));
  EXPECT_TRUE(mentions(issues_of("schema: susyq/1\nsteps_per_period: 32\n"), "steps_per_period"));
  EXPECT_TRUE(mentions(issues_of("schema: susyq/1\nscenario: dance\n"), "unknown scenario"));
  EXPECT_TRUE(mentions(issues_of("schema: susyq/1\nprotocol: {xbar: 0.5}\n"), "protocol.xbar"));
  EXPECT_TRUE(mentions(issues_of("schema: susyq/1\nprotocol: {pulse_post: {source: formula}}\n"),
                       "protocol.pulse_post.source"));
  EXPECT_TRUE(mentions(issues_of("schema: susyq/1\ngauge2d: {L: 4}\n"), "gauge2d.L"));
  EXPECT_TRUE(mentions(issues_of("schema: susyq/1\nspectrum: {levels: 4, paired: 4}\n"), "spectrum.paired"));
}

TEST(Config, EmitParseRoundTrip) {
  support::Gen gen(77);
  for (int trial = 0; trial < 40; ++trial) {
    RunConfig c;
    c.scenario = scenario_names()[static_cast<std::size_t>(gen.integer(0, static_cast<int>(scenario_names().size()) - 1))];
    c.seed = static_cast<std::uint64_t>(gen.integer(0, 1 << 30));
    c.workers = static_cast<std::uint64_t>(gen.integer(1, 16));
    c.grid.x_min = -gen.uniform(5, 30);
    c.grid.x_max = gen.uniform(5, 30);
    c.grid.n = 1u << gen.integer(7, 12);
    switch (gen.integer(0, 2)) {
      case 0: c.superpotential = HarmonicGaussian{gen.uniform(0, 8), gen.uniform(0.1, 2)}; break;
      case 1: c.superpotential = Monomial{gen.uniform(0.1, 3), gen.integer(1, 5)}; break;
      default: c.superpotential = TanhQuadratic{gen.uniform(0.5, 3), gen.uniform(0.1, 2), gen.uniform(-2, 2)};
    }
    c.spectrum.eta_step = gen.uniform(0.01, 0.5);
    c.partner.tol = gen.uniform(1e-8, 1e-2);
    c.partner.richardson = gen.integer(0, 1) == 1;
    c.protocol.xbar = -gen.uniform(1.5, 8);
    c.protocol.pulse_pre.phi_pi = gen.uniform(-1, 1);
    c.protocol.pulse_post = {"fixed", gen.uniform(0, 0.1), gen.uniform(-1, 1), gen.uniform(1, 4)};
    c.protocol.mode = gen.integer(0, 1) ? "shaking" : "exact_x";
    c.sweep.t_r_max_periods = gen.uniform(1, 20);
    c.interfere.fringe_k = gen.uniform(1, 50);
    c.gauge2d.B = gen.uniform(1, 3);
    c.output = gen.integer(0, 1) ? "" : "out dir/" + std::to_string(trial);
    auto text = emit_config(c);
    auto back = parse_config(text);
    EXPECT_EQ(back, c) << text;
    EXPECT_EQ(emit_config(back), text);
  }
}

TEST(Config, ShippedConfigsParse) {
  for (const auto& entry : fs::directory_iterator(SUSYQ_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(parse_config(slurp(entry.path()))) << entry.path();
  }
}

TEST(Svg, EmptyDatasetIsRejected) {
  EXPECT_THROW(io::render_svg(io::Heatmap{}, "h"), Error);
  EXPECT_THROW(io::render_svg(io::LineFamily{}, "h"), Error);
  io::Heatmap ragged{"t", "x", "y", {0, 1}, {0}, {{1.0}}};
  EXPECT_THROW(io::render_svg(ragged, "h"), Error);
}

TEST(Svg, MetadataCarriesDatasetHash) {
  io::LineFamily l{"title <a&b>", "x", "y", {0, 1, 2}, {{0, 1, 4}}, {{0, 1, 2}}, {"sq"}};
  auto svg = io::render_svg(l, "abc123");
  EXPECT_NE(svg.find("<metadata>dataset-sha256:abc123</metadata>"), std::string::npos);
  EXPECT_NE(svg.find("title &lt;a&amp;b&gt;"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  io::Heatmap h{"t", "x", "y", {0, 1}, {0, 1}, {{0, 1}, {2, std::nan("")}}};
  auto hs = io::render_svg(h, "def");
  EXPECT_NE(hs.find("#999999"), std::string::npos);
  EXPECT_EQ(hs, io::render_svg(h, "def"));
}

TEST(OutputDir, Precedence) {
  RunConfig c;
  c.output = "from_config";
  EXPECT_EQ(resolve_output_dir(std::string("cli"), "env", &c), fs::path("cli"));
  EXPECT_EQ(resolve_output_dir(std::nullopt, "env", &c), fs::path("env"));
  EXPECT_EQ(resolve_output_dir(std::nullopt, "", &c), fs::path("from_config"));
  EXPECT_EQ(resolve_output_dir(std::nullopt, nullptr, nullptr), fs::path("susyq_out"));
}

TEST(Execute, RerunsAreByteIdentical) {
  auto cfg = parse_config(small_spectrum);
  auto a = scratch("rerun_a"), b = scratch("rerun_b");
  std::ostringstream log;
  ASSERT_EQ(execute(cfg, a, small_spectrum, log), exit_ok) << log.str();
  ASSERT_EQ(execute(cfg, b, small_spectrum, log), exit_ok);
  auto ma = manifest(a), mb = manifest(b);
  EXPECT_EQ(ma["files"], mb["files"]);
  EXPECT_EQ(ma["summary"], mb["summary"]);
  for (const auto& f : ma["files"]) {
    auto name = f["path"].get<std::string>();
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    EXPECT_EQ(io::sha256_hex(slurp(a / name)), f["sha256"].get<std::string>());
  }
}

TEST(Execute, WorkerCountDoesNotChangeOutputs) {
  auto one = parse_config(small_gauge), many = one;
  many.workers = 4;
  auto a = scratch("workers_1"), b = scratch("workers_4");
  std::ostringstream log;
  ASSERT_EQ(execute(one, a, small_gauge, log), exit_ok) << log.str();
  ASSERT_EQ(execute(many, b, small_gauge, log), exit_ok);
  EXPECT_EQ(manifest(a)["files"], manifest(b)["files"]);
}

TEST(Execute, ManifestListsEveryFile) {
  auto cfg = parse_config(small_gauge);
  auto dir = scratch("manifest");
  std::ostringstream log;
  ASSERT_EQ(execute(cfg, dir, small_gauge, log), exit_ok);
  auto m = manifest(dir);
  std::set<std::string> listed;
  for (const auto& f : m["files"]) listed.insert(f["path"].get<std::string>());
  for (const auto& entry : fs::directory_iterator(dir)) {
    auto name = entry.path().filename().string();
    if (name != "manifest.json") {
      EXPECT_TRUE(listed.count(name)) << name;
    }
  }
  EXPECT_TRUE(listed.count("pairing.svg"));
  EXPECT_EQ(m["schema"], schema_id);
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["input_sha256"], io::sha256_hex(small_gauge));
  EXPECT_TRUE(m["versions"].contains("fftw"));
}

TEST(Execute, FlaggedRunExitsTwoWithErrorRecord) {
  std::string text = "schema: susyq/1\nscenario: partner\ngrid: {n: 256}\npartner: {levels: 3, tol: 1.0e-14, richardson: false}\n";
  auto dir = scratch("flagged");
  std::ostringstream log;
  EXPECT_EQ(execute(parse_config(text), dir, text, log), exit_numerical);
  auto err = nlohmann::json::parse(slurp(dir / "error.json"));
  EXPECT_EQ(err["exit_code"], 2);
  EXPECT_FALSE(err["details"].empty());
  EXPECT_EQ(manifest(dir)["status"], "numerical");
}

TEST(Execute, SemanticConfigErrorExitsOne) {
  std::string text = "schema: susyq/1\nscenario: interfere\nsuperpotential: {kind: monomial, c: 1, n: 1}\n";
  auto dir = scratch("semantic");
  std::ostringstream log;
  EXPECT_EQ(execute(parse_config(text), dir, text, log), exit_config);
  EXPECT_TRUE(fs::exists(dir / "error.json"));
}

TEST(Execute, UnwritableOutputExitsThree) {
  auto file = scratch("blocker");
  std::ofstream(file) << "x";
  std::ostringstream log;
  EXPECT_EQ(execute(parse_config(small_gauge), file / "sub", small_gauge, log), exit_io);
}

namespace {

int run_tool(const std::string& args) {
  int status = std::system((std::string(SUSYQ_TOOL) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  auto p = fs::temp_directory_path() / ("susyq_test_" + name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Tool, ExitCodes) {
  auto good = write_temp("good.yaml", small_gauge);
  auto bad = write_temp("bad.yaml", "schema: susyq/1\ngauge2d: {n: many}\n");
  auto out = scratch("tool_out");
  EXPECT_EQ(run_tool("gauge2d --config " + good.string() + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_EQ(run_tool("gauge2d --config " + bad.string() + " --out " + out.string()), 1);
  EXPECT_EQ(run_tool("spectrum --config " + good.string() + " --out " + out.string()), 1);
  EXPECT_EQ(run_tool("gauge2d --config /nonexistent/cfg.yaml --out " + out.string()), 3);
  EXPECT_EQ(run_tool("nosuch --config " + good.string()), 1);
  EXPECT_EQ(run_tool("gauge2d --config " + good.string() + " --workers 0"), 1);
  EXPECT_EQ(run_tool("--help"), 0);
}

TEST(Tool, EnvironmentOverridesOutputOnly) {
  auto good = write_temp("env.yaml", small_gauge);
  auto env_out = scratch("env_out");
  auto cmd = "SUSYQ_OUT=" + env_out.string() + " " + std::string(SUSYQ_TOOL) + " gauge2d --config " + good.string() +
             " --seed 5 >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  auto m = manifest(env_out);
  EXPECT_EQ(m["seed"], 5);
  EXPECT_EQ(m["workers"], 1);
}
