#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "support.hpp"
#include "vidart/cli.hpp"

using namespace vidart;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "vidart");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// "key value" lines into a map (last token wins).
std::map<std::string, std::string> fields(const std::string& text) {
  std::map<std::string, std::string> m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto sp = line.find(' ');
    if (sp != std::string::npos) m[line.substr(0, sp)] = line.substr(sp + 1);
  }
  return m;
}

std::string toy_config() { return std::string(VIDART_TEST_DATA) + "/toy.jsonc"; }

std::filesystem::path write_clip(const std::filesystem::path& dir, int w, int h, int frames) {
  CounterRng rng(5);
  const auto path = dir / "clip.y4m";
  io::write_y4m(testing::random_clip(rng, w, h, frames), path);
  return path;
}

}  // namespace

TEST_CASE("synth reports the resolved parameter") {
  const auto dir = testing::scratch_dir("cli_synth");
  const auto in = write_clip(dir, 32, 32, 8);
  const auto out = (dir / "o.y4m").string();
  auto r = call({"synth", "--input", in.string(), "--output", out, "--artifact", "banding", "--level", "very_noticeable"});
  REQUIRE(r.code == 0);
  CHECK(fields(r.out)["param"] == "5");
  CHECK(fields(r.out)["seed"] == "none");
  CHECK(io::read_y4m(std::filesystem::path(out)).length() == 8);

  r = call({"synth", "--input", in.string(), "--output", out, "--artifact", "graininess", "--level", "very_subtle",
            "--seed", "9"});
  REQUIRE(r.code == 0);
  CHECK(fields(r.out)["param"] == "5");
  CHECK(fields(r.out)["seed"] == "9");

  CHECK(call({"synth", "--input", in.string(), "--output", out, "--artifact", "graininess", "--level", "subtle"}).code ==
        2);
  CHECK(call({"synth", "--input", in.string(), "--output", out, "--artifact", "sparkles", "--level", "subtle"}).code ==
        2);
  CHECK(call({"synth", "--input", in.string(), "--output", out, "--artifact", "banding", "--level", "loud"}).code == 2);
  CHECK(call({"synth", "--input", (dir / "missing.y4m").string(), "--output", out, "--artifact", "banding", "--level",
              "subtle"})
            .code == 1);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("gen-dataset dry run prints closed-form counts") {
  auto r = call({"gen-dataset", "--dry-run"});
  REQUIRE(r.code == 0);
  CHECK(fields(r.out)["baseline"] == "38400");
  CHECK(fields(r.out)["augmented"] == "12480");
  CHECK(fields(r.out)["total"] == "50880");

  r = call({"gen-dataset", "--dry-run", "--config", toy_config()});
  REQUIRE(r.code == 0);
  CHECK(fields(r.out)["baseline"] == "96");
  CHECK(fields(r.out)["augmented"] == "72");
  CHECK(fields(r.out)["total"] == "168");

  r = call({"gen-dataset", "--dry-run", "--config", toy_config(), "--stage", "baseline"});
  CHECK(r.code == 0);
  CHECK(fields(r.out).count("augmented") == 0);

  r = call({"gen-dataset", "--dry-run", "--set", "pipeline.n_hd_sources=1", "--set", "pipeline.n_hfr_sources=1",
            "--set", "pipeline.n_ugc_sources=1", "--set", "pipeline.patches_per_source=1"});
  REQUIRE(r.code == 0);
  CHECK(fields(r.out)["baseline"] == "64");  // 2 source patches x 4 repeats x 2 QPs x 4 repeats

  CHECK(call({"gen-dataset"}).code == 2);  // neither sources nor dry run
  CHECK(call({"gen-dataset", "--dry-run", "--set", "pipeline.n_hfr_sources=0"}).code == 2);
  CHECK(call({"gen-dataset", "--dry-run", "--stage", "middle"}).code == 2);
  CHECK(call({"gen-dataset", "--dry-run", "--set", "pipeline.no_such_key=3"}).code == 2);
  CHECK(call({"gen-dataset", "--dry-run", "--set", "pipeline.patch_len=\"long\""}).code == 2);
}

TEST_CASE("run config parsing") {
  const auto rc = cli::parse_run_config(R"({
    // comments are allowed
    "pipeline": {"master_seed": 7},
    "jobs": 3
  })",
                                        {"model.head_hidden=8"});
  CHECK(rc.pipeline.master_seed == 7);
  CHECK(rc.pipeline.n_hd_sources == 100);
  CHECK(rc.jobs == 3);
  CHECK(rc.model.head_hidden == 8);
  const auto again = cli::parse_run_config(cli::dump_run_config(rc));
  CHECK(cli::dump_run_config(again) == cli::dump_run_config(rc));
  CHECK_THROWS_KIND(cli::parse_run_config(R"({"bogus": 1})"), ErrorKind::Usage);
  CHECK_THROWS_KIND(cli::parse_run_config("{}", {"jobs"}), ErrorKind::Usage);
  CHECK_THROWS_KIND(cli::parse_run_config(R"({"jobs": 0})"), ErrorKind::Usage);
}

TEST_CASE("documented example config equals the defaults") {
  const auto doc = cli::load_run_config(std::filesystem::path(VIDART_TEST_DATA) / ".." / ".." / "docs" / "run_config.jsonc");
  CHECK(cli::dump_run_config(doc) == cli::dump_run_config(cli::RunConfig{}));
}

TEST_CASE("infer, eval and params files") {
  const auto dir = testing::scratch_dir("cli_infer");
  const auto clip = write_clip(dir, 64, 64, 16).string();
  auto a = call({"infer", "--input", clip, "--init-seed", "3", "--save-params", (dir / "p.bin").string()});
  auto b = call({"infer", "--input", clip, "--params", (dir / "p.bin").string()});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  const std::string line = a.out.substr(0, a.out.find('\n'));
  CHECK(std::count(line.begin(), line.end(), '\t') == 11);
  CHECK(line.rfind("clip\t", 0) == 0);
  const auto labels = line.substr(line.rfind('\t') + 1);
  CHECK(labels.size() == 10);
  CHECK(labels.find_first_not_of("01") == std::string::npos);

  CHECK(call({"infer", "--input", clip, "--init-seed", "4"}).out != a.out);
  // Loading params into a differently shaped model is a layout error.
  CHECK(call({"infer", "--input", clip, "--params", (dir / "p.bin").string(), "--set", "model.head_hidden=7"}).code ==
        1);
  // Without either option the config's init_seed is used.
  CHECK(call({"infer", "--input", clip, "--set", "init_seed=3"}).out == a.out);
  CHECK(call({"infer", "--input", clip, "--init-seed", "1", "--params", (dir / "p.bin").string()}).code == 2);
}

TEST_CASE("toy dataset end to end through the command line") {
  const auto dir = testing::scratch_dir("cli_e2e");
  const auto data = (dir / "data").string();
  auto g = call({"gen-dataset", "--config", toy_config(), "--synthetic-sources", "--out", data, "--jobs", "2"});
  REQUIRE(g.code == 0);
  const auto manifest = fields(g.out)["manifest"];
  CHECK(fields(g.out)["total"] == "168");
  CHECK(fields(g.out)["digest"].size() == 16);

  const auto preds = (dir / "preds.tsv").string();
  auto i = call({"infer", "--manifest", manifest, "--init-seed", "1", "--out", preds,
                 "--set", "model.rmvit.segment_len=4"});
  REQUIRE(i.code == 0);
  auto e = call({"eval", "--manifest", manifest, "--predictions", preds, "--out", (dir / "report").string()});
  REQUIRE(e.code == 0);
  CHECK(e.out.rfind("Artifact,N,Acc,F1,AUC\n", 0) == 0);
  CHECK(std::count(e.out.begin(), e.out.end(), '\n') == 11);
  CHECK(std::filesystem::exists(dir / "report" / "report.csv"));

  // Dropping a prediction line is a coverage failure.
  std::ifstream in(preds);
  std::ofstream cut(dir / "cut.tsv");
  std::string l;
  std::getline(in, l);
  while (std::getline(in, l)) cut << l << '\n';
  cut.close();
  CHECK(call({"eval", "--manifest", manifest, "--predictions", (dir / "cut.tsv").string()}).code == 1);
}

TEST_CASE("loss-check") {
  const auto dir = testing::scratch_dir("cli_loss");
  const auto path = (dir / "batch.txt").string();
  {
    std::ofstream f(path);
    f << "# three samples, two dims\n3 2\n1 0\n1 0\n0 1\n1000000000\n1000000000\n0100000000\n";
    for (int i = 0; i < 3; ++i) f << "0.5 0.5 0.5 0.5 0.5 0.5 0.5 0.5 0.5 0.5\n";
  }
  auto r = call({"loss-check", "--batch", path});
  REQUIRE(r.code == 0);
  auto f = fields(r.out);
  const double con = 2.0 * std::log1p(std::exp(-10.0));  // two samples with one aligned positive, tau 0.1
  CHECK(std::stod(f["contrastive_sum"]) == doctest::Approx(con).epsilon(1e-6));
  CHECK(std::stod(f["bce_sum"]) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-8));
  CHECK(std::stod(f["total"]) == doctest::Approx(0.5 * con + 1.5 * std::log(2.0)).epsilon(1e-8));
  CHECK(r.out.find("sample 2 contrastive 0.000000000") != std::string::npos);

  r = call({"loss-check", "--batch", path, "--alpha", "1", "--beta", "0"});
  CHECK(std::stod(fields(r.out)["total"]) == doctest::Approx(con).epsilon(1e-6));
  CHECK(call({"loss-check", "--batch", path, "--tau", "0"}).code == 1);
  {
    std::ofstream f2(dir / "short.txt");
    f2 << "2 2\n1 0\n";
  }
  CHECK(call({"loss-check", "--batch", (dir / "short.txt").string()}).code == 1);
}

TEST_CASE("selfcheck and show-config") {
  auto r = call({"selfcheck"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  r = call({"selfcheck", "--inject-fault", "layout"});
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL params_layout") != std::string::npos);

  r = call({"show-config", "--set", "jobs=5"});
  REQUIRE(r.code == 0);
  CHECK(cli::parse_run_config(r.out).jobs == 5);
}
