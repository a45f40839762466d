// Copyright 2026 The scitok Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <fcntl.h>
#include <gtest/gtest.h>
#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scitok/cli.hpp"
#include "testing.hpp"

extern char** environ;

namespace scitok {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int exit_code = -1;
  long max_rss_kb = 0;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("scitok_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Runs the scitok binary and collects its exit status, stdout, stderr and
  // peak resident set size.
  Result run(std::vector<std::string> args) const {
    args.insert(args.begin(), SCITOK_CLI_PATH);
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    const std::string out = path("stdout.txt"), err = path("stderr.txt");
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_addopen(&fa, 1, out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_addopen(&fa, 2, err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    pid_t pid = 0;
    Result r;
    if (posix_spawn(&pid, argv[0], &fa, nullptr, argv.data(), environ) != 0) {
      ADD_FAILURE() << "spawn failed";
      return r;
    }
    posix_spawn_file_actions_destroy(&fa);
    int status = 0;
    rusage ru{};
    ::wait4(pid, &status, 0, &ru);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.max_rss_kb = ru.ru_maxrss;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string write_corpus(const std::string& name, std::size_t n, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::ofstream f(path(name), std::ios::binary);
    for (std::size_t i = 0; i < n; ++i) {
      f << json{{"id", "doc" + std::to_string(i)}, {"text", testing::random_document(rng)}}.dump()
        << '\n';
    }
    return path(name);
  }

  bool has_temp_files() const {
    for (const auto& e : fs::directory_iterator(dir_)) {
      if (e.path().filename().string().find(".tmp.") != std::string::npos) return true;
    }
    return false;
  }

  fs::path dir_;
};

std::vector<json> read_jsonl(const std::string& p) {
  std::vector<json> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) out.push_back(json::parse(line));
  return out;
}

TEST_F(CliTest, EncodeDecodeRoundTripIsByteIdentical) {
  const auto corpus = write_corpus("corpus.jsonl", 300, 1);
  ASSERT_EQ(run({"train-bpe", "--input", corpus, "--output", path("v.json"),
                 "--modality", "TEXT", "--target-size", "300"})
                .exit_code,
            0);
  auto r = run({"encode", "--input", corpus, "--output", path("ids.jsonl"),
                "--vocab", path("v.json")});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  r = run({"decode", "--input", path("ids.jsonl"), "--output", path("back.jsonl"),
           "--vocab", path("v.json")});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(slurp(path("back.jsonl")), slurp(corpus));
  EXPECT_FALSE(has_temp_files());
}

TEST_F(CliTest, OutputOrderDoesNotDependOnWorkers) {
  const auto corpus = write_corpus("corpus.jsonl", 2000, 2);
  ASSERT_EQ(run({"encode", "-i", corpus, "-o", path("w1.jsonl")}).exit_code, 0);
  ASSERT_EQ(run({"encode", "-i", corpus, "-o", path("w4.jsonl"), "--workers", "4"}).exit_code, 0);
  ASSERT_EQ(run({"detect", "-i", corpus, "-o", path("d1.jsonl")}).exit_code, 0);
  ASSERT_EQ(run({"detect", "-i", corpus, "-o", path("d3.jsonl"), "--workers", "3"}).exit_code, 0);
  EXPECT_EQ(slurp(path("w1.jsonl")), slurp(path("w4.jsonl")));
  EXPECT_EQ(slurp(path("d1.jsonl")), slurp(path("d3.jsonl")));
}

TEST_F(CliTest, DetectEmitsSpans) {
  {
    std::ofstream f(path("in.jsonl"));
    f << R"({"id":"a","text":"ab <SMILES>C1CCCCC1</SMILES> cd"})" << '\n';
  }
  ASSERT_EQ(run({"detect", "-i", path("in.jsonl"), "-o", path("out.jsonl")}).exit_code, 0);
  const auto rows = read_jsonl(path("out.jsonl"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0]["id"], "a");
  const auto& spans = rows[0]["spans"];
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(spans[1]["modality"], "SMILES");
  EXPECT_EQ(spans[1]["origin"], "TAG");
  EXPECT_EQ(spans[1]["start"], 11);
  EXPECT_EQ(spans[1]["end"], 19);
}

TEST_F(CliTest, DetectReadsConfigFile) {
  {
    std::ofstream f(path("in.jsonl"));
    f << R"({"id":1,"text":"x CCCCCCCCCCCCC y"})" << '\n';
    std::ofstream c(path("rules.cfg"));
    c << "enable_heuristics = false\n";
  }
  ASSERT_EQ(run({"detect", "-i", path("in.jsonl"), "-o", path("out.jsonl"), "--config",
                 path("rules.cfg")})
                .exit_code,
            0);
  EXPECT_EQ(read_jsonl(path("out.jsonl"))[0]["spans"].size(), 1u);
  std::ofstream(path("bad.cfg")) << "min_smile_len = 2\n";
  EXPECT_EQ(run({"detect", "-i", path("in.jsonl"), "-o", path("o2.jsonl"), "--config",
                 path("bad.cfg")})
                .exit_code,
            3);
}

TEST_F(CliTest, CrBenchMatchesLibraryComparison) {
  std::vector<std::string> docs;
  {
    std::ofstream f(path("smiles.jsonl"));
    for (std::size_t i = 0; i < testing::valid_smiles().size(); ++i) {
      const auto doc = "<SMILES>" + testing::valid_smiles()[i] + "</SMILES>";
      docs.push_back(doc);
      f << json{{"id", i}, {"text", doc}}.dump() << '\n';
    }
    std::ofstream s(path("train.jsonl"));
    for (const auto& smi : testing::valid_smiles()) s << json{{"id", 0}, {"text", smi}}.dump() << '\n';
  }
  const auto base = VocabularySet::character_level();
  const auto smi = train_bpe(testing::valid_smiles(), Modality::kSmiles,
                             default_alphabet(Modality::kSmiles).size() + 60);
  const auto bpe = base.with(Vocabulary::create(Modality::kSmiles,
                                                default_alphabet(Modality::kSmiles),
                                                smi.merges()));
  std::ofstream(path("chars.json")) << base.serialize();
  std::ofstream(path("bpe.json")) << bpe.serialize();

  const auto r = run({"cr-bench", "--data", path("smiles.jsonl"), "--out", path("cr.json"),
                      "--vocab", path("chars.json"), "--vocab", path("bpe.json"),
                      "--workers", "2"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto got = json::parse(slurp(path("cr.json")));
  const auto expected =
      compare({compression_ratio(base, DetectorConfig{}, docs, "chars"),
               compression_ratio(bpe, DetectorConfig{}, docs, "bpe")});
  EXPECT_EQ(got["comparison"], expected.to_json());
  EXPECT_EQ(got["reports"].size(), 2u);
  EXPECT_EQ(slurp(path("cr.json.table.txt")), expected.to_text());
  EXPECT_EQ(r.out, expected.to_text());
}

TEST_F(CliTest, PackWritesPlanAndStats) {
  {
    std::ofstream f(path("lens.jsonl"));
    std::mt19937_64 rng(3);
    std::lognormal_distribution<double> d(6.0, 1.0);
    for (int i = 0; i < 3000; ++i) {
      const auto len = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(d(rng)) + 1, 1, 16384);
      f << json{{"id", "d" + std::to_string(i)}, {"length", len}}.dump() << '\n';
    }
  }
  const auto r = run({"pack", "--data", path("lens.jsonl"), "--out", path("plan.jsonl"),
                      "--capacity", "16384", "--window", "8", "--ranks", "8", "--seed", "4",
                      "--cost-model", "quad-attn"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto plan = read_jsonl(path("plan.jsonl"));
  std::set<std::string> ids;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    EXPECT_EQ(plan[i]["bucket"], i);
    for (const auto& id : plan[i]["doc_ids"]) EXPECT_TRUE(ids.insert(id).second);
  }
  EXPECT_EQ(ids.size(), 3000u);
  for (std::size_t w = 0; w < plan.size(); w += 8) {
    for (std::size_t i = w + 1; i < std::min(w + 8, plan.size()); ++i) {
      EXPECT_LE(plan[i - 1]["max_len"].get<int>(), plan[i]["max_len"].get<int>());
    }
  }
  const auto stats = json::parse(slurp(path("plan.jsonl.stats.json")));
  EXPECT_EQ(stats["buckets"], plan.size());
  EXPECT_LT(stats["vlbs"]["mean_imbalance"].get<double>(),
            stats["unsorted"]["mean_imbalance"].get<double>());
}

TEST_F(CliTest, PackMeasuresTextDocuments) {
  {
    std::ofstream f(path("docs.jsonl"));
    f << R"({"id":"a","text":"<SMILES>CC</SMILES>"})" << '\n'
      << R"({"id":"b","text":"hello"})" << '\n';
  }
  ASSERT_EQ(run({"pack", "-i", path("docs.jsonl"), "-o", path("plan.jsonl"), "--capacity",
                 "9"})
                .exit_code,
            0);
  const auto plan = read_jsonl(path("plan.jsonl"));
  std::uint64_t longest = 0;
  for (const auto& b : plan) longest = std::max(longest, b["max_len"].get<std::uint64_t>());
  EXPECT_EQ(longest, 5u);  // "hello" is 5 TEXT tokens; the SMILES doc is 4
}

TEST_F(CliTest, ErrorsUseDocumentedExitCodes) {
  auto error_of = [](const Result& r) { return json::parse(r.err)["error"]; };

  auto r = run({"encode", "-i", path("missing.jsonl"), "-o", path("x.jsonl")});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(error_of(r)["exit_code"], 3);
  EXPECT_EQ(error_of(r)["kind"], "missing_input");

  {
    std::ofstream f(path("bad.jsonl"));
    f << R"({"id":1,"text":"fine"})" << "\n\n" << "{oops\n";
  }
  r = run({"encode", "-i", path("bad.jsonl"), "-o", path("x.jsonl")});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(error_of(r)["line"], 3);
  EXPECT_FALSE(fs::exists(path("x.jsonl")));
  EXPECT_FALSE(has_temp_files());

  std::ofstream(path("notext.jsonl")) << R"({"id":1,"txt":"x"})" << '\n';
  EXPECT_EQ(run({"encode", "-i", path("notext.jsonl"), "-o", path("x.jsonl")}).exit_code, 3);

  std::ofstream(path("tag.jsonl")) << R"({"id":1,"text":"ok"})" << '\n'
                                   << R"({"id":2,"text":"<SMILES>CC"})" << '\n';
  r = run({"detect", "-i", path("tag.jsonl"), "-o", path("x.jsonl")});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(error_of(r)["kind"], "malformed_tag");
  EXPECT_EQ(error_of(r)["line"], 2);

  std::ofstream(path("utf8.jsonl")) << "{\"id\":1,\"text\":\"\xff\"}\n";
  r = run({"encode", "-i", path("utf8.jsonl"), "-o", path("x.jsonl")});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(error_of(r)["kind"], "invalid_utf8");

  // Id 8 + 0xFF is the lone byte 0xFF in the TEXT partition.
  std::ofstream(path("byte.jsonl")) << R"({"id":1,"ids":[263]})" << '\n';
  EXPECT_EQ(run({"decode", "-i", path("byte.jsonl"), "-o", path("x.jsonl")}).exit_code, 4);

  std::ofstream(path("ids.jsonl")) << R"({"id":1,"ids":[2,99999999]})" << '\n';
  r = run({"decode", "-i", path("ids.jsonl"), "-o", path("x.jsonl")});
  EXPECT_EQ(r.exit_code, 4);
  EXPECT_EQ(error_of(r)["kind"], "invalid_id");

  std::ofstream(path("big.jsonl")) << R"({"id":"huge","length":100})" << '\n';
  r = run({"pack", "-i", path("big.jsonl"), "-o", path("x.jsonl"), "--capacity", "10"});
  EXPECT_EQ(r.exit_code, 4);
  EXPECT_NE(error_of(r)["message"].get<std::string>().find("huge"), std::string::npos);

  EXPECT_EQ(run({"encode", "-i", path("ids.jsonl")}).exit_code, 2);
  EXPECT_EQ(run({"frobnicate"}).exit_code, 2);
  EXPECT_EQ(run({"pack", "-i", path("big.jsonl"), "-o", path("x"), "--capacity", "10",
                 "--cost-model", "linear"})
                .exit_code,
            2);
  EXPECT_EQ(run({"--help"}).exit_code, 0);
}

TEST_F(CliTest, ManifestRecordsConfigAndHashes) {
  const auto corpus = write_corpus("corpus.jsonl", 50, 4);
  ASSERT_EQ(run({"encode", "-i", corpus, "-o", path("ids.jsonl"), "--workers", "2"}).exit_code, 0);
  const auto m = json::parse(slurp(path("ids.jsonl.manifest.json")));
  EXPECT_EQ(m["tool"], "scitok");
  EXPECT_EQ(m["version"], std::string(cli::kVersion));
  EXPECT_EQ(m["config"]["command"], "encode");
  EXPECT_EQ(m["inputs"][0]["path"], corpus);
  EXPECT_EQ(m["inputs"][0]["fnv1a64"], cli::hex64(cli::hash_file(corpus)));
  EXPECT_EQ(m["outputs"][0]["fnv1a64"], cli::hex64(cli::hash_file(path("ids.jsonl"))));
  EXPECT_EQ(cli::JobConfig::from_json(m["config"]).to_json(), m["config"]);
}

TEST_F(CliTest, RerunReproducesAndDetectsDrift) {
  const auto corpus = write_corpus("corpus.jsonl", 200, 5);
  ASSERT_EQ(run({"pack", "-i", corpus, "-o", path("plan.jsonl"), "--capacity", "4096",
                 "--window", "4", "--ranks", "4", "--seed", "9"})
                .exit_code,
            0);
  const std::string manifest = path("plan.jsonl.manifest.json");
  const std::string first = slurp(path("plan.jsonl"));
  auto r = run({"rerun", "--manifest", manifest});
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["reproduced"].get<bool>());
  EXPECT_EQ(slurp(path("plan.jsonl")), first);

  auto m = json::parse(slurp(manifest));
  m["outputs"][0]["fnv1a64"] = "0000000000000000";
  std::ofstream(manifest) << m.dump();
  r = run({"rerun", "--manifest", manifest});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_FALSE(json::parse(r.out)["reproduced"].get<bool>());
}

TEST_F(CliTest, MemoryStaysFlatOnMillionLineCorpus) {
  auto write = [&](const std::string& name, std::size_t n) {
    std::ofstream f(path(name), std::ios::binary);
    for (std::size_t i = 0; i < n; ++i) {
      f << "{\"id\":" << i << ",\"text\":\"CCO <SMILES>C1CCCCC1</SMILES>\"}\n";
    }
    return path(name);
  };
  const auto small = run({"encode", "-i", write("small.jsonl", 10000), "-o",
                          path("small.out"), "--workers", "2"});
  ASSERT_EQ(small.exit_code, 0) << small.err;
  const auto big = run({"encode", "-i", write("big.jsonl", 1000000), "-o",
                        path("big.out"), "--workers", "2"});
  ASSERT_EQ(big.exit_code, 0) << big.err;
  // The big input is ~50 MB and its output larger still; a streaming run
  // keeps the same footprint as the small one.
  EXPECT_LT(big.max_rss_kb, small.max_rss_kb + 8 * 1024)
      << "small " << small.max_rss_kb << " KiB, big " << big.max_rss_kb << " KiB";
}

TEST(JobConfig, JsonRoundTrip) {
  cli::JobConfig c;
  c.command = "pack";
  c.input = "a.jsonl";
  c.output = "b.jsonl";
  c.vocab = {"v1.json", "v2.json"};
  c.capacity = 100;
  c.window = 4;
  c.seed = 12;
  c.cost_model = "quad-attn";
  EXPECT_EQ(cli::JobConfig::from_json(c.to_json()).to_json(), c.to_json());
}

TEST(Run, InProcessUsageError) {
  cli::JobConfig c;
  c.command = "encode";
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(c, out, err), cli::kExitUsage);
  EXPECT_EQ(json::parse(err.str())["error"]["kind"], "usage");
}

}  // namespace
}  // namespace scitok
