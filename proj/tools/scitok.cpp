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


// scitok: detect, train, encode, decode, benchmark and pack from the shell.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scitok/cli.hpp"

namespace {

using scitok::cli::JobConfig;

void add_io(CLI::App* cmd, JobConfig& c) {
  cmd->add_option("-i,--input,--data", c.input, "JSONL input")->required();
  cmd->add_option("-o,--output,--out", c.output, "output path")->required();
  cmd->add_option("--workers", c.workers, "worker threads")
      ->check(CLI::PositiveNumber);
}

void add_rules(CLI::App* cmd, JobConfig& c) {
  cmd->add_option("--config", c.config, "detector rules (key = value)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modality-aware tokenization for mixed scientific text"};
  app.set_version_flag("--version", std::string(scitok::cli::kVersion));
  app.require_subcommand(1);

  JobConfig c;
  std::string manifest;

  auto* detect = app.add_subcommand("detect", "write detected spans per document");
  add_io(detect, c);
  add_rules(detect, c);

  auto* train = app.add_subcommand("train-bpe", "learn merges for one modality");
  train->add_option("-i,--input,--data", c.input, "JSONL corpus")->required();
  train->add_option("-o,--output,--out", c.output, "vocabulary JSON")->required();
  train->add_option("--modality", c.modality, "TEXT, SMILES, NUCLEOTIDE or PROTEIN")
      ->required();
  train->add_option("--target-size", c.target_size, "tokens excluding <unk>")
      ->required()
      ->check(CLI::PositiveNumber);
  train->add_option("--vocab", c.vocab, "start from this vocabulary set");
  train->add_option("--seed", c.seed, "recorded in the manifest");

  auto* enc = app.add_subcommand("encode", "text to token ids");
  add_io(enc, c);
  add_rules(enc, c);
  enc->add_option("--vocab", c.vocab, "vocabulary JSON (default: character level)");

  auto* dec = app.add_subcommand("decode", "token ids to text");
  add_io(dec, c);
  dec->add_option("--vocab", c.vocab, "vocabulary JSON (default: character level)");

  auto* bench = app.add_subcommand("cr-bench", "compression ratio of each vocabulary");
  add_io(bench, c);
  add_rules(bench, c);
  bench->add_option("--vocab", c.vocab, "vocabulary JSON, repeatable")->required();
  bench->add_option("--name", c.names, "label per --vocab, repeatable");
  bench->add_flag("!--no-specials", c.count_specials,
                  "leave tag tokens out of the token count");

  auto* pack = app.add_subcommand("pack", "bucket documents and sort windows");
  add_io(pack, c);
  add_rules(pack, c);
  pack->add_option("--vocab", c.vocab, "used when documents carry text, not length");
  pack->add_option("--capacity", c.capacity, "tokens per bucket")
      ->required()
      ->check(CLI::PositiveNumber);
  pack->add_option("--window", c.window, "buckets per sorted window")
      ->check(CLI::PositiveNumber);
  pack->add_option("--ranks", c.ranks, "simulated data-parallel ranks")
      ->check(CLI::PositiveNumber);
  pack->add_option("--seed", c.seed, "shuffle seed");
  pack->add_option("--cost-model", c.cost_model, "padded-max or quad-attn")
      ->check(CLI::IsMember({"padded-max", "quad-attn"}));
  pack->add_option("--stats", c.stats, "stats JSON (default <output>.stats.json)");

  auto* rerun = app.add_subcommand("rerun", "repeat a job and compare output hashes");
  rerun->add_option("--manifest", manifest, "manifest written by a previous job")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const scitok::cli::JobError usage(scitok::cli::kExitUsage, "usage", e.what());
    std::cerr << usage.dump() << '\n';
    return scitok::cli::kExitUsage;
  }

  if (rerun->parsed()) return scitok::cli::rerun(manifest);
  c.command = app.get_subcommands().front()->get_name();
  return scitok::cli::run(c);
}
