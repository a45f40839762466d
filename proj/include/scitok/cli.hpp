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

// Batch jobs behind the `scitok` command line tool.
//
// Every job is described completely by a JobConfig. Outputs are written to a
// temporary file and renamed into place, and each output gets a
// `<output>.manifest.json` next to it that records the config and input
// hashes, so `scitok rerun --manifest <file>` can reproduce it.

#pragma once

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "scitok/bpe.hpp"
#include "scitok/codec.hpp"
#include "scitok/detector.hpp"
#include "scitok/error.hpp"
#include "scitok/metrics.hpp"
#include "scitok/modality.hpp"
#include "scitok/packer.hpp"
#include "scitok/utf8.hpp"
#include "scitok/vocab.hpp"

namespace scitok::cli {

inline constexpr std::string_view kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitContract = 4;

struct JobConfig {
  std::string command;
  std::string input;
  std::string output;
  std::string config;               // detector key=value file
  std::vector<std::string> vocab;   // cr-bench takes several
  std::vector<std::string> names;   // report labels for cr-bench
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  // train-bpe
  std::string modality;
  std::size_t target_size = 0;
  // cr-bench
  bool count_specials = true;
  // pack
  std::uint64_t capacity = 0;
  std::size_t window = 1;
  std::size_t ranks = 1;
  std::string cost_model = "padded-max";
  std::string stats;  // defaults to <output>.stats.json

  // `workers` is left out on purpose: it never changes an output.
  nlohmann::json to_json() const {
    return {{"command", command},       {"input", input},
            {"output", output},         {"config", config},
            {"vocab", vocab},           {"names", names},
            {"seed", seed},             {"modality", modality},
            {"target_size", target_size}, {"count_specials", count_specials},
            {"capacity", capacity},     {"window", window},
            {"ranks", ranks},           {"cost_model", cost_model},
            {"stats", stats}};
  }

  static JobConfig from_json(const nlohmann::json& j) {
    JobConfig c;
    c.command = j.at("command").get<std::string>();
    c.input = j.value("input", "");
    c.output = j.value("output", "");
    c.config = j.value("config", "");
    c.vocab = j.value("vocab", std::vector<std::string>{});
    c.names = j.value("names", std::vector<std::string>{});
    c.seed = j.value("seed", std::uint64_t{0});
    c.modality = j.value("modality", "");
    c.target_size = j.value("target_size", std::size_t{0});
    c.count_specials = j.value("count_specials", true);
    c.capacity = j.value("capacity", std::uint64_t{0});
    c.window = j.value("window", std::size_t{1});
    c.ranks = j.value("ranks", std::size_t{1});
    c.cost_model = j.value("cost_model", "padded-max");
    c.stats = j.value("stats", "");
    return c;
  }
};

// Failure carrying its exit status; rendered as JSON on stderr.
class JobError : public std::runtime_error {
 public:
  JobError(int exit_code, std::string kind, const std::string& message,
           std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(message),
        exit_code_(exit_code),
        kind_(std::move(kind)),
        line_(line) {}

  int exit_code() const { return exit_code_; }
  const std::string& kind() const { return kind_; }
  std::optional<std::size_t> line() const { return line_; }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"exit_code", exit_code_},
                        {"kind", kind_},
                        {"message", what()}};
    if (line_) j["line"] = *line_;
    return {{"error", j}};
  }

  // Messages may quote raw input, so invalid UTF-8 is replaced, not thrown.
  std::string dump() const {
    return to_json().dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  }

 private:
  int exit_code_;
  std::string kind_;
  std::optional<std::size_t> line_;
};

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

inline LogLevel log_level_from_env() {
  const char* v = std::getenv("SCITOK_LOG");
  if (v == nullptr) return LogLevel::kError;
  const std::string_view s(v);
  if (s == "debug") return LogLevel::kDebug;
  if (s == "info") return LogLevel::kInfo;
  return LogLevel::kError;
}

inline void log(LogLevel level, std::ostream& err, const std::string& msg) {
  static const LogLevel threshold = log_level_from_env();
  if (level > threshold) return;
  err << "[scitok] " << (level == LogLevel::kDebug ? "debug" : "info") << ": "
      << msg << '\n';
}

inline std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JobError(kExitInput, "missing_input", "cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Writes to `<path>.tmp.<pid>` and renames on commit(); an uncommitted file
// is removed on destruction.
class AtomicFile {
 public:
  explicit AtomicFile(std::string path)
      : path_(std::move(path)),
        tmp_(path_ + ".tmp." + std::to_string(::getpid())) {
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) {
      throw JobError(kExitInput, "unwritable_output",
                     "cannot write " + path_);
    }
  }
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    out_.close();
    if (!out_) throw JobError(kExitInput, "unwritable_output", "write failed: " + path_);
    std::error_code ec;
    std::filesystem::rename(tmp_, path_, ec);
    if (ec) {
      throw JobError(kExitInput, "unwritable_output",
                     "cannot rename into " + path_ + ": " + ec.message());
    }
    committed_ = true;
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

inline void write_file_atomic(const std::string& path, std::string_view content) {
  AtomicFile f(path);
  f.stream() << content;
  f.commit();
}

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  if (path.empty()) throw JobError(kExitUsage, "usage", "--input is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw JobError(kExitInput, "missing_input", "cannot open input " + path);
  }
  return in;
}

inline nlohmann::json parse_line(const std::string& line, std::size_t line_no) {
  // The JSON parser passes invalid UTF-8 through inside strings.
  if (!utf8::is_valid(line)) {
    throw JobError(kExitInput, "invalid_utf8",
                   "line " + std::to_string(line_no) + ": invalid UTF-8", line_no);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw JobError(kExitInput, "malformed_input",
                   "line " + std::to_string(line_no) + ": " + e.what(), line_no);
  }
  if (!j.is_object() || !j.contains("id")) {
    throw JobError(kExitInput, "malformed_input",
                   "line " + std::to_string(line_no) +
                       ": expected an object with an \"id\" field",
                   line_no);
  }
  return j;
}

inline const std::string& require_text(const nlohmann::json& j,
                                       std::size_t line_no) {
  auto it = j.find("text");
  if (it == j.end() || !it->is_string()) {
    throw JobError(kExitInput, "malformed_input",
                   "line " + std::to_string(line_no) +
                       ": expected a string \"text\" field",
                   line_no);
  }
  return it->get_ref<const std::string&>();
}

inline std::string id_string(const nlohmann::json& id) {
  return id.is_string() ? id.get<std::string>() : id.dump();
}

// Bad document content (broken tags, invalid UTF-8, bad fields) is malformed
// input; anything else a module rejects is a contract violation. The module's
// message is kept verbatim and the line goes in its own field.
inline bool is_input_error(ErrorCode code) {
  return code == ErrorCode::kMalformedTag || code == ErrorCode::kInvalidUtf8 ||
         code == ErrorCode::kFormat;
}

[[noreturn]] inline void rethrow_for_line(const Error& e, std::size_t line_no) {
  throw JobError(is_input_error(e.code()) ? kExitInput : kExitContract,
                 std::string(to_string(e.code())), e.what(), line_no);
}

// Reads JSONL in chunks, maps every non-blank line through `fn` on up to
// `workers` threads and hands the results to `sink` in input order. Memory
// is bounded by the chunk, not the file.
template <typename Result>
void map_jsonl(const std::string& path, std::size_t workers,
               const std::function<Result(const nlohmann::json&, std::size_t)>& fn,
               const std::function<void(Result&&, std::size_t)>& sink) {
  std::ifstream in = open_input(path);
  workers = std::max<std::size_t>(workers, 1);
  const std::size_t chunk = 256 * workers;
  std::vector<std::string> lines;
  std::vector<std::size_t> numbers;
  std::vector<std::optional<Result>> results;
  std::vector<std::exception_ptr> errors;
  std::size_t line_no = 0;
  std::string line;
  bool eof = false;
  while (!eof) {
    lines.clear();
    numbers.clear();
    while (lines.size() < chunk) {
      if (!std::getline(in, line)) {
        eof = true;
        break;
      }
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      lines.push_back(std::move(line));
      numbers.push_back(line_no);
    }
    if (lines.empty()) continue;
    results.assign(lines.size(), std::nullopt);
    errors.assign(lines.size(), nullptr);
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t i = begin; i < lines.size(); i += stride) {
        try {
          results[i].emplace(fn(parse_line(lines[i], numbers[i]), numbers[i]));
        } catch (const Error& e) {
          try {
            rethrow_for_line(e, numbers[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const std::size_t n_threads = std::min(workers, lines.size());
    if (n_threads <= 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work, t, n_threads);
      for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      sink(std::move(*results[i]), numbers[i]);
    }
  }
}

inline DetectorConfig load_rules(const JobConfig& c) {
  if (c.config.empty()) return DetectorConfig{};
  if (!std::filesystem::exists(c.config)) {
    throw JobError(kExitInput, "missing_input", "cannot open config " + c.config);
  }
  try {
    return DetectorConfig::load(c.config);
  } catch (const Error& e) {
    throw JobError(kExitInput, "malformed_config", e.what());
  }
}

inline VocabularySet load_vocab(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw JobError(kExitInput, "missing_input", "cannot open vocab " + path);
  }
  try {
    return VocabularySet::load(path);
  } catch (const Error& e) {
    throw JobError(kExitInput, "malformed_vocab", e.what());
  }
}

inline VocabularySet single_vocab(const JobConfig& c) {
  if (c.vocab.size() > 1) {
    throw JobError(kExitUsage, "usage", c.command + " takes at most one --vocab");
  }
  return c.vocab.empty() ? VocabularySet::character_level() : load_vocab(c.vocab[0]);
}

inline void require_output(const JobConfig& c) {
  if (c.output.empty()) throw JobError(kExitUsage, "usage", "--output is required");
}

inline nlohmann::json span_json(const Span& s) {
  nlohmann::json j = {{"start", s.start},
                      {"end", s.end},
                      {"modality", std::string(to_string(s.modality))},
                      {"origin", std::string(to_string(s.origin))}};
  if (s.tag) {
    j["tag_start"] = s.tag->open_start;
    j["tag_end"] = s.tag->close_end;
  }
  return j;
}

inline nlohmann::json stats_json(const BalanceStats& s) {
  return {{"num_ranks", s.num_ranks},
          {"steps", s.steps},
          {"mean_imbalance", s.mean_imbalance},
          {"max_imbalance", s.max_imbalance},
          {"rank_cost", s.rank_cost}};
}

// Files a job reads, for the manifest.
inline std::vector<std::string> job_inputs(const JobConfig& c) {
  std::vector<std::string> in;
  if (!c.input.empty()) in.push_back(c.input);
  if (!c.config.empty()) in.push_back(c.config);
  for (const auto& v : c.vocab) in.push_back(v);
  return in;
}

// ---- commands --------------------------------------------------------------

inline std::vector<std::string> cmd_detect(const JobConfig& c, std::ostream& err) {
  require_output(c);
  const DetectorConfig rules = load_rules(c);
  AtomicFile out(c.output);
  map_jsonl<std::string>(
      c.input, c.workers,
      [&](const nlohmann::json& j, std::size_t line_no) {
        SegmentedText seg = segment(require_text(j, line_no), rules);
        nlohmann::json o = {{"id", j.at("id")}, {"spans", nlohmann::json::array()}};
        for (const Span& s : seg.spans) o["spans"].push_back(span_json(s));
        for (const auto& w : seg.warnings) {
          log(LogLevel::kInfo, err, "line " + std::to_string(line_no) + ": " + w);
        }
        return o.dump();
      },
      [&](std::string&& line, std::size_t) { out.stream() << line << '\n'; });
  out.commit();
  return {c.output};
}

inline std::vector<std::string> cmd_encode(const JobConfig& c, std::ostream&) {
  require_output(c);
  const DetectorConfig rules = load_rules(c);
  const VocabularySet vs = single_vocab(c);
  AtomicFile out(c.output);
  map_jsonl<std::string>(
      c.input, c.workers,
      [&](const nlohmann::json& j, std::size_t line_no) {
        const TokenSequence ts = encode(require_text(j, line_no), vs, rules);
        return nlohmann::json{{"id", j.at("id")}, {"ids", ts.ids}}.dump();
      },
      [&](std::string&& line, std::size_t) { out.stream() << line << '\n'; });
  out.commit();
  return {c.output};
}

inline std::vector<std::string> cmd_decode(const JobConfig& c, std::ostream&) {
  require_output(c);
  const VocabularySet vs = single_vocab(c);
  AtomicFile out(c.output);
  map_jsonl<std::string>(
      c.input, c.workers,
      [&](const nlohmann::json& j, std::size_t line_no) {
        auto it = j.find("ids");
        std::vector<TokenId> ids;
        bool ok = it != j.end() && it->is_array();
        if (ok) {
          for (const auto& v : *it) {
            if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 0xffffffffull) {
              ok = false;
              break;
            }
            ids.push_back(v.get<TokenId>());
          }
        }
        if (!ok) {
          throw JobError(kExitInput, "malformed_input",
                         "line " + std::to_string(line_no) +
                             ": expected \"ids\" as an array of unsigned integers",
                         line_no);
        }
        std::string text = decode(ids, vs);
        if (!utf8::is_valid(text)) {
          throw JobError(kExitContract, "invalid_utf8",
                         "line " + std::to_string(line_no) +
                             ": ids decode to bytes that are not valid UTF-8",
                         line_no);
        }
        return nlohmann::json{{"id", j.at("id")}, {"text", std::move(text)}}.dump();
      },
      [&](std::string&& line, std::size_t) { out.stream() << line << '\n'; });
  out.commit();
  return {c.output};
}

inline std::vector<std::string> cmd_train_bpe(const JobConfig& c, std::ostream& err) {
  require_output(c);
  const auto modality = parse_modality(c.modality);
  if (!modality) {
    throw JobError(kExitUsage, "usage",
                   "--modality must be one of TEXT, SMILES, NUCLEOTIDE, PROTEIN");
  }
  if (c.target_size == 0) throw JobError(kExitUsage, "usage", "--target-size is required");
  const VocabularySet base = single_vocab(c);
  std::vector<std::string> corpus;
  map_jsonl<std::string>(
      c.input, 1,
      [&](const nlohmann::json& j, std::size_t line_no) {
        return require_text(j, line_no);
      },
      [&](std::string&& text, std::size_t) { corpus.push_back(std::move(text)); });
  log(LogLevel::kInfo, err,
      "training " + c.modality + " BPE on " + std::to_string(corpus.size()) + " strings");
  Vocabulary v;
  try {
    v = train_bpe(corpus, *modality, c.target_size);
  } catch (const Error& e) {
    throw JobError(kExitContract, std::string(to_string(e.code())), e.what());
  }
  log(LogLevel::kInfo, err, "learned " + std::to_string(v.merges().size()) + " merges");
  write_file_atomic(c.output, base.with(std::move(v)).serialize());
  return {c.output};
}

inline std::vector<std::string> cmd_cr_bench(const JobConfig& c, std::ostream& out_stream) {
  require_output(c);
  if (c.vocab.empty()) throw JobError(kExitUsage, "usage", "cr-bench needs --vocab");
  if (!c.names.empty() && c.names.size() != c.vocab.size()) {
    throw JobError(kExitUsage, "usage", "--name must be given once per --vocab");
  }
  const DetectorConfig rules = load_rules(c);
  std::vector<VocabularySet> sets;
  std::vector<CRAccumulator> accs;
  sets.reserve(c.vocab.size());
  for (const auto& p : c.vocab) sets.push_back(load_vocab(p));
  const CROptions options{c.count_specials};
  for (const auto& vs : sets) accs.emplace_back(vs, rules, options);

  using Counts = std::pair<std::string, std::vector<DocumentCounts>>;
  map_jsonl<Counts>(
      c.input, c.workers,
      [&](const nlohmann::json& j, std::size_t line_no) {
        Counts r;
        r.first = require_text(j, line_no);
        if (r.first.empty()) {
          throw JobError(kExitContract, "contract_violation",
                         "line " + std::to_string(line_no) + ": empty document",
                         line_no);
        }
        for (const auto& vs : sets) {
          r.second.push_back(count_document(r.first, vs, rules, options));
        }
        return r;
      },
      [&](Counts&& r, std::size_t) {
        for (std::size_t k = 0; k < accs.size(); ++k) accs[k].add(r.first, r.second[k]);
      });

  std::vector<CRReport> reports;
  try {
    for (std::size_t k = 0; k < accs.size(); ++k) {
      const std::string name = c.names.empty()
                                   ? std::filesystem::path(c.vocab[k]).stem().string()
                                   : c.names[k];
      reports.push_back(accs[k].report(name));
    }
  } catch (const Error& e) {
    throw JobError(kExitContract, std::string(to_string(e.code())), e.what());
  }

  nlohmann::json j;
  j["reports"] = nlohmann::json::array();
  for (const auto& r : reports) j["reports"].push_back(r.to_json());
  std::vector<std::string> written{c.output};
  if (reports.size() >= 2) {
    const ComparisonTable table = compare(reports);
    j["comparison"] = table.to_json();
    const std::string text = table.to_text();
    out_stream << text;
    write_file_atomic(c.output + ".table.txt", text);
    written.push_back(c.output + ".table.txt");
  } else {
    j["comparison"] = nullptr;
  }
  write_file_atomic(c.output, j.dump(2) + "\n");
  return written;
}

inline std::vector<std::string> cmd_pack(const JobConfig& c, std::ostream& err) {
  require_output(c);
  if (c.capacity == 0) throw JobError(kExitUsage, "usage", "--capacity is required");
  if (c.window == 0) throw JobError(kExitUsage, "usage", "--window must be >= 1");
  if (c.ranks == 0) throw JobError(kExitUsage, "usage", "--ranks must be >= 1");
  CostModel model{};
  try {
    model = cost_model_from_string(c.cost_model);
  } catch (const Error& e) {
    throw JobError(kExitUsage, "usage", e.what());
  }
  const DetectorConfig rules = load_rules(c);
  std::optional<VocabularySet> vs;

  std::vector<Document> docs;
  map_jsonl<Document>(
      c.input, 1,
      [&](const nlohmann::json& j, std::size_t line_no) {
        Document d{id_string(j.at("id")), 0};
        if (auto it = j.find("length"); it != j.end()) {
          if (!it->is_number_unsigned()) {
            throw JobError(kExitInput, "malformed_input",
                           "line " + std::to_string(line_no) +
                               ": \"length\" must be an unsigned integer",
                           line_no);
          }
          d.length = it->get<std::uint64_t>();
        } else {
          if (!vs) vs = single_vocab(c);
          d.length = token_count(require_text(j, line_no), *vs, rules);
        }
        return d;
      },
      [&](Document&& d, std::size_t) { docs.push_back(std::move(d)); });

  PackingPlan plan;
  BalanceStats vlbs, unsorted;
  try {
    plan = make_plan(docs, c.capacity, c.window, c.seed, model);
    PackingPlan baseline = make_plan(docs, c.capacity, c.window, c.seed, model, false);
    vlbs = simulate_ranks(plan, c.ranks);
    unsorted = simulate_ranks(baseline, c.ranks);
  } catch (const Error& e) {
    throw JobError(kExitContract, std::string(to_string(e.code())), e.what());
  }
  log(LogLevel::kInfo, err,
      std::to_string(docs.size()) + " documents in " +
          std::to_string(plan.buckets.size()) + " buckets");

  AtomicFile out(c.output);
  for (std::size_t i = 0; i < plan.buckets.size(); ++i) {
    const Bucket& b = plan.buckets[i];
    out.stream() << nlohmann::json{{"bucket", i},
                                   {"doc_ids", b.doc_ids},
                                   {"max_len", b.max_len}}
                        .dump()
                 << '\n';
  }
  out.commit();

  const std::string stats_path = c.stats.empty() ? c.output + ".stats.json" : c.stats;
  nlohmann::json s = {{"window", c.window},
                      {"seed", c.seed},
                      {"capacity", c.capacity},
                      {"cost_model", std::string(to_string(model))},
                      {"buckets", plan.buckets.size()},
                      {"documents", docs.size()},
                      {"vlbs", stats_json(vlbs)},
                      {"unsorted", stats_json(unsorted)}};
  write_file_atomic(stats_path, s.dump(2) + "\n");
  return {c.output, stats_path};
}

}  // namespace detail

inline nlohmann::json manifest_json(const JobConfig& c,
                                    const std::vector<std::string>& outputs) {
  nlohmann::json m;
  m["tool"] = "scitok";
  m["version"] = std::string(kVersion);
  m["config"] = c.to_json();
  m["inputs"] = nlohmann::json::array();
  for (const auto& p : detail::job_inputs(c)) {
    m["inputs"].push_back({{"path", p}, {"fnv1a64", hex64(hash_file(p))}});
  }
  m["outputs"] = nlohmann::json::array();
  for (const auto& p : outputs) {
    m["outputs"].push_back({{"path", p}, {"fnv1a64", hex64(hash_file(p))}});
  }
  return m;
}

inline std::string manifest_path(const std::string& output) {
  return output + ".manifest.json";
}

/// Runs one job. Returns the process exit status; on failure a JSON error
/// object is written to `err`.
inline int run(const JobConfig& c, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  try {
    std::vector<std::string> outputs;
    if (c.command == "detect") {
      outputs = detail::cmd_detect(c, err);
    } else if (c.command == "encode") {
      outputs = detail::cmd_encode(c, err);
    } else if (c.command == "decode") {
      outputs = detail::cmd_decode(c, err);
    } else if (c.command == "train-bpe") {
      outputs = detail::cmd_train_bpe(c, err);
    } else if (c.command == "cr-bench") {
      outputs = detail::cmd_cr_bench(c, out);
    } else if (c.command == "pack") {
      outputs = detail::cmd_pack(c, err);
    } else {
      throw JobError(kExitUsage, "usage", "unknown command '" + c.command + "'");
    }
    write_file_atomic(manifest_path(c.output), manifest_json(c, outputs).dump(2) + "\n");
    return kExitOk;
  } catch (const JobError& e) {
    err << e.dump() << '\n';
    return e.exit_code();
  } catch (const Error& e) {
    const JobError je(detail::is_input_error(e.code()) ? kExitInput : kExitContract,
                      std::string(to_string(e.code())), e.what());
    err << je.dump() << '\n';
    return je.exit_code();
  } catch (const std::exception& e) {
    const JobError je(kExitContract, "internal", e.what());
    err << je.dump() << '\n';
    return je.exit_code();
  }
}

/// Re-executes the job recorded in a manifest and checks that every output
/// hashes to the recorded value. Returns kExitMismatch if any differs.
inline int rerun(const std::string& manifest, std::ostream& out = std::cout,
                 std::ostream& err = std::cerr) {
  nlohmann::json m;
  try {
    std::ifstream in(manifest, std::ios::binary);
    if (!in) throw JobError(kExitInput, "missing_input", "cannot open manifest " + manifest);
    m = nlohmann::json::parse(in);
  } catch (const JobError& e) {
    err << e.dump() << '\n';
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    err << JobError(kExitInput, "malformed_input", e.what()).dump() << '\n';
    return kExitInput;
  }
  const nlohmann::json recorded = m.at("outputs");
  const int status = run(JobConfig::from_json(m.at("config")), out, err);
  if (status != kExitOk) return status;
  nlohmann::json report = {{"manifest", manifest}, {"outputs", nlohmann::json::array()}};
  bool all = true;
  for (const auto& o : recorded) {
    const std::string path = o.at("path").get<std::string>();
    const std::string now = hex64(hash_file(path));
    const bool same = now == o.at("fnv1a64").get<std::string>();
    all = all && same;
    report["outputs"].push_back({{"path", path}, {"fnv1a64", now}, {"reproduced", same}});
  }
  report["reproduced"] = all;
  out << report.dump() << '\n';
  return all ? kExitOk : kExitMismatch;
}

}  // namespace scitok::cli
