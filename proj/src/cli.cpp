#include "seqmine/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <sstream>
#include <thread>

#include "seqmine/ingest.hpp"
#include "seqmine/kernels.hpp"
#include "seqmine/miner.hpp"
#include "seqmine/rules.hpp"
#include "seqmine/testkit.hpp"

#ifndef SEQMINE_VERSION
#define SEQMINE_VERSION "0.0.0"
#endif

namespace seqmine::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct MissingInput : Error {
  using Error::Error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("cannot open '" + path + "'");
  return in;
}

// Output files are written whole, so a failed run leaves no partial file.
void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content) || !out.flush()) throw MissingInput("cannot write '" + path + "'");
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// Sidecar describing how an output file was produced. Holds no timestamps,
// so reruns reproduce it byte for byte.
void write_run_manifest(const std::string& path, const std::string& command, json config,
                        const std::vector<std::string>& inputs) {
  json run;
  run["command"] = command;
  run["tool_version"] = SEQMINE_VERSION;
  run["config"] = std::move(config);
  json digests = json::object();
  for (const std::string& in : inputs) digests[in] = file_digest(in);
  run["input_digests"] = std::move(digests);
  write_file(path, run.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Ratio parse_min_conf(const std::string& text) {
  if (trim(text).find('.') == std::string_view::npos) {
    if (parse_uint(text, "min_conf") != 1) throw InputError("min_conf must be a fraction in (0, 1]");
    return Ratio{1, 1};
  }
  const Ratio r = Ratio::parse_decimal(text);
  if (r.num == 0 || r.num > r.den) throw InputError("min_conf must be a fraction in (0, 1]");
  return r;
}

SequenceDatabase load_seqdb(const std::string& path) {
  auto in = open_in(path);
  return read_seqdb(in);
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

int cmd_gen(const GenArgs& a, std::ostream& out, std::ostream&) {
  auto in = open_in(a.config);
  GenConfig config = parse_gen_config(in);
  if (a.seed) config.seed = *a.seed;
  const GeneratedData data = generate(config);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  write_file((dir / "patients.csv").string(), data.patients_csv);
  write_file((dir / "medical.csv").string(), data.medical_csv);
  std::ostringstream manifest;
  write_manifest(manifest, data.manifest);
  write_file((dir / "manifest.txt").string(), manifest.str());
  write_run_manifest((dir / "run.json").string(), "gen",
                     {{"seed", config.seed}, {"n_patients", config.n_patients}, {"planted_rules", config.planted_rules.size()}},
                     {a.config});

  out << "generated " << config.n_patients << " patients into " << a.out_dir << '\n';
  for (const ManifestEntry& m : data.manifest) {
    out << "  planted -> " << m.consequence << ": cohort " << m.cohort_n << ", carriers " << m.carriers
        << ", firings " << m.firings << '\n';
  }
  return kOk;
}

struct IngestArgs {
  std::string patients;
  std::string medical;
  std::string out;
  bool tab = false;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  IngestOptions options;
  options.delimiter = a.tab ? '\t' : ',';
  auto pin = open_in(a.patients);
  auto min = open_in(a.medical);
  const PatientTable patients = parse_patient_table(pin, options);
  const MedicalTable medical = parse_medical_table(min, options);

  constexpr std::size_t kShown = 20;
  auto show = [&](const std::string& file, const std::vector<Diagnostic>& diags) {
    for (std::size_t i = 0; i < diags.size() && i < kShown; ++i) {
      err << file << ":" << diags[i].line << ": " << diags[i].message << '\n';
    }
    if (diags.size() > kShown) err << file << ": " << diags.size() - kShown << " more diagnostics\n";
  };
  show(a.patients, patients.diagnostics);
  show(a.medical, medical.diagnostics);

  const IngestResult result = build_sequences(patients, medical);
  std::ostringstream text;
  write_seqdb(text, result.db);
  write_file(a.out, text.str());
  write_run_manifest(a.out + ".run.json", "ingest", {{"delimiter", a.tab ? "tab" : "comma"}}, {a.patients, a.medical});

  const IngestReport& r = result.report;
  out << "patients_in\t" << r.patients_in << '\n'
      << "patients_out\t" << r.patients_out << '\n'
      << "events_in\t" << r.events_in << '\n'
      << "events_kept\t" << r.events_kept << '\n'
      << "events_dropped_bad_date\t" << r.events_dropped_bad_date << '\n'
      << "events_merged_duplicate\t" << r.events_merged_duplicate << '\n'
      << "events_dropped_orphan\t" << r.events_dropped_orphan << '\n';
  return kOk;
}

struct MineArgs {
  std::string seqdb;
  std::string out;
  std::string min_sup = "0.001";
  std::size_t max_len = 5;
  std::size_t max_elems = 5;
  unsigned threads = 0;
  bool emit_demographic_only = false;
};

int cmd_mine(const MineArgs& a, std::ostream& out, std::ostream& err) {
  MinerConfig config;
  config.min_sup = MinSupport::parse(a.min_sup);
  if (a.max_len == 0 || a.max_elems == 0) throw InputError("--max-len and --max-elems must be at least 1");
  config.max_pattern_length = a.max_len;
  config.max_elements = a.max_elems;
  config.threads = a.threads ? a.threads : default_threads();
  config.emit_demographic_only_patterns = a.emit_demographic_only;

  const SequenceDatabase db = load_seqdb(a.seqdb);
  if (db.empty()) throw MissingInput("'" + a.seqdb + "' holds no sequences");

  const auto start = std::chrono::steady_clock::now();
  const FrequentPatternSet set = mine(db, config);
  err << "mine: " << std::fixed << std::setprecision(3) << seconds_since(start) << " s ("
      << kernels::name(kernels::active()) << " kernels, " << config.threads << " threads)\n";

  std::ostringstream text;
  write_freq(text, set, db.symbols());
  write_file(a.out, text.str());
  write_run_manifest(a.out + ".run.json", "mine",
                     {{"min_sup", a.min_sup},
                      {"resolved_min_sup", set.min_sup()},
                      {"max_len", a.max_len},
                      {"max_elems", a.max_elems},
                      {"emit_demographic_only", a.emit_demographic_only}},
                     {a.seqdb});

  const auto listed = listing(set, db.symbols(), a.emit_demographic_only);
  out << set.size() << " frequent patterns (min_sup " << set.min_sup() << " of " << set.db_size() << "), "
      << listed.size() << " listed";
  if (!a.emit_demographic_only) out << ", " << set.size() - listed.size() << " demographic-only";
  out << '\n';
  return kOk;
}

struct RulesArgs {
  std::string freq;
  std::string out;
  std::string min_conf = "0.1";
  std::string report;
};

int cmd_rules(const RulesArgs& a, std::ostream& out, std::ostream&) {
  const Ratio min_conf = parse_min_conf(a.min_conf);
  auto in = open_in(a.freq);
  const FreqFile freq = read_freq(in);
  const RuleSet rules = induce_rules(freq.patterns, min_conf);

  std::ostringstream text;
  write_rules(text, rules, freq.symbols);
  write_file(a.out, text.str());
  write_run_manifest(a.out + ".run.json", "rules", {{"min_conf", a.min_conf}}, {a.freq});
  if (!a.report.empty()) {
    std::ostringstream report;
    write_report(report, rules, freq.symbols);
    write_file(a.report, report.str());
  }
  out << rules.rules.size() << " rules at min_conf " << a.min_conf << '\n';
  return kOk;
}

struct VerifyArgs {
  std::string seqdb;
  std::string min_sup = "1";
  std::size_t max_len = 4;
  std::size_t max_elems = 4;
  bool corrupt_for_test = false;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream&) {
  const MinSupport min_sup = MinSupport::parse(a.min_sup);
  if (a.max_len == 0 || a.max_elems == 0) throw InputError("--max-len and --max-elems must be at least 1");
  const SequenceDatabase db = load_seqdb(a.seqdb);
  if (db.empty()) throw MissingInput("'" + a.seqdb + "' holds no sequences");

  const std::size_t resolved = min_sup.resolve(db.size());
  const FrequentPatternSet expected = oracle_mine(db, resolved, a.max_len, a.max_elems);
  MinerConfig config;
  config.min_sup = MinSupport::absolute(resolved);
  config.max_pattern_length = a.max_len;
  config.max_elements = a.max_elems;
  config.threads = 1;
  FrequentPatternSet got = mine(db, config);
  if (a.corrupt_for_test && got.size() > 0) {
    std::vector<SupportedPattern> bent(got.patterns().begin(), got.patterns().end());
    ++bent.back().support;
    got = FrequentPatternSet(std::move(bent), got.db_size(), got.min_sup());
  }

  const auto e = expected.patterns();
  const auto g = got.patterns();
  for (std::size_t i = 0; i < std::max(e.size(), g.size()); ++i) {
    if (i < e.size() && i < g.size() && e[i].pattern == g[i].pattern && e[i].support == g[i].support) continue;
    out << "MISMATCH at position " << i << ":\n";
    if (i < e.size()) out << "  oracle: " << e[i].support << '\t' << render_pattern(e[i].pattern, db.symbols()) << '\n';
    else out << "  oracle: <none>\n";
    if (i < g.size()) out << "  miner:  " << g[i].support << '\t' << render_pattern(g[i].pattern, db.symbols()) << '\n';
    else out << "  miner:  <none>\n";
    return kVerifyMismatch;
  }
  out << "OK: " << e.size() << " patterns identical (min_sup " << resolved << ", max_len " << a.max_len << ")\n";
  return kOk;
}

int cmd_stats(const std::string& path, std::ostream& out) {
  std::string header;
  {
    auto in = open_in(path);
    std::getline(in, header);
  }
  header = std::string(trim(header));
  auto in = open_in(path);
  if (header == "#seqdb v1") {
    const SequenceDatabase db = read_seqdb(in);
    std::size_t baskets = 0, incidences = 0;
    for (const Sequence& s : db.sequences()) {
      baskets += s.size();
      for (const Event& e : s.events()) incidences += e.basket.size();
    }
    const double n = static_cast<double>(std::max<std::size_t>(1, db.size()));
    out << "sequences\t" << db.size() << "\nitems\t" << db.symbols().size() << "\nbaskets\t" << baskets
        << "\nmean_baskets_per_sequence\t" << format_double(static_cast<double>(baskets) / n)
        << "\nmean_items_per_basket\t"
        << format_double(baskets ? static_cast<double>(incidences) / static_cast<double>(baskets) : 0.0) << '\n';
  } else if (header == "#freq v1") {
    const FreqFile f = read_freq(in);
    std::map<std::size_t, std::size_t> by_k;
    std::size_t demographic = 0;
    for (const SupportedPattern& p : f.patterns.patterns()) {
      ++by_k[cardinality(p.pattern)];
      demographic += is_demographic_only(p.pattern, f.symbols);
    }
    out << "db_size\t" << f.patterns.db_size() << "\nmin_sup\t" << f.patterns.min_sup() << "\npatterns\t"
        << f.patterns.size() << "\ndemographic_only\t" << demographic << '\n';
    for (const auto& [k, count] : by_k) out << "cardinality_" << k << '\t' << count << '\n';
  } else if (header == "#rules v1") {
    const RulesFile f = read_rules(in);
    out << "rules\t" << f.rules.rules.size() << '\n';
    for (std::size_t i = 0; i < f.rules.rules.size() && i < 10; ++i) {
      const Rule& r = f.rules.rules[i];
      out << format_double(r.confidence) << '\t' << render_pattern(r.antecedent, f.symbols) << " => "
          << render_pattern(Pattern{r.consequent}, f.symbols) << '\n';
    }
  } else if (header == "#manifest v1") {
    for (const ManifestEntry& m : read_manifest(in)) {
      out << m.consequence << "\tcohort " << m.cohort_n << "\tcarriers " << m.carriers << "\tfirings " << m.firings
          << "\tratio " << format_double(m.realized_ratio()) << '\n';
    }
  } else {
    throw FormatError("unrecognized file header '" + header + "'", 1);
  }
  return kOk;
}

}  // namespace

std::string file_digest(const std::string& path) {
  auto in = open_in(path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"seqmine: sequential pattern and rule mining over patient event histories", "seqmine"};
  app.require_subcommand(1);
  std::string kernel = "auto";
  app.add_option("--kernel", kernel, "Join kernels: auto, scalar or avx2");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic patient/medical tables with planted rules");
  gen_cmd->add_option("config", gen.config, "Generator config (key = value)")->required();
  gen_cmd->add_option("out_dir", gen.out_dir, "Output directory")->required();
  gen_cmd->add_option("--seed", gen.seed, "Override the config seed");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build a #seqdb v1 file from patient and medical tables");
  ingest_cmd->add_option("patients", ingest.patients)->required();
  ingest_cmd->add_option("medical", ingest.medical)->required();
  ingest_cmd->add_option("out", ingest.out)->required();
  ingest_cmd->add_flag("--tab", ingest.tab, "Tab-delimited input");

  MineArgs mine_args;
  auto* mine_cmd = app.add_subcommand("mine", "Mine frequent sequences into a #freq v1 file");
  mine_cmd->add_option("seqdb", mine_args.seqdb)->required();
  mine_cmd->add_option("out", mine_args.out)->required();
  mine_cmd->add_option("--min-sup", mine_args.min_sup, "Absolute count, or a fraction when written with a '.'")
      ->capture_default_str();
  mine_cmd->add_option("--max-len", mine_args.max_len, "Cardinality cap")->capture_default_str();
  mine_cmd->add_option("--max-elems", mine_args.max_elems, "Element count cap")->capture_default_str();
  mine_cmd->add_option("--threads", mine_args.threads, "Worker threads (default: available parallelism)");
  mine_cmd->add_flag("--emit-demographic-only", mine_args.emit_demographic_only,
                     "List patterns made only of yob:/gender: items");

  RulesArgs rules_args;
  auto* rules_cmd = app.add_subcommand("rules", "Induce sequential rules from a #freq v1 file");
  rules_cmd->add_option("freq", rules_args.freq)->required();
  rules_cmd->add_option("out", rules_args.out)->required();
  rules_cmd->add_option("--min-conf", rules_args.min_conf)->capture_default_str();
  rules_cmd->add_option("--report", rules_args.report, "Write repeat chains, gender deltas and yob profiles here");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Compare the miner against the brute-force oracle");
  verify_cmd->add_option("seqdb", verify.seqdb)->required();
  verify_cmd->add_option("--min-sup", verify.min_sup)->capture_default_str();
  verify_cmd->add_option("--max-len", verify.max_len)->capture_default_str();
  verify_cmd->add_option("--max-elems", verify.max_elems)->capture_default_str();
  verify_cmd->add_flag("--corrupt-for-test", verify.corrupt_for_test)->group("");

  std::string stats_path;
  auto* stats_cmd = app.add_subcommand("stats", "Summarize a seqdb, freq, rules or manifest file");
  stats_cmd->add_option("file", stats_path)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadParameter;
  }

  try {
    kernels::select(kernels::parse_backend(kernel));
    if (*gen_cmd) return cmd_gen(gen, out, err);
    if (*ingest_cmd) return cmd_ingest(ingest, out, err);
    if (*mine_cmd) return cmd_mine(mine_args, out, err);
    if (*rules_cmd) return cmd_rules(rules_args, out, err);
    if (*verify_cmd) return cmd_verify(verify, out, err);
    if (*stats_cmd) return cmd_stats(stats_path, out);
  } catch (const MissingInput& e) {
    err << "error: " << e.what() << '\n';
    return kMissingInput;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kFormatError;
  } catch (const LimitError& e) {
    err << "limit: " << e.what() << '\n';
    return kOracleLimit;
  } catch (const ConsistencyError& e) {
    err << "corrupt input: " << e.what() << '\n';
    return kCorruptInput;
  } catch (const InputError& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kBadParameter;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kMissingInput;
  }
  return kBadParameter;
}

}  // namespace seqmine::cli
