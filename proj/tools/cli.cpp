// Copyright 2026 The qudec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "qudec/qudec.hpp"

namespace qudec::cli {
namespace {

struct Input {
  std::string text;
  std::string digest;
};

/// A path, "-" for stdin, or inline JSON (anything starting with '{' or '[').
Input read_input(const std::string& source) {
  Input in;
  const auto first = source.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (source[first] == '{' || source[first] == '[')) {
    in.text = source;
  } else if (source == "-") {
    in.text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream f(source, std::ios::binary);
    if (!f) throw ParseError("cannot open input '" + source + "'");
    in.text.assign(std::istreambuf_iterator<char>(f), {});
  }
  in.digest = input_digest(in.text);
  return in;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ParseError("cannot open output '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

void emit_json(Json j, const RunMeta& meta, const std::string& path, std::ostream& out) {
  j["meta"] = to_json(meta);
  Output o(path, out);
  o.stream() << j.dump(2) << '\n';
}

std::string csv_comment(const RunMeta& meta) {
  std::string s = "# tool=" + meta.tool + " version=" + kVersion;
  if (meta.seed) s += " seed=" + std::to_string(*meta.seed);
  if (!meta.input_digest.empty()) s += " input_digest=" + meta.input_digest;
  return s + '\n';
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << s << '\n';
  return s;
}

struct Options {
  std::string input;
  std::string output;
  // decompose
  bool no_dedup = false;
  bool keep_trivial = false;
  // regions
  double t2 = 0;
  std::optional<double> t3;
  bool t3max = false;
  bool t3min = false;
  std::int64_t mc = 0;
  // bounds
  bool refined = false;
  std::string order = "xyz";
  std::int64_t oracle = 0;
  // correlate
  std::int64_t n = 2000000;
  std::string measure = "hilbert-schmidt";
  std::vector<int> pair{1, 2};
  std::string which = "smallest";
  int checkpoints = 40;
  std::string format = "json";
  // count
  int d = 3;
  // shared
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

int cmd_decompose(const Options& o, std::ostream& out) {
  const Input in = read_input(o.input);
  const DensityMatrix rho = density_matrix_from_json(parse_json_text(in.text));
  require_valid(rho);
  const QubitEnsemble ens = decompose_recursive(rho, {!o.no_dedup, o.keep_trivial});
  emit_json(to_json(ens), {"decompose", std::nullopt, in.digest}, o.output, out);
  return kOk;
}

int cmd_bloch(const Options& o, std::ostream& out) {
  const Input in = read_input(o.input);
  const DensityMatrix rho = density_matrix_from_json(parse_json_text(in.text));
  require_valid(rho);
  if (rho.dim() < 3) throw DimensionError("bloch needs a state with at least three levels");
  std::vector<BlochPoint> pts;
  if (rho.dim() == 3) {
    const auto c = canonical_representation(rho);
    pts.assign(c.begin(), c.end());
  } else {
    const QubitEnsemble ens = decompose_recursive(rho);
    pts = quorum_representation(ens, select_quorum(ens));
  }
  Output file(o.output, out);
  file.stream() << csv_comment({"bloch", std::nullopt, in.digest}) << bloch_csv(pts);
  return kOk;
}

int cmd_regions(const Options& o, std::ostream& out, std::ostream& err) {
  const int picks = (o.t3 ? 1 : 0) + (o.t3max ? 1 : 0) + (o.t3min ? 1 : 0);
  if (picks > 1) throw OutOfRangeError("choose at most one of --t3, --t3max, --t3min");
  const T3Bounds b = t3_bounds(o.t2);
  const double t3 = o.t3 ? *o.t3 : (o.t3min ? b.min : b.max);
  Json j = to_json(allowed_region(o.t2, t3));
  j["t3_bounds"] = {b.min, b.max};
  std::optional<std::uint64_t> seed;
  if (o.mc > 0) {
    RegionMcOptions mc;
    mc.t3 = t3;
    mc.seed = resolve_seed(o.seed, err);
    mc.threads = o.threads;
    seed = mc.seed;
    RegionMcReport rep = region_montecarlo_check(o.t2, o.mc, mc);
    rep.seed = mc.seed;
    j["montecarlo"] = to_json(rep);
  }
  emit_json(std::move(j), {"regions", seed, ""}, o.output, out);
  return kOk;
}

int cmd_bounds(const Options& o, std::ostream& out, std::ostream& err) {
  const Input in = read_input(o.input);
  const ReconstructionProblem p = problem_from_json(parse_json_text(in.text));
  const BoundSet rough = rough_bounds(p);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["problem"] = to_json(p);
  j["rough"] = to_json(rough);
  if (o.refined) j["refined"] = to_json(refined_bounds(p, o.order));
  std::optional<std::uint64_t> seed;
  if (o.oracle > 0) {
    seed = resolve_seed(o.seed, err);
    j["oracle"] = to_json(feasibility_sample(p, o.oracle, *seed, o.threads), rough);
  }
  emit_json(std::move(j), {"bounds", seed, in.digest}, o.output, out);
  return kOk;
}

int cmd_correlate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.pair.size() != 2) throw OutOfRangeError("--pair takes two labels, e.g. --pair 1,2");
  SamplerConfig cfg{3, parse_measure(o.measure), resolve_seed(o.seed, err)};
  const CorrelationReport rep = eigen_correlation(cfg, o.n, {o.pair[0], o.pair[1]},
                                                  parse_eigen_choice(o.which), o.checkpoints,
                                                  o.threads);
  if (rep.degenerate) err << "warning: degenerate stream (zero variance)\n";
  const RunMeta meta{"correlate", cfg.seed, ""};
  if (o.format == "csv") {
    Output file(o.output, out);
    file.stream() << csv_comment(meta) << correlation_csv(rep);
  } else {
    emit_json(to_json(rep), meta, o.output, out);
  }
  return kOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const Input in = read_input(o.input);
  const Json j = parse_json_text(in.text);
  const ComplexMatrix m = with_parse_errors([&] { return matrix_from_json(j); });
  const double tol = j.is_object() ? j.value("tolerance", kDefaultTolerance) : kDefaultTolerance;
  const ValidationReport rep = validate(m, tol);
  emit_json(to_json(rep), {"validate", std::nullopt, in.digest}, o.output, out);
  return rep.ok() ? kOk : kInvalidState;
}

int cmd_count(const Options& o, std::ostream& out) {
  if (o.d < 2) throw OutOfRangeError("--d must be >= 2");
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["d"] = o.d;
  j["extension_maps"] = extension_count(o.d);
  j["total"] = o.d >= 3 ? Json(count_total(o.d)) : Json(nullptr);
  j["total_premerged"] = o.d >= 4 ? Json(count_total_premerged(o.d)) : Json(nullptr);
  const QubitEnsemble ens = decompose_recursive(DensityMatrix::maximally_mixed(o.d));
  j["trivial"] = ens.trivial_count;
  j["distinct_nontrivial"] = count_distinct(o.d);
  static const std::map<int, std::int64_t> kReference{{3, 6}, {4, 35}, {5, 40}, {6, 267}};
  if (auto it = kReference.find(o.d); it != kReference.end()) {
    j["reference_distinct"] = it->second;
    j["agrees"] = it->second == count_distinct(o.d);
  } else {
    j["reference_distinct"] = nullptr;
    j["agrees"] = nullptr;
  }
  emit_json(std::move(j), {"count", std::nullopt, ""}, o.output, out);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Qudit to qubit decomposition toolkit", "qudec"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", o.output, "Write to this file instead of stdout");
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("input", o.input, "JSON file, '-' for stdin, or inline JSON")->required();
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "RNG seed (generated and printed if omitted)");
    sub->add_option("--threads", o.threads, "Worker cap (0 = hardware concurrency)");
  };

  auto* dec = app.add_subcommand("decompose", "Decompose a state into qubits");
  add_input(dec);
  add_output(dec);
  dec->add_flag("--no-dedup", o.no_dedup, "Keep duplicate qubits");
  dec->add_flag("--dedup", [&](std::int64_t) { o.no_dedup = false; }, "Merge duplicates (default)");
  dec->add_flag("--keep-trivial", o.keep_trivial, "Keep state-independent qubits");

  auto* blo = app.add_subcommand("bloch", "Bloch points of the canonical qubits (CSV)");
  add_input(blo);
  add_output(blo);

  auto* reg = app.add_subcommand("regions", "Allowed Bloch regions at fixed invariants");
  reg->add_option("--t2", o.t2, "Purity Tr(rho^2)")->required();
  reg->add_option("--t3", o.t3, "Tr(rho^3)");
  reg->add_flag("--t3max", o.t3max, "Use the largest admissible t3 (default)");
  reg->add_flag("--t3min", o.t3min, "Use the smallest admissible t3");
  reg->add_option("--mc", o.mc, "Monte-Carlo samples for a containment check");
  add_seed(reg);
  add_output(reg);

  auto* bnd = app.add_subcommand("bounds", "Bounds on unknown entries");
  add_input(bnd);
  bnd->add_flag("--refined", o.refined, "Add the nested qutrit chain");
  bnd->add_option("--order", o.order, "Elimination order, a permutation of xyz");
  bnd->add_option("--oracle", o.oracle, "Rejection-sampling containment check with N draws");
  add_seed(bnd);
  add_output(bnd);

  auto* cor = app.add_subcommand("correlate", "Eigenvalue correlation experiment");
  cor->add_option("--n", o.n, "Number of sampled qutrits");
  cor->add_option("--measure", o.measure, "hilbert-schmidt, bures or pure-haar");
  cor->add_option("--pair", o.pair, "Two qubit labels in 1..6")->delimiter(',')->expected(2);
  cor->add_option("--which", o.which, "smallest or largest");
  cor->add_option("--checkpoints", o.checkpoints, "Number of log-spaced running values");
  cor->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  add_seed(cor);
  add_output(cor);

  auto* val = app.add_subcommand("validate", "Check density-matrix invariants");
  add_input(val);
  add_output(val);

  auto* cnt = app.add_subcommand("count", "Qubit counts for dimension d");
  cnt->add_option("--d", o.d, "Dimension")->required();
  add_output(cnt);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (dec->parsed()) return cmd_decompose(o, out);
    if (blo->parsed()) return cmd_bloch(o, out);
    if (reg->parsed()) return cmd_regions(o, out, err);
    if (bnd->parsed()) return cmd_bounds(o, out, err);
    if (cor->parsed()) return cmd_correlate(o, out, err);
    if (val->parsed()) return cmd_validate(o, out);
    if (cnt->parsed()) return cmd_count(o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const OutOfRangeError& e) {
    err << "error: " << e.what() << '\n';
    return kOutOfRange;
  } catch (const InvalidStateError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidState;
  } catch (const std::invalid_argument& e) {  // dimension and quorum errors
    err << "error: " << e.what() << '\n';
    return kInvalidState;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kOutOfRange;
  }
  return kParseError;
}

}  // namespace qudec::cli
