//
// Copyright 2026 The dpkit Authors
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
//

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "config.h"
#include "dpkit/budget.h"
#include "dpkit/divergence.h"
#include "dpkit/rnm.h"

namespace dpkit::cli {
namespace {

constexpr int kPilotDraws = 2000;
constexpr int kEventGrid = 10;

struct Flags {
  std::string config;
  std::string dataset;
  std::string out;
  std::string method = "auto";
  uint64_t seed = 0;
  int64_t samples = -1;  // command-specific default when negative
  std::optional<double> tol;
  double alpha = 1e-3;
};

void AddCommonFlags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "JSON configuration file");
  cmd->add_option("--dataset", flags.dataset, "dataset JSON file");
  cmd->add_option("--out", flags.out, "write the report here");
  cmd->add_option("--method", flags.method,
                  "auto, exact, quadrature or monte-carlo")
      ->check(CLI::IsMember({"auto", "exact", "quadrature", "monte-carlo"}));
  cmd->add_option("--seed", flags.seed, "random seed");
  cmd->add_option("--samples", flags.samples, "sample count");
  cmd->add_option("--tol", flags.tol, "numerical tolerance");
  cmd->add_option("--alpha", flags.alpha, "statistical failure probability");
}

// Thrown from command bodies and mapped to an exit code in RunCli.
struct CommandError {
  int code;
  std::string message;
};

[[noreturn]] void Fail(const absl::Status& status) {
  throw CommandError{kExitUsage, std::string(status.message())};
}

template <typename T>
T Unwrap(absl::StatusOr<T> v) {
  if (!v.ok()) Fail(v.status());
  return *std::move(v);
}

Json LoadConfig(const Flags& flags) {
  if (flags.config.empty()) {
    throw CommandError{kExitUsage, "--config is required"};
  }
  return Unwrap(ReadJsonFile(flags.config));
}

const Json& Section(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw CommandError{kExitUsage,
                       absl::StrCat("config is missing '", key, "'")};
  }
  return j.at(key);
}

double NumberAt(const Json& j, const char* key) {
  const Json& v = Section(j, key);
  if (!v.is_number()) {
    throw CommandError{kExitUsage, absl::StrCat("'", key, "' must be a number")};
  }
  return v.get<double>();
}

Json ToJson(const Dataset& d) {
  return Json(std::vector<int64_t>(d.counts().begin(), d.counts().end()));
}

Json ToJson(const Outcome& o) {
  if (const auto* s = std::get_if<std::string>(&o)) return Json(*s);
  return Json(std::get<std::vector<double>>(o));
}

Json ToJson(const DpWitness& w) {
  Json j;
  j["from"] = ToJson(w.from);
  j["to"] = ToJson(w.to);
  j["event"] = w.event;
  j["prob_from"] = w.prob_from;
  j["prob_to"] = w.prob_to;
  j["gap"] = w.gap;
  return j;
}

void Emit(const Flags& flags, const std::string& text, std::ostream& out) {
  if (flags.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(flags.out, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw CommandError{kExitUsage, absl::StrCat("cannot write ", flags.out)};
  }
  file << text;
}

void EmitReport(const Flags& flags, const Json& report, std::ostream& out) {
  Emit(flags, report.dump(2) + "\n", out);
}

// ---------------------------------------------------------------- sample

int CmdSample(const Flags& flags, std::ostream& out) {
  const Json config = LoadConfig(flags);
  const Mechanism mech = Unwrap(ParseMechanism(
      config.contains("mechanism") ? config.at("mechanism") : config));
  Json dataset_json;
  if (!flags.dataset.empty()) {
    dataset_json = Unwrap(ReadJsonFile(flags.dataset));
  } else {
    dataset_json = Section(config, "dataset");
  }
  const Dataset d = Unwrap(ParseDataset(dataset_json));
  const int64_t n = flags.samples < 0 ? 10 : flags.samples;

  RandomSource rng(flags.seed);
  std::string text;
  Json header;
  header["seed"] = flags.seed;
  header["mechanism"] = mech.name();
  header["samples"] = n;
  text += header.dump() + "\n";
  for (int64_t k = 0; k < n; ++k) {
    Json line;
    line["output"] = ToJson(Unwrap(mech.Sample(d, rng)));
    text += line.dump() + "\n";
  }
  Emit(flags, text, out);
  return kExitPass;
}

// ------------------------------------------------------------ divergence

struct SamplerView {
  Sampler sampler;
  OutputKind kind;
  size_t dim = 0;
  std::vector<std::string> labels;
};

SamplerView ViewOf(const DistributionSpec& spec) {
  if (const auto* d = std::get_if<DiscreteDistribution>(&spec)) {
    return {[d = *d](RandomSource& rng) { return Outcome(d.Sample(rng)); },
            OutputKind::kLabel, 0, d->Labels()};
  }
  if (const auto* lap = std::get_if<LaplaceDistribution>(&spec)) {
    return {[lap = *lap](RandomSource& rng) {
              return Outcome(std::vector<double>{LaplaceSample(lap, rng)});
            },
            OutputKind::kVector, 1, {}};
  }
  const auto& s = std::get<SamplerSpec>(spec);
  SamplerView view{[s](RandomSource& rng) {
                     return s.mechanism.Sample(s.dataset, rng).value();
                   },
                   s.mechanism.output_kind(), s.mechanism.output_dim(), {}};
  if (view.kind == OutputKind::kLabel) {
    if (!s.mechanism.output_labels()) {
      throw CommandError{kExitUsage, absl::StrCat("mechanism ",
                                                  s.mechanism.name(),
                                                  " has no finite label set")};
    }
    view.labels = *s.mechanism.output_labels();
  }
  return view;
}

std::vector<Event> EventsFor(const SamplerView& mu, const SamplerView& nu,
                             const RandomSource& rng) {
  if (mu.kind != nu.kind || mu.dim != nu.dim) {
    throw CommandError{kExitUsage, "incompatible distribution pair"};
  }
  if (mu.kind == OutputKind::kLabel) {
    std::set<std::string> all(mu.labels.begin(), mu.labels.end());
    all.insert(nu.labels.begin(), nu.labels.end());
    const std::vector<std::string> labels(all.begin(), all.end());
    return LabelSubsetEvents(labels);
  }
  std::vector<std::vector<double>> pilot(mu.dim);
  RandomSource a = rng.Fork(uint64_t{1} << 40);
  RandomSource b = rng.Fork((uint64_t{1} << 40) + 1);
  for (int k = 0; k < kPilotDraws; ++k) {
    for (const auto& [view, src] :
         {std::pair{&mu, &a}, std::pair{&nu, &b}}) {
      const auto x = std::get<std::vector<double>>(view->sampler(*src));
      for (size_t c = 0; c < mu.dim; ++c) pilot[c].push_back(x[c]);
    }
  }
  std::vector<Event> events;
  for (size_t c = 0; c < mu.dim; ++c) {
    std::vector<Event> e = QuantileIntervalEvents(pilot[c], kEventGrid, c);
    events.insert(events.end(), e.begin(), e.end());
  }
  return events;
}

int CmdDivergence(const Flags& flags, std::ostream& out) {
  const Json config = LoadConfig(flags);
  const double eps = NumberAt(config, "epsilon");
  const DistributionSpec mu =
      Unwrap(ParseDistributionSpec(Section(config, "mu")));
  const DistributionSpec nu =
      Unwrap(ParseDistributionSpec(Section(config, "nu")));

  const auto* dmu = std::get_if<DiscreteDistribution>(&mu);
  const auto* dnu = std::get_if<DiscreteDistribution>(&nu);
  const auto* lmu = std::get_if<LaplaceDistribution>(&mu);
  const auto* lnu = std::get_if<LaplaceDistribution>(&nu);
  const bool exact_ok = dmu && dnu;
  const bool quad_ok =
      lmu && lnu && !lmu->IsPointMass() && !lnu->IsPointMass();

  std::string method = flags.method;
  if (method == "auto") {
    method = exact_ok ? "exact" : quad_ok ? "quadrature" : "monte-carlo";
  }
  Json report;
  report["seed"] = flags.seed;
  DivergenceResult result;
  std::optional<MonteCarloDivergence> mc;
  if (method == "exact") {
    if (!exact_ok) {
      throw CommandError{kExitUsage, "exact method needs two discrete tables"};
    }
    result = Unwrap(DivergenceDiscrete(*dmu, *dnu, eps));
  } else if (method == "quadrature") {
    if (!quad_ok) {
      throw CommandError{kExitUsage,
                         "quadrature needs two non-degenerate laplace specs"};
    }
    result = Unwrap(DivergenceLaplace(*lmu, *lnu, eps, flags.tol.value_or(1e-9)));
  } else {
    const SamplerView vmu = ViewOf(mu);
    const SamplerView vnu = ViewOf(nu);
    const RandomSource rng(flags.seed);
    const std::vector<Event> events = EventsFor(vmu, vnu, rng);
    MonteCarloOptions options{
        .samples = flags.samples < 0 ? 100'000 : flags.samples,
        .alpha = flags.alpha};
    mc = Unwrap(DivergenceMonteCarlo(vmu.sampler, vnu.sampler, events, eps,
                                     options, rng));
    result = mc->result;
  }
  report["epsilon"] = result.epsilon;
  report["value"] = result.value;
  report["method"] = std::string(DivergenceMethodName(result.method));
  report["error_bound"] = result.error_bound;
  if (mc) {
    report["samples"] = flags.samples < 0 ? 100'000 : flags.samples;
    report["alpha"] = flags.alpha;
    report["lower"] = mc->lower;
    report["upper"] = mc->upper;
    if (mc->witness) {
      report["witness"] = {{"event", mc->witness->event},
                           {"mu_hat", mc->witness->mu_hat},
                           {"nu_hat", mc->witness->nu_hat}};
    }
  }
  EmitReport(flags, report, out);
  return kExitPass;
}

// ----------------------------------------------------------------- audit

int CmdAudit(const Flags& flags, std::ostream& out) {
  const Json config = LoadConfig(flags);
  const Mechanism mech = Unwrap(ParseMechanism(Section(config, "mechanism")));
  const AdjacencySpec adj = Unwrap(ParseAdjacency(Section(config, "adjacency")));
  const PrivacyBudget budget = Unwrap(ParseBudget(Section(config, "budget")));
  if (adj.n != mech.input_length()) {
    throw CommandError{kExitUsage,
                       absl::StrCat("adjacency is over n = ", adj.n,
                                    " but the mechanism reads ",
                                    mech.input_length(), " types")};
  }
  const std::vector<DatasetPair> pairs =
      Unwrap(EnumerateAdjacentPairs(adj.n, adj.max_entry, adj.radius));

  std::string method = flags.method;
  if (method == "auto") {
    method = mech.has_pmf()               ? "exact"
             : mech.has_laplace_density() ? "quadrature"
                                          : "monte-carlo";
  }
  Json report;
  report["seed"] = flags.seed;
  report["mechanism"] = mech.name();
  report["method"] = method;
  report["epsilon"] = budget.epsilon();
  report["delta"] = budget.delta();

  Verdict verdict;
  std::optional<DpWitness> witness;
  if (method == "exact") {
    if (!mech.has_pmf()) {
      throw CommandError{kExitUsage, "mechanism has no exact distribution"};
    }
    const ExactDpReport r = Unwrap(CheckDpExact(mech, pairs, budget));
    verdict = r.passed ? Verdict::kPass : Verdict::kViolation;
    report["pairs_checked"] = r.pairs_checked;
    report["max_divergence"] = r.max_divergence;
    witness = r.witness;
  } else if (method == "quadrature") {
    if (!mech.has_laplace_density()) {
      throw CommandError{kExitUsage, "mechanism has no laplace density"};
    }
    const DensityDpReport r = Unwrap(CheckLaplaceMechanismDp(
        mech, pairs, budget, flags.tol.value_or(1e-9)));
    verdict = r.verdict;
    report["pairs_checked"] = r.pairs_checked;
    report["max_certified_epsilon"] = r.max_certified_epsilon;
    witness = r.witness;
  } else {
    StatisticalAuditOptions options{
        .samples = flags.samples < 0 ? 100'000 : flags.samples,
        .alpha = flags.alpha,
        .seed = flags.seed};
    const StatisticalAuditReport r =
        Unwrap(CheckDpStatistical(mech, pairs, budget, options));
    verdict = r.verdict;
    report["samples"] = options.samples;
    report["alpha"] = options.alpha;
    report["pairs_checked"] = r.audits.size();
    double lower = 0.0, upper = 0.0;
    for (const PairAudit& a : r.audits) {
      lower = std::max(lower, a.lower);
      upper = std::max(upper, a.upper);
    }
    report["max_divergence_lower"] = lower;
    report["max_divergence_upper"] = upper;
    witness = r.witness;
  }
  report["verdict"] = std::string(VerdictName(verdict));
  if (witness) report["witness"] = ToJson(*witness);
  EmitReport(flags, report, out);
  return ExitCodeFor(verdict);
}

// ------------------------------------------------------------ rnm-verify

int CmdRnmVerify(const Flags& flags, std::ostream& out) {
  Json config = Json::object();
  if (!flags.config.empty()) config = LoadConfig(flags);
  RnmVerifyOptions options;
  try {
    options.n = config.value("n", options.n);
    options.max_entry = config.value("max_entry", options.max_entry);
    options.max_queries = config.value("max_queries", options.max_queries);
    options.eps = config.value("epsilon", options.eps);
    options.tol = config.value("tol", options.tol);
    options.budget = config.value("budget", options.budget);
    options.keep_all_cells = config.value("all_cells", true);
  } catch (const Json::exception& e) {
    throw CommandError{kExitUsage, absl::StrCat("malformed config: ", e.what())};
  }
  if (flags.tol) options.tol = *flags.tol;
  if (options.n == 0) throw CommandError{kExitUsage, "n must be >= 1"};

  const auto families = DefaultRnmFamilies(options.n, options.max_queries);
  const RnmVerifyReport r = Unwrap(VerifyRnmDpFiner(families, options));

  Json report;
  report["seed"] = flags.seed;
  report["n"] = options.n;
  report["max_entry"] = options.max_entry;
  report["max_queries"] = options.max_queries;
  report["epsilon"] = r.eps;
  report["tol"] = options.tol;
  report["finer_bound"] = r.finer_bound;
  report["naive_bound"] =
      std::exp(static_cast<double>(options.max_queries) * r.eps);
  report["max_ratio"] = r.max_ratio;
  report["cells_checked"] = r.cells_checked;
  report["unstable_cells"] = r.unstable_cells;
  report["pass"] = r.pass;
  Json fams = Json::array();
  for (const RnmFamilyReport& f : r.families) {
    Json jf;
    jf["name"] = f.name;
    jf["m"] = f.m;
    jf["predicates"] = f.predicates;
    jf["sensitivity"] = f.sensitivity;
    jf["naive_bound"] = f.naive_bound;
    jf["max_ratio"] = f.max_ratio;
    jf["dichotomy_holds"] = f.dichotomy_holds;
    jf["pass"] = f.pass;
    Json cells = Json::array();
    for (const RnmCell& c : f.cells) {
      cells.push_back({{"from", ToJson(c.from)},
                       {"to", ToJson(c.to)},
                       {"index", c.index},
                       {"p_from", c.p_from},
                       {"p_to", c.p_to},
                       {"ratio", c.ratio},
                       {"pass", c.pass},
                       {"unstable", c.unstable}});
    }
    jf["cells"] = std::move(cells);
    fams.push_back(std::move(jf));
  }
  report["families"] = std::move(fams);
  EmitReport(flags, report, out);
  return r.pass ? kExitPass : kExitViolation;
}

// ------------------------------------------------------------ accountant

int CmdAccountant(const Flags& flags, std::ostream& out) {
  const Json config = LoadConfig(flags);
  const CompositionNode tree = Unwrap(ParseCompositionTree(
      config.contains("tree") ? config.at("tree") : config));
  const PrivacyBudget total = Unwrap(FoldComposition(tree));
  Json report;
  report["seed"] = flags.seed;
  report["epsilon"] = total.epsilon();
  report["delta"] = total.delta();
  EmitReport(flags, report, out);
  return kExitPass;
}

}  // namespace

int ExitCodeFor(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass:
    case Verdict::kNoViolationFound:
      return kExitPass;
    case Verdict::kViolation:
      return kExitViolation;
    case Verdict::kInconclusive:
      return kExitInconclusive;
  }
  return kExitUsage;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"dpkit: differential privacy mechanisms and audits", "dpkit"};
  app.require_subcommand(1);
  Flags flags;
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Flags&, std::ostream&);
  };
  const Command commands[] = {
      {"sample", "draw mechanism outputs as JSON lines", CmdSample},
      {"divergence", "compute the hockey-stick divergence", CmdDivergence},
      {"audit", "check a mechanism against a privacy budget", CmdAudit},
      {"rnm-verify", "verify report noisy max over small instances",
       CmdRnmVerify},
      {"accountant", "fold a composition tree of budgets", CmdAccountant},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    AddCommonFlags(sub, flags);
    subs.emplace_back(sub, &c);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }
  for (const auto& [sub, command] : subs) {
    if (!sub->parsed()) continue;
    try {
      return command->run(flags, out);
    } catch (const CommandError& e) {
      err << "dpkit " << command->name << ": " << e.message << "\n";
      return e.code;
    }
  }
  return kExitUsage;
}

}  // namespace dpkit::cli
