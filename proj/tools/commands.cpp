#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "blurfitts/correction.hpp"
#include "blurfitts/fitting.hpp"
#include "blurfitts/protocol.hpp"
#include "blurfitts/simulator.hpp"
#include "blurfitts/stats.hpp"
#include "blurfitts/trial_csv.hpp"
#include "json_io.hpp"

namespace blurfitts::cli {

namespace {

using io::json;

class CommandError : public std::runtime_error {
 public:
  CommandError(int code, std::string kind, const std::string& message,
               std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(message), code_(code), kind_(std::move(kind)), line_(line) {}

  int code() const noexcept { return code_; }
  const std::string& kind() const noexcept { return kind_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  int code_;
  std::string kind_;
  std::optional<std::size_t> line_;
};

[[noreturn]] void input_error(const std::string& message,
                              std::optional<std::size_t> line = std::nullopt) {
  throw CommandError(exit_input_error, "input", message, line);
}

[[noreturn]] void computation_error(const std::string& message) {
  throw CommandError(exit_computation_error, "computation", message);
}

void report(std::ostream& err, const std::string& level, const std::string& command,
            const std::string& kind, const std::string& message,
            std::optional<std::size_t> line = std::nullopt, int code = 0) {
  json j{{level, kind}, {"command", command}, {"message", message}};
  if (line) j["line"] = *line;
  if (code) j["exit_code"] = code;
  err << j.dump() << '\n';
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) input_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    input_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) input_error("cannot write '" + path + "'");
  file << content;
}

void write_json(const std::string& path, const json& j, std::ostream& out) {
  write_text(path, j.dump(2) + "\n", out);
}

json bundle(const std::string& command, json config) {
  config["command"] = command;
  return {{"tool", io::tool_info()}, {"config", std::move(config)}};
}

std::uint64_t default_seed() {
  const char* env = std::getenv("BLURFITTS_SEED");
  if (!env || !*env) return 0;
  std::uint64_t seed = 0;
  const std::string_view text(env);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size())
    input_error("BLURFITTS_SEED must be an unsigned integer, got '" + std::string(text) + "'");
  return seed;
}

struct SummaryFile {
  std::vector<ConditionSummary> per_participant;
  std::vector<ConditionSummary> grand_means;
};

SummaryFile load_summaries(const std::string& path) {
  const json j = read_json(path);
  SummaryFile file;
  try {
    for (const auto& row : j.at("summaries")) file.per_participant.push_back(io::summary_from_json(row, false));
    for (const auto& row : j.at("grand_means")) file.grand_means.push_back(io::summary_from_json(row, true));
  } catch (const json::exception& e) {
    input_error("'" + path + "' is not a summaries file: " + e.what());
  } catch (const DomainError& e) {
    input_error("'" + path + "': " + e.what());
  }
  return file;
}

Dataset make_dataset(const std::string& label, const std::vector<ConditionSummary>& rows,
                     Block block, const std::string& participant = {}) {
  Dataset data;
  data.label = label;
  for (const auto& s : rows) {
    if (s.block != block || s.participant != participant || std::isnan(s.mean_mt)) continue;
    data.points.push_back({s.condition, s.mean_mt, s.n_trials});
  }
  return data;
}

std::vector<Dataset> select_datasets(const SummaryFile& file, Block block, bool per_participant,
                                     const std::string& only = {}) {
  std::vector<Dataset> out;
  if (!per_participant && only.empty()) {
    out.push_back(make_dataset("grand mean", file.grand_means, block));
    return out;
  }
  std::set<std::string> ids;
  for (const auto& s : file.per_participant)
    if (s.block == block) ids.insert(s.participant);
  for (const auto& id : ids)
    if (only.empty() || id == only) out.push_back(make_dataset(id, file.per_participant, block, id));
  if (out.empty()) input_error("no summaries for participant '" + only + "'");
  return out;
}

Block block_option(const std::string& text) {
  try {
    return parse_block(text);
  } catch (const DomainError& e) {
    input_error(e.what());
  }
}

ModelKind kind_option(const std::string& text) {
  try {
    return parse_model_kind(text);
  } catch (const DomainError& e) {
    input_error(e.what());
  }
}

struct Design {
  std::string name;
  std::vector<TaskCondition> conditions;
  std::size_t n_targets = 21;
};

Design design_option(const std::string& name) {
  if (name == "exp1") return {name, experiment1_design(), 21};
  if (name == "exp2") return {name, experiment2_design(), 15};
  const json j = read_json(name);
  Design d;
  d.name = name;
  try {
    for (const auto& c : j.at("conditions")) {
      auto cond = io::condition_from_json(c);
      validate_condition(cond);
      d.conditions.push_back(cond);
    }
    d.n_targets = j.value("n_targets", std::size_t{21});
  } catch (const json::exception& e) {
    input_error("'" + name + "' is not a design file: " + e.what());
  } catch (const DomainError& e) {
    input_error("'" + name + "': " + e.what());
  }
  return d;
}

// --- aggregate -------------------------------------------------------------

struct AggregateArgs {
  std::string input;
  std::string output = "-";
};

int cmd_aggregate(const AggregateArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<SessionLog> logs;
  {
    std::istringstream in(read_text(args.input));
    try {
      logs = read_trial_csv(in);
    } catch (const SchemaError& e) {
      input_error(e.what(), e.line());
    }
  }
  const auto result = aggregate(logs);

  json doc = bundle("aggregate", {{"input", args.input}});
  doc["summaries"] = json::array();
  for (const auto& s : result.per_participant) doc["summaries"].push_back(io::to_json(s, false));
  doc["grand_means"] = json::array();
  for (const auto& s : result.grand_means) doc["grand_means"].push_back(io::to_json(s, true));
  doc["rejected"] = json::array();
  for (const auto& r : result.rejected) {
    doc["rejected"].push_back({{"participant", r.participant},
                               {"block", to_string(r.block)},
                               {"session", r.session},
                               {"reason", r.reason}});
    report(err, "warning", "aggregate", "rejected-session",
           "participant " + r.participant + " session " + std::to_string(r.session) + ": " + r.reason);
  }
  write_json(args.output, doc, out);
  return exit_ok;
}

// --- fit -------------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::string output = "-";
  std::string model = "all";
  std::string block = "nc";
  bool per_participant = false;
  bool grand_mean = false;
};

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  if (args.per_participant && args.grand_mean)
    input_error("--per-participant and --grand-mean are mutually exclusive");
  const Block block = block_option(args.block);
  std::vector<ModelSpec> specs;
  if (args.model == "all") {
    for (ModelKind k : all_model_kinds) specs.push_back({k});
  } else {
    specs.push_back({kind_option(args.model)});
  }

  const auto file = load_summaries(args.input);
  const auto datasets = select_datasets(file, block, args.per_participant);

  json doc = bundle("fit", {{"input", args.input},
                            {"model", args.model},
                            {"block", args.block},
                            {"mode", args.per_participant ? "per-participant" : "grand-mean"}});
  doc["groups"] = json::array();
  std::size_t successes = 0;
  for (const auto& data : datasets) {
    json group{{"label", data.label}, {"n_points", data.points.size()}};
    group["fits"] = json::array();
    group["errors"] = json::array();
    std::vector<FitReport> fitted;
    for (const auto& spec : specs) {
      try {
        fitted.push_back(fit(spec, data));
        group["fits"].push_back(io::to_json(fitted.back()));
        ++successes;
      } catch (const std::exception& e) {
        group["errors"].push_back({{"model", to_string(spec.kind)}, {"message", e.what()}});
        report(err, "warning", "fit", "model-error",
               data.label + " / " + std::string(to_string(spec.kind)) + ": " + e.what());
      }
    }
    if (args.model == "all" && !fitted.empty()) {
      const auto cmp = rank_by_aic(fitted);
      json ranking = json::array();
      for (std::size_t i = 0; i < cmp.ranked.size(); ++i)
        ranking.push_back({{"model", to_string(cmp.ranked[i].spec.kind)},
                           {"aic", io::number(cmp.ranked[i].aic)},
                           {"delta_aic", io::number(cmp.delta_aic[i])},
                           {"support", to_string(cmp.support[i])}});
      group["comparison"] = std::move(ranking);
    }
    doc["groups"].push_back(std::move(group));
  }
  if (successes == 0) computation_error("no model could be fitted");
  write_json(args.output, doc, out);
  return exit_ok;
}

// --- loocv -----------------------------------------------------------------

struct LoocvArgs {
  std::string input;
  std::string output = "-";
  std::string model;
  std::string block = "nc";
  std::string participant;
};

int cmd_loocv(const LoocvArgs& args, std::ostream& out, std::ostream&) {
  const ModelSpec spec{kind_option(args.model)};
  const Block block = block_option(args.block);
  const auto file = load_summaries(args.input);
  const auto data = select_datasets(file, block, false, args.participant).front();

  CvReport cv;
  try {
    cv = loocv(spec, data);
  } catch (const std::exception& e) {
    computation_error(e.what());
  }
  json doc = bundle("loocv", {{"input", args.input},
                              {"model", args.model},
                              {"block", args.block},
                              {"participant", args.participant.empty() ? json(nullptr)
                                                                       : json(args.participant)}});
  doc["label"] = data.label;
  doc["cv"] = io::to_json(cv);
  write_json(args.output, doc, out);
  return exit_ok;
}

// --- correct ---------------------------------------------------------------

struct CorrectArgs {
  std::string input;
  std::string output = "-";
  std::string participant;
  std::optional<double> A, W, B;
  std::string design;
  std::string policy = "width";
};

CorrectionPolicy policy_option(const std::string& text) {
  if (text == "width") return CorrectionPolicy::width_only();
  if (text == "distance") return CorrectionPolicy::distance_only();
  if (text.rfind("joint:", 0) == 0) {
    const std::string_view value(text.data() + 6, text.size() - 6);
    double da = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), da);
    if (ec == std::errc() && ptr == value.data() + value.size() && std::isfinite(da))
      return CorrectionPolicy::joint(da);
  }
  input_error("policy must be width, distance, or joint:<delta_A>, got '" + text + "'");
}

int cmd_correct(const CorrectArgs& args, std::ostream& out, std::ostream& err) {
  const auto policy = policy_option(args.policy);

  std::vector<TaskCondition> conditions;
  if (!args.design.empty()) {
    if (args.A || args.W || args.B) input_error("use either --design or --A/--W/--B");
    conditions = design_option(args.design).conditions;
  } else {
    if (!args.A || !args.W || !args.B) input_error("--A, --W and --B are required without --design");
    TaskCondition cond{*args.A, *args.W, *args.B};
    try {
      validate_condition(cond);
    } catch (const DomainError& e) {
      input_error(e.what());
    }
    conditions.push_back(cond);
  }

  const json report_doc = read_json(args.input);
  std::optional<FitReport> chosen;
  try {
    for (const auto& group : report_doc.at("groups")) {
      const auto label = group.at("label").get<std::string>();
      if (!args.participant.empty() && label != args.participant) continue;
      for (const auto& f : group.at("fits"))
        if (f.at("model").get<std::string>() == to_string(ModelKind::one_part_ab_shift)) {
          chosen = io::fit_report_from_json(f);
          break;
        }
      if (chosen) break;
      if (!args.participant.empty()) break;
    }
  } catch (const std::exception& e) {
    input_error("'" + args.input + "' is not a fit report: " + e.what());
  }
  if (!chosen)
    input_error("'" + args.input + "' has no one-part-ab-shift fit" +
                (args.participant.empty() ? "" : " for '" + args.participant + "'"));

  json doc = bundle("correct", {{"input", args.input},
                                {"policy", args.policy},
                                {"participant", chosen->label},
                                {"design", args.design.empty() ? json(nullptr) : json(args.design)}});
  doc["model"] = {{"name", to_string(chosen->spec.kind)}, {"params", io::to_json(chosen->params)}};
  doc["corrections"] = json::array();
  doc["warnings"] = json::array();
  for (const auto& cond : conditions) {
    CorrectionResult r;
    try {
      r = correct_condition(chosen->spec, chosen->params, cond, policy);
    } catch (const std::exception& e) {
      computation_error(e.what());
    }
    if (!r.feasible) {
      std::ostringstream msg;
      msg << "infeasible correction at A=" << cond.A << " W=" << cond.W << " B=" << cond.B
          << " (corrected A=" << r.corrected_A << ", effective width=" << r.corrected_effective_width
          << ")";
      doc["warnings"].push_back(msg.str());
      report(err, "warning", "correct", "infeasible", msg.str());
    }
    doc["corrections"].push_back(io::to_json(r));
  }
  write_json(args.output, doc, out);
  return exit_ok;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string output = "-";
  std::string meta;
  std::string design = "exp1";
  std::string truth = "one-part-ab-shift";
  std::string params;
  std::optional<std::uint64_t> seed;
  std::size_t participants = 1;
  double noise_sd = 0.0;
  double spread = 0.0;
  std::optional<std::size_t> n_targets;
  std::size_t sessions_per_condition = 1;
  std::string block = "nc";
  std::string corrections;
};

ModelParams load_truth_params(const ModelSpec& spec, const std::string& path) {
  const json j = read_json(path);
  try {
    if (j.contains("groups")) {
      for (const auto& f : j.at("groups").at(0).at("fits"))
        if (f.at("model").get<std::string>() == to_string(spec.kind))
          return io::params_from_json(spec, f.at("params"));
      input_error("'" + path + "' has no fit for '" + std::string(to_string(spec.kind)) + "'");
    }
    return io::params_from_json(spec, j.contains("params") ? j.at("params") : j);
  } catch (const json::exception& e) {
    input_error("'" + path + "' is not a parameter file: " + e.what());
  } catch (const DomainError& e) {
    input_error("'" + path + "': " + e.what());
  }
}

std::map<TaskCondition, double> load_rendered_widths(const std::string& path) {
  std::map<TaskCondition, double> widths;
  const json j = read_json(path);
  try {
    for (const auto& c : j.at("corrections")) {
      const TaskCondition cond = io::condition_from_json(c);
      if (cond.B == 1.0) continue;
      widths[cond] = static_cast<double>(c.at("rounded_W").get<long>());
    }
  } catch (const json::exception& e) {
    input_error("'" + path + "' is not a correction file: " + e.what());
  }
  return widths;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream&) {
  if (args.params.empty()) input_error("--params is required");
  const ModelSpec spec{kind_option(args.truth)};
  const ModelParams params = load_truth_params(spec, args.params);
  const Design design = design_option(args.design);
  const Block block = block_option(args.block);
  const std::uint64_t seed = args.seed ? *args.seed : default_seed();
  if (args.noise_sd < 0.0 || args.spread < 0.0) input_error("noise SD and spread must be >= 0");
  if (args.participants == 0) input_error("--participants must be >= 1");

  ExperimentOptions options;
  options.n_targets = args.n_targets.value_or(design.n_targets);
  options.sessions_per_condition = args.sessions_per_condition;
  options.block = block;
  if (!args.corrections.empty()) options.rendered_widths = load_rendered_widths(args.corrections);
  if (options.n_targets < 3 || options.n_targets % 2 == 0)
    input_error("target count must be odd and >= 3");

  std::vector<SessionLog> logs;
  json participants = json::array();
  for (std::size_t i = 0; i < args.participants; ++i) {
    SyntheticUser user;
    user.participant = "S" + std::to_string(i + 1);
    user.truth_spec = spec;
    user.truth_params = params;
    user.mt_noise_sd = args.noise_sd;
    user.endpoint_spread_ratio = args.spread;
    user.seed = derive_seed(seed, i);
    try {
      auto part = simulate_experiment(user, design.conditions, options);
      logs.insert(logs.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
    } catch (const DomainError& e) {
      computation_error(e.what());
    }
    participants.push_back({{"id", user.participant}, {"seed", user.seed}});
  }

  std::ostringstream csv;
  write_trial_csv(csv, logs);

  double id_min = INFINITY, id_max = -INFINITY;
  json conditions = json::array();
  for (const auto& c : design.conditions) {
    const double id = index_of_difficulty(c.A, c.W);
    id_min = std::min(id_min, id);
    id_max = std::max(id_max, id);
    conditions.push_back(io::to_json(c));
  }
  json meta = bundle("simulate", {{"design", args.design},
                                  {"truth", args.truth},
                                  {"params", io::to_json(params)},
                                  {"seed", seed},
                                  {"participants", args.participants},
                                  {"noise_sd", args.noise_sd},
                                  {"spread", args.spread},
                                  {"n_targets", options.n_targets},
                                  {"sessions_per_condition", options.sessions_per_condition},
                                  {"block", args.block},
                                  {"corrections", args.corrections.empty() ? json(nullptr)
                                                                           : json(args.corrections)}});
  meta["design"] = {{"conditions", std::move(conditions)},
                    {"n_conditions", design.conditions.size()},
                    {"id_min", io::number(id_min)},
                    {"id_max", io::number(id_max)}};
  meta["participants"] = std::move(participants);
  meta["measured_trials_per_participant"] =
      design.conditions.size() * options.sessions_per_condition * options.n_targets;

  write_text(args.output, csv.str(), out);
  std::string meta_path = args.meta;
  if (meta_path.empty() && args.output != "-") meta_path = args.output + ".meta.json";
  if (!meta_path.empty()) write_json(meta_path, meta, out);
  return exit_ok;
}

// --- equivalence -----------------------------------------------------------

struct EquivalenceArgs {
  std::string input;
  std::string output = "-";
  std::string block = "c";
  double dz = 0.2;
  double alpha = 0.05;
  double baseline_b = 1.0;
};

int cmd_equivalence(const EquivalenceArgs& args, std::ostream& out, std::ostream& err) {
  const Block block = block_option(args.block);
  const auto file = load_summaries(args.input);
  std::vector<ConditionSummary> rows;
  for (const auto& s : file.per_participant)
    if (s.block == block) rows.push_back(s);

  BatteryReport battery;
  try {
    battery = equivalence_battery(rows, args.baseline_b, args.dz, args.alpha);
  } catch (const DomainError& e) {
    input_error(e.what());
  }
  for (const auto& t : battery.tests)
    if (t.error) {
      std::ostringstream msg;
      msg << "A=" << t.A << " W=" << t.W << " B=" << t.B << ": " << *t.error;
      report(err, "warning", "equivalence", "test-error", msg.str());
    }

  json doc = bundle("equivalence", {{"input", args.input},
                                    {"block", args.block},
                                    {"dz", args.dz},
                                    {"alpha", args.alpha},
                                    {"baseline_B", args.baseline_b}});
  std::set<std::string> ids;
  for (const auto& s : rows) ids.insert(s.participant);
  doc["n_participants"] = ids.size();
  doc["equivalence_reachable"] = tost_can_reach_equivalence(ids.size(), args.dz, args.alpha);
  doc["battery"] = io::to_json(battery);
  write_json(args.output, doc, out);
  return exit_ok;
}

// --- layout ----------------------------------------------------------------

struct LayoutArgs {
  std::string output = "-";
  std::size_t n = 21;
  double A = 0.0;
  double W = 0.0;
  std::optional<double> B;
  double cx = 960.0;
  double cy = 540.0;
  std::optional<double> screen_w, screen_h;
};

int cmd_layout(const LayoutArgs& args, std::ostream& out, std::ostream& err) {
  std::optional<ScreenBounds> bounds;
  if (args.screen_w || args.screen_h) {
    if (!args.screen_w || !args.screen_h) input_error("--screen-w and --screen-h go together");
    bounds = ScreenBounds{*args.screen_w, *args.screen_h};
  }
  if (args.B) {
    try {
      validate_condition({args.A, args.W, *args.B});
    } catch (const DomainError& e) {
      input_error(e.what());
    }
  }
  TargetLayout layout;
  try {
    layout = generate_layout(args.n, args.A, args.W, {args.cx, args.cy}, bounds, args.B);
  } catch (const DomainError& e) {
    input_error(e.what());
  }
  for (const auto& w : layout.warnings) report(err, "warning", "layout", "bounds", w);

  json doc = io::to_json(layout);
  json config{{"n", args.n}, {"A", args.A}, {"W", args.W}, {"cx", args.cx}, {"cy", args.cy}};
  config["B"] = args.B ? json(*args.B) : json(nullptr);
  const json b = bundle("layout", std::move(config));
  doc["tool"] = b["tool"];
  doc["config"] = b["config"];
  write_json(args.output, doc, out);
  return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"blurfitts: blur-aware pointing models, fitting, corrections and equivalence tests"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BLURFITTS_VERSION);

  AggregateArgs agg;
  auto* sub_agg = app.add_subcommand("aggregate", "trial CSV -> condition summaries JSON");
  sub_agg->add_option("trials", agg.input, "trial-log CSV ('-' for stdin)")->required();
  sub_agg->add_option("-o,--out", agg.output, "output path ('-' for stdout)");

  FitArgs fa;
  auto* sub_fit = app.add_subcommand("fit", "fit models to condition means");
  sub_fit->add_option("summaries", fa.input, "summaries JSON")->required();
  sub_fit->add_option("-o,--out", fa.output, "output path");
  sub_fit->add_option("--model", fa.model, "model kind or 'all'");
  sub_fit->add_option("--block", fa.block, "nc or c");
  sub_fit->add_flag("--per-participant", fa.per_participant, "one fit per participant");
  sub_fit->add_flag("--grand-mean", fa.grand_mean, "fit the grand means (default)");

  LoocvArgs la;
  auto* sub_cv = app.add_subcommand("loocv", "leave-one-condition-out cross-validation");
  sub_cv->add_option("summaries", la.input, "summaries JSON")->required();
  sub_cv->add_option("-o,--out", la.output, "output path");
  sub_cv->add_option("--model", la.model, "model kind")->required();
  sub_cv->add_option("--block", la.block, "nc or c");
  sub_cv->add_option("--participant", la.participant, "participant id (default: grand mean)");

  CorrectArgs ca;
  auto* sub_corr = app.add_subcommand("correct", "target-size / distance corrections");
  sub_corr->add_option("fit_report", ca.input, "fit report JSON")->required();
  sub_corr->add_option("-o,--out", ca.output, "output path");
  sub_corr->add_option("--participant", ca.participant, "group label in the fit report");
  sub_corr->add_option("--A", ca.A, "target distance, px");
  sub_corr->add_option("--W", ca.W, "target width, px");
  sub_corr->add_option("--B", ca.B, "blur kernel size, px");
  sub_corr->add_option("--design", ca.design, "exp1, exp2, or a design JSON file");
  sub_corr->add_option("--policy", ca.policy, "width | distance | joint:<delta_A>");

  SimulateArgs sa;
  auto* sub_sim = app.add_subcommand("simulate", "synthetic trial logs from a ground-truth model");
  sub_sim->add_option("-o,--out", sa.output, "trial CSV path");
  sub_sim->add_option("--meta", sa.meta, "metadata JSON path (default <out>.meta.json)");
  sub_sim->add_option("--design", sa.design, "exp1, exp2, or a design JSON file");
  sub_sim->add_option("--truth", sa.truth, "model kind");
  sub_sim->add_option("--params", sa.params, "JSON with constants a..e, or a fit report");
  sub_sim->add_option("--seed", sa.seed, "base seed (default $BLURFITTS_SEED or 0)");
  sub_sim->add_option("--participants", sa.participants, "number of synthetic participants");
  sub_sim->add_option("--noise-sd", sa.noise_sd, "movement-time noise SD, ms");
  sub_sim->add_option("--spread", sa.spread, "endpoint spread ratio");
  sub_sim->add_option("--n-targets", sa.n_targets, "targets per session (odd)");
  sub_sim->add_option("--sessions-per-condition", sa.sessions_per_condition, "repetitions");
  sub_sim->add_option("--block", sa.block, "nc or c");
  sub_sim->add_option("--corrections", sa.corrections, "correction JSON for the corrected block");

  EquivalenceArgs ea;
  auto* sub_eq = app.add_subcommand("equivalence", "paired TOST battery with Holm correction");
  sub_eq->add_option("summaries", ea.input, "summaries JSON")->required();
  sub_eq->add_option("-o,--out", ea.output, "output path");
  sub_eq->add_option("--block", ea.block, "nc or c (default c)");
  sub_eq->add_option("--dz", ea.dz, "equivalence bound in SD units");
  sub_eq->add_option("--alpha", ea.alpha, "significance level");
  sub_eq->add_option("--baseline-b", ea.baseline_b, "baseline blur level");

  LayoutArgs ya;
  auto* sub_lay = app.add_subcommand("layout", "ISO 9241-411 circular target layout");
  sub_lay->add_option("-o,--out", ya.output, "output path");
  sub_lay->add_option("--n", ya.n, "number of targets (odd)");
  sub_lay->add_option("--A", ya.A, "center-to-center distance, px")->required();
  sub_lay->add_option("--W", ya.W, "target diameter, px")->required();
  sub_lay->add_option("--B", ya.B, "blur kernel size, px");
  sub_lay->add_option("--cx", ya.cx, "screen center x");
  sub_lay->add_option("--cy", ya.cy, "screen center y");
  sub_lay->add_option("--screen-w", ya.screen_w, "screen width for bounds check");
  sub_lay->add_option("--screen-h", ya.screen_h, "screen height for bounds check");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << BLURFITTS_VERSION << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    report(err, "error", app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name(),
           "usage", e.what(), std::nullopt, exit_input_error);
    return exit_input_error;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (*sub_agg) return cmd_aggregate(agg, out, err);
    if (*sub_fit) return cmd_fit(fa, out, err);
    if (*sub_cv) return cmd_loocv(la, out, err);
    if (*sub_corr) return cmd_correct(ca, out, err);
    if (*sub_sim) return cmd_simulate(sa, out, err);
    if (*sub_eq) return cmd_equivalence(ea, out, err);
    if (*sub_lay) return cmd_layout(ya, out, err);
  } catch (const CommandError& e) {
    report(err, "error", command, e.kind(), e.what(), e.line(), e.code());
    return e.code();
  } catch (const std::exception& e) {
    report(err, "error", command, "computation", e.what(), std::nullopt, exit_computation_error);
    return exit_computation_error;
  }
  return exit_input_error;
}

}  // namespace blurfitts::cli
