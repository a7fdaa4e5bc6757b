#include "signhunt/harness.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include "signhunt/errors.hpp"
#include "signhunt/image_io.hpp"
#include "signhunt/parallel.hpp"
#include "signhunt/serialize.hpp"
#include "signhunt/train.hpp"

namespace signhunt {

namespace fs = std::filesystem;
using nlohmann::json;

const char* arm_name(Arm arm) {
  switch (arm) {
    case Arm::kFull: return "full";
    case Arm::kNoDoubleStep: return "no-double-step";
    case Arm::kNoCandidateReuse: return "no-candidate-reuse";
    case Arm::kRandomBaseline: return "random-baseline";
    case Arm::kMiFgsmReference: return "mi-fgsm-reference";
  }
  return "?";
}

Arm parse_arm(const std::string& name) {
  for (Arm a : {Arm::kFull, Arm::kNoDoubleStep, Arm::kNoCandidateReuse, Arm::kRandomBaseline,
                Arm::kMiFgsmReference}) {
    if (name == arm_name(a)) return a;
  }
  throw ContractViolation("unknown campaign arm '" + name + "'");
}

AttackConfig arm_attack_config(const Campaign& c, Arm arm) {
  AttackConfig cfg = c.attack;
  cfg.workers = 1;
  if (arm == Arm::kNoDoubleStep) cfg.double_step = false;
  if (arm == Arm::kNoCandidateReuse) cfg.keep_rate = 0.0;
  return cfg;
}

json arm_config_json(const Campaign& c, Arm arm) {
  json j = to_json(arm_attack_config(c, arm));
  j.erase("spec");
  j["budget"] = c.budget_limit;
  switch (arm) {
    case Arm::kRandomBaseline:
      j["method"] = "random_sign";
      j["tries"] = c.random_tries;
      break;
    case Arm::kMiFgsmReference:
      j["method"] = "mi_fgsm_numeric";
      j["decay"] = c.mi_decay;
      break;
    default:
      j["method"] = "bmi_fgsm";
      break;
  }
  return j;
}

std::uint64_t item_seed(std::uint64_t campaign_seed, const std::string& item_id) {
  return hash_string(campaign_seed, item_id.data(), item_id.size());
}

ArmSummary summarize(const std::vector<ItemRecord>& items, Arm arm) {
  ArmSummary s;
  s.arm = arm;
  double linf_sum = 0.0;
  double query_sum = 0.0;
  double conf_sum = 0.0;
  double time_sum = 0.0;
  for (const ItemRecord& r : items) {
    if (r.arm != arm) continue;
    if (r.status == "skipped") {
      ++s.skipped;
      continue;
    }
    ++s.attempted;
    query_sum += static_cast<double>(r.queries);
    conf_sum += r.final_true_confidence;
    time_sum += r.wall_time_s;
    if (r.status == "error") ++s.errors;
    if (r.success) {
      ++s.successes;
      linf_sum += r.linf;
      if (r.first_valid_iteration) ++s.first_valid_histogram[*r.first_valid_iteration];
    }
  }
  if (s.attempted > 0) {
    const double n = static_cast<double>(s.attempted);
    s.success_rate = 100.0 * static_cast<double>(s.successes) / n;
    s.mean_queries = query_sum / n;
    s.mean_final_true_confidence = conf_sum / n;
    s.mean_wall_time_s = time_sum / n;
  }
  if (s.successes > 0) s.mean_linf = linf_sum / static_cast<double>(s.successes);
  return s;
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string artifact_dir_for(const Campaign& c, const std::string& id, std::uint64_t seed,
                             Arm arm) {
  std::string dir = "items/" + id;
  if (c.seeds.size() > 1) dir += "__s" + std::to_string(seed);
  return dir + "/" + arm_name(arm);
}

void write_item_artifacts(const Campaign& c, const ItemRecord& rec, const json& config_echo) {
  const fs::path dir = c.out_dir / rec.artifact_dir;
  fs::create_directories(dir);
  const ImageTensor& adv = rec.result.adversarial;
  if (adv.shape().channels == 1 || adv.shape().channels == 3) save_png(adv, dir / "adv.png");
  save_tf32(adv, dir / "adv.tf32.json");
  json result = attack_result_json(rec.result, config_echo);
  result["item_id"] = rec.item_id;
  result["seed"] = rec.seed;
  result["arm"] = arm_name(rec.arm);
  const std::string text = result.dump(2) + "\n";
  write_file(dir / "result.json", text.data(), text.size());
  const std::string csv = confidence_trace_csv(rec.result);
  write_file(dir / "trace.csv", csv.data(), csv.size());
}

}  // namespace

CampaignReport run_campaign(const Campaign& c) {
  SIGNHUNT_REQUIRE(c.model != nullptr, "campaign: no model");
  SIGNHUNT_REQUIRE(!c.arms.empty(), "campaign: no arms");
  SIGNHUNT_REQUIRE(!c.seeds.empty(), "campaign: no seeds");
  if (!c.dataset.empty()) {
    SIGNHUNT_REQUIRE(c.dataset.images.front().shape() == c.model->input_shape(),
                     "campaign: dataset shape " + c.dataset.images.front().shape().str() +
                         " does not match model input " + c.model->input_shape().str());
  }
  for (Arm a : c.arms) {
    if (a != Arm::kRandomBaseline && a != Arm::kMiFgsmReference) arm_attack_config(c, a).validate();
  }

  const LocalClassifier classifier(c.model);
  const std::size_t n_items =
      c.max_items > 0 ? std::min(c.max_items, c.dataset.size()) : c.dataset.size();

  CampaignReport report;
  report.config_echo = {{"model", c.model_name},
                        {"num_items", n_items},
                        {"seeds", c.seeds},
                        {"budget", c.budget_limit},
                        {"target",
                         c.target == TargetChoice::kNone
                             ? json("none")
                             : (c.target == TargetChoice::kNext ? json("next") : json(c.fixed_target))},
                        {"random_tries", c.random_tries},
                        {"mi_decay", c.mi_decay}};
  json arm_names = json::array();
  for (Arm a : c.arms) arm_names.push_back(arm_name(a));
  report.config_echo["arms"] = arm_names;
  report.config_echo["attack"] = arm_config_json(c, Arm::kFull);

  const json baseline = arm_config_json(c, Arm::kFull);
  report.arm_audit = json::object();
  for (Arm a : c.arms) report.arm_audit[arm_name(a)] = json::diff(baseline, arm_config_json(c, a));

  // Item-major record layout; each slot is filled by exactly one task.
  std::vector<ItemRecord> records;
  records.reserve(n_items * c.seeds.size() * c.arms.size());
  std::vector<bool> clean_ok(n_items);
  for (std::size_t i = 0; i < n_items; ++i) {
    clean_ok[i] = top_label(classifier.predict(c.dataset.images[i])) == c.dataset.labels[i];
    for (std::uint64_t seed : c.seeds) {
      for (Arm arm : c.arms) {
        ItemRecord r;
        r.item_id = c.dataset.ids[i];
        r.seed = seed;
        r.item_seed = item_seed(seed, r.item_id);
        r.arm = arm;
        r.true_label = c.dataset.labels[i];
        records.push_back(std::move(r));
      }
    }
  }
  const std::size_t per_item = c.seeds.size() * c.arms.size();
  const int num_classes = c.model->num_classes();

  int workers = c.workers;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  parallel_for(records.size(), workers, [&](std::size_t k) {
    ItemRecord& rec = records[k];
    const std::size_t item = k / per_item;
    rec.artifact_dir = artifact_dir_for(c, rec.item_id, rec.seed, rec.arm);
    const int y = rec.true_label;
    FitnessSpec spec = FitnessSpec::untargeted(y);
    if (c.target == TargetChoice::kNext) {
      rec.target_label = (y + 1) % num_classes;
    } else if (c.target == TargetChoice::kFixed) {
      rec.target_label = c.fixed_target;
    }
    if (!clean_ok[item] || (c.target != TargetChoice::kNone && rec.target_label == y)) {
      rec.status = "skipped";
      rec.artifact_dir.clear();
      return;
    }
    if (c.target != TargetChoice::kNone) spec = FitnessSpec::targeted(y, rec.target_label);

    try {
      const ImageTensor& image = c.dataset.images[item];
      RngStream rng(rec.item_seed);
      QueryBudget budget(c.budget_limit > 0 ? c.budget_limit : QueryBudget::kUnlimited);
      AttackConfig cfg = arm_attack_config(c, rec.arm);
      cfg.spec = spec;
      switch (rec.arm) {
        case Arm::kRandomBaseline:
          rec.result = random_sign_attack(image, cfg.epsilon, c.random_tries, classifier, spec,
                                          cfg.rule, budget, rng);
          break;
        case Arm::kMiFgsmReference: {
          MIFGSMConfig mi;
          mi.epsilon = cfg.epsilon;
          mi.iterations = cfg.iterations;
          mi.decay = c.mi_decay;
          mi.early_return = cfg.early_return;
          mi.rule = cfg.rule;
          rec.result = mi_fgsm_reference(image, mi, *c.model, spec, budget);
          break;
        }
        default:
          rec.result = bmi_fgsm(image, cfg, classifier, budget, rng);
          break;
      }
      rec.status = attack_status_name(rec.result.status);
      rec.success = rec.result.success;
      rec.linf = rec.result.linf;
      rec.queries = rec.result.queries;
      rec.wall_time_s = rec.result.wall_time_s;
      rec.first_valid_iteration = rec.result.first_valid_iteration;
      rec.final_label = top_label(classifier.predict(rec.result.adversarial));
      rec.final_true_confidence = classifier.predict(rec.result.adversarial).score(y);
      if (!c.out_dir.empty()) {
        json echo = arm_config_json(c, rec.arm);
        echo["spec"] = to_json(spec);
        write_item_artifacts(c, rec, echo);
      }
    } catch (const std::exception& e) {
      rec.status = "error";
      rec.success = false;
      rec.error = e.what();
    }
  });

  std::size_t attempted = 0;
  std::size_t errors = 0;
  for (const ItemRecord& r : records) {
    if (r.status == "skipped") continue;
    ++attempted;
    if (r.status == "error") ++errors;
  }
  if (attempted > 0 && 2 * errors > attempted) {
    std::string first;
    for (const ItemRecord& r : records) {
      if (r.status == "error") {
        first = r.error;
        break;
      }
    }
    throw CampaignAborted("campaign aborted: " + std::to_string(errors) + " of " +
                          std::to_string(attempted) + " attacks failed (first: " + first + ")");
  }

  report.items = std::move(records);
  for (Arm a : c.arms) report.arms.push_back(summarize(report.items, a));

  if (!c.transfer_models.empty()) {
    const auto samples = successful_samples(report, c.arms.front(), c.attack.rule);
    std::vector<std::unique_ptr<LocalClassifier>> owned;
    std::vector<std::pair<std::string, const Classifier*>> models;
    for (const auto& [name, m] : c.transfer_models) {
      owned.push_back(std::make_unique<LocalClassifier>(m));
      models.emplace_back(name, owned.back().get());
    }
    report.transfer = transfer_eval(samples, models);
  }

  if (!c.out_dir.empty()) write_campaign_outputs(report, c.out_dir);
  return report;
}

json report_json(const CampaignReport& report) {
  json arms = json::array();
  for (const ArmSummary& s : report.arms) {
    json hist = json::object();
    for (const auto& [it, count] : s.first_valid_histogram) hist[std::to_string(it)] = count;
    arms.push_back({{"arm", arm_name(s.arm)},
                    {"attempted", s.attempted},
                    {"skipped", s.skipped},
                    {"successes", s.successes},
                    {"errors", s.errors},
                    {"success_rate", optional_json(s.success_rate)},
                    {"mean_linf", optional_json(s.mean_linf)},
                    {"mean_queries", optional_json(s.mean_queries)},
                    {"mean_final_true_confidence", optional_json(s.mean_final_true_confidence)},
                    {"mean_wall_time_s", s.mean_wall_time_s},
                    {"first_valid_histogram", std::move(hist)}});
  }
  json items = json::array();
  for (const ItemRecord& r : report.items) {
    items.push_back({{"id", r.item_id},
                     {"seed", r.seed},
                     {"item_seed", r.item_seed},
                     {"arm", arm_name(r.arm)},
                     {"true_label", r.true_label},
                     {"target_label", r.target_label},
                     {"status", r.status},
                     {"success", r.success},
                     {"linf", r.linf},
                     {"queries", r.queries},
                     {"first_valid_iteration", r.first_valid_iteration
                                                   ? json(*r.first_valid_iteration)
                                                   : json(nullptr)},
                     {"final_label", r.final_label},
                     {"final_true_confidence", r.final_true_confidence},
                     {"error", r.error},
                     {"artifacts", r.artifact_dir},
                     {"wall_time_s", r.wall_time_s}});
  }
  json transfer = json::array();
  for (const TransferRow& t : report.transfer) {
    transfer.push_back({{"model", t.model_name},
                        {"total", t.total},
                        {"fooled", t.fooled},
                        {"rate", optional_json(t.rate)},
                        {"warning", t.warning}});
  }
  return {{"schema", "signhunt.campaign_report/1"},
          {"config", report.config_echo},
          {"arm_audit", report.arm_audit},
          {"success_rate_denominator", "attempted items; misclassified clean items are skipped"},
          {"transfer_denominator", "successful samples of the first arm"},
          {"arms", std::move(arms)},
          {"items", std::move(items)},
          {"transfer", std::move(transfer)}};
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

}  // namespace

std::string summary_csv(const CampaignReport& report) {
  std::ostringstream os;
  os << "arm,attempted,skipped,successes,errors,success_rate,mean_linf,mean_queries,"
        "mean_final_true_confidence\n";
  for (const ArmSummary& s : report.arms) {
    os << arm_name(s.arm) << ',' << s.attempted << ',' << s.skipped << ',' << s.successes << ','
       << s.errors << ',' << fmt_opt(s.success_rate) << ',' << fmt_opt(s.mean_linf) << ','
       << fmt_opt(s.mean_queries) << ',' << fmt_opt(s.mean_final_true_confidence) << '\n';
  }
  return os.str();
}

void write_campaign_outputs(const CampaignReport& report, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_file_atomic(out_dir / "summary.csv", summary_csv(report));
  write_file_atomic(out_dir / "report.json", report_json(report).dump(2) + "\n");
}

json strip_timing(json j) {
  if (j.is_object()) {
    for (const char* key : {"wall_time_s", "mean_wall_time_s", "timing"}) j.erase(key);
    for (auto& [key, value] : j.items()) value = strip_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timing(value);
  }
  return j;
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

AttackConfig attack_from_json(const json& a) {
  AttackConfig cfg;
  cfg.epsilon = a.at("epsilon").get<double>();
  cfg.iterations = a.at("T").get<int>();
  cfg.de.generations = a.at("G").get<int>();
  cfg.de.population = a.at("N").get<int>();
  cfg.de.scale = a.value("DR", 1.0);
  cfg.de.crossover = a.value("CR", 0.9);
  cfg.de.force_jrand = a.value("force_jrand", false);
  cfg.keep_rate = a.value("KR", 0.2);
  cfg.rule = parse_success_rule(a.value("success_rule", "top1"));
  cfg.early_return = a.value("early_return", true);
  cfg.double_step = a.value("double_step", true);
  return cfg;
}

}  // namespace

Campaign campaign_from_json(const json& j, const fs::path& base_dir) {
  Campaign c;
  try {
    const json& ds = j.at("dataset");
    if (ds.is_string()) {
      c.dataset = load_dataset(resolve(base_dir, ds.get<std::string>()));
    } else {
      const json& syn = ds.at("synthetic");
      PatternOptions o;
      o.num_classes = syn.value("classes", 3);
      o.height = syn.value("height", 8);
      o.width = syn.value("width", 8);
      o.per_class = syn.value("per_class", 20);
      o.low = syn.value("low", o.low);
      o.high = syn.value("high", o.high);
      o.noise = syn.value("noise", o.noise);
      RngStream rng(syn.value("seed", std::uint64_t{1}));
      c.dataset = make_pattern_dataset(o, rng);
    }

    const json& m = j.at("model");
    if (m.is_string()) {
      c.model = std::make_shared<Model>(load_model(resolve(base_dir, m.get<std::string>())));
      c.model_name = m.get<std::string>();
    } else {
      const json& t = m.at("train");
      MlpArchitecture arch{t.value("hidden", std::vector<int>{32})};
      TrainOptions opts;
      opts.epochs = t.value("epochs", 100);
      opts.learning_rate = t.value("lr", 0.05);
      RngStream rng(t.value("seed", std::uint64_t{1}));
      c.model = std::make_shared<Model>(train_toy(c.dataset, arch, opts, rng).model);
      c.model_name = "trained:" + t.dump();
    }
    for (const auto& tm : j.value("transfer_models", json::array())) {
      const std::string p = tm.get<std::string>();
      c.transfer_models.emplace_back(p, std::make_shared<Model>(load_model(resolve(base_dir, p))));
    }

    c.attack = attack_from_json(j.at("attack"));
    if (j.contains("target")) {
      const json& t = j["target"];
      if (t.is_string() && t.get<std::string>() == "next") {
        c.target = TargetChoice::kNext;
      } else if (t.is_number_integer()) {
        c.target = TargetChoice::kFixed;
        c.fixed_target = t.get<int>();
      } else if (!(t.is_string() && t.get<std::string>() == "none")) {
        throw ContractViolation("campaign: target must be \"none\", \"next\" or a label index");
      }
    }
    c.budget_limit = j.value("budget", std::uint64_t{0});
    if (j.contains("arms")) {
      c.arms.clear();
      for (const auto& a : j["arms"]) c.arms.push_back(parse_arm(a.get<std::string>()));
    }
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    c.random_tries = j.value("random_tries", 100);
    if (j.contains("mi_fgsm")) c.mi_decay = j["mi_fgsm"].value("decay", 1.0);
    c.max_items = j.value("max_items", std::size_t{0});
    c.workers = j.value("workers", 1);
    if (j.contains("out")) c.out_dir = resolve(base_dir, j["out"].get<std::string>());
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("campaign config: ") + e.what());
  }
  return c;
}

Campaign load_campaign(const fs::path& config_path) {
  const auto raw = read_file(config_path);
  json j;
  try {
    j = json::parse(raw.begin(), raw.end());
  } catch (const json::exception& e) {
    throw ContractViolation("campaign config " + config_path.string() + ": " + e.what());
  }
  return campaign_from_json(j, config_path.parent_path());
}

std::vector<TransferRow> transfer_eval(
    const std::vector<TransferSample>& samples,
    const std::vector<std::pair<std::string, const Classifier*>>& models) {
  std::vector<TransferRow> rows;
  for (const auto& [name, clf] : models) {
    TransferRow row;
    row.model_name = name;
    const auto shape = clf->input_shape();
    if (!samples.empty() && shape && *shape != samples.front().image.shape()) {
      row.warning = "skipped: model input " + shape->str() + " does not match sample shape " +
                    samples.front().image.shape().str();
      std::cerr << "warning: transfer model " << name << ' ' << row.warning << '\n';
      rows.push_back(std::move(row));
      continue;
    }
    for (const TransferSample& s : samples) {
      ++row.total;
      if (is_adversarial(clf->predict(s.image), s.spec, s.rule)) ++row.fooled;
    }
    if (row.total > 0) {
      row.rate = 100.0 * static_cast<double>(row.fooled) / static_cast<double>(row.total);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TransferSample> successful_samples(const CampaignReport& report, Arm arm,
                                               SuccessRule rule) {
  std::vector<TransferSample> out;
  for (const ItemRecord& r : report.items) {
    if (r.arm != arm || !r.success) continue;
    FitnessSpec spec = r.target_label >= 0 ? FitnessSpec::targeted(r.true_label, r.target_label)
                                           : FitnessSpec::untargeted(r.true_label);
    out.push_back({r.item_id, r.result.adversarial, spec, rule});
  }
  return out;
}

std::vector<TransferSample> load_transfer_samples(const fs::path& campaign_out, Arm arm) {
  const auto raw = read_file(campaign_out / "report.json");
  const json report = json::parse(raw.begin(), raw.end());
  const SuccessRule rule =
      parse_success_rule(report.at("config").at("attack").value("success_rule", "top1"));
  std::vector<TransferSample> out;
  for (const auto& item : report.at("items")) {
    if (item.at("arm").get<std::string>() != arm_name(arm) || !item.at("success").get<bool>()) {
      continue;
    }
    const int y = item.at("true_label").get<int>();
    const int q = item.at("target_label").get<int>();
    FitnessSpec spec = q >= 0 ? FitnessSpec::targeted(y, q) : FitnessSpec::untargeted(y);
    const fs::path dir = campaign_out / item.at("artifacts").get<std::string>();
    out.push_back({item.at("id").get<std::string>(), load_tf32(dir / "adv.tf32.json"), spec, rule});
  }
  return out;
}

}  // namespace signhunt
