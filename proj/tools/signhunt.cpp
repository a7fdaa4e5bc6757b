// signhunt: command-line front end for the attack library.
//
// Exit codes: 0 ok, 1 attack/campaign failure, 2 usage or input error,
// 3 remote service error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "signhunt/attack.hpp"
#include "signhunt/dataset.hpp"
#include "signhunt/errors.hpp"
#include "signhunt/harness.hpp"
#include "signhunt/image_io.hpp"
#include "signhunt/model.hpp"
#include "signhunt/remote.hpp"
#include "signhunt/serialize.hpp"
#include "signhunt/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace signhunt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRemote = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

json read_json_file(const fs::path& path) {
  const auto raw = read_file(path);
  try {
    return json::parse(raw.begin(), raw.end());
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

// Resolves each setting from flag, then config file, then environment, and
// remembers where the value came from for the header echo.
class Settings {
 public:
  explicit Settings(json file) : file_(std::move(file)) {}

  template <typename T>
  std::optional<T> get(const std::string& key, const CLI::Option* flag, const T& flag_value,
                       const char* env_name = nullptr) {
    std::optional<T> out;
    if (flag != nullptr && flag->count() > 0) {
      out = flag_value;
      note(key, json(flag_value), "flag");
    } else if (file_.contains(key)) {
      try {
        out = file_.at(key).get<T>();
      } catch (const json::exception&) {
        throw UsageError("config key '" + key + "' has the wrong type");
      }
      note(key, file_.at(key), "config");
    } else if (env_name != nullptr) {
      if (auto v = env(env_name)) {
        out = parse_env<T>(env_name, *v);
        note(key, json(*out), std::string("env ") + env_name);
      }
    }
    return out;
  }

  template <typename T>
  T get_or(const std::string& key, const CLI::Option* flag, const T& flag_value, const T& fallback,
           const char* env_name = nullptr) {
    if (auto v = get<T>(key, flag, flag_value, env_name)) return *v;
    note(key, json(fallback), "default");
    return fallback;
  }

  template <typename T>
  T require(const std::string& key, const std::string& flag_name, const CLI::Option* flag,
            const T& flag_value) {
    if (auto v = get<T>(key, flag, flag_value)) return *v;
    throw UsageError(flag_name + " is required (flag or config key '" + key + "')");
  }

  void note(const std::string& key, const json& value, const std::string& source) {
    echo_[key] = {value, source};
  }
  void hide(const std::string& key) { hidden_.insert({key, true}); }

  void print_header(const std::string& command) const {
    std::cout << "# signhunt " << command << '\n';
    for (const auto& [key, entry] : echo_) {
      const std::string shown = hidden_.count(key) ? "\"***\"" : entry.first.dump();
      std::cout << "#   " << key << " = " << shown << "  (" << entry.second << ")\n";
    }
    std::cout.flush();
  }

  json echo_json() const {
    json j = json::object();
    for (const auto& [key, entry] : echo_) {
      if (!hidden_.count(key)) j[key] = entry.first;
    }
    return j;
  }

 private:
  template <typename T>
  static T parse_env(const char* name, const std::string& text) {
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        return text;
      } else {
        return json::parse(text).get<T>();
      }
    } catch (const json::exception&) {
      throw UsageError(std::string("environment variable ") + name + " is not valid: " + text);
    }
  }

  json file_;
  std::map<std::string, std::pair<json, std::string>> echo_;
  std::map<std::string, bool> hidden_;
};

// ---------------------------------------------------------------------------
// Attack flags shared by `attack` and `campaign` overrides.

struct AttackFlags {
  double eps = 0.0;
  int T = 0;
  int G = 0;
  int N = 0;
  double DR = 1.0;
  double CR = 0.9;
  double KR = 0.2;
  std::string rule = "top1";
  bool no_double_step = false;
  bool no_early_return = false;
  int workers = 1;
  CLI::Option* o_eps = nullptr;
  CLI::Option* o_T = nullptr;
  CLI::Option* o_G = nullptr;
  CLI::Option* o_N = nullptr;
  CLI::Option* o_DR = nullptr;
  CLI::Option* o_CR = nullptr;
  CLI::Option* o_KR = nullptr;
  CLI::Option* o_rule = nullptr;
  CLI::Option* o_nds = nullptr;
  CLI::Option* o_ner = nullptr;
  CLI::Option* o_workers = nullptr;

  void add(CLI::App* app) {
    o_eps = app->add_option("--eps", eps, "L-infinity bound on the unit pixel scale");
    o_T = app->add_option("--T", T, "outer iterations");
    o_G = app->add_option("--G", G, "DE generations per iteration");
    o_N = app->add_option("--N", N, "DE population size");
    o_DR = app->add_option("--DR", DR, "DE differential scale (default 1.0)");
    o_CR = app->add_option("--CR", CR, "DE crossover rate (default 0.9)");
    o_KR = app->add_option("--KR", KR, "fraction of candidates kept between iterations (default 0.2)");
    o_rule = app->add_option("--success-rule", rule, "top1 or top5 (default top1)");
    o_nds = app->add_flag("--no-double-step", no_double_step, "explore at the permanent step size");
    o_ner = app->add_flag("--no-early-return", no_early_return, "run all T iterations");
    o_workers = app->add_option("--workers", workers, "evaluation threads (env SIGNHUNT_WORKERS)");
  }

  AttackConfig resolve(Settings& s) const {
    AttackConfig cfg;
    cfg.epsilon = s.require<double>("epsilon", "--eps", o_eps, eps);
    cfg.iterations = s.require<int>("T", "--T", o_T, T);
    cfg.de.generations = s.require<int>("G", "--G", o_G, G);
    cfg.de.population = s.require<int>("N", "--N", o_N, N);
    cfg.de.scale = s.get_or<double>("DR", o_DR, DR, 1.0);
    cfg.de.crossover = s.get_or<double>("CR", o_CR, CR, 0.9);
    cfg.keep_rate = s.get_or<double>("KR", o_KR, KR, 0.2);
    const std::string r = s.get_or<std::string>("success_rule", o_rule, rule, "top1");
    cfg.double_step = !s.get_or<bool>("no_double_step", o_nds, no_double_step, false);
    cfg.early_return = !s.get_or<bool>("no_early_return", o_ner, no_early_return, false);
    cfg.workers = s.get_or<int>("workers", o_workers, workers, 1, "SIGNHUNT_WORKERS");

    if (!(cfg.epsilon > 0.0)) throw UsageError("--eps must be > 0 (got " + std::to_string(cfg.epsilon) + ")");
    if (cfg.iterations < 1) throw UsageError("--T must be >= 1");
    if (cfg.de.population < 4) throw UsageError("--N must be >= 4");
    if (cfg.de.generations < 0) throw UsageError("--G must be >= 0");
    if (cfg.de.crossover < 0.0 || cfg.de.crossover > 1.0) throw UsageError("--CR must be in [0,1]");
    if (cfg.keep_rate < 0.0 || cfg.keep_rate > 1.0) throw UsageError("--KR must be in [0,1]");
    if (cfg.workers < 1) throw UsageError("--workers must be >= 1");
    if (r != "top1" && r != "top5") throw UsageError("--success-rule must be top1 or top5");
    cfg.rule = parse_success_rule(r);
    return cfg;
  }
};

// ---------------------------------------------------------------------------

int cmd_make_dataset(const PatternOptions& opts, std::uint64_t seed, const fs::path& out, bool png) {
  RngStream rng(seed);
  const Dataset data = make_pattern_dataset(opts, rng);
  if (png) {
    fs::create_directories(out);
    std::string csv = "filename,label\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::string name = data.ids[i] + ".png";
      save_png(data.images[i], out / name);
      csv += name + "," + std::to_string(data.labels[i]) + "\n";
    }
    write_file_atomic(out / "labels.csv", csv);
  } else {
    save_dataset(data, out);
  }
  std::cout << "wrote " << data.size() << " items (" << opts.num_classes << " classes) to "
            << out.string() << '\n';
  return kExitOk;
}

int cmd_train(const fs::path& data_path, const std::vector<int>& hidden, int epochs, double lr,
              std::uint64_t seed, const fs::path& out) {
  const Dataset data = load_dataset(data_path);
  if (data.empty()) throw UsageError("--data: dataset is empty");
  RngStream rng(seed);
  TrainOptions opts;
  opts.epochs = epochs;
  opts.learning_rate = lr;
  const TrainResult r = train_toy(data, MlpArchitecture{hidden}, opts, rng);
  save_model(r.model, out);
  std::printf("train accuracy %.4f, final loss %.6f, saved to %s\n", r.train_accuracy, r.final_loss,
              out.string().c_str());
  return kExitOk;
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path stem = out.filename();
  stem.replace_extension();
  return out.parent_path() / (stem.string() + suffix);
}

int cmd_attack(Settings& s, const AttackFlags& af, const std::string& model_dir,
               const std::string& remote_url, const std::string& image_path, int label,
               const CLI::Option* o_label, int target, const CLI::Option* o_target,
               std::uint64_t seed, const CLI::Option* o_seed, std::uint64_t budget_limit,
               const CLI::Option* o_budget, const std::string& out, const CLI::Option* o_out,
               const std::string& result_path, const CLI::Option* o_result,
               const std::string& trace_path, const CLI::Option* o_trace, const CLI::Option* o_model,
               const CLI::Option* o_remote, const std::string& token, const CLI::Option* o_token) {
  AttackConfig cfg = af.resolve(s);
  const auto model_path = s.get<std::string>("model", o_model, model_dir);
  const auto url = s.get<std::string>("remote", o_remote, remote_url);
  if (model_path.has_value() == url.has_value()) {
    throw UsageError("exactly one of --model or --remote is required");
  }
  const std::string out_path = s.require<std::string>("out", "--out", o_out, out);
  const auto rng_seed = s.get_or<std::uint64_t>("seed", o_seed, seed, 1);
  const auto limit = s.get_or<std::uint64_t>("budget", o_budget, budget_limit, 0);
  const auto q = s.get<int>("target", o_target, target);
  const auto y_flag = s.get<int>("label", o_label, label);
  const auto bearer = s.get<std::string>("remote_token", o_token, token, "SIGNHUNT_REMOTE_TOKEN");
  if (bearer) s.hide("remote_token");
  s.note("image", image_path, "flag");

  const ImageTensor image = load_image(image_path);
  QueryBudget budget(limit > 0 ? limit : QueryBudget::kUnlimited);

  std::unique_ptr<Classifier> classifier;
  if (model_path) {
    auto model = std::make_shared<const Model>(load_model(*model_path));
    if (model->input_shape() != image.shape()) {
      throw UsageError("--image shape " + image.shape().str() + " does not match model input " +
                       model->input_shape().str());
    }
    if (!y_flag) throw UsageError("--label is required with --model");
    if (*y_flag < 0 || *y_flag >= model->num_classes()) {
      throw UsageError("--label " + std::to_string(*y_flag) + " is outside [0, " +
                       std::to_string(model->num_classes()) + ")");
    }
    cfg.spec = q ? FitnessSpec::targeted(*y_flag, *q) : FitnessSpec::untargeted(*y_flag);
    if (q && (*q < 0 || *q >= model->num_classes() || *q == *y_flag)) {
      throw UsageError("--target must be a class other than --label");
    }
    classifier = std::make_unique<LocalClassifier>(std::move(model));
  } else {
    RemoteEndpoint ep;
    ep.base_url = *url;
    if (bearer) ep.auth_token = *bearer;
    auto remote = std::make_unique<RemoteClassifier>(ep);
    // The clean query fixes the label vocabulary and the true label.
    const PredictionVector clean = remote_classify(*remote, image, budget);
    const int y = top_label(clean);
    if (y < 0) throw ProtocolError("remote service returned no labels for the clean image");
    std::cout << "# remote clean label: " << remote->vocabulary().name(y) << '\n';
    cfg.spec = FitnessSpec::label_score(y);
    classifier = std::move(remote);
  }

  s.note("spec", to_json(cfg.spec), "derived");
  s.print_header("attack");

  RngStream rng(rng_seed);
  const AttackResult r = bmi_fgsm(image, cfg, *classifier, budget, rng);

  const fs::path out_file(out_path);
  if (!out_file.parent_path().empty()) fs::create_directories(out_file.parent_path());
  if (image.shape().channels == 1 || image.shape().channels == 3) save_png(r.adversarial, out_file);
  save_tf32(r.adversarial, sibling(out_file, ".tf32.json"));
  json echo = to_json(cfg);
  echo["cli"] = s.echo_json();
  const fs::path result_file = s.get_or<std::string>(
      "result", o_result, result_path, (out_file.parent_path() / "result.json").string());
  write_file_atomic(result_file, attack_result_json(r, echo).dump(2) + "\n");
  if (const auto trace = s.get<std::string>("trace", o_trace, trace_path)) {
    write_file_atomic(*trace, confidence_trace_csv(r));
  }

  std::printf("status %s, final label %d, queries %llu, linf %.6f, iterations %zu\n",
              attack_status_name(r.status), r.final_label,
              static_cast<unsigned long long>(r.queries), r.linf, r.trace.size());
  return r.success ? kExitOk : kExitFailure;
}

void print_summary(const CampaignReport& report) {
  std::printf("%-20s %9s %8s %8s %7s %10s %10s %12s\n", "arm", "attempted", "skipped", "success",
              "errors", "rate(%)", "mean_linf", "mean_queries");
  for (const ArmSummary& a : report.arms) {
    auto show = [](const std::optional<double>& v) {
      char buf[32];
      if (v) {
        std::snprintf(buf, sizeof(buf), "%.4g", *v);
      } else {
        std::snprintf(buf, sizeof(buf), "n/a");
      }
      return std::string(buf);
    };
    std::printf("%-20s %9zu %8zu %8zu %7zu %10s %10s %12s\n", arm_name(a.arm), a.attempted,
                a.skipped, a.successes, a.errors, show(a.success_rate).c_str(),
                show(a.mean_linf).c_str(), show(a.mean_queries).c_str());
  }
  for (const TransferRow& t : report.transfer) {
    std::printf("transfer %s: %zu/%zu %s\n", t.model_name.c_str(), t.fooled, t.total,
                t.warning.c_str());
  }
}

int cmd_campaign(const fs::path& config_path, int workers, const CLI::Option* o_workers,
                 const std::string& out, const CLI::Option* o_out, std::size_t max_items,
                 const CLI::Option* o_max) {
  json file = read_json_file(config_path);
  Settings s(file);
  Campaign c = [&] {
    try {
      return campaign_from_json(file, config_path.parent_path());
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
  }();
  c.workers = s.get_or<int>("workers", o_workers, workers, c.workers, "SIGNHUNT_WORKERS");
  if (c.workers < 1) throw UsageError("--workers must be >= 1");
  if (auto o = s.get<std::string>("out", o_out, out)) {
    c.out_dir = o_out->count() > 0 ? fs::path(*o) : c.out_dir;
  }
  if (c.out_dir.empty()) throw UsageError("--out is required (flag or config key 'out')");
  c.max_items = s.get_or<std::size_t>("max_items", o_max, max_items, c.max_items);
  s.note("config", config_path.string(), "flag");
  s.note("out", c.out_dir.string(), o_out->count() > 0 ? "flag" : "config");
  s.note("model", c.model_name, "config");
  s.note("items", c.dataset.size(), "config");
  s.note("attack", arm_config_json(c, Arm::kFull), "config");
  json arms = json::array();
  for (Arm a : c.arms) arms.push_back(arm_name(a));
  s.note("arms", arms, "config");
  s.note("seeds", c.seeds, "config");
  s.print_header("campaign");

  const CampaignReport report = run_campaign(c);
  print_summary(report);
  std::cout << "report: " << (c.out_dir / "report.json").string() << '\n';
  return kExitOk;
}

int cmd_transfer(const fs::path& campaign_out, const std::string& arm,
                 const std::vector<std::string>& models, const std::string& out,
                 const CLI::Option* o_out) {
  const auto samples = load_transfer_samples(campaign_out, parse_arm(arm));
  std::vector<std::unique_ptr<LocalClassifier>> owned;
  std::vector<std::pair<std::string, const Classifier*>> list;
  for (const auto& m : models) {
    owned.push_back(std::make_unique<LocalClassifier>(std::make_shared<const Model>(load_model(m))));
    list.emplace_back(m, owned.back().get());
  }
  std::cout << "# signhunt transfer\n#   campaign = " << campaign_out.string() << "\n#   arm = " << arm
            << "\n#   samples = " << samples.size() << " (successful only)\n";
  const auto rows = transfer_eval(samples, list);
  json j = json::array();
  for (const auto& r : rows) {
    std::printf("%s: %zu/%zu fooled%s%s\n", r.model_name.c_str(), r.fooled, r.total,
                r.warning.empty() ? "" : " - ", r.warning.c_str());
    j.push_back({{"model", r.model_name},
                 {"total", r.total},
                 {"fooled", r.fooled},
                 {"rate", r.rate ? json(*r.rate) : json(nullptr)},
                 {"warning", r.warning}});
  }
  if (o_out->count() > 0) {
    write_file_atomic(out, json{{"arm", arm},
                                {"denominator", "successful samples of the source arm"},
                                {"rows", j}}
                               .dump(2) +
                               "\n");
  }
  return kExitOk;
}

int cmd_remote_probe(const std::string& url, const std::string& image_path, int top_k,
                     const std::string& token, const CLI::Option* o_token) {
  Settings s(json::object());
  RemoteEndpoint ep;
  ep.base_url = url;
  ep.top_k = top_k;
  if (auto t = s.get<std::string>("remote_token", o_token, token, "SIGNHUNT_REMOTE_TOKEN")) {
    ep.auth_token = *t;
    s.hide("remote_token");
  }
  s.note("url", url, "flag");
  s.note("top_k", top_k, "flag");
  s.print_header("remote-probe");
  const RemoteClassifier remote(ep);
  QueryBudget budget(1);
  const PredictionVector p = remote_classify(remote, load_image(image_path), budget);
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::printf("%s %.6f\n", remote.vocabulary().name(static_cast<int>(i)).c_str(), p.score(static_cast<int>(i)));
  }
  return kExitOk;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Black-box sign attacks driven by differential evolution"};
  app.require_subcommand(1);

  // make-dataset
  auto* mk = app.add_subcommand("make-dataset", "Write a synthetic striped-pattern dataset");
  PatternOptions popts;
  std::uint64_t mk_seed = 1;
  std::string mk_out;
  bool mk_png = false;
  mk->add_option("--classes", popts.num_classes, "number of classes")->check(CLI::Range(2, 64));
  mk->add_option("--height", popts.height, "image height")->check(CLI::PositiveNumber);
  mk->add_option("--width", popts.width, "image width")->check(CLI::PositiveNumber);
  mk->add_option("--per-class", popts.per_class, "items per class")->check(CLI::PositiveNumber);
  mk->add_option("--noise", popts.noise, "Gaussian pixel noise");
  mk->add_option("--seed", mk_seed, "random seed");
  mk->add_option("--out", mk_out, "output directory")->required();
  mk->add_flag("--png", mk_png, "write PNG files + labels.csv instead of TF32 + index.json");

  // train-toy
  auto* tr = app.add_subcommand("train-toy", "Train a small MLP and save it as SMF");
  std::string tr_data, tr_out;
  std::vector<int> tr_hidden{32};
  int tr_epochs = 100;
  double tr_lr = 0.05;
  std::uint64_t tr_seed = 1;
  tr->add_option("--data", tr_data, "dataset directory")->required();
  tr->add_option("--hidden", tr_hidden, "hidden layer widths")->check(CLI::PositiveNumber);
  tr->add_option("--epochs", tr_epochs, "SGD epochs")->check(CLI::NonNegativeNumber);
  tr->add_option("--lr", tr_lr, "learning rate");
  tr->add_option("--seed", tr_seed, "random seed");
  tr->add_option("--out", tr_out, "model directory")->required();

  // attack
  auto* at = app.add_subcommand("attack", "Attack one image");
  AttackFlags af;
  af.add(at);
  std::string at_model, at_remote, at_image, at_out, at_result, at_trace, at_config, at_token;
  int at_label = 0, at_target = -1;
  std::uint64_t at_seed = 1, at_budget = 0;
  auto* o_model = at->add_option("--model", at_model, "SMF model directory");
  auto* o_remote = at->add_option("--remote", at_remote, "remote classifier base URL");
  at->add_option("--image", at_image, "input image (.png or .tf32.json)")->required();
  auto* o_label = at->add_option("--label", at_label, "true label (local models)");
  auto* o_target = at->add_option("--target", at_target, "target label for a targeted attack");
  auto* o_seed = at->add_option("--seed", at_seed, "random seed (default 1)");
  auto* o_budget = at->add_option("--budget", at_budget, "query budget, 0 = unlimited");
  auto* o_out = at->add_option("--out", at_out, "adversarial image path (.png)");
  auto* o_result = at->add_option("--result", at_result, "result JSON path (default: next to --out)");
  auto* o_trace = at->add_option("--trace", at_trace, "confidence trace CSV path");
  auto* o_token = at->add_option("--remote-token", at_token, "bearer token (env SIGNHUNT_REMOTE_TOKEN)");
  at->add_option("--config", at_config, "JSON file with defaults for any of these settings");

  // campaign
  auto* cp = app.add_subcommand("campaign", "Run a campaign from a JSON config");
  std::string cp_config, cp_out;
  int cp_workers = 1;
  std::size_t cp_max = 0;
  cp->add_option("--config", cp_config, "campaign config JSON")->required();
  auto* o_cp_workers = cp->add_option("--workers", cp_workers, "items in flight (env SIGNHUNT_WORKERS)");
  auto* o_cp_out = cp->add_option("--out", cp_out, "output directory (overrides config)");
  auto* o_cp_max = cp->add_option("--max-items", cp_max, "attack at most this many items");

  // transfer
  auto* tf = app.add_subcommand("transfer", "Replay a campaign's successes on other models");
  std::string tf_campaign, tf_arm = "full", tf_out;
  std::vector<std::string> tf_models;
  tf->add_option("--campaign", tf_campaign, "campaign output directory")->required();
  tf->add_option("--arm", tf_arm, "source arm (default full)");
  tf->add_option("--models", tf_models, "SMF model directories")->required();
  auto* o_tf_out = tf->add_option("--out", tf_out, "write the transfer table as JSON");

  // remote-probe
  auto* rp = app.add_subcommand("remote-probe", "Send one image to a remote classifier");
  std::string rp_url, rp_image, rp_token;
  int rp_top_k = 5;
  rp->add_option("--url", rp_url, "remote classifier base URL")->required();
  rp->add_option("--image", rp_image, "image to classify")->required();
  rp->add_option("--top-k", rp_top_k, "labels to request")->check(CLI::PositiveNumber);
  auto* o_rp_token = rp->add_option("--remote-token", rp_token, "bearer token (env SIGNHUNT_REMOTE_TOKEN)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (mk->parsed()) return cmd_make_dataset(popts, mk_seed, mk_out, mk_png);
  if (tr->parsed()) return cmd_train(tr_data, tr_hidden, tr_epochs, tr_lr, tr_seed, tr_out);
  if (at->parsed()) {
    Settings s(at_config.empty() ? json::object() : read_json_file(at_config));
    if (!at_config.empty()) s.note("config", at_config, "flag");
    return cmd_attack(s, af, at_model, at_remote, at_image, at_label, o_label, at_target, o_target,
                      at_seed, o_seed, at_budget, o_budget, at_out, o_out, at_result, o_result,
                      at_trace, o_trace, o_model, o_remote, at_token, o_token);
  }
  if (cp->parsed()) {
    return cmd_campaign(cp_config, cp_workers, o_cp_workers, cp_out, o_cp_out, cp_max, o_cp_max);
  }
  if (tf->parsed()) return cmd_transfer(tf_campaign, tf_arm, tf_models, tf_out, o_tf_out);
  if (rp->parsed()) return cmd_remote_probe(rp_url, rp_image, rp_top_k, rp_token, o_rp_token);
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RemoteUnavailable& e) {
    std::cerr << "remote error: " << e.what() << '\n';
    return kExitRemote;
  } catch (const ProtocolError& e) {
    std::cerr << "remote error: " << e.what() << '\n';
    return kExitRemote;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kExitFailure;
  }
}
