// Acceptance gate: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <unistd.h>

#include "signhunt/attack.hpp"
#include "signhunt/errors.hpp"
#include "signhunt/gradient.hpp"
#include "signhunt/harness.hpp"
#include "signhunt/image_io.hpp"
#include "signhunt/remote.hpp"
#include "stub_server.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace signhunt;
using namespace signhunt::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void run(const std::string& name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!out.pass) ++g_failures;
  std::printf("[%s] %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", name.c_str(),
              out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Randomized attack runs shared by the sign-domain, ledger and elitism checks.

struct RandomRunStats {
  std::size_t runs = 0;
  std::size_t candidates = 0;
  std::size_t bad_candidates = 0;
  std::size_t envelope_violations = 0;
  double worst_excess = -1.0;
  std::size_t boundaries = 0;
  double worst_ledger = 0.0;
  std::size_t traces = 0;
  std::size_t non_monotone_traces = 0;
};

RandomRunStats random_runs(std::size_t count, std::uint64_t seed0) {
  RandomRunStats s;
  for (std::size_t r = 0; r < count; ++r) {
    RngStream rng(seed0 + r);
    const Shape shape{1 + static_cast<int>(rng.below(2)), 3 + static_cast<int>(rng.below(3)),
                      3 + static_cast<int>(rng.below(3))};
    const int classes = 2 + static_cast<int>(rng.below(3));
    auto model = std::make_shared<const Model>(random_mlp(shape, 8, classes, rng, 1.5));
    const LocalClassifier clf(model);
    const ImageTensor image = random_image(shape, rng);

    AttackConfig cfg;
    cfg.epsilon = 0.02 + 0.4 * rng.uniform();
    cfg.iterations = 1 + static_cast<int>(rng.below(6));
    cfg.de.population = 4 + static_cast<int>(rng.below(9));
    cfg.de.generations = static_cast<int>(rng.below(6));
    cfg.de.scale = 0.5 + rng.uniform();
    cfg.de.crossover = rng.uniform();
    cfg.de.force_jrand = rng.coin();
    cfg.keep_rate = rng.uniform();
    cfg.double_step = rng.below(4) != 0;
    cfg.early_return = rng.coin();
    cfg.workers = 1 + static_cast<int>(rng.below(3));
    const int y = top_label(clf.predict(image));
    if (rng.coin() || classes < 3) {
      cfg.spec = FitnessSpec::untargeted(y);
    } else {
      cfg.spec = FitnessSpec::targeted(y, (y + 1) % classes);
    }

    AttackHooks hooks;
    hooks.on_candidate = [&](const SignCandidate& c) {
      ++s.candidates;
      for (float v : c.data()) {
        if (v != 1.0F && v != -1.0F) {
          ++s.bad_candidates;
          break;
        }
      }
    };
    hooks.on_step = [&](const StepState& st) {
      ++s.boundaries;
      if (cfg.double_step) {
        s.worst_ledger = std::max(s.worst_ledger, std::abs(st.alpha + st.t * st.beta - cfg.epsilon));
      } else {
        s.worst_ledger = std::max(s.worst_ledger, std::abs(st.alpha - st.beta));
      }
    };
    QueryBudget budget;
    const AttackResult res = bmi_fgsm(image, cfg, clf, budget, rng, hooks);
    ++s.runs;
    const double excess = linf_distance(res.adversarial, image) - cfg.epsilon;
    s.worst_excess = std::max(s.worst_excess, excess);
    if (excess > 1e-6 || !res.adversarial.in_unit_range()) ++s.envelope_violations;
    for (const auto& rec : res.trace) {
      ++s.traces;
      for (std::size_t g = 1; g < rec.de_trace.size(); ++g) {
        if (rec.de_trace[g] > rec.de_trace[g - 1]) {
          ++s.non_monotone_traces;
          break;
        }
      }
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Desk-scale items: correctly classified toy items the white-box oracle can
// break at the same epsilon, picked round-robin over classes.

std::vector<std::size_t> desk_items(const ToySetup& toy, std::size_t want, double eps, int T) {
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(toy.data.num_classes));
  for (std::size_t i = 0; i < toy.data.size(); ++i) {
    by_class[static_cast<std::size_t>(toy.data.labels[i])].push_back(i);
  }
  std::vector<std::size_t> order;
  for (std::size_t k = 0; order.size() < toy.data.size(); ++k) {
    for (const auto& bucket : by_class) {
      if (k < bucket.size()) order.push_back(bucket[k]);
    }
  }
  const LocalClassifier clf(toy.model);
  std::vector<std::size_t> out;
  for (std::size_t i : order) {
    if (out.size() == want) break;
    const int y = toy.data.labels[i];
    if (top_label(clf.predict(toy.data.images[i])) != y) continue;
    MIFGSMConfig mi;
    mi.epsilon = eps;
    mi.iterations = T;
    QueryBudget budget;
    if (!mi_fgsm_reference(toy.data.images[i], mi, *toy.model, FitnessSpec::untargeted(y), budget)
             .success) {
      continue;
    }
    out.push_back(i);
  }
  return out;
}

AttackConfig desk_config(int y) {
  AttackConfig cfg;
  cfg.epsilon = 0.3;
  cfg.iterations = 20;
  cfg.de.generations = 30;
  cfg.de.population = 40;
  cfg.spec = FitnessSpec::untargeted(y);
  return cfg;
}

// ---------------------------------------------------------------------------
// Brute-force oracles, deliberately written as plain nested loops.

std::vector<double> conv_oracle(const std::vector<double>& x, int C, int H, int W,
                                const std::vector<float>& w, const std::vector<float>& b, int O,
                                int KH, int KW, int S, int P, int& OH, int& OW) {
  OH = (H + 2 * P - KH) / S + 1;
  OW = (W + 2 * P - KW) / S + 1;
  std::vector<double> y(static_cast<std::size_t>(O * OH * OW));
  for (int o = 0; o < O; ++o) {
    for (int r = 0; r < OH; ++r) {
      for (int c = 0; c < OW; ++c) {
        long double acc = b[static_cast<std::size_t>(o)];
        for (int ci = 0; ci < C; ++ci) {
          for (int kh = 0; kh < KH; ++kh) {
            for (int kw = 0; kw < KW; ++kw) {
              const int ir = r * S + kh - P;
              const int ic = c * S + kw - P;
              if (ir < 0 || ir >= H || ic < 0 || ic >= W) continue;
              acc += static_cast<long double>(
                         w[static_cast<std::size_t>(((o * C + ci) * KH + kh) * KW + kw)]) *
                     x[static_cast<std::size_t>((ci * H + ir) * W + ic)];
            }
          }
        }
        y[static_cast<std::size_t>((o * OH + r) * OW + c)] = static_cast<double>(acc);
      }
    }
  }
  return y;
}

std::vector<double> softmax_oracle(const std::vector<double>& z) {
  long double total = 0;
  for (double v : z) total += std::exp(static_cast<long double>(v));
  std::vector<double> p;
  for (double v : z) p.push_back(static_cast<double>(std::exp(static_cast<long double>(v)) / total));
  return p;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// ---------------------------------------------------------------------------

Outcome sign_domain_and_envelope() {
  const auto start = Clock::now();
  const RandomRunStats s = random_runs(200, 1000);
  const double secs = seconds_since(start);
  const bool pass = s.bad_candidates == 0 && s.envelope_violations == 0 && s.candidates > 0 &&
                    secs < 120.0;
  return {pass, fmt("%zu runs, %zu candidates, %zu outside {-1,+1}, %zu envelope violations, "
                    "max(linf - eps) = %.3g, %.1fs of 120s",
                    s.runs, s.candidates, s.bad_candidates, s.envelope_violations, s.worst_excess,
                    secs)};
}

Outcome double_step_ledger() {
  const RandomRunStats s = random_runs(200, 1000);
  return {s.boundaries > 0 && s.worst_ledger <= 1e-9,
          fmt("%zu iteration boundaries, max |alpha + t*beta - eps| = %.3g (tol 1e-9)",
              s.boundaries, s.worst_ledger)};
}

Outcome elitism() {
  const RandomRunStats s = random_runs(50, 5000);
  return {s.traces > 0 && s.non_monotone_traces == 0,
          fmt("%zu runs, %zu DE traces, %zu with an increasing step", s.runs, s.traces,
              s.non_monotone_traces)};
}

Outcome surrogate_recovery() {
  const auto start = Clock::now();
  const Shape shape{1, 4, 4};
  int good_seeds = 0;
  std::string matches;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RngStream rng(seed);
    const SurrogateClassifier clf(random_sign_tensor(shape, rng));
    DEParams params;
    params.population = 20;
    params.generations = 30;
    QueryBudget budget;
    const Evaluator eval{clf, budget, FitnessSpec::untargeted(0)};
    const ImageTensor grey(shape, 0.5F);
    Population pop = init_population(shape, params, rng);
    const GradientSignSearch out = approx_gradient_signs(grey, std::move(pop), 0.25, params, eval, rng);
    const SignCandidate& best = out.population.members[out.population.best_index()];
    int agree = 0;
    for (std::size_t j = 0; j < best.size(); ++j) agree += best[j] == clf.hidden()[j] ? 1 : 0;
    if (agree >= 14) ++good_seeds;
    matches += (matches.empty() ? "" : ",") + std::to_string(agree);
  }
  const double secs = seconds_since(start);
  return {good_seeds >= 18 && secs < 30.0,
          fmt("%d/20 seeds with >= 14/16 matches (need 18), matches [%s], %.1fs of 30s",
              good_seeds, matches.c_str(), secs)};
}

Outcome desk_scale_success() {
  const auto start = Clock::now();
  const ToySetup& toy = toy_setup();
  const LocalClassifier clf(toy.model);
  const auto items = desk_items(toy, 50, 0.3, 20);
  int successes = 0;
  int outside = 0;
  for (std::size_t i : items) {
    const int y = toy.data.labels[i];
    RngStream rng(item_seed(11, toy.data.ids[i]));
    QueryBudget budget;
    const AttackResult r = bmi_fgsm(toy.data.images[i], desk_config(y), clf, budget, rng);
    if (r.success) {
      ++successes;
      if (r.linf > 0.3 + 1e-6) ++outside;
    }
  }
  const double secs = seconds_since(start);
  const double rate = items.empty() ? 0.0 : 100.0 * successes / static_cast<double>(items.size());
  const bool pass = toy.train_accuracy >= 0.9 && items.size() == 50 && rate >= 95.0 &&
                    outside == 0 && secs < 300.0;
  return {pass, fmt("train accuracy %.1f%%, %zu oracle-verified items, success %.1f%% (need 95%%), "
                    "%d successes beyond eps, %.1fs of 300s",
                    100.0 * toy.train_accuracy, items.size(), rate, outside, secs)};
}

// Per-arm success counts on the desk items under a hard query budget.
struct AblationCounts {
  int full = 0;
  int no_double_step = 0;
  int no_reuse = 0;
  std::size_t items = 0;
};

AblationCounts ablation_counts(std::uint64_t budget_limit, int T, int G, int N) {
  const ToySetup& toy = toy_setup();
  const LocalClassifier clf(toy.model);
  const auto items = desk_items(toy, 50, 0.3, 20);
  AblationCounts c;
  c.items = items.size();
  for (std::size_t i : items) {
    const int y = toy.data.labels[i];
    AttackConfig cfg = desk_config(y);
    cfg.iterations = T;
    cfg.de.generations = G;
    cfg.de.population = N;
    auto attempt = [&](AttackConfig variant) {
      RngStream rng(item_seed(23, toy.data.ids[i]));
      QueryBudget budget(budget_limit);
      return bmi_fgsm(toy.data.images[i], variant, clf, budget, rng).success ? 1 : 0;
    };
    c.full += attempt(cfg);
    AttackConfig nds = cfg;
    nds.double_step = false;
    c.no_double_step += attempt(nds);
    AttackConfig ncr = cfg;
    ncr.keep_rate = 0.0;
    c.no_reuse += attempt(ncr);
  }
  return c;
}

Outcome ablation_direction() {
  const std::uint64_t limit = 1200;
  const AblationCounts c = ablation_counts(limit, 20, 5, 10);
  const bool pass = c.items == 50 && c.full >= c.no_double_step && c.full > c.no_reuse;
  return {pass, fmt("budget %llu, %zu items: full %d, no-double-step %d, KR=0 %d "
                    "(need full >= no-double-step and full > KR=0)",
                    static_cast<unsigned long long>(limit), c.items, c.full, c.no_double_step,
                    c.no_reuse)};
}

Outcome confidence_trace_ordering() {
  const ToySetup& toy = toy_setup();
  const LocalClassifier clf(toy.model);
  const auto items = desk_items(toy, 15, 0.3, 20);
  double sum[3] = {0, 0, 0};
  int runs = 0;
  for (std::size_t item : items) {
    const int y = toy.data.labels[item];
    AttackConfig cfg = desk_config(y);
    cfg.epsilon = 0.2;
    cfg.iterations = 10;
    cfg.de.generations = 5;
    cfg.de.population = 10;
    cfg.early_return = false;
    AttackConfig variants[3] = {cfg, cfg, cfg};
    variants[1].double_step = false;
    variants[2].keep_rate = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      for (int v = 0; v < 3; ++v) {
        RngStream rng(seed);
        QueryBudget budget;
        const AttackResult r = bmi_fgsm(toy.data.images[item], variants[v], clf, budget, rng);
        sum[v] += r.trace.back().true_label_confidence;
      }
      ++runs;
    }
  }
  const double full = sum[0] / runs, nds = sum[1] / runs, ncr = sum[2] / runs;
  return {full < nds && nds < ncr,
          fmt("%zu items x 20 seeds, mean final F_y: full %.4f, no-double-step %.4f, "
              "no-candidate-reuse %.4f",
              items.size(), full, nds, ncr)};
}

Outcome query_accounting() {
  const ToySetup& toy = toy_setup();
  const LocalClassifier local(toy.model);
  std::string detail;
  bool pass = true;

  const int T = 4, G = 3, N = 6;
  const CountingClassifier counter(local);
  AttackConfig cfg = desk_config(toy.data.labels[0]);
  cfg.iterations = T;
  cfg.de.generations = G;
  cfg.de.population = N;
  cfg.early_return = false;
  cfg.workers = 3;
  RngStream rng(5);
  QueryBudget unlimited;
  const AttackResult r = bmi_fgsm(toy.data.images[0], cfg, counter, unlimited, rng);
  const std::uint64_t expected = static_cast<std::uint64_t>(T * N * (G + 2));
  pass = pass && counter.calls() == expected && r.queries == expected && r.trace.size() == T;
  detail += fmt("stub saw %llu evaluations, result reports %llu, T*N*(G+2) = %llu",
                static_cast<unsigned long long>(counter.calls()),
                static_cast<unsigned long long>(r.queries),
                static_cast<unsigned long long>(expected));

  StubServer server(model_handler(local));
  RemoteEndpoint ep;
  ep.base_url = server.url();
  const RemoteClassifier remote(ep);
  QueryBudget budget(500);
  const PredictionVector clean = remote_classify(remote, toy.data.images[0], budget);
  AttackConfig rc = desk_config(top_label(clean));
  rc.spec = FitnessSpec::label_score(top_label(clean));
  rc.early_return = false;
  rc.de.population = 10;
  rc.de.generations = 10;
  rc.workers = 4;
  RngStream rrng(9);
  const AttackResult rr = bmi_fgsm(toy.data.images[0], rc, remote, budget, rrng);
  bool threw_at_limit = false;
  try {
    remote_classify(remote, toy.data.images[0], budget);
  } catch (const BudgetExceeded&) {
    threw_at_limit = true;
  }
  pass = pass && budget.used() == 500 && server.requests() == 500 && threw_at_limit &&
         rr.partial && rr.status == AttackStatus::kBudgetExhausted;
  detail += fmt("; remote limit 500: used %llu, server saw %llu requests, next query %s",
                static_cast<unsigned long long>(budget.used()),
                static_cast<unsigned long long>(server.requests()),
                threw_at_limit ? "raised BudgetExceeded" : "was allowed");
  return {pass, detail};
}

Outcome oracle_equivalence() {
  double worst_conv = 0.0, worst_dense = 0.0, worst_softmax = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    RngStream rng(77000 + k);
    const int C = 1 + static_cast<int>(rng.below(3));
    const int H = 3 + static_cast<int>(rng.below(5));
    const int W = 3 + static_cast<int>(rng.below(5));
    const int O = 1 + static_cast<int>(rng.below(4));
    const int KH = 1 + static_cast<int>(rng.below(3));
    const int KW = 1 + static_cast<int>(rng.below(3));
    const int S = 1 + static_cast<int>(rng.below(2));
    const int P = static_cast<int>(rng.below(2));
    const int classes = 2 + static_cast<int>(rng.below(5));
    int OH = (H + 2 * P - KH) / S + 1;
    int OW = (W + 2 * P - KW) / S + 1;
    const int flat = O * OH * OW;
    const Shape shape{C, H, W};
    const Model m = random_model(shape,
                                 {LayerSpec::conv2d(C, O, KH, KW, S, P), LayerSpec::simple(LayerKind::kFlatten),
                                  LayerSpec::dense(flat, classes), LayerSpec::simple(LayerKind::kSoftmax)},
                                 rng);
    const ImageTensor x = random_image(shape, rng);

    const auto& w = m.weights();
    const LayerSpec& conv = m.layers()[0];
    const LayerSpec& dense = m.layers()[2];
    std::vector<float> cw(w.begin() + static_cast<long>(conv.weight_offset),
                          w.begin() + static_cast<long>(conv.weight_offset + conv.weight_count()));
    std::vector<float> cb(w.begin() + static_cast<long>(conv.bias_offset),
                          w.begin() + static_cast<long>(conv.bias_offset + conv.bias_count()));
    const std::vector<double> xin(x.data().begin(), x.data().end());
    const std::vector<double> conv_out = conv_oracle(xin, C, H, W, cw, cb, O, KH, KW, S, P, OH, OW);

    // Conv alone through a model whose head is just softmax over the conv map.
    const Model conv_only = [&] {
      Model cm = Model::with_layout(shape, {LayerSpec::conv2d(C, O, KH, KW, S, P),
                                            LayerSpec::simple(LayerKind::kFlatten),
                                            LayerSpec::simple(LayerKind::kSoftmax)});
      auto& cwts = cm.mutable_weights();
      std::copy(cw.begin(), cw.end(), cwts.begin());
      std::copy(cb.begin(), cb.end(), cwts.begin() + static_cast<long>(cw.size()));
      return cm;
    }();
    worst_conv = std::max(worst_conv, max_abs_diff(conv_only.logits(x), conv_out));

    std::vector<double> z(static_cast<std::size_t>(classes));
    for (int o = 0; o < classes; ++o) {
      long double acc = w[dense.bias_offset + static_cast<std::size_t>(o)];
      for (int i = 0; i < flat; ++i) {
        acc += static_cast<long double>(
                   w[dense.weight_offset + static_cast<std::size_t>(o * flat + i)]) *
               conv_out[static_cast<std::size_t>(i)];
      }
      z[static_cast<std::size_t>(o)] = static_cast<double>(acc);
    }
    worst_dense = std::max(worst_dense, max_abs_diff(m.logits(x), z));
    worst_softmax = std::max(worst_softmax, max_abs_diff(m.forward(x), softmax_oracle(z)));
  }

  // Softmax-only model: the input is the logit vector, so dCE/dx = p - onehot(y).
  double worst_grad = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    RngStream rng(88000 + k);
    const int n = 2 + static_cast<int>(rng.below(8));
    const Shape shape{n, 1, 1};
    const Model sm(shape, {LayerSpec::simple(LayerKind::kSoftmax)}, {});
    const ImageTensor x = random_image(shape, rng);
    const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    QueryBudget budget;
    const auto g = numeric_gradient(sm, x, y, kDefaultFiniteDifferenceStep, budget);
    std::vector<double> closed = softmax_oracle(std::vector<double>(x.data().begin(), x.data().end()));
    closed[static_cast<std::size_t>(y)] -= 1.0;
    worst_grad = std::max(worst_grad, max_abs_diff(g, closed));
  }
  const bool pass = worst_conv <= 1e-5 && worst_dense <= 1e-5 && worst_softmax <= 1e-5 &&
                    worst_grad <= 1e-4;
  return {pass, fmt("100 instances: max |conv| %.2g, |dense| %.2g, |softmax| %.2g (tol 1e-5); "
                    "numeric vs closed-form gradient %.2g (tol 1e-4)",
                    worst_conv, worst_dense, worst_softmax, worst_grad)};
}

std::vector<std::uint8_t> slurp(const fs::path& p) { return read_file(p); }

Outcome determinism() {
  const ToySetup& toy = toy_setup();
  const fs::path root = fs::temp_directory_path() / ("signhunt_accept_det_" + std::to_string(::getpid()));
  fs::remove_all(root);
  auto run_once = [&](int workers, const std::string& tag) {
    Campaign c;
    c.dataset = toy.data;
    c.model = toy.model;
    c.model_name = "toy";
    c.attack = desk_config(0);
    c.attack.iterations = 6;
    c.attack.de.generations = 4;
    c.attack.de.population = 8;
    c.arms = {Arm::kFull, Arm::kNoDoubleStep, Arm::kNoCandidateReuse, Arm::kRandomBaseline};
    c.seeds = {3, 4};
    c.max_items = 12;
    c.workers = workers;
    c.out_dir = root / tag;
    run_campaign(c);
    return c.out_dir;
  };
  const fs::path a = run_once(1, "w1a");
  const fs::path b = run_once(1, "w1b");
  const fs::path c8 = run_once(8, "w8");

  auto report_text = [](const fs::path& dir) {
    const auto raw = read_file(dir / "report.json");
    return strip_timing(nlohmann::json::parse(raw.begin(), raw.end())).dump();
  };
  const std::string ra = report_text(a);
  bool same = ra == report_text(b) && ra == report_text(c8);
  std::size_t pngs = 0, png_mismatch = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (entry.path().extension() != ".png") continue;
    ++pngs;
    const fs::path rel = fs::relative(entry.path(), a);
    const auto bytes = slurp(entry.path());
    if (!fs::exists(b / rel) || !fs::exists(c8 / rel) || slurp(b / rel) != bytes ||
        slurp(c8 / rel) != bytes) {
      ++png_mismatch;
    }
  }
  const bool csv_same = slurp(a / "summary.csv") == slurp(c8 / "summary.csv");
  fs::remove_all(root);
  const bool pass = same && csv_same && pngs > 0 && png_mismatch == 0;
  return {pass, fmt("report.json identical (timing stripped) across 2 runs at 1 worker and 1 at 8: "
                    "%s; %zu PNG artifacts, %zu differ",
                    same ? "yes" : "no", pngs, png_mismatch)};
}

}  // namespace

int main() {
  run("sign-domain-and-envelope", sign_domain_and_envelope);
  run("double-step-ledger", double_step_ledger);
  run("elitism", elitism);
  run("surrogate-sign-recovery", surrogate_recovery);
  run("desk-scale-success", desk_scale_success);
  run("ablation-direction", ablation_direction);
  run("confidence-trace-ordering", confidence_trace_ordering);
  run("query-accounting", query_accounting);
  run("oracle-equivalence", oracle_equivalence);
  run("determinism", determinism);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
