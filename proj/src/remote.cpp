#include "signhunt/remote.hpp"

#include <httplib.h>

#include <json.hpp>

#include "signhunt/errors.hpp"
#include "signhunt/image_io.hpp"

namespace signhunt {

using nlohmann::json;

int LabelVocabulary::intern(const std::string& name) {
  std::lock_guard lock(mu_);
  auto [it, inserted] = index_.try_emplace(name, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

std::optional<int> LabelVocabulary::find(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string LabelVocabulary::name(int index) const {
  std::lock_guard lock(mu_);
  SIGNHUNT_REQUIRE(index >= 0 && static_cast<std::size_t>(index) < names_.size(),
                   "label index out of range");
  return names_[static_cast<std::size_t>(index)];
}

std::size_t LabelVocabulary::size() const {
  std::lock_guard lock(mu_);
  return names_.size();
}

std::vector<std::pair<std::string, double>> parse_remote_labels(const std::string& body) {
  std::vector<std::pair<std::string, double>> out;
  try {
    const json j = json::parse(body);
    const auto& labels = j.at("labels");
    if (!labels.is_array()) throw ProtocolError("remote response: 'labels' is not an array");
    for (const auto& entry : labels) {
      out.emplace_back(entry.at("name").get<std::string>(), entry.at("score").get<double>());
    }
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("remote response malformed: ") + e.what());
  }
  return out;
}

RemoteClassifier::RemoteClassifier(RemoteEndpoint endpoint)
    : endpoint_(std::move(endpoint)),
      vocab_(std::make_unique<LabelVocabulary>()),
      inflight_(std::make_unique<std::counting_semaphore<>>(std::max(1, endpoint_.max_concurrency))) {
  SIGNHUNT_REQUIRE(endpoint_.top_k >= 1, "remote endpoint: top_k must be >= 1");
  SIGNHUNT_REQUIRE(endpoint_.max_attempts >= 1, "remote endpoint: max_attempts must be >= 1");
  SIGNHUNT_REQUIRE(!endpoint_.base_url.empty(), "remote endpoint: empty base URL");
}

RemoteClassifier::~RemoteClassifier() = default;

PredictionVector RemoteClassifier::predict(const ImageTensor& image) const {
  const json request = {{"image_b64", base64_encode(encode_png(image))},
                        {"top_k", endpoint_.top_k}};
  const std::string body = request.dump();

  httplib::Headers headers;
  if (!endpoint_.auth_token.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint_.auth_token);
  }

  std::string response_body;
  std::string last_error;
  bool ok = false;
  {
    inflight_->acquire();
    struct Release {
      std::counting_semaphore<>* s;
      ~Release() { s->release(); }
    } release{inflight_.get()};

    httplib::Client client(endpoint_.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(endpoint_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    for (int attempt = 0; attempt < endpoint_.max_attempts && !ok; ++attempt) {
      auto res = client.Post("/classify", headers, body, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
      } else if (res->status != 200) {
        last_error = "HTTP status " + std::to_string(res->status);
      } else {
        response_body = res->body;
        ok = true;
      }
    }
  }
  if (!ok) {
    throw RemoteUnavailable("remote classifier " + endpoint_.base_url + " failed after " +
                            std::to_string(endpoint_.max_attempts) + " attempts: " + last_error);
  }

  const auto labels = parse_remote_labels(response_body);
  std::vector<std::pair<int, double>> indexed;
  indexed.reserve(labels.size());
  for (const auto& [name, score] : labels) indexed.emplace_back(vocab_->intern(name), score);

  PredictionVector out;
  out.kind = ScoreKind::kRawScores;
  out.scores.assign(vocab_->size(), 0.0F);
  for (const auto& [index, score] : indexed) {
    out.scores[static_cast<std::size_t>(index)] = static_cast<float>(score);
  }
  return out;
}

PredictionVector remote_classify(const RemoteClassifier& classifier, const ImageTensor& image,
                                 QueryBudget& budget) {
  return classify(classifier, image, budget);
}

}  // namespace signhunt
