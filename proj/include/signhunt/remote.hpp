#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <unordered_map>
#include <vector>

#include "signhunt/model.hpp"

namespace signhunt {

struct RemoteEndpoint {
  std::string base_url;  // e.g. http://127.0.0.1:8080
  int top_k = 5;
  std::chrono::milliseconds timeout{10000};
  std::string auth_token;  // sent as "Authorization: Bearer <token>" when set
  int max_attempts = 3;
  int max_concurrency = 4;
};

// Interns label names to dense indices in first-seen order. Thread-safe.
class LabelVocabulary {
 public:
  int intern(const std::string& name);
  std::optional<int> find(const std::string& name) const;
  std::string name(int index) const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> names_;
};

// Black-box HTTP classifier. POSTs {base}/classify with JSON
// {"image_b64": <base64 PNG>, "top_k": k} and expects HTTP 200 with
// {"labels":[{"name":..., "score":...}, ...]}. The returned vector is sparse:
// it spans every label seen so far and unreported labels score 0.
//
// Transport failures and non-200 statuses are retried up to max_attempts
// before RemoteUnavailable; a 200 with an unparseable body is a ProtocolError.
class RemoteClassifier : public Classifier {
 public:
  explicit RemoteClassifier(RemoteEndpoint endpoint);
  ~RemoteClassifier() override;

  PredictionVector predict(const ImageTensor& image) const override;

  const RemoteEndpoint& endpoint() const { return endpoint_; }
  LabelVocabulary& vocabulary() const { return *vocab_; }

 private:
  RemoteEndpoint endpoint_;
  std::unique_ptr<LabelVocabulary> vocab_;
  std::unique_ptr<std::counting_semaphore<>> inflight_;
};

// Budget-charged remote query: classify(RemoteClassifier(endpoint), ...).
PredictionVector remote_classify(const RemoteClassifier& classifier, const ImageTensor& image,
                                 QueryBudget& budget);

// Parses a service response body into (name, score) pairs.
std::vector<std::pair<std::string, double>> parse_remote_labels(const std::string& body);

}  // namespace signhunt
