#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "embfair/data.hpp"
#include "embfair/embeddings.hpp"

namespace embfair {

struct TrainConfig {
  double learning_rate = 0.08;
  int batch_size = 64;
  int epochs = 12;
  int hidden = 32;
  double momentum = 0.9;
  int patience = 3;               // early stop on dev accuracy
  std::uint64_t seed = 1;
  double probe_learning_rate = 0.2;
  int probe_epochs = 40;
};

// Attention-pooling encoder over fixed embeddings, dense ReLU, linear logits.
struct ClassifierModel {
  Eigen::VectorXd attention;  // d
  Eigen::MatrixXd W1;         // h x d
  Eigen::VectorXd b1;         // h
  Eigen::MatrixXd W2;         // C x h
  Eigen::VectorXd b2;         // C
  std::vector<std::string> labels;
  int majority_label = 0;     // fallback prediction for empty inputs

  int hidden() const { return static_cast<int>(b1.size()); }
  int num_classes() const { return static_cast<int>(b2.size()); }
  int label_index(const std::string& occ) const;
};

struct ProbeModel {
  Eigen::VectorXd w;
  double b = 0.0;
  int majority_gender = 0;
};

// In-vocabulary token rows plus targets; OOV tokens are skipped.
struct EncodedExample {
  std::vector<int> token_rows;
  int label = 0;
  int gender = 0;
};

struct ModelGrads {
  Eigen::VectorXd attention;
  Eigen::MatrixXd W1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;
  Eigen::VectorXd b2;
  void resize_like(const ClassifierModel& m);
  void set_zero();
};

std::optional<EncodedExample> encode_example(const EmbeddingSet& e,
                                             const ClassifierModel& m,
                                             const Biography& bio);

// Mean softmax cross-entropy over the batch; accumulates gradients when
// `grads` is non-null. Examples with no tokens are ignored.
double classifier_loss(const ClassifierModel& m, const EmbeddingSet& e,
                       const std::vector<EncodedExample>& batch,
                       ModelGrads* grads = nullptr);

ClassifierModel init_classifier(const EmbeddingSet& e,
                                const std::vector<std::string>& labels,
                                const TrainConfig& cfg);

// Trains on the train split, selects the epoch with best dev accuracy,
// deterministic given cfg.seed. Empty-after-encoding bios are dropped.
ClassifierModel train_classifier(const std::vector<Biography>& bios,
                                 const EmbeddingSet& e, const TrainConfig& cfg);

// ReLU(W1 * pooled + b1); nullopt when no token is in vocabulary.
std::optional<Eigen::VectorXd> sentence_representation(const ClassifierModel& m,
                                                       const EmbeddingSet& e,
                                                       const std::vector<std::string>& tokens);

// Argmax label index + softmax probabilities; ties go to the lowest index.
// nullopt for empty input.
std::optional<std::pair<int, Eigen::VectorXd>> predict(const ClassifierModel& m,
                                                       const EmbeddingSet& e,
                                                       const std::vector<std::string>& tokens);

// Logistic-regression gradient on frozen representations.
double probe_loss(const ProbeModel& p, const std::vector<Eigen::VectorXd>& reps,
                  const std::vector<int>& genders, Eigen::VectorXd* grad_w = nullptr,
                  double* grad_b = nullptr);

// Trains on the train split, reports accuracy on the test split. The
// classifier is untouched.
std::pair<ProbeModel, double> train_gender_probe(const ClassifierModel& m,
                                                 const EmbeddingSet& e,
                                                 const std::vector<Biography>& bios,
                                                 const TrainConfig& cfg);

void save_model(const ClassifierModel& m, const TrainConfig& cfg,
                const std::string& debias_mode, const std::string& path);
ClassifierModel load_model(const std::string& path);

}  // namespace embfair
