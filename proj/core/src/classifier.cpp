#include "embfair/classifier.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "embfair/errors.hpp"
#include "embfair/rng.hpp"

namespace embfair {

int ClassifierModel::label_index(const std::string& occ) const {
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == occ) return static_cast<int>(i);
  }
  return -1;
}

void ModelGrads::resize_like(const ClassifierModel& m) {
  attention.resize(m.attention.size());
  W1.resize(m.W1.rows(), m.W1.cols());
  b1.resize(m.b1.size());
  W2.resize(m.W2.rows(), m.W2.cols());
  b2.resize(m.b2.size());
  set_zero();
}

void ModelGrads::set_zero() {
  attention.setZero();
  W1.setZero();
  b1.setZero();
  W2.setZero();
  b2.setZero();
}

std::optional<EncodedExample> encode_example(const EmbeddingSet& e,
                                             const ClassifierModel& m,
                                             const Biography& bio) {
  EncodedExample ex;
  ex.gender = bio.gender;
  ex.label = m.label_index(bio.occupation);
  if (ex.label < 0) return std::nullopt;
  for (const auto& t : bio.tokens) {
    int r = e.row(t);
    if (r >= 0) ex.token_rows.push_back(r);
  }
  if (ex.token_rows.empty()) return std::nullopt;
  return ex;
}

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  Eigen::VectorXd s = (z.array() - z.maxCoeff()).exp();
  return s / s.sum();
}

struct Forward {
  Eigen::MatrixXd tokens;   // n x d
  Eigen::VectorXd alpha;    // n
  Eigen::VectorXd pooled;   // d
  Eigen::VectorXd z1;       // h (pre-activation)
  Eigen::VectorXd rep;      // h
  Eigen::VectorXd probs;    // C
};

void run_forward(const ClassifierModel& m, const EmbeddingSet& e,
                 const std::vector<int>& rows, Forward& f) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  f.tokens.resize(n, e.dim);
  for (Eigen::Index i = 0; i < n; ++i) f.tokens.row(i) = e.matrix.row(rows[static_cast<size_t>(i)]);
  f.alpha = softmax(f.tokens * m.attention);
  f.pooled = f.tokens.transpose() * f.alpha;
  f.z1 = m.W1 * f.pooled + m.b1;
  f.rep = f.z1.cwiseMax(0.0);
  f.probs = softmax(m.W2 * f.rep + m.b2);
}

}  // namespace

double classifier_loss(const ClassifierModel& m, const EmbeddingSet& e,
                       const std::vector<EncodedExample>& batch, ModelGrads* grads) {
  double loss = 0.0;
  long n_used = 0;
  Forward f;
  for (const auto& ex : batch) {
    if (ex.token_rows.empty()) continue;
    ++n_used;
    run_forward(m, e, ex.token_rows, f);
    loss += -std::log(std::max(f.probs(ex.label), 1e-300));
    if (!grads) continue;

    Eigen::VectorXd dlogits = f.probs;
    dlogits(ex.label) -= 1.0;
    grads->W2.noalias() += dlogits * f.rep.transpose();
    grads->b2 += dlogits;
    Eigen::VectorXd drep = m.W2.transpose() * dlogits;
    Eigen::VectorXd dz1 = (f.z1.array() > 0.0).select(drep, 0.0);
    grads->W1.noalias() += dz1 * f.pooled.transpose();
    grads->b1 += dz1;
    Eigen::VectorXd dpooled = m.W1.transpose() * dz1;
    Eigen::VectorXd dalpha = f.tokens * dpooled;
    double dot = f.alpha.dot(dalpha);
    Eigen::VectorXd dscores = f.alpha.array() * (dalpha.array() - dot);
    grads->attention.noalias() += f.tokens.transpose() * dscores;
  }
  if (n_used == 0) return 0.0;
  if (grads) {
    grads->attention /= static_cast<double>(n_used);
    grads->W1 /= static_cast<double>(n_used);
    grads->b1 /= static_cast<double>(n_used);
    grads->W2 /= static_cast<double>(n_used);
    grads->b2 /= static_cast<double>(n_used);
  }
  return loss / static_cast<double>(n_used);
}

namespace {

void fill_uniform(Eigen::Ref<Eigen::MatrixXd> m, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(-bound, bound);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = ud(rng);
  }
}

bool finite(const ClassifierModel& m) {
  return m.attention.allFinite() && m.W1.allFinite() && m.b1.allFinite() &&
         m.W2.allFinite() && m.b2.allFinite();
}

}  // namespace

ClassifierModel init_classifier(const EmbeddingSet& e,
                                const std::vector<std::string>& labels,
                                const TrainConfig& cfg) {
  if (labels.size() < 2) throw DataError("need at least 2 classes");
  ClassifierModel m;
  m.labels = labels;
  const int d = e.dim, h = cfg.hidden;
  const auto C = static_cast<int>(labels.size());
  auto rng = make_rng(cfg.seed, "classifier-init");
  m.attention.resize(d);
  fill_uniform(m.attention, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  m.W1.resize(h, d);
  fill_uniform(m.W1, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  m.b1 = Eigen::VectorXd::Zero(h);
  m.W2.resize(C, h);
  fill_uniform(m.W2, 1.0 / std::sqrt(static_cast<double>(h)), rng);
  m.b2 = Eigen::VectorXd::Zero(C);
  return m;
}

namespace {

double accuracy_on(const ClassifierModel& m, const EmbeddingSet& e,
                   const std::vector<EncodedExample>& exs) {
  if (exs.empty()) return 0.0;
  long correct = 0;
  Forward f;
  for (const auto& ex : exs) {
    run_forward(m, e, ex.token_rows, f);
    Eigen::Index best = 0;
    f.probs.maxCoeff(&best);
    // maxCoeff already returns the first maximal index, matching the
    // lowest-label tie-break.
    if (static_cast<int>(best) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(exs.size());
}

}  // namespace

ClassifierModel train_classifier(const std::vector<Biography>& bios,
                                 const EmbeddingSet& e, const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0 || cfg.batch_size <= 0 || cfg.hidden <= 0) {
    throw ConfigError("invalid train config");
  }
  // Label inventory: sorted unique occupations over the whole dataset.
  std::vector<std::string> labels;
  {
    std::unordered_map<std::string, int> seen;
    for (const auto& b : bios) seen.emplace(b.occupation, 1);
    for (const auto& [occ, _] : seen) labels.push_back(occ);
    std::sort(labels.begin(), labels.end());
  }
  ClassifierModel m = init_classifier(e, labels, cfg);

  std::vector<EncodedExample> train, dev;
  std::vector<long> label_counts(labels.size(), 0);
  for (const auto& b : bios) {
    auto ex = encode_example(e, m, b);
    if (!ex) continue;
    if (b.split == Split::train) {
      ++label_counts[static_cast<size_t>(ex->label)];
      train.push_back(std::move(*ex));
    } else if (b.split == Split::dev) {
      dev.push_back(std::move(*ex));
    }
  }
  if (train.empty()) throw DataError("train split is empty");
  m.majority_label = static_cast<int>(
      std::max_element(label_counts.begin(), label_counts.end()) - label_counts.begin());

  ClassifierModel best = m;
  double best_dev = dev.empty() ? -1.0 : accuracy_on(m, e, dev);
  int since_best = 0;

  ModelGrads g, v;
  g.resize_like(m);
  v.resize_like(m);
  auto rng = make_rng(cfg.seed, "classifier-batches");
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), size_t{0});

  std::vector<EncodedExample> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      batch.clear();
      for (size_t i = start; i < end; ++i) batch.push_back(train[order[i]]);
      g.set_zero();
      double loss = classifier_loss(m, e, batch, &g);
      if (!std::isfinite(loss)) {
        throw NumericError("training loss diverged (NaN); try a smaller learning rate");
      }
      v.attention = cfg.momentum * v.attention - cfg.learning_rate * g.attention;
      v.W1 = cfg.momentum * v.W1 - cfg.learning_rate * g.W1;
      v.b1 = cfg.momentum * v.b1 - cfg.learning_rate * g.b1;
      v.W2 = cfg.momentum * v.W2 - cfg.learning_rate * g.W2;
      v.b2 = cfg.momentum * v.b2 - cfg.learning_rate * g.b2;
      m.attention += v.attention;
      m.W1 += v.W1;
      m.b1 += v.b1;
      m.W2 += v.W2;
      m.b2 += v.b2;
    }
    if (!finite(m)) {
      throw NumericError("model parameters diverged; try a smaller learning rate");
    }
    if (dev.empty()) {
      best = m;
      continue;
    }
    double acc = accuracy_on(m, e, dev);
    if (acc > best_dev) {
      best_dev = acc;
      best = m;
      since_best = 0;
    } else if (++since_best > cfg.patience) {
      break;
    }
  }
  return best;
}

std::optional<Eigen::VectorXd> sentence_representation(const ClassifierModel& m,
                                                       const EmbeddingSet& e,
                                                       const std::vector<std::string>& tokens) {
  std::vector<int> rows;
  for (const auto& t : tokens) {
    int r = e.row(t);
    if (r >= 0) rows.push_back(r);
  }
  if (rows.empty()) return std::nullopt;
  Forward f;
  run_forward(m, e, rows, f);
  return f.rep;
}

std::optional<std::pair<int, Eigen::VectorXd>> predict(const ClassifierModel& m,
                                                       const EmbeddingSet& e,
                                                       const std::vector<std::string>& tokens) {
  std::vector<int> rows;
  for (const auto& t : tokens) {
    int r = e.row(t);
    if (r >= 0) rows.push_back(r);
  }
  if (rows.empty()) return std::nullopt;
  Forward f;
  run_forward(m, e, rows, f);
  Eigen::Index best = 0;
  f.probs.maxCoeff(&best);
  return std::make_pair(static_cast<int>(best), f.probs);
}

double probe_loss(const ProbeModel& p, const std::vector<Eigen::VectorXd>& reps,
                  const std::vector<int>& genders, Eigen::VectorXd* grad_w,
                  double* grad_b) {
  double loss = 0.0;
  if (grad_w) grad_w->setZero();
  if (grad_b) *grad_b = 0.0;
  const auto n = reps.size();
  for (size_t i = 0; i < n; ++i) {
    double z = p.w.dot(reps[i]) + p.b;
    double y = static_cast<double>(genders[i]);
    // log(1+exp(-|z|)) form avoids overflow
    loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    if (grad_w || grad_b) {
      double sig = 1.0 / (1.0 + std::exp(-z));
      double dz = sig - y;
      if (grad_w) *grad_w += dz * reps[i];
      if (grad_b) *grad_b += dz;
    }
  }
  if (n == 0) return 0.0;
  loss /= static_cast<double>(n);
  if (grad_w) *grad_w /= static_cast<double>(n);
  if (grad_b) *grad_b /= static_cast<double>(n);
  return loss;
}

std::pair<ProbeModel, double> train_gender_probe(const ClassifierModel& m,
                                                 const EmbeddingSet& e,
                                                 const std::vector<Biography>& bios,
                                                 const TrainConfig& cfg) {
  std::vector<Eigen::VectorXd> train_reps;
  std::vector<int> train_genders;
  std::vector<Eigen::VectorXd> test_reps;
  std::vector<int> test_genders;
  long test_empty_f = 0, test_empty_m = 0;
  for (const auto& b : bios) {
    if (b.split == Split::dev) continue;
    auto rep = sentence_representation(m, e, b.tokens);
    if (b.split == Split::train) {
      if (rep) {
        train_reps.push_back(std::move(*rep));
        train_genders.push_back(b.gender);
      }
    } else {
      if (rep) {
        test_reps.push_back(std::move(*rep));
        test_genders.push_back(b.gender);
      } else if (b.gender == 1) {
        ++test_empty_f;
      } else {
        ++test_empty_m;
      }
    }
  }
  if (train_reps.empty()) throw DataError("no probe training representations");
  long nf = std::count(train_genders.begin(), train_genders.end(), 1);
  if (nf == 0 || nf == static_cast<long>(train_genders.size())) {
    throw DataError("probe training data contains a single gender");
  }

  ProbeModel p;
  p.w = Eigen::VectorXd::Zero(m.hidden());
  p.majority_gender = 2 * nf > static_cast<long>(train_genders.size()) ? 1 : 0;

  auto rng = make_rng(cfg.seed, "probe-batches");
  std::vector<size_t> order(train_reps.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Eigen::VectorXd gw(m.hidden()), vw = Eigen::VectorXd::Zero(m.hidden());
  double gb = 0.0, vb = 0.0;
  std::vector<Eigen::VectorXd> batch_reps;
  std::vector<int> batch_genders;
  for (int epoch = 0; epoch < cfg.probe_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      batch_reps.clear();
      batch_genders.clear();
      for (size_t i = start; i < end; ++i) {
        batch_reps.push_back(train_reps[order[i]]);
        batch_genders.push_back(train_genders[order[i]]);
      }
      double loss = probe_loss(p, batch_reps, batch_genders, &gw, &gb);
      if (!std::isfinite(loss)) {
        throw NumericError("probe loss diverged; try a smaller learning rate");
      }
      vw = cfg.momentum * vw - cfg.probe_learning_rate * gw;
      vb = cfg.momentum * vb - cfg.probe_learning_rate * gb;
      p.w += vw;
      p.b += vb;
    }
  }

  long correct = 0, total = 0;
  for (size_t i = 0; i < test_reps.size(); ++i) {
    int pred = p.w.dot(test_reps[i]) + p.b > 0.0 ? 1 : 0;
    if (pred == test_genders[i]) ++correct;
    ++total;
  }
  // Empty test bios get the majority training gender.
  correct += p.majority_gender == 1 ? test_empty_f : test_empty_m;
  total += test_empty_f + test_empty_m;
  double acc = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  return {std::move(p), acc};
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  auto r = static_cast<Eigen::Index>(j.size());
  auto c = r ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = j[static_cast<size_t>(i)][static_cast<size_t>(k)].get<double>();
  }
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

void save_model(const ClassifierModel& m, const TrainConfig& cfg,
                const std::string& debias_mode, const std::string& path) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["debias_mode"] = debias_mode;
  j["labels"] = m.labels;
  j["majority_label"] = m.majority_label;
  j["attention"] = vector_to_json(m.attention);
  j["W1"] = matrix_to_json(m.W1);
  j["b1"] = vector_to_json(m.b1);
  j["W2"] = matrix_to_json(m.W2);
  j["b2"] = vector_to_json(m.b2);
  j["config"] = {{"learning_rate", cfg.learning_rate},
                 {"batch_size", cfg.batch_size},
                 {"epochs", cfg.epochs},
                 {"hidden", cfg.hidden},
                 {"momentum", cfg.momentum},
                 {"patience", cfg.patience},
                 {"seed", cfg.seed},
                 {"probe_learning_rate", cfg.probe_learning_rate},
                 {"probe_epochs", cfg.probe_epochs}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(1) << '\n';
}

ClassifierModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(path + ": malformed model JSON: " + ex.what());
  }
  ClassifierModel m;
  m.labels = j.at("labels").get<std::vector<std::string>>();
  m.majority_label = j.at("majority_label").get<int>();
  m.attention = vector_from_json(j.at("attention"));
  m.W1 = matrix_from_json(j.at("W1"));
  m.b1 = vector_from_json(j.at("b1"));
  m.W2 = matrix_from_json(j.at("W2"));
  m.b2 = vector_from_json(j.at("b2"));
  return m;
}

}  // namespace embfair
