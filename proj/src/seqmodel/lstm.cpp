#include "chordseed/seqmodel/lstm.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace chordseed::seqmodel {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using CMat = Eigen::Map<const MatrixXd>;
using CVec = Eigen::Map<const VectorXd>;
using MMat = Eigen::Map<MatrixXd>;
using MVec = Eigen::Map<VectorXd>;

namespace {

VectorXd sigmoid(const VectorXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

VectorXd tanh_vec(const VectorXd& z) { return z.array().tanh().matrix(); }

}  // namespace

ModelConfig ModelConfig::prior_reference() { return ModelConfig{}; }

ModelConfig ModelConfig::proposal_reference() {
  ModelConfig c;
  c.embed_dim = 256;
  c.hidden_dim = 256;
  return c;
}

ModelConfig ModelConfig::desk() {
  ModelConfig c;
  c.layers = 1;
  c.embed_dim = 32;
  c.hidden_dim = 64;
  c.dropout = 0.1;
  c.learning_rate = 5e-3;
  c.max_epochs = 30;
  c.batch_size = 32;
  c.patience = 4;
  c.seed = 7;
  return c;
}

void ModelConfig::validate() const {
  if (layers <= 0 || embed_dim <= 0 || hidden_dim <= 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must lie in [0, 1)");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (max_epochs <= 0 || batch_size <= 0 || patience <= 0) {
    throw std::invalid_argument("epochs, batch size and patience must be positive");
  }
}

nlohmann::json ModelConfig::to_json() const {
  return {{"layers", layers},         {"embed_dim", embed_dim},   {"hidden_dim", hidden_dim},
          {"dropout", dropout},       {"learning_rate", learning_rate},
          {"max_epochs", max_epochs}, {"batch_size", batch_size}, {"patience", patience},
          {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.layers = j.value("layers", c.layers);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.dropout = j.value("dropout", c.dropout);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.patience = j.value("patience", c.patience);
  c.seed = j.value("seed", c.seed);
  return c;
}

class LstmDecoder : public Decoder {
 public:
  explicit LstmDecoder(const LstmModel& model) : model_(model) {
    const int H = model.config_.hidden_dim;
    h_.assign(static_cast<std::size_t>(model.config_.layers), VectorXd::Zero(H));
    c_ = h_;
    feed(TokenVocab::kBos);
  }

  VectorXd logits() const override {
    const auto& m = model_;
    const auto& lay = m.layout_;
    const Index V = static_cast<Index>(m.vocab_.size());
    const Index H = m.config_.hidden_dim;
    CMat wo(m.params_.data() + lay.out_weights, V, H);
    CVec bo(m.params_.data() + lay.out_bias, V);
    return wo * h_.back() + bo;
  }

  void feed(TokenId id) override {
    const auto& m = model_;
    const auto& lay = m.layout_;
    const Index V = static_cast<Index>(m.vocab_.size());
    const Index E = m.config_.embed_dim;
    const Index H = m.config_.hidden_dim;
    if (id < 0 || id >= V) throw VocabMismatch("token id outside vocabulary");
    CMat emb(m.params_.data() + lay.embedding, E, V);
    VectorXd x = emb.col(id);
    for (int l = 0; l < m.config_.layers; ++l) {
      const Index in = m.input_dim(l);
      CMat w(m.params_.data() + lay.weights[static_cast<std::size_t>(l)], 4 * H, in + H);
      CVec b(m.params_.data() + lay.biases[static_cast<std::size_t>(l)], 4 * H);
      auto& h = h_[static_cast<std::size_t>(l)];
      auto& c = c_[static_cast<std::size_t>(l)];
      VectorXd z = w.leftCols(in) * x + w.rightCols(H) * h + b;
      VectorXd i = sigmoid(z.segment(0, H));
      VectorXd f = sigmoid(z.segment(H, H));
      VectorXd g = tanh_vec(z.segment(2 * H, H));
      VectorXd o = sigmoid(z.segment(3 * H, H));
      c = f.cwiseProduct(c) + i.cwiseProduct(g);
      h = o.cwiseProduct(tanh_vec(c));
      x = h;
    }
  }

 private:
  const LstmModel& model_;
  std::vector<VectorXd> h_;
  std::vector<VectorXd> c_;
};

LstmModel::LstmModel(TokenVocab vocab, ModelConfig config, Role role, Init init)
    : vocab_(std::move(vocab)), config_(config), role_(role) {
  config_.validate();
  const Index V = static_cast<Index>(vocab_.size());
  const Index E = config_.embed_dim;
  const Index H = config_.hidden_dim;
  Index off = 0;
  layout_.embedding = off;
  off += E * V;
  for (int l = 0; l < config_.layers; ++l) {
    layout_.weights.push_back(off);
    off += 4 * H * (input_dim(l) + H);
    layout_.biases.push_back(off);
    off += 4 * H;
  }
  layout_.out_weights = off;
  off += V * H;
  layout_.out_bias = off;
  off += V;
  layout_.total = off;

  params_ = VectorXd::Zero(off);
  if (init == Init::Uniform) {
    std::mt19937_64 rng(config_.seed);
    const double k = 1.0 / std::sqrt(static_cast<double>(H));
    std::uniform_real_distribution<double> unif(-k, k);
    for (Index i = 0; i < layout_.out_bias; ++i) params_(i) = unif(rng);
  }
}

std::unique_ptr<Decoder> LstmModel::start() const { return std::make_unique<LstmDecoder>(*this); }

double LstmModel::loss_and_gradient(std::span<const Sequence> batch, VectorXd* grad,
                                    std::mt19937_64* dropout_rng) const {
  if (grad && grad->size() != params_.size()) *grad = VectorXd::Zero(params_.size());
  double total = 0.0;
  for (const auto& seq : batch) total += sequence_loss(seq, grad, dropout_rng);
  return total;
}

double LstmModel::sequence_loss(const Sequence& ids, VectorXd* grad,
                                std::mt19937_64* dropout_rng) const {
  const Index V = static_cast<Index>(vocab_.size());
  const Index E = config_.embed_dim;
  const Index H = config_.hidden_dim;
  const int L = config_.layers;
  if (ids.size() < 2) throw std::invalid_argument("sequence too short");
  for (TokenId id : ids) {
    if (id < 0 || id >= V) throw VocabMismatch("token id outside vocabulary");
  }
  const std::size_t T = ids.size() - 1;
  const bool drop = dropout_rng != nullptr && config_.dropout > 0.0;
  const double keep = 1.0 - config_.dropout;
  std::bernoulli_distribution keep_draw(keep);
  auto make_mask = [&](Index n) {
    VectorXd m(n);
    for (Index k = 0; k < n; ++k) m(k) = keep_draw(*dropout_rng) ? 1.0 / keep : 0.0;
    return m;
  };

  CMat emb(params_.data() + layout_.embedding, E, V);
  CMat wo(params_.data() + layout_.out_weights, V, H);
  CVec bo(params_.data() + layout_.out_bias, V);

  struct Step {
    VectorXd x, h_prev, c_prev, i, f, g, o, c, tc, in_mask;
  };
  std::vector<std::vector<Step>> cache(T, std::vector<Step>(static_cast<std::size_t>(L)));
  std::vector<VectorXd> top(T), top_mask(T), dlogits(T);
  std::vector<VectorXd> h(static_cast<std::size_t>(L), VectorXd::Zero(H));
  std::vector<VectorXd> c = h;

  double loss = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    VectorXd x = emb.col(ids[t]);
    for (int l = 0; l < L; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      const Index in = input_dim(l);
      CMat w(params_.data() + layout_.weights[ul], 4 * H, in + H);
      CVec b(params_.data() + layout_.biases[ul], 4 * H);
      Step& s = cache[t][ul];
      if (l > 0 && drop) {
        s.in_mask = make_mask(H);
        x = x.cwiseProduct(s.in_mask);
      }
      s.x = x;
      s.h_prev = h[ul];
      s.c_prev = c[ul];
      VectorXd z = w.leftCols(in) * x + w.rightCols(H) * h[ul] + b;
      s.i = sigmoid(z.segment(0, H));
      s.f = sigmoid(z.segment(H, H));
      s.g = tanh_vec(z.segment(2 * H, H));
      s.o = sigmoid(z.segment(3 * H, H));
      s.c = s.f.cwiseProduct(s.c_prev) + s.i.cwiseProduct(s.g);
      s.tc = tanh_vec(s.c);
      h[ul] = s.o.cwiseProduct(s.tc);
      c[ul] = s.c;
      x = h[ul];
    }
    if (drop) {
      top_mask[t] = make_mask(H);
      x = x.cwiseProduct(top_mask[t]);
    }
    top[t] = x;
    VectorXd lp = next_token_log_probs(wo * x + bo, 1.0);
    const double step = lp(ids[t + 1]);
    if (!std::isfinite(step)) throw DivergenceError("non-finite log-probability during training");
    loss -= step;
    if (grad) {
      VectorXd d = lp.array().exp();
      d(ids[t + 1]) -= 1.0;
      dlogits[t] = std::move(d);
    }
  }
  if (!grad) return loss;

  VectorXd& g = *grad;
  MMat gemb(g.data() + layout_.embedding, E, V);
  MMat gwo(g.data() + layout_.out_weights, V, H);
  MVec gbo(g.data() + layout_.out_bias, V);
  std::vector<VectorXd> dh_next(static_cast<std::size_t>(L), VectorXd::Zero(H));
  std::vector<VectorXd> dc_next = dh_next;

  for (std::size_t tt = T; tt-- > 0;) {
    gwo.noalias() += dlogits[tt] * top[tt].transpose();
    gbo += dlogits[tt];
    VectorXd dh_above = wo.transpose() * dlogits[tt];
    if (drop) dh_above = dh_above.cwiseProduct(top_mask[tt]);
    for (int l = L - 1; l >= 0; --l) {
      const auto ul = static_cast<std::size_t>(l);
      const Index in = input_dim(l);
      CMat w(params_.data() + layout_.weights[ul], 4 * H, in + H);
      MMat gw(g.data() + layout_.weights[ul], 4 * H, in + H);
      MVec gb(g.data() + layout_.biases[ul], 4 * H);
      const Step& s = cache[tt][ul];

      VectorXd dh = dh_above + dh_next[ul];
      VectorXd dc = dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tc.array().square()).matrix()) + dc_next[ul];
      VectorXd dz(4 * H);
      dz.segment(0, H) = dc.cwiseProduct(s.g).cwiseProduct(s.i.cwiseProduct((1.0 - s.i.array()).matrix()));
      dz.segment(H, H) =
          dc.cwiseProduct(s.c_prev).cwiseProduct(s.f.cwiseProduct((1.0 - s.f.array()).matrix()));
      dz.segment(2 * H, H) = dc.cwiseProduct(s.i).cwiseProduct((1.0 - s.g.array().square()).matrix());
      dz.segment(3 * H, H) =
          dh.cwiseProduct(s.tc).cwiseProduct(s.o.cwiseProduct((1.0 - s.o.array()).matrix()));
      dc_next[ul] = dc.cwiseProduct(s.f);

      gw.leftCols(in).noalias() += dz * s.x.transpose();
      gw.rightCols(H).noalias() += dz * s.h_prev.transpose();
      gb += dz;
      dh_next[ul] = w.rightCols(H).transpose() * dz;
      VectorXd dx = w.leftCols(in).transpose() * dz;
      if (l > 0) {
        dh_above = drop ? VectorXd(dx.cwiseProduct(s.in_mask)) : dx;
      } else {
        gemb.col(ids[tt]) += dx;
      }
    }
  }
  return loss;
}

}  // namespace chordseed::seqmodel
