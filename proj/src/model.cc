// softcorrect/model.cc

// Copyright 2026  SoftCorrect Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "softcorrect/model.h"

#include <cstring>
#include <fstream>

namespace softcorrect {

void ModelConfig::Validate() const {
  if (layers < 1) throw ConfigError("model.layers must be >= 1");
  if (dim < 2) throw ConfigError("model.dim must be >= 2");
  if (heads < 1 || dim % heads != 0)
    throw ConfigError("model.heads must divide model.dim");
  if (ffn < 1) throw ConfigError("model.ffn must be >= 1");
  if (k < 1) throw ConfigError("model.k must be >= 1");
  if (max_len < 1) throw ConfigError("model.max_len must be >= 1");
  if (vocab_content < 2) throw ConfigError("vocabulary not set on the model");
}

int ParamLayout::Add(const std::string& name, int rows, int cols) {
  entries_.push_back({name, total_, rows, cols});
  total_ += rows * cols;
  return static_cast<int>(entries_.size()) - 1;
}

ParamStore::ParamStore(std::shared_ptr<const ParamLayout> layout)
    : layout_(std::move(layout)) {
  data_ = Vec::Zero(layout_->total_size());
}

Eigen::Map<Mat> ParamStore::M(int handle) {
  const auto& e = layout_->entries()[handle];
  return Eigen::Map<Mat>(data_.data() + e.offset, e.rows, e.cols);
}

Eigen::Map<const Mat> ParamStore::M(int handle) const {
  const auto& e = layout_->entries()[handle];
  return Eigen::Map<const Mat>(data_.data() + e.offset, e.rows, e.cols);
}

namespace {

constexpr double kLnEps = 1e-5;

// y = xhat * g + b row-wise; caches xhat and 1/std per row.
Mat LayerNormForward(const Mat& x, const Eigen::Map<const Mat>& g,
                     const Eigen::Map<const Mat>& b, Mat* xhat, Vec* rstd) {
  const auto n = x.rows();
  const auto d = x.cols();
  xhat->resize(n, d);
  rstd->resize(n);
  Mat out(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().mean();
    const double rs = 1.0 / std::sqrt(var + kLnEps);
    (*rstd)(r) = rs;
    xhat->row(r) = ((x.row(r).array() - mean) * rs).matrix();
    out.row(r) = xhat->row(r).cwiseProduct(g.row(0)) + b.row(0);
  }
  return out;
}

Mat LayerNormBackward(const Mat& dy, const Mat& xhat, const Vec& rstd,
                      const Eigen::Map<const Mat>& g, Mat* dg, Mat* db) {
  const auto n = dy.rows();
  Mat dx(n, dy.cols());
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::RowVectorXd dxhat = dy.row(r).cwiseProduct(g.row(0));
    const double m1 = dxhat.mean();
    const double m2 = dxhat.cwiseProduct(xhat.row(r)).mean();
    dx.row(r) =
        ((dxhat.array() - m1 - xhat.row(r).array() * m2) * rstd(r)).matrix();
  }
  dg->row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
  db->row(0) += dy.colwise().sum();
  return dx;
}

}  // namespace

TransformerCore::TransformerCore(const ModelConfig& cfg, ParamLayout* layout,
                                 const std::string& prefix)
    : cfg_(cfg) {
  const int d = cfg.dim, f = cfg.ffn;
  layers_.resize(cfg.layers);
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string p = prefix + ".l" + std::to_string(l) + ".";
    LayerHandles& h = layers_[l];
    h.wq = layout->Add(p + "wq", d, d);
    h.bq = layout->Add(p + "bq", 1, d);
    h.wk = layout->Add(p + "wk", d, d);
    h.bk = layout->Add(p + "bk", 1, d);
    h.wv = layout->Add(p + "wv", d, d);
    h.bv = layout->Add(p + "bv", 1, d);
    h.wo = layout->Add(p + "wo", d, d);
    h.bo = layout->Add(p + "bo", 1, d);
    h.ln1g = layout->Add(p + "ln1g", 1, d);
    h.ln1b = layout->Add(p + "ln1b", 1, d);
    h.w1 = layout->Add(p + "w1", d, f);
    h.b1 = layout->Add(p + "b1", 1, f);
    h.w2 = layout->Add(p + "w2", f, d);
    h.b2 = layout->Add(p + "b2", 1, d);
    h.ln2g = layout->Add(p + "ln2g", 1, d);
    h.ln2b = layout->Add(p + "ln2b", 1, d);
  }
}

Mat TransformerCore::Forward(const Mat& x0, const ParamStore& p,
                             Trace* trace) const {
  const int heads = cfg_.heads;
  const int dh = cfg_.dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  trace->layers.resize(layers_.size());
  Mat x = x0;
  for (size_t l = 0; l < layers_.size(); ++l) {
    const LayerHandles& hh = layers_[l];
    LayerTrace& tr = trace->layers[l];
    tr.x_in = x;
    tr.q = (x * p.M(hh.wq)).rowwise() + p.M(hh.bq).row(0);
    tr.k = (x * p.M(hh.wk)).rowwise() + p.M(hh.bk).row(0);
    tr.v = (x * p.M(hh.wv)).rowwise() + p.M(hh.bv).row(0);
    tr.att.resize(heads);
    tr.att_concat.resize(x.rows(), cfg_.dim);
    for (int h = 0; h < heads; ++h) {
      auto qh = tr.q.middleCols(h * dh, dh);
      auto kh = tr.k.middleCols(h * dh, dh);
      auto vh = tr.v.middleCols(h * dh, dh);
      Mat s = qh * kh.transpose() * scale;
      tr.att[h] = SoftmaxRows(s);
      tr.att_concat.middleCols(h * dh, dh) = tr.att[h] * vh;
    }
    Mat mha = (tr.att_concat * p.M(hh.wo)).rowwise() + p.M(hh.bo).row(0);
    Mat z1 = tr.x_in + mha;
    tr.ln1_out = LayerNormForward(z1, p.M(hh.ln1g), p.M(hh.ln1b), &tr.ln1_xhat,
                                  &tr.ln1_rstd);
    Mat pre = (tr.ln1_out * p.M(hh.w1)).rowwise() + p.M(hh.b1).row(0);
    tr.ffn_h = pre.cwiseMax(0.0);
    Mat ffn = (tr.ffn_h * p.M(hh.w2)).rowwise() + p.M(hh.b2).row(0);
    Mat z2 = tr.ln1_out + ffn;
    x = LayerNormForward(z2, p.M(hh.ln2g), p.M(hh.ln2b), &tr.ln2_xhat,
                         &tr.ln2_rstd);
  }
  return x;
}

Mat TransformerCore::Backward(const Mat& grad_out, const ParamStore& p,
                              const Trace& trace, ParamStore* grads) const {
  const int heads = cfg_.heads;
  const int dh = cfg_.dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Mat dx = grad_out;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const LayerHandles& hh = layers_[l];
    const LayerTrace& tr = trace.layers[l];

    // LN2
    {
      Mat dg = Mat::Zero(1, cfg_.dim), db = Mat::Zero(1, cfg_.dim);
      Mat dz2 = LayerNormBackward(dx, tr.ln2_xhat, tr.ln2_rstd, p.M(hh.ln2g),
                                  &dg, &db);
      grads->M(hh.ln2g) += dg;
      grads->M(hh.ln2b) += db;
      dx = dz2;
    }
    // FFN: z2 = ln1_out + relu(ln1_out W1 + b1) W2 + b2
    {
      const Mat& df = dx;  // gradient of the ffn branch output
      grads->M(hh.w2) += tr.ffn_h.transpose() * df;
      grads->M(hh.b2).row(0) += df.colwise().sum();
      Mat dh1 = df * p.M(hh.w2).transpose();
      dh1 = dh1.cwiseProduct(
          (tr.ffn_h.array() > 0.0).cast<double>().matrix());
      grads->M(hh.w1) += tr.ln1_out.transpose() * dh1;
      grads->M(hh.b1).row(0) += dh1.colwise().sum();
      dx += dh1 * p.M(hh.w1).transpose();  // residual + branch
    }
    // LN1
    {
      Mat dg = Mat::Zero(1, cfg_.dim), db = Mat::Zero(1, cfg_.dim);
      Mat dz1 = LayerNormBackward(dx, tr.ln1_xhat, tr.ln1_rstd, p.M(hh.ln1g),
                                  &dg, &db);
      grads->M(hh.ln1g) += dg;
      grads->M(hh.ln1b) += db;
      dx = dz1;
    }
    // MHA: z1 = x_in + (att_concat Wo + bo)
    {
      Mat dmha = dx;
      grads->M(hh.wo) += tr.att_concat.transpose() * dmha;
      grads->M(hh.bo).row(0) += dmha.colwise().sum();
      Mat dcat = dmha * p.M(hh.wo).transpose();
      Mat dq(dx.rows(), cfg_.dim), dk(dx.rows(), cfg_.dim),
          dv(dx.rows(), cfg_.dim);
      for (int h = 0; h < heads; ++h) {
        auto qh = tr.q.middleCols(h * dh, dh);
        auto kh = tr.k.middleCols(h * dh, dh);
        auto vh = tr.v.middleCols(h * dh, dh);
        const Mat& att = tr.att[h];
        Mat doh = dcat.middleCols(h * dh, dh);
        Mat datt = doh * vh.transpose();
        dv.middleCols(h * dh, dh) = att.transpose() * doh;
        // softmax backward
        Vec rowdot = (datt.array() * att.array()).rowwise().sum();
        Mat ds = (att.array() *
                  (datt.array().colwise() - rowdot.array()))
                     .matrix();
        ds *= scale;
        dq.middleCols(h * dh, dh) = ds * kh;
        dk.middleCols(h * dh, dh) = ds.transpose() * qh;
      }
      grads->M(hh.wq) += tr.x_in.transpose() * dq;
      grads->M(hh.bq).row(0) += dq.colwise().sum();
      grads->M(hh.wk) += tr.x_in.transpose() * dk;
      grads->M(hh.bk).row(0) += dk.colwise().sum();
      grads->M(hh.wv) += tr.x_in.transpose() * dv;
      grads->M(hh.bv).row(0) += dv.colwise().sum();
      dx += dq * p.M(hh.wq).transpose() + dk * p.M(hh.wk).transpose() +
            dv * p.M(hh.wv).transpose();
    }
  }
  return dx;
}

void InitParams(ParamStore* params, Rng* rng) {
  for (size_t i = 0; i < params->layout().entries().size(); ++i) {
    const auto& e = params->layout().entries()[i];
    auto m = params->M(static_cast<int>(i));
    const std::string& n = e.name;
    auto ends_with = [&](const char* suffix) {
      const size_t len = std::strlen(suffix);
      return n.size() >= len && n.compare(n.size() - len, len, suffix) == 0;
    };
    if (ends_with("ln1g") || ends_with("ln2g")) {
      m.setOnes();
    } else if (n.find(".b") != std::string::npos || ends_with("ln1b") ||
               ends_with("ln2b") || ends_with("b_in") || ends_with("b_out") ||
               ends_with("bin_b")) {
      m.setZero();
    } else if (ends_with("embed") || ends_with("gt_row") ||
               ends_with("tag")) {
      for (int r = 0; r < e.rows; ++r)
        for (int c = 0; c < e.cols; ++c) m(r, c) = 0.1 * rng->Normal();
    } else if (ends_with("pos")) {
      for (int r = 0; r < e.rows; ++r)
        for (int c = 0; c < e.cols; ++c) m(r, c) = 0.02 * rng->Normal();
    } else {
      const double limit = std::sqrt(6.0 / (e.rows + e.cols));
      for (int r = 0; r < e.rows; ++r)
        for (int c = 0; c < e.cols; ++c)
          m(r, c) = limit * (2.0 * rng->Uniform() - 1.0);
    }
  }
}

DetectorModel::DetectorModel(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
  auto layout = std::make_shared<ParamLayout>();
  embed_ = layout->Add("det.embed", cfg_.input_tokens(), cfg_.dim);
  w_in_ = layout->Add("det.w_in", cfg_.k * cfg_.dim, cfg_.dim);
  b_in_ = layout->Add("det.b_in", 1, cfg_.dim);
  pos_ = layout->Add("det.pos", cfg_.max_len, cfg_.dim);
  core_ = TransformerCore(cfg_, layout.get(), "det");
  gt_row_ = layout->Add("det.gt_row", 1, cfg_.dim);
  bin_w_ = layout->Add("det.bin_w", cfg_.dim, cfg_.k);
  bin_b_ = layout->Add("det.bin_b", 1, cfg_.k);
  layout_ = layout;
  params_ = ParamStore(layout_);
}

DetectorModel::Output DetectorModel::Forward(
    const std::vector<std::vector<TokenId>>& rows, TraceT* trace) const {
  SC_CHECK(!rows.empty(), "detector needs at least one candidate row");
  if (static_cast<int>(rows.size()) > cfg_.k)
    throw ConfigError("grid has more rows than model.k");
  const int length = static_cast<int>(rows[0].size());
  if (length > cfg_.max_len)
    throw ConfigError("sentence longer than model.max_len");

  trace->rows = rows;
  while (static_cast<int>(trace->rows.size()) < cfg_.k)
    trace->rows.push_back(rows[0]);  // pad with copies of the best row

  const auto embed = params_.M(embed_);
  trace->concat.resize(length, cfg_.k * cfg_.dim);
  for (int k = 0; k < cfg_.k; ++k) {
    const auto& row = trace->rows[k];
    SC_CHECK(static_cast<int>(row.size()) == length, "ragged grid rows");
    for (int t = 0; t < length; ++t) {
      SC_CHECK(row[t] >= 0 && row[t] < cfg_.input_tokens(),
               "token outside detector vocabulary");
      trace->concat.block(t, k * cfg_.dim, 1, cfg_.dim) = embed.row(row[t]);
    }
  }
  Mat x0 = (trace->concat * params_.M(w_in_)).rowwise() +
           params_.M(b_in_).row(0);
  x0 += params_.M(pos_).topRows(length);
  trace->h = core_.Forward(x0, params_, &trace->core);

  Output out;
  out.logits.resize(length, cfg_.detector_classes());
  out.logits.leftCols(cfg_.input_tokens()).noalias() =
      trace->h * embed.transpose();
  out.logits.rightCols(1).noalias() =
      trace->h * params_.M(gt_row_).row(0).transpose();
  out.bin_scores =
      (trace->h * params_.M(bin_w_)).rowwise() + params_.M(bin_b_).row(0);
  return out;
}

void DetectorModel::Backward(const TraceT& trace, const Mat& grad_logits,
                             const Mat& grad_bin, ParamStore* grads) const {
  const int length = static_cast<int>(trace.h.rows());
  Mat dh = Mat::Zero(length, cfg_.dim);
  if (grad_logits.size() > 0) {
    auto dlog_tok = grad_logits.leftCols(cfg_.input_tokens());
    dh.noalias() += dlog_tok * params_.M(embed_);
    dh.noalias() +=
        grad_logits.rightCols(1) * params_.M(gt_row_).row(0);
    grads->M(embed_).noalias() += dlog_tok.transpose() * trace.h;
    grads->M(gt_row_).row(0).noalias() +=
        grad_logits.rightCols(1).transpose() * trace.h;
  }
  if (grad_bin.size() > 0) {
    dh.noalias() += grad_bin * params_.M(bin_w_).transpose();
    grads->M(bin_w_).noalias() += trace.h.transpose() * grad_bin;
    grads->M(bin_b_).row(0) += grad_bin.colwise().sum();
  }
  Mat dx0 = core_.Backward(dh, params_, trace.core, grads);
  grads->M(pos_).topRows(length) += dx0;
  grads->M(b_in_).row(0) += dx0.colwise().sum();
  grads->M(w_in_).noalias() += trace.concat.transpose() * dx0;
  Mat dconcat = dx0 * params_.M(w_in_).transpose();
  auto dembed = grads->M(embed_);
  for (int k = 0; k < cfg_.k; ++k) {
    for (int t = 0; t < length; ++t) {
      dembed.row(trace.rows[k][t]) +=
          dconcat.block(t, k * cfg_.dim, 1, cfg_.dim);
    }
  }
}

CorrectorModel::CorrectorModel(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
  auto layout = std::make_shared<ParamLayout>();
  embed_ = layout->Add("cor.embed", cfg_.input_tokens(), cfg_.dim);
  tag_ = layout->Add("cor.tag", 2, cfg_.dim);
  pos_ = layout->Add("cor.pos", cfg_.max_len, cfg_.dim);
  core_ = TransformerCore(cfg_, layout.get(), "cor");
  w_out_ = layout->Add("cor.w_out", cfg_.dim, cfg_.decoder_classes());
  b_out_ = layout->Add("cor.b_out", 1, cfg_.decoder_classes());
  layout_ = layout;
  params_ = ParamStore(layout_);
}

FrameLogProbs CorrectorModel::Forward(const ExpandedInput& x,
                                      TraceT* trace) const {
  const int num_frames = x.num_frames();
  SC_CHECK(num_frames > 0, "corrector needs at least one frame");
  if (num_frames > cfg_.max_len)
    throw ConfigError("expanded input longer than model.max_len");
  trace->tokens.resize(num_frames);
  trace->tags.resize(num_frames);
  Mat x0(num_frames, cfg_.dim);
  const auto embed = params_.M(embed_);
  const auto tag = params_.M(tag_);
  for (int t = 0; t < num_frames; ++t) {
    const auto& f = x.frames[t];
    SC_CHECK(f.token >= 0 && f.token < cfg_.input_tokens(),
             "frame token outside corrector vocabulary");
    trace->tokens[t] = f.token;
    trace->tags[t] = f.segment < 0 ? 0 : 1;
    x0.row(t) = embed.row(f.token) + tag.row(trace->tags[t]);
  }
  x0 += params_.M(pos_).topRows(num_frames);
  trace->h = core_.Forward(x0, params_, &trace->core);
  Mat scores =
      (trace->h * params_.M(w_out_)).rowwise() + params_.M(b_out_).row(0);
  trace->logp = LogSoftmaxRows(scores);
  return trace->logp;
}

void CorrectorModel::Backward(const TraceT& trace, const Mat& grad_logp,
                              ParamStore* grads) const {
  const int num_frames = static_cast<int>(trace.h.rows());
  Mat dscores = LogSoftmaxBackward(trace.logp, grad_logp);
  grads->M(w_out_).noalias() += trace.h.transpose() * dscores;
  grads->M(b_out_).row(0) += dscores.colwise().sum();
  Mat dh = dscores * params_.M(w_out_).transpose();
  Mat dx0 = core_.Backward(dh, params_, trace.core, grads);
  grads->M(pos_).topRows(num_frames) += dx0;
  auto dembed = grads->M(embed_);
  auto dtag = grads->M(tag_);
  for (int t = 0; t < num_frames; ++t) {
    dembed.row(trace.tokens[t]) += dx0.row(t);
    dtag.row(trace.tags[t]) += dx0.row(t);
  }
}

AdamOptimizer::AdamOptimizer(const OptimizerConfig& cfg, int param_count)
    : cfg_(cfg) {
  m_ = Vec::Zero(param_count);
  v_ = Vec::Zero(param_count);
}

bool AdamOptimizer::Step(Vec* params, const Vec& grads) {
  if (!grads.allFinite()) {
    ++rejected_;
    return false;
  }
  Vec g = grads;
  const double norm = g.norm();
  if (cfg_.clip_norm > 0 && norm > cfg_.clip_norm)
    g *= cfg_.clip_norm / norm;
  ++t_;
  double lr = cfg_.lr;
  if (cfg_.warmup_steps > 0 && t_ < cfg_.warmup_steps)
    lr *= static_cast<double>(t_) / cfg_.warmup_steps;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * g;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  params->array() -= lr * (m_.array() / bc1) /
                     ((v_.array() / bc2).sqrt() + cfg_.eps);
  return true;
}

namespace {

constexpr char kMagic[8] = {'S', 'C', 'K', 'P', 'T', '0', '0', '1'};

void PutU64(std::ostream& os, uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

uint64_t GetU64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

void PutString(std::ostream& os, const std::string& s) {
  PutU64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string GetString(std::istream& is) {
  const uint64_t n = GetU64(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  return s;
}

void PutVec(std::ostream& os, const Vec& v) {
  PutU64(os, static_cast<uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    uint64_t bits;
    double d = v(i);
    std::memcpy(&bits, &d, 8);
    PutU64(os, bits);
  }
}

Vec GetVec(std::istream& is) {
  const uint64_t n = GetU64(is);
  Vec v(n);
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t bits = GetU64(is);
    double d;
    std::memcpy(&d, &bits, 8);
    v(static_cast<Eigen::Index>(i)) = d;
  }
  return v;
}

}  // namespace

void SaveCheckpoint(const TrainState& state, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write checkpoint: " + path);
  os.write(kMagic, sizeof(kMagic));
  PutString(os, state.kind);
  PutString(os, state.config_json);
  PutU64(os, state.compat_hash);
  PutVec(os, state.params);
  PutVec(os, state.adam_m);
  PutVec(os, state.adam_v);
  PutU64(os, static_cast<uint64_t>(state.adam_t));
  PutU64(os, static_cast<uint64_t>(state.epochs_done));
  PutU64(os, state.rejected_steps);
  PutU64(os, state.capacity_skipped);
  PutString(os, state.rng_state);
  if (!os) throw DataError("failed while writing checkpoint: " + path);
}

TrainState LoadCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw DataError("not a checkpoint file (bad magic): " + path);
  TrainState state;
  state.kind = GetString(is);
  state.config_json = GetString(is);
  state.compat_hash = GetU64(is);
  state.params = GetVec(is);
  state.adam_m = GetVec(is);
  state.adam_v = GetVec(is);
  state.adam_t = static_cast<int64_t>(GetU64(is));
  state.epochs_done = static_cast<int>(GetU64(is));
  state.rejected_steps = GetU64(is);
  state.capacity_skipped = GetU64(is);
  state.rng_state = GetString(is);
  if (!is) throw DataError("truncated checkpoint: " + path);
  return state;
}

}  // namespace softcorrect
