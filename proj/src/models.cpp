#include "smp/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "smp/error.hpp"
#include "smp/random.hpp"

namespace smp {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 7> kVariantNames{{
    {Variant::SGC, "sgc"},
    {Variant::GCN, "gcn"},
    {Variant::SmpIdentity, "smp-identity"},
    {Variant::SmpLinear, "smp-linear"},
    {Variant::SmpMlp, "smp-mlp"},
    {Variant::SmpLinearGcnFeat, "smp-linear-gcn-feat"},
    {Variant::SmpLinearGcnBoth, "smp-linear-gcn-both"},
}};

std::string layer_name(std::string_view branch, std::size_t layer, std::string_view kind) {
  return std::string(branch) + "." + std::to_string(layer) + "." + std::string(kind);
}

struct Shape {
  std::size_t rows;
  std::size_t cols;
};

// Ordered parameter shapes for a spec.
std::vector<std::pair<std::string, Shape>> param_layout(const ModelSpec& s) {
  std::vector<std::pair<std::string, Shape>> out;
  auto linear = [&](const std::string& prefix, std::size_t in, std::size_t width) {
    out.push_back({prefix + ".weight", {in, width}});
    out.push_back({prefix + ".bias", {1, width}});
  };
  auto gcn = [&](std::string_view branch, std::size_t in, std::size_t width) {
    for (std::size_t l = 0; l < s.k_steps; ++l) {
      const std::size_t fan_in = l == 0 ? in : s.hidden_dim;
      const std::size_t fan_out = l + 1 == s.k_steps ? width : s.hidden_dim;
      out.push_back({layer_name(branch, l, "weight"), {fan_in, fan_out}});
      out.push_back({layer_name(branch, l, "bias"), {1, fan_out}});
    }
  };
  const std::size_t joint = s.stoch_dim + s.feat_dim;
  switch (s.variant) {
    case Variant::SGC:
      linear("head", s.feat_dim, s.out_dim);
      break;
    case Variant::GCN:
      gcn("gcn_f", s.feat_dim, s.out_dim);
      break;
    case Variant::SmpIdentity:
      break;
    case Variant::SmpLinear:
      linear("head", joint, s.out_dim);
      break;
    case Variant::SmpMlp:
      linear("mlp.hidden", joint, s.hidden_dim);
      linear("mlp.out", s.hidden_dim, s.out_dim);
      break;
    case Variant::SmpLinearGcnFeat:
      gcn("gcn_f", s.feat_dim, s.hidden_dim);
      linear("head", s.stoch_dim + s.hidden_dim, s.out_dim);
      break;
    case Variant::SmpLinearGcnBoth:
      gcn("gcn_e", s.stoch_dim, s.hidden_dim);
      gcn("gcn_f", s.feat_dim, s.hidden_dim);
      linear("head", 2 * s.hidden_dim, s.out_dim);
      break;
  }
  return out;
}

void check_layout(const ModelSpec& spec, const ModelParams& params) {
  const auto layout = param_layout(spec);
  require(layout.size() == params.size(), "model parameters do not match the spec");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& p = params.entries()[i];
    require(p.name == layout[i].first && p.value.rows() == layout[i].second.rows &&
                p.value.cols() == layout[i].second.cols,
            "model parameter '" + layout[i].first + "' has the wrong name or shape");
  }
}

DenseMatrix linear_forward(const DenseMatrix& x, const ModelParams& params, const std::string& prefix) {
  DenseMatrix y = matmul(x, params.get(prefix + ".weight"));
  add_row_vector(y, params.get(prefix + ".bias").row(0));
  return y;
}

// Returns dX when want_input_grad is set, otherwise an empty matrix.
DenseMatrix linear_backward(const DenseMatrix& x, const DenseMatrix& grad_y, const ModelParams& params,
                            ModelParams& grads, const std::string& prefix, bool want_input_grad) {
  grads.get(prefix + ".weight") = matmul_tn(x, grad_y);
  const auto db = column_sums(grad_y);
  std::copy(db.begin(), db.end(), grads.get(prefix + ".bias").row(0).begin());
  if (!want_input_grad) return {};
  return matmul_nt(grad_y, params.get(prefix + ".weight"));
}

// Z_l = A (X_l W_l) + b_l, ReLU between layers, none after the last.
DenseMatrix gcn_forward(const SparseMatrix& adj, const DenseMatrix& x, const ModelParams& params,
                        std::string_view branch, std::size_t layers, GcnCache& cache) {
  cache.inputs.clear();
  cache.pre.clear();
  DenseMatrix cur = x;
  for (std::size_t l = 0; l < layers; ++l) {
    DenseMatrix z = spmm(adj, matmul(cur, params.get(layer_name(branch, l, "weight"))));
    add_row_vector(z, params.get(layer_name(branch, l, "bias")).row(0));
    cache.inputs.push_back(std::move(cur));
    cur = l + 1 < layers ? relu(z) : z;
    cache.pre.push_back(std::move(z));
  }
  return cur;
}

void gcn_backward(const SparseMatrix& adj, const DenseMatrix& grad_out, const ModelParams& params,
                  ModelParams& grads, std::string_view branch, const GcnCache& cache) {
  const std::size_t layers = cache.pre.size();
  DenseMatrix grad = grad_out;
  for (std::size_t l = layers; l-- > 0;) {
    if (l + 1 < layers) grad = relu_backward(grad, cache.pre[l]);
    const auto db = column_sums(grad);
    auto& bias = grads.get(layer_name(branch, l, "bias"));
    std::copy(db.begin(), db.end(), bias.row(0).begin());
    // The normalized adjacency is symmetric, so A^T grad = A grad.
    DenseMatrix grad_xw = spmm(adj, grad);
    grads.get(layer_name(branch, l, "weight")) = matmul_tn(cache.inputs[l], grad_xw);
    if (l > 0) grad = matmul_nt(grad_xw, params.get(layer_name(branch, l, "weight")));
  }
}

}  // namespace

std::string_view variant_name(Variant v) {
  for (const auto& [variant, name] : kVariantNames)
    if (variant == v) return name;
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (const auto& [variant, n] : kVariantNames)
    if (n == name) return variant;
  return std::nullopt;
}

void ModelSpec::validate() const {
  require(feat_dim >= 1, "ModelSpec: feat_dim must be positive");
  require(out_dim >= 1, "ModelSpec: out_dim must be positive");
  if (uses_stochastic()) require(stoch_dim >= 1, "ModelSpec: stoch_dim must be positive for SMP variants");
  const bool has_gcn = variant == Variant::GCN || variant == Variant::SmpLinearGcnFeat ||
                       variant == Variant::SmpLinearGcnBoth;
  if (has_gcn) require(k_steps >= 1, "ModelSpec: GCN branches need at least one layer");
  if (has_gcn || variant == Variant::SmpMlp) require(hidden_dim >= 1, "ModelSpec: hidden_dim must be positive");
}

bool ModelSpec::uses_stochastic() const { return variant != Variant::SGC && variant != Variant::GCN; }

std::size_t ModelSpec::representation_dim() const {
  return variant == Variant::SmpIdentity ? stoch_dim + feat_dim : out_dim;
}

const DenseMatrix& ModelParams::get(std::string_view name) const {
  for (const auto& p : entries_)
    if (p.name == name) return p.value;
  throw ContractViolation("ModelParams: no parameter named '" + std::string(name) + "'");
}

DenseMatrix& ModelParams::get(std::string_view name) {
  return const_cast<DenseMatrix&>(std::as_const(*this).get(name));
}

bool ModelParams::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Parameter& p) { return p.name == name; });
}

ModelParams ModelParams::zeros_like() const {
  std::vector<Parameter> z;
  z.reserve(entries_.size());
  for (const auto& p : entries_) z.push_back({p.name, DenseMatrix(p.value.rows(), p.value.cols())});
  return ModelParams(std::move(z));
}

bool ModelParams::same_layout(const ModelParams& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols()) return false;
  }
  return true;
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : entries_) n += p.value.size();
  return n;
}

DenseMatrix propagate(const SparseMatrix& adj_norm, const DenseMatrix& x, std::size_t k) {
  require(adj_norm.rows() == adj_norm.cols(), "propagate: operator must be square");
  require(adj_norm.cols() == x.rows(), "propagate: operator size must equal row count");
  DenseMatrix out = x;
  for (std::size_t step = 0; step < k; ++step) out = spmm(adj_norm, out);
  return out;
}

std::shared_ptr<const ModelInputs> prepare_inputs(const ModelSpec& spec, const SparseMatrix& adj_norm,
                                                  const DenseMatrix& features,
                                                  const DenseMatrix& stochastic) {
  spec.validate();
  require(adj_norm.rows() == adj_norm.cols(), "forward: operator must be square");
  require(features.rows() == adj_norm.rows() && features.cols() == spec.feat_dim,
          "forward: features must be N x feat_dim");
  if (spec.uses_stochastic())
    require(stochastic.rows() == adj_norm.rows() && stochastic.cols() == spec.stoch_dim,
            "forward: stochastic signals must be N x stoch_dim");

  auto in = std::make_shared<ModelInputs>();
  switch (spec.variant) {
    case Variant::SGC:
      in->propagated = propagate(adj_norm, features, spec.k_steps);
      break;
    case Variant::SmpIdentity:
    case Variant::SmpLinear:
    case Variant::SmpMlp:
      // Joint propagation A^K [E, F]; stochastic block first.
      in->propagated = propagate(adj_norm, hconcat(stochastic, features), spec.k_steps);
      break;
    case Variant::SmpLinearGcnFeat:
      in->propagated = propagate(adj_norm, stochastic, spec.k_steps);
      in->features = features;
      break;
    case Variant::GCN:
      in->features = features;
      break;
    case Variant::SmpLinearGcnBoth:
      in->features = features;
      in->stochastic = stochastic;
      break;
  }
  return in;
}

ForwardResult forward(const ModelSpec& spec, const ModelParams& params, const SparseMatrix& adj_norm,
                      std::shared_ptr<const ModelInputs> inputs) {
  spec.validate();
  check_layout(spec, params);
  require(inputs != nullptr, "forward: missing inputs");

  ForwardResult r;
  ForwardCache& c = r.cache;
  c.variant = spec.variant;
  const ModelInputs& in = *inputs;
  switch (spec.variant) {
    case Variant::SGC:
    case Variant::SmpLinear:
      r.h = linear_forward(in.propagated, params, "head");
      break;
    case Variant::SmpIdentity:
      r.h = in.propagated;
      break;
    case Variant::SmpMlp: {
      c.mlp_pre = linear_forward(in.propagated, params, "mlp.hidden");
      r.h = linear_forward(relu(c.mlp_pre), params, "mlp.out");
      break;
    }
    case Variant::GCN:
      r.h = gcn_forward(adj_norm, in.features, params, "gcn_f", spec.k_steps, c.gcn_features);
      break;
    case Variant::SmpLinearGcnFeat: {
      DenseMatrix hf = gcn_forward(adj_norm, in.features, params, "gcn_f", spec.k_steps, c.gcn_features);
      c.head_input = hconcat(in.propagated, hf);
      r.h = linear_forward(c.head_input, params, "head");
      break;
    }
    case Variant::SmpLinearGcnBoth: {
      DenseMatrix he = gcn_forward(adj_norm, in.stochastic, params, "gcn_e", spec.k_steps, c.gcn_stochastic);
      DenseMatrix hf = gcn_forward(adj_norm, in.features, params, "gcn_f", spec.k_steps, c.gcn_features);
      c.head_input = hconcat(he, hf);
      r.h = linear_forward(c.head_input, params, "head");
      break;
    }
  }
  c.inputs = std::move(inputs);
  c.out_rows = r.h.rows();
  c.out_cols = r.h.cols();
  return r;
}

ForwardResult forward(const ModelSpec& spec, const ModelParams& params, const SparseMatrix& adj_norm,
                      const DenseMatrix& features, const DenseMatrix& stochastic) {
  return forward(spec, params, adj_norm, prepare_inputs(spec, adj_norm, features, stochastic));
}

ModelParams backward(const ModelSpec& spec, const ModelParams& params, const SparseMatrix& adj_norm,
                     const ForwardCache& cache, const DenseMatrix& grad_h) {
  check_layout(spec, params);
  require(cache.variant == spec.variant && cache.inputs != nullptr, "backward: cache does not match spec");
  require(grad_h.rows() == cache.out_rows && grad_h.cols() == cache.out_cols,
          "backward: grad_h shape must match the forward output");

  ModelParams grads = params.zeros_like();
  const ModelInputs& in = *cache.inputs;
  switch (spec.variant) {
    case Variant::SGC:
    case Variant::SmpLinear:
      linear_backward(in.propagated, grad_h, params, grads, "head", false);
      break;
    case Variant::SmpIdentity:
      break;
    case Variant::SmpMlp: {
      DenseMatrix g_hidden = linear_backward(relu(cache.mlp_pre), grad_h, params, grads, "mlp.out", true);
      linear_backward(in.propagated, relu_backward(g_hidden, cache.mlp_pre), params, grads, "mlp.hidden", false);
      break;
    }
    case Variant::GCN:
      gcn_backward(adj_norm, grad_h, params, grads, "gcn_f", cache.gcn_features);
      break;
    case Variant::SmpLinearGcnFeat: {
      DenseMatrix g_in = linear_backward(cache.head_input, grad_h, params, grads, "head", true);
      gcn_backward(adj_norm, column_block(g_in, spec.stoch_dim, spec.hidden_dim), params, grads, "gcn_f",
                   cache.gcn_features);
      break;
    }
    case Variant::SmpLinearGcnBoth: {
      DenseMatrix g_in = linear_backward(cache.head_input, grad_h, params, grads, "head", true);
      gcn_backward(adj_norm, column_block(g_in, 0, spec.hidden_dim), params, grads, "gcn_e",
                   cache.gcn_stochastic);
      gcn_backward(adj_norm, column_block(g_in, spec.hidden_dim, spec.hidden_dim), params, grads, "gcn_f",
                   cache.gcn_features);
      break;
    }
  }
  return grads;
}

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(derive_seed(seed, "model-init"));
  std::vector<Parameter> entries;
  for (const auto& [name, shape] : param_layout(spec)) {
    DenseMatrix m(shape.rows, shape.cols);
    const bool is_bias = name.ends_with(".bias");
    if (!is_bias) {
      const double bound = std::sqrt(6.0 / static_cast<double>(shape.rows + shape.cols));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (double& v : m.data()) v = dist(rng);
    }
    entries.push_back({name, std::move(m)});
  }
  return ModelParams(std::move(entries));
}

ModelParams smp_linear_embedding(const ModelSpec& spec, const DenseMatrix& feature_block,
                                 const DenseMatrix& bias) {
  require(spec.variant == Variant::SmpLinear, "smp_linear_embedding: spec must be SMP-Linear");
  require(feature_block.rows() == spec.feat_dim && feature_block.cols() == spec.out_dim,
          "smp_linear_embedding: feature block must be feat_dim x out_dim");
  require(bias.rows() == 1 && bias.cols() == spec.out_dim, "smp_linear_embedding: bias must be 1 x out_dim");
  DenseMatrix w(spec.stoch_dim + spec.feat_dim, spec.out_dim);
  for (std::size_t i = 0; i < spec.feat_dim; ++i)
    for (std::size_t j = 0; j < spec.out_dim; ++j) w(spec.stoch_dim + i, j) = feature_block(i, j);
  return ModelParams({{"head.weight", std::move(w)}, {"head.bias", bias}});
}

ModelParams smp_linear_reduction_params(const ModelSpec& spec) {
  require(spec.out_dim == spec.feat_dim, "smp_linear_reduction_params: out_dim must equal feat_dim");
  return smp_linear_embedding(spec, DenseMatrix::identity(spec.feat_dim), DenseMatrix(1, spec.out_dim));
}

ModelParams smp_linear_from_sgc(const ModelSpec& smp_spec, const ModelSpec& sgc_spec,
                                const ModelParams& sgc_params) {
  require(sgc_spec.variant == Variant::SGC, "smp_linear_from_sgc: source spec must be SGC");
  require(smp_spec.k_steps == sgc_spec.k_steps && smp_spec.feat_dim == sgc_spec.feat_dim &&
              smp_spec.out_dim == sgc_spec.out_dim,
          "smp_linear_from_sgc: specs disagree on K, feat_dim or out_dim");
  check_layout(sgc_spec, sgc_params);
  return smp_linear_embedding(smp_spec, sgc_params.get("head.weight"), sgc_params.get("head.bias"));
}

}  // namespace smp
