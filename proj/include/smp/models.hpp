#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smp/dense_matrix.hpp"
#include "smp/sparse_matrix.hpp"

namespace smp {

enum class Variant {
  SGC,
  GCN,
  SmpIdentity,
  SmpLinear,
  SmpMlp,
  SmpLinearGcnFeat,
  SmpLinearGcnBoth,
};

inline constexpr Variant kAllVariants[] = {
    Variant::SGC,    Variant::GCN,    Variant::SmpIdentity,      Variant::SmpLinear,
    Variant::SmpMlp, Variant::SmpLinearGcnFeat, Variant::SmpLinearGcnBoth,
};

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

// Architecture hyper-parameters. k_steps is the propagation depth K for the
// linear branches and the layer count L for GCN branches.
struct ModelSpec {
  Variant variant = Variant::SmpLinear;
  std::size_t k_steps = 2;
  std::size_t stoch_dim = 32;
  std::size_t feat_dim = 1;
  std::size_t hidden_dim = 32;
  std::size_t out_dim = 32;

  void validate() const;
  bool uses_stochastic() const;
  // Width of H. Equals out_dim except for SMP-Identity (stoch_dim + feat_dim).
  std::size_t representation_dim() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct Parameter {
  std::string name;
  DenseMatrix value;  // biases are stored as 1 x width

  friend bool operator==(const Parameter&, const Parameter&) = default;
};

// Ordered named weights. Gradients use the same type and layout.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(std::vector<Parameter> entries) : entries_(std::move(entries)) {}

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::vector<Parameter>& entries() { return entries_; }
  const std::vector<Parameter>& entries() const { return entries_; }

  const DenseMatrix& get(std::string_view name) const;
  DenseMatrix& get(std::string_view name);
  bool contains(std::string_view name) const;

  // Zero-filled copy with the same layout.
  ModelParams zeros_like() const;
  bool same_layout(const ModelParams& other) const;
  std::size_t scalar_count() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::vector<Parameter> entries_;
};

// Parameter-independent inputs to a forward pass. `propagated` holds the
// linear propagation block the variant consumes:
//   SGC                 A^K F
//   SMP-Identity/Linear/MLP  A^K [E, F]
//   SMP-Linear-GCNfeat  A^K E
// and is empty for GCN and SMP-Linear-GCNboth. Since it depends only on the
// graph and the inputs, a trainer may compute it once per distinct E.
struct ModelInputs {
  DenseMatrix propagated;
  DenseMatrix features;
  DenseMatrix stochastic;
};

struct GcnCache {
  std::vector<DenseMatrix> inputs;  // X_l
  std::vector<DenseMatrix> pre;     // A X_l W_l + b_l
};

struct ForwardCache {
  Variant variant = Variant::SGC;
  std::shared_ptr<const ModelInputs> inputs;
  DenseMatrix head_input;  // only set when the head input is built per call
  DenseMatrix mlp_pre;
  GcnCache gcn_features;
  GcnCache gcn_stochastic;
  std::size_t out_rows = 0;
  std::size_t out_cols = 0;
};

struct ForwardResult {
  DenseMatrix h;
  ForwardCache cache;
};

// A^k x by k successive spmm calls.
DenseMatrix propagate(const SparseMatrix& adj_norm, const DenseMatrix& x, std::size_t k);

std::shared_ptr<const ModelInputs> prepare_inputs(const ModelSpec& spec, const SparseMatrix& adj_norm,
                                                  const DenseMatrix& features,
                                                  const DenseMatrix& stochastic);

ForwardResult forward(const ModelSpec& spec, const ModelParams& params, const SparseMatrix& adj_norm,
                      std::shared_ptr<const ModelInputs> inputs);

// `stochastic` may be empty for SGC and GCN.
ForwardResult forward(const ModelSpec& spec, const ModelParams& params, const SparseMatrix& adj_norm,
                      const DenseMatrix& features, const DenseMatrix& stochastic);

// Gradients of a scalar loss w.r.t. every parameter, given dLoss/dH.
ModelParams backward(const ModelSpec& spec, const ModelParams& params, const SparseMatrix& adj_norm,
                     const ForwardCache& cache, const DenseMatrix& grad_h);

// Glorot-uniform weights, zero biases.
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed);

// SMP-Linear head that ignores the stochastic block and maps the feature
// block through `feature_block` (feat_dim x out_dim), with the given bias.
ModelParams smp_linear_embedding(const ModelSpec& spec, const DenseMatrix& feature_block,
                                 const DenseMatrix& bias);

// The reduction parameters: zeros on the stochastic block, identity on the
// feature block, zero bias. Requires out_dim == feat_dim.
ModelParams smp_linear_reduction_params(const ModelSpec& spec);

// SMP-Linear parameters whose output equals the SGC model given by
// (sgc_spec, sgc_params). The specs must agree on K, feat_dim and out_dim.
ModelParams smp_linear_from_sgc(const ModelSpec& smp_spec, const ModelSpec& sgc_spec,
                                const ModelParams& sgc_params);

}  // namespace smp
