#include "nspf/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "nspf/error.hpp"
#include "nspf/metrics.hpp"
#include "nspf/random.hpp"

namespace nspf {

std::vector<std::string> TrainConfig::violations() const {
  std::vector<std::string> v;
  if (!(learning_rate > 0.0)) v.push_back("learning_rate: must be > 0");
  if (batch_size != 1) v.push_back("batch_size: " + std::to_string(batch_size) + " != 1 (only batch size 1 is supported)");
  if (epochs < 0) v.push_back("epochs: must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) v.push_back("adam_beta1: must be in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) v.push_back("adam_beta2: must be in [0, 1)");
  if (!(adam_eps > 0.0)) v.push_back("adam_eps: must be > 0");
  if (stencil_order != 2 && stencil_order != 6) v.push_back("stencil_order: must be 2 or 6");
  if (checkpoint_every < 0) v.push_back("checkpoint_every: must be >= 0");
  if (validate_every < 1) v.push_back("validate_every: must be >= 1");
  for (auto& s : loss_weights.violations()) v.push_back("loss_weights." + s);
  return v;
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string history_to_csv(const std::vector<HistoryRow>& rows) {
  std::ostringstream out;
  out << "epoch,train_loss,val_rel_l2_u,val_rel_l2_p,mean_abs_div_residual,mean_abs_mom_residual,wall_seconds\n";
  for (const auto& r : rows) {
    out << r.epoch << ',' << num(r.train_loss) << ',' << num(r.val_rel_l2_u) << ',' << num(r.val_rel_l2_p) << ','
        << num(r.mean_abs_div) << ',' << num(r.mean_abs_mom) << ',' << num(r.wall_seconds) << '\n';
  }
  return out.str();
}

Trainer::Trainer(ModelConfig model, TrainConfig train, FluidConstants consts, ChannelSpec spec)
    : model_(std::move(model)), train_(std::move(train)), consts_(consts), spec_(spec), net_(model_) {
  if (auto v = train_.violations(); !v.empty()) throw ValidationError(v);
  if (model_.res_w != spec_.res_w || model_.res_h != spec_.res_h) {
    throw ValidationError("model input resolution " + std::to_string(model_.res_w) + "x" +
                          std::to_string(model_.res_h) + " differs from the dataset resolution " +
                          std::to_string(spec_.res_w) + "x" + std::to_string(spec_.res_h));
  }
}

PreparedCase Trainer::prepare(const GeometryCase& c) const {
  return {&c, std::make_shared<const NsOperators>(NsScheme(c.bnd, spec_.h(), train_.stencil_order))};
}

TrainState Trainer::initial_state() const {
  TrainState s;
  s.params = build_model(model_);
  s.adam = make_adam_state(s.params);
  return s;
}

FieldSet Trainer::predict(const ModelParams& params, const GeometryCase& c) const {
  FieldSet out = net_.forward(params, c.geom);
  enforce_bcs_inplace(out, c.bnd, consts_);
  return out;
}

LossTerms Trainer::loss_gradient(const ModelParams& params, const PreparedCase& pc, ModelParams* grads) const {
  const GeometryCase& c = *pc.source;
  auto cache = net_.make_cache();
  FieldSet pred = net_.forward(params, c.geom, grads ? cache.get() : nullptr);
  enforce_bcs_inplace(pred, c.bnd, consts_);
  const LossWeights w = resolve_weights(train_.loss_scheme, train_.loss_weights, c.reference.has_value());
  FieldSet g;
  const LossTerms terms = loss_with_gradient(pred, c.reference ? &*c.reference : nullptr, c.geom, *pc.ops,
                                             consts_.nu, w, grads ? &g : nullptr);
  if (!std::isfinite(terms.total)) throw NumericalError("non-finite loss on case " + c.id);
  if (grads) net_.backward(params, *cache, g, *grads);
  return terms;
}

double Trainer::step(TrainState& state, const PreparedCase& c) const {
  ModelParams grads = zeros_like(state.params);
  const LossTerms terms = loss_gradient(state.params, c, &grads);
  adam_step(state.params, state.adam, grads, train_.adam());
  return terms.total;
}

EvalSummary Trainer::evaluate(const ModelParams& params, const std::vector<PreparedCase>& cases) const {
  EvalSummary s;
  if (cases.empty()) return s;
  double ru = 0.0;
  double rp = 0.0;
  for (const auto& pc : cases) {
    const GeometryCase& c = *pc.source;
    const FieldSet pred = predict(params, c);
    const LossWeights w = resolve_weights(train_.loss_scheme, train_.loss_weights, c.reference.has_value());
    s.loss += loss_with_gradient(pred, c.reference ? &*c.reference : nullptr, c.geom, *pc.ops, consts_.nu, w,
                                 nullptr)
                  .total;
    const auto norms = residual_norms(pc.ops->residual(pred, consts_.nu), c.bnd);
    s.mean_abs_div += norms.mean_abs_div;
    s.mean_abs_mom += norms.mean_abs_mom;
    if (c.reference) {
      ru += velocity_rel_l2(pred, *c.reference, c.geom);
      rp += relative_l2(pred.p, c.reference->p, c.geom);
      ++s.with_reference;
    }
  }
  const double n = static_cast<double>(cases.size());
  s.loss /= n;
  s.mean_abs_div /= n;
  s.mean_abs_mom /= n;
  if (s.with_reference) {
    s.rel_l2_u = ru / static_cast<double>(s.with_reference);
    s.rel_l2_p = rp / static_cast<double>(s.with_reference);
  }
  return s;
}

void Trainer::run(TrainState& state, const std::vector<GeometryCase>& train, const std::vector<GeometryCase>& val,
                  const EpochCallback& on_epoch) const {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] {
    return train_.record_timing ? std::chrono::duration<double>(Clock::now() - start).count() : 0.0;
  };
  std::vector<PreparedCase> tr;
  std::vector<PreparedCase> va;
  for (const auto& c : train) tr.push_back(prepare(c));
  for (const auto& c : val) va.push_back(prepare(c));
  const std::vector<PreparedCase>& monitor = va.empty() ? tr : va;

  auto fill_validation = [&](HistoryRow& row) {
    const EvalSummary m = evaluate(state.params, monitor);
    row.val_rel_l2_u = m.rel_l2_u;
    row.val_rel_l2_p = m.rel_l2_p;
    row.mean_abs_div = m.mean_abs_div;
    row.mean_abs_mom = m.mean_abs_mom;
  };

  int first = 1;
  if (state.history.empty()) {
    HistoryRow row;
    row.epoch = 0;
    row.train_loss = evaluate(state.params, tr).loss;
    fill_validation(row);
    row.wall_seconds = elapsed();
    state.history.push_back(row);
  } else {
    first = state.history.back().epoch + 1;
  }

  std::vector<std::size_t> order(tr.size());
  for (int epoch = first; epoch <= train_.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(train_.seed, static_cast<std::uint64_t>(epoch)));
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
    double loss = 0.0;
    for (std::size_t k : order) loss += step(state, tr[k]);
    HistoryRow row;
    row.epoch = epoch;
    row.train_loss = tr.empty() ? 0.0 : loss / static_cast<double>(tr.size());
    row.val_rel_l2_u = row.val_rel_l2_p = row.mean_abs_div = row.mean_abs_mom =
        std::numeric_limits<double>::quiet_NaN();
    if (epoch % train_.validate_every == 0 || epoch == train_.epochs) fill_validation(row);
    row.wall_seconds = elapsed();
    state.history.push_back(row);
    if (on_epoch) on_epoch(state, epoch);
  }
}

}  // namespace nspf
