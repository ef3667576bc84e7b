#include "leam/error.hpp"
#include "leam/eval.hpp"
#include "leam/model.hpp"

namespace leam {

Matrix center_cosines(const Matrix& centers, const Matrix& labels) {
  if (centers.rows() != labels.rows() || centers.cols() != labels.cols()) {
    throw ShapeError("center_cosines: centers " + centers.shape() + " vs labels " + labels.shape());
  }
  const std::size_t K = centers.cols();
  Matrix out(K, K);
  for (std::size_t i = 0; i < K; ++i) {
    const Vector zi = centers.col(i);
    for (std::size_t k = 0; k < K; ++k) out(i, k) = cosine(zi, labels.col(k));
  }
  return out;
}

ClassCenterSimilarity class_center_similarity(const Model& model, const Dataset& data) {
  if (data.mode != Mode::single) throw ArgumentError("class centers need a single-label dataset");
  const std::size_t K = model.params.num_classes(), P = model.params.dim();
  const auto traces = forward_batch(model.params, data.examples, model.variant);
  Matrix centers(P, K);
  std::vector<std::size_t> counts(K, 0);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const std::size_t k = data.examples[i].target.label;
    ++counts[k];
    for (std::size_t p = 0; p < P; ++p) centers(p, k) += traces[i].z[p];
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (counts[k] == 0) continue;
    for (std::size_t p = 0; p < P; ++p) centers(p, k) /= static_cast<double>(counts[k]);
  }
  ClassCenterSimilarity out{center_cosines(centers, model.params.C.value), std::vector<bool>(K)};
  for (std::size_t k = 0; k < K; ++k) out.defined[k] = counts[k] > 0;
  return out;
}

}  // namespace leam
