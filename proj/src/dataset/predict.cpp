#include "scsl/core/error.hpp"
#include "scsl/core/parallel.hpp"
#include "scsl/dataset/dataset.hpp"
#include "scsl/scorer/scorer.hpp"

namespace scsl::dataset {

std::vector<Label> predict_labels(const scorer::LabelPredictor& predictor, std::span<const StanceExample> examples,
                                  std::size_t workers) {
  std::vector<Label> out(examples.size(), Label::neutral);
  parallel_for(examples.size(), workers, [&](std::size_t i) {
    const auto name = predictor.predict_label(examples[i].target, examples[i].text);
    const auto label = parse_label(name);
    if (!label) throw ValidationError("predictor returned unknown label '" + name + "'");
    out[i] = *label;
  });
  return out;
}

}  // namespace scsl::dataset
