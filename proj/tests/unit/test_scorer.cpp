#include <cmath>
#include <numeric>

#include "doctest.h"
#include "gradcheck.hpp"
#include "scsl/core/error.hpp"
#include "scsl/core/random.hpp"
#include "scsl/scorer/models.hpp"
#include "scsl/scorer/scorer.hpp"
#include "scsl/scorer/tfidf.hpp"

using namespace scsl;
using namespace scsl::scorer;

namespace {

SparseVector dense(std::vector<double> v) { return SparseVector::from_dense(v); }

std::vector<SparseVector> random_features(Rng& rng, std::size_t rows, std::size_t dim, double density) {
  std::vector<SparseVector> out;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> v(dim, 0.0);
    for (auto& x : v) {
      if (uniform_unit(rng) < density) x = 2.0 * uniform_unit(rng) - 1.0;
    }
    out.push_back(SparseVector::from_dense(v));
  }
  return out;
}

std::vector<double> random_params(Rng& rng, std::size_t n, double scale) {
  std::vector<double> p(n);
  for (auto& x : p) x = scale * (2.0 * uniform_unit(rng) - 1.0);
  return p;
}

std::vector<std::string> names(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("smoothed idf") {
  const std::vector<std::string> docs = {"a b", "a c"};
  const auto vocab = fit_tfidf(docs, 10);
  CHECK(vocab.idf()[vocab.index_of("a")] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vocab.idf()[vocab.index_of("b")] == doctest::Approx(std::log(1.5) + 1.0).epsilon(1e-12));
  CHECK(vocab.idf()[vocab.index_of("b")] == doctest::Approx(1.405).epsilon(1e-3));
  const auto one = fit_tfidf(docs, 1);
  CHECK(one.terms() == std::vector<std::string>{"a"});
  CHECK_THROWS_AS(fit_tfidf(std::vector<std::string>{"", "  "}, 10), ValidationError);
}

TEST_CASE("featurize halves") {
  const std::vector<std::string> docs = {"alpha beta", "beta gamma", "delta"};
  const auto vocab = fit_tfidf(docs, 10);
  const auto v = vocab.size();

  const auto oov = featurize(vocab, "zeta omega", "alpha").to_dense();
  CHECK(std::all_of(oov.begin(), oov.begin() + static_cast<long>(v), [](double x) { return x == 0.0; }));

  const auto same = featurize(vocab, "beta gamma", "beta gamma").to_dense();
  CHECK(std::equal(same.begin(), same.begin() + static_cast<long>(v), same.begin() + static_cast<long>(v)));

  const auto unit = featurize(vocab, "", "delta").to_dense();
  CHECK(std::count_if(unit.begin(), unit.end(), [](double x) { return x != 0.0; }) == 1);
  CHECK(unit[v + static_cast<std::size_t>(vocab.index_of("delta"))] == doctest::Approx(1.0));

  // Each half depends only on its own input.
  const auto a = featurize(vocab, "alpha", "beta").to_dense();
  const auto b = featurize(vocab, "alpha", "gamma delta").to_dense();
  const auto c = featurize(vocab, "delta", "beta").to_dense();
  CHECK(std::equal(a.begin(), a.begin() + static_cast<long>(v), b.begin()));
  CHECK(std::equal(a.begin() + static_cast<long>(v), a.end(), c.begin() + static_cast<long>(v)));
}

TEST_CASE("LR separates a 2-D toy set") {
  const std::vector<SparseVector> xs = {dense({1, 0}), dense({0, 1}), dense({2, 1}), dense({1, 2})};
  const std::vector<int> ys = {1, 0, 1, 0};
  TrainOptions opts;
  opts.epochs = 500;
  opts.learning_rate = 0.5;
  const auto model = train_lr(xs, ys, names(2), opts);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(static_cast<int>(argmax(predict_proba(model, xs[i]))) == ys[i]);
}

TEST_CASE("zero learning rate keeps the initialization") {
  const std::vector<SparseVector> xs = {dense({1, 0}), dense({0, 1})};
  const std::vector<int> ys = {1, 0};
  TrainOptions opts;
  opts.learning_rate = 0.0;
  const auto lr = train_lr(xs, ys, names(2), opts);
  for (double w : lr.parameters()) CHECK(w == 0.0);
  opts.hidden_dim = 4;
  opts.seed = 3;
  CHECK(train_mlp(xs, ys, names(2), opts) == init_mlp(2, 4, names(2), 3));
}

TEST_CASE("single-class training is rejected") {
  const std::vector<SparseVector> xs = {dense({1, 0}), dense({0, 1})};
  const std::vector<int> ys = {1, 1};
  CHECK_THROWS_AS(train_lr(xs, ys, names(2), {}), ValidationError);
  CHECK_THROWS_AS(train_mlp(xs, ys, names(2), {}), ValidationError);
}

TEST_CASE("MLP learns XOR") {
  const std::vector<SparseVector> xs = {dense({0, 0}), dense({0, 1}), dense({1, 0}), dense({1, 1})};
  const std::vector<int> ys = {0, 1, 1, 0};
  TrainOptions opts;
  opts.hidden_dim = 8;
  opts.epochs = 3000;
  opts.learning_rate = 0.5;
  opts.seed = 1;
  const auto model = train_mlp(xs, ys, names(2), opts);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(static_cast<int>(argmax(predict_proba(model, xs[i]))) == ys[i]);
  CHECK(train_mlp(xs, ys, names(2), opts) == model);
}

TEST_CASE("LR gradient matches finite differences") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t classes = trial % 2 == 0 ? 2 : 3;
    const auto xs = random_features(rng, 10, 8, 0.6);
    std::vector<int> ys;
    for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(static_cast<int>(uniform_index(rng, classes)));
    LinearModel m;
    m.labels = names(classes);
    m.input_dim = 8;
    m.weights.assign(m.rows() * 8, 0.0);
    m.bias.assign(m.rows(), 0.0);
    m.set_parameters(random_params(rng, m.parameters().size(), 1.0));
    const double l2 = 0.01 * trial;
    const auto analytic = lr_loss_and_gradient(m, xs, ys, l2);
    auto loss = [&](std::span<const double> p) {
      auto copy = m;
      copy.set_parameters(p);
      return lr_loss_and_gradient(copy, xs, ys, l2).loss;
    };
    CHECK(testing::max_relative_error(loss, m.parameters(), analytic.gradient) < 1e-4);
  }
}

TEST_CASE("MLP gradient matches finite differences") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t classes = trial % 2 == 0 ? 2 : 3;
    const auto xs = random_features(rng, 6, 5, 0.7);
    std::vector<int> ys;
    for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(static_cast<int>(uniform_index(rng, classes)));
    auto m = init_mlp(5, 4, names(classes), static_cast<std::uint64_t>(trial));
    m.set_parameters(random_params(rng, m.parameters().size(), 0.8));
    const double l2 = 0.005 * trial;
    const auto analytic = mlp_loss_and_gradient(m, xs, ys, l2);
    auto loss = [&](std::span<const double> p) {
      auto copy = m;
      copy.set_parameters(p);
      return mlp_loss_and_gradient(copy, xs, ys, l2).loss;
    };
    CHECK(testing::max_relative_error(loss, m.parameters(), analytic.gradient) < 1e-4);
  }
}

TEST_CASE("Xavier initialization bounds") {
  const auto m = init_mlp(30, 10, names(2), 4);
  const double r1 = std::sqrt(6.0 / 40.0);
  const double r2 = std::sqrt(6.0 / 12.0);
  for (double w : m.w1) CHECK(std::abs(w) <= r1);
  for (double w : m.w2) CHECK(std::abs(w) <= r2);
  for (double b : m.b1) CHECK(b == 0.0);
  CHECK(init_mlp(30, 10, names(2), 4) == m);
  CHECK(init_mlp(30, 10, names(2), 5) != m);
}

TEST_CASE("predict_proba") {
  LinearModel zero{names(2), 3, {0, 0, 0}, {0}};
  const auto p = predict_proba(zero, dense({1, 2, 3}));
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));

  LinearModel big{names(2), 1, {1e4}, {0}};
  CHECK(predict_proba(big, dense({1}))[1] == doctest::Approx(1.0));
  CHECK(predict_proba(big, dense({-1}))[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(predict_proba(zero, dense({1, 2})), ValidationError);

  Rng rng(8);
  const auto mlp = init_mlp(6, 5, names(3), 2);
  for (const auto& x : random_features(rng, 100, 6, 0.5)) {
    const auto q = predict_proba(mlp, x);
    CHECK(std::accumulate(q.begin(), q.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    for (double v : q) CHECK((v >= 0.0 && v <= 1.0));
  }
}

TEST_CASE("signed_score conventions") {
  const std::vector<double> a = {0.3, 0.7};
  CHECK(signed_score(a, Convention::signed_predicted) == doctest::Approx(0.7));
  const std::vector<double> b = {0.8, 0.2};
  CHECK(signed_score(b, Convention::signed_predicted) == doctest::Approx(-0.8));
  CHECK(signed_score(b, Convention::expectation) == doctest::Approx(-0.6));
  const std::vector<double> tie = {0.5, 0.5};
  CHECK(signed_score(tie, Convention::expectation) == 0.0);
  CHECK(signed_score(tie, Convention::signed_predicted) == 0.0);
  const std::vector<double> three = {0.2, 0.3, 0.5};
  CHECK_THROWS_AS(signed_score(three, Convention::expectation), ValidationError);
}

TEST_CASE("classifier file round trip and scorer range") {
  const std::vector<std::string> docs = {"liberty property order", "equality welfare rights", "court record"};
  Classifier clf;
  clf.task = Task::ideology;
  clf.vocab = fit_tfidf(docs, 100);
  std::vector<SparseVector> xs;
  for (const auto& d : docs) xs.push_back(featurize(clf.vocab, "", d));
  TrainOptions opts;
  opts.hidden_dim = 3;
  opts.epochs = 50;
  clf.head = train_mlp(xs, std::vector<int>{1, 0, 1}, {"liberal", "conservative"}, opts);

  const auto text = serialize_classifier(clf);
  const auto back = parse_classifier(text);
  CHECK(serialize_classifier(back) == text);
  CHECK(back.vocab == clf.vocab);
  CHECK(std::get<MlpModel>(back.head) == std::get<MlpModel>(clf.head));
  CHECK_THROWS_AS(parse_classifier("SCSL9\n{}"), ValidationError);
  CHECK_THROWS_AS(parse_classifier(text.substr(0, text.size() - 3)), ValidationError);

  const BuiltinScorer scorer(std::make_shared<const Classifier>(back), Convention::signed_predicted);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    std::string s;
    for (std::size_t k = uniform_index(rng, 30); k > 0; --k) s.push_back(static_cast<char>(32 + uniform_index(rng, 95)));
    const double h = scorer.score_ideology(s);
    const double st = scorer.score_stance(s, s);
    CHECK((h >= -1.0 && h <= 1.0));
    CHECK((st >= -1.0 && st <= 1.0));
  }
}

TEST_CASE("majority head") {
  const auto m = train_majority(std::vector<int>{1, 0, 1, 1}, names(2), 4);
  CHECK(m.predicted == 1);
  CHECK(predict_proba(m, dense({0, 0, 0, 0})) == std::vector<double>{0.0, 1.0});
}
