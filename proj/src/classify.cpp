#include "cuelex/classify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include <spdlog/spdlog.h>

namespace cuelex {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  while (true) {
    const auto e = s.find(sep, b);
    out.push_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
    if (e == std::string_view::npos) return out;
    b = e + 1;
  }
}

Label parse_label(std::string_view text, std::string_view where) {
  const std::string t = fold(trim(text));
  if (t == "pos") return Label::pos;
  if (t == "neg") return Label::neg;
  throw InputError(std::string(where) + ": expected pos or neg, got '" + std::string(text) + "'");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Per-column mean and standard deviation fitted on training rows.
struct Standardizer {
  std::vector<double> mean, scale;

  void fit(const Matrix& x) {
    mean.assign(x.cols, 0.0);
    scale.assign(x.cols, 1.0);
    if (x.rows == 0) return;
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < x.cols; ++c) mean[c] += x.row(r)[c];
    for (auto& m : mean) m /= static_cast<double>(x.rows);
    std::vector<double> var(x.cols, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < x.cols; ++c) {
        const double d = x.row(r)[c] - mean[c];
        var[c] += d * d;
      }
    for (std::size_t c = 0; c < x.cols; ++c) {
      const double sd = std::sqrt(var[c] / static_cast<double>(x.rows));
      scale[c] = sd > 1e-12 ? sd : 1.0;
    }
  }

  Matrix apply(const Matrix& x) const {
    Matrix out = x;
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < x.cols; ++c) out.row(r)[c] = (x.row(r)[c] - mean[c]) / scale[c];
    return out;
  }
};

// ---------------------------------------------------------------------------

class KnnClassifier final : public Classifier {
 public:
  explicit KnnClassifier(std::size_t k) : k_(k == 0 ? 1 : k) {}

  void fit(const Matrix& x, const std::vector<Label>& y) override {
    train_ = x;
    labels_ = y;
    for (std::size_t r = 0; r < train_.rows; ++r) normalize(train_.row(r), train_.cols);
  }

  std::vector<Label> predict(const Matrix& x) const override {
    std::vector<Label> out(x.rows);
    std::vector<double> q(x.cols);
    std::vector<std::pair<double, std::size_t>> sims(train_.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
      std::copy(x.row(r), x.row(r) + x.cols, q.begin());
      normalize(q.data(), q.size());
      for (std::size_t t = 0; t < train_.rows; ++t) {
        double s = 0.0;
        const double* row = train_.row(t);
        for (std::size_t c = 0; c < x.cols; ++c) s += q[c] * row[c];
        sims[t] = {s, t};
      }
      const std::size_t k = std::min(k_, sims.size());
      // Smallest cosine distance first; ties go to the earlier training row.
      std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k), sims.end(),
                        [](const auto& a, const auto& b) {
                          return a.first != b.first ? a.first > b.first : a.second < b.second;
                        });
      std::size_t pos = 0;
      for (std::size_t i = 0; i < k; ++i) pos += labels_[sims[i].second] == Label::pos;
      if (2 * pos == k)
        out[r] = labels_[sims[0].second];
      else
        out[r] = 2 * pos > k ? Label::pos : Label::neg;
    }
    return out;
  }

 private:
  static void normalize(double* v, std::size_t n) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += v[i] * v[i];
    if (ss <= 0.0) return;
    const double inv = 1.0 / std::sqrt(ss);
    for (std::size_t i = 0; i < n; ++i) v[i] *= inv;
  }

  std::size_t k_;
  Matrix train_;
  std::vector<Label> labels_;
};

class GaussianNaiveBayes final : public Classifier {
 public:
  static constexpr double kVarianceFloor = 1e-9;

  void fit(const Matrix& x, const std::vector<Label>& y) override {
    for (int c = 0; c < 2; ++c) {
      auto& m = model_[c];
      m.count = 0;
      m.mean.assign(x.cols, 0.0);
      m.var.assign(x.cols, 0.0);
    }
    for (std::size_t r = 0; r < x.rows; ++r) {
      auto& m = model_[static_cast<int>(y[r])];
      ++m.count;
      for (std::size_t c = 0; c < x.cols; ++c) m.mean[c] += x.row(r)[c];
    }
    for (auto& m : model_)
      if (m.count > 0)
        for (auto& v : m.mean) v /= static_cast<double>(m.count);
    for (std::size_t r = 0; r < x.rows; ++r) {
      auto& m = model_[static_cast<int>(y[r])];
      for (std::size_t c = 0; c < x.cols; ++c) {
        const double d = x.row(r)[c] - m.mean[c];
        m.var[c] += d * d;
      }
    }
    for (int c = 0; c < 2; ++c) {
      auto& m = model_[c];
      if (m.count < 2)
        spdlog::warn("naive bayes: class {} has {} training example(s); using variance floor",
                     c == 1 ? "pos" : "neg", m.count);
      for (auto& v : m.var)
        v = std::max(m.count > 0 ? v / static_cast<double>(m.count) : 0.0, kVarianceFloor);
    }
    total_ = x.rows;
  }

  std::vector<Label> predict(const Matrix& x) const override {
    std::vector<Label> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
      double best = -std::numeric_limits<double>::infinity();
      Label pick = Label::neg;
      for (int c = 0; c < 2; ++c) {
        const auto& m = model_[c];
        if (m.count == 0) continue;
        double ll = std::log(static_cast<double>(m.count) / static_cast<double>(total_));
        for (std::size_t j = 0; j < x.cols; ++j) {
          const double d = x.row(r)[j] - m.mean[j];
          ll -= 0.5 * (std::log(2.0 * std::numbers::pi * m.var[j]) + d * d / m.var[j]);
        }
        if (ll > best) {
          best = ll;
          pick = static_cast<Label>(c);
        }
      }
      out[r] = pick;
    }
    return out;
  }

 private:
  struct ClassModel {
    std::size_t count = 0;
    std::vector<double> mean, var;
  };
  ClassModel model_[2];
  std::size_t total_ = 0;
};

/// Mini-batch SGD on the logistic loss over standardized features.
class LogisticSgd final : public Classifier {
 public:
  explicit LogisticSgd(const ClassifierSpec& s) : spec_(s) {}

  void fit(const Matrix& raw, const std::vector<Label>& y) override {
    scaler_.fit(raw);
    const Matrix x = scaler_.apply(raw);
    w_.assign(x.cols, 0.0);
    b_ = 0.0;
    std::mt19937_64 rng(spec_.rng_seed);
    std::vector<std::size_t> order(x.rows);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(x.cols);
    const std::size_t batch = std::max<std::size_t>(1, spec_.batch_size);
    for (std::size_t epoch = 0; epoch < spec_.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::size_t end = std::min(order.size(), start + batch);
        std::fill(grad.begin(), grad.end(), 0.0);
        double gb = 0.0;
        for (std::size_t i = start; i < end; ++i) {
          const double* row = x.row(order[i]);
          const double err = sigmoid(score(row, x.cols)) - (y[order[i]] == Label::pos ? 1.0 : 0.0);
          for (std::size_t c = 0; c < x.cols; ++c) grad[c] += err * row[c];
          gb += err;
        }
        const double step = spec_.learning_rate / static_cast<double>(end - start);
        for (std::size_t c = 0; c < x.cols; ++c) w_[c] -= step * grad[c];
        b_ -= step * gb;
      }
    }
  }

  std::vector<Label> predict(const Matrix& raw) const override {
    const Matrix x = scaler_.apply(raw);
    std::vector<Label> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r)
      out[r] = score(x.row(r), x.cols) >= 0.0 ? Label::pos : Label::neg;
    return out;
  }

 private:
  double score(const double* row, std::size_t n) const {
    double s = b_;
    for (std::size_t c = 0; c < n; ++c) s += w_[c] * row[c];
    return s;
  }

  ClassifierSpec spec_;
  Standardizer scaler_;
  std::vector<double> w_;
  double b_ = 0.0;
};

/// One tanh hidden layer and a sigmoid output, trained like LogisticSgd.
class Mlp final : public Classifier {
 public:
  explicit Mlp(const ClassifierSpec& s) : spec_(s), h_(std::max<std::size_t>(1, s.hidden_width)) {}

  void fit(const Matrix& raw, const std::vector<Label>& y) override {
    scaler_.fit(raw);
    const Matrix x = scaler_.apply(raw);
    d_ = x.cols;
    std::mt19937_64 rng(spec_.rng_seed);
    const double lim1 = std::sqrt(6.0 / static_cast<double>(d_ + h_));
    const double lim2 = std::sqrt(6.0 / static_cast<double>(h_ + 1));
    std::uniform_real_distribution<double> u1(-lim1, lim1), u2(-lim2, lim2);
    w1_.resize(h_ * d_);
    for (auto& w : w1_) w = u1(rng);
    b1_.assign(h_, 0.0);
    w2_.resize(h_);
    for (auto& w : w2_) w = u2(rng);
    b2_ = 0.0;

    std::vector<std::size_t> order(x.rows);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> g1(h_ * d_), gb1(h_), g2(h_), hidden(h_);
    const std::size_t batch = std::max<std::size_t>(1, spec_.batch_size);
    for (std::size_t epoch = 0; epoch < spec_.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::size_t end = std::min(order.size(), start + batch);
        std::fill(g1.begin(), g1.end(), 0.0);
        std::fill(gb1.begin(), gb1.end(), 0.0);
        std::fill(g2.begin(), g2.end(), 0.0);
        double gb2 = 0.0;
        for (std::size_t i = start; i < end; ++i) {
          const double* row = x.row(order[i]);
          const double out = forward(row, hidden);
          const double err = out - (y[order[i]] == Label::pos ? 1.0 : 0.0);
          gb2 += err;
          for (std::size_t j = 0; j < h_; ++j) {
            g2[j] += err * hidden[j];
            const double back = err * w2_[j] * (1.0 - hidden[j] * hidden[j]);
            gb1[j] += back;
            double* gw = g1.data() + j * d_;
            for (std::size_t c = 0; c < d_; ++c) gw[c] += back * row[c];
          }
        }
        const double step = spec_.learning_rate / static_cast<double>(end - start);
        for (std::size_t j = 0; j < h_ * d_; ++j) w1_[j] -= step * g1[j];
        for (std::size_t j = 0; j < h_; ++j) {
          b1_[j] -= step * gb1[j];
          w2_[j] -= step * g2[j];
        }
        b2_ -= step * gb2;
      }
    }
  }

  std::vector<Label> predict(const Matrix& raw) const override {
    const Matrix x = scaler_.apply(raw);
    std::vector<double> hidden(h_);
    std::vector<Label> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r)
      out[r] = forward(x.row(r), hidden) >= 0.5 ? Label::pos : Label::neg;
    return out;
  }

 private:
  double forward(const double* row, std::vector<double>& hidden) const {
    double z = b2_;
    for (std::size_t j = 0; j < h_; ++j) {
      double a = b1_[j];
      const double* w = w1_.data() + j * d_;
      for (std::size_t c = 0; c < d_; ++c) a += w[c] * row[c];
      hidden[j] = std::tanh(a);
      z += w2_[j] * hidden[j];
    }
    return sigmoid(z);
  }

  ClassifierSpec spec_;
  std::size_t h_;
  std::size_t d_ = 0;
  Standardizer scaler_;
  std::vector<double> w1_, b1_, w2_;
  double b2_ = 0.0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Annotations and agreement

std::vector<Annotation> parse_annotations(std::istream& in, std::string_view source) {
  std::vector<Annotation> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto f = split(line, ',');
    if (!header) {
      if (f.size() != 3 || fold(trim(f[0])) != "word" || fold(trim(f[1])) != "judge1" ||
          fold(trim(f[2])) != "judge2")
        throw InputError(where + ": expected header word,judge1,judge2");
      header = true;
      continue;
    }
    if (f.size() != 3) throw InputError(where + ": expected 3 columns");
    Annotation a{std::string(trim(f[0])), parse_label(f[1], where), parse_label(f[2], where)};
    if (a.word.empty()) throw InputError(where + ": empty word");
    if (!seen.insert(a.word).second) throw InputError(where + ": duplicate word '" + a.word + "'");
    out.push_back(std::move(a));
  }
  if (!header) throw InputError(std::string(source) + ": missing header word,judge1,judge2");
  return out;
}

std::vector<Annotation> read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open annotations " + path.string());
  return parse_annotations(in, path.string());
}

std::string_view landis_koch_band(double kappa) {
  if (kappa <= 0.0) return "poor";
  if (kappa <= 0.2) return "slight";
  if (kappa <= 0.4) return "fair";
  if (kappa <= 0.6) return "moderate";
  if (kappa <= 0.8) return "substantial";
  return "almost perfect";
}

AgreementReport agreement(const AgreementCounts& counts) {
  const std::size_t n = counts.total();
  if (n < 2) throw InputError("agreement needs at least two annotations");
  const double total = static_cast<double>(n);
  const double j1_pos = static_cast<double>(counts.pp + counts.pn) / total;
  const double j2_pos = static_cast<double>(counts.pp + counts.np) / total;
  AgreementReport r;
  r.counts = counts;
  r.percent_agreement = static_cast<double>(counts.pp + counts.nn) / total;
  r.expected_agreement = j1_pos * j2_pos + (1.0 - j1_pos) * (1.0 - j2_pos);
  if (r.expected_agreement >= 1.0)
    throw InputError("kappa undefined: both judges gave every item the same label");
  r.kappa = (r.percent_agreement - r.expected_agreement) / (1.0 - r.expected_agreement);
  r.band = std::string(landis_koch_band(r.kappa));
  return r;
}

AgreementReport agreement(const std::vector<Annotation>& annotations) {
  AgreementCounts c;
  for (const auto& a : annotations) {
    const bool p1 = a.judge1 == Label::pos;
    const bool p2 = a.judge2 == Label::pos;
    if (p1 && p2) ++c.pp;
    else if (p1) ++c.pn;
    else if (p2) ++c.np;
    else ++c.nn;
  }
  return agreement(c);
}

// ---------------------------------------------------------------------------
// Dataset

FeatureVector featurize(std::string_view word, const std::vector<const EmbeddingModel*>& models) {
  std::string form(word);
  std::replace(form.begin(), form.end(), ' ', '_');
  FeatureVector fv;
  bool any = false;
  for (const auto* m : models) {
    const auto i = m->resolve(form, true);
    fv.oov.push_back(!i.has_value());
    if (i) {
      const auto v = m->vector(*i);
      fv.values.insert(fv.values.end(), v.begin(), v.end());
      any = true;
    } else {
      fv.values.insert(fv.values.end(), m->dim(), 0.0f);
    }
  }
  if (!any) throw InputError("word '" + std::string(word) + "' is out of vocabulary in every model");
  return fv;
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count_if(examples.begin(), examples.end(), [](const auto& e) {
    return e.label == Label::pos;
  }));
}

Dataset build_dataset(const std::vector<std::string>& accepted, const std::vector<std::string>& rejected,
                      const std::vector<std::string>& unrelated,
                      const std::vector<const EmbeddingModel*>& models,
                      const std::vector<std::string>* seeds) {
  if (models.empty()) throw InputError("dataset needs at least one embedding model");
  std::map<std::string, std::string> owner;
  auto claim = [&](const std::vector<std::string>& words, const char* list) {
    for (const auto& w : words) {
      auto [it, fresh] = owner.try_emplace(fold(w), list);
      if (!fresh && it->second != list)
        throw InputError("word '" + w + "' appears in both the " + it->second + " and " + list +
                         " lists");
    }
  };
  claim(accepted, "accepted");
  claim(rejected, "rejected");
  claim(unrelated, "unrelated");

  std::vector<std::pair<std::string, Label>> wanted;
  std::set<std::string> taken;
  auto push = [&](const std::string& w, Label l) {
    if (taken.insert(fold(w)).second) wanted.emplace_back(w, l);
  };
  for (const auto& w : accepted) push(w, Label::pos);
  if (seeds) {
    for (const auto& w : *seeds) {
      auto it = owner.find(fold(w));
      if (it != owner.end() && it->second != std::string("accepted"))
        throw InputError("seed '" + w + "' appears in the " + it->second + " list");
      push(w, Label::pos);
    }
  }
  for (const auto& w : rejected) push(w, Label::neg);
  for (const auto& w : unrelated) push(w, Label::neg);

  Dataset ds;
  for (const auto* m : models) ds.feature_dim += m->dim();
  for (const auto& [w, label] : wanted) {
    const bool known = std::any_of(models.begin(), models.end(), [&](const EmbeddingModel* m) {
      std::string form = w;
      std::replace(form.begin(), form.end(), ' ', '_');
      return m->resolve(form, true).has_value();
    });
    if (!known) {
      ds.excluded.push_back(w);
      continue;
    }
    FeatureVector fv = featurize(w, models);
    ds.examples.push_back({w, std::move(fv.values), label, std::move(fv.oov)});
  }
  if (!ds.excluded.empty())
    spdlog::warn("dataset: {} word(s) unknown to every model were excluded", ds.excluded.size());
  if (ds.positives() == 0 || ds.negatives() == 0)
    throw InputError("degenerate dataset: need both positive and negative examples");
  std::mt19937_64 rng(kDatasetShuffleSeed);
  std::shuffle(ds.examples.begin(), ds.examples.end(), rng);
  return ds;
}

std::vector<std::string> sample_unrelated(const EmbeddingModel& model, const SeedLexicon& lexicon,
                                          std::size_t n, double max_sim, std::uint64_t rng_seed,
                                          const std::set<std::string>& exclude) {
  if (n == 0) return {};
  std::vector<std::size_t> seeds;
  for (const auto& e : lexicon.entries())
    for (const auto& f : e.model_forms)
      if (auto i = model.resolve(f, true); i && model.usable(*i)) seeds.push_back(*i);
  if (seeds.empty()) throw InputError("no seed form of the lexicon is in model '" + model.name() + "'");

  std::set<std::string> blocked;
  for (const auto& w : exclude) blocked.insert(fold(w));
  const auto& lex_words = lexicon.excluded_words();

  std::vector<std::size_t> order(model.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(rng_seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::string> out;
  std::unordered_set<std::string> drawn;
  for (std::size_t i : order) {
    if (!model.usable(i)) continue;
    const std::string key = fold(model.token(i));
    if (lex_words.count(key) || blocked.count(key) || drawn.count(key)) continue;
    const bool far = std::all_of(seeds.begin(), seeds.end(),
                                 [&](std::size_t s) { return cosine(model, i, s) < max_sim; });
    if (!far) continue;
    drawn.insert(key);
    out.push_back(model.token(i));
    if (out.size() == n) return out;
  }
  throw InputError("only " + std::to_string(out.size()) + " of " + std::to_string(n) +
                   " unrelated tokens with similarity below " + std::to_string(max_sim) +
                   " found in model '" + model.name() + "'");
}

void write_dataset_tsv(std::ostream& out, const Dataset& ds) {
  out << "word\tlabel\toov";
  for (std::size_t i = 0; i < ds.feature_dim; ++i) out << "\tf" << i;
  out << '\n';
  char buf[32];
  for (const auto& e : ds.examples) {
    out << e.word << '\t' << (e.label == Label::pos ? "pos" : "neg") << '\t';
    for (bool b : e.oov) out << (b ? '1' : '0');
    for (float v : e.features) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << '\t' << std::string_view(buf, static_cast<std::size_t>(p - buf));
    }
    out << '\n';
  }
}

Dataset read_dataset_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset " + path.string());
  Dataset ds;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!header) {
      if (f.size() < 3 || f[0] != "word" || f[1] != "label" || f[2] != "oov")
        throw InputError(where + ": expected dataset header");
      ds.feature_dim = f.size() - 3;
      header = true;
      continue;
    }
    if (f.size() != ds.feature_dim + 3) throw InputError(where + ": wrong column count");
    LabeledExample e;
    e.word = std::string(f[0]);
    e.label = parse_label(f[1], where);
    for (char c : f[2]) e.oov.push_back(c == '1');
    e.features.resize(ds.feature_dim);
    for (std::size_t i = 0; i < ds.feature_dim; ++i) {
      const auto s = f[i + 3];
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), e.features[i]);
      if (ec != std::errc() || p != s.data() + s.size()) throw InputError(where + ": bad feature value");
    }
    ds.examples.push_back(std::move(e));
  }
  if (!header) throw InputError(path.string() + ": missing dataset header");
  return ds;
}

// ---------------------------------------------------------------------------
// Folds, specs, evaluation

std::vector<std::size_t> kfold(const std::vector<Label>& labels, std::size_t k, std::uint64_t rng_seed) {
  if (k < 2) throw InputError("k-fold needs k >= 2");
  if (k > labels.size())
    throw InputError("k = " + std::to_string(k) + " exceeds dataset size " + std::to_string(labels.size()));
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == Label::pos ? pos : neg).push_back(i);
  std::mt19937_64 rng(rng_seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<std::size_t> folds(labels.size());
  std::size_t slot = 0;
  for (std::size_t i : pos) folds[i] = slot++ % k;
  for (std::size_t i : neg) folds[i] = slot++ % k;
  return folds;
}

std::vector<std::size_t> kfold(const Dataset& ds, std::size_t k, std::uint64_t rng_seed) {
  std::vector<Label> labels;
  labels.reserve(ds.examples.size());
  for (const auto& e : ds.examples) labels.push_back(e.label);
  return kfold(labels, k, rng_seed);
}

std::string fold_digest(const std::vector<std::size_t>& folds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t f : folds) {
    for (int b = 0; b < 8; ++b) {
      h ^= (static_cast<std::uint64_t>(f) >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ClassifierSpec::name() const {
  switch (kind) {
    case ClassifierKind::knn: return "knn(k=" + std::to_string(knn_k) + ")";
    case ClassifierKind::gaussian_naive_bayes: return "gaussian_naive_bayes";
    case ClassifierKind::logistic_sgd: return "logistic_sgd";
    case ClassifierKind::mlp: return "mlp(hidden=" + std::to_string(hidden_width) + ")";
  }
  return "unknown";
}

ClassifierSpec ClassifierSpec::parse(std::string_view text) {
  ClassifierSpec s;
  const auto colon = text.find(':');
  const std::string kind = fold(trim(text.substr(0, colon)));
  if (kind == "knn") s.kind = ClassifierKind::knn;
  else if (kind == "nb" || kind == "gaussian_naive_bayes" || kind == "naive_bayes")
    s.kind = ClassifierKind::gaussian_naive_bayes;
  else if (kind == "logistic" || kind == "logistic_sgd") s.kind = ClassifierKind::logistic_sgd;
  else if (kind == "mlp") s.kind = ClassifierKind::mlp;
  else throw InputError("unknown classifier '" + std::string(text) + "'");
  if (colon == std::string_view::npos) return s;
  for (auto opt : split(text.substr(colon + 1), ',')) {
    const auto eq = opt.find('=');
    if (eq == std::string_view::npos) throw InputError("classifier option without '=': " + std::string(opt));
    const std::string key = fold(trim(opt.substr(0, eq)));
    const std::string val(trim(opt.substr(eq + 1)));
    try {
      if (key == "k") s.knn_k = std::stoul(val);
      else if (key == "lr") s.learning_rate = std::stod(val);
      else if (key == "epochs") s.epochs = std::stoul(val);
      else if (key == "batch") s.batch_size = std::stoul(val);
      else if (key == "hidden") s.hidden_width = std::stoul(val);
      else if (key == "seed") s.rng_seed = std::stoull(val);
      else throw InputError("unknown classifier option '" + key + "'");
    } catch (const std::logic_error&) {
      throw InputError("bad value for classifier option '" + key + "'");
    }
  }
  return s;
}

std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec) {
  switch (spec.kind) {
    case ClassifierKind::knn: return std::make_unique<KnnClassifier>(spec.knn_k);
    case ClassifierKind::gaussian_naive_bayes: return std::make_unique<GaussianNaiveBayes>();
    case ClassifierKind::logistic_sgd: return std::make_unique<LogisticSgd>(spec);
    case ClassifierKind::mlp: return std::make_unique<Mlp>(spec);
  }
  throw InputError("unknown classifier kind");
}

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

Metrics metrics(const Confusion& c) {
  if (c.total() == 0) throw InputError("metrics need a non-empty confusion matrix");
  Metrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  else m.precision_undefined = true;
  if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  else m.recall_undefined = true;
  if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  else m.f1_undefined = true;
  return m;
}

Matrix to_matrix(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = ds.feature_dim;
  m.data.resize(m.rows * m.cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = ds.examples[rows[r]].features;
    std::copy(f.begin(), f.end(), m.row(r));
  }
  return m;
}

EvalReport train_eval(const Dataset& ds, const ClassifierSpec& spec,
                      const std::vector<std::size_t>& folds) {
  if (folds.size() != ds.examples.size())
    throw InputError("fold assignment does not match the dataset size");
  if (folds.empty()) throw InputError("cannot evaluate an empty dataset");
  const std::size_t k = *std::max_element(folds.begin(), folds.end()) + 1;
  std::vector<Confusion> per_fold(k);
  const auto nk = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t fi = 0; fi < nk; ++fi) {
    const auto f = static_cast<std::size_t>(fi);
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? test : train).push_back(i);
    if (test.empty() || train.empty()) continue;
    std::vector<Label> y;
    for (std::size_t i : train) y.push_back(ds.examples[i].label);
    ClassifierSpec fold_spec = spec;
    fold_spec.rng_seed = spec.rng_seed + f;
    auto clf = make_classifier(fold_spec);
    clf->fit(to_matrix(ds, train), y);
    const auto pred = clf->predict(to_matrix(ds, test));
    Confusion c;
    for (std::size_t t = 0; t < test.size(); ++t) {
      const bool truth = ds.examples[test[t]].label == Label::pos;
      const bool said = pred[t] == Label::pos;
      if (truth && said) ++c.tp;
      else if (!truth && said) ++c.fp;
      else if (truth) ++c.fn;
      else ++c.tn;
    }
    per_fold[f] = c;
  }
  EvalReport r;
  r.classifier = spec.name();
  for (const auto& c : per_fold) r.confusion += c;
  r.metrics = metrics(r.confusion);
  r.fold_digest = fold_digest(folds);
  r.folds = k;
  return r;
}

}  // namespace cuelex
