#include "cuelex/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>

#include <spdlog/spdlog.h>

#include "cuelex/common.hpp"

namespace cuelex {

static_assert(std::endian::native == std::endian::little,
              "word2vec payloads are read as little-endian floats");

ModelFormat parse_model_format(std::string_view text) {
  const std::string t = fold(text);
  if (t == "binary" || t == "bin") return ModelFormat::binary;
  if (t == "text" || t == "txt") return ModelFormat::text;
  throw InputError("unknown model format '" + std::string(text) + "'");
}

EmbeddingModel::EmbeddingModel(std::string name, std::size_t dim, std::vector<std::string> vocab,
                               std::vector<float> vectors)
    : name_(std::move(name)), dim_(dim), vocab_(std::move(vocab)), vectors_(std::move(vectors)) {
  if (dim_ == 0) throw InputError("model '" + name_ + "': dim must be positive");
  if (vocab_.empty()) throw InputError("model '" + name_ + "': empty vocabulary");
  if (vectors_.size() != vocab_.size() * dim_)
    throw InputError("model '" + name_ + "': vector matrix does not match vocab_size x dim");

  const std::size_t n = vocab_.size();
  norms_.resize(n);
  inv_norms_.resize(n);
  usable_.resize(n);
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(vocab_[i], i).second)
      throw InputError("model '" + name_ + "': duplicate token '" + vocab_[i] + "'");
    folded_[fold(vocab_[i])].push_back(i);
    double ss = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const float x = vectors_[i * dim_ + d];
      if (!std::isfinite(x))
        throw InputError("model '" + name_ + "': non-finite value for token '" + vocab_[i] + "'");
      ss += static_cast<double>(x) * static_cast<double>(x);
    }
    norms_[i] = std::sqrt(ss);
    usable_[i] = norms_[i] >= kUnusableNorm ? 1 : 0;
    inv_norms_[i] = usable_[i] ? 1.0 / norms_[i] : 0.0;
  }
}

std::optional<std::size_t> EmbeddingModel::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> EmbeddingModel::resolve(std::string_view token, bool fold_case) const {
  if (auto i = find(token)) return i;
  if (!fold_case) return std::nullopt;
  auto it = folded_.find(fold(token));
  if (it == folded_.end()) return std::nullopt;
  return it->second.front();
}

std::span<const std::size_t> EmbeddingModel::case_variants(const std::string& folded_key) const {
  auto it = folded_.find(folded_key);
  if (it == folded_.end()) return {};
  return it->second;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

class ByteReader {
 public:
  explicit ByteReader(const std::filesystem::path& path)
      : file_(std::fopen(path.string().c_str(), "rb")), buf_(1 << 20) {
    if (!file_) throw InputError("cannot open model file " + path.string());
  }

  /// Next byte or -1 at end of file.
  int get() {
    if (pos_ == len_ && !refill()) return -1;
    return static_cast<unsigned char>(buf_[pos_++]);
  }

  int peek() {
    if (pos_ == len_ && !refill()) return -1;
    return static_cast<unsigned char>(buf_[pos_]);
  }

  /// Copies up to n bytes; returns the number copied.
  std::size_t read(char* out, std::size_t n) {
    std::size_t done = 0;
    while (done < n) {
      if (pos_ == len_ && !refill()) break;
      const std::size_t take = std::min(n - done, len_ - pos_);
      std::memcpy(out + done, buf_.data() + pos_, take);
      pos_ += take;
      done += take;
    }
    return done;
  }

 private:
  bool refill() {
    len_ = std::fread(buf_.data(), 1, buf_.size(), file_.get());
    pos_ = 0;
    return len_ > 0;
  }

  std::unique_ptr<std::FILE, FileCloser> file_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
};

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

class Accumulator {
 public:
  Accumulator(const LoadOptions& opt, std::size_t dim) : opt_(opt), dim_(dim) {
    if (opt_.vocab_filter) {
      for (const auto& w : *opt_.vocab_filter) filter_.insert(fold(w));
    }
  }

  bool wanted(const std::string& token) const {
    return !opt_.vocab_filter || filter_.count(fold(token)) > 0;
  }

  void add(std::string token, const float* values) {
    if (!seen_.insert(token).second) {
      ++duplicates_;
      return;
    }
    vocab_.push_back(std::move(token));
    vectors_.insert(vectors_.end(), values, values + dim_);
  }

  void reserve(std::size_t n) {
    if (opt_.vocab_filter) return;
    vocab_.reserve(n);
    vectors_.reserve(n * dim_);
  }

  EmbeddingModel finish(const std::string& name) {
    if (vocab_.empty())
      throw InputError("model '" + name + "': empty vocabulary" +
                       (opt_.vocab_filter ? std::string(" after filtering") : std::string()));
    if (duplicates_ > 0)
      spdlog::warn("model '{}': dropped {} duplicate token record(s), kept first occurrences",
                   name, duplicates_);
    EmbeddingModel m(name, dim_, std::move(vocab_), std::move(vectors_));
    m.set_duplicates_dropped(duplicates_);
    return m;
  }

 private:
  const LoadOptions& opt_;
  std::size_t dim_;
  std::unordered_set<std::string> filter_;
  std::unordered_set<std::string> seen_;
  std::vector<std::string> vocab_;
  std::vector<float> vectors_;
  std::size_t duplicates_ = 0;
};

void check_finite(const float* v, std::size_t dim, const std::string& token,
                  const std::string& name) {
  for (std::size_t d = 0; d < dim; ++d) {
    if (!std::isfinite(v[d]))
      throw InputError("model '" + name + "': non-finite value for token '" + token + "'");
  }
}

EmbeddingModel load_binary(const std::filesystem::path& path, const LoadOptions& opt,
                           const std::string& name) {
  ByteReader in(path);
  std::string header;
  for (int c = in.get(); c != '\n'; c = in.get()) {
    if (c < 0 || header.size() > 64) throw InputError("malformed header in " + path.string());
    header.push_back(static_cast<char>(c));
  }
  const auto fields = split_ws(header);
  std::size_t vocab_size = 0;
  std::size_t dim = 0;
  if (fields.size() != 2 || !parse_number(fields[0], vocab_size) || !parse_number(fields[1], dim) ||
      dim == 0)
    throw InputError("malformed header '" + header + "' in " + path.string());

  Accumulator acc(opt, dim);
  acc.reserve(vocab_size);
  std::vector<float> values(dim);
  std::string token;
  for (std::size_t r = 0; r < vocab_size; ++r) {
    while (in.peek() == '\n') in.get();
    token.clear();
    for (int c = in.get(); c != ' '; c = in.get()) {
      if (c < 0)
        throw InputError("truncated model " + path.string() + ": expected " +
                         std::to_string(vocab_size) + " records, found " + std::to_string(r));
      token.push_back(static_cast<char>(c));
    }
    if (token.empty())
      throw InputError("malformed record " + std::to_string(r) + " in " + path.string() +
                       ": empty token");
    const std::size_t bytes = dim * sizeof(float);
    if (in.read(reinterpret_cast<char*>(values.data()), bytes) != bytes)
      throw InputError("truncated vector payload for token '" + token + "' in " + path.string());
    check_finite(values.data(), dim, token, name);
    if (acc.wanted(token)) acc.add(token, values.data());
  }
  return acc.finish(name);
}

EmbeddingModel load_text(const std::filesystem::path& path, const LoadOptions& opt,
                         const std::string& name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> declared;
  std::size_t dim = 0;
  std::optional<Accumulator> acc;
  std::vector<float> values;
  std::size_t records = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2) {
      std::size_t a = 0, b = 0;
      if (parse_number(fields[0], a) && parse_number(fields[1], b)) {
        if (b == 0) throw InputError("malformed header '" + line + "' in " + path.string());
        declared = a;
        dim = b;
        continue;
      }
    }
    if (dim == 0) dim = fields.size() - 1;
    if (dim == 0 || fields.size() != dim + 1)
      throw InputError("malformed line " + std::to_string(line_no) + " in " + path.string() +
                       ": expected token and " + std::to_string(dim) + " values");
    if (!acc) {
      acc.emplace(opt, dim);
      if (declared) acc->reserve(*declared);
      values.resize(dim);
    }
    const std::string token(fields[0]);
    for (std::size_t d = 0; d < dim; ++d) {
      if (!parse_number(fields[d + 1], values[d]))
        throw InputError("malformed value on line " + std::to_string(line_no) + " in " +
                         path.string());
    }
    check_finite(values.data(), dim, token, name);
    ++records;
    if (acc->wanted(token)) acc->add(token, values.data());
    if (declared && records == *declared) break;
  }
  if (declared && records < *declared)
    throw InputError("truncated model " + path.string() + ": expected " +
                     std::to_string(*declared) + " records, found " + std::to_string(records));
  if (!acc) throw InputError("model '" + name + "': empty vocabulary");
  return acc->finish(name);
}

}  // namespace

EmbeddingModel load_model(const std::filesystem::path& path, const LoadOptions& options) {
  if (!std::filesystem::exists(path)) throw InputError("model file not found: " + path.string());
  const std::string name = options.name.empty() ? path.stem().string() : options.name;
  return options.format == ModelFormat::binary ? load_binary(path, options, name)
                                               : load_text(path, options, name);
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path,
                ModelFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model file " + path.string());
  out << model.size() << ' ' << model.dim() << '\n';
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto v = model.vector(i);
    if (format == ModelFormat::binary) {
      out << model.token(i) << ' ';
      out.write(reinterpret_cast<const char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(float)));
      out << '\n';
    } else {
      out << model.token(i);
      char buf[32];
      for (float x : v) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
        out << ' ' << std::string_view(buf, static_cast<std::size_t>(p - buf));
      }
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failure on " + path.string());
}

// ---------------------------------------------------------------------------
// Queries

std::vector<double> unit_vector(const EmbeddingModel& model, std::size_t i) {
  const auto v = model.vector(i);
  const double inv = model.usable(i) ? 1.0 / model.norm(i) : 0.0;
  std::vector<double> q(v.size());
  for (std::size_t d = 0; d < v.size(); ++d) q[d] = static_cast<double>(v[d]) * inv;
  return q;
}

double cosine(const EmbeddingModel& model, std::size_t a, std::size_t b) {
  if (!model.usable(a) || !model.usable(b))
    throw InputError("token '" + model.token(model.usable(a) ? b : a) +
                     "' has a zero vector and is unusable");
  const auto va = model.vector(a);
  const auto vb = model.vector(b);
  const double ia = 1.0 / model.norm(a);
  const double ib = 1.0 / model.norm(b);
  double s = 0.0;
  for (std::size_t d = 0; d < va.size(); ++d)
    s += (static_cast<double>(va[d]) * ia) * (static_cast<double>(vb[d]) * ib);
  return s;
}

double cosine(const EmbeddingModel& model, std::string_view w1, std::string_view w2) {
  auto a = model.find(w1);
  if (!a) throw InputError("token '" + std::string(w1) + "' not in vocabulary");
  auto b = model.find(w2);
  if (!b) throw InputError("token '" + std::string(w2) + "' not in vocabulary");
  return cosine(model, *a, *b);
}

std::vector<NeighborResult> top_k(const EmbeddingModel& model, std::string_view query,
                                  std::size_t k, bool fold_case, Exec exec) {
  const auto qi = model.resolve(query, fold_case);
  if (!qi) throw InputError("query '" + std::string(query) + "' out of vocabulary");
  if (!model.usable(*qi))
    throw InputError("query '" + std::string(query) + "' has a zero vector and is unusable");
  if (k == 0) return {};

  // The scan multiplies the query's unit entry by the row's normalized
  // entry, the same product order cosine() uses.
  const std::vector<double> q = unit_vector(model, *qi);
  std::vector<double> scores(model.size());
  if (exec == Exec::parallel)
    kernels::cosine_scan_omp(model.table(), q, scores);
  else
    kernels::cosine_scan_serial(model.table(), q, scores);

  constexpr double excluded = -std::numeric_limits<double>::infinity();
  scores[*qi] = excluded;
  if (fold_case) {
    for (std::size_t v : model.case_variants(fold(model.token(*qi)))) scores[v] = excluded;
  }

  std::vector<std::size_t> eligible;
  eligible.reserve(model.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] != excluded) eligible.push_back(i);

  auto before = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return model.token(a) < model.token(b);
  };

  std::vector<NeighborResult> out;
  const std::string& qtok = model.token(*qi);
  if (!fold_case) {
    const std::size_t m = std::min(k, eligible.size());
    std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(m),
                      eligible.end(), before);
    for (std::size_t i = 0; i < m; ++i)
      out.push_back({qtok, model.token(eligible[i]), scores[eligible[i]]});
    return out;
  }

  // Folded keys collapse variants, so the window that holds k distinct keys
  // may be larger than k; grow it until it does or covers everything.
  std::size_t window = std::min(eligible.size(), 2 * k + 16);
  while (true) {
    std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(window),
                      eligible.end(), before);
    out.clear();
    std::unordered_set<std::string> keys;
    for (std::size_t i = 0; i < window && out.size() < k; ++i) {
      if (keys.insert(fold(model.token(eligible[i]))).second)
        out.push_back({qtok, model.token(eligible[i]), scores[eligible[i]]});
    }
    if (out.size() == k || window == eligible.size()) return out;
    window = std::min(eligible.size(), window * 2);
  }
}

}  // namespace cuelex
