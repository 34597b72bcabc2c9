#include "adaptune/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "adaptune/rng.hpp"

namespace adaptune::corpus {

namespace {

bool valid_tag(const std::string& tag) {
  if (tag == "O") return true;
  if (tag.size() < 3) return false;
  if (tag[0] != 'B' && tag[0] != 'I') return false;
  return tag[1] == '-';
}

bool blank_line(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

std::vector<Sentence> parse_bio(std::istream& in) {
  std::vector<Sentence> sentences;
  Sentence current;
  std::string line;
  int line_no = 0;
  auto flush = [&] {
    if (!current.tokens.empty()) {
      if (current.tokens.size() == 1 && current.tokens[0] == "-DOCSTART-") {
        // document marker, not data
      } else {
        sentences.push_back(std::move(current));
      }
      current = Sentence{};
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank_line(line)) {
      flush();
      continue;
    }
    std::istringstream fields(line);
    std::vector<std::string> cols;
    std::string col;
    while (fields >> col) cols.push_back(col);
    if (cols.size() < 2) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected token and tag columns");
    }
    const std::string& tag = cols.back();
    if (!valid_tag(tag)) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": malformed BIO tag '" + tag + "'");
    }
    current.tokens.push_back(cols.front());
    current.tags.push_back(tag);
  }
  flush();
  return sentences;
}

std::vector<Sentence> parse_bio_string(const std::string& text) {
  std::istringstream in(text);
  return parse_bio(in);
}

std::string serialize_bio(const std::vector<Sentence>& sentences) {
  std::ostringstream out;
  for (const Sentence& s : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out << s.tokens[i] << '\t' << s.tags[i] << '\n';
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> entity_types_of(const TaggedCorpus& c) {
  std::set<std::string> types;
  auto collect = [&](const std::vector<Sentence>& split) {
    for (const Sentence& s : split) {
      for (const std::string& tag : s.tags) {
        if (tag.size() > 2) types.insert(tag.substr(2));
      }
    }
  };
  collect(c.train);
  collect(c.val);
  collect(c.test);
  return {types.begin(), types.end()};
}

namespace {

std::vector<Sentence> sample_split(const std::vector<Sentence>& split,
                                   double x, std::uint64_t seed,
                                   const std::string& source_id,
                                   const char* split_name) {
  if (!(x > 0.0) || x > 1.0) {
    throw std::invalid_argument("scaling factor must be in (0, 1]");
  }
  if (x == 1.0 || split.empty()) return split;
  const std::size_t n = split.size();
  const auto keep = static_cast<std::size_t>(
      std::ceil(x * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng::Stream stream(
      rng::mix(seed, rng::hash_key(source_id + "/" + split_name)));
  stream.shuffle(order);
  order.resize(keep);
  std::sort(order.begin(), order.end());
  std::vector<Sentence> out;
  out.reserve(keep);
  for (std::size_t idx : order) out.push_back(split[idx]);
  return out;
}

}  // namespace

TaggedCorpus scale(const TaggedCorpus& c, const ScalingSpec& spec,
                   std::uint64_t seed) {
  if (spec.x_test != 1.0) {
    throw std::invalid_argument("x_test must be 1.0");
  }
  TaggedCorpus out;
  out.train = sample_split(c.train, spec.x_train, seed, c.source_id, "train");
  out.val = sample_split(c.val, spec.x_val, seed, c.source_id, "val");
  out.test = c.test;
  out.tag_vocabulary = c.tag_vocabulary;
  out.source_id = c.source_id;
  return out;
}

TaggedCorpus merge_train_val(const TaggedCorpus& c) {
  TaggedCorpus out = c;
  out.train.insert(out.train.end(), c.val.begin(), c.val.end());
  out.val.clear();
  return out;
}

namespace {

std::string zero_padded(int value, int width) {
  std::string digits = std::to_string(value);
  while (static_cast<int>(digits.size()) < width) digits.insert(0, "0");
  return digits;
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

Sentence make_sentence(const SyntheticSpec& spec, rng::Stream& stream,
                       const std::vector<std::vector<std::string>>& pools) {
  const int length = stream.uniform_int(spec.min_sentence_len, spec.max_sentence_len);
  Sentence s;
  bool last_was_entity = false;
  int i = 0;
  while (i < length) {
    const bool start_entity =
        !last_was_entity && !spec.entity_types.empty() && stream.unit() < 0.35;
    if (start_entity) {
      const int type_idx =
          static_cast<int>(stream.below(spec.entity_types.size()));
      const auto& pool = pools[static_cast<std::size_t>(type_idx)];
      const std::string& type = spec.entity_types[static_cast<std::size_t>(type_idx)];
      int mention_len = 1 + static_cast<int>(stream.below(2));
      mention_len = std::min(mention_len, length - i);
      for (int k = 0; k < mention_len; ++k) {
        s.tokens.push_back(pool[stream.below(pool.size())]);
        s.tags.push_back((k == 0 ? "B-" : "I-") + type);
      }
      i += mention_len;
      last_was_entity = true;
    } else {
      s.tokens.push_back("w" + zero_padded(static_cast<int>(stream.below(
                                               static_cast<std::uint64_t>(
                                                   spec.filler_vocab))),
                                           3));
      s.tags.push_back("O");
      last_was_entity = false;
      ++i;
    }
  }
  return s;
}

void apply_label_noise(std::vector<Sentence>& split, double noise_rate,
                       rng::Stream& stream) {
  if (noise_rate <= 0.0) return;
  for (Sentence& s : split) {
    std::size_t i = 0;
    while (i < s.tags.size()) {
      if (s.tags[i][0] == 'B') {
        std::size_t end = i + 1;
        while (end < s.tags.size() && s.tags[end][0] == 'I') ++end;
        if (stream.unit() < noise_rate) {
          for (std::size_t k = i; k < end; ++k) s.tags[k] = "O";
        }
        i = end;
      } else {
        ++i;
      }
    }
  }
}

}  // namespace

TaggedCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_sentences < 3) {
    throw std::invalid_argument("need at least one sentence per split");
  }
  if (spec.noise_rate < 0.0 || spec.noise_rate >= 1.0) {
    throw std::invalid_argument("noise_rate must be in [0, 1)");
  }
  if (spec.min_sentence_len < 1 || spec.max_sentence_len < spec.min_sentence_len) {
    throw std::invalid_argument("bad sentence length bounds");
  }
  if (spec.filler_vocab < 1 || spec.tokens_per_type < 1) {
    throw std::invalid_argument("token pools must be non-empty");
  }

  std::vector<std::vector<std::string>> pools;
  for (const std::string& type : spec.entity_types) {
    std::vector<std::string> pool;
    for (int i = 0; i < spec.tokens_per_type; ++i) {
      pool.push_back(lowercase(type) + "_" + zero_padded(i, 2));
    }
    pools.push_back(std::move(pool));
  }

  rng::Stream stream(rng::mix(spec.seed, rng::hash_key("synthetic")));
  std::vector<Sentence> all;
  all.reserve(static_cast<std::size_t>(spec.num_sentences));
  for (int i = 0; i < spec.num_sentences; ++i) {
    all.push_back(make_sentence(spec, stream, pools));
  }

  const int n = spec.num_sentences;
  int n_train = static_cast<int>(std::lround(spec.train_ratio * n));
  int n_val = static_cast<int>(std::lround(spec.val_ratio * n));
  n_train = std::max(1, std::min(n_train, n - 2));
  n_val = std::max(1, std::min(n_val, n - n_train - 1));

  TaggedCorpus c;
  c.source_id = "synthetic-" + std::to_string(spec.seed);
  c.train.assign(all.begin(), all.begin() + n_train);
  c.val.assign(all.begin() + n_train, all.begin() + n_train + n_val);
  c.test.assign(all.begin() + n_train + n_val, all.end());

  rng::Stream noise_stream(rng::mix(spec.seed, rng::hash_key("label-noise")));
  apply_label_noise(c.train, spec.noise_rate, noise_stream);
  apply_label_noise(c.val, spec.noise_rate, noise_stream);

  c.tag_vocabulary = entity_types_of(c);
  std::set<std::string> declared(spec.entity_types.begin(), spec.entity_types.end());
  c.tag_vocabulary.assign(declared.begin(), declared.end());
  return c;
}

TaggedCorpus load_corpus(const std::string& train_path,
                         const std::string& val_path,
                         const std::string& test_path,
                         const std::string& source_id) {
  auto read = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_bio(in);
  };
  TaggedCorpus c;
  c.train = read(train_path);
  if (!val_path.empty()) c.val = read(val_path);
  c.test = read(test_path);
  c.source_id = source_id;
  c.tag_vocabulary = entity_types_of(c);
  return c;
}

void write_corpus(const TaggedCorpus& c, const std::string& dir) {
  auto write = [&](const std::vector<Sentence>& split, const char* name) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << serialize_bio(split);
  };
  write(c.train, "train.bio");
  write(c.val, "val.bio");
  write(c.test, "test.bio");
}

}  // namespace adaptune::corpus
