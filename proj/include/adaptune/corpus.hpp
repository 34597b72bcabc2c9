#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace adaptune::corpus {

struct Sentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;  // BIO: "O", "B-<TYPE>", "I-<TYPE>"
};

struct TaggedCorpus {
  std::vector<Sentence> train;
  std::vector<Sentence> val;
  std::vector<Sentence> test;
  std::vector<std::string> tag_vocabulary;  // entity types, sorted
  std::string source_id;
};

// Train/val subsampling factors; the test split always stays at full size.
struct ScalingSpec {
  double x_train = 1.0;
  double x_val = 1.0;
  double x_test = 1.0;
};

// CoNLL-style column format: token per line, tag in the last whitespace
// separated column (extra middle columns ignored), blank line between
// sentences. -DOCSTART- blocks are skipped. Malformed tags throw
// std::runtime_error with the line number.
std::vector<Sentence> parse_bio(std::istream& in);
std::vector<Sentence> parse_bio_string(const std::string& text);
std::string serialize_bio(const std::vector<Sentence>& sentences);

// Entity types appearing in any split, sorted.
std::vector<std::string> entity_types_of(const TaggedCorpus& c);

// Uniform sampling without replacement of ceil(x*N) sentences, keeping the
// original order. The permutation depends on (seed, source_id, split) but not
// on x, so subsets are nested across scaling factors.
TaggedCorpus scale(const TaggedCorpus& c, const ScalingSpec& spec,
                   std::uint64_t seed);

// train <- train + val, val emptied, test untouched.
TaggedCorpus merge_train_val(const TaggedCorpus& c);

struct SyntheticSpec {
  int num_sentences = 3000;  // total over all three splits
  std::vector<std::string> entity_types = {"LOC", "ORG", "PER"};
  double noise_rate = 0.0;  // fraction of train/val mentions relabelled as O
  std::uint64_t seed = 42;
  double train_ratio = 0.7;
  double val_ratio = 0.15;
  int filler_vocab = 60;
  int tokens_per_type = 12;
  int min_sentence_len = 5;
  int max_sentence_len = 14;
};

// Entity mentions (1-2 tokens) are drawn from disjoint per-type token pools
// and never adjoin, so tags are a deterministic function of the +-1 token
// context; label noise is applied to train/val only, the test split stays
// clean.
TaggedCorpus generate_synthetic(const SyntheticSpec& spec);

TaggedCorpus load_corpus(const std::string& train_path,
                         const std::string& val_path,
                         const std::string& test_path,
                         const std::string& source_id);

// Writes train.bio / val.bio / test.bio into an existing directory.
void write_corpus(const TaggedCorpus& c, const std::string& dir);

}  // namespace adaptune::corpus
