#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "adaptune/corpus.hpp"

using namespace adaptune;

namespace {

corpus::TaggedCorpus tiny_corpus(int n_train, int n_val, int n_test) {
  corpus::TaggedCorpus c;
  c.source_id = "tiny";
  auto fill = [](std::vector<corpus::Sentence>& split, int n, const char* prefix) {
    for (int i = 0; i < n; ++i) {
      corpus::Sentence s;
      s.tokens = {prefix + std::to_string(i), "x"};
      s.tags = {"B-PER", "O"};
      split.push_back(std::move(s));
    }
  };
  fill(c.train, n_train, "t");
  fill(c.val, n_val, "v");
  fill(c.test, n_test, "s");
  c.tag_vocabulary = {"PER"};
  return c;
}

std::set<std::string> first_tokens(const std::vector<corpus::Sentence>& split) {
  std::set<std::string> out;
  for (const auto& s : split) out.insert(s.tokens.front());
  return out;
}

}  // namespace

TEST_CASE("parse_bio reads token-tag columns") {
  const auto sentences = corpus::parse_bio_string("EU\tB-ORG\n\n");
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0].tokens == std::vector<std::string>{"EU"});
  CHECK(sentences[0].tags == std::vector<std::string>{"B-ORG"});

  CHECK(corpus::parse_bio_string("").empty());
  CHECK(corpus::parse_bio_string("\n\n\n").empty());
}

TEST_CASE("parser accepts stray I- tags and extra columns") {
  const auto sentences =
      corpus::parse_bio_string("West I-PER\nGermany NNP I-LOC\n");
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0].tags == std::vector<std::string>{"I-PER", "I-LOC"});
}

TEST_CASE("parser skips -DOCSTART- blocks and reports bad tags") {
  const auto sentences =
      corpus::parse_bio_string("-DOCSTART- -X- -X- O\n\nEU B-ORG\n");
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0].tokens.front() == "EU");

  try {
    corpus::parse_bio_string("EU Q-ORG\n");
    FAIL("malformed tag was accepted");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  CHECK_THROWS_AS(static_cast<void>(corpus::parse_bio_string("orphan\n")),
                  std::runtime_error);
}

TEST_CASE("serialize and parse round trip") {
  const std::string text = "EU\tB-ORG\nrejects\tO\n\nGerman\tB-MISC\n\n";
  const auto sentences = corpus::parse_bio_string(text);
  CHECK(corpus::serialize_bio(sentences) == text);
  // non-canonical whitespace normalizes to the two-column form
  const auto multi = corpus::parse_bio_string("EU NNP I-NP B-ORG\n");
  CHECK(corpus::serialize_bio(multi) == "EU\tB-ORG\n\n");
}

TEST_CASE("scale keeps ceil(x*n) sentences in original order") {
  const auto base = tiny_corpus(1000, 40, 30);
  corpus::ScalingSpec spec;
  spec.x_train = 0.005;
  spec.x_val = 0.5;
  const auto scaled = corpus::scale(base, spec, 7);
  CHECK(scaled.train.size() == 5);  // ceil(0.005 * 1000)
  CHECK(scaled.val.size() == 20);
  CHECK(scaled.test.size() == 30);

  // original order is preserved
  std::vector<int> indices;
  for (const auto& s : scaled.train) {
    indices.push_back(std::stoi(s.tokens.front().substr(1)));
  }
  CHECK(std::is_sorted(indices.begin(), indices.end()));
}

TEST_CASE("scale with x=1 is the identity") {
  const auto base = tiny_corpus(10, 5, 5);
  const auto scaled = corpus::scale(base, corpus::ScalingSpec{}, 999);
  CHECK(first_tokens(scaled.train) == first_tokens(base.train));
  CHECK(first_tokens(scaled.val) == first_tokens(base.val));
  CHECK(scaled.test.size() == base.test.size());
}

TEST_CASE("scaling is deterministic and nested across x") {
  const auto base = tiny_corpus(200, 50, 10);
  corpus::ScalingSpec small;
  small.x_train = 0.1;
  corpus::ScalingSpec large;
  large.x_train = 0.4;

  const auto a = corpus::scale(base, small, 42);
  const auto b = corpus::scale(base, small, 42);
  CHECK(first_tokens(a.train) == first_tokens(b.train));

  const auto big = corpus::scale(base, large, 42);
  const auto small_set = first_tokens(a.train);
  const auto big_set = first_tokens(big.train);
  CHECK(std::includes(big_set.begin(), big_set.end(), small_set.begin(),
                      small_set.end()));

  const auto other_seed = corpus::scale(base, small, 43);
  CHECK(first_tokens(other_seed.train) != first_tokens(a.train));

  corpus::ScalingSpec bad;
  bad.x_train = 0.0;
  CHECK_THROWS_AS(corpus::scale(base, bad, 1), std::invalid_argument);
  corpus::ScalingSpec bad_test;
  bad_test.x_test = 0.5;
  CHECK_THROWS_AS(corpus::scale(base, bad_test, 1), std::invalid_argument);
}

TEST_CASE("merge_train_val concatenates and empties the validation split") {
  const auto base = tiny_corpus(10, 3, 4);
  const auto merged = corpus::merge_train_val(base);
  CHECK(merged.train.size() == 13);
  CHECK(merged.val.empty());
  CHECK(merged.test.size() == 4);
  const auto twice = corpus::merge_train_val(merged);
  CHECK(twice.train.size() == 13);
}

TEST_CASE("synthetic corpora are deterministic and well formed") {
  corpus::SyntheticSpec spec;
  spec.num_sentences = 200;
  spec.entity_types = {"PER"};
  spec.noise_rate = 0.0;
  spec.seed = 5;
  const auto a = corpus::generate_synthetic(spec);
  const auto b = corpus::generate_synthetic(spec);
  CHECK(a.tag_vocabulary == std::vector<std::string>{"PER"});
  CHECK(a.train.size() == 140);
  CHECK(a.val.size() == 30);
  CHECK(a.test.size() == 30);
  CHECK(corpus::serialize_bio(a.train) == corpus::serialize_bio(b.train));

  // tags are a deterministic function of the +-1 context: entity-pool tokens
  // carry their type, the first token of a mention is B, later ones I
  for (const auto* split : {&a.train, &a.val, &a.test}) {
    for (const auto& s : *split) {
      REQUIRE(s.tokens.size() == s.tags.size());
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        const bool pool_token = s.tokens[i].rfind("per_", 0) == 0;
        const bool prev_pool = i > 0 && s.tokens[i - 1].rfind("per_", 0) == 0;
        if (!pool_token) {
          CHECK(s.tags[i] == "O");
        } else {
          CHECK(s.tags[i] == (prev_pool ? "I-PER" : "B-PER"));
        }
      }
    }
  }

  corpus::SyntheticSpec bad = spec;
  bad.noise_rate = 1.0;
  CHECK_THROWS_AS(corpus::generate_synthetic(bad), std::invalid_argument);
  bad = spec;
  bad.num_sentences = 2;
  CHECK_THROWS_AS(corpus::generate_synthetic(bad), std::invalid_argument);
}

TEST_CASE("label noise hits train and val but never the test split") {
  corpus::SyntheticSpec spec;
  spec.num_sentences = 600;
  spec.entity_types = {"PER", "LOC"};
  spec.noise_rate = 0.3;
  spec.seed = 9;
  const auto noisy = corpus::generate_synthetic(spec);

  auto mislabeled_mentions = [](const std::vector<corpus::Sentence>& split) {
    int count = 0;
    for (const auto& s : split) {
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        const bool pool_token = s.tokens[i].find('_') != std::string::npos;
        if (pool_token && s.tags[i] == "O") ++count;
      }
    }
    return count;
  };
  CHECK(mislabeled_mentions(noisy.train) > 0);
  CHECK(mislabeled_mentions(noisy.test) == 0);
}
