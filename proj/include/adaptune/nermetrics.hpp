#pragma once

#include <map>
#include <string>
#include <vector>

namespace adaptune::ner {

struct EntitySpan {
  std::string entity_type;
  int start = 0;
  int end = 0;  // inclusive

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
  friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

// Maximal spans under the CoNLL-2003 scheme. B-X starts a span, I-X continues
// a span of the same type; a stray I-X (sentence start, after O, or after a
// different type) starts a new span, matching conlleval.
std::vector<EntitySpan> extract_entities(const std::vector<std::string>& tags);

struct Counts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::map<std::string, Counts> class_counts;
  std::map<std::string, Prf> class_scores;
  Counts micro;
  Prf micro_scores;
  // True when neither gold nor prediction contains any entity; the micro
  // scores are reported as 1 in that case.
  bool zero_support = false;
};

// Strict entity-level micro-averaged evaluation: a span counts as correct
// only if type, start and end all match. Throws std::invalid_argument on
// shape mismatch.
EvalReport evaluate(const std::vector<std::vector<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& pred);

}  // namespace adaptune::ner
