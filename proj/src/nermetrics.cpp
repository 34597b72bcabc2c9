#include "adaptune/nermetrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string_view>

namespace adaptune::ner {

namespace {

struct TagView {
  char kind = 'O';  // 'O', 'B' or 'I'
  std::string_view type;
};

TagView parse_tag(const std::string& tag) {
  if (tag == "O") return {};
  if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-') {
    throw std::invalid_argument("malformed BIO tag '" + tag + "'");
  }
  return {tag[0], std::string_view(tag).substr(2)};
}

}  // namespace

std::vector<EntitySpan> extract_entities(const std::vector<std::string>& tags) {
  std::vector<EntitySpan> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const TagView t = parse_tag(tags[i]);
    if (t.kind == 'O') continue;
    const bool continues = t.kind == 'I' && !spans.empty() &&
                           spans.back().end == static_cast<int>(i) - 1 &&
                           spans.back().entity_type == t.type;
    if (continues) {
      spans.back().end = static_cast<int>(i);
    } else {
      spans.push_back({std::string(t.type), static_cast<int>(i),
                       static_cast<int>(i)});
    }
  }
  return spans;
}

EvalReport evaluate(const std::vector<std::vector<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& pred) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("gold/pred sentence counts differ");
  }
  EvalReport report;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size()) {
      throw std::invalid_argument("gold/pred lengths differ in sentence " +
                                  std::to_string(s));
    }
    std::vector<EntitySpan> g = extract_entities(gold[s]);
    std::vector<EntitySpan> p = extract_entities(pred[s]);
    std::sort(g.begin(), g.end());
    std::sort(p.begin(), p.end());
    for (const EntitySpan& span : g) {
      Counts& c = report.class_counts[span.entity_type];
      if (std::binary_search(p.begin(), p.end(), span)) {
        c.tp += 1;
      } else {
        c.fn += 1;
      }
    }
    for (const EntitySpan& span : p) {
      if (!std::binary_search(g.begin(), g.end(), span)) {
        report.class_counts[span.entity_type].fp += 1;
      }
    }
  }

  auto prf = [](const Counts& c) {
    Prf out;
    if (c.tp + c.fp > 0) out.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) out.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (out.precision + out.recall > 0.0) {
      out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    }
    return out;
  };

  for (const auto& [type, counts] : report.class_counts) {
    report.micro.tp += counts.tp;
    report.micro.fp += counts.fp;
    report.micro.fn += counts.fn;
    report.class_scores[type] = prf(counts);
  }

  if (report.micro.tp + report.micro.fp + report.micro.fn == 0) {
    report.zero_support = true;
    report.micro_scores = {1.0, 1.0, 1.0};
  } else {
    report.micro_scores = prf(report.micro);
  }
  return report;
}

}  // namespace adaptune::ner
