#include "cdfwbpp/chain.hpp"

#include <algorithm>
#include <deque>

#include "cdfwbpp/error.hpp"

namespace cdfwbpp {

const char* to_string(ZeroVerdict::Outcome outcome) {
  switch (outcome) {
    case ZeroVerdict::Outcome::kZero:
      return "ZERO";
    case ZeroVerdict::Outcome::kNonzero:
      return "NONZERO";
    case ZeroVerdict::Outcome::kInconclusive:
      return "INCONCLUSIVE_RESOURCE_LIMIT";
  }
  return "?";
}

namespace {

struct Node {
  Poly poly;
  std::vector<std::size_t> word;
};

}  // namespace

ZeroVerdict saturate(const Poly& start, std::span<const Derivation> ops, std::span<const Rat> point,
                     const ResourceLimits& limits) {
  for (const auto& op : ops) {
    if (!compatible(op.context(), start.context())) {
      throw Error(ErrorKind::kContextMismatch, "derivation and start polynomial live in different contexts");
    }
  }
  ZeroVerdict verdict;
  IncrementalGroebner ideal(start.context(), MonomialOrder::graded_lex(), limits);
  auto finish = [&] {
    verdict.stats.basis_size = ideal.generators().size();
    verdict.stats.max_degree = std::max(verdict.stats.max_degree, ideal.max_degree_seen());
  };
  auto degree_guard = [&](const Poly& p) {
    verdict.stats.max_degree = std::max(verdict.stats.max_degree, p.degree());
    if (p.degree() > limits.max_degree) {
      throw Error(ErrorKind::kResourceLimit, "configuration of degree " + std::to_string(p.degree()) +
                                                 " exceeds the degree cap " +
                                                 std::to_string(limits.max_degree));
    }
  };
  try {
    degree_guard(start);
    Rat v = start.eval(point);
    if (v != 0) {
      verdict.outcome = ZeroVerdict::Outcome::kNonzero;
      verdict.value = v;
      finish();
      return verdict;
    }
    std::deque<Node> frontier;
    if (ideal.add(start)) frontier.push_back({start, {}});
    while (!frontier.empty()) {
      Node node = std::move(frontier.front());
      frontier.pop_front();
      ++verdict.stats.expanded;
      for (std::size_t a = 0; a < ops.size(); ++a) {
        ideal.charge_iteration();
        Poly child = ops[a].apply(node.poly);
        degree_guard(child);
        std::vector<std::size_t> word = node.word;
        word.push_back(a);
        Rat value = child.eval(point);
        if (value != 0) {
          verdict.outcome = ZeroVerdict::Outcome::kNonzero;
          verdict.witness = std::move(word);
          verdict.value = value;
          finish();
          return verdict;
        }
        if (ideal.add(child)) {
          verdict.stats.chain_length = std::max(verdict.stats.chain_length, word.size());
          frontier.push_back({std::move(child), std::move(word)});
        }
      }
    }
    verdict.outcome = ZeroVerdict::Outcome::kZero;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kResourceLimit) throw;
    verdict.outcome = ZeroVerdict::Outcome::kInconclusive;
    verdict.message = e.what();
  }
  finish();
  return verdict;
}

}  // namespace cdfwbpp
