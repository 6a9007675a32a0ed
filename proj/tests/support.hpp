#pragma once

#include "tvar/formula.hpp"
#include "tvar/statespace.hpp"
#include "tvar/sysir.hpp"

#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tvar::test {

std::shared_ptr<const SystemIR> landing_gear();
std::shared_ptr<const SystemIR> load_corpus(const std::string &file);

struct CorpusEntry {
  std::string file;
  std::vector<std::string> properties;
};
const std::vector<CorpusEntry> &corpus();

/// Random `.msys` text with at most `max_state_bits` state bits and
/// `max_input_bits` input bits.
std::string random_system_text(std::mt19937_64 &rng, unsigned max_state_bits = 8,
                               unsigned max_input_bits = 4);

/// Random CTL formula over `atoms` of nesting depth at most `max_depth`.
FormulaPtr random_formula(std::mt19937_64 &rng, const std::vector<std::string> &atoms,
                          unsigned max_depth = 4);

std::vector<std::string> label_names(const SystemIR &ir);

std::set<std::string> state_strings(const PKS &pks);
std::set<std::pair<std::string, std::string>> edge_strings(const PKS &pks);

/// Joins the abstraction of a set of concrete values of the given width.
TBitVec abstraction_of(const std::vector<std::uint64_t> &values, unsigned width);

/// Every abstract vector of the given width.
std::vector<TBitVec> all_vectors(unsigned width);

} // namespace tvar::test
