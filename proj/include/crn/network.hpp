#ifndef CRN_NETWORK_HPP
#define CRN_NETWORK_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crn/common.hpp"

namespace crn {

struct Species {
  int index;
  std::string name;
};

/// A nonnegative integer combination of species. Stored as (species, count)
/// terms sorted by species index, counts >= 1; the empty complex has no terms.
class Complex {
 public:
  Complex() = default;
  explicit Complex(std::vector<std::pair<int, std::int64_t>> terms);

  std::int64_t count(int species) const;
  const std::vector<std::pair<int, std::int64_t>>& terms() const { return terms_; }
  bool is_empty() const { return terms_.empty(); }
  int max_species_index() const;

  bool operator==(const Complex& o) const { return terms_ == o.terms_; }
  bool operator<(const Complex& o) const { return terms_ < o.terms_; }

  std::string to_string(const std::vector<Species>& species) const;

 private:
  std::vector<std::pair<int, std::int64_t>> terms_;
};

struct Reaction {
  Complex source;
  Complex product;
  double kappa;  // rate constant, > 0
};

/// Immutable reaction network with derived caches: the deduplicated complex
/// list, the complex digraph, and the per-reaction net change vectors.
class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<std::string> species_names, std::vector<Reaction> reactions);

  int num_species() const { return static_cast<int>(species_.size()); }
  int num_reactions() const { return static_cast<int>(reactions_.size()); }
  const std::vector<Species>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(int k) const { return reactions_.at(static_cast<size_t>(k)); }
  std::vector<std::string> species_names() const;
  /// Index of a named species, -1 if absent.
  int species_index(const std::string& name) const;

  /// Deduplicated complexes, in first-appearance order over (source, product).
  const std::vector<Complex>& complexes() const { return complexes_; }
  int complex_index(const Complex& c) const;
  /// (source complex id, product complex id) of reaction k.
  std::pair<int, int> reaction_complexes(int k) const { return reaction_cplx_.at(static_cast<size_t>(k)); }

  /// nu_k' - nu_k as a dense vector.
  const State& net_change(int k) const { return net_change_.at(static_cast<size_t>(k)); }
  /// nu_k as a dense vector.
  const State& source_counts(int k) const { return source_counts_.at(static_cast<size_t>(k)); }

  std::vector<double> kappas() const;

 private:
  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::vector<Complex> complexes_;
  std::vector<std::pair<int, int>> reaction_cplx_;
  std::vector<State> net_change_;
  std::vector<State> source_counts_;
  std::unordered_map<std::string, int> name_index_;
};

struct StructureReport {
  int num_complexes = 0;
  int num_linkage_classes = 0;
  bool weakly_reversible = false;
  int stoich_dimension = 0;
  int deficiency = 0;
  /// Integer basis of { w : w . (nu_k' - nu_k) = 0 for all k }, content 1,
  /// first nonzero entry positive, ordered by free-variable index.
  std::vector<std::vector<std::int64_t>> conservation_basis;
  /// Complex ids per linkage class.
  std::vector<std::vector<int>> linkage_classes;
};

/// Undirected connected components of the complex graph.
std::vector<std::vector<int>> linkage_classes(const ReactionNetwork& net);

/// True iff every linkage class is strongly connected as a digraph.
bool is_weakly_reversible(const ReactionNetwork& net);

/// Full structural report; the rank is computed in exact integer arithmetic.
StructureReport analyze_structure(const ReactionNetwork& net);

}  // namespace crn

#endif
