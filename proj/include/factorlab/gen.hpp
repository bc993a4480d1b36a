#pragma once

// Term corpora. Exhaustive mode enumerates one representative per alpha-class
// (binders are named canonically by nesting depth, so no dedup pass is
// needed) in a fixed order: size ascending, then atoms, abstractions,
// applications (by split), fully applied oplus, choices. Random mode samples
// with std::mt19937_64 (the only PRNG used anywhere); sizes and productions
// are weighted by exact counts, with a bias knob that scales value-shaped
// productions.

#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "engine.hpp"
#include "term.hpp"

namespace factorlab {

struct CorpusSpec {
  std::size_t max_size = 7;
  std::vector<std::string> free_vars = {"x", "y"};
  std::vector<std::string> constants;
  bool oplus_fully_applied = true;  // "oplus" only ever appears as (oplus t) p
  bool allow_choice = false;

  enum class Mode { Exhaustive, Random };
  Mode mode = Mode::Exhaustive;
  std::uint64_t seed = 0;
  std::size_t count = 0;     // random mode: number of samples
  double value_bias = 1.0;   // random mode: weight multiplier for value productions
};

inline nlohmann::json corpus_spec_to_json(const CorpusSpec& s) {
  return {{"max_size", s.max_size},
          {"free_vars", s.free_vars},
          {"constants", s.constants},
          {"oplus_fully_applied", s.oplus_fully_applied},
          {"allow_choice", s.allow_choice},
          {"mode", s.mode == CorpusSpec::Mode::Exhaustive ? "exhaustive" : "random"},
          {"seed", s.seed},
          {"count", s.count},
          {"value_bias", s.value_bias}};
}

inline CorpusSpec corpus_spec_from_json(const nlohmann::json& j) {
  CorpusSpec s;
  s.max_size = j.value("max_size", s.max_size);
  if (j.contains("free_vars")) s.free_vars = j.at("free_vars").get<std::vector<std::string>>();
  if (j.contains("constants")) s.constants = j.at("constants").get<std::vector<std::string>>();
  s.oplus_fully_applied = j.value("oplus_fully_applied", true);
  s.allow_choice = j.value("allow_choice", false);
  std::string mode = j.value("mode", std::string("exhaustive"));
  if (mode == "random")
    s.mode = CorpusSpec::Mode::Random;
  else if (mode == "exhaustive")
    s.mode = CorpusSpec::Mode::Exhaustive;
  else
    throw std::invalid_argument("corpus spec: unknown mode " + mode);
  s.seed = j.value("seed", std::uint64_t{0});
  s.count = j.value("count", std::size_t{0});
  s.value_bias = j.value("value_bias", 1.0);
  return s;
}

namespace detail {

class TermGen {
 public:
  explicit TermGen(const CorpusSpec& spec) : spec_(spec) {
    for (const auto& c : spec.constants) {
      if (c == "oplus" && spec.oplus_fully_applied) continue;
      bare_constants_.push_back(c);
    }
    has_applied_oplus_ =
        spec.oplus_fully_applied &&
        std::find(spec.constants.begin(), spec.constants.end(), "oplus") != spec.constants.end();
  }

  // Canonical binder name for a given nesting depth; skips names already
  // taken by free variables or constants.
  const std::string& binder(std::size_t depth) {
    while (binders_.size() <= depth) {
      std::size_t i = next_binder_ordinal_++;
      std::string name(1, static_cast<char>('a' + i % 26));
      if (i >= 26) name += std::to_string(i / 26);
      if (taken(name)) continue;
      binders_.push_back(std::move(name));
    }
    return binders_[depth];
  }

  const std::vector<Term>& terms(std::size_t n, std::size_t depth) {
    auto key = std::make_pair(n, depth);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Term> out;
    if (n == 1) {
      for (const auto& v : spec_.free_vars) out.push_back(Term::var(v));
      for (std::size_t d = 0; d < depth; ++d) out.push_back(Term::var(binder(d)));
      for (const auto& c : bare_constants_) out.push_back(Term::con(c));
    } else {
      if (n >= 2)
        for (const Term& b : terms(n - 1, depth + 1)) out.push_back(Term::abs(binder(depth), b));
      if (n >= 3)
        for (std::size_t i = 1; i + 1 < n; ++i)
          for (const Term& f : terms(i, depth))
            for (const Term& a : terms(n - 1 - i, depth)) out.push_back(Term::app(f, a));
      if (has_applied_oplus_ && n >= 5)
        for (std::size_t i = 1; i + 3 < n; ++i)
          for (const Term& l : terms(i, depth))
            for (const Term& r : terms(n - 3 - i, depth))
              out.push_back(Term::app(Term::app(Term::con("oplus"), l), r));
      if (spec_.allow_choice && n >= 3)
        for (std::size_t i = 1; i + 1 < n; ++i)
          for (const Term& l : terms(i, depth))
            for (const Term& r : terms(n - 1 - i, depth)) out.push_back(Term::choice(l, r));
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  std::uint64_t count(std::size_t n, std::size_t depth) {
    auto key = std::make_pair(n, depth);
    auto it = counts_.find(key);
    if (it != counts_.end()) return it->second;
    std::uint64_t c = 0;
    if (n == 1) {
      c = spec_.free_vars.size() + depth + bare_constants_.size();
    } else {
      if (n >= 2) c += count(n - 1, depth + 1);
      if (n >= 3)
        for (std::size_t i = 1; i + 1 < n; ++i) c += count(i, depth) * count(n - 1 - i, depth);
      if (has_applied_oplus_ && n >= 5)
        for (std::size_t i = 1; i + 3 < n; ++i) c += count(i, depth) * count(n - 3 - i, depth);
      if (spec_.allow_choice && n >= 3)
        for (std::size_t i = 1; i + 1 < n; ++i) c += count(i, depth) * count(n - 1 - i, depth);
    }
    counts_.emplace(key, c);
    return c;
  }

  // Random term of exactly size n at the given depth. Productions are picked
  // proportionally to their exact counts, value productions (atoms and
  // abstractions) scaled by value_bias.
  Term sample(std::mt19937_64& rng, std::size_t n, std::size_t depth) {
    if (n == 1) {
      std::size_t atoms = spec_.free_vars.size() + depth + bare_constants_.size();
      std::size_t i = rng() % atoms;
      if (i < spec_.free_vars.size()) return Term::var(spec_.free_vars[i]);
      i -= spec_.free_vars.size();
      if (i < depth) return Term::var(binder(i));
      return Term::con(bare_constants_[i - depth]);
    }
    struct Prod {
      double weight;
      int kind;  // 0 abs, 1 app, 2 oplus, 3 choice
      std::size_t split;
    };
    std::vector<Prod> prods;
    if (n >= 2) {
      double w = static_cast<double>(count(n - 1, depth + 1)) * spec_.value_bias;
      if (w > 0) prods.push_back({w, 0, 0});
    }
    auto add_binary = [&](int kind, std::size_t arity_overhead) {
      if (n < 1 + arity_overhead + 2) return;
      for (std::size_t i = 1; i + arity_overhead + 1 < n; ++i) {
        double w = static_cast<double>(count(i, depth)) *
                   static_cast<double>(count(n - 1 - arity_overhead - i, depth));
        if (w > 0) prods.push_back({w, kind, i});
      }
    };
    add_binary(1, 0);
    if (has_applied_oplus_) add_binary(2, 2);
    if (spec_.allow_choice) add_binary(3, 0);
    double total = 0;
    for (const auto& p : prods) total += p.weight;
    if (prods.empty() || total <= 0)
      throw std::invalid_argument("no term of requested size exists for this corpus spec");
    double pick = (static_cast<double>(rng() >> 11) / 9007199254740992.0) * total;  // 53-bit
    const Prod* chosen = &prods.back();
    for (const auto& p : prods) {
      if (pick < p.weight) { chosen = &p; break; }
      pick -= p.weight;
    }
    switch (chosen->kind) {
      case 0: return Term::abs(binder(depth), sample(rng, n - 1, depth + 1));
      case 1:
        return Term::app(sample(rng, chosen->split, depth), sample(rng, n - 1 - chosen->split, depth));
      case 2:
        return Term::app(Term::app(Term::con("oplus"), sample(rng, chosen->split, depth)),
                         sample(rng, n - 3 - chosen->split, depth));
      default:
        return Term::choice(sample(rng, chosen->split, depth),
                            sample(rng, n - 1 - chosen->split, depth));
    }
  }

 private:
  bool taken(const std::string& name) const {
    return std::find(spec_.free_vars.begin(), spec_.free_vars.end(), name) != spec_.free_vars.end() ||
           std::find(spec_.constants.begin(), spec_.constants.end(), name) != spec_.constants.end();
  }

  const CorpusSpec& spec_;
  std::vector<std::string> bare_constants_;
  bool has_applied_oplus_ = false;
  std::vector<std::string> binders_;
  std::size_t next_binder_ordinal_ = 0;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Term>> memo_;
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> counts_;
};

}  // namespace detail

inline std::vector<Term> enumerate_corpus(const CorpusSpec& spec) {
  detail::TermGen gen(spec);
  std::vector<Term> out;
  if (spec.mode == CorpusSpec::Mode::Exhaustive) {
    for (std::size_t n = 1; n <= spec.max_size; ++n) {
      const auto& block = gen.terms(n, 0);
      out.insert(out.end(), block.begin(), block.end());
    }
    return out;
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<double> size_weight(spec.max_size + 1, 0.0);
  double total = 0;
  for (std::size_t n = 1; n <= spec.max_size; ++n) {
    size_weight[n] = static_cast<double>(gen.count(n, 0));
    total += size_weight[n];
  }
  if (total <= 0) throw std::invalid_argument("empty corpus spec");
  for (std::size_t k = 0; k < spec.count; ++k) {
    double pick = (static_cast<double>(rng() >> 11) / 9007199254740992.0) * total;
    std::size_t n = spec.max_size;
    for (std::size_t i = 1; i <= spec.max_size; ++i) {
      if (pick < size_weight[i]) { n = i; break; }
      pick -= size_weight[i];
    }
    out.push_back(gen.sample(rng, n, 0));
  }
  return out;
}

// Per-size alpha-class counts (exhaustive interpretation of the spec).
inline std::vector<std::uint64_t> corpus_counts(const CorpusSpec& spec) {
  detail::TermGen gen(spec);
  std::vector<std::uint64_t> out;
  for (std::size_t n = 1; n <= spec.max_size; ++n) out.push_back(gen.count(n, 0));
  return out;
}

// ---------------------------------------------------------------------------
// Substitution triples: corpus terms x corpus free variables x a small
// deterministic substituend pool. For value calculi the pool is values only
// (substituting a non-value for a variable may destroy redex shapes without
// refuting anything the checks assert).

inline std::vector<Term> substituend_pool(const CorpusSpec& spec, bool values_only) {
  std::vector<Term> pool;
  for (const auto& v : spec.free_vars) pool.push_back(Term::var(v));
  pool.push_back(Term::abs("a", Term::var("a")));  // identity
  if (!spec.free_vars.empty()) {
    const Term x = Term::var(spec.free_vars.front());
    pool.push_back(Term::abs("a", Term::app(Term::var("a"), x)));
    if (!values_only) pool.push_back(Term::app(x, x));
  }
  for (const auto& c : spec.constants) {
    if (c == "oplus" && spec.oplus_fully_applied) continue;
    pool.push_back(Term::con(c));
  }
  return pool;
}

template <typename TermRange>
std::vector<SubstTriple> substitution_triples(const CorpusSpec& spec, const TermRange& corpus,
                                              bool values_only) {
  std::vector<Term> pool = substituend_pool(spec, values_only);
  std::vector<SubstTriple> out;
  for (const Term& r : corpus)
    for (const auto& x : spec.free_vars)
      for (const Term& q : pool) out.push_back(SubstTriple{r, x, q});
  return out;
}

// ---------------------------------------------------------------------------
// Corpus dump/reload: one canonical term per line.

inline std::string dump_corpus(const std::vector<Term>& corpus) {
  std::string out;
  for (const Term& t : corpus) {
    out += to_text(t);
    out += '\n';
  }
  return out;
}

inline std::vector<Term> load_corpus(const std::string& text,
                                     const std::set<std::string>& constants = default_constants()) {
  std::vector<Term> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_term(line, constants));
  }
  return out;
}

}  // namespace factorlab
