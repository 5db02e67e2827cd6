#pragma once

#include <set>
#include <string>
#include <vector>

#include "crowdrank/corpus.hpp"

namespace crowdrank {

using TermSet = std::set<std::string>;

TermSet term_set(const std::vector<std::string>& tokens);

/// |a ∩ b| / |a ∪ b|, defined as 0 when both sets are empty.
double jaccard(const TermSet& a, const TermSet& b);

struct Bm25Config {
    double k1 = 1.2;
    double b = 0.75;
};

struct DirichletConfig {
    double mu = kDefaultDirichletMu;
};

/// Okapi BM25 with the Robertson/Sparck-Jones idf floored at zero.
double bm25_score(const Query& query, const Document& doc, const CollectionStats& stats,
                  const Bm25Config& cfg = {});

/// Dirichlet-smoothed log query likelihood. Query terms absent from the
/// collection are dropped; throws DegenerateInput if none remain.
double lm_dirichlet_score(const Query& query, const Document& doc, const CollectionStats& stats,
                          const DirichletConfig& cfg = {});

/// Sum of ln(1 + (N - df + 0.5) / (df + 0.5)) over query terms present in doc.
double idf_sum(const Query& query, const Document& doc, const CollectionStats& stats);

}  // namespace crowdrank
