#include "crowdrank/textscore.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "crowdrank/error.hpp"

namespace crowdrank {

namespace {

std::uint32_t count_term(const Document& doc, const std::string& term) {
    return static_cast<std::uint32_t>(std::count(doc.tokens.begin(), doc.tokens.end(), term));
}

}  // namespace

TermSet term_set(const std::vector<std::string>& tokens) {
    return TermSet(tokens.begin(), tokens.end());
}

double jaccard(const TermSet& a, const TermSet& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    std::size_t united = a.size() + b.size() - common;
    return static_cast<double>(common) / static_cast<double>(united);
}

double bm25_score(const Query& query, const Document& doc, const CollectionStats& stats,
                  const Bm25Config& cfg) {
    const double n = static_cast<double>(stats.num_docs);
    const double dl = static_cast<double>(doc.tokens.size());
    const double avgdl = stats.avg_doc_length > 0.0 ? stats.avg_doc_length : 1.0;
    const double norm = cfg.k1 * (1.0 - cfg.b + cfg.b * dl / avgdl);

    double score = 0.0;
    for (const auto& term : tokenize(query.text)) {
        const double tf = count_term(doc, term);
        if (tf == 0.0) continue;
        const double df = static_cast<double>(stats.df(term));
        const double idf = std::max(0.0, std::log((n - df + 0.5) / (df + 0.5)));
        score += idf * tf * (cfg.k1 + 1.0) / (tf + norm);
    }
    return score;
}

double lm_dirichlet_score(const Query& query, const Document& doc, const CollectionStats& stats,
                          const DirichletConfig& cfg) {
    const double dl = static_cast<double>(doc.tokens.size());
    const double total = static_cast<double>(stats.total_terms);
    double score = 0.0;
    bool any = false;
    for (const auto& term : tokenize(query.text)) {
        const auto cf = stats.cf(term);
        if (cf == 0) continue;
        any = true;
        const double p = static_cast<double>(cf) / total;
        score += std::log((count_term(doc, term) + cfg.mu * p) / (dl + cfg.mu));
    }
    if (!any) throw DegenerateInput("empty scorable query: no query term occurs in the collection");
    return score;
}

double idf_sum(const Query& query, const Document& doc, const CollectionStats& stats) {
    const double n = static_cast<double>(stats.num_docs);
    double sum = 0.0;
    for (const auto& term : tokenize(query.text)) {
        if (count_term(doc, term) == 0) continue;
        const double df = static_cast<double>(stats.df(term));
        sum += std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    }
    return sum;
}

}  // namespace crowdrank
