#include "crowdrank/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "crowdrank/corpus.hpp"
#include "crowdrank/error.hpp"
#include "crowdrank/fileio.hpp"

namespace crowdrank {

// ---------------------------------------------------------------------------
// Qrels

void Qrels::set(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 0 || grade > 2) throw InvalidArgument("relevance grade must be 0, 1 or 2");
    judgments_[query_id][doc_id] = grade;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = judgments_.find(query_id);
    if (q == judgments_.end()) return 0;
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
}

std::size_t Qrels::num_relevant(const std::string& query_id) const {
    auto q = judgments_.find(query_id);
    if (q == judgments_.end()) return 0;
    return static_cast<std::size_t>(std::count_if(q->second.begin(), q->second.end(),
                                                  [](const auto& kv) { return kv.second >= 1; }));
}

std::vector<std::string> Qrels::query_ids() const {
    std::vector<std::string> ids;
    for (const auto& [q, _] : judgments_) ids.push_back(q);
    return ids;
}

Qrels parse_qrels(std::istream& in, const std::string& source) {
    Qrels qrels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto f = split_whitespace(line);
        if (f.empty()) continue;
        if (f.size() != 4) throw ParseError(source, lineno, "expected 'query_id 0 doc_id grade'");
        try {
            qrels.set(std::string(f[0]), std::string(f[2]), static_cast<int>(parse_int(f[3])));
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    return qrels;
}

Qrels read_qrels(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_qrels(in, path.string());
}

void write_qrels(std::ostream& out, const Qrels& qrels) {
    for (const auto& [q, docs] : qrels.judgments()) {
        for (const auto& [d, g] : docs) out << q << " 0 " << d << ' ' << g << '\n';
    }
}

// ---------------------------------------------------------------------------
// Metrics

double average_precision(std::span<const std::string> ranking, const Qrels& qrels,
                         const std::string& query_id) {
    const std::size_t total_relevant = qrels.num_relevant(query_id);
    if (total_relevant == 0) throw DegenerateInput("query " + query_id + " has no relevant documents");
    const std::size_t depth = std::min(ranking.size(), kMapDepth);
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < depth; ++k) {
        if (qrels.relevant(query_id, ranking[k])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

double precision_at_k(std::span<const std::string> ranking, const Qrels& qrels,
                      const std::string& query_id, std::size_t k) {
    if (k == 0) throw InvalidArgument("precision cutoff must be >= 1");
    const std::size_t depth = std::min(ranking.size(), k);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < depth; ++i) hits += qrels.relevant(query_id, ranking[i]) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(k);
}

void sort_run(Run& run) {
    for (auto& [_, docs] : run) {
        std::sort(docs.begin(), docs.end(), [](const RankedDoc& a, const RankedDoc& b) {
            return ranks_before(a.score, a.doc_id, b.score, b.doc_id);
        });
    }
}

RunMetrics evaluate_run(const Run& run, const Qrels& qrels) {
    RunMetrics m;
    for (const auto& [qid, docs] : run) {
        if (qrels.num_relevant(qid) == 0) continue;
        std::vector<std::string> ids;
        for (const auto& d : docs) ids.push_back(d.doc_id);
        m.ap[qid] = average_precision(ids, qrels, qid);
        m.p30[qid] = precision_at_k(ids, qrels, qid, 30);
    }
    if (!m.ap.empty()) {
        for (const auto& [_, v] : m.ap) m.map += v;
        for (const auto& [_, v] : m.p30) m.mean_p30 += v;
        m.map /= static_cast<double>(m.ap.size());
        m.mean_p30 /= static_cast<double>(m.p30.size());
    }
    return m;
}

// ---------------------------------------------------------------------------
// Run files

void write_run(std::ostream& out, const Run& run, const std::string& tag) {
    if (tag.empty() || tag.find_first_of(" \t\n") != std::string::npos) {
        throw InvalidArgument("run tag must be a single non-empty word");
    }
    for (const auto& [qid, docs] : run) {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            if (i > 0 && !ranks_before(docs[i - 1].score, docs[i - 1].doc_id, docs[i].score, docs[i].doc_id)) {
                throw InvalidArgument("run for query " + qid + " is not in (score desc, doc_id desc) order");
            }
            out << qid << " Q0 " << docs[i].doc_id << ' ' << (i + 1) << ' ' << format_double(docs[i].score)
                << ' ' << tag << '\n';
        }
    }
}

ParsedRun parse_run(std::istream& in, const std::string& source) {
    ParsedRun parsed;
    std::map<std::string, std::set<std::string>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto f = split_whitespace(line);
        if (f.empty()) continue;
        if (f.size() != 6) throw ParseError(source, lineno, "expected 'query_id Q0 doc_id rank score tag'");
        if (f[1] != "Q0") throw ParseError(source, lineno, "second field must be Q0");
        std::string qid(f[0]);
        RankedDoc doc{std::string(f[2]), 0.0};
        long long rank = 0;
        try {
            rank = parse_int(f[3]);
            doc.score = parse_double(f[4]);
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
        if (parsed.tag.empty()) {
            parsed.tag = std::string(f[5]);
        } else if (parsed.tag != f[5]) {
            throw ParseError(source, lineno, "mixed run tags");
        }
        auto& docs = parsed.run[qid];
        if (rank != static_cast<long long>(docs.size()) + 1) {
            throw ParseError(source, lineno, "rank " + std::to_string(rank) + " out of sequence for query " + qid);
        }
        if (!docs.empty() && !ranks_before(docs.back().score, docs.back().doc_id, doc.score, doc.doc_id)) {
            throw ParseError(source, lineno, "rank inconsistent with score order");
        }
        if (!seen[qid].insert(doc.doc_id).second) {
            throw ParseError(source, lineno, "duplicate document " + doc.doc_id);
        }
        docs.push_back(std::move(doc));
    }
    return parsed;
}

ParsedRun read_run(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_run(in, path.string());
}

// ---------------------------------------------------------------------------
// Student t

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // Use the symmetry relation where the continued fraction converges fastest.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw InvalidArgument("degrees of freedom must be positive");
    const double x = df / (df + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile probability must be in (0,1)");
    double lo = -1.0;
    double hi = 1.0;
    while (student_t_cdf(lo, df) > p) lo *= 2.0;
    while (student_t_cdf(hi, df) < p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (student_t_cdf(mid, df) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TTestReport t_test_from_summary(std::size_t n, double mean_diff, double variance) {
    if (n < 2) throw InvalidArgument("paired t-test needs at least two pairs");
    if (!(variance > 0.0)) throw DegenerateInput("no difference: paired differences have zero variance");
    TTestReport r;
    r.n = n;
    r.mean_diff = mean_diff;
    r.variance = variance;
    r.df = static_cast<double>(n - 1);
    const double se = std::sqrt(variance / static_cast<double>(n));
    r.t_stat = mean_diff / se;
    r.p_two_sided = regularized_incomplete_beta(r.df / 2.0, 0.5, r.df / (r.df + r.t_stat * r.t_stat));
    r.effect_size = mean_diff / std::sqrt(variance);
    const double crit = student_t_quantile(0.975, r.df);
    r.ci_low = mean_diff - crit * se;
    r.ci_high = mean_diff + crit * se;
    return r;
}

TTestReport paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("paired t-test needs equally sized samples");
    const std::size_t n = a.size();
    if (n < 2) throw InvalidArgument("paired t-test needs at least two pairs");
    double mean = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean += a[i] - b[i];
        scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean;
        ss += d * d;
    }
    const double variance = ss / static_cast<double>(n - 1);
    // Differences that agree up to rounding count as constant.
    const double floor = 1e-12 * scale;
    if (variance <= floor * floor) throw DegenerateInput("no difference: paired differences have zero variance");
    return t_test_from_summary(n, mean, variance);
}

}  // namespace crowdrank
