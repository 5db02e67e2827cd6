#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace crowdrank {

/// Graded judgments (0 not relevant, 1 relevant, 2 highly relevant).
class Qrels {
public:
    void set(const std::string& query_id, const std::string& doc_id, int grade);
    int grade(const std::string& query_id, const std::string& doc_id) const;
    bool relevant(const std::string& query_id, const std::string& doc_id) const {
        return grade(query_id, doc_id) >= 1;
    }
    /// Number of judged-relevant documents for the query.
    std::size_t num_relevant(const std::string& query_id) const;
    std::vector<std::string> query_ids() const;
    const std::map<std::string, std::map<std::string, int>>& judgments() const { return judgments_; }

private:
    std::map<std::string, std::map<std::string, int>> judgments_;
};

/// `query_id 0 doc_id grade` per line.
Qrels parse_qrels(std::istream& in, const std::string& source = "<qrels>");
Qrels read_qrels(const std::filesystem::path& path);
void write_qrels(std::ostream& out, const Qrels& qrels);

inline constexpr std::size_t kMapDepth = 1000;

/// Non-interpolated AP of the first kMapDepth entries. Throws DegenerateInput
/// when the query has no relevant documents.
double average_precision(std::span<const std::string> ranking, const Qrels& qrels,
                         const std::string& query_id);

/// Relevant documents in the top k divided by k.
double precision_at_k(std::span<const std::string> ranking, const Qrels& qrels,
                      const std::string& query_id, std::size_t k = 30);

struct RankedDoc {
    std::string doc_id;
    double score = 0.0;

    friend bool operator==(const RankedDoc&, const RankedDoc&) = default;
};

/// query_id -> list in rank order.
using Run = std::map<std::string, std::vector<RankedDoc>>;

/// Sorts every list by (score desc, doc_id desc).
void sort_run(Run& run);

struct RunMetrics {
    std::map<std::string, double> ap;   ///< per query with >= 1 relevant judgment
    std::map<std::string, double> p30;
    double map = 0.0;
    double mean_p30 = 0.0;
};

/// Metrics over the run's queries that have relevant documents in `qrels`.
RunMetrics evaluate_run(const Run& run, const Qrels& qrels);

/// `query_id Q0 doc_id rank score tag`.
void write_run(std::ostream& out, const Run& run, const std::string& tag);

struct ParsedRun {
    Run run;
    std::string tag;
};

/// Strict: ranks must start at 1, be contiguous, and agree with
/// (score desc, doc_id desc); doc ids unique per query; single tag.
ParsedRun parse_run(std::istream& in, const std::string& source = "<run>");
ParsedRun read_run(const std::filesystem::path& path);

struct TTestReport {
    std::size_t n = 0;
    double mean_diff = 0.0;
    double variance = 0.0;  ///< unbiased
    double t_stat = 0.0;
    double df = 0.0;
    double p_two_sided = 1.0;
    double effect_size = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Paired two-sided t-test on a - b. Throws InvalidArgument on size
/// mismatch or n < 2 and DegenerateInput when the differences have zero
/// variance.
TTestReport paired_t_test(std::span<const double> a, std::span<const double> b);

/// Same arithmetic from summary statistics.
TTestReport t_test_from_summary(std::size_t n, double mean_diff, double variance);

/// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of Student's t with df degrees of freedom.
double student_t_cdf(double t, double df);

/// Inverse of student_t_cdf.
double student_t_quantile(double p, double df);

}  // namespace crowdrank
