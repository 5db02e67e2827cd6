#include "crowdrank/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "crowdrank/error.hpp"
#include "crowdrank/fileio.hpp"

namespace crowdrank {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// Raw-text RT-style retweet marker: "RT" as the first token, any case.
bool starts_with_rt(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i + 2 > text.size()) return false;
    if (lower(text[i]) != 'r' || lower(text[i + 1]) != 't') return false;
    return i + 2 == text.size() || !is_alnum(text[i + 2]);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (is_alnum(c)) {
            current.push_back(lower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Document make_document(std::string doc_id, Timestamp timestamp, std::string text,
                       std::uint64_t num_statuses, std::uint64_t num_followers, bool is_retweet,
                       std::string language) {
    Document doc;
    doc.doc_id = std::move(doc_id);
    doc.timestamp = timestamp;
    doc.text = std::move(text);
    doc.num_statuses = num_statuses;
    doc.num_followers = num_followers;
    doc.is_retweet = is_retweet;
    doc.language = std::move(language);
    doc.tokens = tokenize(doc.text);
    return doc;
}

bool admit_document(const Document& doc) {
    if (doc.is_retweet) return false;
    if (starts_with_rt(doc.text)) return false;
    return doc.language == "en";
}

std::uint64_t CollectionStats::df(const std::string& term) const {
    auto it = doc_freq.find(term);
    return it == doc_freq.end() ? 0 : it->second;
}

std::uint64_t CollectionStats::cf(const std::string& term) const {
    auto it = collection_freq.find(term);
    return it == collection_freq.end() ? 0 : it->second;
}

std::span<const Posting> InvertedIndex::postings(const std::string& term) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return {};
    return it->second;
}

std::vector<std::string> InvertedIndex::vocabulary() const {
    std::vector<std::string> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, _] : postings_) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    return terms;
}

const Document* InvertedIndex::find(const std::string& doc_id) const {
    auto it = by_id_.find(doc_id);
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

InvertedIndex build_index(std::vector<Document> docs) {
    InvertedIndex index;
    index.docs_ = std::move(docs);
    auto& stats = index.stats_;
    stats.num_docs = index.docs_.size();

    std::uint64_t total_len = 0;
    for (std::size_t i = 0; i < index.docs_.size(); ++i) {
        const Document& doc = index.docs_[i];
        if (!index.by_id_.emplace(doc.doc_id, i).second) {
            throw InvalidArgument("duplicate doc_id: " + doc.doc_id);
        }
        stats.latest_timestamp = std::max(stats.latest_timestamp, doc.timestamp);
        total_len += doc.tokens.size();

        std::map<std::string_view, std::uint32_t> tf;
        for (const auto& tok : doc.tokens) ++tf[tok];
        for (const auto& [term, count] : tf) {
            std::string key(term);
            index.postings_[key].push_back({static_cast<std::uint32_t>(i), count});
            ++stats.doc_freq[key];
            stats.collection_freq[key] += count;
        }
    }
    stats.total_terms = total_len;
    stats.avg_doc_length =
        stats.num_docs == 0 ? 0.0 : static_cast<double>(total_len) / static_cast<double>(stats.num_docs);
    return index;
}

std::vector<Candidate> retrieve_candidates(const Query& query, const InvertedIndex& index,
                                           std::size_t k, double mu) {
    if (k == 0) throw InvalidArgument("candidate depth k must be >= 1");
    std::vector<Candidate> out;
    if (index.empty()) return out;

    const auto& stats = index.stats();
    const auto& docs = index.documents();

    // Unseen terms are dropped; a repeated query term counts once per occurrence.
    std::vector<std::pair<std::string, double>> terms;  // (term, log mu*p(t|C))
    for (auto& term : tokenize(query.text)) {
        auto cf = stats.cf(term);
        if (cf == 0) continue;
        double p = static_cast<double>(cf) / static_cast<double>(stats.total_terms);
        terms.emplace_back(std::move(term), mu * p);
    }
    if (terms.empty()) return out;

    // Accumulate tf for matched docs only, then score with full smoothing.
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> matched;
    for (std::size_t qi = 0; qi < terms.size(); ++qi) {
        for (const Posting& p : index.postings(terms[qi].first)) {
            if (docs[p.doc].timestamp > query.query_time) continue;
            auto& tfs = matched[p.doc];
            if (tfs.empty()) tfs.assign(terms.size(), 0);
            tfs[qi] = p.tf;
        }
    }

    out.reserve(matched.size());
    for (const auto& [doc_idx, tfs] : matched) {
        const Document& doc = docs[doc_idx];
        double dl = static_cast<double>(doc.tokens.size());
        double score = 0.0;
        for (std::size_t qi = 0; qi < terms.size(); ++qi) {
            score += std::log((tfs[qi] + terms[qi].second) / (dl + mu));
        }
        out.push_back({&doc, score});
    }

    auto cmp = [](const Candidate& a, const Candidate& b) {
        return ranks_before(a.ql_log_score, a.doc->doc_id, b.ql_log_score, b.doc->doc_id);
    };
    if (out.size() > k) {
        std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), cmp);
        out.resize(k);
    } else {
        std::sort(out.begin(), out.end(), cmp);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpus and query files

std::vector<Document> parse_corpus(std::istream& in, const std::string& source) {
    std::vector<Document> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            Document doc = make_document(
                j.at("doc_id").get<std::string>(), j.at("timestamp").get<Timestamp>(),
                j.at("text").get<std::string>(), j.value("num_statuses", std::uint64_t{0}),
                j.value("num_followers", std::uint64_t{0}), j.value("is_retweet", false),
                j.value("language", std::string("en")));
            if (doc.doc_id.empty()) throw InvalidArgument("empty doc_id");
            if (doc.timestamp <= 0) throw InvalidArgument("timestamp must be positive");
            docs.push_back(std::move(doc));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(source, lineno, e.what());
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    return docs;
}

std::vector<Document> read_corpus(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_corpus(in, path.string());
}

void write_corpus(std::ostream& out, std::span<const Document> docs) {
    for (const auto& doc : docs) {
        nlohmann::ordered_json j;
        j["doc_id"] = doc.doc_id;
        j["timestamp"] = doc.timestamp;
        j["text"] = doc.text;
        j["num_statuses"] = doc.num_statuses;
        j["num_followers"] = doc.num_followers;
        j["is_retweet"] = doc.is_retweet;
        j["language"] = doc.language;
        out << j.dump() << '\n';
    }
}

std::vector<Query> parse_queries(std::istream& in, const std::string& source) {
    std::vector<Query> queries;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto fields = split(t, '\t');
        if (fields.size() != 3) throw ParseError(source, lineno, "expected query_id<TAB>query_time<TAB>text");
        Query q;
        q.query_id = std::string(trim(fields[0]));
        try {
            q.query_time = parse_int(fields[1]);
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
        q.text = std::string(trim(fields[2]));
        if (q.query_id.empty()) throw ParseError(source, lineno, "empty query_id");
        if (q.query_time <= 0) throw ParseError(source, lineno, "query_time must be positive");
        if (tokenize(q.text).empty()) throw ParseError(source, lineno, "query text has no terms");
        if (!seen.insert(q.query_id).second) throw ParseError(source, lineno, "duplicate query_id " + q.query_id);
        queries.push_back(std::move(q));
    }
    return queries;
}

std::vector<Query> read_queries(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_queries(in, path.string());
}

void write_queries(std::ostream& out, std::span<const Query> queries) {
    for (const auto& q : queries) out << q.query_id << '\t' << q.query_time << '\t' << q.text << '\n';
}

// ---------------------------------------------------------------------------
// Index dump

void write_index(std::ostream& out, const InvertedIndex& index) {
    const auto& s = index.stats();
    out << "num_docs " << s.num_docs << '\n';
    out << "avg_doc_length " << format_double(s.avg_doc_length) << '\n';
    out << "total_terms " << s.total_terms << '\n';
    out << "latest_timestamp " << s.latest_timestamp << '\n';
    const auto& docs = index.documents();
    for (const auto& term : index.vocabulary()) {
        out << "term " << term << ' ' << s.df(term) << ' ' << s.cf(term);
        for (const Posting& p : index.postings(term)) out << ' ' << docs[p.doc].doc_id << ':' << p.tf;
        out << '\n';
    }
}

IndexSummary parse_index(std::istream& in, const std::string& source) {
    IndexSummary summary;
    auto& s = summary.stats;
    std::string line;
    std::size_t lineno = 0;
    try {
        while (std::getline(in, line)) {
            ++lineno;
            auto f = split_whitespace(line);
            if (f.empty()) continue;
            if (f[0] == "term") {
                if (f.size() < 4) throw InvalidArgument("short term line");
                std::string term(f[1]);
                s.doc_freq[term] = static_cast<std::uint64_t>(parse_int(f[2]));
                s.collection_freq[term] = static_cast<std::uint64_t>(parse_int(f[3]));
                auto& list = summary.postings[term];
                for (std::size_t i = 4; i < f.size(); ++i) {
                    auto colon = f[i].rfind(':');
                    if (colon == std::string_view::npos) throw InvalidArgument("bad posting");
                    list.emplace_back(std::string(f[i].substr(0, colon)),
                                      static_cast<std::uint32_t>(parse_int(f[i].substr(colon + 1))));
                }
            } else if (f.size() == 2 && f[0] == "num_docs") {
                s.num_docs = static_cast<std::size_t>(parse_int(f[1]));
            } else if (f.size() == 2 && f[0] == "avg_doc_length") {
                s.avg_doc_length = parse_double(f[1]);
            } else if (f.size() == 2 && f[0] == "total_terms") {
                s.total_terms = static_cast<std::uint64_t>(parse_int(f[1]));
            } else if (f.size() == 2 && f[0] == "latest_timestamp") {
                s.latest_timestamp = parse_int(f[1]);
            } else {
                throw InvalidArgument("unknown record '" + std::string(f[0]) + "'");
            }
        }
    } catch (const InvalidArgument& e) {
        throw ParseError(source, lineno, e.what());
    }
    return summary;
}

}  // namespace crowdrank
