#pragma once

// Bibliographic input: tagged plain-text exports (two-letter tags at column
// 0, values from column 3, continuation lines indented by three spaces, ER
// closing a record, EF closing the file) and tab-separated pair files.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "citnet/error.hpp"
#include "citnet/model.hpp"

namespace citnet {

namespace tag {
inline constexpr std::string_view authors = "AU";
inline constexpr std::string_view title = "TI";
inline constexpr std::string_view source = "SO";
inline constexpr std::string_view year = "PY";
inline constexpr std::string_view volume = "VL";
inline constexpr std::string_view begin_page = "BP";
inline constexpr std::string_view doi = "DI";
inline constexpr std::string_view cited_references = "CR";
inline constexpr std::string_view times_cited = "TC";
inline constexpr std::string_view accession = "UT";
inline constexpr std::string_view end_of_record = "ER";
inline constexpr std::string_view end_of_file = "EF";
} // namespace tag

namespace detail {

inline bool is_list_tag(std::string_view t) { return t == tag::authors || t == tag::cited_references; }

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::optional<int> parse_int(std::string_view s) {
    std::string t = trim(s);
    int value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) return std::nullopt;
    return value;
}

inline std::string upper(std::string_view s) {
    std::string r(s);
    for (char& c : r) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return r;
}

// "Y.", "J.-P.", "M E J": at most four letters, in runs of one or two.
inline bool looks_like_initials(std::string_view s) {
    std::size_t letters = 0, run = 0;
    for (char c : s) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            ++letters;
            if (++run > 2) return false;
        } else if (c == '.' || c == ' ' || c == '-') {
            run = 0;
        } else {
            return false;
        }
    }
    return letters > 0 && letters <= 4;
}

} // namespace detail

/// One tagged record. Each tag maps to its lines; list tags (authors, cited
/// references) keep one item per line, other tags fold continuation lines.
struct RawRecord {
    std::vector<std::pair<std::string, std::vector<std::string>>> fields; // in file order
    std::size_t first_line = 0;
    std::size_t last_line = 0;

    const std::vector<std::string>* lines(std::string_view t) const {
        for (const auto& [name, values] : fields)
            if (name == t) return &values;
        return nullptr;
    }

    std::optional<std::string> text(std::string_view t) const {
        const auto* l = lines(t);
        if (!l || l->empty()) return std::nullopt;
        std::string joined;
        for (const auto& part : *l) {
            if (!joined.empty()) joined += ' ';
            joined += part;
        }
        return joined;
    }

    std::vector<std::string> list(std::string_view t) const {
        const auto* l = lines(t);
        return l ? *l : std::vector<std::string>{};
    }

    std::optional<int> year() const {
        auto y = text(tag::year);
        return y ? detail::parse_int(*y) : std::nullopt;
    }

    bool year_absent() const { return !lines(tag::year); }

    void set(std::string t, std::vector<std::string> values) {
        for (auto& [name, v] : fields) {
            if (name == t) {
                v = std::move(values);
                return;
            }
        }
        fields.emplace_back(std::move(t), std::move(values));
    }
};

struct ParseIssue {
    std::size_t first_line = 0;
    std::size_t last_line = 0;
    std::string message;
};

struct WosParseResult {
    std::vector<RawRecord> records;
    std::vector<ParseIssue> skipped;
};

/// Parses a tagged export. Malformed records are skipped and reported;
/// an input with no parseable record is an error.
inline WosParseResult parse_wos_export(std::istream& in) {
    if (!in) throw IoError("cannot read tagged export");
    WosParseResult result;
    RawRecord current;
    std::string problem;
    bool open = false;
    std::string last_tag;
    std::string line;
    std::size_t line_no = 0;

    auto close = [&](std::size_t end_line) {
        current.last_line = end_line;
        if (problem.empty()) {
            result.records.push_back(std::move(current));
        } else {
            result.skipped.push_back({current.first_line, end_line, problem});
        }
        current = RawRecord{};
        problem.clear();
        open = false;
        last_tag.clear();
    };

    bool finished = false;
    while (!finished && std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
            static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
            line.erase(0, 3);
        }
        if (detail::trim(line).empty()) continue;

        if (line.rfind("   ", 0) == 0) {
            if (!open || last_tag.empty()) {
                if (!open) {
                    open = true;
                    current.first_line = line_no;
                }
                if (problem.empty()) problem = "continuation line without a field tag at line " + std::to_string(line_no);
                continue;
            }
            auto value = detail::trim(line.substr(3));
            for (auto& [name, values] : current.fields) {
                if (name == last_tag) values.push_back(std::move(value));
            }
            continue;
        }

        const bool tag_shape = line.size() >= 2 && std::isupper(static_cast<unsigned char>(line[0])) &&
                               std::isalnum(static_cast<unsigned char>(line[1])) &&
                               (line.size() == 2 || line[2] == ' ');
        if (!tag_shape) {
            if (!open) {
                open = true;
                current.first_line = line_no;
            }
            if (problem.empty()) problem = "unrecognised line " + std::to_string(line_no);
            continue;
        }
        std::string t = line.substr(0, 2);
        std::string value = line.size() > 3 ? detail::trim(line.substr(3)) : std::string{};

        if (t == tag::end_of_file) {
            finished = true;
            break;
        }
        if (!open && (t == "FN" || t == "VR")) continue;
        if (t == tag::end_of_record) {
            if (!open) continue;
            close(line_no);
            continue;
        }
        if (!open) {
            open = true;
            current.first_line = line_no;
        }
        last_tag = t;
        if (const auto* existing = current.lines(t); existing && !detail::is_list_tag(t)) {
            if (problem.empty()) problem = "repeated field " + t + " at line " + std::to_string(line_no);
        }
        auto field = std::find_if(current.fields.begin(), current.fields.end(),
                                  [&](const auto& f) { return f.first == t; });
        if (field != current.fields.end()) {
            field->second.push_back(std::move(value));
        } else {
            current.fields.emplace_back(t, std::vector<std::string>{std::move(value)});
        }
        if (t == tag::year && !detail::parse_int(current.text(tag::year).value_or("")) && problem.empty()) {
            problem = "publication year is not an integer at line " + std::to_string(line_no);
        }
    }
    if (open) {
        if (problem.empty()) problem = "record not terminated by ER";
        close(line_no);
    }
    if (in.bad()) throw IoError("error while reading tagged export");
    if (result.records.empty()) throw FormatError("no parseable records in tagged export");
    return result;
}

/// Writes records in the same layout parse_wos_export reads.
inline void write_wos_export(std::ostream& out, std::span<const RawRecord> records) {
    out << "FN Tagged Export\nVR 1.0\n";
    for (const auto& r : records) {
        for (const auto& [name, values] : r.fields) {
            for (std::size_t i = 0; i < values.size(); ++i) {
                out << (i == 0 ? name + " " : std::string("   ")) << values[i] << '\n';
            }
            if (values.empty()) out << name << '\n';
        }
        out << "ER\n\n";
    }
    out << "EF\n";
}

struct CitedReference {
    std::string first_author;
    std::optional<int> year;
    std::string source;
    std::string volume;
    std::string page;
    std::optional<std::string> doi;
    std::string raw;

    bool matchable() const { return doi.has_value() || (!first_author.empty() && year.has_value()); }
};

/// Lowercased DOI with any resolver prefix removed.
inline std::string normalize_doi(std::string_view doi) {
    std::string d = detail::trim(doi);
    for (char& c : d) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (std::string_view prefix : {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/",
                                    "doi.org/", "dx.doi.org/", "doi:", "doi "}) {
        if (d.rfind(prefix, 0) == 0) {
            d.erase(0, prefix.size());
            break;
        }
    }
    return detail::trim(d);
}

/// "LASTNAME I": uppercase, punctuation stripped, particles joined to the
/// last name, first initial only.
inline std::string normalize_author(std::string_view name) {
    std::string s;
    bool comma_seen = false;
    std::size_t comma_at = std::string::npos;
    for (char c : name) {
        const auto u = static_cast<unsigned char>(c);
        if (c == ',' && !comma_seen) {
            comma_seen = true;
            comma_at = s.size();
            s += ' ';
        } else if (std::isalnum(u) || u >= 0x80) {
            s += static_cast<char>(std::toupper(u));
        } else {
            s += ' ';
        }
    }
    auto split = [](std::string_view text) {
        std::vector<std::string> words;
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && text[i] == ' ') ++i;
            std::size_t j = i;
            while (j < text.size() && text[j] != ' ') ++j;
            if (j > i) words.emplace_back(text.substr(i, j - i));
            i = j;
        }
        return words;
    };
    std::vector<std::string> last;
    std::vector<std::string> given;
    if (comma_at != std::string::npos) {
        last = split(std::string_view(s).substr(0, comma_at));
        given = split(std::string_view(s).substr(comma_at));
    } else {
        auto words = split(s);
        std::size_t cut = words.size();
        while (cut > 1 && words[cut - 1].size() == 1) --cut;
        if (cut == words.size() && words.size() > 1 && words.back().size() <= 3) --cut;
        last.assign(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(cut));
        given.assign(words.begin() + static_cast<std::ptrdiff_t>(cut), words.end());
    }
    std::string key;
    for (const auto& w : last) key += w;
    if (!given.empty()) {
        key += ' ';
        key += given.front().front();
    }
    return key;
}

/// Keeps digits only ("V102" -> "102").
inline std::string normalize_number(std::string_view token) {
    std::string r;
    for (char c : token)
        if (std::isdigit(static_cast<unsigned char>(c))) r += c;
    return r;
}

/// Parses "AUTHOR, YEAR, SOURCE, V12, P34, DOI 10.x/y". Multi-author
/// references keep the first listed name only.
inline CitedReference parse_cited_reference(std::string_view raw) {
    CitedReference ref;
    ref.raw = std::string(raw);
    std::vector<std::string> parts;
    {
        std::size_t depth = 0;
        std::string cur;
        for (char c : raw) {
            if (c == '[') ++depth;
            if (c == ']' && depth > 0) --depth;
            if (c == ',' && depth == 0) {
                parts.push_back(detail::trim(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(detail::trim(cur));
    }
    std::size_t i = 0;
    if (i < parts.size() && !detail::parse_int(parts[i])) {
        ref.first_author = parts[i];
        if (const auto semi = ref.first_author.find(';'); semi != std::string::npos) {
            ref.first_author = detail::trim(ref.first_author.substr(0, semi));
        }
        ++i;
        // "Chen, Y., 1990, ..." splits the author at its comma; fold the initials back in.
        if (i < parts.size() && detail::looks_like_initials(parts[i])) ref.first_author += ", " + parts[i++];
    }
    if (i < parts.size() && detail::parse_int(parts[i])) {
        ref.year = detail::parse_int(parts[i]);
        ++i;
    }
    for (; i < parts.size(); ++i) {
        const std::string& p = parts[i];
        const std::string up = detail::upper(p);
        if (up.rfind("DOI ", 0) == 0) {
            std::string d = detail::trim(std::string_view(p).substr(4));
            if (!d.empty() && d.front() == '[') {
                d.erase(0, 1);
                d = d.substr(0, d.find_first_of(",]"));
            }
            ref.doi = normalize_doi(d);
        } else if (p.size() > 1 && (up[0] == 'V') && std::isdigit(static_cast<unsigned char>(p[1]))) {
            ref.volume = normalize_number(p);
        } else if (p.size() > 1 && (up[0] == 'P') && std::isalnum(static_cast<unsigned char>(p[1])) &&
                   !normalize_number(p).empty() && p.find(' ') == std::string::npos) {
            ref.page = normalize_number(p);
        } else if (ref.source.empty()) {
            ref.source = p;
        }
    }
    if (ref.doi && ref.doi->empty()) ref.doi.reset();
    return ref;
}

struct MatchOptions {
    std::uint32_t incomplete_min_citations = 10;
};

enum class MatchMethod { doi, tuple, incomplete, ambiguous, below_threshold, unmatchable };

inline const char* to_string(MatchMethod m) {
    switch (m) {
    case MatchMethod::doi: return "doi";
    case MatchMethod::tuple: return "tuple";
    case MatchMethod::incomplete: return "incomplete";
    case MatchMethod::ambiguous: return "ambiguous";
    case MatchMethod::below_threshold: return "below-threshold";
    case MatchMethod::unmatchable: return "unmatchable";
    }
    return "unknown";
}

struct ReferenceOutcome {
    std::size_t record = 0;    // index into the input record list
    std::size_t reference = 0; // position within the record's cited references
    MatchMethod method = MatchMethod::unmatchable;
    std::string target_id;     // empty unless matched or admitted
};

struct MatchReport {
    std::vector<ReferenceOutcome> outcomes;
    std::vector<std::size_t> records_without_year; // input indices, not turned into publications
    std::size_t total_references = 0;
    std::size_t matched_by_doi = 0;
    std::size_t matched_by_tuple = 0;
    std::size_t admitted_incomplete = 0;
    std::size_t ambiguous = 0;
};

struct MatchResult {
    std::vector<Publication> publications;
    std::vector<RawEdge> edges;
    std::size_t unmatched_reference_count = 0;
    MatchReport report;
};

namespace detail {

inline std::string tuple_key(const std::string& author, int year, const std::string& volume, const std::string& page) {
    return author + "|" + std::to_string(year) + "|" + volume + "|" + page;
}

} // namespace detail

/// Resolves cited references to records: by DOI first, then by the exact
/// (first author, year, volume, page) tuple after normalisation. References
/// matching no record but cited by enough distinct records become
/// incomplete-record publications. Ambiguous references are never guessed.
/// The result does not depend on the order of `records`.
inline MatchResult match_citations(std::span<const RawRecord> records, const MatchOptions& options = {}) {
    if (options.incomplete_min_citations < 1) throw ContractError("incomplete_min_citations must be at least 1");
    MatchResult result;
    auto& report = result.report;

    struct Candidate {
        std::size_t input;
        Publication pub;
        std::string canonical;
        std::vector<std::string> references;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto year = r.year();
        if (!year) {
            report.records_without_year.push_back(i);
            continue;
        }
        Candidate c;
        c.input = i;
        Publication& p = c.pub;
        auto authors = r.list(tag::authors);
        if (!authors.empty()) {
            p.first_author = normalize_author(authors.front());
            p.co_authors.assign(authors.begin() + 1, authors.end());
        }
        p.title = r.text(tag::title).value_or("");
        p.source = r.text(tag::source).value_or("");
        p.year = *year;
        p.volume = normalize_number(r.text(tag::volume).value_or(""));
        p.begin_page = normalize_number(r.text(tag::begin_page).value_or(""));
        if (auto d = r.text(tag::doi); d && !normalize_doi(*d).empty()) p.doi = normalize_doi(*d);
        if (auto tc = r.text(tag::times_cited); tc && detail::parse_int(*tc) && *detail::parse_int(*tc) >= 0) {
            p.external_citations = static_cast<std::uint64_t>(*detail::parse_int(*tc));
            p.external_citations_known = true;
        }
        c.references = r.list(tag::cited_references);
        std::string base;
        if (auto ut = r.text(tag::accession); ut && !ut->empty()) {
            base = *ut;
        } else if (p.doi) {
            base = *p.doi;
        } else {
            base = detail::tuple_key(p.first_author, p.year, p.volume, p.begin_page);
        }
        p.id = base;
        c.canonical = base + '\x1f' + p.title + '\x1f' + p.source + '\x1f';
        for (const auto& a : authors) c.canonical += a + ';';
        c.canonical += '\x1f';
        for (const auto& ref : c.references) c.canonical += ref + ';';
        candidates.push_back(std::move(c));
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.canonical < b.canonical; });
    {
        std::unordered_map<std::string, std::size_t> used;
        for (auto& c : candidates) {
            const std::size_t k = ++used[c.pub.id];
            if (k > 1) c.pub.id += "#" + std::to_string(k);
        }
    }

    std::unordered_map<std::string, std::vector<std::size_t>> by_doi;
    std::unordered_map<std::string, std::vector<std::size_t>> by_tuple;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& p = candidates[i].pub;
        if (p.doi) by_doi[*p.doi].push_back(i);
        if (!p.first_author.empty()) by_tuple[detail::tuple_key(p.first_author, p.year, p.volume, p.begin_page)].push_back(i);
    }

    struct Pending {
        std::size_t outcome;
        std::size_t citing;
        std::string key;
    };
    std::vector<Pending> pending;
    struct IncompleteInfo {
        CitedReference ref;
        std::vector<std::size_t> citing;
    };
    std::map<std::string, IncompleteInfo> incomplete;
    std::vector<std::pair<std::size_t, std::size_t>> edges; // candidate indices

    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const auto& c = candidates[ci];
        for (std::size_t k = 0; k < c.references.size(); ++k) {
            ++report.total_references;
            const CitedReference ref = parse_cited_reference(c.references[k]);
            ReferenceOutcome outcome{c.input, k, MatchMethod::unmatchable, {}};
            const std::vector<std::size_t>* hits = nullptr;
            bool via_doi = false;
            if (ref.doi) {
                if (auto it = by_doi.find(*ref.doi); it != by_doi.end()) {
                    hits = &it->second;
                    via_doi = true;
                }
            }
            if (!hits && !ref.first_author.empty() && ref.year) {
                const auto key = detail::tuple_key(normalize_author(ref.first_author), *ref.year, ref.volume, ref.page);
                if (auto it = by_tuple.find(key); it != by_tuple.end()) hits = &it->second;
            }
            if (hits && hits->size() == 1) {
                outcome.method = via_doi ? MatchMethod::doi : MatchMethod::tuple;
                outcome.target_id = candidates[hits->front()].pub.id;
                edges.emplace_back(ci, hits->front());
                ++(via_doi ? report.matched_by_doi : report.matched_by_tuple);
            } else if (hits) {
                outcome.method = MatchMethod::ambiguous;
                ++report.ambiguous;
            } else if (ref.year && (ref.doi || !ref.first_author.empty())) {
                std::string key = ref.doi ? *ref.doi
                                          : detail::tuple_key(normalize_author(ref.first_author), *ref.year, ref.volume,
                                                              ref.page);
                auto& info = incomplete[key];
                if (info.citing.empty()) info.ref = ref;
                if (std::find(info.citing.begin(), info.citing.end(), ci) == info.citing.end()) info.citing.push_back(ci);
                outcome.method = MatchMethod::below_threshold;
                pending.push_back({report.outcomes.size(), ci, std::move(key)});
            }
            report.outcomes.push_back(std::move(outcome));
        }
    }

    for (auto& c : candidates) result.publications.push_back(std::move(c.pub));
    for (const auto& [key, info] : incomplete) {
        if (info.citing.size() < options.incomplete_min_citations) continue;
        Publication p;
        p.id = key;
        p.first_author = info.ref.first_author.empty() ? std::string{} : normalize_author(info.ref.first_author);
        p.source = info.ref.source;
        p.year = *info.ref.year;
        p.volume = info.ref.volume;
        p.begin_page = info.ref.page;
        p.doi = info.ref.doi;
        p.complete_record = false;
        result.publications.push_back(std::move(p));
    }
    for (auto& pend : pending) {
        auto it = incomplete.find(pend.key);
        if (it->second.citing.size() < options.incomplete_min_citations) continue;
        auto& outcome = report.outcomes[pend.outcome];
        outcome.method = MatchMethod::incomplete;
        outcome.target_id = pend.key;
        ++report.admitted_incomplete;
    }

    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& [a, b] : edges) result.edges.push_back({result.publications[a].id, result.publications[b].id});
    std::vector<RawEdge> incomplete_edges;
    for (const auto& pend : pending) {
        if (report.outcomes[pend.outcome].method != MatchMethod::incomplete) continue;
        incomplete_edges.push_back({result.publications[pend.citing].id, pend.key});
    }
    std::sort(incomplete_edges.begin(), incomplete_edges.end(), [](const RawEdge& a, const RawEdge& b) {
        return std::tie(a.citing, a.cited) < std::tie(b.citing, b.cited);
    });
    incomplete_edges.erase(std::unique(incomplete_edges.begin(), incomplete_edges.end()), incomplete_edges.end());
    result.edges.insert(result.edges.end(), incomplete_edges.begin(), incomplete_edges.end());

    result.unmatched_reference_count =
        report.total_references - report.matched_by_doi - report.matched_by_tuple - report.admitted_incomplete;
    return result;
}

struct PairData {
    std::vector<Publication> publications;
    std::vector<IndexEdge> edges; // indices into publications
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        cells.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return cells;
}

inline bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

inline std::string tsv_cell(std::string_view s) {
    std::string r(s);
    for (char& c : r)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return r;
}

} // namespace detail

inline constexpr std::string_view kPublicationsHeader = "id\tauthors\ttitle\tsource\tyear\tdoi\text_cit";
inline constexpr std::string_view kCitationsHeader = "citing_id\tcited_id";

/// Reads the publications/citations pair. Authors are separated by "; ".
/// An optional trailing `complete` column (1/0) carries the complete-record flag.
inline PairData parse_pair_files(std::istream& publications_in, std::istream& citations_in) {
    if (!publications_in || !citations_in) throw IoError("cannot read pair files");
    PairData data;
    std::string line;
    if (!detail::read_line(publications_in, line)) throw FormatError("publications file: missing header");
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    bool has_complete = false;
    if (line == std::string(kPublicationsHeader) + "\tcomplete") {
        has_complete = true;
    } else if (line != kPublicationsHeader) {
        throw FormatError("publications file: missing header, expected '" + std::string(kPublicationsHeader) + "'");
    }
    const std::size_t columns = has_complete ? 8 : 7;
    std::unordered_map<std::string, NodeIndex> index;
    std::size_t row = 1;
    while (detail::read_line(publications_in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = detail::split_tabs(line);
        if (cells.size() != columns) {
            throw FormatError("publications file row " + std::to_string(row) + ": expected " + std::to_string(columns) +
                              " columns, found " + std::to_string(cells.size()));
        }
        Publication p;
        p.id = std::string(cells[0]);
        if (p.id.empty()) throw FormatError("publications file row " + std::to_string(row) + ": empty id");
        std::string_view authors = cells[1];
        while (!authors.empty()) {
            const auto semi = authors.find(';');
            std::string name = detail::trim(authors.substr(0, semi));
            if (!name.empty()) {
                if (p.first_author.empty()) {
                    p.first_author = std::move(name);
                } else {
                    p.co_authors.push_back(std::move(name));
                }
            }
            if (semi == std::string_view::npos) break;
            authors.remove_prefix(semi + 1);
        }
        p.title = std::string(cells[2]);
        p.source = std::string(cells[3]);
        const auto year = detail::parse_int(cells[4]);
        if (!year) {
            throw FormatError("publications file row " + std::to_string(row) + ": year '" + std::string(cells[4]) +
                              "' is not an integer");
        }
        p.year = *year;
        if (!cells[5].empty()) p.doi = normalize_doi(cells[5]);
        if (!cells[6].empty()) {
            std::uint64_t ext = 0;
            auto [ptr, ec] = std::from_chars(cells[6].data(), cells[6].data() + cells[6].size(), ext);
            if (ec != std::errc{} || ptr != cells[6].data() + cells[6].size()) {
                throw FormatError("publications file row " + std::to_string(row) + ": ext_cit '" +
                                  std::string(cells[6]) + "' is not a nonnegative integer");
            }
            p.external_citations = ext;
            p.external_citations_known = true;
        }
        if (has_complete) {
            if (cells[7] != "1" && cells[7] != "0") {
                throw FormatError("publications file row " + std::to_string(row) + ": complete must be 1 or 0");
            }
            p.complete_record = cells[7] == "1";
        }
        if (!index.emplace(p.id, static_cast<NodeIndex>(data.publications.size())).second) {
            throw FormatError("publications file row " + std::to_string(row) + ": duplicate id '" + p.id + "'");
        }
        data.publications.push_back(std::move(p));
    }

    if (!detail::read_line(citations_in, line)) throw FormatError("citations file: missing header");
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line != kCitationsHeader) {
        throw FormatError("citations file: missing header, expected '" + std::string(kCitationsHeader) + "'");
    }
    row = 1;
    std::string key;
    while (detail::read_line(citations_in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw FormatError("citations file row " + std::to_string(row) + ": expected 2 columns");
        }
        NodeIndex ends[2];
        for (int side = 0; side < 2; ++side) {
            key.assign(side == 0 ? std::string_view(line).substr(0, tab) : std::string_view(line).substr(tab + 1));
            auto it = index.find(key);
            if (it == index.end()) {
                throw FormatError("citations file row " + std::to_string(row) + ": undeclared id '" + key + "'");
            }
            ends[side] = it->second;
        }
        data.edges.push_back({ends[0], ends[1]});
    }
    return data;
}

/// Writes the pair files for a network. The `complete` column is added only
/// when the network holds incomplete records.
inline void write_pair_files(std::ostream& publications_out, std::ostream& citations_out, const CitationNetwork& net) {
    const auto pubs = net.publications();
    const bool any_incomplete =
        std::any_of(pubs.begin(), pubs.end(), [](const Publication& p) { return !p.complete_record; });
    publications_out << kPublicationsHeader << (any_incomplete ? "\tcomplete" : "") << '\n';
    for (const auto& p : pubs) {
        std::string authors = p.first_author;
        for (const auto& a : p.co_authors) authors += "; " + a;
        publications_out << detail::tsv_cell(p.id) << '\t' << detail::tsv_cell(authors) << '\t'
                         << detail::tsv_cell(p.title) << '\t' << detail::tsv_cell(p.source) << '\t' << std::to_string(p.year) << '\t'
                         << detail::tsv_cell(p.doi.value_or("")) << '\t';
        if (p.external_citations_known) publications_out << std::to_string(p.external_citations);
        if (any_incomplete) publications_out << '\t' << (p.complete_record ? '1' : '0');
        publications_out << '\n';
    }
    citations_out << kCitationsHeader << '\n';
    const auto& g = net.graph();
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        for (NodeIndex w : g.out(v)) citations_out << pubs[v].id << '\t' << pubs[w].id << '\n';
    }
}

} // namespace citnet
