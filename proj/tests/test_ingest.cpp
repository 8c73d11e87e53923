#include "citnet/ingest.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "support/corpus.hpp"

namespace citnet {
namespace {

const char* const kThreeRecords =
    "FN Tagged Export\n"
    "VR 1.0\n"
    "PT J\n"
    "AU Newman, MEJ\n"
    "   Girvan, M\n"
    "   Barabasi, A-L\n"
    "TI Finding and evaluating community\n"
    "   structure in networks\n"
    "SO PHYSICAL REVIEW E\n"
    "PY 2004\n"
    "VL 69\n"
    "BP 026113\n"
    "ER\n"
    "\n"
    "PT J\n"
    "AU Fortunato, S\n"
    "TI Community detection in graphs\n"
    "SO PHYSICS REPORTS\n"
    "VL 486\n"
    "BP 75\n"
    "ER\n"
    "\n"
    "PT J\n"
    "AU Blondel, VD\n"
    "TI Fast unfolding of communities\n"
    "PY 2008\n"
    "CR Newman MEJ, 2004, PHYS REV E, V69, P026113\n"
    "   Girvan M, 2002, P NATL ACAD SCI USA, V99, P7821, DOI 10.1073/pnas.122653799\n"
    "ER\n"
    "EF\n";

TEST(ParseWos, ReadsRecordsAndFlagsMissingYear) {
    std::istringstream in(kThreeRecords);
    auto parsed = parse_wos_export(in);
    ASSERT_EQ(parsed.records.size(), 3u);
    EXPECT_TRUE(parsed.skipped.empty());
    const auto flagged = std::count_if(parsed.records.begin(), parsed.records.end(),
                                       [](const RawRecord& r) { return r.year_absent(); });
    EXPECT_EQ(flagged, 1);
    EXPECT_TRUE(parsed.records[1].year_absent());
    EXPECT_EQ(parsed.records[0].year(), 2004);
}

TEST(ParseWos, FoldsContinuationLines) {
    std::istringstream in(kThreeRecords);
    auto parsed = parse_wos_export(in);
    const auto& first = parsed.records[0];
    // The author field spans two continuation lines and stays one field.
    const auto* au = first.lines(tag::authors);
    ASSERT_NE(au, nullptr);
    EXPECT_EQ(*au, (std::vector<std::string>{"Newman, MEJ", "Girvan, M", "Barabasi, A-L"}));
    EXPECT_EQ(std::count_if(first.fields.begin(), first.fields.end(), [](const auto& f) { return f.first == "AU"; }), 1);
    EXPECT_EQ(first.text(tag::title), "Finding and evaluating community structure in networks");
    EXPECT_EQ(parsed.records[2].list(tag::cited_references).size(), 2u);
}

TEST(ParseWos, SkipsMalformedRecordsWithLineSpans) {
    const std::string text =
        "PT J\nAU Doe, J\nPY 20x4\nER\n"
        "PT J\nAU Roe, K\nPY 2001\nER\n"
        "this is not a tagged line\nPY 2002\nER\n"
        "PT J\nAU Tail, T\nPY 1999\n";
    std::istringstream in(text);
    auto parsed = parse_wos_export(in);
    ASSERT_EQ(parsed.records.size(), 1u);
    ASSERT_EQ(parsed.skipped.size(), 3u);
    EXPECT_EQ(parsed.skipped[0].first_line, 1u);
    EXPECT_EQ(parsed.skipped[0].last_line, 4u);
    EXPECT_NE(parsed.skipped[0].message.find("year"), std::string::npos);
    EXPECT_EQ(parsed.skipped[1].first_line, 9u);
    EXPECT_NE(parsed.skipped[2].message.find("ER"), std::string::npos);
}

TEST(ParseWos, EmptyInputIsAnError) {
    std::istringstream in("FN Tagged Export\nVR 1.0\nEF\n");
    EXPECT_THROW(parse_wos_export(in), FormatError);
}

TEST(ParseWos, GeneratedCorpusRoundTrips) {
    testing::CorpusOptions opt;
    opt.records = 10000;
    opt.refs_per_record = 3;
    auto corpus = testing::generate_corpus(opt);
    const std::string text = testing::to_export_text(corpus.records);
    std::istringstream in(text);
    auto parsed = parse_wos_export(in);
    ASSERT_EQ(parsed.records.size(), opt.records);
    EXPECT_TRUE(parsed.skipped.empty());
    EXPECT_EQ(testing::to_export_text(parsed.records), text);
}

TEST(Normalize, AuthorVariantsCollapse) {
    EXPECT_EQ(normalize_author("Smith J"), "SMITH J");
    EXPECT_EQ(normalize_author("SMITH J"), "SMITH J");
    EXPECT_EQ(normalize_author("Smith, John"), "SMITH J");
    EXPECT_EQ(normalize_author("smith, j."), "SMITH J");
    EXPECT_EQ(normalize_author("Van Eck NJ"), "VANECK N");
    EXPECT_EQ(normalize_author("van Eck, N.J."), "VANECK N");
    EXPECT_EQ(normalize_author("Kuhn T. S."), "KUHN T");
    EXPECT_EQ(normalize_author("KUHN TS"), "KUHN T");
}

TEST(Normalize, DoiPrefixesAndCase) {
    EXPECT_EQ(normalize_doi("https://doi.org/10.1073/PNAS.1"), "10.1073/pnas.1");
    EXPECT_EQ(normalize_doi("  doi:10.1/X "), "10.1/x");
    EXPECT_EQ(normalize_doi("10.1/x"), "10.1/x");
}

TEST(CitedReference, ParsesTokens) {
    auto ref = parse_cited_reference("Girvan M, 2002, P NATL ACAD SCI USA, V99, P7821, DOI 10.1073/pnas.122653799");
    EXPECT_EQ(ref.first_author, "Girvan M");
    EXPECT_EQ(ref.year, 2002);
    EXPECT_EQ(ref.source, "P NATL ACAD SCI USA");
    EXPECT_EQ(ref.volume, "99");
    EXPECT_EQ(ref.page, "7821");
    EXPECT_EQ(ref.doi, "10.1073/pnas.122653799");
    auto book = parse_cited_reference("Kuhn T. S., 1962, STRUCTURE SCI REVOLUT");
    EXPECT_EQ(book.year, 1962);
    EXPECT_TRUE(book.volume.empty());
    EXPECT_FALSE(book.doi);
}

TEST(CitedReference, CommaBeforeInitials) {
    auto ref = parse_cited_reference("Chen, Y., 1990, J SYNTH STUD, V69, P2335");
    EXPECT_EQ(ref.first_author, "Chen, Y.");
    EXPECT_EQ(ref.year, 1990);
    EXPECT_EQ(ref.source, "J SYNTH STUD");
    EXPECT_EQ(normalize_author(ref.first_author), normalize_author("CHEN Y"));
    auto hyphen = parse_cited_reference("Bouchaud, J.-P., 2001, PHYSICA A, V299, P1");
    EXPECT_EQ(hyphen.year, 2001);
    EXPECT_EQ(normalize_author(hyphen.first_author), normalize_author("BOUCHAUD JP"));
    // A short source name is not taken for initials when the year follows the author.
    auto src = parse_cited_reference("Smith J, 2005, PNAS, V1, P2");
    EXPECT_EQ(src.first_author, "Smith J");
    EXPECT_EQ(src.source, "PNAS");
}

RawRecord record(std::string ut, std::string author, int year, std::string vol, std::string page,
                 std::vector<std::string> refs = {}, std::string doi = {}) {
    RawRecord r;
    r.set("AU", {std::move(author)});
    r.set("TI", {"Title " + ut});
    r.set("PY", {std::to_string(year)});
    r.set("VL", {std::move(vol)});
    r.set("BP", {std::move(page)});
    if (!doi.empty()) r.set("DI", {std::move(doi)});
    if (!refs.empty()) r.set("CR", std::move(refs));
    r.set("UT", {std::move(ut)});
    return r;
}

TEST(MatchCitations, DoiTakesPrecedenceOverAuthorSpelling) {
    std::vector<RawRecord> recs{
        record("W1", "Smith, J", 2005, "102", "16569", {}, "10.1/x"),
        record("W2", "Doe, A", 2010, "1", "1", {"Smyth Q, 2005, PNAS, V102, P16569, DOI 10.1/X"}),
    };
    auto m = match_citations(recs);
    ASSERT_EQ(m.edges.size(), 1u);
    EXPECT_EQ(m.edges[0], (RawEdge{"W2", "W1"}));
    EXPECT_EQ(m.report.outcomes[0].method, MatchMethod::doi);
}

TEST(MatchCitations, TupleMatchAfterNormalisation) {
    std::vector<RawRecord> recs{
        record("W1", "SMITH, J", 2005, "102", "16569"),
        record("W2", "Doe, A", 2010, "1", "1", {"Smith J, 2005, PNAS, V102, P16569"}),
    };
    auto m = match_citations(recs);
    ASSERT_EQ(m.edges.size(), 1u);
    EXPECT_EQ(m.report.outcomes[0].method, MatchMethod::tuple);
    EXPECT_EQ(m.unmatched_reference_count, 0u);
}

TEST(MatchCitations, AmbiguousTupleIsNeverGuessed) {
    std::vector<RawRecord> recs{
        record("W1", "Smith, J", 2005, "7", "7"),
        record("W2", "Smith, J", 2005, "7", "7"),
        record("W3", "Doe, A", 2010, "1", "1", {"Smith J, 2005, X, V7, P7"}),
    };
    auto m = match_citations(recs);
    EXPECT_TRUE(m.edges.empty());
    EXPECT_EQ(m.report.ambiguous, 1u);
    EXPECT_EQ(m.unmatched_reference_count, 1u);
    EXPECT_EQ(m.report.outcomes[0].method, MatchMethod::ambiguous);
}

TEST(MatchCitations, FrequentlyCitedBookBecomesIncompleteRecord) {
    std::vector<RawRecord> recs;
    for (int i = 0; i < 12; ++i) {
        recs.push_back(record("W" + std::to_string(i), "Doe, A", 2000 + i, "1", std::to_string(i),
                              {"Kuhn T, 1962, STRUCTURE SCI REVOLUT"}));
    }
    recs.push_back(record("W99", "Roe, B", 2001, "1", "99", {"Other B, 1970, SOME BOOK"}));
    // Oracle: frequency of the normalised reference among distinct citing records.
    std::map<std::string, std::size_t> freq;
    for (const auto& r : recs)
        for (const auto& cr : r.list(tag::cited_references)) {
            auto ref = parse_cited_reference(cr);
            ++freq[normalize_author(ref.first_author) + "|" + std::to_string(*ref.year)];
        }
    ASSERT_EQ(freq["KUHN T|1962"], 12u);

    auto m = match_citations(recs, {.incomplete_min_citations = 10});
    auto built = build_network(m.publications, m.edges);
    const auto& net = *built.network;
    const auto book = net.find("KUHN T|1962||");
    ASSERT_TRUE(book);
    EXPECT_FALSE(net.publication(*book).complete_record);
    EXPECT_EQ(citation_score(net, *book), freq["KUHN T|1962"]);
    EXPECT_EQ(net.graph().out_degree(*book), 0u);
    EXPECT_FALSE(net.find("OTHER B|1970||"));
    EXPECT_EQ(m.unmatched_reference_count, 1u);
    EXPECT_EQ(m.report.admitted_incomplete, 12u);
}

TEST(MatchCitations, RejectsZeroThreshold) {
    std::vector<RawRecord> none{record("W1", "A, B", 2000, "1", "1")};
    EXPECT_THROW(match_citations(none, {.incomplete_min_citations = 0}), ContractError);
}

TEST(MatchCitations, OrderIndependentAndCountsBalance) {
    testing::CorpusOptions opt;
    opt.records = 600;
    auto corpus = testing::generate_corpus(opt);
    auto a = match_citations(corpus.records);
    auto shuffled = corpus.records;
    std::mt19937_64 rng(4);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto b = match_citations(shuffled);

    auto ids = [](const MatchResult& m) {
        std::vector<std::string> v;
        for (const auto& p : m.publications) v.push_back(p.id);
        std::sort(v.begin(), v.end());
        return v;
    };
    auto edges = [](const MatchResult& m) {
        std::vector<std::pair<std::string, std::string>> v;
        for (const auto& e : m.edges) v.emplace_back(e.citing, e.cited);
        std::sort(v.begin(), v.end());
        return v;
    };
    EXPECT_EQ(ids(a), ids(b));
    EXPECT_EQ(edges(a), edges(b));
    const auto& r = a.report;
    EXPECT_EQ(a.unmatched_reference_count + r.matched_by_doi + r.matched_by_tuple + r.admitted_incomplete,
              r.total_references);
    // DOI precedence: whenever a reference's DOI resolves, the method is DOI.
    std::set<std::string> known_dois;
    for (const auto& rec : corpus.records)
        if (auto d = rec.text(tag::doi)) known_dois.insert(normalize_doi(*d));
    for (const auto& o : r.outcomes) {
        const auto& rec = corpus.records[o.record];
        auto ref = parse_cited_reference(rec.list(tag::cited_references)[o.reference]);
        if (ref.doi && known_dois.count(*ref.doi)) EXPECT_EQ(o.method, MatchMethod::doi);
    }
}

TEST(PairFiles, ParsesSmallNetwork) {
    std::istringstream pubs(
        "id\tauthors\ttitle\tsource\tyear\tdoi\text_cit\r\n"
        "A\tNewman M; Girvan M\tModularity\tPRE\t2004\t10.1/A\t120\r\n"
        "B\tZachary W\tKarate\tJAR\t1977\t\t\r\n");
    std::istringstream cits("citing_id\tcited_id\nA\tB\n");
    auto data = parse_pair_files(pubs, cits);
    ASSERT_EQ(data.publications.size(), 2u);
    EXPECT_EQ(data.publications[0].first_author, "Newman M");
    EXPECT_EQ(data.publications[0].co_authors, std::vector<std::string>{"Girvan M"});
    EXPECT_EQ(data.publications[0].external_citations, 120u);
    EXPECT_FALSE(data.publications[1].external_citations_known);
    auto net = build_network(std::move(data.publications), data.edges).network;
    EXPECT_EQ(net->size(), 2u);
    EXPECT_EQ(net->edge_count(), 1u);
}

TEST(PairFiles, UndeclaredIdNamesRowAndId) {
    std::istringstream pubs("id\tauthors\ttitle\tsource\tyear\tdoi\text_cit\nA\tX\tT\tS\t2000\t\t\n");
    std::istringstream cits("citing_id\tcited_id\nA\tZ\n");
    try {
        parse_pair_files(pubs, cits);
        FAIL();
    } catch (const FormatError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 2"), std::string::npos);
        EXPECT_NE(msg.find("'Z'"), std::string::npos);
    }
}

TEST(PairFiles, MissingHeaderAndBadYear) {
    std::istringstream no_header("A\tX\tT\tS\t2000\t\t\n");
    std::istringstream cits("citing_id\tcited_id\n");
    EXPECT_THROW(parse_pair_files(no_header, cits), FormatError);

    std::istringstream bad_year("id\tauthors\ttitle\tsource\tyear\tdoi\text_cit\nA\tX\tT\tS\t20x0\t\t\n");
    std::istringstream cits2("citing_id\tcited_id\n");
    try {
        parse_pair_files(bad_year, cits2);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
    }
}

TEST(PairFiles, WriteThenReadPreservesNetwork) {
    auto corpus = testing::generate_corpus({.records = 300, .refs_per_record = 4, .book_citers = 12});
    auto m = match_citations(corpus.records);
    auto net = build_network(m.publications, m.edges).network;
    std::ostringstream pubs_out, cits_out;
    write_pair_files(pubs_out, cits_out, *net);
    std::istringstream pubs_in(pubs_out.str()), cits_in(cits_out.str());
    auto data = parse_pair_files(pubs_in, cits_in);
    auto again = build_network(std::move(data.publications), data.edges).network;
    ASSERT_EQ(again->size(), net->size());
    EXPECT_EQ(again->graph().edges(), net->graph().edges());
    for (NodeIndex i = 0; i < net->size(); ++i) {
        EXPECT_EQ(again->publication(i).id, net->publication(i).id);
        EXPECT_EQ(again->publication(i).complete_record, net->publication(i).complete_record);
    }
}

} // namespace
} // namespace citnet
