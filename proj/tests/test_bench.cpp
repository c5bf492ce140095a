#include <sstream>

#include <gtest/gtest.h>

#include "admipc/bench.hpp"

using namespace admipc;

namespace {

ExperimentSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parseExperimentSpec(in);
}

std::string csvOf(const ExperimentSpec& spec, int jobs) {
  std::ostringstream out;
  writeCsv(out, runBench(spec, jobs), spec.timing);
  return out.str();
}

ExperimentSpec smallSpec() {
  return parse(
      "# small grid\n"
      "n = 40\n"
      "alpha = 0.8, 1\n"
      "p0 = 1, 0.8\n"
      "seeds = 2\n"
      "methods = admipc, louvain\n"
      "louvain_orders = 3\n"
      "timing = false\n");
}

}  // namespace

TEST(ExperimentSpecParse, KeysAndDefaults) {
  const auto spec = parse(
      "n = 100, 200\nalpha = 0.5,1\np0 = 1\nseeds = 3\nmethods = rpcab, admipc, rpcab\n"
      "louvain_orders = 7\nmaster_seed = 9\nflip = 0.1\nrho = 0.2\neps_r = 1e-3\nkappa = 1.5\n"
      "mu_bar = 1e5\nmax_iter = 50\nouter_cap = 4\nwarm_start = yes\nbackend = thresholded\ntiming = 0\n");
  EXPECT_EQ(spec.nList, (std::vector<Index>{100, 200}));
  EXPECT_EQ(spec.alphaList, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(spec.methods, (std::vector<Method>{Method::Rpcab, Method::Admipc}));
  EXPECT_EQ(spec.seedsPerCell, 3);
  EXPECT_EQ(spec.params.louvainOrders, 7);
  EXPECT_EQ(spec.masterSeed, 9u);
  EXPECT_EQ(spec.flip, 0.1);
  EXPECT_EQ(*spec.params.rho, 0.2);
  EXPECT_EQ(spec.params.epsR, 1e-3);
  EXPECT_EQ(spec.params.kappa, 1.5);
  EXPECT_EQ(spec.params.muBar, 1e5);
  EXPECT_EQ(spec.params.maxIter, 50);
  EXPECT_EQ(spec.params.outerCap, 4);
  EXPECT_TRUE(spec.params.warmStart);
  EXPECT_EQ(spec.params.backend.kind, SpectralBackend::Kind::ThresholdedIterative);
  EXPECT_FALSE(spec.timing);

  const auto defaults = parse("n = 10\nalpha = 1\np0 = 1\nmethods = louvain\n");
  EXPECT_EQ(defaults.seedsPerCell, 10);
  EXPECT_EQ(defaults.params.louvainOrders, 20);
  EXPECT_TRUE(defaults.timing);
}

TEST(ExperimentSpecParse, Errors) {
  EXPECT_THROW(parse("n = 10\nalpha = 1\np0 = 1\nmethods = pca\n"), ParseError);
  EXPECT_THROW(parse("n = 10\nn = 20\nalpha = 1\np0 = 1\nmethods = admipc\n"), ParseError);
  EXPECT_THROW(parse("n = 10\ncolour = red\n"), ParseError);
  EXPECT_THROW(parse("n 10\n"), ParseError);
  EXPECT_THROW(parse("n = 10\nalpha = 1\np0 = 1\n"), ValidationError);
  EXPECT_THROW(parse("n = 10\nalpha = 1.5\np0 = 1\nmethods = admipc\n"), ValidationError);
  EXPECT_THROW(parse("n = 10\nalpha = 1\np0 = 1\nseeds = 0\nmethods = admipc\n"), ValidationError);
  EXPECT_THROW(parse("n = 10,\nalpha = 1\np0 = 1\nmethods = admipc\n"), ValidationError);
}

TEST(Bench, SeedDerivationIsPure) {
  EXPECT_EQ(deriveSeed(1, 100, 0.8, 1.0, 3), deriveSeed(1, 100, 0.8, 1.0, 3));
  EXPECT_NE(deriveSeed(1, 100, 0.8, 1.0, 3), deriveSeed(1, 100, 0.8, 1.0, 4));
  EXPECT_NE(deriveSeed(1, 100, 0.8, 1.0, 3), deriveSeed(1, 100, 0.8, 0.9, 3));
  EXPECT_NE(deriveSeed(1, 100, 0.8, 1.0, 3), deriveSeed(2, 100, 0.8, 1.0, 3));
}

TEST(Bench, GridReorderingKeepsCellResults) {
  auto a = parse("n = 30, 40\nalpha = 1, 0.8\np0 = 1\nseeds = 2\nmethods = admipc\ntiming = false\n");
  auto b = parse("n = 40, 30\nalpha = 0.8, 1\np0 = 1\nseeds = 2\nmethods = admipc\ntiming = false\n");
  EXPECT_EQ(csvOf(a, 1), csvOf(b, 1));
  auto c = parse("n = 40\nalpha = 0.8\np0 = 1\nseeds = 2\nmethods = admipc\ntiming = false\n");
  const auto full = runBenchRecords(a);
  const auto single = runBenchRecords(c);
  ASSERT_EQ(single.size(), 2u);
  for (const auto& r : single) {
    bool found = false;
    for (const auto& f : full)
      if (f.n == r.n && f.alpha == r.alpha && f.seedIndex == r.seedIndex) {
        found = true;
        EXPECT_EQ(f.scores->block.sAv, r.scores->block.sAv);
        EXPECT_EQ(f.eigCalls, r.eigCalls);
      }
    EXPECT_TRUE(found);
  }
}

TEST(Bench, DeterministicAcrossRunsAndThreadCounts) {
  const auto spec = smallSpec();
  const std::string once = csvOf(spec, 1);
  EXPECT_EQ(once, csvOf(spec, 1));
  EXPECT_EQ(once, csvOf(spec, 3));
  EXPECT_NE(once.find(",-,"), std::string::npos);
}

TEST(Bench, LouvainStreamIndependentOfMethodList) {
  auto both = smallSpec();
  auto alone = smallSpec();
  alone.methods = {Method::Louvain};
  const auto a = runBenchRecords(both);
  const auto b = runBenchRecords(alone);
  std::vector<double> pa, pb;
  for (const auto& r : a)
    if (r.method == Method::Louvain) pa.push_back(r.scores->similarity.perc + r.scores->similarity.nmiSg);
  for (const auto& r : b) pb.push_back(r.scores->similarity.perc + r.scores->similarity.nmiSg);
  EXPECT_EQ(pa, pb);
}

TEST(Bench, StatisticsInRangeAndCostsPositive) {
  auto spec = parse("n = 40\nalpha = 0.7, 1\np0 = 1, 0.8\nseeds = 2\nmethods = admipc, mialm, rpcab, louvain\n"
                    "louvain_orders = 3\n");
  for (const auto& r : runBenchRecords(spec, 2)) {
    ASSERT_TRUE(r.scores.has_value()) << r.status;
    const auto& s = *r.scores;
    for (double v : {s.block.sMax, s.block.sMin, s.block.sAv, s.block.sOff, s.block.sF, s.similarity.jaccard,
                     s.similarity.nmiSg, s.similarity.perc}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_GT(r.seconds, 0.0);
    if (r.method != Method::Louvain) EXPECT_GT(r.eigCalls, 0);
    EXPECT_FALSE(r.status.empty());
  }
}

TEST(Bench, CellFailuresBecomeStatus) {
  auto spec = parse("n = 30\nalpha = 1\np0 = 1\nseeds = 2\nmethods = admipc\nmax_iter = 1\ntiming = false\n");
  const auto cells = runBench(spec);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].status.rfind("max_iter", 0), 0u) << cells[0].status;
  EXPECT_EQ(cells[0].runs, 2);
}

TEST(Csv, HeaderAndRoundTrip) {
  const auto spec = smallSpec();
  std::stringstream ss;
  writeCsv(ss, runBench(spec), false);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kCsvHeader);
  const auto rows = readCsv(ss);
  EXPECT_EQ(rows.size(), 2u * 2u * 2u);
  EXPECT_EQ(rows.front().at("method"), "admipc");
  EXPECT_EQ(rows.front().at("cpu_s"), "-");
}

TEST(Csv, MalformedInputThrows) {
  std::istringstream missing("n,alpha,p0,method\n10,1,1,admipc\n");
  EXPECT_THROW(readCsv(missing), ParseError);
  std::istringstream ragged(std::string(kCsvHeader) + "\n10,1,1\n");
  EXPECT_THROW(readCsv(ragged), ParseError);
}

TEST(Report, EmptyAndSingleRow) {
  EXPECT_EQ(renderReport({}), "No results.\n");
  std::istringstream in(std::string(kCsvHeader) + "\n100,1,1,admipc,0,0,0,0,1,1,1,1,0.5,30,ok\n");
  const std::string md = renderReport(readCsv(in));
  EXPECT_NE(md.find("## p0 = 1"), std::string::npos);
  EXPECT_NE(md.find("| 100 | 1 | 0 | 0 | 0 | 0 | 1 |"), std::string::npos);
  int dataRows = 0;
  std::istringstream lines(md);
  for (std::string l; std::getline(lines, l);)
    if (l.rfind("| 100 |", 0) == 0) ++dataRows;
  EXPECT_EQ(dataRows, 2);  // block table and similarity table
}

TEST(Report, ColumnOrderPerMethod) {
  std::istringstream in(std::string(kCsvHeader) +
                        "\n200,0.8,1,admipc,0,0,0,0,1,1,1,1,1,30,ok\n200,0.8,1,mialm,0.9,0.1,0.5,0.1,0.5,1,1,1,1,40,ok\n");
  const std::string md = renderReport(readCsv(in));
  const std::string expected =
      "| n | alpha | admipc s_max | admipc s_min | admipc s_av | admipc s_off | admipc s_f | mialm s_max | "
      "mialm s_min | mialm s_av | mialm s_off | mialm s_f |";
  EXPECT_NE(md.find(expected), std::string::npos) << md;
}

TEST(Bench, MialmCellN200Alpha07) {
  // Mean s_f near 0.40 over 10 seeds.
  auto spec = parse("n = 200\nalpha = 0.7\np0 = 1\nseeds = 10\nmethods = mialm\n");
  const auto cells = runBench(spec, 4);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_NEAR(cells[0].sF, 0.40, 0.2);
}
