#include <gtest/gtest.h>

#include <filesystem>

#include "nsaflow/errors.hpp"
#include "nsaflow/io.hpp"
#include "support.hpp"

using namespace nsaflow;
using namespace testsupport;

TEST(Parse, Delimiters) {
  for (const char* text : {"1,2,3\n4,5,6\n", "1\t2\t3\n4\t5\t6", "1 2  3\n 4 5 6\n", "1, 2, 3\r\n4, 5, 6\r\n"}) {
    const DenseMatrix m = parse_matrix(text);
    ASSERT_EQ(m.rows(), 2) << text;
    ASSERT_EQ(m.cols(), 3) << text;
    EXPECT_EQ(m(1, 2), 6.0);
    EXPECT_EQ(m(0, 1), 2.0);
  }
}

TEST(Parse, HeaderAndComments) {
  const DenseMatrix m = parse_matrix("# produced by a test\na,b\n# mid comment\n1.5,-2e-3\n\n3,4\n");
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m(0, 1), -2e-3);
  EXPECT_EQ(m(1, 0), 3.0);
}

TEST(Parse, Rejections) {
  EXPECT_THROW(parse_matrix("1,2,3\n4,5\n"), IoError);
  EXPECT_THROW(parse_matrix("1,2\n3,abc\n"), IoError);
  EXPECT_THROW(parse_matrix("1,2\nnan,4\n"), IoError);
  EXPECT_THROW(parse_matrix("1,inf\n"), IoError);
  EXPECT_THROW(parse_matrix("# only a comment\n"), IoError);
  EXPECT_THROW(parse_matrix("x,y\nz,w\n1,2\n"), IoError);
  EXPECT_THROW(parse_matrix(""), IoError);
}

TEST(RoundTrip, BitExact) {
  TempDir dir;
  for (int t = 0; t < 100; ++t) {
    const Index r = 1 + t % 7;
    const Index c = 1 + (t * 3) % 5;
    DenseMatrix m = randn(r, c, 100 + t);
    m *= std::pow(10.0, (t % 21) - 10);
    if (t % 4 == 0) m(0, 0) = 0.0;
    const std::string path = dir.file("m" + std::to_string(t) + ".csv");
    write_matrix(path, m, {"round trip " + std::to_string(t)});
    const DenseMatrix back = read_matrix(path);
    ASSERT_TRUE(back == m) << t;
  }
}

TEST(Format, CommentsAndDigits) {
  DenseMatrix m(1, 2);
  m << 0.1, 1.0 / 3.0;
  const std::string text = format_matrix(m, {"seed=7"});
  EXPECT_EQ(text, "# seed=7\n0.10000000000000001,0.33333333333333331\n");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Trace, HeaderAndRows) {
  std::vector<TraceRecord> tr(2);
  tr[0] = {0, 0.0, 1.0, 0.5, 2.0, 3.0, 0.01, 2.0};
  tr[1] = {1, 0.0, 0.5, 0.25, 1.0, 1.5, 0.01, 1.0};
  const std::string text = format_trace(tr, {"seed=1"});
  EXPECT_EQ(text.rfind("# seed=1\n", 0), 0u);
  EXPECT_NE(text.find(std::string(kTraceHeader) + "\n"), std::string::npos);
  EXPECT_NE(text.find("\n1,0,0.5,0.25,1,1.5,0.01,1\n"), std::string::npos);
}

TEST(Files, MissingFileIsIoError) {
  EXPECT_THROW(read_matrix("/nonexistent/dir/m.csv"), IoError);
  EXPECT_THROW(write_text_atomic("/nonexistent/dir/m.csv", "x"), IoError);
}

TEST(Files, AtomicWriteReplaces) {
  TempDir dir;
  const std::string path = dir.file("a.txt");
  write_text_atomic(path, "first");
  write_text_atomic(path, "second");
  EXPECT_EQ(slurp(path), "second");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(std::filesystem::path(path).parent_path()))
    ++entries;
  EXPECT_EQ(entries, 1);
}
