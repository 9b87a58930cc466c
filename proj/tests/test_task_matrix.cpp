#include <doctest.h>
#include <fscil/task_matrix.hpp>

#include <sstream>
#include <string>

#include "test_support.hpp"

using namespace fscil;

namespace {

#define CHECK_CODE(expr, expected)                          \
  do {                                                      \
    try {                                                   \
      (void)(expr);                                         \
      FAIL_CHECK("expected " #expected " from " #expr);     \
    } catch (const Error& e) {                              \
      CHECK(e.code() == ErrorCode::expected);               \
    }                                                       \
  } while (0)

const char* kSmallCsv =
    "layout,3,4,2\n"
    "1,80\n"
    "2,70,50\n"
    "3,60,40,30\n";

}  // namespace

TEST_SUITE("task_matrix") {

TEST_CASE("csv parse reads the triangular table") {
  AccuracyMatrix m = parse_matrix(kSmallCsv, MatrixFormat::Csv);
  CHECK(m.layout().n_tasks == 3);
  CHECK(m.layout().base_classes == 4);
  CHECK(m.layout().novel_classes == 2);
  CHECK(m.at(1, 1) == 80.0);
  CHECK(m.at(2, 1) == 70.0);
  CHECK(m.at(3, 3) == 30.0);
}

TEST_CASE("csv tolerates comments, blank lines and CRLF") {
  std::string text =
      "# comment\r\n"
      "layout,2,4,2\r\n"
      "\r\n"
      "1,80\r\n"
      "# another\n"
      "2,70,50\r\n";
  AccuracyMatrix m = parse_matrix(text, MatrixFormat::Csv);
  CHECK(m.at(2, 2) == 50.0);
}

TEST_CASE("round trips preserve every entry, both formats") {
  Rng rng = stream_rng(7, 0);
  for (int trial = 0; trial < 25; ++trial) {
    TaskLayout layout = testsup::random_layout(rng);
    AccuracyMatrix m = testsup::random_matrix(layout, rng);
    CHECK(parse_matrix(emit_matrix(m, MatrixFormat::Csv), MatrixFormat::Csv) == m);
    CHECK(parse_matrix(emit_matrix(m, MatrixFormat::Json), MatrixFormat::Json) == m);
  }
}

TEST_CASE("csv rejections carry typed codes") {
  CHECK_CODE(parse_matrix("", MatrixFormat::Csv), MalformedHeader);
  CHECK_CODE(parse_matrix("shape,3,4,2\n1,80\n", MatrixFormat::Csv), MalformedHeader);
  CHECK_CODE(parse_matrix("layout,3,4\n", MatrixFormat::Csv), MalformedHeader);
  CHECK_CODE(parse_matrix("layout,2,4,2\n1,80\n", MatrixFormat::Csv), MalformedHeader);
  CHECK_CODE(parse_matrix("layout,1,4,2\n1,80\n2,1,2\n", MatrixFormat::Csv),
             MalformedHeader);
  CHECK_CODE(parse_matrix("layout,2,4,2\n2,70,50\n1,80\n", MatrixFormat::Csv),
             MalformedHeader);
  CHECK_CODE(parse_matrix("layout,2,4,2\n1,80\n2,70\n", MatrixFormat::Csv),
             RowLengthMismatch);
  CHECK_CODE(parse_matrix("layout,2,4,2\n1,80\n2,70,50,10\n", MatrixFormat::Csv),
             RowLengthMismatch);
  CHECK_CODE(parse_matrix("layout,2,4,2\n1,80\n2,70,oops\n", MatrixFormat::Csv),
             MalformedHeader);
  CHECK_CODE(parse_matrix("layout,2,4,2\n1,80\n2,70,101\n", MatrixFormat::Csv),
             ValueOutOfRange);
  CHECK_CODE(parse_matrix("layout,2,4,2\n1,80\n2,70,-0.5\n", MatrixFormat::Csv),
             ValueOutOfRange);
  CHECK_CODE(parse_matrix("layout,2,4,2\n1,80\n2,70,nan\n", MatrixFormat::Csv),
             ValueOutOfRange);
  CHECK_CODE(parse_matrix("layout,0,4,2\n", MatrixFormat::Csv), NonPositiveLayout);
  CHECK_CODE(parse_matrix("layout,2,-4,2\n1,80\n2,70,50\n", MatrixFormat::Csv),
             NonPositiveLayout);
}

TEST_CASE("json rejections carry typed codes") {
  CHECK_CODE(parse_matrix("{", MatrixFormat::Json), MalformedHeader);
  CHECK_CODE(parse_matrix("[1,2]", MatrixFormat::Json), MalformedHeader);
  CHECK_CODE(parse_matrix(R"({"layout":{"n_tasks":2},"rows":[[80],[70,50]]})",
                          MatrixFormat::Json),
             MalformedHeader);
  CHECK_CODE(parse_matrix(
                 R"({"layout":{"n_tasks":2,"base_classes":4,"novel_classes":2},"rows":[[80]]})",
                 MatrixFormat::Json),
             MalformedHeader);
  CHECK_CODE(parse_matrix(
                 R"({"layout":{"n_tasks":2,"base_classes":4,"novel_classes":2},"rows":[[80],[70]]})",
                 MatrixFormat::Json),
             RowLengthMismatch);
  CHECK_CODE(parse_matrix(
                 R"({"layout":{"n_tasks":2,"base_classes":4,"novel_classes":2},"rows":[[80],[70,"x"]]})",
                 MatrixFormat::Json),
             MalformedHeader);
  CHECK_CODE(parse_matrix(
                 R"({"layout":{"n_tasks":2,"base_classes":4,"novel_classes":2},"rows":[[80],[70,120]]})",
                 MatrixFormat::Json),
             ValueOutOfRange);
}

TEST_CASE("accessors enforce the triangular domain") {
  AccuracyMatrix m = parse_matrix(kSmallCsv, MatrixFormat::Csv);
  CHECK_CODE(m.at(0, 1), SessionOutOfRange);
  CHECK_CODE(m.at(4, 1), SessionOutOfRange);
  CHECK_CODE(m.at(2, 3), SessionOutOfRange);
  CHECK_CODE(m.set(3, 4, 1.0), SessionOutOfRange);
  CHECK_CODE(m.set(3, 3, 200.0), ValueOutOfRange);
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("layout validation rejects non-positive counts") {
  CHECK_CODE(validate_layout(TaskLayout{0, 4, 2}), NonPositiveLayout);
  CHECK_CODE(validate_layout(TaskLayout{3, 0, 2}), NonPositiveLayout);
  CHECK_CODE(validate_layout(TaskLayout{3, 4, 0}), NonPositiveLayout);
  CHECK_CODE(validate_layout(TaskLayout{3, 4, 2, 0}), NonPositiveLayout);
  CHECK_NOTHROW(validate_layout(TaskLayout{1, 1, 1}));
}

TEST_CASE("format_double round-trips exactly") {
  Rng rng = stream_rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    double v = rng.uniform(0.0, 100.0);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(85.0) == "85");
  CHECK(format_double(0.0) == "0");
}

TEST_CASE("csv emit is canonical") {
  AccuracyMatrix m = parse_matrix(kSmallCsv, MatrixFormat::Csv);
  CHECK(emit_matrix(m, MatrixFormat::Csv) == kSmallCsv);
}

}  // TEST_SUITE
