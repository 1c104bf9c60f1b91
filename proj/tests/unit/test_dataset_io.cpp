#include <sstream>

#include "dtapb/dataset_io.hpp"
#include "support.hpp"

using namespace dtapb;

namespace {

MetaDataset read(const std::string& text) {
  std::istringstream in(text);
  return read_dataset_csv(in, "test");
}

std::string error_of(const std::string& text) {
  try {
    read(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

}  // namespace

TEST(DatasetIo, ReadsCellsInColumnOrder) {
  const auto d = read("study_id,tp,fn,fp,tn\nA,45,5,10,90\n\nB,0,3,4,31\n");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.id_of(0), "A");
  const auto& t = d.studies[0];
  EXPECT_EQ(t.x, 45);
  EXPECT_EQ(t.w, 5);
  EXPECT_EQ(t.y, 10);
  EXPECT_EQ(t.z, 90);
  EXPECT_EQ(d.studies[1].x, 0);
}

TEST(DatasetIo, RoundTrip) {
  MetaDataset d;
  d.studies = {{1, 2, 3, 4}, {50, 0, 7, 900}, {12, 3, 4, 31}};
  d.study_ids = {"a", "b", "c"};
  std::ostringstream out;
  write_dataset_csv(out, d);
  const auto back = read(out.str());
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.studies[i], d.studies[i]);
    EXPECT_EQ(back.id_of(i), d.id_of(i));
  }
}

TEST(DatasetIo, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("id,a,b,c,d\n1,2,3,4,5\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("study_id,tp,fn,fp,tn\nA,1,2,3,4\nB,1,x,3,4\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("study_id,tp,fn,fp,tn\nA,1,2,3\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("study_id,tp,fn,fp,tn\nA,1,2,3,4,5\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("study_id,tp,fn,fp,tn\nA,1.5,2,3,4\n").find("line 2"), std::string::npos);
}

TEST(DatasetIo, EmptyInputFails) {
  error_of("");
  error_of("\n  \n");
  const auto header_only = read("study_id,tp,fn,fp,tn\n");
  EXPECT_EQ(header_only.size(), 0u);
  EXPECT_DTAPB_ERROR(validate_dataset(header_only), ErrorCode::TooFewStudies);
}

TEST(DatasetIo, NegativeCellsLeftToValidation) {
  const auto d = read("study_id,tp,fn,fp,tn\nA,-1,2,3,4\nB,1,2,3,4\nC,1,2,3,4\n");
  EXPECT_DTAPB_ERROR(validate_dataset(d), ErrorCode::NegativeCell);
}

TEST(DatasetIo, MissingFile) {
  EXPECT_DTAPB_ERROR(load_dataset_csv("/nonexistent/data.csv"), ErrorCode::ParseError);
}
