#include "dtapb/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace dtapb {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  out.push_back(cell);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::int64_t parse_count(const std::string& s, std::size_t line, const char* column) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    fail(line, std::string("column '") + column + "' is not an integer: '" + s + "'");
  }
  return v;
}

}  // namespace

MetaDataset read_dataset_csv(std::istream& in, const std::string& label) {
  MetaDataset ds;
  ds.label = label;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_row(line);
    if (!header_seen) {
      const std::vector<std::string> expected{"study_id", "tp", "fn", "fp", "tn"};
      if (cells != expected) fail(lineno, "expected header 'study_id,tp,fn,fp,tn'");
      header_seen = true;
      continue;
    }
    if (cells.size() != 5) fail(lineno, "expected 5 columns, got " + std::to_string(cells.size()));
    StudyTable t;
    t.x = parse_count(cells[1], lineno, "tp");
    t.w = parse_count(cells[2], lineno, "fn");
    t.y = parse_count(cells[3], lineno, "fp");
    t.z = parse_count(cells[4], lineno, "tn");
    ds.studies.push_back(t);
    ds.study_ids.push_back(cells[0]);
  }
  if (!header_seen) fail(lineno == 0 ? 1 : lineno, "empty input, expected header");
  return ds;
}

MetaDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  return read_dataset_csv(in, path);
}

void write_dataset_csv(std::ostream& out, const MetaDataset& dataset) {
  out << "study_id,tp,fn,fp,tn\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& t = dataset.studies[i];
    out << dataset.id_of(i) << ',' << t.x << ',' << t.w << ',' << t.y << ',' << t.z << '\n';
  }
}

}  // namespace dtapb
