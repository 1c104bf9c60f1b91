#pragma once

#include <iosfwd>
#include <string>

#include "dtapb/core.hpp"

namespace dtapb {

/// Reads the dataset CSV: header `study_id,tp,fn,fp,tn`, one row per study,
/// integer counts. tp/fn/fp/tn map to x/w/y/z. Errors carry the 1-based line
/// number in the message and raise ErrorCode::ParseError. Table invariants
/// are not checked here; see validate_dataset.
MetaDataset read_dataset_csv(std::istream& in, const std::string& label = {});
MetaDataset load_dataset_csv(const std::string& path);

void write_dataset_csv(std::ostream& out, const MetaDataset& dataset);

}  // namespace dtapb
