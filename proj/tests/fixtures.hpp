#pragma once

#include <string>
#include <vector>

#include "t2s/evaluator.hpp"
#include "t2s/schema.hpp"

namespace t2s::testing {

std::string data_path(const std::string& name);

// tests/data/tables.json
const SchemaMap& fixture_schemas();

// tests/data/corpus.jsonl
const std::vector<DatasetInstance>& corpus();

// Builds every fixture database from tests/data/db/*.sql under a fresh
// temporary directory, once per process. Returns the database directory.
const std::string& fixture_db_dir();

// A scratch directory removed at process exit.
std::string scratch_dir();

}  // namespace t2s::testing
