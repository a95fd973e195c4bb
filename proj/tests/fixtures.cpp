#include "fixtures.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "t2s/io.hpp"
#include "t2s/sqlite_db.hpp"

namespace t2s::testing {

namespace fs = std::filesystem;

std::string data_path(const std::string& name) { return (fs::path(T2S_TEST_DATA) / name).string(); }

const SchemaMap& fixture_schemas() {
  static const SchemaMap schemas = load_schemas_from_file(data_path("tables.json"));
  return schemas;
}

const std::vector<DatasetInstance>& corpus() {
  static const std::vector<DatasetInstance> instances = read_dataset(data_path("corpus.jsonl"));
  return instances;
}

namespace {

struct ScratchRoot {
  fs::path path;
  ScratchRoot() {
    std::string tmpl = (fs::temp_directory_path() / "t2s-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path = tmpl;
  }
  ~ScratchRoot() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

ScratchRoot& root() {
  static ScratchRoot r;
  return r;
}

}  // namespace

std::string scratch_dir() {
  static int counter = 0;
  fs::path p = root().path / ("scratch" + std::to_string(counter++));
  fs::create_directories(p);
  return p.string();
}

const std::string& fixture_db_dir() {
  static const std::string dir = [] {
    fs::path out = root().path / "databases";
    for (const auto& entry : fs::directory_iterator(data_path("db"))) {
      if (entry.path().extension() != ".sql") continue;
      const std::string db_id = entry.path().stem().string();
      fs::create_directories(out / db_id);
      std::ifstream in(entry.path());
      std::stringstream script;
      script << in.rdbuf();
      Database::open_read_write((out / db_id / (db_id + ".sqlite")).string()).exec_script(script.str());
    }
    return out.string();
  }();
  return dir;
}

}  // namespace t2s::testing
