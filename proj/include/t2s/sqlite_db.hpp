#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "t2s/error.hpp"

struct sqlite3;

namespace t2s {

struct Blob {
  std::string bytes;
  bool operator==(const Blob&) const = default;
};

using Value = std::variant<std::monostate, std::int64_t, double, std::string, Blob>;
using Row = std::vector<Value>;

// Total order used for multiset comparison: null < numbers < text < blobs.
// Integers and reals compare by numeric value.
int compare(const Value& a, const Value& b);
int compare(const Row& a, const Row& b);

std::string to_display(const Value& v);

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

// Rows equal as multisets, or as sequences when `ordered`.
bool same_rows(const ResultSet& a, const ResultSet& b, bool ordered);

class QueryTimeout : public DatabaseError {
 public:
  using DatabaseError::DatabaseError;
};

// One SQLite connection. Not thread-safe; give each worker its own.
class Database {
 public:
  static Database open_read_only(const std::string& path);
  // Creates the file if needed. Used to build fixtures.
  static Database open_read_write(const std::string& path);

  Database(Database&&) noexcept = default;
  Database& operator=(Database&&) noexcept = default;
  ~Database();

  // Runs a single statement to completion. Throws DatabaseError on failure
  // and QueryTimeout when `timeout` elapses first.
  ResultSet query(std::string_view sql, std::chrono::milliseconds timeout) const;

  // Runs a semicolon-separated script.
  void exec_script(const std::string& script);

  const std::string& path() const { return path_; }

 private:
  struct Closer {
    void operator()(sqlite3* db) const;
  };
  Database(std::unique_ptr<sqlite3, Closer> db, std::string path)
      : db_(std::move(db)), path_(std::move(path)) {}

  std::unique_ptr<sqlite3, Closer> db_;
  std::string path_;
};

inline constexpr std::chrono::milliseconds kDefaultTimeout{30'000};

}  // namespace t2s
