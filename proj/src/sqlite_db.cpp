#include "t2s/sqlite_db.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <sqlite3.h>

#include "t2s/text.hpp"

namespace t2s {

namespace {

int type_rank(const Value& v) {
  switch (v.index()) {
    case 0: return 0;
    case 1:
    case 2: return 1;
    case 3: return 2;
    default: return 3;
  }
}

long double numeric(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<long double>(*i);
  return static_cast<long double>(std::get<double>(v));
}

template <class T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

int compare(const Value& a, const Value& b) {
  const int ra = type_rank(a), rb = type_rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (ra) {
    case 0: return 0;
    case 1: return three_way(numeric(a), numeric(b));
    case 2: return three_way(std::get<std::string>(a), std::get<std::string>(b));
    default: return three_way(std::get<Blob>(a).bytes, std::get<Blob>(b).bytes);
  }
}

int compare(const Row& a, const Row& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a[i], b[i])) return c;
  return three_way(a.size(), b.size());
}

std::string to_display(const Value& v) {
  switch (v.index()) {
    case 0: return "NULL";
    case 1: return std::to_string(std::get<std::int64_t>(v));
    case 2: {
      std::ostringstream os;
      os << std::setprecision(15) << std::get<double>(v);
      return os.str();
    }
    case 3: return std::get<std::string>(v);
    default: return "<blob>";
  }
}

bool same_rows(const ResultSet& a, const ResultSet& b, bool ordered) {
  if (a.rows.size() != b.rows.size()) return false;
  std::vector<Row> x = a.rows, y = b.rows;
  if (!ordered) {
    auto less = [](const Row& l, const Row& r) { return compare(l, r) < 0; };
    std::sort(x.begin(), x.end(), less);
    std::sort(y.begin(), y.end(), less);
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    if (compare(x[i], y[i]) != 0) return false;
  return true;
}

void Database::Closer::operator()(sqlite3* db) const { sqlite3_close_v2(db); }

Database::~Database() = default;

namespace {

std::unique_ptr<sqlite3, void (*)(sqlite3*)> open_raw(const std::string& uri, int flags) {
  sqlite3* raw = nullptr;
  const int rc = sqlite3_open_v2(uri.c_str(), &raw, flags | SQLITE_OPEN_URI, nullptr);
  std::unique_ptr<sqlite3, void (*)(sqlite3*)> handle(raw, [](sqlite3* d) { sqlite3_close_v2(d); });
  if (rc != SQLITE_OK)
    throw DatabaseError("cannot open database '" + uri + "': " +
                        (raw ? sqlite3_errmsg(raw) : sqlite3_errstr(rc)));
  return handle;
}

struct Deadline {
  std::chrono::steady_clock::time_point at;
  bool expired = false;
};

int progress_callback(void* arg) {
  auto* d = static_cast<Deadline*>(arg);
  if (std::chrono::steady_clock::now() >= d->at) {
    d->expired = true;
    return 1;
  }
  return 0;
}

}  // namespace

Database Database::open_read_only(const std::string& path) {
  auto h = open_raw("file:" + path + "?mode=ro", SQLITE_OPEN_READONLY);
  return Database(std::unique_ptr<sqlite3, Closer>(h.release()), path);
}

Database Database::open_read_write(const std::string& path) {
  auto h = open_raw("file:" + path, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
  return Database(std::unique_ptr<sqlite3, Closer>(h.release()), path);
}

ResultSet Database::query(std::string_view sql, std::chrono::milliseconds timeout) const {
  sqlite3* db = db_.get();
  sqlite3_stmt* raw = nullptr;
  const char* tail = nullptr;
  if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &raw, &tail) != SQLITE_OK)
    throw DatabaseError(sqlite3_errmsg(db));
  std::unique_ptr<sqlite3_stmt, int (*)(sqlite3_stmt*)> stmt(raw, sqlite3_finalize);
  if (!stmt) throw DatabaseError("empty statement");
  const std::string rest = tail ? trim(std::string_view(tail, sql.data() + sql.size() - tail)) : "";
  if (!rest.empty() && rest != ";")
    throw DatabaseError("only one statement may be executed");

  Deadline deadline{std::chrono::steady_clock::now() + timeout};
  sqlite3_progress_handler(db, 1000, progress_callback, &deadline);
  struct Reset {
    sqlite3* db;
    ~Reset() { sqlite3_progress_handler(db, 0, nullptr, nullptr); }
  } reset{db};

  ResultSet rs;
  const int ncol = sqlite3_column_count(stmt.get());
  for (int c = 0; c < ncol; ++c) rs.columns.emplace_back(sqlite3_column_name(stmt.get(), c));
  for (;;) {
    const int rc = sqlite3_step(stmt.get());
    if (rc == SQLITE_DONE) break;
    if (rc != SQLITE_ROW) {
      if (deadline.expired) throw QueryTimeout("query exceeded " + std::to_string(timeout.count()) + " ms");
      throw DatabaseError(sqlite3_errmsg(db));
    }
    Row row;
    row.reserve(static_cast<std::size_t>(ncol));
    for (int c = 0; c < ncol; ++c) {
      switch (sqlite3_column_type(stmt.get(), c)) {
        case SQLITE_INTEGER: row.emplace_back(static_cast<std::int64_t>(sqlite3_column_int64(stmt.get(), c))); break;
        case SQLITE_FLOAT: row.emplace_back(sqlite3_column_double(stmt.get(), c)); break;
        case SQLITE_TEXT: {
          const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), c));
          row.emplace_back(std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt.get(), c))));
          break;
        }
        case SQLITE_BLOB: {
          const auto* p = static_cast<const char*>(sqlite3_column_blob(stmt.get(), c));
          const auto n = static_cast<std::size_t>(sqlite3_column_bytes(stmt.get(), c));
          row.emplace_back(Blob{p ? std::string(p, n) : std::string()});
          break;
        }
        default: row.emplace_back(std::monostate{}); break;
      }
    }
    rs.rows.push_back(std::move(row));
  }
  return rs;
}

void Database::exec_script(const std::string& script) {
  char* err = nullptr;
  if (sqlite3_exec(db_.get(), script.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw DatabaseError("script failed: " + msg);
  }
}

}  // namespace t2s
