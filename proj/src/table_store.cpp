#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qslimit/tables.hpp"

namespace qslimit {

using ordered_json = nlohmann::ordered_json;

std::filesystem::path cache_path(const std::filesystem::path& dir, std::uint64_t n) {
  return dir / ("counts_" + std::to_string(n) + ".json");
}

std::string serialize_table(const CountTable& table) {
  const SupportBounds b = support_bounds(table.n());
  ordered_json record;
  record["format_version"] = kCacheFormatVersion;
  record["n"] = table.n();
  record["m_n"] = b.m_n;
  record["M_n"] = b.M_n;
  auto counts = ordered_json::array();
  for (const auto& c : table.counts()) counts.push_back(to_string(c));
  record["counts"] = std::move(counts);
  record["total"] = to_string(table.total());
  return record.dump() + "\n";
}

CountTable deserialize_table(const std::string& text, std::uint64_t expected_n) {
  ordered_json record;
  try {
    record = ordered_json::parse(text);
    if (record.at("format_version").get<int>() != kCacheFormatVersion) {
      throw TableInvariantError("unsupported cache format version " + record.at("format_version").dump());
    }
    const auto n = record.at("n").get<std::uint64_t>();
    if (n != expected_n) throw TableInvariantError("record holds n = " + std::to_string(n));
    const SupportBounds b = support_bounds(n);
    if (record.at("m_n").get<std::uint64_t>() != b.m_n || record.at("M_n").get<std::uint64_t>() != b.M_n) {
      throw TableInvariantError("support bounds in record do not match m_n/M_n");
    }
    std::vector<BigCount> counts;
    for (const auto& c : record.at("counts")) {
      const auto s = c.get<std::string>();
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw TableInvariantError("count '" + s + "' is not a decimal integer");
      }
      counts.emplace_back(s, 10);
    }
    if (counts.size() != b.M_n - b.m_n + 1) throw TableInvariantError("wrong number of counts");
    CountTable table(n, b.m_n, std::move(counts));
    if (BigCount(record.at("total").get<std::string>(), 10) != table.total()) {
      throw TableInvariantError("recorded total differs from the sum of counts");
    }
    validate_table(table);
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw TableInvariantError(std::string("malformed cache record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw TableInvariantError(std::string("malformed cache record: ") + e.what());
  }
}

TableStore::TableStore(BuildOptions options, std::optional<std::filesystem::path> cache_dir, Warning warn)
    : options_(options), cache_dir_(std::move(cache_dir)), warn_(std::move(warn)) {
  if (cache_dir_) std::filesystem::create_directories(*cache_dir_);
}

std::uint64_t TableStore::available() const {
  std::lock_guard lock(mutex_);
  return tables_.size();
}

const CountTable& TableStore::get(std::uint64_t n) {
  std::lock_guard lock(mutex_);
  while (tables_.size() <= n) {
    const std::uint64_t next = tables_.size();
    std::optional<CountTable> table;
    if (cache_dir_) {
      const auto path = cache_path(*cache_dir_, next);
      if (std::ifstream in(path); in) {
        std::stringstream buf;
        buf << in.rdbuf();
        try {
          table = deserialize_table(buf.str(), next);
          ++loaded_;
        } catch (const TableInvariantError& e) {
          if (warn_) warn_("cache record " + path.string() + " rejected (" + e.what() + "); rebuilding");
        }
      }
    }
    if (!table) {
      table = extend_table(std::span<const CountTable* const>(index_), options_);
      validate_table(*table);
      ++computed_;
      if (cache_dir_) {
        const auto path = cache_path(*cache_dir_, next);
        auto tmp = path;
        tmp += ".tmp";
        {
          std::ofstream out(tmp, std::ios::trunc);
          out << serialize_table(*table);
        }
        std::filesystem::rename(tmp, path);
      }
    }
    tables_.push_back(std::move(*table));
    index_.push_back(&tables_.back());
  }
  return tables_[n];
}

}  // namespace qslimit
