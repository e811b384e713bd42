#include "hyper/store.hpp"

#include "hyper/error.hpp"
#include "json.hpp"

namespace hyper {

namespace {

constexpr const char* kEventsFile = "events.jsonl";
constexpr const char* kChunksFile = "chunks.json";

std::string TablesToJson(const AssociationTable& table) {
  nlohmann::ordered_json j;
  j["version"] = kStoreVersion;
  j["cooc_window"] = table.window;
  j["total_events"] = table.total_events;
  j["counts"] = table.counts;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& [key, count] : table.cooc) {
    pairs.push_back({key.first, key.second, count});
  }
  j["cooc"] = std::move(pairs);
  return j.dump() + "\n";
}

std::optional<AssociationTable> TablesFromJson(const std::string& text, int cooc_window) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("version").get<std::string>() != kStoreVersion) return std::nullopt;
    if (j.at("cooc_window").get<int>() != cooc_window) return std::nullopt;
    AssociationTable table;
    table.window = cooc_window;
    table.total_events = j.at("total_events").get<std::int64_t>();
    table.counts = j.at("counts").get<std::map<ItemId, std::int64_t>>();
    for (const auto& entry : j.at("cooc")) {
      table.cooc[{entry.at(0).get<ItemId>(), entry.at(1).get<ItemId>()}] =
          entry.at(2).get<std::int64_t>();
    }
    return table;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

void SaveStore(const std::filesystem::path& dir, const ChunkStore& store) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  WriteFile(dir / kEventsFile, SerializeJsonl(store.memory()));
  WriteFile(dir / kChunksFile, TablesToJson(store.associations()));
}

ChunkStore LoadStore(const std::filesystem::path& dir, int cooc_window) {
  auto log = ParseJsonlLog(ReadFile(dir / kEventsFile));
  std::optional<AssociationTable> tables;
  if (std::filesystem::exists(dir / kChunksFile)) {
    tables = TablesFromJson(ReadFile(dir / kChunksFile), cooc_window);
  }
  if (!tables) tables = AssociationTable::Build(log, cooc_window);
  return ChunkStore(std::move(log), std::move(*tables));
}

}  // namespace hyper
