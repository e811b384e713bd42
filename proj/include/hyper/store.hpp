#pragma once

#include <filesystem>

#include "hyper/declarative.hpp"

namespace hyper {

/// Bumped whenever the derived-table layout changes.
inline constexpr const char* kStoreVersion = "hyper-store/1";

/// Writes events.jsonl and chunks.json into dir (created if missing).
void SaveStore(const std::filesystem::path& dir, const ChunkStore& store);

/**
 * @brief Loads a store written by SaveStore.
 *
 * Derived tables are rebuilt from events.jsonl when their version tag or
 * window differs from what is requested, or when chunks.json is unreadable.
 */
ChunkStore LoadStore(const std::filesystem::path& dir, int cooc_window);

}  // namespace hyper
