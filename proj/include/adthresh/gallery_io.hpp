#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adthresh/gallery.hpp"

namespace adthresh {

enum class FileFormat { csv, json };

/// `.json` (any case) selects JSON; everything else is CSV.
FileFormat format_for_path(const std::filesystem::path& path);

struct GalleryCounters {
  std::uint64_t change_counter = 0;
  std::uint64_t registrations_since_adapt = 0;
  std::uint64_t removals_since_adapt = 0;
};

/// Raw contents of an embedding file, rows kept in file order.
struct EmbeddingFile {
  std::size_t dimension = 0;
  std::vector<Embedding> embeddings;
  std::optional<GalleryCounters> counters;  // JSON only
};

/// CSV: header `identity,instance_id,v0,...,v{D-1}`, one row per embedding.
/// JSON: {"dimension": D, "embeddings": [{"identity", "instance_id", "vector"}]}
/// plus optional counter keys. Throws malformed_file or io_failure.
EmbeddingFile read_embedding_file(const std::filesystem::path& path);
EmbeddingFile parse_embedding_csv(const std::string& text);
EmbeddingFile parse_embedding_json(const std::string& text);

std::string to_embedding_csv(std::size_t dimension, const std::vector<Embedding>& rows);
std::string to_embedding_json(std::size_t dimension, const std::vector<Embedding>& rows,
                              const std::optional<GalleryCounters>& counters);
void write_embedding_file(const std::filesystem::path& path, std::size_t dimension,
                          const std::vector<Embedding>& rows);

/// Writes identities in label order. Format follows the path extension; JSON
/// additionally persists the gallery counters.
void save_gallery(const Gallery& gallery, const std::filesystem::path& path);

/// Builds a gallery from an embedding file. Counters come from the file when
/// present (JSON), otherwise they reflect one registration per row.
Gallery load_gallery(const std::filesystem::path& path);
Gallery gallery_from(const EmbeddingFile& file);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace adthresh
