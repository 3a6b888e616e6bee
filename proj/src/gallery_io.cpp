#include "adthresh/gallery_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adthresh/error.hpp"
#include "adthresh/real_format.hpp"
#include "csv.hpp"

namespace adthresh {

using json = nlohmann::json;

FileFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".json" ? FileFormat::json : FileFormat::csv;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io_failure, "read failed: " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw Error(ErrorCode::io_failure, "write failed: " + path.string());
}

EmbeddingFile parse_embedding_csv(const std::string& text) {
  const auto records = csv::parse(text);
  if (records.empty()) throw Error(ErrorCode::malformed_file, "missing CSV header");

  const auto& header = records.front();
  if (header.size() < 4 || header[0] != "identity" || header[1] != "instance_id") {
    throw Error(ErrorCode::malformed_file,
                "header must read identity,instance_id,v0,...,v{D-1} with D >= 2");
  }
  EmbeddingFile file;
  file.dimension = header.size() - 2;
  for (std::size_t k = 0; k < file.dimension; ++k) {
    if (header[k + 2] != "v" + std::to_string(k)) {
      throw Error(ErrorCode::malformed_file, "unexpected header column '" + header[k + 2] + "'");
    }
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::malformed_file,
                  "row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    Embedding e{row[1], row[0], {}};
    e.vector.reserve(file.dimension);
    for (std::size_t k = 0; k < file.dimension; ++k) {
      auto v = parse_real(row[k + 2]);
      if (!v) {
        throw Error(ErrorCode::malformed_file,
                    "row " + std::to_string(r) + ": '" + row[k + 2] + "' is not a number");
      }
      e.vector.push_back(*v);
    }
    file.embeddings.push_back(std::move(e));
  }
  return file;
}

EmbeddingFile parse_embedding_json(const std::string& text) {
  EmbeddingFile file;
  try {
    const json doc = json::parse(text);
    file.dimension = doc.at("dimension").get<std::size_t>();
    for (const auto& item : doc.at("embeddings")) {
      Embedding e{item.at("instance_id").get<std::string>(), item.at("identity").get<std::string>(),
                  item.at("vector").get<std::vector<double>>()};
      if (e.vector.size() != file.dimension) {
        throw Error(ErrorCode::malformed_file,
                    "embedding " + e.instance_id + " has " + std::to_string(e.vector.size()) +
                        " components, declared dimension is " + std::to_string(file.dimension));
      }
      file.embeddings.push_back(std::move(e));
    }
    if (doc.contains("change_counter")) {
      GalleryCounters c;
      c.change_counter = doc.at("change_counter").get<std::uint64_t>();
      c.registrations_since_adapt = doc.value("registrations_since_adapt", std::uint64_t{0});
      c.removals_since_adapt = doc.value("removals_since_adapt", std::uint64_t{0});
      file.counters = c;
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::malformed_file, ex.what());
  }
  return file;
}

EmbeddingFile read_embedding_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return format_for_path(path) == FileFormat::json ? parse_embedding_json(text)
                                                   : parse_embedding_csv(text);
}

std::string to_embedding_csv(std::size_t dimension, const std::vector<Embedding>& rows) {
  std::string out = "identity,instance_id";
  for (std::size_t k = 0; k < dimension; ++k) out += ",v" + std::to_string(k);
  out += '\n';
  for (const auto& e : rows) {
    out += csv::escape(e.identity);
    out += ',';
    out += csv::escape(e.instance_id);
    for (double v : e.vector) {
      out += ',';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

std::string to_embedding_json(std::size_t dimension, const std::vector<Embedding>& rows,
                              const std::optional<GalleryCounters>& counters) {
  // Written by hand so every real carries 17 significant digits.
  std::string out = "{\n  \"dimension\": " + std::to_string(dimension) + ",\n";
  if (counters) {
    out += "  \"change_counter\": " + std::to_string(counters->change_counter) + ",\n";
    out += "  \"registrations_since_adapt\": " +
           std::to_string(counters->registrations_since_adapt) + ",\n";
    out += "  \"removals_since_adapt\": " + std::to_string(counters->removals_since_adapt) +
           ",\n";
  }
  out += "  \"embeddings\": [";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& e = rows[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"identity\": " + json(e.identity).dump() +
           ", \"instance_id\": " + json(e.instance_id).dump() + ", \"vector\": [";
    for (std::size_t k = 0; k < e.vector.size(); ++k) {
      if (k) out += ", ";
      out += format_real(e.vector[k]);
    }
    out += "]}";
  }
  out += rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

void write_embedding_file(const std::filesystem::path& path, std::size_t dimension,
                          const std::vector<Embedding>& rows) {
  write_text_file(path, format_for_path(path) == FileFormat::json
                            ? to_embedding_json(dimension, rows, std::nullopt)
                            : to_embedding_csv(dimension, rows));
}

void save_gallery(const Gallery& gallery, const std::filesystem::path& path) {
  std::vector<Embedding> rows;
  rows.reserve(gallery.embedding_count());
  for (const auto& [label, embeddings] : gallery.identities()) {
    rows.insert(rows.end(), embeddings.begin(), embeddings.end());
  }
  if (format_for_path(path) == FileFormat::json) {
    GalleryCounters c{gallery.change_counter(), gallery.registrations_since_adapt(),
                      gallery.removals_since_adapt()};
    write_text_file(path, to_embedding_json(gallery.dimension(), rows, c));
  } else {
    write_text_file(path, to_embedding_csv(gallery.dimension(), rows));
  }
}

Gallery gallery_from(const EmbeddingFile& file) {
  if (file.dimension < 2) {
    throw Error(ErrorCode::malformed_file, "declared dimension must be at least 2");
  }
  Gallery gallery(file.dimension);
  for (const auto& e : file.embeddings) {
    try {
      gallery.insert(e);
    } catch (const Error& ex) {
      throw Error(ErrorCode::malformed_file, "embedding " + e.instance_id + ": " + ex.what());
    }
  }
  if (file.counters) {
    gallery.restore_counters(file.counters->change_counter,
                             file.counters->registrations_since_adapt,
                             file.counters->removals_since_adapt);
  }
  return gallery;
}

Gallery load_gallery(const std::filesystem::path& path) {
  return gallery_from(read_embedding_file(path));
}

}  // namespace adthresh
