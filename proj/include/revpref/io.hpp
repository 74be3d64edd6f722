// Dataset and transport-instance files. CSV schema: header id,q1..qm,p1..pm;
// JSON schema: {"dimension": m, "observations": [{"id", "quantities",
// "prices"}]}. Parsing is locale-independent; writes are atomic.
#pragma once

#include <string>
#include <vector>

#include "revpref/core.hpp"
#include "revpref/transport.hpp"

namespace revpref {

enum class FileFormat { Csv, Json };

/// Malformed input file; the message carries row/column diagnostics.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

/// Dataset plus the string ids from the file, by observation index.
struct NamedDataset {
  Dataset data;
  std::vector<std::string> ids;
};

/// By extension: .json -> Json, anything else -> Csv.
FileFormat infer_format(const std::string& path);

NamedDataset parse_dataset_text(const std::string& text, FileFormat format,
                                const std::string& origin = "<string>");
NamedDataset parse_dataset(const std::string& path, FileFormat format);
NamedDataset parse_dataset(const std::string& path);

std::string serialize_dataset(const NamedDataset& named, FileFormat format);

/// Writes via a temporary file and rename, so readers never see a partial
/// report.
void write_text_atomic(const std::string& path, const std::string& text);

/// Transport instance JSON:
/// {"kernel": "inner", "sources": [{"weight": w, "coordinates": [...]}],
///  "targets": [...]}. Only the standard inner kernel is file-addressable.
TransportInstance parse_instance_text(const std::string& text,
                                      const std::string& origin = "<string>");
TransportInstance parse_instance(const std::string& path);
bool looks_like_instance(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace revpref
