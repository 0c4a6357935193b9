#pragma once

#include <filesystem>
#include <string>

namespace reloc {

// Whole-file read. Throws InputError when the file is missing or unreadable.
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`. Throws
// OutputError on any failure; `path` is left untouched in that case.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace reloc
