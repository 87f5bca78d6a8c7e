// Copyright 2026 The deltald Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-oriented N-Triples reader and writer.

#ifndef DELTALD_NTRIPLES_H_
#define DELTALD_NTRIPLES_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deltald/rdf.h"

namespace deltald {

struct ParseOptions {
  // Abort on the first bad line instead of skipping it.
  bool strict = false;
};

struct ParseReport {
  std::size_t lines = 0;
  std::size_t statements = 0;  // accepted statements, before deduplication
  std::size_t malformed = 0;
  std::size_t blank_subjects = 0;
  // Line numbers (1-based) of skipped lines, capped at kMaxRecordedLines.
  std::vector<std::size_t> skipped_lines;

  static constexpr std::size_t kMaxRecordedLines = 100;
};

struct ParseResult {
  DatasetVersion dataset;
  ParseReport report;
};

ParseResult ParseNTriples(std::istream &in, std::string version_id,
                          const ParseOptions &options = {});
ParseResult ParseNTriplesString(std::string_view text, std::string version_id,
                                const ParseOptions &options = {});

// Reads a plain or gzip-compressed file (detected by magic bytes).
// Throws Error if the file cannot be opened.
ParseResult LoadNTriplesFile(const std::filesystem::path &path,
                             std::string version_id,
                             const ParseOptions &options = {});

void WriteNTriples(std::ostream &out, const DatasetVersion &dataset);
std::string SerializeNTriples(const DatasetVersion &dataset);
void SaveNTriplesFile(const std::filesystem::path &path,
                      const DatasetVersion &dataset);

// Parses a single term token (`<iri>`, literal, or `_:label`). Blank nodes
// get `blank_scope`. Returns nullopt for anything that is not exactly one
// well-formed token.
std::optional<Term> ParseTermToken(std::string_view token,
                                   std::string_view blank_scope = {});
std::optional<Iri> ParseIriToken(std::string_view token);

}  // namespace deltald

#endif  // DELTALD_NTRIPLES_H_
