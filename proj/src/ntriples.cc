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

#include "deltald/ntriples.h"

#include <zlib.h>

#include <cctype>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>

#include "deltald/errors.h"

namespace deltald {

namespace {

void AppendUtf8(std::string &out, uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool IsBlankLabelChar(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '_' || c == '-' || c == '.' || u >= 0x80;
}

// Recursive-descent scanner over one statement line.
class Scanner {
 public:
  explicit Scanner(std::string_view text) : s_(text) {}

  void SkipSpace() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool AtEnd() const { return pos_ >= s_.size(); }
  char Peek() const { return AtEnd() ? '\0' : s_[pos_]; }
  bool Consume(char c) {
    if (Peek() != c) return false;
    ++pos_;
    return true;
  }

  // Reads `<...>` and returns the unescaped IRI.
  std::optional<Iri> ReadIri() {
    if (!Consume('<')) return std::nullopt;
    std::string value;
    while (!AtEnd() && s_[pos_] != '>') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (!ReadUnicodeEscape(value)) return std::nullopt;
      } else {
        value += c;
      }
    }
    if (!Consume('>') || !Iri::IsValid(value)) return std::nullopt;
    return Iri(std::move(value));
  }

  std::optional<std::string> ReadBlankLabel() {
    if (!Consume('_') || !Consume(':')) return std::nullopt;
    size_t start = pos_;
    while (!AtEnd() && IsBlankLabelChar(s_[pos_])) ++pos_;
    // Labels may not end with '.'; give trailing dots back to the caller.
    while (pos_ > start && s_[pos_ - 1] == '.') --pos_;
    if (pos_ == start || s_[start] == '-' || s_[start] == '.') {
      return std::nullopt;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  std::optional<Term> ReadLiteral() {
    if (!Consume('"')) return std::nullopt;
    std::string lexical;
    for (;;) {
      if (AtEnd()) return std::nullopt;
      char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\n' || c == '\r') return std::nullopt;
      if (c != '\\') {
        lexical += c;
        continue;
      }
      if (AtEnd()) return std::nullopt;
      char e = s_[pos_++];
      switch (e) {
        case 't': lexical += '\t'; break;
        case 'b': lexical += '\b'; break;
        case 'n': lexical += '\n'; break;
        case 'r': lexical += '\r'; break;
        case 'f': lexical += '\f'; break;
        case '"': lexical += '"'; break;
        case '\'': lexical += '\''; break;
        case '\\': lexical += '\\'; break;
        case 'u':
        case 'U':
          --pos_;
          if (!ReadUnicodeEscape(lexical)) return std::nullopt;
          break;
        default:
          return std::nullopt;
      }
    }
    if (Consume('@')) {
      size_t start = pos_;
      while (!AtEnd() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == start) return std::nullopt;
      while (Peek() == '-') {
        size_t sub = ++pos_;
        while (!AtEnd() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == sub) return std::nullopt;
      }
      return Term::Literal(lexical, s_.substr(start, pos_ - start));
    }
    if (Consume('^')) {
      if (!Consume('^')) return std::nullopt;
      auto dt = ReadIri();
      if (!dt) return std::nullopt;
      return Term::Literal(lexical, {}, *dt);
    }
    return Term::Literal(lexical);
  }

  std::optional<Term> ReadObject(std::string_view blank_scope) {
    switch (Peek()) {
      case '<': {
        auto iri = ReadIri();
        if (!iri) return std::nullopt;
        return Term(*iri);
      }
      case '"':
        return ReadLiteral();
      case '_': {
        auto label = ReadBlankLabel();
        if (!label) return std::nullopt;
        return Term::Blank(*label, blank_scope);
      }
      default:
        return std::nullopt;
    }
  }

 private:
  // Expects the scanner to sit on 'u' or 'U' (the backslash consumed).
  bool ReadUnicodeEscape(std::string &out) {
    if (AtEnd()) return false;
    char kind = s_[pos_++];
    size_t digits = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
    if (digits == 0 || pos_ + digits > s_.size()) return false;
    uint32_t cp = 0;
    for (size_t i = 0; i < digits; ++i) {
      char h = s_[pos_++];
      cp <<= 4;
      if (h >= '0' && h <= '9') cp |= static_cast<uint32_t>(h - '0');
      else if (h >= 'a' && h <= 'f') cp |= static_cast<uint32_t>(h - 'a' + 10);
      else if (h >= 'A' && h <= 'F') cp |= static_cast<uint32_t>(h - 'A' + 10);
      else return false;
    }
    if (cp > 0x10FFFF) return false;
    AppendUtf8(out, cp);
    return true;
  }

  std::string_view s_;
  size_t pos_ = 0;
};

class StatementCollector {
 public:
  StatementCollector(std::string version_id, const ParseOptions &options)
      : version_id_(std::move(version_id)), options_(options) {}

  void Feed(std::string_view line) {
    ++report_.lines;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    Scanner sc(line);
    sc.SkipSpace();
    if (sc.AtEnd() || sc.Peek() == '#') return;

    if (sc.Peek() == '_') {
      Reject(ParseError::Kind::kBlankNodeSubject, "blank-node subject");
      return;
    }
    auto subject = sc.ReadIri();
    if (!subject) return Reject(ParseError::Kind::kMalformedLine, "bad subject");
    sc.SkipSpace();
    auto predicate = sc.ReadIri();
    if (!predicate) {
      return Reject(ParseError::Kind::kMalformedLine, "bad predicate");
    }
    sc.SkipSpace();
    auto object = sc.ReadObject(version_id_);
    if (!object) return Reject(ParseError::Kind::kMalformedLine, "bad object");
    sc.SkipSpace();
    if (!sc.Consume('.')) {
      return Reject(ParseError::Kind::kMalformedLine, "missing '.'");
    }
    sc.SkipSpace();
    if (!sc.AtEnd() && sc.Peek() != '#') {
      return Reject(ParseError::Kind::kMalformedLine, "trailing content");
    }
    ++report_.statements;
    subjects_[*subject].push_back({std::move(*predicate), std::move(*object)});
  }

  ParseResult Finish() {
    return {DatasetVersion::FromDescriptions(version_id_, std::move(subjects_)),
            std::move(report_)};
  }

 private:
  void Reject(ParseError::Kind kind, const char *detail) {
    if (options_.strict) throw ParseError(kind, report_.lines, detail);
    if (kind == ParseError::Kind::kBlankNodeSubject) {
      ++report_.blank_subjects;
    } else {
      ++report_.malformed;
    }
    if (report_.skipped_lines.size() < ParseReport::kMaxRecordedLines) {
      report_.skipped_lines.push_back(report_.lines);
    }
  }

  std::string version_id_;
  ParseOptions options_;
  ParseReport report_;
  std::map<Iri, Description> subjects_;
};

struct GzCloser {
  void operator()(gzFile_s *f) const { gzclose(f); }
};

}  // namespace

ParseResult ParseNTriples(std::istream &in, std::string version_id,
                          const ParseOptions &options) {
  StatementCollector collector(std::move(version_id), options);
  std::string line;
  while (std::getline(in, line)) collector.Feed(line);
  return collector.Finish();
}

ParseResult ParseNTriplesString(std::string_view text, std::string version_id,
                                const ParseOptions &options) {
  StatementCollector collector(std::move(version_id), options);
  while (!text.empty()) {
    size_t nl = text.find('\n');
    collector.Feed(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return collector.Finish();
}

ParseResult LoadNTriplesFile(const std::filesystem::path &path,
                             std::string version_id,
                             const ParseOptions &options) {
  // gzread passes uncompressed input through unchanged, so one code path
  // serves both plain and gzip files.
  std::unique_ptr<gzFile_s, GzCloser> file(gzopen(path.c_str(), "rb"));
  if (!file || !std::filesystem::is_regular_file(path)) {
    throw Error("cannot open '" + path.string() + "'");
  }
  StatementCollector collector(std::move(version_id), options);
  std::string pending;
  std::vector<char> buf(1 << 16);
  for (;;) {
    int n = gzread(file.get(), buf.data(), static_cast<unsigned>(buf.size()));
    if (n < 0) throw Error("read error in '" + path.string() + "'");
    if (n == 0) break;
    pending.append(buf.data(), static_cast<size_t>(n));
    size_t start = 0;
    for (size_t nl; (nl = pending.find('\n', start)) != std::string::npos;
         start = nl + 1) {
      collector.Feed(std::string_view(pending).substr(start, nl - start));
    }
    pending.erase(0, start);
  }
  if (!pending.empty()) collector.Feed(pending);
  return collector.Finish();
}

void WriteNTriples(std::ostream &out, const DatasetVersion &dataset) {
  for (const auto &[subject, desc] : dataset.subjects()) {
    const std::string s = subject.ToNTriples();
    for (const auto &po : desc) {
      out << s << ' ' << po.predicate.ToNTriples() << ' ' << po.object.token()
          << " .\n";
    }
  }
}

std::string SerializeNTriples(const DatasetVersion &dataset) {
  std::ostringstream out;
  WriteNTriples(out, dataset);
  return out.str();
}

void SaveNTriplesFile(const std::filesystem::path &path,
                      const DatasetVersion &dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  WriteNTriples(out, dataset);
}

std::optional<Term> ParseTermToken(std::string_view token,
                                   std::string_view blank_scope) {
  Scanner sc(token);
  auto term = sc.ReadObject(blank_scope);
  if (!term || !sc.AtEnd()) return std::nullopt;
  return term;
}

std::optional<Iri> ParseIriToken(std::string_view token) {
  Scanner sc(token);
  auto iri = sc.ReadIri();
  if (!iri || !sc.AtEnd()) return std::nullopt;
  return iri;
}

}  // namespace deltald
