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

#include "deltald/rdf.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "deltald/errors.h"

namespace deltald {

namespace {

bool IsSchemeStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

bool IsSchemeChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '+' ||
         c == '-' || c == '.';
}

// Position just past the closing quote of a literal token.
size_t LiteralEnd(const std::string &token) {
  size_t i = 1;
  while (i < token.size()) {
    if (token[i] == '\\') {
      i += 2;
      continue;
    }
    if (token[i] == '"') return i + 1;
    ++i;
  }
  return token.size();
}

}  // namespace

// ---------------------------------------------------------------------------
// Iri

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!IsValid(value_)) {
    throw std::invalid_argument("invalid IRI: '" + value_ + "'");
  }
}

bool Iri::IsValid(std::string_view value) {
  if (value.empty() || !IsSchemeStart(value[0])) return false;
  size_t colon = std::string_view::npos;
  for (size_t i = 0; i < value.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(value[i]);
    if (c <= 0x20) return false;
    switch (c) {
      case '<': case '>': case '"': case '{': case '}':
      case '|': case '^': case '`': case '\\':
        return false;
      default:
        break;
    }
    if (colon == std::string_view::npos) {
      if (c == ':') {
        colon = i;
      } else if (!IsSchemeChar(static_cast<char>(c))) {
        return false;
      }
    }
  }
  return colon != std::string_view::npos && colon > 0;
}

std::strong_ordering operator<=>(const Iri &a, const Iri &b) {
  const std::string &x = a.value_;
  const std::string &y = b.value_;
  size_t n = std::min(x.size(), y.size());
  for (size_t i = 0; i < n; ++i) {
    if (x[i] != y[i]) {
      return static_cast<unsigned char>(x[i]) <=> static_cast<unsigned char>(y[i]);
    }
  }
  if (x.size() == y.size()) return std::strong_ordering::equal;
  // One value is a prefix of the other: compare the terminator '>' with the
  // next character of the longer value.
  if (x.size() < y.size()) {
    return static_cast<unsigned char>('>') <=> static_cast<unsigned char>(y[n]);
  }
  return static_cast<unsigned char>(x[n]) <=> static_cast<unsigned char>('>');
}

// ---------------------------------------------------------------------------
// Term

std::string EscapeLiteral(std::string_view lexical) {
  std::string out;
  out.reserve(lexical.size() + 2);
  for (char c : lexical) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

Term::Term(const Iri &iri) : token_(iri.ToNTriples()) {}

Term Term::Literal(std::string_view lexical, std::string_view language,
                   const std::optional<Iri> &datatype) {
  std::string token = "\"" + EscapeLiteral(lexical) + "\"";
  if (!language.empty()) {
    token += "@";
    token += language;
  } else if (datatype) {
    token += "^^" + datatype->ToNTriples();
  }
  return Term(std::move(token), "");
}

Term Term::Blank(std::string_view label, std::string_view scope) {
  return Term("_:" + std::string(label), std::string(scope));
}

Term::Kind Term::kind() const {
  switch (token_.empty() ? '\0' : token_[0]) {
    case '<': return Kind::kIri;
    case '_': return Kind::kBlank;
    default: return Kind::kLiteral;
  }
}

Iri Term::AsIri() const {
  if (!is_iri()) throw std::logic_error("term is not an IRI: " + token_);
  return Iri(token_.substr(1, token_.size() - 2), Iri::Unchecked{});
}

std::string Term::lexical_form() const {
  if (!is_literal()) return {};
  size_t end = LiteralEnd(token_);
  std::string out;
  for (size_t i = 1; i + 1 < end; ++i) {
    char c = token_[i];
    if (c == '\\' && i + 2 < end) {
      char e = token_[++i];
      switch (e) {
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        default: out += e;
      }
    } else {
      out += c;
    }
  }
  return out;
}

std::string Term::language() const {
  if (!is_literal()) return {};
  size_t end = LiteralEnd(token_);
  if (end < token_.size() && token_[end] == '@') return token_.substr(end + 1);
  return {};
}

std::optional<Iri> Term::datatype() const {
  if (!is_literal()) return std::nullopt;
  size_t end = LiteralEnd(token_);
  if (end + 2 < token_.size() && token_[end] == '^') {
    return Iri(token_.substr(end + 3, token_.size() - end - 4), Iri::Unchecked{});
  }
  return std::nullopt;
}

std::string Triple::ToNTriples() const {
  return subject.ToNTriples() + " " + predicate.ToNTriples() + " " +
         object.token() + " .";
}

// ---------------------------------------------------------------------------
// DatasetVersion

DatasetVersion DatasetVersion::FromTriples(std::string version_id,
                                           std::vector<Triple> triples) {
  std::map<Iri, Description> subjects;
  for (auto &t : triples) {
    subjects[t.subject].push_back({std::move(t.predicate), std::move(t.object)});
  }
  return FromDescriptions(std::move(version_id), std::move(subjects));
}

DatasetVersion DatasetVersion::FromDescriptions(
    std::string version_id, std::map<Iri, Description> subjects) {
  DatasetVersion d;
  d.id_ = std::move(version_id);
  for (auto it = subjects.begin(); it != subjects.end();) {
    Description &desc = it->second;
    std::sort(desc.begin(), desc.end());
    desc.erase(std::unique(desc.begin(), desc.end()), desc.end());
    if (desc.empty()) {
      it = subjects.erase(it);
    } else {
      d.triple_count_ += desc.size();
      ++it;
    }
  }
  d.subjects_ = std::move(subjects);
  d.BuildConceptIndex();
  return d;
}

void DatasetVersion::BuildConceptIndex() {
  const Iri type_iri{std::string(kRdfType)};
  const Iri untyped{std::string(kUntypedConcept)};
  for (const auto &[subject, desc] : subjects_) {
    bool typed = false;
    auto lo = std::lower_bound(
        desc.begin(), desc.end(), type_iri,
        [](const PredicateObject &po, const Iri &p) { return po.predicate < p; });
    for (auto it = lo; it != desc.end() && it->predicate == type_iri; ++it) {
      if (it->object.is_iri()) {
        concepts_[it->object.AsIri()].insert(subject);
        typed = true;
      }
    }
    if (!typed) concepts_[untyped].insert(subject);
  }
}

std::vector<Triple> DatasetVersion::Triples() const {
  std::vector<Triple> out;
  out.reserve(triple_count_);
  for (const auto &[subject, desc] : subjects_) {
    for (const auto &po : desc) out.push_back({subject, po.predicate, po.object});
  }
  return out;
}

bool DatasetVersion::Contains(const Triple &t) const {
  const Description *desc = Find(t.subject);
  if (desc == nullptr) return false;
  return std::binary_search(desc->begin(), desc->end(),
                            PredicateObject{t.predicate, t.object});
}

const Description *DatasetVersion::Find(const Iri &iri) const {
  auto it = subjects_.find(iri);
  return it == subjects_.end() ? nullptr : &it->second;
}

std::set<Iri> DatasetVersion::ConceptsOf(const Iri &iri) const {
  std::set<Iri> out;
  if (!HasSubject(iri)) return out;
  for (const auto &[concept_iri, members] : concepts_) {
    if (members.count(iri)) out.insert(concept_iri);
  }
  return out;
}

Description Canonicalize(const Description &raw, const Iri &self) {
  const Term self_term(self);
  Description out;
  out.reserve(raw.size());
  for (const auto &po : raw) {
    if (po.object == self_term) {
      out.push_back({po.predicate, Term(Iri(std::string(kSelfReference)))});
    } else {
      out.push_back(po);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Description DatasetVersion::CanonicalRepresentation(const Iri &iri) const {
  const Description *desc = Find(iri);
  if (desc == nullptr) throw NotPresent(iri.str());
  return Canonicalize(*desc, iri);
}

DatasetVersion DatasetVersion::Restrict(const std::vector<Iri> &keep,
                                        std::string version_id) const {
  std::map<Iri, Description> subjects;
  for (const auto &iri : keep) {
    if (const Description *desc = Find(iri)) subjects.emplace(iri, *desc);
  }
  return FromDescriptions(std::move(version_id), std::move(subjects));
}

}  // namespace deltald
