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

// Core RDF value types and the immutable dataset snapshot.
//
// A DatasetVersion is a set of triples indexed by subject, plus a concept
// index mapping every rdf:type object to the resources typed with it.
// Subjects without an IRI-valued rdf:type live in the pseudo-concept
// `urn:deltald:untyped`, so every subject belongs to at least one concept.

#ifndef DELTALD_RDF_H_
#define DELTALD_RDF_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace deltald {

inline constexpr std::string_view kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kUntypedConcept = "urn:deltald:untyped";
inline constexpr std::string_view kSelfReference = "urn:deltald:self";

// An absolute IRI, stored without the surrounding angle brackets.
//
// Ordering follows the N-Triples token `<value>`: since '>' never occurs
// inside an IRI, comparing two tokens is the same as comparing the values
// with an implicit '>' terminator. Sorting triples member-wise therefore
// matches sorting their serialized lines.
class Iri {
 public:
  // Throws std::invalid_argument if `value` is not a valid absolute IRI.
  explicit Iri(std::string value);

  static bool IsValid(std::string_view value);

  const std::string &str() const { return value_; }
  std::string ToNTriples() const { return "<" + value_ + ">"; }

  friend bool operator==(const Iri &a, const Iri &b) {
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const Iri &a, const Iri &b);

 private:
  struct Unchecked {};
  Iri(std::string value, Unchecked) : value_(std::move(value)) {}
  friend class Term;

  std::string value_;
};

// The object position of a triple: IRI, literal, or blank node.
//
// A term is held in canonical N-Triples token form. Literal equality is
// exact on (lexical form, language tag, datatype). Blank nodes carry a
// scope (the version they were parsed from) so labels from different
// files never compare equal.
class Term {
 public:
  enum class Kind { kIri, kLiteral, kBlank };

  Term(const Iri &iri);  // NOLINT: implicit by intent
  static Term Literal(std::string_view lexical, std::string_view language = {},
                      const std::optional<Iri> &datatype = std::nullopt);
  static Term Blank(std::string_view label, std::string_view scope);

  Kind kind() const;
  bool is_iri() const { return kind() == Kind::kIri; }
  bool is_literal() const { return kind() == Kind::kLiteral; }
  bool is_blank() const { return kind() == Kind::kBlank; }

  // Precondition: is_iri().
  Iri AsIri() const;

  // Canonical N-Triples token, e.g. `<http://x>`, `"a\"b"@en`, `_:b0`.
  const std::string &token() const { return token_; }
  const std::string &scope() const { return scope_; }

  // Literal accessors; empty / nullopt for other kinds.
  std::string lexical_form() const;
  std::string language() const;
  std::optional<Iri> datatype() const;

  friend bool operator==(const Term &, const Term &) = default;
  friend auto operator<=>(const Term &, const Term &) = default;

 private:
  Term(std::string token, std::string scope)
      : token_(std::move(token)), scope_(std::move(scope)) {}

  std::string token_;
  std::string scope_;
};

struct PredicateObject {
  Iri predicate;
  Term object;

  friend bool operator==(const PredicateObject &,
                         const PredicateObject &) = default;
  friend auto operator<=>(const PredicateObject &,
                          const PredicateObject &) = default;
};

struct Triple {
  Iri subject;
  Iri predicate;
  Term object;

  std::string ToNTriples() const;

  friend bool operator==(const Triple &, const Triple &) = default;
  // Lexicographic on the canonical N-Triples line.
  friend auto operator<=>(const Triple &, const Triple &) = default;
};

// The outgoing (predicate, object) pairs of one resource, sorted and unique.
using Description = std::vector<PredicateObject>;

// Escapes a literal's lexical form for N-Triples output.
std::string EscapeLiteral(std::string_view lexical);

// An immutable snapshot of a linked dataset.
class DatasetVersion {
 public:
  DatasetVersion() = default;

  // Builds a version from arbitrary triples; duplicates collapse.
  static DatasetVersion FromTriples(std::string version_id,
                                    std::vector<Triple> triples);
  // Builds a version from per-subject descriptions. Subjects with an empty
  // description are dropped.
  static DatasetVersion FromDescriptions(std::string version_id,
                                         std::map<Iri, Description> subjects);

  const std::string &id() const { return id_; }

  // Number of distinct triples.
  std::size_t size() const { return triple_count_; }
  bool empty() const { return triple_count_ == 0; }

  // All triples in canonical order.
  std::vector<Triple> Triples() const;
  bool Contains(const Triple &t) const;

  const std::map<Iri, Description> &subjects() const { return subjects_; }
  const std::map<Iri, std::set<Iri>> &concepts() const { return concepts_; }

  bool HasSubject(const Iri &iri) const { return subjects_.count(iri) > 0; }
  // nullptr when `iri` is not a subject.
  const Description *Find(const Iri &iri) const;

  // Concepts listing `iri`; empty when `iri` is not a subject.
  std::set<Iri> ConceptsOf(const Iri &iri) const;

  // The description of `iri` with every self-referencing IRI object
  // replaced by `urn:deltald:self`. Throws NotPresent.
  Description CanonicalRepresentation(const Iri &iri) const;

  // A version holding only the given subjects' descriptions (missing ones
  // are ignored).
  DatasetVersion Restrict(const std::vector<Iri> &keep,
                          std::string version_id) const;

 private:
  void BuildConceptIndex();

  std::string id_;
  std::map<Iri, Description> subjects_;
  std::map<Iri, std::set<Iri>> concepts_;
  std::size_t triple_count_ = 0;
};

// Canonicalizes a raw description relative to `self`.
Description Canonicalize(const Description &raw, const Iri &self);

}  // namespace deltald

#endif  // DELTALD_RDF_H_
