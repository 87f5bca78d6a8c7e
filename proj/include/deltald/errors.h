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

#ifndef DELTALD_ERRORS_H_
#define DELTALD_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deltald {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// N-Triples input that could not be accepted in strict mode.
class ParseError : public Error {
 public:
  enum class Kind { kMalformedLine, kBlankNodeSubject };

  ParseError(Kind kind, std::size_t line_no, const std::string &detail)
      : Error(Describe(kind, line_no, detail)), kind_(kind), line_no_(line_no) {}

  Kind kind() const { return kind_; }
  std::size_t line_no() const { return line_no_; }

 private:
  static std::string Describe(Kind kind, std::size_t line_no,
                              const std::string &detail) {
    std::string name = kind == Kind::kMalformedLine ? "MalformedLine"
                                                    : "BlankNodeSubject";
    std::string msg = name + "(" + std::to_string(line_no) + ")";
    if (!detail.empty()) msg += ": " + detail;
    return msg;
  }

  Kind kind_;
  std::size_t line_no_;
};

// A resource was looked up in a version where it is not a subject.
class NotPresent : public Error {
 public:
  explicit NotPresent(const std::string &iri)
      : Error("NotPresent: <" + iri + ">"), iri_(iri) {}
  const std::string &iri() const { return iri_; }

 private:
  std::string iri_;
};

// A change set deletes a triple that the base version does not contain.
class MissingDeletedTriple : public Error {
 public:
  explicit MissingDeletedTriple(const std::string &triple)
      : Error("MissingDeletedTriple: " + triple) {}
};

class VersionChainBroken : public Error {
 public:
  using Error::Error;
};

class BadBoundaries : public Error {
 public:
  using Error::Error;
};

class BadConfig : public Error {
 public:
  using Error::Error;
};

class BadWarmup : public Error {
 public:
  using Error::Error;
};

// Problems reading a gold-standard mapping file.
class GoldStandardError : public Error {
 public:
  enum class Kind { kMalformed, kDuplicateMapping };

  GoldStandardError(Kind kind, const std::string &msg, std::size_t line_no = 0)
      : Error(msg), kind_(kind), line_no_(line_no) {}

  Kind kind() const { return kind_; }
  std::size_t line_no() const { return line_no_; }

 private:
  Kind kind_;
  std::size_t line_no_;
};

}  // namespace deltald

#endif  // DELTALD_ERRORS_H_
