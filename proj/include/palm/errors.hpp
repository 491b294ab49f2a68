#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "palm/ast.hpp"

namespace palm {

/// Base of every error raised by the workbench.
class PalmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public PalmError {
 public:
  SyntaxError(SourcePos pos, std::vector<std::string> expected, std::string found);

  SourcePos position() const { return pos_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  SourcePos pos_;
  std::vector<std::string> expected_;
  std::string found_;
};

class ResolveError : public PalmError {
 public:
  ResolveError(std::string name, SourcePos pos, std::string detail = "undeclared identifier");

  const std::string& name() const { return name_; }
  SourcePos position() const { return pos_; }

 private:
  std::string name_;
  SourcePos pos_;
};

class TypeError : public PalmError {
 public:
  TypeError(SourcePos pos, std::string found, std::string expected);

  SourcePos position() const { return pos_; }
  const std::string& foundType() const { return found_; }
  const std::string& expectedType() const { return expected_; }

 private:
  SourcePos pos_;
  std::string found_;
  std::string expected_;
};

/// Raised by path extraction for configuration problems.
class ExtractionError : public PalmError {
 public:
  using PalmError::PalmError;
};

class CalleeNotFound : public ExtractionError {
 public:
  explicit CalleeNotFound(const std::string& name)
      : ExtractionError("symbolic function '" + name + "' is not declared") {}
};

}  // namespace palm
