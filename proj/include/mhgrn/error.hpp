#pragma once

#include <stdexcept>
#include <string>

namespace mhgrn {

/// Base class for all library errors. Every failure mode the library can
/// raise derives from this, so callers may catch mhgrn::Error to handle
/// anything thrown from this namespace.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Operand shapes are incompatible (matmul, MLP input, bilinear forms, ...).
class DimMismatch : public Error {
 public:
  using Error::Error;
};

/// A computation produced (or an input file contained) NaN or Inf.
class NonFinite : public Error {
 public:
  using Error::Error;
};

/// A masked softmax was asked to normalize an empty active set.
class AllMasked : public Error {
 public:
  using Error::Error;
};

/// Malformed file content (bad magic, ragged CSV, invalid JSON shape, ...).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The underlying file could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A raw relation name is not covered by the vocabulary merge map.
class UnknownRelation : public Error {
 public:
  using Error::Error;
};

/// A relation id is outside 1..m (0 is reserved padding, never scored).
class BadRelationId : public Error {
 public:
  using Error::Error;
};

/// An index (node id, option id, ...) is outside its container.
class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Subgraph extraction was given no linkable mention on either side.
class EmptyMentionSet : public Error {
 public:
  using Error::Error;
};

/// Pooling requires at least one answer-typed node.
class NoAnswerNodes : public Error {
 public:
  using Error::Error;
};

/// A knowledge-graph file contained no usable triples.
class NoTriples : public Error {
 public:
  using Error::Error;
};

/// No qualifying relational path exists for the requested operation.
class NoPath : public Error {
 public:
  using Error::Error;
};

/// A relational path references an edge absent from the graph.
class InvalidPath : public Error {
 public:
  using Error::Error;
};

/// An exact integer count exceeded the 64-bit range.
class Overflow : public Error {
 public:
  using Error::Error;
};

/// The finite-difference trainer refuses models above its parameter cap.
class ParamBudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace mhgrn
