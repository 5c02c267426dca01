#pragma once

#include <stdexcept>
#include <string>

namespace semsim {

// Base class for all toolkit errors. The CLI maps these to exit code 1;
// anything else escaping main is a bug.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

// Malformed input file (bad magic, bad header, unparsable row). Loaders
// include the offending line number where one exists.
class FormatError : public Error {
  public:
    using Error::Error;
};

class RangeError : public Error {
  public:
    using Error::Error;
};

class EmptyVocabularyError : public Error {
  public:
    using Error::Error;
};

// A dot product left the finite range during training; the caller should
// lower the learning rate.
class NonFiniteValueError : public Error {
  public:
    using Error::Error;
};

class NoRepresentableTokenError : public Error {
  public:
    using Error::Error;
};

class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

class ZeroVectorError : public Error {
  public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
  public:
    using Error::Error;
};

class MissingFeatureError : public Error {
  public:
    using Error::Error;
};

class RankDeficientError : public Error {
  public:
    using Error::Error;
};

class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

class ConstantInputError : public Error {
  public:
    using Error::Error;
};

} // namespace semsim
