#pragma once

#include <stdexcept>
#include <string>

namespace cebread {

// Base for every error raised by the library. Messages are meant to be shown
// to the user verbatim.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class CorpusError : public Error {
public:
  using Error::Error;
};

class FeatureError : public Error {
public:
  using Error::Error;
};

class ModelError : public Error {
public:
  using Error::Error;
};

class EvalError : public Error {
public:
  using Error::Error;
};

}  // namespace cebread
