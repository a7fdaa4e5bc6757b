#pragma once

#include <stdexcept>
#include <string>

namespace signhunt {

// Base of every error this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (shape mismatch, bad parameter).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class CorruptModel : public FormatError {
 public:
  using FormatError::FormatError;
};

class TrainingFailed : public Error {
 public:
  using Error::Error;
};

// Transport failures after the retry policy has been exhausted.
class RemoteUnavailable : public Error {
 public:
  using Error::Error;
};

// The remote service answered, but not with something we can parse.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class CampaignAborted : public Error {
 public:
  using Error::Error;
};

#define SIGNHUNT_REQUIRE(cond, msg)                         \
  do {                                                      \
    if (!(cond)) throw ::signhunt::ContractViolation(msg);  \
  } while (0)

}  // namespace signhunt
