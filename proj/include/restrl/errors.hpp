#pragma once

#include <stdexcept>
#include <string>

namespace restrl {

// spec_model
struct MalformedDocument : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnresolvableRef : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedSpecVersion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// semantics
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// spdg
struct UnknownEdge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DuplicateEdge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// learning
struct ZeroBudget : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyActionSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// values
struct TransportFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedCompletion : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyStore : std::logic_error {
  using std::logic_error::logic_error;
};

// engine
struct UnboundPathVariable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// report
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace restrl
