// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace iddm {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside its mathematical domain (t not in [0,1], T = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Times supplied in the wrong order (requires s < t, i.e. gamma_s > gamma_t).
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// Ratio or division undefined (gamma_t = 1, zero marginal mass, ...).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Category index out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// KL support violation: p has mass where q is exactly zero.
class SupportError : public Error {
 public:
  using Error::Error;
};

/// Enumeration size bound exceeded (K^L or step count too large).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Tensor / sequence dimensions inconsistent.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incompatible file contents (config, checkpoint, dataset).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure (unreadable path, short write, ...).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace iddm
