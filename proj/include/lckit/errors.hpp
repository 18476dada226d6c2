// Copyright 2026 The lckit Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace lckit
{

/// Base class for all lckit errors.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A required column is missing or an input file does not match its schema.
class SchemaError : public Error
{
public:
  using Error::Error;
};

/// A cell or field could not be parsed; the message carries the row number.
class ParseError : public Error
{
public:
  using Error::Error;
};

/// Structurally broken data (frame gaps, tracks without metadata, ...).
class IntegrityError : public Error
{
public:
  using Error::Error;
};

class InvalidLaneError : public Error
{
public:
  using Error::Error;
};

/// Not enough history or future around the requested frame.
class WindowError : public Error
{
public:
  using Error::Error;
};

class OrderingError : public Error
{
public:
  using Error::Error;
};

class JoinError : public Error
{
public:
  using Error::Error;
};

class EmptyInputError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class TransportError : public Error
{
public:
  using Error::Error;
};

}  // namespace lckit
