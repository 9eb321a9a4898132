#pragma once

#include <stdexcept>
#include <string>

namespace sensegrid {

// Base for every error the library raises on purpose.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data: malformed JSONL, duplicate ids, empty text.
class ingest_error : public error {
public:
    using error::error;
};

// A caller asked for something the data cannot satisfy
// (unknown dimension, ambiguous grid cell, too few responses).
class precondition_error : public error {
public:
    using error::error;
};

} // namespace sensegrid
