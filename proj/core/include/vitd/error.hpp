#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vitd {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad column count, invalid UTF-8, unparsable JSON line.
/// `row()` is the 1-based data row (or line) number, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error(row > 0 ? "row " + std::to_string(row) + ": " + what : what), m_row(row) {}
    std::size_t row() const noexcept { return m_row; }

private:
    std::size_t m_row;
};

/// Well-formed input whose values violate the data schema (label outside
/// {0,1,2}, duplicate id, empty text).
class SchemaError : public Error {
public:
    SchemaError(std::size_t row, const std::string& what)
        : Error(row > 0 ? "row " + std::to_string(row) + ": " + what : what), m_row(row) {}
    std::size_t row() const noexcept { return m_row; }

private:
    std::size_t m_row;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    IoError(std::string path, const std::string& what)
        : Error(path + ": " + what), m_path(std::move(path)) {}
    const std::string& path() const noexcept { return m_path; }

private:
    std::string m_path;
};

/// Precondition violation on a function argument.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Non-finite value where a finite one is required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Predictions reference examples that are not part of the split.
class ReferentialError : public Error {
public:
    explicit ReferentialError(std::vector<std::string> offenders)
        : Error(describe(offenders)), m_offenders(std::move(offenders)) {}
    const std::vector<std::string>& offenders() const noexcept { return m_offenders; }

private:
    static std::string describe(const std::vector<std::string>& offenders) {
        std::string msg = "unknown example_id(s):";
        for (const auto& id : offenders) msg += " '" + id + "'";
        return msg;
    }

    std::vector<std::string> m_offenders;
};

/// The same (model_id, example_id) cell appears more than once.
class DuplicationError : public Error {
public:
    using Error::Error;
};

/// A stored label disagrees with the argmax of the stored logits.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// A prediction matrix is missing at least one (model, example) cell.
class CompletenessError : public Error {
public:
    CompletenessError(std::string model_id, std::string example_id)
        : Error("missing prediction for model '" + model_id + "' on example '" + example_id + "'"),
          m_model_id(std::move(model_id)), m_example_id(std::move(example_id)) {}
    const std::string& model_id() const noexcept { return m_model_id; }
    const std::string& example_id() const noexcept { return m_example_id; }

private:
    std::string m_model_id;
    std::string m_example_id;
};

} // namespace vitd
