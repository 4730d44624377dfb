#pragma once

#include <stdexcept>
#include <string>

namespace acl {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ZeroVarianceColumn : public Error {
public:
    ZeroVarianceColumn(int col, const std::string& id)
        : Error("column " + std::to_string(col + 1) + " (" + id + ") has zero variance"),
          column(col) {}
    int column;
};

class EmptyPath : public Error {
public:
    using Error::Error;
};

class EmptyStage1 : public Error {
public:
    using Error::Error;
};

class InvalidCount : public Error {
public:
    using Error::Error;
};

class InvalidPartition : public Error {
public:
    using Error::Error;
};

class IncompatibleConfig : public Error {
public:
    using Error::Error;
};

class NotPsd : public Error {
public:
    using Error::Error;
};

class TooFewColumns : public Error {
public:
    using Error::Error;
};

class SingularSigma11 : public Error {
public:
    using Error::Error;
};

class SingularGroupGram : public Error {
public:
    SingularGroupGram(int g)
        : Error("within-group Gram block " + std::to_string(g + 1) + " is singular"), group(g) {}
    int group;
};

class DegenerateRepresentative : public Error {
public:
    DegenerateRepresentative(int g)
        : Error("representative of cluster " + std::to_string(g + 1) +
                " is numerically zero (near-cancelling columns)"),
          group(g) {}
    int group;
};

class EmptyTruth : public Error {
public:
    using Error::Error;
};

class CsvError : public Error {
public:
    CsvError(const std::string& msg, long line_no)
        : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    long line;
};

} // namespace acl
