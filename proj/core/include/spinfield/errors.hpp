#pragma once

#include <stdexcept>
#include <string>

namespace spinfield {

struct DegenerateVector : std::runtime_error {
    explicit DegenerateVector(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateFrame : std::runtime_error {
    explicit DegenerateFrame(const std::string& what) : std::runtime_error(what) {}
};

struct FrameDrift : std::runtime_error {
    explicit FrameDrift(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeMismatch : std::runtime_error {
    explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct GridMismatch : std::runtime_error {
    explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct MisalignedTime : std::runtime_error {
    explicit MisalignedTime(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyHistory : std::runtime_error {
    explicit EmptyHistory(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewSnapshots : std::runtime_error {
    explicit TooFewSnapshots(const std::string& what) : std::runtime_error(what) {}
};

struct NonFinite : std::runtime_error {
    explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

struct WrongSignature : std::runtime_error {
    explicit WrongSignature(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParams : std::runtime_error {
    explicit InvalidParams(const std::string& what) : std::runtime_error(what) {}
};

struct IncompatibleSymmetry : std::runtime_error {
    explicit IncompatibleSymmetry(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spinfield
