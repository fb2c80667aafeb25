#pragma once

#include <stdexcept>

namespace fallguard {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Geometry.
struct InvalidDepthError : Error { using Error::Error; };
struct BehindCameraError : Error { using Error::Error; };
struct NoIntersectionError : Error { using Error::Error; };

// Point cloud and ROI depth estimation.
struct NoFloorFoundError : Error { using Error::Error; };
struct NoDepthError : Error { using Error::Error; };

// Backends and file I/O.
struct MissingFixtureError : Error { using Error::Error; };
struct LoadError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace fallguard
