#pragma once

#include <stdexcept>
#include <string>

namespace shellpath {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MeshError : public Error {
public:
  using Error::Error;
};

/// Raised for faces whose neighbourhood cannot be evaluated until the mesh is refined once.
class SubdivisionRequired : public MeshError {
public:
  SubdivisionRequired(int face, const std::string& what)
      : MeshError("face " + std::to_string(face) + ": " + what + " (subdivide required)"), face_(face) {}
  int face() const { return face_; }

private:
  int face_;
};

class GeometryError : public Error {
public:
  using Error::Error;
};

class ConstitutiveError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class SolverError : public Error {
public:
  using Error::Error;
};

}  // namespace shellpath
