#pragma once

#include "gencp/gaussian/covariance.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace gencp {

// Columns x1..xd (coordinates), f1..fp (features), y and optionally y_star; header required.
struct Dataset {
  Locations locations;
  Matrix x;
  Vector y;
  std::optional<Vector> y_star;
  std::string source;

  Index size() const { return y.size(); }
  void validate() const;
};

Dataset parse_dataset_csv(std::istream& in, const std::string& source);
Dataset read_dataset_csv(const std::string& path);
std::string dataset_to_csv(const Dataset& data);

// Row-major, headerless.
std::string matrix_to_csv(const Matrix& m);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace gencp
