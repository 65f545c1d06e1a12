#pragma once

// Plain-text and binary serialization of model instances.

#include <filesystem>

#include <Eigen/Core>

#include "anticonc/fpp.hpp"
#include "anticonc/spin_glass.hpp"

namespace anticonc {

/// Comma-separated rows, full double precision, no header.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// One point per row; the file holds the transpose of the dim x n point set.
void write_points_csv(const std::filesystem::path& path, const Eigen::MatrixXd& pts);
Eigen::MatrixXd read_points_csv(const std::filesystem::path& path);

/// Header "i,j,g" then one row per pair i < j.
void write_disorder_csv(const std::filesystem::path& path, const SKDisorder& dis);
SKDisorder read_disorder_csv(const std::filesystem::path& path);

/// A "# width=W height=H source=x:y target=x:y" line, the header
/// "x1,y1,x2,y2,weight", then one row per edge in index order.
void write_grid_csv(const std::filesystem::path& path, const FppGrid& grid);
FppGrid read_grid_csv(const std::filesystem::path& path);

/// Magic "FPPG", six little-endian int32 (width, height, sx, sy, tx, ty),
/// uint64 edge count, then the weights as float64.
void write_grid_binary(const std::filesystem::path& path, const FppGrid& grid);
FppGrid read_grid_binary(const std::filesystem::path& path);

}  // namespace anticonc
