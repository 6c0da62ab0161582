#pragma once

#include "ensheat/ensemble.hpp"
#include "ensheat/mesh.hpp"
#include "ensheat/verification.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ensheat::io {

/// Scientific notation with 6 significant digits ("1.23457e-03").
std::string sci(double v);

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceTable& table);
void write_perturbation_csv(const std::filesystem::path& path, const PerturbationTable& table);
void write_ensemble_size_csv(const std::filesystem::path& path,
                             std::span<const EnsembleSizeRow> rows);
void write_steady_csv(const std::filesystem::path& path, const SteadyStateTable& table);

/// t, ||T_1||, ..., ||T_J||, ||<T>|| per recorded time level.
void write_norms_csv(const std::filesystem::path& path, const TimeSeries& series);

using NamedField = std::pair<std::string, std::span<const double>>;

/// Legacy VTK ASCII unstructured grid with one POINT_DATA scalar per field.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               std::span<const NamedField> fields, const std::string& title = "ensheat");

/// Writes every snapshot of `series` as <prefix>_<step>.vtk under `dir`
/// (fields T1..TJ and mean); returns the paths written.
std::vector<std::filesystem::path> write_snapshots(const std::filesystem::path& dir,
                                                   const std::string& prefix, const Mesh& mesh,
                                                   const TimeSeries& series);

} // namespace ensheat::io
