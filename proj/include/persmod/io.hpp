#pragma once

#include <string>

#include "json.hpp"
#include "persmod/interleave.hpp"
#include "persmod/module.hpp"

namespace pm {

using json = nlohmann::json;

// Module: {"p", "n", "axes": [["num/den", ...]], "dims": [...], "steps": [axis][vertex]}
// with every step a row-major array of canonical residues; shapes follow from dims.
json grid_to_json(const Grid& g);
Grid grid_from_json(const json& j);
json module_to_json(const GridModule& M);
GridModule module_from_json(const json& j);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const Field& F);

// {"source", "target", "mats": [vertex]} on the common grid.
json morphism_to_json(const ModuleMorphism& f);
ModuleMorphism morphism_from_json(const json& j);

// {"eps", "M", "N", "grid": {"axes"}, "f": [vertex], "g": [vertex]}
json certificate_to_json(const InterleavingCertificate& c);
InterleavingCertificate certificate_from_json(const json& j);

// Parsing errors of any kind come back as MalformedInput.
json parse_json(const std::string& text);
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
// Stable compact text form: sorted keys, trailing newline.
std::string dump(const json& j);

}  // namespace pm
