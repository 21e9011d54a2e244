#pragma once

#include "pim/contour.hpp"

#include <iosfwd>
#include <string>

#include <json.hpp>

namespace pim {

std::string format_number(double x);

// RFC-4180 CSV: one column per axis, then plausibility and optional std_err
void write_csv(std::ostream& os, const Contour& c);
Contour read_csv(std::istream& is);

nlohmann::json to_json(const ParamDomain& d);
nlohmann::json meta_json(const Contour& c);

}  // namespace pim
