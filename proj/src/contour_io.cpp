#include "pim/contour_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace pim {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

bool read_record(std::istream& is, std::vector<std::string>& fields) {
  fields.clear();
  if (is.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool quoted = false;
  char ch;
  while (is.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (is.peek() == '"') {
          is.get(ch);
          cur += '"';
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch == '\r') {
      if (is.peek() == '\n') is.get(ch);
      break;
    } else if (ch == '\n') {
      break;
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return true;
}

std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

void write_csv(std::ostream& os, const Contour& c) {
  const auto& dom = c.domain();
  const bool se = c.meta().std_err.has_value();
  for (Index d = 0; d < dom.dims(); ++d) os << csv_field(dom.name(d)) << ',';
  os << "plausibility" << (se ? ",std_err" : "") << "\r\n";
  for (Index i = 0; i < dom.size(); ++i) {
    auto idx = dom.unravel(i);
    for (Index d = 0; d < dom.dims(); ++d) {
      auto k = idx[static_cast<std::size_t>(d)];
      if (dom.is_interval(d))
        os << format_number(dom.interval_axis(d).at(k));
      else
        os << csv_field(dom.label_axis(d).labels[static_cast<std::size_t>(k)]);
      os << ',';
    }
    os << format_number(c(i));
    if (se) os << ',' << format_number((*c.meta().std_err)(i));
    os << "\r\n";
  }
}

Contour read_csv(std::istream& is) {
  std::vector<std::string> header;
  if (!read_record(is, header)) throw InvalidArgument("empty contour file");
  auto pl = std::find(header.begin(), header.end(), "plausibility");
  if (pl == header.end() || pl == header.begin()) throw InvalidArgument("contour file lacks axis or plausibility columns");
  const auto n_axes = static_cast<std::size_t>(pl - header.begin());
  const bool has_se = pl + 1 != header.end() && pl[1] == "std_err";

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> rec;
  while (read_record(is, rec)) {
    if (rec.size() == 1 && rec[0].empty()) continue;
    if (rec.size() < n_axes + 1) throw InvalidArgument("short row in contour file");
    rows.push_back(rec);
  }
  if (rows.empty()) throw InvalidArgument("contour file has no rows");

  std::vector<Axis> axes;
  for (std::size_t d = 0; d < n_axes; ++d) {
    std::vector<std::string> seen;
    for (const auto& r : rows)
      if (std::find(seen.begin(), seen.end(), r[d]) == seen.end()) seen.push_back(r[d]);
    std::vector<double> nums;
    bool numeric = true;
    for (const auto& s : seen) {
      auto v = as_number(s);
      if (!v) {
        numeric = false;
        break;
      }
      nums.push_back(*v);
    }
    if (numeric && nums.size() >= 2) {
      std::sort(nums.begin(), nums.end());
      double h = (nums.back() - nums.front()) / static_cast<double>(nums.size() - 1);
      bool even = true;
      for (std::size_t k = 0; k < nums.size(); ++k)
        if (std::abs(nums[k] - (nums.front() + static_cast<double>(k) * h)) > 1e-6 * std::max(1.0, std::abs(h)))
          even = false;
      if (even) {
        axes.emplace_back(IntervalAxis{header[d], nums.front(), nums.back(), static_cast<Index>(nums.size())});
        continue;
      }
    }
    axes.emplace_back(LabelAxis{header[d], seen});
  }
  ParamDomain dom(std::move(axes));
  if (static_cast<std::size_t>(dom.size()) != rows.size()) throw InvalidArgument("contour rows do not form a full grid");

  Arr vals(dom.size());
  Arr se(dom.size());
  for (const auto& r : rows) {
    Param p(dom.dims());
    for (std::size_t d = 0; d < n_axes; ++d) {
      const auto di = static_cast<Index>(d);
      if (dom.is_interval(di)) {
        p(di) = *as_number(r[d]);
      } else {
        const auto& lb = dom.label_axis(di).labels;
        p(di) = static_cast<double>(std::find(lb.begin(), lb.end(), r[d]) - lb.begin());
      }
    }
    auto k = dom.locate(p);
    auto v = as_number(r[n_axes]);
    if (!k || !v) throw InvalidArgument("unreadable contour row");
    vals(*k) = *v;
    if (has_se && r.size() > n_axes + 1) se(*k) = as_number(r[n_axes + 1]).value_or(0.0);
  }
  ContourMeta meta;
  meta.engine = "csv";
  if (has_se) {
    meta.std_err = se;
    meta.mc_size = 1;
  }
  return Contour(std::move(dom), std::move(vals), std::move(meta));
}

nlohmann::json to_json(const ParamDomain& d) {
  auto arr = nlohmann::json::array();
  for (Index k = 0; k < d.dims(); ++k) {
    if (d.is_interval(k)) {
      const auto& a = d.interval_axis(k);
      arr.push_back({{"name", a.name}, {"kind", "interval"}, {"lower", a.lower}, {"upper", a.upper}, {"points", a.points}});
    } else {
      const auto& a = d.label_axis(k);
      arr.push_back({{"name", a.name}, {"kind", "labels"}, {"labels", a.labels}});
    }
  }
  return arr;
}

nlohmann::json meta_json(const Contour& c) {
  const auto& m = c.meta();
  nlohmann::json j;
  j["format"] = "pim-contour";
  j["version"] = 1;
  j["domain"] = to_json(c.domain());
  j["engine"] = m.engine;
  j["seed"] = m.seed;
  j["mc_size"] = m.mc_size;
  j["sup"] = c.sup();
  j["sup_tol"] = c.sup_tol();
  auto am = nlohmann::json::array();
  for (auto i : c.argmax()) {
    auto p = c.domain().point(i);
    am.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  }
  j["argmax"] = am;
  if (m.peak_at) {
    j["peak"] = {{"at", std::vector<double>(m.peak_at->data(), m.peak_at->data() + m.peak_at->size())},
                 {"value", m.peak_value}};
  }
  if (m.ess) j["min_ess"] = m.ess->minCoeff();
  j["warnings"] = m.warnings;
  return j;
}

}  // namespace pim
