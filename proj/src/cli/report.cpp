#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "ssqt/cli.hpp"

namespace ssqt::cli {

namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double shown(const ResultRow& r, Units u) { return r.units == "bits" ? r.value * unit_factor(u) : r.value; }

std::string shown_units(const ResultRow& r, Units u) { return r.units == "bits" ? unit_label(u) : r.units; }

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "text") return Format::text;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw InputError("unknown format '" + s + "' (text, csv, json)");
}

Units parse_units(const std::string& s) {
  if (s == "bits") return Units::bits;
  if (s == "nats") return Units::nats;
  if (s == "kTln2") return Units::kTln2;
  throw InputError("unknown units '" + s + "' (bits, nats, kTln2)");
}

double unit_factor(Units u) { return u == Units::nats ? std::log(2.0) : 1.0; }

std::string unit_label(Units u) {
  switch (u) {
    case Units::nats:
      return "nats";
    case Units::kTln2:
      return "kTln2";
    default:
      return "bits";
  }
}

std::string render(const Report& r, Format f, Units u) {
  std::ostringstream os;
  if (f == Format::csv) {
    os << "name,value,units,method,gap,epsilon\n";
    for (const auto& row : r.results) {
      os << csv_field(row.name) << ',' << g17(shown(row, u)) << ',' << csv_field(shown_units(row, u)) << ','
         << csv_field(row.method) << ',' << (row.gap ? g17(*row.gap) : "") << ','
         << (row.epsilon ? g17(*row.epsilon) : "") << '\n';
    }
    return os.str();
  }
  if (f == Format::json) {
    // Numbers are written by hand to keep 17 significant digits.
    auto str = [](const std::string& s) { return json(s).dump(); };
    auto opt = [](const std::optional<double>& v) { return v ? g17(*v) : std::string("null"); };
    os << "{\n  \"command\": " << str(r.command) << ",\n  \"inputs_digest\": " << str(r.inputs_digest)
       << ",\n  \"results\": [";
    for (std::size_t i = 0; i < r.results.size(); ++i) {
      const auto& row = r.results[i];
      os << (i ? ",\n" : "\n") << "    {\"name\": " << str(row.name) << ", \"value\": " << g17(shown(row, u))
         << ", \"units\": " << str(shown_units(row, u)) << ", \"method\": " << str(row.method)
         << ", \"gap\": " << opt(row.gap) << ", \"epsilon\": " << opt(row.epsilon) << "}";
    }
    os << (r.results.empty() ? "],\n" : "\n  ],\n") << "  \"warnings\": [";
    for (std::size_t i = 0; i < r.warnings.size(); ++i) os << (i ? ", " : "") << str(r.warnings[i]);
    os << "]\n}\n";
    return os.str();
  }
  std::size_t width = 4;
  for (const auto& row : r.results) width = std::max(width, row.name.size());
  for (const auto& row : r.results) {
    os << std::left << std::setw(static_cast<int>(width) + 2) << row.name;
    if (row.units == "bool") {
      os << (row.value != 0.0 ? "true" : "false");
    } else {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.6f", shown(row, u));
      os << (std::string(buf) == "-0.000000" ? buf + 1 : buf);
      if (!shown_units(row, u).empty()) os << ' ' << shown_units(row, u);
    }
    if (!row.method.empty()) os << "  [" << row.method << "]";
    if (row.epsilon) os << "  eps=" << *row.epsilon;
    if (row.gap) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.1e", *row.gap);
      os << "  gap=" << buf;
    }
    os << '\n';
  }
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  return os.str();
}

Report report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("report: invalid JSON: ") + e.what());
  }
  Report r;
  r.command = j.at("command").get<std::string>();
  r.inputs_digest = j.at("inputs_digest").get<std::string>();
  for (const auto& row : j.at("results")) {
    ResultRow x;
    x.name = row.at("name").get<std::string>();
    x.value = row.at("value").get<double>();
    x.units = row.at("units").get<std::string>();
    x.method = row.at("method").get<std::string>();
    if (!row.at("gap").is_null()) x.gap = row.at("gap").get<double>();
    if (!row.at("epsilon").is_null()) x.epsilon = row.at("epsilon").get<double>();
    r.results.push_back(x);
  }
  for (const auto& w : j.at("warnings")) r.warnings.push_back(w.get<std::string>());
  return r;
}

std::vector<ResultRow> rows_from_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
      any = true;
    } else if (c == '\n') {
      fields.push_back(cur);
      records.push_back(fields);
      fields.clear();
      cur.clear();
      any = false;
    } else {
      cur += c;
      any = true;
    }
  }
  if (any) {
    fields.push_back(cur);
    records.push_back(fields);
  }
  if (records.empty() || records[0] != std::vector<std::string>{"name", "value", "units", "method", "gap", "epsilon"})
    throw InputError("csv report: unexpected header");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != 6) throw InputError("csv report: expected 6 columns");
    ResultRow r;
    r.name = f[0];
    r.value = std::stod(f[1]);
    r.units = f[2];
    r.method = f[3];
    if (!f[4].empty()) r.gap = std::stod(f[4]);
    if (!f[5].empty()) r.epsilon = std::stod(f[5]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ssqt::cli
