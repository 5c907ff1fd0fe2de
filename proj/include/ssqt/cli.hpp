#pragma once

// Command-line front end: MatrixFile JSON I/O, reports in text/CSV/JSON and the
// subcommand dispatcher. Numerics live in the library modules.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssqt/channel.hpp"
#include "ssqt/gamma.hpp"
#include "ssqt/linalg.hpp"

namespace ssqt::cli {

// {"kind": ..., "dims": [...], "re": [[...]], "im": [[...]], "in_dims": [...], "out_dims": [...]}
// kind is one of state, gamma, choi, ket, operator. Kets are d x 1 columns; im may be omitted.
struct MatrixFile {
  std::string kind;
  Dims dims;
  CMat m;
  Dims in_dims, out_dims;  // choi only
};

MatrixFile parse_matrix_file(const std::string& text);
std::string serialize(const MatrixFile& f);  // 17 significant digits
MatrixFile read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const MatrixFile& f);

MatrixFile to_file(const SubnormalizedState& s);
MatrixFile to_file(const GammaOperator& g);
MatrixFile to_file(const ChoiChannel& c);
MatrixFile to_file(const HermitianOperator& h);
MatrixFile to_file(const Ket& k);

using Loaded = std::variant<HermitianOperator, SubnormalizedState, GammaOperator, ChoiChannel, Ket>;
// Parses and checks the invariants of the type named by kind. Throws InputError with the
// offending number on a violation.
Loaded load(const std::string& path, const Tolerances& tol = Tolerances::defaults());
Loaded to_object(const MatrixFile& f, const Tolerances& tol = Tolerances::defaults());

// Typed loaders. load_state also accepts a ket and returns its projector.
SubnormalizedState load_state(const std::string& path, const Tolerances& tol = Tolerances::defaults());
GammaOperator load_gamma(const std::string& path, const Tolerances& tol = Tolerances::defaults());
ChoiChannel load_channel(const std::string& path, const Tolerances& tol = Tolerances::defaults());
HermitianOperator load_operator(const std::string& path, const Tolerances& tol = Tolerances::defaults());

struct ResultRow {
  std::string name;
  double value = 0.0;
  std::string units;  // "bits" values are converted by --units; "bool" renders as true/false
  std::string method;
  std::optional<double> gap;
  std::optional<double> epsilon;
};

struct Report {
  std::string command;
  std::string inputs_digest;
  std::vector<ResultRow> results;
  std::vector<std::string> warnings;
};

enum class Format { text, csv, json };
enum class Units { bits, nats, kTln2 };

Format parse_format(const std::string& s);
Units parse_units(const std::string& s);
// Factor applied to "bits" rows: 1 for bits and kTln2 (work in units of kT ln 2), ln 2 for nats.
double unit_factor(Units u);
std::string unit_label(Units u);

// CSV columns: name,value,units,method,gap,epsilon. JSON keys: command, inputs_digest,
// results[name, value, units, method, gap, epsilon], warnings. Missing gap/epsilon are
// empty in CSV and null in JSON.
std::string render(const Report& r, Format f, Units u = Units::bits);
Report report_from_json(const std::string& text);
std::vector<ResultRow> rows_from_csv(const std::string& text);

// FNV-1a over the given strings and file contents, as 16 hex digits.
std::string digest(const std::vector<std::string>& args, const std::vector<std::string>& files);

Report demo_paper_numbers(std::uint64_t seed);
// Chemical potential of the N-spin toy gas against -beta of the matching canonical ensemble.
Report demo_toy_gas(int n_spins);

// Exit code 0 on success, 1 on invalid input or usage, 2 when a solver does not converge.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ssqt::cli
