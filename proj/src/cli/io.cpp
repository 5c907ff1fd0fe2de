#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ssqt/cli.hpp"

namespace ssqt::cli {

namespace {

using nlohmann::json;

Dims read_dims(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  if (!j[key].is_array()) throw InputError(std::string("matrix file: '") + key + "' must be a list of integers");
  Dims d;
  for (const auto& v : j[key]) {
    if (!v.is_number_integer() || v.get<long long>() < 1)
      throw InputError(std::string("matrix file: '") + key + "' entries must be positive integers");
    d.push_back(v.get<int>());
  }
  return d;
}

RMat read_array(const json& j, const char* key) {
  const json& a = j.at(key);
  if (!a.is_array() || a.empty()) throw InputError(std::string("matrix file: '") + key + "' must be a 2-D array");
  const int rows = static_cast<int>(a.size());
  if (!a[0].is_array()) throw InputError(std::string("matrix file: '") + key + "' must be a 2-D array");
  const int cols = static_cast<int>(a[0].size());
  RMat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!a[i].is_array() || static_cast<int>(a[i].size()) != cols)
      throw InputError(std::string("matrix file: '") + key + "' rows have different lengths");
    for (int k = 0; k < cols; ++k) {
      if (!a[i][k].is_number()) throw InputError(std::string("matrix file: '") + key + "' holds a non-number");
      m(i, k) = a[i][k].get<double>();
    }
  }
  return m;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_dims(std::ostringstream& os, const Dims& d) {
  os << '[';
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? ", " : "") << d[i];
  os << ']';
}

void put_array(std::ostringstream& os, const CMat& m, bool imag) {
  os << "[\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << "    [";
    for (Eigen::Index k = 0; k < m.cols(); ++k) os << (k ? ", " : "") << num(imag ? m(i, k).imag() : m(i, k).real());
    os << (i + 1 < m.rows() ? "],\n" : "]\n");
  }
  os << "  ]";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

MatrixFile parse_matrix_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("matrix file: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("matrix file: top level must be an object");
  MatrixFile f;
  try {
    f.kind = j.at("kind").get<std::string>();
  } catch (const json::exception&) {
    throw InputError("matrix file: missing string field 'kind'");
  }
  if (f.kind != "state" && f.kind != "gamma" && f.kind != "choi" && f.kind != "ket" && f.kind != "operator")
    throw InputError("matrix file: unknown kind '" + f.kind + "'");
  if (!j.contains("re")) throw InputError("matrix file: missing field 're'");
  RMat re = read_array(j, "re");
  RMat im = j.contains("im") ? read_array(j, "im") : RMat::Zero(re.rows(), re.cols());
  if (im.rows() != re.rows() || im.cols() != re.cols()) throw InputError("matrix file: 're' and 'im' shapes differ");
  f.m = re.cast<Cplx>() + Cplx(0.0, 1.0) * im.cast<Cplx>();
  f.dims = read_dims(j, "dims");
  f.in_dims = read_dims(j, "in_dims");
  f.out_dims = read_dims(j, "out_dims");

  const int rows = static_cast<int>(f.m.rows());
  if (f.kind == "ket") {
    if (f.m.cols() != 1) throw InputError("matrix file: a ket must be a single column");
  } else if (f.m.cols() != rows) {
    throw InputError("matrix file: matrix must be square");
  }
  if (f.dims.empty()) f.dims = {rows};
  if (dims_product(f.dims) != rows) throw InputError("matrix file: dims product differs from the matrix size");
  if (f.kind == "choi") {
    if (f.in_dims.empty() || f.out_dims.empty()) throw InputError("matrix file: choi needs in_dims and out_dims");
    if (dims_product(f.in_dims) * dims_product(f.out_dims) != rows)
      throw InputError("matrix file: in_dims and out_dims do not match the Choi size");
  }
  return f;
}

std::string serialize(const MatrixFile& f) {
  std::ostringstream os;
  os << "{\n  \"kind\": \"" << f.kind << "\",\n  \"dims\": ";
  put_dims(os, f.dims);
  if (f.kind == "choi") {
    os << ",\n  \"out_dims\": ";
    put_dims(os, f.out_dims);
    os << ",\n  \"in_dims\": ";
    put_dims(os, f.in_dims);
  }
  os << ",\n  \"re\": ";
  put_array(os, f.m, false);
  os << ",\n  \"im\": ";
  put_array(os, f.m, true);
  os << "\n}\n";
  return os.str();
}

MatrixFile read_matrix_file(const std::string& path) {
  try {
    return parse_matrix_file(slurp(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_matrix_file(const std::string& path, const MatrixFile& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << serialize(f);
}

MatrixFile to_file(const SubnormalizedState& s) { return {"state", s.dims().empty() ? Dims{s.dim()} : s.dims(), s.mat(), {}, {}}; }

MatrixFile to_file(const GammaOperator& g) { return {"gamma", g.dims().empty() ? Dims{g.dim()} : g.dims(), g.mat(), {}, {}}; }

MatrixFile to_file(const ChoiChannel& c) {
  Dims d = c.out_dims();
  d.insert(d.end(), c.in_dims().begin(), c.in_dims().end());
  return {"choi", d, c.mat(), c.in_dims(), c.out_dims()};
}

MatrixFile to_file(const HermitianOperator& h) {
  return {"operator", h.dims().empty() ? Dims{h.dim()} : h.dims(), h.mat(), {}, {}};
}

MatrixFile to_file(const Ket& k) {
  return {"ket", k.dims.empty() ? Dims{static_cast<int>(k.amps.size())} : k.dims, k.amps, {}, {}};
}

Loaded to_object(const MatrixFile& f, const Tolerances& tol) {
  if (f.kind == "ket") {
    const double n2 = f.m.squaredNorm();
    if (n2 > 1.0 + tol.trace_tol) {
      std::ostringstream os;
      os << "ket: squared norm " << n2 << " exceeds 1";
      throw InputError(os.str());
    }
    return Ket{f.m.col(0), f.dims};
  }
  if (f.kind == "choi") return ChoiChannel(f.m, f.out_dims, f.in_dims, tol);
  HermitianOperator h = HermitianOperator::checked(f.m, f.dims, tol);
  if (f.kind == "state") return SubnormalizedState(h, tol);
  if (f.kind == "gamma") return GammaOperator(h, "", tol);
  return h;
}

Loaded load(const std::string& path, const Tolerances& tol) {
  MatrixFile f = read_matrix_file(path);
  try {
    return to_object(f, tol);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

namespace {

template <class T>
T expect(const std::string& path, const Loaded& l, const char* what) {
  if (const T* v = std::get_if<T>(&l)) return *v;
  throw InputError(path + ": expected a file of kind " + what);
}

}  // namespace

SubnormalizedState load_state(const std::string& path, const Tolerances& tol) {
  Loaded l = load(path, tol);
  if (const Ket* k = std::get_if<Ket>(&l)) return SubnormalizedState(k->projector(), k->dims, tol);
  return expect<SubnormalizedState>(path, l, "state");
}

GammaOperator load_gamma(const std::string& path, const Tolerances& tol) {
  return expect<GammaOperator>(path, load(path, tol), "gamma");
}

ChoiChannel load_channel(const std::string& path, const Tolerances& tol) {
  return expect<ChoiChannel>(path, load(path, tol), "choi");
}

HermitianOperator load_operator(const std::string& path, const Tolerances& tol) {
  Loaded l = load(path, tol);
  if (const GammaOperator* g = std::get_if<GammaOperator>(&l)) return g->op();
  if (const SubnormalizedState* s = std::get_if<SubnormalizedState>(&l)) return s->op();
  return expect<HermitianOperator>(path, l, "operator");
}

std::string digest(const std::vector<std::string>& args, const std::vector<std::string>& files) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  for (const auto& a : args) feed(a);
  for (const auto& p : files) feed(slurp(p));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ssqt::cli
