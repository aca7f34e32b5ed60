#include "bmgame/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <locale>
#include <set>
#include <sstream>

namespace bmgame {

namespace {

void reject_unknown(const Json& doc, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : doc.items())
    if (!allowed.count(key)) throw ValidationError("unknown field '" + key + "'");
}

double number(const Json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ValidationError("missing field '" + key + "'");
  const Json& v = doc.at(key);
  if (!v.is_number()) throw ValidationError("field '" + key + "' must be a number");
  return v.get<double>();
}

double number_or(const Json& doc, const std::string& key, double fallback) {
  return doc.contains(key) ? number(doc, key) : fallback;
}

Vector vector_field(const Json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ValidationError("missing field '" + key + "'");
  const Json& v = doc.at(key);
  if (!v.is_array()) throw ValidationError("field '" + key + "' must be an array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ValidationError("field '" + key + "' must hold numbers");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

// Accepts a flat row-major array of n*n numbers or n nested rows.
Matrix matrix_field(const Json& doc, const std::string& key, Eigen::Index n) {
  if (!doc.contains(key)) throw ValidationError("missing field '" + key + "'");
  const Json& v = doc.at(key);
  if (!v.is_array()) throw ValidationError("field '" + key + "' must be an array");
  Matrix out(n, n);
  if (!v.empty() && v[0].is_array()) {
    if (static_cast<Eigen::Index>(v.size()) != n) throw ValidationError("field '" + key + "' must have n rows");
    for (Eigen::Index i = 0; i < n; ++i) {
      const Json& row = v[i];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
        throw ValidationError("field '" + key + "' rows must have n entries");
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!row[j].is_number()) throw ValidationError("field '" + key + "' must hold numbers");
        out(i, j) = row[j].get<double>();
      }
    }
    return out;
  }
  if (static_cast<Eigen::Index>(v.size()) != n * n)
    throw ValidationError("field '" + key + "' must have n*n entries");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Json& x = v[i * n + j];
      if (!x.is_number()) throw ValidationError("field '" + key + "' must hold numbers");
      out(i, j) = x.get<double>();
    }
  return out;
}

Json flat(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

void flatten(const Json& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) flatten(value, path.empty() ? key : path + "." + key, out);
  } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    out << path << " = " << j.dump() << '\n';
  }
}

}  // namespace

SpecDocument parse_spec(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("spec must be a JSON object");
  SpecDocument out;
  if (doc.contains("kind")) {
    if (!doc.at("kind").is_string()) throw ValidationError("field 'kind' must be a string");
    out.kind = doc.at("kind").get<std::string>();
  }
  if (out.kind == "org") {
    reject_unknown(doc, {"kind", "a1", "a2", "b", "c1", "c2", "g", "mu", "sigma2", "p0", "X0"});
    OrgSpec& o = out.org;
    o.a1 = number(doc, "a1");
    o.a2 = number(doc, "a2");
    o.b = number(doc, "b");
    o.c1 = number(doc, "c1");
    o.c2 = number(doc, "c2");
    o.g = number(doc, "g");
    o.mu = number(doc, "mu");
    o.sigma2 = number(doc, "sigma2");
    o.p0 = number_or(doc, "p0", 0.0);
    o.X0 = number(doc, "X0");
    validate_org(o);
    out.canonical = {{"kind", "org"}, {"a1", o.a1}, {"a2", o.a2}, {"b", o.b},   {"c1", o.c1}, {"c2", o.c2},
                     {"g", o.g},      {"mu", o.mu}, {"sigma2", o.sigma2},       {"p0", o.p0}, {"X0", o.X0}};
    return out;
  }
  if (out.kind != "game") throw ValidationError("field 'kind' must be \"game\" or \"org\"");

  reject_unknown(doc, {"kind", "n", "G", "d", "mu", "sigma2", "p0", "X0", "sigma_pairs", "mu_vec"});
  GameSpec& s = out.game;
  s.d = vector_field(doc, "d");
  const Eigen::Index n = s.d.size();
  if (doc.contains("n")) {
    const Json& jn = doc.at("n");
    if (!jn.is_number_integer() || jn.get<long>() != n) throw ValidationError("field 'n' must equal the length of d");
  }
  s.G = matrix_field(doc, "G", n);
  if (doc.contains("mu_vec")) {
    s.mu_vec = vector_field(doc, "mu_vec");
    s.mu = number_or(doc, "mu", s.mu_vec->maxCoeff());
  } else {
    s.mu = number(doc, "mu");
  }
  if (doc.contains("sigma_pairs")) {
    s.sigma_pairs = matrix_field(doc, "sigma_pairs", n);
    s.sigma2 = number_or(doc, "sigma2", s.sigma_pairs->diagonal().maxCoeff());
  } else {
    s.sigma2 = number(doc, "sigma2");
  }
  s.p0 = number_or(doc, "p0", 0.0);
  s.X0 = number(doc, "X0");
  build_game(s);  // validation only

  Json c = {{"kind", "game"}, {"n", n},        {"G", flat(s.G)},         {"d", to_json(s.d)},
            {"mu", s.mu},     {"sigma2", s.sigma2}, {"p0", s.p0},        {"X0", s.X0}};
  if (s.sigma_pairs) c["sigma_pairs"] = flat(*s.sigma_pairs);
  if (s.mu_vec) c["mu_vec"] = to_json(*s.mu_vec);
  out.canonical = std::move(c);
  return out;
}

SpecDocument load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("spec file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_spec(doc);
}

std::string input_hash(const Json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write output file '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw ValidationError("cannot write output file '" + path + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ValidationError("cannot move output into '" + path + "'");
  }
}

std::vector<double> parse_range(const std::string& text) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double start = 0, stop = 0, step = 0;
  char c1 = 0, c2 = 0;
  if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    throw ValidationError("range must look like start:stop:step");
  if (!(step > 0.0) || stop < start) throw ValidationError("range needs step > 0 and stop >= start");
  std::vector<double> out;
  for (long i = 0;; ++i) {
    const double x = start + static_cast<double>(i) * step;
    if (x > stop + 1e-9 * step) break;
    out.push_back(x);
    if (out.size() > 10000000) throw ValidationError("range has too many points");
  }
  return out;
}

Vector parse_profile(const std::string& text) {
  std::vector<double> vals;
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream one(item);
    one.imbue(std::locale::classic());
    double x = 0;
    if (!(one >> x) || !(one >> std::ws).eof()) throw ValidationError("profile must be comma-separated numbers");
    vals.push_back(x);
  }
  if (vals.empty()) throw ValidationError("profile is empty");
  return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

std::string render_text(const Json& report) {
  std::ostringstream out;
  flatten(report, "", out);
  return out.str();
}

Json report_header(const std::string& command, const SpecDocument& spec, const Json& options) {
  return {{"version", kVersion},
          {"command", command},
          {"input", spec.canonical},
          {"input_hash", input_hash(spec.canonical)},
          {"options", options}};
}

}  // namespace bmgame
