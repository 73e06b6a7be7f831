#include "laplace_bridge/records.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "laplace_bridge/errors.hpp"

namespace lbridge {

namespace {

using nlohmann::json;

Vector read_vector(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, std::string("missing field \"") + key + "\"");
  if (!it->is_array()) throw ParseError(line, std::string("field \"") + key + "\" must be an array");
  Vector v(static_cast<Index>(it->size()));
  Index i = 0;
  for (const auto& x : *it) {
    if (!x.is_number()) {
      throw ParseError(line, std::string("field \"") + key + "\" must contain only numbers");
    }
    v[i++] = x.get<double>();
  }
  return v;
}

Matrix square_from(const Vector& flat, Index k, const char* key, std::size_t line) {
  if (flat.size() != k * k) {
    throw ParseError(line, std::string("field \"") + key + "\" must hold " +
                               std::to_string(k * k) + " numbers, got " +
                               std::to_string(flat.size()));
  }
  Matrix m(k, k);
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) m(r, c) = flat[r * k + c];
  }
  return m;
}

std::vector<double> to_list(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> to_row_major(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

struct Header {
  std::string id;
  std::optional<Index> label;
};

Header read_header(const json& obj, std::size_t line) {
  Header h;
  const auto id = obj.find("id");
  if (id == obj.end()) throw ParseError(line, "missing field \"id\"");
  if (id->is_string()) {
    h.id = id->get<std::string>();
  } else if (id->is_number_integer()) {
    h.id = std::to_string(id->get<long long>());
  } else {
    throw ParseError(line, "field \"id\" must be a string");
  }
  const auto label = obj.find("label");
  if (label != obj.end() && !label->is_null()) {
    if (!label->is_number_integer() || label->get<long long>() < 0) {
      throw ParseError(line, "field \"label\" must be a non-negative integer");
    }
    h.label = static_cast<Index>(label->get<long long>());
  }
  return h;
}

struct ParsedDirichlet {
  DirichletRecord value;
  Index classes() const { return value.alpha.size(); }
};

struct ParsedLogit {
  LogitRecord value;
  Index classes() const { return value.mean.size(); }
};

template <typename Parsed, typename ParseFn>
auto read_lines(std::istream& in, ParseFn parse) {
  std::vector<decltype(Parsed::value)> out;
  std::string text;
  std::size_t line = 0;
  Index classes = -1;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line, "record must be a JSON object");
    Parsed rec = parse(obj, line);
    const Index k = rec.classes();
    if (k < 2) throw ParseError(line, "record needs at least two classes");
    if (classes >= 0 && k != classes) {
      throw ParseError(line, "record has " + std::to_string(k) + " classes, expected " +
                                 std::to_string(classes));
    }
    classes = k;
    if (rec.value.label && *rec.value.label >= k) {
      throw ParseError(line, "label " + std::to_string(*rec.value.label) + " out of range for K=" +
                                 std::to_string(k));
    }
    out.push_back(std::move(rec.value));
  }
  return out;
}

ParsedDirichlet parse_dirichlet(const json& obj, std::size_t line) {
  Header h = read_header(obj, line);
  return {DirichletRecord{std::move(h.id), h.label, read_vector(obj, "alpha", line)}};
}

ParsedLogit parse_logit(const json& obj, std::size_t line) {
  Header h = read_header(obj, line);
  Vector mean = read_vector(obj, "mean", line);
  const Index k = mean.size();
  const auto cov = obj.find("cov");
  if (cov == obj.end() || !cov->is_object()) throw ParseError(line, "missing object \"cov\"");
  const auto type = cov->find("type");
  if (type == cov->end() || !type->is_string()) throw ParseError(line, "missing \"cov.type\"");
  const std::string t = type->get<std::string>();
  Covariance c;
  if (t == "full") {
    c = FullCovariance{square_from(read_vector(*cov, "data", line), k, "data", line)};
  } else if (t == "diag") {
    Vector d = read_vector(*cov, "data", line);
    if (d.size() != k) {
      throw ParseError(line, "diagonal covariance must hold " + std::to_string(k) +
                                 " numbers, got " + std::to_string(d.size()));
    }
    c = DiagonalCovariance{std::move(d)};
  } else if (t == "kron") {
    const auto scale = cov->find("scale");
    if (scale == cov->end() || !scale->is_number()) {
      throw ParseError(line, "kron covariance needs a numeric \"scale\"");
    }
    c = ScaledKronCovariance{scale->get<double>(),
                             square_from(read_vector(*cov, "U", line), k, "U", line)};
  } else {
    throw ParseError(line, "unknown covariance type \"" + t + "\" (expected full, diag or kron)");
  }
  return {LogitRecord{std::move(h.id), h.label, std::move(mean), std::move(c)}};
}

json header_json(const std::string& id, const std::optional<Index>& label) {
  json obj;
  obj["id"] = id;
  if (label) obj["label"] = *label;
  return obj;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open input file '" + path + "'");
  return in;
}

}  // namespace

DirichletParams DirichletRecord::params() const {
  try {
    return DirichletParams(alpha);
  } catch (const DomainError& e) {
    throw DomainError("record '" + id + "': " + e.what());
  }
}

LogitGaussian LogitRecord::gaussian() const {
  try {
    return LogitGaussian(mean, cov);
  } catch (const DomainError& e) {
    throw DomainError("record '" + id + "': " + e.what());
  } catch (const DecompositionError& e) {
    throw DecompositionError("record '" + id + "': " + e.what());
  }
}

std::vector<DirichletRecord> read_dirichlet_records(std::istream& in) {
  return read_lines<ParsedDirichlet>(in, parse_dirichlet);
}

std::vector<LogitRecord> read_logit_records(std::istream& in) {
  return read_lines<ParsedLogit>(in, parse_logit);
}

std::vector<DirichletRecord> read_dirichlet_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_dirichlet_records(in);
}

std::vector<LogitRecord> read_logit_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_logit_records(in);
}

void write_record(std::ostream& out, const DirichletRecord& rec) {
  json obj = header_json(rec.id, rec.label);
  obj["alpha"] = to_list(rec.alpha);
  out << obj.dump() << '\n';
}

void write_record(std::ostream& out, const LogitRecord& rec) {
  json obj = header_json(rec.id, rec.label);
  obj["mean"] = to_list(rec.mean);
  json cov;
  std::visit(
      [&cov](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FullCovariance>) {
          cov["type"] = "full";
          cov["data"] = to_row_major(c.matrix);
        } else if constexpr (std::is_same_v<T, DiagonalCovariance>) {
          cov["type"] = "diag";
          cov["data"] = to_list(c.variances);
        } else {
          cov["type"] = "kron";
          cov["scale"] = c.scale;
          cov["U"] = to_row_major(c.factor);
        }
      },
      rec.cov);
  obj["cov"] = std::move(cov);
  out << obj.dump() << '\n';
}

}  // namespace lbridge
