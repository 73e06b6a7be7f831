#pragma once

// JSON Lines records, one per line:
//   Dirichlet: {"id": "a", "label": 2, "alpha": [1, 2, 3]}
//   Gaussian:  {"id": "a", "label": 2, "mean": [...], "cov": COV}
// with COV one of
//   {"type": "full", "data": [K*K floats, row-major]}
//   {"type": "diag", "data": [K floats]}
//   {"type": "kron", "scale": s, "U": [K*K floats, row-major]}
// "label" is optional. Blank lines are skipped.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "laplace_bridge/dist.hpp"

namespace lbridge {

struct DirichletRecord {
  std::string id;
  std::optional<Index> label;
  Vector alpha;

  /// Validated parameters; throws DomainError naming the record id.
  DirichletParams params() const;
};

struct LogitRecord {
  std::string id;
  std::optional<Index> label;
  Vector mean;
  Covariance cov;

  /// Validated Gaussian; throws DomainError naming the record id.
  LogitGaussian gaussian() const;
};

/// Reads every record. Throws ParseError with the 1-based line number for
/// malformed JSON, missing or mistyped fields, wrong sizes, or a class count
/// that differs from the first record.
std::vector<DirichletRecord> read_dirichlet_records(std::istream& in);
std::vector<LogitRecord> read_logit_records(std::istream& in);

std::vector<DirichletRecord> read_dirichlet_file(const std::string& path);
std::vector<LogitRecord> read_logit_file(const std::string& path);

/// One JSON object per call, terminated by '\n'. Doubles are written with
/// enough digits to round-trip exactly.
void write_record(std::ostream& out, const DirichletRecord& rec);
void write_record(std::ostream& out, const LogitRecord& rec);

}  // namespace lbridge
