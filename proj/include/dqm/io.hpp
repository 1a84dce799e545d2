#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "dqm/bench.hpp"

namespace dqm {

/// A problem read from a JSON problem file.
struct ProblemFile {
  AnyProblem problem;
  NewtonConfig newton;
};

/// Parses a problem document. Shape errors raise ValidationError, bad
/// expressions ParseError.
ProblemFile parse_problem(const std::string& json_text);
/// Reads and parses a file; an unreadable file raises IoError.
ProblemFile load_problem(const std::string& path);

/// Replaces epsilon on either problem kind.
void set_epsilon(AnyProblem& p, double eps);

/// Nodal (x, y) pairs. CSV leads with '#' comment lines for diagnostics.
void write_solution_csv(std::ostream& os, const SolveOutcome& s, double epsilon);
void write_solution_json(std::ostream& os, const SolveOutcome& s, const std::string& problem, double epsilon);

/// problem,norm,N,epsilon,value with 4 significant digits; failed cells carry
/// the value "failed".
void write_table_csv(std::ostream& os, const Table& t);
/// Same cells with full-precision values and per-cell error messages.
void write_table_json(std::ostream& os, const Table& t);

}  // namespace dqm
