#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ermetrics {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A record appeared under two different cluster labels.
class ConflictingAssignment : public Error {
public:
  ConflictingAssignment(std::string record, std::string first_label,
                        std::string second_label, std::size_t line = 0)
      : Error(make_message(record, first_label, second_label, line)),
        record_(std::move(record)),
        first_label_(std::move(first_label)),
        second_label_(std::move(second_label)),
        line_(line) {}

  const std::string& record() const { return record_; }
  const std::string& first_label() const { return first_label_; }
  const std::string& second_label() const { return second_label_; }
  std::size_t line() const { return line_; }  // 0 when not from a file

private:
  static std::string make_message(const std::string& record,
                                  const std::string& first,
                                  const std::string& second,
                                  std::size_t line) {
    std::string msg = "conflicting assignment: record '" + record +
                      "' labeled '" + first + "' and '" + second + "'";
    if (line != 0) msg += " (line " + std::to_string(line) + ")";
    return msg;
  }

  std::string record_, first_label_, second_label_;
  std::size_t line_;
};

/// Strict alignment found records present on only one side.
class UniverseMismatch : public Error {
public:
  UniverseMismatch(std::uint64_t left_only_count,
                   std::vector<std::string> left_only_sample,
                   std::uint64_t right_only_count,
                   std::vector<std::string> right_only_sample)
      : Error(make_message(left_only_count, left_only_sample, right_only_count,
                           right_only_sample)),
        left_only_count_(left_only_count),
        right_only_count_(right_only_count),
        left_only_sample_(std::move(left_only_sample)),
        right_only_sample_(std::move(right_only_sample)) {}

  std::uint64_t left_only_count() const { return left_only_count_; }
  std::uint64_t right_only_count() const { return right_only_count_; }
  const std::vector<std::string>& left_only_sample() const { return left_only_sample_; }
  const std::vector<std::string>& right_only_sample() const { return right_only_sample_; }

private:
  static std::string make_message(std::uint64_t lc,
                                  const std::vector<std::string>& ls,
                                  std::uint64_t rc,
                                  const std::vector<std::string>& rs) {
    auto side = [](std::uint64_t count, const std::vector<std::string>& sample) {
      std::string out = std::to_string(count) + " record(s)";
      if (!sample.empty()) {
        out += " (e.g.";
        for (const auto& t : sample) out += " '" + t + "'";
        out += ")";
      }
      return out;
    };
    return "universe mismatch under strict policy: " + side(lc, ls) +
           " only in left, " + side(rc, rs) + " only in right";
  }

  std::uint64_t left_only_count_, right_only_count_;
  std::vector<std::string> left_only_sample_, right_only_sample_;
};

/// A metric was asked for a clustering with no clusters / no records.
class EmptyClustering : public Error {
public:
  explicit EmptyClustering(const std::string& what_for)
      : Error("empty clustering: " + what_for) {}
};

class ParseError : public Error {
public:
  ParseError(std::string source, std::size_t line, const std::string& detail)
      : Error(make_message(source, line, detail)),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

private:
  static std::string make_message(const std::string& source, std::size_t line,
                                  const std::string& detail) {
    std::string msg = source;
    if (line != 0) msg += ":" + std::to_string(line);
    return msg + ": " + detail;
  }

  std::string source_;
  std::size_t line_;
};

/// No legal perturbation exists for the requested operation mix.
class Unsatisfiable : public Error {
public:
  explicit Unsatisfiable(const std::string& msg) : Error(msg) {}
};

}  // namespace ermetrics
