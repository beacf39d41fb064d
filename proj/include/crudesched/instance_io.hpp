#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "crudesched/genome.hpp"
#include "crudesched/instance.hpp"

namespace crudesched {

inline constexpr int kInstanceFormatVersion = 1;

/// Malformed instance document (syntax, missing keys, wrong types, or
/// dangling name references).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and validates an instance document. Throws ParseError or
/// InstanceError. The schema is described in docs/FORMATS.md.
Instance parse_instance(const std::string& text);
Instance load_instance(const std::filesystem::path& path);

std::string instance_to_json(const Instance& instance);
void save_instance(const Instance& instance, const std::filesystem::path& path);

/// Schedules are stored by entity name, one entry per period. Unused
/// vessels and idle CDUs may be omitted.
Schedule parse_schedule(const std::string& text, const Instance& instance);
Schedule load_schedule(const std::filesystem::path& path, const Instance& instance);
std::string schedule_to_json(const Schedule& schedule, const Instance& instance);
/// `period,action,unit,tank,amount`; one row per receiving or charging tank.
std::string schedule_to_csv(const Schedule& schedule, const Instance& instance);

/// Whole-file helpers shared by the CLI and tests.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace crudesched
