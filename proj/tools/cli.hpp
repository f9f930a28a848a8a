#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace passk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "100,1000,10000" -> {100, 1000, 10000}. Throws std::invalid_argument.
std::vector<std::int64_t> parse_int_list(std::string_view text);

/// "log:<min>:<max>:<count>" or a comma list.
std::vector<std::int64_t> parse_k_grid(std::string_view text);

/// Shell-quoted "passk <args...>".
std::string command_line(const std::vector<std::string>& args);

/// Writes to a sibling temp file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace passk::cli
