#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "cli_internal.hpp"
#include "sparselab/errors.hpp"

namespace sparselab::cli {

namespace {

namespace fs = std::filesystem;
using detail::Json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string csv_text(const detail::Table& t) {
  std::string text;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text += (i ? "," : "") + csv_field(cells[i]);
    text += '\n';
  };
  line(t.columns);
  for (const auto& row : t.rows) line(row);
  return text;
}

// Written beside the target, then renamed, so a failed run leaves no partial file.
void write_atomic(const fs::path& target, const std::string& text) {
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    os << text;
    os.flush();
    if (!os) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move result into '" + target.string() + "'");
  }
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return exit_io;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return exit_io;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical;
  }
}

void print_summary(std::ostream& out, const Json& summary) {
  for (const auto& [key, value] : summary.items()) out << "  " << key << " = " << value.dump() << '\n';
}

}  // namespace

int run(const std::string& config_path, const Overrides& overrides, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = detail::load_config(config_path, overrides);
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");

    const auto start = std::chrono::steady_clock::now();
    const auto result = detail::run_experiment(cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string hash = detail::hash_of(cfg.resolved);
    Json record = {{"config_hash", hash},
                   {"config", cfg.resolved},
                   {"run", {{"threads", cfg.threads}, {"output_dir", cfg.output_dir}}},
                   {"experiment", cfg.experiment},
                   {"library_version", SPARSELAB_VERSION},
                   {"wall_clock_seconds", seconds},
                   {"summary", result.summary},
                   {"warnings", result.warnings},
                   {"columns", result.table.columns},
                   {"rows", result.table.rows}};

    const fs::path json_path = dir / (cfg.experiment + ".json");
    const fs::path csv_path = dir / (cfg.experiment + ".csv");
    write_atomic(csv_path, csv_text(result.table));
    write_atomic(json_path, record.dump(2) + "\n");

    out << cfg.experiment << " (config " << hash << ", " << std::fixed << std::setprecision(3) << seconds << " s)\n";
    out << std::defaultfloat;
    print_summary(out, result.summary);
    for (const auto& w : result.warnings) out << "warning: " << w << '\n';
    out << "wrote " << json_path.string() << " and " << csv_path.string() << '\n';
    return static_cast<int>(exit_ok);
  });
}

int validate(const std::string& config_path, const Overrides& overrides, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = detail::load_config(config_path, overrides);
    out << cfg.experiment << ": config valid (hash " << detail::hash_of(cfg.resolved) << ")\n";
    for (const auto& c : detail::hypothesis_checks(cfg)) {
      const char* tag = c.passed ? "ok" : (c.warning_only ? "warning" : "violated");
      out << "  [" << tag << "] " << c.name << ": " << c.detail << '\n';
    }
    return static_cast<int>(exit_ok);
  });
}

std::string resolved_config(const std::string& config_path, const Overrides& overrides) {
  return detail::load_config(config_path, overrides).resolved.dump();
}

std::string config_hash(const std::string& config_path, const Overrides& overrides) {
  return detail::hash_of(detail::load_config(config_path, overrides).resolved);
}

}  // namespace sparselab::cli
