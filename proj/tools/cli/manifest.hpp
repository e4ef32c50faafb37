#pragma once

#include "config.hpp"

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace vitd::cli {

/// Lowercase hex SHA-256 of a file's bytes. Throws IoError if unreadable.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// One manifest entry, collected while a command runs and appended to
/// <output_dir>/manifest.jsonl by commit().
class ManifestStep {
public:
    ManifestStep(std::string step, const ExperimentConfig& config, std::vector<std::string> args);

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void set_detail(const std::string& key, std::string value);

    /// Hashes every listed file and appends one JSON line.
    void commit();

private:
    std::string m_step;
    const ExperimentConfig& m_config;
    std::vector<std::string> m_args;
    std::vector<std::filesystem::path> m_inputs;
    std::vector<std::filesystem::path> m_outputs;
    std::vector<std::pair<std::string, std::string>> m_details;
    std::chrono::system_clock::time_point m_started;
};

} // namespace vitd::cli
