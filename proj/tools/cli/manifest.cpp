#include "manifest.hpp"

#include <vitd/hash.hpp>
#include <vitd/version.hpp>

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <ctime>
#include <fstream>
#include <memory>

namespace vitd::cli {
namespace {

using Digest = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

Digest new_digest() {
    Digest ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
    return ctx;
}

std::string finish(EVP_MD_CTX* ctx) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, md.data(), &len) != 1) throw Error("sha256: final failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
}

std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(tp.time_since_epoch()).count();
    const std::time_t secs = static_cast<std::time_t>(ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    const auto frac = std::to_string(1000 + ms % 1000).substr(1);
    return std::string(buf) + "." + frac + "Z";
}

nlohmann::ordered_json file_entries(const std::vector<std::filesystem::path>& paths) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : paths) arr.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    return arr;
}

} // namespace

std::string sha256_hex(std::string_view bytes) {
    auto ctx = new_digest();
    EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size());
    return finish(ctx.get());
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for hashing");
    auto ctx = new_digest();
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    if (in.bad()) throw IoError(path.string(), "read failed while hashing");
    return finish(ctx.get());
}

ManifestStep::ManifestStep(std::string step, const ExperimentConfig& config, std::vector<std::string> args)
    : m_step(std::move(step)), m_config(config), m_args(std::move(args)),
      m_started(std::chrono::system_clock::now()) {}

void ManifestStep::add_input(const std::filesystem::path& path) { m_inputs.push_back(path); }
void ManifestStep::add_output(const std::filesystem::path& path) { m_outputs.push_back(path); }
void ManifestStep::set_detail(const std::string& key, std::string value) {
    m_details.emplace_back(key, std::move(value));
}

void ManifestStep::commit() {
    nlohmann::ordered_json j;
    j["step"] = m_step;
    j["toolkit_version"] = kVersion;
    j["config"] = {{"path", m_config.source.string()}, {"sha256", sha256_hex(m_config.source_text)}};
    j["seed"] = m_config.seed;
    j["feature_hash"] = {{"name", std::string(kFeatureHashName)},
                         {"seed", m_config.featurizer.hash_seed},
                         {"fingerprint", m_config.featurizer.fingerprint()}};
    j["resolved_config"] = nlohmann::ordered_json::parse(m_config.resolved_json());
    j["args"] = m_args;
    j["inputs"] = file_entries(m_inputs);
    j["outputs"] = file_entries(m_outputs);
    for (const auto& [k, v] : m_details) j["details"][k] = v;
    j["started_at"] = utc_timestamp(m_started);
    j["finished_at"] = utc_timestamp(std::chrono::system_clock::now());

    const auto path = m_config.output_dir / "manifest.jsonl";
    std::filesystem::create_directories(m_config.output_dir);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw IoError(path.string(), "cannot open manifest for append");
    out << j.dump() << '\n';
    if (!out) throw IoError(path.string(), "write failed");
}

} // namespace vitd::cli
