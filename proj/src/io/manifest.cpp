#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "ncrc/io.hpp"

namespace ncrc::io {

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path.string());
    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 initialisation failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

FileDigest digest(const std::filesystem::path& path)
{
    return {path.string(), sha256_file(path)};
}

namespace {

json digests_to_json(const std::vector<FileDigest>& files)
{
    json out = json::array();
    for (const FileDigest& f : files) out.push_back(json{{"path", f.path}, {"sha256", f.sha256}});
    return out;
}

std::vector<FileDigest> digests_from_json(const json& value)
{
    std::vector<FileDigest> out;
    for (const json& f : value) out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
    return out;
}

} // namespace

json manifest_to_json(const RunManifest& m)
{
    return json{{"tool_version", m.tool_version},
                {"command", m.command},
                {"config", m.config},
                {"seed", m.seed},
                {"inputs", digests_to_json(m.inputs)},
                {"outputs", digests_to_json(m.outputs)},
                {"wall_clock_seconds", m.wall_clock_seconds}};
}

RunManifest manifest_from_json(const json& value)
{
    try {
        RunManifest m;
        m.tool_version = value.at("tool_version").get<std::string>();
        m.command = value.at("command").get<std::string>();
        m.config = value.at("config");
        m.seed = value.at("seed").get<std::uint64_t>();
        m.inputs = digests_from_json(value.at("inputs"));
        m.outputs = digests_from_json(value.at("outputs"));
        m.wall_clock_seconds = value.at("wall_clock_seconds").get<double>();
        return m;
    }
    catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed manifest: ") + e.what());
    }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest)
{
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << manifest_to_json(manifest).dump(2) << '\n';
}

std::vector<std::string> verify_manifest(const RunManifest& manifest, const std::filesystem::path& base_dir)
{
    std::vector<std::string> problems;
    auto check = [&](const FileDigest& f) {
        const std::filesystem::path listed(f.path);
        const std::filesystem::path p = listed.is_absolute() ? listed : base_dir / listed;
        if (!std::filesystem::exists(p)) {
            problems.push_back(f.path + ": missing");
            return;
        }
        if (sha256_file(p) != f.sha256) problems.push_back(f.path + ": digest mismatch");
    };
    for (const FileDigest& f : manifest.inputs) check(f);
    for (const FileDigest& f : manifest.outputs) check(f);
    return problems;
}

} // namespace ncrc::io
