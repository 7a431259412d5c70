#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace testutil {

struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& prefix) {
        std::mt19937_64 eng(std::random_device{}());
        path = std::filesystem::temp_directory_path() / (prefix + "_" + std::to_string(eng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace testutil
