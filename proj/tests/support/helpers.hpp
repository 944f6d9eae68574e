#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "cxnprobe/fixture.hpp"
#include "cxnprobe/types.hpp"

namespace testsupport {

// Fresh scratch directory per test binary run; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / ("cxnprobe-" + tag + "-" + std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directories(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot allocate temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline const std::vector<cxnprobe::ConstructionInstance>& full_fixture() {
    static const auto corpus =
        cxnprobe::fixture::make_fixture_corpus(cxnprobe::fixture::full_fixture_params());
    return corpus;
}

inline const std::vector<cxnprobe::ConstructionInstance>& smoke_fixture() {
    static const auto corpus = cxnprobe::fixture::make_fixture_corpus(
        cxnprobe::fixture::smoke_fixture_params());
    return corpus;
}

inline std::filesystem::path support_dir() {
    const char* env = std::getenv("CXNPROBE_TEST_SUPPORT");
    if (env != nullptr && *env != '\0') return env;
    return std::filesystem::path(__FILE__).parent_path();
}

}  // namespace testsupport
