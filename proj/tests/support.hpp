#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "forgery/imaging.hpp"
#include "forgery/random.hpp"

namespace testing_support {

namespace fs = std::filesystem;

// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t") {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("forgery_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline forgery::RasterImage random_image(forgery::Rng& rng, int w, int h, int ch, int lo = 0, int hi = 255) {
    forgery::RasterImage img(w, h, ch);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.uniform_int(lo, hi));
    return img;
}

// Horizontal ramp, identical in every channel.
inline forgery::RasterImage gradient_image(int w, int h, int ch) {
    forgery::RasterImage img(w, h, ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) img.at(x, y, c) = static_cast<std::uint8_t>((x * 255) / std::max(1, w - 1));
    return img;
}

}  // namespace testing_support
