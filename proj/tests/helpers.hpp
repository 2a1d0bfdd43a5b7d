#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "earsym/earsym.hpp"

namespace testutil {

namespace fs = std::filesystem;

/// Unique working directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("earsym_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

/// Runs the CLI binary; returns the exit code. Output is suppressed unless
/// EARSYM_TEST_VERBOSE is set.
inline int run_cli(const std::string& args) {
    std::string cmd = std::string(EARSYM_CLI_PATH) + " " + args;
    if (std::getenv("EARSYM_TEST_VERBOSE") == nullptr) cmd += " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string file_bytes(const std::string& path) { return earsym::read_text_file(path); }

/// Every regular file under `dir`, keyed by relative path.
inline std::map<std::string, std::string> snapshot_dir(const std::string& dir) {
    std::map<std::string, std::string> snap;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            snap.emplace(fs::relative(entry.path(), dir).string(), file_bytes(entry.path().string()));
    return snap;
}

/// Random blobby mask: union of a few rectangles and disks plus salt pixels,
/// with at least `min_pixels` set.
inline earsym::Mask random_mask(earsym::Rng& rng, int max_side, int min_pixels = 3) {
    int w = 6 + static_cast<int>(rng.index(static_cast<std::size_t>(max_side - 5)));
    int h = 6 + static_cast<int>(rng.index(static_cast<std::size_t>(max_side - 5)));
    earsym::Mask mask(w, h);
    int blobs = 1 + static_cast<int>(rng.index(3));
    for (int b = 0; b < blobs; ++b) {
        int cr = static_cast<int>(rng.index(h));
        int cc = static_cast<int>(rng.index(w));
        int radius = 1 + static_cast<int>(rng.index(std::max(2, std::min(w, h) / 3)));
        bool disk = rng.uniform() < 0.5;
        for (int r = std::max(0, cr - radius); r <= std::min(h - 1, cr + radius); ++r)
            for (int c = std::max(0, cc - radius); c <= std::min(w - 1, cc + radius); ++c)
                if (!disk || (r - cr) * (r - cr) + (c - cc) * (c - cc) <= radius * radius) mask.set(r, c);
    }
    int salt = static_cast<int>(rng.index(6));
    for (int s = 0; s < salt; ++s) mask.set(static_cast<int>(rng.index(h)), static_cast<int>(rng.index(w)));
    while (static_cast<int>(mask.count_set()) < min_pixels)
        mask.set(static_cast<int>(rng.index(h)), static_cast<int>(rng.index(w)));
    return mask;
}

inline earsym::GrayImage random_image(earsym::Rng& rng, int w, int h) {
    earsym::GrayImage img(w, h);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.index(256));
    return img;
}

/// Score list with a 50/50 chance of a discrete grid (forcing ties).
inline std::vector<double> random_scores(earsym::Rng& rng, std::size_t n, bool grid) {
    std::vector<double> v(n);
    for (auto& s : v) {
        double x = rng.uniform(-1.0, 1.0);
        s = grid ? std::round(x * 10.0) / 10.0 : x;
    }
    return v;
}

}  // namespace testutil
