#pragma once

#include <cctype>
#include <fstream>
#include <string>

#include "earsym/error.hpp"
#include "earsym/image.hpp"

namespace earsym {

namespace detail {

// Reads the next header token, skipping whitespace and '#' comments.
inline std::string next_pnm_token(std::istream& in, const std::string& path) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    if (tok.empty()) throw ParseError(path + ": unexpected end of PGM header");
    return tok;
}

inline int parse_pnm_int(std::istream& in, const std::string& path) {
    std::string tok = next_pnm_token(in, path);
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ParseError(path + ": malformed PGM header field '" + tok + "'");
    return std::stoi(tok);
}

}  // namespace detail

/// 8-bit binary PGM ("P5") reader.
inline GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::string magic = detail::next_pnm_token(in, path);
    if (magic != "P5") throw ParseError(path + ": not a binary PGM (magic '" + magic + "', expected 'P5')");
    int w = detail::parse_pnm_int(in, path);
    int h = detail::parse_pnm_int(in, path);
    int maxval = detail::parse_pnm_int(in, path);
    if (w < 1 || h < 1) throw ParseError(path + ": invalid PGM dimensions");
    if (maxval < 1 || maxval > 255) throw ParseError(path + ": only 8-bit PGM supported (maxval " + std::to_string(maxval) + ")");
    // Exactly one whitespace byte separates the header from the raster.
    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw ParseError(path + ": truncated PGM raster");
    return img;
}

inline void write_pgm(const std::string& path, const GrayImage& img) {
    if (img.empty()) throw EmptyImage("refusing to write an empty image: " + path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw IoError("write failed: " + path);
}

/// Masks are stored as 0/255 PGM; any value >= 128 parses as foreground.
inline Mask read_mask_pgm(const std::string& path) {
    GrayImage img = read_pgm(path);
    Mask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) mask.bits[i] = img.pixels[i] >= 128 ? 1 : 0;
    return mask;
}

inline void write_mask_pgm(const std::string& path, const Mask& mask) {
    GrayImage img(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255 : 0;
    write_pgm(path, img);
}

inline GrayImage mask_as_image(const Mask& mask) {
    GrayImage img(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255 : 0;
    return img;
}

}  // namespace earsym
