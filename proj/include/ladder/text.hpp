#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ladder {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Split on runs of whitespace; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

// Split on a single delimiter; keeps empty fields.
std::vector<std::string> split(std::string_view s, char delim);

bool is_ascii_digit(char c);
bool is_ascii_alpha(char c);
bool is_ascii_alnum(char c);
bool is_hex_digit(char c);

// FNV-1a over bytes. Used both for content manifests and as the feature
// hash of the built-in embedding; the seed parameter replaces the standard
// offset basis so distinct feature families hash independently.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL);

// fnv1a64 rendered as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace ladder
