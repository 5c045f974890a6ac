#pragma once

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers backed by ICU.
namespace cebread::unicode {

std::string nfc(std::string_view utf8);
std::string to_lower(std::string_view utf8);

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

bool is_letter(char32_t cp);
bool is_mark(char32_t cp);
bool is_space(char32_t cp);

// First code point of the canonical decomposition ("é" -> 'e').
char32_t base_letter(char32_t cp);

std::string trim(std::string_view utf8);

}  // namespace cebread::unicode
