#ifndef NAMLITE_MODEL_IO_HPP
#define NAMLITE_MODEL_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "namlite/config.hpp"
#include "namlite/ensemble.hpp"

namespace namlite {

inline constexpr int kFormatMajor = 1;
inline constexpr int kFormatMinor = 0;

Json model_to_json(const EnsembleModel& ensemble);
EnsembleModel model_from_json(const Json& json);

// Compact JSON text followed by a newline; the on-disk model format.
std::string model_to_text(const EnsembleModel& ensemble);
EnsembleModel model_from_text(std::string_view text);

void save_model(const EnsembleModel& ensemble, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

// 64-bit FNV-1a of model_to_text, as 16 hex digits.
std::string model_hash(const EnsembleModel& ensemble);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace namlite

#endif  // NAMLITE_MODEL_IO_HPP
