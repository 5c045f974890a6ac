#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cebread/corpus.hpp"
#include "cebread/features.hpp"
#include "cebread/model.hpp"

namespace cebread::cli {

struct RunConfig {
  std::filesystem::path corpus;
  std::optional<CorpusFormat> format;  // guessed from the path when empty
  std::optional<std::filesystem::path> embeddings;
  std::vector<FeatureSets> feature_sets;
  std::vector<ModelKind> models;
  std::vector<std::string> grid_overrides;  // "kind:key=v1|v2;key=..."
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool plain_folds = false;
  std::filesystem::path out = "out";
};

// Throws Error subclasses; the caller prints and sets the exit code.
void cmd_extract(const RunConfig& config, std::ostream& out);
void cmd_evaluate(const RunConfig& config, std::ostream& out);
void cmd_train(const RunConfig& config, const std::string& params,
               const std::filesystem::path& model_path, std::ostream& out);
void cmd_importance(const RunConfig& config, const std::filesystem::path& model_path,
                    std::size_t repeats, std::ostream& out);
void cmd_correlate(const RunConfig& config, std::ostream& out);
void cmd_predict(const std::filesystem::path& model_path, const std::vector<std::string>& texts,
                 const std::optional<std::filesystem::path>& embeddings, std::ostream& out);
void cmd_syllabify(const std::string& text, std::ostream& out);

// Full command line, including argv[0]. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cebread::cli
