#pragma once

#include <string>

#include "semsim/model.hpp"

namespace semsim {

// Native model file: magic "SEMB" + version byte, little-endian config
// block, vocabulary, then the raw float32 tables. load(save(m)) is
// bit-exact.
void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path);

// True when the file starts with the native magic; used to decide between
// load_model and import_text_vectors.
bool is_native_model_file(const std::string& path);

// Text interchange format: header "<V> <dim>", then one "<token> <f1> ...
// <fdim>" line per word (%.6g). Export writes the composed word vectors;
// import yields a plain word-vector model usable for pooling.
void export_text_vectors(const EmbeddingModel& model, const std::string& path);
EmbeddingModel import_text_vectors(const std::string& path);

// Loads either format, sniffing the magic.
EmbeddingModel load_any_model(const std::string& path);

} // namespace semsim
