#pragma once

#include <string>
#include <vector>

#include "dagseg/model.hpp"

namespace dagseg {

// Single-file binary container, little-endian throughout:
//   magic "DSGM", u32 format version, u8 variant, config block, vocabulary
//   entries with flags, bigram keys, named tensors (values only), and a
//   trailing FNV-1a-64 checksum over everything before it.
// The byte layout is documented in the README.
void save_model(const SegModel& model, const std::string& path);
SegModel load_model(const std::string& path);

// Adds unseen words as external vocabulary entries (lattice edges with the
// <OOV> embedding row) and rebuilds the automaton. Returns how many entries
// were new. Only DAG variants accept external words.
int inject_external_vocab(SegModel& model, const std::vector<std::u32string>& words);

// One word per line, UTF-8, empty lines skipped.
std::vector<std::u32string> load_wordlist(const std::string& path);

} // namespace dagseg
