#ifndef LFUZZ_CORPUS_H_
#define LFUZZ_CORPUS_H_

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "lfuzz/input.h"
#include "lfuzz/instrument.h"
#include "lfuzz/rng.h"

namespace lfuzz {

struct CorpusEntry {
  PathId path_id;
  InputVector input;
  CostVector costs;
  uint64_t pick_count = 0;
  // Exec counter value when the entry was added.
  uint64_t found_at_exec = 0;
  double found_at_seconds = 0;
};

// One entry per discovered path, in discovery order. Entries are never
// removed or replaced.
class Corpus {
 public:
  bool Contains(PathId id) const { return index_.count(id.id) > 0; }
  // Adds the entry unless its path is already known; returns whether added.
  bool Add(CorpusEntry entry);

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const CorpusEntry& at(size_t i) const { return entries_.at(i); }
  CorpusEntry& at(size_t i) { return entries_.at(i); }
  const std::vector<CorpusEntry>& entries() const { return entries_; }
  const CorpusEntry* Find(PathId id) const;

 private:
  std::vector<CorpusEntry> entries_;
  std::unordered_map<uint64_t, size_t> index_;
};

enum class PickStrategy { kUniform, kRarity };

// Chooses an entry index without touching pick counts. kRarity weights
// entries by 1 / (1 + pick_count).
size_t ChooseEntry(const Corpus& corpus, Rng& rng,
                   PickStrategy strategy = PickStrategy::kUniform);

// ChooseEntry, then increments the chosen entry's pick count.
size_t PickInput(Corpus& corpus, Rng& rng, PickStrategy strategy = PickStrategy::kUniform);

struct EnergySchedule {
  uint64_t base = 16;
  uint64_t cap = 1024;

  // clamp(base * 2^times_selected, base, cap), where times_selected counts
  // earlier selections of the same entry.
  uint64_t MaxEnergy(uint64_t times_selected) const;
};

}  // namespace lfuzz

#endif  // LFUZZ_CORPUS_H_
