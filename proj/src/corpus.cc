#include "lfuzz/corpus.h"

#include <algorithm>
#include <stdexcept>

namespace lfuzz {

bool Corpus::Add(CorpusEntry entry) {
  if (Contains(entry.path_id)) return false;
  index_.emplace(entry.path_id.id, entries_.size());
  entries_.push_back(std::move(entry));
  return true;
}

const CorpusEntry* Corpus::Find(PathId id) const {
  auto it = index_.find(id.id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

size_t ChooseEntry(const Corpus& corpus, Rng& rng, PickStrategy strategy) {
  if (corpus.empty()) throw std::logic_error("picking from an empty corpus");
  size_t chosen = 0;
  if (strategy == PickStrategy::kUniform) {
    chosen = rng.Below(corpus.size());
  } else {
    double total = 0;
    for (const auto& e : corpus.entries()) total += 1.0 / (1.0 + e.pick_count);
    double x = rng.Unit() * total;
    chosen = corpus.size() - 1;
    for (size_t i = 0; i < corpus.size(); ++i) {
      x -= 1.0 / (1.0 + corpus.at(i).pick_count);
      if (x < 0) {
        chosen = i;
        break;
      }
    }
  }
  return chosen;
}

size_t PickInput(Corpus& corpus, Rng& rng, PickStrategy strategy) {
  const size_t chosen = ChooseEntry(corpus, rng, strategy);
  ++corpus.at(chosen).pick_count;
  return chosen;
}

uint64_t EnergySchedule::MaxEnergy(uint64_t times_selected) const {
  const uint64_t floor = std::max<uint64_t>(base, 1);
  const uint64_t ceiling = std::max(cap, floor);
  uint64_t energy = floor;
  for (uint64_t i = 0; i < times_selected && energy < ceiling; ++i) energy *= 2;
  return std::clamp(energy, floor, ceiling);
}

}  // namespace lfuzz
