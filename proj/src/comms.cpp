#include "piloc/comms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace piloc {
namespace {

bool in_range(Position a, Position b, double range) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy <= range * range;
}

}  // namespace

std::vector<std::vector<int>> comm_groups(std::span<const Position> positions, double range) {
  const int n = static_cast<int>(positions.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (in_range(positions[i], positions[j], range)) {
        const int a = find(i);
        const int b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

void merge_into(KnowledgeMaps& dst, const KnowledgeMaps& src) {
  if (dst.width_ != src.width_ || dst.height_ != src.height_) {
    throw std::invalid_argument("knowledge maps differ in size");
  }
  for (std::size_t i = 0; i < dst.obstacle_.size(); ++i) {
    const Knowledge s = src.obstacle_[i];
    if (s == Knowledge::Unknown) continue;
    Knowledge& d = dst.obstacle_[i];
    if (d == Knowledge::Unknown) {
      d = s;
      dst.marks_[i] = src.marks_[i];
    } else {
      if (d != s) throw std::logic_error("knowledge conflict during merge");
      dst.marks_[i] = std::min(dst.marks_[i], src.marks_[i]);
    }
  }
}

void merge_group(std::span<KnowledgeMaps* const> members) {
  if (members.size() < 2) return;
  KnowledgeMaps merged = *members[0];
  for (std::size_t i = 1; i < members.size(); ++i) merge_into(merged, *members[i]);
  for (KnowledgeMaps* m : members) *m = merged;
}

std::vector<std::vector<int>> communicate(std::span<KnowledgeMaps* const> maps,
                                          std::span<const Position> positions,
                                          double range, bool transitive) {
  auto groups = comm_groups(positions, range);
  if (transitive) {
    std::vector<KnowledgeMaps*> members;
    for (const auto& g : groups) {
      if (g.size() < 2) continue;
      members.clear();
      for (int i : g) members.push_back(maps[i]);
      merge_group(members);
    }
    return groups;
  }
  std::vector<KnowledgeMaps> snapshot;
  snapshot.reserve(maps.size());
  for (const KnowledgeMaps* m : maps) snapshot.push_back(*m);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    for (std::size_t j = 0; j < maps.size(); ++j) {
      if (i != j && in_range(positions[i], positions[j], range)) merge_into(*maps[i], snapshot[j]);
    }
  }
  return groups;
}

}  // namespace piloc
