#include "leaps/placement.hpp"

namespace leaps {

PlacementState initial_state(Netlist const &n, FabricLayout const &layout) {
  PlacementState s;
  s.x.resize(n.instances.size());
  s.y.resize(n.instances.size());
  auto const c = layout.bounds().center();
  for (auto const &inst : n.instances) s.set(inst.id, inst.position ? *inst.position : c);
  return s;
}

std::vector<SlrIndex> slr_indices(PlacementState const &s, SlrTopology const &topo) {
  std::vector<SlrIndex> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = slr_index_clamped(s.x[i], s.y[i], topo);
  return out;
}

}  // namespace leaps
