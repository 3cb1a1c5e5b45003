#pragma once

#include <string>
#include <vector>

#include "qnet/utility.hpp"

namespace qnet {

struct Link {
  int id = -1;
  int a = -1;
  int b = -1;
  double length_km = 0.0;
  double chi = 1e5;  // attempt rate, attempts/s

  int other(int node) const { return node == a ? b : a; }
};

// Undirected simple connected graph. Link ids are their index in `links`.
struct Topology {
  int n_nodes = 0;
  std::vector<Link> links;
  std::vector<std::vector<int>> incident;  // node -> incident link ids

  void add_link(int a, int b, double length_km, double chi);
  bool connected() const;
  int find_link(int a, int b) const;  // -1 if absent
};

struct SessionSpec {
  int id = -1;
  int source = -1;
  int sink = -1;
  std::vector<int> path;  // ordered link ids, source to sink
  Utility utility;
  double f_min = 0.5;
};

struct RoutingMatrix {
  int n_links = 0;
  int n_sessions = 0;
  std::vector<double> dense;  // row-major, entry(l, r) = 1 iff l on path r
  int rank = 0;
  bool full_column_rank = false;

  double entry(int link, int session) const {
    return dense[static_cast<size_t>(link) * n_sessions + session];
  }
};

Topology build_dumbbell(double link_length_km, double chi = 1e5);
Topology build_nsfnet(double downscale, double chi = 1e5);

// Canonical NSFNet link table (a, b, length_km), 14 nodes / 21 links.
const std::vector<std::tuple<int, int, double>>& nsfnet_canonical_links();

// Minimum-hop path; equal-hop ties broken by the lexicographically least
// link-id sequence. Throws if src == dst or the pair is disconnected.
std::vector<int> shortest_path(const Topology& topo, int src, int dst);

RoutingMatrix routing_matrix(const Topology& topo,
                             const std::vector<SessionSpec>& sessions);

// eta = 0.25 * exp(-(L/2)/22), d = 1.5 * chi * eta  [pairs/s]
double link_rate_param(double length_km, double chi);

// Walks `path` from `src`, validating contiguity; returns the node sequence.
std::vector<int> path_nodes(const Topology& topo, const std::vector<int>& path,
                            int src);

}  // namespace qnet
