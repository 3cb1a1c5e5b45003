#include "qnet/topology.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace qnet {

void Topology::add_link(int a, int b, double length_km, double chi) {
  if (a == b) throw std::invalid_argument("topology: self-loop link");
  if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes) {
    throw std::invalid_argument("topology: link endpoint out of range");
  }
  if (length_km < 0.0) {
    throw std::invalid_argument("topology: negative link length");
  }
  if (!(chi > 0.0)) {
    throw std::invalid_argument("topology: chi must be positive");
  }
  if (find_link(a, b) >= 0) {
    throw std::invalid_argument("topology: duplicate link");
  }
  Link l;
  l.id = static_cast<int>(links.size());
  l.a = a;
  l.b = b;
  l.length_km = length_km;
  l.chi = chi;
  links.push_back(l);
  incident.resize(n_nodes);
  incident[a].push_back(l.id);
  incident[b].push_back(l.id);
}

int Topology::find_link(int a, int b) const {
  for (const Link& l : links) {
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return l.id;
  }
  return -1;
}

bool Topology::connected() const {
  if (n_nodes == 0) return false;
  std::vector<char> seen(n_nodes, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int lid : incident[u]) {
      int v = links[lid].other(u);
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == n_nodes;
}

Topology build_dumbbell(double link_length_km, double chi) {
  if (!(link_length_km > 0.0)) {
    throw std::invalid_argument("build_dumbbell: length must be positive");
  }
  Topology t;
  t.n_nodes = 8;
  t.incident.resize(8);
  // Leaves 0,1,2 on hub 3; hub link 3-4; leaves 5,6,7 on hub 4.
  t.add_link(0, 3, link_length_km, chi);
  t.add_link(1, 3, link_length_km, chi);
  t.add_link(2, 3, link_length_km, chi);
  t.add_link(3, 4, link_length_km, chi);
  t.add_link(4, 5, link_length_km, chi);
  t.add_link(4, 6, link_length_km, chi);
  t.add_link(4, 7, link_length_km, chi);
  return t;
}

const std::vector<std::tuple<int, int, double>>& nsfnet_canonical_links() {
  // NSFNET T1 backbone, 14 nodes / 21 links. Lengths in km as tabulated in
  // the optical-networking literature (Mukherjee et al. style distance set).
  static const std::vector<std::tuple<int, int, double>> table = {
      {0, 1, 1100},  {0, 2, 1600},  {0, 7, 2800},  {1, 2, 600},
      {1, 3, 1000},  {2, 5, 2000},  {3, 4, 600},   {3, 10, 2400},
      {4, 5, 1100},  {4, 6, 800},   {5, 9, 1200},  {5, 12, 2000},
      {6, 7, 700},   {7, 8, 700},   {8, 9, 900},   {8, 11, 500},
      {8, 13, 500},  {10, 11, 800}, {10, 13, 1000},{11, 12, 300},
      {12, 13, 300},
  };
  return table;
}

Topology build_nsfnet(double downscale, double chi) {
  if (!(downscale > 0.0)) {
    throw std::invalid_argument("build_nsfnet: downscale must be positive");
  }
  Topology t;
  t.n_nodes = 14;
  t.incident.resize(14);
  for (const auto& [a, b, len] : nsfnet_canonical_links()) {
    t.add_link(a, b, len / downscale, chi);
  }
  return t;
}

std::vector<int> shortest_path(const Topology& topo, int src, int dst) {
  if (src == dst) throw std::invalid_argument("shortest_path: src == dst");
  if (src < 0 || dst < 0 || src >= topo.n_nodes || dst >= topo.n_nodes) {
    throw std::invalid_argument("shortest_path: node out of range");
  }
  // Hop distances from dst, then walk greedily from src choosing at each
  // step the smallest link id that decreases the distance. This yields the
  // lexicographically least link-id sequence among minimum-hop paths.
  std::vector<int> dist(topo.n_nodes, -1);
  std::queue<int> q;
  dist[dst] = 0;
  q.push(dst);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int lid : topo.incident[u]) {
      int v = topo.links[lid].other(u);
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  if (dist[src] < 0) {
    throw std::invalid_argument("shortest_path: nodes are disconnected");
  }
  std::vector<int> path;
  int cur = src;
  while (cur != dst) {
    int best = -1;
    for (int lid : topo.incident[cur]) {
      int v = topo.links[lid].other(cur);
      if (dist[v] == dist[cur] - 1 && (best < 0 || lid < best)) best = lid;
    }
    path.push_back(best);
    cur = topo.links[best].other(cur);
  }
  return path;
}

std::vector<int> path_nodes(const Topology& topo, const std::vector<int>& path,
                            int src) {
  std::vector<int> nodes{src};
  int cur = src;
  for (int lid : path) {
    if (lid < 0 || lid >= static_cast<int>(topo.links.size())) {
      throw std::invalid_argument("path: unknown link id");
    }
    const Link& l = topo.links[lid];
    if (l.a != cur && l.b != cur) {
      throw std::invalid_argument("path: links are not contiguous");
    }
    cur = l.other(cur);
    nodes.push_back(cur);
  }
  return nodes;
}

RoutingMatrix routing_matrix(const Topology& topo,
                             const std::vector<SessionSpec>& sessions) {
  RoutingMatrix rm;
  rm.n_links = static_cast<int>(topo.links.size());
  rm.n_sessions = static_cast<int>(sessions.size());
  rm.dense.assign(static_cast<size_t>(rm.n_links) * rm.n_sessions, 0.0);
  for (int r = 0; r < rm.n_sessions; ++r) {
    path_nodes(topo, sessions[r].path, sessions[r].source);  // validates
    for (int lid : sessions[r].path) {
      rm.dense[static_cast<size_t>(lid) * rm.n_sessions + r] = 1.0;
    }
  }
  if (rm.n_sessions > 0 && rm.n_links > 0) {
    Eigen::MatrixXd m(rm.n_links, rm.n_sessions);
    for (int l = 0; l < rm.n_links; ++l) {
      for (int r = 0; r < rm.n_sessions; ++r) m(l, r) = rm.entry(l, r);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    qr.setThreshold(1e-9);
    rm.rank = static_cast<int>(qr.rank());
  }
  rm.full_column_rank = rm.rank == rm.n_sessions;
  return rm;
}

double link_rate_param(double length_km, double chi) {
  if (length_km < 0.0) {
    throw std::invalid_argument("link_rate_param: negative length");
  }
  if (!(chi > 0.0)) {
    throw std::invalid_argument("link_rate_param: chi must be positive");
  }
  double eta = 0.25 * std::exp(-(length_km / 2.0) / 22.0);
  return 1.5 * chi * eta;
}

}  // namespace qnet
