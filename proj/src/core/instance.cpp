#include "leadsel/instance.hpp"

#include <sstream>

#include "leadsel/errors.hpp"
#include "leadsel/rng.hpp"

namespace leadsel {

namespace {

[[noreturn]] void fail(const std::string& what) { throw InvalidInstance(what); }

}  // namespace

Instance::Instance(std::size_t n, std::vector<Score> lii, std::vector<std::vector<Score>> lxi, bool has_edge_server)
    : n_(n), has_edge_server_(has_edge_server), lii_(std::move(lii)) {
  if (n_ == 0) fail("n must be at least 1");
  if (lii_.size() != n_ + 1) fail("lii: expected " + std::to_string(n_ + 1) + " slots");
  if (lxi.size() != n_ + 1) fail("lxi: expected " + std::to_string(n_ + 1) + " rows");
  lxi_.reserve((n_ + 1) * (n_ + 1));
  for (std::size_t m = 0; m <= n_; ++m) {
    if (lxi[m].size() != n_ + 1) fail("lxi[" + std::to_string(m) + "]: expected " + std::to_string(n_ + 1) + " columns");
    lxi_.insert(lxi_.end(), lxi[m].begin(), lxi[m].end());
  }
  for (std::size_t i = 0; i <= n_; ++i) {
    if (!in_score_range(lii_[i])) fail("lii[" + std::to_string(i) + "] = " + lii_[i].str() + " outside [0,10]");
    for (std::size_t j = 0; j <= n_; ++j) {
      Score v = lxi_[i * stride() + j];
      if (!in_score_range(v))
        fail("lxi[" + std::to_string(i) + "][" + std::to_string(j) + "] = " + v.str() + " outside [0,10]");
    }
    if (lxi_[i * stride() + i] != Score(0)) fail("lxi[" + std::to_string(i) + "][" + std::to_string(i) + "]: diagonal must be 0");
  }
  if (has_edge_server_) {
    if (lii_[0] <= Score(0)) fail("lii[0]: edge server LII must be > 0");
    for (std::size_t j = 0; j <= n_; ++j)
      if (lxi_[j] != Score(0)) fail("lxi[0][" + std::to_string(j) + "]: edge server never follows, must be 0");
  } else {
    if (lii_[0] != Score(0)) fail("slot 0 must be empty without an edge server");
    for (std::size_t j = 0; j <= n_; ++j)
      if (lxi_[j] != Score(0) || lxi_[j * stride()] != Score(0)) fail("slot 0 must be empty without an edge server");
  }
}

Instance Instance::from_rows(const std::vector<Score>& lii, const std::vector<std::vector<Score>>& lxi) {
  const std::size_t n = lii.size();
  std::vector<Score> l(n + 1);
  std::vector<std::vector<Score>> x(n + 1, std::vector<Score>(n + 1));
  if (lxi.size() != n) fail("lxi: expected " + std::to_string(n) + " rows");
  for (std::size_t i = 0; i < n; ++i) {
    l[i + 1] = lii[i];
    if (lxi[i].size() != n) fail("lxi[" + std::to_string(i) + "]: expected " + std::to_string(n) + " columns");
    for (std::size_t j = 0; j < n; ++j) x[i + 1][j + 1] = lxi[i][j];
  }
  return Instance(n, std::move(l), std::move(x), false);
}

std::vector<UeId> Instance::ues() const {
  std::vector<UeId> ids;
  ids.reserve(n_);
  for (std::size_t i = 1; i <= n_; ++i) ids.push_back(static_cast<UeId>(i));
  return ids;
}

std::vector<UeId> Instance::nodes() const {
  std::vector<UeId> ids;
  ids.reserve(node_count());
  if (has_edge_server_) ids.push_back(kEdgeServer);
  for (std::size_t i = 1; i <= n_; ++i) ids.push_back(static_cast<UeId>(i));
  return ids;
}

std::vector<Score> Instance::lxi_row(UeId from) const {
  auto first = lxi_.begin() + static_cast<std::ptrdiff_t>(from * stride());
  return {first, first + static_cast<std::ptrdiff_t>(stride())};
}

Instance generate_instance(std::size_t n, std::uint64_t seed, const std::optional<EdgeServerSpec>& edge) {
  if (n == 0) throw InvalidArgument("generate_instance: n must be at least 1");
  Rng rng(seed);
  std::vector<Score> lii(n + 1);
  std::vector<std::vector<Score>> lxi(n + 1, std::vector<Score>(n + 1));
  for (std::size_t i = 1; i <= n; ++i) lii[i] = Score(static_cast<int>(rng.uniform_int(0, 10)));
  for (std::size_t m = 1; m <= n; ++m)
    for (std::size_t k = 1; k <= n; ++k)
      if (m != k) lxi[m][k] = Score(static_cast<int>(rng.uniform_int(0, 10)));
  Instance inst(n, std::move(lii), std::move(lxi), false);
  if (edge) return attach_edge_server(inst, edge->lii0, edge->lxi_to_edge);
  return inst;
}

Instance attach_edge_server(const Instance& inst, Score lii0, const std::vector<Score>& lxi_to_edge) {
  if (inst.has_edge_server()) throw InvalidArgument("attach_edge_server: instance already has node 0");
  if (lii0 <= Score(0)) throw InvalidArgument("attach_edge_server: lii0 must be > 0");
  if (lxi_to_edge.size() != inst.n())
    throw InvalidArgument("attach_edge_server: expected " + std::to_string(inst.n()) + " LXI entries toward node 0");
  const std::size_t n = inst.n();
  std::vector<Score> lii(n + 1);
  std::vector<std::vector<Score>> lxi(n + 1, std::vector<Score>(n + 1));
  lii[0] = lii0;
  for (std::size_t m = 1; m <= n; ++m) {
    lii[m] = inst.lii(static_cast<UeId>(m));
    lxi[m] = inst.lxi_row(static_cast<UeId>(m));
    lxi[m][0] = lxi_to_edge[m - 1];
  }
  return Instance(n, std::move(lii), std::move(lxi), true);
}

Score li_score(const Instance& inst, UeId m, UeId n) {
  if (m == n) throw InvalidArgument("li_score: follower and leader must differ");
  if (!inst.contains(m) || !inst.contains(n)) throw InvalidArgument("li_score: id outside instance");
  return inst.lii(n) + inst.lxi(m, n);
}

}  // namespace leadsel
