#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <utility>

namespace mwl {

WalkModel::WalkModel(std::int64_t m, IntegerPMF xi, std::vector<IntegerPMF> eta,
                     std::int64_t start, std::int64_t center)
    : m_(m), center_(center), start_(start), xi_(std::move(xi)),
      eta_(std::move(eta)), sigma2_(0.0) {
  if (m_ < 0) fail(ErrorCode::InvalidParameter, "membrane half-width must be >= 0");
  StepLaw law = validate_step_law(xi_, m_);
  sigma2_ = law.sigma2;
  if (eta_.size() != static_cast<std::size_t>(2 * m_ + 1))
    fail(ErrorCode::InvalidConfig,
         "expected " + std::to_string(2 * m_ + 1) + " membrane jump laws, got " +
             std::to_string(eta_.size()));
}

WalkModel WalkModel::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, "model must be a JSON object");
  for (const char* key : {"m", "xi", "eta"})
    if (!j.contains(key))
      fail(ErrorCode::InvalidConfig, std::string("model is missing \"") + key + "\"");
  std::int64_t m = 0, start = 0, center = 0;
  try {
    m = j.at("m").get<std::int64_t>();
    start = j.value("start", std::int64_t{0});
    center = j.value("center", std::int64_t{0});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("bad model field: ") + e.what());
  }
  auto parse_pmf = [](const nlohmann::json& spec, const std::string& what) {
    if (!spec.is_array() || spec.empty())
      fail(ErrorCode::InvalidConfig, what + " must be a nonempty array of [value, prob] pairs");
    std::vector<Atom> atoms;
    for (const auto& entry : spec) {
      if (!entry.is_array() || entry.size() != 2)
        fail(ErrorCode::InvalidConfig, what + " entries must be [value, prob] pairs");
      atoms.push_back({entry[0].get<std::int64_t>(), entry[1].get<double>()});
    }
    try {
      return IntegerPMF(std::move(atoms));
    } catch (const Error& e) {
      fail(e.code(), what + ": " + e.what());
    }
  };
  IntegerPMF xi = parse_pmf(j.at("xi"), "xi");
  const auto& eta_spec = j.at("eta");
  if (!eta_spec.is_object())
    fail(ErrorCode::InvalidConfig, "eta must be an object keyed by membrane offset");
  std::vector<IntegerPMF> eta;
  eta.reserve(static_cast<std::size_t>(2 * m + 1));
  for (std::int64_t off = -m; off <= m; ++off) {
    std::string key = std::to_string(off);
    if (!eta_spec.contains(key))
      fail(ErrorCode::InvalidConfig, "eta is missing offset \"" + key + "\"");
    eta.push_back(parse_pmf(eta_spec.at(key), "eta[" + key + "]"));
  }
  return WalkModel(m, std::move(xi), std::move(eta), start, center);
}

WalkModel WalkModel::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::InvalidConfig, "model JSON does not parse");
  return from_json(j);
}

nlohmann::json WalkModel::to_json() const {
  nlohmann::json j;
  j["m"] = m_;
  j["start"] = start_;
  j["center"] = center_;
  auto dump_pmf = [](const IntegerPMF& pmf) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : pmf.atoms()) arr.push_back({a.value, a.prob});
    return arr;
  };
  j["xi"] = dump_pmf(xi_);
  nlohmann::json eta = nlohmann::json::object();
  for (std::int64_t off = -m_; off <= m_; ++off)
    eta[std::to_string(off)] = dump_pmf(this->eta(off));
  j["eta"] = eta;
  return j;
}

std::int64_t WalkModel::max_abs_eta() const {
  std::int64_t best = 0;
  for (const auto& law : eta_) best = std::max(best, law.max_abs_value());
  return best;
}

WalkModel WalkModel::mirrored() const {
  std::vector<IntegerPMF> eta;
  eta.reserve(eta_.size());
  for (auto it = eta_.rbegin(); it != eta_.rend(); ++it) eta.push_back(it->negated());
  return WalkModel(m_, xi_.negated(), std::move(eta),
                   2 * center_ - start_, center_);
}

WalkModel WalkModel::translated(std::int64_t delta) const {
  return WalkModel(m_, xi_, eta_, start_ + delta, center_ + delta);
}

namespace {

// Adjacency over centered offsets o in [-band, band]; edges leaving the band
// are dropped (the band is padded well beyond every reachable jump target
// needed to decide communication near the membrane).
struct BandGraph {
  std::int64_t band;
  std::vector<std::vector<std::int32_t>> out;  // index o + band

  std::size_t idx(std::int64_t o) const {
    return static_cast<std::size_t>(o + band);
  }
};

BandGraph build_graph(const WalkModel& model) {
  std::int64_t m = model.m();
  std::int64_t band =
      m + model.max_abs_eta() + 3 * (2 * m + 1) + 2;
  BandGraph g;
  g.band = band;
  g.out.assign(static_cast<std::size_t>(2 * band + 1), {});
  for (std::int64_t o = -band; o <= band; ++o) {
    const IntegerPMF& law =
        (std::abs(o) <= m) ? model.eta(o) : model.xi();
    auto& edges = g.out[g.idx(o)];
    for (const auto& a : law.atoms()) {
      std::int64_t to = o + a.value;
      if (to >= -band && to <= band)
        edges.push_back(static_cast<std::int32_t>(to));
    }
  }
  return g;
}

std::vector<char> closure_from(const BandGraph& g, std::vector<std::int64_t> seeds) {
  std::vector<char> seen(g.out.size(), 0);
  std::deque<std::int64_t> queue;
  for (std::int64_t s : seeds) {
    if (!seen[g.idx(s)]) {
      seen[g.idx(s)] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    std::int64_t o = queue.front();
    queue.pop_front();
    for (std::int32_t to : g.out[g.idx(o)]) {
      if (!seen[g.idx(to)]) {
        seen[g.idx(to)] = 1;
        queue.push_back(to);
      }
    }
  }
  return seen;
}

}  // namespace

IrreducibilityReport is_irreducible(const WalkModel& model) {
  const std::int64_t m = model.m();
  const std::int64_t c = model.center();
  BandGraph g = build_graph(model);

  std::vector<std::int64_t> membrane;
  for (std::int64_t o = -m; o <= m; ++o) membrane.push_back(o);
  std::vector<char> closure = closure_from(g, membrane);

  // Strongly connected components of the closure subgraph (Kosaraju on the
  // small band), then the condensation's terminal components.
  std::vector<std::int64_t> nodes;
  for (std::int64_t o = -g.band; o <= g.band; ++o)
    if (closure[g.idx(o)]) nodes.push_back(o);
  std::map<std::int64_t, std::size_t> order;
  for (std::size_t i = 0; i < nodes.size(); ++i) order[nodes[i]] = i;

  std::vector<std::vector<std::int32_t>> fwd(nodes.size()), rev(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::int32_t to : g.out[g.idx(nodes[i])]) {
      if (!closure[g.idx(to)]) continue;
      std::size_t j = order[to];
      fwd[i].push_back(static_cast<std::int32_t>(j));
      rev[j].push_back(static_cast<std::int32_t>(i));
    }
  }
  std::vector<std::size_t> finish;
  finish.reserve(nodes.size());
  std::vector<char> visited(nodes.size(), 0);
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    if (visited[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    visited[s] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < fwd[u].size()) {
        std::size_t v = static_cast<std::size_t>(fwd[u][next++]);
        if (!visited[v]) {
          visited[v] = 1;
          stack.push_back({v, 0});
        }
      } else {
        finish.push_back(u);
        stack.pop_back();
      }
    }
  }
  std::vector<std::int32_t> comp(nodes.size(), -1);
  std::int32_t ncomp = 0;
  for (auto it = finish.rbegin(); it != finish.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    std::vector<std::size_t> stack{*it};
    comp[*it] = ncomp;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::int32_t v : rev[u]) {
        if (comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = ncomp;
          stack.push_back(static_cast<std::size_t>(v));
        }
      }
    }
    ++ncomp;
  }
  std::vector<char> terminal(static_cast<std::size_t>(ncomp), 1);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::int32_t v : fwd[i])
      if (comp[i] != comp[static_cast<std::size_t>(v)])
        terminal[static_cast<std::size_t>(comp[i])] = 0;

  std::vector<std::int32_t> terminals;
  for (std::int32_t t = 0; t < ncomp; ++t)
    if (terminal[static_cast<std::size_t>(t)]) terminals.push_back(t);

  IrreducibilityReport rep;
  auto node_of_comp = [&](std::int32_t comp_id) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (comp[i] == comp_id) return nodes[i];
    return std::int64_t{0};
  };

  if (terminals.size() > 1) {
    std::int64_t u = node_of_comp(terminals[0]);
    std::int64_t v = node_of_comp(terminals[1]);
    rep.irreducible = false;
    rep.witness_from = c + u;
    rep.witness_to = c + v;
    rep.reason = "two closed communicating classes";
    return rep;
  }
  std::int32_t t = terminals.front();
  bool meets_membrane = false, escapes_membrane = false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (comp[i] != t) continue;
    if (std::abs(nodes[i]) <= m)
      meets_membrane = true;
    else
      escapes_membrane = true;
  }
  if (!meets_membrane) {
    std::int64_t u = node_of_comp(t);
    rep.irreducible = false;
    rep.witness_from = c + u;
    rep.witness_to = c;  // membrane unreachable from the closed class
    rep.reason = "closed class never returns to the membrane";
    return rep;
  }
  if (!escapes_membrane) {
    std::int64_t u = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (comp[i] == t) { u = nodes[i]; break; }
    rep.irreducible = false;
    rep.witness_from = c + u;
    rep.witness_to = c + m + 1;
    rep.reason = "membrane state is absorbing; the walk never leaves A";
    return rep;
  }
  rep.irreducible = true;
  rep.reason = "unique closed communicating class through the membrane";
  return rep;
}

}  // namespace mwl
