#include "uasn/model.hpp"

#include "uasn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace uasn {

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Sensor: return "sensor";
    case NodeKind::Relay: return "relay";
    case NodeKind::SurfaceBuoy: return "buoy";
  }
  return "unknown";
}

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "sensor") return NodeKind::Sensor;
  if (s == "relay") return NodeKind::Relay;
  if (s == "buoy") return NodeKind::SurfaceBuoy;
  throw InvalidInput("unknown node kind '" + s + "'");
}

bool Field::contains(const Vec3& p, double tol) const {
  const double r2 = p.x() * p.x() + p.y() * p.y();
  return r2 <= (radius + tol) * (radius + tol) && p.z() <= tol && p.z() >= -depth - tol;
}

Deployment::Deployment(std::vector<Node> nodes, double comm_range, Field field)
    : nodes_(std::move(nodes)), comm_range_(comm_range), field_(field) {
  if (!(comm_range_ > 0.0)) throw InvalidInput("communication range must be positive");
  if (!(field_.radius > 0.0) || !(field_.depth > 0.0)) throw InvalidInput("field dimensions must be positive");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const std::string tag = "node " + std::to_string(i) + ": ";
    if (n.id != static_cast<int>(i)) throw InvalidInput(tag + "ids must be dense and ordered");
    if (!n.position.allFinite()) throw InvalidInput(tag + "non-finite position");
    if (n.residual_energy < 0.0 || n.residual_energy > n.primary_energy * (1 + 1e-12))
      throw InvalidInput(tag + "residual energy outside [0, primary]");
    if (n.generation_rate < 0) throw InvalidInput(tag + "negative generation rate");
    if (n.kind != NodeKind::Sensor && n.generation_rate != 0)
      throw InvalidInput(tag + "only sensors generate traffic");
    if (n.kind == NodeKind::SurfaceBuoy) {
      if (sink_ >= 0) throw InvalidInput("more than one surface buoy");
      sink_ = n.id;
    } else if (!field_.contains(n.position)) {
      throw InvalidInput(tag + "position outside the surveillance cylinder");
    }
  }
  if (sink_ < 0) throw InvalidInput("deployment has no surface buoy");
}

const Node& Deployment::node(int id) const {
  if (id < 0 || id >= size()) throw InvalidInput("node id " + std::to_string(id) + " out of range");
  return nodes_[static_cast<std::size_t>(id)];
}

double Deployment::distance(int i, int j) const { return (node(i).position - node(j).position).norm(); }

std::vector<int> Deployment::ids_of(NodeKind kind) const {
  std::vector<int> out;
  for (const auto& n : nodes_)
    if (n.kind == kind) out.push_back(n.id);
  return out;
}

int Deployment::count(NodeKind kind) const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.kind == kind; }));
}

bool Deployment::connected() const {
  std::vector<char> seen(nodes_.size(), 0);
  std::queue<int> frontier;
  frontier.push(sink_);
  seen[static_cast<std::size_t>(sink_)] = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < size(); ++v) {
      if (!seen[static_cast<std::size_t>(v)] && in_range(u, v)) {
        seen[static_cast<std::size_t>(v)] = 1;
        frontier.push(v);
      }
    }
  }
  for (const auto& n : nodes_)
    if (n.kind == NodeKind::Sensor && !seen[static_cast<std::size_t>(n.id)]) return false;
  return true;
}

Deployment Deployment::with_relay(const Vec3& position, double energy) const {
  auto nodes = nodes_;
  Node relay;
  relay.id = size();
  relay.kind = NodeKind::Relay;
  relay.position = position;
  relay.residual_energy = energy;
  relay.primary_energy = energy;
  nodes.push_back(relay);
  return Deployment(std::move(nodes), comm_range_, field_);
}

Deployment Deployment::with_residual_energy(int id, double energy) const {
  auto nodes = nodes_;
  nodes.at(static_cast<std::size_t>(id)).residual_energy = energy;
  return Deployment(std::move(nodes), comm_range_, field_);
}

double thorp_db_per_km(double f_khz) {
  if (!(f_khz > 0.0)) throw DomainError("Thorp absorption needs a positive frequency");
  const double f2 = f_khz * f_khz;
  return 0.1 * f2 / (1.0 + f2) + 40.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003;
}

double thorp_absorption(double f_khz) { return std::pow(10.0, thorp_db_per_km(f_khz) / 10.0); }

EnergyModel::EnergyModel(EnergyParams params)
    : params_(params), alpha_(thorp_absorption(params.f_khz)), log_alpha_per_m_(std::log(alpha_) / 1000.0) {
  if (params_.p_s_mw < 0.0 || params_.p_r_mw < 0.0) throw DomainError("processing powers must be nonnegative");
  if (!(params_.d_t_m > 0.0)) throw DomainError("threshold distance must be positive");
  if (params_.l_c_bps <= 0) throw DomainError("link capacity must be positive");
}

double EnergyModel::branch_power(double d, Regime regime) const {
  const double d2 = d * d;
  const double poly = regime == Regime::Near ? d2 : d2 * d2;
  return params_.p_s_mw + std::exp(log_alpha_per_m_ * d) * poly;
}

double EnergyModel::branch_power_derivative(double d, Regime regime) const {
  const double gain = std::exp(log_alpha_per_m_ * d);
  if (regime == Regime::Near) return gain * (log_alpha_per_m_ * d * d + 2.0 * d);
  const double d3 = d * d * d;
  return gain * (log_alpha_per_m_ * d3 * d + 4.0 * d3);
}

double EnergyModel::transmit_power(double d) const {
  if (!(d >= 0.0)) throw DomainError("distance must be nonnegative");
  return branch_power(d, regime(d));
}

Rate RateArray::row_sum(int i) const {
  Rate s = 0;
  for (int j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

Rate RateArray::col_sum(int i) const {
  Rate s = 0;
  for (int k = 0; k < n_; ++k) s += (*this)(k, i);
  return s;
}

RateArray RateArray::resized(int n) const {
  if (n < n_) throw InvalidInput("rate array can only grow");
  RateArray out(n);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, j);
  return out;
}

double node_power_draw(int i, const RateArray& rates, const Deployment& dep, const EnergyModel& model) {
  if (i < 0 || i >= dep.size() || rates.size() != dep.size())
    throw InvalidInput("node id out of range or rate array size mismatch");
  double tx = 0.0;
  Rate rx = 0;
  for (int j = 0; j < dep.size(); ++j) {
    if (j == i) continue;
    if (const Rate r = rates(i, j); r > 0) tx += model.transmit_power(dep.distance(i, j)) * static_cast<double>(r);
    if (dep.node(j).kind != NodeKind::SurfaceBuoy) rx += rates(j, i);
  }
  return (tx + model.p_r() * static_cast<double>(rx)) * kMilliwatt;
}

double node_lifetime(int i, const RateArray& rates, const Deployment& dep, const EnergyModel& model) {
  if (dep.node(i).kind == NodeKind::SurfaceBuoy) return kInfiniteLifetime;
  const double draw = node_power_draw(i, rates, dep, model);
  if (draw <= 0.0) return kInfiniteLifetime;
  return dep.node(i).residual_energy / draw;
}

std::vector<double> node_lifetimes(const RateArray& rates, const Deployment& dep, const EnergyModel& model) {
  std::vector<double> out(static_cast<std::size_t>(dep.size()));
  for (int i = 0; i < dep.size(); ++i) out[static_cast<std::size_t>(i)] = node_lifetime(i, rates, dep, model);
  return out;
}

double network_lifetime(const RateArray& rates, const Deployment& dep, const EnergyModel& model) {
  const auto all = node_lifetimes(rates, dep, model);
  return *std::min_element(all.begin(), all.end());
}

std::string to_string(FlowConstraint c) {
  switch (c) {
    case FlowConstraint::SensorBalance: return "sensor_balance";
    case FlowConstraint::RelayBalance: return "relay_balance";
    case FlowConstraint::Capacity: return "capacity";
    case FlowConstraint::Range: return "range";
    case FlowConstraint::Structure: return "structure";
  }
  return "unknown";
}

std::vector<Violation> validate_rate_array(const RateArray& rates, const Deployment& dep, const EnergyModel& model) {
  std::vector<Violation> out;
  if (rates.size() != dep.size()) {
    out.push_back({-1, FlowConstraint::Structure, std::abs(double(rates.size() - dep.size())), -1});
    return out;
  }
  const int n = dep.size();
  for (int i = 0; i < n; ++i) {
    if (rates(i, i) != 0) out.push_back({i, FlowConstraint::Structure, double(rates(i, i)), i});
    for (int j = 0; j < n; ++j) {
      const Rate r = rates(i, j);
      if (r < 0) out.push_back({i, FlowConstraint::Structure, double(-r), j});
      if (r > 0 && i != j && !dep.in_range(i, j))
        out.push_back({i, FlowConstraint::Range, dep.distance(i, j) - dep.comm_range(), j});
    }
    const Node& node = dep.node(i);
    const Rate out_flow = rates.row_sum(i);
    const Rate in_flow = rates.col_sum(i);
    switch (node.kind) {
      case NodeKind::Sensor:
        if (out_flow != in_flow + node.generation_rate)
          out.push_back({i, FlowConstraint::SensorBalance, std::abs(double(out_flow - in_flow - node.generation_rate)), -1});
        break;
      case NodeKind::Relay:
        if (out_flow != in_flow)
          out.push_back({i, FlowConstraint::RelayBalance, std::abs(double(out_flow - in_flow)), -1});
        break;
      case NodeKind::SurfaceBuoy:
        if (out_flow != 0) out.push_back({i, FlowConstraint::Structure, double(out_flow), -1});
        break;
    }
    if (node.kind != NodeKind::SurfaceBuoy && out_flow > model.link_capacity())
      out.push_back({i, FlowConstraint::Capacity, double(out_flow - model.link_capacity()), -1});
  }
  return out;
}

}  // namespace uasn
