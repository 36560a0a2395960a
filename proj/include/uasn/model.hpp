#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace uasn {

using Vec3 = Eigen::Vector3d;
using Rate = std::int64_t;  // bit/s

inline constexpr double kInfiniteLifetime = std::numeric_limits<double>::infinity();
inline constexpr double kMilliwatt = 1e-3;

enum class NodeKind { Sensor, Relay, SurfaceBuoy };

std::string to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& s);

// Positions are metres with the surface buoy at the origin and z <= 0 below the surface.
struct Node {
  int id = 0;
  NodeKind kind = NodeKind::Sensor;
  Vec3 position = Vec3::Zero();
  double residual_energy = 0.0;  // J
  double primary_energy = 0.0;   // J
  Rate generation_rate = 0;
};

struct Field {
  double radius = 500.0;
  double depth = 2000.0;

  bool contains(const Vec3& p, double tol = 1e-6) const;
};

/// Immutable set of positioned nodes. Ids are dense and equal to the index in nodes().
/// Exactly one surface buoy; only sensors generate traffic.
class Deployment {
 public:
  Deployment(std::vector<Node> nodes, double comm_range, Field field);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const;
  int size() const { return static_cast<int>(nodes_.size()); }
  int sink() const { return sink_; }
  double comm_range() const { return comm_range_; }
  const Field& field() const { return field_; }

  double distance(int i, int j) const;
  bool in_range(int i, int j) const { return distance(i, j) <= comm_range_; }
  bool in_range(const Vec3& a, const Vec3& b) const { return (a - b).norm() <= comm_range_; }

  std::vector<int> ids_of(NodeKind kind) const;
  int count(NodeKind kind) const;

  /// True when every sensor has a multi-hop path to the buoy over links <= comm_range.
  bool connected() const;

  /// Copy with one more relay appended (id = size()) at `position`, full energy `energy`.
  Deployment with_relay(const Vec3& position, double energy) const;
  Deployment with_residual_energy(int id, double energy) const;

 private:
  std::vector<Node> nodes_;
  double comm_range_;
  Field field_;
  int sink_ = -1;
};

struct EnergyParams {
  double p_s_mw = 1.0;     // processing power for sending, mW/bit
  double p_r_mw = 1.0;     // receive power, mW/bit
  double d_t_m = 87.0;     // regime threshold distance
  double f_khz = 1.0;      // acoustic frequency
  Rate l_c_bps = 10000;    // link capacity
};

enum class Regime { Near, Far };  // d < d_t uses d^2, d >= d_t uses d^4

/// Thorp absorption in dB/km.
double thorp_db_per_km(double f_khz);
/// Linear absorption base alpha(f) = 10^(A/10); the amplifier term is alpha^(d/1000) d^k.
double thorp_absorption(double f_khz);
/// The formula is only meaningful above a few hundred hertz.
inline bool thorp_in_validity_range(double f_khz) { return f_khz >= 0.2; }

class EnergyModel {
 public:
  explicit EnergyModel(EnergyParams params = {});

  const EnergyParams& params() const { return params_; }
  double absorption() const { return alpha_; }
  double p_s() const { return params_.p_s_mw; }
  double p_r() const { return params_.p_r_mw; }
  double d_t() const { return params_.d_t_m; }
  Rate link_capacity() const { return params_.l_c_bps; }

  Regime regime(double d) const { return d < params_.d_t_m ? Regime::Near : Regime::Far; }

  /// Per-bit transmit power in mW/bit over distance d (metres).
  double transmit_power(double d) const;

  /// One branch of transmit_power extended to all d >= 0; smooth, increasing and convex.
  double branch_power(double d, Regime regime) const;
  double branch_power_derivative(double d, Regime regime) const;

 private:
  EnergyParams params_;
  double alpha_;
  double log_alpha_per_m_;
};

/// Square matrix of flow rates; entry (i, j) is the traffic i sends to j.
class RateArray {
 public:
  RateArray() = default;
  explicit RateArray(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, 0) {}

  int size() const { return n_; }
  Rate operator()(int i, int j) const { return data_[index(i, j)]; }
  Rate& operator()(int i, int j) { return data_[index(i, j)]; }

  Rate row_sum(int i) const;
  Rate col_sum(int i) const;
  bool idle(int i) const { return row_sum(i) == 0 && col_sum(i) == 0; }

  /// Copy padded with idle nodes up to n.
  RateArray resized(int n) const;

  bool operator==(const RateArray& other) const = default;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  int n_ = 0;
  std::vector<Rate> data_;
};

/// Energy drain of node i in W (J/s).
double node_power_draw(int i, const RateArray& rates, const Deployment& dep, const EnergyModel& model);

/// Residual energy over drain; +inf when the node carries no traffic.
double node_lifetime(int i, const RateArray& rates, const Deployment& dep, const EnergyModel& model);

/// Lifetimes of every node; the buoy is reported as +inf.
std::vector<double> node_lifetimes(const RateArray& rates, const Deployment& dep, const EnergyModel& model);

/// Time until the first sensor or relay dies.
double network_lifetime(const RateArray& rates, const Deployment& dep, const EnergyModel& model);

enum class FlowConstraint { SensorBalance, RelayBalance, Capacity, Range, Structure };

std::string to_string(FlowConstraint c);

struct Violation {
  int node = -1;
  FlowConstraint constraint = FlowConstraint::Structure;
  double slack = 0.0;  // magnitude by which the constraint is violated
  int peer = -1;       // other endpoint for Range violations
};

std::vector<Violation> validate_rate_array(const RateArray& rates, const Deployment& dep,
                                           const EnergyModel& model);

}  // namespace uasn
