#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "helmflow/errors.hpp"

namespace helmflow {

using Complex = std::complex<double>;

enum class BusKind { Slack, PQ, PV };

const char* to_string(BusKind kind);

struct Bus {
  int id = 0;                   // external number from the case file
  BusKind kind = BusKind::PQ;
  double p_inj = 0.0;           // net real injection, p.u. (generation - load)
  double q_inj = 0.0;           // net reactive injection, p.u. (meaningful for PQ)
  double v_mag_target = 1.0;    // magnitude setpoint M_i (meaningful for PV)
  Complex shunt{0.0, 0.0};      // gs + j*bs, p.u.
};

struct Branch {
  int from = 0;
  int to = 0;
  Complex series_impedance{0.0, 0.0};  // r + j*x, p.u.
  double line_charging = 0.0;          // total susceptance, p.u.
  double tap_ratio = 0.0;              // 0 = plain line (ratio 1)
  double phase_shift_deg = 0.0;
  bool in_service = true;
};

/// Bus/branch model of one power network, per unit on a common MVA base.
///
/// After validate() the slack bus is stored first; everything downstream
/// indexes buses by this internal position (0 = slack).  The slack voltage is
/// pinned to 1+0j.
class Network {
 public:
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;

  int bus_count() const { return static_cast<int>(buses.size()); }
  int non_slack_count() const { return bus_count() - 1; }

  const Bus& slack() const { return buses.front(); }

  /// Internal index of an external bus number; throws ValidationError if unknown.
  int index_of(int bus_id) const;

  /// Internal indices (>= 1) of PQ / PV buses, in storage order.
  std::vector<int> pq_indices() const;
  std::vector<int> pv_indices() const;

  /// Reorders slack-first and enforces the structural invariants:
  /// exactly one slack, unique ids, positive PV setpoints, nonzero in-service
  /// impedances, no islands.
  void validate();
};

/// Parses either a MatPower .m case or the native JSON network format,
/// sniffing the format from the text.
Network parse_case(const std::string& text);
Network parse_matpower(const std::string& text);
Network parse_network_json(const std::string& text);
Network load_case_file(const std::string& path);

std::string network_to_json(const Network& net);

/// Rebuilds the network with every PV bus turned into a PQ bus holding the
/// supplied reactive injection (p.u., keyed by external bus id).
Network convert_pv_to_pq(const Network& net, const std::map<int, double>& q_by_bus);

/// Bus admittance matrix with its slack-reduced form.
struct AdmittanceMatrix {
  Eigen::MatrixXcd full;      // (N+1)x(N+1), internal order, index 0 = slack
  Eigen::MatrixXcd reduced;   // NxN, slack row/column removed
  Eigen::VectorXcd row_sums;  // y_i = sum_k Y_ik
  Eigen::MatrixXd g;          // Re(full)
  Eigen::MatrixXd b;          // Im(full)
};

/// Standard pi-model assembly (series admittance, half line charging per end,
/// off-nominal tap and phase shift, bus shunts).  Throws ValidationError when
/// the reduced matrix is rank-deficient within 1e-10 of the largest pivot
/// (Assumption 1).
AdmittanceMatrix build_ybus(const Network& net);

}  // namespace helmflow
