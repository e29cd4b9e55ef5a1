// Copyright 2026 The mdisteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Jones-calculus simulation of path-polarization networks built from wave
// plates, beam displacers and polarizing beam splitters.
//
// Conventions. Polarization basis order is (H, V). Angles are in degrees and
// measured from the horizontal axis:
//   HWP(t) = R(t) diag(1, -1) R(-t),  QWP(t) = R(t) diag(1, i) R(-t),
//   R(t) = [[cos t, -sin t], [sin t, cos t]].
// A beam displacer transmits H unchanged and moves the V component of each
// listed source path onto its destination path.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdisteer/qmath.hpp"
#include "mdisteer/scenario.hpp"

namespace mdisteer::optics {

using qmath::ComplexMatrix;
using qmath::Complex;

enum class Polarization { H = 0, V = 1 };
enum class Plate { HWP, QWP };

struct WaveplateElement {
  Plate kind = Plate::HWP;
  double angle_deg = 0.0;
  std::string path;
};

/// Jones matrix of a wave plate (unitary, global phase fixed by the
/// convention above).
ComplexMatrix jones(Plate kind, double angle_deg);
inline ComplexMatrix jones(const WaveplateElement& wp) { return jones(wp.kind, wp.angle_deg); }

/// Quotient distance min_phi ||u - e^{i phi} v||_F.
double phase_distance(const ComplexMatrix& u, const ComplexMatrix& v);

struct Mode {
  int path = 0;
  Polarization pol = Polarization::H;
};

struct Element {
  enum class Kind { Waveplate, BeamDisplacer, Pbs, Block };
  Kind kind = Kind::Waveplate;
  int line = 0;
  Plate plate = Plate::HWP;
  double angle_deg = 0.0;
  int path = -1;                           // waveplate, PBS input, block
  std::vector<std::pair<int, int>> moves;  // BD: V of first -> V of second
  std::vector<std::pair<int, int>> spills;  // BD: V of a non-source destination -> fresh path
  int out_h = -1;                          // PBS outputs
  int out_v = -1;
};

struct Detector {
  std::string label;
  std::vector<int> paths;  // both polarizations of each path are detected
};

/// What the network is expected to realize on its logical space.
struct Target {
  enum class Kind { None, Mub, Bell };
  Kind kind = Kind::None;
  int d = 0;
  int setting = 0;  // Mub: 0 computational, 1 Fourier
};

struct OpticalNetwork {
  std::string name;
  std::vector<std::string> paths;  // all paths, inputs first
  int input_paths = 0;
  std::vector<Element> elements;
  std::vector<Mode> encoding;  // logical level -> input mode
  std::vector<Detector> detectors;
  Target target;
  double tolerance = 1e-6;

  int path_index(const std::string& label) const;  // throws if undeclared
  int modes() const { return 2 * static_cast<int>(paths.size()); }
  int logical_dim() const { return static_cast<int>(encoding.size()); }
};

class NetworkParseError : public std::runtime_error {
 public:
  NetworkParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses the plain-text network description (see README, "Network files").
OpticalNetwork parse_network(const std::string& text, const std::string& default_name = "network");
OpticalNetwork load_network_file(const std::string& path);

/// Network descriptions compiled into the library, keyed by name.
const std::map<std::string, std::string>& embedded_networks();
OpticalNetwork embedded_network(const std::string& name);

/// Amplitudes indexed by (path, polarization) as 2 * path + pol.
struct PathPolState {
  std::vector<std::string> paths;
  qmath::Ket amplitudes;

  Complex amplitude(const std::string& path, Polarization pol) const;
  double norm() const { return amplitudes.norm(); }
};

PathPolState make_state(const std::vector<std::string>& paths);
/// Logical basis state |level> placed on its encoded mode.
PathPolState encoded_state(const OpticalNetwork& net, int level);

/// Linear map of the whole network on all 2 * paths modes.
ComplexMatrix transfer_matrix(const OpticalNetwork& net);
/// Propagates `input`; its paths must be declared by the network. The
/// result is expressed on all network paths.
PathPolState apply_network(const OpticalNetwork& net, const PathPolState& input);

/// U^H P_D U restricted to the logical space, for detector D.
ComplexMatrix effective_operator(const OpticalNetwork& net, const std::string& detector);
/// Effective POVM (detectors in file order). Not necessarily complete.
scenario::Povm effective_povm(const OpticalNetwork& net);

struct VerificationReport {
  std::string name;
  std::string target;
  double deviation = 0.0;     // compared against tolerance
  double tolerance = 0.0;
  double completeness = 0.0;  // ||sum_D E_D - I|| (Mub), unused for Bell
  double success_probability = 0.0;  // Bell: <Phi| E |Phi>
  bool pass = false;
};

/// Mub: max_b ||E_b - |m_b><m_b| ||_op. Bell: ||E / <Phi|E|Phi> - |Phi><Phi| ||_op
/// together with a zero-overlap check on the complement of |Phi>.
VerificationReport verify_network(const OpticalNetwork& net);

struct QhqAngles {
  double q1 = 0.0;
  double h = 0.0;
  double q2 = 0.0;
};

/// QWP(q1) HWP(h) QWP(q2) realizing `target` up to global phase. Throws
/// std::invalid_argument for non-unitary input.
QhqAngles solve_qhq(const ComplexMatrix& target);
ComplexMatrix qhq_matrix(const QhqAngles& angles);

/// Alice's qutrit measurement network for setting j in {1, 2}.
struct MeasurementNetwork {
  OpticalNetwork network;
  scenario::Povm povm;
};
MeasurementNetwork alice_measurement_network(int j);

/// Post-selected Bell-state measurement on two logical qudits, d in {3, 4}.
struct BsmNetwork {
  OpticalNetwork network;
  ComplexMatrix effective;  // success-port operator on Bob (x) Charlie
};
BsmNetwork bsm_projector_network(int d);

}  // namespace mdisteer::optics
