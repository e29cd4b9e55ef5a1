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

#include "mdisteer/optics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace mdisteer::optics {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ComplexMatrix rotation(double angle_deg) {
  const double c = std::cos(angle_deg * kDeg);
  const double s = std::sin(angle_deg * kDeg);
  ComplexMatrix r(2, 2);
  r << c, -s, s, c;
  return r;
}

}  // namespace

ComplexMatrix jones(Plate kind, double angle_deg) {
  ComplexMatrix retarder = ComplexMatrix::Zero(2, 2);
  retarder(0, 0) = 1.0;
  retarder(1, 1) = kind == Plate::HWP ? Complex(-1.0, 0.0) : Complex(0.0, 1.0);
  return rotation(angle_deg) * retarder * rotation(-angle_deg);
}

double phase_distance(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw qmath::DimensionError("phase_distance: shape mismatch");
  const Complex overlap = (v.adjoint() * u).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (u - phase * v).norm();
}

NetworkParseError::NetworkParseError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

int OpticalNetwork::path_index(const std::string& label) const {
  const auto it = std::find(paths.begin(), paths.end(), label);
  if (it == paths.end()) throw std::invalid_argument("undeclared path '" + label + "'");
  return static_cast<int>(it - paths.begin());
}

namespace {

struct Parser {
  OpticalNetwork net;
  std::set<int> used_levels;
  std::set<std::pair<int, int>> used_modes;
  bool have_paths = false;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const { throw NetworkParseError(line, what); }

  int existing(const std::string& label) const {
    const auto it = std::find(net.paths.begin(), net.paths.end(), label);
    if (it == net.paths.end()) fail("undeclared path '" + label + "'");
    return static_cast<int>(it - net.paths.begin());
  }

  int fresh(const std::string& label) {
    if (std::find(net.paths.begin(), net.paths.end(), label) != net.paths.end()) {
      fail("path '" + label + "' already exists");
    }
    net.paths.push_back(label);
    return static_cast<int>(net.paths.size()) - 1;
  }

  double number(const std::string& token) const {
    try {
      size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size() || !std::isfinite(v)) throw std::invalid_argument(token);
      return v;
    } catch (const std::exception&) {
      fail("expected a number, got '" + token + "'");
    }
  }

  int integer(const std::string& token) const {
    const double v = number(token);
    if (v != std::floor(v)) fail("expected an integer, got '" + token + "'");
    return static_cast<int>(v);
  }

  Polarization pol(const std::string& token) const {
    if (token == "H" || token == "h") return Polarization::H;
    if (token == "V" || token == "v") return Polarization::V;
    fail("expected polarization H or V, got '" + token + "'");
  }

  void need(const std::vector<std::string>& tok, size_t lo, size_t hi) const {
    if (tok.size() < lo || tok.size() > hi) fail("wrong number of fields for '" + tok[0] + "'");
  }

  void require_paths(const std::string& what) const {
    if (!have_paths) fail("'" + what + "' before 'paths'");
  }

  void handle(const std::vector<std::string>& tok) {
    const std::string& key = tok[0];
    if (key == "network") {
      need(tok, 2, 2);
      net.name = tok[1];
    } else if (key == "paths") {
      if (have_paths) fail("'paths' given twice");
      if (tok.size() < 2) fail("'paths' needs at least one path");
      for (size_t i = 1; i < tok.size(); ++i) fresh(tok[i]);
      net.input_paths = static_cast<int>(net.paths.size());
      have_paths = true;
    } else if (key == "encode") {
      require_paths(key);
      need(tok, 4, 4);
      const int level = integer(tok[1]);
      const int path = existing(tok[2]);
      if (path >= net.input_paths) fail("encoded path '" + tok[2] + "' is not an input path");
      const Polarization p = pol(tok[3]);
      if (level < 0 || !used_levels.insert(level).second) fail("logical level " + tok[1] + " invalid or repeated");
      if (!used_modes.insert({path, static_cast<int>(p)}).second) fail("mode " + tok[2] + " " + tok[3] + " encoded twice");
      if (static_cast<int>(net.encoding.size()) <= level) net.encoding.resize(level + 1, Mode{-1, Polarization::H});
      net.encoding[level] = Mode{path, p};
    } else if (key == "hwp" || key == "qwp") {
      require_paths(key);
      need(tok, 3, 3);
      Element e;
      e.kind = Element::Kind::Waveplate;
      e.line = line;
      e.plate = key == "hwp" ? Plate::HWP : Plate::QWP;
      e.path = existing(tok[1]);
      e.angle_deg = number(tok[2]);
      net.elements.push_back(std::move(e));
    } else if (key == "block") {
      require_paths(key);
      need(tok, 2, 2);
      Element e;
      e.kind = Element::Kind::Block;
      e.line = line;
      e.path = existing(tok[1]);
      net.elements.push_back(std::move(e));
    } else if (key == "pbs") {
      require_paths(key);
      need(tok, 4, 4);
      Element e;
      e.kind = Element::Kind::Pbs;
      e.line = line;
      e.path = existing(tok[1]);
      e.out_h = fresh(tok[2]);
      e.out_v = fresh(tok[3]);
      net.elements.push_back(std::move(e));
    } else if (key == "bd") {
      require_paths(key);
      if (tok.size() < 2) fail("'bd' needs at least one src>dst move");
      Element e;
      e.kind = Element::Kind::BeamDisplacer;
      e.line = line;
      std::set<int> sources, targets;
      for (size_t i = 1; i < tok.size(); ++i) {
        const auto gt = tok[i].find('>');
        if (gt == std::string::npos || gt == 0 || gt + 1 == tok[i].size()) fail("bad move '" + tok[i] + "'");
        const int src = existing(tok[i].substr(0, gt));
        const int dst = existing(tok[i].substr(gt + 1));
        if (src == dst) fail("move '" + tok[i] + "' does not displace");
        if (!sources.insert(src).second || !targets.insert(dst).second) fail("paths repeated in 'bd'");
        e.moves.emplace_back(src, dst);
      }
      for (int dst : targets) {
        if (sources.count(dst)) continue;
        e.spills.emplace_back(dst, fresh(net.paths[dst] + "~" + std::to_string(line)));
      }
      net.elements.push_back(std::move(e));
    } else if (key == "detect") {
      require_paths(key);
      if (tok.size() < 3) fail("'detect' needs a label and at least one path");
      Detector d;
      d.label = tok[1];
      for (const auto& det : net.detectors)
        if (det.label == d.label) fail("detector '" + d.label + "' declared twice");
      for (size_t i = 2; i < tok.size(); ++i) d.paths.push_back(existing(tok[i]));
      net.detectors.push_back(std::move(d));
    } else if (key == "target") {
      if (tok.size() < 2) fail("'target' needs a kind");
      if (tok[1] == "none") {
        need(tok, 2, 2);
        net.target = Target{};
      } else if (tok[1] == "mub") {
        need(tok, 4, 4);
        net.target = Target{Target::Kind::Mub, integer(tok[2]), integer(tok[3])};
        if (net.target.d < 2 || net.target.setting < 0 || net.target.setting > 1) fail("bad mub target");
      } else if (tok[1] == "bell") {
        need(tok, 3, 3);
        net.target = Target{Target::Kind::Bell, integer(tok[2]), 0};
        if (net.target.d < 2) fail("bad bell target");
      } else {
        fail("unknown target kind '" + tok[1] + "'");
      }
    } else if (key == "tolerance") {
      need(tok, 2, 2);
      net.tolerance = number(tok[1]);
      if (!(net.tolerance > 0.0)) fail("tolerance must be positive");
    } else {
      fail("unknown directive '" + key + "'");
    }
  }

  void finish() {
    line = 0;
    if (!have_paths) fail("network description declares no paths");
    if (net.encoding.empty()) fail("network description declares no encoding");
    for (size_t i = 0; i < net.encoding.size(); ++i)
      if (net.encoding[i].path < 0) fail("logical level " + std::to_string(i) + " is not encoded");
    if (net.detectors.empty()) fail("network description declares no detectors");
    const int dim = net.logical_dim();
    if (net.target.kind == Target::Kind::Mub &&
        (dim != net.target.d || static_cast<int>(net.detectors.size()) != net.target.d)) {
      fail("mub target needs d logical levels and d detectors");
    }
    if (net.target.kind == Target::Kind::Bell && dim != net.target.d * net.target.d) {
      fail("bell target needs d^2 logical levels");
    }
  }
};

}  // namespace

OpticalNetwork parse_network(const std::string& text, const std::string& default_name) {
  Parser p;
  p.net.name = default_name;
  std::istringstream in(text);
  std::string raw;
  bool any = false;
  while (std::getline(in, raw)) {
    ++p.line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream fields(raw);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    any = true;
    p.handle(tok);
  }
  if (!any) throw NetworkParseError(0, "empty network description");
  p.finish();
  return std::move(p.net);
}

OpticalNetwork load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) stem.erase(0, slash + 1);
  if (const auto dot = stem.rfind('.'); dot != std::string::npos) stem.erase(dot);
  return parse_network(buf.str(), stem);
}

OpticalNetwork embedded_network(const std::string& name) {
  const auto& all = embedded_networks();
  const auto it = all.find(name);
  if (it == all.end()) throw std::invalid_argument("no embedded network named '" + name + "'");
  return parse_network(it->second, name);
}

Complex PathPolState::amplitude(const std::string& path, Polarization pol) const {
  const auto it = std::find(paths.begin(), paths.end(), path);
  if (it == paths.end()) throw std::invalid_argument("undeclared path '" + path + "'");
  return amplitudes(2 * (it - paths.begin()) + static_cast<int>(pol));
}

PathPolState make_state(const std::vector<std::string>& paths) {
  PathPolState s;
  s.paths = paths;
  s.amplitudes = qmath::Ket::Zero(2 * static_cast<Eigen::Index>(paths.size()));
  return s;
}

PathPolState encoded_state(const OpticalNetwork& net, int level) {
  if (level < 0 || level >= net.logical_dim()) throw std::out_of_range("encoded_state: level out of range");
  PathPolState s = make_state(std::vector<std::string>(net.paths.begin(), net.paths.begin() + net.input_paths));
  const Mode m = net.encoding[level];
  s.amplitudes(2 * m.path + static_cast<int>(m.pol)) = 1.0;
  return s;
}

namespace {

int mode(int path, Polarization p) { return 2 * path + static_cast<int>(p); }

ComplexMatrix element_matrix(const Element& e, int n) {
  ComplexMatrix m = ComplexMatrix::Identity(n, n);
  switch (e.kind) {
    case Element::Kind::Waveplate:
      m.block(2 * e.path, 2 * e.path, 2, 2) = jones(e.plate, e.angle_deg);
      break;
    case Element::Kind::Block:
      m(mode(e.path, Polarization::H), mode(e.path, Polarization::H)) = 0.0;
      m(mode(e.path, Polarization::V), mode(e.path, Polarization::V)) = 0.0;
      break;
    case Element::Kind::Pbs: {
      const int h = mode(e.path, Polarization::H);
      const int v = mode(e.path, Polarization::V);
      m(h, h) = 0.0;
      m(v, v) = 0.0;
      m(mode(e.out_h, Polarization::H), h) = 1.0;
      m(mode(e.out_v, Polarization::V), v) = 1.0;
      break;
    }
    case Element::Kind::BeamDisplacer: {
      for (const auto& [src, dst] : e.moves) m(mode(src, Polarization::V), mode(src, Polarization::V)) = 0.0;
      for (const auto& [dst, spill] : e.spills) m(mode(dst, Polarization::V), mode(dst, Polarization::V)) = 0.0;
      for (const auto& [src, dst] : e.moves) m(mode(dst, Polarization::V), mode(src, Polarization::V)) = 1.0;
      for (const auto& [dst, spill] : e.spills) m(mode(spill, Polarization::V), mode(dst, Polarization::V)) = 1.0;
      break;
    }
  }
  return m;
}

// Columns: logical levels. Rows: all output modes.
ComplexMatrix logical_transfer(const OpticalNetwork& net) {
  const ComplexMatrix t = transfer_matrix(net);
  ComplexMatrix u(net.modes(), net.logical_dim());
  for (int i = 0; i < net.logical_dim(); ++i) u.col(i) = t.col(mode(net.encoding[i].path, net.encoding[i].pol));
  return u;
}

ComplexMatrix detector_operator(const ComplexMatrix& u, const Detector& d) {
  ComplexMatrix e = ComplexMatrix::Zero(u.cols(), u.cols());
  for (int p : d.paths) {
    for (int pol = 0; pol < 2; ++pol) {
      const auto row = u.row(2 * p + pol);
      e += row.adjoint() * row;
    }
  }
  return 0.5 * (e + e.adjoint());
}

}  // namespace

ComplexMatrix transfer_matrix(const OpticalNetwork& net) {
  const int n = net.modes();
  ComplexMatrix t = ComplexMatrix::Identity(n, n);
  for (const auto& e : net.elements) t = element_matrix(e, n) * t;
  return t;
}

PathPolState apply_network(const OpticalNetwork& net, const PathPolState& input) {
  if (input.amplitudes.size() != 2 * static_cast<Eigen::Index>(input.paths.size())) {
    throw qmath::DimensionError("apply_network: amplitude vector does not match the path list");
  }
  qmath::Ket full = qmath::Ket::Zero(net.modes());
  for (size_t i = 0; i < input.paths.size(); ++i) {
    const int p = net.path_index(input.paths[i]);
    full.segment(2 * p, 2) += input.amplitudes.segment(2 * static_cast<Eigen::Index>(i), 2);
  }
  PathPolState out;
  out.paths = net.paths;
  out.amplitudes = transfer_matrix(net) * full;
  return out;
}

ComplexMatrix effective_operator(const OpticalNetwork& net, const std::string& detector) {
  for (const auto& d : net.detectors)
    if (d.label == detector) return detector_operator(logical_transfer(net), d);
  throw std::invalid_argument("network '" + net.name + "' has no detector '" + detector + "'");
}

scenario::Povm effective_povm(const OpticalNetwork& net) {
  const ComplexMatrix u = logical_transfer(net);
  scenario::Povm povm;
  povm.dim = net.logical_dim();
  for (const auto& d : net.detectors) povm.elements.push_back(detector_operator(u, d));
  return povm;
}

VerificationReport verify_network(const OpticalNetwork& net) {
  VerificationReport r;
  r.name = net.name;
  r.tolerance = net.tolerance;
  const scenario::Povm povm = effective_povm(net);
  const int dim = net.logical_dim();
  ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
  for (const auto& e : povm.elements) total += e;
  r.completeness = qmath::hermitian_operator_norm(total - ComplexMatrix::Identity(dim, dim));
  switch (net.target.kind) {
    case Target::Kind::None:
      r.target = "none";
      r.pass = true;
      break;
    case Target::Kind::Mub: {
      r.target = "mub d=" + std::to_string(net.target.d) + " setting=" + std::to_string(net.target.setting);
      const scenario::Povm want = scenario::fourier_mub(net.target.d, net.target.setting);
      for (int b = 0; b < want.outcomes(); ++b) {
        r.deviation = std::max(r.deviation, qmath::hermitian_operator_norm(povm[b] - want[b]));
      }
      r.pass = r.deviation <= r.tolerance && r.completeness <= r.tolerance;
      break;
    }
    case Target::Kind::Bell: {
      r.target = "bell d=" + std::to_string(net.target.d);
      if (povm.outcomes() != 1) throw std::invalid_argument("verify_network: bell target needs one success detector");
      const ComplexMatrix phi = qmath::projector(scenario::max_entangled(net.target.d));
      const double s = (phi * povm[0]).trace().real();
      r.success_probability = s;
      r.deviation = s > 0.0 ? qmath::hermitian_operator_norm(povm[0] / s - phi) : 1.0;
      r.pass = s > 0.0 && r.deviation <= r.tolerance;
      break;
    }
  }
  return r;
}

ComplexMatrix qhq_matrix(const QhqAngles& a) {
  return jones(Plate::QWP, a.q1) * jones(Plate::HWP, a.h) * jones(Plate::QWP, a.q2);
}

namespace {

// Residual u - e^{i phi} v with the optimal phase, as 8 reals.
Eigen::Matrix<double, 8, 1> qhq_residual(const Eigen::Vector3d& x, const ComplexMatrix& target) {
  const ComplexMatrix u = qhq_matrix({x(0), x(1), x(2)});
  const Complex overlap = (target.adjoint() * u).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  const ComplexMatrix diff = u - phase * target;
  Eigen::Matrix<double, 8, 1> r;
  for (int i = 0; i < 4; ++i) {
    r(2 * i) = diff.data()[i].real();
    r(2 * i + 1) = diff.data()[i].imag();
  }
  return r;
}

Eigen::Vector3d levenberg_marquardt(Eigen::Vector3d x, const ComplexMatrix& target) {
  double lambda = 1e-3;
  auto r = qhq_residual(x, target);
  double cost = r.squaredNorm();
  for (int it = 0; it < 200 && cost > 1e-28; ++it) {
    Eigen::Matrix<double, 8, 3> jac;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d xp = x, xm = x;
      xp(k) += 1e-6;
      xm(k) -= 1e-6;
      jac.col(k) = (qhq_residual(xp, target) - qhq_residual(xm, target)) / 2e-6;
    }
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d g = jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      Eigen::Matrix3d a = jtj;
      a.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
      const Eigen::Vector3d step = a.ldlt().solve(-g);
      const auto r_new = qhq_residual(x + step, target);
      if (r_new.squaredNorm() < cost) {
        x += step;
        r = r_new;
        cost = r.squaredNorm();
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!improved) break;
  }
  return x;
}

double wrap_angle(double deg) {
  double w = std::fmod(deg, 180.0);
  return w < 0.0 ? w + 180.0 : w;
}

}  // namespace

QhqAngles solve_qhq(const ComplexMatrix& target) {
  if (target.rows() != 2 || target.cols() != 2) throw qmath::DimensionError("solve_qhq: target must be 2x2");
  if ((target.adjoint() * target - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("solve_qhq: target is not unitary");
  }
  // Coarse grid; each plate has period 180 degrees.
  constexpr int kGrid = 12;
  std::vector<std::pair<double, Eigen::Vector3d>> seeds;
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j)
      for (int k = 0; k < kGrid; ++k) {
        const Eigen::Vector3d x(180.0 * i / kGrid, 180.0 * j / kGrid, 180.0 * k / kGrid);
        seeds.emplace_back(qhq_residual(x, target).squaredNorm(), x);
      }
  std::partial_sort(seeds.begin(), seeds.begin() + 8, seeds.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
  Eigen::Vector3d best = seeds.front().second;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 8; ++s) {
    const Eigen::Vector3d x = levenberg_marquardt(seeds[s].second, target);
    const double cost = qhq_residual(x, target).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best = x;
    }
    if (best_cost < 1e-24) break;
  }
  return {wrap_angle(best(0)), wrap_angle(best(1)), wrap_angle(best(2))};
}

MeasurementNetwork alice_measurement_network(int j) {
  if (j != 1 && j != 2) throw std::invalid_argument("alice_measurement_network: setting must be 1 or 2");
  MeasurementNetwork m;
  m.network = embedded_network("alice-d3-j" + std::to_string(j));
  m.povm = effective_povm(m.network);
  return m;
}

BsmNetwork bsm_projector_network(int d) {
  if (d != 3 && d != 4) throw std::invalid_argument("bsm_projector_network: d must be 3 or 4");
  BsmNetwork b;
  b.network = embedded_network("bsm-d" + std::to_string(d));
  b.effective = effective_povm(b.network)[0];
  return b;
}

}  // namespace mdisteer::optics
