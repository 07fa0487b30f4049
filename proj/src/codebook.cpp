// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/codebook.hpp"

#include <cmath>
#include <sstream>

#include "cfmimo/channel.hpp"

namespace cfmimo {

BeamCodebook build_codebook(int ue_antennas, int num_beams) {
  BeamCodebook cb;
  cb.ue_antennas = ue_antennas;
  cb.beams.reserve(num_beams);
  cb.angles.reserve(num_beams);
  for (int b = 0; b < num_beams; ++b) {
    const double phi = b * kPi / num_beams;
    cb.angles.push_back(phi);
    cb.beams.push_back(steering_vector(phi, ue_antennas));
  }
  return cb;
}

std::string method_name(BaMethod m) {
  switch (m) {
    case BaMethod::single_antenna: return "single_antenna";
    case BaMethod::digital_iu: return "digital_iu";
    case BaMethod::analog_iu: return "analog_iu";
    case BaMethod::analog_ia: return "analog_ia";
    case BaMethod::exhaustive: return "exhaustive";
  }
  return "unknown";
}

BaMethod parse_method(const std::string& name) {
  if (name == "single_antenna") return BaMethod::single_antenna;
  if (name == "digital_iu") return BaMethod::digital_iu;
  if (name == "analog_iu") return BaMethod::analog_iu;
  if (name == "analog_ia") return BaMethod::analog_ia;
  if (name == "exhaustive") return BaMethod::exhaustive;
  throw ConfigError("unknown beam-alignment method: " + name);
}

Mat BeamAssignment::materialize() const {
  const int k_total = num_ues();
  Mat p = Mat::Zero(static_cast<Eigen::Index>(k_total) * ue_antennas, k_total);
  for (int k = 0; k < k_total; ++k) {
    p.block(k * ue_antennas, k, ue_antennas, 1) = vectors[k];
  }
  return p;
}

BeamAssignment make_indexed_assignment(BaMethod method, const BeamCodebook& cb,
                                       const std::vector<int>& indices_1based) {
  BeamAssignment a;
  a.method = method;
  a.ue_antennas = cb.ue_antennas;
  a.beam_index = indices_1based;
  a.vectors.reserve(indices_1based.size());
  for (int b : indices_1based) a.vectors.push_back(cb.beams.at(b - 1));
  return a;
}

std::string serialize_assignment(const BeamAssignment& a) {
  std::ostringstream out;
  out.precision(17);
  out << "# cfmimo-beams v1\n";
  out << "method " << method_name(a.method) << "\n";
  out << "ue_antennas " << a.ue_antennas << "\n";
  for (int k = 0; k < a.num_ues(); ++k) {
    if (a.beam_index[k] > 0) {
      out << "ue " << (k + 1) << " beam " << a.beam_index[k] << "\n";
    } else {
      out << "ue " << (k + 1) << " vec";
      for (int m = 0; m < a.vectors[k].size(); ++m) {
        out << " " << a.vectors[k](m).real() << "," << a.vectors[k](m).imag();
      }
      out << "\n";
    }
  }
  return out.str();
}

BeamAssignment parse_assignment(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "# cfmimo-beams v1") {
    throw IoError("beam record: missing \"# cfmimo-beams v1\" header");
  }
  BeamAssignment a;
  std::string word;
  if (!(in >> word) || word != "method" || !(in >> word)) {
    throw IoError("beam record: missing method line");
  }
  a.method = parse_method(word);
  if (!(in >> word) || word != "ue_antennas" || !(in >> a.ue_antennas)) {
    throw IoError("beam record: missing ue_antennas line");
  }
  while (in >> word) {
    if (word != "ue") throw IoError("beam record: expected \"ue\", got " + word);
    int idx = 0;
    std::string kind;
    if (!(in >> idx >> kind)) throw IoError("beam record: truncated ue line");
    if (idx != a.num_ues() + 1) throw IoError("beam record: UE lines out of order");
    if (kind == "beam") {
      int b = 0;
      if (!(in >> b) || b < 1) throw IoError("beam record: bad beam index");
      a.beam_index.push_back(b);
      a.vectors.emplace_back();  // resolved later against a codebook
    } else if (kind == "vec") {
      Vec v(a.ue_antennas);
      for (int m = 0; m < a.ue_antennas; ++m) {
        std::string pair;
        if (!(in >> pair)) throw IoError("beam record: truncated vec entries");
        const auto comma = pair.find(',');
        if (comma == std::string::npos) throw IoError("beam record: bad vec entry");
        v(m) = cplx(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
      }
      a.beam_index.push_back(0);
      a.vectors.push_back(std::move(v));
    } else {
      throw IoError("beam record: unknown entry kind " + kind);
    }
  }
  return a;
}

void resolve_assignment(BeamAssignment& a, const BeamCodebook& cb) {
  if (cb.ue_antennas != a.ue_antennas) {
    throw ConfigError("beam record antennas disagree with codebook");
  }
  for (int k = 0; k < a.num_ues(); ++k) {
    if (a.beam_index[k] > 0) {
      if (a.beam_index[k] > static_cast<int>(cb.beams.size())) {
        throw ConfigError("beam index outside codebook");
      }
      a.vectors[k] = cb.beams[a.beam_index[k] - 1];
    }
  }
}

}  // namespace cfmimo
