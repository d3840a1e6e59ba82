#pragma once

// JSON state-file format shared by the library and the CLI:
//   { "kind": "single" | "bipartite",
//     "twice_j": int | [int, int],
//     "re": [[...]], "im": [[...]] }
// Matrices are row-major in the |j m> basis with m descending (A-major for
// bipartite). Unless raw mode is requested, parsers reject non-Hermitian
// input and trace != 1 beyond 1e-8.

#include "spinclass/bipartite.hpp"
#include "spinclass/density.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

namespace spinclass {

// malformed content -> FormatError (CLI exit 2)
// inconsistent dimensions / spin labels -> DimensionError (CLI exit 3)
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StateFile {
  bool bipartite = false;
  int twice_j_a = 1;
  int twice_j_b = 0;
  MatrixXcd matrix;

  SpinLabel spin() const { return SpinLabel(twice_j_a); }
  BipartiteLabel labels() const {
    return BipartiteLabel(SpinLabel(twice_j_a), SpinLabel(twice_j_b));
  }
};

inline StateFile parse_state_json(const nlohmann::json& j, bool raw = false) {
  StateFile st;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "single") {
      st.bipartite = false;
      st.twice_j_a = j.at("twice_j").get<int>();
    } else if (kind == "bipartite") {
      st.bipartite = true;
      const auto tj = j.at("twice_j");
      if (!tj.is_array() || tj.size() != 2)
        throw FormatError("bipartite state needs twice_j = [a, b]");
      st.twice_j_a = tj[0].get<int>();
      st.twice_j_b = tj[1].get<int>();
    } else {
      throw FormatError("unknown state kind: " + kind);
    }
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (!re.is_array() || !im.is_array() || re.empty() ||
        re.size() != im.size())
      throw FormatError("re/im must be equal-size non-empty matrices");
    const std::size_t n = re.size();
    st.matrix.resize(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      if (re[r].size() != n || im[r].size() != n)
        throw FormatError("re/im must be square");
      for (std::size_t c = 0; c < n; ++c)
        st.matrix(r, c) =
            Complex(re[r][c].get<double>(), im[r][c].get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad state json: ") + e.what());
  }

  if (st.twice_j_a < 1 || (st.bipartite && st.twice_j_b < 1))
    throw DimensionError("twice_j must be >= 1");
  const int expect = st.bipartite
                         ? (st.twice_j_a + 1) * (st.twice_j_b + 1)
                         : st.twice_j_a + 1;
  if (st.matrix.rows() != expect)
    throw DimensionError("matrix dimension does not match twice_j");

  if (!st.matrix.allFinite()) throw FormatError("non-finite matrix entries");
  if (!raw) {
    if (!is_hermitian(st.matrix, 1e-8))
      throw FormatError("state matrix is not Hermitian (use raw mode for directions)");
    const Complex tr = st.matrix.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > 1e-8)
      throw FormatError("state matrix trace differs from 1 (use raw mode for directions)");
  }
  return st;
}

inline StateFile read_state_file(const std::string& path, bool raw = false) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("json parse error: ") + e.what());
  }
  return parse_state_json(j, raw);
}

inline nlohmann::json state_to_json(const MatrixXcd& m, int twice_j) {
  nlohmann::json j;
  j["kind"] = "single";
  j["twice_j"] = twice_j;
  auto& re = j["re"] = nlohmann::json::array();
  auto& im = j["im"] = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json rre = nlohmann::json::array();
    nlohmann::json rim = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) {
      rre.push_back(m(r, c).real());
      rim.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rre));
    im.push_back(std::move(rim));
  }
  return j;
}

inline nlohmann::json state_to_json(const MatrixXcd& m, int twice_j_a,
                                    int twice_j_b) {
  nlohmann::json j = state_to_json(m, twice_j_a);
  j["kind"] = "bipartite";
  j["twice_j"] = {twice_j_a, twice_j_b};
  return j;
}

inline nlohmann::json mixture_to_json(const DeltaMixture& mix) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : mix.points)
    arr.push_back({{"weight", p.weight},
                   {"theta", p.point.theta},
                   {"phi", p.point.phi}});
  return arr;
}

inline nlohmann::json mixture_to_json(const ProductMixture& mix) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : mix.terms)
    arr.push_back({{"weight", t.weight},
                   {"theta_a", t.point_a.theta},
                   {"phi_a", t.point_a.phi},
                   {"theta_b", t.point_b.theta},
                   {"phi_b", t.point_b.phi}});
  return arr;
}

inline nlohmann::json witness_to_json(const WitnessReport& w) {
  return {{"kind", w.kind == WitnessKind::kSecondMoment ? "second-moment"
                                                        : "third-moment"},
          {"direction", {w.direction.x(), w.direction.y(), w.direction.z()}},
          {"value", w.value},
          {"violated", w.violated}};
}

}  // namespace spinclass
