#include "degenlab/cli.hpp"

namespace degenlab {

namespace {

// Scenario documents shipped with the binary; `degenlab list --format json` prints them.
const char* const kBuiltins[] = {
    R"({
  "name": "laplacian1d",
  "anchor": "strongly elliptic control: Gaussian kernel, Gaussian off-diagonal bounds, unit speed",
  "profile": {"dimension": 1, "family": {"kind": "power", "delta": 0.0, "centers": [0.0]},
              "domain": [-8.0, 8.0], "metadata": {"predicted_gamma": 1.0}},
  "mesh": {"n": 1024},
  "t_small": [0.003, 0.005, 0.01, 0.02, 0.05, 0.1],
  "t_large": [0.25, 0.5, 1.0],
  "checks": [
    "markov",
    "conservation",
    "semigroup",
    {"name": "offdiagonal", "centers": [-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0], "radii": [0.2, 0.5],
     "times": [0.001, 0.002682695795, 0.007196856730, 0.01930697729, 0.05179474679, 0.1389495494, 0.3727593720, 1.0]},
    {"name": "offdiagonal_euclidean", "centers": [-1.0, 0.0, 1.5], "half_width": 0.25,
     "times": [0.01, 0.05, 0.2, 1.0]},
    {"name": "smalltime_decay", "gamma": 1.0, "strategy": "interior"},
    {"name": "largetime_gaussian", "times": [0.01, 0.03, 0.1, 0.3, 1.0], "strategy": "interior"},
    {"name": "wave_speed", "source": -3.0, "radius": 0.5, "times": [0.5, 1.0, 2.0, 4.0]},
    {"name": "ondiagonal_lower", "t": 1.0, "diameter": 0.5, "centers": [-2.0, -1.0, 0.0, 1.0, 2.0]},
    {"name": "resolvent_volume", "origin": 0.0}
  ]
})",
    R"({
  "name": "degenerate1d-d0.25",
  "anchor": "c^{-1} integrable at the zero: no separation, subelliptic kernel bound of order 1 - delta",
  "profile": {"dimension": 1, "family": {"kind": "power", "delta": 0.25, "centers": [0.0]},
              "domain": [-4.0, 4.0], "metadata": {"predicted_gamma": 0.75}},
  "mesh": {"n": 2048},
  "t_small": [0.003, 0.005, 0.01, 0.02, 0.05, 0.1],
  "t_large": [0.5, 1.0],
  "checks": [
    "markov",
    "conservation",
    "semigroup",
    "classification",
    {"name": "separation", "expected": "non-separating", "epsilons": [0.0, 0.01]},
    {"name": "offdiagonal", "centers": [-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0], "radii": [0.2, 0.5],
     "times": [0.001, 0.002682695795, 0.007196856730, 0.01930697729, 0.05179474679, 0.1389495494, 0.3727593720, 1.0]},
    {"name": "offdiagonal_euclidean", "centers": [-1.0, 0.0, 1.5], "half_width": 0.25,
     "times": [0.01, 0.05, 0.2, 1.0]},
    {"name": "smalltime_decay", "gamma": 0.75, "strategy": "interior"},
    {"name": "holder_fit", "origin": 0.0, "range": [0.001, 0.1], "expected_gamma": 0.75},
    {"name": "ondiagonal_lower", "t": 1.0, "diameter": 0.5, "centers": [-2.0, -1.0, 0.0, 1.0, 2.0]}
  ]
})",
    R"({
  "name": "degenerate1d-d0.5",
  "anchor": "c^{-1} not integrable at the zero: separation without subellipticity of order one half",
  "profile": {"dimension": 1, "family": {"kind": "power", "delta": 0.5, "centers": [0.0]},
              "domain": [-4.0, 4.0]},
  "mesh": {"n": 2048},
  "t_small": [0.01, 0.1],
  "t_large": [0.5, 1.0],
  "checks": [
    "markov",
    "conservation",
    "semigroup",
    "classification",
    {"name": "separation", "expected": "separating", "epsilons": [0.0, 0.01]},
    {"name": "offdiagonal", "centers": [-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0], "radii": [0.2, 0.5],
     "times": [0.001, 0.002682695795, 0.007196856730, 0.01930697729, 0.05179474679, 0.1389495494, 0.3727593720, 1.0]},
    {"name": "offdiagonal_euclidean", "centers": [-1.0, 0.0, 1.5], "half_width": 0.25,
     "times": [0.01, 0.05, 0.2, 1.0]},
    {"name": "wave_speed", "source": -3.0, "radius": 0.5, "times": [0.5, 1.0, 2.0, 4.0]},
    {"name": "holder_fit", "origin": 0.0, "range": [0.001, 0.1], "expected_gamma": 0.5},
    {"name": "ondiagonal_lower", "t": 1.0, "diameter": 0.5, "centers": [-3.0, -2.0, 2.0, 3.0]}
  ]
})",
    R"({
  "name": "degenerate1d-d0.75",
  "anchor": "c^{-1} not integrable at the zero: the half-lines are invariant",
  "profile": {"dimension": 1, "family": {"kind": "power", "delta": 0.75, "centers": [0.0]},
              "domain": [-4.0, 4.0]},
  "mesh": {"n": 2048},
  "t_small": [0.01, 0.1],
  "t_large": [0.5, 1.0],
  "checks": [
    "markov",
    "conservation",
    "semigroup",
    "classification",
    {"name": "separation", "expected": "separating", "epsilons": [0.0, 0.01]},
    {"name": "offdiagonal", "centers": [-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0], "radii": [0.2, 0.5],
     "times": [0.001, 0.002682695795, 0.007196856730, 0.01930697729, 0.05179474679, 0.1389495494, 0.3727593720, 1.0]},
    {"name": "offdiagonal_euclidean", "centers": [-1.0, 0.0, 1.5], "half_width": 0.25,
     "times": [0.01, 0.05, 0.2, 1.0]},
    {"name": "holder_fit", "origin": 0.0, "range": [0.001, 0.1], "expected_gamma": 0.25}
  ]
})",
    R"({
  "name": "separating-d0.75",
  "anchor": "exact zero-conductance cut: invariant half-lines, vanishing cross terms, no wave crosses the cut",
  "profile": {"dimension": 1, "family": {"kind": "power", "delta": 0.75, "centers": [0.0]},
              "domain": [-8.0, 8.0]},
  "mesh": {"n": 1023},
  "t_small": [0.01, 0.1],
  "t_large": [1.0, 5.0],
  "checks": [
    "markov",
    "conservation",
    {"name": "conservation", "omega": {"interval": [-8.0, 0.0]}},
    "semigroup",
    "classification",
    {"name": "separation", "expected": "separating"},
    {"name": "invariance", "omega": {"interval": [-8.0, 0.0]}, "t": 1.0},
    {"name": "form_additivity", "omega": {"interval": [-8.0, 0.0]}},
    {"name": "offdiagonal", "centers": [-2.0, -1.0, -0.3, 0.3, 1.0, 2.0], "radii": [0.2, 0.5],
     "times": [0.01, 0.1, 1.0]},
    {"name": "offdiagonal_euclidean", "centers": [-0.5, 0.5], "half_width": 0.4,
     "times": [0.01, 0.1, 1.0, 5.0]},
    {"name": "wave_speed", "source": -3.0, "radius": 0.5, "times": [0.5, 1.0, 2.0, 4.0, 8.0],
     "forbidden": {"interval": [0.0, 8.0]}},
    {"name": "ondiagonal_lower", "t": 1.0, "diameter": 0.5, "centers": [-2.0, -0.3, 0.3, 2.0],
     "separated": true}
  ]
})",
    R"({
  "name": "double-zero",
  "anchor": "sup_x K_t(x;x) >= 1/(x2 - x1) for every t > 0 when (x1, x2) is an invariant interval",
  "profile": {"dimension": 1, "family": {"kind": "power", "delta": 0.75, "centers": [-1.0, 1.0]},
              "domain": [-8.0, 8.0]},
  "mesh": {"n": 504},
  "t_small": [0.01, 0.1],
  "t_large": [1.0, 2.0, 5.0, 10.0, 20.0, 50.0],
  "checks": [
    "markov",
    "conservation",
    {"name": "conservation", "omega": {"interval": [-1.0, 1.0]}},
    {"name": "invariance", "omega": {"interval": [-1.0, 1.0]}, "t": 5.0},
    {"name": "form_additivity", "omega": {"interval": [-1.0, 1.0]}},
    {"name": "largetime_floor", "floor": 0.5, "strategy": "all", "growth_factor": 3.0},
    {"name": "largetime_floor", "floor": 0.5, "strategy": {"window": [-0.5, 0.5]}, "growth_factor": 3.0}
  ]
})",
    R"({
  "name": "radial-shell-2d",
  "anchor": "radial degeneracy on the unit circle: the unit disc is invariant",
  "profile": {"dimension": 2, "family": {"kind": "radial", "delta": 0.75, "radius": 1.0},
              "domain": [[-2.0, 2.0], [-2.0, 2.0]]},
  "mesh": {"n": 64, "sampling": "edge-harmonic"},
  "t_small": [0.01, 0.1],
  "t_large": [0.5, 1.0],
  "checks": [
    "markov",
    "conservation",
    {"name": "conservation", "omega": {"disc": {"center": [0.0, 0.0], "radius": 1.0}}},
    {"name": "invariance", "omega": {"disc": {"center": [0.0, 0.0], "radius": 1.0}}, "t": 0.5},
    {"name": "form_additivity", "omega": {"disc": {"center": [0.0, 0.0], "radius": 1.0}}},
    {"name": "offdiagonal_euclidean", "centers": [[0.0, 0.0], [1.5, 0.0], [0.0, -1.5]], "half_width": 0.3,
     "times": [0.01, 0.1, 0.5]},
    {"name": "ondiagonal_lower", "t": 0.5, "diameter": 0.5, "centers": [[0.0, 0.0], [1.5, 1.5]],
     "separated": true}
  ]
})",
    R"({
  "name": "surface-2d",
  "anchor": "degeneracy along the graph z = Phi(y): the region below the graph is invariant",
  "profile": {"dimension": 2,
              "family": {"kind": "surface", "delta": 0.75, "support": [-2.0, 2.0],
                         "phi": [0.0, 0.2121320344, 0.3, 0.2121320344, 0.0, -0.2121320344, -0.3,
                                 -0.2121320344, 0.0, 0.2121320344, 0.3, 0.2121320344, 0.0,
                                 -0.2121320344, -0.3, -0.2121320344, 0.0]},
              "domain": [[-2.0, 2.0], [-2.0, 2.0]]},
  "mesh": {"n": 64, "sampling": "edge-harmonic"},
  "t_small": [0.01, 0.1],
  "t_large": [0.5, 1.0],
  "checks": [
    "markov",
    "conservation",
    {"name": "conservation", "omega": {"surface": "below"}},
    {"name": "invariance", "omega": {"surface": "below"}, "t": 0.5},
    {"name": "form_additivity", "omega": {"surface": "below"}},
    {"name": "offdiagonal_euclidean", "centers": [[0.0, -1.0], [0.0, 1.0], [1.5, -1.5]], "half_width": 0.3,
     "times": [0.01, 0.1, 0.5]}
  ]
})",
    R"({
  "name": "resolvent-volume",
  "anchor": "K_{(I + r^2 H)^{-2m}}(x;x) |B_C(x;r)| is bounded above and below, 4m > d",
  "profile": {"dimension": 1, "family": {"kind": "power", "delta": 0.5, "centers": [0.0]},
              "domain": [-4.0, 4.0]},
  "mesh": {"n": 4096},
  "t_small": [0.001, 0.01],
  "checks": [
    "markov",
    "conservation",
    {"name": "resolvent_volume", "origin": 0.0, "m": 1},
    {"name": "resolvent_volume", "origin": 2.0, "m": 1}
  ]
})",
    R"({
  "name": "sabotage-rowsum",
  "anchor": "detection control: one row sum perturbed, conservation must fail",
  "profile": {"dimension": 1, "family": {"kind": "power", "delta": 0.0, "centers": [0.0]},
              "domain": [-8.0, 8.0]},
  "mesh": {"n": 256},
  "perturb": [{"kind": "diagonal", "index": 128, "value": 0.001}],
  "t_small": [0.1],
  "t_large": [1.0, 10.0],
  "checks": ["markov", "conservation"]
})",
    R"({
  "name": "sabotage-offdiag",
  "anchor": "detection control: one positive off-diagonal entry, the Markov structure must fail",
  "profile": {"dimension": 1, "family": {"kind": "power", "delta": 0.0, "centers": [0.0]},
              "domain": [-8.0, 8.0]},
  "mesh": {"n": 256},
  "perturb": [{"kind": "face", "index": 100, "value": -50.0}],
  "t_small": [0.1],
  "t_large": [1.0],
  "checks": ["markov", "semigroup"]
})",
};

}  // namespace

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> all = [] {
    std::vector<Scenario> v;
    for (const char* doc : kBuiltins) v.push_back(scenario_from_json(nlohmann::json::parse(doc)));
    return v;
  }();
  return all;
}

std::optional<Scenario> find_builtin(const std::string& name) {
  // Accept the Greek spelling: "degenerate1d-\u03b40.5" names "degenerate1d-d0.5".
  std::string key = name;
  for (std::size_t at = key.find("\xce\xb4"); at != std::string::npos; at = key.find("\xce\xb4", at)) {
    key.replace(at, 2, "d");
  }
  for (const auto& s : builtin_scenarios()) {
    if (s.name == key) return s;
  }
  return std::nullopt;
}

}  // namespace degenlab
