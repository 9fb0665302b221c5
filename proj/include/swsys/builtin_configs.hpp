#pragma once

// Embedded copies of the bundled demo configurations. The files under
// configs/ carry the same content; a test keeps them in sync.

#include <string_view>

namespace swsys::builtin {

/// Two-mode study: one contracting and one expanding subsystem with the
/// published rate functions and offsets. The reference_lhs_terms entry is
/// the externally stated aggregate the report compares against.
inline constexpr std::string_view kSec4Config = R"JSON({
  "family": {
    "state_dim": 2,
    "input_dim": 1,
    "modes": [
      {
        "f": ["-x1 + sin(x1 - x2)", "-x2 + 0.8*sin(x2 - x1) + 0.5*v1"],
        "V": "0.5*(x1^2 + 1.25*x2^2)",
        "lambda": 1.75
      },
      {
        "f": ["x1 + sin(x1 - x2)", "x2 + sin(x2 - x1) + 0.5*v1"],
        "V": "0.5*(x1^2 + x2^2)",
        "lambda": -2.1667
      }
    ],
    "transitions": [
      { "from": 1, "to": 2, "mu": 1.0 },
      { "from": 2, "to": 1, "mu": 2.0 }
    ],
    "alpha_lower": { "coef": 0.5, "power": 2 },
    "alpha_upper": { "coef": 0.625, "power": 2 },
    "gamma": "0"
  },
  "bounds": {
    "iss": [
      {
        "mode": 1,
        "terms": [ { "coef": 0.203, "power": 1 }, { "coef": 0.0001, "power": 1.5 } ],
        "offset": 0.01
      }
    ],
    "non_iss": [
      { "mode": 2, "terms": [ { "coef": 0.1, "power": 1 } ], "offset": 2.58 }
    ],
    "switching": [
      {
        "from": 1,
        "to": 2,
        "terms": [ { "coef": 0.1, "power": 1 }, { "coef": 0.05, "power": 1.5 } ],
        "offset": 1.0
      },
      {
        "from": 2,
        "to": 1,
        "terms": [ { "coef": 0.2, "power": 1 }, { "coef": 0.0025, "power": 1.5 } ],
        "offset": 1.0
      }
    ]
  },
  "certificate": {
    "rho": { "terms": [ { "coef": 1e-05, "power": 1.5 } ], "offset": 0.0 },
    "c1": 0.0,
    "horizons": { "start": 1.0, "stop": 30000.0, "count": 400, "spacing": "linear" },
    "grid": { "s_max": 100.0, "s_count": 500 },
    "reference_lhs_terms": [ { "coef": -1.725e-05, "power": 1.5 } ]
  },
  "signal": {
    "type": "admissible",
    "t_end": 40.0,
    "mode_cycle": [1, 2],
    "check_grid_step": 0.01
  },
  "simulation": {
    "input": ["1"],
    "t_end": 40.0,
    "dt": 0.001,
    "batch_box": [[-1000.0, 1000.0], [-1000.0, 1000.0]],
    "n_runs": 50,
    "seed": 2024,
    "write_trajectories": false
  },
  "checks": {
    "state_box": [[-5.0, 5.0], [-5.0, 5.0]],
    "input_box": [[-1.0, 1.0]],
    "n_samples": 2000,
    "seed": 7
  }
}
)JSON";

/// Scalar contracting system xdot = -x + v: the smallest configuration that
/// earns a certificate end to end.
inline constexpr std::string_view kScalarLinearConfig = R"JSON({
  "family": {
    "state_dim": 1,
    "input_dim": 1,
    "modes": [
      { "f": ["-x1 + v1"], "V": "0.5*x1^2", "lambda": 1.0 }
    ],
    "transitions": [],
    "alpha_lower": { "coef": 0.25, "power": 2 },
    "alpha_upper": { "coef": 1.0, "power": 2 },
    "gamma": "0.5*r^2"
  },
  "bounds": {
    "iss": [
      { "mode": 1, "terms": [ { "coef": 1.0, "power": 1 } ], "offset": 1.0 }
    ],
    "non_iss": [],
    "switching": []
  },
  "certificate": {
    "rho": { "terms": [ { "coef": 1.0, "power": 1 } ], "offset": 0.0 },
    "c1": 0.0,
    "horizons": { "start": 0.5, "stop": 200.0, "count": 400, "spacing": "linear" },
    "grid": { "s_max": 100.0, "s_count": 500 }
  },
  "signal": {
    "type": "inline",
    "taus": [0.0],
    "modes": [1]
  },
  "simulation": {
    "input": ["1"],
    "t_end": 20.0,
    "dt": 0.001,
    "batch_box": [[-100.0, 100.0]],
    "n_runs": 20,
    "seed": 99,
    "write_trajectories": false
  },
  "checks": {
    "state_box": [[-100.0, 100.0]],
    "input_box": [[-2.0, 2.0]],
    "n_samples": 1000,
    "seed": 7
  }
}
)JSON";

}  // namespace swsys::builtin
