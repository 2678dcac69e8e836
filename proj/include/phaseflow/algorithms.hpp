#pragma once

// The iterative projection algorithms: GLA, FGLA, AGLA, RAAR and DM. Each
// step is written against a generic consistency operator, so the same code
// runs offline (proj_consistency over a whole spectrogram) and online (the
// partial projection over a fluid frame buffer).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaseflow/errors.hpp"
#include "phaseflow/metrics.hpp"
#include "phaseflow/projections.hpp"
#include "phaseflow/stft.hpp"
#include "phaseflow/text.hpp"

namespace phaseflow {

enum class Algorithm { gla, fgla, agla, raar, dm };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::gla: return "gla";
    case Algorithm::fgla: return "fgla";
    case Algorithm::agla: return "agla";
    case Algorithm::raar: return "raar";
    case Algorithm::dm: return "dm";
  }
  return "?";
}

struct AlgorithmSpec {
  Algorithm algorithm = Algorithm::gla;
  double alpha = 0.0;   // FGLA momentum, >= 0
  double alpha1 = 0.0;  // AGLA inertia, > 0
  double alpha2 = 0.0;  // AGLA inertia, > 0
  double gamma = 0.0;   // AGLA mixing, > 0
  double beta = 0.0;    // RAAR (0,1] / DM != 0
  std::size_t iterations = 0;

  static AlgorithmSpec gla(std::size_t iterations) {
    AlgorithmSpec s;
    s.algorithm = Algorithm::gla;
    s.iterations = iterations;
    return s;
  }
  static AlgorithmSpec fgla(double alpha, std::size_t iterations) {
    AlgorithmSpec s;
    s.algorithm = Algorithm::fgla;
    s.alpha = alpha;
    s.iterations = iterations;
    s.check();
    return s;
  }
  static AlgorithmSpec agla(double alpha1, double alpha2, double gamma,
                            std::size_t iterations) {
    AlgorithmSpec s;
    s.algorithm = Algorithm::agla;
    s.alpha1 = alpha1;
    s.alpha2 = alpha2;
    s.gamma = gamma;
    s.iterations = iterations;
    s.check();
    return s;
  }
  static AlgorithmSpec raar(double beta, std::size_t iterations) {
    AlgorithmSpec s;
    s.algorithm = Algorithm::raar;
    s.beta = beta;
    s.iterations = iterations;
    s.check();
    return s;
  }
  static AlgorithmSpec dm(double beta, std::size_t iterations) {
    AlgorithmSpec s;
    s.algorithm = Algorithm::dm;
    s.beta = beta;
    s.iterations = iterations;
    s.check();
    return s;
  }

  void check() const {
    switch (algorithm) {
      case Algorithm::gla:
        break;
      case Algorithm::fgla:
        if (alpha < 0.0) throw invalid_parameter("fgla: alpha must be >= 0");
        break;
      case Algorithm::agla:
        if (alpha1 <= 0.0 || alpha2 <= 0.0 || gamma <= 0.0) {
          throw invalid_parameter("agla: alpha1, alpha2 and gamma must be > 0");
        }
        break;
      case Algorithm::raar:
        if (!(beta > 0.0 && beta <= 1.0)) {
          throw invalid_parameter("raar: beta must be in (0, 1]");
        }
        break;
      case Algorithm::dm:
        if (beta == 0.0) throw invalid_parameter("dm: beta must be nonzero");
        break;
    }
  }

  // Canonical text form of the tuning parameters, e.g. "beta=0.7".
  std::string params_text() const {
    switch (algorithm) {
      case Algorithm::gla: return "";
      case Algorithm::fgla: return "alpha=" + format_double(alpha);
      case Algorithm::agla:
        return "alpha1=" + format_double(alpha1) + ",alpha2=" + format_double(alpha2) +
               ",gamma=" + format_double(gamma);
      case Algorithm::raar:
      case Algorithm::dm: return "beta=" + format_double(beta);
    }
    return "";
  }
};

// Counts top-level projection applications; the difference-map needs twice
// as many per iteration as the others when |beta| != 1.
struct ProjectionCounter {
  std::uint64_t magnitude = 0;
  std::uint64_t consistency = 0;
};

// Per-run iteration state. `momentum` is the FGLA/AGLA auxiliary sequence,
// `momentum_aux` the second AGLA sequence; both start equal to the estimate.
struct IterState {
  Spectrogram estimate;
  std::optional<Spectrogram> momentum;
  std::optional<Spectrogram> momentum_aux;
  std::size_t iteration = 0;

  static IterState make(Spectrogram initial, Algorithm algorithm) {
    IterState st;
    if (algorithm == Algorithm::fgla || algorithm == Algorithm::agla) {
      st.momentum = initial;
    }
    if (algorithm == Algorithm::agla) st.momentum_aux = initial;
    st.estimate = std::move(initial);
    return st;
  }
};

namespace detail {

// out = a + s*(a - b), elementwise
inline Spectrogram extrapolate(const Spectrogram& a, const Spectrogram& b, double s) {
  Spectrogram out(a.bins(), a.frames());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.data()[i] = a.data()[i] + s * (a.data()[i] - b.data()[i]);
  }
  return out;
}

// Relaxed averaged alternating reflections update, shared by RAAR and the
// beta = 1 difference map (the two maps coincide there).
template <typename PA, typename PC>
void raar_update(IterState& st, double beta, PA&& pa, PC&& pc) {
  const Spectrogram pa_x = pa(st.estimate);
  Spectrogram ra(pa_x.bins(), pa_x.frames());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ra.data()[i] = 2.0 * pa_x.data()[i] - st.estimate.data()[i];
  }
  const Spectrogram pc_ra = pc(ra);
  Spectrogram next(ra.bins(), ra.frames());
  for (std::size_t i = 0; i < next.size(); ++i) {
    const cplx rc = 2.0 * pc_ra.data()[i] - ra.data()[i];
    next.data()[i] =
        0.5 * beta * (st.estimate.data()[i] + rc) + (1.0 - beta) * pa_x.data()[i];
  }
  st.estimate = std::move(next);
}

}  // namespace detail

// One iteration of the configured algorithm. `consistency` is any callable
// Spectrogram -> Spectrogram standing in for the consistency projection.
template <typename ConsistencyOp>
void algorithm_step(IterState& st, const MagnitudeSpectrogram& mag, const AlgorithmSpec& spec,
                    ConsistencyOp&& consistency, ProjectionCounter* counter = nullptr) {
  auto pa = [&](const Spectrogram& x) {
    if (counter) ++counter->magnitude;
    return proj_magnitude(x, mag);
  };
  auto pc = [&](const Spectrogram& x) {
    if (counter) ++counter->consistency;
    return consistency(x);
  };

  switch (spec.algorithm) {
    case Algorithm::gla: {
      st.estimate = pc(pa(st.estimate));
      break;
    }
    case Algorithm::fgla: {
      Spectrogram next = pc(pa(st.estimate));
      st.estimate = detail::extrapolate(next, *st.momentum, spec.alpha);
      *st.momentum = std::move(next);
      break;
    }
    case Algorithm::agla: {
      Spectrogram projected = pc(pa(st.estimate));
      Spectrogram next(projected.bins(), projected.frames());
      for (std::size_t i = 0; i < next.size(); ++i) {
        next.data()[i] = (1.0 - spec.gamma) * st.momentum_aux->data()[i] +
                         spec.gamma * projected.data()[i];
      }
      *st.momentum_aux = detail::extrapolate(next, *st.momentum, spec.alpha1);
      st.estimate = detail::extrapolate(next, *st.momentum, spec.alpha2);
      *st.momentum = std::move(next);
      break;
    }
    case Algorithm::raar: {
      detail::raar_update(st, spec.beta, pa, pc);
      break;
    }
    case Algorithm::dm: {
      if (spec.beta == 1.0) {
        // f_C degenerates to the identity and f_A to the plain reflection;
        // the map coincides with beta = 1 RAAR, so run exactly that.
        detail::raar_update(st, 1.0, pa, pc);
        break;
      }

      const Spectrogram pa_x = pa(st.estimate);
      Spectrogram fa(pa_x.bins(), pa_x.frames());
      for (std::size_t i = 0; i < fa.size(); ++i) {
        fa.data()[i] = pa_x.data()[i] + (pa_x.data()[i] - st.estimate.data()[i]) / spec.beta;
      }
      const Spectrogram pc_fa = pc(fa);

      const Spectrogram pc_x = pc(st.estimate);
      Spectrogram fc(pc_x.bins(), pc_x.frames());
      for (std::size_t i = 0; i < fc.size(); ++i) {
        fc.data()[i] = pc_x.data()[i] - (pc_x.data()[i] - st.estimate.data()[i]) / spec.beta;
      }
      const Spectrogram pa_fc = pa(fc);

      for (std::size_t i = 0; i < st.estimate.size(); ++i) {
        st.estimate.data()[i] += spec.beta * (pc_fa.data()[i] - pa_fc.data()[i]);
      }
      break;
    }
  }
  ++st.iteration;
}

// ---- offline single-step wrappers ----

namespace detail {

inline auto offline_consistency(const StftConfig& cfg) {
  return [&cfg](const Spectrogram& x) { return proj_consistency(x, cfg); };
}

}  // namespace detail

inline void step_gla(IterState& st, const MagnitudeSpectrogram& mag, const StftConfig& cfg) {
  algorithm_step(st, mag, AlgorithmSpec::gla(1), detail::offline_consistency(cfg));
}

inline void step_fgla(IterState& st, const MagnitudeSpectrogram& mag, const StftConfig& cfg,
                      double alpha) {
  algorithm_step(st, mag, AlgorithmSpec::fgla(alpha, 1), detail::offline_consistency(cfg));
}

inline void step_agla(IterState& st, const MagnitudeSpectrogram& mag, const StftConfig& cfg,
                      double alpha1, double alpha2, double gamma) {
  algorithm_step(st, mag, AlgorithmSpec::agla(alpha1, alpha2, gamma, 1),
                 detail::offline_consistency(cfg));
}

inline void step_raar(IterState& st, const MagnitudeSpectrogram& mag, const StftConfig& cfg,
                      double beta) {
  algorithm_step(st, mag, AlgorithmSpec::raar(beta, 1), detail::offline_consistency(cfg));
}

inline void step_dm(IterState& st, const MagnitudeSpectrogram& mag, const StftConfig& cfg,
                    double beta) {
  algorithm_step(st, mag, AlgorithmSpec::dm(beta, 1), detail::offline_consistency(cfg));
}

// ---- whole-spectrogram driver ----

struct OfflineResult {
  Spectrogram spectrogram;       // p_A-projected final iterate
  std::vector<double> signal;    // istft of the above, stft()-aligned
  std::vector<double> sc_trace;  // SC of p_C(p_A(X^i)) after each iteration
  ProjectionCounter projections;
};

inline OfflineResult run_offline(const MagnitudeSpectrogram& mag, const StftConfig& cfg,
                                 const AlgorithmSpec& spec,
                                 const Spectrogram* initial = nullptr) {
  validate(cfg);
  spec.check();
  if (initial && (initial->bins() != mag.bins() || initial->frames() != mag.frames())) {
    throw invalid_input("initialization dimensions do not match the magnitude");
  }

  OfflineResult result;
  IterState st = IterState::make(initial ? *initial : from_magnitude(mag), spec.algorithm);
  auto pc = detail::offline_consistency(cfg);

  bool zero_target = true;
  for (double v : mag.data()) {
    if (v != 0.0) {
      zero_target = false;
      break;
    }
  }

  result.sc_trace.reserve(spec.iterations);
  for (std::size_t i = 0; i < spec.iterations; ++i) {
    algorithm_step(st, mag, spec, pc, &result.projections);
    // Trace SC against a realizable (consistent) spectrogram; these
    // projections bypass the counter so algorithm costs stay comparable.
    result.sc_trace.push_back(
        zero_target ? 0.0
                    : spectral_convergence(
                          mag, proj_consistency(proj_magnitude(st.estimate, mag), cfg)));
  }

  result.spectrogram = proj_magnitude(st.estimate, mag);
  result.signal = istft(result.spectrogram, cfg);
  return result;
}

}  // namespace phaseflow
