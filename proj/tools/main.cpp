// phaseflow command-line tool: analyze WAVs into magnitude spectrograms,
// reconstruct signals offline or frame-by-frame, score reconstructions, and
// run parameter sweeps over a corpus.
//
// Exit codes: 0 success, 2 usage/validation problems, 1 unexpected runtime
// failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "phaseflow/phaseflow.hpp"

namespace fs = std::filesystem;
using namespace phaseflow;

namespace {

// ---- shared option bundles ----

struct StftOptions {
  std::size_t frame = 512;
  std::size_t hop = 128;
  double frame_ms = 0.0;  // at the sample rate, overrides --frame when set
  double hop_ms = 0.0;
  std::uint32_t rate = 0;  // expected rate; 0 = take it from the input
  std::string window = "hann";

  void attach(CLI::App* cmd) {
    cmd->add_option("--frame", frame, "Frame length in samples");
    cmd->add_option("--hop", hop, "Hop (frame shift) in samples");
    cmd->add_option("--frame-ms", frame_ms, "Frame length in milliseconds");
    cmd->add_option("--hop-ms", hop_ms, "Hop in milliseconds");
    cmd->add_option("--rate", rate, "Expected sample rate in Hz");
    cmd->add_option("--window", window, "Window function: hann or rect")
        ->check(CLI::IsMember({"hann", "rect"}));
  }

  WindowKind window_kind() const {
    return window == "rect" ? WindowKind::rectangular : WindowKind::hann;
  }

  StftConfig resolve(std::uint32_t input_rate) const {
    std::uint32_t effective = rate != 0 ? rate : input_rate;
    if (rate != 0 && input_rate != 0 && rate != input_rate) {
      throw invalid_input("--rate " + std::to_string(rate) +
                          " does not match the input sample rate " +
                          std::to_string(input_rate));
    }
    if (effective == 0) throw invalid_input("sample rate unknown; pass --rate");
    std::size_t n = frame;
    std::size_t h = hop;
    if (frame_ms > 0.0) n = static_cast<std::size_t>(frame_ms * effective / 1000.0 + 0.5);
    if (hop_ms > 0.0) h = static_cast<std::size_t>(hop_ms * effective / 1000.0 + 0.5);
    return make_stft_config(n, h, window_kind(), effective);
  }
};

struct AlgoOptions {
  std::string algo = "gla";
  std::size_t iterations = 10;
  double alpha = -1.0;
  double alpha1 = -1.0;
  double alpha2 = -1.0;
  double gamma = -1.0;
  double beta = std::numeric_limits<double>::quiet_NaN();
  std::string preset;

  void attach(CLI::App* cmd) {
    cmd->add_option("--algo", algo, "Algorithm: gla, fgla, agla, raar or dm")
        ->check(CLI::IsMember({"gla", "fgla", "agla", "raar", "dm"}));
    cmd->add_option("--iters", iterations,
                    "Iterations per run (offline) or per frame (online)");
    cmd->add_option("--alpha", alpha, "fgla momentum");
    cmd->add_option("--alpha1", alpha1, "agla first inertia weight");
    cmd->add_option("--alpha2", alpha2, "agla second inertia weight");
    cmd->add_option("--gamma", gamma, "agla mixing weight");
    cmd->add_option("--beta", beta, "raar/dm relaxation");
    cmd->add_option("--preset", preset,
                    "Parameter preset: table1-b0 (no look-ahead) or table1-la")
        ->check(CLI::IsMember({"table1-b0", "table1-la"}));
  }

  // Preset values; explicit flags win over the preset.
  AlgorithmSpec resolve() const {
    const bool la = preset == "table1-la";
    Algorithm a = Algorithm::gla;
    if (algo == "fgla") a = Algorithm::fgla;
    else if (algo == "agla") a = Algorithm::agla;
    else if (algo == "raar") a = Algorithm::raar;
    else if (algo == "dm") a = Algorithm::dm;

    switch (a) {
      case Algorithm::gla: return AlgorithmSpec::gla(iterations);
      case Algorithm::fgla: {
        double v = alpha >= 0.0 ? alpha : (la ? 0.8 : 0.99);
        return AlgorithmSpec::fgla(v, iterations);
      }
      case Algorithm::agla: {
        double a1 = alpha1 > 0.0 ? alpha1 : 0.95;
        double a2 = alpha2 > 0.0 ? alpha2 : 0.99;
        double g = gamma > 0.0 ? gamma : 1.2;
        return AlgorithmSpec::agla(a1, a2, g, iterations);
      }
      case Algorithm::raar: {
        double v = !std::isnan(beta) ? beta : (la ? 0.7 : 0.99);
        return AlgorithmSpec::raar(v, iterations);
      }
      case Algorithm::dm: {
        double v = !std::isnan(beta) ? beta : (la ? 0.5 : 1.5);
        return AlgorithmSpec::dm(v, iterations);
      }
    }
    throw invalid_parameter("unknown algorithm");
  }
};

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open file for writing: " + path.string());
  out << text;
  if (!out) throw io_error("write failed: " + path.string());
}

// Runs `scorer ref rec` and parses the first floating-point token printed.
std::optional<double> run_external_scorer(const std::string& scorer, const fs::path& ref,
                                          const fs::path& rec) {
  auto quote = [](const std::string& s) {
    std::string q = "'";
    for (char c : s) {
      if (c == '\'') q += "'\\''";
      else q += c;
    }
    q += "'";
    return q;
  };
  const std::string cmd =
      quote(scorer) + " " + quote(ref.string()) + " " + quote(rec.string()) + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw io_error("cannot launch external scorer: " + scorer);
  std::string output;
  char buf[256];
  while (std::fgets(buf, sizeof(buf), pipe)) output += buf;
  const int status = pclose(pipe);
  if (status != 0) throw io_error("external scorer failed: " + scorer);
  std::istringstream in(output);
  double value = 0.0;
  if (in >> value) return value;
  return std::nullopt;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::string in, out;
  StftOptions stft_opts;
};

void cmd_analyze(const AnalyzeArgs& args) {
  auto wav = read_wav(args.in);
  if (wav.samples.empty()) throw invalid_input("input file holds no samples");
  auto cfg = args.stft_opts.resolve(wav.sample_rate);

  auto spec = stft(wav.samples, cfg);
  auto mag = magnitude(spec);

  SpecFileHeader h;
  h.frame_len = static_cast<std::uint32_t>(cfg.frame_len);
  h.hop = static_cast<std::uint32_t>(cfg.hop);
  h.bins = static_cast<std::uint32_t>(mag.bins());
  h.frames = static_cast<std::uint32_t>(mag.frames());
  h.sample_rate = cfg.sample_rate;
  h.window = args.stft_opts.window_kind();
  h.payload = SpecPayload::magnitude;
  write_specfile(args.out, h, &mag, nullptr);

  std::cout << "wrote " << args.out << ": " << mag.bins() << " bins x " << mag.frames()
            << " frames (N=" << cfg.frame_len << ", H=" << cfg.hop << ", rate "
            << cfg.sample_rate << ")\n";
}

// ---- reconstruct ----

struct ReconstructArgs {
  std::string in, out, trace;
  std::string mode = "offline";
  std::size_t lookahead = 0;
  AlgoOptions algo_opts;
};

void cmd_reconstruct(const ReconstructArgs& args) {
  // validate all parameters before touching the input
  auto spec = args.algo_opts.resolve();
  spec.check();

  auto file = read_specfile(args.in);
  auto cfg = file.header.to_config();
  MagnitudeSpectrogram mag =
      file.magnitude ? std::move(*file.magnitude) : magnitude(*file.complex_data);

  std::vector<double> signal;
  std::string trace_csv;
  if (args.mode == "offline") {
    auto result = run_offline(mag, cfg, spec);
    signal = std::move(result.signal);
    trace_csv = "iteration,sc\n";
    for (std::size_t i = 0; i < result.sc_trace.size(); ++i) {
      trace_csv += std::to_string(i + 1) + "," + format_double(result.sc_trace[i]) + "\n";
    }
  } else {
    auto result = stream_reconstruct(mag, cfg, spec, args.lookahead);
    signal = std::move(result.signal);
    trace_csv = "frame,sc\n";
    for (std::size_t i = 0; i < result.per_frame_sc.size(); ++i) {
      trace_csv += std::to_string(i) + "," + format_double(result.per_frame_sc[i]) + "\n";
    }
  }

  AudioBuffer buf;
  buf.sample_rate = cfg.sample_rate;
  buf.samples = std::move(signal);
  write_wav(args.out, buf);
  if (!args.trace.empty()) write_text_file(args.trace, trace_csv);

  std::cout << "wrote " << args.out << ": " << buf.samples.size() << " samples ("
            << to_string(spec.algorithm)
            << (spec.params_text().empty() ? "" : " " + spec.params_text()) << ", "
            << args.mode << ", I=" << spec.iterations;
  if (args.mode == "online") std::cout << ", B=" << args.lookahead;
  std::cout << ")\n";
}

// ---- eval ----

struct EvalArgs {
  std::string ref, rec, scorer;
  StftOptions stft_opts;
};

void cmd_eval(const EvalArgs& args) {
  auto ref = read_wav(args.ref);
  auto rec = read_wav(args.rec);
  if (ref.sample_rate != rec.sample_rate) {
    throw invalid_input("sample rates differ between the two files");
  }
  auto cfg = args.stft_opts.resolve(ref.sample_rate);

  const std::size_t common = std::min(ref.samples.size(), rec.samples.size());
  if (common == 0) throw invalid_input("empty audio input");
  std::vector<double> a(ref.samples.begin(), ref.samples.begin() + common);
  std::vector<double> b(rec.samples.begin(), rec.samples.begin() + common);

  auto target = magnitude(stft(a, cfg));
  const double sc = spectral_convergence_signal(target, b, cfg);

  std::optional<double> external;
  if (!args.scorer.empty()) external = run_external_scorer(args.scorer, args.ref, args.rec);

  std::cout << "ref,rec,sc,external_score\n";
  std::cout << args.ref << "," << args.rec << "," << format_double(sc) << ","
            << (external ? format_double(*external) : "") << "\n";
}

// ---- synth ----

struct SynthArgs {
  std::string kind = "sine";
  std::string out;
  double freq = 440.0;
  double freq_end = 4000.0;
  double seconds = 1.0;
  std::uint32_t rate = 16000;
  std::uint64_t seed = 0;
  double amplitude = 0.8;
};

void cmd_synth(const SynthArgs& args) {
  std::vector<double> x;
  if (args.kind == "sine") {
    x = synth_sine(args.freq, args.seconds, args.rate, args.amplitude);
  } else if (args.kind == "tones") {
    x = synth_tones(args.freq, args.seconds, args.rate, args.amplitude);
  } else if (args.kind == "chirp") {
    x = synth_chirp(args.freq, args.freq_end, args.seconds, args.rate, args.amplitude);
  } else {
    x = synth_speechlike(args.seconds, args.rate, args.seed, args.amplitude);
  }
  if (!corpus_signal_valid(x)) throw invalid_input("generated signal failed validity checks");

  AudioBuffer buf;
  buf.sample_rate = args.rate;
  buf.samples = std::move(x);
  write_wav(args.out, buf);
  std::cout << "wrote " << args.out << ": " << buf.samples.size() << " samples\n";
}

// ---- sweep ----

struct SweepArgs {
  std::string corpus, out, scorer;
  std::vector<std::string> algos{"gla", "fgla", "agla", "raar", "dm"};
  std::vector<double> betas;    // raar/dm grid; empty = per-B preset
  std::vector<double> alphas;   // fgla grid; empty = per-B preset
  std::vector<std::size_t> lookaheads{0};
  std::vector<std::size_t> iters{1};
  std::size_t threads = 0;
  bool resume = false;
  StftOptions stft_opts;
};

struct GridPoint {
  AlgorithmSpec spec;
  std::size_t lookahead = 0;
};

std::vector<GridPoint> build_grid(const SweepArgs& args) {
  std::vector<GridPoint> grid;
  for (const auto& name : args.algos) {
    for (std::size_t lookahead : args.lookaheads) {
      const bool la = lookahead > 0;
      std::vector<AlgorithmSpec> specs;
      if (name == "gla") {
        specs.push_back(AlgorithmSpec::gla(1));
      } else if (name == "fgla") {
        if (args.alphas.empty()) {
          specs.push_back(AlgorithmSpec::fgla(la ? 0.8 : 0.99, 1));
        } else {
          for (double a : args.alphas) specs.push_back(AlgorithmSpec::fgla(a, 1));
        }
      } else if (name == "agla") {
        specs.push_back(AlgorithmSpec::agla(0.95, 0.99, 1.2, 1));
      } else if (name == "raar") {
        if (args.betas.empty()) {
          specs.push_back(AlgorithmSpec::raar(la ? 0.7 : 0.99, 1));
        } else {
          for (double b : args.betas) specs.push_back(AlgorithmSpec::raar(b, 1));
        }
      } else if (name == "dm") {
        if (args.betas.empty()) {
          specs.push_back(AlgorithmSpec::dm(la ? 0.5 : 1.5, 1));
        } else {
          for (double b : args.betas) specs.push_back(AlgorithmSpec::dm(b, 1));
        }
      } else {
        throw invalid_parameter("unknown algorithm in --algos: " + name);
      }
      for (auto spec : specs) {
        for (std::size_t it : args.iters) {
          spec.iterations = it;
          spec.check();
          grid.push_back({spec, lookahead});
        }
      }
    }
  }
  return grid;
}

void cmd_sweep(const SweepArgs& args) {
  std::vector<fs::path> files;
  if (fs::is_directory(args.corpus)) {
    for (const auto& entry : fs::directory_iterator(args.corpus)) {
      if (entry.is_regular_file() && entry.path().extension() == ".wav") {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw invalid_input("corpus directory holds no .wav files");

  const auto grid = build_grid(args);

  // one work unit per (grid point, file)
  struct Unit {
    std::size_t point;
    std::size_t file;
  };
  std::vector<Unit> units;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (std::size_t f = 0; f < files.size(); ++f) units.push_back({p, f});
  }

  auto unit_key = [&](const Unit& u) {
    const auto& g = grid[u.point];
    return files[u.file].filename().string() + "|" + to_string(g.spec.algorithm) + "|" +
           g.spec.params_text() + "|" + std::to_string(g.lookahead) + "|" +
           std::to_string(g.spec.iterations);
  };

  // resume support: completed rows live in <out>.ckpt as key\trow lines
  const fs::path ckpt_path = args.out + ".ckpt";
  std::map<std::string, std::string> done;
  if (args.resume && fs::exists(ckpt_path)) {
    std::ifstream in(ckpt_path);
    std::string line;
    while (std::getline(in, line)) {
      const auto tab = line.find('\t');
      if (tab != std::string::npos) done[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }

  std::vector<std::string> rows(units.size());
  std::ofstream ckpt(ckpt_path, args.resume ? std::ios::app : std::ios::trunc);
  std::mutex ckpt_mutex;

  std::size_t pool = args.threads;
  if (pool == 0) {
    if (const char* env = std::getenv("PHASEFLOW_THREADS")) {
      pool = static_cast<std::size_t>(std::strtoul(env, nullptr, 10));
    }
  }
  if (pool == 0) pool = std::max(1u, std::thread::hardware_concurrency());
  pool = std::min(pool, units.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= units.size() || failed.load()) return;
      const Unit u = units[i];
      const auto key = unit_key(u);
      if (auto it = done.find(key); it != done.end()) {
        rows[i] = it->second;
        continue;
      }
      try {
        const auto& g = grid[u.point];
        auto wav = read_wav(files[u.file]);
        auto cfg = args.stft_opts.resolve(wav.sample_rate);

        const auto t0 = std::chrono::steady_clock::now();
        auto mag = magnitude(stft(wav.samples, cfg));
        auto result = stream_reconstruct(mag, cfg, g.spec, g.lookahead);
        const double sc = spectral_convergence_signal(mag, result.signal, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        std::string external;
        if (!args.scorer.empty()) {
          const fs::path tmp =
              fs::temp_directory_path() /
              ("phaseflow_sweep_" + std::to_string(u.point) + "_" +
               std::to_string(u.file) + ".wav");
          AudioBuffer out_buf;
          out_buf.sample_rate = cfg.sample_rate;
          out_buf.samples = result.signal;
          write_wav(tmp, out_buf);
          if (auto score = run_external_scorer(args.scorer, files[u.file], tmp)) {
            external = format_double(*score);
          }
          fs::remove(tmp);
        }

        std::string row = files[u.file].filename().string();
        row += ",";
        row += to_string(g.spec.algorithm);
        row += "," + g.spec.params_text();
        row += "," + std::to_string(g.lookahead);
        row += "," + std::to_string(g.spec.iterations);
        row += "," + format_double(sc);
        row += "," + external;
        row += "," + format_double(ms);
        rows[i] = row;

        std::lock_guard<std::mutex> lock(ckpt_mutex);
        ckpt << key << "\t" << row << "\n" << std::flush;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) first_error = e.what();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failed.load()) throw error("sweep failed: " + first_error);

  // assemble: per point, its file rows then a MEAN row
  std::string csv = "file,algorithm,params,B,iterations,sc,external_score,wall_time_ms\n";
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double sc_sum = 0.0, ms_sum = 0.0, ext_sum = 0.0;
    std::size_t ext_count = 0;
    for (std::size_t f = 0; f < files.size(); ++f) {
      const auto& row = rows[p * files.size() + f];
      csv += row + "\n";
      std::vector<std::string> cols;
      std::stringstream ss(row);
      std::string col;
      while (std::getline(ss, col, ',')) cols.push_back(col);
      // agla's params carry commas, so index the fixed columns from the right
      const std::size_t n = cols.size();
      sc_sum += std::strtod(cols[n - 3].c_str(), nullptr);
      ms_sum += std::strtod(cols[n - 1].c_str(), nullptr);
      if (!cols[n - 2].empty()) {
        ext_sum += std::strtod(cols[n - 2].c_str(), nullptr);
        ++ext_count;
      }
    }
    const auto& gp = grid[p];
    csv += "MEAN," + std::string(to_string(gp.spec.algorithm)) + "," +
           gp.spec.params_text() + "," + std::to_string(gp.lookahead) + "," +
           std::to_string(gp.spec.iterations) + "," +
           format_double(sc_sum / double(files.size())) + "," +
           (ext_count == files.size() ? format_double(ext_sum / double(files.size())) : "") +
           "," + format_double(ms_sum / double(files.size())) + "\n";
  }
  write_text_file(args.out, csv);
  ckpt.close();
  fs::remove(ckpt_path);
  std::cout << "wrote " << args.out << ": " << grid.size() << " grid points x "
            << files.size() << " files\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phaseflow: STFT phase retrieval, offline and frame-by-frame"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "WAV -> magnitude spectrogram file");
  analyze->add_option("--in", analyze_args.in, "Input WAV")->required();
  analyze->add_option("--out", analyze_args.out, "Output spectrogram file")->required();
  analyze_args.stft_opts.attach(analyze);

  ReconstructArgs rec_args;
  auto* reconstruct = app.add_subcommand("reconstruct", "Spectrogram file -> WAV");
  reconstruct->add_option("--in", rec_args.in, "Input spectrogram file")->required();
  reconstruct->add_option("--out", rec_args.out, "Output WAV")->required();
  reconstruct->add_option("--mode", rec_args.mode, "offline or online")
      ->check(CLI::IsMember({"offline", "online"}));
  reconstruct->add_option("-B,--lookahead", rec_args.lookahead,
                          "Look-ahead frames (online mode)");
  reconstruct->add_option("--trace", rec_args.trace,
                          "Write per-iteration (offline) or per-frame (online) SC CSV");
  rec_args.algo_opts.attach(reconstruct);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Spectral convergence between two WAVs");
  eval->add_option("--ref", eval_args.ref, "Reference WAV")->required();
  eval->add_option("--rec", eval_args.rec, "Reconstructed WAV")->required();
  eval->add_option("--external-scorer", eval_args.scorer,
                   "Executable scoring `ref rec`; its stdout number is recorded");
  eval_args.stft_opts.attach(eval);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate deterministic test signals");
  synth->add_option("--kind", synth_args.kind, "sine, tones, chirp or speechlike")
      ->check(CLI::IsMember({"sine", "tones", "chirp", "speechlike"}));
  synth->add_option("--out", synth_args.out, "Output WAV")->required();
  synth->add_option("--freq", synth_args.freq, "Frequency in Hz (sine/tones/chirp start)");
  synth->add_option("--freq-end", synth_args.freq_end, "Chirp end frequency in Hz");
  synth->add_option("--seconds", synth_args.seconds, "Duration in seconds");
  synth->add_option("--rate", synth_args.rate, "Sample rate in Hz");
  synth->add_option("--seed", synth_args.seed, "Random seed (speechlike)");
  synth->add_option("--amplitude", synth_args.amplitude, "Peak amplitude");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Grid evaluation over a WAV corpus");
  sweep->add_option("--corpus", sweep_args.corpus, "Directory of WAV files")->required();
  sweep->add_option("--out", sweep_args.out, "Output CSV")->required();
  sweep->add_option("--algos", sweep_args.algos, "Algorithms to run")->delimiter(',');
  sweep->add_option("--betas", sweep_args.betas, "raar/dm relaxation grid")->delimiter(',');
  sweep->add_option("--alphas", sweep_args.alphas, "fgla momentum grid")->delimiter(',');
  sweep->add_option("--lookaheads", sweep_args.lookaheads, "Look-ahead values")
      ->delimiter(',');
  sweep->add_option("--iters", sweep_args.iters, "Per-frame iteration budgets")
      ->delimiter(',');
  sweep->add_option("--threads", sweep_args.threads,
                    "Worker pool size (default: PHASEFLOW_THREADS or CPU count)");
  sweep->add_flag("--resume", sweep_args.resume, "Reuse completed rows from the checkpoint");
  sweep->add_option("--external-scorer", sweep_args.scorer,
                    "Executable scoring `ref rec` per reconstruction");
  sweep_args.stft_opts.attach(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (analyze->parsed()) cmd_analyze(analyze_args);
    else if (reconstruct->parsed()) cmd_reconstruct(rec_args);
    else if (eval->parsed()) cmd_eval(eval_args);
    else if (synth->parsed()) cmd_synth(synth_args);
    else if (sweep->parsed()) cmd_sweep(sweep_args);
  } catch (const phaseflow::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
