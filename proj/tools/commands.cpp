#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <vector>

#include <CLI11.hpp>

#include "neckflex/biomech.hpp"
#include "neckflex/config.hpp"
#include "neckflex/csv.hpp"
#include "neckflex/emg.hpp"
#include "neckflex/errors.hpp"
#include "neckflex/fitlab.hpp"
#include "neckflex/mechanism.hpp"
#include "neckflex/protocol.hpp"
#include "neckflex/signal.hpp"
#include "neckflex/stats.hpp"

namespace neckflex::cli {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ToolkitConfig load_or_default(const GlobalOptions& global) {
  if (global.config_path.empty()) return {};
  return load_config(global.config_path);
}

std::filesystem::path out_file(const GlobalOptions& global,
                               const std::string& name) {
  std::filesystem::create_directories(global.out);
  return global.out / name;
}

// "inf" for the free plate, otherwise millimetres.
double parse_gap_mm(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("--delta expects millimetres or 'inf', got '" +
                                text + "'");
  }
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    out[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
  }
  return out;
}

// --- tiny SVG line plot ---------------------------------------------------

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<Series>& series) {
  const double width = 640, height = 420;
  const double ml = 64, mr = 16, mt = 36, mb = 48;

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  const double xpad = 0.02 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  auto py = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  std::ofstream svg(path);
  if (!svg) throw ParseError("cannot write " + path.string());
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "' viewBox='0 0 " << width << ' ' << height
      << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << width / 2 << "' y='20' text-anchor='middle' "
      << "font-family='sans-serif' font-size='14'>" << title << "</text>\n";

  // frame and ticks
  svg << "<rect x='" << ml << "' y='" << mt << "' width='" << width - ml - mr
      << "' height='" << height - mt - mb
      << "' fill='none' stroke='black' stroke-width='1'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    svg << "<line x1='" << px(fx) << "' y1='" << height - mb << "' x2='"
        << px(fx) << "' y2='" << height - mb + 5
        << "' stroke='black' stroke-width='1'/>\n";
    svg << "<text x='" << px(fx) << "' y='" << height - mb + 18
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
        << fmt(fx) << "</text>\n";
    svg << "<line x1='" << ml - 5 << "' y1='" << py(fy) << "' x2='" << ml
        << "' y2='" << py(fy) << "' stroke='black' stroke-width='1'/>\n";
    svg << "<text x='" << ml - 8 << "' y='" << py(fy) + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
        << fmt(fy) << "</text>\n";
  }
  svg << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
      << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
      << xlabel << "</text>\n";
  svg << "<text x='16' y='" << (mt + height - mb) / 2
      << "' text-anchor='middle' font-family='sans-serif' font-size='12' "
      << "transform='rotate(-90 16 " << (mt + height - mb) / 2 << ")'>"
      << ylabel << "</text>\n";

  double legend_y = mt + 16;
  for (const auto& s : series) {
    svg << "<polyline fill='none' stroke='" << s.color
        << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    svg << "'/>\n";
    if (!s.label.empty()) {
      svg << "<line x1='" << width - mr - 130 << "' y1='" << legend_y
          << "' x2='" << width - mr - 106 << "' y2='" << legend_y
          << "' stroke='" << s.color << "' stroke-width='1.5'/>\n";
      svg << "<text x='" << width - mr - 100 << "' y='" << legend_y + 4
          << "' font-family='sans-serif' font-size='11'>" << s.label
          << "</text>\n";
      legend_y += 16;
    }
  }
  svg << "</svg>\n";
}

// --- simulate-bending -------------------------------------------------------

struct SimulateOptions {
  std::string delta = "inf";
  double theta_max_deg = 85;
  int steps = 171;
  bool plot = false;
};

void run_simulate(const GlobalOptions& global, const SimulateOptions& opt) {
  if (!(opt.theta_max_deg > 0) || opt.theta_max_deg > 85) {
    throw std::invalid_argument("--theta-max must lie in (0, 85] degrees");
  }
  if (opt.steps < 2) throw std::invalid_argument("--steps must be at least 2");

  ToolkitConfig cfg = load_or_default(global);
  BarArraySpec spec = cfg.bar_array;
  const double delta_mm = parse_gap_mm(opt.delta);
  spec.gap = std::isinf(delta_mm) ? delta_mm : delta_mm * 1e-3;

  const auto thetas = linspace(0.0, opt.theta_max_deg * kDeg, opt.steps);
  const auto curve = moment_curve(spec, thetas);

  CsvTable table;
  table.header = {"theta_rad", "theta_deg", "moment_nm", "branch"};
  for (const auto& s : curve.samples) {
    table.rows.push_back({format_double(s.theta), format_double(s.theta / kDeg),
                          format_double(s.moment),
                          s.branch == Branch::pre ? "pre" : "post"});
  }
  const auto csv_path = out_file(global, "bending_moments.csv");
  write_csv(csv_path, table);

  if (curve.transition) {
    std::cout << "transition at " << *curve.transition << " rad ("
              << *curve.transition / kDeg << " deg)\n";
  } else if (std::isinf(spec.gap)) {
    std::cout << "no transition: free plate, base stiffness throughout\n";
  } else {
    std::cout << "no transition inside the sweep\n";
  }
  if (curve.preload_moment != 0) {
    std::cout << "preload moment " << curve.preload_moment << " N*m\n";
  }
  std::cout << "wrote " << csv_path.string() << '\n';

  if (opt.plot) {
    Series s{"M(theta)", {}, {}, "#1f77b4"};
    for (const auto& p : curve.samples) {
      s.x.push_back(p.theta / kDeg);
      s.y.push_back(p.moment);
    }
    const auto svg_path = out_file(global, "bending.svg");
    write_svg_plot(svg_path, "Base bending moment", "bend angle, deg",
                   "moment, N*m", {s});
    std::cout << "wrote " << svg_path.string() << '\n';
  }
}

// --- ideal-moment -----------------------------------------------------------

struct IdealOptions {
  double theta_max_deg = 60;
  int steps = 121;
  bool plot = false;
};

void run_ideal(const GlobalOptions& global, const IdealOptions& opt) {
  if (!(opt.theta_max_deg > 0) || opt.theta_max_deg > 85) {
    throw std::invalid_argument("--theta-max must lie in (0, 85] degrees");
  }
  if (opt.steps < 2) throw std::invalid_argument("--steps must be at least 2");

  ToolkitConfig cfg = load_or_default(global);
  const auto thetas = linspace(0.0, opt.theta_max_deg * kDeg, opt.steps);

  std::vector<HeadStatics> sweep;
  sweep.reserve(thetas.size());
  for (double t : thetas) {
    HeadStatics s = cfg.statics;
    s.inclination = t;
    sweep.push_back(s);
  }

  const auto curve = moment_curve(cfg.bar_array, thetas);
  const auto assist = assist_fraction(curve, sweep);

  CsvTable table;
  table.header = {"theta_rad",  "theta_deg", "gravity_nm",      "base_force_nm",
                  "ideal_nm",   "device_nm", "assist_fraction", "excluded"};
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const auto& s = sweep[i];
    const double ideal = ideal_base_moment(s);
    table.rows.push_back(
        {format_double(thetas[i]), format_double(thetas[i] / kDeg),
         format_double(gravity_moment(s)), format_double(base_force_moment(s)),
         format_double(ideal), format_double(curve.samples[i].moment),
         assist.samples[i].excluded ? "" : format_double(assist.samples[i].fraction),
         assist.samples[i].excluded ? "1" : "0"});
  }
  const auto csv_path = out_file(global, "ideal_moment.csv");
  write_csv(csv_path, table);

  std::cout << "peak assist fraction " << assist.peak << " at "
            << assist.peak_theta / kDeg << " deg";
  if (assist.excluded_count > 0) {
    std::cout << " (" << assist.excluded_count << " samples excluded)";
  }
  std::cout << '\n' << "wrote " << csv_path.string() << '\n';

  if (opt.plot) {
    Series ideal{"ideal", {}, {}, "#d62728"};
    Series device{"device", {}, {}, "#1f77b4"};
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      ideal.x.push_back(thetas[i] / kDeg);
      ideal.y.push_back(ideal_base_moment(sweep[i]));
      device.x.push_back(thetas[i] / kDeg);
      device.y.push_back(curve.samples[i].moment);
    }
    const auto svg_path = out_file(global, "ideal_moment.svg");
    write_svg_plot(svg_path, "Ideal vs device base moment", "inclination, deg",
                   "moment, N*m", {ideal, device});
    std::cout << "wrote " << svg_path.string() << '\n';
  }
}

// --- fit ---------------------------------------------------------------------

struct FitOptions {
  std::string bend_test;
  double load_height = 0;
};

void run_fit(const GlobalOptions& global, const FitOptions& opt) {
  if (!(opt.load_height > 0)) {
    throw std::invalid_argument("--load-height must be positive metres");
  }
  ToolkitConfig cfg = load_or_default(global);
  const auto trace = read_bend_csv(opt.bend_test);
  const auto fit =
      fit_parameters(trace, opt.load_height, cfg.bar_array.free_length);

  std::cout << "rigidity pre " << fit.stiffness_pre << " N*m^2, post "
            << fit.stiffness_post << " N*m^2\n";
  if (fit.transition) {
    std::cout << "transition at " << *fit.transition << " rad ("
              << *fit.transition / kDeg << " deg)\n";
  } else {
    std::cout << "no transition detected\n";
  }
  std::cout << "friction " << fit.friction << " N*m, residual rms "
            << fit.residual_rms << " N*m\n";

  CsvTable table;
  table.header = {"stiffness_pre_nm2", "stiffness_post_nm2", "transition_rad",
                  "friction_nm", "residual_rms_nm"};
  table.rows.push_back(
      {format_double(fit.stiffness_pre), format_double(fit.stiffness_post),
       fit.transition ? format_double(*fit.transition) : "",
       format_double(fit.friction), format_double(fit.residual_rms)});
  const auto csv_path = out_file(global, "fit.csv");
  write_csv(csv_path, table);
  std::cout << "wrote " << csv_path.string() << '\n';
}

// --- emg-process --------------------------------------------------------------

struct EmgOptions {
  std::vector<std::string> participant, condition, emg, kin, plan;
};

void run_emg_process(const GlobalOptions& global, const EmgOptions& opt) {
  const std::size_t n = opt.participant.size();
  if (n == 0) throw std::invalid_argument("at least one session is required");
  if (opt.condition.size() != n || opt.emg.size() != n || opt.kin.size() != n ||
      opt.plan.size() != n) {
    throw std::invalid_argument(
        "--participant, --condition, --emg, --kin and --plan must be given "
        "once per session");
  }
  for (const auto& c : opt.condition) {
    if (c != "base" && c != "loaded") {
      throw std::invalid_argument("--condition must be 'base' or 'loaded'");
    }
  }

  ToolkitConfig cfg = load_or_default(global);
  std::vector<SessionRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    const auto kin = read_trace_csv(opt.kin[i]);
    const auto plan = read_plan_csv(opt.plan[i]);
    const auto seg = segment(kin, plan, cfg.segmentation);

    const auto raw = read_trace_csv(opt.emg[i]);
    EnvelopeParams env_params = cfg.envelope;
    env_params.sample_rate = raw.sample_rate;
    const auto env = preprocess(raw, env_params);

    records.push_back(
        make_session_record(opt.participant[i], opt.condition[i], env, seg));
    std::cout << "session " << opt.participant[i] << '/' << opt.condition[i]
              << ": " << seg.cycles.size() - seg.unmatched << '/'
              << seg.cycles.size() << " cycles matched\n";
  }

  const auto table = normalize(records);
  const auto csv_path = out_file(global, "activity.csv");
  write_activity_csv(csv_path, table);
  std::cout << "wrote " << csv_path.string() << " (" << table.rows.size()
            << " rows)\n";
}

// --- stats ---------------------------------------------------------------------

struct StatsOptions {
  std::string table;
  double alpha = 0.05;
  bool include_back_flexion = false;
};

void run_stats(const GlobalOptions& global, const StatsOptions& opt) {
  const auto table = read_activity_csv(opt.table);
  CompareOptions copt;
  copt.alpha = opt.alpha;
  copt.include_back_flexion = opt.include_back_flexion;
  const auto cells = compare_conditions(table, copt);

  int significant = 0, untested = 0;
  for (const auto& c : cells) {
    significant += c.significant ? 1 : 0;
    untested += c.test ? 0 : 1;
  }
  std::cout << cells.size() << " cells, " << significant
            << " significant at alpha " << copt.alpha << ", " << untested
            << " untested\n";

  const auto csv_path = out_file(global, "comparison.csv");
  write_comparison_csv(csv_path, cells);
  std::cout << "wrote " << csv_path.string() << '\n';
}

// --- gen-protocol ----------------------------------------------------------------

struct ProtocolOptions {
  PlanTiming timing;
};

void run_gen_protocol(const GlobalOptions& global, const ProtocolOptions& opt) {
  const auto plan = generate_sequence(global.seed, opt.timing);
  const auto csv_path = out_file(global, "plan.csv");
  write_plan_csv(csv_path, plan);
  std::cout << plan.cycles.size() << " cycles, " << plan.duration()
            << " s total, seed " << global.seed << '\n'
            << "wrote " << csv_path.string() << '\n';
}

// --- synth -------------------------------------------------------------------------

struct SynthOptions {
  std::string plan, profile;
  SynthParams params;
};

void run_synth(const GlobalOptions& global, const SynthOptions& opt) {
  const auto plan = read_plan_csv(opt.plan);
  const auto profile = read_profile_csv(opt.profile);
  const auto trial = synth_trial(plan, profile, global.seed, opt.params);

  const auto kin_path = out_file(global, "synth_kinematics.csv");
  write_trace_csv(kin_path, trial.kinematics);
  const auto emg_path = out_file(global, "synth_emg.csv");
  write_trace_csv(emg_path, trial.emg);

  CsvTable truth;
  truth.header = {"cycle", "plane", "angle_deg", "t_approach_s",
                  "t_hold_start_s", "t_hold_end_s", "t_end_s"};
  for (const auto& m : muscle_names()) truth.header.push_back(m);
  for (std::size_t i = 0; i < trial.cycles.size(); ++i) {
    const auto& c = trial.cycles[i];
    std::vector<std::string> row = {
        std::to_string(i),
        to_string(c.target.plane),
        format_double(c.target.angle_deg),
        format_double(c.t_approach_start),
        format_double(c.t_hold_start),
        format_double(c.t_hold_end),
        format_double(c.t_recovery_end)};
    for (const auto& m : muscle_names()) {
      row.push_back(format_double(c.hold_amplitude.at(m)));
    }
    truth.rows.push_back(std::move(row));
  }
  const auto truth_path = out_file(global, "synth_truth.csv");
  write_csv(truth_path, truth);

  std::cout << "wrote " << kin_path.string() << ", " << emg_path.string()
            << ", " << truth_path.string() << '\n';
}

}  // namespace

void register_commands(CLI::App& app, GlobalOptions& global) {
  // simulate-bending
  {
    auto opt = std::make_shared<SimulateOptions>();
    auto* cmd = app.add_subcommand("simulate-bending",
                                   "moment-angle curve of the bar array");
    cmd->add_option("--delta", opt->delta,
                    "plate clearance in mm; 'inf' for the free plate, "
                    "negative for preload");
    cmd->add_option("--theta-max", opt->theta_max_deg, "sweep end, deg");
    cmd->add_option("--steps", opt->steps, "sweep sample count");
    cmd->add_flag("--plot", opt->plot, "also write an SVG plot");
    cmd->callback([&global, opt] { run_simulate(global, *opt); });
  }
  // ideal-moment
  {
    auto opt = std::make_shared<IdealOptions>();
    auto* cmd = app.add_subcommand(
        "ideal-moment", "gravity-balancing moment and assist fraction");
    cmd->add_option("--theta-max", opt->theta_max_deg, "sweep end, deg");
    cmd->add_option("--steps", opt->steps, "sweep sample count");
    cmd->add_flag("--plot", opt->plot, "also write an SVG plot");
    cmd->callback([&global, opt] { run_ideal(global, *opt); });
  }
  // fit
  {
    auto opt = std::make_shared<FitOptions>();
    auto* cmd = app.add_subcommand("fit", "bench sweep parameter fit");
    cmd->add_option("--bend-test", opt->bend_test, "bench sweep CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--load-height", opt->load_height,
                    "handle height above the clamp, m")
        ->required();
    cmd->callback([&global, opt] { run_fit(global, *opt); });
  }
  // emg-process
  {
    auto opt = std::make_shared<EmgOptions>();
    auto* cmd = app.add_subcommand(
        "emg-process", "raw sessions to normalized holding activity");
    cmd->add_option("--participant", opt->participant, "participant id, per session");
    cmd->add_option("--condition", opt->condition,
                    "'base' or 'loaded', per session");
    cmd->add_option("--emg", opt->emg, "EMG CSV, per session")
        ->check(CLI::ExistingFile);
    cmd->add_option("--kin", opt->kin, "kinematics CSV, per session")
        ->check(CLI::ExistingFile);
    cmd->add_option("--plan", opt->plan, "session plan CSV, per session")
        ->check(CLI::ExistingFile);
    cmd->callback([&global, opt] { run_emg_process(global, *opt); });
  }
  // stats
  {
    auto opt = std::make_shared<StatsOptions>();
    auto* cmd = app.add_subcommand("stats", "base vs loaded comparison");
    cmd->add_option("--table", opt->table, "activity CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--alpha", opt->alpha, "significance level");
    cmd->add_flag("--include-back-flexion", opt->include_back_flexion,
                  "keep the deep sagittal extension posture");
    cmd->callback([&global, opt] { run_stats(global, *opt); });
  }
  // gen-protocol
  {
    auto opt = std::make_shared<ProtocolOptions>();
    auto* cmd = app.add_subcommand("gen-protocol",
                                   "shuffled session plan from the seed");
    cmd->add_option("--neutral", opt->timing.neutral, "neutral dwell, s");
    cmd->add_option("--approach", opt->timing.approach, "approach time, s");
    cmd->add_option("--hold", opt->timing.hold, "hold time, s");
    cmd->add_option("--recovery", opt->timing.recovery, "recovery time, s");
    cmd->callback([&global, opt] { run_gen_protocol(global, *opt); });
  }
  // synth
  {
    auto opt = std::make_shared<SynthOptions>();
    auto* cmd = app.add_subcommand("synth",
                                   "synthetic kinematics and EMG for a plan");
    cmd->add_option("--plan", opt->plan, "session plan CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--profile", opt->profile, "activation profile CSV")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--kin-rate", opt->params.kin_rate, "kinematics rate, Hz");
    cmd->add_option("--emg-rate", opt->params.emg_rate, "EMG rate, Hz");
    cmd->add_option("--kin-noise-deg", opt->params.kin_noise_deg,
                    "angle noise sigma, deg");
    cmd->add_option("--ramp", opt->params.ramp, "activation ramp, s");
    cmd->callback([&global, opt] { run_synth(global, *opt); });
  }
}

}  // namespace neckflex::cli
