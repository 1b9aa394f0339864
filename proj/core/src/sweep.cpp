#include "tsnsim/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace tsnsim {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_sweep(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", *v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  TSNSIM_CHECK(out.good(), "cannot write " + path.string());
  out << text;
}

}  // namespace

RunOutput execute_run(const Scenario& scenario, const std::string& mode,
                      std::optional<double> sweep_value, std::uint64_t seed,
                      const RunOptions& options) {
  ResolvedRun resolved =
      scenario.resolve(mode, sweep_value, seed, options.duration_override);
  for (const std::string& w : resolved.warnings) {
    std::cerr << "warning: " << w << "\n";
  }

  MetricSeries series = run_simulation(resolved.sim);

  RunOutput out;
  out.scenario = resolved.scenario;
  out.mode = mode;
  out.sweep_variable = resolved.sweep_variable;
  out.sweep_value = sweep_value;
  out.seed = seed;
  out.scenario_hash = series.scenario_hash;
  out.duration = series.duration;
  out.warmup_cutoff = series.warmup_cutoff;
  out.be = summarize(series, /*be_class=*/true);
  out.hp = summarize(series, /*be_class=*/false);
  out.emitted = series.emitted;
  out.delivered = series.delivered;
  out.in_system_at_end = series.in_system_at_end;
  out.max_hp_wait = series.max_hp_wait;
  out.max_be_wait = series.max_be_wait;
  out.wc_violations = series.wc_violations;
  out.idle_backlog_intervals = series.idle_backlog_intervals;
  out.idle_backlog_time = series.idle_backlog_time;
  out.window_overlaps = series.window_overlaps;
  for (const DelaySample& d : series.delays) {
    if (!d.warmup && series.flow_is_be(d.flow)) {
      out.be_delays.push_back(d.delay());
    }
  }

  if (!options.out_dir.empty()) {
    const std::filesystem::path dir(options.out_dir);
    std::filesystem::create_directories(dir);
    {
      std::ofstream f(dir / "delays.csv", std::ios::binary);
      write_delays_csv(f, series);
    }
    {
      std::ofstream f(dir / "backlog.csv", std::ios::binary);
      write_backlog_csv(f, series);
    }
    write_file(dir / "resolved_config.json", resolved.resolved_json);
    {
      std::ofstream f(dir / "summary.csv", std::ios::binary);
      write_summary_csv(f, {out});
    }
    out.out_dir = dir.string();
  }
  return out;
}

std::vector<RunOutput> execute_sweep(const Scenario& scenario,
                                     const std::vector<std::string>& modes,
                                     const std::vector<std::uint64_t>& seeds,
                                     const SweepOptions& options) {
  TSNSIM_CHECK(!modes.empty(), "sweep needs at least one mode");
  TSNSIM_CHECK(!seeds.empty(), "sweep needs at least one seed");

  struct Point {
    std::string mode;
    std::optional<double> value;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  std::vector<double> values = scenario.sweep_values();
  for (const std::string& mode : modes) {
    if (values.empty()) {
      for (const auto seed : seeds) points.push_back({mode, std::nullopt, seed});
    } else {
      for (const double v : values) {
        for (const auto seed : seeds) points.push_back({mode, v, seed});
      }
    }
  }

  std::vector<RunOutput> results(points.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  const int jobs = std::max(1, options.jobs);
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size() || failed.load()) return;
      const Point& p = points[i];
      RunOptions ro;
      ro.duration_override = options.duration_override;
      if (options.write_run_csvs && !options.out_dir.empty()) {
        std::string dir = options.out_dir + "/" + scenario.name() + "/runs/" + p.mode;
        if (p.value) dir += "_" + scenario.sweep_variable() + "=" + fmt_sweep(p.value);
        dir += "_s" + std::to_string(p.seed);
        ro.out_dir = dir;
      }
      try {
        results[i] = execute_run(scenario, p.mode, p.value, p.seed, ro);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) first_error = e.what();
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failed.load()) throw std::runtime_error("sweep run failed: " + first_error);

  if (!options.out_dir.empty()) {
    const std::filesystem::path dir =
        std::filesystem::path(options.out_dir) / scenario.name();
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / "summary.csv", std::ios::binary);
    write_summary_csv(f, results);
    write_figure_files(dir.string(), scenario, results);
    if (options.render_svg) render_figure_svgs(dir.string(), scenario, results);
  }
  return results;
}

void write_summary_csv(std::ostream& out, const std::vector<RunOutput>& runs) {
  out << "scenario,mode,sweep_variable,sweep_value,seed,duration_ns,warmup_ns,"
         "be_count,be_mean_delay_ns,be_median_delay_ns,be_p99_delay_ns,"
         "be_max_delay_ns,be_mean_backlog_bytes,be_max_backlog_bytes,"
         "hp_count,hp_mean_delay_ns,hp_median_delay_ns,hp_p99_delay_ns,"
         "hp_max_delay_ns,hp_mean_backlog_bytes,hp_max_backlog_bytes,"
         "emitted,delivered,in_system_at_end,max_hp_wait_ns,max_be_wait_ns,"
         "wc_violations,idle_backlog_intervals,idle_backlog_time_ns,"
         "window_overlaps,scenario_hash\n";
  for (const RunOutput& r : runs) {
    out << r.scenario << ',' << r.mode << ',' << r.sweep_variable << ','
        << fmt_sweep(r.sweep_value) << ',' << r.seed << ',' << r.duration << ','
        << r.warmup_cutoff << ',' << r.be.count << ','
        << fmt_double(r.be.mean_delay) << ',' << r.be.median_delay << ','
        << r.be.p99_delay << ',' << r.be.max_delay << ','
        << fmt_double(r.be.mean_backlog) << ',' << r.be.max_backlog << ','
        << r.hp.count << ',' << fmt_double(r.hp.mean_delay) << ','
        << r.hp.median_delay << ',' << r.hp.p99_delay << ',' << r.hp.max_delay
        << ',' << fmt_double(r.hp.mean_backlog) << ',' << r.hp.max_backlog
        << ',' << r.emitted << ',' << r.delivered << ',' << r.in_system_at_end
        << ',' << r.max_hp_wait << ',' << r.max_be_wait << ','
        << r.wc_violations << ',' << r.idle_backlog_intervals << ','
        << r.idle_backlog_time << ',' << r.window_overlaps << ','
        << r.scenario_hash << '\n';
  }
}

namespace {

struct Pooled {
  __int128 delay_sum = 0;
  std::int64_t count = 0;
  double backlog_sum = 0;
  int runs = 0;

  double mean_delay() const {
    return count > 0 ? static_cast<double>(delay_sum) / static_cast<double>(count)
                     : 0.0;
  }
  double mean_backlog() const {
    return runs > 0 ? backlog_sum / runs : 0.0;
  }
};

/// Pools seeds per (sweep value, mode): delays by sample count, backlog by run.
std::map<std::pair<double, std::string>, Pooled> pool_runs(
    const std::vector<RunOutput>& runs) {
  std::map<std::pair<double, std::string>, Pooled> pooled;
  for (const RunOutput& r : runs) {
    Pooled& p = pooled[{r.sweep_value.value_or(0.0), r.mode}];
    p.delay_sum += static_cast<__int128>(
        static_cast<double>(r.be.count) * r.be.mean_delay);
    p.count += r.be.count;
    p.backlog_sum += r.be.mean_backlog;
    p.runs += 1;
  }
  return pooled;
}

}  // namespace

void write_figure_files(const std::string& dir, const Scenario& scenario,
                        const std::vector<RunOutput>& runs) {
  const auto pooled = pool_runs(runs);

  {
    std::ofstream f(std::filesystem::path(dir) / "figure_delay.csv",
                    std::ios::binary);
    f << "sweep_value,mode,be_mean_delay_ns,ratio_vs_sp\n";
    for (const auto& [key, p] : pooled) {
      const auto sp = pooled.find({key.first, "sp"});
      f << fmt_double(key.first) << ',' << key.second << ','
        << fmt_double(p.mean_delay()) << ',';
      if (sp != pooled.end() && sp->second.mean_delay() > 0) {
        f << fmt_double(p.mean_delay() / sp->second.mean_delay());
      } else {
        f << "nan";
      }
      f << '\n';
    }
  }
  {
    std::ofstream f(std::filesystem::path(dir) / "figure_backlog.csv",
                    std::ios::binary);
    f << "sweep_value,mode,be_mean_backlog_bytes,ratio_vs_sp\n";
    for (const auto& [key, p] : pooled) {
      const auto sp = pooled.find({key.first, "sp"});
      f << fmt_double(key.first) << ',' << key.second << ','
        << fmt_double(p.mean_backlog()) << ',';
      if (sp != pooled.end() && sp->second.mean_backlog() > 0) {
        f << fmt_double(p.mean_backlog() / sp->second.mean_backlog());
      } else {
        f << "nan";
      }
      f << '\n';
    }
  }

  const auto window = scenario.moving_average_window();
  if (!window) return;
  // One series per mode: first sweep value, first seed.
  std::ofstream f(std::filesystem::path(dir) / "figure_moving_avg.csv",
                  std::ios::binary);
  f << "sample_index,mode,moving_avg_delay_ns\n";
  std::map<std::string, const RunOutput*> first_run;
  for (const RunOutput& r : runs) {
    if (first_run.find(r.mode) == first_run.end()) first_run[r.mode] = &r;
  }
  for (const auto& [mode, r] : first_run) {
    const auto avg = moving_average(r->be_delays, *window);
    for (std::size_t i = 0; i < avg.size(); ++i) {
      f << i << ',' << mode << ',' << fmt_double(avg[i]) << '\n';
    }
  }
}

namespace {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // sorted by x
};

/// Minimal line chart: one polyline per series, linear axes from zero on y.
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b"};
  const double w = 680, h = 420, left = 80, right = 160, top = 40, bottom = 56;
  double x_min = 1e300, x_max = -1e300, y_max = 0;
  for (const ChartSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
    }
  }
  if (series.empty() || x_max < x_min) return;
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max <= 0) y_max = 1;
  y_max *= 1.05;

  const auto px = [&](double x) {
    return left + (x - x_min) / (x_max - x_min) * (w - left - right);
  };
  const auto py = [&](double y) { return h - bottom - y / y_max * (h - top - bottom); };

  std::ofstream out(path, std::ios::binary);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w << ' '
      << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-size=\"14\">" << title << "</text>\n";

  // Axes with five ticks each.
  out << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\""
      << w - right << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  char buf[64];
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_min + (x_max - x_min) * t / 4;
    const double yv = y_max * t / 4;
    std::snprintf(buf, sizeof(buf), "%g", xv);
    out << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 18
        << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%g", yv);
    out << "<text x=\"" << left - 8 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\">" << buf << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << py(yv) << "\" x2=\""
        << w - right << "\" y2=\"" << py(yv)
        << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
  }
  out << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 14
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << (top + h - bottom) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (top + h - bottom) / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[i].points) {
      out << px(x) << ',' << py(y) << ' ';
    }
    out << "\"/>\n";
    const double ly = top + 16 * static_cast<double>(i);
    out << "<line x1=\"" << w - right + 12 << "\" y1=\"" << ly << "\" x2=\""
        << w - right + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << w - right + 40 << "\" y=\"" << ly + 4 << "\">"
        << series[i].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void render_figure_svgs(const std::string& dir, const Scenario& scenario,
                        const std::vector<RunOutput>& runs) {
  const auto pooled = pool_runs(runs);
  std::map<std::string, ChartSeries> delay_series, backlog_series;
  for (const auto& [key, p] : pooled) {
    auto& d = delay_series[key.second];
    d.label = key.second;
    d.points.push_back({key.first, p.mean_delay() / 1e3});
    auto& b = backlog_series[key.second];
    b.label = key.second;
    b.points.push_back({key.first, p.mean_backlog()});
  }
  const std::string x_label =
      scenario.sweep_variable().empty() ? "run" : scenario.sweep_variable();
  std::vector<ChartSeries> ds, bs;
  for (auto& [mode, s] : delay_series) ds.push_back(std::move(s));
  for (auto& [mode, s] : backlog_series) bs.push_back(std::move(s));
  write_line_chart(std::filesystem::path(dir) / "figure_delay.svg",
                   scenario.name() + ": mean best-effort delay", x_label,
                   "mean delay [us]", ds);
  write_line_chart(std::filesystem::path(dir) / "figure_backlog.svg",
                   scenario.name() + ": mean best-effort backlog", x_label,
                   "mean backlog [bytes]", bs);

  const auto window = scenario.moving_average_window();
  if (!window) return;
  std::map<std::string, const RunOutput*> first_run;
  for (const RunOutput& r : runs) {
    if (first_run.find(r.mode) == first_run.end()) first_run[r.mode] = &r;
  }
  std::vector<ChartSeries> ms;
  for (const auto& [mode, r] : first_run) {
    const auto avg = moving_average(r->be_delays, *window);
    ChartSeries s;
    s.label = mode;
    // Thin dense series so the file stays small.
    const std::size_t step = std::max<std::size_t>(1, avg.size() / 2000);
    for (std::size_t i = 0; i < avg.size(); i += step) {
      s.points.push_back({static_cast<double>(i), avg[i] / 1e3});
    }
    ms.push_back(std::move(s));
  }
  write_line_chart(std::filesystem::path(dir) / "figure_moving_avg.svg",
                   scenario.name() + ": moving-average best-effort delay",
                   "sample index", "moving average delay [us]", ms);
}

}  // namespace tsnsim
