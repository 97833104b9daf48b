#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "wheelftc/engine.hpp"
#include "wheelftc/error.hpp"
#include "wheelftc/metrics.hpp"
#include "wheelftc/scenario.hpp"
#include "wheelftc/telemetry.hpp"
#include "wheelftc/verify.hpp"

namespace wheelftc::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kWheelNames[kWheelCount] = {"FR", "FL", "RR", "RL"};

int exit_code_for(const Error& e) { return e.code() == ErrorCode::Numeric ? kExitNumeric : kExitInput; }

// Writes next to the destination and renames on success.
void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
        body(f);
        f.flush();
        if (!f) {
            f.close();
            fs::remove(tmp);
            throw Error(ErrorCode::Io, "write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error(ErrorCode::Io, "cannot rename '" + tmp.string() + "': " + ec.message());
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_run_outputs(const fs::path& dir, const RunResult& result, bool diagnostics) {
    ensure_dir(dir);
    write_atomic(dir / "telemetry.csv", [&](std::ostream& o) { write_telemetry_csv(o, result.telemetry); });
    write_atomic(dir / "summary.txt", [&](std::ostream& o) { write_summary(o, result.summary); });
    if (diagnostics) {
        write_atomic(dir / "diagnostics.csv", [&](std::ostream& o) {
            write_diagnostics_csv(o, error_norm_series(result.telemetry), result.summary.lyapunov.v_series);
        });
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else if (c == '\n') out += ' ';
        else out.push_back(c);
    }
    return out + "\"";
}

struct BatchEntry {
    fs::path scenario;
    int exit_code = kExitOk;
    std::string message;
    RunSummary summary;
};

}  // namespace

int run(const RunArgs& args, std::ostream& out, std::ostream& err) {
    try {
        auto cfg = load_scenario_file(args.scenario);
        if (args.dt) cfg.sim.dt = *args.dt;
        if (args.duration) cfg.sim.duration = *args.duration;
        if (args.seed) cfg.sim.seed = *args.seed;
        cfg.validate();
        const auto result = run_scenario(cfg);
        write_run_outputs(args.output_dir, result, args.diagnostics);
        out << "wrote " << (args.output_dir / "telemetry.csv").string() << " (" << result.telemetry.size()
            << " rows) and " << (args.output_dir / "summary.txt").string() << '\n';
        return kExitOk;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    }
}

int batch(const fs::path& dir, const fs::path& output_dir, int jobs, std::ostream& out, std::ostream& err) {
    if (jobs < 1) {
        err << "E_RANGE: jobs = " << jobs << " (must be >= 1)\n";
        return kExitInput;
    }
    std::vector<BatchEntry> entries;
    std::error_code ec;
    for (const auto& f : fs::directory_iterator(dir, ec)) {
        if (f.is_regular_file() && f.path().extension() == ".toml") entries.push_back({f.path()});
    }
    if (ec) {
        err << "E_IO: cannot read directory '" << dir.string() << "': " << ec.message() << '\n';
        return kExitInput;
    }
    if (entries.empty()) {
        err << "E_IO: no scenario files (*.toml) in '" << dir.string() << "'\n";
        return kExitInput;
    }
    std::sort(entries.begin(), entries.end(),
              [](const BatchEntry& a, const BatchEntry& b) { return a.scenario < b.scenario; });
    try {
        ensure_dir(output_dir);
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitInput;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
            auto& entry = entries[i];
            try {
                const auto cfg = load_scenario_file(entry.scenario);
                const auto result = run_scenario(cfg);
                write_run_outputs(output_dir / entry.scenario.stem(), result, false);
                entry.summary = result.summary;
            } catch (const Error& e) {
                entry.exit_code = exit_code_for(e);
                entry.message = e.what();
            } catch (const std::exception& e) {
                entry.exit_code = kExitInput;
                entry.message = e.what();
            }
        }
    };
    const auto thread_count = static_cast<std::size_t>(jobs) < entries.size() ? static_cast<std::size_t>(jobs)
                                                                                : entries.size();
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < thread_count; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    bool all_ok = true;
    try {
        write_atomic(output_dir / "index.csv", [&](std::ostream& o) {
            o << "scenario,status,exit_code,ticks,avg_tracking_error,avg_control_effort,non_operable_count,message\n";
            for (const auto& e : entries) {
                const bool ok = e.exit_code == kExitOk;
                o << csv_field(e.scenario.stem().string()) << ',' << (ok ? "ok" : "failed") << ',' << e.exit_code
                  << ',' << (ok ? std::to_string(e.summary.ticks) : "") << ','
                  << (ok ? format_number(e.summary.metrics.avg_tracking_error) : "") << ','
                  << (ok ? format_number(e.summary.metrics.avg_control_effort) : "") << ','
                  << (ok ? std::to_string(e.summary.non_operable.size()) : "") << ',' << csv_field(e.message)
                  << '\n';
            }
        });
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitInput;
    }
    for (const auto& e : entries) {
        if (e.exit_code != kExitOk) {
            all_ok = false;
            err << e.scenario.filename().string() << ": " << e.message << '\n';
        }
    }
    out << "batch: " << entries.size() << " scenarios, "
        << std::count_if(entries.begin(), entries.end(), [](const BatchEntry& e) { return e.exit_code == 0; })
        << " ok\n";
    return all_ok ? kExitOk : kExitPartialBatch;
}

int verify(const fs::path& scenario, std::ostream& out, std::ostream& err) {
    ScenarioConfig cfg;
    try {
        cfg = load_scenario_file(scenario);
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitInput;
    }
    try {
        if (!cfg.faults.empty()) {
            out << "note: fault-bypass check runs on a healthy copy of the fault schedule\n";
        }
        bool all = true;
        for (const auto& c : run_invariant_suite(cfg)) {
            out << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << format_number(c.value)
                << " threshold=" << format_number(c.threshold) << '\n';
            all = all && c.passed;
        }
        return all ? kExitOk : kExitPartialBatch;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    }
}

int report(const fs::path& telemetry_path, double fit_start, std::ostream& out, std::ostream& err) {
    Telemetry tel;
    try {
        std::ifstream in(telemetry_path, std::ios::binary);
        if (!in) throw Error(ErrorCode::Io, "cannot open telemetry '" + telemetry_path.string() + "'");
        tel = read_telemetry_csv(in);
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitInput;
    }
    const auto m = summary_metrics(tel, fit_start);
    out << "rows=" << tel.size() << '\n';
    out << "avg_tracking_error=" << format_number(m.avg_tracking_error) << '\n';
    out << "avg_control_effort=" << format_number(m.avg_control_effort) << '\n';
    for (std::size_t w = 0; w < kWheelCount; ++w) {
        out << "max_abs_error_" << kWheelNames[w] << '=' << format_number(m.max_abs_error[w]) << '\n';
    }

    const double dt = tel.size() > 1 ? tel[1].t - tel[0].t : 0.0;
    std::size_t count = 0;
    for (std::size_t bit = 0; bit < kFaultTargetCount; ++bit) {
        std::size_t i = 0;
        while (i < tel.size()) {
            if (!(tel[i].non_operable_mask & (1u << bit))) {
                ++i;
                continue;
            }
            const std::size_t start = i;
            while (i < tel.size() && (tel[i].non_operable_mask & (1u << bit))) ++i;
            const double end = i < tel.size() ? tel[i].t : tel.back().t + dt;
            out << "non_operable_" << count++ << '=' << to_string(static_cast<FaultTarget>(bit)) << ','
                << format_number(tel[start].t) << ',' << format_number(end) << '\n';
        }
    }
    out << "non_operable_count=" << count << '\n';

    try {
        const auto fit = fit_exponential_envelope(error_norm_series(tel), fit_start);
        out << "envelope_A=" << format_number(fit.A) << '\n';
        out << "envelope_k=" << format_number(fit.k) << '\n';
        out << "envelope_c=" << format_number(fit.c) << '\n';
        out << "envelope_coverage=" << format_number(fit.coverage) << '\n';
        out << "envelope_degenerate=" << (fit.degenerate ? "true" : "false") << '\n';
    } catch (const Error& e) {
        out << "envelope=unavailable (" << e.what() << ")\n";
    }
    return kExitOk;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"wheelftc: fault-tolerant wheel drive simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Run one scenario and write telemetry.csv and summary.txt");
    run_cmd->add_option("scenario", run_args.scenario, "Scenario file")->required();
    run_cmd->add_option("-o,--output", run_args.output_dir, "Output directory");
    run_cmd->add_option("--dt", run_args.dt, "Override sim.dt (s)");
    run_cmd->add_option("--duration", run_args.duration, "Override sim.duration (s)");
    run_cmd->add_option("--seed", run_args.seed, "Override sim.seed");
    run_cmd->add_flag("--diagnostics", run_args.diagnostics, "Also write diagnostics.csv (t, |e|, V)");

    fs::path batch_dir;
    fs::path batch_out = "batch_out";
    int jobs = 1;
    auto* batch_cmd = app.add_subcommand("batch", "Run every *.toml scenario in a directory");
    batch_cmd->add_option("dir", batch_dir, "Scenario directory")->required();
    batch_cmd->add_option("-o,--output", batch_out, "Output directory");
    batch_cmd->add_option("-j,--jobs", jobs, "Concurrent runs");

    fs::path verify_path;
    auto* verify_cmd = app.add_subcommand("verify", "Run the invariant checks against a scenario");
    verify_cmd->add_option("scenario", verify_path, "Scenario file")->required();

    fs::path report_path;
    double fit_start = 0.0;
    auto* report_cmd = app.add_subcommand("report", "Summarise a telemetry CSV");
    report_cmd->add_option("telemetry", report_path, "telemetry.csv")->required();
    report_cmd->add_option("--fit-start", fit_start, "Start of averaging and envelope fit (s)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (*run_cmd) return run(run_args, out, err);
    if (*batch_cmd) return batch(batch_dir, batch_out, jobs, out, err);
    if (*verify_cmd) return verify(verify_path, out, err);
    if (*report_cmd) return report(report_path, fit_start, out, err);
    return kExitInput;
}

}  // namespace wheelftc::cli
