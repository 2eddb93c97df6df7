#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace caa {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration with line-number diagnostics. Values are
/// kept as strings; typed getters parse on demand. Unknown keys are rejected
/// per command via require_known.
class Config {
public:
    Config() = default;
    static Config from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;

    void require_known(const std::vector<std::string>& known) const;

private:
    struct Entry {
        std::string value;
        int line = 0;  // 0 for overrides
    };
    std::map<std::string, Entry> entries_;
};

/// "start:end:count:log|lin", a comma list, or a single scalar.
std::vector<double> parse_sweep(const std::string& spec);

/// 17 significant digits; round-trip exact for doubles.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}
    void row(const std::vector<std::string>& cells);

private:
    std::ostream& os_;
};

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal static SVG line plot.
void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series, bool log_x,
                    bool log_y, const std::string& x_label, const std::string& y_label);

/// Reads back a CSV written by this tool and emits an SVG next to it
/// (first column is the abscissa; log axes chosen from the data range).
void plot_csv(const std::string& csv_path, const std::string& svg_path);

int cmd_rates(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_chebsolve(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_run(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_thresholds(const Config& cfg, std::ostream& out, std::ostream& err);

/// Full command-line entry: subcommand, --config/--out/--plot/--seed and
/// --key value overrides. Exit codes: 0 success, 1 usage or configuration
/// error, 2 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace caa
