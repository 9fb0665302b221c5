#pragma once

// CSV artifacts. Signals serialize with header "tau,mode", trajectories with
// "t,mode,x1..xd,v1..vm,normx". Doubles are written in shortest round-trip
// form, so write(read(text)) == text for files the tool emitted.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swsys/numeric.hpp"
#include "swsys/signal.hpp"
#include "swsys/sim.hpp"

namespace swsys {

class CsvError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail_csv {

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace detail_csv

inline std::string signal_to_csv(const SwitchingSignal& sig) {
    std::string out = "tau,mode\n";
    for (std::size_t i = 0; i < sig.taus.size(); ++i)
        out += format_double(sig.taus[i]) + "," + std::to_string(sig.modes[i]) + "\n";
    return out;
}

inline SwitchingSignal signal_from_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) throw CsvError("empty signal CSV");
    if (line == "tau,mode\r") line = "tau,mode";
    if (line != "tau,mode") throw CsvError("signal CSV must start with header 'tau,mode'");
    SwitchingSignal sig;
    std::size_t row = 1;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail_csv::split(line);
        if (fields.size() != 2)
            throw CsvError("signal CSV row " + std::to_string(row) + " needs 2 fields");
        double tau = 0.0;
        if (!parse_double_strict(fields[0], tau))
            throw CsvError("signal CSV row " + std::to_string(row) + ": bad tau");
        double mode_value = 0.0;
        if (!parse_double_strict(fields[1], mode_value) ||
            mode_value != std::floor(mode_value))
            throw CsvError("signal CSV row " + std::to_string(row) + ": bad mode");
        sig.taus.push_back(tau);
        sig.modes.push_back(static_cast<int>(mode_value));
        ++row;
    }
    sig.validate();
    return sig;
}

inline void write_signal_csv(const std::filesystem::path& path, const SwitchingSignal& sig) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open " + path.string() + " for writing");
    out << signal_to_csv(sig);
}

inline SwitchingSignal read_signal_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return signal_from_csv(buf.str());
}

inline std::string trajectory_csv_header(int d, int m) {
    std::string h = "t,mode";
    for (int i = 1; i <= d; ++i) h += ",x" + std::to_string(i);
    for (int j = 1; j <= m; ++j) h += ",v" + std::to_string(j);
    return h + ",normx";
}

inline std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = trajectory_csv_header(traj.state_dim, traj.input_dim) + "\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out += format_double(traj.t[k]) + "," + std::to_string(traj.mode[k]);
        for (double xv : traj.state(k)) out += "," + format_double(xv);
        for (double vv : traj.input(k)) out += "," + format_double(vv);
        out += "," + format_double(traj.norm_x[k]) + "\n";
    }
    return out;
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open " + path.string() + " for writing");
    out << trajectory_to_csv(traj);
}

inline Trajectory trajectory_from_csv(const std::string& text, int d, int m) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) throw CsvError("empty trajectory CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != trajectory_csv_header(d, m)) throw CsvError("unexpected trajectory header");
    Trajectory traj;
    traj.state_dim = d;
    traj.input_dim = m;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail_csv::split(line);
        if (fields.size() != static_cast<std::size_t>(2 + d + m + 1))
            throw CsvError("trajectory CSV row has wrong field count");
        double value = 0.0;
        std::size_t col = 0;
        auto take = [&]() {
            if (!parse_double_strict(fields[col], value))
                throw CsvError("trajectory CSV: bad number '" + fields[col] + "'");
            ++col;
            return value;
        };
        traj.t.push_back(take());
        traj.mode.push_back(static_cast<int>(take()));
        for (int i = 0; i < d; ++i) traj.x.push_back(take());
        for (int j = 0; j < m; ++j) traj.v.push_back(take());
        traj.norm_x.push_back(take());
    }
    return traj;
}

}  // namespace swsys
