#include "lradapt/cli/trace_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lradapt::cli {

void write_trace(std::ostream& out, std::span<const StepRecord> records) {
    out << kTraceHeader << '\n';
    for (const auto& r : records) {
        out << r.iter << ',' << r.epoch << ',' << format_real(r.f_before) << ',' << format_real(r.f_after) << ','
            << format_real(r.phi) << ',' << format_real(r.delta_f) << ',' << format_real(r.ratio) << ','
            << format_real(r.eta_before) << ',' << format_real(r.eta_after) << ',' << format_real(r.step_norm) << ','
            << r.flags.to_string() << ',' << format_real(r.noise_var) << '\n';
    }
}

void write_trace(const std::string& path, std::span<const StepRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write trace file '" + path + "'");
    write_trace(out, records);
    if (!out) throw Error(ErrorCode::Io, "error while writing trace file '" + path + "'");
}

namespace {

std::int64_t cell_int(const std::string& cell, int line_no) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw Error(ErrorCode::Parse, "trace line " + std::to_string(line_no) + ": bad integer '" + cell + "'");
    return v;
}

double cell_real(const std::string& cell, int line_no) {
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    auto v = parse_real(cell);
    if (!v) throw Error(ErrorCode::Parse, "trace line " + std::to_string(line_no) + ": bad number '" + cell + "'");
    return *v;
}

}  // namespace

std::vector<StepRecord> read_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) throw Error(ErrorCode::Parse, "trace header is missing or wrong");
    std::vector<StepRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != 12)
            throw Error(ErrorCode::Parse, "trace line " + std::to_string(line_no) + ": expected 12 columns");
        StepRecord r;
        r.iter = cell_int(cells[0], line_no);
        r.epoch = cell_int(cells[1], line_no);
        r.f_before = cell_real(cells[2], line_no);
        r.f_after = cell_real(cells[3], line_no);
        r.phi = cell_real(cells[4], line_no);
        r.delta_f = cell_real(cells[5], line_no);
        r.ratio = cell_real(cells[6], line_no);
        r.eta_before = cell_real(cells[7], line_no);
        r.eta_after = cell_real(cells[8], line_no);
        r.step_norm = cell_real(cells[9], line_no);
        auto flags = StepFlags::parse(cells[10]);
        if (!flags) throw Error(ErrorCode::Parse, "trace line " + std::to_string(line_no) + ": bad flags '" + cells[10] + "'");
        r.flags = *flags;
        r.noise_var = cell_real(cells[11], line_no);
        out.push_back(r);
    }
    return out;
}

double final_loss(std::span<const StepRecord> records) {
    if (records.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto& last = records.back();
    return std::isfinite(last.f_after) ? last.f_after : last.f_before;
}

}  // namespace lradapt::cli
