#include "heavytails/report.hpp"

#include "heavytails/errors.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace heavytails {

std::string dt_label(std::int64_t dt_s) {
    if (dt_s >= 3600 && dt_s % 3600 == 0) return std::to_string(dt_s / 3600) + " h";
    if (dt_s >= 60 && dt_s % 60 == 0) return std::to_string(dt_s / 60) + " min";
    return std::to_string(dt_s) + " s";
}

namespace {

std::string fixed(std::optional<double> v, int decimals) {
    if (!v || !std::isfinite(*v)) return std::string(kMissingCell);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, *v);
    return buf;
}

void pad_left(std::string& line, const std::string& cell, std::size_t width) {
    line.append(width - std::min(width, cell.size()), ' ');
    line += cell;
}

void pad_right(std::string& line, const std::string& cell, std::size_t width) {
    line += cell;
    line.append(width - std::min(width, cell.size()), ' ');
}

}  // namespace

std::string render_table(const ResultTable& table) {
    if (table.rows.empty()) {
        throw DomainError("table has no rows");
    }
    const std::size_t ncol = table.dt_grid.size();
    std::vector<std::string> header{"Asset", "Param."};
    for (auto dt : table.dt_grid) header.push_back("dt=" + dt_label(dt));

    std::vector<std::vector<std::string>> lines;
    for (const auto& row : table.rows) {
        if (row.alpha.size() != ncol || row.beta.size() != ncol) {
            throw DomainError("row " + row.asset_id + " does not match the dt grid");
        }
        std::vector<std::string> a{row.asset_id, "alpha"};
        std::vector<std::string> b{"", "beta"};
        for (std::size_t c = 0; c < ncol; ++c) {
            a.push_back(fixed(row.alpha[c], 1));
            b.push_back(fixed(row.beta[c], 2));
        }
        lines.push_back(std::move(a));
        lines.push_back(std::move(b));
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& l : lines) width[c] = std::max(width[c], l[c].size());
    }
    auto emit = [&](const std::vector<std::string>& cells) {
        std::string line;
        pad_right(line, cells[0], width[0]);
        line += "  ";
        pad_right(line, cells[1], width[1]);
        for (std::size_t c = 2; c < cells.size(); ++c) {
            line += "  ";
            pad_left(line, cells[c], width[c]);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        return line + "\n";
    };
    std::string out = emit(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    for (const auto& l : lines) out += emit(l);
    return out;
}

void write_table_companion(std::ostream& out, const ResultTable& table) {
    std::string buf = "asset,dt_s,alpha,beta\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < table.dt_grid.size(); ++c) {
            buf += row.asset_id + "," + std::to_string(table.dt_grid[c]) + ",";
            if (c < row.alpha.size() && row.alpha[c]) detail::append_double(buf, *row.alpha[c]);
            buf += ',';
            if (c < row.beta.size() && row.beta[c]) detail::append_double(buf, *row.beta[c]);
            buf += '\n';
        }
    }
    out << buf;
}

std::vector<FitRecord> flatten(const std::string& asset_id, std::int64_t dt_s, const FitSet& fits) {
    std::vector<FitRecord> out;
    for (auto f : {TailFamily::power_law, TailFamily::stretched_exp, TailFamily::q_gaussian}) {
        const auto& o = fits[f];
        out.push_back({asset_id, dt_s, f, o.fit, o.error});
    }
    return out;
}

void write_fit_records(std::ostream& out, const std::vector<FitRecord>& records) {
    std::string buf =
        "asset,dt_s,family,status,p1_name,p1,p2_name,p2,x_min,x_max,n_points,sse,r_squared,error\n";
    for (const auto& r : records) {
        buf += r.asset_id + "," + std::to_string(r.dt_s) + "," + std::string(to_string(r.family)) + ",";
        if (r.fit) {
            const auto& f = *r.fit;
            buf += std::string(to_string(f.status)) + ",";
            std::visit(
                [&buf](const auto& p) {
                    using T = std::decay_t<decltype(p)>;
                    auto put = [&buf](std::string_view name, double v) {
                        buf += name;
                        buf += ',';
                        detail::append_double(buf, v);
                        buf += ',';
                    };
                    if constexpr (std::is_same_v<T, PowerLawParams>) {
                        put("alpha", p.alpha);
                        put("log_amplitude", p.log_amplitude);
                    } else if constexpr (std::is_same_v<T, StretchedExpParams>) {
                        put("beta", p.beta);
                        put("x0", p.x0);
                    } else {
                        put("q", p.q);
                        put("b_q", p.b_q);
                    }
                },
                f.params);
            detail::append_double(buf, f.x_min);
            buf += ',';
            detail::append_double(buf, f.x_max);
            buf += ',' + std::to_string(f.n_points) + ',';
            detail::append_double(buf, f.sse);
            buf += ',';
            detail::append_double(buf, f.r_squared);
            buf += ",\n";
        } else {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            buf += "failed,,,,,,,,,," + msg + "\n";
        }
    }
    out << buf;
}

}  // namespace heavytails
