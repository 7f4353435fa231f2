#include "heavytails/config.hpp"

#include "heavytails/errors.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace heavytails {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

UtcInterval parse_excise_window(std::string_view text) {
    const auto sep = text.find("..");
    if (sep == std::string_view::npos) {
        throw ParseError("excision window '" + std::string(text) + "' must read START..END");
    }
    const UtcInterval iv{parse_iso8601(detail::trim(text.substr(0, sep))),
                         parse_iso8601(detail::trim(text.substr(sep + 2)))};
    if (iv.end <= iv.start) {
        throw DomainError("excision window '" + std::string(text) + "' is empty");
    }
    return iv;
}

std::vector<std::int64_t> parse_dt_list(std::string_view text) {
    std::vector<std::int64_t> out;
    for (auto part : detail::split(text, ',')) {
        part = detail::trim(part);
        if (part.empty()) continue;
        auto v = detail::to_int<std::int64_t>(part);
        if (!v || *v <= 0) throw ParseError("bad dt value '" + std::string(part) + "'");
        out.push_back(*v);
    }
    return out;
}

namespace {

std::vector<double> parse_doubles(std::string_view text) {
    std::vector<double> out;
    for (auto part : detail::split(text, ',')) {
        auto v = detail::to_double(detail::trim(part));
        if (!v) throw ParseError("bad number '" + std::string(part) + "'");
        out.push_back(*v);
    }
    return out;
}

double one_double(std::string_view text, std::string_view key) {
    auto v = detail::to_double(text);
    if (!v) throw ParseError("bad number for '" + std::string(key) + "'");
    return *v;
}

template <class Int>
Int one_int(std::string_view text, std::string_view key) {
    auto v = detail::to_int<Int>(text);
    if (!v) throw ParseError("bad integer for '" + std::string(key) + "'");
    return *v;
}

std::string join_dts(const std::vector<std::int64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    PipelineConfig cfg;
    cfg.base_dir = base_dir;
    enum class Section { none, pipeline, asset } section = Section::none;
    AssetConfig* asset = nullptr;
    std::size_t line_no = 0;
    for (auto raw : detail::split_lines(text)) {
        ++line_no;
        const auto line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) continue;
        auto fail = [&](const std::string& msg) {
            throw ParseError("config line " + std::to_string(line_no) + ": " + msg);
        };
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            const auto name = detail::trim(line.substr(1, line.size() - 2));
            if (name == "pipeline") {
                section = Section::pipeline;
            } else if (name.substr(0, 6) == "asset " || name.substr(0, 6) == "asset\t") {
                section = Section::asset;
                cfg.assets.emplace_back();
                asset = &cfg.assets.back();
                asset->id = std::string(detail::trim(name.substr(6)));
                if (asset->id.empty()) fail("asset section needs an id");
            } else {
                fail("unknown section '" + std::string(name) + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        try {
            if (section == Section::pipeline) {
                if (key == "dt") {
                    cfg.dt_grid = parse_dt_list(value);
                } else if (key == "tail_fraction") {
                    cfg.fit.tail_fraction = one_double(value, key);
                } else if (key == "body") {
                    const auto v = parse_doubles(value);
                    if (v.size() != 2) fail("body needs two probabilities");
                    cfg.fit.body = {v[0], v[1]};
                } else if (key == "zero_filter") {
                    cfg.zero_filter = parse_zero_filter(value);
                } else if (key == "rolling_zero_filter") {
                    cfg.rolling_zero_filter = parse_zero_filter(value);
                } else if (key == "rolling_window_days") {
                    cfg.rolling_window_days = one_int<std::int64_t>(value, key);
                } else if (key == "rolling_step_days") {
                    cfg.rolling_step_days = one_int<std::int64_t>(value, key);
                } else if (key == "seed") {
                    cfg.seed = one_int<std::uint64_t>(value, key);
                } else if (key == "out") {
                    cfg.out_dir = std::string(value);
                } else if (key == "excise") {
                    cfg.excise.push_back(parse_excise_window(value));
                } else if (key == "analyses") {
                    for (auto a : detail::split(value, ',')) {
                        a = detail::trim(a);
                        if (a == "epps") cfg.analyses.epps = true;
                        else if (a == "rolling") cfg.analyses.rolling = true;
                        else if (a == "index") cfg.analyses.index = true;
                        else if (!a.empty()) fail("unknown analysis '" + std::string(a) + "'");
                    }
                } else {
                    fail("unknown pipeline key '" + std::string(key) + "'");
                }
            } else if (section == Section::asset) {
                if (key == "path") {
                    asset->path = std::string(value);
                } else if (key == "calendar") {
                    asset->calendar = std::string(value);
                } else if (key == "format") {
                    TickFormat::parse(value);
                    asset->format = std::string(value);
                } else if (key == "price") {
                    asset->price = parse_price_basis(value);
                } else if (key == "synth") {
                    asset->synth = parse_dist_spec(value);
                } else if (key == "ticks") {
                    asset->synth_ticks = one_int<std::size_t>(value, key);
                } else if (key == "scale") {
                    asset->synth_scale = one_double(value, key);
                } else {
                    fail("unknown asset key '" + std::string(key) + "'");
                }
            } else {
                fail("key outside of a section");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(e.what());
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read config " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

void PipelineConfig::validate() const {
    if (assets.empty()) {
        throw DomainError("configuration lists no assets");
    }
    std::set<std::string> ids;
    std::set<std::filesystem::path> paths;
    for (const auto& a : assets) {
        if (!ids.insert(a.id).second) {
            throw DomainError("duplicate asset id '" + a.id + "'");
        }
        if (a.synth) {
            if (a.synth_ticks < 2) throw DomainError("asset " + a.id + ": ticks must be >= 2");
            if (!(a.synth_scale > 0.0)) throw DomainError("asset " + a.id + ": scale must be > 0");
        } else {
            if (a.path.empty()) throw DomainError("asset " + a.id + " has neither path nor synth");
            if (!paths.insert(resolve(a.path).lexically_normal()).second) {
                throw DomainError("asset path " + a.path.string() + " is listed twice");
            }
        }
    }
    if (dt_grid.empty()) {
        throw DomainError("dt grid is empty");
    }
    for (std::size_t i = 0; i < dt_grid.size(); ++i) {
        if (dt_grid[i] <= 0 || (i > 0 && dt_grid[i] <= dt_grid[i - 1])) {
            throw DomainError("dt grid must be positive and strictly ascending");
        }
    }
    if (!(fit.tail_fraction > 0.0 && fit.tail_fraction <= 1.0)) {
        throw DomainError("tail_fraction must lie in (0, 1]");
    }
    if (!(fit.body.p_min > 0.0 && fit.body.p_min < fit.body.p_max && fit.body.p_max <= 1.0)) {
        throw DomainError("body region must satisfy 0 < p_min < p_max <= 1");
    }
    if (rolling_window_days <= 0 || rolling_step_days <= 0) {
        throw DomainError("rolling window and step must be positive");
    }
    PeriodMask check(excise);  // throws on overlapping windows
}

std::filesystem::path PipelineConfig::resolve(const std::filesystem::path& p) const {
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

std::string PipelineConfig::to_text(bool include_output) const {
    std::string s = "[pipeline]\n";
    s += "dt = " + join_dts(dt_grid) + "\n";
    s += "tail_fraction = " + detail::format_double(fit.tail_fraction) + "\n";
    s += "body = " + detail::format_double(fit.body.p_min) + ", " +
         detail::format_double(fit.body.p_max) + "\n";
    s += "zero_filter = " + std::string(to_string(zero_filter)) + "\n";
    s += "rolling_zero_filter = " + std::string(to_string(rolling_zero_filter)) + "\n";
    s += "rolling_window_days = " + std::to_string(rolling_window_days) + "\n";
    s += "rolling_step_days = " + std::to_string(rolling_step_days) + "\n";
    s += "seed = " + std::to_string(seed) + "\n";
    if (include_output) s += "out = " + out_dir.generic_string() + "\n";
    for (const auto& w : excise) {
        s += "excise = " + format_iso8601(w.start) + ".." + format_iso8601(w.end) + "\n";
    }
    std::string an;
    if (analyses.epps) an += "epps";
    if (analyses.rolling) an += an.empty() ? "rolling" : ", rolling";
    if (analyses.index) an += an.empty() ? "index" : ", index";
    s += "analyses = " + an + "\n";
    for (const auto& a : assets) {
        s += "\n[asset " + a.id + "]\n";
        if (a.synth) {
            s += "synth = " + to_string(*a.synth) + "\n";
            s += "ticks = " + std::to_string(a.synth_ticks) + "\n";
            s += "scale = " + detail::format_double(a.synth_scale) + "\n";
        } else {
            s += "path = " + a.path.generic_string() + "\n";
            s += "format = " + a.format + "\n";
        }
        s += "calendar = " + a.calendar + "\n";
        s += "price = " + std::string(to_string(a.price)) + "\n";
    }
    return s;
}

std::string PipelineConfig::hash() const { return hex64(fnv1a64(to_text(false))); }

}  // namespace heavytails
