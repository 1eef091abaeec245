#include "motormap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace motormap {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    const std::string t = trim(cell);
    if (t.empty())
        raise(errc::non_numeric_cell, "empty cell at row " + std::to_string(row) + ", column '" + column + "'");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v))
        raise(errc::non_numeric_cell,
              "non-numeric cell '" + t + "' at row " + std::to_string(row) + ", column '" + column + "'");
    return v;
}

std::optional<CsvSchema> schema_from_sidecar(const std::string& csv_path) {
    const std::string meta_path = csv_path + ".meta";
    if (!std::filesystem::exists(meta_path)) return std::nullopt;

    CsvSchema schema;
    std::unordered_map<std::size_t, OperatingPoint> ops;
    for (const auto& [key, value] : read_key_value_file(meta_path)) {
        if (key == "m_ops") schema.m_ops = std::stoul(value);
        else if (key == "d_op") schema.d_op = std::stoul(value);
        else if (key == "d_global") schema.d_global = std::stoul(value);
        else if (key == "param_columns") {
            for (auto& name : split_csv_line(value))
                if (!trim(name).empty()) schema.param_columns.push_back(trim(name));
        } else if (key == "feasible_column") {
            schema.feasible_column = value;
        } else if (key.rfind("sense.", 0) == 0) {
            schema.senses.emplace_back(key.substr(6), parse_sense(value));
        } else if (key.rfind("op.", 0) == 0) {
            // op.<index>.<field>
            const std::size_t dot = key.find('.', 3);
            if (dot == std::string::npos) raise(errc::bad_config, "bad sidecar key '" + key + "'");
            const std::size_t idx = std::stoul(key.substr(3, dot - 3));
            const std::string field = key.substr(dot + 1);
            OperatingPoint& op = ops[idx];
            if (field == "label") op.label = value;
            else if (field == "torque") op.torque_nm = std::stod(value);
            else if (field == "speed") op.speed_rpm = std::stod(value);
            else if (field == "current") op.current_a = std::stod(value);
        }
        // unknown keys (counters etc.) are ignored
    }
    for (std::size_t i = 0; i < ops.size(); ++i) {
        auto it = ops.find(i);
        if (it == ops.end()) raise(errc::bad_config, "sidecar operating points are not contiguous");
        it->second.validate();
        schema.operating_points.push_back(it->second);
    }
    return schema;
}

} // namespace

void OperatingPoint::validate() const {
    if (!(torque_nm > 0.0) || !(speed_rpm > 0.0) || !(current_a > 0.0))
        raise(errc::bad_config, "operating point '" + label + "' needs positive torque, speed and current");
}

const char* sense_name(Sense s) { return s == Sense::minimize ? "min" : "max"; }

Sense parse_sense(const std::string& text) {
    if (text == "min") return Sense::minimize;
    if (text == "max") return Sense::maximize;
    raise(errc::bad_config, "unknown sense '" + text + "' (expected min or max)");
}

ScaleMode parse_scale_mode(const std::string& text) {
    if (text == "zscore") return ScaleMode::zscore;
    if (text == "minmax") return ScaleMode::minmax;
    if (text == "none") return ScaleMode::none;
    raise(errc::bad_config, "unknown scale mode '" + text + "'");
}

void CandidateSet::validate() const {
    const std::size_t n = ids.size();
    if (n < 2) raise(errc::bad_config, "candidate set needs at least 2 rows, got " + std::to_string(n));
    if (objectives.rows() != n || feasible.size() != n || (params.rows() != n && params.rows() != 0))
        raise(errc::dimension_mismatch, "candidate set row counts disagree");
    if (column_names.size() != objectives.cols() || senses.size() != objectives.cols())
        raise(errc::dimension_mismatch, "objective column metadata disagrees with matrix width");
    if (m_ops * d_op + d_global != objectives.cols())
        raise(errc::dimension_mismatch, "declared m_ops*d_op + d_global does not match objective count");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second) raise(errc::duplicate_id, "duplicate id '" + id + "'");
    for (const double v : objectives.data())
        if (!std::isfinite(v)) raise(errc::non_numeric_cell, "objectives contain a non-finite value");
}

CandidateSet CandidateSet::select(const std::vector<std::size_t>& rows) const {
    CandidateSet out = *this;
    out.ids.clear();
    out.feasible.clear();
    for (std::size_t r : rows) {
        out.ids.push_back(ids[r]);
        out.feasible.push_back(feasible[r]);
    }
    out.objectives = objectives.select_rows(rows);
    out.params = params.rows() ? params.select_rows(rows) : params;
    return out;
}

std::optional<std::size_t> CandidateSet::column_index(const std::string& name) const {
    for (std::size_t c = 0; c < column_names.size(); ++c)
        if (column_names[c] == name) return c;
    return std::nullopt;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_failure, "cannot open '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) raise(errc::bad_config, "bad line in '" + path + "': " + t);
        out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return out;
}

void write_key_value_file(const std::string& path, const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_failure, "cannot write '" + path + "'");
    for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
    if (!out) raise(errc::io_failure, "write failed for '" + path + "'");
}

CandidateSet load_candidates(const std::string& path, std::optional<CsvSchema> schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_failure, "cannot open '" + path + "'");

    if (!schema) schema = schema_from_sidecar(path);
    const CsvSchema sc = schema.value_or(CsvSchema{});

    std::string line;
    if (!std::getline(in, line)) raise(errc::missing_column, "'" + path + "' is empty (no header row)");
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);
    if (header.empty() || header[0] != "id")
        raise(errc::missing_column, "first column of '" + path + "' must be 'id'");

    // classify columns
    enum class Role { param, objective, feasible };
    std::vector<Role> roles(header.size(), Role::objective);
    std::unordered_set<std::string> param_set(sc.param_columns.begin(), sc.param_columns.end());
    std::vector<std::string> param_names, column_names;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (param_set.count(header[c])) {
            roles[c] = Role::param;
            param_names.push_back(header[c]);
        } else if (!sc.feasible_column.empty() && header[c] == sc.feasible_column) {
            roles[c] = Role::feasible;
        } else {
            column_names.push_back(header[c]);
        }
    }
    for (const auto& want : sc.param_columns)
        if (std::find(param_names.begin(), param_names.end(), want) == param_names.end())
            raise(errc::missing_column, "declared parameter column '" + want + "' missing from '" + path + "'");

    std::vector<std::string> ids;
    std::vector<double> param_cells, obj_cells;
    std::vector<bool> feasible;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            raise(errc::non_numeric_cell, "row " + std::to_string(row) + " of '" + path + "' has " +
                                              std::to_string(cells.size()) + " cells, expected " +
                                              std::to_string(header.size()));
        ids.push_back(trim(cells[0]));
        bool has_flag = false;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const double v = parse_cell(cells[c], row, header[c]);
            switch (roles[c]) {
                case Role::param: param_cells.push_back(v); break;
                case Role::objective: obj_cells.push_back(v); break;
                case Role::feasible:
                    feasible.push_back(v != 0.0);
                    has_flag = true;
                    break;
            }
        }
        if (!has_flag) feasible.push_back(true);
    }

    CandidateSet set;
    set.ids = std::move(ids);
    const std::size_t n = set.ids.size();
    set.param_names = std::move(param_names);
    set.column_names = std::move(column_names);
    set.params = Matrix(set.param_names.empty() ? 0 : n, set.param_names.size());
    set.objectives = Matrix(n, set.column_names.size());
    std::copy(param_cells.begin(), param_cells.end(), set.params.data().begin());
    std::copy(obj_cells.begin(), obj_cells.end(), set.objectives.data().begin());
    set.feasible = std::move(feasible);
    set.operating_points = sc.operating_points;

    // sense map, default minimize
    set.senses.assign(set.column_names.size(), Sense::minimize);
    for (const auto& [name, sense] : sc.senses) {
        bool found = false;
        for (std::size_t c = 0; c < set.column_names.size(); ++c)
            if (set.column_names[c] == name) {
                set.senses[c] = sense;
                found = true;
            }
        if (!found) raise(errc::missing_column, "sense declared for unknown column '" + name + "'");
    }

    if (sc.m_ops != 0) {
        set.m_ops = sc.m_ops;
        set.d_op = sc.d_op;
        set.d_global = sc.d_global;
    } else {
        set.m_ops = 1;
        set.d_op = set.column_names.size();
        set.d_global = 0;
    }

    set.validate();
    return set;
}

void save_candidates(const CandidateSet& set, const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& sidecar_extras) {
    set.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_failure, "cannot write '" + path + "'");

    out << "id";
    for (const auto& p : set.param_names) out << ',' << p;
    for (const auto& c : set.column_names) out << ',' << c;
    out << ",feasible\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        out << set.ids[i];
        for (std::size_t p = 0; p < set.param_names.size(); ++p) out << ',' << format_double(set.params(i, p));
        for (std::size_t c = 0; c < set.objectives.cols(); ++c) out << ',' << format_double(set.objectives(i, c));
        out << ',' << (set.feasible[i] ? '1' : '0') << '\n';
    }
    if (!out) raise(errc::io_failure, "write failed for '" + path + "'");
    out.close();

    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("m_ops", std::to_string(set.m_ops));
    meta.emplace_back("d_op", std::to_string(set.d_op));
    meta.emplace_back("d_global", std::to_string(set.d_global));
    if (!set.param_names.empty()) {
        std::string joined;
        for (const auto& p : set.param_names) {
            if (!joined.empty()) joined += ',';
            joined += p;
        }
        meta.emplace_back("param_columns", joined);
    }
    meta.emplace_back("feasible_column", "feasible");
    for (std::size_t c = 0; c < set.column_names.size(); ++c)
        meta.emplace_back("sense." + set.column_names[c], sense_name(set.senses[c]));
    for (std::size_t i = 0; i < set.operating_points.size(); ++i) {
        const auto& op = set.operating_points[i];
        const std::string prefix = "op." + std::to_string(i) + ".";
        meta.emplace_back(prefix + "label", op.label);
        meta.emplace_back(prefix + "torque", format_double(op.torque_nm));
        meta.emplace_back(prefix + "speed", format_double(op.speed_rpm));
        meta.emplace_back(prefix + "current", format_double(op.current_a));
    }
    meta.insert(meta.end(), sidecar_extras.begin(), sidecar_extras.end());
    write_key_value_file(path + ".meta", meta);
}

Matrix standardize_columns(const Matrix& m, ScaleMode mode, const std::vector<std::string>* names) {
    if (mode == ScaleMode::none) return m;
    Matrix out = m;
    const std::size_t n = m.rows(), k = m.cols();
    if (n == 0) return out;

    auto column_name = [&](std::size_t c) {
        return (names && c < names->size()) ? (*names)[c] : ("#" + std::to_string(c));
    };

    for (std::size_t c = 0; c < k; ++c) {
        if (mode == ScaleMode::zscore) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += m(i, c);
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = m(i, c) - mean;
                var += d * d;
            }
            var /= static_cast<double>(n); // population variance
            if (var <= 0.0)
                raise(errc::zero_variance_column, "column '" + column_name(c) + "' is constant, zscore undefined");
            const double inv_sd = 1.0 / std::sqrt(var);
            for (std::size_t i = 0; i < n; ++i) out(i, c) = (m(i, c) - mean) * inv_sd;
        } else { // minmax
            double lo = m(0, c), hi = m(0, c);
            for (std::size_t i = 1; i < n; ++i) {
                lo = std::min(lo, m(i, c));
                hi = std::max(hi, m(i, c));
            }
            const double range = hi - lo;
            for (std::size_t i = 0; i < n; ++i) out(i, c) = range > 0.0 ? (m(i, c) - lo) / range : 0.0;
        }
    }
    return out;
}

CandidateSet standardize(const CandidateSet& set, ScaleMode mode) {
    CandidateSet out = set;
    out.objectives = standardize_columns(set.objectives, mode, &set.column_names);
    return out;
}

DistanceMatrix pairwise_sq_distances(const Matrix& points) {
    const std::size_t n = points.rows(), k = points.cols();
    if (n < 2 || k < 1) raise(errc::dimension_mismatch, "pairwise_sq_distances needs N >= 2 and K >= 1");
    DistanceMatrix d;
    d.values = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                const double diff = points(i, c) - points(j, c);
                s += diff * diff;
            }
            d.values(i, j) = s;
            d.values(j, i) = s;
        }
    }
    return d;
}

} // namespace motormap
