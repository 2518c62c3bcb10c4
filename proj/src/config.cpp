#include "mobility/config.hpp"

#include "mobility/format.hpp"
#include "mobility/synthgen.hpp"
#include "mobility/types.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace mobility {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double_field(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config: bad value for " + key + ": " + value);
    }
}

std::string slurp(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open ") + what + ": " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

MovementBoundary parse_boundary_text(const std::string& text) {
    MovementBoundary bd = default_boundary();
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ValidationError("boundary line " + std::to_string(line_no) +
                                  ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "rest_y") {
            bd.rest_y = parse_double_field(value, key);
        } else if (key == "overhead_y") {
            bd.overhead_y = parse_double_field(value, key);
        } else if (key == "lateral_left_x") {
            bd.lateral_left_x = parse_double_field(value, key);
        } else if (key == "lateral_right_x") {
            bd.lateral_right_x = parse_double_field(value, key);
        } else if (key == "forward_z") {
            bd.forward_z = parse_double_field(value, key);
        } else {
            throw ValidationError("boundary: unknown key: " + key);
        }
    }
    bd.validate();
    return bd;
}

MovementBoundary load_boundary(const std::string& path) {
    return parse_boundary_text(slurp(path, "boundary file"));
}

std::string boundary_text(const MovementBoundary& boundary) {
    std::string out;
    out += "rest_y = " + format_double(boundary.rest_y) + "\n";
    out += "overhead_y = " + format_double(boundary.overhead_y) + "\n";
    out += "lateral_left_x = " + format_double(boundary.lateral_left_x) + "\n";
    out += "lateral_right_x = " + format_double(boundary.lateral_right_x) + "\n";
    out += "forward_z = " + format_double(boundary.forward_z) + "\n";
    return out;
}

std::vector<LevelSpec> parse_level_config(const std::string& text) {
    std::vector<LevelSpec> specs = LevelSpec::standard_four();
    LevelSpec* current = nullptr;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ValidationError("level config line " + std::to_string(line_no) +
                                      ": unterminated section header");
            const std::string id = trim(stripped.substr(1, stripped.size() - 2));
            current = nullptr;
            for (LevelSpec& spec : specs)
                if (spec.id == id) current = &spec;
            if (!current) throw ValidationError("level config: unknown level: " + id);
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ValidationError("level config line " + std::to_string(line_no) +
                                  ": expected key = value");
        if (!current)
            throw ValidationError("level config line " + std::to_string(line_no) +
                                  ": key outside a [level] section");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "bpm") {
            current->bpm = parse_double_field(value, key);
        } else if (key == "movement_type") {
            current->movement_type = movement_type_from_string(value);
        } else if (key == "hold_min_s") {
            current->hold_min_s = parse_double_field(value, key);
        } else if (key == "hold_max_s") {
            current->hold_max_s = parse_double_field(value, key);
        } else if (key == "duration_s") {
            current->duration_s = parse_double_field(value, key);
        } else {
            throw ValidationError("level config: unknown key: " + key);
        }
    }
    for (const LevelSpec& spec : specs) spec.validate();
    return specs;
}

std::vector<LevelSpec> load_level_config(const std::string& path) {
    return parse_level_config(slurp(path, "level config"));
}

}  // namespace mobility
