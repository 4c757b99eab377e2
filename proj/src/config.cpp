#include "rsiu/config.hpp"

#include <fstream>
#include <sstream>

#include "rsiu/csv.hpp"
#include "rsiu/errors.hpp"

namespace rsiu {

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

VecD parse_list(const std::string& s) {
    VecD v;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ';')) {
        item = trim(item);
        if (!item.empty()) v.push_back(std::stod(item));
    }
    return v;
}

std::string list_str(const VecD& v) { return fmt_vec(v); }

} // namespace

void ExperimentConfig::write(std::ostream& os) const {
    os << "# experiment configuration\n";
    os << "testbed = " << testbed << "\n";
    os << "procedure = " << procedure << "\n";
    os << "alpha = " << fmt_double(alpha) << "\n";
    os << "eta = " << fmt_double(eta) << "\n";
    os << "n0 = " << n0 << "\n";
    os << "batch = " << batch << "\n";
    os << "stage_cap = " << stage_cap << "\n";
    os << "pilot = " << pilot << "\n";
    os << "T = " << list_str(t_list) << "\n";
    os << "cd = " << list_str(cd) << "\n";
    os << "cs = " << fmt_double(cs) << "\n";
    os << "rho0 = " << fmt_double(rho0) << "\n";
    os << "n0_base = " << fmt_double(n0_base) << "\n";
    os << "n0_slope = " << fmt_double(n0_slope) << "\n";
    os << "n0_ref = " << fmt_double(n0_ref) << "\n";
    os << "pi0 = " << fmt_double(pi0) << "\n";
    os << "m0 = " << m0 << "\n";
    os << "m0_frac = " << fmt_double(m0_frac) << "\n";
    os << "delta = " << delta << "\n";
    os << "oracle = " << (oracle ? 1 : 0) << "\n";
    os << "fractions = " << list_str(fractions) << "\n";
    os << "reps = " << reps << "\n";
    os << "seed = " << seed << "\n";
    os << "workers = " << workers << "\n";
    os << "out = " << out << "\n";
    os << "track_i = " << track_i << "\n";
    os << "track_j = " << track_j << "\n";
    os << "region_stages = " << region_stages << "\n";
}

std::string ExperimentConfig::to_string() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        bool known = true;
        try {
            if (key == "testbed") c.testbed = val;
            else if (key == "procedure") c.procedure = val;
            else if (key == "alpha") c.alpha = std::stod(val);
            else if (key == "eta") c.eta = std::stod(val);
            else if (key == "n0") c.n0 = std::stoi(val);
            else if (key == "batch") c.batch = std::stoi(val);
            else if (key == "stage_cap") c.stage_cap = std::stoi(val);
            else if (key == "pilot") c.pilot = std::stoi(val);
            else if (key == "T") c.t_list = parse_list(val);
            else if (key == "cd") c.cd = parse_list(val);
            else if (key == "cs") c.cs = std::stod(val);
            else if (key == "rho0") c.rho0 = std::stod(val);
            else if (key == "n0_base") c.n0_base = std::stod(val);
            else if (key == "n0_slope") c.n0_slope = std::stod(val);
            else if (key == "n0_ref") c.n0_ref = std::stod(val);
            else if (key == "pi0") c.pi0 = std::stod(val);
            else if (key == "m0") c.m0 = std::stoi(val);
            else if (key == "m0_frac") c.m0_frac = std::stod(val);
            else if (key == "delta") c.delta = std::stoi(val);
            else if (key == "oracle") c.oracle = std::stoi(val) != 0;
            else if (key == "fractions") c.fractions = parse_list(val);
            else if (key == "reps") c.reps = std::stoi(val);
            else if (key == "seed") c.seed = std::stoull(val);
            else if (key == "workers") c.workers = std::stoi(val);
            else if (key == "out") c.out = val;
            else if (key == "track_i") c.track_i = std::stoi(val);
            else if (key == "track_j") c.track_j = std::stoi(val);
            else if (key == "region_stages") c.region_stages = std::stoi(val);
            else known = false;
        } catch (const std::invalid_argument&) {
            throw DomainError("config line " + std::to_string(lineno) + ": bad value for " + key);
        }
        if (!known) throw DomainError("unknown config key: " + key);
    }
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot open config file: " + path);
    return parse_config(f);
}

ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

} // namespace rsiu
