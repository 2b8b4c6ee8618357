#include "model_fuzz.hpp"

#include "tamc/modelspec.hpp"

#include <sstream>
#include <vector>

namespace tamc::testkit {

namespace {

struct Generator {
    std::mt19937_64& rng;
    std::vector<std::string> clocks;
    std::vector<std::string> ints;
    std::vector<std::string> channels;
    std::vector<bool> broadcast;

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    bool chance(int percent) { return uniform(1, 100) <= percent; }
    template <typename T>
    const T& pick(const std::vector<T>& xs) { return xs[static_cast<std::size_t>(uniform(0, static_cast<int>(xs.size()) - 1))]; }

    std::string space() { return chance(10) ? "  " : " "; }

    std::string expr(int depth) {
        int choice = depth <= 0 ? uniform(0, 1) : uniform(0, 8);
        switch (choice) {
            case 0: return std::to_string(uniform(-9, 20));
            case 1: return ints.empty() ? std::to_string(uniform(0, 9)) : pick(ints);
            case 2: return "(" + expr(depth - 1) + ")";
            case 3: return expr(depth - 1) + " + " + expr(depth - 1);
            case 4: return expr(depth - 1) + " - " + expr(depth - 1);
            case 5: return expr(depth - 1) + " * " + expr(depth - 1);
            case 6: return expr(depth - 1) + " / " + expr(depth - 1);
            case 7: return expr(depth - 1) + " % " + expr(depth - 1);
            default: return "-" + expr(depth - 1);
        }
    }

    std::string cmp(bool allow_ne) {
        static const std::vector<std::string> ops{"<", "<=", "==", ">=", ">"};
        if (allow_ne && chance(10)) return "!=";
        return pick(ops);
    }

    std::string clock_atom() {
        if (clocks.size() >= 2 && chance(25)) {
            std::string x = pick(clocks), y = pick(clocks);
            while (y == x) y = pick(clocks);
            return x + " - " + y + " " + cmp(false) + " " + std::to_string(uniform(-5, 12));
        }
        return pick(clocks) + " " + cmp(false) + " " + std::to_string(uniform(0, 12));
    }

    std::string int_atom() { return expr(2) + " " + cmp(true) + " " + expr(2); }

    std::string conj(bool clocks_ok) {
        std::vector<std::string> atoms;
        int n = uniform(1, 3);
        for (int i = 0; i < n; ++i) {
            bool use_clock = clocks_ok && !clocks.empty() && (ints.empty() || chance(60));
            atoms.push_back(use_clock ? clock_atom() : int_atom());
        }
        std::string out;
        for (std::size_t i = 0; i < atoms.size(); ++i) out += (i ? " && " : "") + atoms[i];
        return out;
    }

    std::string invariant() {
        std::vector<std::string> atoms;
        int n = uniform(1, 2);
        for (int i = 0; i < n; ++i)
            atoms.push_back(pick(clocks) + (chance(50) ? " <= " : " < ") + std::to_string(uniform(1, 12)));
        std::string out;
        for (std::size_t i = 0; i < atoms.size(); ++i) out += (i ? " && " : "") + atoms[i];
        return out;
    }

    std::string updates() {
        std::vector<std::string> us;
        int n = uniform(1, 3);
        for (int i = 0; i < n; ++i) {
            bool use_clock = !clocks.empty() && (ints.empty() || chance(50));
            if (use_clock) us.push_back(pick(clocks) + " := " + std::to_string(uniform(0, 9)));
            else if (!ints.empty()) us.push_back(pick(ints) + " := " + expr(2));
        }
        std::string out;
        for (std::size_t i = 0; i < us.size(); ++i) out += (i ? ", " : "") + us[i];
        return out;
    }

    std::string model() {
        std::ostringstream out;
        if (chance(50)) out << "// generated model\n";

        int nclocks = uniform(0, 3);
        for (int i = 0; i < nclocks; ++i) clocks.push_back("c" + std::to_string(i));
        if (!clocks.empty()) {
            out << "clock ";
            for (std::size_t i = 0; i < clocks.size(); ++i) out << (i ? ", " : "") << clocks[i];
            out << ";\n";
        }
        int nint_decls = uniform(0, 2);
        for (int d = 0; d < nint_decls; ++d) {
            std::vector<std::string> names;
            int k = uniform(1, 2);
            for (int i = 0; i < k; ++i) names.push_back("v" + std::to_string(ints.size() + names.size()));
            if (chance(70)) out << "int[" << uniform(-10, 0) << "," << uniform(0, 10) << "] ";
            else out << "int ";
            for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
            out << ";" << (chance(20) ? "  // counters" : "") << "\n";
            ints.insert(ints.end(), names.begin(), names.end());
        }
        int nchans = uniform(0, 3);
        for (int i = 0; i < nchans; ++i) {
            bool b = chance(30);
            channels.push_back((b ? "bc" : "ch") + std::to_string(i));
            broadcast.push_back(b);
            out << (b ? "broadcast chan " : "chan ") << channels.back() << ";\n";
        }

        int nprocs = uniform(1, 3);
        std::vector<std::string> procs;
        for (int p = 0; p < nprocs; ++p) {
            procs.push_back("P" + std::to_string(p));
            out << "\nprocess " << procs.back() << " {\n";
            int nlocs = uniform(1, 4);
            for (int l = 0; l < nlocs; ++l) {
                out << "    ";
                int kind = uniform(0, 9);
                if (kind == 0) out << "urgent ";
                else if (kind == 1) out << "committed ";
                out << "loc l" << l;
                if (!clocks.empty() && chance(40)) out << " inv " << invariant();
                out << ";\n";
            }
            out << "    init l" << uniform(0, nlocs - 1) << ";\n";
            int nedges = uniform(0, 5);
            for (int e = 0; e < nedges; ++e) {
                out << "    l" << uniform(0, nlocs - 1) << space() << "->" << space() << "l" << uniform(0, nlocs - 1)
                    << " {";
                std::optional<std::size_t> ch;
                bool receive = false;
                if (!channels.empty() && chance(50)) {
                    ch = static_cast<std::size_t>(uniform(0, static_cast<int>(channels.size()) - 1));
                    receive = chance(50);
                }
                bool clocks_ok = !(ch && receive && broadcast[*ch]);
                if (chance(50) && (clocks_ok ? (!clocks.empty() || !ints.empty()) : !ints.empty()))
                    out << " guard " << conj(clocks_ok) << ";";
                if (ch) out << " sync " << channels[*ch] << (receive ? "?" : "!") << ";";
                if ((!clocks.empty() || !ints.empty()) && chance(50)) out << " assign " << updates() << ";";
                out << " }\n";
            }
            out << "}\n";
        }
        out << "\nsystem ";
        for (std::size_t i = 0; i < procs.size(); ++i) out << (i ? ", " : "") << procs[i];
        out << ";\n";
        return out.str();
    }
};

std::string diagnostics(const std::vector<ParseDiagnostic>& ds) {
    std::string out;
    for (const auto& d : ds) out += to_string(d) + "; ";
    return out;
}

}  // namespace

std::string random_model_text(std::mt19937_64& rng) {
    Generator g{rng, {}, {}, {}, {}};
    return g.model();
}

std::optional<std::string> round_trip_failure(std::string_view text) {
    auto first = parse_model(text);
    if (!first.ok()) return "input does not parse: " + diagnostics(first.diagnostics);
    std::string printed = print_model(*first.value);
    auto second = parse_model(printed);
    if (!second.ok()) return "printed model does not parse: " + diagnostics(second.diagnostics) + "\n" + printed;
    if (!(*second.value == *first.value)) return "printed model parses to a different AST:\n" + printed;
    if (print_model(*second.value) != printed) return "printing is not stable:\n" + printed;
    return std::nullopt;
}

}  // namespace tamc::testkit
