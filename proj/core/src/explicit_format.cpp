#include "pbnsynth/explicit_format.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "pbnsynth/errors.hpp"
#include "pbnsynth/pbif.hpp"

namespace pbnsynth {

void write_explicit_pmc(Pmc const& pmc, std::ostream& sink) {
    auto const& params = *pmc.parameter_set();
    sink << "pmc\n";
    sink << "parameters " << params.size() << "\n";
    for (auto const& p : params.all()) {
        sink << "param " << p.name << " " << rational_str(p.lower) << " " << rational_str(p.upper) << "\n";
    }
    sink << "states " << pmc.state_count() << "\n";
    sink << "initial " << pmc.initial() << "\n";
    for (std::size_t s = 0; s < pmc.state_count(); ++s) {
        sink << "state " << s;
        if (s == pmc.initial()) {
            sink << " init";
        }
        for (auto const& [var, val] : pmc.state(s).assignments) {
            sink << " " << var << "=" << val;
        }
        if (pmc.state(s).final_state) {
            sink << " final";
        }
        sink << "\n";
        for (auto const& t : pmc.transitions(s)) {
            sink << "  -> " << t.target << " : " << t.prob.render(PowerStyle::caret) << "\n";
        }
    }
    if (!sink) {
        throw Error("failed to write the explicit chain");
    }
}

std::string explicit_pmc_text(Pmc const& pmc) {
    std::ostringstream out;
    write_explicit_pmc(pmc, out);
    return out.str();
}

namespace {

std::vector<std::string> split_ws(std::string const& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
        out.push_back(token);
    }
    return out;
}

RationalFunction parse_function_text(std::string const& text, ParamSetPtr const& params) {
    // Polynomial renderings are parenthesis-free, so the marker is unambiguous.
    auto marker = text.find(" ) / ( ");
    if (text.size() > 2 && text.rfind("( ", 0) == 0 && marker != std::string::npos) {
        std::string num = text.substr(2, marker - 2);
        std::string den = text.substr(marker + 7);
        if (den.size() < 2 || den.substr(den.size() - 2) != " )") {
            throw Error("malformed rational function text: " + text);
        }
        den = den.substr(0, den.size() - 2);
        return RationalFunction(parse_polynomial(num, params, true), parse_polynomial(den, params, true));
    }
    return RationalFunction(parse_polynomial(text, params, true));
}

}  // namespace

Pmc read_explicit_pmc(std::istream& source) {
    std::string line;
    auto next_line = [&]() {
        while (std::getline(source, line)) {
            if (!line.empty()) {
                return true;
            }
        }
        return false;
    };
    if (!next_line() || line != "pmc") {
        throw Error("explicit chain text must start with 'pmc'");
    }
    if (!next_line()) {
        throw Error("missing parameter header");
    }
    auto header = split_ws(line);
    if (header.size() != 2 || header[0] != "parameters") {
        throw Error("expected 'parameters <count>'");
    }
    std::size_t param_count = std::stoul(header[1]);
    std::vector<Parameter> params;
    for (std::size_t i = 0; i < param_count; ++i) {
        if (!next_line()) {
            throw Error("missing parameter line");
        }
        auto tokens = split_ws(line);
        if (tokens.size() != 4 || tokens[0] != "param") {
            throw Error("expected 'param <name> <lower> <upper>'");
        }
        params.push_back({tokens[1], rational_from_string(tokens[2]), rational_from_string(tokens[3])});
    }
    auto param_set = make_parameter_set(std::move(params));

    if (!next_line()) {
        throw Error("missing state header");
    }
    auto states_header = split_ws(line);
    if (states_header.size() != 2 || states_header[0] != "states") {
        throw Error("expected 'states <count>'");
    }
    std::size_t state_count = std::stoul(states_header[1]);
    if (!next_line()) {
        throw Error("missing initial state line");
    }
    auto initial_header = split_ws(line);
    if (initial_header.size() != 2 || initial_header[0] != "initial") {
        throw Error("expected 'initial <index>'");
    }
    std::size_t initial = std::stoul(initial_header[1]);

    Pmc pmc(param_set);
    for (std::size_t i = 0; i < state_count; ++i) {
        pmc.add_state(PmcState{});
    }
    if (initial >= state_count) {
        throw Error("initial state out of range");
    }
    pmc.set_initial(initial);

    std::size_t current = state_count;
    while (next_line()) {
        auto trimmed = line;
        auto first = trimmed.find_first_not_of(' ');
        bool indented = first != std::string::npos && first > 0;
        auto tokens = split_ws(line);
        if (tokens.empty()) {
            continue;
        }
        if (!indented && tokens[0] == "state") {
            if (tokens.size() < 2) {
                throw Error("state line without an index");
            }
            current = std::stoul(tokens[1]);
            if (current >= state_count) {
                throw Error("state index out of range");
            }
            PmcState state;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                if (tokens[i] == "final") {
                    state.final_state = true;
                } else if (tokens[i] == "init") {
                    continue;
                } else {
                    auto eq = tokens[i].find('=');
                    if (eq == std::string::npos) {
                        throw Error("unrecognized state label '" + tokens[i] + "'");
                    }
                    state.assignments.emplace_back(tokens[i].substr(0, eq), tokens[i].substr(eq + 1));
                }
            }
            // Construction order is the id order.
            pmc.set_state(current, std::move(state));
        } else if (tokens[0] == "->") {
            if (current >= state_count) {
                throw Error("transition before any state line");
            }
            if (tokens.size() < 4 || tokens[2] != ":") {
                throw Error("expected '-> <target> : <function>'");
            }
            std::size_t target = std::stoul(tokens[1]);
            auto colon = line.find(" : ");
            std::string function_text = line.substr(colon + 3);
            pmc.add_transition(current, target, parse_function_text(function_text, param_set));
        } else {
            throw Error("unrecognized line in explicit chain text: " + line);
        }
    }
    return pmc;
}

Pmc read_explicit_pmc(std::string const& text) {
    std::istringstream in(text);
    return read_explicit_pmc(in);
}

}  // namespace pbnsynth
