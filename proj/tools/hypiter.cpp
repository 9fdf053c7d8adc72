// hypiter <command> --config <file> [--seed S] [--out DIR]
//
// Exit codes: 0 success, 2 precondition failure, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hypiter/commands.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw hypiter::PreconditionError("cannot read config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Accepts the two-word spellings "construct t7" and "verify lemma1".
std::string canonical_command(const std::string& word, const std::string& sub, std::optional<std::string>& lemma) {
    if (word == "construct") {
        if (sub != "t7" && sub != "t8") throw hypiter::PreconditionError("construct takes t7 or t8");
        return "construct-" + sub;
    }
    if (word == "verify") {
        if (sub != "lemma1" && sub != "lemma2" && sub != "lemmas") {
            throw hypiter::PreconditionError("verify takes lemma1, lemma2 or lemmas");
        }
        if (sub != "lemmas") lemma = sub;
        return "verify-lemmas";
    }
    if (!sub.empty()) throw hypiter::PreconditionError("unexpected argument '" + sub + "'");
    return word;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random holomorphic iteration experiments on subdomains of the unit disk"};
    std::string command, sub, config_path, out_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("command", command, "bloch | ifs-run | construct-t7 | construct-t8 | dw | verify-lemmas | qc")
        ->required();
    app.add_option("subcommand", sub, "t7/t8 after 'construct', lemma1/lemma2 after 'verify'");
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", seed, "overrides the config seed");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    CLI11_PARSE(app, argc, argv);

    try {
        std::optional<std::string> lemma;
        const std::string name = canonical_command(command, sub, lemma);
        const std::string text = config_path.empty() ? "{}" : read_file(config_path);
        hypiter::Json doc = hypiter::Json::parse(text, nullptr, false);
        hypiter::RunConfig cfg;
        if (doc.is_object() && doc.contains("command")) {
            if (doc["command"] != name) {
                throw hypiter::PreconditionError("config command " + doc["command"].dump() + " does not match '" +
                                                 name + "'");
            }
            cfg = hypiter::parse_config(text);
        } else if (doc.is_object()) {
            doc["command"] = name;
            cfg = hypiter::parse_config(doc.dump(2));
        } else {
            cfg = hypiter::parse_config(text);  // reports the syntax error position
        }
        if (seed) cfg.set("seed", *seed);
        if (!out_dir.empty()) cfg.set("out", out_dir);
        if (lemma) cfg.set("lemma", *lemma);

        const hypiter::Outputs out = hypiter::execute(cfg);
        hypiter::emit_outputs(cfg.text("out"), out);
        std::printf("%s: wrote %s/{trace.csv,report.json,grid.csv}\n", name.c_str(), cfg.text("out").c_str());
        return 0;
    } catch (const hypiter::PreconditionError& e) {
        std::fprintf(stderr, "precondition failure: %s\n", e.what());
        return 2;
    } catch (const hypiter::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
}
