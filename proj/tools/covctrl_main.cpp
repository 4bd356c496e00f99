// Command-line front end. Three subcommands:
//   verify  - per-(D, p) no-go verdicts (single, bipartite, twirl-check)
//   sweep   - plot-ready fidelity tables (single, bipartite, mc)
//   oracle  - brute-force certification over all CPTP recoveries
// Output is CSV or JSON with 17-significant-digit numbers; identical
// configuration and seed produce byte-identical files.
// Exit codes: 0 all checks pass, 1 failed assertion or write error, 2 usage.

#include "covctrl.h"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string mode = "single";
    std::string dims_arg;
    std::string p_arg = "0:1:11";
    std::uint64_t seed = 42;
    std::uint64_t samples = 100000;
    std::uint64_t restarts = 5;
    std::string format = "csv";
    std::string out_path;
};

// Rendered cells that are valid unquoted in both CSV and JSON.
using Row = std::vector<std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;
};

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_bool(int v) { return v ? "true" : "false"; }

bool parse_dims(const std::string& arg, std::vector<std::size_t>& dims, std::string& error) {
    dims.clear();
    std::size_t pos = 0;
    while (pos <= arg.size()) {
        const std::size_t comma = arg.find(',', pos);
        const std::string token =
            arg.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (token.empty()) {
            error = "empty entry in --dims";
            return false;
        }
        try {
            std::size_t used = 0;
            const unsigned long value = std::stoul(token, &used);
            if (used != token.size() || value < 2) {
                error = "--dims entries must be integers >= 2";
                return false;
            }
            dims.push_back(static_cast<std::size_t>(value));
        } catch (const std::exception&) {
            error = "--dims entries must be integers >= 2";
            return false;
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (dims.empty()) {
        error = "--dims list is empty";
        return false;
    }
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
    return true;
}

bool parse_double_token(const std::string& token, double& value) {
    try {
        std::size_t used = 0;
        value = std::stod(token, &used);
        return used == token.size();
    } catch (const std::exception&) {
        return false;
    }
}

// Accepts a single value "x" or an inclusive range "start:end:count".
bool parse_p_grid(const std::string& arg, std::vector<double>& grid, std::string& error) {
    grid.clear();
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t colon = arg.find(':', pos);
        parts.push_back(arg.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos));
        if (colon == std::string::npos) break;
        pos = colon + 1;
    }
    if (parts.size() == 1) {
        double p = 0.0;
        if (!parse_double_token(parts[0], p) || p < 0.0 || p > 1.0) {
            error = "--p value must lie in [0, 1]";
            return false;
        }
        grid.push_back(p);
        return true;
    }
    if (parts.size() != 3) {
        error = "--p expects VALUE or START:END:COUNT";
        return false;
    }
    double start = 0.0, end = 0.0;
    unsigned long count = 0;
    if (!parse_double_token(parts[0], start) || !parse_double_token(parts[1], end)) {
        error = "--p range bounds must be numbers";
        return false;
    }
    try {
        std::size_t used = 0;
        count = std::stoul(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        error = "--p range count must be a positive integer";
        return false;
    }
    if (count < 1 || start < 0.0 || end > 1.0 || start > end) {
        error = "--p range must satisfy 0 <= start <= end <= 1 and count >= 1";
        return false;
    }
    if (count == 1) {
        grid.push_back(start);
        return true;
    }
    for (unsigned long i = 0; i < count; ++i)
        grid.push_back(start + static_cast<double>(i) * (end - start) / static_cast<double>(count - 1));
    return true;
}

bool read_thread_cap(int& threads, std::string& error) {
    threads = 0;
    const char* raw = std::getenv("COVCTRL_THREADS");
    if (!raw || raw[0] == '\0') return true;
    try {
        std::size_t used = 0;
        const int value = std::stoi(raw, &used);
        if (raw[used] != '\0' || value < 0) throw std::invalid_argument("bad value");
        threads = value;
    } catch (const std::exception&) {
        error = "COVCTRL_THREADS must be a non-negative integer";
        return false;
    }
    return true;
}

std::string render_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c) out += ',';
        out += table.header[c];
    }
    out += '\n';
    for (const Row& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += row[c];
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Table& table) {
    std::string out = "[";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += r ? ",\n  {" : "\n  {";
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c) out += ", ";
            out += '"';
            out += table.header[c];
            out += "\": ";
            out += table.rows[r][c];
        }
        out += '}';
    }
    out += table.rows.empty() ? "]\n" : "\n]\n";
    return out;
}

int write_output(const Table& table, const Options& opt) {
    const std::string body = opt.format == "json" ? render_json(table) : render_csv(table);
    if (opt.out_path.empty()) {
        std::cout << body;
        return kExitPass;
    }
    std::ofstream file(opt.out_path, std::ios::binary);
    if (!file) {
        std::cerr << "covctrl: cannot open '" << opt.out_path << "' for writing\n";
        return kExitFailure;
    }
    file << body;
    file.flush();
    if (!file) {
        std::cerr << "covctrl: failed writing '" << opt.out_path << "'\n";
        return kExitFailure;
    }
    return kExitPass;
}

// Shared failure reporting for library statuses. Returns the exit code.
int report_status(covctrl_status status, std::size_t dim) {
    if (status == COVCTRL_ERR_DIMENSION_TOO_LARGE) {
        std::cerr << "covctrl: refusing dimension " << dim << ": "
                  << covctrl_status_message(status) << "\n";
        return kExitUsage;
    }
    if (status == COVCTRL_ERR_INVALID_ARGUMENT) {
        std::cerr << "covctrl: " << covctrl_status_message(status) << "\n";
        return kExitUsage;
    }
    std::cerr << "covctrl: " << covctrl_status_message(status) << "\n";
    return kExitFailure;
}

struct SessionGuard {
    covctrl_session* handle = nullptr;
    ~SessionGuard() { covctrl_session_destroy(handle); }
};

int run_verify(const Options& opt, covctrl_session* session,
               const std::vector<std::size_t>& dims, const std::vector<double>& p_grid) {
    Table table;
    bool all_pass = true;

    if (opt.mode == "single") {
        table.header = {"D", "p", "lambda_max_numeric", "lambda_max_formula", "f_opt",
                        "tp_residual", "two_path_residual", "identity_reconstruction_error", "pass"};
        for (std::size_t dim : dims)
            for (double p : p_grid) {
                covctrl_single_record rec{};
                const covctrl_status status = covctrl_verify_single(session, dim, p, &rec);
                if (status != COVCTRL_OK) return report_status(status, dim);
                all_pass = all_pass && rec.pass;
                table.rows.push_back({std::to_string(rec.dim), fmt_double(rec.p),
                                      fmt_double(rec.lambda_max_numeric),
                                      fmt_double(rec.lambda_max_formula), fmt_double(rec.f_opt),
                                      fmt_double(rec.tp_residual), fmt_double(rec.two_path_residual),
                                      fmt_double(rec.identity_reconstruction_error),
                                      fmt_bool(rec.pass)});
            }
    } else if (opt.mode == "bipartite") {
        table.header = {"D", "p", "lambda_max_numeric", "lambda_max_formula", "f_spectral",
                        "f_do_nothing", "printed_minus_form", "discrepancy_flag", "eigvec_residual",
                        "identity_reconstruction_error", "pass"};
        for (std::size_t dim : dims)
            for (double p : p_grid) {
                covctrl_bipartite_record rec{};
                const covctrl_status status = covctrl_verify_bipartite(session, dim, p, &rec);
                if (status != COVCTRL_OK) return report_status(status, dim);
                all_pass = all_pass && rec.pass;
                table.rows.push_back(
                    {std::to_string(rec.dim), fmt_double(rec.p), fmt_double(rec.lambda_max_numeric),
                     fmt_double(rec.lambda_max_formula), fmt_double(rec.f_spectral),
                     fmt_double(rec.f_do_nothing), fmt_double(rec.printed_minus_form),
                     fmt_bool(rec.discrepancy_flag), fmt_double(rec.eigvec_residual),
                     fmt_double(rec.identity_reconstruction_error), fmt_bool(rec.pass)});
            }
    } else {  // twirl-check
        table.header = {"D", "n_samples", "adjoint_mc_error", "uustar_mc_error", "pass"};
        for (std::size_t dim : dims) {
            const std::uint64_t ladder[3] = {std::max<std::uint64_t>(1, opt.samples / 100),
                                             std::max<std::uint64_t>(1, opt.samples / 10),
                                             std::max<std::uint64_t>(1, opt.samples)};
            covctrl_twirl_record recs[3] = {};
            for (int k = 0; k < 3; ++k) {
                const covctrl_status status = covctrl_twirl_check(session, dim, ladder[k], &recs[k]);
                if (status != COVCTRL_OK) return report_status(status, dim);
            }
            // The Monte Carlo averages must approach the closed forms as the
            // sample count grows across the ladder.
            const bool pass = recs[2].adjoint_mc_error <= recs[0].adjoint_mc_error &&
                              recs[2].uustar_mc_error <= recs[0].uustar_mc_error;
            all_pass = all_pass && pass;
            for (const covctrl_twirl_record& rec : recs)
                table.rows.push_back({std::to_string(rec.dim), std::to_string(rec.n_samples),
                                      fmt_double(rec.adjoint_mc_error),
                                      fmt_double(rec.uustar_mc_error), fmt_bool(pass)});
        }
    }

    const int write_code = write_output(table, opt);
    if (write_code != kExitPass) return write_code;
    return all_pass ? kExitPass : kExitFailure;
}

int run_sweep(const Options& opt, covctrl_session* session,
              const std::vector<std::size_t>& dims, const std::vector<double>& p_grid) {
    Table table;
    const bool bipartite = opt.mode == "bipartite";
    const bool with_mc = opt.mode == "mc";
    table.header = {"D", "p", "f_opt_formula", "lambda_max_numeric"};
    if (with_mc) {
        table.header.push_back("f_mc");
        table.header.push_back("mc_stderr");
    }
    for (std::size_t dim : dims)
        for (double p : p_grid) {
            covctrl_sweep_record rec{};
            const covctrl_status status = covctrl_sweep_point(
                session, dim, p, bipartite ? 1 : 0, with_mc ? opt.samples : 0, &rec);
            if (status != COVCTRL_OK) return report_status(status, dim);
            Row row{std::to_string(rec.dim), fmt_double(rec.p), fmt_double(rec.f_opt_formula),
                    fmt_double(rec.lambda_max_numeric)};
            if (with_mc) {
                row.push_back(fmt_double(rec.f_mc));
                row.push_back(fmt_double(rec.mc_stderr));
            }
            table.rows.push_back(std::move(row));
        }
    return write_output(table, opt);
}

int run_oracle(const Options& opt, covctrl_session* session,
               const std::vector<std::size_t>& dims, const std::vector<double>& p_grid) {
    Table table;
    table.header = {"D", "p", "bipartite", "primal_value", "dual_value", "gap", "f_do_nothing",
                    "converged", "iterations", "restarts", "restarts_agreeing", "identity_action",
                    "pass"};
    bool all_pass = true;
    const bool bipartite = opt.mode == "bipartite";
    for (std::size_t dim : dims)
        for (double p : p_grid) {
            covctrl_oracle_record rec{};
            const covctrl_status status =
                covctrl_certify(session, dim, p, bipartite ? 1 : 0, opt.restarts, &rec);
            if (status != COVCTRL_OK && status != COVCTRL_ERR_NOT_CONVERGED)
                return report_status(status, dim);
            all_pass = all_pass && rec.pass && status == COVCTRL_OK;
            table.rows.push_back(
                {std::to_string(rec.dim), fmt_double(rec.p), fmt_bool(rec.bipartite),
                 fmt_double(rec.primal_value), fmt_double(rec.dual_value), fmt_double(rec.gap),
                 fmt_double(rec.f_do_nothing), fmt_bool(rec.converged),
                 std::to_string(rec.iterations), std::to_string(rec.restarts),
                 std::to_string(rec.restarts_agreeing), fmt_bool(rec.identity_action),
                 fmt_bool(rec.pass)});
        }
    const int write_code = write_output(table, opt);
    if (write_code != kExitPass) return write_code;
    return all_pass ? kExitPass : kExitFailure;
}

void add_common_options(CLI::App* cmd, Options& opt, const std::vector<std::string>& modes) {
    cmd->add_option("--mode", opt.mode, "What to compute")
        ->check(CLI::IsMember(modes))
        ->capture_default_str();
    cmd->add_option("--dims", opt.dims_arg, "Comma-separated qudit dimensions (each >= 2)")
        ->required();
    cmd->add_option("--p", opt.p_arg, "Depolarizing probability: VALUE or START:END:COUNT")
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "Base RNG seed")->capture_default_str();
    cmd->add_option("--samples", opt.samples, "Monte Carlo sample count")->capture_default_str();
    cmd->add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", opt.out_path, "Output path (stdout when omitted)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certifies that no recovery operation beats doing nothing "
                 "against depolarizing noise on an unknown qudit"};
    app.require_subcommand(1);

    Options verify_opt, sweep_opt, oracle_opt;
    CLI::App* verify = app.add_subcommand("verify", "Run per-(D, p) no-go verdicts");
    add_common_options(verify, verify_opt, {"single", "bipartite", "twirl-check"});
    CLI::App* sweep = app.add_subcommand("sweep", "Tabulate optimal fidelities over a grid");
    add_common_options(sweep, sweep_opt, {"single", "bipartite", "mc"});
    CLI::App* oracle = app.add_subcommand("oracle", "Certify the optimum over all CPTP recoveries");
    add_common_options(oracle, oracle_opt, {"single", "bipartite"});
    oracle->add_option("--restarts", oracle_opt.restarts,
                       "Random starting points per grid point beyond the default one")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    const Options& opt = verify->parsed() ? verify_opt : sweep->parsed() ? sweep_opt : oracle_opt;

    std::string error;
    std::vector<std::size_t> dims;
    std::vector<double> p_grid;
    int threads = 0;
    if (!parse_dims(opt.dims_arg, dims, error) || !parse_p_grid(opt.p_arg, p_grid, error) ||
        !read_thread_cap(threads, error)) {
        std::cerr << "covctrl: " << error << "\n";
        return kExitUsage;
    }

    SessionGuard session;
    if (covctrl_session_create(opt.seed, threads, &session.handle) != COVCTRL_OK) {
        std::cerr << "covctrl: failed to create session\n";
        return kExitFailure;
    }

    if (verify->parsed()) return run_verify(opt, session.handle, dims, p_grid);
    if (sweep->parsed()) return run_sweep(opt, session.handle, dims, p_grid);
    return run_oracle(opt, session.handle, dims, p_grid);
}
