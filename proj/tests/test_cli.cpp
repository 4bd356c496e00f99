// End-to-end tests of the command line front end: each case launches the
// installed binary in a subprocess and inspects exit code and output files.

#include "doctest.h"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + COVCTRL_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string temp_path(const char* tag) {
    std::ostringstream oss;
    oss << "/tmp/covctrl_cli_" << ::getpid() << "_" << tag;
    return oss.str();
}

std::string slurp(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    REQUIRE(file.good());
    std::ostringstream oss;
    oss << file.rdbuf();
    return oss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(pos));
            break;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return cells;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("verify single: full grid passes and the table is well formed") {
    const std::string out = temp_path("verify_single.csv");
    const int code =
        run_cli("verify --mode single --dims 2,3,4 --p 0:1:11 --out " + out);
    CHECK(code == 0);

    const std::string text = slurp(out);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(!text.empty());
    CHECK(text.back() == '\n');

    const std::vector<std::string> lines = lines_of(text);
    REQUIRE(lines.size() == 34);  // header + 3 dims x 11 grid points
    CHECK(lines[0] ==
          "D,p,lambda_max_numeric,lambda_max_formula,f_opt,tp_residual,two_path_residual,"
          "identity_reconstruction_error,pass");
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const std::vector<std::string> cells = split_csv(lines[k]);
        REQUIRE(cells.size() == 9);
        CHECK(cells.back() == "true");
    }
    // grid order: dimension-major, p ascending
    CHECK(split_csv(lines[1])[0] == "2");
    CHECK(split_csv(lines[12])[0] == "3");
    CHECK(split_csv(lines[33])[1] == "1");
    std::remove(out.c_str());
}

TEST_CASE("verify bipartite: JSON output parses and adjudicates the two forms") {
    const std::string out = temp_path("verify_bipartite.json");
    const int code =
        run_cli("verify --mode bipartite --dims 2 --p 0.4 --format json --out " + out);
    CHECK(code == 0);

    const nlohmann::json doc = nlohmann::json::parse(slurp(out));
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 1);
    const nlohmann::json& rec = doc[0];
    CHECK(rec.at("D").get<int>() == 2);
    CHECK(rec.at("p").get<double>() == doctest::Approx(0.4));
    CHECK(rec.at("lambda_max_formula").get<double>() == doctest::Approx(0.175).epsilon(1e-12));
    CHECK(rec.at("f_spectral").get<double>() == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(rec.at("f_do_nothing").get<double>() == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(rec.at("printed_minus_form").get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rec.at("discrepancy_flag").get<bool>());
    CHECK(rec.at("pass").get<bool>());
    std::remove(out.c_str());
}

TEST_CASE("verify twirl-check: sample ladder rows and the convergence verdict") {
    const std::string out = temp_path("twirl.csv");
    const int code =
        run_cli("verify --mode twirl-check --dims 2 --samples 2000 --out " + out);
    CHECK(code == 0);

    const std::vector<std::string> lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 4);  // header + three ladder rows
    CHECK(lines[0] == "D,n_samples,adjoint_mc_error,uustar_mc_error,pass");
    CHECK(split_csv(lines[1])[1] == "20");
    CHECK(split_csv(lines[2])[1] == "200");
    CHECK(split_csv(lines[3])[1] == "2000");
    const double coarse = std::stod(split_csv(lines[1])[2]);
    const double fine = std::stod(split_csv(lines[3])[2]);
    CHECK(fine < coarse);
    CHECK(split_csv(lines[3])[4] == "true");
    std::remove(out.c_str());
}

TEST_CASE("sweep single: closed-form fidelity column over a grid") {
    const std::string out = temp_path("sweep.csv");
    const int code = run_cli("sweep --mode single --dims 2 --p 0:1:5 --out " + out);
    CHECK(code == 0);

    const std::vector<std::string> lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "D,p,f_opt_formula,lambda_max_numeric");
    const double expected[5] = {1.0, 0.875, 0.75, 0.625, 0.5};
    for (int k = 0; k < 5; ++k) {
        const std::vector<std::string> cells = split_csv(lines[k + 1]);
        REQUIRE(cells.size() == 4);
        CHECK(std::stod(cells[1]) == doctest::Approx(0.25 * k).epsilon(1e-12));
        CHECK(std::stod(cells[2]) == doctest::Approx(expected[k]).epsilon(1e-12));
        CHECK(std::stod(cells[3]) == doctest::Approx(expected[k] / 2.0).epsilon(1e-10));
    }
    std::remove(out.c_str());
}

TEST_CASE("sweep mc: sampled columns appear and match the exact estimand") {
    const std::string out = temp_path("sweep_mc.csv");
    const int code =
        run_cli("sweep --mode mc --dims 2 --p 0.5 --samples 1000 --out " + out);
    CHECK(code == 0);

    const std::vector<std::string> lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "D,p,f_opt_formula,lambda_max_numeric,f_mc,mc_stderr");
    const std::vector<std::string> cells = split_csv(lines[1]);
    REQUIRE(cells.size() == 6);
    // the do-nothing recovery has constant per-sample fidelity
    CHECK(std::stod(cells[4]) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(std::stod(cells[5]) <= 1e-10);
    std::remove(out.c_str());
}

TEST_CASE("oracle: single point certified through the full pipeline") {
    const std::string out = temp_path("oracle.json");
    const int code =
        run_cli("oracle --mode single --dims 2 --p 0.5 --format json --out " + out);
    CHECK(code == 0);

    const nlohmann::json doc = nlohmann::json::parse(slurp(out));
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 1);
    const nlohmann::json& rec = doc[0];
    CHECK(rec.at("primal_value").get<double>() == doctest::Approx(0.75).epsilon(1e-5));
    CHECK(rec.at("dual_value").get<double>() == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(rec.at("f_do_nothing").get<double>() == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rec.at("converged").get<bool>());
    CHECK(rec.at("restarts").get<int>() == 5);
    CHECK(rec.at("restarts_agreeing").get<int>() == 6);
    CHECK(rec.at("identity_action").get<bool>());
    CHECK(rec.at("pass").get<bool>());
    CHECK(!rec.at("bipartite").get<bool>());
    std::remove(out.c_str());

    // the restart budget is adjustable; zero keeps only the default start
    const std::string lean = temp_path("oracle_lean.json");
    CHECK(run_cli("oracle --mode single --dims 2 --p 0.5 --restarts 0 --format json --out " +
                  lean) == 0);
    const nlohmann::json lean_doc = nlohmann::json::parse(slurp(lean));
    CHECK(lean_doc[0].at("restarts").get<int>() == 0);
    CHECK(lean_doc[0].at("restarts_agreeing").get<int>() == 1);
    CHECK(lean_doc[0].at("pass").get<bool>());
    std::remove(lean.c_str());
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("") == 2);                                            // no subcommand
    CHECK(run_cli("verify --mode single --p 0.5") == 2);                // missing --dims
    CHECK(run_cli("verify --mode single --dims 2,,3 --p 0.5") == 2);    // empty entry
    CHECK(run_cli("verify --mode single --dims 1 --p 0.5") == 2);       // dim below 2
    CHECK(run_cli("verify --mode single --dims x --p 0.5") == 2);       // non-numeric dim
    CHECK(run_cli("verify --mode single --dims 2 --p 1.5") == 2);       // p out of range
    CHECK(run_cli("verify --mode single --dims 2 --p 0:2:5") == 2);     // range end > 1
    CHECK(run_cli("verify --mode single --dims 2 --p abc") == 2);       // malformed p
    CHECK(run_cli("verify --mode nonsense --dims 2 --p 0.5") == 2);     // unknown mode
    CHECK(run_cli("verify --mode single --dims 2 --format xml") == 2);  // unknown format
    CHECK(run_cli("verify --mode single --dims 17 --p 0.5") == 2);      // over the verify cap
    CHECK(run_cli("oracle --mode single --dims 9 --p 0.5") == 2);       // over the oracle cap
    CHECK(run_cli("oracle --mode bipartite --dims 4 --p 0.5") == 2);    // over the pair cap
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("write failures exit with code 1") {
    CHECK(run_cli("sweep --mode single --dims 2 --p 0.5 --out /nonexistent_dir/x.csv") == 1);
}

TEST_CASE("identical configuration and seed produce byte-identical files") {
    const std::string out_a = temp_path("det_a.csv");
    const std::string out_b = temp_path("det_b.csv");
    const std::string out_c = temp_path("det_c.csv");
    const std::string args = "verify --mode twirl-check --dims 2,3 --samples 3000 --seed 77 --out ";
    CHECK(run_cli(args + out_a) == 0);
    CHECK(run_cli(args + out_b) == 0);
    CHECK(run_cli("verify --mode twirl-check --dims 2,3 --samples 3000 --seed 78 --out " + out_c) ==
          0);
    const std::string a = slurp(out_a);
    CHECK(a == slurp(out_b));
    CHECK(a != slurp(out_c));
    std::remove(out_a.c_str());
    std::remove(out_b.c_str());
    std::remove(out_c.c_str());
}

TEST_SUITE_END();
