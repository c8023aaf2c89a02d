#include <doctest.h>

#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

#include "coilsketch/cli/commands.hpp"
#include "coilsketch/io/npy.hpp"

using namespace coilsketch;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "coilsketch_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text)
{
    const fs::path p = dir / "run.ini";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int run(const std::string& cmd, const fs::path& cfg, const fs::path& out, std::string* log = nullptr,
        std::optional<std::string> method = std::nullopt)
{
    std::ostringstream l;
    std::ostringstream e;
    const int code = run_command(cmd, cfg, out, std::nullopt, std::move(method), l, e);
    if (log != nullptr) {
        *log = l.str() + e.str();
    }
    return code;
}

const char* kSmallRadial = "[phantom]\nshape = 32,32\n[coils]\ncount = 6\n[acquisition]\nspokes = 24\n"
                           "[recon]\niters = 30\n[sketch]\nouter = 3\ninner = 5\n";

}  // namespace

TEST_CASE("simulate writes five reloadable arrays deterministically")
{
    const fs::path a = fresh_dir("sim_a");
    const fs::path b = fresh_dir("sim_b");
    const fs::path cfg = write_config(a, kSmallRadial);
    REQUIRE(run("simulate", cfg, a) == kExitOk);
    REQUIRE(run("simulate", cfg, b) == kExitOk);
    for (const char* f : {"phantom.npy", "maps.npy", "trajectory.npy", "weights.npy", "kspace.npy"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
        // Read and rewrite reproduces the file byte for byte.
        write_npy(b / "copy.npy", read_npy(a / f));
        CHECK(slurp(b / "copy.npy") == slurp(a / f));
    }
    const NpyArray k = read_npy(a / "kspace.npy");
    CHECK(k.shape == std::vector<Index>{6, 24 * 64});
}

TEST_CASE("simulate prints the realized acceleration of a random mask")
{
    const fs::path d = fresh_dir("sim_mask");
    const fs::path cfg = write_config(
        d, "[phantom]\nshape = 64,64\n[acquisition]\ntrajectory = cartesian\nmask = random\n"
           "accel = 2\nacs = 8\n");
    std::string log;
    REQUIRE(run("simulate", cfg, d, &log) == kExitOk);
    std::smatch m;
    REQUIRE(std::regex_search(log, m, std::regex(R"(realized R = ([0-9.]+))")));
    const double r = std::stod(m[1]);
    CHECK(r >= 1.8);
    CHECK(r <= 2.2);
}

TEST_CASE("recon of noiseless full sampling recovers the phantom")
{
    const fs::path d = fresh_dir("recon_full");
    const fs::path cfg = write_config(
        d, "[phantom]\nshape = 32,32\n[coils]\ncount = 4\n[acquisition]\ntrajectory = cartesian\n"
           "accel = 1\nnoise_sigma = 0\n[recon]\nregularizer = l2\nsolver = cg\nlambda = 1e-9\n"
           "iters = 60\n");
    REQUIRE(run("simulate", cfg, d) == kExitOk);
    REQUIRE(run("recon", cfg, d) == kExitOk);
    const std::string rec = slurp(d / "record_baseline.csv");
    std::istringstream lines(rec);
    std::string header;
    std::string row;
    std::getline(lines, header);
    std::getline(lines, row);
    std::vector<std::string> cells;
    std::stringstream rs(row);
    for (std::string c; std::getline(rs, c, ',');) {
        cells.push_back(c);
    }
    REQUIRE(cells.size() == BenchRecord::header().size());
    CHECK(std::stod(cells[5]) < 0.01);
    CHECK(fs::exists(d / "recon_baseline.npy"));
    CHECK(fs::exists(d / "recon_baseline.pgm"));
    CHECK(fs::exists(d / "history_baseline.csv"));
}

TEST_CASE("recon writes sketching snapshots and is deterministic")
{
    const fs::path d = fresh_dir("recon_sketch");
    const fs::path cfg = write_config(d, kSmallRadial);
    REQUIRE(run("simulate", cfg, d) == kExitOk);
    REQUIRE(run("recon", cfg, d, nullptr, "coil-sketching") == kExitOk);
    for (int t = 1; t <= 3; ++t) {
        CHECK(fs::exists(d / ("snapshot_coil-sketching_t" + std::to_string(t) + ".npy")));
    }
    const std::string first = slurp(d / "recon_coil-sketching.npy");
    REQUIRE(run("recon", cfg, d, nullptr, "coil-sketching") == kExitOk);
    CHECK(slurp(d / "recon_coil-sketching.npy") == first);
}

TEST_CASE("recon flags divergence with exit code 4")
{
    const fs::path d = fresh_dir("recon_div");
    const fs::path cfg = write_config(
        d, "[phantom]\nshape = 32,32\n[coils]\ncount = 8\n[acquisition]\nspokes = 24\n"
           "[recon]\nmethod = coil-sketching\nlambda = 0.002\n"
           "[sketch]\nc_hat = 4\nv = 4\ns = 0\nouter = 10\ninner = 20\n");
    REQUIRE(run("simulate", cfg, d) == kExitOk);
    std::string log;
    CHECK(run("recon", cfg, d, &log) == kExitDiverged);
    CHECK(log.find("diverged") != std::string::npos);
}

TEST_CASE("exit codes for bad configuration and missing inputs")
{
    const fs::path d = fresh_dir("codes");
    CHECK(run("simulate", write_config(d, "[recon]\nbogus = 1\n"), d) == kExitConfig);
    CHECK(run("simulate", d / "absent.ini", d) == kExitIo);
    CHECK(run("recon", write_config(d, kSmallRadial), d) == kExitIo);
    CHECK(run("explode", write_config(d, kSmallRadial), d) == kExitConfig);
    CHECK(run("recon", write_config(d, kSmallRadial), d, nullptr, "magic") == kExitConfig);
}

TEST_CASE("ablation rows and summary are reproducible")
{
    const fs::path a = fresh_dir("ablate_a");
    const fs::path b = fresh_dir("ablate_b");
    const std::string text = std::string(kSmallRadial) +
                             "[ablate]\nv_values = 2,4\ndistributions = rademacher\nseeds = 2\n";
    const fs::path cfg = write_config(a, text);
    REQUIRE(run("ablate", cfg, a) == kExitOk);
    REQUIRE(run("ablate", cfg, b) == kExitOk);
    CHECK(slurp(a / "ablation.csv") == slurp(b / "ablation.csv"));
    CHECK(slurp(a / "ablation_summary.csv") == slurp(b / "ablation_summary.csv"));
    std::istringstream rows(slurp(a / "ablation.csv"));
    int n = -1;
    for (std::string line; std::getline(rows, line);) {
        ++n;
    }
    CHECK(n == 4);
}

TEST_CASE("seed flag changes the simulated noise")
{
    const fs::path a = fresh_dir("seed_a");
    const fs::path b = fresh_dir("seed_b");
    const fs::path cfg = write_config(a, kSmallRadial);
    std::ostringstream l;
    std::ostringstream e;
    REQUIRE(run_command("simulate", cfg, a, 5, std::nullopt, l, e) == kExitOk);
    REQUIRE(run_command("simulate", cfg, b, 6, std::nullopt, l, e) == kExitOk);
    CHECK(slurp(a / "kspace.npy") != slurp(b / "kspace.npy"));
    CHECK(slurp(a / "phantom.npy") == slurp(b / "phantom.npy"));
}
