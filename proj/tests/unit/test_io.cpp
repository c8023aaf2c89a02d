#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <limits>
#include <fstream>
#include <iterator>

#include "coilsketch/io/config.hpp"
#include "coilsketch/io/export.hpp"
#include "coilsketch/io/npy.hpp"
#include "helpers.hpp"

using namespace coilsketch;
using testutil::random_vec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "coilsketch_unit";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("npy header layout")
{
    const fs::path p = scratch("layout.npy");
    write_npy(p, NpyArray::real_array(RVec::LinSpaced(6, 0.0, 5.0), {2, 3}));
    const std::string bytes = slurp(p);
    REQUIRE(bytes.size() == 128 + 6 * 8);
    CHECK(bytes.substr(0, 6) == "\x93NUMPY");
    CHECK(bytes[6] == 1);
    CHECK(bytes[7] == 0);
    const std::size_t len = static_cast<unsigned char>(bytes[8]) |
                            (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    CHECK((10 + len) % 64 == 0);
    const std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }";
    CHECK(bytes.substr(10, dict.size()) == dict);
    CHECK(bytes.find_first_not_of(' ', 10 + dict.size()) == 9 + len);
    CHECK(bytes[9 + len] == '\n');
    double third = 0.0;
    std::memcpy(&third, bytes.data() + 128 + 2 * 8, 8);
    CHECK(third == 2.0);
}

TEST_CASE("npy round trip is bit exact")
{
    const Vec v = random_vec(24, 1);
    const fs::path pc = scratch("complex.npy");
    write_npy(pc, NpyArray::complex_array(v, {2, 3, 4}));
    const NpyArray back = read_npy(pc);
    CHECK(back.shape == std::vector<Index>{2, 3, 4});
    CHECK(back.is_complex);
    CHECK(back.to_complex() == v);
    CHECK_THROWS_AS(back.to_real(), IoError);

    const fs::path p1 = scratch("vector.npy");
    write_npy(p1, NpyArray::real_array(RVec::Constant(5, 0.1), {5}));
    CHECK(slurp(p1).find("'shape': (5,)") != std::string::npos);
    CHECK(read_npy(p1).to_real() == RVec::Constant(5, 0.1));

    RMat m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    const fs::path pm = scratch("matrix.npy");
    write_npy(pm, NpyArray::real_matrix(m));
    const NpyArray am = read_npy(pm);
    CHECK(am.data == std::vector<double>{1, 2, 3, 4, 5, 6});
    CHECK(am.to_real_matrix() == m);

    const GridShape s({4, 3});
    const Vec cv = random_vec(24, 2);
    const CMat coils = Eigen::Map<const CMat>(cv.data(), 12, 2);
    const fs::path ps = scratch("coils.npy");
    write_npy(ps, NpyArray::coil_stack(coils, s));
    const NpyArray as = read_npy(ps);
    CHECK(as.shape == std::vector<Index>{2, 4, 3});
    CHECK(coil_columns(as, 12) == coils);
    CHECK_THROWS_AS(coil_columns(as, 10), IoError);
}

TEST_CASE("npy reader rejects bad input")
{
    CHECK_THROWS_AS(read_npy(scratch("missing.npy")), IoError);
    const fs::path junk = scratch("junk.npy");
    std::ofstream(junk) << "not an array";
    CHECK_THROWS_AS(read_npy(junk), IoError);
    const fs::path trunc = scratch("trunc.npy");
    write_npy(trunc, NpyArray::real_array(RVec::Ones(10), {10}));
    fs::resize_file(trunc, fs::file_size(trunc) - 8);
    CHECK_THROWS_AS(read_npy(trunc), IoError);
    CHECK_THROWS_AS(NpyArray::real_array(RVec::Ones(4), {5}), ShapeError);
}

TEST_CASE("pgm export")
{
    const fs::path p = scratch("img.pgm");
    Vec v(4);
    v << 0.0, cplx(0.0, 0.5), 1.0, cplx(-2.0, 0.0);
    write_pgm16(p, Image(GridShape({2, 2}), v));
    const std::string bytes = slurp(p);
    const std::string head = "P5\n2 2\n65535\n";
    REQUIRE(bytes.size() == head.size() + 8);
    CHECK(bytes.substr(0, head.size()) == head);
    auto px = [&](int i) {
        return (static_cast<unsigned char>(bytes[head.size() + 2 * i]) << 8) |
               static_cast<unsigned char>(bytes[head.size() + 2 * i + 1]);
    };
    CHECK(px(0) == 0);
    CHECK(px(1) == 16384);
    CHECK(px(3) == 65535);
}

TEST_CASE("csv writer formats numbers exactly and checks columns")
{
    const fs::path p = scratch("t.csv");
    {
        CsvWriter csv(p, {"a", "b", "c"});
        csv.cell(0.1).cell(static_cast<long long>(7)).cell(true);
        csv.end_row();
        csv.cell("x");
        CHECK_THROWS_AS(csv.end_row(), ShapeError);
    }
    CHECK(slurp(p).rfind("a,b,c\n0.1,7,true\n", 0) == 0);
    CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
    CHECK(std::stod(format_number(2.0 / 7.0)) == 2.0 / 7.0);
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("config defaults and round trip")
{
    const RunConfig def;
    const std::string text = serialize_config(def);
    CHECK(serialize_config(parse_config(text)) == text);
    CHECK(serialize_config(parse_config("")) == text);

    const RunConfig c = parse_config(
        "[run]\nseed = 9\n[phantom]\nshape = 32,48\n[acquisition]\ntrajectory = cartesian\n"
        "mask = random\naccel = 2.5\n[recon]\nmethod = coil-sketching\nregularizer = l1-tv\n"
        "solver = pdhg\n[ablate]\nv_values = 1,2\ndistributions = gaussian\n");
    CHECK(c.seed == 9);
    CHECK(c.phantom.shape == std::vector<Index>{32, 48});
    CHECK(c.acquisition.trajectory == TrajectoryChoice::cartesian);
    CHECK(c.acquisition.mask == MaskKind::random);
    CHECK(c.acquisition.accel == 2.5);
    CHECK(c.recon.method == Method::coil_sketching);
    CHECK(c.recon.regularizer == RegKind::l1_tv);
    CHECK(c.recon.solver == SolverKind::pdhg);
    CHECK(c.ablate.v_values == std::vector<Index>{1, 2});
    CHECK(c.ablate.distributions == std::vector<SketchDistribution>{SketchDistribution::gaussian});
    const std::string t2 = serialize_config(c);
    CHECK(serialize_config(parse_config(t2)) == t2);
}

TEST_CASE("config rejects unknown and malformed entries")
{
    CHECK_THROWS_AS(parse_config("[recon]\nlambada = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("seed = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[recon]\niters = ten\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[recon]\nmethod = magic\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[sketch]\nc_hat = 4\nv = 3\ns = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[coils]\ncount = 0\n"), ConfigError);
    try {
        parse_config("[recon]\nlambda = abc\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("recon.lambda", 0) == 0);
    }
    CHECK_THROWS_AS(load_config(scratch("absent.ini")), IoError);
}

TEST_CASE("seed environment override and derived seeds")
{
    RunConfig c;
    ::setenv("SKETCHRECON_SEED", "1234", 1);
    apply_seed_env(c);
    CHECK(c.seed == 1234);
    ::setenv("SKETCHRECON_SEED", "-4", 1);
    CHECK_THROWS_AS(apply_seed_env(c), ConfigError);
    ::unsetenv("SKETCHRECON_SEED");
    apply_seed_env(c);
    CHECK(c.seed == 1234);

    CHECK(derived_seed(c, SeedUse::coils) != derived_seed(c, SeedUse::noise));
    RunConfig d = c;
    d.seed = 1235;
    CHECK(derived_seed(c, SeedUse::sketch) != derived_seed(d, SeedUse::sketch));
    const MethodSettings ms = method_settings(c);
    CHECK(ms.sketch.sketch.seed == derived_seed(c, SeedUse::sketch));
    CHECK(ms.solver_cfg.max_iters == c.recon.iters);
}
