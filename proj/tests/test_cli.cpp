#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const fs::path cli = QMSOLID_CLI_PATH;
const fs::path configs = QMSOLID_CONFIG_DIR;

class Cli : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("qmsolid_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args)
    {
        const std::string cmd =
            "\"" + cli.string() + "\" " + args + " >\"" + (dir_ / "stdout.txt").string() + "\" 2>\"" +
            (dir_ / "stderr.txt").string() + "\"";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string read(const fs::path& p) const
    {
        std::ifstream in(p);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    fs::path write(const std::string& name, const std::string& text) const
    {
        std::ofstream(dir_ / name) << text;
        return dir_ / name;
    }

    std::string out(const std::string& sub = "out") const { return "\"" + (dir_ / sub).string() + "\""; }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, HelpExitsCleanly)
{
    EXPECT_EQ(run("--help"), 0);
    EXPECT_NE(read(dir_ / "stdout.txt").find("sweep"), std::string::npos);
}

TEST_F(Cli, MissingSubcommandIsUsageError)
{
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("launch x.cfg"), 2);
}

TEST_F(Cli, RunsShippedConfigurations)
{
    EXPECT_EQ(run("--out " + out("vol") + " --seed-grid 101 run \"" + (configs / "volume_compare.cfg").string() + "\""),
              0)
        << read(dir_ / "stderr.txt");
    EXPECT_TRUE(fs::exists(dir_ / "vol" / "conversion.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "vol" / "profiles.csv"));
    EXPECT_NE(read(dir_ / "vol" / "summary.txt").find("max_abs_dX"), std::string::npos);

    EXPECT_EQ(run("--out " + out("rp") + " run \"" + (configs / "random_pore.cfg").string() + "\""), 0)
        << read(dir_ / "stderr.txt");
    EXPECT_TRUE(fs::exists(dir_ / "rp" / "conversion.csv"));
}

TEST_F(Cli, CompareForcesReferenceRun)
{
    const auto cfg = write("v.cfg", "model.kind = VolumeFirstOrder\nmodel.thiele = 1\ngrid.n = 101\n"
                                    "grid.theta_end = 1\ngrid.samples = 11\n");
    ASSERT_EQ(run("--quiet --out " + out() + " compare \"" + cfg.string() + "\""), 0) << read(dir_ / "stderr.txt");
    const std::string csv = read(dir_ / "out" / "conversion.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "theta,X_qm,X_fd");
    EXPECT_TRUE(read(dir_ / "stdout.txt").empty());
}

TEST_F(Cli, ConfigErrorsExitWithTwo)
{
    const auto bad = write("bad.cfg", "model.kind = VolumeFirstOrder\nmodel.fp = 2\n");
    EXPECT_EQ(run("run \"" + bad.string() + "\""), 2);
    const std::string err = read(dir_ / "stderr.txt");
    EXPECT_NE(err.find("bad.cfg:2:"), std::string::npos) << err;
    EXPECT_NE(err.find("model.fp"), std::string::npos) << err;
    EXPECT_EQ(run("run \"" + (dir_ / "absent.cfg").string() + "\""), 2);
}

TEST_F(Cli, ThieleSweep)
{
    const auto cfg = write("g.cfg", "model.kind = GrainSimple\nmodel.thiele = 1\ngrid.n = 101\n"
                                    "grid.theta_end = 2\ngrid.samples = 21\n");
    ASSERT_EQ(run("--out " + out() + " sweep \"" + cfg.string() + "\" thiele=0.5,1,2,5"), 0)
        << read(dir_ / "stderr.txt");
    int subdirs = 0;
    for (const auto& e : fs::directory_iterator(dir_ / "out"))
        subdirs += e.is_directory();
    EXPECT_EQ(subdirs, 4);
    EXPECT_TRUE(fs::exists(dir_ / "out" / "003_thiele-5" / "conversion.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out" / "sweep.csv"));
}

TEST_F(Cli, AccumulationSweep)
{
    const auto cfg = write("u.cfg", "model.kind = VolumeFirstOrder\nmodel.thiele = 2\nmodel.psi = 0.025\n"
                                    "grid.n = 101\ngrid.theta_end = 1\ngrid.samples = 11\n");
    ASSERT_EQ(run("--out " + out() + " sweep \"" + cfg.string() + "\" psi=0,0.1"), 0)
        << read(dir_ / "stderr.txt");
    EXPECT_TRUE(fs::exists(dir_ / "out" / "000_psi-0" / "conversion.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out" / "001_psi-0.1" / "conversion.csv"));
}

TEST_F(Cli, SweepNeedsAnAxis)
{
    const auto cfg = write("g.cfg", "model.kind = GrainSimple\nmodel.thiele = 1\n");
    EXPECT_EQ(run("--out " + out() + " sweep \"" + cfg.string() + "\""), 2);
    EXPECT_EQ(run("--out " + out() + " sweep \"" + cfg.string() + "\" thiele="), 2);
    EXPECT_EQ(run("--out " + out() + " sweep \"" + cfg.string() + "\" porosity=1,2"), 2);
}
