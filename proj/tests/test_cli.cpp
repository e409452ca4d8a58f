// SPDX-License-Identifier: Apache-2.0
/*
Copyright (C) 2026 The vaefp Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <gtest/gtest.h>

#include "support.hpp"

namespace vt = vaefp::testing;

namespace {

const std::string kCli = VAEFP_CLI_PATH;

vt::CommandResult cli(const std::string& args) {
	return vt::run_command("'" + kCli + "' " + args);
}

std::string q(const std::filesystem::path& p) {
	return "'" + p.string() + "'";
}

std::size_t count_epoch_rows(const std::string& out) {
	std::istringstream in(out);
	std::string line;
	std::size_t n = 0;
	bool in_table = false;
	while (std::getline(in, line)) {
		if (line.find("epoch") != std::string::npos && line.find("recon") != std::string::npos) {
			in_table = true;
			continue;
		}
		if (in_table) {
			if (line.find("r_last") != std::string::npos) {
				break;
			}
			++n;
		}
	}
	return n;
}

} // namespace

TEST(Cli, SimulateIsDeterministicAndAnnouncesWindows) {
	vt::TempDir dir("cli");
	const auto a = cli("simulate --scenario httpflood --duration 1500 --sim-seed 3 --out " + q(dir / "a.ndjson"));
	const auto b = cli("simulate --scenario httpflood --duration 1500 --sim-seed 3 --out " + q(dir / "b.ndjson"));
	ASSERT_EQ(a.status, 0);
	EXPECT_EQ(a.out, b.out);
	EXPECT_NE(a.out.find("attack windows 5"), std::string::npos) << a.out;
	EXPECT_EQ(vt::slurp(dir / "a.ndjson"), vt::slurp(dir / "b.ndjson"));
	std::ifstream in(dir / "a.ndjson");
	EXPECT_NO_THROW(vaefp::read_trace(in));
}

TEST(Cli, SimulateWritesMarkers) {
	vt::TempDir dir("cli");
	const auto r = cli("simulate --scenario cpuminer --duration 900 --out " + q(dir / "t.ndjson") + " --markers-out " +
	                   q(dir / "m.tsv"));
	ASSERT_EQ(r.status, 0);
	const auto markers = vt::slurp(dir / "m.tsv");
	EXPECT_NE(markers.find("shell_connect"), std::string::npos);
	EXPECT_NE(markers.find("miner_execution"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
	vt::TempDir dir("cli");
	EXPECT_EQ(cli("simulate --scenario nosuch --out " + q(dir / "x")).status, 2);
	EXPECT_EQ(cli("").status, 2);
	EXPECT_EQ(cli("--no-such-flag simulate").status, 2);
	EXPECT_EQ(cli("train --scenario baseline --duration 60 --epochs 0 --model-out " + q(dir / "m")).status, 2);
	EXPECT_EQ(cli("train --scenario baseline --k 3 --heuristic 1 --model-out " + q(dir / "m")).status, 2);
	EXPECT_EQ(cli("simulate --scenario cpuminer --duration 600 --out " + q(dir / "x")).status, 2);
}

TEST(Cli, HelpExitsZero) {
	const auto r = cli("--help");
	EXPECT_EQ(r.status, 0);
	EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST(Cli, TooFewIntervalsIsDataError) {
	vt::TempDir dir("cli");
	ASSERT_EQ(cli("simulate --scenario baseline --duration 1500 --out " + q(dir / "t.ndjson")).status, 0);
	const auto r = cli("train --trace " + q(dir / "t.ndjson") + " --model-out " + q(dir / "m.json"));
	EXPECT_EQ(r.status, 3);
	EXPECT_FALSE(std::filesystem::exists(dir / "m.json"));
}

TEST(Cli, MalformedTraceIsDataError) {
	vt::TempDir dir("cli");
	std::ofstream(dir / "bad.ndjson") << "{\"t\":1}\n";
	EXPECT_EQ(cli("train --trace " + q(dir / "bad.ndjson") + " --model-out " + q(dir / "m.json")).status, 3);
}

TEST(Cli, MissingFilesAreIoErrors) {
	vt::TempDir dir("cli");
	EXPECT_EQ(cli("train --trace " + q(dir / "absent") + " --model-out " + q(dir / "m.json")).status, 5);
	EXPECT_EQ(cli("assess --scenario baseline --duration 60 --model " + q(dir / "absent")).status, 5);
}

TEST(Cli, CorruptModelExitsFour) {
	vt::TempDir dir("cli");
	std::ofstream(dir / "m.json") << "{\"format\":\"vaefp-model\",\"version\":1";
	EXPECT_EQ(cli("assess --scenario baseline --duration 60 --model " + q(dir / "m.json")).status, 4);
	EXPECT_EQ(cli("assess --scenario baseline --duration 60 --model-dir " + q(dir.path())).status, 4);
}

TEST(Cli, TrainAssessBenchRoundTrip) {
	vt::TempDir dir("cli");
	const std::string common = " --scenario baseline --duration 3600 --sim-seed 1 --epochs 5";
	const auto t1 = cli("train" + common + " --model-out " + q(dir / "a.json") + " --curve-out " + q(dir / "c.csv"));
	const auto t2 = cli("train" + common + " --model-out " + q(dir / "b.json"));
	ASSERT_EQ(t1.status, 0) << t1.out;
	ASSERT_EQ(t2.status, 0);
	EXPECT_EQ(vt::slurp(dir / "a.json"), vt::slurp(dir / "b.json"));
	EXPECT_EQ(count_epoch_rows(t1.out), 5u);
	const auto bundle = vaefp::load_model(dir / "a.json");
	EXPECT_EQ(bundle.curve.recon.size(), 5u);
	const auto curve = vt::slurp(dir / "c.csv");
	EXPECT_EQ(std::count(curve.begin(), curve.end(), '\n'), 6);

	const std::string flood = " --scenario httpflood --duration 600 --sim-seed 3 --model " + q(dir / "a.json");
	const auto a1 = cli("assess" + flood + " --out " + q(dir / "r1.ndjson"));
	const auto a2 = cli("assess" + flood + " --out " + q(dir / "r2.ndjson"));
	ASSERT_EQ(a1.status, 0);
	EXPECT_EQ(a1.out, a2.out);
	EXPECT_EQ(vt::slurp(dir / "r1.ndjson"), vt::slurp(dir / "r2.ndjson"));
	std::istringstream recs(vt::slurp(dir / "r1.ndjson"));
	std::string line;
	std::size_t n = 0;
	while (std::getline(recs, line)) {
		const auto j = nlohmann::json::parse(line);
		EXPECT_TRUE(j.contains("recon_error"));
		++n;
	}
	EXPECT_EQ(n, 20u);

	const auto b = cli("bench" + flood + " --out " + q(dir / "cost.json"));
	ASSERT_EQ(b.status, 0);
	const auto cost = nlohmann::json::parse(vt::slurp(dir / "cost.json"));
	EXPECT_EQ(cost["standard"]["intervals"], 20);
	EXPECT_TRUE(cost["bytes_ratio"].is_number());
}

TEST(Cli, FileSinkReceivesRecords) {
	vt::TempDir dir("cli");
	ASSERT_EQ(cli("train --scenario baseline --duration 3600 --epochs 3 --model-out " + q(dir / "m.json")).status, 0);
	const auto r = cli("assess --scenario httpflood --duration 300 --model " + q(dir / "m.json") +
	                   " --sink file --sink-path " + q(dir / "sink.ndjson"));
	ASSERT_EQ(r.status, 0);
	const auto content = vt::slurp(dir / "sink.ndjson");
	EXPECT_EQ(std::count(content.begin(), content.end(), '\n'), 10);
	EXPECT_NE(content.find("\"forensics\""), std::string::npos);
}

TEST(Cli, ConfigFileAndFlagOverride) {
	vt::TempDir dir("cli");
	std::ofstream(dir / "cfg.toml") << "epochs = 3\nsim-seed = 1\nduration = 3600.0\nscenario = \"baseline\"\n";
	const auto from_file = cli("--config " + q(dir / "cfg.toml") + " train --model-out " + q(dir / "a.json"));
	ASSERT_EQ(from_file.status, 0) << from_file.out;
	EXPECT_EQ(count_epoch_rows(from_file.out), 3u);
	const auto overridden =
	    cli("--config " + q(dir / "cfg.toml") + " train --epochs 4 --model-out " + q(dir / "b.json"));
	ASSERT_EQ(overridden.status, 0);
	EXPECT_EQ(count_epoch_rows(overridden.out), 4u);
	EXPECT_EQ(vaefp::load_model(dir / "b.json").model.meta.epochs, 4);

	// Same settings given as flags produce the same bundle.
	ASSERT_EQ(cli("train --epochs 3 --sim-seed 1 --duration 3600 --scenario baseline --model-out " +
	              q(dir / "c.json"))
	              .status,
	          0);
	EXPECT_EQ(vt::slurp(dir / "a.json"), vt::slurp(dir / "c.json"));
}

TEST(Cli, ModelDirPerContainer) {
	vt::TempDir dir("cli");
	ASSERT_EQ(cli("train --scenario baseline --duration 3600 --epochs 2 --container web-a --model-dir " +
	              q(dir / "models"))
	              .status,
	          0);
	EXPECT_TRUE(std::filesystem::exists(vaefp::bundle_path(dir / "models", "web-a")));
	EXPECT_EQ(cli("assess --scenario baseline --duration 120 --container web-a --model-dir " + q(dir / "models"))
	              .status,
	          0);
	EXPECT_EQ(cli("assess --scenario baseline --duration 120 --container web-b --model-dir " + q(dir / "models"))
	              .status,
	          4);
}
