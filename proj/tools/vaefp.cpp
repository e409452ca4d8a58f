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

// vaefp command-line front end: simulate, train, assess, bench.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <vaefp/http_sink.hpp>
#include <vaefp/vaefp.hpp>

namespace fs = std::filesystem;
using namespace vaefp;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kModel = 4, kIo = 5, kInternal = 1 };

int exit_code_for(ErrorKind kind) {
	switch (kind) {
	case ErrorKind::Config:
		return kUsage;
	case ErrorKind::Data:
		return kData;
	case ErrorKind::Model:
		return kModel;
	case ErrorKind::Io:
		return kIo;
	}
	return kInternal;
}

struct SourceOptions {
	std::string trace;
	std::string scenario;
	ScenarioConfig sim;
};

struct SinkOptions {
	std::string kind = "none";
	std::string path;
	BulkEndpoint endpoint;
	std::string spool_dir;
};

struct Options {
	double interval = kDefaultIntervalSeconds;
	TrainConfig train;
	double k = 3.0;
	double heuristic = 0.0;
	std::size_t cache_capacity = 4;
	SourceOptions source;
	SinkOptions sink;
	// per-subcommand
	std::string out;
	std::string model;
	std::string model_dir;
	std::string curve_out;
	std::string markers_out;
};

// Policy flags given on the command line (or config) override the policy a bundle was saved with.
struct PolicyFlags {
	CLI::Option* k = nullptr;
	CLI::Option* heuristic = nullptr;

	bool given() const { return k->count() > 0 || heuristic->count() > 0; }
};

PolicySpec policy_spec(const Options& o, const PolicyFlags& flags) {
	PolicySpec p;
	if (flags.heuristic->count() > 0) {
		p.kind = PolicySpec::Kind::Heuristic;
		p.value = o.heuristic;
		make_heuristic_threshold(p.value);
	} else {
		p.kind = PolicySpec::Kind::KSigma;
		p.value = o.k;
		fit_threshold_ksigma(0.0, 0.0, p.value);
	}
	return p;
}

GeneratedTrace simulate_scenario(const SourceOptions& s) {
	auto cfg = s.sim;
	if (s.scenario == "baseline") {
		return {gen_baseline(cfg), {{0.0, "normal"}}};
	}
	if (s.scenario == "cpuminer") {
		if (cfg.phase_schedule.empty()) {
			cfg.phase_schedule = default_cpuminer_schedule();
		}
		return gen_cpuminer_scenario(cfg);
	}
	if (s.scenario == "httpflood") {
		return gen_httpflood_scenario(cfg);
	}
	throw InvalidConfig("unknown scenario '" + s.scenario + "'");
}

std::vector<ForensicEvent> load_events(const SourceOptions& s) {
	if (!s.trace.empty()) {
		std::ifstream in(s.trace, std::ios::binary);
		if (!in) {
			throw IoError("cannot open trace '" + s.trace + "'");
		}
		return read_trace(in);
	}
	if (!s.scenario.empty()) {
		return simulate_scenario(s).events;
	}
	throw InvalidConfig("need --trace or --scenario");
}

void write_text(const std::string& path, const std::string& text) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	out << text;
	if (!out) {
		throw IoError("cannot write '" + path + "'");
	}
}

std::vector<std::string> containers_of(const IntervalStream& stream) {
	std::vector<std::string> ids;
	for (const auto& g : stream.groups) {
		if (ids.empty() || ids.back() != g.key.container_id) {
			ids.push_back(g.key.container_id);
		}
	}
	return ids;
}

// --model applies one bundle to every container in the trace; --model-dir
// looks each container up by name.
std::vector<ModelBundle> load_bundles(const Options& o, const IntervalStream& stream) {
	std::vector<ModelBundle> bundles;
	if (!o.model.empty()) {
		const auto b = load_model(o.model);
		for (const auto& id : containers_of(stream)) {
			bundles.push_back(b);
			bundles.back().container_id = id;
		}
		return bundles;
	}
	if (!o.model_dir.empty()) {
		for (const auto& id : containers_of(stream)) {
			const auto path = bundle_path(o.model_dir, id);
			if (!fs::exists(path)) {
				throw CorruptModelFile("no bundle for container '" + id + "' at " + path.string());
			}
			bundles.push_back(load_model(path));
		}
		return bundles;
	}
	throw InvalidConfig("need --model or --model-dir");
}

PublisherConfig publisher_config(const Options& o, const PolicyFlags& flags) {
	PublisherConfig cfg;
	cfg.train = o.train;
	cfg.policy = policy_spec(o, flags);
	cfg.override_bundle_policy = flags.given();
	cfg.cache_capacity = o.cache_capacity;
	return cfg;
}

std::string fmt(double v) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.6g", v);
	return buf;
}

int cmd_simulate(const Options& o) {
	if (o.source.scenario.empty()) {
		throw InvalidConfig("simulate needs --scenario");
	}
	const auto trace = simulate_scenario(o.source);
	{
		std::ofstream out(o.out, std::ios::binary | std::ios::trunc);
		if (!out) {
			throw IoError("cannot write '" + o.out + "'");
		}
		write_trace(out, trace.events);
		if (!out) {
			throw IoError("write to '" + o.out + "' failed");
		}
	}
	if (!o.markers_out.empty()) {
		std::string text;
		for (const auto& m : trace.markers) {
			text += fmt(m.t) + "\t" + m.label + "\n";
		}
		write_text(o.markers_out, text);
	}

	const auto& s = o.source.sim;
	const auto intervals = static_cast<std::int64_t>(std::ceil(s.duration / o.interval));
	std::cout << "scenario " << o.source.scenario << " seed " << s.seed << " duration " << fmt(s.duration)
	          << " s container " << s.container_id << "\n";
	std::cout << "events " << trace.events.size() << " intervals " << intervals << "\n";
	if (o.source.scenario == "httpflood") {
		const auto windows = flood_windows(s);
		std::cout << "attack windows " << windows.size() << "\n";
		for (const auto& w : windows) {
			std::cout << "  flood " << fmt(w.start_s) << " - " << fmt(w.end_s) << " s\n";
		}
	} else if (o.source.scenario == "cpuminer") {
		for (const auto& m : trace.markers) {
			std::cout << "  phase " << m.label << " at " << fmt(m.t) << " s\n";
		}
	}
	return kOk;
}

int cmd_train(const Options& o, const PolicyFlags& flags) {
	if (o.model.empty() == o.model_dir.empty()) {
		throw InvalidConfig("train needs exactly one of --model-out or --model-dir");
	}
	const auto stream = build_interval_stream(load_events(o.source), o.interval);
	const auto ids = containers_of(stream);
	if (ids.empty()) {
		throw InsufficientData(0, o.train.accumulation_target);
	}
	if (!o.model.empty() && ids.size() != 1) {
		throw InvalidConfig("trace has " + std::to_string(ids.size()) + " containers; use --model-dir");
	}
	const auto policy = policy_spec(o, flags);

	std::string curve_csv = "container,epoch,recon,kl\n";
	for (const auto& id : ids) {
		std::vector<ActivityVector> dataset;
		for (const auto& v : stream.vectors) {
			if (v.key.container_id == id) {
				dataset.push_back(v);
			}
		}
		const auto bundle = train_bundle(id, dataset, o.train, policy);
		fs::path path = o.model;
		if (!o.model_dir.empty()) {
			fs::create_directories(o.model_dir);
			path = bundle_path(o.model_dir, id);
		}
		save_model(path, bundle);

		const auto& c = bundle.curve;
		std::cout << "container " << id << " intervals " << dataset.size() << " -> " << path.string() << "\n";
		std::cout << "  epoch       recon          kl\n";
		for (std::size_t e = 0; e < c.recon.size(); ++e) {
			char line[96];
			std::snprintf(line, sizeof line, "  %5zu %11.6g %11.6g\n", e + 1, c.recon[e], c.kl[e]);
			std::cout << line;
			curve_csv += id + "," + std::to_string(e + 1) + "," + fmt(c.recon[e]) + "," + fmt(c.kl[e]) + "\n";
		}
		std::cout << "  r_last " << fmt(c.r_last) << " r_mean " << fmt(c.r_mean) << " r_sd " << fmt(c.r_sd)
		          << " r_th " << fmt(threshold_of(bundle.policy)) << "\n";
	}
	if (!o.curve_out.empty()) {
		write_text(o.curve_out, curve_csv);
	}
	return kOk;
}

std::unique_ptr<Sink> make_sink(const SinkOptions& s) {
	if (s.kind == "none") {
		return nullptr;
	}
	if (s.kind == "file") {
		if (s.path.empty()) {
			throw InvalidConfig("--sink file needs --sink-path");
		}
		return std::make_unique<FileSink>(s.path);
	}
	if (s.kind == "http") {
		return std::make_unique<HttpBulkSink>(s.endpoint);
	}
	throw InvalidConfig("unknown sink '" + s.kind + "'");
}

int cmd_assess(const Options& o, const PolicyFlags& flags) {
	const auto stream = build_interval_stream(load_events(o.source), o.interval);
	const auto bundles = load_bundles(o, stream);
	Publisher publisher(publisher_config(o, flags));
	for (const auto& b : bundles) {
		publisher.models().install(b);
	}

	auto sink = make_sink(o.sink);
	std::optional<Spool> spool;
	if (!o.sink.spool_dir.empty()) {
		spool.emplace(o.sink.spool_dir);
		if (sink) {
			spool->replay(*sink);
		}
	}
	const auto records = run_adaptive(stream, publisher, sink.get(), spool ? &*spool : nullptr);

	std::string text;
	std::size_t unstable = 0;
	std::cout << "container        interval   start   events        recon         r_th  verdict   mode\n";
	for (const auto& r : records) {
		text += serialize_assess_record(r);
		text += '\n';
		unstable += r.unstable() ? 1 : 0;
		char line[192];
		std::snprintf(line, sizeof line, "%-16s %8lld %7g %8zu %12.6g %12.6g  %-8s  %s\n", r.key.container_id.c_str(),
		              static_cast<long long>(r.key.interval_index), r.key.start, r.events,
		              r.recon_error.value_or(0.0), r.r_th.value_or(0.0),
		              r.recon_error ? (r.unstable() ? "unstable" : "stable") : "none", mode_name(r.mode));
		std::cout << line;
	}
	std::cout << "intervals " << records.size() << " unstable " << unstable << "\n";
	if (!o.out.empty()) {
		write_text(o.out, text);
	}
	if (spool && !spool->pending().empty()) {
		std::cerr << "warning: " << spool->pending().size() << " payload(s) spooled in " << o.sink.spool_dir << "\n";
	}
	return kOk;
}

int cmd_bench(const Options& o, const PolicyFlags& flags) {
	const auto stream = build_interval_stream(load_events(o.source), o.interval);
	const auto bundles = load_bundles(o, stream);
	const auto report = run_bench(stream, bundles, publisher_config(o, flags), o.sink.endpoint.indices);

	auto row = [](const char* name, const ModeCost& m) {
		char line[160];
		std::snprintf(line, sizeof line, "%-9s %9zu %10zu %14llu %12.6f %9zu\n", name, m.intervals, m.events,
		              static_cast<unsigned long long>(m.bytes), m.wall_seconds, m.unstable_intervals);
		std::cout << line;
	};
	std::cout << "mode      intervals     events          bytes     wall (s)  unstable\n";
	row("standard", report.standard);
	row("adaptive", report.adaptive);
	std::cout << "bytes ratio " << (report.bytes_ratio ? fmt(*report.bytes_ratio) : "n/a") << "\n";
	std::cout << "time ratio  " << (report.time_ratio ? fmt(*report.time_ratio) : "n/a") << "\n";
	if (!o.out.empty()) {
		write_text(o.out, cost_report_json(report).dump(2) + "\n");
	}
	return kOk;
}

void add_source_options(CLI::App& app, SourceOptions& s) {
	auto* g = app.add_option_group("source", "Trace source");
	g->add_option("--trace", s.trace, "Trace file (one JSON event per line)");
	g->add_option("--scenario", s.scenario, "Simulated scenario")
	    ->check(CLI::IsMember({"baseline", "cpuminer", "httpflood"}));
	g->add_option("--sim-seed", s.sim.seed, "Simulator seed")->capture_default_str();
	g->add_option("--duration", s.sim.duration, "Simulated duration in seconds")->capture_default_str();
	g->add_option("--container", s.sim.container_id, "Simulated container id")->capture_default_str();
	g->add_option("--rate", s.sim.base_request_rate, "Baseline requests per second")->capture_default_str();
	g->add_option("--flood-factor", s.sim.flood_factor, "Request-rate multiplier during a flood")
	    ->capture_default_str();
	g->add_option("--flood-on", s.sim.flood_on_s, "Flood window length (s)")->capture_default_str();
	g->add_option("--flood-off", s.sim.flood_off_s, "Quiet gap before each flood (s)")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
	Options o;
	CLI::App app{"Adaptive forensic publishing with a variational autoencoder"};
	app.fallthrough();
	app.require_subcommand(1);
	app.set_config("--config", "", "Read options from a TOML/INI file (keys are long option names)");

	app.add_option("--interval", o.interval, "Interval length in seconds")->capture_default_str();
	auto* tg = app.add_option_group("training", "VAE training");
	tg->add_option("--epochs", o.train.epochs)->capture_default_str();
	tg->add_option("--batch-size", o.train.batch_size)->capture_default_str();
	tg->add_option("--learning-rate", o.train.learning_rate)->capture_default_str();
	tg->add_option("--beta1", o.train.beta1)->capture_default_str();
	tg->add_option("--beta2", o.train.beta2)->capture_default_str();
	tg->add_option("--adam-eps", o.train.epsilon)->capture_default_str();
	tg->add_option("--seed", o.train.seed, "Training seed")->capture_default_str();
	tg->add_option("--accumulation-target", o.train.accumulation_target, "Intervals collected before training")
	    ->capture_default_str();
	tg->add_option("--kl-weight", o.train.kl_weight)->capture_default_str();
	tg->add_option("--hidden", o.train.hidden, "Hidden layer widths")->delimiter(',')->capture_default_str();
	tg->add_option("--latent-dim", o.train.latent_dim)->capture_default_str();

	auto* pg = app.add_option_group("threshold", "Stability threshold");
	PolicyFlags flags;
	flags.k = pg->add_option("--k", o.k, "r_th = r_mean + k * r_sd")->capture_default_str();
	flags.heuristic = pg->add_option("--heuristic", o.heuristic, "Fixed r_th")->excludes(flags.k);

	app.add_option("--cache-capacity", o.cache_capacity, "Cached intervals per container")->capture_default_str();

	auto* sg = app.add_option_group("sink", "Publishing sink");
	sg->add_option("--sink", o.sink.kind, "Where assess publishes actions")
	    ->check(CLI::IsMember({"none", "file", "http"}))
	    ->capture_default_str();
	sg->add_option("--sink-path", o.sink.path, "Record file for --sink file");
	sg->add_option("--endpoint-host", o.sink.endpoint.host)->capture_default_str();
	sg->add_option("--endpoint-port", o.sink.endpoint.port)->capture_default_str();
	sg->add_option("--endpoint-path", o.sink.endpoint.path)->capture_default_str();
	sg->add_option("--latent-index", o.sink.endpoint.indices.latent)->capture_default_str();
	sg->add_option("--forensic-index", o.sink.endpoint.indices.forensic)->capture_default_str();
	sg->add_option("--auth-header", o.sink.endpoint.auth_header, "Authorization header value");
	sg->add_option("--timeout", o.sink.endpoint.timeout_seconds, "HTTP timeout (s)")->capture_default_str();
	sg->add_option("--spool-dir", o.sink.spool_dir, "Spool for undeliverable payloads");

	add_source_options(app, o.source);

	auto* sim = app.add_subcommand("simulate", "Write a simulated trace");
	sim->add_option("--out", o.out, "Trace file to write")->required();
	sim->add_option("--markers-out", o.markers_out, "Phase marker file (time<TAB>label)");

	auto* train = app.add_subcommand("train", "Train a model bundle on a trace");
	auto* model_out = train->add_option("--model-out", o.model, "Bundle file (single-container traces)");
	train->add_option("--model-dir", o.model_dir, "Directory for per-container bundles")->excludes(model_out);
	train->add_option("--curve-out", o.curve_out, "Training curve CSV");

	auto* assess = app.add_subcommand("assess", "Score every interval and choose a publish mode");
	auto* model_in = assess->add_option("--model", o.model, "Bundle applied to every container");
	assess->add_option("--model-dir", o.model_dir, "Directory of per-container bundles")->excludes(model_in);
	assess->add_option("--out", o.out, "Per-interval record file (NDJSON)");

	auto* bench = app.add_subcommand("bench", "Compare standard and adaptive publishing cost");
	auto* bench_model = bench->add_option("--model", o.model, "Bundle applied to every container");
	bench->add_option("--model-dir", o.model_dir, "Directory of per-container bundles")->excludes(bench_model);
	bench->add_option("--out", o.out, "Cost report JSON");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int rc = app.exit(e);
		return rc == 0 ? kOk : kUsage;
	}

	try {
		o.train.validate();
		if (!(o.interval > 0.0)) {
			throw InvalidConfig("--interval must be > 0");
		}
		if (o.cache_capacity == 0) {
			throw InvalidConfig("--cache-capacity must be >= 1");
		}
		if (sim->parsed()) {
			return cmd_simulate(o);
		}
		if (train->parsed()) {
			return cmd_train(o, flags);
		}
		if (assess->parsed()) {
			return cmd_assess(o, flags);
		}
		return cmd_bench(o, flags);
	} catch (const Error& e) {
		std::cerr << "error: " << e.what() << "\n";
		return exit_code_for(e.kind());
	} catch (const fs::filesystem_error& e) {
		std::cerr << "error: " << e.what() << "\n";
		return kIo;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return kInternal;
	}
}
